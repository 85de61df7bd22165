//! Adaptive Gauss–Legendre quadrature on a bounded interval.

use std::f64::consts::PI;
use std::sync::OnceLock;

use crate::sum::Accumulator;

struct Rule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl Rule {
    /// Nodes and weights on [-1, 1] by Newton iteration on the Legendre polynomial.
    fn legendre(n: usize) -> Self {
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        for i in 0..n.div_ceil(2) {
            let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (mut p0, mut p1) = (1.0, x);
                for k in 2..=n {
                    let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                    p0 = p1;
                    p1 = p2;
                }
                dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
                let dx = p1 / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        Self { nodes, weights }
    }

    fn apply<F: Fn(f64) -> f64>(&self, f: &F, a: f64, b: f64) -> f64 {
        let (mid, half) = (0.5 * (a + b), 0.5 * (b - a));
        let mut acc = Accumulator::new();
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            acc.add(w * f(mid + half * x));
        }
        half * acc.value()
    }
}

fn rules() -> &'static (Rule, Rule) {
    static RULES: OnceLock<(Rule, Rule)> = OnceLock::new();
    RULES.get_or_init(|| (Rule::legendre(10), Rule::legendre(20)))
}

const MAX_DEPTH: u32 = 40;

/// Integrates `f` over `[a, b]` to absolute tolerance `tol`.
///
/// Each panel compares a 10-point and a 20-point rule and is bisected until the
/// two agree within the panel's share of the tolerance.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> f64 {
    let (coarse, fine) = rules();
    let mut total = Accumulator::new();
    let mut stack = vec![(a, b, tol, 0u32)];
    while let Some((lo, hi, eps, depth)) = stack.pop() {
        let g10 = coarse.apply(&f, lo, hi);
        let g20 = fine.apply(&f, lo, hi);
        if (g20 - g10).abs() <= eps || depth >= MAX_DEPTH {
            total.add(g20);
        } else {
            let mid = 0.5 * (lo + hi);
            stack.push((mid, hi, 0.5 * eps, depth + 1));
            stack.push((lo, mid, 0.5 * eps, depth + 1));
        }
    }
    total.value()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weights_sum_to_two() {
        for n in [10, 20] {
            let r = Rule::legendre(n);
            let s: f64 = r.weights.iter().sum();
            assert!((s - 2.0).abs() < 1e-14);
        }
    }

    #[test]
    fn exact_for_low_degree_polynomials() {
        let v = integrate(|x| x.powi(7) - 3.0 * x * x, 0.0, 2.0, 1e-12);
        assert!((v - (32.0 - 8.0)).abs() < 1e-12);
    }

    #[test]
    fn beta_integral_high_degree() {
        // int_0^1 u^40 (1-u)^40 du = 40! 40! / 81!
        let v = integrate(|u: f64| (u * (1.0 - u)).powi(40), 0.0, 1.0, 1e-30);
        let exact = (statrs::function::factorial::ln_factorial(40) * 2.0
            - statrs::function::factorial::ln_factorial(81))
        .exp();
        assert!(((v - exact) / exact).abs() < 1e-10);
    }

    #[test]
    fn smooth_transcendental() {
        let v = integrate(|x: f64| x.sin(), 0.0, PI, 1e-12);
        assert!((v - 2.0).abs() < 1e-12);
    }
}
