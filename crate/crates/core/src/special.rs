//! Binomial probabilities that stay accurate for large electorates.

use statrs::function::factorial::ln_binomial;

use crate::sum::compensated_sum;

/// Below this `r` the central binomial probability is an exact running product.
const PRODUCT_CUTOFF: u64 = 2_000;

/// `C(2r, r) / 4^r`, the probability that `2r` fair coins split evenly.
///
/// Small `r` uses the product `prod (2k-1)/(2k)`; large `r` uses the Stirling
/// series for `ln (2r)! - 2 ln r!`, whose truncation error is below `r^-7`.
/// Relative error stays under 1e-12 for every `r` up to 10^8.
pub fn central_binomial_prob(r: u64) -> f64 {
    if r <= PRODUCT_CUTOFF {
        let mut p = 1.0;
        for k in 1..=r {
            p *= (2 * k - 1) as f64 / (2 * k) as f64;
        }
        p
    } else {
        let r = r as f64;
        // ln n! = n ln n - n + ln(2 pi n)/2 + stirling_tail(n)
        let tail = |n: f64| {
            let n2 = n * n;
            (1.0 / 12.0 - (1.0 / 360.0 - 1.0 / (1260.0 * n2)) / n2) / n
        };
        let log_p = -0.5 * (std::f64::consts::PI * r).ln() + tail(2.0 * r) - 2.0 * tail(r);
        log_p.exp()
    }
}

/// Binomial(n, u) probability mass function at every k in 0..=n.
pub fn binomial_pmfs(n: u64, u: f64) -> Vec<f64> {
    debug_assert!(u > 0.0 && u < 1.0);
    let (ln_u, ln_v) = (u.ln(), (1.0 - u).ln());
    (0..=n)
        .map(|k| (ln_binomial(n, k) + k as f64 * ln_u + (n - k) as f64 * ln_v).exp())
        .collect()
}

/// `P(Bin(n, u) >= k)`.
pub fn binomial_upper_tail(n: u64, u: f64, k: u64) -> f64 {
    if k == 0 {
        return 1.0;
    }
    if k > n {
        return 0.0;
    }
    let (ln_u, ln_v) = (u.ln(), (1.0 - u).ln());
    compensated_sum((k..=n).map(|i| (ln_binomial(n, i) + i as f64 * ln_u + (n - i) as f64 * ln_v).exp()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn exact_central(r: u64) -> f64 {
        // C(2r,r)/4^r for small r using integer arithmetic
        let mut c: u128 = 1;
        for k in 0..r {
            c = c * (2 * r - k) as u128 / (k + 1) as u128;
        }
        c as f64 / 4f64.powi(r as i32)
    }

    #[test]
    fn central_matches_integer_binomials() {
        for r in 0..30 {
            let a = central_binomial_prob(r);
            let b = exact_central(r);
            assert!((a - b).abs() <= 1e-15 * b, "r={r}: {a} vs {b}");
        }
    }

    #[test]
    fn stirling_branch_continues_product_branch() {
        // evaluate both routes on either side of the cutoff
        for r in [PRODUCT_CUTOFF + 1, 5_000, 50_000] {
            let mut p = 1.0;
            for k in 1..=r {
                p *= (2 * k - 1) as f64 / (2 * k) as f64;
            }
            let s = central_binomial_prob(r);
            assert!(((s - p) / p).abs() < 1e-11, "r={r}: {s} vs {p}");
        }
    }

    #[test]
    fn central_asymptote() {
        let r = 100_000_000u64;
        let p = central_binomial_prob(r);
        let leading = 1.0 / (std::f64::consts::PI * r as f64).sqrt();
        let corrected = leading * (1.0 - 1.0 / (8.0 * r as f64));
        assert!(((p - corrected) / p).abs() < 1e-15);
    }

    #[test]
    fn pmfs_sum_to_one() {
        for (n, u) in [(1, 0.5), (10, 0.3), (1001, 1.0 / 3.0), (10_001, 0.5)] {
            let s = compensated_sum(binomial_pmfs(n, u));
            assert!((s - 1.0).abs() < 1e-11, "n={n}: {s}");
        }
    }

    #[test]
    fn tail_edges() {
        assert_eq!(binomial_upper_tail(5, 0.3, 0), 1.0);
        assert_eq!(binomial_upper_tail(5, 0.3, 6), 0.0);
        assert!((binomial_upper_tail(2, 0.5, 1) - 0.75).abs() < 1e-15);
        assert!((binomial_upper_tail(3, 0.2, 3) - 0.008).abs() < 1e-15);
    }
}
