//! Within-state vote models and the influence of a single voter on the
//! majority decision `S = sum_i X(i) > 0`.
//!
//! Electorates are always odd (`m = 2r + 1`) so the majority has no ties.
//! Every quantity has two routes: a closed-form or quadrature evaluation
//! (the methods on [`VoteModel`]) and [`brute_force_report`], which walks the
//! full joint law of the vote vector and serves as the oracle for the former.

use std::fmt;

use crate::error::{Error, Result};
use crate::quadrature;
use crate::special::{binomial_pmfs, binomial_upper_tail, central_binomial_prob};
use crate::sum::{compensated_sum, Accumulator};
use crate::union::WeightVector;

/// Largest electorate for exhaustive enumeration of sign vectors.
pub const ENUMERATION_LIMIT: usize = 25;
/// Largest ring for the circular-majority model.
pub const CIRCULAR_LIMIT: usize = 24;
/// Smallest ring for the circular-majority model.
pub const CIRCULAR_MIN: usize = 4;

const ATOM_TOL: f64 = 1e-12;
const QUADRATURE_TOL: f64 = 1e-10;

/// Distribution of the shared bias `U` in the collective-bias model.
#[derive(Debug, Clone, PartialEq)]
pub enum MixingLaw {
    PointMass(f64),
    UniformOn01,
    /// Two values, each with probability one half.
    TwoAtoms(f64, f64),
    /// `(value, probability)` pairs.
    DiscreteAtoms(Vec<(f64, f64)>),
}

impl MixingLaw {
    /// Checks that the law is a probability on (0,1) invariant under `u -> 1-u`.
    pub fn validate(&self) -> Result<()> {
        match self.atoms() {
            None => Ok(()),
            Some(atoms) => check_atoms(&atoms),
        }
    }

    fn atoms(&self) -> Option<Vec<(f64, f64)>> {
        match self {
            MixingLaw::PointMass(u) => Some(vec![(*u, 1.0)]),
            MixingLaw::UniformOn01 => None,
            MixingLaw::TwoAtoms(a, b) => Some(vec![(*a, 0.5), (*b, 0.5)]),
            MixingLaw::DiscreteAtoms(atoms) => Some(atoms.clone()),
        }
    }

    /// `E[(2U - 1)^2]`, the covariance of two distinct votes.
    #[cfg(test)]
    pub(crate) fn vote_covariance(&self) -> f64 {
        match self.atoms() {
            None => 1.0 / 3.0,
            Some(atoms) => compensated_sum(atoms.iter().map(|&(u, p)| p * (2.0 * u - 1.0).powi(2))),
        }
    }
}

fn check_atoms(atoms: &[(f64, f64)]) -> Result<()> {
    if atoms.is_empty() {
        return Err(Error::domain("mixing law has no atoms"));
    }
    for &(u, p) in atoms {
        if !(u > 0.0 && u < 1.0) {
            return Err(Error::domain(format!("atom {u} lies outside (0,1)")));
        }
        if !(p > 0.0 && p.is_finite()) {
            return Err(Error::domain(format!("atom probability {p} must be positive")));
        }
    }
    let total = compensated_sum(atoms.iter().map(|a| a.1));
    if (total - 1.0).abs() > ATOM_TOL {
        return Err(Error::domain(format!("atom probabilities sum to {total}, not 1")));
    }
    let mass_at = |x: f64| compensated_sum(atoms.iter().filter(|a| (a.0 - x).abs() <= ATOM_TOL).map(|a| a.1));
    for &(u, _) in atoms {
        if (mass_at(u) - mass_at(1.0 - u)).abs() > ATOM_TOL {
            return Err(Error::domain(format!("mixing law is not symmetric: mass at {u} differs from mass at {}", 1.0 - u)));
        }
    }
    Ok(())
}

/// A probabilistic model for the votes inside one state.
#[derive(Debug, Clone, PartialEq)]
pub enum VoteModel {
    /// Independent fair coin flips.
    IndependentFair,
    /// Conditionally independent votes given a shared random bias.
    CollectiveBias(MixingLaw),
    /// `X(i)` is the majority of three neighbouring fair coins on a ring.
    CircularMajority,
}

/// How a quantity was evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Route {
    ClosedForm,
    Quadrature,
    Enumeration,
}

impl fmt::Display for Route {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Route::ClosedForm => "closed form",
            Route::Quadrature => "closed form + adaptive quadrature",
            Route::Enumeration => "exact enumeration",
        })
    }
}

/// Influence measures of one voter in an electorate of size `m`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InfluenceReport {
    pub m: usize,
    /// Absolute influence: probability of being pivotal.
    pub alpha: f64,
    /// Conditional influence `P(A | X=+1) - P(A | X=-1)`.
    pub kappa: f64,
    /// Probability of voting with the winning side.
    pub eta: f64,
    /// `E|S|`.
    pub mean_abs_margin: f64,
    /// `E|N_for - N_against|`.
    pub mean_edge: f64,
}

// Internal shape of a model once validated.
enum Kernel {
    Atoms(Vec<(f64, f64)>),
    Uniform,
    Circular,
}

impl VoteModel {
    fn kernel(&self) -> Result<Kernel> {
        Ok(match self {
            VoteModel::IndependentFair => Kernel::Atoms(vec![(0.5, 1.0)]),
            VoteModel::CollectiveBias(law) => {
                law.validate()?;
                match law.atoms() {
                    Some(atoms) => Kernel::Atoms(atoms),
                    None => Kernel::Uniform,
                }
            }
            VoteModel::CircularMajority => Kernel::Circular,
        })
    }

    fn check_size(&self, m: usize) -> Result<()> {
        if m.is_multiple_of(2) {
            return Err(Error::domain(format!("electorate size {m} must be odd")));
        }
        if let VoteModel::CircularMajority = self {
            if m < CIRCULAR_MIN {
                return Err(Error::domain(format!("circular majority needs at least {CIRCULAR_MIN} voters, got {m}")));
            }
            if m > CIRCULAR_LIMIT {
                return Err(Error::Size { what: "circular electorate", size: m, limit: CIRCULAR_LIMIT, hint: "" });
            }
        }
        Ok(())
    }

    fn prepare(&self, m: usize) -> Result<Kernel> {
        self.check_size(m)?;
        self.kernel()
    }

    /// Which evaluation route [`Self::report`] takes.
    pub fn route(&self) -> Route {
        match self {
            VoteModel::IndependentFair => Route::ClosedForm,
            VoteModel::CollectiveBias(MixingLaw::UniformOn01) => Route::Quadrature,
            VoteModel::CollectiveBias(_) => Route::ClosedForm,
            VoteModel::CircularMajority => Route::Enumeration,
        }
    }

    /// Probability that voter `i` is pivotal.
    pub fn absolute_influence(&self, m: usize) -> Result<f64> {
        let r = (m / 2) as u64;
        Ok(match self.prepare(m)? {
            Kernel::Atoms(atoms) => {
                let central = central_binomial_prob(r);
                compensated_sum(atoms.iter().map(|&(u, p)| p * central * (4.0 * u * (1.0 - u)).powi(r as i32)))
            }
            Kernel::Uniform => 1.0 / m as f64,
            Kernel::Circular => CircularCounts::enumerate(m).alpha(),
        })
    }

    /// `P(A | X(i) = 1) - P(A | X(i) = -1)`.
    pub fn conditional_influence(&self, m: usize) -> Result<f64> {
        if let VoteModel::IndependentFair = self {
            return self.absolute_influence(m);
        }
        let r = (m / 2) as u64;
        // P(A, X=+1) - P(A, X=-1) given U = u, where the other 2r votes must
        // reach at least r (resp. r+1) in favour.
        let split = |u: f64| u * binomial_upper_tail(2 * r, u, r) - (1.0 - u) * binomial_upper_tail(2 * r, u, r + 1);
        Ok(match self.prepare(m)? {
            Kernel::Atoms(atoms) => 2.0 * compensated_sum(atoms.iter().map(|&(u, p)| p * split(u))),
            Kernel::Uniform => 2.0 * quadrature::integrate(split, 0.0, 1.0, QUADRATURE_TOL / 2.0),
            Kernel::Circular => CircularCounts::enumerate(m).kappa(),
        })
    }

    /// `eta = (1 + kappa) / 2`.
    pub fn success_probability(&self, m: usize) -> Result<f64> {
        Ok(0.5 * (1.0 + self.conditional_influence(m)?))
    }

    /// Law of the number `H` of votes in favour, `P(H = k)` for `k = 0..=m`.
    pub fn count_distribution(&self, m: usize) -> Result<Vec<f64>> {
        Ok(match self.prepare(m)? {
            Kernel::Atoms(atoms) => {
                let mut dist = vec![0.0; m + 1];
                for (u, p) in atoms {
                    for (d, b) in dist.iter_mut().zip(binomial_pmfs(m as u64, u)) {
                        *d += p * b;
                    }
                }
                dist
            }
            // Beta integrals: int C(m,k) u^k (1-u)^(m-k) du = 1/(m+1)
            Kernel::Uniform => vec![1.0 / (m + 1) as f64; m + 1],
            Kernel::Circular => CircularCounts::enumerate(m).count_distribution(),
        })
    }

    /// `E|S|`, evaluated from the law of `S`.
    pub fn mean_abs_margin(&self, m: usize) -> Result<f64> {
        let dist = self.count_distribution(m)?;
        Ok(compensated_sum(dist.iter().enumerate().map(|(k, p)| p * (2.0 * k as f64 - m as f64).abs())))
    }

    /// `E(S^2)`.
    pub fn second_moment(&self, m: usize) -> Result<f64> {
        let dist = self.count_distribution(m)?;
        Ok(compensated_sum(dist.iter().enumerate().map(|(k, p)| p * (2.0 * k as f64 - m as f64).powi(2))))
    }

    /// Council weight minimising the mean squared error between the state's
    /// vote margin and its weighted delegate vote: `E|S|`.
    pub fn least_squares_weight(&self, m: usize) -> Result<f64> {
        self.mean_abs_margin(m)
    }

    pub fn report(&self, m: usize) -> Result<InfluenceReport> {
        let alpha = self.absolute_influence(m)?;
        let kappa = self.conditional_influence(m)?;
        let dist = self.count_distribution(m)?;
        let mean_abs_margin = compensated_sum(dist.iter().enumerate().map(|(k, p)| p * (2.0 * k as f64 - m as f64).abs()));
        let mean_edge = compensated_sum(dist.iter().enumerate().map(|(k, p)| p * (k as f64 - (m - k) as f64).abs()));
        Ok(InfluenceReport { m, alpha, kappa, eta: 0.5 * (1.0 + kappa), mean_abs_margin, mean_edge })
    }
}

/// Sum over states of `Var(S_j - w_j chi_j)` for independent states.
pub fn least_squares_objective(models: &[VoteModel], sizes: &[usize], weights: &WeightVector) -> Result<f64> {
    if models.len() != sizes.len() || models.len() != weights.len() {
        return Err(Error::domain(format!(
            "{} models, {} sizes and {} weights do not line up",
            models.len(),
            sizes.len(),
            weights.len()
        )));
    }
    let mut acc = Accumulator::new();
    for ((model, &m), &w) in models.iter().zip(sizes).zip(weights.as_slice()) {
        // E(S chi) = E|S| since chi = sign(S)
        acc.add(model.second_moment(m)? - 2.0 * w * model.mean_abs_margin(m)? + w * w);
    }
    Ok(acc.value())
}

// ---------------------------------------------------------------------------
// Circular majority

#[inline]
fn ring_mask(m: usize) -> u32 {
    ((1u64 << m) - 1) as u32
}

/// Votes on a ring of `m` seats given coin tosses `z` (bit set = +1).
#[inline]
fn circular_votes(z: u32, m: usize) -> u32 {
    let mask = ring_mask(m);
    let prev = ((z << 1) | (z >> (m - 1))) & mask;
    let next = ((z >> 1) | (z << (m - 1))) & mask;
    (prev & z) | (z & next) | (prev & next)
}

/// Integer tallies for voter 0 over all `2^m` coin vectors.
struct CircularCounts {
    m: usize,
    histogram: Vec<u64>,
    pivotal: u64,
    plus: u64,
    pass_and_plus: u64,
    pass_and_minus: u64,
}

impl CircularCounts {
    fn enumerate(m: usize) -> Self {
        let r = (m / 2) as u32;
        let mut c = CircularCounts { m, histogram: vec![0; m + 1], pivotal: 0, plus: 0, pass_and_plus: 0, pass_and_minus: 0 };
        for z in 0..(1u32 << m) {
            let x = circular_votes(z, m);
            let h = x.count_ones();
            let own = x & 1;
            c.histogram[h as usize] += 1;
            if h - own == r {
                c.pivotal += 1;
            }
            let pass = 2 * h as usize > m;
            if own == 1 {
                c.plus += 1;
                c.pass_and_plus += pass as u64;
            } else {
                c.pass_and_minus += pass as u64;
            }
        }
        c
    }

    fn total(&self) -> f64 {
        (1u64 << self.m) as f64
    }

    fn alpha(&self) -> f64 {
        self.pivotal as f64 / self.total()
    }

    fn kappa(&self) -> f64 {
        let minus = (1u64 << self.m) - self.plus;
        self.pass_and_plus as f64 / self.plus as f64 - self.pass_and_minus as f64 / minus as f64
    }

    fn count_distribution(&self) -> Vec<f64> {
        self.histogram.iter().map(|&n| n as f64 / self.total()).collect()
    }
}

fn check_ring(m: usize) -> Result<()> {
    if m < CIRCULAR_MIN {
        return Err(Error::domain(format!("circular majority needs at least {CIRCULAR_MIN} voters, got {m}")));
    }
    if m > CIRCULAR_LIMIT {
        return Err(Error::Size { what: "circular electorate", size: m, limit: CIRCULAR_LIMIT, hint: "" });
    }
    Ok(())
}

/// Number of coin vectors producing each vote vector (bit `i` set means `X(i) = +1`).
pub fn circular_joint_counts(m: usize) -> Result<Vec<u32>> {
    check_ring(m)?;
    let mut counts = vec![0u32; 1 << m];
    for z in 0..(1u32 << m) {
        counts[circular_votes(z, m) as usize] += 1;
    }
    Ok(counts)
}

/// Exact covariance of `X(i)` and `X(j)` under the circular-majority model.
pub fn circular_pair_correlation(m: usize, i: usize, j: usize) -> Result<f64> {
    check_ring(m)?;
    if i >= m || j >= m {
        return Err(Error::domain(format!("voter index out of range for a ring of {m}")));
    }
    let mut total: i64 = 0;
    for z in 0..(1u32 << m) {
        let x = circular_votes(z, m);
        let same = ((x >> i) ^ (x >> j)) & 1 == 0;
        total += if same { 1 } else { -1 };
    }
    Ok(total as f64 / (1u64 << m) as f64)
}

// ---------------------------------------------------------------------------
// Enumeration oracle

/// Computes every report field from the explicit joint law of the `m` votes.
///
/// The probability of each sign vector is written down directly: products of
/// `u^(#+) (1-u)^(#-)` summed over atoms, Beta integrals for the uniform law,
/// and preimage counts for the circular model.
pub fn brute_force_report(model: &VoteModel, m: usize) -> Result<InfluenceReport> {
    model.check_size(m)?;
    if m > ENUMERATION_LIMIT {
        return Err(Error::Size { what: "electorate", size: m, limit: ENUMERATION_LIMIT, hint: "" });
    }
    let kernel = model.kernel()?;

    // probability of a given sign vector
    let by_count: Vec<f64>;
    let joint: Vec<u32>;
    let prob: Box<dyn Fn(u32) -> f64> = match kernel {
        Kernel::Atoms(atoms) => {
            by_count = (0..=m as i32)
                .map(|a| compensated_sum(atoms.iter().map(|&(u, p)| p * u.powi(a) * (1.0 - u).powi(m as i32 - a))))
                .collect();
            Box::new(|s: u32| by_count[s.count_ones() as usize])
        }
        Kernel::Uniform => {
            // a! b! / (m+1)! = 1 / ((m+1) C(m, a))
            by_count = (0..=m as u64).map(|a| 1.0 / ((m as u64 + 1) * exact_binomial(m as u64, a)) as f64).collect();
            Box::new(|s: u32| by_count[s.count_ones() as usize])
        }
        Kernel::Circular => {
            joint = circular_joint_counts(m)?;
            let scale = 1.0 / (1u64 << m) as f64;
            Box::new(move |s: u32| joint[s as usize] as f64 * scale)
        }
    };

    let mut alpha = Accumulator::new();
    let mut plus = Accumulator::new();
    let mut pass_plus = Accumulator::new();
    let mut pass_minus = Accumulator::new();
    let mut fail_minus = Accumulator::new();
    let mut margin = Accumulator::new();
    let mut edge = Accumulator::new();
    let passes = |s: u32| 2 * s.count_ones() as usize > m;

    for sigma in 0..(1u32 << m) {
        let p = prob(sigma);
        if p == 0.0 {
            continue;
        }
        let up = sigma | 1;
        let down = sigma & !1;
        alpha.add(p * (passes(up) as u8 as f64 - passes(down) as u8 as f64));
        let pass = passes(sigma);
        if sigma & 1 == 1 {
            plus.add(p);
            if pass {
                pass_plus.add(p);
            }
        } else if pass {
            pass_minus.add(p);
        } else {
            fail_minus.add(p);
        }
        let h = sigma.count_ones() as f64;
        let sum: f64 = (0..m).map(|i| if sigma >> i & 1 == 1 { 1.0 } else { -1.0 }).sum();
        margin.add(p * sum.abs());
        edge.add(p * (h - (m as f64 - h)).abs());
    }

    let p_plus = plus.value();
    let p_minus = 1.0 - p_plus;
    let kappa = pass_plus.value() / p_plus - pass_minus.value() / p_minus;
    Ok(InfluenceReport {
        m,
        alpha: alpha.value(),
        kappa,
        eta: pass_plus.value() + fail_minus.value(),
        mean_abs_margin: margin.value(),
        mean_edge: edge.value(),
    })
}

fn exact_binomial(n: u64, k: u64) -> u64 {
    let k = k.min(n - k);
    (0..k).fold(1u64, |c, i| c * (n - i) / (i + 1))
}
