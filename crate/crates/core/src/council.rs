//! Exact state influences in the weighted council vote.
//!
//! A motion passes iff `V = sum_j w_j chi_j > q W` with independent fair
//! delegate votes `chi_j`. State `j` is pivotal iff the signed weight of the
//! other states, `Z_j`, lands in `(qW - w_j, qW + w_j]`. The probability of
//! that event is computed by visiting all `2^(s-1)` sign vectors of the other
//! states in Gray-code order, one addition per step.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::sum::{compensated_sum, Accumulator};
use crate::union::{QuotaSpec, WeightVector};

/// Largest union handled by exact enumeration.
pub const EXACT_STATE_LIMIT: usize = 30;

/// The running sum is rebuilt from scratch this often.
const REFRESH_PERIOD: u64 = 1 << 20;

/// Exact council analysis at one quota.
#[derive(Debug, Clone, PartialEq)]
pub struct CouncilAnalysis {
    pub quota: QuotaSpec,
    /// Probability that each state is pivotal.
    pub beta: Vec<f64>,
    /// `100 beta_j / B`.
    pub beta_normalised: Vec<f64>,
    /// `100 w_j / W`.
    pub weight_normalised: Vec<f64>,
    /// `beta_normalised / weight_normalised`.
    pub ratios: Vec<f64>,
    /// `B = sum_j beta_j`.
    pub beta_total: f64,
    /// `Q = sum_j (weight_normalised_j - beta_normalised_j)^2`.
    pub objective: f64,
    /// Voter-level influence `I_j = alpha_j beta_j`.
    pub total_influence: Vec<f64>,
}

fn check_exact(w: &WeightVector, q: &QuotaSpec) -> Result<()> {
    if w.len() > EXACT_STATE_LIMIT {
        return Err(Error::Size {
            what: "union",
            size: w.len(),
            limit: EXACT_STATE_LIMIT,
            hint: "; use the Gaussian approximation instead",
        });
    }
    q.check_for_analysis()
}

/// Number of sign vectors of the other states for which state `j` is pivotal.
pub fn pivotal_count(w: &WeightVector, q: &QuotaSpec, j: usize) -> Result<u64> {
    check_exact(w, q)?;
    if j >= w.len() {
        return Err(Error::domain(format!("state index {j} out of range for {} states", w.len())));
    }
    let weights = w.as_slice();
    let threshold = q.q * w.total();
    let lo = threshold - weights[j];
    let hi = threshold + weights[j];
    let others: Vec<f64> = weights.iter().enumerate().filter(|&(k, _)| k != j).map(|(_, &x)| x).collect();
    Ok(gray_code_hits(&others, lo, hi))
}

/// Counts sign vectors with `lo < sum_k ±others_k <= hi`.
fn gray_code_hits(others: &[f64], lo: f64, hi: f64) -> u64 {
    let n = others.len();
    let doubled: Vec<f64> = others.iter().map(|x| 2.0 * x).collect();
    // start from every sign negative
    let from_scratch = |code: u64| {
        compensated_sum(others.iter().enumerate().map(|(k, &x)| if code >> k & 1 == 1 { x } else { -x }))
    };
    let mut code: u64 = 0;
    let mut z = from_scratch(0);
    let mut hits = (lo < z && z <= hi) as u64;
    for step in 1..(1u64 << n) {
        let bit = step.trailing_zeros() as usize;
        code ^= 1 << bit;
        if step % REFRESH_PERIOD == 0 {
            z = from_scratch(code);
        } else if code >> bit & 1 == 1 {
            z += doubled[bit];
        } else {
            z -= doubled[bit];
        }
        hits += (lo < z && z <= hi) as u64;
    }
    hits
}

/// `beta_j = P(qW - w_j < Z_j <= qW + w_j)`.
pub fn state_influence_exact(w: &WeightVector, q: &QuotaSpec, j: usize) -> Result<f64> {
    let hits = pivotal_count(w, q, j)?;
    Ok(hits as f64 / (1u64 << (w.len() - 1)) as f64)
}

/// Exact `beta_j` for every state, computed in parallel over states.
pub fn state_influences(w: &WeightVector, q: &QuotaSpec) -> Result<Vec<f64>> {
    check_exact(w, q)?;
    (0..w.len()).into_par_iter().map(|j| state_influence_exact(w, q, j)).collect()
}

/// Whether the motion passes when exactly the states in `yes` vote in favour.
pub fn passes(w: &WeightVector, q: &QuotaSpec, yes: &[bool]) -> Result<bool> {
    if yes.len() != w.len() {
        return Err(Error::domain(format!("vote vector has {} entries for {} states", yes.len(), w.len())));
    }
    let mut v = Accumulator::new();
    for (&x, &y) in w.as_slice().iter().zip(yes) {
        v.add(if y { x } else { -x });
    }
    Ok(v.value() > q.q * w.total())
}

/// Full analysis at quota `q`; `alpha` holds each state's voter influence.
pub fn analyze(w: &WeightVector, q: &QuotaSpec, alpha: &[f64]) -> Result<CouncilAnalysis> {
    if alpha.len() != w.len() {
        return Err(Error::domain(format!("{} voter influences for {} states", alpha.len(), w.len())));
    }
    if let Some(a) = alpha.iter().find(|a| !(a.is_finite() && **a > 0.0)) {
        return Err(Error::domain(format!("voter influence {a} must be positive")));
    }
    let beta = state_influences(w, q)?;
    let mut analysis = summarise(w, q, beta)?;
    analysis.total_influence = alpha.iter().zip(&analysis.beta).map(|(a, b)| a * b).collect();
    Ok(analysis)
}

fn summarise(w: &WeightVector, q: &QuotaSpec, beta: Vec<f64>) -> Result<CouncilAnalysis> {
    let beta_total = compensated_sum(beta.iter().copied());
    let weight_normalised = w.normalize()?.as_slice().to_vec();
    let beta_normalised: Vec<f64> = if beta_total > 0.0 {
        beta.iter().map(|b| 100.0 * b / beta_total).collect()
    } else {
        return Err(Error::domain(format!("no state is ever pivotal at quota {}", q.q)));
    };
    let total_weight = w.total();
    let ratios = beta.iter().zip(w.as_slice()).map(|(b, x)| (b * total_weight) / (x * beta_total)).collect();
    let objective = compensated_sum(weight_normalised.iter().zip(&beta_normalised).map(|(w, b)| (w - b) * (w - b)));
    Ok(CouncilAnalysis {
        quota: *q,
        beta,
        beta_normalised,
        weight_normalised,
        ratios,
        beta_total,
        objective,
        total_influence: Vec::new(),
    })
}

/// One evaluated quota of a sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepPoint {
    pub quota: QuotaSpec,
    pub objective: f64,
    pub beta_total: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuotaSweep {
    pub points: Vec<SweepPoint>,
    /// Index of the quota with the smallest objective.
    pub argmin: usize,
}

const SWEEP_TIE: f64 = 1e-12;

/// Evaluates the objective `Q` and total `B` at each quota of `grid`.
///
/// Ties in `Q` (within 1e-12) go to the quota of smaller magnitude.
pub fn quota_sweep(w: &WeightVector, grid: &[QuotaSpec]) -> Result<QuotaSweep> {
    if grid.is_empty() {
        return Err(Error::domain("quota grid is empty"));
    }
    let mut points = Vec::with_capacity(grid.len());
    for q in grid {
        let a = summarise(w, q, state_influences(w, q)?)?;
        points.push(SweepPoint { quota: *q, objective: a.objective, beta_total: a.beta_total });
    }
    let mut argmin = 0;
    for (i, p) in points.iter().enumerate().skip(1) {
        let best = &points[argmin];
        let better = p.objective < best.objective - SWEEP_TIE
            || ((p.objective - best.objective).abs() <= SWEEP_TIE && p.quota.q.abs() < best.quota.q.abs());
        if better {
            argmin = i;
        }
    }
    Ok(QuotaSweep { points, argmin })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn wv(ws: &[f64]) -> WeightVector {
        WeightVector::new(ws.to_vec()).unwrap()
    }

    /// Independent count over subsets in plain binary order.
    fn naive_hits(w: &WeightVector, q: &QuotaSpec, j: usize) -> u64 {
        let ws = w.as_slice();
        let total: f64 = ws.iter().sum();
        let others: Vec<f64> = ws.iter().enumerate().filter(|&(k, _)| k != j).map(|(_, &x)| x).collect();
        let (lo, hi) = (q.q * total - ws[j], q.q * total + ws[j]);
        (0..1u64 << others.len())
            .filter(|mask| {
                let z: f64 = others.iter().enumerate().map(|(k, &x)| if mask >> k & 1 == 1 { x } else { -x }).sum();
                lo < z && z <= hi
            })
            .count() as u64
    }

    #[test]
    fn single_state_always_pivotal() {
        let w = wv(&[3.7]);
        assert_eq!(state_influence_exact(&w, &QuotaSpec::zero(), 0).unwrap(), 1.0);
    }

    #[test]
    fn three_equal_states() {
        let w = wv(&[1.3; 3]);
        for j in 0..3 {
            assert_eq!(state_influence_exact(&w, &QuotaSpec::zero(), j).unwrap(), 0.5);
        }
        let a = analyze(&w, &QuotaSpec::zero(), &[0.1; 3]).unwrap();
        assert_eq!(a.ratios, vec![1.0; 3]);
        assert!(a.objective < 1e-20);
    }

    #[test]
    fn boundary_is_left_open_right_closed() {
        // integer weights put Z exactly on both ends
        let w = wv(&[1.0, 1.0, 1.0, 1.0]);
        // Z in {-3,-1,1,3} w.p. 1/8,3/8,3/8,1/8; (-1, 1] keeps only Z = 1
        assert_eq!(state_influence_exact(&w, &QuotaSpec::zero(), 0).unwrap(), 0.375);
        assert_eq!(naive_hits(&w, &QuotaSpec::zero(), 0), 3);
    }

    #[test]
    fn errors() {
        let w = wv(&[1.0; 31]);
        let e = state_influence_exact(&w, &QuotaSpec::zero(), 0).unwrap_err();
        assert!(e.is_size_limit());
        let w = wv(&[1.0, 2.0]);
        assert!(matches!(state_influence_exact(&w, &QuotaSpec::zero(), 2), Err(Error::Domain(_))));
        assert!(matches!(state_influence_exact(&w, &QuotaSpec::explicit(1.0), 0), Err(Error::Domain(_))));
        assert!(matches!(quota_sweep(&w, &[]), Err(Error::Domain(_))));
        assert!(matches!(analyze(&w, &QuotaSpec::zero(), &[1.0]), Err(Error::Domain(_))));
        assert!(matches!(passes(&w, &QuotaSpec::zero(), &[true]), Err(Error::Domain(_))));
    }

    #[test]
    fn passing_extremes() {
        let w = wv(&[4.0, 3.0, 2.0, 1.0]);
        let star = QuotaSpec::explicit(0.5);
        assert!(passes(&w, &star, &[true; 4]).unwrap());
        assert!(!passes(&w, &QuotaSpec::zero(), &[false; 4]).unwrap());
        // V = 4 + 3 - 2 - 1 = 4 against qW = 5
        assert!(!passes(&w, &star, &[true, true, false, false]).unwrap());
        assert!(passes(&w, &QuotaSpec::explicit(0.39), &[true, true, false, false]).unwrap());
    }

    #[test]
    fn refresh_keeps_counts() {
        // 22 others crosses several refresh points
        let ws: Vec<f64> = (0..23).map(|k| 1.0 + (k as f64 * 0.37).sin().abs() * 3.1).collect();
        let w = wv(&ws);
        let q = QuotaSpec::explicit(0.17);
        assert_eq!(pivotal_count(&w, &q, 5).unwrap(), naive_hits(&w, &q, 5));
    }

    #[test]
    fn sweep_single_point() {
        let w = wv(&[3.0, 2.0, 2.0]);
        let s = quota_sweep(&w, &[QuotaSpec::zero()]).unwrap();
        assert_eq!(s.argmin, 0);
        assert_eq!(s.points.len(), 1);
    }

    #[test]
    fn sweep_tie_prefers_smaller_quota() {
        // equal weights give Q = 0 at every quota
        let w = wv(&[1.5; 5]);
        let grid = [QuotaSpec::explicit(0.3), QuotaSpec::explicit(-0.1), QuotaSpec::zero(), QuotaSpec::explicit(0.1)];
        assert_eq!(quota_sweep(&w, &grid).unwrap().argmin, 2);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn weights(max: usize) -> impl Strategy<Value = Vec<f64>> {
            prop::collection::vec(0.05f64..10.0, 2..=max)
        }

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(64))]

            #[test]
            fn gray_code_equals_naive(ws in weights(12), q in -0.6f64..0.6, pick in 0usize..12) {
                let w = wv(&ws);
                let j = pick % ws.len();
                let q = QuotaSpec::explicit(q);
                prop_assert_eq!(pivotal_count(&w, &q, j).unwrap(), naive_hits(&w, &q, j));
            }

            #[test]
            fn pivotal_means_switching_flips_outcome(ws in weights(10), q in -0.6f64..0.6, pick in 0usize..10) {
                let w = wv(&ws);
                let s = ws.len();
                let j = pick % s;
                let q = QuotaSpec::explicit(q);
                let mut flips = 0u64;
                for mask in 0..1u64 << s {
                    if mask >> j & 1 == 1 {
                        continue;
                    }
                    let mut yes: Vec<bool> = (0..s).map(|k| mask >> k & 1 == 1).collect();
                    let without = passes(&w, &q, &yes).unwrap();
                    yes[j] = true;
                    let with = passes(&w, &q, &yes).unwrap();
                    flips += (with && !without) as u64;
                }
                let expected = flips as f64 / (1u64 << (s - 1)) as f64;
                prop_assert!((state_influence_exact(&w, &q, j).unwrap() - expected).abs() <= 1e-15);
            }

            #[test]
            fn equal_weights_equal_influence(x in 0.1f64..10.0, s in 1usize..10, q in -0.6f64..0.6) {
                let w = wv(&vec![x; s]);
                let q = QuotaSpec::explicit(q);
                let b = state_influences(&w, &q).unwrap();
                prop_assert!(b.iter().all(|&v| v == b[0]));
            }

            #[test]
            fn influence_grows_with_weight(ws in weights(12), pick in 0usize..12, extra in 0.0f64..5.0) {
                let j = pick % ws.len();
                let mut bigger = ws.clone();
                bigger[j] += extra;
                let q = QuotaSpec::zero();
                let before = state_influence_exact(&wv(&ws), &q, j).unwrap();
                let after = state_influence_exact(&wv(&bigger), &q, j).unwrap();
                prop_assert!(after >= before);
            }

            #[test]
            fn scale_invariant(ws in weights(12), q in -0.6f64..0.6, power in -4i32..5) {
                let c = 2f64.powi(power);
                let q = QuotaSpec::explicit(q);
                let scaled: Vec<f64> = ws.iter().map(|x| x * c).collect();
                prop_assert_eq!(state_influences(&wv(&ws), &q).unwrap(), state_influences(&wv(&scaled), &q).unwrap());
            }

            #[test]
            fn normalised_sums_to_hundred(ws in weights(12), q in -0.4f64..0.4) {
                let w = wv(&ws);
                let a = analyze(&w, &QuotaSpec::explicit(q), &vec![0.01; ws.len()]).unwrap();
                prop_assert!((compensated_sum(a.beta_normalised.iter().copied()) - 100.0).abs() < 1e-9);
                prop_assert!((compensated_sum(a.weight_normalised.iter().copied()) - 100.0).abs() < 1e-9);
                for k in 0..ws.len() {
                    prop_assert!((a.ratios[k] - a.beta_normalised[k] / a.weight_normalised[k]).abs() < 1e-12);
                    prop_assert!((0.0..=1.0).contains(&a.beta[k]));
                }
            }
        }
    }
}
