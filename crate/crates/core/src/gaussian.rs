//! Gaussian approximations to state influences and Berry–Esseen error bounds.

use std::f64::consts::{PI, SQRT_2};

use statrs::function::erf::erfc;

use crate::error::{Error, Result};
use crate::sum::compensated_sum;
use crate::union::{QuotaSource, QuotaSpec, Union, WeightVector};

/// Berry–Esseen constant; the bound on `|beta_j - integral|` uses `2C = 1.12`.
pub const BERRY_ESSEEN_C: f64 = 0.56;

/// Standard normal distribution function.
pub fn normal_cdf(z: f64) -> f64 {
    0.5 * erfc(-z / SQRT_2)
}

/// Density of `N(0, sigma^2)`.
pub fn normal_pdf(z: f64, sigma: f64) -> f64 {
    (-(z * z) / (2.0 * sigma * sigma)).exp() / (sigma * (2.0 * PI).sqrt())
}

fn check_state(w: &WeightVector, j: usize) -> Result<()> {
    if w.len() < 2 {
        return Err(Error::domain("the Gaussian approximation needs at least two states"));
    }
    if j >= w.len() {
        return Err(Error::domain(format!("state index {j} out of range for {} states", w.len())));
    }
    Ok(())
}

/// Standard deviation of `Z_j = sum_{k != j} w_k chi_k`.
pub fn sigma(w: &WeightVector, j: usize) -> Result<f64> {
    check_state(w, j)?;
    Ok(others(w, j, 2).sqrt())
}

fn others(w: &WeightVector, j: usize, power: i32) -> f64 {
    compensated_sum(w.as_slice().iter().enumerate().filter(|&(k, _)| k != j).map(|(_, x)| x.powi(power)))
}

/// Gaussian mass of the pivotal window `(qW - w_j, qW + w_j]`.
pub fn gaussian_beta(w: &WeightVector, q: &QuotaSpec, j: usize) -> Result<f64> {
    let s = sigma(w, j)?;
    let (wj, t) = (w.as_slice()[j], q.q * w.total());
    Ok(normal_cdf((t + wj) / s) - normal_cdf((t - wj) / s))
}

/// Density form `2 w_j phi_sigma(qW)`.
pub fn jagcom_beta_approx(w: &WeightVector, q: &QuotaSpec, j: usize) -> Result<f64> {
    let s = sigma(w, j)?;
    Ok(2.0 * w.as_slice()[j] * normal_pdf(q.q * w.total(), s))
}

/// Rigorous bound on `|beta_j - gaussian_beta|`: twice the Berry–Esseen
/// distance for `Z_j`, whose summands have third absolute moments `w_k^3`.
pub fn berry_esseen_bound(w: &WeightVector, j: usize) -> Result<f64> {
    check_state(w, j)?;
    Ok(2.0 * BERRY_ESSEEN_C * others(w, j, 3) / others(w, j, 2).powf(1.5))
}

/// Gaussian estimates for one state together with a certified interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ApproxCertificate {
    pub j: usize,
    pub gauss_integral: f64,
    pub jagcom_density_approx: f64,
    pub be_bound: f64,
    /// `gauss_integral - be_bound`; may be negative.
    pub interval_lo: f64,
    /// `gauss_integral + be_bound`; may exceed one.
    pub interval_hi: f64,
    pub sigma_j: f64,
}

impl ApproxCertificate {
    pub fn contains(&self, beta: f64) -> bool {
        self.interval_lo <= beta && beta <= self.interval_hi
    }

    /// Interval ends clipped to `[0, 1]` for display.
    pub fn clipped(&self) -> (f64, f64) {
        (self.interval_lo.clamp(0.0, 1.0), self.interval_hi.clamp(0.0, 1.0))
    }
}

pub fn certificate(w: &WeightVector, q: &QuotaSpec, j: usize) -> Result<ApproxCertificate> {
    let gauss_integral = gaussian_beta(w, q, j)?;
    let be_bound = berry_esseen_bound(w, j)?;
    Ok(ApproxCertificate {
        j,
        gauss_integral,
        jagcom_density_approx: jagcom_beta_approx(w, q, j)?,
        be_bound,
        interval_lo: gauss_integral - be_bound,
        interval_hi: gauss_integral + be_bound,
        sigma_j: sigma(w, j)?,
    })
}

/// Certificates for every state.
pub fn certificates(w: &WeightVector, q: &QuotaSpec) -> Result<Vec<ApproxCertificate>> {
    (0..w.len()).map(|j| certificate(w, q, j)).collect()
}

/// Quota placing `qW` at the inflection point `sigma` of the Gaussian
/// approximating the full weighted vote: `q = sqrt(sum w_k^2) / W`.
pub fn inflection_quota(w: &WeightVector) -> QuotaSpec {
    let spread = compensated_sum(w.as_slice().iter().map(|x| x * x)).sqrt();
    QuotaSpec { q: spread / w.total(), source: QuotaSource::JagcomStar }
}

/// Heuristic bracket for voter-level total influence `I_j`, divided by the
/// constant in `alpha_j ~ C / sqrt(N_j)`. Populations are in persons.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InfluenceBracket {
    pub lower: f64,
    pub upper: f64,
    /// Largest population share `N_max / N`.
    pub delta: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum BracketForm {
    Plain,
    Inflection,
}

fn bracket_form(u: &Union, q: &QuotaSpec) -> Result<BracketForm> {
    let star = u.jagcom_quota().q;
    match q.source {
        QuotaSource::Zero => Ok(BracketForm::Plain),
        QuotaSource::JagcomStar => Ok(BracketForm::Inflection),
        QuotaSource::Explicit if q.q == 0.0 => Ok(BracketForm::Plain),
        QuotaSource::Explicit if (q.q - star).abs() <= 1e-12 => Ok(BracketForm::Inflection),
        QuotaSource::Explicit => Err(Error::domain(format!("the influence bracket is defined only for q = 0 or q = q* ({star}), got {}", q.q))),
    }
}

/// j-independent envelope `2/Delta · e^{-1/(2(1-delta))} <= I_j/C <= 2/(Delta sqrt(1-delta)) · e^{-1/2}`
/// at `q = q*`, and the same without the exponentials at `q = 0`, with
/// `Delta = sqrt(N)` and `delta = N_max / N`. Heuristic: it rests on the
/// unquantified density approximation.
pub fn total_influence_bounds(u: &Union, q: &QuotaSpec) -> Result<InfluenceBracket> {
    let form = bracket_form(u, q)?;
    let n = u.total_population() as f64;
    let delta = u.max_population() as f64 / n;
    let spread = n.sqrt();
    let (lower, upper) = match form {
        BracketForm::Plain => (2.0 / spread, 2.0 / (spread * (1.0 - delta).sqrt())),
        BracketForm::Inflection => (
            2.0 / spread * (-1.0 / (2.0 * (1.0 - delta))).exp(),
            2.0 / (spread * (1.0 - delta).sqrt()) * (-0.5f64).exp(),
        ),
    };
    Ok(InfluenceBracket { lower, upper, delta })
}

/// Point estimate of `I_j / C` from the density approximation with
/// `w_k = sqrt(N_k)` in persons: `2 / sqrt(N - N_j) · exp(-(qW)^2 / (2 (N - N_j)))`.
pub fn heuristic_total_influence(u: &Union, q: &QuotaSpec, j: usize) -> Result<f64> {
    bracket_form(u, q)?;
    if u.len() < 2 || j >= u.len() {
        return Err(Error::domain("need at least two states and a valid index"));
    }
    let rest = (u.total_population() - u.states()[j].population as u128) as f64;
    let threshold = q.q * compensated_sum(u.states().iter().map(|s| (s.population as f64).sqrt()));
    Ok(2.0 / rest.sqrt() * (-(threshold * threshold) / (2.0 * rest)).exp())
}
