//! Voting power in two-tier voting systems.
//!
//! Citizens vote inside their state; each state's delegate then casts a
//! weighted vote in a council that passes a motion iff the signed weighted
//! vote exceeds a quota. The crate covers:
//!
//! * [`union`]: member states, square-root weights and the quota `q*`;
//! * [`models`]: single-voter influence under independent, collectively
//!   biased and circular voting, with enumeration oracles;
//! * [`council`]: exact state influences by coalition enumeration, the quota
//!   objective and sweeps;
//! * [`gaussian`]: Gaussian approximations of state influences with
//!   Berry–Esseen certified intervals.
//!
//! ```
//! use voting_power::{council, Union};
//!
//! let union = Union::eu27();
//! let w = union.sqrt_weights();
//! let star = union.jagcom_quota();
//! assert!((star.q - 0.2321).abs() < 1e-4);
//! // a motion backed by every state passes
//! assert!(council::passes(&w, &star, &[true; 27]).unwrap());
//! ```

pub mod council;
pub mod error;
pub mod gaussian;
pub mod models;
mod quadrature;
pub mod special;
pub mod sum;
pub mod union;

pub use council::{analyze, quota_sweep, state_influence_exact, CouncilAnalysis, QuotaSweep, SweepPoint};
pub use error::{Error, Result};
pub use gaussian::{certificate, ApproxCertificate};
pub use models::{brute_force_report, InfluenceReport, MixingLaw, Route, VoteModel};
pub use union::{QuotaSource, QuotaSpec, StateRecord, Union, WeightVector};

/// Penrose's asymptotic voter influence `sqrt(2 / (pi N))` for an
/// independent fair electorate of `population` voters.
pub fn asymptotic_voter_influence(population: u64) -> f64 {
    (2.0 / (std::f64::consts::PI * population as f64)).sqrt()
}
