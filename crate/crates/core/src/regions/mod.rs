//! Optimal and achievable exponent regions computed by multi-restart
//! optimization over auxiliary test channels.

mod frontier;
mod gray_wyner;
mod heegard_berger;
mod less_noisy;
mod model;
mod noisy;
pub mod solver;
mod tensor;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use frontier::{
    hausdorff_distance, support, upper_concave_envelope, AuxiliaryWitness, Exactness, FrontierMeta,
    FrontierPoint, HybridMap, RegionFrontier, RegionKind,
};
pub use gray_wyner::gw_frontier;
pub use heegard_berger::{general_frontier, hb_frontier};
pub use less_noisy::{less_noisy_check, LessNoisyVerdict, LESS_NOISY_TOL};
pub use noisy::{noisy_frontier, DegradedBroadcast};
pub use solver::{maximize_weighted_exponents, Evaluation, SimplexLayout, Solution, SolverOptions};

/// Constraint values below this are treated as satisfied.
pub const FEASIBILITY_TOL: f64 = 1e-10;

/// Link rates in bits per source symbol. For single-rate schemes `r0` holds
/// the common rate.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct RatePoint {
    pub r0: f64,
    #[serde(default)]
    pub r1: f64,
    #[serde(default)]
    pub r2: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r1_prime: Option<f64>,
}

impl RatePoint {
    pub fn new(r0: f64, r1: f64, r2: f64) -> Result<Self> {
        let r = RatePoint {
            r0,
            r1,
            r2,
            r1_prime: None,
        };
        r.validate()?;
        Ok(r)
    }

    pub fn single(r: f64) -> Result<Self> {
        RatePoint::new(r, 0.0, 0.0)
    }

    pub fn validate(&self) -> Result<()> {
        for v in [self.r0, self.r1, self.r2, self.r1_prime.unwrap_or(0.0)] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::InvalidParameter(format!(
                    "rate {v} must be finite and >= 0"
                )));
            }
        }
        Ok(())
    }
}
