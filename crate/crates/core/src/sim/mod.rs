//! Monte Carlo execution of the gw, hb and noisy coding schemes.
//!
//! Every trial draws fresh codebooks, so averages estimate the
//! codebook-averaged error probabilities. All randomness comes from keyed
//! substreams of one seed; results do not depend on the thread count.

mod codebook;
mod estimate;
pub mod multinomial;
mod rounds;
mod scheme;
mod trials;
mod typicality;

pub use codebook::{build_codebooks, BlockCodebook, Chosen, CodebookSet, Codebooks};
pub use rounds::{
    bc_channel_sample, gw_decide, gw_encode, gw_round, hb_round, noisy_round, GwMessage,
    RoundOutcome, Rule, TrialKey,
};
pub use scheme::{
    Aggregation, CodebookMode, Layer, Scheme, SchemeKind, SchemeParams, Sources, RATE_SLACK,
};
pub use trials::{
    calibrate, config_hash, decision_rules, run_single_trial, run_trials, ConditionalEstimate,
    ExponentEstimate, Proportion, SimConfig, SimResult, MIN_ERRORS,
};
pub use typicality::{flatten, CellBounds};
