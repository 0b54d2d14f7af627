//! Finite-alphabet probability objects, information measures and typicality.

mod channel;
mod hypothesis;
mod info;
mod pmf;
mod typical;

pub use channel::Channel;
pub use hypothesis::{alternative_hypothesis, HypothesisPair, Structure, STRUCTURE_TOL};
pub use info::{binary_entropy, entropy, kl_divergence, mutual_information};
pub use pmf::{Alphabet, JointPmf, NORMALIZATION_TOL};
pub use typical::is_typical;

/// Canonical axis names.
pub mod axes {
    pub const X: &str = "X";
    pub const Y1: &str = "Y1";
    pub const Y2: &str = "Y2";
    pub const Z1: &str = "Z1";
    pub const U0: &str = "U0";
    pub const U1: &str = "U1";
    pub const U2: &str = "U2";
    pub const U: &str = "U";
    pub const W: &str = "W";
    pub const V1: &str = "V1";
    pub const V2: &str = "V2";
}
