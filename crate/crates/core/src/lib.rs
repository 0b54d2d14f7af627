pub mod cli;
pub mod error;
pub mod gaussian;
pub mod oracle;
pub mod prob;
pub mod regions;
pub mod rng;
pub mod sim;

pub use error::{Error, Result};
