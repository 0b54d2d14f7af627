//! Checks whether Z1 is less noisy than Y2 with respect to X, for a chain
//! X -> Z1 -> Y2 and with the roles swapped.

use hypotest::prob::axes::{X, Y2, Z1};
use hypotest::prob::{Channel, JointPmf};
use hypotest::regions::{less_noisy_check, SolverOptions};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let opts = SolverOptions::default();
    let chain = JointPmf::bernoulli(X, 0.5)?
        .extend(&Channel::bsc(X, Z1, 0.1)?)?
        .extend(&Channel::bsc(Z1, Y2, 0.1)?)?;
    let swapped = JointPmf::bernoulli(X, 0.5)?
        .extend(&Channel::bsc(X, Y2, 0.1)?)?
        .extend(&Channel::bsc(Y2, Z1, 0.1)?)?;
    for (name, h) in [("X -> Z1 -> Y2", chain), ("X -> Y2 -> Z1", swapped)] {
        let v = less_noisy_check(&h, &opts)?;
        println!(
            "{name}: holds = {}, min I(U;Z1) - I(U;Y2) = {:.4} ({})",
            v.holds, v.min_gap, v.label
        );
    }
    Ok(())
}
