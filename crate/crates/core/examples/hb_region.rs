//! Heegard-Berger region with side information at receiver 1: Z1 is a noisy
//! copy of X, receiver 2 sees Y2 through Z1. Sweeps the rate and prints the
//! two extreme exponents, then the whole frontier at the last rate.
//!
//! Usage: `cargo run --release --example hb_region -- [pz]`

use hypotest::prob::axes::{X, Y1, Y2, Z1};
use hypotest::prob::{Channel, HypothesisPair, JointPmf, Structure};
use hypotest::regions::{hb_frontier, RatePoint, SolverOptions};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let pz: f64 = std::env::args()
        .nth(1)
        .map(|a| a.parse())
        .transpose()?
        .unwrap_or(0.1);
    let h0 = JointPmf::bernoulli(X, 0.5)?
        .extend(&Channel::bsc(X, Z1, pz)?)?
        .extend(&Channel::bsc(X, Y1, 0.1)?)?
        .extend(&Channel::bsc(Z1, Y2, 0.1)?)?;
    let h = HypothesisPair::from_null(h0, Structure::AgainstConditionalIndependence)?;
    let opts = SolverOptions {
        restarts: 4,
        lambda_grid: 5,
        caps: [Some(2), Some(2), None],
        ..Default::default()
    };
    let mut last = None;
    for r in [0.1, 0.25, 0.5, 1.0] {
        let f = hb_frontier(&h, RatePoint::single(r)?, &opts)?;
        println!(
            "R = {r}: max theta1 {:.4}, max theta2 {:.4}",
            f.max_theta1(),
            f.max_theta2()
        );
        last = Some(f);
    }
    if let Some(f) = last {
        println!("frontier at R = 1 ({:?}):", f.meta.exactness);
        for p in &f.points {
            println!("  ({:.4}, {:.4})", p.theta1, p.theta2);
        }
    }
    Ok(())
}
