//! Exponent region over a degraded broadcast channel of BSCs. The best
//! hybrid map found for the frontier's top point is printed with its table.
//!
//! Usage: `cargo run --release --example noisy_region -- [d1] [d2]`

use hypotest::prob::axes::{X, Y1, Y2, Z1};
use hypotest::prob::{Channel, HypothesisPair, JointPmf, Structure};
use hypotest::regions::{noisy_frontier, DegradedBroadcast, SolverOptions};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<f64> = std::env::args()
        .skip(1)
        .map(|a| a.parse())
        .collect::<Result<_, _>>()?;
    let d1 = args.first().copied().unwrap_or(0.05);
    let d2 = args.get(1).copied().unwrap_or(0.1);
    let h0 = JointPmf::bernoulli(X, 0.5)?
        .extend(&Channel::bsc(X, Z1, 0.1)?)?
        .extend(&Channel::bsc(X, Y1, 0.05)?)?
        .extend(&Channel::bsc(X, Y2, 0.05)?)?;
    let h = HypothesisPair::from_null(h0, Structure::AgainstConditionalIndependence)?;
    let bc = DegradedBroadcast::bsc_pair(d1, d2)?;
    let opts = SolverOptions {
        restarts: 3,
        lambda_grid: 5,
        caps: [Some(2), Some(2), None],
        ..Default::default()
    };
    let f = noisy_frontier(&h, &bc, &opts)?;
    println!(
        "BC = BSC({d1}) then BSC({d2}); {:?}, {:.1}s",
        f.meta.exactness, f.meta.runtime_secs
    );
    for p in &f.points {
        let map = p
            .witness
            .as_ref()
            .and_then(|w| w.hybrid.as_ref())
            .map(|m| m.table.clone());
        println!("  ({:.4}, {:.4}) map {:?}", p.theta1, p.theta2, map);
    }
    Ok(())
}
