//! Gray-Wyner exponent region of a binary source observed through two BSCs,
//! for a few rate triples. The frontier points are listed with the slack of
//! each rate constraint.
//!
//! Usage: `cargo run --release --example gw_region -- [p1] [p2]`

use hypotest::prob::axes::{X, Y1, Y2};
use hypotest::prob::{Channel, HypothesisPair, JointPmf, Structure};
use hypotest::regions::{gw_frontier, RatePoint, SolverOptions};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<f64> = std::env::args()
        .skip(1)
        .map(|a| a.parse())
        .collect::<Result<_, _>>()?;
    let p1 = args.first().copied().unwrap_or(0.1);
    let p2 = args.get(1).copied().unwrap_or(0.2);
    let h0 = JointPmf::bernoulli(X, 0.5)?
        .extend(&Channel::bsc(X, Y1, p1)?)?
        .extend(&Channel::bsc(X, Y2, p2)?)?;
    let h = HypothesisPair::from_null(h0, Structure::AgainstIndependence)?;
    let opts = SolverOptions {
        restarts: 6,
        lambda_grid: 7,
        caps: [Some(2), Some(2), Some(2)],
        ..Default::default()
    };
    for rates in [
        RatePoint::new(0.3, 0.0, 0.0)?,
        RatePoint::new(0.3, 0.2, 0.0)?,
        RatePoint::new(0.3, 0.1, 0.1)?,
        RatePoint::new(1.0, 0.0, 0.0)?,
    ] {
        let f = gw_frontier(&h, rates, &opts)?;
        println!(
            "R = ({}, {}, {}): {} frontier points ({:?}, {:.1}s)",
            rates.r0,
            rates.r1,
            rates.r2,
            f.points.len(),
            f.meta.exactness,
            f.meta.runtime_secs
        );
        for p in &f.points {
            let slacks: Vec<String> = p.slacks.iter().map(|s| format!("{s:.3}")).collect();
            println!(
                "  lambda {:.2}: ({:.4}, {:.4}) slacks [{}]",
                p.lambda,
                p.theta1,
                p.theta2,
                slacks.join(", ")
            );
        }
    }
    Ok(())
}
