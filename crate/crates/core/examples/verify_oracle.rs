//! Compares the optimizer's Gray-Wyner frontier with the lattice oracle at
//! a coarse and a finer step.

use hypotest::oracle::{brute_force_frontier, GridSpec};
use hypotest::prob::axes::{X, Y1, Y2};
use hypotest::prob::{Channel, HypothesisPair, JointPmf, Structure};
use hypotest::regions::{gw_frontier, hausdorff_distance, RatePoint, SolverOptions};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let h0 = JointPmf::bernoulli(X, 0.5)?
        .extend(&Channel::bsc(X, Y1, 0.1)?)?
        .extend(&Channel::bsc(X, Y2, 0.2)?)?;
    let h = HypothesisPair::from_null(h0, Structure::AgainstIndependence)?;
    let rates = RatePoint::new(0.3, 0.1, 0.1)?;
    let opts = SolverOptions {
        restarts: 8,
        lambda_grid: 9,
        caps: [Some(2), Some(2), Some(2)],
        ..Default::default()
    };
    let solver = gw_frontier(&h, rates, &opts)?;
    println!(
        "solver: {} points in {:.1}s",
        solver.points.len(),
        solver.meta.runtime_secs
    );
    for step in [0.1, 0.05] {
        let grid = GridSpec {
            step,
            ..Default::default()
        };
        let oracle = brute_force_frontier(&h, rates, &grid)?;
        println!(
            "step {step}: {} oracle points in {:.1}s, Hausdorff distance {:.5} (tolerance {:.3})",
            oracle.points.len(),
            oracle.meta.runtime_secs,
            hausdorff_distance(&solver.points, &oracle.points),
            5e-3 + step
        );
    }
    Ok(())
}
