#![allow(dead_code)]

use hypotest::prob::axes::{X, Y1, Y2, Z1};
use hypotest::prob::{Channel, HypothesisPair, JointPmf, Structure};
use hypotest::regions::SolverOptions;

/// X ~ Bern(px), Y1 = X xor BSC(p1), Y2 = X xor BSC(p2), independent noises.
pub fn gw_instance(px: f64, p1: f64, p2: f64) -> HypothesisPair {
    let h0 = JointPmf::bernoulli(X, px)
        .unwrap()
        .extend(&Channel::bsc(X, Y1, p1).unwrap())
        .unwrap()
        .extend(&Channel::bsc(X, Y2, p2).unwrap())
        .unwrap();
    HypothesisPair::from_null(h0, Structure::AgainstIndependence).unwrap()
}

/// X ~ Bern(px), Z1 = X xor BSC(pz), Y1 = X xor BSC(p1), Y2 = Z1 xor BSC(p2).
pub fn side_info_instance(px: f64, pz: f64, p1: f64, p2: f64) -> HypothesisPair {
    let h0 = JointPmf::bernoulli(X, px)
        .unwrap()
        .extend(&Channel::bsc(X, Z1, pz).unwrap())
        .unwrap()
        .extend(&Channel::bsc(X, Y1, p1).unwrap())
        .unwrap()
        .extend(&Channel::bsc(Z1, Y2, p2).unwrap())
        .unwrap();
    HypothesisPair::from_null(h0, Structure::AgainstConditionalIndependence).unwrap()
}

pub fn small_opts(restarts: usize, grid: usize) -> SolverOptions {
    SolverOptions {
        restarts,
        lambda_grid: grid,
        caps: [Some(2), Some(2), Some(2)],
        ..Default::default()
    }
}
