//! Heegard-Berger scheme with binning on a binary side-information source.
//!
//! The test channel comes from the computed frontier (largest theta1 with a
//! constant U0); the simulator then runs the binned scheme with rate slack.
//!
//! Usage: `cargo run --release --example simulate_hb -- [k] [blocks] [trials]
//! [pz] [p1] [rate] [mu] [bin_frac] [margin]`
//!
//! The side information must be strong (here `Z1 = X + Bern(0.1)`): with a
//! weak `Z1` the typicality bin decoder cannot tell the members of a bin
//! apart at any workable `mu`.

use hypotest::prob::axes::{U0, U1, X, Y1, Y2, Z1};
use hypotest::prob::{mutual_information, Channel, HypothesisPair, JointPmf, Structure};
use hypotest::regions::{hb_frontier, RatePoint, SolverOptions};
use hypotest::sim::{run_trials, SchemeKind, SchemeParams, SimConfig};

fn arg<T: std::str::FromStr>(i: usize, default: T) -> T {
    std::env::args()
        .nth(i)
        .and_then(|a| a.parse().ok())
        .unwrap_or(default)
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let k: usize = arg(1, 400);
    let blocks: usize = arg(2, 1);
    let trials: usize = arg(3, 3000);
    let pz: f64 = arg(4, 0.1);
    let p1: f64 = arg(5, 0.02);
    let rate: f64 = arg(6, 0.3);
    let mu: f64 = arg(7, 0.6);
    let bin_frac: f64 = arg(8, 0.5);
    let margin: f64 = arg(9, 0.05);
    let h0 = JointPmf::bernoulli(X, 0.5)?
        .extend(&Channel::bsc(X, Z1, pz)?)?
        .extend(&Channel::bsc(X, Y1, p1)?)?
        .extend(&Channel::bsc(Z1, Y2, 0.2)?)?;
    let hypotheses =
        HypothesisPair::from_null(h0.clone(), Structure::AgainstConditionalIndependence)?;
    let opts = SolverOptions {
        restarts: 8,
        lambda_grid: 3,
        caps: [Some(1), Some(2), None],
        ..Default::default()
    };
    let frontier = hb_frontier(&hypotheses, RatePoint::single(rate)?, &opts)?;
    let best = frontier
        .points
        .iter()
        .max_by(|a, b| a.theta1.total_cmp(&b.theta1))
        .ok_or("empty frontier")?;
    let witness = best.witness.clone().ok_or("missing witness")?;
    let joint = witness.joint_with(&h0)?;
    let i_x = mutual_information(&joint, &[U1], &[X], &[U0])?;
    let i_z = mutual_information(&joint, &[U1], &[Z1], &[U0])?;
    let r1p = bin_frac * i_z;
    let r1 = i_x + margin - r1p;
    println!(
        "witness theta1 = {:.4}; I(U1;X) = {i_x:.4}, I(U1;Z1) = {i_z:.4}; R1 = {r1:.4}, R1' = {r1p:.4}",
        best.theta1
    );
    let config = SimConfig {
        hypotheses,
        scheme: SchemeParams {
            kind: SchemeKind::Hb,
            witness,
            rates: RatePoint {
                r0: 0.0,
                r1,
                r2: 0.0,
                r1_prime: Some(r1p),
            },
            mu: Some(mu),
            epsilon: 0.1,
            block_len: k,
            blocks,
            aggregation: Default::default(),
            codebook: Default::default(),
            codebook_budget_bits: 26,
            bc: None,
            thresholds: None,
            is_samples: 16,
        },
        calibration_trials: None,
    };
    let r = run_trials(&config, trials, trials, 11)?;
    println!(
        "n = {} ({} blocks of {}), ensemble codebooks: {}",
        r.n, r.blocks, r.block_len, r.ensemble_codebooks
    );
    println!("rules {:?}", r.rules);
    println!(
        "alpha_1 = {:.4}, encoder failures {:.4}",
        r.alpha_hat[0].value, r.encoder_failure.value
    );
    println!(
        "bin-decoding failures per block under H0: {:.4}",
        r.decode_failure[0].value
    );
    let c = &r.beta_cond[0];
    println!(
        "conditional beta_1 = {:.3e} +- {:.1e}, exponent {:.4} vs witness {:.4} (ratio {:.3})",
        c.mean,
        c.std_err,
        c.exponent.unwrap_or(f64::NAN),
        best.theta1,
        c.exponent.unwrap_or(f64::NAN) / best.theta1
    );
    Ok(())
}
