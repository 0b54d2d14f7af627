//! Gray-Wyner scheme on a binary source: Y1 = X xor BSC(0.1), common rate 1.
//!
//! Usage: `cargo run --release --example simulate_gw -- [n] [trials]`

use hypotest::prob::axes::{U0, X, Y1, Y2};
use hypotest::prob::{Channel, HypothesisPair, JointPmf, Structure};
use hypotest::regions::{AuxiliaryWitness, RatePoint};
use hypotest::sim::{run_trials, SchemeKind, SchemeParams, SimConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<usize> = std::env::args()
        .skip(1)
        .map(|a| a.parse())
        .collect::<Result<_, _>>()?;
    let n = args.first().copied().unwrap_or(400);
    let trials = args.get(1).copied().unwrap_or(20_000);
    let h0 = JointPmf::bernoulli(X, 0.5)?
        .extend(&Channel::bsc(X, Y1, 0.1)?)?
        .extend(&Channel::bsc(X, Y2, 0.5)?)?;
    let hypotheses = HypothesisPair::from_null(h0, Structure::AgainstIndependence)?;
    // U0 a slightly noisy copy of X, so the typical set is not empty at finite n
    let witness = AuxiliaryWitness {
        u0: Channel::bsc(X, U0, 2.0 / n as f64)?,
        u1: None,
        u2: None,
        hybrid: None,
    };
    let config = SimConfig {
        hypotheses,
        scheme: SchemeParams {
            kind: SchemeKind::Gw,
            witness,
            rates: RatePoint::single(1.0)?,
            mu: Some(0.4),
            epsilon: 0.1,
            block_len: n,
            blocks: 1,
            aggregation: Default::default(),
            codebook: Default::default(),
            codebook_budget_bits: 26,
            bc: None,
            thresholds: None,
            is_samples: 16,
        },
        calibration_trials: None,
    };
    let r = run_trials(&config, trials, trials, 7)?;
    println!("n = {n}, trials = {trials} per hypothesis");
    println!(
        "alpha_1 = {:.4} [{:.4}, {:.4}]",
        r.alpha_hat[0].value, r.alpha_hat[0].lo, r.alpha_hat[0].hi
    );
    println!(
        "beta_1  = {:.3e} ({} errors), exponent {:?}",
        r.beta_hat[0].value, r.beta_hat[0].count, r.exponent_hat[0].value
    );
    let c = &r.beta_cond[0];
    println!(
        "conditional beta_1 = {:.3e} +- {:.1e}, exponent {:.4} [{:.4}, {:.4}] (theory 0.5310)",
        c.mean,
        c.std_err,
        c.exponent.unwrap_or(f64::NAN),
        c.exponent_lo.unwrap_or(f64::NAN),
        c.exponent_hi.unwrap_or(f64::INFINITY)
    );
    println!("encoder failures under H0: {:.4}", r.encoder_failure.value);
    Ok(())
}
