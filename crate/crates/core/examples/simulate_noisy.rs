//! Hybrid coding over a degraded broadcast channel.
//!
//! Part one runs the hb scheme without binning next to the noisy scheme over
//! a noiseless channel carrying the codeword index symbolwise; with shared
//! seeds and thresholds the two should decide identically. Part two measures
//! receiver 2's exponent over a pair of BSCs, using a witness designed for a
//! noisier pair so the cloud rate has room on both sides.
//!
//! Usage: `cargo run --release --example simulate_noisy -- [k] [trials] [d1] [d2] [mu]
//! [paired_k] [paired_r1] [paired_q]`

use hypotest::prob::axes::{U0, U1, V2, X, Y1, Y2, Z1};
use hypotest::prob::{mutual_information, Alphabet, Channel, HypothesisPair, JointPmf, Structure};
use hypotest::regions::{
    noisy_frontier, AuxiliaryWitness, DegradedBroadcast, HybridMap, RatePoint, SolverOptions,
};
use hypotest::sim::{
    decision_rules, run_single_trial, run_trials, Scheme, SchemeKind, SchemeParams, SimConfig,
};

fn arg<T: std::str::FromStr>(i: usize, default: T) -> T {
    std::env::args()
        .nth(i)
        .and_then(|a| a.parse().ok())
        .unwrap_or(default)
}

fn instance(pz: f64, p1: f64, p2: f64) -> Result<HypothesisPair, Box<dyn std::error::Error>> {
    let h0 = JointPmf::bernoulli(X, 0.5)?
        .extend(&Channel::bsc(X, Z1, pz)?)?
        .extend(&Channel::bsc(X, Y1, p1)?)?
        .extend(&Channel::bsc(X, Y2, p2)?)?;
    Ok(HypothesisPair::from_null(
        h0,
        Structure::AgainstConditionalIndependence,
    )?)
}

fn params(
    kind: SchemeKind,
    witness: AuxiliaryWitness,
    rates: RatePoint,
    k: usize,
    mu: f64,
) -> SchemeParams {
    SchemeParams {
        kind,
        witness,
        rates,
        mu: Some(mu),
        epsilon: 0.1,
        block_len: k,
        blocks: 1,
        aggregation: Default::default(),
        codebook: Default::default(),
        codebook_budget_bits: 26,
        bc: None,
        thresholds: None,
        is_samples: 16,
    }
}

/// hb with singleton bins against noisy over a noiseless index channel.
fn paired(trials: usize, k: usize, r1: f64, q: f64) -> Result<(), Box<dyn std::error::Error>> {
    let h = instance(0.2, 0.1, 0.1)?;
    let u0 = Channel::new(
        vec![Alphabet::new(X, 2)?],
        vec![Alphabet::new(U0, 1)?],
        vec![1.0, 1.0],
    )?;
    let u1 = Channel::from_fn(
        vec![Alphabet::new(X, 2)?, Alphabet::new(U0, 1)?],
        vec![Alphabet::new(U1, 2)?],
        |f, t| if f[0] == t[0] { 1.0 - q } else { q },
    )?;
    let witness = AuxiliaryWitness {
        u0,
        u1: Some(u1),
        u2: None,
        hybrid: Some(HybridMap {
            sizes: [1, 2, 2],
            w_size: 2,
            table: vec![0, 0, 1, 1],
        }),
    };
    let mu = 0.8;
    let rates = RatePoint {
        r0: 0.0,
        r1,
        r2: 0.0,
        r1_prime: Some(0.0),
    };
    let hb = Scheme::new(&h, params(SchemeKind::Hb, witness.clone(), rates, k, mu))?;
    let mut np = params(SchemeKind::Noisy, witness, rates, k, mu);
    np.bc = Some(DegradedBroadcast::noiseless(2)?);
    let noisy = Scheme::new(&h, np)?;
    let rules = decision_rules(&hb, 5, trials)?;
    let mut agree = 0;
    let mut sentinels = 0;
    let mut total = 0;
    for hyp in 0..2u8 {
        for t in 0..trials as u64 {
            let a = run_single_trial(&hb, 5, hyp, t, Some(&rules))?;
            let b = run_single_trial(&noisy, 5, hyp, t, Some(&rules))?;
            total += 1;
            sentinels += usize::from(a.sentinel);
            agree += usize::from(a.decisions == b.decisions);
        }
    }
    println!("paired reduction (k = {k}, rules {rules:?}): {agree}/{total} identical decisions, {sentinels} failure messages");
    Ok(())
}

fn exponent(
    k: usize,
    trials: usize,
    d: (f64, f64),
    mu: f64,
) -> Result<(), Box<dyn std::error::Error>> {
    let h = instance(0.1, 0.05, 0.05)?;
    let opts = SolverOptions {
        restarts: 4,
        lambda_grid: 3,
        caps: [Some(2), Some(1), None],
        ..Default::default()
    };
    let design = noisy_frontier(&h, &DegradedBroadcast::bsc_pair(d.0, d.1)?, &opts)?;
    let best = design
        .points
        .iter()
        .max_by(|a, b| a.theta2.total_cmp(&b.theta2))
        .ok_or("empty frontier")?;
    let witness = best.witness.clone().ok_or("missing witness")?;
    let bc = DegradedBroadcast::bsc_pair(0.02, 0.03)?;
    let joint = witness.joint_with(h.h0())?;
    let i_x = mutual_information(&joint, &[U0], &[X], &[])?;
    let v2 = joint.extend(&Channel::deterministic(
        vec![Alphabet::new(U0, 2)?],
        vec![Alphabet::new("W", 2)?],
        |u| {
            vec![witness
                .hybrid
                .as_ref()
                .map_or(u[0], |f| f.apply(u[0], 0, 0))]
        },
    )?)?;
    let v2 = v2.extend(&bc.v2_given_w()?)?;
    let i_v2 = mutual_information(&v2, &[U0], &[V2], &[])?;
    let r0 = 0.5 * (i_x + i_v2);
    println!(
        "witness theta2 = {:.4}, map {:?}; I(U0;X) = {i_x:.4}, I(U0;V2) = {i_v2:.4}, R0 = {r0:.4}",
        best.theta2,
        witness.hybrid.as_ref().map(|f| &f.table)
    );
    let mut p = params(
        SchemeKind::Noisy,
        witness,
        RatePoint::new(r0, 0.0, 0.0)?,
        k,
        mu,
    );
    p.bc = Some(bc);
    let config = SimConfig {
        hypotheses: h,
        scheme: p,
        calibration_trials: None,
    };
    let r = run_trials(&config, trials, trials, 13)?;
    let c = &r.beta_cond[1];
    println!(
        "n = {}, alpha_2 = {:.4}, decode failures {:.4}, conditional beta_2 = {:.3e}, exponent {:.4} (ratio {:.3})",
        r.n,
        r.alpha_hat[1].value,
        r.decode_failure[1].value,
        c.mean,
        c.exponent.unwrap_or(f64::NAN),
        c.exponent.unwrap_or(f64::NAN) / best.theta2
    );
    Ok(())
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let k: usize = arg(1, 1000);
    let trials: usize = arg(2, 2000);
    let d1: f64 = arg(3, 0.06);
    let d2: f64 = arg(4, 0.08);
    let mu: f64 = arg(5, 0.5);
    let pk: usize = arg(6, 100);
    let pr: f64 = arg(7, 0.12);
    let pq: f64 = arg(8, 0.35);
    paired(trials.min(1000), pk, pr, pq)?;
    exponent(k, trials, (d1, d2), mu)
}
