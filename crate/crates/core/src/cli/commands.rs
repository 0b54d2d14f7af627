//! Command dispatch: each command yields a CSV table, a metadata record and
//! a short human-readable summary.

use serde_json::{json, Value};

use super::config::{Command, RunConfig, VerifyCheck};
use super::output::{format_number, nested_rows, Cell, Table};
use crate::error::{Error, Result};
use crate::gaussian::{gw_gaussian_corner, hb_gaussian_frontier, GwGaussianParams};
use crate::oracle::{brute_force_frontier, exact_np_beta};
use crate::prob::{kl_divergence, Channel, HypothesisPair, JointPmf, Structure};
use crate::regions::{
    general_frontier, gw_frontier, hausdorff_distance, hb_frontier, less_noisy_check,
    noisy_frontier, AuxiliaryWitness, RatePoint, RegionFrontier,
};
use crate::sim::{run_trials, Rule, SimConfig, SimResult};

pub struct Outcome {
    pub table: Table,
    pub details: Value,
    pub summary: String,
}

/// Runs a validated configuration.
pub fn execute(config: &RunConfig) -> Result<Outcome> {
    config.validate()?;
    match config.command {
        Command::RegionGw | Command::RegionHb | Command::RegionGeneral | Command::RegionNoisy => {
            region(config)
        }
        Command::GaussianGw => gaussian_gw(config),
        Command::GaussianHb => gaussian_hb(config),
        Command::Simulate => simulate(config),
        Command::Verify => verify(config),
        Command::LessNoisy => less_noisy(config),
    }
}

fn instance(config: &RunConfig) -> &HypothesisPair {
    config.instance.as_ref().expect("validated")
}

fn witness_json(w: &AuxiliaryWitness) -> String {
    let ch = |c: &Channel| nested_rows(c.kernel(), c.cols());
    let mut parts = vec![format!("\"u0\":{}", ch(&w.u0))];
    if let Some(c) = &w.u1 {
        parts.push(format!("\"u1\":{}", ch(c)));
    }
    if let Some(c) = &w.u2 {
        parts.push(format!("\"u2\":{}", ch(c)));
    }
    if let Some(f) = &w.hybrid {
        let t: Vec<String> = f.table.iter().map(|v| v.to_string()).collect();
        parts.push(format!("\"f\":[{}]", t.join(",")));
    }
    format!("{{{}}}", parts.join(","))
}

const REGION_COLUMNS: [&str; 11] = [
    "r0",
    "r1",
    "r2",
    "r1_prime",
    "point",
    "lambda",
    "theta1",
    "theta2",
    "slacks",
    "exactness",
    "witness",
];

fn push_frontier(table: &mut Table, rates: Option<&RatePoint>, f: &RegionFrontier) {
    let exactness = serde_json::to_value(f.meta.exactness)
        .ok()
        .and_then(|v| v.as_str().map(str::to_string))
        .unwrap_or_default();
    for (i, p) in f.points.iter().enumerate() {
        let slacks: Vec<String> = p.slacks.iter().map(|s| format_number(*s)).collect();
        table.push(vec![
            rates.map(|r| r.r0).into(),
            rates.map(|r| r.r1).into(),
            rates.map(|r| r.r2).into(),
            rates.and_then(|r| r.r1_prime).into(),
            i.into(),
            p.lambda.into(),
            p.theta1.into(),
            p.theta2.into(),
            slacks.join(";").into(),
            exactness.as_str().into(),
            p.witness.as_ref().map(witness_json).into(),
        ]);
    }
}

fn region(config: &RunConfig) -> Result<Outcome> {
    let h = instance(config);
    let mut opts = config.solver.clone();
    opts.seed = config.seed;
    let name = config.command.name();
    let mut table = Table::new(name, &REGION_COLUMNS);
    let mut metas = Vec::new();
    let mut summary = Vec::new();
    if config.command == Command::RegionNoisy {
        let f = noisy_frontier(h, config.bc.as_ref().expect("validated"), &opts)?;
        push_frontier(&mut table, None, &f);
        summary.push(format!(
            "{} frontier points, max theta1 {}, max theta2 {}",
            f.points.len(),
            format_number(f.max_theta1()),
            format_number(f.max_theta2())
        ));
        metas.push(f.meta);
    } else {
        for r in &config.rates {
            let f = match config.command {
                Command::RegionGw => gw_frontier(h, *r, &opts)?,
                Command::RegionHb => hb_frontier(h, *r, &opts)?,
                _ => general_frontier(h, *r, &opts)?,
            };
            push_frontier(&mut table, Some(r), &f);
            summary.push(format!(
                "rates ({}, {}, {}): {} frontier points, max theta1 {}, max theta2 {}",
                format_number(r.r0),
                format_number(r.r1),
                format_number(r.r2),
                f.points.len(),
                format_number(f.max_theta1()),
                format_number(f.max_theta2())
            ));
            metas.push(f.meta);
        }
    }
    Ok(Outcome {
        table,
        details: json!({ "frontiers": metas }),
        summary: summary.join("\n"),
    })
}

fn gaussian_gw(config: &RunConfig) -> Result<Outcome> {
    let g = config.gaussian.as_ref().expect("validated");
    let mut table = Table::new(config.command.name(), &["r0", "theta1", "theta2"]);
    for &r0 in &g.r {
        let (t1, t2) = gw_gaussian_corner(&GwGaussianParams {
            sigma1_sq: g.sigma1_sq,
            sigma2_sq: g.sigma2_sq,
            r0,
        })?;
        table.push(vec![r0.into(), t1.into(), t2.into()]);
    }
    Ok(Outcome {
        summary: format!("{} corner(s) of the Gaussian rectangle", table.rows.len()),
        table,
        details: Value::Null,
    })
}

fn gaussian_hb(config: &RunConfig) -> Result<Outcome> {
    let g = config.gaussian.as_ref().expect("validated");
    let sz = g.sigmaz_sq.expect("validated");
    let mut table = Table::new(
        config.command.name(),
        &["r", "alpha_tilde", "theta1", "theta2"],
    );
    for &r in &g.r {
        for p in hb_gaussian_frontier(sz, g.sigma1_sq, g.sigma2_sq, r, g.grid)? {
            table.push(vec![
                r.into(),
                p.alpha_tilde.into(),
                p.theta1.into(),
                p.theta2.into(),
            ]);
        }
    }
    Ok(Outcome {
        summary: format!(
            "{} boundary points over {} rate(s)",
            table.rows.len(),
            g.r.len()
        ),
        table,
        details: Value::Null,
    })
}

const SIM_COLUMNS: [&str; 20] = [
    "scheme",
    "n",
    "block_len",
    "blocks",
    "hypothesis",
    "receiver",
    "trials",
    "errors",
    "error_rate",
    "ci_lo",
    "ci_hi",
    "exponent_hat",
    "censored",
    "beta_cond",
    "beta_cond_se",
    "exponent_cond",
    "threshold",
    "encoder_failure",
    "decode_failure",
    "ensemble_codebooks",
];

fn threshold(rule: &Rule) -> Cell {
    match rule {
        Rule::Typicality => Cell::Empty,
        Rule::LlrThreshold(t) => (*t).into(),
        Rule::MaxFailedBlocks(f) => (*f).into(),
    }
}

fn push_sim_rows(table: &mut Table, r: &SimResult) {
    let scheme = serde_json::to_value(r.scheme)
        .ok()
        .and_then(|v| v.as_str().map(str::to_string))
        .unwrap_or_default();
    for hyp in 0..2usize {
        for i in 0..2usize {
            let (p, trials) = if hyp == 0 {
                (&r.alpha_hat[i], r.trials_h0)
            } else {
                (&r.beta_hat[i], r.trials_h1)
            };
            let alt = hyp == 1;
            let c = &r.beta_cond[i];
            table.push(vec![
                scheme.as_str().into(),
                r.n.into(),
                r.block_len.into(),
                r.blocks.into(),
                hyp.into(),
                (i + 1).into(),
                trials.into(),
                p.count.into(),
                p.value.into(),
                p.lo.into(),
                p.hi.into(),
                if alt {
                    r.exponent_hat[i].value.into()
                } else {
                    Cell::Empty
                },
                if alt {
                    r.exponent_hat[i].censored.into()
                } else {
                    Cell::Empty
                },
                if alt { c.mean.into() } else { Cell::Empty },
                if alt { c.std_err.into() } else { Cell::Empty },
                if alt { c.exponent.into() } else { Cell::Empty },
                threshold(&r.rules[i]),
                if alt {
                    Cell::Empty
                } else {
                    r.encoder_failure.value.into()
                },
                if alt {
                    Cell::Empty
                } else {
                    r.decode_failure[i].value.into()
                },
                r.ensemble_codebooks.into(),
            ]);
        }
    }
}

fn simulate(config: &RunConfig) -> Result<Outcome> {
    let s = config.simulate.as_ref().expect("validated");
    let lens = if s.block_lens.is_empty() {
        vec![s.scheme.block_len]
    } else {
        s.block_lens.clone()
    };
    let mut table = Table::new(config.command.name(), &SIM_COLUMNS);
    let mut results = Vec::new();
    let mut summary = Vec::new();
    for k in lens {
        let mut scheme = s.scheme.clone();
        scheme.block_len = k;
        let sim = SimConfig {
            hypotheses: instance(config).clone(),
            scheme,
            calibration_trials: s.calibration_trials,
        };
        let r = run_trials(&sim, s.trials_h0, s.trials_h1, config.seed)?;
        push_sim_rows(&mut table, &r);
        summary.push(format!(
            "n = {}: alpha = ({}, {}), beta = ({}, {}), conditional exponents ({}, {})",
            r.n,
            format_number(r.alpha_hat[0].value),
            format_number(r.alpha_hat[1].value),
            format_number(r.beta_hat[0].value),
            format_number(r.beta_hat[1].value),
            r.beta_cond[0].exponent.map_or("-".into(), format_number),
            r.beta_cond[1].exponent.map_or("-".into(), format_number),
        ));
        results.push(r);
    }
    Ok(Outcome {
        table,
        details: json!({ "results": results }),
        summary: summary.join("\n"),
    })
}

fn verify(config: &RunConfig) -> Result<Outcome> {
    let v = config.verify.as_ref().expect("validated");
    match v.check {
        VerifyCheck::Frontier => {
            let h = instance(config);
            let mut opts = config.solver.clone();
            opts.seed = config.seed;
            let tol = 5e-3 + v.lipschitz * v.grid.step;
            let mut table = Table::new(
                config.command.name(),
                &[
                    "r0",
                    "r1",
                    "r2",
                    "solver_points",
                    "oracle_points",
                    "hausdorff",
                    "tolerance",
                    "within_tolerance",
                ],
            );
            let mut worst: f64 = 0.0;
            for r in &config.rates {
                let solver = match h.structure() {
                    Structure::AgainstIndependence => gw_frontier(h, *r, &opts)?,
                    Structure::AgainstConditionalIndependence => hb_frontier(h, *r, &opts)?,
                };
                let oracle = brute_force_frontier(h, *r, &v.grid)?;
                let d = hausdorff_distance(&solver.points, &oracle.points);
                worst = worst.max(d);
                table.push(vec![
                    r.r0.into(),
                    r.r1.into(),
                    r.r2.into(),
                    solver.points.len().into(),
                    oracle.points.len().into(),
                    d.into(),
                    tol.into(),
                    (d <= tol).into(),
                ]);
            }
            Ok(Outcome {
                summary: format!(
                    "max frontier discrepancy vs oracle: {} (tolerance {})",
                    format_number(worst),
                    format_number(tol)
                ),
                table,
                details: json!({ "max_hausdorff": worst, "tolerance": tol }),
            })
        }
        VerifyCheck::Stein => {
            let s = v.stein.as_ref().expect("validated");
            let p = JointPmf::single("X", &s.p)?;
            let q = JointPmf::single("X", &s.q)?;
            let d = kl_divergence(&p, &q)?;
            let mut table = Table::new(
                config.command.name(),
                &[
                    "n",
                    "epsilon",
                    "beta",
                    "exponent",
                    "divergence",
                    "relative_gap",
                ],
            );
            for &n in &s.n {
                let beta = exact_np_beta(&p, &q, n, s.epsilon)?;
                let e = -beta.log2() / n as f64;
                table.push(vec![
                    n.into(),
                    s.epsilon.into(),
                    beta.into(),
                    e.into(),
                    d.into(),
                    ((d - e) / d).into(),
                ]);
            }
            Ok(Outcome {
                summary: format!(
                    "exact Neyman-Pearson exponents at {} lengths, divergence {}",
                    s.n.len(),
                    format_number(d)
                ),
                table,
                details: Value::Null,
            })
        }
    }
}

fn less_noisy(config: &RunConfig) -> Result<Outcome> {
    let mut opts = config.solver.clone();
    opts.seed = config.seed;
    let v = less_noisy_check(instance(config).h0(), &opts)?;
    let mut table = Table::new(
        config.command.name(),
        &["holds", "min_gap", "label", "argmin_witness"],
    );
    let w = &v.argmin_witness;
    table.push(vec![
        v.holds.into(),
        v.min_gap.into(),
        v.label.as_str().into(),
        nested_rows(w.kernel(), w.cols()).into(),
    ]);
    Ok(Outcome {
        summary: format!(
            "less noisy: {} (min gap {}, {})",
            v.holds,
            format_number(v.min_gap),
            v.label
        ),
        table,
        details: Value::Null,
    })
}

/// Process exit status for an error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Schema { .. } => 2,
        Error::Normalization { .. }
        | Error::NotNormalized { .. }
        | Error::InvalidMass { .. }
        | Error::KernelNotStochastic { .. } => 3,
        Error::Io(_) => 5,
        Error::Simulation(_)
        | Error::InvalidScheme(_)
        | Error::CodebookTooLarge { .. }
        | Error::IndexOutOfRange { .. } => 6,
        _ => 4,
    }
}
