//! Repeated trials with fresh codebooks, and the resulting error estimates.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::multinomial::wilson;
use super::rounds::{gw_round, hb_round, noisy_round, RoundOutcome, Rule, TrialKey};
use super::scheme::{Aggregation, Scheme, SchemeKind, SchemeParams};
use crate::error::{Error, Result};
use crate::prob::HypothesisPair;
use crate::rng::RNG_ID;

/// Instance and scheme of one simulation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub hypotheses: HypothesisPair,
    pub scheme: SchemeParams,
    /// Held-out null trials for threshold calibration (defaults to `trials_h0`).
    #[serde(default)]
    pub calibration_trials: Option<usize>,
}

/// An empirical frequency with its Wilson 95% interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Proportion {
    pub count: u64,
    pub total: u64,
    pub value: f64,
    pub lo: f64,
    pub hi: f64,
}

impl Proportion {
    pub fn new(count: u64, total: u64) -> Self {
        let (lo, hi) = wilson(count, total);
        Proportion {
            count,
            total,
            value: if total == 0 {
                0.0
            } else {
                count as f64 / total as f64
            },
            lo,
            hi,
        }
    }
}

/// `-(1/n) log2 beta_hat`, withheld when fewer than [`MIN_ERRORS`] errors were seen.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExponentEstimate {
    pub value: Option<f64>,
    pub censored: bool,
}

pub const MIN_ERRORS: u64 = 20;

/// Average over alternative-hypothesis trials of the probability of a wrong
/// acceptance given the trial's codebooks, source and channel draws.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConditionalEstimate {
    pub mean: f64,
    pub std_err: f64,
    /// `-(1/n) log2 mean`; `None` when the mean is zero.
    pub exponent: Option<f64>,
    /// Exponent interval from `mean ± 1.96 std_err`; the upper end is `None`
    /// when the lower mean bound is not positive.
    pub exponent_lo: Option<f64>,
    pub exponent_hi: Option<f64>,
}

impl ConditionalEstimate {
    fn new(values: &[f64], n: usize) -> Self {
        let t = values.len() as f64;
        let mean = values.iter().sum::<f64>() / t;
        let var = if values.len() > 1 {
            values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (t - 1.0)
        } else {
            0.0
        };
        let std_err = (var / t).sqrt();
        let exp = |m: f64| (m > 0.0).then(|| -m.log2() / n as f64);
        ConditionalEstimate {
            mean,
            std_err,
            exponent: exp(mean),
            exponent_lo: exp((mean + 1.96 * std_err).min(1.0)),
            exponent_hi: exp(mean - 1.96 * std_err),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimResult {
    pub scheme: SchemeKind,
    pub n: usize,
    pub block_len: usize,
    pub blocks: usize,
    pub mu: f64,
    pub epsilon: f64,
    pub ensemble_codebooks: bool,
    pub trials_h0: usize,
    pub trials_h1: usize,
    pub calibration_trials: usize,
    pub rules: [Rule; 2],
    pub alpha_hat: [Proportion; 2],
    pub beta_hat: [Proportion; 2],
    pub exponent_hat: [ExponentEstimate; 2],
    pub beta_cond: [ConditionalEstimate; 2],
    /// Null trials in which some block search failed.
    pub encoder_failure: Proportion,
    /// Null-hypothesis blocks a receiver could not decode (trials without the
    /// failure message only).
    pub decode_failure: [Proportion; 2],
    pub config_hash: String,
    pub seed: u64,
    pub rng: String,
}

/// sha256 of the canonical JSON of `value`.
pub fn config_hash<T: Serialize>(value: &T) -> Result<String> {
    let bytes = serde_json::to_vec(value).map_err(|e| Error::InvalidParameter(e.to_string()))?;
    let digest = Sha256::digest(&bytes);
    Ok(digest.iter().map(|b| format!("{b:02x}")).collect())
}

/// Runs one trial; `hypothesis` 2 draws null sources on calibration substreams.
pub fn run_single_trial(
    scheme: &Scheme,
    seed: u64,
    hypothesis: u8,
    trial: u64,
    rules: Option<&[Rule; 2]>,
) -> Result<RoundOutcome> {
    let key = TrialKey {
        seed,
        hypothesis,
        trial,
    };
    let sources = scheme.sample_sources(u8::from(hypothesis == 1), &mut key.rng("source", 0));
    let books = scheme.codebooks(seed, &key.keys())?;
    let out = match scheme.kind() {
        SchemeKind::Gw => gw_round(scheme, &sources, &books, &key)?,
        SchemeKind::Hb => hb_round(scheme, &sources, &books, rules, &key)?,
        SchemeKind::Noisy => noisy_round(scheme, &sources, &books, rules, &key)?,
    };
    if out.sentinel && out.decisions.is_some_and(|d| d != [1, 1]) {
        return Err(Error::Simulation(format!(
            "trial {trial}: failure message did not force both receivers to 1"
        )));
    }
    Ok(out)
}

fn run_many(
    scheme: &Scheme,
    seed: u64,
    hypothesis: u8,
    trials: usize,
    rules: Option<&[Rule; 2]>,
) -> Result<Vec<RoundOutcome>> {
    (0..trials as u64)
        .into_par_iter()
        .map(|t| run_single_trial(scheme, seed, hypothesis, t, rules))
        .collect()
}

/// Decision rules meeting the type-I budget `epsilon` on the given null statistics.
pub fn calibrate(scheme: &Scheme, null_outcomes: &[RoundOutcome]) -> [Rule; 2] {
    let eps = scheme.params.epsilon;
    let n = null_outcomes.len();
    let allowed = (eps * n as f64).floor() as usize;
    [0, 1].map(|i| {
        let mut stats: Vec<f64> = null_outcomes.iter().map(|o| o.statistic[i]).collect();
        stats.sort_by(f64::total_cmp);
        match scheme.params.aggregation {
            Aggregation::Llr => Rule::LlrThreshold(stats[allowed.min(n - 1)]),
            Aggregation::TypicalFraction => {
                let b = scheme.blocks;
                // smallest f with at most `allowed` trials failing more than f blocks
                let failed: Vec<usize> = stats.iter().map(|&s| b - s.max(0.0) as usize).collect();
                let f = (0..=b)
                    .find(|&f| failed.iter().filter(|&&x| x > f).count() <= allowed)
                    .unwrap_or(b);
                Rule::MaxFailedBlocks(f)
            }
        }
    })
}

/// Rules of a scheme: gw uses typicality; otherwise fixed thresholds when
/// configured, else calibration on `calibration_trials` held-out null trials.
pub fn decision_rules(scheme: &Scheme, seed: u64, calibration_trials: usize) -> Result<[Rule; 2]> {
    if scheme.kind() == SchemeKind::Gw {
        return Ok([Rule::Typicality; 2]);
    }
    if let Some(t) = scheme.params.thresholds {
        return Ok(t.map(|v| match scheme.params.aggregation {
            Aggregation::Llr => Rule::LlrThreshold(v),
            Aggregation::TypicalFraction => Rule::MaxFailedBlocks(v.max(0.0) as usize),
        }));
    }
    if calibration_trials == 0 {
        return Err(Error::InvalidParameter("calibration needs trials".into()));
    }
    let cal = run_many(scheme, seed, 2, calibration_trials, None)?;
    Ok(calibrate(scheme, &cal))
}

/// Error estimates averaged over fresh codebooks per trial.
pub fn run_trials(
    config: &SimConfig,
    trials_h0: usize,
    trials_h1: usize,
    seed: u64,
) -> Result<SimResult> {
    if trials_h0 == 0 || trials_h1 == 0 {
        return Err(Error::InvalidParameter(
            "trial counts must be positive".into(),
        ));
    }
    let scheme = Scheme::new(&config.hypotheses, config.scheme.clone())?;
    let calibration_trials = config.calibration_trials.unwrap_or(trials_h0);
    let rules = decision_rules(&scheme, seed, calibration_trials)?;
    let h0 = run_many(&scheme, seed, 0, trials_h0, Some(&rules))?;
    let h1 = run_many(&scheme, seed, 1, trials_h1, Some(&rules))?;
    let n = scheme.n();
    let count = |v: &[RoundOutcome], i: usize, d: u8| {
        v.iter()
            .filter(|o| o.decisions.expect("rules given")[i] == d)
            .count() as u64
    };
    let alpha_hat = [0, 1].map(|i| Proportion::new(count(&h0, i, 1), trials_h0 as u64));
    let beta_hat = [0, 1].map(|i| Proportion::new(count(&h1, i, 0), trials_h1 as u64));
    let exponent_hat = beta_hat.map(|b| {
        let censored = b.count < MIN_ERRORS;
        ExponentEstimate {
            value: (!censored).then(|| -b.value.log2() / n as f64),
            censored,
        }
    });
    let beta_cond = [0, 1].map(|i| {
        let v: Vec<f64> = h1
            .iter()
            .map(|o| o.beta_cond.expect("alternative trials")[i])
            .collect();
        ConditionalEstimate::new(&v, n)
    });
    let clean: Vec<&RoundOutcome> = h0.iter().filter(|o| !o.sentinel).collect();
    let decode_failure = [0, 1].map(|i| {
        Proportion::new(
            clean.iter().map(|o| o.decode_failures[i] as u64).sum(),
            (clean.len() * scheme.blocks) as u64,
        )
    });
    Ok(SimResult {
        scheme: scheme.kind(),
        n,
        block_len: scheme.k,
        blocks: scheme.blocks,
        mu: scheme.mu,
        epsilon: scheme.params.epsilon,
        ensemble_codebooks: scheme.is_ensemble(),
        trials_h0,
        trials_h1,
        calibration_trials: if scheme.kind() == SchemeKind::Gw || scheme.params.thresholds.is_some()
        {
            0
        } else {
            calibration_trials
        },
        rules,
        alpha_hat,
        beta_hat,
        exponent_hat,
        beta_cond,
        encoder_failure: Proportion::new(
            h0.iter().filter(|o| o.encoder_failures > 0).count() as u64,
            trials_h0 as u64,
        ),
        decode_failure,
        config_hash: config_hash(&(config, trials_h0, trials_h1))?,
        seed,
        rng: RNG_ID.to_string(),
    })
}
