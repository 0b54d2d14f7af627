//! One trial of each scheme: encode, (transmit), decode, decide.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::codebook::{miss_all, Chosen, Codebooks};
use super::estimate::{tail_probability, Group};
use super::multinomial::poisson_binomial_tail;
use super::scheme::{Categorical, Scheme, SchemeKind, Sources};
use super::typicality::{flatten, CellBounds};
use crate::error::{Error, Result};
use crate::regions::DegradedBroadcast;
use crate::rng::stream;

/// Identifies the random substreams of one trial.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TrialKey {
    pub seed: u64,
    /// 0 or 1 for the hypothesis the sources follow; 2 for calibration.
    pub hypothesis: u8,
    pub trial: u64,
}

impl TrialKey {
    pub fn keys(&self) -> [u64; 2] {
        [self.hypothesis as u64, self.trial]
    }

    pub fn rng(&self, tag: &str, block: usize) -> ChaCha8Rng {
        stream(
            self.seed,
            tag,
            &[self.hypothesis as u64, self.trial, block as u64],
        )
    }
}

/// A receiver's decision rule.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Rule {
    /// gw: declare 0 iff the indexed codewords are jointly typical with `y`.
    Typicality,
    /// Declare 0 iff the log-likelihood-ratio sum reaches the threshold.
    LlrThreshold(f64),
    /// Declare 0 iff at most this many blocks fail.
    MaxFailedBlocks(usize),
}

impl Rule {
    pub fn decide(&self, statistic: f64, blocks: usize) -> u8 {
        let accept = match *self {
            Rule::Typicality => statistic >= 1.0,
            Rule::LlrThreshold(t) => statistic > f64::NEG_INFINITY && statistic >= t,
            Rule::MaxFailedBlocks(f) => blocks as f64 - statistic <= f as f64,
        };
        u8::from(!accept)
    }
}

/// Result of one trial.
#[derive(Debug, Clone, PartialEq)]
pub struct RoundOutcome {
    /// The transmitter sent the failure message (gw, hb).
    pub sentinel: bool,
    /// Blocks whose typicality search failed.
    pub encoder_failures: usize,
    /// Blocks where a receiver could not recover a unique codeword.
    pub decode_failures: [usize; 2],
    /// Typicality indicator (gw), LLR sum in bits or number of passing blocks.
    pub statistic: [f64; 2],
    pub decisions: Option<[u8; 2]>,
    /// Probability of deciding 0 over a fresh draw of the tested sequence
    /// under the alternative, given everything else in the trial.
    pub beta_cond: Option<[f64; 2]>,
}

/// Message of the gw transmitter.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GwMessage {
    Sentinel,
    Tuple(Chosen),
}

/// gw transmitter: a uniformly random typical tuple, or the sentinel.
pub fn gw_encode<R: Rng>(
    scheme: &Scheme,
    x: &[u8],
    books: &Codebooks,
    rng: &mut R,
) -> Result<GwMessage> {
    if scheme.kind() != SchemeKind::Gw {
        return Err(Error::InvalidScheme("gw_encode needs a gw scheme".into()));
    }
    if x.len() != scheme.n() {
        return Err(Error::LengthMismatch(x.len(), scheme.n()));
    }
    Ok(match scheme.encode_block(books, 0, x, rng) {
        Some(c) => GwMessage::Tuple(c),
        None => GwMessage::Sentinel,
    })
}

/// gw receiver `receiver` (1 or 2): 0 iff `(y, u0(m0), ui(mi|m0))` is
/// `mu`-typical; 1 on the sentinel.
pub fn gw_decide(
    scheme: &Scheme,
    receiver: usize,
    y: &[u8],
    msg: &GwMessage,
    books: &Codebooks,
) -> Result<u8> {
    let bounds = scheme
        .gw
        .as_ref()
        .ok_or_else(|| Error::InvalidScheme("gw_decide needs a gw scheme".into()))?;
    if !(1..=2).contains(&receiver) {
        return Err(Error::InvalidParameter(format!(
            "receiver {receiver} not in {{1, 2}}"
        )));
    }
    let c = match msg {
        GwMessage::Sentinel => return Ok(1),
        GwMessage::Tuple(c) => c,
    };
    let (u0, ui) = match (books, c.m0) {
        (Codebooks::Stored(cb), Some(m0)) => {
            let book = &cb.blocks[0];
            let sats = if receiver == 1 {
                &book.sats1
            } else {
                &book.sats2
            };
            let si = if receiver == 1 { c.s1 } else { c.s2 }.unwrap_or(0);
            let cloud = book.clouds.get(m0 as usize).ok_or(Error::IndexOutOfRange {
                index: m0,
                size: book.clouds.len() as u64,
            })?;
            let row = &sats[m0 as usize];
            let sat = row.get(si as usize).ok_or(Error::IndexOutOfRange {
                index: si,
                size: row.len() as u64,
            })?;
            (cloud.clone(), sat.clone())
        }
        _ => (
            c.u0.clone(),
            if receiver == 1 {
                c.u1.clone()
            } else {
                c.u2.clone()
            },
        ),
    };
    if y.len() != u0.len() {
        return Err(Error::LengthMismatch(y.len(), u0.len()));
    }
    let class = flatten(&[&u0, &ui], &[scheme.ku[0], scheme.ku[receiver]]);
    Ok(u8::from(!bounds[receiver - 1].check(&class, y)))
}

/// Degraded broadcast channel: `V1` from `W`, then `V2` from `V1`.
pub fn bc_channel_sample<R: Rng>(
    w: &[u8],
    bc: &DegradedBroadcast,
    rng: &mut R,
) -> (Vec<u8>, Vec<u8>) {
    let r1: Vec<Categorical> = (0..bc.v1_given_w().rows())
        .map(|r| Categorical::new(bc.v1_given_w().row(r)))
        .collect();
    let r2: Vec<Categorical> = (0..bc.v2_given_v1().rows())
        .map(|r| Categorical::new(bc.v2_given_v1().row(r)))
        .collect();
    sample_bc(w, &r1, &r2, rng)
}

fn sample_bc<R: Rng>(
    w: &[u8],
    r1: &[Categorical],
    r2: &[Categorical],
    rng: &mut R,
) -> (Vec<u8>, Vec<u8>) {
    let v1: Vec<u8> = w.iter().map(|&s| r1[s as usize].sample(rng)).collect();
    let v2: Vec<u8> = v1.iter().map(|&s| r2[s as usize].sample(rng)).collect();
    (v1, v2)
}

/// Unique-candidate decoding against `N = 2^bits - 1` competitors that are
/// i.i.d. draws of `law(class)`, independent of the observations.
fn ensemble_decode<'a, R: Rng>(
    bounds: &CellBounds,
    class: &[u8],
    truth: &[u8],
    others_bits: u32,
    law: impl Fn(usize) -> &'a [f64] + Copy,
    rng: &mut R,
) -> Option<Vec<u8>> {
    let true_ok = bounds.check(class, truth);
    if others_bits == 0 {
        return true_ok.then(|| truth.to_vec());
    }
    let ln_n = (2f64.powi(others_bits as i32) - 1.0).ln();
    let ln_p = bounds.ln_prob_given_classes(class, law);
    let none = miss_all(ln_p, ln_n);
    let u: f64 = rng.gen();
    if true_ok {
        return (u < none).then(|| truth.to_vec());
    }
    if ln_p == f64::NEG_INFINITY {
        return None;
    }
    // exactly one competitor typical: N p (1-p)^(N-1)
    let p = ln_p.exp();
    let one = if p >= 1.0 {
        if others_bits == 1 {
            1.0
        } else {
            0.0
        }
    } else {
        (ln_n + ln_p).exp() * none / (1.0 - p)
    };
    if u < one {
        bounds.sample_given_classes(class, law, rng)
    } else {
        None
    }
}

/// Per-receiver evidence over blocks, with class sequences of the decoded
/// codewords (`None` for a failed block).
struct Receiver<'a> {
    ny: usize,
    values: &'a [f64],
    llr_min: f64,
    pass: &'a CellBounds,
    law: &'a dyn Fn(usize) -> &'a [f64],
}

impl Receiver<'_> {
    fn statistic(&self, scheme: &Scheme, classes: &[Option<Vec<u8>>], y: &[u8]) -> f64 {
        let k = scheme.k;
        match scheme.params.aggregation {
            super::scheme::Aggregation::Llr => classes
                .iter()
                .enumerate()
                .map(|(b, c)| match c {
                    None => k as f64 * self.llr_min,
                    Some(c) => c
                        .iter()
                        .zip(&y[b * k..(b + 1) * k])
                        .map(|(&c, &y)| self.values[c as usize * self.ny + y as usize])
                        .sum(),
                })
                .sum(),
            super::scheme::Aggregation::TypicalFraction => classes
                .iter()
                .enumerate()
                .filter(|(b, c)| {
                    c.as_ref()
                        .is_some_and(|c| self.pass.check(c, &y[b * k..(b + 1) * k]))
                })
                .count() as f64,
        }
    }

    fn beta_cond<R: Rng>(
        &self,
        scheme: &Scheme,
        classes: &[Option<Vec<u8>>],
        rule: Rule,
        rng: &mut R,
    ) -> f64 {
        let k = scheme.k;
        match rule {
            Rule::LlrThreshold(t) => {
                let mut counts = vec![0usize; self.values.len() / self.ny];
                let mut failed = 0usize;
                for c in classes {
                    match c {
                        None => failed += 1,
                        Some(c) => c.iter().for_each(|&c| counts[c as usize] += 1),
                    }
                }
                let groups: Vec<Group> = counts
                    .iter()
                    .enumerate()
                    .filter(|(_, &n)| n > 0)
                    .map(|(c, &n)| Group {
                        count: n,
                        values: &self.values[c * self.ny..(c + 1) * self.ny],
                        law: (self.law)(c),
                    })
                    .collect();
                let shift = (failed * k) as f64 * self.llr_min;
                tail_probability(&groups, t - shift, scheme.params.is_samples, rng)
            }
            Rule::MaxFailedBlocks(f) => {
                let ps: Vec<f64> = classes
                    .iter()
                    .map(|c| match c {
                        None => 0.0,
                        Some(c) => self.pass.ln_prob_given_classes(c, self.law).exp(),
                    })
                    .collect();
                poisson_binomial_tail(&ps, classes.len().saturating_sub(f))
            }
            Rule::Typicality => 0.0,
        }
    }
}

fn check_lengths(scheme: &Scheme, s: &Sources) -> Result<()> {
    let n = scheme.n();
    for len in [s.x.len(), s.y1.len(), s.y2.len()] {
        if len != n {
            return Err(Error::LengthMismatch(len, n));
        }
    }
    if scheme.kind() != SchemeKind::Gw && s.z1.len() != n {
        return Err(Error::LengthMismatch(s.z1.len(), n));
    }
    Ok(())
}

fn verify_encoding(scheme: &Scheme, x: &[u8], c: &Chosen) -> Result<()> {
    if scheme.enc.check(x, &scheme.enc_target(&c.u0, &c.u1, &c.u2)) {
        Ok(())
    } else {
        Err(Error::Simulation(
            "encoder returned a tuple outside the mu/2 typical set".into(),
        ))
    }
}

fn sentinel_outcome(key: &TrialKey, rules: Option<&[Rule; 2]>, failures: usize) -> RoundOutcome {
    RoundOutcome {
        sentinel: true,
        encoder_failures: failures,
        decode_failures: [0, 0],
        statistic: [f64::NEG_INFINITY; 2],
        decisions: rules.map(|_| [1, 1]),
        beta_cond: (rules.is_some() && key.hypothesis == 1).then_some([0.0, 0.0]),
    }
}

/// One gw trial.
pub fn gw_round(
    scheme: &Scheme,
    sources: &Sources,
    books: &Codebooks,
    key: &TrialKey,
) -> Result<RoundOutcome> {
    check_lengths(scheme, sources)?;
    let rules = [Rule::Typicality; 2];
    let msg = gw_encode(scheme, &sources.x, books, &mut key.rng("encoder", 0))?;
    let c = match &msg {
        GwMessage::Sentinel => return Ok(sentinel_outcome(key, Some(&rules), 1)),
        GwMessage::Tuple(c) => c,
    };
    verify_encoding(scheme, &sources.x, c)?;
    let bounds = scheme.gw.as_ref().expect("gw scheme");
    let mut stat = [0.0; 2];
    let mut beta = [0.0; 2];
    for (i, (ui, y)) in [(&c.u1, &sources.y1), (&c.u2, &sources.y2)]
        .into_iter()
        .enumerate()
    {
        let class = flatten(&[&c.u0, ui], &[scheme.ku[0], scheme.ku[i + 1]]);
        stat[i] = f64::from(u8::from(bounds[i].check(&class, y)));
        if key.hypothesis == 1 {
            beta[i] = bounds[i]
                .ln_prob_given_classes(&class, |_| &scheme.gw_h1_y[i])
                .exp();
        }
    }
    Ok(RoundOutcome {
        sentinel: false,
        encoder_failures: 0,
        decode_failures: [0, 0],
        statistic: stat,
        decisions: Some([rules[0].decide(stat[0], 1), rules[1].decide(stat[1], 1)]),
        beta_cond: (key.hypothesis == 1).then_some(beta),
    })
}

fn block<'a>(s: &'a [u8], b: usize, k: usize) -> &'a [u8] {
    &s[b * k..(b + 1) * k]
}

/// Shared tail of the hb and noisy rounds: statistics, decisions and
/// conditional type-II probabilities from per-block decoded class sequences.
fn finish(
    scheme: &Scheme,
    sources: &Sources,
    classes: [Vec<Option<Vec<u8>>>; 2],
    encoder_failures: usize,
    rules: Option<&[Rule; 2]>,
    key: &TrialKey,
) -> RoundOutcome {
    let side = scheme.side.as_ref().expect("hb/noisy scheme");
    let nz = side.nz;
    let law1 = |c: usize| side.h1_y1_given_z[c % nz].as_slice();
    let law2 = |_: usize| side.h1_y2.as_slice();
    let receivers = [
        Receiver {
            ny: side.ny1,
            values: &side.llr1,
            llr_min: side.llr_min[0],
            pass: &side.pass[0],
            law: &law1,
        },
        Receiver {
            ny: side.ny2,
            values: &side.llr2,
            llr_min: side.llr_min[1],
            pass: &side.pass[1],
            law: &law2,
        },
    ];
    let ys = [&sources.y1, &sources.y2];
    let mut stat = [0.0; 2];
    let mut beta = [0.0; 2];
    let mut is_rng = key.rng("tilt", 0);
    for i in 0..2 {
        stat[i] = receivers[i].statistic(scheme, &classes[i], ys[i]);
        if let (Some(r), 1) = (rules, key.hypothesis) {
            beta[i] = receivers[i].beta_cond(scheme, &classes[i], r[i], &mut is_rng);
        }
    }
    RoundOutcome {
        sentinel: false,
        encoder_failures,
        decode_failures: [0, 1].map(|i| classes[i].iter().filter(|c| c.is_none()).count()),
        statistic: stat,
        decisions: rules.map(|r| {
            [
                r[0].decide(stat[0], scheme.blocks),
                r[1].decide(stat[1], scheme.blocks),
            ]
        }),
        beta_cond: (rules.is_some() && key.hypothesis == 1).then_some(beta),
    }
}

/// One hb trial with binning; any failed block search sends the failure
/// message, and both receivers then declare 1.
pub fn hb_round(
    scheme: &Scheme,
    sources: &Sources,
    books: &Codebooks,
    rules: Option<&[Rule; 2]>,
    key: &TrialKey,
) -> Result<RoundOutcome> {
    if scheme.kind() != SchemeKind::Hb {
        return Err(Error::InvalidScheme("hb_round needs an hb scheme".into()));
    }
    check_lengths(scheme, sources)?;
    let k = scheme.k;
    let mut chosen = Vec::with_capacity(scheme.blocks);
    let mut failures = 0;
    for b in 0..scheme.blocks {
        let x = block(&sources.x, b, k);
        match scheme.encode_block(books, b, x, &mut key.rng("encoder", b)) {
            Some(c) => {
                verify_encoding(scheme, x, &c)?;
                chosen.push(c);
            }
            None => failures += 1,
        }
    }
    if failures > 0 {
        return Ok(sentinel_outcome(key, rules, failures));
    }
    let side = scheme.side.as_ref().expect("hb scheme");
    let bin_dec = scheme.bin_dec.as_ref().expect("hb scheme");
    let (k0, k1, nz) = (scheme.ku[0], scheme.ku[1], side.nz);
    let mut c1 = Vec::with_capacity(scheme.blocks);
    let mut c2 = Vec::with_capacity(scheme.blocks);
    for (b, c) in chosen.iter().enumerate() {
        let z = block(&sources.z1, b, k);
        let class = flatten(&[&c.u0, z], &[k0, nz]);
        let u1_hat = match books {
            Codebooks::Stored(cb) => {
                let (m0, s1) = (
                    c.m0.expect("stored") as usize,
                    c.s1.expect("stored") as usize,
                );
                let bin = cb.bin_of(b, s1);
                let sats = &cb.blocks[b].sats1[m0];
                let hits: Vec<usize> = cb
                    .bin_members(b, bin)
                    .into_iter()
                    .filter(|&s| bin_dec.check(&class, &sats[s]))
                    .collect();
                match hits.as_slice() {
                    [s] => Some(sats[*s].clone()),
                    _ => None,
                }
            }
            Codebooks::Implicit(_) => ensemble_decode(
                bin_dec,
                &class,
                &c.u1,
                scheme.bits[1] - scheme.bin_bits,
                |cl| scheme.p_u1[cl / nz].p.as_slice(),
                &mut key.rng("decoder", b),
            ),
        };
        c1.push(u1_hat.map(|u1| flatten(&[&c.u0, &u1, z], &[k0, k1, nz])));
        c2.push(Some(c.u0.clone()));
    }
    Ok(finish(scheme, sources, [c1, c2], 0, rules, key))
}

/// One noisy trial: hybrid channel inputs over a degraded broadcast channel.
pub fn noisy_round(
    scheme: &Scheme,
    sources: &Sources,
    books: &Codebooks,
    rules: Option<&[Rule; 2]>,
    key: &TrialKey,
) -> Result<RoundOutcome> {
    let nt = scheme
        .noisy
        .as_ref()
        .ok_or_else(|| Error::InvalidScheme("noisy_round needs a noisy scheme".into()))?;
    check_lengths(scheme, sources)?;
    let side = scheme.side.as_ref().expect("noisy scheme");
    let (k, k0, k1, nz) = (scheme.k, scheme.ku[0], scheme.ku[1], side.nz);
    let mut failures = 0;
    let mut c1 = Vec::with_capacity(scheme.blocks);
    let mut c2 = Vec::with_capacity(scheme.blocks);
    for b in 0..scheme.blocks {
        let x = block(&sources.x, b, k);
        let z = block(&sources.z1, b, k);
        let mut enc_rng = key.rng("encoder", b);
        let c = match scheme.encode_block(books, b, x, &mut enc_rng) {
            Some(c) => {
                verify_encoding(scheme, x, &c)?;
                c
            }
            None => {
                failures += 1;
                scheme.random_tuple(books, b, &mut enc_rng)
            }
        };
        let w: Vec<u8> = (0..k)
            .map(|i| {
                nt.f.apply(c.u0[i] as usize, c.u1[i] as usize, x[i] as usize) as u8
            })
            .collect();
        let (v1, v2) = sample_bc(
            &w,
            &nt.v1_given_w,
            &nt.v2_given_v1,
            &mut key.rng("channel", b),
        );
        let class1 = flatten(&[&v1, z], &[nt.nv1, nz]);
        let class2 = v2;
        let mut dec_rng = key.rng("decoder", b);
        let (pair, u0_hat) = match books {
            Codebooks::Stored(cb) => {
                let book = &cb.blocks[b];
                let mut pairs = Vec::new();
                let mut clouds = Vec::new();
                for (m0, u0) in book.clouds.iter().enumerate() {
                    if nt.dec2.check(&class2, u0) {
                        clouds.push(m0);
                    }
                    if !nt.dec1_cloud.check(&class1, u0) {
                        continue;
                    }
                    for (s, u1) in book.sats1[m0].iter().enumerate() {
                        if nt.dec1.check(&class1, &flatten(&[u0, u1], &[k0, k1])) {
                            pairs.push((m0, s));
                        }
                    }
                }
                let pair = match pairs.as_slice() {
                    [(m0, s)] => Some((book.clouds[*m0].clone(), book.sats1[*m0][*s].clone())),
                    _ => None,
                };
                let u0_hat = match clouds.as_slice() {
                    [m0] => Some(book.clouds[*m0].clone()),
                    _ => None,
                };
                (pair, u0_hat)
            }
            Codebooks::Implicit(layer) => {
                let law = scheme.layer_law(*layer);
                let truth = flatten(&[&c.u0, &c.u1], &[k0, k1]);
                let pair = ensemble_decode(
                    &nt.dec1,
                    &class1,
                    &truth,
                    scheme.bits[0] + scheme.bits[1],
                    |_| law,
                    &mut dec_rng,
                )
                .map(|t| {
                    (
                        t.iter().map(|&v| v / k1 as u8).collect::<Vec<u8>>(),
                        t.iter().map(|&v| v % k1 as u8).collect::<Vec<u8>>(),
                    )
                });
                let u0_hat = ensemble_decode(
                    &nt.dec2,
                    &class2,
                    &c.u0,
                    scheme.bits[0],
                    |_| &scheme.p_u0.p,
                    &mut dec_rng,
                );
                (pair, u0_hat)
            }
        };
        c1.push(pair.map(|(u0, u1)| flatten(&[&u0, &u1, z], &[k0, k1, nz])));
        c2.push(u0_hat);
    }
    Ok(finish(scheme, sources, [c1, c2], failures, rules, key))
}
