//! Scheme parameters and the lookup tables compiled from them.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::typicality::CellBounds;
use crate::error::{Error, Result};
use crate::prob::axes::{U0, U1, U2, V1, V2, W, X, Y1, Y2, Z1};
use crate::prob::{mutual_information, Alphabet, Channel, HypothesisPair, JointPmf, Structure};
use crate::regions::{AuxiliaryWitness, DegradedBroadcast, RatePoint};

/// Interior slack required on the schemes' strict rate inequalities.
pub const RATE_SLACK: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SchemeKind {
    Gw,
    Hb,
    Noisy,
}

/// How the per-block evidence of a receiver becomes one decision (hb, noisy).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Aggregation {
    /// Sum of per-symbol log-likelihood ratios against a calibrated threshold.
    #[default]
    Llr,
    /// At least a calibrated fraction of blocks must pass joint typicality.
    TypicalFraction,
}

/// Whether codebooks are stored or drawn implicitly.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CodebookMode {
    /// Stored when small, implicit when eligible, error otherwise.
    #[default]
    Auto,
    Materialized,
    /// Only one codebook layer is random; the chosen codeword and the number
    /// of competing codewords are sampled from their exact laws.
    Ensemble,
}

fn one() -> usize {
    1
}

fn default_budget_bits() -> u32 {
    26
}

fn default_is_samples() -> usize {
    16
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SchemeParams {
    pub kind: SchemeKind,
    pub witness: AuxiliaryWitness,
    pub rates: RatePoint,
    /// Typicality slack; defaults to 0.15 for `n <= 200` and 0.1 above.
    #[serde(default)]
    pub mu: Option<f64>,
    pub epsilon: f64,
    /// Block length `k` (the full length `n` for gw).
    pub block_len: usize,
    #[serde(default = "one")]
    pub blocks: usize,
    #[serde(default)]
    pub aggregation: Aggregation,
    #[serde(default)]
    pub codebook: CodebookMode,
    /// log2 of the largest number of stored codeword symbols per block.
    #[serde(default = "default_budget_bits")]
    pub codebook_budget_bits: u32,
    #[serde(default)]
    pub bc: Option<DegradedBroadcast>,
    /// Fixed decision thresholds; calibrated on held-out null trials when absent.
    #[serde(default)]
    pub thresholds: Option<[f64; 2]>,
    /// Importance-sampling draws per trial for conditional type-II estimates.
    #[serde(default = "default_is_samples")]
    pub is_samples: usize,
}

impl SchemeParams {
    pub fn n(&self) -> usize {
        self.block_len * self.blocks
    }

    pub fn resolved_mu(&self) -> f64 {
        self.mu.unwrap_or(if self.n() <= 200 { 0.15 } else { 0.1 })
    }
}

/// Which single codebook layer is random in ensemble mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Layer {
    Cloud,
    Sat1,
    Sat2,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Mode {
    Materialized,
    Ensemble(Layer),
}

/// A categorical law with its cumulative table.
#[derive(Debug, Clone)]
pub(crate) struct Categorical {
    pub p: Vec<f64>,
    cdf: Vec<f64>,
}

impl Categorical {
    pub fn new(p: &[f64]) -> Self {
        let mut acc = 0.0;
        let cdf = p
            .iter()
            .map(|v| {
                acc += v;
                acc
            })
            .collect();
        Categorical { p: p.to_vec(), cdf }
    }

    #[inline]
    pub fn sample<R: Rng>(&self, rng: &mut R) -> u8 {
        let u: f64 = rng.gen::<f64>() * self.cdf[self.cdf.len() - 1];
        let i = self
            .cdf
            .iter()
            .position(|&c| u < c)
            .unwrap_or(self.cdf.len() - 1);
        // never return a zero-mass symbol through rounding at the top
        if self.p[i] > 0.0 {
            i as u8
        } else {
            self.p.iter().rposition(|&v| v > 0.0).unwrap_or(0) as u8
        }
    }

    fn rows(ch: &Channel) -> Vec<Categorical> {
        (0..ch.rows())
            .map(|r| Categorical::new(ch.row(r)))
            .collect()
    }
}

/// Source sequences of one trial.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sources {
    pub x: Vec<u8>,
    pub y1: Vec<u8>,
    pub y2: Vec<u8>,
    /// Empty when the instance has no side information.
    pub z1: Vec<u8>,
}

#[derive(Debug, Clone)]
pub(crate) struct SourceSampler {
    cells: Categorical,
    sizes: Vec<usize>,
    pos: [Option<usize>; 4],
}

impl SourceSampler {
    fn new(p: &JointPmf) -> Result<Self> {
        let find = |n: &str| p.axis_position(n).ok();
        Ok(SourceSampler {
            cells: Categorical::new(p.mass()),
            sizes: p.axes().iter().map(|a| a.size).collect(),
            pos: [find(X), find(Y1), find(Y2), find(Z1)],
        })
    }

    pub fn sample<R: Rng>(&self, n: usize, rng: &mut R) -> Sources {
        let mut seqs: [Vec<u8>; 4] = Default::default();
        let mut idx = vec![0usize; self.sizes.len()];
        for _ in 0..n {
            let u: f64 = rng.gen::<f64>() * self.cells.cdf[self.cells.cdf.len() - 1];
            let mut flat = self
                .cells
                .cdf
                .iter()
                .position(|&c| u < c)
                .unwrap_or(self.cells.p.len() - 1);
            while self.cells.p[flat] == 0.0 {
                flat -= 1;
            }
            for a in (0..self.sizes.len()).rev() {
                idx[a] = flat % self.sizes[a];
                flat /= self.sizes[a];
            }
            for (s, p) in seqs.iter_mut().zip(&self.pos) {
                if let Some(p) = p {
                    s.push(idx[*p] as u8);
                }
            }
        }
        let [x, y1, y2, z1] = seqs;
        Sources { x, y1, y2, z1 }
    }
}

/// Tables for the two hb/noisy receivers.
#[derive(Debug, Clone)]
pub(crate) struct SideTables {
    pub nz: usize,
    pub ny1: usize,
    pub ny2: usize,
    /// `llr1[((u0 * k1 + u1) * nz + z) * ny1 + y1]` in bits.
    pub llr1: Vec<f64>,
    /// `llr2[u0 * ny2 + y2]` in bits.
    pub llr2: Vec<f64>,
    /// Smallest finite per-symbol value, charged per symbol of a failed block.
    pub llr_min: [f64; 2],
    /// `P1(y1 | z1)` rows and `P1(y2)`.
    pub h1_y1_given_z: Vec<Vec<f64>>,
    pub h1_y2: Vec<f64>,
    /// Typical-fraction tests: classes `(U0,U1,Z1)` over `Y1`, classes `U0` over `Y2`.
    pub pass: [CellBounds; 2],
}

/// Tables for the noisy receivers' channel decoders.
#[derive(Debug, Clone)]
pub(crate) struct NoisyTables {
    pub f: crate::regions::HybridMap,
    pub v1_given_w: Vec<Categorical>,
    pub v2_given_v1: Vec<Categorical>,
    pub nv1: usize,
    /// Classes `(V1,Z1)` over targets `(U0,U1)`.
    pub dec1: CellBounds,
    /// Classes `(V1,Z1)` over `U0`; prunes clouds for `dec1`.
    pub dec1_cloud: CellBounds,
    /// Classes `V2` over `U0`.
    pub dec2: CellBounds,
}

/// Everything a run needs, derived once from the instance and parameters.
#[derive(Debug, Clone)]
pub struct Scheme {
    pub(crate) params: SchemeParams,
    pub(crate) mu: f64,
    pub(crate) k: usize,
    pub(crate) blocks: usize,
    /// Auxiliary alphabet sizes `|U0|, |U1|, |U2|` (1 for absent ones).
    pub(crate) ku: [usize; 3],
    /// log2 codebook sizes: clouds, satellites 1, satellites 2.
    pub(crate) bits: [u32; 3],
    /// log2 number of bins (hb); equals `bits[1]` otherwise.
    pub(crate) bin_bits: u32,
    pub(crate) mode: Mode,
    pub(crate) sources: [SourceSampler; 2],
    pub(crate) p_u0: Categorical,
    pub(crate) p_u1: Vec<Categorical>,
    pub(crate) p_u2: Vec<Categorical>,
    /// Encoder test, classes `X` over `(U0,U1,U2)`, slack `mu/2`.
    pub(crate) enc: CellBounds,
    pub(crate) enc_u0: CellBounds,
    pub(crate) enc_u01: CellBounds,
    /// gw receivers: classes `(U0,Ui)` over `Yi`.
    pub(crate) gw: Option<[CellBounds; 2]>,
    pub(crate) gw_h1_y: [Vec<f64>; 2],
    pub(crate) side: Option<SideTables>,
    /// hb bin decoder: classes `(U0,Z1)` over `U1`.
    pub(crate) bin_dec: Option<CellBounds>,
    pub(crate) noisy: Option<NoisyTables>,
}

fn floor_bits(k: usize, r: f64) -> u32 {
    (k as f64 * r + 1e-9).floor().max(0.0) as u32
}

/// `rate > info` with slack, vacuous for a zero rate against zero information.
fn covers(rate: f64, info: f64) -> bool {
    (rate == 0.0 && info <= 1e-12) || rate - info >= RATE_SLACK
}

/// `rate < info` with slack, vacuous for a zero rate.
fn packs(rate: f64, info: f64) -> bool {
    rate == 0.0 || info - rate >= RATE_SLACK
}

fn with_defaults(w: &AuxiliaryWitness, kind: SchemeKind, nx: usize) -> Result<AuxiliaryWitness> {
    let ax = Alphabet::new(X, nx)?;
    let k0 = w.u0.cols();
    let a0 = Alphabet::new(U0, k0)?;
    let constant = |name: &str| -> Result<Channel> {
        Channel::new(
            vec![ax.clone(), a0.clone()],
            vec![Alphabet::new(name, 1)?],
            vec![1.0; nx * k0],
        )
    };
    let u1 = match &w.u1 {
        Some(c) => c.clone(),
        None => constant(U1)?,
    };
    let u2 = match (&w.u2, kind) {
        (Some(c), SchemeKind::Gw) => c.clone(),
        (None, SchemeKind::Gw) => constant(U2)?,
        (Some(_), _) => {
            return Err(Error::InvalidScheme(
                "U2 is only used by the gw scheme".into(),
            ))
        }
        (None, _) => constant(U2)?,
    };
    let names = |axes: &[Alphabet]| axes.iter().map(|a| a.name.clone()).collect::<Vec<_>>();
    if names(w.u0.from_axes()) != [X]
        || w.u0.from_axes()[0].size != nx
        || names(w.u0.to_axes()) != [U0]
    {
        return Err(Error::InvalidScheme(
            "witness U0 must be a channel X -> U0".into(),
        ));
    }
    for (c, name) in [(&u1, U1), (&u2, U2)] {
        if names(c.from_axes()) != [X, U0] || names(c.to_axes()) != [name] {
            return Err(Error::InvalidScheme(format!(
                "witness {name} must be a channel (X, U0) -> {name}"
            )));
        }
    }
    Ok(AuxiliaryWitness {
        u0: w.u0.clone(),
        u1: Some(u1),
        u2: Some(u2),
        hybrid: w.hybrid.clone(),
    })
}

fn require_axes(p: &JointPmf, names: &[&str]) -> Result<()> {
    for n in names {
        if !p.has_axis(n) {
            return Err(Error::InvalidScheme(format!("instance lacks axis {n}")));
        }
    }
    Ok(())
}

fn log2_ratio(num: f64, den: f64) -> f64 {
    if num <= 0.0 {
        f64::NEG_INFINITY
    } else {
        (num / den).log2()
    }
}

fn finite_min(v: &[f64]) -> f64 {
    v.iter()
        .copied()
        .filter(|x| x.is_finite())
        .fold(0.0, f64::min)
}

fn single_layer(ku: [usize; 3]) -> Option<Layer> {
    match (ku[0] > 1, ku[1] > 1, ku[2] > 1) {
        (_, false, false) => Some(Layer::Cloud),
        (false, true, false) => Some(Layer::Sat1),
        (false, false, true) => Some(Layer::Sat2),
        _ => None,
    }
}

impl Scheme {
    pub fn new(h: &HypothesisPair, params: SchemeParams) -> Result<Scheme> {
        let p = &params;
        if !(p.epsilon > 0.0 && p.epsilon < 1.0) {
            return Err(Error::InvalidScheme(format!(
                "epsilon {} outside (0,1)",
                p.epsilon
            )));
        }
        if p.block_len == 0 || p.blocks == 0 {
            return Err(Error::InvalidScheme(
                "block length and block count must be positive".into(),
            ));
        }
        if p.kind == SchemeKind::Gw && p.blocks != 1 {
            return Err(Error::InvalidScheme(
                "the gw scheme uses a single block of length n".into(),
            ));
        }
        if p.is_samples == 0 {
            return Err(Error::InvalidScheme("is_samples must be positive".into()));
        }
        p.rates.validate()?;
        let mu = p.resolved_mu();
        if !(mu > 0.0) {
            return Err(Error::InvalidSlack(mu));
        }
        let h0 = h.h0();
        match p.kind {
            SchemeKind::Gw => {
                if h.structure() != Structure::AgainstIndependence {
                    return Err(Error::StructureViolated(
                        "gw scheme tests against independence".into(),
                    ));
                }
                require_axes(h0, &[X, Y1, Y2])?;
            }
            _ => {
                if h.structure() != Structure::AgainstConditionalIndependence {
                    return Err(Error::StructureViolated(
                        "hb and noisy schemes test against conditional independence".into(),
                    ));
                }
                require_axes(h0, &[X, Z1, Y1, Y2])?;
            }
        }
        let nx = h0.axis_size(X)?;
        let w = with_defaults(&p.witness, p.kind, nx)?;
        let joint = w.joint_with(h0)?;
        let ku = [
            joint.axis_size(U0)?,
            joint.axis_size(U1)?,
            joint.axis_size(U2)?,
        ];
        let nz = if h0.has_axis(Z1) {
            h0.axis_size(Z1)?
        } else {
            1
        };
        if nx > 256 || ku.iter().product::<usize>() > 256 || ku[0] * ku[1] * nz > 256 {
            return Err(Error::InvalidScheme(
                "alphabets too large for the simulator".into(),
            ));
        }
        let k = p.block_len;
        let r = p.rates;
        let mi = |a: &[&str], b: &[&str], c: &[&str]| mutual_information(&joint, a, b, c);
        let i_u0x = mi(&[U0], &[X], &[])?;
        let i_u1x = mi(&[U1], &[X], &[U0])?;
        let (bits, bin_bits) = match p.kind {
            SchemeKind::Gw => {
                let i_u2x = mi(&[U2], &[X], &[U0])?;
                if !(covers(r.r0, i_u0x) && covers(r.r1, i_u1x) && covers(r.r2, i_u2x)) {
                    return Err(Error::InvalidScheme(format!(
                        "gw rates ({}, {}, {}) must exceed ({i_u0x:.6}, {i_u1x:.6}, {i_u2x:.6})",
                        r.r0, r.r1, r.r2
                    )));
                }
                let b = [
                    floor_bits(k, r.r0),
                    floor_bits(k, r.r1),
                    floor_bits(k, r.r2),
                ];
                (b, b[1])
            }
            SchemeKind::Hb => {
                let r1p = r.r1_prime.unwrap_or(0.0);
                let i_u1z = mi(&[U1], &[Z1], &[U0])?;
                if !(covers(r.r0, i_u0x) && covers(r.r1 + r1p, i_u1x) && packs(r1p, i_u1z)) {
                    return Err(Error::InvalidScheme(format!(
                        "hb rates need R0 > {i_u0x:.6}, R1 + R1' > {i_u1x:.6}, R1' < {i_u1z:.6}"
                    )));
                }
                (
                    [floor_bits(k, r.r0), floor_bits(k, r.r1 + r1p), 0],
                    floor_bits(k, r.r1),
                )
            }
            SchemeKind::Noisy => (
                [floor_bits(k, r.r0), floor_bits(k, r.r1), 0],
                floor_bits(k, r.r1),
            ),
        };
        let noisy = if p.kind == SchemeKind::Noisy {
            let t = Self::noisy_tables(p, &joint, nx, ku, mu, k)?;
            if !(covers(r.r0, i_u0x) && covers(r.r1, i_u1x)) {
                return Err(Error::InvalidScheme(format!(
                    "noisy rates need R0 > {i_u0x:.6} and R1 > {i_u1x:.6}"
                )));
            }
            if (ku[0] == 1 && bits[0] > 0) || (ku[1] == 1 && bits[1] > 0) {
                return Err(Error::InvalidScheme(
                    "a constant codebook layer must hold a single codeword in the noisy scheme"
                        .into(),
                ));
            }
            Some(t)
        } else {
            None
        };
        if p.kind == SchemeKind::Noisy {
            let nj = noisy_joint(p, &joint, nx, ku)?;
            let c1 = mutual_information(&nj, &[U1], &[V1, Z1], &[U0])?;
            let c2 = mutual_information(&nj, &[U0], &[V2], &[])?;
            if !(packs(r.r1, c1) && packs(r.r0, c2)) {
                return Err(Error::InvalidScheme(format!(
                    "noisy rates need R1 < {c1:.6} and R0 < {c2:.6}"
                )));
            }
        }
        let mode = Self::choose_mode(p, ku, bits, k)?;
        let rows = |target: &str| -> Result<Vec<Categorical>> {
            Ok(Categorical::rows(&joint.conditional(&[target], &[U0])?))
        };
        let gw = if p.kind == SchemeKind::Gw {
            Some([
                CellBounds::from_pmf(&joint, &[U0, U1], &[Y1], mu, k)?,
                CellBounds::from_pmf(&joint, &[U0, U2], &[Y2], mu, k)?,
            ])
        } else {
            None
        };
        let gw_h1_y = [
            h.h1().permute_subset(&[Y1])?.mass().to_vec(),
            h.h1().permute_subset(&[Y2])?.mass().to_vec(),
        ];
        let side = if p.kind == SchemeKind::Gw {
            None
        } else {
            Some(Self::side_tables(h, &joint, ku, mu, k)?)
        };
        let bin_dec = if p.kind == SchemeKind::Hb {
            Some(CellBounds::from_pmf(&joint, &[U0, Z1], &[U1], mu, k)?)
        } else {
            None
        };
        Ok(Scheme {
            mu,
            k,
            blocks: p.blocks,
            ku,
            bits,
            bin_bits,
            mode,
            sources: [SourceSampler::new(h.h0())?, SourceSampler::new(h.h1())?],
            p_u0: Categorical::new(joint.permute_subset(&[U0])?.mass()),
            p_u1: rows(U1)?,
            p_u2: rows(U2)?,
            enc: CellBounds::from_pmf(&joint, &[X], &[U0, U1, U2], mu / 2.0, k)?,
            enc_u0: CellBounds::from_pmf(&joint, &[X], &[U0], mu / 2.0, k)?,
            enc_u01: CellBounds::from_pmf(&joint, &[X], &[U0, U1], mu / 2.0, k)?,
            gw,
            gw_h1_y,
            side,
            bin_dec,
            noisy,
            params,
        })
    }

    fn choose_mode(p: &SchemeParams, ku: [usize; 3], bits: [u32; 3], k: usize) -> Result<Mode> {
        let stored = bits[0] as f64
            + (1.0 + 2f64.powi(bits[1] as i32) + 2f64.powi(bits[2] as i32)).log2()
            + (k as f64).log2();
        let fits = stored <= p.codebook_budget_bits as f64;
        let layer = single_layer(ku);
        let too_large = || Error::CodebookTooLarge {
            bits: stored.ceil() as u32,
            budget_bits: p.codebook_budget_bits,
        };
        match p.codebook {
            CodebookMode::Materialized => {
                if fits {
                    Ok(Mode::Materialized)
                } else {
                    Err(too_large())
                }
            }
            CodebookMode::Ensemble => layer.map(Mode::Ensemble).ok_or_else(|| {
                Error::InvalidScheme("ensemble codebooks need a single random layer".into())
            }),
            CodebookMode::Auto => {
                let small = fits && bits.iter().sum::<u32>() <= 12;
                match (small, layer) {
                    (true, _) => Ok(Mode::Materialized),
                    (false, Some(l)) => Ok(Mode::Ensemble(l)),
                    (false, None) if fits => Ok(Mode::Materialized),
                    _ => Err(too_large()),
                }
            }
        }
    }

    fn side_tables(
        h: &HypothesisPair,
        joint: &JointPmf,
        ku: [usize; 3],
        mu: f64,
        k: usize,
    ) -> Result<SideTables> {
        let (nz, ny1, ny2) = (
            joint.axis_size(Z1)?,
            joint.axis_size(Y1)?,
            joint.axis_size(Y2)?,
        );
        let c1 = joint.conditional(&[Y1], &[U0, U1, Z1])?;
        let c1z = joint.conditional(&[Y1], &[Z1])?;
        let mut llr1 = Vec::with_capacity(c1.rows() * ny1);
        for row in 0..c1.rows() {
            let z = row % nz;
            for y in 0..ny1 {
                llr1.push(log2_ratio(c1.row(row)[y], c1z.row(z)[y]));
            }
        }
        let c2 = joint.conditional(&[Y2], &[U0])?;
        let py2 = joint.permute_subset(&[Y2])?;
        let mut llr2 = Vec::with_capacity(ku[0] * ny2);
        for u0 in 0..ku[0] {
            for y in 0..ny2 {
                llr2.push(log2_ratio(c2.row(u0)[y], py2.mass()[y]));
            }
        }
        let h1c = h.h1().conditional(&[Y1], &[Z1])?;
        Ok(SideTables {
            nz,
            ny1,
            ny2,
            llr_min: [finite_min(&llr1), finite_min(&llr2)],
            llr1,
            llr2,
            h1_y1_given_z: (0..nz).map(|z| h1c.row(z).to_vec()).collect(),
            h1_y2: h.h1().permute_subset(&[Y2])?.mass().to_vec(),
            pass: [
                CellBounds::from_pmf(joint, &[U0, U1, Z1], &[Y1], mu, k)?,
                CellBounds::from_pmf(joint, &[U0], &[Y2], mu, k)?,
            ],
        })
    }

    fn noisy_tables(
        p: &SchemeParams,
        joint: &JointPmf,
        nx: usize,
        ku: [usize; 3],
        mu: f64,
        k: usize,
    ) -> Result<NoisyTables> {
        let nj = noisy_joint(p, joint, nx, ku)?;
        let bc = p.bc.as_ref().expect("checked by noisy_joint");
        let (nv1, nv2) = (nj.axis_size(V1)?, nj.axis_size(V2)?);
        if nv1 * nj.axis_size(Z1)? > 256 || nv2 > 256 {
            return Err(Error::InvalidScheme(
                "channel alphabets too large for the simulator".into(),
            ));
        }
        Ok(NoisyTables {
            f: p.witness.hybrid.clone().expect("checked by noisy_joint"),
            v1_given_w: Categorical::rows(bc.v1_given_w()),
            v2_given_v1: Categorical::rows(bc.v2_given_v1()),
            nv1,
            dec1: CellBounds::from_pmf(&nj, &[V1, Z1], &[U0, U1], mu, k)?,
            dec1_cloud: CellBounds::from_pmf(&nj, &[V1, Z1], &[U0], mu, k)?,
            dec2: CellBounds::from_pmf(&nj, &[V2], &[U0], mu, k)?,
        })
    }

    pub fn params(&self) -> &SchemeParams {
        &self.params
    }

    pub fn kind(&self) -> SchemeKind {
        self.params.kind
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn n(&self) -> usize {
        self.k * self.blocks
    }

    pub fn block_len(&self) -> usize {
        self.k
    }

    pub fn blocks(&self) -> usize {
        self.blocks
    }

    /// log2 codebook sizes (clouds, satellites 1, satellites 2).
    pub fn codebook_bits(&self) -> [u32; 3] {
        self.bits
    }

    pub fn bin_bits(&self) -> u32 {
        self.bin_bits
    }

    pub fn is_ensemble(&self) -> bool {
        matches!(self.mode, Mode::Ensemble(_))
    }

    /// Draws the source sequences of one trial under hypothesis `h` (0 or 1).
    pub fn sample_sources<R: Rng>(&self, h: u8, rng: &mut R) -> Sources {
        self.sources[h.min(1) as usize].sample(self.n(), rng)
    }
}

/// `P_{X Z1 Y1 Y2 U0 U1 U2 W V1 V2}` for the noisy scheme.
fn noisy_joint(p: &SchemeParams, joint: &JointPmf, nx: usize, ku: [usize; 3]) -> Result<JointPmf> {
    let f = p
        .witness
        .hybrid
        .as_ref()
        .ok_or_else(|| Error::InvalidScheme("noisy scheme needs a hybrid map".into()))?;
    let bc =
        p.bc.as_ref()
            .ok_or_else(|| Error::InvalidScheme("noisy scheme needs a broadcast channel".into()))?;
    if f.sizes != [ku[0], ku[1], nx] || f.table.len() != ku[0] * ku[1] * nx {
        return Err(Error::InvalidScheme(
            "hybrid map does not match the auxiliary alphabets".into(),
        ));
    }
    if f.w_size != bc.w_size() || f.table.iter().any(|&w| w >= f.w_size) {
        return Err(Error::InvalidScheme(
            "hybrid map outputs do not match the channel input".into(),
        ));
    }
    let fmap = Channel::deterministic(
        vec![
            Alphabet::new(X, nx)?,
            Alphabet::new(U0, ku[0])?,
            Alphabet::new(U1, ku[1])?,
        ],
        vec![Alphabet::new(W, f.w_size)?],
        |i| vec![f.apply(i[1], i[2], i[0])],
    )?;
    joint
        .extend(&fmap)?
        .extend(bc.v1_given_w())?
        .extend(bc.v2_given_v1())
}
