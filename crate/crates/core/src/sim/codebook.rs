//! Random superposition codebooks and the typicality encoder.

use rand::seq::SliceRandom;
use rand::Rng;

use super::scheme::{Layer, Mode, Scheme, SchemeKind};
use super::typicality::flatten;
use crate::error::{Error, Result};
use crate::rng::stream;

/// Codewords of one block.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockCodebook {
    /// `2^{bits0}` cloud codewords over `U0`.
    pub clouds: Vec<Vec<u8>>,
    /// `sats1[m0][s]`, drawn symbolwise from `P(U1 | U0 = clouds[m0][i])`.
    pub sats1: Vec<Vec<Vec<u8>>>,
    pub sats2: Vec<Vec<Vec<u8>>>,
    /// Bin map `nu(s) = perm[s] mod 2^{bin_bits}` (hb only, else empty).
    pub perm: Vec<u32>,
    inv: Vec<u32>,
}

/// Stored codebooks for every block of one trial.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CodebookSet {
    pub scheme: SchemeKind,
    pub block_len: usize,
    pub blocks: Vec<BlockCodebook>,
    pub bin_bits: u32,
    pub seed: u64,
}

impl CodebookSet {
    pub fn bins(&self) -> u64 {
        1u64 << self.bin_bits
    }

    /// `nu(s)` for block `b`.
    pub fn bin_of(&self, b: usize, s: usize) -> u64 {
        let book = &self.blocks[b];
        if book.perm.is_empty() {
            s as u64
        } else {
            book.perm[s] as u64 % self.bins()
        }
    }

    /// All satellite indices of block `b` mapped to `bin`.
    pub fn bin_members(&self, b: usize, bin: u64) -> Vec<usize> {
        let book = &self.blocks[b];
        if book.perm.is_empty() {
            return vec![bin as usize];
        }
        let nbins = self.bins() as usize;
        (bin as usize..book.inv.len())
            .step_by(nbins)
            .map(|j| book.inv[j] as usize)
            .collect()
    }
}

/// Codebooks of one trial: stored, or implicit in ensemble mode.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Codebooks {
    Stored(CodebookSet),
    Implicit(Layer),
}

/// Draws the codebooks for one trial; `keys` select the substream
/// (typically hypothesis and trial index), each block gets its own.
pub fn build_codebooks(scheme: &Scheme, seed: u64, keys: &[u64]) -> Result<CodebookSet> {
    let [b0, b1, b2] = scheme.bits;
    let stored = b0 as f64
        + (1.0 + 2f64.powi(b1 as i32) + 2f64.powi(b2 as i32)).log2()
        + (scheme.k as f64).log2();
    let budget = scheme.params.codebook_budget_bits;
    if stored > budget as f64 || b0.max(b1).max(b2) >= 32 {
        return Err(Error::CodebookTooLarge {
            bits: stored.ceil() as u32,
            budget_bits: budget,
        });
    }
    let k = scheme.k;
    let blocks = (0..scheme.blocks)
        .map(|b| {
            let mut key = keys.to_vec();
            key.push(b as u64);
            let mut rng = stream(seed, "codebook", &key);
            let clouds: Vec<Vec<u8>> = (0..1usize << b0)
                .map(|_| (0..k).map(|_| scheme.p_u0.sample(&mut rng)).collect())
                .collect();
            let sats = |rng: &mut rand_chacha::ChaCha8Rng,
                        bits: u32,
                        law: &[super::scheme::Categorical]| {
                clouds
                    .iter()
                    .map(|c| {
                        (0..1usize << bits)
                            .map(|_| c.iter().map(|&u0| law[u0 as usize].sample(rng)).collect())
                            .collect()
                    })
                    .collect::<Vec<Vec<Vec<u8>>>>()
            };
            let sats1 = sats(&mut rng, b1, &scheme.p_u1);
            let sats2 = sats(&mut rng, b2, &scheme.p_u2);
            let (perm, inv) = if scheme.kind() == SchemeKind::Hb {
                let mut perm: Vec<u32> = (0..1u32 << b1).collect();
                perm.shuffle(&mut rng);
                let mut inv = vec![0u32; perm.len()];
                for (s, &v) in perm.iter().enumerate() {
                    inv[v as usize] = s as u32;
                }
                (perm, inv)
            } else {
                (Vec::new(), Vec::new())
            };
            BlockCodebook {
                clouds,
                sats1,
                sats2,
                perm,
                inv,
            }
        })
        .collect();
    Ok(CodebookSet {
        scheme: scheme.kind(),
        block_len: k,
        blocks,
        bin_bits: scheme.bin_bits,
        seed,
    })
}

impl Scheme {
    /// Codebooks for one trial in the scheme's mode.
    pub fn codebooks(&self, seed: u64, keys: &[u64]) -> Result<Codebooks> {
        match self.mode {
            Mode::Materialized => Ok(Codebooks::Stored(build_codebooks(self, seed, keys)?)),
            Mode::Ensemble(l) => Ok(Codebooks::Implicit(l)),
        }
    }

    pub(crate) fn layer_law(&self, layer: Layer) -> &[f64] {
        match layer {
            Layer::Cloud => &self.p_u0.p,
            Layer::Sat1 => &self.p_u1[0].p,
            Layer::Sat2 => &self.p_u2[0].p,
        }
    }

    /// log2 of the number of index tuples sharing one random layer codeword each.
    pub(crate) fn layer_bits(&self, layer: Layer) -> u32 {
        match layer {
            Layer::Cloud => self.bits[0],
            Layer::Sat1 => self.bits[0] + self.bits[1],
            Layer::Sat2 => self.bits[0] + self.bits[2],
        }
    }

    fn place(&self, layer: Layer, seq: Vec<u8>) -> Chosen {
        let zeros = vec![0u8; seq.len()];
        let (u0, u1, u2) = match layer {
            Layer::Cloud => (seq, zeros.clone(), zeros),
            Layer::Sat1 => (zeros.clone(), seq, zeros),
            Layer::Sat2 => (zeros.clone(), zeros, seq),
        };
        Chosen {
            m0: None,
            s1: None,
            s2: None,
            u0,
            u1,
            u2,
        }
    }

    /// Flattened `(u0, u1, u2)` symbols, the encoder test's target.
    pub(crate) fn enc_target(&self, u0: &[u8], u1: &[u8], u2: &[u8]) -> Vec<u8> {
        flatten(&[u0, u1, u2], &self.ku)
    }

    /// Typicality search of one block: a uniformly random tuple among all
    /// `(m0, s1, s2)` with `(x, u0, u1, u2)` in the `mu/2` typical set.
    pub fn encode_block<R: Rng>(
        &self,
        books: &Codebooks,
        b: usize,
        x: &[u8],
        rng: &mut R,
    ) -> Option<Chosen> {
        match books {
            Codebooks::Stored(cb) => self.search(&cb.blocks[b], x, rng),
            Codebooks::Implicit(layer) => self.ensemble_encode(*layer, x, rng),
        }
    }

    fn search<R: Rng>(&self, book: &BlockCodebook, x: &[u8], rng: &mut R) -> Option<Chosen> {
        let mut seen = 0u64;
        let mut pick = None;
        for (m0, u0) in book.clouds.iter().enumerate() {
            if !self.enc_u0.check(x, u0) {
                continue;
            }
            for (s1, u1) in book.sats1[m0].iter().enumerate() {
                if !self.enc_u01.check(x, &flatten(&[u0, u1], &self.ku[..2])) {
                    continue;
                }
                for (s2, u2) in book.sats2[m0].iter().enumerate() {
                    if self.enc.check(x, &self.enc_target(u0, u1, u2)) {
                        seen += 1;
                        if rng.gen_range(0..seen) == 0 {
                            pick = Some((m0, s1, s2));
                        }
                    }
                }
            }
        }
        pick.map(|(m0, s1, s2)| Chosen {
            m0: Some(m0 as u64),
            s1: Some(s1 as u64),
            s2: Some(s2 as u64),
            u0: book.clouds[m0].clone(),
            u1: book.sats1[m0][s1].clone(),
            u2: book.sats2[m0][s2].clone(),
        })
    }

    /// With one random layer of `N = 2^bits` i.i.d. codewords, the search
    /// succeeds with probability `1 - (1 - p)^N` where `p` is the chance that a
    /// single codeword is typical with `x`, and the chosen codeword is a draw
    /// of the layer law conditioned on typicality.
    fn ensemble_encode<R: Rng>(&self, layer: Layer, x: &[u8], rng: &mut R) -> Option<Chosen> {
        let law = self.layer_law(layer);
        let ln_p = self.enc.ln_prob_given_classes(x, |_| law);
        let ln_n = self.layer_bits(layer) as f64 * std::f64::consts::LN_2;
        let fail = miss_all(ln_p, ln_n);
        if rng.gen::<f64>() < fail {
            return None;
        }
        let seq = self.enc.sample_given_classes(x, |_| law, rng)?;
        Some(self.place(layer, seq))
    }

    /// The uniform-random fallback of the noisy transmitter.
    pub fn random_tuple<R: Rng>(&self, books: &Codebooks, b: usize, rng: &mut R) -> Chosen {
        match books {
            Codebooks::Stored(cb) => {
                let book = &cb.blocks[b];
                let m0 = rng.gen_range(0..book.clouds.len());
                let s1 = rng.gen_range(0..book.sats1[m0].len());
                let s2 = rng.gen_range(0..book.sats2[m0].len());
                Chosen {
                    m0: Some(m0 as u64),
                    s1: Some(s1 as u64),
                    s2: Some(s2 as u64),
                    u0: book.clouds[m0].clone(),
                    u1: book.sats1[m0][s1].clone(),
                    u2: book.sats2[m0][s2].clone(),
                }
            }
            Codebooks::Implicit(layer) => {
                let law = super::scheme::Categorical::new(self.layer_law(*layer));
                let seq = (0..self.k).map(|_| law.sample(rng)).collect();
                self.place(*layer, seq)
            }
        }
    }
}

/// `(1 - p)^N` from `ln p` and `ln N`.
pub(crate) fn miss_all(ln_p: f64, ln_n: f64) -> f64 {
    if ln_p == f64::NEG_INFINITY {
        return 1.0;
    }
    let p = ln_p.exp();
    if p < 1e-8 {
        (-(ln_n + ln_p).exp()).exp()
    } else {
        (ln_n.exp() * (-p).ln_1p()).exp()
    }
}

/// Codeword tuple selected by the transmitter or recovered by a receiver.
/// Indices are `None` when codebooks are implicit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Chosen {
    pub m0: Option<u64>,
    pub s1: Option<u64>,
    pub s2: Option<u64>,
    pub u0: Vec<u8>,
    pub u1: Vec<u8>,
    pub u2: Vec<u8>,
}
