//! Integer count bounds for robust typicality, arranged as classes × targets.

use rand::seq::SliceRandom;
use rand::Rng;

use super::multinomial::{ln_box_prob, sample_box};
use crate::error::{Error, Result};
use crate::prob::JointPmf;

/// Robust-typicality bounds for length-`n` sequences over a two-level cell
/// index `class * targets + target`.
///
/// A count vector is typical iff `lo[cell] <= N[cell] <= hi[cell]` for every
/// cell, which is the same test as `|N/n - P| <= mu * P` evaluated with the
/// slack of [`crate::prob::is_typical`].
#[derive(Debug, Clone)]
pub struct CellBounds {
    targets: usize,
    n: usize,
    lo: Vec<i64>,
    hi: Vec<i64>,
}

impl CellBounds {
    pub fn new(mass: &[f64], targets: usize, mu: f64, n: usize) -> Result<Self> {
        if !(mu > 0.0) {
            return Err(Error::InvalidSlack(mu));
        }
        if n == 0 || targets == 0 || mass.len() % targets != 0 {
            return Err(Error::InvalidParameter("bad typicality layout".into()));
        }
        let nf = n as f64;
        let lo = mass
            .iter()
            .map(|&p| ((nf * (p - mu * p - 1e-12)).ceil() as i64).max(0))
            .collect();
        let hi = mass
            .iter()
            .map(|&p| (nf * (p + mu * p + 1e-12)).floor() as i64)
            .collect();
        Ok(CellBounds { targets, n, lo, hi })
    }

    /// Bounds on `p` with cells `(class_axes..., target_axes...)`, flattened
    /// with the first listed axis slowest.
    pub fn from_pmf(
        p: &JointPmf,
        class_axes: &[&str],
        target_axes: &[&str],
        mu: f64,
        n: usize,
    ) -> Result<Self> {
        let mut names = class_axes.to_vec();
        names.extend_from_slice(target_axes);
        let m = p.permute_subset(&names)?;
        let targets = target_axes
            .iter()
            .map(|a| p.axis_size(a))
            .product::<Result<usize>>()?;
        Self::new(m.mass(), targets, mu, n)
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn classes(&self) -> usize {
        self.lo.len() / self.targets
    }

    pub fn targets(&self) -> usize {
        self.targets
    }

    pub fn check_counts(&self, counts: &[u32]) -> bool {
        counts
            .iter()
            .zip(self.lo.iter().zip(&self.hi))
            .all(|(&c, (&l, &h))| (c as i64) >= l && (c as i64) <= h)
    }

    /// Typicality of the pair sequence `(class[i], target[i])`.
    pub fn check(&self, class: &[u8], target: &[u8]) -> bool {
        debug_assert_eq!(class.len(), self.n);
        let mut counts = vec![0u32; self.lo.len()];
        for (&c, &t) in class.iter().zip(target) {
            counts[c as usize * self.targets + t as usize] += 1;
        }
        self.check_counts(&counts)
    }

    pub fn class_box(&self, class: usize) -> (&[i64], &[i64]) {
        let r = class * self.targets..(class + 1) * self.targets;
        (&self.lo[r.clone()], &self.hi[r])
    }

    /// `ln P[(class, T) typical]` when, given the class sequence, the targets
    /// are drawn independently from `law(class)`.
    pub fn ln_prob_given_classes<'a>(&self, class: &[u8], law: impl Fn(usize) -> &'a [f64]) -> f64 {
        let mut sizes = vec![0usize; self.classes()];
        for &c in class {
            sizes[c as usize] += 1;
        }
        let mut total = 0.0;
        for (c, &nc) in sizes.iter().enumerate() {
            let (lo, hi) = self.class_box(c);
            total += ln_box_prob(nc, law(c), lo, hi);
            if total == f64::NEG_INFINITY {
                break;
            }
        }
        total
    }

    /// Draws a target sequence from `law(class)` symbolwise, conditioned on
    /// joint typicality with `class`; `None` if that event is empty.
    pub fn sample_given_classes<'a, R: Rng>(
        &self,
        class: &[u8],
        law: impl Fn(usize) -> &'a [f64],
        rng: &mut R,
    ) -> Option<Vec<u8>> {
        let mut positions: Vec<Vec<usize>> = vec![Vec::new(); self.classes()];
        for (i, &c) in class.iter().enumerate() {
            positions[c as usize].push(i);
        }
        let mut out = vec![0u8; class.len()];
        for (c, pos) in positions.iter().enumerate() {
            let (lo, hi) = self.class_box(c);
            let counts = sample_box(pos.len(), law(c), lo, hi, rng)?;
            let mut symbols: Vec<u8> = Vec::with_capacity(pos.len());
            for (t, &k) in counts.iter().enumerate() {
                symbols.extend(std::iter::repeat(t as u8).take(k));
            }
            symbols.shuffle(rng);
            for (&i, s) in pos.iter().zip(symbols) {
                out[i] = s;
            }
        }
        Some(out)
    }
}

/// Combines per-axis symbol sequences into flat cell indices
/// (`sizes` are the axis sizes, first axis slowest).
pub fn flatten(seqs: &[&[u8]], sizes: &[usize]) -> Vec<u8> {
    let n = seqs[0].len();
    (0..n)
        .map(|i| {
            let mut f = 0usize;
            for (s, &k) in seqs.iter().zip(sizes) {
                f = f * k + s[i] as usize;
            }
            debug_assert!(f < 256);
            f as u8
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prob::{is_typical, Alphabet};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn joint() -> JointPmf {
        let a = Alphabet::new("A", 2).unwrap();
        let b = Alphabet::new("B", 3).unwrap();
        JointPmf::new(vec![a, b], vec![0.1, 0.2, 0.2, 0.25, 0.0, 0.25]).unwrap()
    }

    #[test]
    fn agrees_with_named_axis_test() {
        let p = joint();
        let bounds = CellBounds::from_pmf(&p, &["A"], &["B"], 0.3, 20).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let cdf = p.cdf();
        let mut agree_true = 0;
        for _ in 0..2000 {
            let mut a = vec![0u8; 20];
            let mut b = vec![0u8; 20];
            for i in 0..20 {
                let u: f64 = rng.gen();
                let cell = cdf.iter().position(|&c| u < c).unwrap_or(5);
                a[i] = (cell / 3) as u8;
                b[i] = (cell % 3) as u8;
            }
            let au: Vec<usize> = a.iter().map(|&v| v as usize).collect();
            let bu: Vec<usize> = b.iter().map(|&v| v as usize).collect();
            let reference = is_typical(&[&au, &bu], &p, 0.3).unwrap();
            assert_eq!(bounds.check(&a, &b), reference);
            agree_true += reference as usize;
        }
        assert!(agree_true > 50);
    }

    #[test]
    fn typical_samples_are_typical() {
        let p = joint();
        let bounds = CellBounds::from_pmf(&p, &["A"], &["B"], 0.4, 40).unwrap();
        let class: Vec<u8> = (0..40).map(|i| if i < 14 { 0 } else { 1 }).collect();
        let laws = [vec![0.2, 0.4, 0.4], vec![0.5, 0.0, 0.5]];
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..200 {
            let t = bounds
                .sample_given_classes(&class, |c| &laws[c], &mut rng)
                .unwrap();
            assert!(bounds.check(&class, &t));
        }
        assert!(bounds.ln_prob_given_classes(&class, |c| &laws[c]) < 0.0);
    }
}
