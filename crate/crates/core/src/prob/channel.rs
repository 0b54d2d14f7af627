use serde::{Deserialize, Serialize};

use super::pmf::{advance, check_unique, Alphabet, JointPmf, NORMALIZATION_TOL};
use crate::error::{Error, Result};

/// A conditional pmf `P(to | from)` stored as a row-stochastic tensor:
/// one row per joint `from` symbol, one column per joint `to` symbol.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ChannelRepr", into = "ChannelRepr")]
pub struct Channel {
    from_axes: Vec<Alphabet>,
    to_axes: Vec<Alphabet>,
    kernel: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ChannelRepr {
    from_axes: Vec<Alphabet>,
    to_axes: Vec<Alphabet>,
    kernel: Vec<f64>,
}

impl TryFrom<ChannelRepr> for Channel {
    type Error = Error;

    fn try_from(r: ChannelRepr) -> Result<Self> {
        Channel::new(r.from_axes, r.to_axes, r.kernel)
    }
}

impl From<Channel> for ChannelRepr {
    fn from(c: Channel) -> Self {
        ChannelRepr {
            from_axes: c.from_axes,
            to_axes: c.to_axes,
            kernel: c.kernel,
        }
    }
}

impl Channel {
    pub fn new(from_axes: Vec<Alphabet>, to_axes: Vec<Alphabet>, kernel: Vec<f64>) -> Result<Self> {
        let mut all = from_axes.clone();
        all.extend(to_axes.iter().cloned());
        check_unique(&all)?;
        if to_axes.is_empty() {
            return Err(Error::EmptyAxisSet);
        }
        let rows: usize = from_axes.iter().map(|a| a.size).product();
        let cols: usize = to_axes.iter().map(|a| a.size).product();
        if kernel.len() != rows * cols {
            return Err(Error::ShapeMismatch {
                expected: rows * cols,
                got: kernel.len(),
            });
        }
        for (cell, &v) in kernel.iter().enumerate() {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::InvalidMass { cell, value: v });
            }
        }
        for row in 0..rows {
            let total: f64 = kernel[row * cols..(row + 1) * cols].iter().sum();
            if (total - 1.0).abs() > NORMALIZATION_TOL {
                return Err(Error::KernelNotStochastic { row, total });
            }
        }
        Ok(Channel {
            from_axes,
            to_axes,
            kernel,
        })
    }

    pub fn from_fn(
        from_axes: Vec<Alphabet>,
        to_axes: Vec<Alphabet>,
        f: impl Fn(&[usize], &[usize]) -> f64,
    ) -> Result<Self> {
        let rows: usize = from_axes.iter().map(|a| a.size).product();
        let cols: usize = to_axes.iter().map(|a| a.size).product();
        let mut kernel = Vec::with_capacity(rows * cols);
        let mut fi = vec![0usize; from_axes.len()];
        for _ in 0..rows {
            let mut ti = vec![0usize; to_axes.len()];
            for _ in 0..cols {
                kernel.push(f(&fi, &ti));
                advance(&mut ti, &to_axes);
            }
            advance(&mut fi, &from_axes);
        }
        Channel::new(from_axes, to_axes, kernel)
    }

    /// Deterministic channel `to = map(from)`.
    pub fn deterministic(
        from_axes: Vec<Alphabet>,
        to_axes: Vec<Alphabet>,
        map: impl Fn(&[usize]) -> Vec<usize>,
    ) -> Result<Self> {
        Channel::from_fn(
            from_axes,
            to_axes,
            |f, t| if map(f) == t { 1.0 } else { 0.0 },
        )
    }

    /// Binary symmetric channel with crossover `p`.
    pub fn bsc(from: &str, to: &str, p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidParameter(format!(
                "crossover {p} outside [0,1]"
            )));
        }
        Channel::new(
            vec![Alphabet::new(from, 2)?],
            vec![Alphabet::new(to, 2)?],
            vec![1.0 - p, p, p, 1.0 - p],
        )
    }

    /// Noiseless copy of a `size`-ary input.
    pub fn identity(from: &str, to: &str, size: usize) -> Result<Self> {
        Channel::deterministic(
            vec![Alphabet::new(from, size)?],
            vec![Alphabet::new(to, size)?],
            |f| f.to_vec(),
        )
    }

    /// Channel whose output ignores the input and follows `law`.
    pub fn constant(from_axes: Vec<Alphabet>, law: &JointPmf) -> Result<Self> {
        let to = law.axes().to_vec();
        let cols = law.len();
        Channel::from_fn(from_axes, to, |_, t| {
            let mut flat = 0;
            for (k, &s) in t.iter().enumerate() {
                flat = flat * law.axes()[k].size + s;
            }
            debug_assert!(flat < cols);
            law.mass()[flat]
        })
    }

    pub fn from_axes(&self) -> &[Alphabet] {
        &self.from_axes
    }

    pub fn to_axes(&self) -> &[Alphabet] {
        &self.to_axes
    }

    pub fn kernel(&self) -> &[f64] {
        &self.kernel
    }

    pub fn rows(&self) -> usize {
        self.from_axes.iter().map(|a| a.size).product()
    }

    pub fn cols(&self) -> usize {
        self.to_axes.iter().map(|a| a.size).product()
    }

    /// Conditional row for a flat input index.
    pub fn row(&self, from_flat: usize) -> &[f64] {
        let c = self.cols();
        &self.kernel[from_flat * c..(from_flat + 1) * c]
    }

    /// Composes `self: A -> B` with `next: B -> C` into `A -> C`,
    /// marginalizing the intermediate axes.
    pub fn then(&self, next: &Channel) -> Result<Channel> {
        if next.from_axes != self.to_axes {
            return Err(Error::AxisMismatch);
        }
        let (r, m, c) = (self.rows(), self.cols(), next.cols());
        let mut kernel = vec![0.0; r * c];
        for i in 0..r {
            for j in 0..m {
                let a = self.kernel[i * m + j];
                if a == 0.0 {
                    continue;
                }
                for k in 0..c {
                    kernel[i * c + k] += a * next.kernel[j * c + k];
                }
            }
        }
        Channel::new(self.from_axes.clone(), next.to_axes.clone(), kernel)
    }
}

impl JointPmf {
    /// Joint law of the current axes followed by the outputs of `channel`,
    /// whose input axes must all be present here.
    pub fn extend(&self, channel: &Channel) -> Result<JointPmf> {
        let from_pos: Vec<usize> = channel
            .from_axes()
            .iter()
            .map(|a| {
                let p = self.axis_position(&a.name)?;
                if self.axes()[p].size != a.size {
                    return Err(Error::AxisMismatch);
                }
                Ok(p)
            })
            .collect::<Result<_>>()?;
        let mut axes = self.axes().to_vec();
        axes.extend(channel.to_axes().iter().cloned());
        check_unique(&axes)?;
        let cols = channel.cols();
        let mut mass = Vec::with_capacity(self.len() * cols);
        let mut idx = vec![0usize; self.axes().len()];
        for &m in self.mass() {
            let mut row = 0;
            for &p in &from_pos {
                row = row * self.axes()[p].size + idx[p];
            }
            for &k in channel.row(row) {
                mass.push(m * k);
            }
            advance(&mut idx, self.axes());
        }
        Ok(JointPmf::from_parts(axes, mass))
    }

    /// Conditional channel `P(targets | given)`; rows with zero mass are
    /// filled with the uniform distribution.
    pub fn conditional(&self, targets: &[&str], given: &[&str]) -> Result<Channel> {
        let mut names: Vec<&str> = given.to_vec();
        names.extend_from_slice(targets);
        let joint = self.permute_subset(&names)?;
        let rows: usize = given
            .iter()
            .map(|g| self.axis_size(g))
            .product::<Result<usize>>()?;
        let cols = joint.len() / rows;
        let mut kernel = joint.mass().to_vec();
        for r in 0..rows {
            let row = &mut kernel[r * cols..(r + 1) * cols];
            let total: f64 = row.iter().sum();
            if total > 0.0 {
                row.iter_mut().for_each(|v| *v /= total);
                // exact renormalization of rounding residue
                let s: f64 = row.iter().sum();
                if let Some(mx) = row.iter_mut().max_by(|a, b| a.total_cmp(b)) {
                    *mx += 1.0 - s;
                }
            } else {
                row.iter_mut().for_each(|v| *v = 1.0 / cols as f64);
            }
        }
        let from = joint.axes()[..given.len()].to_vec();
        let to = joint.axes()[given.len()..].to_vec();
        Channel::new(from, to, kernel)
    }

    /// Marginal on `names`, in exactly the order given.
    pub fn permute_subset(&self, names: &[&str]) -> Result<JointPmf> {
        if names.is_empty() {
            return Err(Error::EmptyAxisSet);
        }
        let pos = self.positions(names)?;
        let axes = pos.iter().map(|&p| self.axes()[p].clone()).collect();
        Ok(JointPmf::from_parts(axes, self.marginal_mass(&pos)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_non_stochastic_rows() {
        let a = Alphabet::new("X", 2).unwrap();
        let b = Alphabet::new("Y", 2).unwrap();
        assert!(matches!(
            Channel::new(vec![a], vec![b], vec![0.5, 0.5, 0.3, 0.6]),
            Err(Error::KernelNotStochastic { row: 1, .. })
        ));
    }

    #[test]
    fn bsc_composition_crossover() {
        let c1 = Channel::bsc("W", "V1", 0.1).unwrap();
        let c2 = Channel::bsc("V1", "V2", 0.1).unwrap();
        let c = c1.then(&c2).unwrap();
        assert!((c.kernel()[1] - 0.18).abs() < 1e-15);
    }

    #[test]
    fn extend_then_conditional_recovers_channel() {
        let px = JointPmf::single("X", &[0.3, 0.7]).unwrap();
        let ch = Channel::bsc("X", "Y", 0.2).unwrap();
        let joint = px.extend(&ch).unwrap();
        assert_eq!(joint.axis_names(), vec!["X", "Y"]);
        let back = joint.conditional(&["Y"], &["X"]).unwrap();
        for (a, b) in back.kernel().iter().zip(ch.kernel()) {
            assert!((a - b).abs() < 1e-15);
        }
    }
}
