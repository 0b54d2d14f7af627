use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Normalization tolerance enforced when a pmf or kernel is constructed.
pub const NORMALIZATION_TOL: f64 = 1e-12;

/// A named finite alphabet `{0, .., size-1}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Alphabet {
    pub name: String,
    pub size: usize,
}

impl Alphabet {
    pub fn new(name: impl Into<String>, size: usize) -> Result<Self> {
        let name = name.into();
        if size == 0 {
            return Err(Error::InvalidAlphabet {
                name,
                reason: "size must be at least 1".into(),
            });
        }
        if name.is_empty() {
            return Err(Error::InvalidAlphabet {
                name,
                reason: "name must be non-empty".into(),
            });
        }
        Ok(Alphabet { name, size })
    }
}

pub(crate) fn check_unique(axes: &[Alphabet]) -> Result<()> {
    for (i, a) in axes.iter().enumerate() {
        if a.size == 0 {
            return Err(Error::InvalidAlphabet {
                name: a.name.clone(),
                reason: "size must be at least 1".into(),
            });
        }
        if axes[..i].iter().any(|b| b.name == a.name) {
            return Err(Error::DuplicateAxis(a.name.clone()));
        }
    }
    Ok(())
}

pub(crate) fn strides_of(axes: &[Alphabet]) -> Vec<usize> {
    let mut strides = vec![1; axes.len()];
    for i in (0..axes.len().saturating_sub(1)).rev() {
        strides[i] = strides[i + 1] * axes[i + 1].size;
    }
    strides
}

/// Dense joint pmf over an ordered list of named alphabets, stored row-major
/// (the last axis varies fastest).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PmfRepr", into = "PmfRepr")]
pub struct JointPmf {
    axes: Vec<Alphabet>,
    mass: Vec<f64>,
}

/// Wire form of a pmf; deserialization goes through [`JointPmf::new`].
#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PmfRepr {
    axes: Vec<Alphabet>,
    mass: Vec<f64>,
}

impl TryFrom<PmfRepr> for JointPmf {
    type Error = Error;

    fn try_from(r: PmfRepr) -> Result<Self> {
        JointPmf::new(r.axes, r.mass)
    }
}

impl From<JointPmf> for PmfRepr {
    fn from(p: JointPmf) -> Self {
        PmfRepr {
            axes: p.axes,
            mass: p.mass,
        }
    }
}

impl JointPmf {
    pub fn new(axes: Vec<Alphabet>, mass: Vec<f64>) -> Result<Self> {
        check_unique(&axes)?;
        let expected: usize = axes.iter().map(|a| a.size).product();
        if mass.len() != expected {
            return Err(Error::ShapeMismatch {
                expected,
                got: mass.len(),
            });
        }
        for (cell, &v) in mass.iter().enumerate() {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::InvalidMass { cell, value: v });
            }
        }
        let total: f64 = mass.iter().sum();
        if (total - 1.0).abs() > NORMALIZATION_TOL {
            return Err(Error::NotNormalized { total });
        }
        Ok(JointPmf { axes, mass })
    }

    /// Builds a pmf from nonnegative weights, normalizing them.
    pub fn from_weights(axes: Vec<Alphabet>, weights: Vec<f64>) -> Result<Self> {
        let total: f64 = weights.iter().sum();
        if !(total > 0.0) || !total.is_finite() {
            return Err(Error::NotNormalized { total });
        }
        JointPmf::new(axes, weights.into_iter().map(|w| w / total).collect())
    }

    /// Builds a pmf by evaluating `f` at every joint symbol.
    pub fn from_fn(axes: Vec<Alphabet>, f: impl Fn(&[usize]) -> f64) -> Result<Self> {
        let total: usize = axes.iter().map(|a| a.size).product();
        let mut mass = Vec::with_capacity(total);
        let mut idx = vec![0usize; axes.len()];
        for _ in 0..total {
            mass.push(f(&idx));
            advance(&mut idx, &axes);
        }
        JointPmf::new(axes, mass)
    }

    pub fn uniform(axes: Vec<Alphabet>) -> Result<Self> {
        let total: usize = axes.iter().map(|a| a.size).product();
        JointPmf::new(axes, vec![1.0 / total as f64; total])
    }

    pub fn point_mass(axes: Vec<Alphabet>, at: &[usize]) -> Result<Self> {
        let at = at.to_vec();
        JointPmf::from_fn(
            axes,
            move |idx| if idx == at.as_slice() { 1.0 } else { 0.0 },
        )
    }

    /// Single-axis pmf from a probability vector.
    pub fn single(name: &str, probs: &[f64]) -> Result<Self> {
        JointPmf::new(vec![Alphabet::new(name, probs.len())?], probs.to_vec())
    }

    /// Bernoulli(p) pmf on a binary axis: mass `p` on symbol 1.
    pub fn bernoulli(name: &str, p: f64) -> Result<Self> {
        JointPmf::single(name, &[1.0 - p, p])
    }

    pub(crate) fn from_parts(axes: Vec<Alphabet>, mass: Vec<f64>) -> Self {
        debug_assert_eq!(mass.len(), axes.iter().map(|a| a.size).product::<usize>());
        JointPmf { axes, mass }
    }

    pub fn axes(&self) -> &[Alphabet] {
        &self.axes
    }

    pub fn mass(&self) -> &[f64] {
        &self.mass
    }

    pub fn len(&self) -> usize {
        self.mass.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mass.is_empty()
    }

    pub fn axis_names(&self) -> Vec<&str> {
        self.axes.iter().map(|a| a.name.as_str()).collect()
    }

    pub fn has_axis(&self, name: &str) -> bool {
        self.axes.iter().any(|a| a.name == name)
    }

    pub fn axis_position(&self, name: &str) -> Result<usize> {
        self.axes
            .iter()
            .position(|a| a.name == name)
            .ok_or_else(|| Error::UnknownAxis(name.to_string()))
    }

    pub fn axis_size(&self, name: &str) -> Result<usize> {
        Ok(self.axes[self.axis_position(name)?].size)
    }

    pub(crate) fn positions(&self, names: &[&str]) -> Result<Vec<usize>> {
        let mut out = Vec::with_capacity(names.len());
        for (i, n) in names.iter().enumerate() {
            if names[..i].contains(n) {
                return Err(Error::OverlappingAxes(n.to_string()));
            }
            out.push(self.axis_position(n)?);
        }
        Ok(out)
    }

    pub fn strides(&self) -> Vec<usize> {
        strides_of(&self.axes)
    }

    pub fn get(&self, idx: &[usize]) -> f64 {
        let strides = self.strides();
        let flat: usize = idx.iter().zip(&strides).map(|(i, s)| i * s).sum();
        self.mass[flat]
    }

    /// Marginal masses over the axes at `positions`, in the order given.
    pub(crate) fn marginal_mass(&self, positions: &[usize]) -> Vec<f64> {
        let sizes: Vec<usize> = positions.iter().map(|&p| self.axes[p].size).collect();
        let out_len: usize = sizes.iter().product();
        let mut out_strides = vec![1usize; positions.len()];
        for i in (0..positions.len().saturating_sub(1)).rev() {
            out_strides[i] = out_strides[i + 1] * sizes[i + 1];
        }
        // contribution of each source axis to the output index
        let mut axis_weight = vec![0usize; self.axes.len()];
        for (k, &p) in positions.iter().enumerate() {
            axis_weight[p] = out_strides[k];
        }
        let mut out = vec![0.0; out_len];
        if positions.is_empty() {
            out[0] = self.mass.iter().sum();
            return out;
        }
        let mut idx = vec![0usize; self.axes.len()];
        let mut target = 0usize;
        for &m in &self.mass {
            out[target] += m;
            // odometer increment, maintaining `target` incrementally
            for a in (0..self.axes.len()).rev() {
                idx[a] += 1;
                target += axis_weight[a];
                if idx[a] < self.axes[a].size {
                    break;
                }
                target -= axis_weight[a] * idx[a];
                idx[a] = 0;
            }
        }
        out
    }

    /// Marginal pmf on `keep`, with axes in their original (canonical) order.
    pub fn marginalize(&self, keep: &[&str]) -> Result<JointPmf> {
        if keep.is_empty() {
            return Err(Error::EmptyAxisSet);
        }
        let mut pos = self.positions(keep)?;
        pos.sort_unstable();
        let axes = pos.iter().map(|&p| self.axes[p].clone()).collect();
        Ok(JointPmf::from_parts(axes, self.marginal_mass(&pos)))
    }

    /// Reorders axes to `order`, which must be a permutation of the axis names.
    pub fn permute(&self, order: &[&str]) -> Result<JointPmf> {
        if order.len() != self.axes.len() {
            return Err(Error::AxisMismatch);
        }
        let pos = self.positions(order)?;
        let axes = pos.iter().map(|&p| self.axes[p].clone()).collect();
        Ok(JointPmf::from_parts(axes, self.marginal_mass(&pos)))
    }

    /// Independent product `self ⊗ other`; axis names must not collide.
    pub fn product(&self, other: &JointPmf) -> Result<JointPmf> {
        let mut axes = self.axes.clone();
        axes.extend(other.axes.iter().cloned());
        check_unique(&axes)?;
        let mut mass = Vec::with_capacity(self.mass.len() * other.mass.len());
        for &a in &self.mass {
            for &b in &other.mass {
                mass.push(a * b);
            }
        }
        Ok(JointPmf::from_parts(axes, mass))
    }

    /// Conditional pmf of the remaining axes given `axis = value`.
    /// Returns `None` when the conditioning event has zero mass.
    pub fn condition_on(&self, axis: &str, value: usize) -> Result<Option<JointPmf>> {
        let p = self.axis_position(axis)?;
        if value >= self.axes[p].size {
            return Err(Error::SymbolOutOfRange {
                axis: axis.to_string(),
                symbol: value,
                size: self.axes[p].size,
            });
        }
        let rest: Vec<usize> = (0..self.axes.len()).filter(|&q| q != p).collect();
        if rest.is_empty() {
            return Err(Error::EmptyAxisSet);
        }
        let strides = self.strides();
        let axes: Vec<Alphabet> = rest.iter().map(|&q| self.axes[q].clone()).collect();
        let mut mass = Vec::with_capacity(self.mass.len() / self.axes[p].size);
        let mut idx = vec![0usize; axes.len()];
        let n: usize = axes.iter().map(|a| a.size).product();
        for _ in 0..n {
            let mut flat = value * strides[p];
            for (k, &q) in rest.iter().enumerate() {
                flat += idx[k] * strides[q];
            }
            mass.push(self.mass[flat]);
            advance(&mut idx, &axes);
        }
        let total: f64 = mass.iter().sum();
        if total <= 0.0 {
            return Ok(None);
        }
        mass.iter_mut().for_each(|m| *m /= total);
        Ok(Some(JointPmf::from_parts(axes, mass)))
    }

    /// Largest absolute cellwise difference after aligning axis order.
    pub fn max_abs_diff(&self, other: &JointPmf) -> Result<f64> {
        let names = self.axis_names();
        let aligned = other.permute(&names)?;
        if aligned.axes != self.axes {
            return Err(Error::AxisMismatch);
        }
        Ok(self
            .mass
            .iter()
            .zip(&aligned.mass)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max))
    }

    /// Cumulative distribution over flat cells, for sampling.
    pub fn cdf(&self) -> Vec<f64> {
        let mut acc = 0.0;
        self.mass
            .iter()
            .map(|m| {
                acc += m;
                acc
            })
            .collect()
    }

    /// Decodes a flat cell index into per-axis symbols.
    pub fn unflatten(&self, mut flat: usize, out: &mut [usize]) {
        for a in (0..self.axes.len()).rev() {
            out[a] = flat % self.axes[a].size;
            flat /= self.axes[a].size;
        }
    }
}

pub(crate) fn advance(idx: &mut [usize], axes: &[Alphabet]) {
    for a in (0..axes.len()).rev() {
        idx[a] += 1;
        if idx[a] < axes[a].size {
            return;
        }
        idx[a] = 0;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ax(n: &str, s: usize) -> Alphabet {
        Alphabet::new(n, s).unwrap()
    }

    #[test]
    fn rejects_bad_mass() {
        assert!(matches!(
            JointPmf::new(vec![ax("X", 2)], vec![0.5, 0.4]),
            Err(Error::NotNormalized { .. })
        ));
        assert!(matches!(
            JointPmf::new(vec![ax("X", 2)], vec![1.5, -0.5]),
            Err(Error::InvalidMass { .. })
        ));
        assert!(matches!(
            JointPmf::new(vec![ax("X", 2), ax("X", 2)], vec![0.25; 4]),
            Err(Error::DuplicateAxis(_))
        ));
        assert!(Alphabet::new("X", 0).is_err());
    }

    #[test]
    fn marginal_of_product_is_factor() {
        let px = JointPmf::single("X", &[0.2, 0.3, 0.5]).unwrap();
        let py = JointPmf::single("Y", &[0.6, 0.4]).unwrap();
        let pxy = px.product(&py).unwrap();
        let m = pxy.marginalize(&["X"]).unwrap();
        assert!(m.max_abs_diff(&px).unwrap() < 1e-15);
        let m = pxy.marginalize(&["Y"]).unwrap();
        assert!(m.max_abs_diff(&py).unwrap() < 1e-15);
        assert!(matches!(pxy.marginalize(&[]), Err(Error::EmptyAxisSet)));
        assert!(matches!(
            pxy.marginalize(&["Q"]),
            Err(Error::UnknownAxis(_))
        ));
    }

    #[test]
    fn marginalize_all_axes_is_identity() {
        let p = JointPmf::from_weights(
            vec![ax("A", 2), ax("B", 3)],
            vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0],
        )
        .unwrap();
        assert_eq!(p.marginalize(&["B", "A"]).unwrap(), p);
    }

    #[test]
    fn marginal_matches_direct_summation() {
        // discretized correlated pair on a 4x4 grid
        let axes = vec![ax("X", 4), ax("Y", 4), ax("Z", 2)];
        let w: Vec<f64> = (0..32).map(|i| 1.0 + ((i * 7) % 5) as f64).collect();
        let p = JointPmf::from_weights(axes, w).unwrap();
        let m = p.marginalize(&["Y"]).unwrap();
        for y in 0..4 {
            let mut direct = 0.0;
            for x in 0..4 {
                for z in 0..2 {
                    direct += p.get(&[x, y, z]);
                }
            }
            assert!((m.mass()[y] - direct).abs() < 1e-15);
        }
        let m = p.marginalize(&["Z", "X"]).unwrap();
        assert_eq!(m.axis_names(), vec!["X", "Z"]);
        for x in 0..4 {
            for z in 0..2 {
                let direct: f64 = (0..4).map(|y| p.get(&[x, y, z])).sum();
                assert!((m.get(&[x, z]) - direct).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn permute_and_condition() {
        let p = JointPmf::from_weights(
            vec![ax("A", 2), ax("B", 3)],
            (1..=6).map(f64::from).collect(),
        )
        .unwrap();
        let q = p.permute(&["B", "A"]).unwrap();
        assert_eq!(q.get(&[2, 1]), p.get(&[1, 2]));
        let c = p.condition_on("A", 1).unwrap().unwrap();
        assert!((c.mass()[0] - 4.0 / 15.0).abs() < 1e-15);
    }
}
