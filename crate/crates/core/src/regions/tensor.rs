//! Small dense joint-mass tensors addressed by axis bitmasks, used in the
//! solver's inner loop where named-axis bookkeeping would dominate.

pub(crate) struct Tensor {
    dims: Vec<usize>,
    mass: Vec<f64>,
}

impl Tensor {
    pub(crate) fn build(dims: &[usize], mut f: impl FnMut(&[usize]) -> f64) -> Self {
        let len: usize = dims.iter().product();
        let mut mass = Vec::with_capacity(len);
        let mut idx = vec![0usize; dims.len()];
        for _ in 0..len {
            mass.push(f(&idx));
            for a in (0..dims.len()).rev() {
                idx[a] += 1;
                if idx[a] < dims[a] {
                    break;
                }
                idx[a] = 0;
            }
        }
        Tensor {
            dims: dims.to_vec(),
            mass,
        }
    }

    /// Entropy (bits) of the marginal on the axes whose bits are set in `mask`.
    pub(crate) fn h(&self, mask: u32) -> f64 {
        if mask == 0 {
            return 0.0;
        }
        let n = self.dims.len();
        let mut weight = vec![0usize; n];
        let mut size = 1usize;
        for a in (0..n).rev() {
            if mask & (1 << a) != 0 {
                weight[a] = size;
                size *= self.dims[a];
            }
        }
        let mut out = vec![0.0; size];
        let mut idx = vec![0usize; n];
        let mut t = 0usize;
        for &m in &self.mass {
            out[t] += m;
            for a in (0..n).rev() {
                idx[a] += 1;
                t += weight[a];
                if idx[a] < self.dims[a] {
                    break;
                }
                t -= weight[a] * idx[a];
                idx[a] = 0;
            }
        }
        out.iter()
            .filter(|&&m| m > 0.0)
            .map(|&m| -m * m.log2())
            .sum()
    }

    /// `I(a; b | c)` in bits, clamped at zero.
    pub(crate) fn mi(&self, a: u32, b: u32, c: u32) -> f64 {
        (self.h(a | c) + self.h(b | c) - self.h(a | b | c) - self.h(c)).max(0.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prob::{mutual_information, Channel, JointPmf};

    #[test]
    fn agrees_with_named_axis_route() {
        let p = JointPmf::single("X", &[0.3, 0.7])
            .unwrap()
            .extend(&Channel::bsc("X", "Y", 0.2).unwrap())
            .unwrap()
            .extend(&Channel::bsc("Y", "Z", 0.1).unwrap())
            .unwrap();
        let t = Tensor::build(&[2, 2, 2], |i| p.get(i));
        let named = mutual_information(&p, &["X"], &["Z"], &["Y"]).unwrap();
        assert!((t.mi(0b001, 0b100, 0b010) - named).abs() < 1e-14);
        let named = mutual_information(&p, &["X"], &["Z"], &[]).unwrap();
        assert!((t.mi(0b001, 0b100, 0) - named).abs() < 1e-14);
    }
}
