use serde::{Deserialize, Serialize};

use super::model::clean;
use super::solver::{maximize_weighted_exponents, Evaluation, SimplexLayout, SolverOptions};
use super::tensor::Tensor;
use crate::error::Result;
use crate::prob::axes::{U, X, Y2, Z1};
use crate::prob::{Alphabet, Channel, JointPmf};
use crate::rng::derive_seed;

/// Gap below which the less-noisy relation is declared violated.
pub const LESS_NOISY_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LessNoisyVerdict {
    pub holds: bool,
    /// Smallest `I(U;Z1) - I(U;Y2)` found.
    pub min_gap: f64,
    pub argmin_witness: Channel,
    /// Always "numerical": the search is over `|U| = |X| + 1` only.
    pub label: String,
}

/// Numerically tests whether `Z1` is less noisy than `Y2` with respect to
/// `X`, by minimizing `I(U;Z1) - I(U;Y2)` over `P(U|X)`.
pub fn less_noisy_check(h: &JointPmf, opts: &SolverOptions) -> Result<LessNoisyVerdict> {
    opts.validate()?;
    let pxz = h.permute_subset(&[X, Z1])?;
    let pxy = h.permute_subset(&[X, Y2])?;
    let nx = h.axis_size(X)?;
    let (nz, ny) = (pxz.axes()[1].size, pxy.axes()[1].size);
    let k = nx + 1;
    let layout = SimplexLayout::new(vec![k; nx]);
    let eval = |p: &[f64]| {
        let tz = Tensor::build(&[nx, nz, k], |i| {
            pxz.mass()[i[0] * nz + i[1]] * p[i[0] * k + i[2]]
        });
        let ty = Tensor::build(&[nx, ny, k], |i| {
            pxy.mass()[i[0] * ny + i[1]] * p[i[0] * k + i[2]]
        });
        Evaluation {
            objective: ty.mi(0b100, 0b010, 0) - tz.mi(0b100, 0b010, 0),
            constraints: vec![],
        }
    };
    let mut starts = Vec::new();
    let mut copy = vec![0.0; nx * k];
    for x in 0..nx {
        copy[x * k + x] = 1.0;
    }
    starts.push(copy);
    let seed = derive_seed(opts.seed, "less-noisy", &[]);
    let best = maximize_weighted_exponents(&layout, &eval, opts, seed, &starts)?;
    let min_gap = -best.value;
    Ok(LessNoisyVerdict {
        holds: min_gap >= -LESS_NOISY_TOL,
        min_gap,
        argmin_witness: Channel::new(
            vec![Alphabet::new(X, nx)?],
            vec![Alphabet::new(U, k)?],
            clean(&best.params, k),
        )?,
        label: "numerical".into(),
    })
}
