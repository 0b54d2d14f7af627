use rayon::prelude::*;

use super::frontier::{AuxiliaryWitness, FrontierPoint};
use super::solver::{maximize_weighted_exponents, Evaluation, SimplexLayout, SolverOptions};
use crate::error::{Error, Result};
use crate::prob::axes::{U0, U1, U2, X};
use crate::prob::{Alphabet, Channel};
use crate::rng::derive_seed;

/// Exponent pair and constraint values (`<= 0` feasible) at a parameter vector.
pub(crate) struct Exponents {
    pub theta1: f64,
    pub theta2: f64,
    pub constraints: Vec<f64>,
}

pub(crate) trait ExponentModel: Sync {
    fn layout(&self) -> SimplexLayout;
    fn evaluate(&self, params: &[f64]) -> Exponents;
    fn starts(&self) -> Vec<Vec<f64>>;
    fn witness(&self, params: &[f64]) -> Result<AuxiliaryWitness>;
}

/// Parameterization of `P(U0|X)`, `P(U1|X,U0)` and `P(U2|X,U0)` as simplex blocks.
#[derive(Debug, Clone, Copy)]
pub(crate) struct AuxLayout {
    pub nx: usize,
    pub k: [usize; 3],
    pub has_u1: bool,
    pub has_u2: bool,
}

impl AuxLayout {
    fn o1(&self) -> usize {
        self.nx * self.k[0]
    }

    fn o2(&self) -> usize {
        self.o1()
            + if self.has_u1 {
                self.nx * self.k[0] * self.k[1]
            } else {
                0
            }
    }

    pub fn simplex(&self) -> SimplexLayout {
        let mut l = SimplexLayout::new(vec![]);
        l.push(self.nx, self.k[0]);
        if self.has_u1 {
            l.push(self.nx * self.k[0], self.k[1]);
        }
        if self.has_u2 {
            l.push(self.nx * self.k[0], self.k[2]);
        }
        l
    }

    #[inline]
    pub fn u0(&self, p: &[f64], x: usize, u0: usize) -> f64 {
        p[x * self.k[0] + u0]
    }

    #[inline]
    pub fn u1(&self, p: &[f64], x: usize, u0: usize, u1: usize) -> f64 {
        p[self.o1() + (x * self.k[0] + u0) * self.k[1] + u1]
    }

    #[inline]
    pub fn u2(&self, p: &[f64], x: usize, u0: usize, u2: usize) -> f64 {
        p[self.o2() + (x * self.k[0] + u0) * self.k[2] + u2]
    }

    /// Starts combining degenerate and copy-of-X choices for each auxiliary.
    pub fn structured_starts(&self) -> Vec<Vec<f64>> {
        let len = self.simplex().len();
        let n_aux = 1 + self.has_u1 as usize + self.has_u2 as usize;
        let mut out = Vec::new();
        for pattern in 1..(1u32 << n_aux) {
            let mut p = vec![0.0; len];
            for x in 0..self.nx {
                let c0 = if pattern & 1 != 0 { x % self.k[0] } else { 0 };
                p[x * self.k[0] + c0] = 1.0;
                for u0 in 0..self.k[0] {
                    if self.has_u1 {
                        let c = if pattern & 2 != 0 { x % self.k[1] } else { 0 };
                        p[self.o1() + (x * self.k[0] + u0) * self.k[1] + c] = 1.0;
                    }
                    if self.has_u2 {
                        let bit = if self.has_u1 { 4 } else { 2 };
                        let c = if pattern & bit != 0 { x % self.k[2] } else { 0 };
                        p[self.o2() + (x * self.k[0] + u0) * self.k[2] + c] = 1.0;
                    }
                }
            }
            out.push(p);
        }
        out
    }

    pub fn witness(&self, p: &[f64]) -> Result<AuxiliaryWitness> {
        let ax = Alphabet::new(X, self.nx)?;
        let a0 = Alphabet::new(U0, self.k[0])?;
        let k = self.k;
        let u0 = Channel::new(
            vec![ax.clone()],
            vec![a0.clone()],
            clean(&p[..self.o1()], k[0]),
        )?;
        let u1 = if self.has_u1 {
            let len = self.nx * k[0] * k[1];
            Some(Channel::new(
                vec![ax.clone(), a0.clone()],
                vec![Alphabet::new(U1, k[1])?],
                clean(&p[self.o1()..self.o1() + len], k[1]),
            )?)
        } else {
            None
        };
        let u2 = if self.has_u2 {
            let len = self.nx * k[0] * k[2];
            Some(Channel::new(
                vec![ax, a0],
                vec![Alphabet::new(U2, k[2])?],
                clean(&p[self.o2()..self.o2() + len], k[2]),
            )?)
        } else {
            None
        };
        Ok(AuxiliaryWitness {
            u0,
            u1,
            u2,
            hybrid: None,
        })
    }
}

/// Renormalizes rows so the kernel passes the stochasticity check exactly.
pub(crate) fn clean(p: &[f64], dim: usize) -> Vec<f64> {
    let mut v = p.to_vec();
    for row in v.chunks_mut(dim) {
        row.iter_mut().for_each(|x| *x = x.max(0.0));
        let s: f64 = row.iter().sum();
        row.iter_mut().for_each(|x| *x /= s);
    }
    v
}

/// Resolves an auxiliary alphabet size against its bound and an optional cap.
pub(crate) fn cardinality(bound: usize, cap: Option<usize>, name: &str) -> Result<usize> {
    match cap {
        None => Ok(bound),
        Some(0) => Err(Error::InvalidOptions(format!(
            "cap for {name} must be positive"
        ))),
        Some(c) if c > bound => Err(Error::InvalidOptions(format!(
            "cap {c} for {name} exceeds the sufficient bound {bound}"
        ))),
        Some(c) => Ok(c),
    }
}

/// One weighted maximization per lambda on the grid; afterwards every weight
/// also tries the maximizers found for the other weights.
pub(crate) fn sweep<M: ExponentModel>(
    model: &M,
    opts: &SolverOptions,
    tag: &str,
) -> Result<Vec<FrontierPoint>> {
    opts.validate()?;
    let layout = model.layout();
    let starts = model.starts();
    let lambdas = opts.lambdas();
    let params: Vec<Vec<f64>> = lambdas
        .par_iter()
        .enumerate()
        .map(|(j, &lambda)| {
            let eval = |p: &[f64]| {
                let e = model.evaluate(p);
                Evaluation {
                    objective: lambda * e.theta1 + (1.0 - lambda) * e.theta2,
                    constraints: e.constraints,
                }
            };
            let seed = derive_seed(opts.seed, tag, &[j as u64]);
            maximize_weighted_exponents(&layout, &eval, opts, seed, &starts).map(|s| s.params)
        })
        .collect::<Result<_>>()?;
    let evals: Vec<Exponents> = params.iter().map(|p| model.evaluate(p)).collect();
    let mut points = Vec::with_capacity(lambdas.len());
    for &lambda in &lambdas {
        let mut best = 0;
        let mut best_val = f64::NEG_INFINITY;
        for (i, e) in evals.iter().enumerate() {
            if e.constraints.iter().all(|&g| g <= 0.0) {
                let v = lambda * e.theta1 + (1.0 - lambda) * e.theta2;
                if v > best_val + 1e-12 {
                    best_val = v;
                    best = i;
                }
            }
        }
        let e = &evals[best];
        points.push(FrontierPoint {
            lambda,
            theta1: e.theta1,
            theta2: e.theta2,
            slacks: e.constraints.iter().map(|g| -g).collect(),
            witness: Some(model.witness(&params[best])?),
        });
    }
    Ok(points)
}
