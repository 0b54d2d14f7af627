//! Multi-restart projected ascent over products of probability simplices.
//!
//! Parameters are a concatenation of simplex blocks (one block per row of
//! each conditional pmf). Constraints are expressed as `g(params) <= 0`; they
//! are handled with a quadratic penalty schedule followed by a bisection
//! toward the degenerate point (all blocks are point masses on symbol 0),
//! which must be feasible. The bisection first tries moving only trailing
//! groups of blocks, so a layer pinned by a zero rate does not drag the
//! others down with it.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::derive_seed;

/// Block structure of the parameter vector: each entry is the dimension of
/// one probability simplex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimplexLayout {
    dims: Vec<usize>,
    offsets: Vec<usize>,
    /// Parameter offsets where each group of blocks starts.
    groups: Vec<usize>,
    len: usize,
}

impl SimplexLayout {
    pub fn new(dims: Vec<usize>) -> Self {
        let mut offsets = Vec::with_capacity(dims.len());
        let mut len = 0;
        for &d in &dims {
            assert!(d >= 1, "simplex dimension must be positive");
            offsets.push(len);
            len += d;
        }
        let groups = if dims.is_empty() { Vec::new() } else { vec![0] };
        SimplexLayout {
            dims,
            offsets,
            groups,
            len,
        }
    }

    /// `count` simplices of dimension `dim` appended to the layout as a new group.
    pub fn push(&mut self, count: usize, dim: usize) {
        if count > 0 {
            self.groups.push(self.len);
        }
        for _ in 0..count {
            self.offsets.push(self.len);
            self.dims.push(dim);
            self.len += dim;
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn blocks(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.offsets.iter().copied().zip(self.dims.iter().copied())
    }

    fn block_of(&self, i: usize) -> (usize, usize) {
        let b = match self.offsets.binary_search(&i) {
            Ok(b) => b,
            Err(b) => b - 1,
        };
        (self.offsets[b], self.dims[b])
    }

    pub fn degenerate(&self) -> Vec<f64> {
        let mut v = vec![0.0; self.len];
        for (o, _) in self.blocks() {
            v[o] = 1.0;
        }
        v
    }

    pub fn uniform(&self) -> Vec<f64> {
        let mut v = vec![0.0; self.len];
        for (o, d) in self.blocks() {
            v[o..o + d].iter_mut().for_each(|x| *x = 1.0 / d as f64);
        }
        v
    }

    /// Flat-Dirichlet draw on every block.
    pub fn random<R: Rng>(&self, rng: &mut R) -> Vec<f64> {
        let mut v: Vec<f64> = (0..self.len)
            .map(|_| -(1.0 - rng.gen::<f64>()).ln())
            .collect();
        self.normalize(&mut v);
        v
    }

    pub fn normalize(&self, v: &mut [f64]) {
        for (o, d) in self.blocks() {
            let s: f64 = v[o..o + d].iter().sum();
            if s > 0.0 {
                v[o..o + d].iter_mut().for_each(|x| *x /= s);
            } else {
                v[o..o + d].iter_mut().for_each(|x| *x = 1.0 / d as f64);
            }
        }
    }

    /// Euclidean projection of every block onto its simplex.
    pub fn project(&self, v: &mut [f64]) {
        for (o, d) in self.blocks() {
            project_simplex(&mut v[o..o + d]);
        }
    }
}

/// Euclidean projection onto the probability simplex (sort-based).
pub fn project_simplex(v: &mut [f64]) {
    let mut u: Vec<f64> = v.to_vec();
    u.sort_by(|a, b| b.total_cmp(a));
    let mut cum = 0.0;
    let mut theta = 0.0;
    for (j, &uj) in u.iter().enumerate() {
        cum += uj;
        let t = (cum - 1.0) / (j + 1) as f64;
        if uj - t > 0.0 {
            theta = t;
        }
    }
    v.iter_mut().for_each(|x| *x = (*x - theta).max(0.0));
    let s: f64 = v.iter().sum();
    v.iter_mut().for_each(|x| *x /= s);
}

/// Objective value and constraint values (`g <= 0` is feasible).
#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation {
    pub objective: f64,
    pub constraints: Vec<f64>,
}

impl Evaluation {
    pub fn violation(&self) -> f64 {
        self.constraints
            .iter()
            .map(|g| g.max(0.0))
            .fold(0.0, f64::max)
    }

    pub fn is_feasible(&self) -> bool {
        self.constraints.iter().all(|&g| g <= 0.0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverOptions {
    /// Random (Dirichlet) restarts, in addition to structured starts.
    pub restarts: usize,
    /// Number of weights in the lambda sweep.
    pub lambda_grid: usize,
    /// Ascent iterations per penalty stage.
    pub max_iters: usize,
    pub fd_step: f64,
    pub penalties: Vec<f64>,
    pub seed: u64,
    /// Optional caps on the auxiliary alphabet sizes (U0, U1, U2).
    pub caps: [Option<usize>; 3],
    /// Hybrid-function search: exhaustive when the function count is at most this.
    pub exhaustive_function_limit: u64,
    pub random_functions: usize,
    /// Functions kept for full optimization after screening.
    pub refine_functions: usize,
    /// Whether `hb_frontier` runs the less-noisy check to label its output.
    pub check_less_noisy: bool,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            restarts: 64,
            lambda_grid: 33,
            max_iters: 60,
            fd_step: 1e-5,
            penalties: vec![10.0, 100.0, 1e3, 1e4],
            seed: 0,
            caps: [None; 3],
            exhaustive_function_limit: 1 << 20,
            random_functions: 256,
            refine_functions: 4,
            check_less_noisy: true,
        }
    }
}

impl SolverOptions {
    pub fn validate(&self) -> Result<()> {
        if self.restarts == 0 {
            return Err(Error::InvalidOptions("restarts must be positive".into()));
        }
        if self.lambda_grid == 0 {
            return Err(Error::InvalidOptions("lambda_grid must be positive".into()));
        }
        if !(self.fd_step > 0.0) {
            return Err(Error::InvalidOptions("fd_step must be positive".into()));
        }
        if self.penalties.is_empty() || self.penalties.iter().any(|p| !(*p > 0.0)) {
            return Err(Error::InvalidOptions("penalties must be positive".into()));
        }
        Ok(())
    }

    pub fn lambdas(&self) -> Vec<f64> {
        if self.lambda_grid == 1 {
            return vec![0.5];
        }
        (0..self.lambda_grid)
            .map(|i| i as f64 / (self.lambda_grid - 1) as f64)
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    pub value: f64,
    pub params: Vec<f64>,
    pub evaluation: Evaluation,
}

fn penalized(e: &Evaluation, rho: f64) -> f64 {
    e.objective
        - rho
            * e.constraints
                .iter()
                .map(|g| {
                    let v = g.max(0.0);
                    v * v
                })
                .sum::<f64>()
}

struct Ascent<'a, F> {
    layout: &'a SimplexLayout,
    eval: &'a F,
    opts: &'a SolverOptions,
}

impl<F> Ascent<'_, F>
where
    F: Fn(&[f64]) -> Evaluation + Sync,
{
    fn gradient(&self, x: &[f64], fx: f64, rho: f64, grad: &mut [f64], buf: &mut Vec<f64>) {
        for i in 0..x.len() {
            buf.clear();
            buf.extend_from_slice(x);
            let (o, d) = self.layout.block_of(i);
            buf[i] += self.opts.fd_step;
            let s: f64 = buf[o..o + d].iter().sum();
            buf[o..o + d].iter_mut().for_each(|v| *v /= s);
            grad[i] = (penalized(&(self.eval)(buf), rho) - fx) / self.opts.fd_step;
        }
    }

    fn run(&self, mut x: Vec<f64>) -> Vec<f64> {
        let mut grad = vec![0.0; x.len()];
        let mut buf = Vec::with_capacity(x.len());
        let mut trial = vec![0.0; x.len()];
        for &rho in &self.opts.penalties {
            let mut fx = penalized(&(self.eval)(&x), rho);
            let mut step = 0.1;
            for _ in 0..self.opts.max_iters {
                self.gradient(&x, fx, rho, &mut grad, &mut buf);
                let gnorm = grad.iter().map(|g| g * g).sum::<f64>().sqrt();
                if !(gnorm > 1e-12) {
                    break;
                }
                let mut improved = false;
                for _ in 0..30 {
                    for i in 0..x.len() {
                        trial[i] = x[i] + step * grad[i];
                    }
                    self.layout.project(&mut trial);
                    let ft = penalized(&(self.eval)(&trial), rho);
                    if ft > fx {
                        improved = ft - fx > 1e-13;
                        std::mem::swap(&mut x, &mut trial);
                        fx = ft;
                        step *= 1.5;
                        break;
                    }
                    step *= 0.5;
                }
                if !improved {
                    break;
                }
            }
        }
        x
    }

    /// Bisection toward the degenerate point until all constraints hold,
    /// moving the groups from `start` on; the best feasible result over all
    /// group suffixes wins.
    fn repair(&self, x: Vec<f64>, origin: &[f64]) -> Vec<f64> {
        if (self.eval)(&x).is_feasible() {
            return x;
        }
        let mut best: Option<(f64, Vec<f64>)> = None;
        let mut starts = self.layout.groups.clone();
        if starts.first() != Some(&0) {
            starts.insert(0, 0);
        }
        for &start in starts.iter().rev() {
            let mix = |t: f64| -> Vec<f64> {
                x.iter()
                    .zip(origin)
                    .enumerate()
                    .map(|(i, (a, b))| if i < start { *a } else { t * a + (1.0 - t) * b })
                    .collect()
            };
            if !(self.eval)(&mix(0.0)).is_feasible() {
                continue;
            }
            let (mut lo, mut hi) = (0.0f64, 1.0f64);
            for _ in 0..50 {
                let mid = 0.5 * (lo + hi);
                if (self.eval)(&mix(mid)).is_feasible() {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            let y = mix(lo);
            let v = (self.eval)(&y).objective;
            if best.as_ref().map_or(true, |(b, _)| v > *b) {
                best = Some((v, y));
            }
        }
        best.map_or_else(|| origin.to_vec(), |(_, y)| y)
    }
}

/// Maximizes `eval(params).objective` subject to `eval(params).constraints <= 0`
/// over the product of simplices in `layout`.
///
/// Runs every entry of `starts` plus `opts.restarts` Dirichlet draws seeded
/// from `seed`; the best feasible result wins, ties going to the earliest
/// start. Deterministic for a given seed regardless of thread count.
pub fn maximize_weighted_exponents<F>(
    layout: &SimplexLayout,
    eval: &F,
    opts: &SolverOptions,
    seed: u64,
    starts: &[Vec<f64>],
) -> Result<Solution>
where
    F: Fn(&[f64]) -> Evaluation + Sync,
{
    opts.validate()?;
    let origin = layout.degenerate();
    let origin_eval = eval(&origin);
    if !origin_eval.is_feasible() {
        return Err(Error::NoFeasiblePoint);
    }
    let mut inits: Vec<Vec<f64>> = starts.to_vec();
    for r in 0..opts.restarts {
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, "restart", &[r as u64]));
        inits.push(layout.random(&mut rng));
    }
    let ascent = Ascent { layout, eval, opts };
    let results: Vec<Solution> = inits
        .into_par_iter()
        .map(|x0| {
            let x = ascent.run(x0);
            let x = ascent.repair(x, &origin);
            let e = eval(&x);
            Solution {
                value: e.objective,
                params: x,
                evaluation: e,
            }
        })
        .collect();
    let mut best = Solution {
        value: origin_eval.objective,
        params: origin,
        evaluation: origin_eval,
    };
    for s in results {
        if s.evaluation.is_feasible() && s.value > best.value {
            best = s;
        }
    }
    Ok(best)
}
