//! Exhaustive references for tiny instances: a lattice enumeration of the
//! auxiliary channels and the exact finite-length Neyman-Pearson test.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::prob::axes::{U0, U1, X, Y1, Y2, Z1};
use crate::prob::{mutual_information, Alphabet, Channel, HypothesisPair, JointPmf, Structure};
use crate::regions::{
    Exactness, FrontierMeta, FrontierPoint, RatePoint, RegionFrontier, RegionKind,
};

/// Simplex lattice used by [`brute_force_frontier`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    /// Lattice spacing; `1/step` must be an integer.
    pub step: f64,
    /// Alphabet sizes of `U0` and `U1` (and `U2`, which shares the `U1` search).
    pub caps: [usize; 2],
    /// Maximum number of information-measure evaluations.
    pub budget: u64,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec {
            step: 0.05,
            caps: [2, 2],
            budget: 20_000_000,
        }
    }
}

const MAX_ALPHABET: usize = 3;

fn binomial(n: u64, k: u64) -> u64 {
    (0..k).fold(1u64, |acc, i| acc * (n - i) / (i + 1))
}

/// All points of the simplex in `dim` coordinates with denominators `m`.
fn lattice(dim: usize, m: usize) -> Vec<Vec<f64>> {
    fn rec(dim: usize, left: usize, m: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<f64>>) {
        if cur.len() == dim - 1 {
            cur.push(left);
            out.push(cur.iter().map(|&c| c as f64 / m as f64).collect());
            cur.pop();
            return;
        }
        for c in 0..=left {
            cur.push(c);
            rec(dim, left - c, m, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(dim, m, m, &mut Vec::new(), &mut out);
    out
}

/// Every channel `from -> to` whose rows are lattice points.
fn lattice_channels(from: &str, nx: usize, to: &str, k: usize, m: usize) -> Result<Vec<Channel>> {
    let rows = lattice(k, m);
    let total = rows.len().pow(nx as u32);
    let mut out = Vec::with_capacity(total);
    for code in 0..total {
        let mut c = code;
        let mut kernel = Vec::with_capacity(nx * k);
        for _ in 0..nx {
            kernel.extend_from_slice(&rows[c % rows.len()]);
            c /= rows.len();
        }
        out.push(Channel::new(
            vec![Alphabet::new(from, nx)?],
            vec![Alphabet::new(to, k)?],
            kernel,
        )?);
    }
    Ok(out)
}

/// Pareto-pruned `(cost, gain)` list: costs increasing, gains strictly increasing.
fn pareto(mut v: Vec<(f64, f64)>, budget: f64) -> Vec<(f64, f64)> {
    v.retain(|&(c, _)| c <= budget);
    v.sort_by(|a, b| a.0.total_cmp(&b.0).then(b.1.total_cmp(&a.1)));
    let mut out: Vec<(f64, f64)> = Vec::new();
    for p in v {
        if out.last().map_or(true, |l| p.1 > l.1) {
            out.push(p);
        }
    }
    out
}

/// Largest total gain choosing one option per group with total cost within budget.
fn knapsack(groups: &[Vec<(f64, f64)>], budget: f64) -> f64 {
    let mut acc = vec![(0.0, 0.0)];
    for g in groups {
        let g = pareto(g.clone(), budget);
        let mut next = Vec::with_capacity(acc.len() * g.len());
        for a in &acc {
            for b in &g {
                next.push((a.0 + b.0, a.1 + b.1));
            }
        }
        acc = pareto(next, budget);
    }
    acc.iter().map(|p| p.1).fold(0.0, f64::max)
}

const BUDGET_TOL: f64 = 1e-12;

/// Per-`u0` option lists for the second-layer auxiliary: each entry is
/// `(P(u0) * I(U1; X | conditioning, U0=u0), P(u0) * I(U1; target | conditioning, U0=u0))`.
fn slice_options(
    joint: &JointPmf,
    keep: &[&str],
    target: &str,
    given: &[&str],
    second: &[Channel],
    k0: usize,
) -> Result<Vec<Vec<(f64, f64)>>> {
    let pu0 = joint.marginalize(&[U0])?;
    let mut groups = Vec::with_capacity(k0);
    for u0 in 0..k0 {
        let w = pu0.mass()[u0];
        let Some(cond) = joint.condition_on(U0, u0)? else {
            continue;
        };
        let cond = cond.permute_subset(keep)?;
        let mut opts = Vec::with_capacity(second.len());
        for c in second {
            let j = cond.extend(c)?;
            opts.push((
                w * mutual_information(&j, &[U1], &[X], given)?,
                w * mutual_information(&j, &[U1], &[target], given)?,
            ));
        }
        groups.push(opts);
    }
    Ok(groups)
}

/// Exact Pareto set of the region restricted to lattice channels.
///
/// Testing against independence uses the three-link characterization with
/// rates `(r0, r1, r2)`; testing against conditional independence uses the
/// single-link binning characterization with rate `r0`. The second-layer
/// channels are optimized slice by slice through the chain rule, so the
/// result is exact over the full lattice product.
pub fn brute_force_frontier(
    h: &HypothesisPair,
    rates: RatePoint,
    grid: &GridSpec,
) -> Result<RegionFrontier> {
    let start = Instant::now();
    rates.validate()?;
    if !(grid.step > 0.0 && grid.step <= 0.5) {
        return Err(Error::InvalidParameter(format!(
            "grid step {} outside (0, 0.5]",
            grid.step
        )));
    }
    let m = (1.0 / grid.step).round() as usize;
    if ((m as f64) * grid.step - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidParameter("1/step must be an integer".into()));
    }
    let h0 = h.h0();
    let nx = h0.axis_size(X)?;
    let [k0, k1] = grid.caps;
    if k0 == 0 || k1 == 0 {
        return Err(Error::InvalidParameter("caps must be positive".into()));
    }
    let conditional = h.structure() == Structure::AgainstConditionalIndependence;
    let row = |k: usize| binomial((m + k - 1) as u64, (k - 1) as u64);
    let n0 = row(k0).pow(nx as u32);
    let n1 = row(k1).pow(nx as u32);
    let needed = n0 * (1 + k0 as u64 * n1 * if conditional { 1 } else { 2 });
    if nx > MAX_ALPHABET || k0 > MAX_ALPHABET || k1 > MAX_ALPHABET || needed > grid.budget {
        return Err(Error::BudgetExceeded {
            needed: needed as f64,
            budget: grid.budget as f64,
        });
    }
    let first = lattice_channels(X, nx, U0, k0, m)?;
    let second = lattice_channels(X, nx, U1, k1, m)?;
    let mut raw = Vec::new();
    for c0 in &first {
        let j = h0.extend(c0)?;
        let i0 = mutual_information(&j, &[U0], &[X], &[])?;
        let (theta1, theta2) = if conditional {
            if i0 > rates.r0 + BUDGET_TOL {
                continue;
            }
            let groups = slice_options(&j, &[X, Z1, Y1], Y1, &[Z1], &second, k0)?;
            (
                mutual_information(&j, &[U0], &[Y1], &[Z1])?
                    + knapsack(&groups, rates.r0 - i0 + BUDGET_TOL),
                mutual_information(&j, &[U0], &[Y2], &[])?,
            )
        } else {
            if i0 > rates.r0 + BUDGET_TOL {
                continue;
            }
            let g1 = slice_options(&j, &[X, Y1], Y1, &[], &second, k0)?;
            let g2 = slice_options(&j, &[X, Y2], Y2, &[], &second, k0)?;
            (
                mutual_information(&j, &[U0], &[Y1], &[])? + knapsack(&g1, rates.r1 + BUDGET_TOL),
                mutual_information(&j, &[U0], &[Y2], &[])? + knapsack(&g2, rates.r2 + BUDGET_TOL),
            )
        };
        raw.push(FrontierPoint {
            lambda: f64::NAN,
            theta1,
            theta2,
            slacks: vec![],
            witness: None,
        });
    }
    Ok(RegionFrontier::new(
        raw,
        FrontierMeta {
            kind: if conditional {
                RegionKind::HeegardBerger
            } else {
                RegionKind::GrayWyner
            },
            exactness: Exactness::InnerBound,
            restarts: 0,
            lambda_grid: 0,
            seed: 0,
            cardinalities: vec![k0, k1],
            runtime_secs: start.elapsed().as_secs_f64(),
        },
    ))
}

/// Largest alphabet and block length accepted by [`exact_np_beta`].
pub const NP_MAX_ALPHABET: usize = 4;
pub const NP_MAX_LENGTH: usize = 40;

fn compositions(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(k: usize, left: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k - 1 {
            cur.push(left);
            out.push(cur.clone());
            cur.pop();
            return;
        }
        for c in 0..=left {
            cur.push(c);
            rec(k, left - c, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(k, n, &mut Vec::new(), &mut out);
    out
}

/// Minimal type-II error of any (randomized) test between i.i.d. laws `p`
/// (null) and `q` (alternative) on `n` samples with type-I error at most `epsilon`.
pub fn exact_np_beta(p: &JointPmf, q: &JointPmf, n: usize, epsilon: f64) -> Result<f64> {
    if p.axes().len() != 1 || q.axes() != p.axes() {
        return Err(Error::AxisMismatch);
    }
    if !(0.0..1.0).contains(&epsilon) {
        return Err(Error::InvalidParameter(format!(
            "epsilon {epsilon} outside [0, 1)"
        )));
    }
    if n == 0 {
        return Err(Error::InvalidParameter(
            "block length must be positive".into(),
        ));
    }
    let k = p.len();
    if k > NP_MAX_ALPHABET {
        return Err(Error::BudgetExceeded {
            needed: k as f64,
            budget: NP_MAX_ALPHABET as f64,
        });
    }
    if n > NP_MAX_LENGTH {
        return Err(Error::BudgetExceeded {
            needed: n as f64,
            budget: NP_MAX_LENGTH as f64,
        });
    }
    let ln_fact: Vec<f64> = std::iter::once(0.0)
        .chain((1..=n).scan(0.0, |s, i| {
            *s += (i as f64).ln();
            Some(*s)
        }))
        .collect();
    let class_prob = |counts: &[usize], law: &[f64]| -> f64 {
        let mut l = ln_fact[n];
        for (&c, &pa) in counts.iter().zip(law) {
            if c > 0 {
                if pa <= 0.0 {
                    return 0.0;
                }
                l += c as f64 * pa.ln() - ln_fact[c];
            }
        }
        l.exp()
    };
    // (log-likelihood ratio, P-mass, Q-mass) per type class with positive P-mass
    let mut classes: Vec<(f64, f64, f64)> = compositions(n, k)
        .iter()
        .filter_map(|c| {
            let pm = class_prob(c, p.mass());
            if pm <= 0.0 {
                return None;
            }
            let qm = class_prob(c, q.mass());
            let llr = if qm <= 0.0 {
                f64::INFINITY
            } else {
                c.iter()
                    .enumerate()
                    .filter(|(_, &ci)| ci > 0)
                    .map(|(a, &ci)| ci as f64 * (p.mass()[a] / q.mass()[a]).ln())
                    .sum()
            };
            Some((llr, pm, qm))
        })
        .collect();
    classes.sort_by(|a, b| b.0.total_cmp(&a.0));
    let target = 1.0 - epsilon;
    let (mut p_acc, mut beta) = (0.0, 0.0);
    let mut i = 0;
    while i < classes.len() {
        // group classes with equal likelihood ratio
        let mut j = i + 1;
        while j < classes.len()
            && (classes[j].0 == classes[i].0
                || (classes[j].0 - classes[i].0).abs() <= 1e-9 * (1.0 + classes[i].0.abs()))
        {
            j += 1;
        }
        let (gp, gq) = classes[i..j]
            .iter()
            .fold((0.0, 0.0), |(a, b), c| (a + c.1, b + c.2));
        if p_acc + gp >= target {
            let gamma = ((target - p_acc) / gp).clamp(0.0, 1.0);
            return Ok(beta + gamma * gq);
        }
        p_acc += gp;
        beta += gq;
        i = j;
    }
    Ok(beta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prob::kl_divergence;

    #[test]
    fn lattice_sizes() {
        assert_eq!(lattice(2, 20).len(), 21);
        assert_eq!(lattice(3, 20).len(), binomial(22, 2) as usize);
        assert!(lattice(3, 4)
            .iter()
            .all(|r| (r.iter().sum::<f64>() - 1.0).abs() < 1e-12));
    }

    #[test]
    fn knapsack_picks_best_combination() {
        let groups = vec![
            vec![(0.0, 0.0), (0.5, 1.0), (1.0, 1.2)],
            vec![(0.0, 0.0), (0.5, 0.9)],
        ];
        assert!((knapsack(&groups, 1.0) - 1.9).abs() < 1e-12);
        assert!((knapsack(&groups, 0.6) - 1.0).abs() < 1e-12);
        assert_eq!(knapsack(&groups, 0.0), 0.0);
    }

    #[test]
    fn identical_laws_give_blind_test() {
        let p = JointPmf::bernoulli("X", 0.3).unwrap();
        for n in [1, 5, 17] {
            let b = exact_np_beta(&p, &p, n, 0.1).unwrap();
            assert!((b - 0.9).abs() < 1e-9, "{b}");
        }
    }

    #[test]
    fn disjoint_supports() {
        let p = JointPmf::single("X", &[1.0, 0.0]).unwrap();
        let q = JointPmf::single("X", &[0.0, 1.0]).unwrap();
        assert_eq!(exact_np_beta(&p, &q, 1, 0.1).unwrap(), 0.0);
    }

    #[test]
    fn single_sample_by_hand() {
        // one sample, P=(0.5,0.5), Q=(0.75,0.25), eps=0.1:
        // accept symbol 1 (ratio 2) fully, then 0.4/0.5 of symbol 0
        let p = JointPmf::bernoulli("X", 0.5).unwrap();
        let q = JointPmf::bernoulli("X", 0.25).unwrap();
        let b = exact_np_beta(&p, &q, 1, 0.1).unwrap();
        assert!((b - (0.25 + 0.8 * 0.75)).abs() < 1e-12);
    }

    /// Binary-alphabet reference: classes are indexed by the count of ones.
    fn binomial_reference(n: usize, p: f64, q: f64, eps: f64) -> f64 {
        let choose =
            |n: usize, k: usize| (0..k).fold(1.0, |a, i| a * (n - i) as f64 / (i + 1) as f64);
        let mut cl: Vec<(f64, f64, f64)> = (0..=n)
            .map(|k| {
                let pm = choose(n, k) * p.powi(k as i32) * (1.0 - p).powi((n - k) as i32);
                let qm = choose(n, k) * q.powi(k as i32) * (1.0 - q).powi((n - k) as i32);
                (pm / qm, pm, qm)
            })
            .collect();
        cl.sort_by(|a, b| b.0.total_cmp(&a.0));
        let (mut acc, mut beta) = (0.0, 0.0);
        for (_, pm, qm) in cl {
            if acc + pm >= 1.0 - eps {
                return beta + (1.0 - eps - acc) / pm * qm;
            }
            acc += pm;
            beta += qm;
        }
        beta
    }

    #[test]
    fn matches_binomial_reference() {
        let p = JointPmf::bernoulli("X", 0.5).unwrap();
        let q = JointPmf::bernoulli("X", 0.25).unwrap();
        for n in [2, 7, 20, 40] {
            for eps in [0.05, 0.1, 0.3] {
                let a = exact_np_beta(&p, &q, n, eps).unwrap();
                let b = binomial_reference(n, 0.5, 0.25, eps);
                assert!(
                    (a - b).abs() <= 1e-12 * b.max(1e-300) + 1e-15,
                    "{n} {eps}: {a} vs {b}"
                );
            }
        }
    }

    #[test]
    fn beta_monotone_and_below_divergence() {
        let p = JointPmf::bernoulli("X", 0.5).unwrap();
        let q = JointPmf::bernoulli("X", 0.25).unwrap();
        let d = kl_divergence(&p, &q).unwrap();
        let mut prev = 1.0;
        for n in 1..=40 {
            let b = exact_np_beta(&p, &q, n, 0.1).unwrap();
            assert!(b <= prev + 1e-15);
            assert!(b <= exact_np_beta(&p, &q, n, 0.05).unwrap() + 1e-15);
            prev = b;
        }
        let e40 = -prev.log2() / 40.0;
        assert!(e40 < d);
        assert!(e40 > -exact_np_beta(&p, &q, 20, 0.1).unwrap().log2() / 20.0);
    }

    #[test]
    fn limits_enforced() {
        let p = JointPmf::uniform(vec![Alphabet::new("X", 5).unwrap()]).unwrap();
        assert!(matches!(
            exact_np_beta(&p, &p, 3, 0.1),
            Err(Error::BudgetExceeded { .. })
        ));
        let p = JointPmf::bernoulli("X", 0.5).unwrap();
        assert!(matches!(
            exact_np_beta(&p, &p, 41, 0.1),
            Err(Error::BudgetExceeded { .. })
        ));
    }
}
