use std::time::Instant;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::frontier::{
    AuxiliaryWitness, Exactness, FrontierMeta, FrontierPoint, HybridMap, RegionFrontier, RegionKind,
};
use super::model::{cardinality, sweep, AuxLayout, ExponentModel, Exponents};
use super::solver::{maximize_weighted_exponents, Evaluation, SimplexLayout, SolverOptions};
use super::tensor::Tensor;
use super::FEASIBILITY_TOL;
use crate::error::{Error, Result};
use crate::prob::axes::{V1, V2, W, X, Y1, Y2, Z1};
use crate::prob::{Alphabet, Channel, HypothesisPair, Structure};
use crate::rng::{derive_seed, stream};

/// Tolerance for recognizing a joint broadcast kernel as degraded.
const DEGRADED_TOL: f64 = 1e-10;

/// Degraded broadcast channel `W -> V1 -> V2`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "BroadcastRepr", into = "BroadcastRepr")]
pub struct DegradedBroadcast {
    v1_given_w: Channel,
    v2_given_v1: Channel,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct BroadcastRepr {
    v1_given_w: Channel,
    v2_given_v1: Channel,
}

impl TryFrom<BroadcastRepr> for DegradedBroadcast {
    type Error = Error;

    fn try_from(r: BroadcastRepr) -> Result<Self> {
        DegradedBroadcast::new(r.v1_given_w, r.v2_given_v1)
    }
}

impl From<DegradedBroadcast> for BroadcastRepr {
    fn from(b: DegradedBroadcast) -> Self {
        BroadcastRepr {
            v1_given_w: b.v1_given_w,
            v2_given_v1: b.v2_given_v1,
        }
    }
}

impl DegradedBroadcast {
    pub fn new(v1_given_w: Channel, v2_given_v1: Channel) -> Result<Self> {
        let names = |axes: &[Alphabet]| axes.iter().map(|a| a.name.clone()).collect::<Vec<_>>();
        if names(v1_given_w.from_axes()) != [W]
            || names(v1_given_w.to_axes()) != [V1]
            || names(v2_given_v1.from_axes()) != [V1]
            || names(v2_given_v1.to_axes()) != [V2]
        {
            return Err(Error::StructureViolated(
                "broadcast channel must be given as W -> V1 and V1 -> V2".into(),
            ));
        }
        Ok(DegradedBroadcast {
            v1_given_w,
            v2_given_v1,
        })
    }

    /// Both receivers see `W` without noise.
    pub fn noiseless(w_size: usize) -> Result<Self> {
        DegradedBroadcast::new(
            Channel::identity(W, V1, w_size)?,
            Channel::identity(V1, V2, w_size)?,
        )
    }

    /// Binary symmetric `W -> V1` followed by binary symmetric `V1 -> V2`.
    pub fn bsc_pair(p1: f64, p2: f64) -> Result<Self> {
        DegradedBroadcast::new(Channel::bsc(W, V1, p1)?, Channel::bsc(V1, V2, p2)?)
    }

    /// Factorizes a joint kernel `P(V1, V2 | W)`; fails unless
    /// `P(v1, v2 | w) = P(v1 | w) P(v2 | v1)` for a kernel `P(v2 | v1)` not depending on `w`.
    pub fn from_joint(kernel: &Channel) -> Result<Self> {
        let unverifiable = |m: &str| Error::DegradednessUnverifiable(m.to_string());
        let from: Vec<&str> = kernel.from_axes().iter().map(|a| a.name.as_str()).collect();
        let to: Vec<&str> = kernel.to_axes().iter().map(|a| a.name.as_str()).collect();
        if from != [W] || to != [V1, V2] {
            return Err(unverifiable("expected a kernel W -> (V1, V2)"));
        }
        let nw = kernel.rows();
        let (n1, n2) = (kernel.to_axes()[0].size, kernel.to_axes()[1].size);
        let mut k1 = vec![0.0; nw * n1];
        for w in 0..nw {
            for v1 in 0..n1 {
                k1[w * n1 + v1] = kernel.row(w)[v1 * n2..(v1 + 1) * n2].iter().sum();
            }
        }
        // P(v2|v1) from any w with P(v1|w) > 0; must agree across w
        let mut k2: Vec<Option<Vec<f64>>> = vec![None; n1];
        for w in 0..nw {
            for v1 in 0..n1 {
                let m = k1[w * n1 + v1];
                if m <= DEGRADED_TOL {
                    continue;
                }
                let row: Vec<f64> = kernel.row(w)[v1 * n2..(v1 + 1) * n2]
                    .iter()
                    .map(|x| x / m)
                    .collect();
                match &k2[v1] {
                    None => k2[v1] = Some(row),
                    Some(prev) => {
                        if prev
                            .iter()
                            .zip(&row)
                            .any(|(a, b)| (a - b).abs() > DEGRADED_TOL)
                        {
                            return Err(unverifiable("V2 depends on W given V1"));
                        }
                    }
                }
            }
        }
        let mut flat = Vec::with_capacity(n1 * n2);
        for row in k2 {
            match row {
                Some(r) => flat.extend(r),
                None => flat.extend((0..n2).map(|j| if j == 0 { 1.0 } else { 0.0 })),
            }
        }
        DegradedBroadcast::new(
            Channel::new(
                kernel.from_axes().to_vec(),
                vec![kernel.to_axes()[0].clone()],
                super::model::clean(&k1, n1),
            )?,
            Channel::new(
                vec![kernel.to_axes()[0].clone()],
                vec![kernel.to_axes()[1].clone()],
                super::model::clean(&flat, n2),
            )?,
        )
    }

    pub fn v1_given_w(&self) -> &Channel {
        &self.v1_given_w
    }

    pub fn v2_given_v1(&self) -> &Channel {
        &self.v2_given_v1
    }

    pub fn v2_given_w(&self) -> Result<Channel> {
        self.v1_given_w.then(&self.v2_given_v1)
    }

    pub fn w_size(&self) -> usize {
        self.v1_given_w.rows()
    }
}

struct NoisyModel {
    aux: AuxLayout,
    f: HybridMap,
    px: Vec<f64>,
    pxz: Vec<f64>,
    pxzy1: Vec<f64>,
    pxy2: Vec<f64>,
    nz: usize,
    ny1: usize,
    ny2: usize,
    k1: Vec<f64>,
    nv1: usize,
    k2: Vec<f64>,
    nv2: usize,
}

impl ExponentModel for NoisyModel {
    fn layout(&self) -> SimplexLayout {
        self.aux.simplex()
    }

    fn evaluate(&self, p: &[f64]) -> Exponents {
        let a = &self.aux;
        let [k0, k1, _] = a.k;
        let (nx, nz, ny1, nv1, nv2) = (a.nx, self.nz, self.ny1, self.nv1, self.nv2);
        // axes: X, Z1, Y1, U0, U1
        let t1 = Tensor::build(&[nx, nz, ny1, k0, k1], |i| {
            self.pxzy1[(i[0] * nz + i[1]) * ny1 + i[2]]
                * a.u0(p, i[0], i[3])
                * a.u1(p, i[0], i[3], i[4])
        });
        // axes: X, Y2, U0
        let t2 = Tensor::build(&[nx, self.ny2, k0], |i| {
            self.pxy2[i[0] * self.ny2 + i[1]] * a.u0(p, i[0], i[2])
        });
        // axes: X, Z1, U0, U1, V1
        let tc = Tensor::build(&[nx, nz, k0, k1, nv1], |i| {
            let w = self.f.apply(i[2], i[3], i[0]);
            self.pxz[i[0] * nz + i[1]]
                * a.u0(p, i[0], i[2])
                * a.u1(p, i[0], i[2], i[3])
                * self.k1[w * nv1 + i[4]]
        });
        // axes: X, U0, V2
        let td = Tensor::build(&[nx, k0, nv2], |i| {
            let mut s = 0.0;
            for u1 in 0..k1 {
                let w = self.f.apply(i[1], u1, i[0]);
                s += a.u1(p, i[0], i[1], u1) * self.k2[w * nv2 + i[2]];
            }
            self.px[i[0]] * a.u0(p, i[0], i[1]) * s
        });
        Exponents {
            theta1: t1.mi(0b00100, 0b11000, 0b00010),
            theta2: t2.mi(0b010, 0b100, 0),
            constraints: vec![
                tc.mi(0b01000, 0b00001, 0b00100)
                    - tc.mi(0b01000, 0b10010, 0b00100)
                    - FEASIBILITY_TOL,
                td.mi(0b010, 0b001, 0) - td.mi(0b010, 0b100, 0) - FEASIBILITY_TOL,
            ],
        }
    }

    fn starts(&self) -> Vec<Vec<f64>> {
        self.aux.structured_starts()
    }

    fn witness(&self, p: &[f64]) -> Result<AuxiliaryWitness> {
        let mut w = self.aux.witness(p)?;
        w.hybrid = Some(self.f.clone());
        Ok(w)
    }
}

impl NoisyModel {
    fn with_map(&self, f: HybridMap) -> NoisyModel {
        NoisyModel {
            aux: self.aux,
            f,
            px: self.px.clone(),
            pxz: self.pxz.clone(),
            pxzy1: self.pxzy1.clone(),
            pxy2: self.pxy2.clone(),
            nz: self.nz,
            ny1: self.ny1,
            ny2: self.ny2,
            k1: self.k1.clone(),
            nv1: self.nv1,
            k2: self.k2.clone(),
            nv2: self.nv2,
        }
    }
}

const SCREEN_LAMBDAS: [f64; 5] = [0.0, 0.25, 0.5, 0.75, 1.0];

fn screen_options(opts: &SolverOptions) -> SolverOptions {
    SolverOptions {
        restarts: 1,
        max_iters: opts.max_iters.min(12),
        penalties: vec![100.0, 1e4],
        ..opts.clone()
    }
}

/// Cheap per-weight scores of a fixed hybrid map.
fn screen(model: &NoisyModel, opts: &SolverOptions, key: u64) -> Result<Vec<f64>> {
    let layout = model.layout();
    let starts = model.starts();
    SCREEN_LAMBDAS
        .iter()
        .enumerate()
        .map(|(j, &lambda)| {
            let eval = |p: &[f64]| {
                let e = model.evaluate(p);
                Evaluation {
                    objective: lambda * e.theta1 + (1.0 - lambda) * e.theta2,
                    constraints: e.constraints,
                }
            };
            let seed = derive_seed(opts.seed, "noisy-screen", &[key, j as u64]);
            maximize_weighted_exponents(&layout, &eval, opts, seed, &starts).map(|s| s.value)
        })
        .collect()
}

fn structured_maps(sizes: [usize; 3], w: usize) -> Vec<HybridMap> {
    let [k0, k1, nx] = sizes;
    let rules: [&dyn Fn(usize, usize, usize) -> usize; 4] = [
        &|u0, u1, _| (u0 * k1 + u1) % w,
        &|_, _, x| x % w,
        &|u0, _, _| u0 % w,
        &|_, u1, _| u1 % w,
    ];
    rules
        .iter()
        .map(|rule| {
            let mut table = Vec::with_capacity(k0 * k1 * nx);
            for u0 in 0..k0 {
                for u1 in 0..k1 {
                    for x in 0..nx {
                        table.push(rule(u0, u1, x));
                    }
                }
            }
            HybridMap {
                sizes,
                w_size: w,
                table,
            }
        })
        .collect()
}

/// Candidate hybrid maps: all of them when few enough, otherwise structured
/// maps, random maps and single-entry improvements of the best screened map.
fn candidate_maps(base: &NoisyModel, opts: &SolverOptions) -> Result<Vec<(HybridMap, Vec<f64>)>> {
    let sizes = base.f.sizes;
    let w = base.f.w_size;
    let cells = sizes.iter().product::<usize>();
    let count = (w as f64).powi(cells as i32);
    let sopts = screen_options(opts);
    let mut maps: Vec<HybridMap> = Vec::new();
    let exhaustive = count <= opts.exhaustive_function_limit as f64;
    if exhaustive {
        for code in 0..count as u64 {
            let mut c = code;
            let table = (0..cells)
                .map(|_| {
                    let d = (c % w as u64) as usize;
                    c /= w as u64;
                    d
                })
                .collect();
            maps.push(HybridMap {
                sizes,
                w_size: w,
                table,
            });
        }
    } else {
        maps.extend(structured_maps(sizes, w));
        let mut rng = stream(opts.seed, "noisy-maps", &[]);
        for _ in 0..opts.random_functions {
            let table = (0..cells).map(|_| rng.gen_range(0..w)).collect();
            maps.push(HybridMap {
                sizes,
                w_size: w,
                table,
            });
        }
    }
    use rayon::prelude::*;
    let mut scored: Vec<(HybridMap, Vec<f64>)> = maps
        .into_par_iter()
        .enumerate()
        .map(|(i, f)| {
            let s = screen(&base.with_map(f.clone()), &sopts, i as u64)?;
            Ok((f, s))
        })
        .collect::<Result<_>>()?;
    if !exhaustive {
        let total = |s: &[f64]| s.iter().sum::<f64>();
        let mut best = scored
            .iter()
            .max_by(|a, b| total(&a.1).total_cmp(&total(&b.1)))
            .cloned()
            .expect("at least the structured maps are screened");
        let mut key = scored.len() as u64;
        for _pass in 0..2 {
            let mut improved = false;
            for cell in 0..cells {
                for sym in 0..w {
                    if sym == best.0.table[cell] {
                        continue;
                    }
                    let mut f = best.0.clone();
                    f.table[cell] = sym;
                    key += 1;
                    let s = screen(&base.with_map(f.clone()), &sopts, key)?;
                    if total(&s) > total(&best.1) + 1e-9 {
                        best = (f, s);
                        improved = true;
                    }
                }
            }
            if !improved {
                break;
            }
        }
        scored.push(best);
    }
    Ok(scored)
}

/// Frontier of the hybrid-coding inner bound over a degraded broadcast
/// channel from the transmitter (input `W`) to the two receivers.
pub fn noisy_frontier(
    h: &HypothesisPair,
    bc: &DegradedBroadcast,
    opts: &SolverOptions,
) -> Result<RegionFrontier> {
    let start = Instant::now();
    opts.validate()?;
    if h.structure() != Structure::AgainstConditionalIndependence {
        return Err(Error::StructureViolated(
            "the broadcast region needs testing against conditional independence".into(),
        ));
    }
    let h0 = h.h0();
    for a in [X, Y1, Y2, Z1] {
        h0.axis_position(a)?;
    }
    let nx = h0.axis_size(X)?;
    let k0 = cardinality(nx + 4, opts.caps[0], "U0")?;
    let k1 = cardinality(nx * k0 + 2, opts.caps[1], "U1")?;
    let v2w = bc.v2_given_w()?;
    let w = bc.w_size();
    let base = NoisyModel {
        aux: AuxLayout {
            nx,
            k: [k0, k1, 1],
            has_u1: true,
            has_u2: false,
        },
        f: HybridMap {
            sizes: [k0, k1, nx],
            w_size: w,
            table: vec![0; k0 * k1 * nx],
        },
        px: h0.marginalize(&[X])?.mass().to_vec(),
        pxz: h0.permute_subset(&[X, Z1])?.mass().to_vec(),
        pxzy1: h0.permute_subset(&[X, Z1, Y1])?.mass().to_vec(),
        pxy2: h0.permute_subset(&[X, Y2])?.mass().to_vec(),
        nz: h0.axis_size(Z1)?,
        ny1: h0.axis_size(Y1)?,
        ny2: h0.axis_size(Y2)?,
        k1: bc.v1_given_w().kernel().to_vec(),
        nv1: bc.v1_given_w().cols(),
        k2: v2w.kernel().to_vec(),
        nv2: v2w.cols(),
    };
    let scored = candidate_maps(&base, opts)?;
    let mut chosen: Vec<usize> = Vec::new();
    for j in 0..SCREEN_LAMBDAS.len() {
        let mut order: Vec<usize> = (0..scored.len()).collect();
        order.sort_by(|&a, &b| scored[b].1[j].total_cmp(&scored[a].1[j]).then(a.cmp(&b)));
        for &i in order.iter().take(opts.refine_functions.max(1)) {
            if !chosen.contains(&i) {
                chosen.push(i);
            }
        }
    }
    let mut raw: Vec<FrontierPoint> = Vec::new();
    for (n, &i) in chosen.iter().enumerate() {
        let model = base.with_map(scored[i].0.clone());
        let pts = sweep(&model, opts, &format!("noisy-{n}"))?;
        if raw.is_empty() {
            raw = pts;
        } else {
            for (slot, p) in raw.iter_mut().zip(pts) {
                let l = p.lambda;
                if l * p.theta1 + (1.0 - l) * p.theta2
                    > l * slot.theta1 + (1.0 - l) * slot.theta2 + 1e-12
                {
                    *slot = p;
                }
            }
        }
    }
    Ok(RegionFrontier::new(
        raw,
        FrontierMeta {
            kind: RegionKind::Noisy,
            exactness: Exactness::InnerBound,
            restarts: opts.restarts,
            lambda_grid: opts.lambda_grid,
            seed: opts.seed,
            cardinalities: vec![k0, k1],
            runtime_secs: start.elapsed().as_secs_f64(),
        },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prob::JointPmf;

    fn instance() -> HypothesisPair {
        let h0 = JointPmf::bernoulli(X, 0.5)
            .unwrap()
            .extend(&Channel::bsc(X, Z1, 0.2).unwrap())
            .unwrap()
            .extend(&Channel::bsc(X, Y1, 0.1).unwrap())
            .unwrap()
            .extend(&Channel::bsc(X, Y2, 0.1).unwrap())
            .unwrap();
        HypothesisPair::from_null(h0, Structure::AgainstConditionalIndependence).unwrap()
    }

    fn quick() -> SolverOptions {
        SolverOptions {
            restarts: 2,
            lambda_grid: 3,
            caps: [Some(2), Some(2), None],
            refine_functions: 1,
            ..Default::default()
        }
    }

    #[test]
    fn useless_channel_gives_origin() {
        let bc = DegradedBroadcast::bsc_pair(0.5, 0.0).unwrap();
        let f = noisy_frontier(&instance(), &bc, &quick()).unwrap();
        assert_eq!(f.points.len(), 1);
        assert!(f.points[0].theta1 < 1e-9 && f.points[0].theta2 < 1e-9);
    }

    #[test]
    fn joint_kernel_factorization() {
        let bc = DegradedBroadcast::bsc_pair(0.1, 0.2).unwrap();
        let joint = Channel::from_fn(
            vec![Alphabet::new(W, 2).unwrap()],
            vec![Alphabet::new(V1, 2).unwrap(), Alphabet::new(V2, 2).unwrap()],
            |w, v| bc.v1_given_w().row(w[0])[v[0]] * bc.v2_given_v1().row(v[0])[v[1]],
        )
        .unwrap();
        let back = DegradedBroadcast::from_joint(&joint).unwrap();
        assert!(back
            .v2_given_v1()
            .kernel()
            .iter()
            .zip(bc.v2_given_v1().kernel())
            .all(|(a, b)| (a - b).abs() < 1e-12));
        // V2 tracks W directly rather than through V1
        let crossed = Channel::from_fn(
            vec![Alphabet::new(W, 2).unwrap()],
            vec![Alphabet::new(V1, 2).unwrap(), Alphabet::new(V2, 2).unwrap()],
            |w, v| 0.5 * if v[1] == w[0] { 1.0 } else { 0.0 },
        )
        .unwrap();
        assert!(matches!(
            DegradedBroadcast::from_joint(&crossed),
            Err(Error::DegradednessUnverifiable(_))
        ));
    }

    #[test]
    fn clean_channel_has_positive_exponents() {
        let bc = DegradedBroadcast::bsc_pair(0.02, 0.01).unwrap();
        let f = noisy_frontier(&instance(), &bc, &quick()).unwrap();
        assert!(
            f.max_theta1() > 0.05 && f.max_theta2() > 0.05,
            "{:?}",
            f.points
        );
        let w = f.points[0].witness.as_ref().unwrap();
        assert!(w.hybrid.is_some());
    }
}
