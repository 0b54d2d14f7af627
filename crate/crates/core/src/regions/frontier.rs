use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::prob::{Channel, JointPmf};

/// A deterministic map `f(u0, u1, x) -> w`, stored with `x` fastest.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HybridMap {
    pub sizes: [usize; 3],
    pub w_size: usize,
    pub table: Vec<usize>,
}

impl HybridMap {
    pub fn apply(&self, u0: usize, u1: usize, x: usize) -> usize {
        self.table[(u0 * self.sizes[1] + u1) * self.sizes[2] + x]
    }
}

/// Auxiliary test channels achieving a frontier point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuxiliaryWitness {
    /// `P(U0 | X)`.
    pub u0: Channel,
    /// `P(U1 | X, U0)`.
    pub u1: Option<Channel>,
    /// `P(U2 | X, U0)`.
    pub u2: Option<Channel>,
    pub hybrid: Option<HybridMap>,
}

impl AuxiliaryWitness {
    /// Joint law of `base` (which must contain `X`) and the auxiliaries.
    pub fn joint_with(&self, base: &JointPmf) -> Result<JointPmf> {
        let mut j = base.extend(&self.u0)?;
        if let Some(c) = &self.u1 {
            j = j.extend(c)?;
        }
        if let Some(c) = &self.u2 {
            j = j.extend(c)?;
        }
        Ok(j)
    }

    pub fn cardinalities(&self) -> Vec<usize> {
        let mut v = vec![self.u0.cols()];
        if let Some(c) = &self.u1 {
            v.push(c.cols());
        }
        if let Some(c) = &self.u2 {
            v.push(c.cols());
        }
        v
    }
}

/// Which characterization a frontier computes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RegionKind {
    GrayWyner,
    HeegardBerger,
    General,
    Noisy,
}

/// Whether the computed region is the exact optimal region or an inner bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Exactness {
    Exact,
    InnerBound,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrontierPoint {
    pub lambda: f64,
    pub theta1: f64,
    pub theta2: f64,
    /// Rate-constraint slacks (nonnegative when feasible).
    pub slacks: Vec<f64>,
    pub witness: Option<AuxiliaryWitness>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrontierMeta {
    pub kind: RegionKind,
    pub exactness: Exactness,
    pub restarts: usize,
    pub lambda_grid: usize,
    pub seed: u64,
    pub cardinalities: Vec<usize>,
    pub runtime_secs: f64,
}

/// Upper-concave frontier of an exponent region.
///
/// `points` are sorted by strictly increasing `theta1` and strictly
/// decreasing `theta2`; `raw` keeps the per-weight maximizers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionFrontier {
    pub points: Vec<FrontierPoint>,
    pub raw: Vec<FrontierPoint>,
    pub meta: FrontierMeta,
}

impl RegionFrontier {
    pub fn new(raw: Vec<FrontierPoint>, meta: FrontierMeta) -> Self {
        let points = upper_concave_envelope(&raw);
        RegionFrontier { points, raw, meta }
    }

    pub fn support(&self, lambda: f64) -> f64 {
        support(&self.points, lambda)
    }

    pub fn max_theta1(&self) -> f64 {
        self.points.iter().map(|p| p.theta1).fold(0.0, f64::max)
    }

    pub fn max_theta2(&self) -> f64 {
        self.points.iter().map(|p| p.theta2).fold(0.0, f64::max)
    }
}

const TIE: f64 = 1e-9;

/// Vertices of the upper-concave envelope of the down-closure of `pts`.
pub fn upper_concave_envelope(pts: &[FrontierPoint]) -> Vec<FrontierPoint> {
    let mut v: Vec<FrontierPoint> = pts.to_vec();
    v.sort_by(|a, b| {
        a.theta1
            .total_cmp(&b.theta1)
            .then(b.theta2.total_cmp(&a.theta2))
    });
    // Pareto filter: scanning by decreasing theta1, keep strict theta2 records.
    let mut pareto: Vec<FrontierPoint> = Vec::new();
    for p in v.into_iter().rev() {
        match pareto.last() {
            Some(last) if p.theta2 <= last.theta2 + TIE => {}
            _ => pareto.push(p),
        }
    }
    pareto.reverse();
    // drop near-duplicates in theta1 (keep larger theta2, which is earlier)
    let mut dedup: Vec<FrontierPoint> = Vec::new();
    for p in pareto {
        match dedup.last() {
            Some(last) if p.theta1 <= last.theta1 + TIE => {}
            _ => dedup.push(p),
        }
    }
    let mut hull: Vec<FrontierPoint> = Vec::new();
    for p in dedup {
        while hull.len() >= 2 {
            let a = &hull[hull.len() - 2];
            let b = &hull[hull.len() - 1];
            let cross = (b.theta1 - a.theta1) * (p.theta2 - a.theta2)
                - (b.theta2 - a.theta2) * (p.theta1 - a.theta1);
            if cross >= -TIE {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(p);
    }
    hull
}

/// Support function `max_p lambda*theta1 + (1-lambda)*theta2` (zero for no points).
pub fn support(points: &[FrontierPoint], lambda: f64) -> f64 {
    points
        .iter()
        .map(|p| lambda * p.theta1 + (1.0 - lambda) * p.theta2)
        .fold(0.0, f64::max)
}

/// Hausdorff distance between the down-closed convex hulls of two point sets,
/// evaluated through their support functions on the unit quarter-circle.
pub fn hausdorff_distance(a: &[FrontierPoint], b: &[FrontierPoint]) -> f64 {
    let h = |pts: &[FrontierPoint], c: f64, s: f64| {
        pts.iter()
            .map(|p| c * p.theta1 + s * p.theta2)
            .fold(0.0, f64::max)
    };
    let steps = 2048;
    (0..=steps)
        .map(|k| {
            let t = std::f64::consts::FRAC_PI_2 * k as f64 / steps as f64;
            let (s, c) = t.sin_cos();
            (h(a, c, s) - h(b, c, s)).abs()
        })
        .fold(0.0, f64::max)
}
