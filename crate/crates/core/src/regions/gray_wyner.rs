use std::time::Instant;

use super::frontier::{Exactness, FrontierMeta, RegionFrontier, RegionKind};
use super::model::{cardinality, sweep, AuxLayout, ExponentModel, Exponents};
use super::solver::{SimplexLayout, SolverOptions};
use super::tensor::Tensor;
use super::{RatePoint, FEASIBILITY_TOL};
use crate::error::{Error, Result};
use crate::prob::axes::{X, Y1, Y2};
use crate::prob::{HypothesisPair, Structure};
use crate::regions::AuxiliaryWitness;

struct GwModel {
    aux: AuxLayout,
    pxy1: Vec<f64>,
    ny1: usize,
    pxy2: Vec<f64>,
    ny2: usize,
    rates: RatePoint,
}

impl ExponentModel for GwModel {
    fn layout(&self) -> SimplexLayout {
        self.aux.simplex()
    }

    fn evaluate(&self, p: &[f64]) -> Exponents {
        let a = &self.aux;
        let [k0, k1, k2] = a.k;
        // axes: X, Y, U0, Ui
        let t1 = Tensor::build(&[a.nx, self.ny1, k0, k1], |i| {
            self.pxy1[i[0] * self.ny1 + i[1]] * a.u0(p, i[0], i[2]) * a.u1(p, i[0], i[2], i[3])
        });
        let t2 = Tensor::build(&[a.nx, self.ny2, k0, k2], |i| {
            self.pxy2[i[0] * self.ny2 + i[1]] * a.u0(p, i[0], i[2]) * a.u2(p, i[0], i[2], i[3])
        });
        Exponents {
            theta1: t1.mi(0b0010, 0b1100, 0),
            theta2: t2.mi(0b0010, 0b1100, 0),
            constraints: vec![
                t1.mi(0b0100, 0b0001, 0) - self.rates.r0 - FEASIBILITY_TOL,
                t1.mi(0b1000, 0b0001, 0b0100) - self.rates.r1 - FEASIBILITY_TOL,
                t2.mi(0b1000, 0b0001, 0b0100) - self.rates.r2 - FEASIBILITY_TOL,
            ],
        }
    }

    fn starts(&self) -> Vec<Vec<f64>> {
        self.aux.structured_starts()
    }

    fn witness(&self, p: &[f64]) -> Result<AuxiliaryWitness> {
        self.aux.witness(p)
    }
}

/// Pareto frontier of the exponent region of the three-link network in
/// which Receiver 1 observes `Y1` and Receiver 2 observes `Y2`.
///
/// The alternative hypothesis must make `X` independent of `(Y1, Y2)`.
/// Only the pairwise laws of `(X, Y1)` and `(X, Y2)` under the null are used.
pub fn gw_frontier(
    h: &HypothesisPair,
    rates: RatePoint,
    opts: &SolverOptions,
) -> Result<RegionFrontier> {
    let start = Instant::now();
    rates.validate()?;
    opts.validate()?;
    if h.structure() != Structure::AgainstIndependence {
        return Err(Error::StructureViolated(
            "the three-link region needs testing against independence".into(),
        ));
    }
    let h0 = h.h0();
    let pxy1 = h0.permute_subset(&[X, Y1])?;
    let pxy2 = h0.permute_subset(&[X, Y2])?;
    let nx = h0.axis_size(X)?;
    let k0 = cardinality(nx + 4, opts.caps[0], "U0")?;
    let k1 = cardinality(nx * k0 + 1, opts.caps[1], "U1")?;
    let k2 = cardinality(nx * k0 + 1, opts.caps[2], "U2")?;
    let model = GwModel {
        aux: AuxLayout {
            nx,
            k: [k0, k1, k2],
            has_u1: true,
            has_u2: true,
        },
        ny1: pxy1.axes()[1].size,
        ny2: pxy2.axes()[1].size,
        pxy1: pxy1.mass().to_vec(),
        pxy2: pxy2.mass().to_vec(),
        rates,
    };
    let raw = sweep(&model, opts, "gw")?;
    Ok(RegionFrontier::new(
        raw,
        FrontierMeta {
            kind: RegionKind::GrayWyner,
            exactness: Exactness::Exact,
            restarts: opts.restarts,
            lambda_grid: opts.lambda_grid,
            seed: opts.seed,
            cardinalities: vec![k0, k1, k2],
            runtime_secs: start.elapsed().as_secs_f64(),
        },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prob::{binary_entropy, Channel, JointPmf};

    fn instance(p1: f64, p2: f64) -> HypothesisPair {
        let h0 = JointPmf::bernoulli(X, 0.5)
            .unwrap()
            .extend(&Channel::bsc(X, Y1, p1).unwrap())
            .unwrap()
            .extend(&Channel::bsc(X, Y2, p2).unwrap())
            .unwrap();
        HypothesisPair::from_null(h0, Structure::AgainstIndependence).unwrap()
    }

    fn quick() -> SolverOptions {
        SolverOptions {
            restarts: 4,
            lambda_grid: 5,
            caps: [Some(2), Some(2), Some(2)],
            ..Default::default()
        }
    }

    #[test]
    fn zero_rates_give_origin() {
        let f = gw_frontier(&instance(0.1, 0.2), RatePoint::default(), &quick()).unwrap();
        assert_eq!(f.points.len(), 1);
        assert!(f.points[0].theta1.abs() < 1e-9 && f.points[0].theta2.abs() < 1e-9);
    }

    #[test]
    fn noiseless_common_link_reaches_unit_corner() {
        let f = gw_frontier(
            &instance(0.0, 0.0),
            RatePoint::new(1.0, 0.0, 0.0).unwrap(),
            &quick(),
        )
        .unwrap();
        assert_eq!(f.points.len(), 1);
        assert!((f.points[0].theta1 - 1.0).abs() < 1e-6, "{:?}", f.points);
        assert!((f.points[0].theta2 - 1.0).abs() < 1e-6);
    }

    #[test]
    fn full_rate_corner_matches_closed_form() {
        let f = gw_frontier(
            &instance(0.1, 0.2),
            RatePoint::new(1.0, 0.0, 0.0).unwrap(),
            &quick(),
        )
        .unwrap();
        let (c1, c2) = (1.0 - binary_entropy(0.1), 1.0 - binary_entropy(0.2));
        assert!((f.max_theta1() - c1).abs() < 1e-6);
        assert!((f.max_theta2() - c2).abs() < 1e-6);
        assert!((c1 - 0.53100).abs() < 1e-5 && (c2 - 0.27807).abs() < 1e-5);
    }

    #[test]
    fn wrong_structure_rejected() {
        let h0 = instance(0.1, 0.2).h0().clone();
        let h = HypothesisPair::from_null(
            h0.extend(&Channel::bsc(X, "Z1", 0.1).unwrap()).unwrap(),
            Structure::AgainstConditionalIndependence,
        )
        .unwrap();
        assert!(matches!(
            gw_frontier(&h, RatePoint::default(), &quick()),
            Err(Error::StructureViolated(_))
        ));
    }
}
