use std::time::Instant;

use super::frontier::{AuxiliaryWitness, Exactness, FrontierMeta, RegionFrontier, RegionKind};
use super::less_noisy::less_noisy_check;
use super::model::{cardinality, sweep, AuxLayout, ExponentModel, Exponents};
use super::solver::{SimplexLayout, SolverOptions};
use super::tensor::Tensor;
use super::{RatePoint, FEASIBILITY_TOL};
use crate::error::{Error, Result};
use crate::prob::axes::{X, Y1, Y2, Z1};
use crate::prob::{HypothesisPair, JointPmf, Structure};

/// Shared evaluator: Receiver 1 decodes with side information `Z1`.
/// With `general` set, a private auxiliary `U2` reaches Receiver 2 and the
/// three rates bound the three auxiliaries separately; otherwise the single
/// rate `r0` bounds `I(U0;X) + I(U1;X|U0,Z1)`.
struct SideInfoModel {
    aux: AuxLayout,
    general: bool,
    pxzy1: Vec<f64>,
    nz: usize,
    ny1: usize,
    pxy2: Vec<f64>,
    ny2: usize,
    rates: RatePoint,
}

impl ExponentModel for SideInfoModel {
    fn layout(&self) -> SimplexLayout {
        self.aux.simplex()
    }

    fn evaluate(&self, p: &[f64]) -> Exponents {
        let a = &self.aux;
        let [k0, k1, k2] = a.k;
        let (nz, ny1) = (self.nz, self.ny1);
        // axes: X, Z1, Y1, U0, U1
        let t1 = Tensor::build(&[a.nx, nz, ny1, k0, k1], |i| {
            self.pxzy1[(i[0] * nz + i[1]) * ny1 + i[2]]
                * a.u0(p, i[0], i[3])
                * a.u1(p, i[0], i[3], i[4])
        });
        let theta1 = t1.mi(0b00100, 0b11000, 0b00010);
        let i0 = t1.mi(0b01000, 0b00001, 0);
        let i1 = t1.mi(0b10000, 0b00001, 0b01010);
        if self.general {
            // axes: X, Y2, U0, U2
            let t2 = Tensor::build(&[a.nx, self.ny2, k0, k2], |i| {
                self.pxy2[i[0] * self.ny2 + i[1]] * a.u0(p, i[0], i[2]) * a.u2(p, i[0], i[2], i[3])
            });
            Exponents {
                theta1,
                theta2: t2.mi(0b0010, 0b1100, 0),
                constraints: vec![
                    i0 - self.rates.r0 - FEASIBILITY_TOL,
                    i1 - self.rates.r1 - FEASIBILITY_TOL,
                    t2.mi(0b1000, 0b0001, 0b0100) - self.rates.r2 - FEASIBILITY_TOL,
                ],
            }
        } else {
            // axes: X, Y2, U0
            let t2 = Tensor::build(&[a.nx, self.ny2, k0], |i| {
                self.pxy2[i[0] * self.ny2 + i[1]] * a.u0(p, i[0], i[2])
            });
            Exponents {
                theta1,
                theta2: t2.mi(0b010, 0b100, 0),
                constraints: vec![i0 + i1 - self.rates.r0 - FEASIBILITY_TOL],
            }
        }
    }

    fn starts(&self) -> Vec<Vec<f64>> {
        self.aux.structured_starts()
    }

    fn witness(&self, p: &[f64]) -> Result<AuxiliaryWitness> {
        self.aux.witness(p)
    }
}

fn check_side_info(h: &HypothesisPair) -> Result<()> {
    if h.structure() != Structure::AgainstConditionalIndependence {
        return Err(Error::StructureViolated(
            "side-information regions need testing against conditional independence".into(),
        ));
    }
    for a in [X, Y1, Y2, Z1] {
        h.h0().axis_position(a)?;
    }
    Ok(())
}

fn side_info_model(
    h0: &JointPmf,
    k: [usize; 3],
    general: bool,
    rates: RatePoint,
) -> Result<SideInfoModel> {
    let pxzy1 = h0.permute_subset(&[X, Z1, Y1])?;
    let pxy2 = h0.permute_subset(&[X, Y2])?;
    Ok(SideInfoModel {
        aux: AuxLayout {
            nx: h0.axis_size(X)?,
            k,
            has_u1: true,
            has_u2: general,
        },
        general,
        nz: h0.axis_size(Z1)?,
        ny1: h0.axis_size(Y1)?,
        ny2: h0.axis_size(Y2)?,
        pxzy1: pxzy1.mass().to_vec(),
        pxy2: pxy2.mass().to_vec(),
        rates,
    })
}

/// Frontier of the binning inner bound for one common link of rate `r.r0`,
/// Receiver 1 holding side information `Z1`.
///
/// Labeled exact when `Z1` is numerically found less noisy than `Y2`
/// (or when that check is disabled, inner bound).
pub fn hb_frontier(
    h: &HypothesisPair,
    r: RatePoint,
    opts: &SolverOptions,
) -> Result<RegionFrontier> {
    let start = Instant::now();
    r.validate()?;
    opts.validate()?;
    check_side_info(h)?;
    let nx = h.h0().axis_size(X)?;
    let k0 = cardinality(nx + 2, opts.caps[0], "U0")?;
    let k1 = cardinality(nx * k0 + 1, opts.caps[1], "U1")?;
    let model = side_info_model(h.h0(), [k0, k1, 1], false, r)?;
    let raw = sweep(&model, opts, "hb")?;
    let exactness = if opts.check_less_noisy && less_noisy_check(h.h0(), opts)?.holds {
        Exactness::Exact
    } else {
        Exactness::InnerBound
    };
    Ok(RegionFrontier::new(
        raw,
        FrontierMeta {
            kind: RegionKind::HeegardBerger,
            exactness,
            restarts: opts.restarts,
            lambda_grid: opts.lambda_grid,
            seed: opts.seed,
            cardinalities: vec![k0, k1],
            runtime_secs: start.elapsed().as_secs_f64(),
        },
    ))
}

/// Inner bound for the side-information network with an additional private
/// link of rate `r1` to Receiver 1 and `r2` to Receiver 2.
pub fn general_frontier(
    h: &HypothesisPair,
    rates: RatePoint,
    opts: &SolverOptions,
) -> Result<RegionFrontier> {
    let start = Instant::now();
    rates.validate()?;
    opts.validate()?;
    check_side_info(h)?;
    let nx = h.h0().axis_size(X)?;
    let k0 = cardinality(nx + 4, opts.caps[0], "U0")?;
    let k1 = cardinality(nx * k0 + 2, opts.caps[1], "U1")?;
    let k2 = cardinality(nx * k0 + 2, opts.caps[2], "U2")?;
    let model = side_info_model(h.h0(), [k0, k1, k2], true, rates)?;
    let raw = sweep(&model, opts, "general")?;
    Ok(RegionFrontier::new(
        raw,
        FrontierMeta {
            kind: RegionKind::General,
            exactness: Exactness::InnerBound,
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
    use crate::prob::{mutual_information, Channel};

    pub(crate) fn chain(pz: f64, py1: f64, py2: f64) -> HypothesisPair {
        let h0 = JointPmf::bernoulli(X, 0.5)
            .unwrap()
            .extend(&Channel::bsc(X, Z1, pz).unwrap())
            .unwrap()
            .extend(&Channel::bsc(X, Y1, py1).unwrap())
            .unwrap()
            .extend(&Channel::bsc(Z1, Y2, py2).unwrap())
            .unwrap();
        HypothesisPair::from_null(h0, Structure::AgainstConditionalIndependence).unwrap()
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
    fn zero_rate_gives_origin() {
        let f = hb_frontier(&chain(0.1, 0.1, 0.1), RatePoint::default(), &quick()).unwrap();
        assert_eq!(f.points.len(), 1);
        assert!(f.points[0].theta1 < 1e-9 && f.points[0].theta2 < 1e-9);
    }

    #[test]
    fn perfect_side_information_leaves_only_theta2() {
        let f = hb_frontier(
            &chain(0.0, 0.1, 0.1),
            RatePoint::single(1.0).unwrap(),
            &quick(),
        )
        .unwrap();
        assert!(f.max_theta1() < 1e-9);
        assert!(f.max_theta2() > 0.1);
        assert_eq!(f.meta.exactness, Exactness::Exact);
    }

    #[test]
    fn general_corner_at_full_rates() {
        let h = chain(0.2, 0.1, 0.1);
        let f = general_frontier(&h, RatePoint::new(1.0, 1.0, 1.0).unwrap(), &quick()).unwrap();
        let c1 = mutual_information(h.h0(), &[X], &[Y1], &[Z1]).unwrap();
        let c2 = mutual_information(h.h0(), &[X], &[Y2], &[]).unwrap();
        assert_eq!(f.points.len(), 1, "{:?}", f.points);
        assert!((f.points[0].theta1 - c1).abs() < 1e-6);
        assert!((f.points[0].theta2 - c2).abs() < 1e-6);
    }
}
