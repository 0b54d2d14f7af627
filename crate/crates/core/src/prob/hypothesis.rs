use serde::{Deserialize, Serialize};

use super::axes::{X, Y1, Y2, Z1};
use super::pmf::JointPmf;
use crate::error::{Error, Result};

/// Tolerance used when checking that `h1` factorizes as declared.
pub const STRUCTURE_TOL: f64 = 1e-10;

/// How the alternative hypothesis is built from the null.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Structure {
    /// `H1 = P_X · P_{rest}`.
    AgainstIndependence,
    /// `H1 = P_{XZ1} · P_{Y1|Z1} · P_{Y2}`.
    AgainstConditionalIndependence,
}

/// Null and alternative joint laws over the same axes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PairRepr", into = "PairRepr")]
pub struct HypothesisPair {
    h0: JointPmf,
    h1: JointPmf,
    structure: Structure,
}

/// Wire form; a missing `h1` is derived from `h0`.
#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PairRepr {
    structure: Structure,
    h0: JointPmf,
    #[serde(default)]
    h1: Option<JointPmf>,
}

impl TryFrom<PairRepr> for HypothesisPair {
    type Error = Error;

    fn try_from(r: PairRepr) -> Result<Self> {
        match r.h1 {
            Some(h1) => HypothesisPair::new(r.h0, h1, r.structure),
            None => HypothesisPair::from_null(r.h0, r.structure),
        }
    }
}

impl From<HypothesisPair> for PairRepr {
    fn from(h: HypothesisPair) -> Self {
        PairRepr {
            structure: h.structure,
            h0: h.h0,
            h1: Some(h.h1),
        }
    }
}

impl HypothesisPair {
    /// Checks that `h1` equals the law built from `h0` for `structure`.
    pub fn new(h0: JointPmf, h1: JointPmf, structure: Structure) -> Result<Self> {
        let expected = alternative_hypothesis(&h0, structure)?;
        let diff = expected
            .max_abs_diff(&h1)
            .map_err(|_| Error::StructureViolated("h0 and h1 axes differ".into()))?;
        if diff > STRUCTURE_TOL {
            return Err(Error::StructureViolated(format!(
                "h1 deviates from the {structure:?} factorization by {diff:e}"
            )));
        }
        let h1 = h1.permute(&h0.axis_names())?;
        Ok(HypothesisPair { h0, h1, structure })
    }

    /// Derives `h1` from `h0`.
    pub fn from_null(h0: JointPmf, structure: Structure) -> Result<Self> {
        let h1 = alternative_hypothesis(&h0, structure)?;
        Ok(HypothesisPair { h0, h1, structure })
    }

    pub fn h0(&self) -> &JointPmf {
        &self.h0
    }

    pub fn h1(&self) -> &JointPmf {
        &self.h1
    }

    pub fn structure(&self) -> Structure {
        self.structure
    }

    pub fn law(&self, hypothesis: u8) -> &JointPmf {
        if hypothesis == 0 {
            &self.h0
        } else {
            &self.h1
        }
    }
}

/// Builds the alternative-hypothesis law from the null's (conditional) marginals.
///
/// Against independence, every axis other than `X` is kept jointly and made
/// independent of `X`. Against conditional independence, the axes must be
/// `X`, `Z1`, `Y1` and optionally `Y2`.
pub fn alternative_hypothesis(h0: &JointPmf, structure: Structure) -> Result<JointPmf> {
    let names = h0.axis_names();
    if !h0.has_axis(X) {
        return Err(Error::UnknownAxis(X.into()));
    }
    let built = match structure {
        Structure::AgainstIndependence => {
            let rest: Vec<&str> = names.iter().copied().filter(|n| *n != X).collect();
            if rest.is_empty() {
                return Err(Error::StructureViolated(
                    "testing against independence needs an axis besides X".into(),
                ));
            }
            let px = h0.marginalize(&[X])?;
            let prest = h0.permute_subset(&rest)?;
            px.product(&prest)?
        }
        Structure::AgainstConditionalIndependence => {
            for need in [Z1, Y1] {
                if !h0.has_axis(need) {
                    return Err(Error::UnknownAxis(need.into()));
                }
            }
            if let Some(extra) = names.iter().find(|n| ![X, Z1, Y1, Y2].contains(n)) {
                return Err(Error::StructureViolated(format!(
                    "unexpected axis `{extra}` for conditional independence"
                )));
            }
            let pxz = h0.permute_subset(&[X, Z1])?;
            let y1_given_z = h0.conditional(&[Y1], &[Z1])?;
            let mut joint = pxz.extend(&y1_given_z)?;
            if h0.has_axis(Y2) {
                joint = joint.product(&h0.marginalize(&[Y2])?)?;
            }
            joint
        }
    };
    built.permute(&names)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prob::{mutual_information, Alphabet, Channel};

    fn dsbs(p: f64) -> JointPmf {
        JointPmf::single(X, &[0.5, 0.5])
            .unwrap()
            .extend(&Channel::bsc(X, Y1, p).unwrap())
            .unwrap()
    }

    #[test]
    fn product_is_fixed_point() {
        let px = JointPmf::single(X, &[0.3, 0.7]).unwrap();
        let py = JointPmf::from_weights(
            vec![Alphabet::new(Y1, 2).unwrap(), Alphabet::new(Y2, 2).unwrap()],
            vec![1.0, 2.0, 3.0, 4.0],
        )
        .unwrap();
        let h0 = px.product(&py).unwrap();
        let h1 = alternative_hypothesis(&h0, Structure::AgainstIndependence).unwrap();
        assert!(h0.max_abs_diff(&h1).unwrap() < 1e-15);
    }

    #[test]
    fn independence_removes_dependence() {
        let h1 = alternative_hypothesis(&dsbs(0.1), Structure::AgainstIndependence).unwrap();
        assert!(mutual_information(&h1, &[X], &[Y1], &[]).unwrap() < 1e-15);
    }

    #[test]
    fn chain_is_already_conditionally_independent() {
        let h0 = JointPmf::single(X, &[0.4, 0.6])
            .unwrap()
            .extend(&Channel::bsc(X, Z1, 0.2).unwrap())
            .unwrap()
            .extend(&Channel::bsc(Z1, Y1, 0.1).unwrap())
            .unwrap();
        let h1 = alternative_hypothesis(&h0, Structure::AgainstConditionalIndependence).unwrap();
        assert!(h0.max_abs_diff(&h1).unwrap() < 1e-12);
        assert!(
            HypothesisPair::new(h0.clone(), h1, Structure::AgainstConditionalIndependence).is_ok()
        );
    }

    #[test]
    fn missing_axis_is_reported() {
        assert!(matches!(
            alternative_hypothesis(&dsbs(0.1), Structure::AgainstConditionalIndependence),
            Err(Error::UnknownAxis(a)) if a == Z1
        ));
    }

    #[test]
    fn mismatched_h1_is_rejected() {
        let h0 = dsbs(0.1);
        let err = HypothesisPair::new(h0.clone(), h0, Structure::AgainstIndependence);
        assert!(matches!(err, Err(Error::StructureViolated(_))));
    }
}
