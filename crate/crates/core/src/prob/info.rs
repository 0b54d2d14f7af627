//! Entropy, mutual information and divergence, all in bits.

use super::pmf::JointPmf;
use crate::error::{Error, Result};

fn plogp_sum(masses: &[f64]) -> f64 {
    masses
        .iter()
        .filter(|&&m| m > 0.0)
        .map(|&m| -m * m.log2())
        .sum()
}

fn disjoint(sets: &[&[&str]]) -> Result<()> {
    for (i, a) in sets.iter().enumerate() {
        for b in &sets[i + 1..] {
            if let Some(n) = a.iter().find(|n| b.contains(n)) {
                return Err(Error::OverlappingAxes(n.to_string()));
            }
        }
    }
    Ok(())
}

/// Joint entropy of the axes in `set`; zero for the empty set.
fn joint_entropy(p: &JointPmf, set: &[&str]) -> Result<f64> {
    if set.is_empty() {
        return Ok(0.0);
    }
    let pos = p.positions(set)?;
    Ok(plogp_sum(&p.marginal_mass(&pos)))
}

/// `H(targets | given)` in bits.
pub fn entropy(p: &JointPmf, targets: &[&str], given: &[&str]) -> Result<f64> {
    disjoint(&[targets, given])?;
    let mut all: Vec<&str> = targets.to_vec();
    all.extend_from_slice(given);
    let h = joint_entropy(p, &all)? - joint_entropy(p, given)?;
    Ok(h.max(0.0))
}

/// `I(a; b | given)` in bits, clamped at zero against rounding.
pub fn mutual_information(p: &JointPmf, a: &[&str], b: &[&str], given: &[&str]) -> Result<f64> {
    disjoint(&[a, b, given])?;
    // I = H(a,g) + H(b,g) - H(a,b,g) - H(g)
    let mut ag: Vec<&str> = a.to_vec();
    ag.extend_from_slice(given);
    let mut bg: Vec<&str> = b.to_vec();
    bg.extend_from_slice(given);
    let mut abg: Vec<&str> = a.to_vec();
    abg.extend_from_slice(b);
    abg.extend_from_slice(given);
    let i = joint_entropy(p, &ag)? + joint_entropy(p, &bg)?
        - joint_entropy(p, &abg)?
        - joint_entropy(p, given)?;
    Ok(i.max(0.0))
}

/// `D(p || q)` in bits. Both pmfs must share the same axes (order may differ).
pub fn kl_divergence(p: &JointPmf, q: &JointPmf) -> Result<f64> {
    let names = p.axis_names();
    if q.axes().len() != names.len() {
        return Err(Error::AxisMismatch);
    }
    let q = q.permute(&names).map_err(|_| Error::AxisMismatch)?;
    if q.axes() != p.axes() {
        return Err(Error::AxisMismatch);
    }
    let mut d = 0.0;
    for (cell, (&pm, &qm)) in p.mass().iter().zip(q.mass()).enumerate() {
        if pm > 0.0 {
            if qm <= 0.0 {
                return Err(Error::AbsoluteContinuityViolated { cell });
            }
            d += pm * (pm / qm).log2();
        }
    }
    Ok(d.max(0.0))
}

/// Binary entropy function in bits.
pub fn binary_entropy(p: f64) -> f64 {
    plogp_sum(&[p, 1.0 - p])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prob::{Alphabet, Channel};

    fn bsc_joint(p: f64) -> JointPmf {
        JointPmf::single("X", &[0.5, 0.5])
            .unwrap()
            .extend(&Channel::bsc("X", "Y", p).unwrap())
            .unwrap()
    }

    #[test]
    fn entropy_examples() {
        let u = JointPmf::single("X", &[0.5, 0.5]).unwrap();
        assert!((entropy(&u, &["X"], &[]).unwrap() - 1.0).abs() < 1e-15);
        let d = JointPmf::single("X", &[0.0, 1.0, 0.0]).unwrap();
        assert_eq!(entropy(&d, &["X"], &[]).unwrap(), 0.0);
        // h_b(0.11) = -0.11 log2 0.11 - 0.89 log2 0.89
        let hb = -0.11 * 0.11f64.log2() - 0.89 * 0.89f64.log2();
        let h = entropy(&bsc_joint(0.11), &["Y"], &["X"]).unwrap();
        assert!((h - hb).abs() < 1e-12);
        assert!((h - 0.49992).abs() < 1e-5);
    }

    #[test]
    fn entropy_axis_errors() {
        let p = bsc_joint(0.1);
        assert!(matches!(
            entropy(&p, &["Q"], &[]),
            Err(Error::UnknownAxis(_))
        ));
        assert!(matches!(
            entropy(&p, &["X"], &["X"]),
            Err(Error::OverlappingAxes(_))
        ));
        assert!(matches!(
            mutual_information(&p, &["X"], &["Y"], &["Y"]),
            Err(Error::OverlappingAxes(_))
        ));
    }

    #[test]
    fn mutual_information_examples() {
        let ind = JointPmf::uniform(vec![
            Alphabet::new("X", 2).unwrap(),
            Alphabet::new("Y", 2).unwrap(),
        ])
        .unwrap();
        assert_eq!(mutual_information(&ind, &["X"], &["Y"], &[]).unwrap(), 0.0);
        let same = bsc_joint(0.0);
        assert!((mutual_information(&same, &["X"], &["Y"], &[]).unwrap() - 1.0).abs() < 1e-15);
        let expected = 1.0 - (-0.11 * 0.11f64.log2() - 0.89 * 0.89f64.log2());
        let i = mutual_information(&bsc_joint(0.11), &["X"], &["Y"], &[]).unwrap();
        assert!((i - expected).abs() < 1e-12);
        assert!((i - 0.50008).abs() < 1e-5);
    }

    #[test]
    fn kl_examples() {
        let p = JointPmf::bernoulli("X", 0.5).unwrap();
        let q = JointPmf::bernoulli("X", 0.25).unwrap();
        assert_eq!(kl_divergence(&p, &p).unwrap(), 0.0);
        let direct = 0.5 * (0.5f64 / 0.25).log2() + 0.5 * (0.5f64 / 0.75).log2();
        let d = kl_divergence(&p, &q).unwrap();
        assert!((d - direct).abs() < 1e-15);
        assert!((d - 0.20752).abs() < 1e-5);
        let one = JointPmf::bernoulli("X", 1.0).unwrap();
        assert!((kl_divergence(&one, &p).unwrap() - 1.0).abs() < 1e-15);
        assert!(matches!(
            kl_divergence(&p, &one),
            Err(Error::AbsoluteContinuityViolated { cell: 0 })
        ));
        let other = JointPmf::bernoulli("Y", 0.5).unwrap();
        assert!(matches!(
            kl_divergence(&p, &other),
            Err(Error::AxisMismatch)
        ));
    }
}
