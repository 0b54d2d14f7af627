//! Closed-form exponent regions for the two scalar Gaussian examples.
//!
//! Both regions are evaluated in bits. The Gray-Wyner region (common rate
//! only) is a rectangle; the Heegard-Berger region with side information is
//! traced by a single parameter `alpha_tilde in [-r, 0]`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GwGaussianParams {
    pub sigma1_sq: f64,
    pub sigma2_sq: f64,
    pub r0: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HbGaussianParams {
    pub sigmaz_sq: f64,
    pub sigma1_sq: f64,
    pub sigma2_sq: f64,
    pub r: f64,
    pub alpha_tilde: f64,
}

fn check_variance(name: &str, v: f64) -> Result<()> {
    if !(v > 0.0) || !v.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "{name} must be positive, got {v}"
        )));
    }
    Ok(())
}

fn check_rate(name: &str, r: f64) -> Result<()> {
    if !(r >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "{name} must be nonnegative, got {r}"
        )));
    }
    Ok(())
}

impl GwGaussianParams {
    pub fn validate(&self) -> Result<()> {
        check_variance("sigma1_sq", self.sigma1_sq)?;
        check_variance("sigma2_sq", self.sigma2_sq)?;
        check_rate("r0", self.r0)
    }
}

/// Corner `(theta1_max, theta2_max)` of the Gray-Wyner Gaussian rectangle.
/// `r0 = f64::INFINITY` gives the unlimited-rate corner.
pub fn gw_gaussian_corner(p: &GwGaussianParams) -> Result<(f64, f64)> {
    p.validate()?;
    let shrink = (-2.0 * p.r0).exp2();
    let corner = |s: f64| 0.5 * ((1.0 + s) / (shrink + s)).log2();
    Ok((corner(p.sigma1_sq), corner(p.sigma2_sq)))
}

/// One boundary point of the Heegard-Berger Gaussian region.
pub fn hb_gaussian_point(p: &HbGaussianParams) -> Result<(f64, f64)> {
    check_variance("sigmaz_sq", p.sigmaz_sq)?;
    check_variance("sigma1_sq", p.sigma1_sq)?;
    check_variance("sigma2_sq", p.sigma2_sq)?;
    check_rate("r", p.r)?;
    if !(p.alpha_tilde <= 0.0 && p.alpha_tilde >= -p.r) {
        return Err(Error::AlphaOutOfRange {
            alpha: p.alpha_tilde,
            rate: p.r,
        });
    }
    let (sz, s1, s2) = (p.sigmaz_sq, p.sigma1_sq, p.sigma2_sq);
    let a = p.alpha_tilde;
    let side = s1 * (1.0 + sz);
    let theta1 = 0.5 * ((sz + side) / ((2.0 * a).exp2() * sz + side)).log2();
    let theta2 = 0.5 * ((1.0 + sz + s2) / ((-2.0 * (a + p.r)).exp2() * (1.0 + sz) + s2)).log2();
    Ok((theta1.max(0.0), theta2.max(0.0)))
}

/// A point on the alpha-parametrized boundary.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HbCurvePoint {
    pub alpha_tilde: f64,
    pub theta1: f64,
    pub theta2: f64,
}

/// Boundary on a uniform `alpha_tilde` grid over `[-r, 0]`, ordered by
/// increasing `theta1` (i.e. from `alpha_tilde = 0` down to `-r`).
pub fn hb_gaussian_frontier(
    sigmaz_sq: f64,
    sigma1_sq: f64,
    sigma2_sq: f64,
    r: f64,
    grid_size: usize,
) -> Result<Vec<HbCurvePoint>> {
    if grid_size < 2 {
        return Err(Error::InvalidParameter(
            "grid_size must be at least 2".into(),
        ));
    }
    (0..grid_size)
        .map(|i| {
            // endpoints are pinned exactly
            let alpha_tilde = if i == 0 {
                0.0
            } else if i == grid_size - 1 {
                -r
            } else {
                -r * i as f64 / (grid_size - 1) as f64
            };
            let (theta1, theta2) = hb_gaussian_point(&HbGaussianParams {
                sigmaz_sq,
                sigma1_sq,
                sigma2_sq,
                r,
                alpha_tilde,
            })?;
            Ok(HbCurvePoint {
                alpha_tilde,
                theta1,
                theta2,
            })
        })
        .collect()
}
