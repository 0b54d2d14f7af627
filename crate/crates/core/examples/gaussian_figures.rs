//! Prints the two scalar Gaussian exponent regions as plain columns: the
//! Gray-Wyner corner against the common rate, and the Heegard-Berger
//! boundary at `R = 1` traced over `alpha_tilde`.
//!
//! Usage: `cargo run --example gaussian_figures -- [sigmaz_sq]`

use hypotest::gaussian::{gw_gaussian_corner, hb_gaussian_frontier, GwGaussianParams};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let sigmaz_sq: f64 = std::env::args()
        .nth(1)
        .map(|a| a.parse())
        .transpose()?
        .unwrap_or(0.7);
    println!("# gray-wyner corner, sigma1^2 = 0.2, sigma2^2 = 0.3");
    println!("r0\ttheta1\ttheta2");
    for i in 0..=10 {
        let r0 = 0.2 * i as f64;
        let (t1, t2) = gw_gaussian_corner(&GwGaussianParams {
            sigma1_sq: 0.2,
            sigma2_sq: 0.3,
            r0,
        })?;
        println!("{r0:.1}\t{t1:.5}\t{t2:.5}");
    }
    let (t1, t2) = gw_gaussian_corner(&GwGaussianParams {
        sigma1_sq: 0.2,
        sigma2_sq: 0.3,
        r0: f64::INFINITY,
    })?;
    println!("inf\t{t1:.5}\t{t2:.5}");

    println!("\n# heegard-berger boundary, sigmaz^2 = {sigmaz_sq}, R = 1");
    println!("alpha_tilde\ttheta1\ttheta2");
    for p in hb_gaussian_frontier(sigmaz_sq, 0.2, 0.3, 1.0, 11)? {
        println!("{:.1}\t{:.5}\t{:.5}", p.alpha_tilde, p.theta1, p.theta2);
    }
    Ok(())
}
