//! Exact Neyman-Pearson type-II error for i.i.d. Bernoulli laws, next to the
//! divergence it approaches. Convergence is slow: the second-order term
//! keeps the finite-n exponent well below D up to the enumeration limit
//! `n = 40`.
//!
//! Usage: `cargo run --release --example stein_oracle -- [p] [q] [epsilon]`

use hypotest::oracle::exact_np_beta;
use hypotest::prob::axes::X;
use hypotest::prob::{kl_divergence, JointPmf};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<f64> = std::env::args()
        .skip(1)
        .map(|a| a.parse())
        .collect::<Result<_, _>>()?;
    let p = JointPmf::bernoulli(X, args.first().copied().unwrap_or(0.5))?;
    let q = JointPmf::bernoulli(X, args.get(1).copied().unwrap_or(0.25))?;
    let eps = args.get(2).copied().unwrap_or(0.1);
    let d = kl_divergence(&p, &q)?;
    println!("D(P||Q) = {d:.5} bits");
    println!("n\tbeta\t\t-(1/n) log2 beta");
    for n in [1, 2, 5, 10, 20, 30, 40] {
        let beta = exact_np_beta(&p, &q, n, eps)?;
        println!("{n}\t{beta:.4e}\t{:.5}", -beta.log2() / n as f64);
    }
    Ok(())
}
