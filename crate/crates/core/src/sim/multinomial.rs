//! Multinomial count vectors restricted to boxes, and small binomial helpers.

use std::sync::OnceLock;

use rand::Rng;

const LN_FACT_LEN: usize = 1 << 16;

/// `ln k!` for `k < 65536`.
pub fn ln_factorial(k: usize) -> f64 {
    static TABLE: OnceLock<Vec<f64>> = OnceLock::new();
    let t = TABLE.get_or_init(|| {
        let mut v = Vec::with_capacity(LN_FACT_LEN);
        let mut s = 0.0;
        v.push(0.0);
        for i in 1..LN_FACT_LEN {
            s += (i as f64).ln();
            v.push(s);
        }
        v
    });
    t[k]
}

fn log_add(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let m = a.max(b);
    m + ((a - m).exp() + (b - m).exp()).ln()
}

/// Suffix tables `F_j(r) = ln sum prod_{i >= j} p_i^{c_i} / c_i!` over count
/// vectors of symbols `j..` summing to `r` inside the box.
struct BoxTables {
    f: Vec<Vec<f64>>,
}

fn symbol_weight(c: usize, p: f64) -> f64 {
    if p <= 0.0 {
        if c == 0 {
            0.0
        } else {
            f64::NEG_INFINITY
        }
    } else {
        c as f64 * p.ln() - ln_factorial(c)
    }
}

fn clamp_range(lo: i64, hi: i64, n: usize) -> Option<(usize, usize)> {
    let lo = lo.max(0) as usize;
    let hi = hi.min(n as i64);
    if hi < lo as i64 {
        None
    } else {
        Some((lo, hi as usize))
    }
}

impl BoxTables {
    fn new(n: usize, probs: &[f64], lo: &[i64], hi: &[i64]) -> Option<BoxTables> {
        let m = probs.len();
        let mut f = vec![vec![f64::NEG_INFINITY; n + 1]; m + 1];
        f[m][0] = 0.0;
        for j in (0..m).rev() {
            let (a, b) = clamp_range(lo[j], hi[j], n)?;
            let (next, cur) = {
                let (head, tail) = f.split_at_mut(j + 1);
                (&tail[0], &mut head[j])
            };
            for r in 0..=n {
                let mut acc = f64::NEG_INFINITY;
                for c in a..=b.min(r) {
                    let rest = next[r - c];
                    if rest == f64::NEG_INFINITY {
                        continue;
                    }
                    let w = symbol_weight(c, probs[j]);
                    if w == f64::NEG_INFINITY {
                        continue;
                    }
                    acc = log_add(acc, w + rest);
                }
                cur[r] = acc;
            }
        }
        Some(BoxTables { f })
    }
}

/// `ln P[N in box]` for `N ~ Multinomial(n, probs)`, with `lo[j] <= N_j <= hi[j]`.
pub fn ln_box_prob(n: usize, probs: &[f64], lo: &[i64], hi: &[i64]) -> f64 {
    match BoxTables::new(n, probs, lo, hi) {
        Some(t) => {
            let v = t.f[0][n];
            if v == f64::NEG_INFINITY {
                v
            } else {
                (ln_factorial(n) + v).min(0.0)
            }
        }
        None => f64::NEG_INFINITY,
    }
}

/// Draws `N ~ Multinomial(n, probs)` conditioned on the box; `None` if the box
/// has zero probability.
pub fn sample_box<R: Rng>(
    n: usize,
    probs: &[f64],
    lo: &[i64],
    hi: &[i64],
    rng: &mut R,
) -> Option<Vec<usize>> {
    let t = BoxTables::new(n, probs, lo, hi)?;
    if t.f[0][n] == f64::NEG_INFINITY {
        return None;
    }
    let m = probs.len();
    let mut out = vec![0usize; m];
    let mut r = n;
    for j in 0..m {
        let (a, b) = clamp_range(lo[j], hi[j], n).expect("checked when building tables");
        let total = t.f[j][r];
        let mut u: f64 = rng.gen();
        let mut chosen = None;
        let mut last_ok = None;
        for c in a..=b.min(r) {
            let rest = t.f[j + 1][r - c];
            let w = symbol_weight(c, probs[j]);
            if rest == f64::NEG_INFINITY || w == f64::NEG_INFINITY {
                continue;
            }
            let pr = (w + rest - total).exp();
            last_ok = Some(c);
            if u < pr {
                chosen = Some(c);
                break;
            }
            u -= pr;
        }
        let c = chosen.or(last_ok)?;
        out[j] = c;
        r -= c;
    }
    Some(out)
}

/// `P[sum_b Bernoulli(p_b) >= k]`.
pub fn poisson_binomial_tail(ps: &[f64], k: usize) -> f64 {
    let mut dist = vec![0.0; ps.len() + 1];
    dist[0] = 1.0;
    for (i, &p) in ps.iter().enumerate() {
        for j in (0..=i + 1).rev() {
            let stay = dist[j] * (1.0 - p);
            let up = if j > 0 { dist[j - 1] * p } else { 0.0 };
            dist[j] = stay + up;
        }
    }
    dist[k.min(ps.len() + 1)..]
        .iter()
        .sum::<f64>()
        .clamp(0.0, 1.0)
}

/// Wilson score interval at 95% for `k` successes in `n` trials.
pub fn wilson(k: u64, n: u64) -> (f64, f64) {
    if n == 0 {
        return (0.0, 1.0);
    }
    let z = 1.959_963_984_540_054;
    let nf = n as f64;
    let p = k as f64 / nf;
    let den = 1.0 + z * z / nf;
    let centre = (p + z * z / (2.0 * nf)) / den;
    let half = z * (p * (1.0 - p) / nf + z * z / (4.0 * nf * nf)).sqrt() / den;
    // the endpoints are exact at the boundary counts; rounding would not be
    let lo = if k == 0 {
        0.0
    } else {
        (centre - half).max(0.0)
    };
    let hi = if k == n {
        1.0
    } else {
        (centre + half).min(1.0)
    };
    (lo, hi)
}
