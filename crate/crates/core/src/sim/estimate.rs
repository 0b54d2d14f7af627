//! Conditional type-II probabilities given everything except the tested sequence.

use rand::Rng;

use super::scheme::Categorical;

/// One group of i.i.d. positions: `count` symbols drawn from `law`, each
/// contributing `values[y]` to the statistic.
pub(crate) struct Group<'a> {
    pub count: usize,
    pub values: &'a [f64],
    pub law: &'a [f64],
}

fn ln_mgf(g: &Group, s: f64) -> f64 {
    let mut m = f64::NEG_INFINITY;
    for (&v, &q) in g.values.iter().zip(g.law) {
        if q > 0.0 && v.is_finite() {
            m = m.max(s * v);
        }
    }
    if m == f64::NEG_INFINITY {
        return m;
    }
    let sum: f64 = g
        .values
        .iter()
        .zip(g.law)
        .filter(|(v, &q)| q > 0.0 && v.is_finite())
        .map(|(&v, &q)| q * (s * v - m).exp())
        .sum();
    m + sum.ln()
}

fn tilted(g: &Group, s: f64) -> Vec<f64> {
    let lm = ln_mgf(g, s);
    g.values
        .iter()
        .zip(g.law)
        .map(|(&v, &q)| {
            if q > 0.0 && v.is_finite() {
                q * (s * v - lm).exp()
            } else if s == 0.0 {
                q
            } else {
                0.0
            }
        })
        .collect()
}

fn tilted_mean(groups: &[Group], s: f64) -> f64 {
    groups
        .iter()
        .map(|g| {
            let t = tilted(g, s);
            let mean: f64 = t
                .iter()
                .zip(g.values)
                .filter(|(&p, _)| p > 0.0)
                .map(|(&p, &v)| p * v)
                .sum();
            g.count as f64 * mean
        })
        .sum()
}

/// `P[sum of per-position values >= threshold]` by exponential tilting.
///
/// The tilt is chosen so the tilted mean sits at the threshold; the returned
/// average of `1{S >= t} dP/dQ` is unbiased for the tail. Degenerate tails
/// (threshold above the maximum or below the minimum) are returned exactly.
pub(crate) fn tail_probability<R: Rng>(
    groups: &[Group],
    threshold: f64,
    samples: usize,
    rng: &mut R,
) -> f64 {
    let support = |g: &Group, pick: fn(f64, f64) -> f64, init: f64| {
        g.values
            .iter()
            .zip(g.law)
            .filter(|(_, &q)| q > 0.0)
            .fold(init, |a, (&v, _)| pick(a, v))
    };
    let groups: Vec<&Group> = groups.iter().filter(|g| g.count > 0).collect();
    let max: f64 = groups
        .iter()
        .map(|g| g.count as f64 * support(g, f64::max, f64::NEG_INFINITY))
        .sum();
    let min: f64 = groups
        .iter()
        .map(|g| g.count as f64 * support(g, f64::min, f64::INFINITY))
        .sum();
    if groups.is_empty() {
        return if 0.0 >= threshold { 1.0 } else { 0.0 };
    }
    if max < threshold {
        return 0.0;
    }
    if min >= threshold {
        return 1.0;
    }
    let owned: Vec<Group> = groups
        .iter()
        .map(|g| Group {
            count: g.count,
            values: g.values,
            law: g.law,
        })
        .collect();
    let s = if tilted_mean(&owned, 0.0) >= threshold {
        0.0
    } else {
        let mut hi = 1.0;
        while tilted_mean(&owned, hi) < threshold && hi < 1e4 {
            hi *= 2.0;
        }
        let mut lo = 0.0;
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            if tilted_mean(&owned, mid) < threshold {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        hi
    };
    let laws: Vec<Categorical> = owned
        .iter()
        .map(|g| Categorical::new(&tilted(g, s)))
        .collect();
    let ln_norm: f64 = owned.iter().map(|g| g.count as f64 * ln_mgf(g, s)).sum();
    let mut acc = 0.0;
    for _ in 0..samples {
        let mut total = 0.0;
        for (g, law) in owned.iter().zip(&laws) {
            for _ in 0..g.count {
                total += g.values[law.sample(rng) as usize];
            }
        }
        if total >= threshold {
            acc += if s == 0.0 {
                1.0
            } else {
                (ln_norm - s * total).exp()
            };
        }
    }
    (acc / samples as f64).min(1.0)
}
