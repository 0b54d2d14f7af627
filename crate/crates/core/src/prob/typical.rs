use super::pmf::JointPmf;
use crate::error::{Error, Result};

/// Robust typicality: `|#{i : s_i = a}/n - P(a)| <= mu * P(a)` for every
/// joint symbol `a`. `seqs` holds one sequence per axis of `p`, in axis order.
pub fn is_typical(seqs: &[&[usize]], p: &JointPmf, mu: f64) -> Result<bool> {
    if !(mu > 0.0) {
        return Err(Error::InvalidSlack(mu));
    }
    if seqs.len() != p.axes().len() {
        return Err(Error::LengthMismatch(seqs.len(), p.axes().len()));
    }
    let n = seqs[0].len();
    if let Some(s) = seqs.iter().find(|s| s.len() != n) {
        return Err(Error::LengthMismatch(n, s.len()));
    }
    if n == 0 {
        return Err(Error::InvalidParameter("empty sequence".into()));
    }
    let strides = p.strides();
    let mut counts = vec![0usize; p.len()];
    for i in 0..n {
        let mut flat = 0;
        for (a, s) in seqs.iter().enumerate() {
            let size = p.axes()[a].size;
            if s[i] >= size {
                return Err(Error::SymbolOutOfRange {
                    axis: p.axes()[a].name.clone(),
                    symbol: s[i],
                    size,
                });
            }
            flat += s[i] * strides[a];
        }
        counts[flat] += 1;
    }
    Ok(counts.iter().zip(p.mass()).all(|(&c, &pm)| {
        let freq = c as f64 / n as f64;
        (freq - pm).abs() <= mu * pm + 1e-12
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prob::{Alphabet, Channel};

    #[test]
    fn bernoulli_examples() {
        let p = JointPmf::bernoulli("X", 0.5).unwrap();
        assert!(is_typical(&[&[0, 0, 1, 1]], &p, 0.1).unwrap());
        assert!(!is_typical(&[&[0, 0, 0, 1]], &p, 0.1).unwrap());
    }

    #[test]
    fn exact_joint_type_is_typical_for_any_mu() {
        let p = JointPmf::single("X", &[0.5, 0.5])
            .unwrap()
            .extend(&Channel::bsc("X", "Y", 0.25).unwrap())
            .unwrap();
        let x = [0, 0, 0, 0, 1, 1, 1, 1];
        let y = [0, 0, 0, 1, 1, 1, 1, 0];
        for mu in [1e-9, 0.01, 0.5] {
            assert!(is_typical(&[&x, &y], &p, mu).unwrap());
        }
    }

    #[test]
    fn errors() {
        let p = JointPmf::uniform(vec![
            Alphabet::new("X", 2).unwrap(),
            Alphabet::new("Y", 2).unwrap(),
        ])
        .unwrap();
        assert!(matches!(
            is_typical(&[&[0, 1], &[0]], &p, 0.1),
            Err(Error::LengthMismatch(2, 1))
        ));
        assert!(matches!(
            is_typical(&[&[0, 1]], &p, 0.1),
            Err(Error::LengthMismatch(1, 2))
        ));
        assert!(matches!(
            is_typical(&[&[0, 2], &[0, 0]], &p, 0.1),
            Err(Error::SymbolOutOfRange { .. })
        ));
        assert!(matches!(
            is_typical(&[&[0, 1], &[0, 0]], &p, 0.0),
            Err(Error::InvalidSlack(_))
        ));
    }
}
