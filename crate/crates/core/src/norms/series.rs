//! Weighted power means of nonnegative sequences.

use super::PExponent;
use crate::error::{Error, Result};
use crate::weights::check_normalized;

/// `(Σ η_k a_k^p)^(1/p)` for `a_k ≥ 0`, scaled by the maximum to keep large
/// `p` from overflowing; the maximum itself for `p = ∞`.
pub fn weighted_power_mean(a: &[f64], eta: &[f64], p: PExponent) -> f64 {
    let top = a.iter().fold(0.0f64, |m, x| m.max(*x));
    match p {
        PExponent::Infinity => top,
        PExponent::Finite(_) if top == 0.0 => 0.0,
        PExponent::Finite(p) => {
            let s: f64 = a.iter().zip(eta).map(|(x, w)| w * (x / top).powf(p)).sum();
            top * s.powf(1.0 / p)
        }
    }
}

/// Returns `(lhs, rhs) = ((Σ η_k a_k^p)^(1/p), sup_k a_k)`; `lhs ≤ rhs`
/// whenever `Σ η_k = 1`.
pub fn weighted_power_bound(a: &[f64], eta: &[f64], p: PExponent) -> Result<(f64, f64)> {
    check_sequence(a, eta)?;
    let rhs = a.iter().fold(0.0f64, |m, x| m.max(*x));
    Ok((weighted_power_mean(a, eta, p), rhs))
}

/// Weighted Minkowski inequality for one index: returns `(lhs, rhs)` with
/// `lhs = (Σ η_k |b_k + c_k|^p)^(1/p)` and `rhs` the sum of the two
/// separate means.
pub fn weighted_minkowski(b: &[f64], c: &[f64], eta: &[f64], p: PExponent) -> Result<(f64, f64)> {
    if b.len() != c.len() {
        return Err(Error::DimensionMismatch {
            expected: b.len(),
            got: c.len(),
        });
    }
    let sum: Vec<f64> = b.iter().zip(c).map(|(x, y)| (x + y).abs()).collect();
    let bm: Vec<f64> = b.iter().map(|x| x.abs()).collect();
    let cm: Vec<f64> = c.iter().map(|x| x.abs()).collect();
    check_sequence(&sum, eta)?;
    Ok((
        weighted_power_mean(&sum, eta, p),
        weighted_power_mean(&bm, eta, p) + weighted_power_mean(&cm, eta, p),
    ))
}

/// Double-indexed version over weights `η_k ω_h`: `b[h][k]`, `c[h][k]`.
pub fn weighted_minkowski2(
    b: &[Vec<f64>],
    c: &[Vec<f64>],
    eta: &[f64],
    omega: &[f64],
    p: PExponent,
) -> Result<(f64, f64)> {
    check_normalized(eta, "η")?;
    check_normalized(omega, "ω")?;
    if b.len() != omega.len() || c.len() != omega.len() {
        return Err(Error::DimensionMismatch {
            expected: omega.len(),
            got: b.len().min(c.len()),
        });
    }
    let mut weights = Vec::new();
    let (mut fb, mut fc) = (Vec::new(), Vec::new());
    for (h, w) in omega.iter().enumerate() {
        if b[h].len() != eta.len() || c[h].len() != eta.len() {
            return Err(Error::DimensionMismatch {
                expected: eta.len(),
                got: b[h].len().min(c[h].len()),
            });
        }
        for (k, e) in eta.iter().enumerate() {
            weights.push(w * e);
            fb.push(b[h][k]);
            fc.push(c[h][k]);
        }
    }
    let sum: Vec<f64> = fb.iter().zip(&fc).map(|(x, y)| (x + y).abs()).collect();
    let fb: Vec<f64> = fb.iter().map(|x| x.abs()).collect();
    let fc: Vec<f64> = fc.iter().map(|x| x.abs()).collect();
    Ok((
        weighted_power_mean(&sum, &weights, p),
        weighted_power_mean(&fb, &weights, p) + weighted_power_mean(&fc, &weights, p),
    ))
}

fn check_sequence(a: &[f64], eta: &[f64]) -> Result<()> {
    check_normalized(eta, "η")?;
    if a.len() != eta.len() {
        return Err(Error::DimensionMismatch {
            expected: eta.len(),
            got: a.len(),
        });
    }
    if let Some(x) = a.iter().find(|x| !(x.is_finite() && **x >= 0.0)) {
        return Err(Error::Validation(format!(
            "sequence entries must be finite and nonnegative, got {x}"
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    const P1: PExponent = PExponent::Finite(1.0);
    const P2: PExponent = PExponent::Finite(2.0);

    #[test]
    fn power_bound_examples() {
        let eta: Vec<f64> = [8.0, 4.0, 2.0, 1.0].iter().map(|x| x / 15.0).collect();
        let (l, r) = weighted_power_bound(&[1.0; 4], &eta, P2).unwrap();
        assert!((l - 1.0).abs() < 1e-15 && r == 1.0);
        assert_eq!(weighted_power_bound(&[0.0; 4], &eta, P1).unwrap(), (0.0, 0.0));

        let eta: Vec<f64> = [4.0, 2.0, 1.0].iter().map(|x| x / 7.0).collect();
        let (l, r) = weighted_power_bound(&[1.0, 2.0, 4.0], &eta, P1).unwrap();
        assert!((l - 12.0 / 7.0).abs() < 1e-15);
        assert_eq!(r, 4.0);
    }

    #[test]
    fn rejects_unnormalized_weights() {
        assert!(weighted_power_bound(&[1.0, 1.0], &[0.5, 0.4], P1).is_err());
        assert!(weighted_power_bound(&[1.0], &[0.5, 0.5], P1).is_err());
        assert!(weighted_power_bound(&[-1.0, 1.0], &[0.5, 0.5], P1).is_err());
    }

    #[test]
    fn large_exponents_do_not_overflow() {
        let (l, r) = weighted_power_bound(&[1e10, 2e10], &[0.5, 0.5], PExponent::Finite(400.0)).unwrap();
        assert!(l.is_finite() && l <= r && l > 1.99e10);
    }

    #[test]
    fn minkowski_examples() {
        let (l, r) = weighted_minkowski(&[1.0, -1.0], &[1.0, 1.0], &[0.5, 0.5], P1).unwrap();
        assert_eq!((l, r), (1.0, 2.0));
        let b = vec![vec![1.0, 2.0], vec![0.0, -3.0]];
        let c = vec![vec![-1.0, 0.5], vec![2.0, 3.0]];
        let (l, r) = weighted_minkowski2(&b, &c, &[0.75, 0.25], &[0.5, 0.5], P2).unwrap();
        assert!(l <= r);
    }
}
