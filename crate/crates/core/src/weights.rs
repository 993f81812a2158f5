//! Positive weight sequences summing to one.

use crate::error::{Error, Result};

/// Slack used when checking that a weight sequence sums to one.
pub const WEIGHT_SUM_SLACK: f64 = 1e-12;

/// Longest sequence for which the ratio-½ weights `2^-k` stay normal doubles.
pub const HALVING_LIMIT: usize = 1000;

/// Geometric weights `2^-k / (1 - 2^-K)` for `k = 1..=K`.
///
/// For `K` above [`HALVING_LIMIT`] the ratio `2^(-HALVING_LIMIT/K)` replaces
/// `1/2`, so the smallest weight is still about `2^-1000` instead of
/// underflowing to zero.
pub fn geometric_weights(count: usize) -> Result<Vec<f64>> {
    if count == 0 {
        return Err(Error::Empty("weight sequence"));
    }
    if count <= HALVING_LIMIT {
        let norm = 1.0 - 0.5f64.powi(count as i32);
        return Ok((1..=count as i32).map(|k| 0.5f64.powi(k) / norm).collect());
    }
    let log_ratio = -(HALVING_LIMIT as f64) / count as f64 * std::f64::consts::LN_2;
    let raw: Vec<f64> = (1..=count).map(|k| (log_ratio * k as f64).exp()).collect();
    let total: f64 = raw.iter().sum();
    Ok(raw.into_iter().map(|w| w / total).collect())
}

/// Checks positivity and unit sum within [`WEIGHT_SUM_SLACK`].
pub fn check_normalized(weights: &[f64], what: &str) -> Result<()> {
    if weights.is_empty() {
        return Err(Error::Validation(format!("{what}: no weights")));
    }
    if let Some((i, w)) = weights
        .iter()
        .enumerate()
        .find(|(_, w)| !(w.is_finite() && **w > 0.0))
    {
        return Err(Error::Validation(format!(
            "{what}: weight {i} = {w} is not strictly positive"
        )));
    }
    let sum: f64 = weights.iter().sum();
    if (sum - 1.0).abs() > WEIGHT_SUM_SLACK {
        return Err(Error::Validation(format!(
            "{what}: weights sum to {sum}, expected 1"
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn four_geometric_weights_are_fifteenths() {
        let w = geometric_weights(4).unwrap();
        let expected = [8.0 / 15.0, 4.0 / 15.0, 2.0 / 15.0, 1.0 / 15.0];
        for (a, b) in w.iter().zip(expected) {
            assert!((a - b).abs() < 1e-15);
        }
        check_normalized(&w, "test").unwrap();
    }

    #[test]
    fn singleton_is_one() {
        assert_eq!(geometric_weights(1).unwrap(), vec![1.0]);
    }

    #[test]
    fn large_counts_stay_positive_and_normalized() {
        for n in [HALVING_LIMIT, HALVING_LIMIT + 1, 1 << 16] {
            let w = geometric_weights(n).unwrap();
            assert_eq!(w.len(), n);
            check_normalized(&w, "large").unwrap();
            assert!(w.windows(2).all(|p| p[1] < p[0]));
        }
        assert!(geometric_weights(0).is_err());
    }

    #[test]
    fn rejects_bad_sums() {
        assert!(check_normalized(&[0.5, 0.4], "w").is_err());
        assert!(check_normalized(&[1.5, -0.5], "w").is_err());
    }
}
