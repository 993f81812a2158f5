//! Integration of atomic functions against vector and scalar measures, and
//! gauge integration on real intervals.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measures::{scalarize, MSet, ScalarMeasure, VectorMeasure};
use crate::spaces::DualCandidateSet;

mod builtin;
pub mod gauss;
pub mod hk;

pub use builtin::Integrand;
pub use hk::{hk_integrate, hk_integrate_detailed, Gauge, HkOptions, HkResult, TaggedPartition, TaggedPiece};

/// A function on the atoms, `f(t_i)` per atom. On an atomic model every
/// measurable function is the simple function `Σ f_i χ_{t_i}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct MFunc {
    values: Vec<f64>,
}

impl TryFrom<Vec<f64>> for MFunc {
    type Error = Error;

    fn try_from(values: Vec<f64>) -> Result<Self> {
        MFunc::new(values)
    }
}

impl From<MFunc> for Vec<f64> {
    fn from(f: MFunc) -> Self {
        f.values
    }
}

impl MFunc {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Validation(format!("function value {i} is not finite")));
        }
        Ok(MFunc { values })
    }

    pub fn zero(atoms: usize) -> Self {
        MFunc {
            values: vec![0.0; atoms],
        }
    }

    /// `χ_A`.
    pub fn indicator(a: MSet, atoms: usize) -> Self {
        MFunc {
            values: (0..atoms).map(|i| if a.contains(i) { 1.0 } else { 0.0 }).collect(),
        }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn scale(&self, c: f64) -> MFunc {
        MFunc {
            values: self.values.iter().map(|v| c * v).collect(),
        }
    }

    pub fn add(&self, other: &MFunc) -> Result<MFunc> {
        self.check_len(other.len())?;
        Ok(MFunc {
            values: self.values.iter().zip(&other.values).map(|(a, b)| a + b).collect(),
        })
    }

    pub fn abs(&self) -> MFunc {
        MFunc {
            values: self.values.iter().map(|v| v.abs()).collect(),
        }
    }

    /// `χ_A f`.
    pub fn restrict(&self, a: MSet) -> MFunc {
        MFunc {
            values: self
                .values
                .iter()
                .enumerate()
                .map(|(i, v)| if a.contains(i) { *v } else { 0.0 })
                .collect(),
        }
    }

    /// `f ∧ c`, the pointwise minimum.
    pub fn min_with(&self, c: f64) -> MFunc {
        MFunc {
            values: self.values.iter().map(|v| v.min(c)).collect(),
        }
    }

    pub(crate) fn check_len(&self, atoms: usize) -> Result<()> {
        if self.values.len() != atoms {
            return Err(Error::DimensionMismatch {
                expected: atoms,
                got: self.values.len(),
            });
        }
        Ok(())
    }
}

/// `Σ_{i∈A} f_i v_i`, the integral of a simple function over `A`.
pub fn kl_integral_simple(f: &MFunc, mu: &VectorMeasure, a: MSet) -> Result<Vec<f64>> {
    f.check_len(mu.len())?;
    mu.check_set(a)?;
    let mut out = vec![0.0; mu.space().dim];
    for i in a.iter() {
        for (o, x) in out.iter_mut().zip(mu.value(i)) {
            *o += f.values[i] * x;
        }
    }
    Ok(out)
}

/// `Σ_{i∈A} f_i |ν_i|`, the integral over `A` against the variation `|ν|`;
/// `|f_i|` replaces `f_i` when `use_modulus` is set.
pub fn lebesgue_atomic(f: &MFunc, nu: &ScalarMeasure, a: MSet, use_modulus: bool) -> Result<f64> {
    f.check_len(nu.atom_values.len())?;
    Ok(a.iter()
        .map(|i| {
            let v = if use_modulus { f.values[i].abs() } else { f.values[i] };
            v * nu.atom_values[i].abs()
        })
        .sum())
}

/// `sup_A |Σ_{i∈A} f_i |ν_i||`: the larger of the positive terms' sum and
/// the negative terms' sum in modulus.
pub fn alexiewicz_scalar(f: &MFunc, nu: &ScalarMeasure) -> Result<f64> {
    f.check_len(nu.atom_values.len())?;
    let (mut pos, mut neg) = (0.0, 0.0);
    for (v, w) in f.values.iter().zip(&nu.atom_values) {
        let t = v * w.abs();
        if t > 0.0 {
            pos += t;
        } else {
            neg -= t;
        }
    }
    Ok(f64::max(pos, neg))
}

/// Maximum over `cands` of [`alexiewicz_scalar`] for `x'μ`.
pub fn alexiewicz_norm(f: &MFunc, mu: &VectorMeasure, cands: &DualCandidateSet) -> Result<f64> {
    f.check_len(mu.len())?;
    let mut best = 0.0f64;
    for x in cands.members() {
        best = best.max(alexiewicz_scalar(f, &scalarize(mu, x)?)?);
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spaces::{DualVector, NormTag, SpaceDesc};

    fn units() -> VectorMeasure {
        let s = SpaceDesc::new(2, NormTag::LInf).unwrap();
        VectorMeasure::from_values(s, vec![vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap()
    }

    fn nu(values: Vec<f64>) -> ScalarMeasure {
        let s = SpaceDesc::new(1, NormTag::L2).unwrap();
        ScalarMeasure {
            atom_values: values,
            functional: DualVector::new(vec![1.0], s).unwrap(),
        }
    }

    #[test]
    fn kl_integral_examples() {
        let mu = units();
        let f = MFunc::new(vec![2.0, -3.0]).unwrap();
        assert_eq!(kl_integral_simple(&f, &mu, mu.full()).unwrap(), vec![2.0, -3.0]);
        assert_eq!(kl_integral_simple(&f, &mu, MSet::singleton(0)).unwrap(), vec![2.0, 0.0]);
        assert_eq!(kl_integral_simple(&f, &mu, MSet::EMPTY).unwrap(), vec![0.0, 0.0]);
        let short = MFunc::new(vec![1.0]).unwrap();
        assert!(kl_integral_simple(&short, &mu, mu.full()).is_err());
    }

    #[test]
    fn restriction_matches_integration_over_the_set() {
        let mu = units();
        let f = MFunc::new(vec![0.5, -1.25]).unwrap();
        for a in MSet::all_subsets(2) {
            assert_eq!(
                kl_integral_simple(&f.restrict(a), &mu, mu.full()).unwrap(),
                kl_integral_simple(&f, &mu, a).unwrap()
            );
        }
    }

    #[test]
    fn lebesgue_examples() {
        let f = MFunc::new(vec![2.0, -3.0]).unwrap();
        let t = MSet::full(2);
        assert_eq!(lebesgue_atomic(&f, &nu(vec![1.0, 1.0]), t, false).unwrap(), -1.0);
        assert_eq!(lebesgue_atomic(&f, &nu(vec![1.0, -1.0]), t, false).unwrap(), -1.0);
        assert_eq!(lebesgue_atomic(&f, &nu(vec![1.0, 1.0]), t, true).unwrap(), 5.0);
    }

    #[test]
    fn alexiewicz_closed_form_matches_subset_scan() {
        let s = SpaceDesc::new(1, NormTag::L2).unwrap();
        let mu = VectorMeasure::from_values(s, vec![vec![0.25]; 4]).unwrap();
        let d = DualCandidateSet::explicit(s, vec![vec![1.0]], None).unwrap();
        let f = MFunc::new(vec![1.0, -1.0, 1.0, -1.0]).unwrap();
        assert_eq!(alexiewicz_norm(&f, &mu, &d).unwrap(), 0.5);
        let scan = MSet::all_subsets(4)
            .into_iter()
            .map(|a| a.iter().map(|i| f.values()[i] * 0.25).sum::<f64>().abs())
            .fold(0.0, f64::max);
        assert_eq!(scan, 0.5);

        let g = MFunc::new(vec![1.0, 2.0, 0.5, 0.0]).unwrap();
        assert_eq!(alexiewicz_norm(&g, &mu, &d).unwrap(), 0.875);
        assert_eq!(alexiewicz_norm(&MFunc::zero(4), &mu, &d).unwrap(), 0.0);
    }

    #[test]
    fn serde_rejects_non_finite() {
        let f: MFunc = serde_json::from_str("[1.0, -2.5]").unwrap();
        assert_eq!(f.values(), &[1.0, -2.5]);
        assert_eq!(serde_json::to_string(&f).unwrap(), "[1.0,-2.5]");
        assert!(MFunc::new(vec![f64::INFINITY]).is_err());
    }
}
