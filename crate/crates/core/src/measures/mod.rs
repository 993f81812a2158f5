//! Finite atomic vector measures on the power set of their atoms.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spaces::{norm_unchecked, pairing, DualVector, SpaceDesc};

pub mod family;
mod semivariation;
pub mod set;

pub use family::{build_family, check_mu_dense, check_mu_dense_sampled, DenseFamily, DensityCheck, FamilyKind};
pub use semivariation::{
    semivariation, semivariation_over, semivariation_with, Semivariation, SemivariationMethod,
    SemivariationOptions, EXACT_ATOM_BUDGET,
};
pub use set::{MSet, MAX_ATOMS};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub id: String,
    pub value: Vec<f64>,
}

impl Atom {
    pub fn new(id: impl Into<String>, value: Vec<f64>) -> Self {
        Atom {
            id: id.into(),
            value,
        }
    }
}

/// A measure with values in `space`, carried by finitely many atoms. The
/// measure of a set is the sum of its atoms' values.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VectorMeasure {
    space: SpaceDesc,
    atoms: Vec<Atom>,
}

impl VectorMeasure {
    pub fn new(space: SpaceDesc, atoms: Vec<Atom>) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::Empty("atom list"));
        }
        if atoms.len() > MAX_ATOMS {
            return Err(Error::Validation(format!(
                "{} atoms exceed the limit of {MAX_ATOMS}",
                atoms.len()
            )));
        }
        let mut seen = HashSet::new();
        for (i, a) in atoms.iter().enumerate() {
            if !seen.insert(a.id.as_str()) {
                return Err(Error::Validation(format!("duplicate atom id `{}`", a.id)));
            }
            space.check_len(&a.value).map_err(|_| {
                Error::Validation(format!(
                    "atom {i} (`{}`) has {} coordinates, space has dimension {}",
                    a.id,
                    a.value.len(),
                    space.dim
                ))
            })?;
            if a.value.iter().any(|x| !x.is_finite()) {
                return Err(Error::Validation(format!("atom `{}` has a non-finite value", a.id)));
            }
        }
        Ok(VectorMeasure { space, atoms })
    }

    /// Convenience constructor with ids `a1, a2, ...`.
    pub fn from_values(space: SpaceDesc, values: Vec<Vec<f64>>) -> Result<Self> {
        let atoms = values
            .into_iter()
            .enumerate()
            .map(|(i, v)| Atom::new(format!("a{}", i + 1), v))
            .collect();
        Self::new(space, atoms)
    }

    pub fn space(&self) -> SpaceDesc {
        self.space
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn value(&self, i: usize) -> &[f64] {
        &self.atoms[i].value
    }

    /// The whole space `T`.
    pub fn full(&self) -> MSet {
        MSet::full(self.len())
    }

    pub fn check_set(&self, a: MSet) -> Result<()> {
        MSet::from_bits(a.bits(), self.len()).map(|_| ())
    }

    /// `μ(A)`.
    pub fn measure_of(&self, a: MSet) -> Result<Vec<f64>> {
        self.check_set(a)?;
        let mut out = vec![0.0; self.space.dim];
        for i in a.iter() {
            for (o, x) in out.iter_mut().zip(&self.atoms[i].value) {
                *o += x;
            }
        }
        Ok(out)
    }

    /// `Σ_{i∈A} ‖v_i‖`, the variation of `μ` on `A`.
    pub fn variation_bound(&self, a: MSet) -> f64 {
        a.iter()
            .filter(|&i| i < self.len())
            .map(|i| norm_unchecked(&self.atoms[i].value, self.space.norm))
            .sum()
    }

    /// Atoms whose value is not the zero vector.
    pub fn support(&self) -> MSet {
        let idx = (0..self.len()).filter(|&i| self.atoms[i].value.iter().any(|x| *x != 0.0));
        MSet::from_indices(idx, self.len()).expect("indices in range")
    }
}

/// The scalar measure `x'μ`, stored by its atom values `<x', v_i>`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScalarMeasure {
    pub atom_values: Vec<f64>,
    pub functional: DualVector,
}

impl ScalarMeasure {
    pub fn measure_of(&self, a: MSet) -> f64 {
        a.iter().map(|i| self.atom_values[i]).sum()
    }
}

pub fn scalarize(mu: &VectorMeasure, x: &DualVector) -> Result<ScalarMeasure> {
    if x.coords.len() != mu.space.dim {
        return Err(Error::DimensionMismatch {
            expected: mu.space.dim,
            got: x.coords.len(),
        });
    }
    let atom_values = mu.atoms.iter().map(|a| pairing(&x.coords, &a.value)).collect();
    Ok(ScalarMeasure {
        atom_values,
        functional: x.clone(),
    })
}

/// `|ν|(A) = Σ_{i∈A} |ν_i|`; the partition into singletons attains the
/// supremum over partitions.
pub fn variation(nu: &ScalarMeasure, a: MSet) -> f64 {
    a.iter()
        .filter_map(|i| nu.atom_values.get(i))
        .map(|x| x.abs())
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spaces::NormTag;

    fn plane(norm: NormTag) -> SpaceDesc {
        SpaceDesc::new(2, norm).unwrap()
    }

    #[test]
    fn scalarize_examples() {
        let s = plane(NormTag::LInf);
        let mu = VectorMeasure::from_values(s, vec![vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        let x = DualVector::new(vec![1.0, 1.0], s).unwrap();
        assert_eq!(scalarize(&mu, &x).unwrap().atom_values, vec![1.0, 1.0]);
        let z = DualVector::new(vec![0.0, 0.0], s).unwrap();
        assert_eq!(scalarize(&mu, &z).unwrap().atom_values, vec![0.0, 0.0]);

        let mu = VectorMeasure::from_values(s, vec![vec![2.0, -3.0]]).unwrap();
        let x = DualVector::new(vec![0.0, -1.0], s).unwrap();
        let nu = scalarize(&mu, &x).unwrap();
        assert_eq!(nu.atom_values, vec![3.0]);
        assert_eq!(nu.measure_of(MSet::full(1)), 3.0);

        let line = SpaceDesc::new(1, NormTag::L2).unwrap();
        let x = DualVector::new(vec![1.0], line).unwrap();
        assert!(scalarize(&mu, &x).is_err());
    }

    #[test]
    fn variation_examples() {
        let s = plane(NormTag::L1);
        let x = DualVector::new(vec![1.0, 1.0], s).unwrap();
        let nu = ScalarMeasure {
            atom_values: vec![1.0, 1.0],
            functional: x.clone(),
        };
        assert_eq!(variation(&nu, MSet::full(2)), 2.0);
        let nu = ScalarMeasure {
            atom_values: vec![2.0, -3.0],
            functional: x,
        };
        assert_eq!(variation(&nu, MSet::full(2)), 5.0);
        assert_eq!(variation(&nu, MSet::EMPTY), 0.0);
    }

    #[test]
    fn validation() {
        let s = plane(NormTag::L2);
        assert!(VectorMeasure::from_values(s, vec![]).is_err());
        assert!(VectorMeasure::from_values(s, vec![vec![1.0]]).is_err());
        assert!(VectorMeasure::from_values(s, vec![vec![f64::NAN, 0.0]]).is_err());
        let dup = vec![Atom::new("x", vec![1.0, 0.0]), Atom::new("x", vec![0.0, 1.0])];
        assert!(VectorMeasure::new(s, dup).is_err());
    }

    #[test]
    fn measure_is_additive_over_atoms() {
        let s = plane(NormTag::L2);
        let mu = VectorMeasure::from_values(s, vec![vec![1.0, 2.0], vec![-0.5, 0.25], vec![0.0, 0.0]])
            .unwrap();
        assert_eq!(mu.measure_of(mu.full()).unwrap(), vec![0.5, 2.25]);
        assert_eq!(mu.measure_of(MSet::EMPTY).unwrap(), vec![0.0, 0.0]);
        assert!(mu.measure_of(MSet::from_bits(0b1000, 4).unwrap()).is_err());
        assert_eq!(mu.support(), MSet::from_indices([0, 1], 3).unwrap());
    }
}
