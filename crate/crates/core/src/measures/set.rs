use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Most atoms a measure may carry; sets are `u64` bitmasks.
pub const MAX_ATOMS: usize = 64;

/// A measurable set of a finite atomic measure: a bitmask over atom indices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MSet(u64);

impl MSet {
    pub const EMPTY: MSet = MSet(0);

    /// Validates that no bit at or beyond `atoms` is set.
    pub fn from_bits(bits: u64, atoms: usize) -> Result<Self> {
        if bits & !Self::full(atoms).0 != 0 {
            return Err(Error::Validation(format!(
                "set {bits:#b} has bits beyond atom count {atoms}"
            )));
        }
        Ok(MSet(bits))
    }

    pub fn from_indices(indices: impl IntoIterator<Item = usize>, atoms: usize) -> Result<Self> {
        let mut bits = 0u64;
        for i in indices {
            if i >= atoms {
                return Err(Error::Validation(format!(
                    "atom index {i} out of range for {atoms} atoms"
                )));
            }
            bits |= 1 << i;
        }
        Ok(MSet(bits))
    }

    /// The whole space `T`.
    pub fn full(atoms: usize) -> Self {
        debug_assert!(atoms <= MAX_ATOMS);
        if atoms >= 64 {
            MSet(u64::MAX)
        } else {
            MSet((1u64 << atoms) - 1)
        }
    }

    pub fn singleton(i: usize) -> Self {
        MSet(1 << i)
    }

    pub fn bits(self) -> u64 {
        self.0
    }

    pub fn contains(self, i: usize) -> bool {
        i < 64 && self.0 >> i & 1 == 1
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn union(self, other: MSet) -> MSet {
        MSet(self.0 | other.0)
    }

    pub fn intersection(self, other: MSet) -> MSet {
        MSet(self.0 & other.0)
    }

    pub fn symmetric_difference(self, other: MSet) -> MSet {
        MSet(self.0 ^ other.0)
    }

    pub fn difference(self, other: MSet) -> MSet {
        MSet(self.0 & !other.0)
    }

    pub fn is_subset(self, other: MSet) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn is_disjoint(self, other: MSet) -> bool {
        self.0 & other.0 == 0
    }

    /// Atom indices in increasing order.
    pub fn iter(self) -> impl Iterator<Item = usize> {
        let mut bits = self.0;
        std::iter::from_fn(move || {
            if bits == 0 {
                return None;
            }
            let i = bits.trailing_zeros() as usize;
            bits &= bits - 1;
            Some(i)
        })
    }

    /// Every subset of `T` for `atoms` atoms, ordered by cardinality and then
    /// lexicographically by atom index, `∅` first.
    pub fn all_subsets(atoms: usize) -> Vec<MSet> {
        assert!(atoms < 32, "enumerating 2^{atoms} subsets");
        let mut sets: Vec<MSet> = (0..1u64 << atoms).map(MSet).collect();
        sets.sort_by(|a, b| {
            a.len().cmp(&b.len()).then_with(|| {
                // lexicographic on increasing index lists
                a.iter().cmp(b.iter())
            })
        });
        sets
    }
}

impl fmt::Display for MSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (k, i) in self.iter().enumerate() {
            if k > 0 {
                f.write_str(",")?;
            }
            write!(f, "{}", i + 1)?;
        }
        f.write_str("}")
    }
}
