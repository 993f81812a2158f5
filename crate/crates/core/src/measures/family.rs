//! Weighted families of sets `(B_k)` and the μ-density check.

use std::collections::HashMap;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::semivariation::semivariation_fast;
use super::{MSet, VectorMeasure};
use crate::error::{Error, Result};
use crate::spaces::norm_unchecked;
use crate::weights::{check_normalized, geometric_weights};

/// Largest atom count for exhaustive enumeration of all sets.
pub const EXHAUSTIVE_CAP: usize = 16;

const BOUND_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilyKind {
    AllSubsets,
    Dyadic,
    Explicit,
}

impl FromStr for FamilyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "all_subsets" => Ok(FamilyKind::AllSubsets),
            "dyadic" => Ok(FamilyKind::Dyadic),
            "explicit" => Ok(FamilyKind::Explicit),
            other => Err(Error::Validation(format!("unknown family kind `{other}`"))),
        }
    }
}

/// Sets `B_k` with weights `η_k > 0`, `Σ η_k = 1`, each satisfying
/// `‖μ‖(B_k) ≤ ‖μ‖(T) + 1`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DenseFamily {
    kind: FamilyKind,
    sets: Vec<MSet>,
    weights: Vec<f64>,
}

impl DenseFamily {
    /// Validates `sets` against `mu` and attaches geometric weights.
    pub fn new(mu: &VectorMeasure, kind: FamilyKind, sets: Vec<MSet>) -> Result<Self> {
        if sets.is_empty() {
            return Err(Error::Empty("set family"));
        }
        let weights = geometric_weights(sets.len())?;
        Self::with_weights(mu, kind, sets, weights)
    }

    pub fn with_weights(
        mu: &VectorMeasure,
        kind: FamilyKind,
        sets: Vec<MSet>,
        weights: Vec<f64>,
    ) -> Result<Self> {
        if sets.is_empty() {
            return Err(Error::Empty("set family"));
        }
        for (k, b) in sets.iter().enumerate() {
            mu.check_set(*b)
                .map_err(|e| Error::Validation(format!("family set {k}: {e}")))?;
        }
        if weights.len() != sets.len() {
            return Err(Error::Validation(format!(
                "{} weights for {} sets",
                weights.len(),
                sets.len()
            )));
        }
        check_normalized(&weights, "family weights")?;
        check_bound(mu, &sets)?;
        Ok(DenseFamily {
            kind,
            sets,
            weights,
        })
    }

    pub fn kind(&self) -> FamilyKind {
        self.kind
    }

    pub fn sets(&self) -> &[MSet] {
        &self.sets
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }
}

/// Checks `‖μ‖(B_k) ≤ ‖μ‖(T) + 1`. The variation `Σ‖v_i‖` settles most sets
/// without computing the semivariation.
fn check_bound(mu: &VectorMeasure, sets: &[MSet]) -> Result<()> {
    let bound = semivariation_fast(mu, mu.full())? + 1.0;
    let mut memo = HashMap::new();
    for (k, b) in sets.iter().enumerate() {
        if mu.variation_bound(*b) <= bound {
            continue;
        }
        let sv = match memo.get(b) {
            Some(v) => *v,
            None => {
                let v = semivariation_fast(mu, *b)?;
                memo.insert(*b, v);
                v
            }
        };
        if sv > bound + BOUND_SLACK {
            return Err(Error::Validation(format!(
                "family set {k} = {b} has semivariation {sv} above ‖μ‖(T) + 1 = {bound}"
            )));
        }
    }
    Ok(())
}

/// Builds a family of the given kind. `all_subsets` lists every set by
/// cardinality then lexicographically; `dyadic` lists the binary blocks of
/// the atom order breadth first, the first half of an odd block being the
/// larger; `explicit` takes `payload`.
pub fn build_family(mu: &VectorMeasure, kind: FamilyKind, payload: Option<Vec<MSet>>) -> Result<DenseFamily> {
    let m = mu.len();
    let sets = match kind {
        FamilyKind::AllSubsets => {
            if m > EXHAUSTIVE_CAP {
                return Err(Error::ExhaustiveCap {
                    atoms: m,
                    cap: EXHAUSTIVE_CAP,
                });
            }
            MSet::all_subsets(m)
        }
        FamilyKind::Dyadic => dyadic_blocks(m),
        FamilyKind::Explicit => {
            payload.ok_or_else(|| Error::Validation("explicit family needs a set list".into()))?
        }
    };
    DenseFamily::new(mu, kind, sets)
}

fn dyadic_blocks(m: usize) -> Vec<MSet> {
    let mut out = Vec::with_capacity(2 * m);
    let mut queue = std::collections::VecDeque::from([(0, m)]);
    while let Some((lo, hi)) = queue.pop_front() {
        out.push(MSet::from_indices(lo..hi, m).expect("block within atoms"));
        if hi - lo > 1 {
            let mid = lo + (hi - lo).div_ceil(2);
            queue.push_back((lo, mid));
            queue.push_back((mid, hi));
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DensityCheck {
    pub dense: bool,
    /// A set at distance more than `ε` from every `B_k`.
    pub witness: Option<MSet>,
    /// `min_k ‖μ‖(A Δ B_k)` for the witness.
    pub witness_distance: Option<f64>,
    /// Sets `A` examined.
    pub examined: usize,
}

/// Exhaustive check over all `2^m` sets `A`, in canonical order, that some
/// `B_k` has `‖μ‖(A Δ B_k) ≤ ε`.
pub fn check_mu_dense(mu: &VectorMeasure, fam: &DenseFamily, eps: f64) -> Result<DensityCheck> {
    let m = mu.len();
    if m > EXHAUSTIVE_CAP {
        return Err(Error::ExhaustiveCap {
            atoms: m,
            cap: EXHAUSTIVE_CAP,
        });
    }
    run_density(mu, fam, eps, MSet::all_subsets(m))
}

/// As [`check_mu_dense`] over `samples` seeded uniform random sets.
pub fn check_mu_dense_sampled(
    mu: &VectorMeasure,
    fam: &DenseFamily,
    eps: f64,
    samples: usize,
    seed: u64,
) -> Result<DensityCheck> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let full = mu.full().bits();
    let sets = (0..samples)
        .map(|_| MSet::from_bits(rng.random::<u64>() & full, mu.len()))
        .collect::<Result<Vec<_>>>()?;
    run_density(mu, fam, eps, sets)
}

fn run_density(mu: &VectorMeasure, fam: &DenseFamily, eps: f64, sets: Vec<MSet>) -> Result<DensityCheck> {
    if eps.is_nan() || eps < 0.0 {
        return Err(Error::Validation(format!("ε must be nonnegative, got {eps}")));
    }
    let norms: Vec<f64> = (0..mu.len())
        .map(|i| norm_unchecked(mu.value(i), mu.space().norm))
        .collect();
    let mut memo: HashMap<MSet, f64> = HashMap::new();
    let mut distance = |d: MSet| -> Result<f64> {
        if let Some(v) = memo.get(&d) {
            return Ok(*v);
        }
        let v = semivariation_fast(mu, d)?;
        memo.insert(d, v);
        Ok(v)
    };
    for (n, a) in sets.iter().enumerate() {
        let mut close = false;
        for b in fam.sets() {
            let d = a.symmetric_difference(*b);
            // ‖v_i‖ ≤ ‖μ‖(D) ≤ Σ ‖v_i‖ over i ∈ D
            let lower = d.iter().map(|i| norms[i]).fold(0.0, f64::max);
            if lower > eps {
                continue;
            }
            let upper: f64 = d.iter().map(|i| norms[i]).sum();
            if upper <= eps || distance(d)? <= eps {
                close = true;
                break;
            }
        }
        if !close {
            let mut best = f64::INFINITY;
            for b in fam.sets() {
                best = best.min(distance(a.symmetric_difference(*b))?);
            }
            return Ok(DensityCheck {
                dense: false,
                witness: Some(*a),
                witness_distance: Some(best),
                examined: n + 1,
            });
        }
    }
    Ok(DensityCheck {
        dense: true,
        witness: None,
        witness_distance: None,
        examined: sets.len(),
    })
}
