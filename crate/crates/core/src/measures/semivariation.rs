//! Semivariation `‖μ‖(A) = sup_{‖x'‖≤1} Σ_{i∈A} |<x', v_i>|`.
//!
//! For a sign vector `s` the map `x' ↦ Σ s_i <x', v_i>` is linear, and its
//! supremum over the dual ball is `‖Σ s_i v_i‖`. The sum of moduli is the
//! upper envelope of these linear maps, so the semivariation is the largest
//! norm of a signed sum. `s` and `-s` give the same norm, so the sign of the
//! first atom is fixed and `2^(|A|-1)` patterns remain.

use rayon::prelude::*;
use serde::Serialize;

use super::{MSet, VectorMeasure};
use crate::error::Result;
use crate::spaces::{
    build_candidates, dual_extreme_points, norm_unchecked, norming_functional, pairing,
    CandidateStrategy, DualCandidateSet, DualVector,
};

/// Largest set handled by sign enumeration, about two million patterns.
pub const EXACT_ATOM_BUDGET: usize = 22;

/// Sets at least this large are enumerated in parallel chunks.
const PARALLEL_FROM: usize = 16;

const CHUNK_BITS: usize = 6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SemivariationMethod {
    Empty,
    SignEnumeration,
    /// Maximum over all extreme points of a polytopal dual ball.
    ExtremePoints,
    /// Maximum over seeded dual-sphere samples: a lower bound.
    SphereSample { seed: u64, count: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SemivariationOptions {
    pub atom_budget: usize,
    pub fallback_samples: usize,
    pub seed: u64,
}

impl Default for SemivariationOptions {
    fn default() -> Self {
        SemivariationOptions {
            atom_budget: EXACT_ATOM_BUDGET,
            fallback_samples: 4096,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Semivariation {
    pub value: f64,
    /// False when `value` is only a lower bound.
    pub exact: bool,
    pub method: SemivariationMethod,
    /// A functional in the dual ball attaining `value`, if `value > 0`.
    pub witness: Option<DualVector>,
}

pub fn semivariation(mu: &VectorMeasure, a: MSet) -> Result<Semivariation> {
    semivariation_with(mu, a, &SemivariationOptions::default())
}

/// Sign enumeration for sets within the atom budget. Larger sets are
/// maximized over the dual ball's extreme points when it is a polytope (still
/// exact), otherwise over sphere samples (a lower bound).
pub fn semivariation_with(
    mu: &VectorMeasure,
    a: MSet,
    opts: &SemivariationOptions,
) -> Result<Semivariation> {
    mu.check_set(a)?;
    let idx: Vec<usize> = a.iter().collect();
    if idx.is_empty() {
        return Ok(Semivariation {
            value: 0.0,
            exact: true,
            method: SemivariationMethod::Empty,
            witness: None,
        });
    }
    let space = mu.space();
    if idx.len() <= opts.atom_budget {
        let pattern = best_pattern(mu, &idx);
        // recompute the winner without the running-sum rounding
        let mut sum = mu.value(idx[0]).to_vec();
        for (j, &i) in idx[1..].iter().enumerate() {
            let sign = if pattern >> j & 1 == 1 { -1.0 } else { 1.0 };
            for (s, x) in sum.iter_mut().zip(mu.value(i)) {
                *s += sign * x;
            }
        }
        let value = norm_unchecked(&sum, space.norm);
        return Ok(Semivariation {
            value,
            exact: true,
            method: SemivariationMethod::SignEnumeration,
            witness: norming_functional(&sum, space).ok(),
        });
    }
    if space.dual_ball_is_polytope() {
        if let Ok(points) = dual_extreme_points(space) {
            let (value, best) = max_over(mu, &idx, &points);
            return Ok(Semivariation {
                value,
                exact: true,
                method: SemivariationMethod::ExtremePoints,
                witness: (value > 0.0).then(|| points[best].clone()),
            });
        }
    }
    let count = opts.fallback_samples.max(1);
    let cands = build_candidates(space, CandidateStrategy::SphereSample, count, opts.seed)?;
    let (value, best) = max_over(mu, &idx, cands.members());
    Ok(Semivariation {
        value,
        exact: false,
        method: SemivariationMethod::SphereSample {
            seed: opts.seed,
            count,
        },
        witness: (value > 0.0).then(|| cands.members()[best].clone()),
    })
}

/// `max_{x'∈D} Σ_{i∈A} |<x', v_i>|` and the index of the first maximizer.
pub fn semivariation_over(mu: &VectorMeasure, a: MSet, cands: &DualCandidateSet) -> Result<(f64, usize)> {
    mu.check_set(a)?;
    let idx: Vec<usize> = a.iter().collect();
    Ok(max_over(mu, &idx, cands.members()))
}

/// Exact semivariation by the cheaper of the two exact routes. Used for
/// internal bookkeeping where the route does not matter.
pub(crate) fn semivariation_fast(mu: &VectorMeasure, a: MSet) -> Result<f64> {
    let space = mu.space();
    let size = a.len();
    if space.dual_ball_is_polytope() && size > 1 {
        let points = match space.norm.dual() {
            crate::spaces::NormTag::L1 => 2 * space.dim,
            _ if space.dim == 1 => 2,
            _ => 1usize.checked_shl(space.dim as u32).unwrap_or(usize::MAX),
        };
        if points < 1usize.checked_shl(size as u32 - 1).unwrap_or(usize::MAX) {
            if let Ok(points) = dual_extreme_points(space) {
                let idx: Vec<usize> = a.iter().collect();
                return Ok(max_over(mu, &idx, &points).0);
            }
        }
    }
    semivariation(mu, a).map(|s| s.value)
}

fn max_over(mu: &VectorMeasure, idx: &[usize], points: &[DualVector]) -> (f64, usize) {
    let mut best = (0.0, 0);
    for (h, x) in points.iter().enumerate() {
        let v: f64 = idx.iter().map(|&i| pairing(&x.coords, mu.value(i)).abs()).sum();
        if v > best.0 {
            best = (v, h);
        }
    }
    best
}

/// Sign pattern (bit `j` set: atom `idx[j+1]` negated) of a signed sum with
/// the largest norm; ties go to the smallest pattern.
fn best_pattern(mu: &VectorMeasure, idx: &[usize]) -> u64 {
    let free = idx.len() - 1;
    let high = if idx.len() >= PARALLEL_FROM {
        free.min(CHUNK_BITS)
    } else {
        0
    };
    let low = free - high;
    let run = |chunk: u64| scan_chunk(mu, idx, low, chunk);
    let best = if high == 0 {
        run(0)
    } else {
        (0..1u64 << high)
            .into_par_iter()
            .map(run)
            .reduce(|| (f64::NEG_INFINITY, u64::MAX), pick)
    };
    best.1
}

fn pick(a: (f64, u64), b: (f64, u64)) -> (f64, u64) {
    if b.0 > a.0 || (b.0 == a.0 && b.1 < a.1) {
        b
    } else {
        a
    }
}

/// Walks the low `low` bits in Gray-code order with the high bits fixed to
/// `chunk`, updating the signed sum by one atom per step.
fn scan_chunk(mu: &VectorMeasure, idx: &[usize], low: usize, chunk: u64) -> (f64, u64) {
    let tag = mu.space().norm;
    let free = idx.len() - 1;
    let mut pattern = chunk << low;
    let mut sum = mu.value(idx[0]).to_vec();
    for j in 0..free {
        let sign = if pattern >> j & 1 == 1 { -1.0 } else { 1.0 };
        for (s, x) in sum.iter_mut().zip(mu.value(idx[j + 1])) {
            *s += sign * x;
        }
    }
    let mut best = (norm_unchecked(&sum, tag), pattern);
    for t in 1..1u64 << low {
        let j = t.trailing_zeros() as usize;
        pattern ^= 1 << j;
        let step = if pattern >> j & 1 == 1 { -2.0 } else { 2.0 };
        for (s, x) in sum.iter_mut().zip(mu.value(idx[j + 1])) {
            *s += step * x;
        }
        best = pick(best, (norm_unchecked(&sum, tag), pattern));
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spaces::{NormTag, SpaceDesc};

    fn units(norm: NormTag) -> VectorMeasure {
        let s = SpaceDesc::new(2, norm).unwrap();
        VectorMeasure::from_values(s, vec![vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap()
    }

    #[test]
    fn unit_vectors_in_ellinf_have_semivariation_one() {
        let mu = units(NormTag::LInf);
        let sv = semivariation(&mu, mu.full()).unwrap();
        assert_eq!(sv.value, 1.0);
        assert!(sv.exact);
        assert_eq!(mu.variation_bound(mu.full()), 2.0);
        let w = sv.witness.unwrap();
        let attained: f64 = (0..2).map(|i| w.apply(mu.value(i)).abs()).sum();
        assert_eq!(attained, 1.0);
    }

    #[test]
    fn unit_vectors_in_ell1_have_semivariation_two() {
        let mu = units(NormTag::L1);
        assert_eq!(semivariation(&mu, mu.full()).unwrap().value, 2.0);
    }

    #[test]
    fn single_atom_and_empty_set() {
        let s = SpaceDesc::new(2, NormTag::L2).unwrap();
        let mu = VectorMeasure::from_values(s, vec![vec![3.0, 4.0], vec![1.0, 1.0]]).unwrap();
        assert_eq!(semivariation(&mu, MSet::singleton(0)).unwrap().value, 5.0);
        let e = semivariation(&mu, MSet::EMPTY).unwrap();
        assert_eq!((e.value, e.method), (0.0, SemivariationMethod::Empty));
    }

    #[test]
    fn parallel_chunks_agree_with_extreme_points() {
        let s = SpaceDesc::new(3, NormTag::L1).unwrap();
        let values: Vec<Vec<f64>> = (0..18)
            .map(|i| {
                let t = i as f64;
                vec![(t * 0.37).sin().round_to(8), (t * 1.3).cos().round_to(8), ((i % 5) as f64 - 2.0) / 4.0]
            })
            .collect();
        let mu = VectorMeasure::from_values(s, values).unwrap();
        let sv = semivariation(&mu, mu.full()).unwrap();
        let ext = crate::spaces::build_candidates(s, CandidateStrategy::ExtremePoints, 0, 0).unwrap();
        let (v, _) = semivariation_over(&mu, mu.full(), &ext).unwrap();
        assert_eq!(sv.value, v);
        assert_eq!(semivariation_fast(&mu, mu.full()).unwrap(), v);
    }

    #[test]
    fn over_budget_uses_extreme_points_or_samples() {
        let opts = SemivariationOptions {
            atom_budget: 1,
            ..Default::default()
        };
        let mu = units(NormTag::LInf);
        let sv = semivariation_with(&mu, mu.full(), &opts).unwrap();
        assert_eq!((sv.value, sv.exact, sv.method), (1.0, true, SemivariationMethod::ExtremePoints));

        let mu = units(NormTag::L2);
        let sv = semivariation_with(&mu, mu.full(), &opts).unwrap();
        assert!(!sv.exact);
        assert!(sv.value <= 2f64.sqrt() + 1e-12 && sv.value > 1.4);
    }

    trait Round {
        fn round_to(self, bits: i32) -> f64;
    }

    impl Round for f64 {
        fn round_to(self, bits: i32) -> f64 {
            let s = 2f64.powi(bits);
            (self * s).round() / s
        }
    }
}
