//! Deterministic inputs shared by the benchmarks.

use ksnorm::{build_family, CandidateStrategy, DenseFamily, DualCandidateSet, FamilyKind, MFunc, NormTag, SpaceDesc, VectorMeasure};

/// Dyadic values in `[-4, 4]` from a fixed linear congruence.
pub fn dyadic_values(n: usize, salt: u64) -> Vec<f64> {
    let mut x = salt.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
    (0..n)
        .map(|_| {
            x = x.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((x >> 33) % 65) as f64 / 8.0 - 4.0
        })
        .collect()
}

pub fn measure(atoms: usize, dim: usize, norm: NormTag) -> VectorMeasure {
    let space = SpaceDesc::new(dim, norm).expect("valid space");
    let values = (0..atoms).map(|i| dyadic_values(dim, i as u64)).collect();
    VectorMeasure::from_values(space, values).expect("valid measure")
}

/// A model with `atoms` atoms, a function, a family and candidates.
pub fn model(atoms: usize, dim: usize, norm: NormTag, kind: FamilyKind) -> (VectorMeasure, MFunc, DenseFamily, DualCandidateSet) {
    let mu = measure(atoms, dim, norm);
    let f = MFunc::new(dyadic_values(atoms, 99)).expect("finite values");
    let fam = build_family(&mu, kind, None).expect("family builds");
    let strategy = if mu.space().dual_ball_is_polytope() {
        CandidateStrategy::ExtremePoints
    } else {
        CandidateStrategy::SphereSample
    };
    let d = ksnorm::build_candidates(mu.space(), strategy, 64, 7).expect("candidates build");
    (mu, f, fam, d)
}
