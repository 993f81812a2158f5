//! Finite-dimensional real normed spaces with ℓ1, ℓ2 and ℓ∞ norms, their
//! duals, norming functionals and finite subsets of the dual unit ball.

use std::fmt;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::weights::{check_normalized, geometric_weights};

/// Slack for dual-ball membership of candidate functionals.
pub const BALL_SLACK: f64 = 1e-12;

/// Largest dimension for which the 2^n sign vectors of the ℓ∞ ball are listed.
pub const MAX_SIGN_VECTOR_DIM: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum NormTag {
    #[serde(rename = "ell1")]
    L1,
    #[serde(rename = "ell2")]
    L2,
    #[serde(rename = "ellinf")]
    LInf,
}

impl NormTag {
    pub const ALL: [NormTag; 3] = [NormTag::L1, NormTag::L2, NormTag::LInf];

    pub fn dual(self) -> NormTag {
        match self {
            NormTag::L1 => NormTag::LInf,
            NormTag::L2 => NormTag::L2,
            NormTag::LInf => NormTag::L1,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            NormTag::L1 => "ell1",
            NormTag::L2 => "ell2",
            NormTag::LInf => "ellinf",
        }
    }
}

impl fmt::Display for NormTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for NormTag {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ell1" | "l1" => Ok(NormTag::L1),
            "ell2" | "l2" => Ok(NormTag::L2),
            "ellinf" | "linf" => Ok(NormTag::LInf),
            other => Err(Error::Validation(format!("unknown norm tag `{other}`"))),
        }
    }
}

/// A real space `R^dim` carrying one of the three norms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SpaceDesc {
    pub dim: usize,
    pub norm: NormTag,
}

impl SpaceDesc {
    pub fn new(dim: usize, norm: NormTag) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Dimension("space dimension must be at least 1".into()));
        }
        Ok(SpaceDesc { dim, norm })
    }

    /// The dual space, carrying the dual norm.
    pub fn dual(self) -> SpaceDesc {
        SpaceDesc {
            dim: self.dim,
            norm: self.norm.dual(),
        }
    }

    pub fn norm_of(&self, v: &[f64]) -> Result<f64> {
        self.check_len(v)?;
        norm_eval(v, self.norm)
    }

    pub fn dual_norm_of(&self, x: &[f64]) -> Result<f64> {
        self.check_len(x)?;
        norm_eval(x, self.norm.dual())
    }

    /// The dual unit ball is a polytope (or an interval) with finitely many
    /// extreme points.
    pub fn dual_ball_is_polytope(&self) -> bool {
        self.norm != NormTag::L2 || self.dim == 1
    }

    pub(crate) fn check_len(&self, v: &[f64]) -> Result<()> {
        if v.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: v.len(),
            });
        }
        Ok(())
    }
}

pub fn norm_eval(v: &[f64], tag: NormTag) -> Result<f64> {
    if v.is_empty() {
        return Err(Error::Dimension("cannot take the norm of an empty vector".into()));
    }
    Ok(norm_unchecked(v, tag))
}

#[inline]
pub(crate) fn norm_unchecked(v: &[f64], tag: NormTag) -> f64 {
    match tag {
        NormTag::L1 => v.iter().map(|x| x.abs()).sum(),
        NormTag::L2 => v.iter().map(|x| x * x).sum::<f64>().sqrt(),
        NormTag::LInf => v.iter().fold(0.0, |m, x| m.max(x.abs())),
    }
}

#[inline]
pub fn pairing(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// A functional on `space`, stored by its coordinates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DualVector {
    pub coords: Vec<f64>,
    pub space: SpaceDesc,
}

impl DualVector {
    pub fn new(coords: Vec<f64>, space: SpaceDesc) -> Result<Self> {
        space.check_len(&coords)?;
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::Validation("functional has non-finite coordinates".into()));
        }
        Ok(DualVector { coords, space })
    }

    pub fn dual_norm(&self) -> f64 {
        norm_unchecked(&self.coords, self.space.norm.dual())
    }

    pub fn in_unit_ball(&self) -> bool {
        self.dual_norm() <= 1.0 + BALL_SLACK
    }

    pub fn apply(&self, v: &[f64]) -> f64 {
        pairing(&self.coords, v)
    }
}

/// Returns `x'` with dual norm one and `<x', v> = ||v||`.
pub fn norming_functional(v: &[f64], space: SpaceDesc) -> Result<DualVector> {
    space.check_len(v)?;
    if v.iter().all(|x| *x == 0.0) {
        return Err(Error::Degenerate("the zero vector has no norming functional".into()));
    }
    let coords = match space.norm {
        NormTag::L2 => {
            let n = norm_unchecked(v, NormTag::L2);
            v.iter().map(|x| x / n).collect()
        }
        NormTag::LInf => {
            // first coordinate of maximal modulus
            let (j, _) = v.iter().enumerate().fold((0, -1.0), |(bj, bm), (i, x)| {
                if x.abs() > bm {
                    (i, x.abs())
                } else {
                    (bj, bm)
                }
            });
            let mut e = vec![0.0; v.len()];
            e[j] = v[j].signum();
            e
        }
        NormTag::L1 => v
            .iter()
            .map(|x| if *x < 0.0 { -1.0 } else { 1.0 })
            .collect(),
    };
    DualVector::new(coords, space)
}

/// How the members of a candidate set were produced.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Provenance {
    /// All extreme points of a polytopal dual ball.
    ExtremePoints,
    /// Seeded samples of the dual unit sphere.
    SphereSample { seed: u64, count: usize },
    /// Extreme points were requested but the dual ball is smooth; sphere
    /// samples were drawn instead.
    ExtremePointsFallback { seed: u64, count: usize },
    Explicit,
}

impl Provenance {
    pub fn is_complete_extreme_set(&self) -> bool {
        matches!(self, Provenance::ExtremePoints)
    }
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Provenance::ExtremePoints => f.write_str("extreme_points"),
            Provenance::SphereSample { seed, count } => {
                write!(f, "sphere_sample(seed={seed}, count={count})")
            }
            Provenance::ExtremePointsFallback { seed, count } => write!(
                f,
                "extreme_points unavailable for a smooth dual ball; fell back to sphere_sample(seed={seed}, count={count})"
            ),
            Provenance::Explicit => f.write_str("explicit"),
        }
    }
}

/// Strategy for [`build_candidates`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CandidateStrategy {
    ExtremePoints,
    SphereSample,
}

impl FromStr for CandidateStrategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "extreme_points" => Ok(CandidateStrategy::ExtremePoints),
            "sphere_sample" => Ok(CandidateStrategy::SphereSample),
            other => Err(Error::Validation(format!(
                "unknown candidate strategy `{other}`"
            ))),
        }
    }
}

/// A finite subset of the dual unit ball, optionally weighted.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DualCandidateSet {
    members: Vec<DualVector>,
    weights: Option<Vec<f64>>,
    separating: bool,
    provenance: Provenance,
}

impl DualCandidateSet {
    /// Builds a set from explicit members. Members must lie in the dual unit
    /// ball of `space`; weights, if given, must be positive and sum to one.
    pub fn explicit(
        space: SpaceDesc,
        members: Vec<Vec<f64>>,
        weights: Option<Vec<f64>>,
    ) -> Result<Self> {
        let members = members
            .into_iter()
            .map(|c| DualVector::new(c, space))
            .collect::<Result<Vec<_>>>()?;
        Self::from_parts(space, members, weights, Provenance::Explicit)
    }

    fn from_parts(
        space: SpaceDesc,
        members: Vec<DualVector>,
        weights: Option<Vec<f64>>,
        provenance: Provenance,
    ) -> Result<Self> {
        if members.is_empty() {
            return Err(Error::Empty("candidate set"));
        }
        for (i, m) in members.iter().enumerate() {
            if m.space != space {
                return Err(Error::Validation(format!(
                    "candidate {i} belongs to a different space"
                )));
            }
            if !m.in_unit_ball() {
                return Err(Error::Validation(format!(
                    "candidate {i} has dual norm {} > 1",
                    m.dual_norm()
                )));
            }
        }
        if let Some(w) = &weights {
            if w.len() != members.len() {
                return Err(Error::Validation(format!(
                    "{} weights for {} candidates",
                    w.len(),
                    members.len()
                )));
            }
            check_normalized(w, "candidate weights")?;
        }
        let separating = spans(&members, space.dim);
        Ok(DualCandidateSet {
            members,
            weights,
            separating,
            provenance,
        })
    }

    pub fn members(&self) -> &[DualVector] {
        &self.members
    }

    pub fn weights(&self) -> Option<&[f64]> {
        self.weights.as_deref()
    }

    /// The members span the dual space, so they separate points of `X`.
    pub fn separating(&self) -> bool {
        self.separating
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn space(&self) -> SpaceDesc {
        self.members[0].space
    }

    /// Replaces the weights with renormalized geometric ones.
    pub fn with_geometric_weights(mut self) -> Result<Self> {
        self.weights = Some(geometric_weights(self.members.len())?);
        Ok(self)
    }

    pub fn with_weights(self, weights: Vec<f64>) -> Result<Self> {
        let space = self.space();
        Self::from_parts(space, self.members, Some(weights), self.provenance)
    }

    /// Keeps only the members at `indices`, in order. Weights are dropped.
    pub fn subset(&self, indices: &[usize]) -> Result<Self> {
        let members = indices
            .iter()
            .map(|&i| {
                self.members
                    .get(i)
                    .cloned()
                    .ok_or_else(|| Error::Validation(format!("no candidate {i}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_parts(self.space(), members, None, Provenance::Explicit)
    }
}

/// Builds a candidate set for the dual ball of `space`; every set carries
/// geometric weights.
pub fn build_candidates(
    space: SpaceDesc,
    strategy: CandidateStrategy,
    size_hint: usize,
    seed: u64,
) -> Result<DualCandidateSet> {
    let (members, provenance) = match strategy {
        CandidateStrategy::ExtremePoints if space.dual_ball_is_polytope() => {
            (dual_extreme_points(space)?, Provenance::ExtremePoints)
        }
        CandidateStrategy::ExtremePoints => {
            let count = size_hint.max(1);
            (
                sphere_sample(space, count, seed),
                Provenance::ExtremePointsFallback { seed, count },
            )
        }
        CandidateStrategy::SphereSample => {
            if size_hint == 0 {
                return Err(Error::Validation("sphere_sample needs size_hint >= 1".into()));
            }
            (
                sphere_sample(space, size_hint, seed),
                Provenance::SphereSample {
                    seed,
                    count: size_hint,
                },
            )
        }
    };
    let weights = geometric_weights(members.len())?;
    DualCandidateSet::from_parts(space, members, Some(weights), provenance)
}

/// Extreme points of the dual unit ball of `space`.
///
/// Dual ℓ1 ball: `±e_j` in the order `+e_1, -e_1, +e_2, ...`. Dual ℓ∞ ball:
/// the `2^n` sign vectors, `+` before `-`, first coordinate most significant.
pub fn dual_extreme_points(space: SpaceDesc) -> Result<Vec<DualVector>> {
    let n = space.dim;
    let coords: Vec<Vec<f64>> = match space.norm.dual() {
        NormTag::L1 => signed_basis(n),
        NormTag::LInf => {
            if n > MAX_SIGN_VECTOR_DIM {
                return Err(Error::Validation(format!(
                    "2^{n} sign vectors exceed the enumeration limit"
                )));
            }
            sign_vectors(n)
        }
        NormTag::L2 if n == 1 => vec![vec![1.0], vec![-1.0]],
        NormTag::L2 => {
            return Err(Error::Validation(
                "the ℓ2 unit ball has no finite extreme-point set".into(),
            ))
        }
    };
    coords.into_iter().map(|c| DualVector::new(c, space)).collect()
}

fn signed_basis(n: usize) -> Vec<Vec<f64>> {
    let mut out = Vec::with_capacity(2 * n);
    for j in 0..n {
        for s in [1.0, -1.0] {
            let mut e = vec![0.0; n];
            e[j] = s;
            out.push(e);
        }
    }
    out
}

fn sign_vectors(n: usize) -> Vec<Vec<f64>> {
    (0..1usize << n)
        .map(|b| {
            (0..n)
                .map(|j| if b >> (n - 1 - j) & 1 == 1 { -1.0 } else { 1.0 })
                .collect()
        })
        .collect()
}

/// Seeded Gaussian directions normalized onto the dual unit sphere.
fn sphere_sample(space: SpaceDesc, count: usize, seed: u64) -> Vec<DualVector> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dual = space.norm.dual();
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let g: Vec<f64> = (0..space.dim)
            .map(|_| StandardNormal.sample(&mut rng))
            .collect();
        let n = norm_unchecked(&g, dual);
        if n < 1e-8 {
            continue;
        }
        let mut c: Vec<f64> = g.iter().map(|x| x / n).collect();
        // rounding may leave the norm a hair above one
        let n2 = norm_unchecked(&c, dual);
        if n2 > 1.0 {
            c.iter_mut().for_each(|x| *x /= n2);
        }
        out.push(DualVector { coords: c, space });
    }
    out
}

/// Numerical rank test: do the vectors span `R^dim`?
fn spans(members: &[DualVector], dim: usize) -> bool {
    let mut rows: Vec<Vec<f64>> = members.iter().map(|m| m.coords.clone()).collect();
    let scale = rows
        .iter()
        .flat_map(|r| r.iter())
        .fold(0.0f64, |m, x| m.max(x.abs()));
    if scale == 0.0 {
        return false;
    }
    let eps = 1e-10 * scale;
    let mut rank = 0;
    for col in 0..dim {
        let pivot = (rank..rows.len()).max_by(|&a, &b| {
            rows[a][col].abs().total_cmp(&rows[b][col].abs())
        });
        let Some(p) = pivot else { break };
        if rows[p][col].abs() <= eps {
            continue;
        }
        rows.swap(rank, p);
        let pivot_row = rows[rank].clone();
        for r in rows.iter_mut().skip(rank + 1) {
            let factor = r[col] / pivot_row[col];
            for (x, y) in r.iter_mut().zip(&pivot_row) {
                *x -= factor * y;
            }
        }
        rank += 1;
    }
    rank == dim
}

#[cfg(test)]
mod tests {
    use super::*;

    fn space(dim: usize, norm: NormTag) -> SpaceDesc {
        SpaceDesc::new(dim, norm).unwrap()
    }

    #[test]
    fn norm_examples() {
        assert_eq!(norm_eval(&[3.0, -4.0], NormTag::LInf).unwrap(), 4.0);
        assert_eq!(norm_eval(&[3.0, 4.0], NormTag::L2).unwrap(), 5.0);
        assert_eq!(norm_eval(&[3.0, -4.0], NormTag::L1).unwrap(), 7.0);
        assert!(matches!(
            norm_eval(&[], NormTag::L1),
            Err(Error::Dimension(_))
        ));
    }

    #[test]
    fn dual_is_an_involution() {
        assert_eq!(NormTag::L1.dual(), NormTag::LInf);
        assert_eq!(NormTag::L2.dual(), NormTag::L2);
        assert_eq!(NormTag::LInf.dual(), NormTag::L1);
        for t in NormTag::ALL {
            assert_eq!(t.dual().dual(), t);
        }
    }

    #[test]
    fn zero_dimension_rejected() {
        assert!(SpaceDesc::new(0, NormTag::L2).is_err());
    }

    #[test]
    fn norming_functional_examples() {
        let x = norming_functional(&[3.0, -4.0], space(2, NormTag::LInf)).unwrap();
        assert_eq!(x.coords, vec![0.0, -1.0]);
        let x = norming_functional(&[3.0, 4.0], space(2, NormTag::L2)).unwrap();
        assert!((x.coords[0] - 0.6).abs() < 1e-15 && (x.coords[1] - 0.8).abs() < 1e-15);
        let x = norming_functional(&[3.0, -4.0], space(2, NormTag::L1)).unwrap();
        assert_eq!(x.coords, vec![1.0, -1.0]);
        let x = norming_functional(&[0.0, -4.0], space(2, NormTag::L1)).unwrap();
        assert_eq!(x.coords, vec![1.0, -1.0]);
    }

    #[test]
    fn norming_functional_rejects_zero_and_bad_length() {
        assert!(matches!(
            norming_functional(&[0.0, 0.0], space(2, NormTag::L2)),
            Err(Error::Degenerate(_))
        ));
        assert!(matches!(
            norming_functional(&[1.0], space(2, NormTag::L2)),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn extreme_points_of_dual_l1_ball() {
        let c = build_candidates(space(2, NormTag::LInf), CandidateStrategy::ExtremePoints, 1, 0)
            .unwrap();
        let coords: Vec<_> = c.members().iter().map(|m| m.coords.clone()).collect();
        assert_eq!(
            coords,
            vec![vec![1.0, 0.0], vec![-1.0, 0.0], vec![0.0, 1.0], vec![0.0, -1.0]]
        );
        assert!(c.separating());
        assert_eq!(c.provenance(), &Provenance::ExtremePoints);
    }

    #[test]
    fn extreme_points_of_dual_linf_ball() {
        let c = build_candidates(space(2, NormTag::L1), CandidateStrategy::ExtremePoints, 1, 0)
            .unwrap();
        let coords: Vec<_> = c.members().iter().map(|m| m.coords.clone()).collect();
        assert_eq!(
            coords,
            vec![vec![1.0, 1.0], vec![1.0, -1.0], vec![-1.0, 1.0], vec![-1.0, -1.0]]
        );
    }

    #[test]
    fn sphere_samples_are_unit_and_reproducible() {
        let s = space(2, NormTag::L2);
        let a = build_candidates(s, CandidateStrategy::SphereSample, 8, 7).unwrap();
        let b = build_candidates(s, CandidateStrategy::SphereSample, 8, 7).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.len(), 8);
        for m in a.members() {
            assert!((m.dual_norm() - 1.0).abs() < 1e-12);
        }
        assert!(a.separating());
        let w: f64 = a.weights().unwrap().iter().sum();
        assert!((w - 1.0).abs() < 1e-12);
    }

    #[test]
    fn smooth_ball_falls_back_with_notice() {
        let c = build_candidates(space(3, NormTag::L2), CandidateStrategy::ExtremePoints, 16, 3)
            .unwrap();
        assert_eq!(
            c.provenance(),
            &Provenance::ExtremePointsFallback { seed: 3, count: 16 }
        );
        assert!(!c.provenance().is_complete_extreme_set());
        assert!(c.to_owned().provenance().to_string().contains("fell back"));
    }

    #[test]
    fn one_dimensional_ell2_has_two_extreme_points() {
        let c = build_candidates(space(1, NormTag::L2), CandidateStrategy::ExtremePoints, 4, 0)
            .unwrap();
        assert_eq!(c.len(), 2);
        assert!(c.provenance().is_complete_extreme_set());
    }

    #[test]
    fn explicit_sets_are_validated() {
        let s = space(2, NormTag::LInf);
        assert!(DualCandidateSet::explicit(s, vec![vec![1.0, 0.5]], None).is_err());
        assert!(DualCandidateSet::explicit(s, vec![vec![0.5, 0.5]], Some(vec![0.7])).is_err());
        let c = DualCandidateSet::explicit(s, vec![vec![0.5, 0.5]], Some(vec![1.0])).unwrap();
        assert!(!c.separating());
        assert!(DualCandidateSet::explicit(s, vec![], None).is_err());
    }
}
