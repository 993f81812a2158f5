//! Seeded random models and the named fixtures.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::Result;
use crate::integration::MFunc;
use crate::measures::{build_family, Atom, DenseFamily, FamilyKind, MSet, VectorMeasure};
use crate::spaces::{build_candidates, CandidateStrategy, DualCandidateSet, NormTag, SpaceDesc};

/// Samples per sphere-sampled candidate set in random models.
pub const RANDOM_SPHERE_SAMPLES: usize = 16;

/// A measure with named functions, a set family and candidate functionals.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Fixture {
    pub name: String,
    pub measure: VectorMeasure,
    pub functions: BTreeMap<String, MFunc>,
    pub family: DenseFamily,
    pub candidates: DualCandidateSet,
}

/// One model with two functions, the unit most checks run on.
#[derive(Debug, Clone)]
pub struct Instance {
    pub label: String,
    pub mu: VectorMeasure,
    pub f: MFunc,
    pub g: MFunc,
    pub fam: DenseFamily,
    pub d: DualCandidateSet,
}

/// RNG for stream `stream` of a run seeded with `seed`.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Dyadic rational `k/8` with `|k/8| ≤ 4`.
pub fn dyadic(rng: &mut impl Rng) -> f64 {
    rng.random_range(-32i32..=32) as f64 / 8.0
}

pub fn dyadic_vec(rng: &mut impl Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| dyadic(rng)).collect()
}

/// Default candidates: every extreme point of a polytopal dual ball, seeded
/// sphere samples otherwise; geometric weights either way.
pub fn default_candidates(space: SpaceDesc, samples: usize, seed: u64) -> Result<DualCandidateSet> {
    if space.dual_ball_is_polytope() {
        build_candidates(space, CandidateStrategy::ExtremePoints, 0, seed)
    } else {
        build_candidates(space, CandidateStrategy::SphereSample, samples, seed)
    }
}

/// A random model: 2 to 8 atoms, dimension 1 to 4, the norm cycling with
/// `index`; each atom is the zero vector with probability 1/8.
pub fn random_instance(rng: &mut ChaCha8Rng, index: usize) -> Result<Instance> {
    let norm = NormTag::ALL[index % 3];
    let atoms = rng.random_range(2..=8usize);
    let dim = rng.random_range(1..=4usize);
    let space = SpaceDesc::new(dim, norm)?;
    let values: Vec<Vec<f64>> = (0..atoms)
        .map(|_| {
            if rng.random_range(0..8) == 0 {
                vec![0.0; dim]
            } else {
                dyadic_vec(rng, dim)
            }
        })
        .collect();
    let mu = VectorMeasure::from_values(space, values)?;
    let kind = if rng.random_bool(0.5) {
        FamilyKind::AllSubsets
    } else {
        FamilyKind::Dyadic
    };
    let fam = build_family(&mu, kind, None)?;
    let d = default_candidates(space, RANDOM_SPHERE_SAMPLES, rng.random())?;
    let f = MFunc::new(dyadic_vec(rng, atoms))?;
    let g = MFunc::new(dyadic_vec(rng, atoms))?;
    let kind_name = match kind {
        FamilyKind::AllSubsets => "all_subsets",
        _ => "dyadic",
    };
    Ok(Instance {
        label: format!("random #{index}: {atoms} atoms in {norm}^{dim}, {kind_name}"),
        mu,
        f,
        g,
        fam,
        d,
    })
}

pub fn random_instances(seed: u64, count: usize) -> Result<Vec<Instance>> {
    let mut rng = stream_rng(seed, 0);
    (0..count).map(|i| random_instance(&mut rng, i)).collect()
}

impl Fixture {
    /// Instances pairing each function with the next one in name order.
    pub fn instances(&self) -> Vec<Instance> {
        let funcs: Vec<(&String, &MFunc)> = self.functions.iter().collect();
        (0..funcs.len())
            .map(|i| {
                let (nf, f) = funcs[i];
                let (ng, g) = funcs[(i + 1) % funcs.len()];
                Instance {
                    label: format!("fixture {}: f={nf}, g={ng}", self.name),
                    mu: self.measure.clone(),
                    f: f.clone(),
                    g: g.clone(),
                    fam: self.family.clone(),
                    d: self.candidates.clone(),
                }
            })
            .collect()
    }
}

fn functions(pairs: &[(&str, &[f64])]) -> Result<BTreeMap<String, MFunc>> {
    pairs
        .iter()
        .map(|(n, v)| Ok((n.to_string(), MFunc::new(v.to_vec())?)))
        .collect()
}

/// Two atoms of mass ½ on the line, the all-subsets family and `D = {±1}`:
/// the `KS¹` norm of `f = (1, 1)` is 4/15.
pub fn ks_four_fifteenths() -> Result<Fixture> {
    let space = SpaceDesc::new(1, NormTag::L2)?;
    let measure = VectorMeasure::new(space, vec![Atom::new("left", vec![0.5]), Atom::new("right", vec![0.5])])?;
    let family = build_family(&measure, FamilyKind::AllSubsets, None)?;
    let candidates = build_candidates(space, CandidateStrategy::ExtremePoints, 0, 0)?;
    Ok(Fixture {
        name: "ks-4-15".into(),
        functions: functions(&[("f", &[1.0, 1.0]), ("zero", &[0.0, 0.0])])?,
        measure,
        family,
        candidates,
    })
}

/// The unit vectors of `ℓ∞²`: semivariation 1, variation 2.
pub fn ellinf_square() -> Result<Fixture> {
    let space = SpaceDesc::new(2, NormTag::LInf)?;
    let measure = VectorMeasure::from_values(space, vec![vec![1.0, 0.0], vec![0.0, 1.0]])?;
    let family = build_family(&measure, FamilyKind::AllSubsets, None)?;
    let candidates = build_candidates(space, CandidateStrategy::ExtremePoints, 0, 0)?;
    Ok(Fixture {
        name: "ellinf-square".into(),
        functions: functions(&[("f", &[2.0, -3.0]), ("g", &[1.0, 1.0])])?,
        measure,
        family,
        candidates,
    })
}

/// Equal masses with `f = (1, 1)` and `g = (1, -1)`: `|f| = |g|`, yet the
/// signed-integrand `KS¹` norm of `f` is larger.
pub fn signed_lattice_counterexample() -> Result<Fixture> {
    let space = SpaceDesc::new(1, NormTag::L2)?;
    let measure = VectorMeasure::from_values(space, vec![vec![0.5], vec![0.5]])?;
    let family = build_family(&measure, FamilyKind::AllSubsets, None)?;
    let candidates = build_candidates(space, CandidateStrategy::ExtremePoints, 0, 0)?;
    Ok(Fixture {
        name: "signed-lattice-counterexample".into(),
        functions: functions(&[("f", &[1.0, 1.0]), ("g", &[1.0, -1.0])])?,
        measure,
        family,
        candidates,
    })
}

/// Every atom is the zero vector.
pub fn zero_measure() -> Result<Fixture> {
    let space = SpaceDesc::new(2, NormTag::L1)?;
    let measure = VectorMeasure::from_values(space, vec![vec![0.0, 0.0]; 3])?;
    let family = build_family(&measure, FamilyKind::AllSubsets, None)?;
    let candidates = build_candidates(space, CandidateStrategy::ExtremePoints, 0, 0)?;
    Ok(Fixture {
        name: "zero-measure".into(),
        functions: functions(&[("f", &[1.0, -2.0, 0.5]), ("g", &[0.0, 3.0, -1.0])])?,
        measure,
        family,
        candidates,
    })
}

pub const BUILTIN_FIXTURES: [&str; 4] = [
    "ks-4-15",
    "ellinf-square",
    "signed-lattice-counterexample",
    "zero-measure",
];

pub fn builtin_fixture(name: &str) -> Option<Result<Fixture>> {
    Some(match name {
        "ks-4-15" => ks_four_fifteenths(),
        "ellinf-square" => ellinf_square(),
        "signed-lattice-counterexample" => signed_lattice_counterexample(),
        "zero-measure" => zero_measure(),
        _ => return None,
    })
}

/// The sets `A ⊆ B` among all subsets of `atoms` atoms, as pairs.
pub fn nested_pairs(atoms: usize) -> impl Iterator<Item = (MSet, MSet)> {
    let full = MSet::full(atoms).bits();
    (0..=full).flat_map(move |b| {
        // submasks of b
        let mut a = b;
        let mut done = false;
        std::iter::from_fn(move || {
            if done {
                return None;
            }
            let out = (MSet::from_bits(a, atoms).ok()?, MSet::from_bits(b, atoms).ok()?);
            if a == 0 {
                done = true;
            } else {
                a = (a - 1) & b;
            }
            Some(out)
        })
    })
}
