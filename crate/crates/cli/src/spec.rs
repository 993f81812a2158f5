//! Measure spec files: a JSON description of a measure, named functions, a
//! set family and dual candidates.
//!
//! Numbers may be written as JSON numbers or as strings holding a decimal or
//! an integer ratio such as `"-3/8"`, which keeps dyadic inputs exact.

use std::collections::BTreeMap;
use std::fmt;

use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use ksnorm::measures::family::EXHAUSTIVE_CAP;
use ksnorm::verify::Fixture;
use ksnorm::{
    build_candidates, build_family, Atom, CandidateStrategy, DenseFamily, DualCandidateSet, FamilyKind, MFunc, MSet,
    NormTag, Provenance, SpaceDesc, VectorMeasure,
};

pub const SCHEMA_VERSION: u32 = 1;

/// Sphere samples drawn for ℓ2 spaces when the file names no strategy.
pub const DEFAULT_SPHERE_SAMPLES: usize = 64;

/// Atoms up to which the default family is `all_subsets`.
pub const DEFAULT_ALL_SUBSETS_ATOMS: usize = 8;

/// A number read from a decimal, an integer or a `"p/q"` string.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Num(pub f64);

impl Serialize for Num {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_f64(self.0)
    }
}

impl<'de> Deserialize<'de> for Num {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct NumVisitor;

        impl Visitor<'_> for NumVisitor {
            type Value = Num;

            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a number or a string like \"3/8\"")
            }

            fn visit_f64<E: de::Error>(self, v: f64) -> Result<Num, E> {
                Ok(Num(v))
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> Result<Num, E> {
                Ok(Num(v as f64))
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> Result<Num, E> {
                Ok(Num(v as f64))
            }

            fn visit_str<E: de::Error>(self, v: &str) -> Result<Num, E> {
                parse_number(v).map(Num).map_err(E::custom)
            }
        }

        d.deserialize_any(NumVisitor)
    }
}

pub fn parse_number(s: &str) -> Result<f64, String> {
    let s = s.trim();
    let v = match s.split_once('/') {
        Some((p, q)) => {
            let p: i64 = p.trim().parse().map_err(|_| format!("bad numerator in `{s}`"))?;
            let q: i64 = q.trim().parse().map_err(|_| format!("bad denominator in `{s}`"))?;
            if q == 0 {
                return Err(format!("zero denominator in `{s}`"));
            }
            p as f64 / q as f64
        }
        None => s.parse::<f64>().map_err(|_| format!("cannot read `{s}` as a number"))?,
    };
    if v.is_finite() {
        Ok(v)
    } else {
        Err(format!("`{s}` is not finite"))
    }
}

fn nums(v: &[Num]) -> Vec<f64> {
    v.iter().map(|n| n.0).collect()
}

fn to_nums(v: &[f64]) -> Vec<Num> {
    v.iter().copied().map(Num).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpaceSpec {
    pub dim: usize,
    pub norm: NormTag,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AtomSpec {
    pub id: String,
    pub value: Vec<Num>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilySpec {
    pub kind: FamilyKind,
    /// Sets as lists of atom ids; required for `explicit`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sets: Option<Vec<Vec<String>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<Num>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StrategySpec {
    ExtremePoints,
    SphereSample,
    Explicit,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CandidateSpec {
    pub strategy: StrategySpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub size: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vectors: Option<Vec<Vec<Num>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<Num>>,
}

/// The on-disk form of a model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeasureSpecFile {
    pub schema_version: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub space: SpaceSpec,
    pub atoms: Vec<AtomSpec>,
    #[serde(default)]
    pub functions: BTreeMap<String, Vec<Num>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub family: Option<FamilySpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub candidates: Option<CandidateSpec>,
}

/// A diagnostic naming the offending field, and the line when the JSON
/// itself is malformed.
#[derive(Debug, Clone, PartialEq)]
pub struct SpecError {
    pub field: String,
    pub line: Option<usize>,
    pub message: String,
}

impl fmt::Display for SpecError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(l) => write!(f, "line {l}, field `{}`: {}", self.field, self.message),
            None => write!(f, "field `{}`: {}", self.field, self.message),
        }
    }
}

impl std::error::Error for SpecError {}

fn at(field: impl Into<String>, message: impl fmt::Display) -> SpecError {
    SpecError {
        field: field.into(),
        line: None,
        message: message.to_string(),
    }
}

/// Overrides applied on top of the file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub family: Option<FamilyKind>,
    pub candidates: Option<CandidateStrategy>,
    pub size: Option<usize>,
    pub seed: Option<u64>,
}

impl MeasureSpecFile {
    pub fn from_json(text: &str) -> Result<Self, SpecError> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let file: MeasureSpecFile = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            let inner = e.into_inner();
            SpecError {
                field: if path == "." { "<root>".into() } else { path },
                line: Some(inner.line()),
                message: inner.to_string(),
            }
        })?;
        if file.schema_version != SCHEMA_VERSION {
            return Err(at(
                "schema_version",
                format!("unsupported version {}, expected {SCHEMA_VERSION}", file.schema_version),
            ));
        }
        Ok(file)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("spec serializes");
        s.push('\n');
        s
    }

    /// Validates into a model, `name` naming it when the file does not.
    pub fn validate(&self, name: &str, ov: &Overrides) -> Result<Fixture, SpecError> {
        let space = SpaceDesc::new(self.space.dim, self.space.norm).map_err(|e| at("space.dim", e))?;
        if self.atoms.is_empty() {
            return Err(at("atoms", "at least one atom is required"));
        }
        for (i, a) in self.atoms.iter().enumerate() {
            if a.value.len() != space.dim {
                return Err(at(
                    format!("atoms[{i}].value"),
                    format!("expected {} coordinates, got {}", space.dim, a.value.len()),
                ));
            }
        }
        let atoms: Vec<Atom> = self.atoms.iter().map(|a| Atom::new(a.id.clone(), nums(&a.value))).collect();
        let measure = VectorMeasure::new(space, atoms).map_err(|e| at("atoms", e))?;
        let m = measure.len();

        let mut functions = BTreeMap::new();
        for (fname, values) in &self.functions {
            let field = format!("functions.{fname}");
            if values.len() != m {
                return Err(at(field, format!("expected {m} values, one per atom, got {}", values.len())));
            }
            functions.insert(fname.clone(), MFunc::new(nums(values)).map_err(|e| at(field, e))?);
        }

        let family = self.build_family(&measure, ov)?;
        let candidates = self.build_candidates(space, ov)?;
        Ok(Fixture {
            name: self.name.clone().unwrap_or_else(|| name.to_string()),
            measure,
            functions,
            family,
            candidates,
        })
    }

    fn build_family(&self, mu: &VectorMeasure, ov: &Overrides) -> Result<DenseFamily, SpecError> {
        let spec = self.family.as_ref();
        let default = if mu.len() <= DEFAULT_ALL_SUBSETS_ATOMS {
            FamilyKind::AllSubsets
        } else {
            FamilyKind::Dyadic
        };
        let kind = ov.family.or(spec.map(|f| f.kind)).unwrap_or(default);
        if kind == FamilyKind::AllSubsets && mu.len() > EXHAUSTIVE_CAP {
            return Err(at(
                "family.kind",
                format!("all_subsets is limited to {EXHAUSTIVE_CAP} atoms, the model has {}", mu.len()),
            ));
        }
        if kind != FamilyKind::Explicit {
            return build_family(mu, kind, None).map_err(|e| at("family", e));
        }
        let spec = spec.filter(|f| f.kind == FamilyKind::Explicit);
        let Some(sets) = spec.and_then(|f| f.sets.as_ref()) else {
            return Err(at("family.sets", "an explicit family needs its sets"));
        };
        let index: BTreeMap<&str, usize> = mu.atoms().iter().enumerate().map(|(i, a)| (a.id.as_str(), i)).collect();
        let mut parsed = Vec::with_capacity(sets.len());
        for (k, set) in sets.iter().enumerate() {
            let mut ids = Vec::with_capacity(set.len());
            for (j, id) in set.iter().enumerate() {
                let i = index
                    .get(id.as_str())
                    .ok_or_else(|| at(format!("family.sets[{k}][{j}]"), format!("unknown atom id `{id}`")))?;
                ids.push(*i);
            }
            parsed.push(MSet::from_indices(ids, mu.len()).map_err(|e| at(format!("family.sets[{k}]"), e))?);
        }
        match spec.and_then(|f| f.weights.as_ref()) {
            Some(w) => DenseFamily::with_weights(mu, kind, parsed, nums(w)).map_err(|e| at("family.weights", e)),
            None => DenseFamily::new(mu, kind, parsed).map_err(|e| at("family.sets", e)),
        }
    }

    fn build_candidates(&self, space: SpaceDesc, ov: &Overrides) -> Result<DualCandidateSet, SpecError> {
        let spec = self.candidates.as_ref();
        let default = if space.dual_ball_is_polytope() {
            StrategySpec::ExtremePoints
        } else {
            StrategySpec::SphereSample
        };
        let strategy = match ov.candidates {
            Some(CandidateStrategy::ExtremePoints) => StrategySpec::ExtremePoints,
            Some(CandidateStrategy::SphereSample) => StrategySpec::SphereSample,
            None => spec.map(|c| c.strategy).unwrap_or(default),
        };
        let size = ov.size.or(spec.and_then(|c| c.size)).unwrap_or(DEFAULT_SPHERE_SAMPLES);
        let seed = ov.seed.or(spec.and_then(|c| c.seed)).unwrap_or(0);
        let built = match strategy {
            StrategySpec::ExtremePoints => build_candidates(space, CandidateStrategy::ExtremePoints, size, seed),
            StrategySpec::SphereSample => build_candidates(space, CandidateStrategy::SphereSample, size, seed),
            StrategySpec::Explicit => {
                let Some(vectors) = spec.and_then(|c| c.vectors.as_ref()) else {
                    return Err(at("candidates.vectors", "the explicit strategy needs its vectors"));
                };
                for (i, v) in vectors.iter().enumerate() {
                    if v.len() != space.dim {
                        return Err(at(
                            format!("candidates.vectors[{i}]"),
                            format!("expected {} coordinates, got {}", space.dim, v.len()),
                        ));
                    }
                }
                let members = vectors.iter().map(|v| nums(v)).collect();
                let weights = spec.and_then(|c| c.weights.as_deref()).map(nums);
                return DualCandidateSet::explicit(space, members, weights).map_err(|e| at("candidates", e));
            }
        };
        let set = built.map_err(|e| at("candidates", e))?;
        match spec.and_then(|c| c.weights.as_deref()) {
            Some(w) if ov.candidates.is_none() => set.with_weights(nums(w)).map_err(|e| at("candidates.weights", e)),
            _ => Ok(set),
        }
    }

    /// The file that validates back to `fx`.
    pub fn from_fixture(fx: &Fixture) -> Self {
        let mu = &fx.measure;
        let space = mu.space();
        let atoms = mu
            .atoms()
            .iter()
            .map(|a| AtomSpec {
                id: a.id.clone(),
                value: to_nums(&a.value),
            })
            .collect();
        let functions = fx.functions.iter().map(|(k, f)| (k.clone(), to_nums(f.values()))).collect();
        let family = match fx.family.kind() {
            FamilyKind::Explicit => FamilySpec {
                kind: FamilyKind::Explicit,
                sets: Some(
                    fx.family
                        .sets()
                        .iter()
                        .map(|s| s.iter().map(|i| mu.atoms()[i].id.clone()).collect())
                        .collect(),
                ),
                weights: Some(to_nums(fx.family.weights())),
            },
            kind => FamilySpec {
                kind,
                sets: None,
                weights: None,
            },
        };
        let d = &fx.candidates;
        let weights = d.weights().map(to_nums);
        let candidates = match d.provenance() {
            Provenance::ExtremePoints => CandidateSpec {
                strategy: StrategySpec::ExtremePoints,
                size: None,
                seed: None,
                vectors: None,
                weights,
            },
            Provenance::ExtremePointsFallback { seed, count } => CandidateSpec {
                strategy: StrategySpec::ExtremePoints,
                size: Some(*count),
                seed: Some(*seed),
                vectors: None,
                weights,
            },
            Provenance::SphereSample { seed, count } => CandidateSpec {
                strategy: StrategySpec::SphereSample,
                size: Some(*count),
                seed: Some(*seed),
                vectors: None,
                weights,
            },
            Provenance::Explicit => CandidateSpec {
                strategy: StrategySpec::Explicit,
                size: None,
                seed: None,
                vectors: Some(d.members().iter().map(|m| to_nums(&m.coords)).collect()),
                weights,
            },
        };
        MeasureSpecFile {
            schema_version: SCHEMA_VERSION,
            name: Some(fx.name.clone()),
            space: SpaceSpec {
                dim: space.dim,
                norm: space.norm,
            },
            atoms,
            functions,
            family: Some(family),
            candidates: Some(candidates),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers_accept_ratios_and_decimals() {
        assert_eq!(parse_number("3/8"), Ok(0.375));
        assert_eq!(parse_number(" -5/4 "), Ok(-1.25));
        assert_eq!(parse_number("0.5"), Ok(0.5));
        assert!(parse_number("1/0").is_err());
        assert!(parse_number("x").is_err());
        assert!(parse_number("inf").is_err());
    }

    #[test]
    fn minimal_file_uses_defaults() {
        let text = r#"{
            "schema_version": 1,
            "space": {"dim": 2, "norm": "ell2"},
            "atoms": [{"id": "a", "value": [1, "1/2"]}, {"id": "b", "value": [0, -1]}],
            "functions": {"f": ["1/4", 2]}
        }"#;
        let fx = MeasureSpecFile::from_json(text).unwrap().validate("m", &Overrides::default()).unwrap();
        assert_eq!(fx.name, "m");
        assert_eq!(fx.measure.value(0), &[1.0, 0.5]);
        assert_eq!(fx.family.kind(), FamilyKind::AllSubsets);
        assert_eq!(fx.candidates.len(), DEFAULT_SPHERE_SAMPLES);
        assert_eq!(fx.functions["f"].values(), &[0.25, 2.0]);
    }

    #[test]
    fn diagnostics_name_the_field() {
        let bad_value = r#"{"schema_version": 1, "space": {"dim": 1, "norm": "ell1"},
            "atoms": [{"id": "a", "value": ["1/x"]}]}"#;
        let e = MeasureSpecFile::from_json(bad_value).unwrap_err();
        assert_eq!(e.field, "atoms[0].value[0]");
        assert_eq!(e.line, Some(2));

        let bad_norm = r#"{"schema_version": 1, "space": {"dim": 1, "norm": "ell3"}, "atoms": []}"#;
        assert_eq!(MeasureSpecFile::from_json(bad_norm).unwrap_err().field, "space.norm");

        let short = r#"{"schema_version": 1, "space": {"dim": 1, "norm": "ell1"},
            "atoms": [{"id": "a", "value": [1]}], "functions": {"f": [1, 2]}}"#;
        let e = MeasureSpecFile::from_json(short).unwrap().validate("m", &Overrides::default()).unwrap_err();
        assert_eq!(e.field, "functions.f");

        let stray = r#"{"schema_version": 1, "space": {"dim": 1, "norm": "ell1"},
            "atoms": [{"id": "a", "value": [1]}],
            "family": {"kind": "explicit", "sets": [["a"], ["b"]]}}"#;
        let e = MeasureSpecFile::from_json(stray).unwrap().validate("m", &Overrides::default()).unwrap_err();
        assert_eq!(e.field, "family.sets[1][0]");

        let version = r#"{"schema_version": 2, "space": {"dim": 1, "norm": "ell1"}, "atoms": []}"#;
        assert_eq!(MeasureSpecFile::from_json(version).unwrap_err().field, "schema_version");
    }
}
