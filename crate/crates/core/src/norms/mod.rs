//! Norms of atomic functions: `L^p[μ]`, the Kuelbs-Steadman norms
//! `KS^p[μ]` and their weak-topology variant, the Alexiewicz norm and the
//! `KS²` inner product.
//!
//! Suprema over the dual unit ball are taken over a finite candidate set
//! `D`. Every inequality between these norms holds for each functional
//! separately, so it survives this replacement exactly when both sides share
//! `D`.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::integration::{alexiewicz_scalar, MFunc};
use crate::measures::{scalarize, semivariation, DenseFamily, VectorMeasure};
use crate::spaces::{DualCandidateSet, Provenance};

mod series;

pub use series::{weighted_minkowski, weighted_minkowski2, weighted_power_bound, weighted_power_mean};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PExponent {
    Finite(f64),
    Infinity,
}

impl PExponent {
    pub fn new(p: f64) -> Result<Self> {
        if p == f64::INFINITY {
            Ok(PExponent::Infinity)
        } else if p.is_finite() && p >= 1.0 {
            Ok(PExponent::Finite(p))
        } else {
            Err(Error::InvalidExponent(p))
        }
    }

    pub fn value(self) -> f64 {
        match self {
            PExponent::Finite(p) => p,
            PExponent::Infinity => f64::INFINITY,
        }
    }
}

impl FromStr for PExponent {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "inf" | "infinity" | "∞" => Ok(PExponent::Infinity),
            t => {
                let p: f64 = t
                    .parse()
                    .map_err(|_| Error::Validation(format!("cannot read exponent `{t}`")))?;
                PExponent::new(p)
            }
        }
    }
}

impl fmt::Display for PExponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PExponent::Finite(p) => write!(f, "{p}"),
            PExponent::Infinity => f.write_str("inf"),
        }
    }
}

impl Serialize for PExponent {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            PExponent::Finite(p) => s.serialize_f64(*p),
            PExponent::Infinity => s.serialize_str("inf"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NormResult {
    pub value: f64,
    /// The dual-ball supremum was replaced by a maximum over candidates that
    /// is not known to attain it, so `value` is a lower bound.
    pub lower_bound_certified: bool,
    /// Bound on what the dropped terms of a truncated series can add.
    pub series_tail_bound: f64,
    pub candidate_provenance: Provenance,
}

/// `M = ‖μ‖(T) + 1`, the constant of the embedding `L^q ⊂ KS^p`.
pub fn embedding_constant(mu: &VectorMeasure) -> Result<f64> {
    Ok(semivariation(mu, mu.full())?.value + 1.0)
}

/// `f_i |<x', v_i>|` per atom, for each candidate.
fn weighted_terms(f: &MFunc, mu: &VectorMeasure, d: &DualCandidateSet, use_modulus: bool) -> Result<Vec<Vec<f64>>> {
    f.check_len(mu.len())?;
    if d.is_empty() {
        return Err(Error::Empty("candidate set"));
    }
    d.members()
        .iter()
        .map(|x| {
            let nu = scalarize(mu, x)?;
            Ok(f.values()
                .iter()
                .zip(&nu.atom_values)
                .map(|(v, w)| if use_modulus { v.abs() } else { *v } * w.abs())
                .collect())
        })
        .collect()
}

/// `a_k = |Σ_{i∈B_k} t_i|` for the first `terms` sets.
fn set_integrals(t: &[f64], fam: &DenseFamily, terms: usize) -> Vec<f64> {
    fam.sets()[..terms]
        .iter()
        .map(|b| b.iter().map(|i| t[i]).sum::<f64>().abs())
        .collect()
}

fn max_of(values: impl ParallelIterator<Item = f64>) -> f64 {
    values.reduce(|| 0.0, f64::max)
}

/// Every functional attaining the supremum of a convex function over the
/// dual ball is among the candidates.
fn attains(d: &DualCandidateSet, convex: bool) -> bool {
    convex && d.provenance().is_complete_extreme_set()
}

/// `‖f‖_{L^p[μ]}`: `max_{x'∈D} (Σ |f_i|^p |<x', v_i>|)^(1/p)` for finite
/// `p`; for `p = ∞` the largest `|f_i|` over atoms some candidate sees.
pub fn lp_norm(f: &MFunc, mu: &VectorMeasure, p: PExponent, d: &DualCandidateSet) -> Result<NormResult> {
    f.check_len(mu.len())?;
    if d.is_empty() {
        return Err(Error::Empty("candidate set"));
    }
    let nus: Vec<Vec<f64>> = d
        .members()
        .iter()
        .map(|x| scalarize(mu, x).map(|n| n.atom_values))
        .collect::<Result<_>>()?;
    let value = match p {
        PExponent::Infinity => (0..mu.len())
            .filter(|&i| nus.iter().any(|nu| nu[i] != 0.0))
            .map(|i| f.values()[i].abs())
            .fold(0.0, f64::max),
        PExponent::Finite(p) => {
            let fp: Vec<f64> = f.values().iter().map(|v| v.abs().powf(p)).collect();
            max_of(nus.par_iter().map(|nu| {
                let s: f64 = fp.iter().zip(nu).map(|(a, w)| a * w.abs()).sum();
                s.powf(1.0 / p)
            }))
        }
    };
    Ok(NormResult {
        value,
        lower_bound_certified: !attains(d, true),
        series_tail_bound: 0.0,
        candidate_provenance: d.provenance().clone(),
    })
}

/// `‖f‖_{KS^p[μ]}`: `max_{x'∈D} (Σ_k η_k a_k^p)^(1/p)` with
/// `a_k = |∫_{B_k} f d|x'μ||`, or `sup_k a_k` for `p = ∞`. With
/// `use_modulus` the integrand is `|f|`.
pub fn ksp_norm(
    f: &MFunc,
    mu: &VectorMeasure,
    p: PExponent,
    fam: &DenseFamily,
    d: &DualCandidateSet,
    use_modulus: bool,
) -> Result<NormResult> {
    ksp_norm_truncated(f, mu, p, fam, d, use_modulus, fam.len())
}

/// [`ksp_norm`] over the first `terms` sets only. The dropped sets carry
/// weight `τ = Σ_{k>terms} η_k`, and each dropped `a_k` is at most the
/// Alexiewicz value `A(x')`, so the full value exceeds the returned one by at
/// most `max_{x'} A(x') τ^(1/p)`, reported as `series_tail_bound`.
pub fn ksp_norm_truncated(
    f: &MFunc,
    mu: &VectorMeasure,
    p: PExponent,
    fam: &DenseFamily,
    d: &DualCandidateSet,
    use_modulus: bool,
    terms: usize,
) -> Result<NormResult> {
    if fam.is_empty() {
        return Err(Error::Empty("set family"));
    }
    if terms == 0 || terms > fam.len() {
        return Err(Error::Validation(format!(
            "cannot keep {terms} of {} family sets",
            fam.len()
        )));
    }
    let t = weighted_terms(f, mu, d, use_modulus)?;
    let eta = &fam.weights()[..terms];
    let tail: f64 = fam.weights()[terms..].iter().sum();
    let per: Vec<(f64, f64)> = t
        .par_iter()
        .map(|t| {
            let a = set_integrals(t, fam, terms);
            let kept = weighted_power_mean(&a, eta, p);
            let bound = if terms == fam.len() {
                0.0
            } else {
                let cap = alexiewicz_terms(t);
                match p {
                    PExponent::Finite(p) => cap * tail.powf(1.0 / p),
                    PExponent::Infinity => (cap - kept).max(0.0),
                }
            };
            (kept, bound)
        })
        .collect();
    let value = per.iter().map(|x| x.0).fold(0.0, f64::max);
    let series_tail_bound = per.iter().map(|x| x.1).fold(0.0, f64::max);
    let uniform_sign = use_modulus
        || f.values().iter().all(|v| *v >= 0.0)
        || f.values().iter().all(|v| *v <= 0.0);
    Ok(NormResult {
        value,
        lower_bound_certified: !attains(d, uniform_sign),
        series_tail_bound,
        candidate_provenance: d.provenance().clone(),
    })
}

fn alexiewicz_terms(t: &[f64]) -> f64 {
    let pos: f64 = t.iter().filter(|x| **x > 0.0).sum();
    let neg: f64 = -t.iter().filter(|x| **x < 0.0).sum::<f64>();
    pos.max(neg)
}

/// `‖f‖_{KS^p[wτμ]}`: `(Σ_h ω_h Σ_k η_k a_{k,h}^p)^(1/p)` over the weighted
/// candidates `x'_h`, or `sup_{h,k} a_{k,h}` for `p = ∞`.
pub fn ksp_weak_norm(
    f: &MFunc,
    mu: &VectorMeasure,
    p: PExponent,
    fam: &DenseFamily,
    d: &DualCandidateSet,
    use_modulus: bool,
) -> Result<NormResult> {
    let omega = d.weights().ok_or(Error::MissingWeights)?;
    let t = weighted_terms(f, mu, d, use_modulus)?;
    let a: Vec<Vec<f64>> = t.par_iter().map(|t| set_integrals(t, fam, fam.len())).collect();
    let value = match p {
        PExponent::Infinity => a.iter().flatten().fold(0.0f64, |m, x| m.max(*x)),
        PExponent::Finite(_) => {
            let mut weights = Vec::with_capacity(a.len() * fam.len());
            for w in omega {
                weights.extend(fam.weights().iter().map(|e| w * e));
            }
            let flat: Vec<f64> = a.into_iter().flatten().collect();
            weighted_power_mean(&flat, &weights, p)
        }
    };
    Ok(NormResult {
        value,
        lower_bound_certified: false,
        series_tail_bound: 0.0,
        candidate_provenance: d.provenance().clone(),
    })
}

/// `<f, g> = Σ_h ω_h Σ_k η_k (∫_{B_k} f d|x'_h μ|)(∫_{B_k} g d|x'_h μ|)`,
/// the set weights doubling as the inner weights.
pub fn ks2_inner(f: &MFunc, g: &MFunc, mu: &VectorMeasure, fam: &DenseFamily, d: &DualCandidateSet) -> Result<f64> {
    let omega = d.weights().ok_or(Error::MissingWeights)?;
    let tf = weighted_terms(f, mu, d, false)?;
    let tg = weighted_terms(g, mu, d, false)?;
    let mut total = 0.0;
    for ((w, tf), tg) in omega.iter().zip(&tf).zip(&tg) {
        let mut inner = 0.0;
        for (b, e) in fam.sets().iter().zip(fam.weights()) {
            let x: f64 = b.iter().map(|i| tf[i]).sum();
            let y: f64 = b.iter().map(|i| tg[i]).sum();
            inner += e * (x * y);
        }
        total += w * inner;
    }
    Ok(total)
}

/// The Alexiewicz norm `max_{x'∈D} sup_A |∫_A f d|x'μ||`. The per-functional
/// value is convex in `x'`, so a complete extreme-point set attains it.
pub fn hkl_norm(f: &MFunc, mu: &VectorMeasure, d: &DualCandidateSet) -> Result<NormResult> {
    f.check_len(mu.len())?;
    if d.is_empty() {
        return Err(Error::Empty("candidate set"));
    }
    let mut value = 0.0f64;
    for x in d.members() {
        value = value.max(alexiewicz_scalar(f, &scalarize(mu, x)?)?);
    }
    Ok(NormResult {
        value,
        lower_bound_certified: !attains(d, true),
        series_tail_bound: 0.0,
        candidate_provenance: d.provenance().clone(),
    })
}
