//! Vector measures on finite atomic models: semivariation, μ-dense set
//! families, atomic and gauge integration, and the `L^p`, Kuelbs-Steadman
//! and Alexiewicz norms, with a property-checking harness.

pub mod error;
pub mod integration;
pub mod measures;
pub mod norms;
pub mod spaces;
pub mod verify;
pub mod weights;

pub use error::{Error, Result};
pub use integration::{
    alexiewicz_norm, hk_integrate, kl_integral_simple, lebesgue_atomic, HkOptions, HkResult, Integrand, MFunc,
};
pub use measures::{
    build_family, check_mu_dense, scalarize, semivariation, variation, Atom, DenseFamily, FamilyKind, MSet,
    ScalarMeasure, Semivariation, VectorMeasure,
};
pub use norms::{
    hkl_norm, ks2_inner, ksp_norm, ksp_weak_norm, lp_norm, weighted_power_bound, NormResult, PExponent,
};
pub use spaces::{
    build_candidates, norm_eval, norming_functional, CandidateStrategy, DualCandidateSet, DualVector, NormTag,
    Provenance, SpaceDesc,
};
