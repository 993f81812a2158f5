//! Named test integrands with known antiderivatives.

use std::fmt;

use serde::Serialize;

use super::hk::{hk_integrate, HkOptions, HkResult};
use crate::error::Result;

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "name", rename_all = "snake_case")]
pub enum Integrand {
    /// `Σ c_k x^k`.
    Poly { coeffs: Vec<f64> },
    /// `|x - c|^(-1/2)`, singular at `c`.
    SqrtSingular { center: f64 },
    /// The derivative of `F(x) = (x - c)² sin(1/(x - c)²)`, zero at `c`.
    /// Integrable in the gauge sense but not absolutely near `c`.
    OscillatoryDerivative { center: f64 },
}

impl Integrand {
    pub const NAMES: [&'static str; 3] = ["poly", "sqrt_singular", "oscillatory_derivative"];

    pub fn name(&self) -> &'static str {
        match self {
            Integrand::Poly { .. } => "poly",
            Integrand::SqrtSingular { .. } => "sqrt_singular",
            Integrand::OscillatoryDerivative { .. } => "oscillatory_derivative",
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        match self {
            Integrand::Poly { coeffs } => coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c),
            Integrand::SqrtSingular { center } => {
                let d = (x - center).abs();
                if d == 0.0 {
                    0.0
                } else {
                    1.0 / d.sqrt()
                }
            }
            Integrand::OscillatoryDerivative { center } => {
                let u = x - center;
                if u == 0.0 {
                    return 0.0;
                }
                let (s, c) = (1.0 / (u * u)).sin_cos();
                2.0 * u * s - 2.0 / u * c
            }
        }
    }

    pub fn antiderivative(&self, x: f64) -> f64 {
        match self {
            Integrand::Poly { coeffs } => coeffs
                .iter()
                .enumerate()
                .rev()
                .fold(0.0, |acc, (k, c)| acc * x + c / (k + 1) as f64)
                * x,
            Integrand::SqrtSingular { center } => {
                let u = x - center;
                2.0 * u.signum() * u.abs().sqrt()
            }
            Integrand::OscillatoryDerivative { center } => {
                let u = x - center;
                if u == 0.0 {
                    0.0
                } else {
                    u * u * (1.0 / (u * u)).sin()
                }
            }
        }
    }

    pub fn exact(&self, a: f64, b: f64) -> f64 {
        self.antiderivative(b) - self.antiderivative(a)
    }

    pub fn singularities(&self) -> Vec<f64> {
        match self {
            Integrand::Poly { .. } => Vec::new(),
            Integrand::SqrtSingular { center } | Integrand::OscillatoryDerivative { center } => {
                vec![*center]
            }
        }
    }

    /// Gauge integral over `[a, b]` with the singular points declared.
    pub fn integrate(&self, a: f64, b: f64, tol: f64) -> Result<HkResult> {
        let opts = HkOptions::new(tol).singular_at(&self.singularities());
        hk_integrate(|x| self.eval(x), a, b, &opts)
    }
}

impl fmt::Display for Integrand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Integrand::Poly { coeffs } => write!(f, "poly{coeffs:?}"),
            Integrand::SqrtSingular { center } => write!(f, "sqrt_singular(c={center})"),
            Integrand::OscillatoryDerivative { center } => {
                write!(f, "oscillatory_derivative(c={center})")
            }
        }
    }
}
