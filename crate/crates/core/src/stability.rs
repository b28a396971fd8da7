//! Equilibria, linearization and local stability.
//!
//! Equilibria solve `z(1 + z) = α + αz + βz`, i.e.
//! `z² + (1 − α − β) z − α = 0`, with discriminant
//! `D = (1 + α)² + 2(α − 1)β + β²`. Linearizing the map at `(z̄, z̄)` gives
//!
//! ```text
//! z(n+1) + A·z(n) + C·z(n-1) = 0,   A = β z̄ / (1 + z̄)²,   C = −β / (1 + z̄)
//! ```
//!
//! and Clark's sufficient condition for local asymptotic stability is
//! `|A| + |C| < 1`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::map::{Parameters, DEFAULT_SINGULAR_TOL};
use crate::C64;

/// Tolerance on `max |λ|` around 1 for a marginal verdict.
pub const MARGINAL_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    Minus,
    Plus,
    /// `z̄ = 0` when `α = 0`.
    ZeroCase,
    /// `z̄ = α + β − 1` when `α = 0`.
    AlphaBetaMinusOne,
}

/// Quadratic-formula branch selector for margin evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RootBranch {
    Minus,
    Plus,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Equilibrium {
    pub z_bar: C64,
    pub branch: Branch,
    /// Set on both entries when the discriminant vanishes.
    pub coincident: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CharCoeffs {
    pub a: C64,
    pub c: C64,
    pub clark_margin: f64,
}

impl CharCoeffs {
    pub fn new(a: C64, c: C64) -> Self {
        Self {
            a,
            c,
            clark_margin: a.norm() + c.norm(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Spectral {
    Stable,
    Unstable,
    Marginal,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StabilityVerdict {
    pub coeffs: CharCoeffs,
    pub clark_holds: bool,
    pub spectral: Spectral,
    pub roots: (C64, C64),
}

fn discriminant(params: &Parameters) -> C64 {
    let (a, b) = (params.alpha, params.beta);
    (a + 1.0) * (a + 1.0) + 2.0 * (a - 1.0) * b + b * b
}

/// Equilibrium on one quadratic-formula branch, using the principal root of
/// the discriminant. Valid for every `α`, including `α = 0`.
pub fn equilibrium_on_branch(params: &Parameters, branch: RootBranch) -> C64 {
    let sqrt_d = discriminant(params).sqrt();
    let base = params.alpha + params.beta - 1.0;
    match branch {
        RootBranch::Minus => 0.5 * (base - sqrt_d),
        RootBranch::Plus => 0.5 * (base + sqrt_d),
    }
}

pub fn equilibria(params: &Parameters) -> Vec<Equilibrium> {
    let zero = C64::new(0.0, 0.0);
    if params.alpha == zero {
        let other = params.beta - 1.0;
        let coincident = other == zero;
        return vec![
            Equilibrium {
                z_bar: zero,
                branch: Branch::ZeroCase,
                coincident,
            },
            Equilibrium {
                z_bar: other,
                branch: Branch::AlphaBetaMinusOne,
                coincident,
            },
        ];
    }
    let coincident = discriminant(params) == zero;
    vec![
        Equilibrium {
            z_bar: equilibrium_on_branch(params, RootBranch::Minus),
            branch: Branch::Minus,
            coincident,
        },
        Equilibrium {
            z_bar: equilibrium_on_branch(params, RootBranch::Plus),
            branch: Branch::Plus,
            coincident,
        },
    ]
}

/// Characteristic coefficients at `z̄`.
///
/// For `β = 0` the map is the constant `α` away from the pole, so the
/// linearization vanishes identically and no pole check is made.
pub fn linearization(params: &Parameters, z_bar: C64) -> Result<CharCoeffs> {
    let zero = C64::new(0.0, 0.0);
    if params.beta == zero {
        return Ok(CharCoeffs::new(zero, zero));
    }
    let denom = z_bar + 1.0;
    let distance = denom.norm();
    if distance < DEFAULT_SINGULAR_TOL {
        return Err(Error::Singular { distance });
    }
    Ok(CharCoeffs::new(
        params.beta * z_bar / (denom * denom),
        -params.beta / denom,
    ))
}

pub fn clark_margin_at(params: &Parameters, branch: RootBranch) -> Result<f64> {
    let z_bar = equilibrium_on_branch(params, branch);
    Ok(linearization(params, z_bar)?.clark_margin)
}

/// Roots of `λ² + Aλ + C = 0`, larger magnitude first.
///
/// The first root avoids cancellation by picking the sign of `√(A² − 4C)`
/// aligned with `A`; the second comes from the product `λ₁λ₂ = C`.
pub fn characteristic_roots(coeffs: &CharCoeffs) -> (C64, C64) {
    let (a, c) = (coeffs.a, coeffs.c);
    let zero = C64::new(0.0, 0.0);
    let s = (a * a - 4.0 * c).sqrt();
    let q = if (a.conj() * s).re > 0.0 {
        -0.5 * (a + s)
    } else {
        -0.5 * (a - s)
    };
    if q == zero {
        return (zero, zero);
    }
    (q, c / q)
}

pub fn classify(params: &Parameters, eq: &Equilibrium) -> Result<StabilityVerdict> {
    let coeffs = linearization(params, eq.z_bar)?;
    let roots = characteristic_roots(&coeffs);
    let radius = roots.0.norm().max(roots.1.norm());
    let spectral = if (radius - 1.0).abs() <= MARGINAL_TOL {
        Spectral::Marginal
    } else if radius < 1.0 {
        Spectral::Stable
    } else {
        Spectral::Unstable
    };
    Ok(StabilityVerdict {
        coeffs,
        clark_holds: coeffs.clark_margin < 1.0,
        spectral,
        roots,
    })
}
