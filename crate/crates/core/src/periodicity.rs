//! Boundedness certificates, the modulus trichotomy predictor and the
//! period-two algebra on the line `β = α + 1`.
//!
//! Along an orbit define
//!
//! ```text
//! J(n) = α + α(z(n) + z(n-1)) − z(n)·z(n-1)
//! ```
//!
//! When `β = α + 1` the map satisfies, exactly,
//!
//! ```text
//! J(n+1)            = (α + 1) / (1 + z(n)) · J(n)
//! z(n+1) − z(n-1)   = J(n) / (1 + z(n))
//! z(n+1) − z(n-1)   = (α + 1) / (1 + z(n)) · (z(n) − z(n-2))
//! z(n+1) − z(n-1)   = (z(1) − z(-1)) · Π_{k=1..n} (α + 1) / (1 + z(k))
//! ```
//!
//! and the prime period-two pairs `(φ, ψ)` are exactly the solutions of
//! `α + α(φ + ψ) − φψ = 0`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::map::{Orbit, Parameters};
use crate::C64;

pub const DEFAULT_BOUNDARY_TOL: f64 = 1e-9;
/// Absolute tolerance on `|β − (α + 1)|` for the period-two line.
pub const LINE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BallCertificate {
    pub epsilon: f64,
    pub margin: f64,
}

impl BallCertificate {
    pub fn valid(&self) -> bool {
        self.margin >= 0.0 && self.epsilon > 0.0 && self.epsilon < 1.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PeriodTwoPair {
    pub phi: C64,
    pub psi: C64,
}

impl PeriodTwoPair {
    pub fn is_prime(&self) -> bool {
        self.phi != self.psi
    }

    /// Residual of `α + α(φ + ψ) − φψ`.
    pub fn residual(&self, alpha: C64) -> f64 {
        j_value(alpha, self.phi, self.psi).norm()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JInvariant {
    pub value: C64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Trichotomy {
    FiniteLimit,
    PeriodTwo,
    Unbounded,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrichotomyClass {
    pub verdict: Trichotomy,
    /// `|β|`
    pub lhs: f64,
    /// `|α + 1|`
    pub rhs: f64,
}

/// Predicts the long-run behaviour from `|β|` against `|α + 1|`.
///
/// This mirrors the real-parameter trichotomy; in the complex plane it is a
/// heuristic only (periodic and chaotic orbits occur with `|β| < |α + 1|`).
pub fn trichotomy(params: &Parameters, boundary_tol: f64) -> TrichotomyClass {
    let lhs = params.beta.norm();
    let rhs = (params.alpha + 1.0).norm();
    let verdict = if (lhs - rhs).abs() <= boundary_tol {
        Trichotomy::PeriodTwo
    } else if lhs > rhs {
        Trichotomy::Unbounded
    } else {
        Trichotomy::FiniteLimit
    };
    TrichotomyClass { verdict, lhs, rhs }
}

fn j_value(alpha: C64, z_prev: C64, z_curr: C64) -> C64 {
    alpha + alpha * (z_curr + z_prev) - z_curr * z_prev
}

pub fn j_invariant(params: &Parameters, z_prev: C64, z_curr: C64) -> JInvariant {
    JInvariant {
        value: j_value(params.alpha, z_prev, z_curr),
    }
}

/// Maximum relative residuals of the four `β = α + 1` identities.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct IdentityReport {
    pub j_recurrence: f64,
    pub difference_from_j: f64,
    pub difference_recurrence: f64,
    pub product_form: f64,
    /// Number of orbit indices checked.
    pub checked: usize,
}

impl IdentityReport {
    pub fn max_residual(&self) -> f64 {
        self.j_recurrence
            .max(self.difference_from_j)
            .max(self.difference_recurrence)
            .max(self.product_form)
    }
}

fn rel(lhs: C64, rhs: C64) -> f64 {
    (lhs - rhs).norm() / (1.0 + lhs.norm().max(rhs.norm()))
}

fn on_line(params: &Parameters) -> bool {
    (params.beta - (params.alpha + 1.0)).norm() <= LINE_TOL
}

pub fn check_identities(params: &Parameters, orbit: &Orbit) -> Result<IdentityReport> {
    if !on_line(params) {
        return Err(Error::Hypothesis(format!(
            "identities need beta = alpha + 1, |beta - alpha - 1| = {:e}",
            (params.beta - (params.alpha + 1.0)).norm()
        )));
    }
    if !orbit.is_completed() {
        return Err(Error::Hypothesis(
            "identities need a completed orbit".into(),
        ));
    }
    let alpha = params.alpha;
    let growth = alpha + 1.0;
    // pts[i] holds z_{i-1}.
    let pts = &orbit.points;
    let z = |n: i64| pts[(n + 1) as usize];
    let last = pts.len() as i64 - 2;

    let mut report = IdentityReport::default();
    let mut product = C64::new(1.0, 0.0);
    for n in 0..last {
        let one_plus = z(n) + 1.0;
        let j_n = j_value(alpha, z(n - 1), z(n));
        let j_next = j_value(alpha, z(n), z(n + 1));
        let diff = z(n + 1) - z(n - 1);

        report.j_recurrence = report
            .j_recurrence
            .max(rel(j_next * one_plus, growth * j_n));
        report.difference_from_j = report.difference_from_j.max(rel(diff * one_plus, j_n));
        if n >= 1 {
            let prev_diff = z(n) - z(n - 2);
            report.difference_recurrence = report
                .difference_recurrence
                .max(rel(diff * one_plus, growth * prev_diff));
            product *= growth / one_plus;
            report.product_form = report.product_form.max(rel(diff, (z(1) - z(-1)) * product));
        }
        report.checked += 1;
    }
    Ok(report)
}

/// The one-parameter family of period-two pairs on `β = α + 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PeriodTwoFamily {
    pub alpha: C64,
}

impl PeriodTwoFamily {
    /// The pair with `φ + ψ = s` and `φψ = α + αs`.
    pub fn pair_for_sum(&self, s: C64) -> PeriodTwoPair {
        let product = self.alpha + self.alpha * s;
        let root = (s * s - 4.0 * product).sqrt();
        // larger root first, partner via the product
        let big = if (s.conj() * root).re >= 0.0 {
            0.5 * (s + root)
        } else {
            0.5 * (s - root)
        };
        let small = if big == C64::new(0.0, 0.0) {
            big
        } else {
            product / big
        };
        PeriodTwoPair {
            phi: big,
            psi: small,
        }
    }

    /// Partner `ψ` of a given `φ`, or `None` when `φ = α`.
    pub fn partner(&self, phi: C64) -> Option<C64> {
        let denom = phi - self.alpha;
        if denom == C64::new(0.0, 0.0) {
            return None;
        }
        Some(self.alpha * (phi + 1.0) / denom)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PeriodTwo {
    /// Only the equilibria solve the period-two system.
    NoneExists,
    Family(PeriodTwoFamily),
}

pub fn period_two_pairs(params: &Parameters) -> PeriodTwo {
    if on_line(params) {
        PeriodTwo::Family(PeriodTwoFamily {
            alpha: params.alpha,
        })
    } else {
        PeriodTwo::NoneExists
    }
}

pub fn ball_certificate(params: &Parameters, epsilon: f64) -> Result<BallCertificate> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::Range(format!(
            "epsilon must lie in (0, 1), got {epsilon}"
        )));
    }
    let a = params.alpha.norm();
    let b = params.beta.norm();
    Ok(BallCertificate {
        epsilon,
        margin: (1.0 - epsilon - a / epsilon) - (a + b),
    })
}

/// Set of admissible radii, `lo < ε ≤ hi` when `lo_open`, else `lo ≤ ε ≤ hi`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EpsilonInterval {
    pub lo: f64,
    pub hi: f64,
    pub lo_open: bool,
}

impl EpsilonInterval {
    pub fn contains(&self, eps: f64) -> bool {
        let above = if self.lo_open {
            eps > self.lo
        } else {
            eps >= self.lo
        };
        above && eps <= self.hi
    }
}

/// Radii `ε ∈ (0, 1)` with `ε² − (1 − |α| − |β|)ε + |α| ≤ 0`.
pub fn admissible_epsilon(params: &Parameters) -> Option<EpsilonInterval> {
    let a = params.alpha.norm();
    let b = params.beta.norm();
    let lin = 1.0 - a - b;
    if a == 0.0 {
        return (lin > 0.0).then_some(EpsilonInterval {
            lo: 0.0,
            hi: lin.min(1.0),
            lo_open: true,
        });
    }
    let disc = lin * lin - 4.0 * a;
    if disc < 0.0 || lin <= 0.0 {
        return None;
    }
    let hi = 0.5 * (lin + disc.sqrt());
    let lo = a / hi;
    // the product of the roots is |α| < 1 and their sum is below 1, so both
    // already sit inside (0, 1)
    Some(EpsilonInterval {
        lo,
        hi,
        lo_open: false,
    })
}
