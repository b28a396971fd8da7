//! The map, its guarded iteration and its tangent map.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::C64;

pub const DEFAULT_ESCAPE_RADIUS: f64 = 1e6;
pub const DEFAULT_SINGULAR_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Parameters {
    pub alpha: C64,
    pub beta: C64,
}

impl Parameters {
    pub fn new(alpha: C64, beta: C64) -> Result<Self> {
        if !is_finite(alpha) {
            return Err(Error::NonFinite("alpha"));
        }
        if !is_finite(beta) {
            return Err(Error::NonFinite("beta"));
        }
        Ok(Self { alpha, beta })
    }

    /// Shorthand for finite literals in tests and tables.
    pub fn from_parts(a_re: f64, a_im: f64, b_re: f64, b_im: f64) -> Self {
        Self {
            alpha: C64::new(a_re, a_im),
            beta: C64::new(b_re, b_im),
        }
    }

    /// The `β = α + 1` parameter line.
    pub fn on_period_two_line(alpha: C64) -> Self {
        Self {
            alpha,
            beta: alpha + 1.0,
        }
    }
}

/// Initial state `(z_{-1}, z_0)`.
///
/// Tables that list initial values as `z_0, z_1` are read into
/// `(z_minus1, z_0)` in that order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrbitSeed {
    pub z_minus1: C64,
    pub z_0: C64,
}

impl OrbitSeed {
    pub fn new(z_minus1: C64, z_0: C64) -> Result<Self> {
        if !is_finite(z_minus1) || !is_finite(z_0) {
            return Err(Error::NonFinite("seed"));
        }
        Ok(Self { z_minus1, z_0 })
    }

    pub fn constant(z: C64) -> Self {
        Self {
            z_minus1: z,
            z_0: z,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IterationSettings {
    pub max_steps: usize,
    pub escape_radius: f64,
    pub singular_tol: f64,
}

impl Default for IterationSettings {
    fn default() -> Self {
        Self {
            max_steps: 20_000,
            escape_radius: DEFAULT_ESCAPE_RADIUS,
            singular_tol: DEFAULT_SINGULAR_TOL,
        }
    }
}

impl IterationSettings {
    pub fn with_steps(max_steps: usize) -> Self {
        Self {
            max_steps,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.max_steps == 0 {
            return Err(Error::Range("max_steps must be positive".into()));
        }
        if self.escape_radius.is_nan()
            || self.escape_radius <= 1.0
            || self.escape_radius.is_infinite()
        {
            return Err(Error::Range(format!(
                "escape_radius must exceed 1, got {}",
                self.escape_radius
            )));
        }
        if !(self.singular_tol > 0.0 && self.singular_tol < 1.0) {
            return Err(Error::Range(format!(
                "singular_tol must lie in (0, 1), got {}",
                self.singular_tol
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "step", rename_all = "snake_case")]
pub enum OrbitStatus {
    Completed,
    /// Index into `Orbit::points` of the first point beyond the escape radius.
    Escaped(usize),
    /// Index into `Orbit::points` of the point sitting on the pole.
    Singular(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Orbit {
    pub seed: OrbitSeed,
    /// `points[0] = z_{-1}`, `points[1] = z_0`, then the iterates.
    pub points: Vec<C64>,
    pub status: OrbitStatus,
}

impl Orbit {
    /// Number of map applications performed.
    pub fn steps(&self) -> usize {
        self.points.len() - 2
    }

    pub fn is_completed(&self) -> bool {
        self.status == OrbitStatus::Completed
    }

    /// Sequence index `n` of `points[i]` (the seed sits at `n = -1, 0`).
    pub fn index_of(i: usize) -> i64 {
        i as i64 - 1
    }
}

/// Jacobian of `(z_{n-1}, z_n) ↦ (z_n, z_{n+1})`, rows ordered so that the
/// first row is the derivative of the new iterate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TangentMatrix {
    /// `∂z_{n+1}/∂z_n`
    pub a11: C64,
    /// `∂z_{n+1}/∂z_{n-1}`
    pub a12: C64,
    pub a21: C64,
    pub a22: C64,
}

impl TangentMatrix {
    /// Applies the matrix to a tangent vector `(dz_n, dz_{n-1})`.
    pub fn apply(&self, w: [C64; 2]) -> [C64; 2] {
        [
            self.a11 * w[0] + self.a12 * w[1],
            self.a21 * w[0] + self.a22 * w[1],
        ]
    }
}

pub(crate) fn is_finite(z: C64) -> bool {
    z.re.is_finite() && z.im.is_finite()
}

fn pole_check(z_curr: C64, singular_tol: f64) -> Result<C64> {
    let denom = C64::new(1.0, 0.0) + z_curr;
    let distance = denom.norm();
    if distance < singular_tol {
        return Err(Error::Singular { distance });
    }
    Ok(denom)
}

/// One application of the map with the default pole tolerance.
pub fn step(params: &Parameters, z_prev: C64, z_curr: C64) -> Result<C64> {
    step_with_tol(params, z_prev, z_curr, DEFAULT_SINGULAR_TOL)
}

pub fn step_with_tol(
    params: &Parameters,
    z_prev: C64,
    z_curr: C64,
    singular_tol: f64,
) -> Result<C64> {
    let denom = pole_check(z_curr, singular_tol)?;
    let next = (params.alpha + params.alpha * z_curr + params.beta * z_prev) / denom;
    if !is_finite(next) {
        // only reachable through overflow of huge inputs
        return Err(Error::Singular {
            distance: denom.norm(),
        });
    }
    Ok(next)
}

/// Iterates the map from `seed` until `max_steps`, escape, or the pole.
pub fn iterate(params: &Parameters, seed: OrbitSeed, settings: &IterationSettings) -> Orbit {
    let mut points = Vec::with_capacity(settings.max_steps + 2);
    points.push(seed.z_minus1);
    points.push(seed.z_0);

    let mut status = OrbitStatus::Completed;
    for _ in 0..settings.max_steps {
        let n = points.len();
        let (z_prev, z_curr) = (points[n - 2], points[n - 1]);
        match step_with_tol(params, z_prev, z_curr, settings.singular_tol) {
            Ok(next) => {
                points.push(next);
                if next.norm() > settings.escape_radius {
                    status = OrbitStatus::Escaped(n);
                    break;
                }
            }
            Err(_) => {
                status = OrbitStatus::Singular(n - 1);
                break;
            }
        }
    }
    Orbit {
        seed,
        points,
        status,
    }
}

pub fn tangent(params: &Parameters, z_prev: C64, z_curr: C64) -> Result<TangentMatrix> {
    tangent_with_tol(params, z_prev, z_curr, DEFAULT_SINGULAR_TOL)
}

pub fn tangent_with_tol(
    params: &Parameters,
    z_prev: C64,
    z_curr: C64,
    singular_tol: f64,
) -> Result<TangentMatrix> {
    let denom = pole_check(z_curr, singular_tol)?;
    Ok(TangentMatrix {
        a11: -params.beta * z_prev / (denom * denom),
        a12: params.beta / denom,
        a21: C64::new(1.0, 0.0),
        a22: C64::new(0.0, 0.0),
    })
}
