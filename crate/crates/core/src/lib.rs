//! Simulation and analysis of the second-order complex rational map
//!
//! ```text
//! z(n+1) = (α + α·z(n) + β·z(n-1)) / (1 + z(n))
//! ```
//!
//! with complex parameters and complex initial conditions.
//!
//! The crate is organised bottom-up:
//!
//! - [`map`]: the map itself, guarded iteration and its Jacobian.
//! - [`stability`]: equilibria, linearization, Clark margins and root-based
//!   local stability verdicts.
//! - [`periodicity`]: the ball-invariance certificate, the modulus
//!   trichotomy predictor and the period-two algebra for `β = α + 1`.
//! - [`analysis`]: empirical orbit classification (convergence, cycles,
//!   escape, largest Lyapunov exponent).
//! - [`scan`]: parameter-space extrema search and classification grids.
//! - [`io`]: complex literals, config files, the CLI run specification,
//!   result envelopes and CSV/JSON/SVG emission.

pub mod analysis;
pub mod error;
pub mod io;
pub mod map;
pub mod periodicity;
pub mod scan;
pub mod stability;

pub use error::{Error, Result};
pub use map::{IterationSettings, Orbit, OrbitSeed, OrbitStatus, Parameters, TangentMatrix};

/// Complex double used throughout the crate.
pub type C64 = num_complex::Complex64;
