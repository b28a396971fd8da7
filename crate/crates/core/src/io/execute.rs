//! Dispatch of a [`RunSpec`] to the analysis operations.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::analysis::{
    classify_computed, detect_cycle, lyapunov_divergence_oracle, lyapunov_max, CycleReport,
    LyapunovEstimate, OrbitClassification, MIN_TRANSIENT,
};
use crate::error::{Error, Result};
use crate::io::runspec::{BranchArg, Command, GridAxis, RunSpec};
use crate::map::{iterate, step, OrbitSeed, OrbitStatus, Parameters};
use crate::periodicity::{
    admissible_epsilon, ball_certificate, check_identities, trichotomy, BallCertificate,
    EpsilonInterval, IdentityReport, TrichotomyClass,
};
use crate::scan::{
    classification_grid, scan_margin, ClassificationGrid, ComplexRect, ExtremaReport, GridSpec,
};
use crate::stability::{classify, equilibria, Branch, Spectral};
use crate::C64;

pub const TOOL_NAME: &str = "ratdiff";
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");
/// Initial separation used by the divergence cross-check.
pub const ORACLE_DELTA: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrbitRecord {
    #[serde(with = "crate::io::literal::serde_seed")]
    pub seed: OrbitSeed,
    pub status: OrbitStatus,
    #[serde(with = "crate::io::literal::serde_vec")]
    pub points: Vec<C64>,
    pub classification: OrbitClassification,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquilibriumRow {
    pub branch: Branch,
    #[serde(with = "crate::io::literal::serde_c64")]
    pub z_bar: C64,
    pub coincident: bool,
    /// `|f(z̄, z̄) − z̄|`, absent when `z̄` sits on the pole.
    pub residual: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilityRow {
    pub branch: Branch,
    #[serde(with = "crate::io::literal::serde_c64")]
    pub z_bar: C64,
    #[serde(with = "crate::io::literal::serde_c64")]
    pub a: C64,
    #[serde(with = "crate::io::literal::serde_c64")]
    pub c: C64,
    pub abs_a: f64,
    pub abs_c: f64,
    pub clark_margin: f64,
    pub clark_holds: bool,
    pub spectral: Spectral,
    #[serde(with = "crate::io::literal::serde_pair")]
    pub roots: (C64, C64),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PeriodRecord {
    #[serde(with = "crate::io::literal::serde_seed")]
    pub seed: OrbitSeed,
    pub cycle: Option<CycleReport>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LyapunovRecord {
    #[serde(with = "crate::io::literal::serde_seed")]
    pub seed: OrbitSeed,
    pub estimate: LyapunovEstimate,
    pub divergence_oracle: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentityRecord {
    #[serde(with = "crate::io::literal::serde_seed")]
    pub seed: OrbitSeed,
    pub report: IdentityReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Payload {
    Orbit {
        orbits: Vec<OrbitRecord>,
    },
    Equilibria {
        equilibria: Vec<EquilibriumRow>,
    },
    Stability {
        rows: Vec<StabilityRow>,
    },
    Trichotomy {
        #[serde(flatten)]
        class: TrichotomyClass,
        admissible_epsilon: Option<EpsilonInterval>,
        certificate: Option<BallCertificate>,
    },
    Period {
        records: Vec<PeriodRecord>,
    },
    Lyapunov {
        records: Vec<LyapunovRecord>,
    },
    Scan {
        branch: BranchArg,
        region_alpha: ComplexRect,
        region_beta: ComplexRect,
        budget: usize,
        rng_seed: u64,
        report: ExtremaReport,
    },
    Grid {
        grid: ClassificationGrid,
    },
    Identities {
        records: Vec<IdentityRecord>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorInfo {
    pub code: i32,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultEnvelope {
    pub tool: String,
    pub version: String,
    pub runspec: RunSpec,
    pub wall_time_ms: f64,
    pub payload: Option<Payload>,
    pub error: Option<ErrorInfo>,
}

impl ResultEnvelope {
    pub fn exit_code(&self) -> i32 {
        self.error.as_ref().map_or(0, |e| e.code)
    }
}

fn require(value: Option<C64>, flag: &str, command: Command) -> Result<C64> {
    value.ok_or_else(|| {
        Error::Usage(format!("--{flag} is required for '{command:?}'").to_lowercase())
    })
}

fn params_of(spec: &RunSpec) -> Result<Parameters> {
    Parameters::new(
        require(spec.alpha, "alpha", spec.command)?,
        require(spec.beta, "beta", spec.command)?,
    )
}

/// Explicit seeds, or one seed drawn from the unit square with `rng_seed`.
fn seeds_of(spec: &RunSpec) -> Vec<OrbitSeed> {
    if !spec.seeds.is_empty() {
        return spec.seeds.clone();
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.rng_seed);
    let mut draw = || C64::new(rng.gen_range(-1.0..=1.0), rng.gen_range(-1.0..=1.0));
    vec![OrbitSeed {
        z_minus1: draw(),
        z_0: draw(),
    }]
}

fn numeric_status(status: OrbitStatus) -> Result<()> {
    match status {
        OrbitStatus::Completed => Ok(()),
        OrbitStatus::Escaped(step) => Err(Error::EscapedOrbit { step }),
        OrbitStatus::Singular(step) => Err(Error::SingularOrbit { step }),
    }
}

fn run(spec: &RunSpec) -> Result<Payload> {
    match spec.command {
        Command::Orbit => {
            let params = params_of(spec)?;
            let orbits = seeds_of(spec)
                .into_iter()
                .map(|seed| {
                    let orbit = iterate(&params, seed, &spec.settings);
                    let classification =
                        classify_computed(&params, &orbit, &spec.settings, &spec.analysis);
                    OrbitRecord {
                        seed,
                        status: orbit.status,
                        points: orbit.points,
                        classification,
                    }
                })
                .collect();
            Ok(Payload::Orbit { orbits })
        }
        Command::Equilibria => {
            let params = params_of(spec)?;
            let equilibria = equilibria(&params)
                .into_iter()
                .map(|e| EquilibriumRow {
                    branch: e.branch,
                    z_bar: e.z_bar,
                    coincident: e.coincident,
                    residual: step(&params, e.z_bar, e.z_bar)
                        .ok()
                        .map(|z| (z - e.z_bar).norm()),
                })
                .collect();
            Ok(Payload::Equilibria { equilibria })
        }
        Command::Stability => {
            let params = params_of(spec)?;
            let rows = equilibria(&params)
                .into_iter()
                .map(|e| {
                    let v = classify(&params, &e)?;
                    Ok(StabilityRow {
                        branch: e.branch,
                        z_bar: e.z_bar,
                        a: v.coeffs.a,
                        c: v.coeffs.c,
                        abs_a: v.coeffs.a.norm(),
                        abs_c: v.coeffs.c.norm(),
                        clark_margin: v.coeffs.clark_margin,
                        clark_holds: v.clark_holds,
                        spectral: v.spectral,
                        roots: v.roots,
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(Payload::Stability { rows })
        }
        Command::Trichotomy => {
            let params = params_of(spec)?;
            let certificate = spec
                .epsilon
                .map(|eps| {
                    ball_certificate(&params, eps)
                        .map_err(|e| Error::Usage(format!("--epsilon: {e}")))
                })
                .transpose()?;
            Ok(Payload::Trichotomy {
                class: trichotomy(&params, spec.boundary_tol),
                admissible_epsilon: admissible_epsilon(&params),
                certificate,
            })
        }
        Command::Period => {
            let params = params_of(spec)?;
            let records = seeds_of(spec)
                .into_iter()
                .map(|seed| {
                    let orbit = iterate(&params, seed, &spec.settings);
                    numeric_status(orbit.status)?;
                    Ok(PeriodRecord {
                        seed,
                        cycle: detect_cycle(
                            &orbit,
                            spec.analysis.cycle_tol,
                            spec.analysis.max_period,
                        ),
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(Payload::Period { records })
        }
        Command::Lyapunov => {
            let params = params_of(spec)?;
            let steps = spec.settings.max_steps;
            let transient = spec.transient.unwrap_or((steps / 2).max(MIN_TRANSIENT));
            let samples = spec
                .samples
                .unwrap_or(steps.saturating_sub(transient).max(1000));
            let records = seeds_of(spec)
                .into_iter()
                .map(|seed| {
                    let estimate = lyapunov_max(&params, seed, transient, samples)?;
                    let divergence_oracle = lyapunov_divergence_oracle(
                        &params,
                        seed,
                        ORACLE_DELTA,
                        transient + samples,
                    )?;
                    Ok(LyapunovRecord {
                        seed,
                        estimate,
                        divergence_oracle,
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(Payload::Lyapunov { records })
        }
        Command::Scan => {
            let report = scan_margin(
                spec.branch.into(),
                &spec.region_alpha,
                &spec.region_beta,
                spec.budget,
                spec.rng_seed,
            )?;
            Ok(Payload::Scan {
                branch: spec.branch,
                region_alpha: spec.region_alpha,
                region_beta: spec.region_beta,
                budget: spec.budget,
                rng_seed: spec.rng_seed,
                report,
            })
        }
        Command::Grid => {
            let grid_spec = match spec.axis {
                GridAxis::Seed => GridSpec::Seeds {
                    params: params_of(spec)?,
                },
                GridAxis::Alpha => GridSpec::Alpha {
                    beta: require(spec.beta, "beta", spec.command)?,
                    seed: seeds_of(spec)[0],
                },
                GridAxis::Beta => GridSpec::Beta {
                    alpha: require(spec.alpha, "alpha", spec.command)?,
                    seed: seeds_of(spec)[0],
                },
            };
            let grid = classification_grid(
                &grid_spec,
                spec.region,
                spec.resolution,
                &spec.settings,
                &spec.analysis,
            )?;
            Ok(Payload::Grid { grid })
        }
        Command::Identities => {
            let params = params_of(spec)?;
            let records = seeds_of(spec)
                .into_iter()
                .map(|seed| {
                    let orbit = iterate(&params, seed, &spec.settings);
                    numeric_status(orbit.status)?;
                    let report = check_identities(&params, &orbit)?;
                    Ok(IdentityRecord { seed, report })
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(Payload::Identities { records })
        }
    }
}

/// Runs the command. Failures are reported inside the envelope.
pub fn execute(spec: &RunSpec) -> ResultEnvelope {
    let started = Instant::now();
    let outcome = run(spec);
    let wall_time_ms = started.elapsed().as_secs_f64() * 1e3;
    let (payload, error) = match outcome {
        Ok(p) => (Some(p), None),
        Err(e) => (
            None,
            Some(ErrorInfo {
                code: e.exit_code(),
                message: e.to_string(),
            }),
        ),
    };
    ResultEnvelope {
        tool: TOOL_NAME.to_string(),
        version: TOOL_VERSION.to_string(),
        runspec: spec.clone(),
        wall_time_ms,
        payload,
        error,
    }
}
