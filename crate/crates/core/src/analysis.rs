//! Empirical orbit classification.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::map::{
    iterate, step_with_tol, tangent_with_tol, IterationSettings, Orbit, OrbitSeed, OrbitStatus,
    Parameters,
};
use crate::C64;

/// Smallest transient discarded before Lyapunov sampling.
pub const MIN_TRANSIENT: usize = 500;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnalysisSettings {
    /// Relative lock tolerance for cycle detection.
    pub cycle_tol: f64,
    pub convergence_tol: f64,
    pub convergence_window: usize,
    pub max_period: usize,
    pub chaos_threshold: f64,
}

impl Default for AnalysisSettings {
    fn default() -> Self {
        Self {
            cycle_tol: 1e-6,
            convergence_tol: 1e-9,
            convergence_window: 32,
            max_period: 128,
            chaos_threshold: 0.01,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CycleReport {
    pub period: usize,
    #[serde(with = "crate::io::literal::serde_vec")]
    pub cycle_points: Vec<C64>,
    /// Index into `Orbit::points` from which the lock criterion holds.
    pub onset: usize,
    pub residual: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LyapunovEstimate {
    pub lambda_max: f64,
    pub n_transient: usize,
    pub n_sample: usize,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum OrbitClassification {
    ConvergesToEquilibrium {
        #[serde(with = "crate::io::literal::serde_c64")]
        limit: C64,
    },
    Periodic(CycleReport),
    Unbounded {
        step: usize,
    },
    Chaotic(LyapunovEstimate),
    Singular {
        step: usize,
    },
    Undetermined,
}

/// Compact per-cell label used by classification grids.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", content = "period", rename_all = "snake_case")]
pub enum VerdictTag {
    Converges,
    Periodic(usize),
    Unbounded,
    Chaotic,
    Singular,
    Undetermined,
}

impl OrbitClassification {
    pub fn tag(&self) -> VerdictTag {
        match self {
            Self::ConvergesToEquilibrium { .. } => VerdictTag::Converges,
            Self::Periodic(c) => VerdictTag::Periodic(c.period),
            Self::Unbounded { .. } => VerdictTag::Unbounded,
            Self::Chaotic(_) => VerdictTag::Chaotic,
            Self::Singular { .. } => VerdictTag::Singular,
            Self::Undetermined => VerdictTag::Undetermined,
        }
    }
}

impl VerdictTag {
    pub fn label(&self) -> String {
        match self {
            Self::Converges => "converges".into(),
            Self::Periodic(p) => format!("periodic-{p}"),
            Self::Unbounded => "unbounded".into(),
            Self::Chaotic => "chaotic".into(),
            Self::Singular => "singular".into(),
            Self::Undetermined => "undetermined".into(),
        }
    }
}

/// Mean of the last `window` points, if they all lie within `tol` of it.
pub fn detect_convergence(orbit: &Orbit, tol: f64, window: usize) -> Option<C64> {
    if !orbit.is_completed() || window == 0 || orbit.points.len() < window {
        return None;
    }
    let tail = &orbit.points[orbit.points.len() - window..];
    let mean = tail.iter().sum::<C64>() / window as f64;
    tail.iter()
        .all(|z| (z - mean).norm() <= tol)
        .then_some(mean)
}

fn locks(points: &[C64], p: usize, tol: f64) -> bool {
    points
        .iter()
        .zip(&points[p..])
        .all(|(a, b)| (b - a).norm() <= tol * (1.0 + a.norm()))
}

/// Minimal period `p ≤ max_period` locked over the second half of the orbit.
pub fn detect_cycle(orbit: &Orbit, tol: f64, max_period: usize) -> Option<CycleReport> {
    if !orbit.is_completed() {
        return None;
    }
    let pts = &orbit.points;
    let start = pts.len() / 2;
    let tail = &pts[start..];
    let period = (1..=max_period)
        .take_while(|p| tail.len() >= 2 * p)
        .find(|&p| locks(tail, p, tol))?;

    let residual = tail
        .iter()
        .zip(&tail[period..])
        .map(|(a, b)| (b - a).norm())
        .fold(0.0, f64::max);

    // walk back from the tail while the lock still holds
    let mut onset = start;
    while onset > 0 {
        let n = onset - 1;
        let (a, b) = (pts[n], pts[n + period]);
        if (b - a).norm() > tol * (1.0 + a.norm()) {
            break;
        }
        onset = n;
    }

    Some(CycleReport {
        period,
        cycle_points: pts[pts.len() - period..].to_vec(),
        onset,
        residual,
    })
}

/// Natural-log growth rate of a tangent vector carried along `points`,
/// sampled over the transitions after index `transient`.
///
/// Each step applies the Jacobian at `(points[i-1], points[i])` and
/// renormalizes. Because the map is holomorphic the complex tangent norm
/// grows at the same rate as the leading exponent of the realified system.
fn tangent_rate(
    params: &Parameters,
    points: &[C64],
    transient: usize,
    singular_tol: f64,
) -> Result<(f64, bool)> {
    let inv = std::f64::consts::FRAC_1_SQRT_2;
    let mut w = [C64::new(inv, 0.0), C64::new(inv, 0.0)];
    let first = transient + 1;
    let last = points.len() - 1;
    let n = last - first;
    let mut sum = 0.0;
    let mut checkpoint = None;
    let quarter_mark = first + (3 * n) / 4;
    for i in first..last {
        if i == quarter_mark {
            checkpoint = Some(sum / (i - first).max(1) as f64);
        }
        let jac = tangent_with_tol(params, points[i - 1], points[i], singular_tol)
            .map_err(|_| Error::SingularOrbit { step: i })?;
        let next = jac.apply(w);
        let norm = (next[0].norm_sqr() + next[1].norm_sqr()).sqrt();
        if norm > 0.0 && norm.is_finite() {
            sum += norm.ln();
            w = [next[0] / norm, next[1] / norm];
        } else {
            // nilpotent Jacobian product: floor the growth and restart the vector
            sum += f64::MIN_POSITIVE.ln();
            w = [C64::new(inv, 0.0), C64::new(inv, 0.0)];
        }
    }
    let lambda = sum / n as f64;
    let drift = checkpoint
        .map(|m| (lambda - m).abs())
        .unwrap_or(f64::INFINITY);
    Ok((lambda, drift < 1e-3))
}

fn guarded_orbit(
    params: &Parameters,
    seed: OrbitSeed,
    steps: usize,
    singular_tol: f64,
) -> Result<Orbit> {
    let settings = IterationSettings {
        max_steps: steps,
        singular_tol,
        ..IterationSettings::default()
    };
    let orbit = iterate(params, seed, &settings);
    match orbit.status {
        OrbitStatus::Completed => Ok(orbit),
        OrbitStatus::Escaped(step) => Err(Error::EscapedOrbit { step }),
        OrbitStatus::Singular(step) => Err(Error::SingularOrbit { step }),
    }
}

/// Largest Lyapunov exponent by tangent-vector evolution.
pub fn lyapunov_max(
    params: &Parameters,
    seed: OrbitSeed,
    n_transient: usize,
    n_sample: usize,
) -> Result<LyapunovEstimate> {
    if n_sample == 0 {
        return Err(Error::Range("n_sample must be positive".into()));
    }
    let tol = crate::map::DEFAULT_SINGULAR_TOL;
    let orbit = guarded_orbit(params, seed, n_transient + n_sample, tol)?;
    let (lambda_max, stable) = tangent_rate(params, &orbit.points, n_transient, tol)?;
    Ok(LyapunovEstimate {
        lambda_max,
        n_transient,
        n_sample,
        converged: stable && n_sample >= 1000,
    })
}

/// Two-orbit divergence estimate of the largest exponent, independent of the
/// Jacobian. The partner orbit starts `delta` away in `z_0` and is pulled back
/// to distance `delta` whenever the separation exceeds `1e-2` or shrinks below
/// `delta · 1e-6`.
pub fn lyapunov_divergence_oracle(
    params: &Parameters,
    seed: OrbitSeed,
    delta: f64,
    n: usize,
) -> Result<f64> {
    if !(1e-10..=1e-6).contains(&delta) {
        return Err(Error::Range(format!(
            "delta must lie in [1e-10, 1e-6], got {delta}"
        )));
    }
    if n == 0 {
        return Err(Error::Range("n must be positive".into()));
    }
    let tol = crate::map::DEFAULT_SINGULAR_TOL;
    let radius = crate::map::DEFAULT_ESCAPE_RADIUS;
    let advance = |state: [C64; 2], k: usize| -> Result<[C64; 2]> {
        let next = step_with_tol(params, state[0], state[1], tol)
            .map_err(|_| Error::SingularOrbit { step: k })?;
        if next.norm() > radius {
            return Err(Error::EscapedOrbit { step: k });
        }
        Ok([state[1], next])
    };
    let separation =
        |a: &[C64; 2], b: &[C64; 2]| ((a[0] - b[0]).norm_sqr() + (a[1] - b[1]).norm_sqr()).sqrt();

    let mut base = [seed.z_minus1, seed.z_0];
    let mut partner = [seed.z_minus1, seed.z_0 + delta];
    let mut sum = 0.0;
    for k in 0..n {
        base = advance(base, k + 2)?;
        partner = advance(partner, k + 2)?;
        let sep = separation(&base, &partner);
        let rescale = sep > 1e-2 || sep < delta * 1e-6 || k + 1 == n;
        if !rescale {
            continue;
        }
        if sep > 0.0 {
            sum += (sep / delta).ln();
            let f = delta / sep;
            partner = [
                base[0] + (partner[0] - base[0]) * f,
                base[1] + (partner[1] - base[1]) * f,
            ];
        } else {
            sum += (f64::MIN_POSITIVE / delta).ln();
            partner = [base[0], base[1] + delta];
        }
    }
    Ok(sum / n as f64)
}

/// Classifies an orbit, first matching verdict wins:
/// singular, unbounded, converging, periodic, chaotic, undetermined.
pub fn classify_orbit(
    params: &Parameters,
    seed: OrbitSeed,
    settings: &IterationSettings,
    analysis: &AnalysisSettings,
) -> OrbitClassification {
    let orbit = iterate(params, seed, settings);
    classify_computed(params, &orbit, settings, analysis)
}

/// Classification of an already computed orbit.
pub fn classify_computed(
    params: &Parameters,
    orbit: &Orbit,
    settings: &IterationSettings,
    analysis: &AnalysisSettings,
) -> OrbitClassification {
    match orbit.status {
        OrbitStatus::Singular(step) => return OrbitClassification::Singular { step },
        OrbitStatus::Escaped(step) => return OrbitClassification::Unbounded { step },
        OrbitStatus::Completed => {}
    }
    if let Some(limit) =
        detect_convergence(orbit, analysis.convergence_tol, analysis.convergence_window)
    {
        return OrbitClassification::ConvergesToEquilibrium { limit };
    }
    if let Some(cycle) = detect_cycle(orbit, analysis.cycle_tol, analysis.max_period) {
        return OrbitClassification::Periodic(cycle);
    }
    let steps = orbit.steps();
    let transient = (steps / 2).max(MIN_TRANSIENT);
    if transient + 1 >= steps {
        return OrbitClassification::Undetermined;
    }
    let tail_bounded = orbit.points[transient..]
        .iter()
        .all(|z| z.norm() <= settings.escape_radius);
    if !tail_bounded {
        return OrbitClassification::Undetermined;
    }
    match tangent_rate(params, &orbit.points, transient, settings.singular_tol) {
        Ok((lambda_max, stable)) if lambda_max > analysis.chaos_threshold => {
            let n_sample = steps - transient;
            OrbitClassification::Chaotic(LyapunovEstimate {
                lambda_max,
                n_transient: transient,
                n_sample,
                converged: stable && n_sample >= 1000,
            })
        }
        _ => OrbitClassification::Undetermined,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stability::{equilibria, equilibrium_on_branch, RootBranch};

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn constant_orbit() -> (Parameters, Orbit) {
        let p = Parameters::from_parts(1.0, 1.0, 1.0, 1.0);
        let z_bar = equilibria(&p)[1].z_bar;
        let o = iterate(
            &p,
            OrbitSeed::constant(z_bar),
            &IterationSettings::with_steps(100),
        );
        (p, o)
    }

    #[test]
    fn constant_orbit_converges_and_has_period_one() {
        let (p, o) = constant_orbit();
        let z_bar = equilibria(&p)[1].z_bar;
        let limit = detect_convergence(&o, 1e-9, 32).unwrap();
        assert!((limit - z_bar).norm() < 1e-12);
        let cyc = detect_cycle(&o, 1e-6, 128).unwrap();
        assert_eq!(cyc.period, 1);
    }

    #[test]
    fn stable_equilibrium_attracts() {
        let p = Parameters::from_parts(1.0, 1.0, 1.0, 1.0);
        let target = 0.5 * (c(1.0, 2.0) + c(1.0, 8.0).sqrt());
        let seed = OrbitSeed::new(target + c(0.05, -0.03), target + c(-0.02, 0.04)).unwrap();
        let o = iterate(&p, seed, &IterationSettings::with_steps(2000));
        let limit = detect_convergence(&o, 1e-9, 32).unwrap();
        assert!((limit - target).norm() < 1e-6);
    }

    #[test]
    fn escaped_orbit_does_not_converge() {
        let p = Parameters::from_parts(60.0, 4.0, 89.0, 86.0);
        let o = iterate(
            &p,
            OrbitSeed::constant(c(0.1, 0.1)),
            &IterationSettings::with_steps(10_000),
        );
        assert!(!o.is_completed());
        assert!(detect_convergence(&o, 1e-9, 32).is_none());
        assert!(detect_cycle(&o, 1e-6, 128).is_none());
    }

    #[test]
    fn period_seven_from_table() {
        let p = Parameters::from_parts(0.0098, 0.5323, 0.2794, 0.9462);
        let seed = OrbitSeed::new(c(-0.5938, -0.3212), c(-1.2230, 1.7184)).unwrap();
        let o = iterate(&p, seed, &IterationSettings::with_steps(20_000));
        let cyc = detect_cycle(&o, 1e-6, 128).unwrap();
        assert_eq!(cyc.period, 7);
        assert_eq!(cyc.cycle_points.len(), 7);
        assert!(cyc.onset < o.points.len() / 2);
    }

    #[test]
    fn stable_case_has_negative_exponent() {
        let p = Parameters::from_parts(1.0, 1.0, 1.0, 1.0);
        let z = equilibrium_on_branch(&p, RootBranch::Plus);
        let seed = OrbitSeed::new(z + c(0.01, 0.0), z).unwrap();
        let est = lyapunov_max(&p, seed, 500, 2000).unwrap();
        assert!(est.lambda_max < 0.0, "{est:?}");
        let oracle = lyapunov_divergence_oracle(&p, seed, 1e-8, 2000).unwrap();
        assert!(oracle < 0.0, "{oracle}");
    }

    #[test]
    fn lyapunov_reports_escape() {
        let p = Parameters::from_parts(40.0, 33.0, 27.0, 77.0);
        let seed = OrbitSeed::constant(c(0.2, 0.1));
        assert!(matches!(
            lyapunov_max(&p, seed, 500, 1000),
            Err(Error::EscapedOrbit { .. })
        ));
        assert!(matches!(
            lyapunov_divergence_oracle(&p, seed, 1e-8, 1000),
            Err(Error::EscapedOrbit { .. })
        ));
    }

    #[test]
    fn oracle_rejects_bad_delta() {
        let p = Parameters::from_parts(1.0, 1.0, 1.0, 1.0);
        let seed = OrbitSeed::constant(c(0.2, 0.1));
        assert!(matches!(
            lyapunov_divergence_oracle(&p, seed, 1e-3, 10),
            Err(Error::Range(_))
        ));
        assert!(matches!(
            lyapunov_divergence_oracle(&p, seed, 1e-12, 10),
            Err(Error::Range(_))
        ));
    }

    #[test]
    fn constant_map_exponent_is_floored() {
        let p = Parameters::from_parts(0.5, 0.0, 0.0, 0.0);
        let est = lyapunov_max(&p, OrbitSeed::constant(c(0.1, 0.0)), 10, 100).unwrap();
        assert!(est.lambda_max.is_finite() && est.lambda_max < -100.0);
    }

    #[test]
    fn classification_priorities() {
        let s = IterationSettings::with_steps(20_000);
        let a = AnalysisSettings::default();

        let unb = classify_orbit(
            &Parameters::from_parts(60.0, 4.0, 89.0, 86.0),
            OrbitSeed::constant(c(0.3, 0.3)),
            &s,
            &a,
        );
        assert!(matches!(unb, OrbitClassification::Unbounded { .. }));

        let sing = classify_orbit(
            &Parameters::from_parts(0.0, 0.0, -1.0, 0.0),
            OrbitSeed::new(c(1.0, 0.0), c(0.0, 0.0)).unwrap(),
            &s,
            &a,
        );
        assert!(matches!(sing, OrbitClassification::Singular { .. }));

        let (p, o) = constant_orbit();
        let conv = classify_computed(&p, &o, &s, &a);
        assert!(matches!(
            conv,
            OrbitClassification::ConvergesToEquilibrium { .. }
        ));
        assert_eq!(conv.tag(), VerdictTag::Converges);
    }

    #[test]
    fn short_aperiodic_orbit_is_undetermined() {
        let p = Parameters::from_parts(0.0007, 0.2836, 0.5508, 0.8709);
        let s = IterationSettings::with_steps(200);
        let v = classify_orbit(
            &p,
            OrbitSeed::constant(c(0.1, 0.2)),
            &s,
            &AnalysisSettings::default(),
        );
        assert_eq!(v, OrbitClassification::Undetermined);
    }
}
