//! Parameter-space search for Clark-margin extrema and classification grids.
//!
//! Margin scans draw `(α, β)` uniformly from two rectangles with a seeded
//! ChaCha stream, evaluate in parallel and reduce by sample index, so the
//! result does not depend on thread scheduling. Every time the running
//! maximum (or minimum) improves, the improving point is remembered; each of
//! these record points is then polished by a deterministic coordinate
//! pattern search. Because the records seen with a smaller budget are a
//! prefix of those seen with a larger one, the reported extrema are monotone
//! in the budget.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analysis::{classify_orbit, AnalysisSettings, OrbitClassification, VerdictTag};
use crate::error::{Error, Result};
use crate::map::{IterationSettings, OrbitSeed, Parameters};
use crate::stability::{clark_margin_at, RootBranch};
use crate::C64;

pub const REFINE_ROUNDS: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComplexRect {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
}

impl ComplexRect {
    /// Degenerate (zero-width) sides are allowed so that a region can
    /// collapse to a line or a point.
    pub fn new(re_min: f64, re_max: f64, im_min: f64, im_max: f64) -> Result<Self> {
        let all_finite = [re_min, re_max, im_min, im_max]
            .iter()
            .all(|v| v.is_finite());
        if !all_finite || re_min > re_max || im_min > im_max {
            return Err(Error::Range(format!(
                "invalid rectangle [{re_min}, {re_max}] x [{im_min}, {im_max}]"
            )));
        }
        Ok(Self {
            re_min,
            re_max,
            im_min,
            im_max,
        })
    }

    pub fn unit_square() -> Self {
        Self {
            re_min: -1.0,
            re_max: 1.0,
            im_min: -1.0,
            im_max: 1.0,
        }
    }

    pub fn point(z: C64) -> Self {
        Self {
            re_min: z.re,
            re_max: z.re,
            im_min: z.im,
            im_max: z.im,
        }
    }

    pub fn clamp(&self, z: C64) -> C64 {
        C64::new(
            z.re.clamp(self.re_min, self.re_max),
            z.im.clamp(self.im_min, self.im_max),
        )
    }

    /// Center of cell `(ix, iy)` of an `nx × ny` partition, `iy` counting up
    /// from `im_min`.
    pub fn cell_center(&self, ix: usize, iy: usize, nx: usize, ny: usize) -> C64 {
        let dx = (self.re_max - self.re_min) / nx as f64;
        let dy = (self.im_max - self.im_min) / ny as f64;
        C64::new(
            self.re_min + (ix as f64 + 0.5) * dx,
            self.im_min + (iy as f64 + 0.5) * dy,
        )
    }

    fn sample<R: Rng>(&self, rng: &mut R) -> C64 {
        C64::new(
            uniform(rng, self.re_min, self.re_max),
            uniform(rng, self.im_min, self.im_max),
        )
    }
}

fn uniform<R: Rng>(rng: &mut R, lo: f64, hi: f64) -> f64 {
    // one draw per coordinate even for degenerate sides keeps streams aligned
    let u: f64 = rng.gen();
    lo + (hi - lo) * u
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExtremaReport {
    pub max_value: f64,
    #[serde(with = "crate::io::literal::serde_pair")]
    pub argmax: (C64, C64),
    pub min_value: f64,
    #[serde(with = "crate::io::literal::serde_pair")]
    pub argmin: (C64, C64),
    /// Successful functional evaluations (random phase plus refinement).
    pub samples: usize,
}

pub fn evaluate_margin(branch: RootBranch, alpha: C64, beta: C64) -> Result<f64> {
    clark_margin_at(&Parameters { alpha, beta }, branch)
}

fn margin_or_none(branch: RootBranch, point: (C64, C64)) -> Option<f64> {
    evaluate_margin(branch, point.0, point.1)
        .ok()
        .filter(|v| v.is_finite())
}

#[derive(Debug, Clone, Copy)]
struct Best {
    value: f64,
    arg: (C64, C64),
}

/// Running extrema over `values` in index order, with the record points.
fn records(points: &[(C64, C64)], values: &[Option<f64>]) -> (Vec<Best>, Vec<Best>, usize) {
    let mut max_recs: Vec<Best> = Vec::new();
    let mut min_recs: Vec<Best> = Vec::new();
    let mut count = 0;
    for (pt, v) in points.iter().zip(values) {
        let Some(v) = *v else { continue };
        count += 1;
        if max_recs.last().is_none_or(|b| v > b.value) {
            max_recs.push(Best { value: v, arg: *pt });
        }
        if min_recs.last().is_none_or(|b| v < b.value) {
            min_recs.push(Best { value: v, arg: *pt });
        }
    }
    (max_recs, min_recs, count)
}

/// Extrema over an explicit list of `(α, β)` points, first occurrence wins
/// ties. Points where the functional is undefined are skipped.
pub fn extrema_over(branch: RootBranch, points: &[(C64, C64)]) -> Option<ExtremaReport> {
    let values: Vec<Option<f64>> = points
        .par_iter()
        .map(|&pt| margin_or_none(branch, pt))
        .collect();
    let (max_recs, min_recs, count) = records(points, &values);
    let (hi, lo) = (max_recs.last()?, min_recs.last()?);
    Some(ExtremaReport {
        max_value: hi.value,
        argmax: hi.arg,
        min_value: lo.value,
        argmin: lo.arg,
        samples: count,
    })
}

/// Coordinate pattern search over `(Re α, Im α, Re β, Im β)` with step sizes
/// halving each round. `sign = 1` maximizes, `-1` minimizes.
fn refine(
    branch: RootBranch,
    start: Best,
    region_alpha: &ComplexRect,
    region_beta: &ComplexRect,
    sign: f64,
    evals: &mut usize,
) -> Best {
    let mut best = start;
    let mut h = [
        0.05 * (region_alpha.re_max - region_alpha.re_min),
        0.05 * (region_alpha.im_max - region_alpha.im_min),
        0.05 * (region_beta.re_max - region_beta.re_min),
        0.05 * (region_beta.im_max - region_beta.im_min),
    ];
    for _ in 0..REFINE_ROUNDS {
        for (coord, step) in h.iter().enumerate() {
            if *step == 0.0 {
                continue;
            }
            for dir in [1.0, -1.0] {
                let (mut a, mut b) = best.arg;
                match coord {
                    0 => a.re += dir * step,
                    1 => a.im += dir * step,
                    2 => b.re += dir * step,
                    _ => b.im += dir * step,
                }
                let cand = (region_alpha.clamp(a), region_beta.clamp(b));
                if let Some(v) = margin_or_none(branch, cand) {
                    *evals += 1;
                    if sign * v > sign * best.value {
                        best = Best {
                            value: v,
                            arg: cand,
                        };
                    }
                }
            }
        }
        for step in h.iter_mut() {
            *step *= 0.5;
        }
    }
    best
}

/// Random search with local refinement for the extrema of the Clark margin
/// of one equilibrium branch. Deterministic given `rng_seed`.
pub fn scan_margin(
    branch: RootBranch,
    region_alpha: &ComplexRect,
    region_beta: &ComplexRect,
    budget: usize,
    rng_seed: u64,
) -> Result<ExtremaReport> {
    if budget == 0 {
        return Err(Error::Range("budget must be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let points: Vec<(C64, C64)> = (0..budget)
        .map(|_| (region_alpha.sample(&mut rng), region_beta.sample(&mut rng)))
        .collect();
    let values: Vec<Option<f64>> = points
        .par_iter()
        .map(|&pt| margin_or_none(branch, pt))
        .collect();
    let (max_recs, min_recs, mut evals) = records(&points, &values);
    if max_recs.is_empty() {
        return Err(Error::Singular { distance: 0.0 });
    }

    let refine_all = |recs: &[Best], sign: f64| -> (Best, usize) {
        let results: Vec<(Best, usize)> = recs
            .par_iter()
            .map(|&r| {
                let mut n = 0;
                (
                    refine(branch, r, region_alpha, region_beta, sign, &mut n),
                    n,
                )
            })
            .collect();
        let mut best = *recs.last().expect("non-empty records");
        let mut n = 0;
        for (cand, k) in results {
            n += k;
            if sign * cand.value > sign * best.value {
                best = cand;
            }
        }
        (best, n)
    };
    let (hi, n_hi) = refine_all(&max_recs, 1.0);
    let (lo, n_lo) = refine_all(&min_recs, -1.0);
    evals += n_hi + n_lo;

    Ok(ExtremaReport {
        max_value: hi.value,
        argmax: hi.arg,
        min_value: lo.value,
        argmin: lo.arg,
        samples: evals,
    })
}

/// What a classification grid varies over its cells.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GridSpec {
    /// Fixed parameters; each cell center `c` seeds the orbit with `(c, c)`.
    Seeds { params: Parameters },
    /// Fixed `β` and seed; cell centers are `α`.
    Alpha { beta: C64, seed: OrbitSeed },
    /// Fixed `α` and seed; cell centers are `β`.
    Beta { alpha: C64, seed: OrbitSeed },
}

impl GridSpec {
    pub fn case_at(&self, center: C64) -> (Parameters, OrbitSeed) {
        match *self {
            GridSpec::Seeds { params } => (params, OrbitSeed::constant(center)),
            GridSpec::Alpha { beta, seed } => (
                Parameters {
                    alpha: center,
                    beta,
                },
                seed,
            ),
            GridSpec::Beta { alpha, seed } => (
                Parameters {
                    alpha,
                    beta: center,
                },
                seed,
            ),
        }
    }

    pub fn axis_name(&self) -> &'static str {
        match self {
            GridSpec::Seeds { .. } => "seed",
            GridSpec::Alpha { .. } => "alpha",
            GridSpec::Beta { .. } => "beta",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassificationGrid {
    pub region: ComplexRect,
    pub nx: usize,
    pub ny: usize,
    pub axis: String,
    /// `cells[iy][ix]`, rows counting up from `im_min`.
    pub cells: Vec<Vec<VerdictTag>>,
}

impl ClassificationGrid {
    pub fn count(&self, pred: impl Fn(&VerdictTag) -> bool) -> usize {
        self.cells.iter().flatten().filter(|t| pred(t)).count()
    }
}

fn grid_cell(
    spec: &GridSpec,
    region: &ComplexRect,
    nx: usize,
    ny: usize,
    idx: usize,
    settings: &IterationSettings,
    analysis: &AnalysisSettings,
) -> OrbitClassification {
    let (ix, iy) = (idx % nx, idx / nx);
    let (params, seed) = spec.case_at(region.cell_center(ix, iy, nx, ny));
    classify_orbit(&params, seed, settings, analysis)
}

fn assemble(
    region: ComplexRect,
    nx: usize,
    ny: usize,
    spec: &GridSpec,
    flat: Vec<VerdictTag>,
) -> ClassificationGrid {
    ClassificationGrid {
        region,
        nx,
        ny,
        axis: spec.axis_name().to_string(),
        cells: flat.chunks(nx).map(|row| row.to_vec()).collect(),
    }
}

fn check_resolution(nx: usize, ny: usize) -> Result<()> {
    if nx == 0 || ny == 0 {
        return Err(Error::Range(format!(
            "grid resolution must be at least 1x1, got {nx}x{ny}"
        )));
    }
    Ok(())
}

/// Classifies the orbit at every cell center, in parallel.
pub fn classification_grid(
    spec: &GridSpec,
    region: ComplexRect,
    resolution: (usize, usize),
    settings: &IterationSettings,
    analysis: &AnalysisSettings,
) -> Result<ClassificationGrid> {
    let (nx, ny) = resolution;
    check_resolution(nx, ny)?;
    let flat: Vec<VerdictTag> = (0..nx * ny)
        .into_par_iter()
        .map(|idx| grid_cell(spec, &region, nx, ny, idx, settings, analysis).tag())
        .collect();
    Ok(assemble(region, nx, ny, spec, flat))
}

/// Serial twin of [`classification_grid`].
pub fn classification_grid_serial(
    spec: &GridSpec,
    region: ComplexRect,
    resolution: (usize, usize),
    settings: &IterationSettings,
    analysis: &AnalysisSettings,
) -> Result<ClassificationGrid> {
    let (nx, ny) = resolution;
    check_resolution(nx, ny)?;
    let flat: Vec<VerdictTag> = (0..nx * ny)
        .map(|idx| grid_cell(spec, &region, nx, ny, idx, settings, analysis).tag())
        .collect();
    Ok(assemble(region, nx, ny, spec, flat))
}
