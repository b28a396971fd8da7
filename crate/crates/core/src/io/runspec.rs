//! Command-line grammar and the resolved run specification.
//!
//! ```text
//! ratdiff <command> --alpha A --beta B [--seed Z-1,Z0] [--steps N]
//!         [--config FILE] [--out PATH] [--format csv|json|svg] [--rng-seed K] ...
//! ```
//!
//! Values from `--config` are used only for flags not given on the command
//! line.

use std::path::PathBuf;

use clap::{Parser, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::analysis::AnalysisSettings;
use crate::error::{Error, Result};
use crate::io::config::parse_config;
use crate::io::literal::{parse_complex, parse_seed_list};
use crate::map::{IterationSettings, OrbitSeed, DEFAULT_ESCAPE_RADIUS, DEFAULT_SINGULAR_TOL};
use crate::periodicity::DEFAULT_BOUNDARY_TOL;
use crate::scan::ComplexRect;
use crate::stability::RootBranch;
use crate::C64;

/// Orbit length used when `--steps` is absent, per command.
pub const DEFAULT_ORBIT_STEPS: usize = 50;
pub const DEFAULT_ANALYSIS_STEPS: usize = 20_000;
pub const DEFAULT_IDENTITY_STEPS: usize = 100;
pub const DEFAULT_BUDGET: usize = 100_000;
pub const DEFAULT_RESOLUTION: (usize, usize) = (16, 16);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    Orbit,
    Equilibria,
    Stability,
    Trichotomy,
    Period,
    Lyapunov,
    Scan,
    Grid,
    Identities,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Csv,
    Json,
    Svg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BranchArg {
    Minus,
    Plus,
}

impl From<BranchArg> for RootBranch {
    fn from(b: BranchArg) -> Self {
        match b {
            BranchArg::Minus => RootBranch::Minus,
            BranchArg::Plus => RootBranch::Plus,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GridAxis {
    Seed,
    Alpha,
    Beta,
}

fn complex_arg(s: &str) -> std::result::Result<C64, String> {
    parse_complex(s).map_err(|e| e.to_string())
}

fn seeds_arg(s: &str) -> std::result::Result<Vec<OrbitSeed>, String> {
    parse_seed_list(s).map_err(|e| e.to_string())
}

fn rect_arg(s: &str) -> std::result::Result<ComplexRect, String> {
    let v: Vec<f64> = s
        .split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| format!("bad number '{t}'"))
        })
        .collect::<std::result::Result<_, _>>()?;
    match v[..] {
        [a, b, c, d] => ComplexRect::new(a, b, c, d).map_err(|e| e.to_string()),
        _ => Err("expected re_min,re_max,im_min,im_max".into()),
    }
}

fn resolution_arg(s: &str) -> std::result::Result<(usize, usize), String> {
    let (a, b) = s
        .split_once(['x', ','])
        .ok_or_else(|| "expected NXxNY".to_string())?;
    let nx = a
        .trim()
        .parse::<usize>()
        .map_err(|_| format!("bad count '{a}'"))?;
    let ny = b
        .trim()
        .parse::<usize>()
        .map_err(|_| format!("bad count '{b}'"))?;
    if nx == 0 || ny == 0 {
        return Err("resolution must be at least 1x1".into());
    }
    Ok((nx, ny))
}

#[derive(Debug, Clone, Parser)]
#[command(
    name = "ratdiff",
    version,
    about = "Dynamics of z(n+1) = (a + a z(n) + b z(n-1)) / (1 + z(n)) over the complex numbers"
)]
struct Cli {
    #[arg(value_enum)]
    command: Command,
    #[arg(long, value_parser = complex_arg, allow_hyphen_values = true)]
    alpha: Option<C64>,
    #[arg(long, value_parser = complex_arg, allow_hyphen_values = true)]
    beta: Option<C64>,
    /// `z_-1,z_0`; repeat the flag or separate pairs with `;` for several seeds.
    #[arg(long = "seed", value_parser = seeds_arg, allow_hyphen_values = true)]
    seed: Vec<Vec<OrbitSeed>>,
    #[arg(long)]
    steps: Option<usize>,
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    #[arg(long = "rng-seed")]
    rng_seed: Option<u64>,
    #[arg(long = "escape-radius")]
    escape_radius: Option<f64>,
    #[arg(long = "singular-tol")]
    singular_tol: Option<f64>,
    #[arg(long = "cycle-tol")]
    cycle_tol: Option<f64>,
    #[arg(long = "max-period")]
    max_period: Option<usize>,
    #[arg(long = "chaos-threshold")]
    chaos_threshold: Option<f64>,
    #[arg(long)]
    transient: Option<usize>,
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long, value_enum)]
    branch: Option<BranchArg>,
    #[arg(long)]
    budget: Option<usize>,
    #[arg(long = "region-alpha", value_parser = rect_arg, allow_hyphen_values = true)]
    region_alpha: Option<ComplexRect>,
    #[arg(long = "region-beta", value_parser = rect_arg, allow_hyphen_values = true)]
    region_beta: Option<ComplexRect>,
    #[arg(long, value_parser = rect_arg, allow_hyphen_values = true)]
    region: Option<ComplexRect>,
    #[arg(long, value_parser = resolution_arg)]
    resolution: Option<(usize, usize)>,
    #[arg(long, value_enum)]
    axis: Option<GridAxis>,
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long = "boundary-tol")]
    boundary_tol: Option<f64>,
}

impl Cli {
    /// Fills every unset field from `other`.
    fn fill_from(mut self, other: Cli) -> Cli {
        macro_rules! fill {
            ($($f:ident),*) => { $( if self.$f.is_none() { self.$f = other.$f; } )* };
        }
        fill!(
            alpha,
            beta,
            steps,
            out,
            format,
            rng_seed,
            escape_radius,
            singular_tol,
            cycle_tol,
            max_period,
            chaos_threshold,
            transient,
            samples,
            branch,
            budget,
            region_alpha,
            region_beta,
            region,
            resolution,
            axis,
            epsilon,
            boundary_tol
        );
        if self.seed.is_empty() {
            self.seed = other.seed;
        }
        self
    }
}

/// Fully resolved description of one run; echoed into every result.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSpec {
    pub command: Command,
    #[serde(with = "crate::io::literal::serde_opt_c64")]
    pub alpha: Option<C64>,
    #[serde(with = "crate::io::literal::serde_opt_c64")]
    pub beta: Option<C64>,
    #[serde(with = "crate::io::literal::serde_seeds")]
    pub seeds: Vec<OrbitSeed>,
    pub settings: IterationSettings,
    pub analysis: AnalysisSettings,
    pub transient: Option<usize>,
    pub samples: Option<usize>,
    pub branch: BranchArg,
    pub budget: usize,
    pub region_alpha: ComplexRect,
    pub region_beta: ComplexRect,
    pub region: ComplexRect,
    pub resolution: (usize, usize),
    pub axis: GridAxis,
    pub epsilon: Option<f64>,
    pub boundary_tol: f64,
    pub rng_seed: u64,
    pub out: Option<PathBuf>,
    pub format: Format,
}

impl RunSpec {
    /// Defaults for `command` with everything else unset.
    pub fn defaults(command: Command) -> RunSpec {
        let steps = match command {
            Command::Orbit => DEFAULT_ORBIT_STEPS,
            Command::Identities => DEFAULT_IDENTITY_STEPS,
            _ => DEFAULT_ANALYSIS_STEPS,
        };
        RunSpec {
            command,
            alpha: None,
            beta: None,
            seeds: Vec::new(),
            settings: IterationSettings::with_steps(steps),
            analysis: AnalysisSettings::default(),
            transient: None,
            samples: None,
            branch: BranchArg::Plus,
            budget: DEFAULT_BUDGET,
            region_alpha: ComplexRect::unit_square(),
            region_beta: ComplexRect::unit_square(),
            region: ComplexRect::unit_square(),
            resolution: DEFAULT_RESOLUTION,
            axis: GridAxis::Seed,
            epsilon: None,
            boundary_tol: DEFAULT_BOUNDARY_TOL,
            rng_seed: 0,
            out: None,
            format: Format::Json,
        }
    }

    fn from_cli(cli: Cli) -> Result<RunSpec> {
        let mut spec = RunSpec::defaults(cli.command);
        spec.alpha = cli.alpha;
        spec.beta = cli.beta;
        spec.seeds = cli.seed.into_iter().flatten().collect();
        spec.settings = IterationSettings {
            max_steps: cli.steps.unwrap_or(spec.settings.max_steps),
            escape_radius: cli.escape_radius.unwrap_or(DEFAULT_ESCAPE_RADIUS),
            singular_tol: cli.singular_tol.unwrap_or(DEFAULT_SINGULAR_TOL),
        };
        spec.settings
            .validate()
            .map_err(|e| Error::Usage(format!("--steps/--escape-radius/--singular-tol: {e}")))?;
        let a = &mut spec.analysis;
        a.cycle_tol = cli.cycle_tol.unwrap_or(a.cycle_tol);
        a.max_period = cli.max_period.unwrap_or(a.max_period);
        a.chaos_threshold = cli.chaos_threshold.unwrap_or(a.chaos_threshold);
        if a.cycle_tol.is_nan() || a.cycle_tol <= 0.0 {
            return Err(Error::Usage("--cycle-tol must be positive".into()));
        }
        if a.max_period == 0 {
            return Err(Error::Usage("--max-period must be positive".into()));
        }
        spec.transient = cli.transient;
        spec.samples = cli.samples;
        if spec.samples == Some(0) {
            return Err(Error::Usage("--samples must be positive".into()));
        }
        spec.branch = cli.branch.unwrap_or(spec.branch);
        spec.budget = cli.budget.unwrap_or(spec.budget);
        if spec.budget == 0 {
            return Err(Error::Usage("--budget must be at least 1".into()));
        }
        spec.region_alpha = cli.region_alpha.unwrap_or(spec.region_alpha);
        spec.region_beta = cli.region_beta.unwrap_or(spec.region_beta);
        spec.region = cli.region.unwrap_or(spec.region);
        spec.resolution = cli.resolution.unwrap_or(spec.resolution);
        spec.axis = cli.axis.unwrap_or(spec.axis);
        spec.epsilon = cli.epsilon;
        spec.boundary_tol = cli.boundary_tol.unwrap_or(spec.boundary_tol);
        if spec.boundary_tol.is_nan() || spec.boundary_tol < 0.0 {
            return Err(Error::Usage("--boundary-tol must be non-negative".into()));
        }
        spec.rng_seed = cli.rng_seed.unwrap_or(0);
        spec.out = cli.out;
        spec.format = cli.format.unwrap_or(Format::Json);
        Ok(spec)
    }

    /// Command line that reproduces this spec.
    pub fn to_args(&self) -> Vec<String> {
        use crate::io::literal::{format_complex, format_seed};
        let name = |v: &dyn erased::ValueName| v.name();
        let mut out = vec![name(&self.command)];
        let mut push = |flag: &str, value: String| {
            out.push(format!("--{flag}"));
            out.push(value);
        };
        if let Some(a) = self.alpha {
            push("alpha", format_complex(a));
        }
        if let Some(b) = self.beta {
            push("beta", format_complex(b));
        }
        for s in &self.seeds {
            push("seed", format_seed(s));
        }
        push("steps", self.settings.max_steps.to_string());
        push(
            "escape-radius",
            format!("{:e}", self.settings.escape_radius),
        );
        push("singular-tol", format!("{:e}", self.settings.singular_tol));
        push("cycle-tol", format!("{:e}", self.analysis.cycle_tol));
        push("max-period", self.analysis.max_period.to_string());
        push(
            "chaos-threshold",
            format!("{:e}", self.analysis.chaos_threshold),
        );
        if let Some(t) = self.transient {
            push("transient", t.to_string());
        }
        if let Some(s) = self.samples {
            push("samples", s.to_string());
        }
        push("branch", name(&self.branch));
        push("budget", self.budget.to_string());
        let rect = |r: &ComplexRect| {
            format!(
                "{:e},{:e},{:e},{:e}",
                r.re_min, r.re_max, r.im_min, r.im_max
            )
        };
        push("region-alpha", rect(&self.region_alpha));
        push("region-beta", rect(&self.region_beta));
        push("region", rect(&self.region));
        push(
            "resolution",
            format!("{}x{}", self.resolution.0, self.resolution.1),
        );
        push("axis", name(&self.axis));
        if let Some(e) = self.epsilon {
            push("epsilon", format!("{e:e}"));
        }
        push("boundary-tol", format!("{:e}", self.boundary_tol));
        push("rng-seed", self.rng_seed.to_string());
        if let Some(o) = &self.out {
            push("out", o.display().to_string());
        }
        push("format", name(&self.format));
        out
    }
}

mod erased {
    use clap::ValueEnum;

    pub trait ValueName {
        fn name(&self) -> String;
    }

    impl<T: ValueEnum> ValueName for T {
        fn name(&self) -> String {
            self.to_possible_value()
                .map(|v| v.get_name().to_string())
                .unwrap_or_default()
        }
    }
}

fn clap_usage(e: clap::Error) -> Error {
    Error::Usage(e.render().to_string().trim_end().to_string())
}

/// Parses `argv` (without the program name) into a resolved [`RunSpec`].
///
/// `--help` and `--version` surface as usage errors carrying the rendered
/// text; the binary prints them and exits accordingly.
pub fn parse_args<S: AsRef<str>>(argv: &[S]) -> Result<RunSpec> {
    let tokens = std::iter::once("ratdiff").chain(argv.iter().map(|s| s.as_ref()));
    let mut cli = Cli::try_parse_from(tokens).map_err(clap_usage)?;
    if let Some(path) = cli.config.clone() {
        let text = std::fs::read_to_string(&path)
            .map_err(|e| Error::Usage(format!("--config {}: {e}", path.display())))?;
        let from_file = config_to_cli(cli.command, &text)
            .map_err(|e| Error::Usage(format!("--config {}: {e}", path.display())))?;
        cli = cli.fill_from(from_file);
    }
    RunSpec::from_cli(cli)
}

fn config_to_cli(command: Command, text: &str) -> Result<Cli> {
    let entries = parse_config(text)?;
    let mut tokens = vec!["ratdiff".to_string(), erased::ValueName::name(&command)];
    for e in entries {
        if e.key == "config" {
            return Err(Error::Usage(format!(
                "line {}: nested config files are not supported",
                e.line
            )));
        }
        tokens.push(format!("--{}", e.key));
        tokens.push(e.value);
    }
    let cmd = <Cli as clap::CommandFactory>::command().args_override_self(true);
    let matches = cmd.try_get_matches_from(tokens).map_err(clap_usage)?;
    <Cli as clap::FromArgMatches>::from_arg_matches(&matches).map_err(clap_usage)
}

/// Parses a config file body on its own, for tooling and fuzzing.
pub fn parse_config_spec(command: Command, text: &str) -> Result<RunSpec> {
    RunSpec::from_cli(config_to_cli(command, text)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn orbit_grammar_instance() {
        let spec = parse_args(&[
            "orbit",
            "--alpha",
            "1+1i",
            "--beta",
            "1+1i",
            "--seed",
            "0.1+0i,0.2+0i",
            "--steps",
            "100",
        ])
        .unwrap();
        assert_eq!(spec.command, Command::Orbit);
        assert_eq!(spec.alpha, Some(C64::new(1.0, 1.0)));
        assert_eq!(spec.seeds.len(), 1);
        assert_eq!(spec.seeds[0].z_0, C64::new(0.2, 0.0));
        assert_eq!(spec.settings.max_steps, 100);
        assert_eq!(spec.format, Format::Json);
    }

    #[test]
    fn negative_literals_are_values() {
        let spec = parse_args(&[
            "stability",
            "--alpha",
            "-0.86278+0.446302i",
            "--beta",
            "-0.0309069+0.749819i",
        ])
        .unwrap();
        assert_eq!(spec.alpha.unwrap().re, -0.86278);
    }

    #[test]
    fn bad_literal_names_flag() {
        let err = parse_args(&["orbit", "--alpha", "bogus"]).unwrap_err();
        match err {
            Error::Usage(msg) => assert!(msg.contains("--alpha"), "{msg}"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn unknown_flag_and_command() {
        assert!(matches!(
            parse_args(&["orbit", "--gamma", "1"]),
            Err(Error::Usage(_))
        ));
        assert!(matches!(parse_args(&["fly"]), Err(Error::Usage(_))));
        assert!(matches!(parse_args::<&str>(&[]), Err(Error::Usage(_))));
        assert!(matches!(
            parse_args(&["grid", "--resolution", "0x3"]),
            Err(Error::Usage(_))
        ));
        assert!(matches!(
            parse_args(&["scan", "--budget", "0"]),
            Err(Error::Usage(_))
        ));
        assert!(matches!(
            parse_args(&["orbit", "--escape-radius", "0.5"]),
            Err(Error::Usage(_))
        ));
    }

    #[test]
    fn to_args_round_trip() {
        let spec = parse_args(&[
            "grid",
            "--alpha",
            "0.2278+0.321i",
            "--beta",
            "0.82956+0.8221i",
            "--seed",
            "1,2;3i,-4i",
            "--region",
            "-1,1,-0.5,0.5",
            "--resolution",
            "3x2",
            "--rng-seed",
            "9",
            "--format",
            "svg",
            "--epsilon",
            "0.25",
            "--transient",
            "700",
        ])
        .unwrap();
        let again = parse_args(&spec.to_args()).unwrap();
        assert_eq!(spec, again);
    }
}
