//! The `qdyn` command line.
//!
//! Every command is a pure function of its arguments (and the optional JSON
//! config file) that writes to the supplied streams, so the binary and the
//! tests share one entry point: [`run`].
//!
//! Exit codes: 0 success, 1 verification failure, 2 usage or precondition
//! error.

use std::fmt::Write as _;
use std::io::Write;
use std::path::PathBuf;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dynamics::{
    basin_boundary, classify_fate_with, iterate_with, linspace, region_membership, BoundarySample, Fate, FateConfig,
    FateReport, RegionKind, RegionSpec, Termination, DEFAULT_BUDGET, DEFAULT_EPS_CONV, DEFAULT_R_ESCAPE,
};
use crate::error::{QdynError, Result};
use crate::fixed_points::{enumerate_fixed_points, fixed_point_for_support, FixedPoint, SupportMask};
use crate::model::{self, State, ThetaParams};
use crate::sampling::SweepSampler;
use crate::stability::{classify, eigenvalue_two_residual, spectrum_at, StabilityTag, DEFAULT_TAU_UNIT};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

pub const DEFAULT_BISECT_TOL: f64 = 1e-8;
pub const DEFAULT_STEPS: usize = 100;
pub const DEFAULT_TRIALS: usize = 100;
/// Largest dimension accepted by `verify`.
pub const VERIFY_MAX_DIM: usize = 12;

/// Limits applied by `verify`.
pub const EV2_DISTANCE_LIMIT: f64 = 1e-6;
pub const EV2_RESIDUAL_LIMIT: f64 = 1e-8;
pub const FIXED_POINT_RESIDUAL_LIMIT: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    pub tau_unit: f64,
    pub eps_conv: f64,
    pub r_escape: f64,
    pub bisect_tol: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            tau_unit: DEFAULT_TAU_UNIT,
            eps_conv: DEFAULT_EPS_CONV,
            r_escape: DEFAULT_R_ESCAPE,
            bisect_tol: DEFAULT_BISECT_TOL,
        }
    }
}

/// Settings shared by all commands. When `output_format` is unset each
/// command picks its own: JSON for fixed-points and classify, CSV for
/// simulate and basin, a plain-text summary for verify.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub theta: Vec<f64>,
    pub seed: u64,
    pub tolerances: Tolerances,
    pub budget: usize,
    pub output_format: Option<OutputFormat>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            theta: Vec::new(),
            seed: 0,
            tolerances: Tolerances::default(),
            budget: DEFAULT_BUDGET,
            output_format: None,
        }
    }
}

/// Config file contents; every field is optional and overrides the flags.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    theta: Option<Vec<f64>>,
    seed: Option<u64>,
    tolerances: Option<PartialTolerances>,
    budget: Option<usize>,
    output_format: Option<OutputFormat>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct PartialTolerances {
    tau_unit: Option<f64>,
    eps_conv: Option<f64>,
    r_escape: Option<f64>,
    bisect_tol: Option<f64>,
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        let t = &self.tolerances;
        for (name, v) in [
            ("tau_unit", t.tau_unit),
            ("eps_conv", t.eps_conv),
            ("r_escape", t.r_escape),
            ("bisect_tol", t.bisect_tol),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(QdynError::Precondition(format!("{name} must be finite and > 0 (got {v})")));
            }
        }
        if self.budget == 0 {
            return Err(QdynError::Precondition("budget must be ≥ 1".into()));
        }
        Ok(())
    }

    pub fn params(&self) -> Result<ThetaParams> {
        if self.theta.is_empty() {
            return Err(QdynError::Precondition("--theta is required".into()));
        }
        ThetaParams::new(self.theta.clone())
    }

    fn fate_config(&self) -> FateConfig {
        FateConfig {
            eps_conv: self.tolerances.eps_conv,
            r_escape: self.tolerances.r_escape,
            ..FateConfig::default()
        }
    }

    fn format_or(&self, default: OutputFormat) -> OutputFormat {
        self.output_format.unwrap_or(default)
    }
}

#[derive(Debug, Parser)]
#[command(name = "qdyn", version, about = "Fixed points, stability and fates of a quadratic population map")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Rates θ₁,…,θₙ, comma separated.
    #[arg(long, global = true, value_delimiter = ',', allow_negative_numbers = true)]
    theta: Option<Vec<f64>>,
    /// JSON file with RunConfig fields; its values override flags.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Bisection tolerance for `basin`.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Relative half-width of the unit-circle band.
    #[arg(long, global = true)]
    tau_unit: Option<f64>,
    /// Sup-norm below which a trajectory counts as reaching the origin.
    #[arg(long, global = true)]
    eps_conv: Option<f64>,
    /// Sup-norm above which a trajectory counts as escaping.
    #[arg(long, global = true)]
    r_escape: Option<f64>,
    /// Iteration cap for fate classification.
    #[arg(long, global = true)]
    budget: Option<usize>,
    /// Seed for `verify` sampling.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true, value_enum)]
    format: Option<OutputFormat>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Every algebraic fixed point with its spectrum and class.
    FixedPoints,
    /// One fixed point, chosen by support bits such as 1,0,1.
    Classify {
        #[arg(long, value_delimiter = ',', required = true)]
        support: Vec<u8>,
    },
    /// Iterate from x0 and report the fate.
    Simulate {
        #[arg(long, value_delimiter = ',', required = true, allow_negative_numbers = true)]
        x0: Vec<f64>,
        #[arg(long, default_value_t = DEFAULT_STEPS)]
        steps: usize,
    },
    /// Bisected basin boundary along x1 = lo..hi (n = 2).
    Basin {
        /// lo:hi:count
        #[arg(long = "x1-range", required = true)]
        x1_range: String,
    },
    /// Randomized check of the spectral and invariance properties.
    Verify {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = DEFAULT_TRIALS)]
        trials: usize,
    },
}

/// Installs the stderr logger, filtered by `QDYN_LOG` (e.g. `QDYN_LOG=debug`).
pub fn init_logging() {
    let _ = env_logger::Builder::from_env(env_logger::Env::new().filter("QDYN_LOG"))
        .target(env_logger::Target::Stderr)
        .try_init();
}

/// Parses `args` (including the program name) and runs one command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{}", e.render());
                    return EXIT_OK;
                }
                _ => EXIT_USAGE,
            };
            let _ = write!(err, "{}", e.render());
            return code;
        }
    };
    match dispatch(cli, out) {
        Ok(code) => code,
        Err(CliError::Usage(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_USAGE
        }
        Err(CliError::Io(e)) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_USAGE
        }
    }
}

enum CliError {
    Usage(String),
    Io(std::io::Error),
}

impl From<QdynError> for CliError {
    fn from(e: QdynError) -> Self {
        Self::Usage(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        Self::Io(e)
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        Self::Io(e.into())
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

fn resolve_config(cli: &Cli) -> CliResult<RunConfig> {
    let mut cfg = RunConfig::default();
    if let Some(theta) = &cli.theta {
        cfg.theta = theta.clone();
    }
    let t = &mut cfg.tolerances;
    t.bisect_tol = cli.tol.unwrap_or(t.bisect_tol);
    t.tau_unit = cli.tau_unit.unwrap_or(t.tau_unit);
    t.eps_conv = cli.eps_conv.unwrap_or(t.eps_conv);
    t.r_escape = cli.r_escape.unwrap_or(t.r_escape);
    cfg.budget = cli.budget.unwrap_or(cfg.budget);
    cfg.seed = cli.seed.unwrap_or(cfg.seed);
    cfg.output_format = cli.format.or(cfg.output_format);

    if let Some(path) = &cli.config {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        let file: ConfigFile = serde_json::from_str(&text)
            .map_err(|e| CliError::Usage(format!("bad config {}: {e}", path.display())))?;
        if let Some(theta) = file.theta {
            cfg.theta = theta;
        }
        if let Some(tol) = file.tolerances {
            let t = &mut cfg.tolerances;
            t.tau_unit = tol.tau_unit.unwrap_or(t.tau_unit);
            t.eps_conv = tol.eps_conv.unwrap_or(t.eps_conv);
            t.r_escape = tol.r_escape.unwrap_or(t.r_escape);
            t.bisect_tol = tol.bisect_tol.unwrap_or(t.bisect_tol);
        }
        cfg.seed = file.seed.unwrap_or(cfg.seed);
        cfg.budget = file.budget.unwrap_or(cfg.budget);
        cfg.output_format = file.output_format.or(cfg.output_format);
    }
    cfg.validate()?;
    log::debug!("resolved config: {cfg:?}");
    Ok(cfg)
}

fn dispatch(cli: Cli, out: &mut dyn Write) -> CliResult<i32> {
    let cfg = resolve_config(&cli)?;
    match cli.command {
        Command::FixedPoints => cmd_fixed_points(&cfg, out),
        Command::Classify { support } => cmd_classify(&cfg, &support, out),
        Command::Simulate { x0, steps } => cmd_simulate(&cfg, x0, steps, out),
        Command::Basin { x1_range } => cmd_basin(&cfg, &x1_range, out),
        Command::Verify { n, trials } => cmd_verify(&cfg, n, trials, out),
    }
}

/// One fixed point as emitted by `fixed-points` and `classify`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FixedPointRecord {
    /// Support mask read as a binary number, bit `k` for `x_{k+1}`.
    pub index: u64,
    pub support: Vec<u8>,
    pub coords: Vec<f64>,
    pub feasible: bool,
    pub residual: f64,
    /// `[re, im]` pairs, descending modulus.
    pub eigenvalues: Vec<[f64; 2]>,
    pub class: StabilityTag,
}

fn record_for(params: &ThetaParams, fp: &FixedPoint, tau_unit: f64) -> Result<FixedPointRecord> {
    let spectrum = spectrum_at(params, fp)?;
    Ok(FixedPointRecord {
        index: fp.support.bits().unwrap_or(u64::MAX),
        support: fp.support.flags().into_iter().map(u8::from).collect(),
        coords: fp.coords.clone(),
        feasible: fp.feasible,
        residual: fp.residual,
        eigenvalues: spectrum.eigenvalues().iter().map(|e| [e.re, e.im]).collect(),
        class: classify(&spectrum, tau_unit).tag,
    })
}

fn cmd_fixed_points(cfg: &RunConfig, out: &mut dyn Write) -> CliResult<i32> {
    let params = cfg.params()?;
    let records = enumerate_fixed_points(&params)?
        .iter()
        .map(|fp| record_for(&params, fp, cfg.tolerances.tau_unit))
        .collect::<Result<Vec<_>>>()?;
    write_fixed_points(&records, params.dim(), cfg.format_or(OutputFormat::Json), out)
}

fn cmd_classify(cfg: &RunConfig, support: &[u8], out: &mut dyn Write) -> CliResult<i32> {
    let params = cfg.params()?;
    if let Some(b) = support.iter().find(|b| **b > 1) {
        return Err(CliError::Usage(format!("support entries must be 0 or 1 (got {b})")));
    }
    if support.len() != params.dim() {
        return Err(QdynError::DimensionMismatch { expected: params.dim(), got: support.len() }.into());
    }
    let flags: Vec<bool> = support.iter().map(|b| *b == 1).collect();
    let fp = fixed_point_for_support(&params, &SupportMask::from_flags(&flags))?;
    let record = record_for(&params, &fp, cfg.tolerances.tau_unit)?;
    write_fixed_points(&[record], params.dim(), cfg.format_or(OutputFormat::Json), out)
}

fn write_fixed_points(
    records: &[FixedPointRecord],
    n: usize,
    format: OutputFormat,
    out: &mut dyn Write,
) -> CliResult<i32> {
    match format {
        OutputFormat::Json => {
            serde_json::to_writer_pretty(&mut *out, records)?;
            writeln!(out)?;
        }
        OutputFormat::Csv => {
            let mut header = String::from("index,support");
            for k in 1..=n {
                write!(header, ",x{k}").unwrap();
            }
            header.push_str(",feasible,residual,class");
            for k in 1..=n {
                write!(header, ",ev{k}_re,ev{k}_im").unwrap();
            }
            writeln!(out, "{header}")?;
            for r in records {
                let bits: String = r.support.iter().map(|b| char::from(b'0' + b)).collect();
                let mut line = format!("{},{bits}", r.index);
                for v in &r.coords {
                    write!(line, ",{v:?}").unwrap();
                }
                write!(line, ",{},{:?},{}", r.feasible, r.residual, r.class).unwrap();
                for [re, im] in &r.eigenvalues {
                    write!(line, ",{re:?},{im:?}").unwrap();
                }
                writeln!(out, "{line}")?;
            }
        }
    }
    Ok(EXIT_OK)
}

#[derive(Serialize)]
struct SimulationOutput<'a> {
    theta: &'a [f64],
    trajectory: Vec<&'a [f64]>,
    termination: Termination,
    fate: &'a FateReport,
}

fn cmd_simulate(cfg: &RunConfig, x0: Vec<f64>, steps: usize, out: &mut dyn Write) -> CliResult<i32> {
    let params = cfg.params()?;
    params_dim_matches(&params, x0.len())?;
    let x0 = State::new(x0)?;
    let fate_cfg = cfg.fate_config();
    let report = classify_fate_with(&params, &x0, cfg.budget, &fate_cfg)?;
    // A start on a fixed point is reported as such; iterating onward would
    // only amplify its rounding offset along unstable directions.
    let steps = if matches!(report.outcome, Fate::ToFixedPoint { .. }) { 0 } else { steps };
    let traj = iterate_with(&params, &x0, steps, &fate_cfg)?;
    log::debug!("simulate: {} states, {:?}", traj.states.len(), traj.termination);

    match cfg.format_or(OutputFormat::Csv) {
        OutputFormat::Json => {
            let doc = SimulationOutput {
                theta: params.as_slice(),
                trajectory: traj.states.iter().map(State::as_slice).collect(),
                termination: traj.termination,
                fate: &report,
            };
            serde_json::to_writer_pretty(&mut *out, &doc)?;
            writeln!(out)?;
        }
        OutputFormat::Csv => {
            let mut header = String::from("step");
            for k in 1..=params.dim() {
                write!(header, ",x{k}").unwrap();
            }
            writeln!(out, "{header}")?;
            for (step, x) in traj.states.iter().enumerate() {
                let mut line = step.to_string();
                for v in x.as_slice() {
                    write!(line, ",{v:?}").unwrap();
                }
                writeln!(out, "{line}")?;
            }
            let final_state: Vec<String> = report.final_state.as_slice().iter().map(|v| format!("{v:?}")).collect();
            writeln!(
                out,
                "# fate={} steps_used={} evidence={} final_state={}",
                report.outcome,
                report.steps_used,
                report.evidence,
                final_state.join(";")
            )?;
        }
    }
    Ok(EXIT_OK)
}

fn params_dim_matches(params: &ThetaParams, got: usize) -> Result<()> {
    if params.dim() == got {
        Ok(())
    } else {
        Err(QdynError::DimensionMismatch { expected: params.dim(), got })
    }
}

/// Parses `lo:hi:count`.
pub fn parse_range(s: &str) -> Result<(f64, f64, usize)> {
    let bad = || QdynError::Precondition(format!("--x1-range expects lo:hi:count (got {s:?})"));
    let parts: Vec<&str> = s.split(':').collect();
    let [lo, hi, count] = parts.as_slice() else {
        return Err(bad());
    };
    let lo: f64 = lo.trim().parse().map_err(|_| bad())?;
    let hi: f64 = hi.trim().parse().map_err(|_| bad())?;
    let count: usize = count.trim().parse().map_err(|_| bad())?;
    if !(lo.is_finite() && hi.is_finite() && lo <= hi) || count == 0 {
        return Err(bad());
    }
    Ok((lo, hi, count))
}

fn cmd_basin(cfg: &RunConfig, range: &str, out: &mut dyn Write) -> CliResult<i32> {
    let params = cfg.params()?;
    let (lo, hi, count) = parse_range(range)?;
    let samples = basin_boundary(&params, &linspace(lo, hi, count), cfg.tolerances.bisect_tol, cfg.budget)?;
    write_basin(&samples, cfg.format_or(OutputFormat::Csv), out)
}

fn write_basin(samples: &[BoundarySample], format: OutputFormat, out: &mut dyn Write) -> CliResult<i32> {
    match format {
        OutputFormat::Json => {
            serde_json::to_writer_pretty(&mut *out, samples)?;
            writeln!(out)?;
        }
        OutputFormat::Csv => {
            writeln!(out, "x1,x2_low,x2_high,width,flagged,flag")?;
            for s in samples {
                let flag = s
                    .flag
                    .and_then(|f| serde_json::to_value(f).ok().and_then(|v| v.as_str().map(str::to_owned)))
                    .unwrap_or_default();
                writeln!(
                    out,
                    "{:?},{:?},{:?},{:?},{},{flag}",
                    s.x1,
                    s.x2_low,
                    s.x2_high,
                    s.width,
                    s.is_flagged()
                )?;
            }
        }
    }
    Ok(EXIT_OK)
}

/// Checks run by `verify`, in report order.
const CHECKS: [&str; 6] = [
    "fixed-point count = 2^n",
    "fixed-point residual ≤ 1e-9·max(1,‖x‖∞)",
    "eigenvalue-2 distance ≤ 1e-6",
    "attracting only at origin",
    "decay region invariant and decreasing",
    "escape region invariant and increasing",
];
const EV2_RESIDUAL_CHECK: usize = 2;

#[derive(Debug, Clone, Serialize)]
struct TrialResult {
    trial: usize,
    theta: Vec<f64>,
    ev2_distance_max: f64,
    ev2_residual_max: f64,
    /// One message per failed check, keyed by index into `CHECKS`.
    failures: Vec<(usize, String)>,
}

fn run_trial(trial: usize, n: usize, mut rng: SweepSampler, cfg: &RunConfig) -> Result<TrialResult> {
    let params = rng.theta(n)?;
    let mut res = TrialResult {
        trial,
        theta: params.as_slice().to_vec(),
        ev2_distance_max: 0.0,
        ev2_residual_max: 0.0,
        failures: Vec::new(),
    };
    let points = enumerate_fixed_points(&params)?;
    if points.len() != 1 << n {
        res.failures.push((0, format!("{} fixed points", points.len())));
    }
    for fp in &points {
        let limit = FIXED_POINT_RESIDUAL_LIMIT * fp.norm_inf().max(1.0);
        if fp.residual.is_nan() || fp.residual > limit {
            res.failures.push((1, format!("support {:?}: residual {:?}", fp.support.indices(), fp.residual)));
        }
        let spectrum = match spectrum_at(&params, fp) {
            Ok(s) => s,
            Err(e) => {
                res.failures.push((2, format!("support {:?}: {e}", fp.support.indices())));
                continue;
            }
        };
        let class = classify(&spectrum, cfg.tolerances.tau_unit);
        if fp.is_origin() {
            if class.tag != StabilityTag::Attracting {
                res.failures.push((3, format!("origin classified {}", class.tag)));
            }
            continue;
        }
        if class.tag == StabilityTag::Attracting {
            res.failures.push((3, format!("support {:?} attracting", fp.support.indices())));
        }
        let dist = spectrum.distance_to(2.0.into());
        let resid = eigenvalue_two_residual(&params, fp)?;
        res.ev2_distance_max = res.ev2_distance_max.max(dist);
        res.ev2_residual_max = res.ev2_residual_max.max(resid);
        if dist.is_nan() || dist > EV2_DISTANCE_LIMIT {
            res.failures.push((2, format!("support {:?}: distance {dist:?}", fp.support.indices())));
        }
        if resid.is_nan() || resid > EV2_RESIDUAL_LIMIT {
            res.failures.push((2, format!("support {:?}: residual {resid:?}", fp.support.indices())));
        }
    }
    for (check, kind) in [(4, RegionKind::Mbar1), (5, RegionKind::Mbar2)] {
        let x0 = rng.point_in_region(&params, kind)?;
        if let Some(msg) = region_run(&params, &x0, kind, cfg) {
            res.failures.push((check, format!("x0={:?}: {msg}", x0.as_slice())));
        }
    }
    Ok(res)
}

/// Iterates inside a general region until the norm threshold, checking
/// membership and componentwise monotonicity at each step.
fn region_run(params: &ThetaParams, x0: &State, kind: RegionKind, cfg: &RunConfig) -> Option<String> {
    let spec = RegionSpec::new(kind);
    let decays = kind.decays();
    let mut x = x0.clone();
    for step in 0..cfg.budget {
        let norm = x.norm_inf();
        if (decays && norm < cfg.tolerances.eps_conv) || (!decays && norm > cfg.tolerances.r_escape) {
            return None;
        }
        match region_membership(params, &x, spec) {
            Ok(true) => {}
            Ok(false) => return Some(format!("left {kind} at step {step}")),
            Err(e) => return Some(e.to_string()),
        }
        let next = model::eval_map(params.as_slice(), x.as_slice());
        let monotone = next
            .iter()
            .zip(x.as_slice())
            .all(|(a, b)| if decays { a < b } else { a > b });
        if !monotone {
            return Some(format!("not monotone at step {step}"));
        }
        x = match State::new(next) {
            Ok(s) => s,
            Err(e) => return Some(format!("step {}: {e}", step + 1)),
        };
    }
    Some(format!("threshold not reached in {} steps", cfg.budget))
}

#[derive(Serialize)]
struct VerifySummary<'a> {
    n: usize,
    trials: usize,
    seed: u64,
    checks: Vec<CheckSummary>,
    ev2_distance_max: f64,
    ev2_residual_max: f64,
    failures: Vec<&'a TrialResult>,
    passed: bool,
}

#[derive(Serialize)]
struct CheckSummary {
    name: String,
    passed: usize,
    failed: usize,
}

fn cmd_verify(cfg: &RunConfig, n: usize, trials: usize, out: &mut dyn Write) -> CliResult<i32> {
    if n < 2 {
        return Err(QdynError::DimensionTooSmall { n }.into());
    }
    if n > VERIFY_MAX_DIM {
        return Err(QdynError::DimensionOverCap { n, cap: VERIFY_MAX_DIM }.into());
    }
    let mut master = SweepSampler::new(cfg.seed);
    let streams: Vec<SweepSampler> = (0..trials).map(|_| master.split()).collect();
    let results = streams
        .into_par_iter()
        .enumerate()
        .map(|(i, rng)| run_trial(i, n, rng, cfg))
        .collect::<Result<Vec<_>>>()?;

    let mut checks: Vec<CheckSummary> = CHECKS
        .iter()
        .map(|name| CheckSummary { name: (*name).to_owned(), passed: 0, failed: 0 })
        .collect();
    for r in &results {
        for (k, c) in checks.iter_mut().enumerate() {
            if r.failures.iter().any(|(idx, _)| *idx == k) {
                c.failed += 1;
            } else {
                c.passed += 1;
            }
        }
    }
    let ev2_distance_max = results.iter().map(|r| r.ev2_distance_max).fold(0.0, f64::max);
    let ev2_residual_max = results.iter().map(|r| r.ev2_residual_max).fold(0.0, f64::max);
    let failures: Vec<&TrialResult> = results.iter().filter(|r| !r.failures.is_empty()).collect();
    let passed = failures.is_empty();

    match cfg.output_format {
        Some(OutputFormat::Json) => {
            let summary = VerifySummary {
                n,
                trials,
                seed: cfg.seed,
                checks,
                ev2_distance_max,
                ev2_residual_max,
                failures,
                passed,
            };
            serde_json::to_writer_pretty(&mut *out, &summary)?;
            writeln!(out)?;
        }
        Some(OutputFormat::Csv) => {
            writeln!(out, "check,passed,failed")?;
            for c in &checks {
                writeln!(out, "{},{},{}", c.name, c.passed, c.failed)?;
            }
            for r in &failures {
                for (k, msg) in &r.failures {
                    writeln!(out, "# FAIL trial={} theta={:?} check={}: {msg}", r.trial, r.theta, CHECKS[*k])?;
                }
            }
        }
        None => {
            writeln!(out, "verify n={n} trials={trials} seed={}", cfg.seed)?;
            for c in &checks {
                writeln!(out, "  {:<45} passed {:>6}  failed {:>6}", c.name, c.passed, c.failed)?;
            }
            writeln!(out, "eigenvalue-2 distance max = {ev2_distance_max:.3e}")?;
            let rel = if ev2_residual_max <= EV2_RESIDUAL_LIMIT && checks[EV2_RESIDUAL_CHECK].failed == 0 {
                "≤"
            } else {
                ">"
            };
            writeln!(out, "eigenvalue-2 residual max {rel} 1e-8 (max = {ev2_residual_max:.3e})")?;
            for r in &failures {
                for (k, msg) in &r.failures {
                    writeln!(out, "FAIL trial {} theta={:?} [{}] {msg}", r.trial, r.theta, CHECKS[*k])?;
                }
            }
            writeln!(out, "{}", if passed { "PASS" } else { "FAIL" })?;
        }
    }
    Ok(if passed { EXIT_OK } else { EXIT_VERIFY_FAILED })
}
