//! The `censtail` command line.
//!
//! Subcommands print JSON (or CSV for `lemma1-check`) on stdout and write
//! auxiliary plot data only inside `--out-dir`. Failures print one JSON line
//! `{"error":<kind>,"message":<text>}` on stderr and exit with
//! 2 (validation), 3 (estimation) or 4 (numeric).

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::data::read_censored_csv;
use crate::error::Error;
use crate::estimators::{
    asymptotic_ci, premium_from_fit, KSource, PremiumFit, SortedSample, TailFit, VarianceForm,
};
use crate::gausslimit::{LimitParams, DEFAULT_GRID, DEFAULT_T0};
use crate::models::{CensoringSetup, Family, TailModel};
use crate::montecarlo::{run_estimation_experiment, run_limit_experiment, ExperimentConfig, LimitReport};
use crate::normal;

#[derive(Debug)]
pub struct CliError {
    kind: &'static str,
    message: String,
}

impl CliError {
    fn validation(message: impl Into<String>) -> Self {
        Self {
            kind: "validation",
            message: message.into(),
        }
    }

    pub fn kind(&self) -> &'static str {
        self.kind
    }

    pub fn message(&self) -> &str {
        &self.message
    }

    pub fn exit_code(&self) -> i32 {
        match self.kind {
            "estimation" => 3,
            "numeric" => 4,
            _ => 2,
        }
    }

    pub fn to_json_line(&self) -> String {
        serde_json::json!({ "error": self.kind, "message": self.message }).to_string()
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        Self {
            kind: e.kind(),
            message: e.to_string(),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        Error::from(e).into()
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        Error::from(e).into()
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

#[derive(Debug, Parser)]
#[command(
    name = "censtail",
    version,
    about = "Tail-index and premium estimation for randomly censored heavy-tailed data"
)]
pub struct Cli {
    /// Worker threads (default: all cores). Results do not depend on it.
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Estimate the tail index (and optionally the premium) from a `z,delta` CSV.
    Estimate(EstimateArgs),
    /// Replicated estimation on simulated censored samples.
    Simulate(SimulateArgs),
    /// Monte Carlo of the Gaussian limit functionals over exact bridge paths.
    Limits(LimitsArgs),
    /// Tabulate (1/t) H̄¹(z H⁻¹(1−t)) against its limit p z^(−1/γ).
    #[command(name = "lemma1-check")]
    Lemma1Check(Lemma1Args),
}

/// A list of `k` values: `start:end:step` (inclusive) or `k1,k2,...`.
#[derive(Debug, Clone, PartialEq)]
pub struct KGrid(pub Vec<usize>);

impl FromStr for KGrid {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let bad = || format!("invalid k grid `{s}`: use start:end:step or a comma list");
        let ks: Vec<usize> = if s.contains(':') {
            let parts: Vec<usize> = s
                .split(':')
                .map(|p| p.trim().parse().map_err(|_| bad()))
                .collect::<Result<_, _>>()?;
            let [start, end, step] = parts[..] else {
                return Err(bad());
            };
            if step == 0 || start > end {
                return Err(bad());
            }
            (start..=end).step_by(step).collect()
        } else {
            s.split(',')
                .map(|p| p.trim().parse().map_err(|_| bad()))
                .collect::<Result<_, _>>()?
        };
        if ks.is_empty() || ks.windows(2).any(|w| w[0] >= w[1]) {
            return Err(format!("k grid `{s}` must be non-empty and strictly increasing"));
        }
        Ok(KGrid(ks))
    }
}

/// Comma-separated reals.
#[derive(Debug, Clone, PartialEq)]
pub struct RealList(pub Vec<f64>);

impl FromStr for RealList {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        s.split(',')
            .map(|p| p.trim().parse::<f64>().map_err(|_| format!("`{p}` is not a number")))
            .collect::<Result<_, _>>()
            .map(RealList)
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum FormArg {
    Quotient,
    Product,
}

impl From<FormArg> for VarianceForm {
    fn from(f: FormArg) -> Self {
        match f {
            FormArg::Quotient => VarianceForm::Quotient,
            FormArg::Product => VarianceForm::Product,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum FamilyArg {
    Frechet,
    Burr,
    Pareto,
}

impl From<FamilyArg> for Family {
    fn from(f: FamilyArg) -> Self {
        match f {
            FamilyArg::Frechet => Family::Frechet,
            FamilyArg::Burr => Family::Burr,
            FamilyArg::Pareto => Family::Pareto,
        }
    }
}

#[derive(Debug, Args)]
pub struct EstimateArgs {
    /// CSV file with header `z,delta`.
    #[arg(long)]
    pub input: PathBuf,
    /// Number of top order statistics.
    #[arg(long, conflicts_with = "k_grid", required_unless_present = "k_grid")]
    pub k: Option<usize>,
    /// Grid of k values (start:end:step or k1,k2,...); writes hill_plot.csv.
    #[arg(long)]
    pub k_grid: Option<KGrid>,
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
    /// Also estimate the excess-of-loss premium with retention Z_{n-k:n}.
    #[arg(long)]
    pub premium: bool,
    #[arg(long, value_enum, default_value = "quotient")]
    pub variance_form: FormArg,
    /// Directory for auxiliary CSV output.
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SetupArgs {
    /// JSON file `{"model_x": {...}, "model_y": {...}}`; overrides the flags below.
    #[arg(long)]
    pub setup: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "frechet")]
    pub x_family: FamilyArg,
    #[arg(long, default_value_t = 0.6)]
    pub x_gamma: f64,
    #[arg(long, default_value_t = 1.0)]
    pub x_scale: f64,
    #[arg(long, allow_hyphen_values = true)]
    pub x_rho: Option<f64>,
    #[arg(long, value_enum, default_value = "frechet")]
    pub y_family: FamilyArg,
    #[arg(long, default_value_t = 0.9)]
    pub y_gamma: f64,
    #[arg(long, default_value_t = 1.0)]
    pub y_scale: f64,
    #[arg(long, allow_hyphen_values = true)]
    pub y_rho: Option<f64>,
}

impl SetupArgs {
    fn build(&self) -> CliResult<CensoringSetup> {
        if let Some(path) = &self.setup {
            let text = fs::read_to_string(path)?;
            return serde_json::from_str(&text)
                .map_err(|e| CliError::validation(format!("invalid setup file: {e}")));
        }
        let x = TailModel::new(self.x_family.into(), self.x_gamma, self.x_scale, self.x_rho)?;
        let y = TailModel::new(self.y_family.into(), self.y_gamma, self.y_scale, self.y_rho)?;
        Ok(CensoringSetup::new(x, y))
    }
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub setup: SetupArgs,
    #[arg(long, default_value_t = 30_000)]
    pub n: usize,
    #[arg(long, default_value = "500")]
    pub k_grid: KGrid,
    #[arg(long, default_value_t = 1000)]
    pub reps: usize,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
    #[arg(long, value_enum, default_value = "quotient")]
    pub variance_form: FormArg,
    /// Directory for report.json, report.csv, qq_k<k>.csv and hist_k<k>.csv.
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct LimitsArgs {
    #[arg(long, default_value_t = 0.6)]
    pub gamma1: f64,
    #[arg(long, default_value_t = 0.6)]
    pub p: f64,
    /// Defaults to P(X ≤ Y) for Fréchet marginals with matching γ₁ and p.
    #[arg(long)]
    pub theta: Option<f64>,
    #[arg(long, default_value_t = DEFAULT_T0)]
    pub t0: f64,
    #[arg(long, default_value_t = DEFAULT_GRID)]
    pub grid: usize,
    #[arg(long, default_value_t = 20_000)]
    pub reps: usize,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    /// Also run at t0/2 and report both runs.
    #[arg(long)]
    pub sweep_t0: bool,
    /// Directory for limits.json.
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct Lemma1Args {
    #[command(flatten)]
    pub setup: SetupArgs,
    /// Comma-separated z values (each >= 1).
    #[arg(long, default_value = "1,2,5")]
    pub z: RealList,
    /// Comma-separated tail probabilities in (0,1).
    #[arg(long, default_value = "0.001,0.0001,0.00001")]
    pub t: RealList,
    /// Directory for lemma1.csv.
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
}

/// Parses `args` (including the program name) and runs the subcommand,
/// writing primary output to `out`.
pub fn run<I, T>(args: I, out: &mut dyn Write) -> CliResult<()>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                write!(out, "{e}")?;
                return Ok(());
            }
            let text = e.to_string();
            let line = text
                .lines()
                .find(|l| !l.trim().is_empty())
                .unwrap_or("invalid arguments")
                .trim_start_matches("error: ")
                .to_string();
            return Err(CliError::validation(line));
        }
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(match cli.threads {
            Some(0) => return Err(CliError::validation("--threads must be at least 1")),
            Some(t) => t,
            None => 0,
        })
        .build()
        .map_err(|e| CliError::validation(e.to_string()))?;
    let mut buf = vec![];
    let result = pool.install(|| match &cli.command {
        Command::Estimate(a) => cmd_estimate(a, &mut buf),
        Command::Simulate(a) => cmd_simulate(a, &mut buf),
        Command::Limits(a) => cmd_limits(a, &mut buf),
        Command::Lemma1Check(a) => cmd_lemma1_check(a, &mut buf),
    });
    out.write_all(&buf)?;
    result
}

fn check_alpha(alpha: f64) -> CliResult<()> {
    if alpha > 0.0 && alpha < 1.0 {
        Ok(())
    } else {
        Err(CliError::validation(format!("--alpha must lie in (0,1), got {alpha}")))
    }
}

fn prepare_out_dir(dir: &Option<PathBuf>) -> CliResult<Option<&Path>> {
    match dir {
        Some(d) => {
            fs::create_dir_all(d)?;
            Ok(Some(d.as_path()))
        }
        None => Ok(None),
    }
}

fn write_json_line<T: Serialize>(out: &mut dyn Write, value: &T) -> CliResult<()> {
    serde_json::to_writer_pretty(&mut *out, value)?;
    writeln!(out)?;
    Ok(())
}

#[derive(Serialize)]
struct EstimateOutput {
    tail_fit: TailFit,
    #[serde(skip_serializing_if = "Option::is_none")]
    premium_fit: Option<PremiumFit>,
}

#[derive(Serialize)]
struct GridOutput {
    fits: Vec<GridEntry>,
}

#[derive(Serialize)]
struct GridEntry {
    k: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    tail_fit: Option<TailFit>,
    #[serde(skip_serializing_if = "Option::is_none")]
    premium_fit: Option<PremiumFit>,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
}

pub fn cmd_estimate(args: &EstimateArgs, out: &mut dyn Write) -> CliResult<()> {
    check_alpha(args.alpha)?;
    let out_dir = prepare_out_dir(&args.out_dir)?;
    let file = fs::File::open(&args.input)
        .map_err(|e| CliError::validation(format!("cannot open {}: {e}", args.input.display())))?;
    let sample = read_censored_csv(file)?;
    let sorted = SortedSample::from(&sample);
    let form: VarianceForm = args.variance_form.into();

    if let Some(k) = args.k {
        let tail_fit = asymptotic_ci(&sorted, k, args.alpha, form)?;
        let premium_fit = if args.premium {
            Some(premium_from_fit(&tail_fit, &sorted)?)
        } else {
            None
        };
        return write_json_line(out, &EstimateOutput { tail_fit, premium_fit });
    }

    let grid = args.k_grid.as_ref().expect("clap enforces k or k-grid");
    let mut entries = vec![];
    for &k in &grid.0 {
        let entry = match asymptotic_ci(&sorted, k, args.alpha, form) {
            Ok(mut fit) => {
                fit.k_source = KSource::Grid;
                let (premium_fit, error) = if args.premium {
                    match premium_from_fit(&fit, &sorted) {
                        Ok(p) => (Some(p), None),
                        Err(e @ Error::Estimation(_)) => (None, Some(e.to_string())),
                        Err(e) => return Err(e.into()),
                    }
                } else {
                    (None, None)
                };
                GridEntry {
                    k,
                    tail_fit: Some(fit),
                    premium_fit,
                    error,
                }
            }
            Err(e @ Error::Estimation(_)) => GridEntry {
                k,
                tail_fit: None,
                premium_fit: None,
                error: Some(e.to_string()),
            },
            Err(e) => return Err(e.into()),
        };
        entries.push(entry);
    }
    if let Some(dir) = out_dir {
        let mut w = csv::Writer::from_path(dir.join("hill_plot.csv")).map_err(Error::from)?;
        w.write_record(["k", "gamma1_hat", "ci_low", "ci_high", "p_hat", "gamma_hat_z", "premium"])
            .map_err(Error::from)?;
        for e in &entries {
            if let Some(f) = &e.tail_fit {
                let premium = e.premium_fit.as_ref().map(|p| p.premium.to_string()).unwrap_or_default();
                w.write_record([
                    f.k.to_string(),
                    f.gamma1_hat.to_string(),
                    f.ci_low.to_string(),
                    f.ci_high.to_string(),
                    f.p_hat.to_string(),
                    f.gamma_hat_z.to_string(),
                    premium,
                ])
                .map_err(Error::from)?;
            }
        }
        w.flush()?;
    }
    write_json_line(out, &GridOutput { fits: entries })
}

pub fn cmd_simulate(args: &SimulateArgs, out: &mut dyn Write) -> CliResult<()> {
    check_alpha(args.alpha)?;
    let setup = args.setup.build()?;
    let config = ExperimentConfig {
        setup,
        n: args.n,
        k_grid: args.k_grid.0.clone(),
        reps: args.reps,
        master_seed: args.seed,
        alpha: args.alpha,
        variance_form: args.variance_form.into(),
    };
    config.validate()?;
    let out_dir = prepare_out_dir(&args.out_dir)?;
    let report = run_estimation_experiment(&config)?;
    if let Some(dir) = out_dir {
        fs::write(dir.join("report.json"), serde_json::to_string_pretty(&report)? + "\n")?;
        fs::write(dir.join("report.csv"), report.to_csv()?)?;
        for rec in &report.records {
            let mut z = report
                .standardized(rec.k, config.variance_form)
                .expect("record exists");
            z.sort_by(f64::total_cmp);
            write_qq(&dir.join(format!("qq_k{}.csv", rec.k)), &z)?;
            write_histogram(&dir.join(format!("hist_k{}.csv", rec.k)), &z)?;
        }
    }
    write_json_line(out, &report)
}

fn write_qq(path: &Path, sorted: &[f64]) -> CliResult<()> {
    let mut w = csv::Writer::from_path(path).map_err(Error::from)?;
    w.write_record(["normal_quantile", "standardized_estimate"]).map_err(Error::from)?;
    let m = sorted.len() as f64;
    for (i, v) in sorted.iter().enumerate() {
        let q = normal::quantile((i as f64 + 0.5) / m);
        w.write_record([q.to_string(), v.to_string()]).map_err(Error::from)?;
    }
    w.flush()?;
    Ok(())
}

/// 40 bins on [−4, 4] with the N(0,1) density at each centre.
fn write_histogram(path: &Path, values: &[f64]) -> CliResult<()> {
    const BINS: usize = 40;
    const LO: f64 = -4.0;
    const WIDTH: f64 = 0.2;
    let mut counts = [0usize; BINS];
    for &v in values {
        let b = ((v - LO) / WIDTH).floor();
        if b >= 0.0 && (b as usize) < BINS {
            counts[b as usize] += 1;
        }
    }
    let mut w = csv::Writer::from_path(path).map_err(Error::from)?;
    w.write_record(["bin_low", "bin_high", "count", "density", "normal_density"])
        .map_err(Error::from)?;
    let total = values.len().max(1) as f64;
    for (i, &c) in counts.iter().enumerate() {
        let lo = LO + i as f64 * WIDTH;
        let hi = lo + WIDTH;
        w.write_record([
            lo.to_string(),
            hi.to_string(),
            c.to_string(),
            (c as f64 / total / WIDTH).to_string(),
            normal::pdf(0.5 * (lo + hi)).to_string(),
        ])
        .map_err(Error::from)?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct LimitsOutput {
    #[serde(flatten)]
    report: LimitReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    sweep: Option<Vec<LimitReport>>,
}

/// `P(X ≤ Y)` for Fréchet(γ₁) against Fréchet(γ₂) with `γ₂ = pγ₁/(1−p)`.
fn matched_theta(gamma1: f64, p: f64) -> CliResult<f64> {
    if p >= 1.0 {
        return Ok(0.5);
    }
    let g2 = p * gamma1 / (1.0 - p);
    let setup = CensoringSetup::new(TailModel::frechet(gamma1)?, TailModel::frechet(g2)?);
    Ok(setup.theta()?)
}

pub fn cmd_limits(args: &LimitsArgs, out: &mut dyn Write) -> CliResult<()> {
    if args.reps == 0 {
        return Err(CliError::validation("--reps must be at least 1"));
    }
    if !(args.gamma1 > 0.0) || !(args.p > 0.0 && args.p <= 1.0) {
        return Err(CliError::validation("--gamma1 must be positive and --p must lie in (0,1]"));
    }
    let theta = match args.theta {
        Some(t) => t,
        None => matched_theta(args.gamma1, args.p)?,
    };
    let params = LimitParams::new(args.gamma1, args.p, theta, args.t0, args.grid)?;
    let sweep_params = if args.sweep_t0 {
        Some(LimitParams::new(args.gamma1, args.p, theta, args.t0 / 2.0, args.grid)?)
    } else {
        None
    };
    let out_dir = prepare_out_dir(&args.out_dir)?;
    let report = run_limit_experiment(&params, args.reps, args.seed)?;
    let sweep = match sweep_params {
        Some(sp) => Some(vec![report.clone(), run_limit_experiment(&sp, args.reps, args.seed)?]),
        None => None,
    };
    let output = LimitsOutput { report, sweep };
    if let Some(dir) = out_dir {
        fs::write(dir.join("limits.json"), serde_json::to_string_pretty(&output)? + "\n")?;
    }
    write_json_line(out, &output)
}

pub fn cmd_lemma1_check(args: &Lemma1Args, out: &mut dyn Write) -> CliResult<()> {
    let setup = args.setup.build()?;
    if let Some(z) = args.z.0.iter().find(|&&z| !(z >= 1.0 && z.is_finite())) {
        return Err(CliError::validation(format!("--z values must be >= 1, got {z}")));
    }
    if let Some(t) = args.t.0.iter().find(|&&t| !(t > 0.0 && t < 1.0)) {
        return Err(CliError::validation(format!("--t values must lie in (0,1), got {t}")));
    }
    let out_dir = prepare_out_dir(&args.out_dir)?;
    let mut w = csv::Writer::from_writer(vec![]);
    w.write_record(["z", "t", "ratio", "target", "rel_error"]).map_err(Error::from)?;
    for &z in &args.z.0 {
        let target = setup.subdist_ratio_limit(z);
        for &t in &args.t.0 {
            let ratio = setup.subdist_ratio(z, t)?;
            let rel = (ratio / target - 1.0).abs();
            w.write_record([z.to_string(), t.to_string(), ratio.to_string(), target.to_string(), rel.to_string()])
                .map_err(Error::from)?;
        }
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    if let Some(dir) = out_dir {
        fs::write(dir.join("lemma1.csv"), &bytes)?;
    }
    out.write_all(&bytes)?;
    Ok(())
}
