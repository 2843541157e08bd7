//! Command-line front end: rate computation, sweeps, constant reproduction and
//! Monte Carlo cross-checks, emitting CSV or JSON.
//!
//! Exit codes: 0 success, 1 I/O failure, 2 invalid input, 3 numerical
//! failure, 4 Monte Carlo disagreement.

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::error::Error;
use crate::model::{helstrom_error_probability, shot_noise_advantage, ModulationScheme, Scenario};
use crate::montecarlo::{self, SimConfig};
use crate::optimize::{self, OptimizeConfig, SweepGrid, SweepTable, DEFAULT_BRACKET};
use crate::quadrature::QuadratureConfig;
use crate::rates::{self, Constant, RateResult, HELSTROM_CONSTANT};

/// Environment variable holding the worker-thread count.
pub const THREADS_ENV: &str = "OKD_THREADS";

#[derive(Debug, Parser)]
#[command(name = "okd", version, about = "Key rates of binary-modulated optical key distribution")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Key rate for one scenario at a fixed or optimized depth.
    Rate(RateArgs),
    /// Optimal key rates over a grid of eavesdropper advantages.
    Sweep(SweepArgs),
    /// Strong-eavesdropping constants γ, χ and 1/e.
    Constants(ConstantsArgs),
    /// Monte Carlo estimate of the key rate checked against quadrature.
    Simulate(SimulateArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    /// Output format.
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Write to this file (atomically) instead of standard output.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct QuadratureArgs {
    /// Absolute tolerance of every integral, in nats.
    #[arg(long, default_value_t = 1e-10)]
    pub abs_tol: f64,
    /// Relative tolerance of every integral.
    #[arg(long, default_value_t = 1e-10)]
    pub rel_tol: f64,
    /// Integration window half-width in standard deviations.
    #[arg(long, default_value_t = 10.0)]
    pub truncation: f64,
    /// Integrand evaluations allowed per one-dimensional integral.
    #[arg(long, default_value_t = 2048)]
    pub max_evals: usize,
}

impl QuadratureArgs {
    fn config(&self) -> Result<QuadratureConfig, Error> {
        let cfg = QuadratureConfig {
            abs_tol: self.abs_tol,
            rel_tol: self.rel_tol,
            truncation_sigmas: self.truncation,
            max_nodes_1d: self.max_evals,
            ..QuadratureConfig::default()
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

/// The eavesdropper's advantage, given directly or through the channel.
#[derive(Debug, Args)]
#[command(group(ArgGroup::new("advantage_source").required(true).args(["advantage", "tau_b"])))]
pub struct AdvantageArgs {
    /// Eavesdropper advantage ℰ.
    #[arg(long, allow_hyphen_values = true)]
    pub advantage: Option<f64>,
    /// Bob's transmission; derives ℰ with shot-noise-limited detection.
    #[arg(long, requires = "tau_e")]
    pub tau_b: Option<f64>,
    /// Eve's transmission.
    #[arg(long, requires = "tau_b")]
    pub tau_e: Option<f64>,
    /// Mean pulse energy in photons.
    #[arg(long, default_value_t = 1e6)]
    pub n_bar: f64,
    /// Bob's excess noise variance.
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub excess: f64,
}

impl AdvantageArgs {
    fn resolve(&self) -> Result<f64, Error> {
        match (self.advantage, self.tau_b, self.tau_e) {
            (Some(adv), _, _) => {
                if adv > 0.0 && adv.is_finite() {
                    Ok(adv)
                } else {
                    Err(Error::Domain {
                        name: "advantage",
                        value: adv,
                        reason: "must be positive and finite",
                    })
                }
            }
            (None, Some(tau_b), Some(tau_e)) => shot_noise_advantage(tau_b, tau_e, self.n_bar, self.excess),
            _ => Err(Error::Config("give --advantage or both --tau-b and --tau-e".into())),
        }
    }
}

/// Pulse energies fixing Eve's coherent depth.
#[derive(Debug, Args)]
pub struct ModulationArgs {
    /// Relative modulation Δn/n̄ used when explicit energies are absent.
    #[arg(long, default_value_t = 1e-3, conflicts_with_all = ["n0", "n1"])]
    pub dn_ratio: f64,
    /// Photon number of the bit-0 pulse.
    #[arg(long, requires = "n1")]
    pub n0: Option<f64>,
    /// Photon number of the bit-1 pulse.
    #[arg(long, requires = "n0")]
    pub n1: Option<f64>,
}

impl ModulationArgs {
    fn scheme(&self, n_bar: f64) -> Result<ModulationScheme, Error> {
        match (self.n0, self.n1) {
            (Some(n0), Some(n1)) => ModulationScheme::new(n0, n1),
            _ => ModulationScheme::from_relative(n_bar, self.dn_ratio),
        }
    }
}

#[derive(Debug, Args)]
pub struct SearchArgs {
    /// Lower end of the δ_B search bracket.
    #[arg(long, default_value_t = DEFAULT_BRACKET.0)]
    pub bracket_lo: f64,
    /// Upper end of the δ_B search bracket.
    #[arg(long, default_value_t = DEFAULT_BRACKET.1)]
    pub bracket_hi: f64,
    /// Accuracy of the optimal depth.
    #[arg(long, default_value_t = 1e-6)]
    pub tol: f64,
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("depth").required(true).args(["delta_b", "optimize"])))]
pub struct DepthArgs {
    /// Bob's modulation depth δ_B.
    #[arg(long, allow_hyphen_values = true)]
    pub delta_b: Option<f64>,
    /// Maximize the key rate over δ_B.
    #[arg(long)]
    pub optimize: bool,
}

#[derive(Debug, Args)]
pub struct RateArgs {
    /// Eavesdropping scenario: dd, coherent, helstrom or holevo.
    #[arg(long)]
    pub scenario: Scenario,
    #[command(flatten)]
    pub advantage: AdvantageArgs,
    #[command(flatten)]
    pub depth: DepthArgs,
    #[command(flatten)]
    pub modulation: ModulationArgs,
    #[command(flatten)]
    pub search: SearchArgs,
    #[command(flatten)]
    pub quadrature: QuadratureArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("scenarios").required(true).args(["scenario", "all_scenarios"])))]
pub struct SweepArgs {
    /// Scenarios to sweep (comma-separated or repeated).
    #[arg(long, value_delimiter = ',')]
    pub scenario: Vec<Scenario>,
    /// Sweep all four scenarios, interleaved per grid point.
    #[arg(long)]
    pub all_scenarios: bool,
    #[arg(long, default_value_t = 1.0)]
    pub min: f64,
    #[arg(long, default_value_t = 1e3)]
    pub max: f64,
    #[arg(long, default_value_t = 25)]
    pub points: usize,
    /// Linearly spaced grid instead of logarithmic.
    #[arg(long)]
    pub linear: bool,
    /// Mean pulse energy for the relative modulation.
    #[arg(long, default_value_t = 1e6)]
    pub n_bar: f64,
    #[command(flatten)]
    pub modulation: ModulationArgs,
    #[command(flatten)]
    pub search: SearchArgs,
    #[command(flatten)]
    pub quadrature: QuadratureArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct ConstantsArgs {
    #[command(flatten)]
    pub quadrature: QuadratureArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// Eavesdropping scenario: dd, coherent or helstrom.
    #[arg(long)]
    pub scenario: Scenario,
    #[command(flatten)]
    pub advantage: AdvantageArgs,
    #[command(flatten)]
    pub depth: DepthArgs,
    #[command(flatten)]
    pub modulation: ModulationArgs,
    #[command(flatten)]
    pub search: SearchArgs,
    /// Number of protocol rounds.
    #[arg(long, default_value = "1000000", value_parser = parse_count)]
    pub rounds: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Histogram bins per continuous variable.
    #[arg(long, default_value_t = 256)]
    pub bins: usize,
    /// Bootstrap resamples for the standard error.
    #[arg(long, default_value_t = 20)]
    pub resamples: usize,
    /// Smallest agreement tolerance in bits, applied when 3 standard errors
    /// fall below the estimator's binning bias.
    #[arg(long, default_value_t = 2e-3)]
    pub floor: f64,
    /// Also write the raw rounds to this file.
    #[arg(long)]
    pub dump: Option<PathBuf>,
    #[command(flatten)]
    pub quadrature: QuadratureArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

/// Accepts integers written plainly or in scientific notation (`1e7`).
fn parse_count(s: &str) -> Result<u64, String> {
    if let Ok(n) = s.parse::<u64>() {
        return Ok(n);
    }
    let x: f64 = s.parse().map_err(|_| format!("`{s}` is not a count"))?;
    if x >= 0.0 && x.fract() == 0.0 && x <= 9.007_199_254_740_992e15 {
        Ok(x as u64)
    } else {
        Err(format!("`{s}` is not a non-negative integer"))
    }
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] Error),
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
    #[error("serialization error: {0}")]
    Serialize(String),
    #[error("every sweep row failed; first error: {0}")]
    SweepFailed(String),
    #[error("Monte Carlo estimate disagrees with quadrature: |{estimate:.6e} - {exact:.6e}| > {tolerance:.3e}")]
    Disagreement { estimate: f64, exact: f64, tolerance: f64 },
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(Error::Domain { .. } | Error::Config(_) | Error::InsufficientSamples { .. }) => 2,
            CliError::Core(_) | CliError::SweepFailed(_) => 3,
            CliError::Disagreement { .. } => 4,
            CliError::Io(_) | CliError::Serialize(_) => 1,
        }
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Serialize(e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Serialize(e.to_string())
    }
}

/// Parses `args` (including the program name), runs the command and writes
/// results to `stdout` unless an output file was requested. Diagnostics go
/// to `stderr`.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            // Help and version requests are not errors.
            if e.use_stderr() {
                let _ = write!(stderr, "{}", e.render());
                return ExitCode::from(2);
            }
            let _ = write!(stdout, "{}", e.render());
            return ExitCode::SUCCESS;
        }
    };
    configure_threads();
    match execute(&cli, stdout) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let _ = writeln!(stderr, "okd: error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn configure_threads() {
    if let Some(n) = std::env::var(THREADS_ENV).ok().and_then(|v| v.trim().parse::<usize>().ok()) {
        // Fails only if a pool already exists, which then stays in use.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
}

pub fn execute(cli: &Cli, stdout: &mut dyn Write) -> Result<(), CliError> {
    match &cli.command {
        Command::Rate(a) => cmd_rate(a, stdout),
        Command::Sweep(a) => cmd_sweep(a, stdout),
        Command::Constants(a) => cmd_constants(a, stdout),
        Command::Simulate(a) => cmd_simulate(a, stdout),
    }
}

fn optimize_config(
    search: &SearchArgs,
    quadrature: QuadratureConfig,
    modulation: ModulationScheme,
) -> Result<OptimizeConfig, Error> {
    if !(search.bracket_lo < search.bracket_hi) || !(search.tol > 0.0) {
        return Err(Error::Config("search bracket must be increasing and tolerance positive".into()));
    }
    Ok(OptimizeConfig {
        quadrature,
        bracket: (search.bracket_lo, search.bracket_hi),
        tol: search.tol,
        modulation: Some(modulation),
    })
}

fn rate_for(
    scenario: Scenario,
    advantage: f64,
    depth: &DepthArgs,
    cfg: &OptimizeConfig,
) -> Result<RateResult, Error> {
    match depth.delta_b {
        Some(delta_b) => rates::key_rate(scenario, delta_b, advantage, cfg.modulation.as_ref(), &cfg.quadrature),
        None => optimize::optimal_rate(scenario, advantage, cfg),
    }
}

/// Twelve significant digits.
fn num(x: f64) -> String {
    format!("{x:.11e}")
}

fn cmd_rate(a: &RateArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    let advantage = a.advantage.resolve()?;
    let cfg = optimize_config(&a.search, a.quadrature.config()?, a.modulation.scheme(a.advantage.n_bar)?)?;
    let r = rate_for(a.scenario, advantage, &a.depth, &cfg)?;
    let body = match a.output.format.unwrap_or(Format::Json) {
        Format::Json => json(&r)?,
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record([
                "scenario",
                "advantage",
                "delta_b",
                "delta_e",
                "delta_e_coh",
                "i_ab",
                "leak",
                "key_rate",
                "asymptotic_estimate",
                "quadrature_residual",
            ])?;
            w.write_record([
                r.scenario.as_str().to_string(),
                num(r.advantage),
                num(r.delta_b),
                num(r.delta_e),
                r.delta_e_coh.map(num).unwrap_or_default(),
                num(r.i_ab),
                num(r.leak),
                num(r.key_rate),
                num(r.asymptotic_estimate),
                num(r.quadrature_residual),
            ])?;
            csv_bytes(w)?
        }
    };
    emit(&body, a.output.output.as_deref(), stdout)
}

/// Renders a sweep as CSV; the `error` column appears only when a row failed.
pub fn sweep_csv(table: &SweepTable) -> Result<Vec<u8>, CliError> {
    let with_errors = table.rows.iter().any(|r| !r.is_ok());
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec![
        "advantage",
        "scenario",
        "delta_b_opt",
        "delta_e_opt",
        "key_rate",
        "key_rate_asymptotic",
    ];
    if with_errors {
        header.push("error");
    }
    w.write_record(&header)?;
    for r in &table.rows {
        let mut record = vec![
            num(r.advantage),
            r.scenario.as_str().to_string(),
            num(r.optimal_delta_b),
            num(r.optimal_delta_e),
            num(r.key_rate_exact),
            num(r.key_rate_asymptotic),
        ];
        if with_errors {
            record.push(r.error.clone().unwrap_or_default());
        }
        w.write_record(&record)?;
    }
    csv_bytes(w)
}

fn cmd_sweep(a: &SweepArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    let scenarios: Vec<Scenario> = if a.all_scenarios {
        Scenario::ALL.to_vec()
    } else {
        a.scenario.clone()
    };
    let grid = SweepGrid {
        min: a.min,
        max: a.max,
        points: a.points,
        log: !a.linear,
    };
    let cfg = optimize_config(&a.search, a.quadrature.config()?, a.modulation.scheme(a.n_bar)?)?;
    let table = optimize::sweep(&scenarios, &grid, &cfg)?;
    if !table.rows.iter().any(|r| r.is_ok()) {
        let first = table.rows.iter().find_map(|r| r.error.clone()).unwrap_or_default();
        return Err(CliError::SweepFailed(first));
    }
    let body = match a.output.format.unwrap_or(Format::Csv) {
        Format::Csv => sweep_csv(&table)?,
        Format::Json => json(&table)?,
    };
    emit(&body, a.output.output.as_deref(), stdout)
}

/// A constant as reported: six decimals plus the unrounded value.
#[derive(Debug, Clone, Copy, Serialize)]
struct ReportedConstant {
    value: f64,
    unrounded: f64,
    argmax: f64,
    optimizer_residual: f64,
    quadrature_residual: f64,
}

impl From<Constant> for ReportedConstant {
    fn from(c: Constant) -> Self {
        Self {
            value: (c.value * 1e6).round() / 1e6,
            unrounded: c.value,
            argmax: c.argmax,
            optimizer_residual: c.optimizer_residual,
            quadrature_residual: c.quadrature_residual,
        }
    }
}

#[derive(Debug, Serialize)]
struct ConstantsReport {
    gamma: ReportedConstant,
    chi: ReportedConstant,
    helstrom: ReportedConstant,
}

fn cmd_constants(a: &ConstantsArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    let cfg = a.quadrature.config()?;
    let report = ConstantsReport {
        gamma: rates::gamma_constant(&cfg)?.into(),
        chi: rates::chi_constant(&cfg)?.into(),
        helstrom: Constant {
            value: HELSTROM_CONSTANT,
            argmax: 1.0,
            optimizer_residual: 0.0,
            quadrature_residual: 0.0,
        }
        .into(),
    };
    let body = match a.output.format.unwrap_or(Format::Json) {
        Format::Json => json(&report)?,
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["name", "value", "unrounded", "argmax", "optimizer_residual", "quadrature_residual"])?;
            for (name, c) in [("gamma", report.gamma), ("chi", report.chi), ("helstrom", report.helstrom)] {
                w.write_record([
                    name.to_string(),
                    format!("{:.6}", c.value),
                    num(c.unrounded),
                    num(c.argmax),
                    num(c.optimizer_residual),
                    num(c.quadrature_residual),
                ])?;
            }
            csv_bytes(w)?
        }
    };
    emit(&body, a.output.output.as_deref(), stdout)
}

#[derive(Debug, Serialize)]
struct SimulationReport {
    scenario: Scenario,
    advantage: f64,
    delta_b: f64,
    delta_e: f64,
    delta_e_coh: f64,
    rounds: u64,
    seed: u64,
    key_rate_mc: f64,
    std_error: f64,
    key_rate_exact: f64,
    difference: f64,
    tolerance: f64,
    i_ab_mc: f64,
    i_ab_exact: f64,
    i_be_mc: f64,
    i_be_exact: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    eve_error_rate: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    p_err: Option<f64>,
    verdict: &'static str,
}

fn cmd_simulate(a: &SimulateArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    if a.scenario == Scenario::Holevo {
        return Err(Error::Config(
            "simulate supports dd, coherent and helstrom; the collective (Holevo) measurement has no sampling model"
                .into(),
        )
        .into());
    }
    if !(a.floor >= 0.0) {
        return Err(Error::Config("--floor must be non-negative".into()).into());
    }
    let advantage = a.advantage.resolve()?;
    let cfg = optimize_config(&a.search, a.quadrature.config()?, a.modulation.scheme(a.advantage.n_bar)?)?;
    let exact = rate_for(a.scenario, advantage, &a.depth, &cfg)?;
    let mut depths = rates::scenario_depths(a.scenario, exact.delta_b, advantage, cfg.modulation.as_ref())?;
    if a.scenario == Scenario::Helstrom {
        depths.delta_e_coh = exact.delta_e_coh.unwrap_or(depths.delta_e_coh);
    }
    let sim = SimConfig {
        rounds: a.rounds,
        seed: a.seed,
        bins: a.bins,
        bootstrap_resamples: a.resamples,
        ..SimConfig::new(a.scenario, depths)
    };
    sim.validate()?;
    if let Some(path) = &a.dump {
        write_atomic(path, |w| montecarlo::write_raw_samples(w, montecarlo::simulate(&sim)?).map(drop).map_err(Into::into))?;
    }
    let mc = montecarlo::estimate_key_rate_mc(&sim)?;

    let difference = mc.key_rate - exact.key_rate;
    let tolerance = (3.0 * mc.std_error).max(a.floor);
    let pass = difference.abs() <= tolerance;
    let report = SimulationReport {
        scenario: a.scenario,
        advantage,
        delta_b: depths.delta_b,
        delta_e: depths.delta_e,
        delta_e_coh: depths.delta_e_coh,
        rounds: mc.rounds,
        seed: a.seed,
        key_rate_mc: mc.key_rate,
        std_error: mc.std_error,
        key_rate_exact: exact.key_rate,
        difference,
        tolerance,
        i_ab_mc: mc.i_ab.bits,
        i_ab_exact: exact.i_ab,
        i_be_mc: mc.i_be.bits,
        i_be_exact: exact.leak,
        eve_error_rate: mc.eve_error_rate,
        p_err: (a.scenario == Scenario::Helstrom)
            .then(|| helstrom_error_probability(depths.delta_e_coh))
            .transpose()?,
        verdict: if pass { "pass" } else { "fail" },
    };
    let body = match a.output.format.unwrap_or(Format::Json) {
        Format::Json => json(&report)?,
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.serialize(&report)?;
            csv_bytes(w)?
        }
    };
    emit(&body, a.output.output.as_deref(), stdout)?;
    if pass {
        Ok(())
    } else {
        Err(CliError::Disagreement {
            estimate: mc.key_rate,
            exact: exact.key_rate,
            tolerance,
        })
    }
}

fn json<T: Serialize>(value: &T) -> Result<Vec<u8>, CliError> {
    let mut body = serde_json::to_vec_pretty(value)?;
    body.push(b'\n');
    Ok(body)
}

fn csv_bytes(w: csv::Writer<Vec<u8>>) -> Result<Vec<u8>, CliError> {
    w.into_inner().map_err(|e| CliError::Serialize(e.to_string()))
}

fn emit(body: &[u8], path: Option<&Path>, stdout: &mut dyn Write) -> Result<(), CliError> {
    match path {
        Some(path) => write_atomic(path, |w| w.write_all(body).map_err(Into::into)),
        None => {
            stdout.write_all(body)?;
            stdout.flush()?;
            Ok(())
        }
    }
}

/// Writes through a temporary file in the target directory, then renames it
/// into place so readers never observe a partial file.
fn write_atomic<F>(path: &Path, write: F) -> Result<(), CliError>
where
    F: FnOnce(&mut BufWriter<&File>) -> Result<(), CliError>,
{
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let tmp = tempfile::NamedTempFile::new_in(dir)?;
    {
        let mut w = BufWriter::new(tmp.as_file());
        write(&mut w)?;
        w.flush()?;
    }
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| CliError::Io(e.error))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_accept_scientific_notation() {
        assert_eq!(parse_count("1e7").unwrap(), 10_000_000);
        assert_eq!(parse_count("12345").unwrap(), 12_345);
        assert!(parse_count("1.5").is_err());
        assert!(parse_count("-3").is_err());
    }

    #[test]
    fn numbers_have_twelve_significant_digits() {
        let x = 0.123_456_789_012_345_f64;
        let s = num(x);
        assert_eq!(s, "1.23456789012e-1");
        // Half a unit in the twelfth digit.
        assert!((s.parse::<f64>().unwrap() - x).abs() <= 5e-12 * x);
    }

    #[test]
    fn exit_codes() {
        let domain = CliError::Core(Error::Domain { name: "x", value: 1.0, reason: "r" });
        assert_eq!(domain.exit_code(), 2);
        let nc = CliError::Core(Error::NonConvergence { evaluations: 1, estimate: 0.0, error: 1.0 });
        assert_eq!(nc.exit_code(), 3);
        let d = CliError::Disagreement { estimate: 0.0, exact: 1.0, tolerance: 0.1 };
        assert_eq!(d.exit_code(), 4);
    }

    #[test]
    fn cli_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
