//! Command-line front end.
//!
//! `simulate -> estimate -> factors -> minvar -> hedge` each read one input
//! (a panel CSV or a model JSON) and write their results into
//! `--output-dir`. Exit codes: 0 success, 2 I/O or usage, 3 data
//! validation, 4 model parse, 5 numerical failure.

use std::ffi::OsString;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use log::{info, warn};
use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::covariance::{
    estimate, full_covariance, separability_diagnostic, KroneckerCovarianceModel,
};
use crate::error::{Error, ErrorKind, Result};
use crate::factors::{
    decompose, domestic_table, loadings_csv, loadings_json, variance_table, Domain,
};
use crate::pipeline::{
    apply_missing_policy, compute_returns, load_curve_panel, validate_panel, CurvePanel,
    MissingPolicy, PanelFormat, ReturnMethod, ReturnSet,
};
use crate::portfolio::{
    full_labels, hedge, min_variance_separable, portfolio_variance, weights_csv, HedgeOptions,
    HedgeSpec, DEFAULT_HEDGED_FACTORS,
};
use crate::synthetic::{
    desk_model, simulate_panel, GeneratorConfig, PanelLayout, DEFAULT_SAMPLE_COUNT, DEFAULT_SEED,
    STREAM_ALGORITHM,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_IO: i32 = 2;
pub const EXIT_DATA: i32 = 3;
pub const EXIT_MODEL: i32 = 4;
pub const EXIT_NUMERICAL: i32 = 5;

/// Environment variable selecting log verbosity.
pub const LOG_ENV: &str = "KRONRISK_LOG";

#[derive(Debug, Parser)]
#[command(
    name = "kronrisk",
    version,
    about = "Kronecker-separable risk factors for maturity x country return panels"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Estimate a separable model from a rate panel.
    Estimate(Flags),
    /// Per-domain factor loadings and explained-variance tables.
    Factors(Flags),
    /// Separable minimum-variance portfolio.
    Minvar(Flags),
    /// Factor-hedged portfolio in one domain.
    Hedge(Flags),
    /// Generate a synthetic rate panel.
    Simulate(Flags),
    /// Report data problems in a rate panel.
    Validate(Flags),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReturnsArg {
    Diff,
    Log,
}

impl From<ReturnsArg> for ReturnMethod {
    fn from(r: ReturnsArg) -> Self {
        match r {
            ReturnsArg::Diff => ReturnMethod::FirstDifference,
            ReturnsArg::Log => ReturnMethod::LogRatio,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DomainArg {
    Maturity,
    Country,
}

impl From<DomainArg> for Domain {
    fn from(d: DomainArg) -> Self {
        match d {
            DomainArg::Maturity => Domain::Maturity,
            DomainArg::Country => Domain::Country,
        }
    }
}

/// Flags shared by every subcommand. Unset flags fall back to the config
/// file, then to built-in defaults.
#[derive(Debug, Clone, Default, Args)]
pub struct Flags {
    /// Panel CSV, or model JSON for factors/minvar/hedge/simulate.
    #[arg(long)]
    pub input: Option<PathBuf>,
    #[arg(long)]
    pub output_dir: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<OutputFormat>,
    /// Subtract the per-element sample mean before estimation (default).
    #[arg(long, overrides_with = "no_demean")]
    pub demean: bool,
    #[arg(long, overrides_with = "demean")]
    pub no_demean: bool,
    #[arg(long, value_enum)]
    pub returns: Option<ReturnsArg>,
    /// Also write per-country domestic PCA tables.
    #[arg(long)]
    pub domestic: bool,
    #[arg(long, value_enum)]
    pub domain: Option<DomainArg>,
    /// One-based asset held long by the hedge (default: last asset).
    #[arg(long)]
    pub index: Option<usize>,
    /// Number of leading factors to hedge.
    #[arg(long = "r")]
    pub factors_hedged: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Fail on missing cells and inconsistent hedges instead of repairing or flagging.
    #[arg(long)]
    pub strict: bool,
    /// TOML file with defaults for any of these flags.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Simulated return count.
    #[arg(long)]
    pub samples: Option<usize>,
    /// Simulated maturity count.
    #[arg(long)]
    pub maturities: Option<usize>,
    /// Simulated country count.
    #[arg(long)]
    pub countries: Option<usize>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    input: Option<PathBuf>,
    output_dir: Option<PathBuf>,
    format: Option<OutputFormat>,
    demean: Option<bool>,
    returns: Option<ReturnsArg>,
    domestic: Option<bool>,
    domain: Option<DomainArg>,
    index: Option<usize>,
    r: Option<usize>,
    seed: Option<u64>,
    strict: Option<bool>,
    samples: Option<usize>,
    maturities: Option<usize>,
    countries: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CommandKind {
    Estimate,
    Factors,
    Minvar,
    Hedge,
    Simulate,
    Validate,
}

/// Fully resolved settings for one run.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub command: CommandKind,
    pub input: Option<PathBuf>,
    pub output_dir: PathBuf,
    pub format: OutputFormat,
    pub demean: bool,
    pub returns: ReturnMethod,
    pub domestic: bool,
    pub domain: Domain,
    pub index: Option<usize>,
    pub factors_hedged: usize,
    pub seed: u64,
    pub strict: bool,
    pub samples: usize,
    pub maturities: usize,
    pub countries: usize,
}

impl RunConfig {
    pub fn new(command: CommandKind) -> Self {
        Self {
            command,
            input: None,
            output_dir: PathBuf::from("."),
            format: OutputFormat::Json,
            demean: true,
            returns: ReturnMethod::FirstDifference,
            domestic: false,
            domain: Domain::Maturity,
            index: None,
            factors_hedged: DEFAULT_HEDGED_FACTORS,
            seed: DEFAULT_SEED,
            strict: false,
            samples: DEFAULT_SAMPLE_COUNT,
            maturities: 15,
            countries: 8,
        }
    }

    pub fn from_flags(command: CommandKind, flags: &Flags) -> Result<Self> {
        let file = match &flags.config {
            Some(path) => {
                let text = read_input(path)?;
                toml::from_str::<ConfigFile>(&text).map_err(|e| {
                    Error::Io(io::Error::new(
                        io::ErrorKind::InvalidData,
                        format!("config {}: {}", path.display(), e.message()),
                    ))
                })?
            }
            None => ConfigFile::default(),
        };
        let base = Self::new(command);
        let demean = if flags.no_demean {
            false
        } else if flags.demean {
            true
        } else {
            file.demean.unwrap_or(base.demean)
        };
        Ok(Self {
            command,
            input: flags.input.clone().or(file.input),
            output_dir: flags
                .output_dir
                .clone()
                .or(file.output_dir)
                .unwrap_or(base.output_dir),
            format: flags.format.or(file.format).unwrap_or(base.format),
            demean,
            returns: flags
                .returns
                .or(file.returns)
                .map(ReturnMethod::from)
                .unwrap_or(base.returns),
            domestic: flags.domestic || file.domestic.unwrap_or(false),
            domain: flags
                .domain
                .or(file.domain)
                .map(Domain::from)
                .unwrap_or(base.domain),
            index: flags.index.or(file.index),
            factors_hedged: flags
                .factors_hedged
                .or(file.r)
                .unwrap_or(base.factors_hedged),
            seed: flags.seed.or(file.seed).unwrap_or(base.seed),
            strict: flags.strict || file.strict.unwrap_or(false),
            samples: flags.samples.or(file.samples).unwrap_or(base.samples),
            maturities: flags
                .maturities
                .or(file.maturities)
                .unwrap_or(base.maturities),
            countries: flags.countries.or(file.countries).unwrap_or(base.countries),
        })
    }

    fn require_input(&self) -> Result<&Path> {
        self.input.as_deref().ok_or_else(|| {
            Error::Io(io::Error::new(
                io::ErrorKind::InvalidInput,
                "this command needs --input",
            ))
        })
    }
}

pub fn exit_code(e: &Error) -> i32 {
    match e.kind() {
        ErrorKind::Io | ErrorKind::Usage => EXIT_IO,
        ErrorKind::Data => EXIT_DATA,
        ErrorKind::ModelParse => EXIT_MODEL,
        ErrorKind::Numerical => EXIT_NUMERICAL,
    }
}

/// Parses `args` (including the program name), runs the command, and
/// returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_IO } else { EXIT_OK };
        }
    };
    init_logging();
    let (kind, flags) = match &cli.command {
        Command::Estimate(f) => (CommandKind::Estimate, f),
        Command::Factors(f) => (CommandKind::Factors, f),
        Command::Minvar(f) => (CommandKind::Minvar, f),
        Command::Hedge(f) => (CommandKind::Hedge, f),
        Command::Simulate(f) => (CommandKind::Simulate, f),
        Command::Validate(f) => (CommandKind::Validate, f),
    };
    let result = RunConfig::from_flags(kind, flags).and_then(|cfg| execute(&cfg));
    match result {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {}", one_line(&e.to_string()));
            exit_code(&e)
        }
    }
}

fn one_line(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

fn init_logging() {
    let env = env_logger::Env::new().filter_or(LOG_ENV, "warn");
    let _ = env_logger::Builder::from_env(env)
        .format_timestamp(None)
        .try_init();
}

pub fn execute(cfg: &RunConfig) -> Result<()> {
    match cfg.command {
        CommandKind::Estimate => cmd_estimate(cfg),
        CommandKind::Factors => cmd_factors(cfg),
        CommandKind::Minvar => cmd_minvar(cfg),
        CommandKind::Hedge => cmd_hedge(cfg),
        CommandKind::Simulate => cmd_simulate(cfg),
        CommandKind::Validate => cmd_validate(cfg),
    }
}

fn read_input(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| {
        if e.kind() == io::ErrorKind::NotFound {
            Error::Io(io::Error::new(
                io::ErrorKind::NotFound,
                format!("input not found: {}", path.display()),
            ))
        } else {
            Error::Io(e)
        }
    })
}

/// Writes through a temporary file in the same directory, then renames.
fn write_atomic(dir: &Path, name: &str, contents: &str) -> Result<PathBuf> {
    fs::create_dir_all(dir)?;
    let target = dir.join(name);
    let tmp = dir.join(format!(".{name}.tmp"));
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(contents.as_bytes())?;
        f.sync_all()?;
    }
    fs::rename(&tmp, &target)?;
    info!("wrote {}", target.display());
    Ok(target)
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable output");
    s.push('\n');
    s
}

fn load_panel(cfg: &RunConfig) -> Result<CurvePanel> {
    let text = read_input(cfg.require_input()?)?;
    load_curve_panel(text.as_bytes(), PanelFormat::LongCsv)
}

fn panel_returns(cfg: &RunConfig) -> Result<ReturnSet> {
    let panel = load_panel(cfg)?;
    let policy = if cfg.strict {
        MissingPolicy::Strict
    } else {
        MissingPolicy::ForwardFill
    };
    let missing = panel.missing_cells().len();
    let panel = apply_missing_policy(&panel, policy)?;
    if missing > 0 {
        warn!("forward-filled {missing} missing cells");
    }
    compute_returns(&panel, cfg.returns)
}

fn estimate_from_panel(cfg: &RunConfig) -> Result<(KroneckerCovarianceModel, ReturnSet)> {
    let returns = panel_returns(cfg)?;
    let model = estimate(&returns.samples, cfg.demean)?.with_axis_labels(returns.axis_labels())?;
    Ok((model, returns))
}

fn is_model_file(path: &Path) -> bool {
    path.extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("json"))
}

/// Model from `--input`: parsed if it is a `.json` file, estimated otherwise.
fn load_or_estimate(cfg: &RunConfig) -> Result<KroneckerCovarianceModel> {
    let input = cfg.require_input()?;
    if is_model_file(input) {
        KroneckerCovarianceModel::from_json(&read_input(input)?)
    } else {
        Ok(estimate_from_panel(cfg)?.0)
    }
}

fn require_order_two(model: &KroneckerCovarianceModel) -> Result<()> {
    if model.order() != 2 {
        return Err(Error::ModelParse(format!(
            "expected an order-2 maturity x country model, got dims {:?}",
            model.dims()
        )));
    }
    Ok(())
}

pub fn cmd_estimate(cfg: &RunConfig) -> Result<()> {
    let (model, returns) = estimate_from_panel(cfg)?;
    let report = separability_diagnostic(&returns.samples, &model)?;
    let dir = &cfg.output_dir;
    write_atomic(dir, "model.json", &(model.to_json() + "\n"))?;
    write_atomic(dir, "separability.json", &to_json(&report))?;
    let text = format!(
        "samples: {}\ndims: {:?}\nsigma2: {}\nrelative error: {:.6}\nparameters: {} unrestricted, {} separable\n",
        model.sample_count(),
        model.dims(),
        model.sigma2(),
        report.relative_error,
        report.full_params,
        report.separable_params
    );
    write_atomic(dir, "separability.txt", &text)?;
    print!("{text}");
    Ok(())
}

pub fn cmd_factors(cfg: &RunConfig) -> Result<()> {
    let input = cfg.require_input()?;
    let (model, returns) = if is_model_file(input) {
        if cfg.domestic {
            return Err(Error::Io(io::Error::new(
                io::ErrorKind::InvalidInput,
                "--domestic needs a panel CSV input",
            )));
        }
        (
            KroneckerCovarianceModel::from_json(&read_input(input)?)?,
            None,
        )
    } else {
        let (m, r) = estimate_from_panel(cfg)?;
        (m, Some(r))
    };
    require_order_two(&model)?;
    let d = decompose(&model)?;
    let dir = &cfg.output_dir;
    for domain in [Domain::Maturity, Domain::Country] {
        let table = variance_table(&d, domain)?;
        let labels = model.labels_for(domain.mode());
        let stem = domain.name();
        write_atomic(dir, &format!("variance_{stem}.txt"), &table.render())?;
        write_atomic(
            dir,
            &format!("variance_{stem}.json"),
            &(table.to_json() + "\n"),
        )?;
        match cfg.format {
            OutputFormat::Csv => {
                write_atomic(dir, &format!("variance_{stem}.csv"), &table.to_csv())?;
                write_atomic(
                    dir,
                    &format!("loadings_{stem}.csv"),
                    &loadings_csv(&d, domain, &labels),
                )?;
            }
            OutputFormat::Json => {
                write_atomic(
                    dir,
                    &format!("loadings_{stem}.json"),
                    &(loadings_json(&d, domain, &labels) + "\n"),
                )?;
            }
        }
        println!("{}", table.render());
    }
    if cfg.domestic {
        let returns = returns.expect("panel input");
        let table = domestic_table(&returns.samples, &returns.countries)?;
        write_atomic(dir, "domestic.txt", &table.render())?;
        write_atomic(dir, "domestic.json", &(table.to_json() + "\n"))?;
        if cfg.format == OutputFormat::Csv {
            write_atomic(dir, "domestic.csv", &table.to_csv())?;
        }
        print!("{}", table.render());
    }
    Ok(())
}

#[derive(Serialize)]
struct WeightsJson<'a> {
    labels: &'a [String],
    weights: Vec<f64>,
}

fn write_weights(
    cfg: &RunConfig,
    stem: &str,
    labels: &[String],
    weights: &DVector<f64>,
) -> Result<()> {
    match cfg.format {
        OutputFormat::Csv => write_atomic(
            &cfg.output_dir,
            &format!("{stem}.csv"),
            &weights_csv(labels, weights),
        )?,
        OutputFormat::Json => write_atomic(
            &cfg.output_dir,
            &format!("{stem}.json"),
            &to_json(&WeightsJson {
                labels,
                weights: weights.iter().copied().collect(),
            }),
        )?,
    };
    Ok(())
}

#[derive(Serialize)]
struct MinvarReport {
    portfolio_variance: f64,
    sigma2: f64,
    maturity_weights: Vec<f64>,
    country_weights: Vec<f64>,
    full_weights: Vec<f64>,
}

pub fn cmd_minvar(cfg: &RunConfig) -> Result<()> {
    let model = load_or_estimate(cfg)?;
    require_order_two(&model)?;
    let w = min_variance_separable(&model)?;
    let full = w.full();
    let variance = portfolio_variance(&full, &full_covariance(&model))?;
    let maturities = model.labels_for(0);
    let countries = model.labels_for(1);
    write_weights(cfg, "minvar_maturity", &maturities, &w.maturity)?;
    write_weights(cfg, "minvar_country", &countries, &w.country)?;
    write_weights(
        cfg,
        "minvar_full",
        &full_labels(&maturities, &countries),
        &full,
    )?;
    let report = MinvarReport {
        portfolio_variance: variance,
        sigma2: model.sigma2(),
        maturity_weights: w.maturity.iter().copied().collect(),
        country_weights: w.country.iter().copied().collect(),
        full_weights: full.iter().copied().collect(),
    };
    write_atomic(&cfg.output_dir, "minvar.json", &to_json(&report))?;
    println!("minimum-variance portfolio variance: {variance}");
    Ok(())
}

#[derive(Serialize)]
struct HedgeReport<'a> {
    domain: Domain,
    /// One-based.
    index: usize,
    asset: &'a str,
    factors_hedged: usize,
    weights: Vec<f64>,
    residual: f64,
    consistent: bool,
    exposures: Vec<f64>,
}

pub fn cmd_hedge(cfg: &RunConfig) -> Result<()> {
    let model = load_or_estimate(cfg)?;
    require_order_two(&model)?;
    let d = decompose(&model)?;
    let size = model.dims()[cfg.domain.mode()];
    let index = cfg.index.unwrap_or(size);
    if index == 0 || index > size {
        return Err(Error::InvalidHedge(format!(
            "--index {index} outside 1..={size}"
        )));
    }
    let spec = HedgeSpec {
        decomposition: &d,
        domain: cfg.domain,
        target: index - 1,
        factors_hedged: cfg.factors_hedged,
    };
    let opts = HedgeOptions {
        strict: cfg.strict,
        ..HedgeOptions::default()
    };
    let result = hedge(&spec, &opts)?;
    if !result.consistent {
        warn!(
            "hedge system is inconsistent (residual {:e}); weights are a least-squares fit",
            result.residual
        );
    }
    let labels = model.labels_for(cfg.domain.mode());
    let stem = format!("hedge_{}", cfg.domain.name());
    write_weights(cfg, &stem, &labels, &result.weights)?;
    let report = HedgeReport {
        domain: cfg.domain,
        index,
        asset: &labels[index - 1],
        factors_hedged: result.factors_hedged,
        weights: result.weights.iter().copied().collect(),
        residual: result.residual,
        consistent: result.consistent,
        exposures: result.exposures.clone(),
    };
    write_atomic(&cfg.output_dir, "hedge.json", &to_json(&report))?;
    println!(
        "hedge ({} domain, long {}, {} factors): residual {:e}",
        cfg.domain.name(),
        labels[index - 1],
        result.factors_hedged,
        result.residual
    );
    Ok(())
}

#[derive(Serialize)]
struct SimulationMeta {
    seed: u64,
    algorithm: &'static str,
    samples: usize,
    dims: Vec<usize>,
    base_rate: f64,
    start_date: String,
    step_days: u64,
}

pub fn cmd_simulate(cfg: &RunConfig) -> Result<()> {
    let model = match &cfg.input {
        Some(path) => KroneckerCovarianceModel::from_json(&read_input(path)?)?,
        None => {
            if cfg.maturities == 0 || cfg.countries == 0 {
                return Err(Error::InvalidDims(vec![cfg.maturities, cfg.countries]));
            }
            desk_model(cfg.maturities, cfg.countries)?
        }
    };
    require_order_two(&model)?;
    let layout = PanelLayout::for_model(&model)?;
    let gen = GeneratorConfig {
        model: model.clone(),
        sample_count: cfg.samples,
        seed: cfg.seed,
    };
    let panel = simulate_panel(&gen, &layout)?;
    let mut csv = Vec::new();
    panel.write_csv(&mut csv)?;
    let csv = String::from_utf8(csv).expect("CSV output is UTF-8");
    write_atomic(&cfg.output_dir, "panel.csv", &csv)?;
    write_atomic(
        &cfg.output_dir,
        "true_model.json",
        &(model.to_json() + "\n"),
    )?;
    let meta = SimulationMeta {
        seed: cfg.seed,
        algorithm: STREAM_ALGORITHM,
        samples: cfg.samples,
        dims: model.dims().to_vec(),
        base_rate: layout.base_rate,
        start_date: layout.start.to_string(),
        step_days: layout.step_days,
    };
    write_atomic(&cfg.output_dir, "simulate.json", &to_json(&meta))?;
    println!("seed: {}", cfg.seed);
    Ok(())
}

pub fn cmd_validate(cfg: &RunConfig) -> Result<()> {
    let panel = load_panel(cfg)?;
    let report = validate_panel(&panel);
    write_atomic(&cfg.output_dir, "validation.json", &to_json(&report))?;
    let s = &report.summary;
    println!(
        "{} dates ({} to {}), {} maturities, {} countries, median spacing {} days",
        s.date_count,
        s.first_date,
        s.last_date,
        s.maturities.len(),
        s.countries.len(),
        s.median_spacing_days
            .map(|d| d.to_string())
            .unwrap_or_else(|| "n/a".into())
    );
    for issue in &report.issues {
        println!("{issue}");
    }
    if cfg.strict && !report.is_clean() {
        return Err(Error::MissingData(format!(
            "{} validation issue(s)",
            report.issues.len()
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_override_config_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.toml");
        fs::write(&path, "seed = 5\nformat = \"csv\"\ndemean = false\nr = 1\n").unwrap();
        let flags = Flags {
            config: Some(path.clone()),
            seed: Some(9),
            ..Flags::default()
        };
        let cfg = RunConfig::from_flags(CommandKind::Hedge, &flags).unwrap();
        assert_eq!(cfg.seed, 9);
        assert_eq!(cfg.format, OutputFormat::Csv);
        assert!(!cfg.demean);
        assert_eq!(cfg.factors_hedged, 1);

        let flags = Flags {
            config: Some(path),
            demean: true,
            ..Flags::default()
        };
        assert!(
            RunConfig::from_flags(CommandKind::Estimate, &flags)
                .unwrap()
                .demean
        );
    }

    #[test]
    fn defaults() {
        let cfg = RunConfig::from_flags(CommandKind::Estimate, &Flags::default()).unwrap();
        assert!(cfg.demean);
        assert_eq!(cfg.format, OutputFormat::Json);
        assert_eq!(cfg.factors_hedged, 3);
        assert_eq!(cfg.returns, ReturnMethod::FirstDifference);
    }

    #[test]
    fn exit_codes_by_kind() {
        assert_eq!(
            exit_code(&Error::Io(io::Error::new(io::ErrorKind::NotFound, "x"))),
            EXIT_IO
        );
        assert_eq!(exit_code(&Error::MissingData("x".into())), EXIT_DATA);
        assert_eq!(exit_code(&Error::ModelParse("x".into())), EXIT_MODEL);
        assert_eq!(
            exit_code(&Error::Singular {
                min_eigenvalue: 0.0,
                max_eigenvalue: 1.0
            }),
            EXIT_NUMERICAL
        );
    }
}
