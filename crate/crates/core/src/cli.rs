//! The `imp-forecast` command line.
//!
//! Exit codes: 0 success, 1 usage error, 2 data or validation error,
//! 3 internal failure. Diagnostics go to the error stream; results go to
//! files, or to the output stream for `report` without `--out`.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::dataio::{
    generate_synthetic_cohort, parse_cohort_csv, serialize_cohort_csv, validate_cohort, DataError,
};
use crate::pipeline::{predict_one, run_study, ModelBundle, PipelineError, SelectionMode, StudyConfig};
use crate::regress::HYPER_KEYS;
use crate::report::{export_study, study_from_json, study_to_json, RenderFormat, RenderOptions};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DATA: i32 = 2;
pub const EXIT_INTERNAL: i32 = 3;

pub const THREADS_ENV: &str = "IMP_FORECAST_THREADS";

#[derive(Debug, Parser)]
#[command(
    name = "imp-forecast",
    version,
    about = "Per-channel forecasting of one-month cochlear implant electrode impedances"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Write a synthetic labeled cohort as CSV.
    Generate(GenerateArgs),
    /// Select and train one model per channel; write the report and model bundle.
    Study(StudyArgs),
    /// Predict one-month impedances for every row of a cohort CSV.
    Predict(PredictArgs),
    /// Render a study report as tables, CSV or JSON.
    Report(ReportArgs),
}

#[derive(Debug, Args)]
struct GenerateArgs {
    /// Number of patients.
    #[arg(long, default_value_t = 80, value_parser = clap::value_parser!(u64).range(1..))]
    n: u64,
    /// Random seed.
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Output CSV path.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct StudyArgs {
    /// Labeled cohort CSV.
    #[arg(long)]
    data: PathBuf,
    /// Master seed for the split and every model.
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Output path of the study report (JSON).
    #[arg(long)]
    out_report: PathBuf,
    /// Output path of the trained model bundle (JSON).
    #[arg(long)]
    out_models: PathBuf,
    /// Fraction of patients held out for testing, in (0, 1).
    #[arg(long, default_value_t = 0.30)]
    test_fraction: f64,
    /// Hyperparameter override KEY=VALUE, repeatable (e.g. bdtr.trees=300).
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    /// How the winner is chosen: test_set or inner_validation.
    #[arg(long, default_value = "test_set", value_parser = parse_selection)]
    selection: SelectionMode,
    /// Worker threads; output does not depend on it. Defaults to all cores.
    #[arg(long, env = THREADS_ENV)]
    threads: Option<usize>,
}

#[derive(Debug, Args)]
struct PredictArgs {
    /// Model bundle written by `study`.
    #[arg(long)]
    models: PathBuf,
    /// Cohort CSV; label columns are optional and ignored.
    #[arg(long)]
    data: PathBuf,
    /// Output CSV, one row per patient and channel.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct ReportArgs {
    /// Study report written by `study`.
    #[arg(long = "in", value_name = "IN")]
    input: PathBuf,
    /// Output format: text, csv or json.
    #[arg(long, default_value = "text", value_parser = parse_format)]
    format: RenderFormat,
    /// Decimals for RMSE in text tables, 0 to 10.
    #[arg(long, default_value_t = 6)]
    decimals_rmse: usize,
    /// Decimals for percentages in text tables, 0 to 10.
    #[arg(long, default_value_t = 2)]
    decimals_pct: usize,
    /// Write here instead of the output stream.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_selection(s: &str) -> Result<SelectionMode, String> {
    s.parse()
}

fn parse_format(s: &str) -> Result<RenderFormat, String> {
    s.parse().map_err(|e: crate::report::ReportError| e.to_string())
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Data(String),
    Internal(String),
}

impl CliError {
    fn code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Data(_) => EXIT_DATA,
            CliError::Internal(_) => EXIT_INTERNAL,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Data(m) | CliError::Internal(m) => m,
        }
    }
}

impl From<DataError> for CliError {
    fn from(e: DataError) -> Self {
        CliError::Data(e.to_string())
    }
}

impl From<PipelineError> for CliError {
    fn from(e: PipelineError) -> Self {
        match e {
            PipelineError::Data(_)
            | PipelineError::Unlabeled
            | PipelineError::TooFewRecords(..)
            | PipelineError::IncompatibleBundle(_) => CliError::Data(e.to_string()),
            PipelineError::Regress(crate::regress::RegressError::InvalidHyper(_)) => {
                CliError::Usage(e.to_string())
            }
            _ => CliError::Internal(e.to_string()),
        }
    }
}

/// Runs the CLI with the process's standard streams.
pub fn run_cli<I, S>(args: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_cli_with(args, &mut stdout.lock(), &mut stderr.lock())
}

/// Runs the CLI writing to the given streams; returns the exit code.
pub fn run_cli_with<I, S>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if code == EXIT_OK {
                out.write_all(text.as_bytes())
            } else {
                err.write_all(text.as_bytes())
            };
            return code;
        }
    };
    let result = match cli.command {
        Command::Generate(a) => generate(a, err),
        Command::Study(a) => study(a, err),
        Command::Predict(a) => predict(a, err),
        Command::Report(a) => report(a, out),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(err, "error: {}", e.message());
            e.code()
        }
    }
}

fn check_input(path: &Path) -> Result<(), CliError> {
    if !path.is_file() {
        return Err(CliError::Data(format!("cannot read {}: no such file", path.display())));
    }
    Ok(())
}

/// The parent directory must exist and the target must not be one of the
/// inputs.
fn check_output(path: &Path, inputs: &[&Path]) -> Result<(), CliError> {
    if path.is_dir() {
        return Err(CliError::Usage(format!("{} is a directory", path.display())));
    }
    let parent = path.parent().filter(|p| !p.as_os_str().is_empty());
    if let Some(p) = parent {
        if !p.is_dir() {
            return Err(CliError::Usage(format!(
                "output directory {} does not exist",
                p.display()
            )));
        }
    }
    if let Ok(target) = fs::canonicalize(path) {
        for input in inputs {
            if fs::canonicalize(input).is_ok_and(|i| i == target) {
                return Err(CliError::Usage(format!(
                    "refusing to overwrite input file {}",
                    path.display()
                )));
            }
        }
    }
    Ok(())
}

fn read_text(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Data(format!("cannot read {}: {e}", path.display())))
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    fs::write(path, bytes)
        .map_err(|e| CliError::Internal(format!("cannot write {}: {e}", path.display())))
}

fn generate(a: GenerateArgs, err: &mut dyn Write) -> Result<(), CliError> {
    check_output(&a.out, &[])?;
    let n = usize::try_from(a.n).map_err(|_| CliError::Usage(format!("--n {} is too large", a.n)))?;
    let cohort = generate_synthetic_cohort(n, a.seed)?;
    write_file(&a.out, serialize_cohort_csv(&cohort).as_bytes())?;
    let _ = writeln!(err, "wrote {} synthetic records to {}", n, a.out.display());
    Ok(())
}

fn study_config(a: &StudyArgs) -> Result<StudyConfig, CliError> {
    if !(a.test_fraction > 0.0 && a.test_fraction < 1.0) {
        return Err(CliError::Usage(format!(
            "--test-fraction must lie in (0, 1), got {}",
            a.test_fraction
        )));
    }
    let mut config = StudyConfig::with_seed(a.seed);
    config.split.test_fraction = a.test_fraction;
    config.selection = a.selection;
    for item in &a.set {
        let (key, value) = item.split_once('=').ok_or_else(|| {
            CliError::Usage(format!(
                "--set expects KEY=VALUE, got {item:?}; keys: {}",
                HYPER_KEYS.join(", ")
            ))
        })?;
        config
            .hyper
            .set(key.trim(), value.trim())
            .map_err(|e| CliError::Usage(e.to_string()))?;
    }
    config.hyper.validate().map_err(|e| CliError::Usage(e.to_string()))?;
    Ok(config)
}

fn thread_pool(threads: Option<usize>) -> Result<Option<rayon::ThreadPool>, CliError> {
    match threads {
        None => Ok(None),
        Some(0) => Err(CliError::Usage("--threads must be at least 1".into())),
        Some(k) => rayon::ThreadPoolBuilder::new()
            .num_threads(k)
            .build()
            .map(Some)
            .map_err(|e| CliError::Internal(format!("cannot start {k} threads: {e}"))),
    }
}

fn study(a: StudyArgs, err: &mut dyn Write) -> Result<(), CliError> {
    let config = study_config(&a)?;
    check_input(&a.data)?;
    check_output(&a.out_report, &[&a.data])?;
    check_output(&a.out_models, &[&a.data])?;
    if a.out_report == a.out_models {
        return Err(CliError::Usage("--out-report and --out-models must differ".into()));
    }
    let pool = thread_pool(a.threads)?;

    let cohort = parse_cohort_csv(read_text(&a.data)?.as_bytes())?;
    let validation = validate_cohort(&cohort);
    for w in &validation.warnings {
        let _ = writeln!(err, "warning: row {}, column {}: {}", w.row, w.column, w.message);
    }
    if let Some(first) = validation.errors.first() {
        for e in &validation.errors {
            let _ = writeln!(err, "invalid: row {}, column {}: {}", e.row, e.column, e.message);
        }
        return Err(CliError::Data(format!(
            "{} invalid value(s), first at row {} column {}",
            validation.errors.len(),
            first.row,
            first.column
        )));
    }
    if !cohort.is_labeled() {
        return Err(CliError::Data(format!(
            "{} has no label columns; study needs labeled data",
            a.data.display()
        )));
    }

    let outcome = match &pool {
        Some(p) => p.install(|| run_study(&cohort, &config)),
        None => run_study(&cohort, &config),
    }?;
    write_file(&a.out_report, study_to_json(&outcome.report).as_bytes())?;
    let mut bundle = outcome.bundle.to_json();
    bundle.push('\n');
    write_file(&a.out_models, bundle.as_bytes())?;
    let _ = writeln!(
        err,
        "selected models for {} channels; report {}, models {}",
        outcome.report.entries.len(),
        a.out_report.display(),
        a.out_models.display()
    );
    Ok(())
}

pub const PREDICTION_HEADER: [&str; 8] =
    ["row", "channel", "label", "kind", "group", "prediction_kohm", "rmse", "hint"];

fn predict(a: PredictArgs, err: &mut dyn Write) -> Result<(), CliError> {
    check_input(&a.models)?;
    check_input(&a.data)?;
    check_output(&a.out, &[&a.models, &a.data])?;
    let bundle = ModelBundle::from_json(&read_text(&a.models)?)?;
    let cohort = parse_cohort_csv(read_text(&a.data)?.as_bytes())?;
    let validation = validate_cohort(&cohort);
    if let Some(first) = validation.errors.first() {
        return Err(CliError::Data(format!(
            "row {}, column {}: {}",
            first.row, first.column, first.message
        )));
    }

    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| CliError::Internal(e.to_string());
    w.write_record(PREDICTION_HEADER).map_err(io)?;
    for (i, record) in cohort.records().iter().enumerate() {
        for p in predict_one(&bundle, record)? {
            w.write_record([
                (i + 1).to_string(),
                p.channel.index().to_string(),
                p.channel.label(),
                p.kind.abbrev().to_string(),
                p.group.number().to_string(),
                p.value.value().to_string(),
                p.rmse.to_string(),
                p.hint(),
            ])
            .map_err(io)?;
        }
    }
    let bytes = w.into_inner().map_err(|e| CliError::Internal(e.to_string()))?;
    write_file(&a.out, &bytes)?;
    let _ = writeln!(err, "wrote predictions for {} records to {}", cohort.len(), a.out.display());
    Ok(())
}

fn report(a: ReportArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let opts = RenderOptions {
        format: a.format,
        decimals_rmse: a.decimals_rmse,
        decimals_pct: a.decimals_pct,
    };
    opts.validate().map_err(|e| CliError::Usage(e.to_string()))?;
    check_input(&a.input)?;
    if let Some(path) = &a.out {
        check_output(path, &[&a.input])?;
    }
    let study = study_from_json(&read_text(&a.input)?).map_err(|e| CliError::Data(e.to_string()))?;
    let bytes = export_study(&study, &opts).map_err(|e| CliError::Internal(e.to_string()))?;
    match &a.out {
        Some(path) => write_file(path, &bytes),
        None => out
            .write_all(&bytes)
            .map_err(|e| CliError::Internal(format!("cannot write output: {e}"))),
    }
}
