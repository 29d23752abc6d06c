//! Command-line front end. Exit codes: 0 ok, 2 bad input or config,
//! 3 I/O failure, 4 incomplete data.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use crate::comparison::{self, run_group_suite, ComparisonOptions, ComparisonReport, COMPARISON_GROUPS};
use crate::error::Error;
use crate::log_io::{read_log_str, write_log_string};
use crate::models::{AmplitudeMode, ModelKind, START_CUBE_DEPTH_M};
use crate::regression::FitResult;
use crate::sim::config::parse_sim_config;
use crate::sim::study::{generate_study, Preset, StudySpec};
use crate::throughput::{render_json_lines, technique_throughput, throughput_by_group, ThroughputOptions};
use crate::trial::{collapse_over, group_by_condition, validate_log, Aggregation, Factor, Trial};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_IO: i32 = 3;
pub const EXIT_INCOMPLETE: i32 = 4;

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Io(_) => EXIT_IO,
        Error::IncompleteGrid(_) | Error::MissingGroups(_) | Error::InsufficientData { .. } => EXIT_INCOMPLETE,
        _ => EXIT_INPUT,
    }
}

#[derive(Debug, Parser)]
#[command(name = "fitts-teleport", version, about = "Fitts' law model comparison for parabolic teleport selection")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Euclidean,
    Depth,
    Both,
}

impl ModeArg {
    fn modes(self) -> Vec<AmplitudeMode> {
        match self {
            ModeArg::Euclidean => vec![AmplitudeMode::Euclidean],
            ModeArg::Depth => vec![AmplitudeMode::DepthOnly],
            ModeArg::Both => AmplitudeMode::ALL.to_vec(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum AggregationArg {
    MeansOfMeans,
    Pooled,
}

impl From<AggregationArg> for Aggregation {
    fn from(a: AggregationArg) -> Self {
        match a {
            AggregationArg::MeansOfMeans => Aggregation::MeansOfMeans,
            AggregationArg::Pooled => Aggregation::Pooled,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    Table,
    Records,
}

#[derive(Debug, clap::Args)]
pub struct AnalysisArgs {
    /// Trial log (CSV).
    #[arg(long)]
    pub input: PathBuf,
    /// Destination file; stdout when omitted.
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "euclidean")]
    pub amplitude_mode: ModeArg,
    #[arg(long, value_enum, default_value = "means-of-means")]
    pub aggregation: AggregationArg,
    #[arg(long, value_enum, default_value = "table")]
    pub format: FormatArg,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a synthetic trial log.
    Simulate {
        /// TOML simulation config; preset defaults apply without one.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Overrides the seed in the config.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        output: PathBuf,
    },
    /// Fit one model (or all) on each condition group.
    Fit {
        #[command(flatten)]
        args: AnalysisArgs,
        #[arg(long)]
        model: Option<String>,
    },
    /// Fit and rank all four models on each condition group.
    Compare {
        #[command(flatten)]
        args: AnalysisArgs,
    },
    /// Effective throughput per technique and posture (JSON lines).
    Throughput {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "euclidean")]
        amplitude_mode: ModeArg,
        /// Accept groups that do not cover every amplitude × width cell.
        #[arg(long)]
        allow_partial_grid: bool,
    },
    /// Descriptive statistics, model comparison and throughput in one text report.
    Report {
        #[command(flatten)]
        args: AnalysisArgs,
        #[arg(long)]
        allow_partial_grid: bool,
    },
    /// Check a log against the per-trial invariants.
    Validate {
        #[arg(long)]
        input: PathBuf,
    },
}

/// Parses `args` (program name first), runs, and returns the exit code.
/// Results go to `stdout` unless an output file is given; diagnostics go to
/// `stderr`.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = write!(stderr, "{e}");
            return if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
        }
    };
    match execute(cli.command, stdout) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            exit_code(&e)
        }
    }
}

fn read_text(path: &Path) -> Result<String, Error> {
    std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn emit(output: Option<&Path>, text: &str, stdout: &mut dyn Write) -> Result<(), Error> {
    match output {
        Some(p) => std::fs::write(p, text).map_err(|e| Error::Io(format!("{}: {e}", p.display()))),
        None => stdout.write_all(text.as_bytes()).map_err(|e| Error::Io(e.to_string())),
    }
}

/// Reads a log and rejects it if any trial breaks an invariant. Line
/// numbers count the header as line 1.
pub fn load_valid_log(path: &Path) -> Result<Vec<Trial>, Error> {
    let trials = read_log_str(&read_text(path)?)?;
    let report = validate_log(&trials);
    if let Some(v) = report.violations.first() {
        return Err(Error::MalformedLog { line: v.index + 2, message: v.kind.describe().to_string() });
    }
    Ok(trials)
}

fn comparison_reports(trials: &[Trial], args: &AnalysisArgs) -> Result<Vec<ComparisonReport>, Error> {
    let cells = group_by_condition(trials);
    let mut reports = Vec::new();
    for mode in args.amplitude_mode.modes() {
        let options = ComparisonOptions {
            amplitude_mode: mode,
            aggregation: args.aggregation.into(),
            ctd_reference_m: START_CUBE_DEPTH_M,
        };
        reports.extend(run_group_suite(&cells, &options)?);
    }
    Ok(reports)
}

fn render_reports(reports: &[ComparisonReport], format: FormatArg) -> Result<String, Error> {
    match format {
        FormatArg::Table => Ok(comparison::render_table(reports)),
        FormatArg::Records => comparison::render_records(reports),
    }
}

fn fit_table(reports: &[ComparisonReport], models: &[ModelKind]) -> String {
    let mut out = String::from("model,group,amplitude_mode,n,equation,r2,adj_r2,f_stat,p_value\n");
    for r in reports {
        for &m in models {
            let e = r.entry(m);
            let FitResult { r2, adj_r2, f_stat, p_value, n, .. } = e.fit;
            let _ = writeln!(
                out,
                "{},{},{},{n},\"{}\",{r2:.4},{adj_r2:.4},{f_stat:.3},{p_value:.4}",
                m.name(),
                r.group_label,
                r.amplitude_mode,
                comparison::render_equation(m, &e.fit.coefficients, 4)
            );
        }
    }
    out
}

fn execute(command: Command, stdout: &mut dyn Write) -> Result<(), Error> {
    match command {
        Command::Simulate { config, seed, output } => {
            let (preset, spec) = match config {
                Some(path) => {
                    let c = parse_sim_config(&read_text(&path)?, seed)?;
                    (c.preset, c.spec)
                }
                None => {
                    let seed = seed.ok_or_else(|| Error::Config("missing required field 'seed'".into()))?;
                    (Preset::Realistic, StudySpec::preset(Preset::Realistic, seed, 20))
                }
            };
            let trials = generate_study(&spec)?;
            emit(Some(&output), &write_log_string(&trials)?, stdout)?;
            writeln!(
                stdout,
                "simulated {} trials (seed {}, preset {}) -> {}",
                trials.len(),
                spec.seed,
                preset.name(),
                output.display()
            )
            .map_err(|e| Error::Io(e.to_string()))
        }
        Command::Fit { args, model } => {
            let models = match model {
                Some(m) => vec![m.parse()?],
                None => ModelKind::ALL.to_vec(),
            };
            let trials = load_valid_log(&args.input)?;
            let reports = comparison_reports(&trials, &args)?;
            let text = match args.format {
                FormatArg::Table => fit_table(&reports, &models),
                FormatArg::Records => {
                    let filtered: Vec<ComparisonReport> = reports
                        .into_iter()
                        .map(|mut r| {
                            r.entries.retain(|e| models.contains(&e.kind));
                            r
                        })
                        .collect();
                    comparison::render_records(&filtered)?
                }
            };
            emit(args.output.as_deref(), &text, stdout)
        }
        Command::Compare { args } => {
            let trials = load_valid_log(&args.input)?;
            let reports = comparison_reports(&trials, &args)?;
            emit(args.output.as_deref(), &render_reports(&reports, args.format)?, stdout)
        }
        Command::Throughput { input, output, amplitude_mode, allow_partial_grid } => {
            let trials = load_valid_log(&input)?;
            let mut text = String::new();
            for mode in amplitude_mode.modes() {
                let opts = ThroughputOptions { amplitude_mode: mode, allow_partial: allow_partial_grid };
                text += &render_json_lines(&throughput_by_group(&trials, &opts)?)?;
            }
            emit(output.as_deref(), &text, stdout)
        }
        Command::Report { args, allow_partial_grid } => {
            let trials = load_valid_log(&args.input)?;
            let text = full_report(&trials, &args, allow_partial_grid)?;
            emit(args.output.as_deref(), &text, stdout)
        }
        Command::Validate { input } => {
            let trials = read_log_str(&read_text(&input)?)?;
            let report = validate_log(&trials);
            let mut text = String::new();
            for v in &report.violations {
                let _ = writeln!(text, "line {}: {}", v.index + 2, v.kind.describe());
            }
            let _ = writeln!(text, "{} trials, {} violations", trials.len(), report.violations.len());
            emit(None, &text, stdout)?;
            match report.first_offending_index() {
                Some(i) => Err(Error::MalformedLog {
                    line: i + 2,
                    message: format!("{} invariant violation(s)", report.violations.len()),
                }),
                None => Ok(()),
            }
        }
    }
}

fn full_report(trials: &[Trial], args: &AnalysisArgs, allow_partial: bool) -> Result<String, Error> {
    let cells = group_by_condition(trials);
    let mut out = String::new();
    let _ = writeln!(out, "Trials: {}", trials.len());
    let per_group = collapse_over(
        &cells,
        &[Factor::Posture].into_iter().collect(),
        args.aggregation.into(),
    )?;
    let by_tech = collapse_over(&per_group, &[Factor::Technique].into_iter().collect(), args.aggregation.into())?;
    let _ = writeln!(out, "\nMean movement time by target (all techniques and postures)");
    let _ = writeln!(out, "{:<8} {:<8} {:<8} {:>8} {:>8} {:>8}", "W", "D", "H", "MT", "SD", "errors");
    for s in by_tech.values() {
        let _ = writeln!(
            out,
            "{:<8} {:<8} {:<8} {:>8.3} {:>8.3} {:>8.3}",
            s.key.width_m(),
            s.key.distance_m(),
            s.key.height_m(),
            s.mean_mt_s,
            s.sd_mt_s,
            s.error_rate
        );
    }

    let _ = writeln!(out, "\nMean movement time by technique");
    for label in &COMPARISON_GROUPS[..5] {
        let group = comparison::group_cells(&cells, label, args.aggregation.into())?;
        if group.is_empty() {
            continue;
        }
        let mean = group.values().map(|s| s.mean_mt_s).sum::<f64>() / group.len() as f64;
        let _ = writeln!(out, "{label:<6} {mean:.3} s");
    }

    let reports = comparison_reports(trials, args)?;
    let _ = writeln!(out, "\nModel comparison");
    out += &render_reports(&reports, args.format)?;

    let _ = writeln!(out, "\nThroughput (bits/s)");
    for mode in args.amplitude_mode.modes() {
        let opts = ThroughputOptions { amplitude_mode: mode, allow_partial };
        let summaries = throughput_by_group(trials, &opts)?;
        for (t, tp) in technique_throughput(&summaries) {
            let _ = writeln!(out, "{:<6} {:<10} {tp:.3}", t.code(), mode.label());
        }
    }
    Ok(out)
}
