//! `anova-bf` command-line front end.
//!
//! [`run`] takes the argument list and two writers so the whole CLI can be
//! driven in-process; `main` only wires it to the real stdio.

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufReader, Read, Write};
use std::path::{Path, PathBuf};

use anova_bf::sim::{format_sig, render_report_with_precision, run_simulation_with_threads};
use anova_bf::summary::DEFAULT_P_TOLERANCE;
use anova_bf::{
    bf01_from_summary, bf10_from_bf01, effect_summary, parse_batch_csv,
    parse_summary, two_way_anova, AnovaSummary, BayesFactorResult, Error, FactorialDataset,
    NConvention, ReportFormat, SimulationConfig, Warning,
};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

/// Process exit codes. These values are stable.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitStatus {
    Success = 0,
    Failure = 1,
    Usage = 2,
    PartialBatch = 3,
}

impl ExitStatus {
    pub fn code(self) -> i32 {
        self as i32
    }
}

#[derive(Debug)]
pub struct CliError {
    pub status: ExitStatus,
    pub message: String,
}

impl CliError {
    fn usage(message: impl Into<String>) -> Self {
        CliError {
            status: ExitStatus::Usage,
            message: message.into(),
        }
    }

    fn failure(message: impl Into<String>) -> Self {
        CliError {
            status: ExitStatus::Failure,
            message: message.into(),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::failure(e.to_string())
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::failure(e.to_string())
    }
}

type CliResult<T> = Result<T, CliError>;

#[derive(Debug, Parser)]
#[command(name = "anova-bf", version, about = "BIC Bayes factors for ANOVA effects")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Bayes factor for one reported effect.
    Bf(BfArgs),
    /// Bayes factors for every row of a summary CSV.
    Batch(BatchArgs),
    /// Balanced ANOVA on raw `a_level,b_level,value` data, with Bayes factors.
    Anova(AnovaArgs),
    /// Monte Carlo simulation over factorial designs.
    Simulate(SimulateArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Orientation {
    #[value(name = "01")]
    Null,
    #[value(name = "10")]
    Alternative,
}

#[derive(Debug, Args)]
struct BfArgs {
    /// Summary string such as "F(1,17)=1.75, p=0.20".
    #[arg(long, conflicts_with_all = ["f", "df1", "df2"])]
    summary: Option<String>,
    #[arg(long)]
    f: Option<f64>,
    #[arg(long)]
    df1: Option<u32>,
    #[arg(long)]
    df2: Option<u32>,
    /// Number of independent observations.
    #[arg(long)]
    n: Option<u64>,
    #[arg(long, value_enum, default_value = "01")]
    direction: Orientation,
    #[arg(long)]
    json: bool,
    /// Significant digits in human-readable output.
    #[arg(long, default_value_t = 6)]
    precision: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum TableFormat {
    Csv,
    Json,
}

#[derive(Debug, Args)]
struct BatchArgs {
    #[arg(long)]
    input: PathBuf,
    /// Output path, `-` for stdout.
    #[arg(long, default_value = "-")]
    output: String,
    /// Where failed rows are reported, `-` for stderr.
    #[arg(long, default_value = "-")]
    errors: String,
    #[arg(long, value_enum, default_value = "csv")]
    format: TableFormat,
}

#[derive(Debug, Args)]
struct AnovaArgs {
    #[arg(long)]
    input: PathBuf,
    /// `total`, `cell` or an explicit integer.
    #[arg(long, default_value = "total")]
    n_convention: String,
    #[arg(long)]
    json: bool,
    #[arg(long, default_value_t = 6)]
    precision: usize,
}

#[derive(Debug, Args)]
struct SimulateArgs {
    /// JSON configuration; flags given alongside override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_delimiter = ',')]
    cell_sizes: Option<Vec<usize>>,
    #[arg(long, value_delimiter = ',')]
    g_values: Option<Vec<f64>>,
    #[arg(long)]
    reps: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// `total`, `cell` or an explicit integer.
    #[arg(long)]
    n_convention: Option<String>,
    #[arg(long)]
    levels_a: Option<usize>,
    #[arg(long)]
    levels_b: Option<usize>,
    #[arg(long)]
    error_sd: Option<f64>,
    #[arg(long)]
    sum_to_zero: bool,
    #[arg(long, default_value = "markdown")]
    format: String,
    #[arg(long)]
    threads: Option<usize>,
    #[arg(long, default_value = "-")]
    output: String,
    #[arg(long, default_value_t = 6)]
    precision: usize,
}

/// Runs the CLI on `args` (including the program name).
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> ExitStatus
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = write!(err, "{}", e.render());
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{}", e.render());
                    ExitStatus::Success
                }
                _ => ExitStatus::Usage,
            };
        }
    };
    let result = match cli.command {
        Command::Bf(a) => cmd_bf(&a, out),
        Command::Batch(a) => cmd_batch(&a, out, err),
        Command::Anova(a) => cmd_anova(&a, out),
        Command::Simulate(a) => cmd_simulate(&a, out),
    };
    match result {
        Ok(status) => status,
        Err(e) => {
            let _ = writeln!(err, "error: {}", e.message);
            e.status
        }
    }
}

#[derive(Serialize)]
struct BfJson<'a> {
    f: f64,
    df1: u32,
    df2: u32,
    n: u64,
    direction: &'a str,
    bf01: f64,
    bf10: f64,
    log_bf10: f64,
    category: String,
    warnings: Vec<Warning>,
}

fn summary_from_args(a: &BfArgs) -> CliResult<(AnovaSummary, Vec<Warning>)> {
    if let Some(text) = &a.summary {
        let reported = parse_summary(text)?;
        if reported.n.is_none() && a.n.is_none() {
            return Err(CliError::usage(format!(
                "{}: the summary has no n; pass --n",
                Warning::NMissing
            )));
        }
        let reported = anova_bf::ReportedSummary {
            n: reported.n.or(a.n),
            ..reported
        };
        let warnings = reported.warnings(DEFAULT_P_TOLERANCE);
        let summary = reported.into_summary(None)?;
        return Ok((summary, warnings));
    }
    let (Some(f), Some(df1), Some(df2)) = (a.f, a.df1, a.df2) else {
        return Err(CliError::usage(
            "give either --summary or all of --f, --df1, --df2",
        ));
    };
    let Some(n) = a.n else {
        return Err(CliError::usage(format!(
            "{}: --n is required",
            Warning::NMissing
        )));
    };
    let reported = anova_bf::ReportedSummary {
        f_value: f,
        df1,
        df2,
        n: Some(n),
        reported_p: None,
    };
    let warnings = reported.warnings(DEFAULT_P_TOLERANCE);
    Ok((reported.into_summary(None)?, warnings))
}

fn cmd_bf(a: &BfArgs, out: &mut dyn Write) -> CliResult<ExitStatus> {
    let (summary, warnings) = summary_from_args(a)?;
    let result = bf01_from_summary(&summary);
    if a.json {
        let obj = BfJson {
            f: summary.f_value(),
            df1: summary.df1(),
            df2: summary.df2(),
            n: summary.n(),
            direction: match a.direction {
                Orientation::Null => "01",
                Orientation::Alternative => "10",
            },
            bf01: result.bf01,
            bf10: result.bf10,
            log_bf10: result.log_bf10,
            category: result.category.to_string(),
            warnings,
        };
        serde_json::to_writer_pretty(&mut *out, &obj).map_err(io::Error::from)?;
        writeln!(out)?;
        return Ok(ExitStatus::Success);
    }

    let p = a.precision;
    writeln!(
        out,
        "F({},{}) = {}, n = {}",
        summary.df1(),
        summary.df2(),
        summary.f_value(),
        summary.n()
    )?;
    let lines = human_lines(&result, a.direction, p);
    for line in lines {
        writeln!(out, "{line}")?;
    }
    writeln!(out, "evidence: {}", result.category)?;
    if !warnings.is_empty() {
        let codes: Vec<&str> = warnings.iter().map(|w| w.code()).collect();
        writeln!(out, "warnings: {}", codes.join(", "))?;
    }
    Ok(ExitStatus::Success)
}

fn human_lines(r: &BayesFactorResult, direction: Orientation, digits: usize) -> Vec<String> {
    let bf01 = format!("BF01 = {}", format_sig(r.bf01, digits));
    let bf10 = format!("BF10 = {}", format_sig(r.bf10, digits));
    let log = format!("log BF10 = {}", format_sig(r.log_bf10, digits));
    match direction {
        Orientation::Null => vec![bf01, bf10, log],
        Orientation::Alternative => {
            let swapped = bf10_from_bf01(r);
            vec![
                bf10,
                bf01,
                log,
                format!("log BF01 = {}", format_sig(swapped.log_bf10, digits)),
            ]
        }
    }
}

fn open_input(path: &Path) -> CliResult<BufReader<File>> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|e| CliError::failure(format!("cannot read {}: {e}", path.display())))
}

fn with_output<F>(target: &str, out: &mut dyn Write, f: F) -> CliResult<()>
where
    F: FnOnce(&mut dyn Write) -> CliResult<()>,
{
    if target == "-" {
        f(out)
    } else {
        let mut file = File::create(target)
            .map_err(|e| CliError::failure(format!("cannot write {target}: {e}")))?;
        f(&mut file)?;
        file.flush()?;
        Ok(())
    }
}

#[derive(Serialize)]
struct BatchRow {
    line: u64,
    label: Option<String>,
    f: f64,
    df1: u32,
    df2: u32,
    n: u64,
    bf01: f64,
    bf10: f64,
    log_bf10: f64,
    category: String,
    warnings: Vec<Warning>,
}

fn csv_escape(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn cmd_batch(a: &BatchArgs, out: &mut dyn Write, err: &mut dyn Write) -> CliResult<ExitStatus> {
    let records = parse_batch_csv(open_input(&a.input)?)?;
    let mut rows = Vec::new();
    let mut failures = Vec::new();
    for rec in records {
        match rec {
            Ok(rec) => {
                let r = bf01_from_summary(&rec.summary);
                let warnings = rec.warnings.clone();
                rows.push(BatchRow {
                    line: rec.source_line,
                    label: rec.summary.label().map(str::to_string),
                    f: rec.summary.f_value(),
                    df1: rec.summary.df1(),
                    df2: rec.summary.df2(),
                    n: rec.summary.n(),
                    bf01: r.bf01,
                    bf10: r.bf10,
                    log_bf10: r.log_bf10,
                    category: r.category.to_string(),
                    warnings,
                });
            }
            Err(e) => failures.push(e),
        }
    }

    with_output(&a.output, out, |w| {
        match a.format {
            TableFormat::Json => {
                serde_json::to_writer_pretty(&mut *w, &rows).map_err(io::Error::from)?;
                writeln!(w)?;
            }
            TableFormat::Csv => {
                writeln!(w, "line,label,f,df1,df2,n,bf01,bf10,log_bf10,category,warnings")?;
                for r in &rows {
                    let codes: Vec<&str> = r.warnings.iter().map(|w| w.code()).collect();
                    writeln!(
                        w,
                        "{},{},{},{},{},{},{},{},{},{},{}",
                        r.line,
                        csv_escape(r.label.as_deref().unwrap_or("")),
                        r.f,
                        r.df1,
                        r.df2,
                        r.n,
                        r.bf01,
                        r.bf10,
                        r.log_bf10,
                        r.category,
                        codes.join(";"),
                    )?;
                }
            }
        }
        Ok(())
    })?;

    if !failures.is_empty() {
        let write_errors = |w: &mut dyn Write| -> CliResult<()> {
            writeln!(w, "line,column,message")?;
            for e in &failures {
                match e {
                    Error::Row {
                        line,
                        column,
                        message,
                    } => writeln!(w, "{line},{},{}", csv_escape(column), csv_escape(message))?,
                    other => writeln!(w, ",,{}", csv_escape(&other.to_string()))?,
                }
            }
            Ok(())
        };
        if a.errors == "-" {
            write_errors(err)?;
        } else {
            with_output(&a.errors, err, write_errors)?;
        }
    }

    Ok(match (rows.is_empty(), failures.is_empty()) {
        (_, true) => ExitStatus::Success,
        (false, false) => ExitStatus::PartialBatch,
        (true, false) => ExitStatus::Failure,
    })
}

#[derive(Serialize)]
struct AnovaEffectJson {
    effect: String,
    ss: f64,
    df1: u32,
    df2: u32,
    f: f64,
    n: u64,
    bf01: f64,
    bf10: f64,
    log_bf10: f64,
    category: String,
}

#[derive(Serialize)]
struct AnovaJson {
    effects: Vec<AnovaEffectJson>,
    ss_error: f64,
    df_error: u32,
    total_ss: f64,
    n_total: u64,
    n_convention: String,
}

fn cmd_anova(a: &AnovaArgs, out: &mut dyn Write) -> CliResult<ExitStatus> {
    let convention: NConvention = a
        .n_convention
        .parse()
        .map_err(|e: Error| CliError::usage(e.to_string()))?;
    let data = FactorialDataset::read_long_csv(open_input(&a.input)?)?;
    let table = two_way_anova(&data)?;
    let mut effects = Vec::new();
    for row in &table.effects {
        let s = effect_summary(&table, row.effect, convention)?;
        let r = bf01_from_summary(&s);
        effects.push(AnovaEffectJson {
            effect: row.effect.to_string(),
            ss: row.ss,
            df1: row.df,
            df2: table.df_error,
            f: row.f,
            n: s.n(),
            bf01: r.bf01,
            bf10: r.bf10,
            log_bf10: r.log_bf10,
            category: r.category.to_string(),
        });
    }
    if a.json {
        let obj = AnovaJson {
            effects,
            ss_error: table.ss_error,
            df_error: table.df_error,
            total_ss: table.total_ss,
            n_total: table.n_total,
            n_convention: convention.to_string(),
        };
        serde_json::to_writer_pretty(&mut *out, &obj).map_err(io::Error::from)?;
        writeln!(out)?;
        return Ok(ExitStatus::Success);
    }
    let d = a.precision;
    writeln!(out, "effect\tSS\tdf\tF\tn\tBF01\tBF10\tevidence")?;
    for e in &effects {
        writeln!(
            out,
            "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
            e.effect,
            format_sig(e.ss, d),
            e.df1,
            format_sig(e.f, d),
            e.n,
            format_sig(e.bf01, d),
            format_sig(e.bf10, d),
            e.category
        )?;
    }
    writeln!(
        out,
        "error\t{}\t{}",
        format_sig(table.ss_error, d),
        table.df_error
    )?;
    writeln!(out, "total\t{}\t{}", format_sig(table.total_ss, d), table.n_total - 1)?;
    Ok(ExitStatus::Success)
}

fn read_config(path: &Path) -> CliResult<SimulationConfig> {
    let mut text = String::new();
    File::open(path)
        .and_then(|mut f| f.read_to_string(&mut text))
        .map_err(|e| CliError::usage(format!("cannot read config {}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| CliError::usage(format!("invalid config {}: {e}", path.display())))
}

fn simulation_config(a: &SimulateArgs) -> CliResult<SimulationConfig> {
    let mut cfg = match &a.config {
        Some(path) => read_config(path)?,
        None => SimulationConfig::default_grid(0),
    };
    if let Some(v) = &a.cell_sizes {
        cfg.cell_sizes = v.clone();
    }
    if let Some(v) = &a.g_values {
        cfg.effect_variances = v.clone();
    }
    if let Some(v) = a.reps {
        cfg.replications = v;
    }
    if let Some(v) = a.seed {
        cfg.master_seed = v;
    }
    if let Some(v) = &a.n_convention {
        cfg.n_convention = v.parse().map_err(|e: Error| CliError::usage(e.to_string()))?;
    }
    if let Some(v) = a.levels_a {
        cfg.levels_a = v;
    }
    if let Some(v) = a.levels_b {
        cfg.levels_b = v;
    }
    if let Some(v) = a.error_sd {
        cfg.error_sd = v;
    }
    if a.sum_to_zero {
        cfg.sum_to_zero = true;
    }
    cfg.validate()
        .map_err(|e| CliError::usage(format!("invalid simulation config: {e}")))?;
    Ok(cfg)
}

fn cmd_simulate(a: &SimulateArgs, out: &mut dyn Write) -> CliResult<ExitStatus> {
    let cfg = simulation_config(a)?;
    let format: ReportFormat = a
        .format
        .parse()
        .map_err(|e: Error| CliError::usage(e.to_string()))?;
    if a.threads == Some(0) {
        return Err(CliError::usage("--threads must be at least 1"));
    }
    let results = run_simulation_with_threads(&cfg, a.threads)?;
    let report = render_report_with_precision(&results, format, a.precision);
    with_output(&a.output, out, |w| {
        w.write_all(report.as_bytes())?;
        Ok(())
    })?;
    Ok(ExitStatus::Success)
}
