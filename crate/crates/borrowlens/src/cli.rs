//! The `borrowlens` command.
//!
//! Exit codes: 0 success (for `check`, a clean build), 1 `check` found
//! errors, 2 usage or tool failure.

use std::collections::BTreeMap;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use borrowlens_core::interpret::{Skip, SkipReason};
use borrowlens_core::layout::Geometry;
use borrowlens_core::render::{render_html_report, render_plan};
use borrowlens_core::{interpret_all, BuildReport, Interpretation, VisualizationPlan};
use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::build::{self, BuildError, BuildRunner};
use crate::config::{Config, Flags};
use crate::ledger;
use crate::report;

#[derive(Debug, Parser)]
#[command(name = "borrowlens", version, about = "Diagrams for Rust ownership and lifetime errors")]
pub struct Cli {
    #[command(flatten)]
    pub flags: Flags,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build, then write one SVG per diagram and one HTML page per file.
    Check,
    /// Build, then print diagrams for one file (or all files) as JSON.
    Plan {
        /// Source file; relative paths are tried against the workspace first.
        #[arg(long)]
        file: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = PlanFormat::Json)]
        format: PlanFormat,
    },
    /// Build and append a snapshot of its errors to the ledger.
    Record,
    /// Print resolution sessions found in the ledger as JSON lines.
    Analyze,
    /// Print resolution cost per error code.
    Report {
        #[arg(long, value_enum, default_value_t = ReportFormat::Table)]
        format: ReportFormat,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PlanFormat {
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ReportFormat {
    Csv,
    Table,
    /// One `code,arc_seconds` row per session.
    Violin,
}

pub const PLAN_FORMAT_VERSION: u32 = 1;

/// Output of `plan`.
#[derive(Debug, Serialize)]
pub struct PlanOutput {
    pub format_version: u32,
    pub plans: Vec<PlanEntry>,
    pub skipped: Vec<Skip>,
}

#[derive(Debug, Serialize)]
pub struct PlanEntry {
    pub id: String,
    pub plan: VisualizationPlan,
    pub geometry: Geometry,
    pub svg: String,
}

/// Parses the process arguments and runs the command.
pub fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn"))
        .format_timestamp(None)
        .init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

pub fn run(cli: Cli) -> Result<u8> {
    let config = Config::resolve(&cli.flags)?;
    let runner = BuildRunner::from_env();
    match cli.command {
        Command::Check => cmd_check(&config, &runner),
        Command::Plan { file, format: PlanFormat::Json } => cmd_plan(&config, &runner, file.as_deref()),
        Command::Record => cmd_record(&config, &runner),
        Command::Analyze => cmd_analyze(&config),
        Command::Report { format } => cmd_report(&config, format),
    }
}

fn interpret_report(config: &Config, report: &BuildReport) -> Interpretation {
    interpret_all(report, &config.registry, |file| build::load_source(&config.workspace, file))
}

fn describe(skip: &Skip) -> String {
    let code = skip.code.as_deref().unwrap_or("error without code");
    let at = match (&skip.file, skip.line) {
        (Some(f), Some(l)) => format!("{f}:{l}"),
        (Some(f), None) => f.clone(),
        _ => "unknown location".into(),
    };
    let why = match &skip.reason {
        SkipReason::NoCode => "not visualized".to_string(),
        SkipReason::UnsupportedCode => "unsupported code".to_string(),
        SkipReason::PatternMismatch { detail } => format!("unrecognized message: {detail}"),
    };
    format!("skipped {code} at {at}: {why}")
}

/// File-name stem for a source path: `src/main.rs` becomes `src_main.rs`.
fn stem(file: &str) -> String {
    file.chars().map(|c| if matches!(c, '/' | '\\' | ':') { '_' } else { c }).collect()
}

pub fn cmd_check(config: &Config, runner: &BuildRunner) -> Result<u8> {
    let report = runner.run(&config.workspace)?;
    if report.errors().next().is_none() {
        eprintln!("build clean");
        return Ok(0);
    }
    let interp = interpret_report(config, &report);
    let mut by_file: BTreeMap<&str, Vec<VisualizationPlan>> = BTreeMap::new();
    for plan in &interp.plans {
        by_file.entry(plan.file.as_str()).or_default().push(plan.clone());
    }
    if !by_file.is_empty() {
        std::fs::create_dir_all(&config.output_dir)
            .with_context(|| format!("creating {}", config.output_dir.display()))?;
    }
    let mut stdout = io::stdout().lock();
    let mut written = 0usize;
    for (file, plans) in &by_file {
        let source = build::load_source(&config.workspace, file).unwrap_or_default();
        let stem = stem(file);
        for (i, plan) in plans.iter().enumerate() {
            let rendered = render_plan(plan, &source, &config.render)?;
            let path = config.output_dir.join(format!("{stem}-{}-{}.svg", i + 1, plan.code));
            write_file(&path, rendered.svg.text.as_bytes())?;
            writeln!(stdout, "{}", path.display())?;
            written += 1;
        }
        let html = render_html_report(&source, plans, &config.render)?;
        let path = config.output_dir.join(format!("{stem}.html"));
        write_file(&path, html.as_bytes())?;
        writeln!(stdout, "{}", path.display())?;
    }
    for skip in &interp.skipped {
        eprintln!("{}", describe(skip));
    }
    eprintln!(
        "{} error(s): {written} diagram(s) in {} file(s), {} skipped",
        report.errors().count(),
        by_file.len(),
        interp.skipped.len()
    );
    Ok(1)
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    std::fs::write(path, bytes).with_context(|| format!("writing {}", path.display()))
}

/// Resolves `--file` to an absolute path: relative paths are tried against
/// the workspace, then the current directory.
fn resolve_file(workspace: &Path, file: &Path) -> Result<PathBuf> {
    let candidate = if file.is_relative() && workspace.join(file).exists() {
        workspace.join(file)
    } else {
        std::path::absolute(file)?
    };
    Ok(candidate.canonicalize().unwrap_or(candidate))
}

fn same_file(workspace: &Path, span_file: &str, target: &Path) -> bool {
    let p = workspace.join(span_file);
    p.canonicalize().unwrap_or(p) == target
}

pub fn cmd_plan(config: &Config, runner: &BuildRunner, file: Option<&Path>) -> Result<u8> {
    let report = runner.run(&config.workspace)?;
    let workspace = build::resolve_workspace(&config.workspace)?;
    let target = file.map(|f| resolve_file(&workspace, f)).transpose()?;
    let keep = |span_file: &str| target.as_ref().is_none_or(|t| same_file(&workspace, span_file, t));

    let interp = interpret_report(config, &report);
    let mut sources: BTreeMap<&str, String> = BTreeMap::new();
    let mut plans = Vec::new();
    for plan in interp.plans.iter().filter(|p| keep(&p.file)) {
        let source = sources
            .entry(plan.file.as_str())
            .or_insert_with(|| build::load_source(&workspace, &plan.file).unwrap_or_default());
        let r = render_plan(plan, source, &config.render)?;
        plans.push(PlanEntry {
            id: format!("plan-{}", plans.len()),
            plan: r.plan,
            geometry: r.geometry,
            svg: r.svg.text,
        });
    }
    let skipped: Vec<Skip> =
        interp.skipped.into_iter().filter(|s| s.file.as_deref().is_none_or(keep)).collect();
    for s in &skipped {
        eprintln!("{}", describe(s));
    }
    eprintln!("{} plan(s)", plans.len());

    let out = PlanOutput { format_version: PLAN_FORMAT_VERSION, plans, skipped };
    let mut stdout = io::stdout().lock();
    serde_json::to_writer(&mut stdout, &out)?;
    stdout.write_all(b"\n")?;
    stdout.flush()?;
    Ok(0)
}

pub fn cmd_record(config: &Config, runner: &BuildRunner) -> Result<u8> {
    let report = match runner.run(&config.workspace) {
        Ok(r) => r,
        Err(BuildError::Failed { workspace, timestamp, stderr }) => {
            // Kept so the gap is visible; analysis skips such builds.
            log::warn!("build failed without reporting errors; recording it as indeterminate\n{stderr}");
            BuildReport {
                timestamp,
                workspace: workspace.to_string_lossy().into_owned(),
                success: false,
                diagnostics: Vec::new(),
            }
        }
        Err(e) => return Err(e.into()),
    };
    let record = ledger::append(&config.ledger_path, &report)?;
    eprintln!(
        "recorded build {} of {} with {} error(s) in {}",
        record.seq,
        record.workspace,
        record.errors.len(),
        config.ledger_path.display()
    );
    let mut stdout = io::stdout().lock();
    serde_json::to_writer(&mut stdout, &record)?;
    stdout.write_all(b"\n")?;
    Ok(0)
}

fn load_analysis(config: &Config) -> Result<(ledger::LedgerContents, report::Analysis)> {
    let contents = ledger::read_ledger(&config.ledger_path)?;
    let analysis = report::analyze(&contents, config.cap_seconds)?;
    Ok((contents, analysis))
}

pub fn cmd_analyze(config: &Config) -> Result<u8> {
    let (_, analysis) = load_analysis(config)?;
    let mut stdout = io::stdout().lock();
    for s in &analysis.sessions {
        serde_json::to_writer(&mut stdout, s)?;
        stdout.write_all(b"\n")?;
    }
    stdout.flush()?;
    for u in &analysis.unresolved {
        eprintln!(
            "unresolved: {} in {} ({}) since build {} of {}",
            u.code, u.file, u.key, u.first_build, u.workspace
        );
    }
    Ok(0)
}

pub fn cmd_report(config: &Config, format: ReportFormat) -> Result<u8> {
    let (contents, analysis) = load_analysis(config)?;
    let rows = report::cost_rows(&analysis);
    let descriptions = contents.descriptions();
    let mut stdout = io::stdout().lock();
    match format {
        ReportFormat::Csv => report::write_csv(&rows, &descriptions, &mut stdout)?,
        ReportFormat::Table => stdout.write_all(report::format_table(&rows, &descriptions).as_bytes())?,
        ReportFormat::Violin => report::write_violin_csv(&analysis.sessions, &mut stdout)?,
    }
    stdout.flush()?;
    Ok(0)
}
