//! Command-line definitions and command implementations.

use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use trapscan_core::analysis::{analyze, DEFAULT_TARPIT_CEILING};
use trapscan_core::issues::AppProfile;
use trapscan_core::simulator::{
    builtin_model, builtin_profile, evaluate_detection, simulate, AppModel, ScenarioName, ScenarioSpec,
};
use trapscan_core::{Fingerprint, TarpitMode, Trace, DEFAULT_D_MAX, DEFAULT_T_MIN_MS};

use crate::io::{file_stem, load_json, load_model, load_trace, to_json, write_json};
use crate::report::{build_reports, rank_reports, select_report_fixes, AnalysisReport, FixConfig, ReportParams};

#[derive(Debug, Parser)]
#[command(name = "trapscan", version, about = "Find space partitions and tarpits in UI-testing traces")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Analyze traces and write one JSON report per trace.
    Analyze(AnalyzeArgs),
    /// Pool regions of several reports per (tool, app) and print the ranking.
    Rank {
        #[arg(required = true)]
        reports: Vec<PathBuf>,
    },
    /// Collect fix directives of the top-ranked regions into a fix config.
    EmitFixes {
        #[arg(required = true)]
        reports: Vec<PathBuf>,
        #[arg(long, default_value_t = 1)]
        top_k: usize,
        /// Output file; standard output when absent.
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// Run the synthetic explorer and write the resulting trace.
    Simulate(SimulateArgs),
    /// Write a builtin model, scenario and profile to a directory.
    Scaffold {
        dir: PathBuf,
        #[arg(long, default_value = "logout")]
        scenario: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Debug, Args)]
pub struct DetectorFlags {
    #[arg(long, default_value_t = DEFAULT_T_MIN_MS)]
    pub t_min_ms: u64,
    #[arg(long, default_value_t = DEFAULT_D_MAX)]
    pub d_max: u32,
    /// Tarpit windows with a higher group/length ratio are not reported.
    #[arg(long, default_value_t = DEFAULT_TARPIT_CEILING)]
    pub tarpit_ceiling: f64,
    /// Search all windows and keep the optimum only if it spans t_min.
    #[arg(long)]
    pub tarpit_unconstrained: bool,
    /// Let several regions jointly cover an issue finding.
    #[arg(long)]
    pub coverage_union: bool,
}

impl DetectorFlags {
    pub fn params(&self, top_k: usize) -> ReportParams {
        ReportParams {
            t_min_ms: self.t_min_ms,
            d_max: self.d_max,
            tarpit_ceiling: self.tarpit_ceiling,
            tarpit_mode: if self.tarpit_unconstrained { TarpitMode::Unconstrained } else { TarpitMode::Constrained },
            coverage_union: self.coverage_union,
            top_k,
        }
    }
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    #[arg(required = true)]
    pub traces: Vec<PathBuf>,
    #[command(flatten)]
    pub detector: DetectorFlags,
    #[arg(long, default_value_t = 1)]
    pub top_k: usize,
    /// App profile with login and ad activities, enables issue detection.
    #[arg(long)]
    pub profile: Option<PathBuf>,
    #[arg(long, default_value = ".")]
    pub out_dir: PathBuf,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// App model JSON.
    #[arg(long, conflicts_with = "builtin", required_unless_present = "builtin")]
    pub model: Option<PathBuf>,
    /// Use the builtin model of a scenario.
    #[arg(long)]
    pub builtin: Option<String>,
    /// Scenario JSON; otherwise built from --builtin, --seed and --duration-ms.
    #[arg(long)]
    pub scenario: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 3_600_000)]
    pub duration_ms: u64,
    #[arg(long, default_value_t = 1000)]
    pub action_period_ms: u64,
    /// Fix config to apply while exploring.
    #[arg(long)]
    pub fixes: Option<PathBuf>,
    /// Trace output file.
    #[arg(long, short)]
    pub out: PathBuf,
    /// Ground-truth output file.
    #[arg(long)]
    pub truth: Option<PathBuf>,
}

/// Failure of a command, split by exit code.
#[derive(Debug)]
pub enum Failure {
    /// Unreadable, malformed or invalid input: exit code 2.
    Input(anyhow::Error),
    /// Anything else, such as an unwritable output: exit code 1.
    Other(anyhow::Error),
}

impl Failure {
    pub fn exit_code(&self) -> u8 {
        match self {
            Failure::Input(_) => 2,
            Failure::Other(_) => 1,
        }
    }

    pub fn error(&self) -> &anyhow::Error {
        match self {
            Failure::Input(e) | Failure::Other(e) => e,
        }
    }
}

fn input<E: Into<anyhow::Error>>(e: E) -> Failure {
    Failure::Input(e.into())
}

fn other<E: Into<anyhow::Error>>(e: E) -> Failure {
    Failure::Other(e.into())
}

type CmdResult = Result<(), Failure>;

pub fn run(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> CmdResult {
    match cli.command {
        Command::Analyze(args) => cmd_analyze(&args, out),
        Command::Rank { reports } => cmd_rank(&reports, out),
        Command::EmitFixes { reports, top_k, out: path } => cmd_emit_fixes(&reports, top_k, path.as_deref(), out),
        Command::Simulate(args) => cmd_simulate(&args, out, err),
        Command::Scaffold { dir, scenario, seed } => cmd_scaffold(&dir, &scenario, seed, out),
    }
}

fn pct(x: f64) -> String {
    format!("{:.4}", x)
}

pub fn cmd_analyze(args: &AnalyzeArgs, out: &mut dyn Write) -> CmdResult {
    let traces: Vec<Trace> = args.traces.iter().map(|p| load_trace(p)).collect::<Result<_, _>>().map_err(input)?;
    let mut ids = std::collections::BTreeSet::new();
    if let Some(dup) = traces.iter().find(|t| !ids.insert(t.trace_id.as_str())) {
        return Err(input(anyhow::anyhow!("trace id `{}` appears more than once", dup.trace_id)));
    }
    let profile: Option<AppProfile> = args.profile.as_deref().map(load_json).transpose().map_err(input)?;
    let params = args.detector.params(args.top_k);
    let reports = build_reports(&traces, &params, profile.as_ref());
    for report in &reports {
        let path = args.out_dir.join(format!("{}.report.json", file_stem(&report.trace_id)));
        write_json(&path, report).with_context(|| format!("writing {}", path.display())).map_err(other)?;
        print_report(report, out).map_err(other)?;
    }
    Ok(())
}

fn print_report(r: &AnalysisReport, out: &mut dyn Write) -> std::io::Result<()> {
    for reg in &r.regions {
        writeln!(
            out,
            "REGION {} rank={} kind={} start={} end={} span_ms={} score={}",
            r.trace_id,
            reg.rank,
            kind_name(&reg.region.kind),
            reg.region.start,
            reg.region.end,
            reg.region.span_ms,
            pct(reg.region.score)
        )?;
    }
    for fix in &r.fixes {
        writeln!(
            out,
            "FIX {} rank={} kind={} screen={} element={}",
            r.trace_id,
            fix.provenance.rank,
            json_name(&fix.kind),
            fix.screen_fingerprint,
            fix.element_path.as_ref().map_or_else(|| "-".into(), |p| p.to_string())
        )?;
    }
    for issue in &r.issues {
        writeln!(
            out,
            "ISSUE {} kind={} start={} end={} span_ms={} covered={}",
            r.trace_id,
            json_name(&issue.finding.kind),
            issue.finding.start,
            issue.finding.end,
            issue.finding.span_ms,
            issue.covered
        )?;
    }
    writeln!(
        out,
        "SUMMARY {} regions={} mean_span_ms={:.0}",
        r.trace_id, r.summary.region_count, r.summary.mean_span_ms
    )
}

/// The snake_case name serde gives a unit enum variant.
fn json_name<T: serde::Serialize>(v: &T) -> String {
    serde_json::to_value(v).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default()
}

fn kind_name(k: &trapscan_core::RegionKind) -> String {
    json_name(k)
}

fn load_reports(paths: &[PathBuf]) -> Result<Vec<AnalysisReport>, Failure> {
    let reports: Vec<AnalysisReport> = paths.iter().map(|p| load_json(p)).collect::<Result<_, _>>().map_err(input)?;
    for (r, p) in reports.iter().zip(paths) {
        if r.schema_version != crate::SCHEMA_VERSION {
            return Err(input(anyhow::anyhow!(
                "{}: unsupported report schema `{}`",
                p.display(),
                r.schema_version
            )));
        }
    }
    Ok(reports)
}

pub fn cmd_rank(paths: &[PathBuf], out: &mut dyn Write) -> CmdResult {
    let reports = load_reports(paths)?;
    let write = |out: &mut dyn Write| -> std::io::Result<()> {
        for (r, _) in rank_reports(&reports) {
            writeln!(
                out,
                "RANK tool={} app={} rank={} trace={} kind={} start={} end={} span_ms={}",
                r.tool,
                r.app,
                r.rank,
                r.region.trace_id,
                kind_name(&r.region.kind),
                r.region.start,
                r.region.end,
                r.region.span_ms
            )?;
        }
        Ok(())
    };
    write(out).map_err(other)
}

pub fn cmd_emit_fixes(paths: &[PathBuf], top_k: usize, path: Option<&Path>, out: &mut dyn Write) -> CmdResult {
    let reports = load_reports(paths)?;
    let config = select_report_fixes(&reports, top_k);
    match path {
        Some(p) => write_json(p, &config).with_context(|| format!("writing {}", p.display())).map_err(other),
        None => out.write_all(to_json(&config).as_bytes()).map_err(other),
    }
}

fn scenario_name(s: &str) -> Result<ScenarioName, Failure> {
    s.parse().map_err(|e: trapscan_core::Error| input(anyhow::anyhow!("{e}")))
}

pub fn cmd_simulate(args: &SimulateArgs, out: &mut dyn Write, err: &mut dyn Write) -> CmdResult {
    let builtin = args.builtin.as_deref().map(scenario_name).transpose()?;
    let model: AppModel = match (&args.model, builtin) {
        (Some(path), _) => load_model(path).map_err(input)?,
        (None, Some(name)) => builtin_model(name),
        (None, None) => return Err(input(anyhow::anyhow!("either --model or --builtin is required"))),
    };
    let spec: ScenarioSpec = match (&args.scenario, builtin) {
        (Some(path), _) => load_json(path).map_err(input)?,
        (None, Some(name)) => ScenarioSpec {
            duration_ms: args.duration_ms,
            action_period_ms: args.action_period_ms,
            ..ScenarioSpec::new(name, args.seed)
        },
        (None, None) => return Err(input(anyhow::anyhow!("--scenario is required with --model"))),
    };
    let fixes: FixConfig = args.fixes.as_deref().map(load_json).transpose().map_err(input)?.unwrap_or_default();

    let known = model.all_fingerprints();
    let unmatched: Vec<Fingerprint> = fixes
        .directives
        .iter()
        .map(|d| d.screen_fingerprint)
        .filter(|fp| !known.contains(fp))
        .collect();
    if !unmatched.is_empty() {
        writeln!(
            err,
            "warning: {} of {} fix directives match no screen of app `{}` and have no effect",
            unmatched.len(),
            fixes.directives.len(),
            model.app
        )
        .map_err(other)?;
    }

    let run = simulate(&model, &spec, &fixes.directives).map_err(input)?;
    write_json(&args.out, &run.trace).with_context(|| format!("writing {}", args.out.display())).map_err(other)?;
    if let Some(path) = &args.truth {
        write_json(path, &run.truth).with_context(|| format!("writing {}", path.display())).map_err(other)?;
    }

    let mut params = ReportParams::default().analysis();
    params.detector.t_min_ms = spec.t_min_ms;
    let analysis = analyze(&run.trace, &params, None);
    let m = evaluate_detection(&run.trace, &analysis.regions, &run.truth);
    let write = |out: &mut dyn Write| -> std::io::Result<()> {
        writeln!(out, "TRACE {} entries={}", run.trace.trace_id, run.trace.len())?;
        writeln!(out, "COVERAGE {} distinct_screens={}", run.trace.trace_id, run.coverage.len())?;
        for t in &run.truth.regions {
            writeln!(out, "TRUTH {} kind={} start={} end={}", run.trace.trace_id, json_name(&t.kind), t.start, t.end)?;
        }
        writeln!(
            out,
            "METRICS {} precision={} recall={} mean_overlap={}",
            run.trace.trace_id,
            pct(m.precision),
            pct(m.recall),
            pct(m.mean_overlap)
        )
    };
    write(out).map_err(other)
}

pub fn cmd_scaffold(dir: &Path, scenario: &str, seed: u64, out: &mut dyn Write) -> CmdResult {
    let name = scenario_name(scenario)?;
    let files = [
        ("model.json", to_json(&builtin_model(name))),
        ("scenario.json", to_json(&ScenarioSpec::new(name, seed))),
        ("profile.json", to_json(&builtin_profile(name))),
    ];
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display())).map_err(other)?;
    for (file, content) in files {
        let path = dir.join(file);
        std::fs::write(&path, content).with_context(|| format!("writing {}", path.display())).map_err(other)?;
        writeln!(out, "WROTE {}", path.display()).map_err(other)?;
    }
    Ok(())
}
