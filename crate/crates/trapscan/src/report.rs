use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use trapscan_core::analysis::{analyze, Analysis, AnalysisParams};
use trapscan_core::fixes::{rank_by_key, synthesize_fix, FixDirective, RankedRegion};
use trapscan_core::issues::{AppProfile, IssueFinding};
use trapscan_core::{Region, TarpitMode, Trace};

pub const SCHEMA_VERSION: &str = "trapscan.report/1";

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReportParams {
    pub t_min_ms: u64,
    pub d_max: u32,
    pub tarpit_ceiling: f64,
    pub tarpit_mode: TarpitMode,
    pub coverage_union: bool,
    pub top_k: usize,
}

impl Default for ReportParams {
    fn default() -> Self {
        Self::from_analysis(&AnalysisParams::default(), 1)
    }
}

impl ReportParams {
    pub fn from_analysis(p: &AnalysisParams, top_k: usize) -> Self {
        Self {
            t_min_ms: p.detector.t_min_ms,
            d_max: p.detector.d_max,
            tarpit_ceiling: p.tarpit_ceiling,
            tarpit_mode: p.detector.tarpit_mode,
            coverage_union: p.coverage_union,
            top_k,
        }
    }

    pub fn analysis(&self) -> AnalysisParams {
        let mut p = AnalysisParams::default();
        p.detector.t_min_ms = self.t_min_ms;
        p.detector.d_max = self.d_max;
        p.detector.tarpit_mode = self.tarpit_mode;
        p.tarpit_ceiling = self.tarpit_ceiling;
        p.coverage_union = self.coverage_union;
        p
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PartitionSummary {
    pub boundary_index: usize,
    pub objective_value: f64,
    pub accepted: bool,
    pub ep: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportedRegion {
    pub rank: usize,
    pub region: Region,
    pub fix: FixDirective,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IssueCoverage {
    pub finding: IssueFinding,
    pub covered: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub region_count: usize,
    pub mean_span_ms: f64,
    pub tarpit_candidates: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub schema_version: String,
    pub trace_id: String,
    pub tool: String,
    pub app: String,
    pub params: ReportParams,
    pub partition: Option<PartitionSummary>,
    /// Accepted regions, by rank.
    pub regions: Vec<ReportedRegion>,
    /// Fixes of regions ranked within `top_k`, without duplicates.
    pub fixes: Vec<FixDirective>,
    pub issues: Vec<IssueCoverage>,
    pub summary: Summary,
}

/// `{ "directives": [...] }`, the input of a fixed re-run.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct FixConfig {
    pub directives: Vec<FixDirective>,
}

/// Analyzes every trace (in parallel) and ranks regions across traces of the
/// same `(tool, app)`. Reports come back in input order.
pub fn build_reports(traces: &[Trace], params: &ReportParams, profile: Option<&AppProfile>) -> Vec<AnalysisReport> {
    let analysis_params = params.analysis();
    let analyses: Vec<Analysis> = std::thread::scope(|s| {
        let handles: Vec<_> = traces
            .iter()
            .map(|t| s.spawn(|| analyze(t, &analysis_params, profile.filter(|p| p.app.is_empty() || p.app == t.app))))
            .collect();
        handles.into_iter().map(|h| h.join().expect("analysis thread")).collect()
    });

    let keys: BTreeMap<&str, (String, String)> =
        traces.iter().map(|t| (t.trace_id.as_str(), (t.tool.clone(), t.app.clone()))).collect();
    let all: Vec<Region> = analyses.iter().flat_map(|a| a.regions.iter().cloned()).collect();
    let ranked = rank_by_key(&all, |id| Ok(keys[id].clone())).expect("every region comes from a known trace");

    traces
        .iter()
        .zip(&analyses)
        .map(|(trace, analysis)| assemble(trace, analysis, &ranked, params))
        .collect()
}

fn assemble(trace: &Trace, analysis: &Analysis, ranked: &[RankedRegion], params: &ReportParams) -> AnalysisReport {
    let mut regions: Vec<ReportedRegion> = ranked
        .iter()
        .filter(|r| r.region.trace_id == trace.trace_id)
        .map(|r| ReportedRegion { rank: r.rank, region: r.region.clone(), fix: synthesize_fix(r, trace) })
        .collect();
    regions.sort_by_key(|r| r.rank);
    let mut fixes: Vec<FixDirective> = Vec::new();
    for r in regions.iter().filter(|r| r.rank <= params.top_k) {
        if !fixes.iter().any(|f| f.key() == r.fix.key()) {
            fixes.push(r.fix.clone());
        }
    }
    let region_count = regions.len();
    let mean_span_ms = if region_count == 0 {
        0.0
    } else {
        regions.iter().map(|r| r.region.span_ms as f64).sum::<f64>() / region_count as f64
    };
    AnalysisReport {
        schema_version: SCHEMA_VERSION.into(),
        trace_id: trace.trace_id.clone(),
        tool: trace.tool.clone(),
        app: trace.app.clone(),
        params: *params,
        partition: analysis.partition.as_ref().map(|p| PartitionSummary {
            boundary_index: p.boundary_index,
            objective_value: p.objective_value,
            accepted: p.accepted,
            ep: p.ep,
        }),
        regions,
        fixes,
        issues: analysis
            .issues
            .iter()
            .map(|(finding, covered)| IssueCoverage { finding: finding.clone(), covered: *covered })
            .collect(),
        summary: Summary { region_count, mean_span_ms, tarpit_candidates: analysis.tarpit_candidates.len() },
    }
}

/// Pools the regions of several reports per `(tool, app)` and re-ranks them.
pub fn rank_reports(reports: &[AnalysisReport]) -> Vec<(RankedRegion, FixDirective)> {
    let keys: BTreeMap<&str, (String, String)> =
        reports.iter().map(|r| (r.trace_id.as_str(), (r.tool.clone(), r.app.clone()))).collect();
    let mut fix_of: BTreeMap<(&str, usize, usize, trapscan_core::RegionKind), &FixDirective> = BTreeMap::new();
    let mut all = Vec::new();
    for report in reports {
        for r in &report.regions {
            fix_of.insert((report.trace_id.as_str(), r.region.start, r.region.end, r.region.kind), &r.fix);
            all.push(r.region.clone());
        }
    }
    let ranked = rank_by_key(&all, |id| Ok(keys[id].clone())).expect("every region comes from a report");
    ranked
        .into_iter()
        .map(|r| {
            let key = (r.region.trace_id.as_str(), r.region.start, r.region.end, r.region.kind);
            let mut fix = fix_of[&key].clone();
            fix.provenance.rank = r.rank;
            (r, fix)
        })
        .collect()
}

/// Fixes for every pooled region ranked within `top_k`, without duplicates.
pub fn select_report_fixes(reports: &[AnalysisReport], top_k: usize) -> FixConfig {
    let mut directives: Vec<FixDirective> = Vec::new();
    for (r, fix) in rank_reports(reports) {
        if r.rank <= top_k && !directives.iter().any(|f| f.key() == fix.key()) {
            directives.push(fix);
        }
    }
    FixConfig { directives }
}
