//! Synthetic apps and a seeded random explorer that produces traces with
//! known ground truth.

mod builtin;
mod explorer;
mod model;

use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fingerprint::Fingerprint;
use crate::fixes::FixDirective;
use crate::issues::{half_covered, interval, overlap_ms};
use crate::region::Region;
use crate::trace::{ElementPath, Trace};
use crate::DEFAULT_T_MIN_MS;

pub use builtin::{builtin_model, builtin_profile};
pub use model::{
    AppModel, Edge, EdgeEffect, Escape, ExplorerConfig, ScreenTemplate, TrapKind, TrapSpec, VariantRule,
    CLOCK_PLACEHOLDER,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScenarioName {
    Benign,
    Logout,
    Tarpit,
    TarpitX2,
    AdFreeze,
    Mixed,
}

impl ScenarioName {
    pub const ALL: [ScenarioName; 6] = [
        ScenarioName::Benign,
        ScenarioName::Logout,
        ScenarioName::Tarpit,
        ScenarioName::TarpitX2,
        ScenarioName::AdFreeze,
        ScenarioName::Mixed,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ScenarioName::Benign => "benign",
            ScenarioName::Logout => "logout",
            ScenarioName::Tarpit => "tarpit",
            ScenarioName::TarpitX2 => "tarpit_x2",
            ScenarioName::AdFreeze => "ad_freeze",
            ScenarioName::Mixed => "mixed",
        }
    }
}

impl core::str::FromStr for ScenarioName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ScenarioName::ALL
            .into_iter()
            .find(|n| n.as_str() == s)
            .ok_or_else(|| Error::Model(alloc::format!("unknown scenario `{s}`")))
    }
}

fn default_t_min() -> u64 {
    DEFAULT_T_MIN_MS
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScenarioSpec {
    pub name: ScenarioName,
    pub seed: u64,
    pub duration_ms: u64,
    pub action_period_ms: u64,
    /// Injected episodes shorter than this are not part of the ground truth.
    #[serde(default = "default_t_min")]
    pub t_min_ms: u64,
}

impl ScenarioSpec {
    /// One hour at one action per second.
    pub fn new(name: ScenarioName, seed: u64) -> Self {
        Self { name, seed, duration_ms: 3_600_000, action_period_ms: 1000, t_min_ms: DEFAULT_T_MIN_MS }
    }

    pub fn steps(&self) -> usize {
        (self.duration_ms / self.action_period_ms) as usize
    }

    pub fn validate(&self) -> Result<()> {
        if self.action_period_ms == 0 {
            return Err(Error::Model("action_period_ms must be positive".into()));
        }
        if self.steps() < 2 {
            return Err(Error::Model("scenario must produce at least two entries".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TruthKind {
    Logout,
    Tarpit,
    AdFreeze,
}

/// Injected episode, 1-based and inclusive.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TruthRegion {
    pub kind: TruthKind,
    pub start: usize,
    pub end: usize,
}

/// The action on entry `index` that started an episode.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DestructiveAction {
    pub index: usize,
    pub element_path: ElementPath,
    pub kind: TruthKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct GroundTruthLog {
    /// Episodes spanning at least `t_min`.
    pub regions: Vec<TruthRegion>,
    /// Episodes too short to count.
    pub short_regions: Vec<TruthRegion>,
    pub destructive_actions: Vec<DestructiveAction>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulationRun {
    pub trace: Trace,
    pub truth: GroundTruthLog,
    /// Distinct abstract screens visited.
    pub coverage: BTreeSet<Fingerprint>,
}

/// Runs the explorer on `model` for `spec`, honoring `fixes`.
pub fn simulate(model: &AppModel, spec: &ScenarioSpec, fixes: &[FixDirective]) -> Result<SimulationRun> {
    model.validate()?;
    spec.validate()?;
    explorer::run(model, spec, fixes)
}

/// Runs the builtin model of `spec.name`.
pub fn generate(spec: &ScenarioSpec) -> Result<SimulationRun> {
    simulate(&builtin_model(spec.name), spec, &[])
}

/// Re-runs a scenario with `fixes` applied; returns the new trace and its
/// coverage.
pub fn apply_fixes_and_rerun(
    model: &AppModel,
    spec: &ScenarioSpec,
    fixes: &[FixDirective],
) -> Result<(Trace, usize)> {
    let run = simulate(model, spec, fixes)?;
    let coverage = run.coverage.len();
    Ok((run.trace, coverage))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DetectionMetrics {
    /// Share of reported regions that half-overlap some injected region.
    pub precision: f64,
    /// Share of injected regions half-overlapped by some reported region.
    pub recall: f64,
    /// Mean over injected regions of the best overlapped fraction.
    pub mean_overlap: f64,
}

/// Scores `reported` against the ground truth of `trace`. Empty reports give
/// precision 1, empty truth gives recall 1.
pub fn evaluate_detection(trace: &Trace, reported: &[Region], truth: &GroundTruthLog) -> DetectionMetrics {
    let rep: Vec<(u64, u64)> = reported.iter().map(|r| interval(trace, r.start, r.end)).collect();
    let tru: Vec<(u64, u64)> = truth.regions.iter().map(|r| interval(trace, r.start, r.end)).collect();
    let ratio = |hits: usize, total: usize| if total == 0 { 1.0 } else { hits as f64 / total as f64 };
    let precision_hits = rep
        .iter()
        .filter(|&&r| tru.iter().any(|&t| half_covered(overlap_ms(r, t), r.1 - r.0)))
        .count();
    let recall_hits = tru
        .iter()
        .filter(|&&t| rep.iter().any(|&r| half_covered(overlap_ms(t, r), t.1 - t.0)))
        .count();
    let mean_overlap = if tru.is_empty() {
        1.0
    } else {
        tru.iter()
            .map(|&t| {
                let best = rep.iter().map(|&r| overlap_ms(t, r)).max().unwrap_or(0);
                if t.1 == t.0 {
                    1.0
                } else {
                    best as f64 / (t.1 - t.0) as f64
                }
            })
            .sum::<f64>()
            / tru.len() as f64
    };
    DetectionMetrics {
        precision: ratio(precision_hits, rep.len()),
        recall: ratio(recall_hits, tru.len()),
        mean_overlap,
    }
}

/// Label used for traces produced by the explorer.
pub fn trace_label(model: &AppModel, spec: &ScenarioSpec, fixed: bool) -> String {
    let mut id = alloc::format!("{}-{}-s{}", model.app, spec.name.as_str(), spec.seed);
    if fixed {
        id.push_str("-fixed");
    }
    id
}
