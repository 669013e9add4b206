//! One-call analysis of a trace: partition, tarpits and issue coverage over a
//! shared screen index.

use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::abstraction::ScreenIndex;
use crate::error::Error;
use crate::issues::{coverage_check, detect_logout, detect_unresponsive, AppProfile, IssueFinding};
use crate::partition::{detect_partition_indexed, DetectorParams, PartitionResult};
use crate::region::Region;
use crate::tarpit::{detect_tarpits_grouped, entry_groups};
use crate::trace::Trace;

/// Tarpit windows with a group/length ratio above this are not reported.
pub const DEFAULT_TARPIT_CEILING: f64 = 0.005;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnalysisParams {
    pub detector: DetectorParams,
    pub tarpit_ceiling: f64,
    /// Let several regions jointly cover an issue finding.
    pub coverage_union: bool,
}

impl Default for AnalysisParams {
    fn default() -> Self {
        Self { detector: DetectorParams::default(), tarpit_ceiling: DEFAULT_TARPIT_CEILING, coverage_union: false }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Analysis {
    /// `None` when the trace is too short for a partition search.
    pub partition: Option<PartitionResult>,
    /// Every window the tarpit search selected, before the ceiling.
    pub tarpit_candidates: Vec<Region>,
    /// Accepted partition and tarpit regions, sorted by start then kind.
    pub regions: Vec<Region>,
    /// Issue findings with their coverage flag; empty without a profile.
    pub issues: Vec<(IssueFinding, bool)>,
}

pub fn analyze(trace: &Trace, params: &AnalysisParams, profile: Option<&AppProfile>) -> Analysis {
    let index = ScreenIndex::build(trace);
    let partition = match detect_partition_indexed(trace, &index, &params.detector) {
        Ok(p) => Some(p),
        Err(Error::DegenerateTrace(_)) => None,
        Err(e) => unreachable!("validated trace: {e}"),
    };
    let groups = entry_groups(&index, params.detector.d_max);
    let tarpit_candidates = detect_tarpits_grouped(trace, &groups, &params.detector);

    let mut regions: Vec<Region> = partition
        .iter()
        .filter(|p| p.accepted)
        .map(|p| p.region.clone())
        .chain(tarpit_candidates.iter().filter(|r| r.score <= params.tarpit_ceiling).cloned())
        .collect();
    regions.sort_by(|a, b| a.start.cmp(&b.start).then(a.kind.cmp(&b.kind)));

    let issues = match profile {
        Some(profile) => {
            let t_min = params.detector.t_min_ms;
            let findings: Vec<IssueFinding> = detect_logout(trace, profile, t_min)
                .into_iter()
                .chain(detect_unresponsive(trace, profile, t_min))
                .collect();
            coverage_check(trace, &findings, &regions, params.coverage_union)
        }
        None => Vec::new(),
    };

    Analysis { partition, tarpit_candidates, regions, issues }
}
