//! Issue-specific detectors (app logout, unresponsive ad screens) and the
//! half-overlap rule that decides whether a general-purpose region covers a
//! finding.

use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::region::Region;
use crate::trace::Trace;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IssueKind {
    AppLogout,
    UnresponsiveUi,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IssueFinding {
    pub kind: IssueKind,
    pub start: usize,
    pub end: usize,
    pub span_ms: u64,
}

/// Per-app activity lists, maintained by hand.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct AppProfile {
    pub app: String,
    #[serde(default)]
    pub login_activities: BTreeSet<String>,
    #[serde(default)]
    pub ad_activity_id: String,
}

/// First to last occurrence of any login activity, if it spans `t_min`.
pub fn detect_logout(trace: &Trace, profile: &AppProfile, t_min_ms: u64) -> Option<IssueFinding> {
    let is_login = |i: &usize| profile.login_activities.contains(&trace.entry(*i).hierarchy.activity);
    let first = (1..=trace.len()).find(is_login)?;
    let last = (1..=trace.len()).rev().find(is_login)?;
    let span_ms = trace.span_ms(first, last);
    (span_ms >= t_min_ms).then_some(IssueFinding { kind: IssueKind::AppLogout, start: first, end: last, span_ms })
}

/// Maximal uninterrupted runs of the ad activity lasting at least `t_min`.
pub fn detect_unresponsive(trace: &Trace, profile: &AppProfile, t_min_ms: u64) -> Vec<IssueFinding> {
    let mut out = Vec::new();
    if profile.ad_activity_id.is_empty() {
        return out;
    }
    let mut i = 1;
    while i <= trace.len() {
        if trace.entry(i).hierarchy.activity != profile.ad_activity_id {
            i += 1;
            continue;
        }
        let start = i;
        while i < trace.len() && trace.entry(i + 1).hierarchy.activity == profile.ad_activity_id {
            i += 1;
        }
        let span_ms = trace.span_ms(start, i);
        if span_ms >= t_min_ms {
            out.push(IssueFinding { kind: IssueKind::UnresponsiveUi, start, end: i, span_ms });
        }
        i += 1;
    }
    out
}

/// Time interval `[t_start, t_end]` of a 1-based index range.
pub(crate) fn interval(trace: &Trace, start: usize, end: usize) -> (u64, u64) {
    (trace.timestamp(start), trace.timestamp(end))
}

pub(crate) fn overlap_ms(a: (u64, u64), b: (u64, u64)) -> u64 {
    a.1.min(b.1).saturating_sub(a.0.max(b.0))
}

/// Total length of the union of `intervals` intersected with `window`.
fn union_overlap_ms(window: (u64, u64), mut intervals: Vec<(u64, u64)>) -> u64 {
    intervals.sort_unstable();
    let mut total = 0;
    let mut cursor = window.0;
    for (s, e) in intervals {
        let s = s.max(cursor);
        let e = e.min(window.1);
        if e > s {
            total += e - s;
            cursor = e;
        }
    }
    total
}

/// Whether `overlap` reaches half of `span` (integer comparison).
pub fn half_covered(overlap: u64, span: u64) -> bool {
    u128::from(overlap) * 2 >= u128::from(span)
}

/// Marks each finding as covered when one region (or, with `union`, all
/// regions together) overlaps at least half of its time span.
pub fn coverage_check(
    trace: &Trace,
    findings: &[IssueFinding],
    regions: &[Region],
    union: bool,
) -> Vec<(IssueFinding, bool)> {
    let region_intervals: Vec<(u64, u64)> = regions.iter().map(|r| interval(trace, r.start, r.end)).collect();
    findings
        .iter()
        .map(|f| {
            let window = interval(trace, f.start, f.end);
            let covered = if union {
                !region_intervals.is_empty() && half_covered(union_overlap_ms(window, region_intervals.clone()), f.span_ms)
            } else {
                region_intervals.iter().any(|&ri| half_covered(overlap_ms(window, ri), f.span_ms))
            };
            (f.clone(), covered)
        })
        .collect()
}
