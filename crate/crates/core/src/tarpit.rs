//! Exploration-tarpit detection.
//!
//! A tarpit is a long window `S[l, r]` covering few screen groups relative to
//! the number of actions spent in it. The objective of a window is
//! `groups(l, r) / (r - l + 1)`, where groups come from one greedy merge over
//! all distinct screens of the trace. The best window is taken out of its
//! segment and the search repeats on the remaining pieces until none of them
//! spans `t_min`.

use alloc::collections::BTreeSet;
use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::abstraction::{abstract_hierarchy, ScreenIndex};
use crate::error::Result;
use crate::partition::DetectorParams;
use crate::region::{Region, RegionKind};
use crate::similarity::{MergeMap, SimChecker};
use crate::trace::Trace;

/// How `t_min` enters the window search.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TarpitMode {
    /// Only windows spanning at least `t_min` are candidates.
    #[default]
    Constrained,
    /// Every window is a candidate; the optimum is reported only if it spans
    /// `t_min`.
    Unconstrained,
}

/// `(distinct groups, length, start)` of a window, ordered so that smaller is
/// better: lower ratio, then longer, then earlier.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WindowScore {
    pub groups: u64,
    pub len: u64,
    pub start: usize,
}

impl WindowScore {
    pub fn ratio(&self) -> f64 {
        self.groups as f64 / self.len as f64
    }

    /// Strictly better under the selection order.
    pub fn beats(&self, other: &WindowScore) -> bool {
        let lhs = self.groups * other.len;
        let rhs = other.groups * self.len;
        lhs < rhs || (lhs == rhs && (self.len > other.len || (self.len == other.len && self.start < other.start)))
    }
}

/// Dense merge-group id of every entry (0-based storage).
pub fn entry_groups(index: &ScreenIndex, d_max: u32) -> Vec<u32> {
    let mut checker = SimChecker::new(index.screens(), d_max);
    let roots = checker.merge_all();
    let mut dense = vec![u32::MAX; roots.len()];
    let mut next = 0u32;
    for &r in &roots {
        if dense[r] == u32::MAX {
            dense[r] = next;
            next += 1;
        }
    }
    index.ids().iter().map(|id| dense[roots[id.index()]]).collect()
}

/// Best window inside the 0-based closed segment `[lo, hi]`, returned as
/// 0-based `(l, r, score)`.
///
/// For each start the end pointer only moves forward, distinct groups are
/// counted with a stamp array, and a start is abandoned as soon as even the
/// longest remaining extension cannot beat the current best.
pub fn best_window(
    groups: &[u32],
    timestamps: &[u64],
    lo: usize,
    hi: usize,
    t_min_ms: u64,
    mode: TarpitMode,
) -> Option<(usize, usize, WindowScore)> {
    let group_count = groups[lo..=hi].iter().map(|&g| g as usize + 1).max().unwrap_or(0);
    let mut stamp = vec![usize::MAX; group_count];
    let mut best: Option<(usize, usize, WindowScore)> = None;
    let mut feasible_from = lo;
    for l in lo..=hi {
        let first_end = match mode {
            TarpitMode::Constrained => {
                feasible_from = feasible_from.max(l);
                while feasible_from <= hi && timestamps[feasible_from] - timestamps[l] < t_min_ms {
                    feasible_from += 1;
                }
                if feasible_from > hi {
                    break;
                }
                feasible_from
            }
            TarpitMode::Unconstrained => l,
        };
        let max_len = (hi - l + 1) as u64;
        if let Some((_, _, b)) = &best {
            // at least one group, at most max_len entries
            if b.len > max_len * b.groups {
                break;
            }
        }
        let mut distinct = 0u64;
        for r in l..=hi {
            let g = groups[r] as usize;
            if stamp[g] != l {
                stamp[g] = l;
                distinct += 1;
                if let Some((_, _, b)) = &best {
                    if distinct * b.len > b.groups * max_len {
                        break;
                    }
                }
            }
            if r < first_end {
                continue;
            }
            let cand = WindowScore { groups: distinct, len: (r - l + 1) as u64, start: l };
            if best.as_ref().is_none_or(|(_, _, b)| cand.beats(b)) {
                best = Some((l, r, cand));
            }
        }
    }
    best
}

/// Iterated tarpit search over precomputed group ids; regions sorted by
/// start. Every selected window is returned, independent of its score.
pub fn detect_tarpits_grouped(trace: &Trace, groups: &[u32], params: &DetectorParams) -> Vec<Region> {
    let timestamps: Vec<u64> = trace.entries.iter().map(|e| e.timestamp_ms).collect();
    let mut regions = Vec::new();
    let mut segments = vec![(0usize, trace.len() - 1)];
    while let Some((lo, hi)) = segments.pop() {
        if timestamps[hi] - timestamps[lo] < params.t_min_ms {
            continue;
        }
        let Some((l, r, score)) = best_window(groups, &timestamps, lo, hi, params.t_min_ms, params.tarpit_mode) else {
            continue;
        };
        if timestamps[r] - timestamps[l] >= params.t_min_ms {
            regions.push(Region::new(trace, l + 1, r + 1, RegionKind::Tarpit, score.ratio()));
        }
        if l > lo {
            segments.push((lo, l - 1));
        }
        if r < hi {
            segments.push((r + 1, hi));
        }
    }
    regions.sort_by_key(|r| r.start);
    regions
}

/// Finds all tarpit regions of `trace`.
pub fn detect_tarpits(trace: &Trace, params: &DetectorParams) -> Vec<Region> {
    let index = ScreenIndex::build(trace);
    let groups = entry_groups(&index, params.d_max);
    detect_tarpits_grouped(trace, &groups, params)
}

/// `|Merge({S[l,r]})| / (r - l + 1)` with groups looked up in `groups`;
/// screens missing from the map count as their own group.
pub fn tarpit_objective(trace: &Trace, l: usize, r: usize, groups: &MergeMap) -> Result<f64> {
    trace.check_range(l, r)?;
    let roots: BTreeSet<_> = trace.entries[l - 1..r]
        .iter()
        .map(|e| {
            let fp = abstract_hierarchy(&e.hierarchy).fingerprint;
            groups.root_of(&fp).unwrap_or(fp)
        })
        .collect();
    Ok(roots.len() as f64 / (r - l + 1) as f64)
}
