//! Region ranking and fix directives.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::abstraction::abstract_hierarchy;
use crate::error::{Error, Result};
use crate::fingerprint::Fingerprint;
use crate::region::Region;
use crate::trace::{ElementPath, Trace};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankedRegion {
    pub region: Region,
    pub rank: usize,
    pub tool: String,
    pub app: String,
}

/// Ranks regions within each `(tool, app)` group: longest span first, ties
/// by trace id, start index and kind.
pub fn rank_regions(regions: &[Region], traces: &[&Trace]) -> Result<Vec<RankedRegion>> {
    let keys: BTreeMap<&str, (&str, &str)> = traces
        .iter()
        .map(|t| (t.trace_id.as_str(), (t.tool.as_str(), t.app.as_str())))
        .collect();
    rank_by_key(regions, |trace_id| {
        keys.get(trace_id)
            .map(|&(tool, app)| (String::from(tool), String::from(app)))
            .ok_or_else(|| Error::UnknownTrace(trace_id.into()))
    })
}

/// Same ordering as [`rank_regions`], with the group key supplied per trace
/// id (used when only reports are available).
pub fn rank_by_key(
    regions: &[Region],
    mut key_of: impl FnMut(&str) -> Result<(String, String)>,
) -> Result<Vec<RankedRegion>> {
    let mut groups: BTreeMap<(String, String), Vec<&Region>> = BTreeMap::new();
    for r in regions {
        groups.entry(key_of(&r.trace_id)?).or_default().push(r);
    }
    let mut out = Vec::with_capacity(regions.len());
    for ((tool, app), mut members) in groups {
        members.sort_by(|a, b| {
            b.span_ms
                .cmp(&a.span_ms)
                .then_with(|| a.trace_id.cmp(&b.trace_id))
                .then_with(|| a.start.cmp(&b.start))
                .then_with(|| a.kind.cmp(&b.kind))
                .then_with(|| a.end.cmp(&b.end))
        });
        out.extend(members.into_iter().enumerate().map(|(i, r)| RankedRegion {
            region: r.clone(),
            rank: i + 1,
            tool: tool.clone(),
            app: app.clone(),
        }));
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FixKind {
    DisableElement,
    RestartApp,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub trace_id: String,
    pub start: usize,
    pub end: usize,
    pub rank: usize,
}

/// Instruction applied while exploring: when a screen with
/// `screen_fingerprint` shows up, disable the element at `element_path`, or
/// restart the app.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FixDirective {
    pub kind: FixKind,
    pub screen_fingerprint: Fingerprint,
    pub element_path: Option<ElementPath>,
    pub provenance: Provenance,
}

impl FixDirective {
    /// Directive identity without provenance.
    pub fn key(&self) -> (FixKind, Fingerprint, Option<&ElementPath>) {
        (self.kind, self.screen_fingerprint, self.element_path.as_ref())
    }
}

/// Fix for a ranked region: disable the element the tool acted on right
/// before the region, or restart the app when there is no such element.
///
/// Coordinate-only taps are attributed to an element when the point lies in
/// exactly one visible leaf.
pub fn synthesize_fix(ranked: &RankedRegion, trace: &Trace) -> FixDirective {
    let region = &ranked.region;
    let provenance = Provenance {
        trace_id: region.trace_id.clone(),
        start: region.start,
        end: region.end,
        rank: ranked.rank,
    };
    let restart = |provenance| FixDirective {
        kind: FixKind::RestartApp,
        screen_fingerprint: abstract_hierarchy(&trace.entry(region.start).hierarchy).fingerprint,
        element_path: None,
        provenance,
    };
    if region.start < 2 {
        return restart(provenance);
    }
    let before = trace.entry(region.start - 1);
    let action = &before.action;
    let path = match (&action.target_path, action.point) {
        (Some(path), _) => Some(path.clone()),
        (None, Some((x, y))) if !action.kind.is_untargeted() => {
            let mut leaves = before.hierarchy.root.visible_leaves_at(x, y);
            (leaves.len() == 1).then(|| leaves.remove(0))
        }
        _ => None,
    };
    match path {
        Some(path) => FixDirective {
            kind: FixKind::DisableElement,
            screen_fingerprint: abstract_hierarchy(&before.hierarchy).fingerprint,
            element_path: Some(path),
            provenance,
        },
        None => restart(provenance),
    }
}

/// Fixes for every ranked region with `rank <= top_k`, without duplicates.
pub fn select_fixes(ranked: &[RankedRegion], traces: &[&Trace], top_k: usize) -> Vec<FixDirective> {
    let mut out: Vec<FixDirective> = Vec::new();
    for r in ranked.iter().filter(|r| r.rank <= top_k) {
        let Some(trace) = traces.iter().find(|t| t.trace_id == r.region.trace_id) else {
            continue;
        };
        let fix = synthesize_fix(r, trace);
        if !out.iter().any(|f| f.key() == fix.key()) {
            out.push(fix);
        }
    }
    out
}
