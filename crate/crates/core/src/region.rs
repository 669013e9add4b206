use alloc::string::String;

use serde::{Deserialize, Serialize};

use crate::trace::Trace;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RegionKind {
    Partition,
    Tarpit,
}

/// A flagged closed interval `[start, end]` of a trace (1-based).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Region {
    pub start: usize,
    pub end: usize,
    pub kind: RegionKind,
    /// Objective value at the optimum that produced this region.
    pub score: f64,
    /// `t_end - t_start`.
    pub span_ms: u64,
    /// Index of the screen whose action led into the region; absent when
    /// the region starts at the first entry.
    pub destructive_index: Option<usize>,
    pub trace_id: String,
}

impl Region {
    pub fn new(trace: &Trace, start: usize, end: usize, kind: RegionKind, score: f64) -> Self {
        Self {
            start,
            end,
            kind,
            score,
            span_ms: trace.span_ms(start, end),
            destructive_index: (start > 1).then(|| start - 1),
            trace_id: trace.trace_id.clone(),
        }
    }

    pub fn len(&self) -> usize {
        self.end + 1 - self.start
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}
