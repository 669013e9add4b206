//! Exploration-space partition detection.
//!
//! A partition is a destructive action on screen `S_n` after which the tool
//! keeps exploring a different, smaller subspace and never returns. For each
//! candidate `n < E_p` the detector scores
//!
//! ```text
//! F(n) = |{S[1,n]} ∩ {S[n+1,N]}| / (N - n) + 2·σ(|{S[n+1,N]}| / |{S[E_p+1,N]}| - 1) - 1
//! ```
//!
//! where `E_p` is chosen so that `S[E_p, N]` spans about `t_min`. The
//! smallest minimizer is accepted only if the prefix saw more distinct
//! screens than the suffix.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::abstraction::{ScreenId, ScreenIndex};
use crate::error::{Error, Result};
use crate::region::{Region, RegionKind};
use crate::tarpit::TarpitMode;
use crate::trace::{Action, Trace};
use crate::{DEFAULT_D_MAX, DEFAULT_T_MIN_MS};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DetectorParams {
    pub t_min_ms: u64,
    pub d_max: u32,
    pub tarpit_mode: TarpitMode,
}

impl Default for DetectorParams {
    fn default() -> Self {
        Self { t_min_ms: DEFAULT_T_MIN_MS, d_max: DEFAULT_D_MAX, tarpit_mode: TarpitMode::Constrained }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PartitionResult {
    /// `n`: the screen the destructive action was taken on.
    pub boundary_index: usize,
    /// `[n + 1, N]`.
    pub region: Region,
    pub objective_value: f64,
    pub destructive_action: Action,
    /// `|{S[1,n]}| > |{S[n+1,N]}|`.
    pub accepted: bool,
    pub ep: usize,
}

/// `E_p`: the index whose distance to the end of the trace is closest to
/// `t_min`, ties toward the smaller index.
pub fn compute_ep(trace: &Trace, t_min_ms: u64) -> Result<usize> {
    if trace.len() < 2 {
        return Err(Error::DegenerateTrace(format!("E_p needs at least 2 entries, got {}", trace.len())));
    }
    let t_n = trace.timestamp(trace.len());
    let mut best = 1;
    let mut best_gap = u64::MAX;
    for i in 1..=trace.len() {
        let gap = (t_n - trace.timestamp(i)).abs_diff(t_min_ms);
        if gap < best_gap {
            best = i;
            best_gap = gap;
        }
    }
    Ok(best)
}

fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + libm::exp(-x))
}

/// Distinct-set sizes for every split point, computed from per-screen
/// first and last occurrences in one sweep.
///
/// Arrays are indexed by `n` in `0..=N`.
#[derive(Debug, Clone)]
pub struct SplitStats {
    /// `|{S[1,n]}|`
    pub prefix_distinct: Vec<u32>,
    /// `|{S[n+1,N]}|`
    pub suffix_distinct: Vec<u32>,
    /// `|{S[1,n]} ∩ {S[n+1,N]}|`
    pub shared: Vec<u32>,
}

impl SplitStats {
    pub fn new(ids: &[ScreenId]) -> Self {
        let n = ids.len();
        let distinct = ids.iter().map(|id| id.index() + 1).max().unwrap_or(0);
        let mut first = vec![usize::MAX; distinct];
        let mut last = vec![0usize; distinct];
        for (i, id) in ids.iter().enumerate() {
            let pos = i + 1;
            let k = id.index();
            first[k] = first[k].min(pos);
            last[k] = pos;
        }
        // +1 at first occurrence; shared also -1 at last occurrence
        let mut first_at = vec![0i64; n + 2];
        let mut last_at = vec![0i64; n + 2];
        for k in 0..distinct {
            if first[k] == usize::MAX {
                continue;
            }
            first_at[first[k]] += 1;
            last_at[last[k]] += 1;
        }
        let mut prefix_distinct = vec![0u32; n + 1];
        let mut suffix_distinct = vec![0u32; n + 1];
        let mut shared = vec![0u32; n + 1];
        let total = first.iter().filter(|&&f| f != usize::MAX).count() as i64;
        let (mut seen, mut ended) = (0i64, 0i64);
        for split in 0..=n {
            seen += first_at[split];
            ended += last_at[split];
            prefix_distinct[split] = seen as u32;
            suffix_distinct[split] = (total - ended) as u32;
            // first <= split < last  ==  seen - (ended with first <= split); every ended screen has first <= last <= split
            shared[split] = (seen - ended) as u32;
        }
        Self { prefix_distinct, suffix_distinct, shared }
    }

    pub fn len(&self) -> usize {
        self.prefix_distinct.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `F(n)` for `1 <= n < ep <= N`.
    pub fn objective(&self, n: usize, ep: usize) -> Result<f64> {
        let total = self.len();
        if n == 0 || n >= ep || ep > total {
            return Err(Error::Index { start: n, end: ep, len: total });
        }
        let tail = self.suffix_distinct[ep];
        if tail == 0 {
            return Err(Error::DivisionDomain(ep));
        }
        let first = f64::from(self.shared[n]) / (total - n) as f64;
        let ratio = f64::from(self.suffix_distinct[n]) / f64::from(tail);
        Ok(first + 2.0 * sigmoid(ratio - 1.0) - 1.0)
    }
}

/// `F(n)` evaluated on a single trace.
pub fn partition_objective(trace: &Trace, n: usize, ep: usize) -> Result<f64> {
    let index = ScreenIndex::build(trace);
    SplitStats::new(index.ids()).objective(n, ep)
}

/// Runs the partition search over a prepared screen index.
pub fn detect_partition_indexed(trace: &Trace, index: &ScreenIndex, params: &DetectorParams) -> Result<PartitionResult> {
    let total = trace.len();
    if total < 3 {
        return Err(Error::DegenerateTrace(format!("partition search needs at least 3 entries, got {total}")));
    }
    let ep = compute_ep(trace, params.t_min_ms)?;
    if ep < 2 {
        return Err(Error::DegenerateTrace("E_p = 1 leaves no candidate boundary".into()));
    }
    if ep == total {
        return Err(Error::DegenerateTrace("E_p = N leaves an empty tail estimate".into()));
    }
    let stats = SplitStats::new(index.ids());
    let mut best_n = 1;
    let mut best = stats.objective(1, ep)?;
    for n in 2..ep {
        let f = stats.objective(n, ep)?;
        if f < best {
            best = f;
            best_n = n;
        }
    }
    let accepted = stats.prefix_distinct[best_n] > stats.suffix_distinct[best_n];
    Ok(PartitionResult {
        boundary_index: best_n,
        region: Region::new(trace, best_n + 1, total, RegionKind::Partition, best),
        objective_value: best,
        destructive_action: trace.entry(best_n).action.clone(),
        accepted,
        ep,
    })
}

/// Finds the best partition boundary of `trace`. A result with
/// `accepted == false` means no partition was detected.
pub fn detect_partition(trace: &Trace, params: &DetectorParams) -> Result<PartitionResult> {
    detect_partition_indexed(trace, &ScreenIndex::build(trace), params)
}
