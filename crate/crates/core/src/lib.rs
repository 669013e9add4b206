//! Detection of ineffective exploration in UI-testing traces.
//!
//! A trace is a timestamped sequence of UI screens, each paired with the
//! action the testing tool performed on it. This crate finds two shapes of
//! wasted exploration effort in such traces:
//!
//! * **space partitions**: a destructive action after which the tool never
//!   returns to the UI subspace it was exploring before
//!   ([`partition::detect_partition`]);
//! * **tarpits**: long stretches spent inside a small, hard-to-escape group of
//!   similar screens ([`tarpit::detect_tarpits`]).
//!
//! Screens are compared on abstract hierarchies ([`abstraction`]) and grouped
//! with an LCS-based similarity check and greedy merge ([`similarity`]).
//! Detected regions can be ranked and turned into fix directives
//! ([`fixes`]), which the synthetic app/explorer in [`simulator`] applies to
//! measure coverage gains.
//!
//! The crate is `no_std` and only needs an allocator. File formats, reports
//! and the command-line interface live in the `trapscan` crate.

#![no_std]

extern crate alloc;

pub mod abstraction;
pub mod analysis;
pub mod error;
pub mod fingerprint;
pub mod fixes;
pub mod issues;
pub mod partition;
pub mod region;
pub mod similarity;
pub mod simulator;
pub mod tarpit;
pub mod trace;

pub use abstraction::{abstract_hierarchy, AbstractHierarchy, AbstractNode, ScreenId, ScreenIndex};
pub use analysis::{analyze, Analysis, AnalysisParams};
pub use error::{Error, Result};
pub use fingerprint::Fingerprint;
pub use fixes::{rank_regions, synthesize_fix, FixDirective, FixKind, Provenance, RankedRegion};
pub use issues::{coverage_check, detect_logout, detect_unresponsive, AppProfile, IssueFinding, IssueKind};
pub use partition::{compute_ep, detect_partition, partition_objective, DetectorParams, PartitionResult};
pub use region::{Region, RegionKind};
pub use similarity::{merge, sim_check, token_sequence, MergeMap, NodeToken, SimChecker};
pub use tarpit::{detect_tarpits, tarpit_objective, TarpitMode};
pub use trace::{
    resolve_path, Action, ActionKind, Bounds, ElementPath, PathStep, Trace, TraceEntry, UiHierarchy, UiNode,
};

/// Maximum insertion distance for two screens to count as similar.
pub const DEFAULT_D_MAX: u32 = 3;

/// Minimum time span of a reportable region: ten minutes.
pub const DEFAULT_T_MIN_MS: u64 = 10 * 60 * 1000;
