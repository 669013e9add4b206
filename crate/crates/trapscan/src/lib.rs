//! File formats, analysis reports and the `trapscan` command line on top of
//! [`trapscan_core`].

pub mod commands;
pub mod io;
pub mod report;

pub use io::{load_json, load_model, load_trace, write_json, LoadError};
pub use report::{build_reports, AnalysisReport, FixConfig, ReportParams, SCHEMA_VERSION};
