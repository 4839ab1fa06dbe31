//! JSON job files and reports for `transversal-core`.
//!
//! A job names a CSS code either by generator rows or by monomial sets, a
//! level `l` and a list of tasks. [`report::run`] carries out the tasks and
//! returns a report whose serialization is byte-stable for a fixed job.

pub mod job;
pub mod report;

pub use job::{CliError, CodeSource, Job, Task};
pub use report::{info, run, to_json, Outcome, Report};
