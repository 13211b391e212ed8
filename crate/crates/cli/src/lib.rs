//! Command-line harness: run configuration, output files and the acceptance checks.

pub mod checks;
pub mod commands;
pub mod config;
pub mod disk_problem;
pub mod render;
pub mod units;

#[path = "../../core/tests/common/real_forms.rs"]
pub mod real_forms;
#[path = "../../core/tests/common/structure.rs"]
pub mod structure;
