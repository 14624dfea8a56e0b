//! Scenario runner, reproduction report and construction explorer built on
//! [`kmsurf`].

pub mod checks;
pub mod explore;
pub mod expr;
pub mod report;
pub mod repro;
pub mod scenario;

use thiserror::Error;

pub use explore::{explore_frobenius, Exploration, ExploreError, Verdict};
pub use report::{Format, Report};
pub use repro::{bundled_scenario, run_repro, run_scenario};
pub use scenario::{load_scenario, Scenario};

/// Exit code for a failed mathematical check.
pub const EXIT_CHECK_FAILED: i32 = 1;
/// Exit code for unreadable, malformed or inconsistent input.
pub const EXIT_INVALID_INPUT: i32 = 2;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("{path}:{line}:{column}: {message}")]
    Parse {
        path: String,
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{path}: {source}")]
    Invalid {
        path: String,
        source: scenario::ScenarioError,
    },
    #[error(transparent)]
    Explore(#[from] ExploreError),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        EXIT_INVALID_INPUT
    }
}
