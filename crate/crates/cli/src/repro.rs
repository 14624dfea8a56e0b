//! The bundled characteristic-3 scenario and the generic scenario runner.

use crate::checks::run_checks;
use crate::report::Report;
use crate::scenario::{Scenario, ScenarioError};

pub const BUNDLED_NAME: &str = "keel-mckernan-p3.json";
pub const BUNDLED_SCENARIO: &str = include_str!("../scenarios/keel-mckernan-p3.json");
pub const BUNDLED_EXPECTED: &str = include_str!("../scenarios/keel-mckernan-p3.expected.json");

pub fn bundled_scenario() -> Scenario {
    Scenario::from_json(BUNDLED_SCENARIO).expect("bundled scenario parses")
}

/// Builds the scenario and runs all of its checks.
pub fn run_scenario(s: &Scenario) -> Result<Report, ScenarioError> {
    let built = s.build()?;
    Ok(Report::new(s, run_checks(&built)))
}

/// Runs the bundled scenario.
pub fn run_repro() -> Report {
    run_scenario(&bundled_scenario()).expect("bundled scenario is valid")
}
