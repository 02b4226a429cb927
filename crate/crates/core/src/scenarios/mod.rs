//! Declarative experiments that pair a closed form with its simulation
//! oracle, plus the table reproductions and verification suites built on
//! them.

mod closure;
mod lemmas;
mod spec;
mod sweep;
mod table;

pub use closure::{closure_check, default_closure_scenarios, theorem1_closure_suite, ClosureVerdict};
pub use lemmas::appendix_lemma_checks;
pub use spec::{AnalyticReport, ExperimentResult, ScenarioSpec, SystemKind};
pub use sweep::{bounds_containment_sweep, bounds_sweep_zero_wait, ContainmentReport, SweepRow};
pub use table::{
    equispaced_loads, ordering_invariance_test, permutations, reproduce_tandem_table, slowest_last, write_table_csv,
    OrderingReport, TableRow,
};

use serde::{Deserialize, Serialize};

/// Outcome of one named check in a verification suite.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    pub fn new(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Self { name: name.into(), passed, detail: detail.into() }
    }
}
