//! JSON result document emitted by `hadof solve`.
//!
//! ```json
//! {
//!   "solver": "hadof-qaoa",
//!   "n": 10,
//!   "config": { "k": 5, "p": 10, "marginal_shots": 500, ... },
//!   "best": { "assignment": "0110...", "objective": -41.2 },
//!   "most_probable": { "assignment": "...", "objective": -39.8 },
//!   "average_objective": -30.1,
//!   "reference": { "kind": "exact", "objective": -41.2 },
//!   "scaled": { "best": 1.0, "most_probable": 0.966, "average": 0.73 },
//!   "marginal_trajectory": [[0.41, ...], ...],
//!   "wall_time_s": 0.012
//! }
//! ```
//!
//! `config` and `marginal_trajectory` are present only for the decomposed
//! solvers; `reference` and `scaled` only when a nonzero reference could be
//! computed.

use serde::{Deserialize, Serialize};

use crate::bench::{ReferenceKind, RunSummary, Scaled, SolverSpec};
use crate::engine::{HadofConfig, Solution};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolutionReport {
    pub assignment: String,
    pub objective: f64,
}

impl From<&Solution> for SolutionReport {
    fn from(s: &Solution) -> Self {
        Self {
            assignment: s.assignment.to_string(),
            objective: s.objective,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReferenceReport {
    pub kind: ReferenceKind,
    pub objective: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    pub solver: SolverSpec,
    pub n: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub config: Option<HadofConfig>,
    pub best: SolutionReport,
    pub most_probable: SolutionReport,
    pub average_objective: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reference: Option<ReferenceReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scaled: Option<Scaled>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub marginal_trajectory: Option<Vec<Vec<f64>>>,
    pub wall_time_s: f64,
}

impl SolveReport {
    pub fn new(
        n: usize,
        summary: &RunSummary,
        reference: Option<(ReferenceKind, f64)>,
        scaled: Option<Scaled>,
    ) -> Self {
        let hadof = summary.hadof.as_ref();
        Self {
            solver: summary.solver,
            n,
            config: hadof.map(|r| r.config.clone()),
            best: (&summary.best).into(),
            most_probable: (&summary.most_probable).into(),
            average_objective: summary.average,
            reference: reference.map(|(kind, objective)| ReferenceReport { kind, objective }),
            scaled,
            marginal_trajectory: hadof.map(|r| {
                r.marginal_trajectory
                    .iter()
                    .map(|m| m.as_slice().to_vec())
                    .collect()
            }),
            wall_time_s: summary.wall_time_s,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}
