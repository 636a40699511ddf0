//! Iterative decomposition of QUBO problems into small clamped sub-problems.
//!
//! A global problem `min x^T Q x` is split into blocks of `k` variables.
//! Variables outside a block are replaced by their current marginal
//! probability `P(x_j = 1)`, which yields a small sub-QUBO plus a constant
//! offset. Each block is solved with either a dense statevector QAOA
//! simulator driven by a fixed annealing ramp or with simulated annealing,
//! and the marginals measured from the sub-solver feed the next sweep.
//! Every sweep adds one layer to the schedule. A final full-depth pass
//! draws ordered samples per block, which are concatenated into global
//! solutions.
//!
//! The crate also ships an exhaustive Gray-code oracle, a benchmark harness
//! and the `hadof` command line tool.

pub mod bench;
pub mod decomposition;
pub mod engine;
pub mod error;
pub mod exact;
pub mod ising;
pub mod qaoa;
pub mod qubo;
pub mod report;
pub mod rng;
pub mod sa;
pub mod samples;

pub use decomposition::{
    build_sub_qubo, init_marginals, partition_variables, ContiguousBlocks, MarginalVector,
    PartitionStrategy, SubProblem, SubsetPlan,
};
pub use engine::{
    aggregate, run_hadof, scaled_objective, solution_stats, HadofConfig, HadofResult, Solution,
    SolutionStats, SubSolver, UpdateMode,
};
pub use error::{Error, Result};
pub use exact::{brute_force, brute_force_with_cap, DEFAULT_EXACT_CAP};
pub use ising::IsingModel;
pub use qaoa::{anneal_schedule, apply_qaoa, qubit_marginals, sample, Schedule, StateVector};
pub use qubo::{generate_random_qubo, parse_qubo, serialize_qubo, Assignment, QuboMatrix};
pub use sa::{sa_marginals, sa_solve, SaParams};
pub use samples::SampleSet;
