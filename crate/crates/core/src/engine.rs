//! The decomposition loop.
//!
//! 1. Every marginal starts at 0.5 and the variables are split into blocks.
//! 2. Sweep `l = 1..=p`: each block is clamped against the current
//!    marginals, solved at depth `l`, and its measured marginals are written
//!    back. In [`UpdateMode::InSweep`] the write is immediate, so later
//!    blocks in the same sweep see it; in [`UpdateMode::Snapshot`] all
//!    blocks read the marginals from the start of the sweep.
//! 3. Each block is clamped against the final marginals, solved at full
//!    depth and sampled `final_shots` times.
//! 4. The `s`-th global solution concatenates every block's `s`-th draw.
//!
//! Every stochastic call is seeded from `(seed, phase, key)` where `key`
//! combines the sweep with the block's smallest variable index, so results
//! do not depend on thread scheduling or on block order in snapshot mode.

use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::decomposition::{
    build_sub_qubo, init_marginals, partition_variables, MarginalVector, SubProblem, SubsetPlan,
};
use crate::error::{invalid, Error, Result};
use crate::qaoa::{anneal_schedule, apply_qaoa, qubit_marginals, sample, Schedule, QUBIT_CAP};
use crate::qubo::{Assignment, QuboMatrix};
use crate::rng::{phase, stream_seed};
use crate::sa::{sa_solve, SaParams};
use crate::samples::SampleSet;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SubSolver {
    Qaoa,
    Sa,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum UpdateMode {
    /// Gauss-Seidel: later blocks in a sweep see earlier blocks' updates.
    #[default]
    InSweep,
    /// Jacobi: every block in a sweep reads the same snapshot.
    Snapshot,
}

impl std::str::FromStr for UpdateMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "in-sweep" => Ok(Self::InSweep),
            "snapshot" => Ok(Self::Snapshot),
            _ => Err(invalid(format!("unknown update mode `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HadofConfig {
    pub k: usize,
    pub p: usize,
    /// Shots per marginal estimate; 0 selects exact Born marginals (QAOA only).
    pub marginal_shots: usize,
    pub final_shots: usize,
    pub solver: SubSolver,
    pub update_mode: UpdateMode,
    pub seed: u64,
    pub sa_sweeps_per_stage: usize,
    pub sa_beta_hot: f64,
    pub sa_beta_cold: f64,
}

impl Default for HadofConfig {
    fn default() -> Self {
        let sa = SaParams::default();
        Self {
            k: 5,
            p: 10,
            marginal_shots: 500,
            final_shots: 5000,
            solver: SubSolver::Qaoa,
            update_mode: UpdateMode::InSweep,
            seed: 0,
            sa_sweeps_per_stage: sa.sweeps_per_stage,
            sa_beta_hot: sa.beta_hot,
            sa_beta_cold: sa.beta_cold,
        }
    }
}

impl HadofConfig {
    pub fn sa_params(&self, reads: usize) -> SaParams {
        SaParams {
            sweeps_per_stage: self.sa_sweeps_per_stage,
            reads,
            beta_hot: self.sa_beta_hot,
            beta_cold: self.sa_beta_cold,
        }
    }

    /// Checks the configuration against a problem with `n` variables.
    pub fn validate(&self, n: usize) -> Result<()> {
        if self.k == 0 || self.k > n {
            return Err(invalid(format!("need 1 <= k <= n, got k = {}, n = {n}", self.k)));
        }
        if self.p == 0 || self.final_shots == 0 {
            return Err(invalid("p and final_shots must be positive"));
        }
        match self.solver {
            SubSolver::Qaoa if self.k > QUBIT_CAP => Err(Error::CapExceeded {
                what: "QAOA block",
                got: self.k,
                cap: QUBIT_CAP,
            }),
            SubSolver::Sa if self.marginal_shots == 0 => Err(invalid(
                "exact marginals (0 shots) are only available for the QAOA sub-solver",
            )),
            SubSolver::Sa => self.sa_params(1).validate(),
            SubSolver::Qaoa => Ok(()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Solution {
    pub assignment: Assignment,
    pub objective: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolutionStats {
    pub best: Solution,
    pub most_probable: Solution,
    pub average: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HadofResult {
    pub config: HadofConfig,
    pub plan: SubsetPlan,
    /// Global solutions in sampling order with their objectives.
    pub global_samples: Vec<Solution>,
    pub best: Solution,
    pub most_probable: Solution,
    pub average_objective: f64,
    /// Marginals after each sweep `l = 1..=p`.
    pub marginal_trajectory: Vec<MarginalVector>,
    /// Final full-depth draws per block, in plan order.
    pub subset_samples: Vec<SampleSet>,
    pub wall_time_s: f64,
}

fn marginal_key(sweep: usize, block: &[usize]) -> u64 {
    ((sweep as u64) << 32) | block[0] as u64
}

fn estimate_marginals(
    sub: &SubProblem,
    schedule: &Schedule,
    depth: usize,
    cfg: &HadofConfig,
    seed: u64,
) -> Result<MarginalVector> {
    match cfg.solver {
        SubSolver::Qaoa => {
            let state = apply_qaoa(&sub.sub_q.to_ising(), schedule, depth)?;
            Ok(qubit_marginals(&state, cfg.marginal_shots, seed))
        }
        SubSolver::Sa => {
            let params = cfg.sa_params(cfg.marginal_shots);
            sa_solve(sub, schedule, depth, &params, seed)?.marginals()
        }
    }
}

fn draw_final(
    sub: &SubProblem,
    schedule: &Schedule,
    cfg: &HadofConfig,
    seed: u64,
) -> Result<SampleSet> {
    match cfg.solver {
        SubSolver::Qaoa => {
            let state = apply_qaoa(&sub.sub_q.to_ising(), schedule, schedule.p())?;
            sample(&state, cfg.final_shots, seed)
        }
        SubSolver::Sa => {
            let params = cfg.sa_params(cfg.final_shots);
            sa_solve(sub, schedule, schedule.p(), &params, seed)
        }
    }
}

/// Runs the configured sub-solver on the whole problem at full depth. This
/// is the undecomposed baseline; it uses the same seed as block 0 of the
/// final pass, so `k = n` reproduces it exactly.
pub fn solve_whole(q: &QuboMatrix, cfg: &HadofConfig) -> Result<SampleSet> {
    let whole = HadofConfig {
        k: q.n(),
        ..cfg.clone()
    };
    whole.validate(q.n())?;
    let schedule = anneal_schedule(cfg.p)?;
    draw_final(
        &SubProblem::whole(q),
        &schedule,
        &whole,
        stream_seed(cfg.seed, phase::FINAL, 0),
    )
}

pub fn run_hadof(q: &QuboMatrix, cfg: &HadofConfig) -> Result<HadofResult> {
    cfg.validate(q.n())?;
    let plan = partition_variables(q.n(), cfg.k)?;
    run_hadof_with_plan(q, cfg, plan)
}

/// Same as [`run_hadof`] with a caller-supplied block plan.
pub fn run_hadof_with_plan(
    q: &QuboMatrix,
    cfg: &HadofConfig,
    plan: SubsetPlan,
) -> Result<HadofResult> {
    let n = q.n();
    cfg.validate(n)?;
    if plan.n() != n || plan.k() > cfg.k {
        return Err(invalid("block plan does not match the problem or k"));
    }
    let start = Instant::now();
    let schedule = anneal_schedule(cfg.p)?;
    let mut marginals = init_marginals(n)?;
    let mut trajectory = Vec::with_capacity(cfg.p);

    for depth in 1..=cfg.p {
        match cfg.update_mode {
            UpdateMode::InSweep => {
                for block in plan.subsets() {
                    let sub = build_sub_qubo(q, block, &marginals)?;
                    let seed = stream_seed(cfg.seed, phase::MARGINAL, marginal_key(depth, block));
                    let m = estimate_marginals(&sub, &schedule, depth, cfg, seed)?;
                    marginals.scatter(block, &m);
                }
            }
            UpdateMode::Snapshot => {
                let snapshot = &marginals;
                let updates = plan
                    .subsets()
                    .par_iter()
                    .map(|block| {
                        let sub = build_sub_qubo(q, block, snapshot)?;
                        let key = marginal_key(depth, block);
                        let seed = stream_seed(cfg.seed, phase::MARGINAL, key);
                        estimate_marginals(&sub, &schedule, depth, cfg, seed)
                    })
                    .collect::<Result<Vec<_>>>()?;
                for (block, m) in plan.subsets().iter().zip(&updates) {
                    marginals.scatter(block, m);
                }
            }
        }
        trajectory.push(marginals.clone());
    }

    let subset_samples = plan
        .subsets()
        .par_iter()
        .map(|block| {
            let sub = build_sub_qubo(q, block, &marginals)?;
            let seed = stream_seed(cfg.seed, phase::FINAL, block[0] as u64);
            draw_final(&sub, &schedule, cfg, seed)
        })
        .collect::<Result<Vec<_>>>()?;

    let global_samples: Vec<Solution> = aggregate(&subset_samples, &plan)?
        .into_par_iter()
        .map(|a| {
            let objective = q.evaluate_bits(a.bits());
            Solution {
                assignment: a,
                objective,
            }
        })
        .collect();
    let stats = stats_of(&global_samples, &subset_samples, &plan, q)?;

    Ok(HadofResult {
        config: cfg.clone(),
        plan,
        global_samples,
        best: stats.best,
        most_probable: stats.most_probable,
        average_objective: stats.average,
        marginal_trajectory: trajectory,
        subset_samples,
        wall_time_s: start.elapsed().as_secs_f64(),
    })
}

/// Global solution `s` places every block's `s`-th draw at the block's
/// variables.
pub fn aggregate(subset_samples: &[SampleSet], plan: &SubsetPlan) -> Result<Vec<Assignment>> {
    if subset_samples.len() != plan.len() {
        return Err(invalid(format!(
            "{} sample sets for {} blocks",
            subset_samples.len(),
            plan.len()
        )));
    }
    let shots = subset_samples.first().map_or(0, SampleSet::total);
    for (set, block) in subset_samples.iter().zip(plan.subsets()) {
        if set.total() != shots {
            return Err(Error::DrawCountMismatch {
                expected: shots,
                got: set.total(),
            });
        }
        if set.width() != block.len() {
            return Err(Error::LengthMismatch {
                expected: block.len(),
                got: set.width(),
            });
        }
    }
    (0..shots)
        .map(|s| {
            let parts: Vec<&[u8]> = subset_samples.iter().map(|set| set.draws()[s].bits()).collect();
            plan.assemble(&parts)
        })
        .collect()
}

/// Best global sample, the concatenation of every block's modal draw, and
/// the mean objective over the global samples.
pub fn solution_stats(
    globals: &[Assignment],
    subset_samples: &[SampleSet],
    plan: &SubsetPlan,
    q: &QuboMatrix,
) -> Result<SolutionStats> {
    let solutions = globals
        .iter()
        .map(|a| {
            Ok(Solution {
                objective: q.evaluate(a)?,
                assignment: a.clone(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    stats_of(&solutions, subset_samples, plan, q)
}

fn stats_of(
    solutions: &[Solution],
    subset_samples: &[SampleSet],
    plan: &SubsetPlan,
    q: &QuboMatrix,
) -> Result<SolutionStats> {
    let mut best = solutions.first().ok_or(Error::Empty("global samples"))?;
    for s in solutions {
        if s.objective < best.objective {
            best = s;
        }
    }
    // shifted mean: never rounds below the minimum
    let excess: f64 = solutions.iter().map(|s| s.objective - best.objective).sum();
    let modes = subset_samples
        .iter()
        .map(|s| s.mode().map(Assignment::bits).ok_or(Error::Empty("block samples")))
        .collect::<Result<Vec<_>>>()?;
    let modal = plan.assemble(&modes)?;
    let modal_objective = q.evaluate(&modal)?;
    Ok(SolutionStats {
        best: best.clone(),
        most_probable: Solution {
            assignment: modal,
            objective: modal_objective,
        },
        average: best.objective + excess / solutions.len() as f64,
    })
}

/// `value / reference`; 1.0 means the reference optimum was reached.
pub fn scaled_objective(value: f64, reference: f64) -> Result<f64> {
    if reference == 0.0 {
        return Err(Error::ZeroReference);
    }
    Ok(value / reference)
}
