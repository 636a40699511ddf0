//! Solver runners, instance generation and the benchmark suite behind the
//! `gen`, `solve` and `bench` subcommands.

use std::fmt;
use std::fs::{self, OpenOptions};
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::decomposition::partition_variables;
use crate::engine::{
    aggregate, run_hadof, scaled_objective, solution_stats, solve_whole, HadofConfig, Solution,
    SubSolver,
};
use crate::error::{invalid, Error, Result};
use crate::exact::{brute_force, DEFAULT_EXACT_CAP};
use crate::qubo::{generate_random_qubo, parse_qubo, serialize_qubo, QuboMatrix};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolverSpec {
    Exact,
    Sa,
    HadofSa,
    HadofQaoa,
}

impl SolverSpec {
    pub fn name(self) -> &'static str {
        match self {
            Self::Exact => "exact",
            Self::Sa => "sa",
            Self::HadofSa => "hadof-sa",
            Self::HadofQaoa => "hadof-qaoa",
        }
    }

    pub fn is_decomposed(self) -> bool {
        matches!(self, Self::HadofSa | Self::HadofQaoa)
    }
}

impl fmt::Display for SolverSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SolverSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(Self::Exact),
            "sa" => Ok(Self::Sa),
            "hadof-sa" => Ok(Self::HadofSa),
            "hadof-qaoa" => Ok(Self::HadofQaoa),
            _ => Err(invalid(format!(
                "unknown solver `{s}` (expected exact, sa, hadof-sa or hadof-qaoa)"
            ))),
        }
    }
}

/// Outcome of one solver call. `wall_time_s` covers the solver only.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub solver: SolverSpec,
    pub best: Solution,
    pub most_probable: Solution,
    pub average: f64,
    pub wall_time_s: f64,
    pub hadof: Option<crate::engine::HadofResult>,
}

pub fn run_solver(q: &QuboMatrix, solver: SolverSpec, cfg: &HadofConfig) -> Result<RunSummary> {
    let start = Instant::now();
    let (best, most_probable, average, hadof) = match solver {
        SolverSpec::Exact => {
            let (assignment, objective) = brute_force(q)?;
            let s = Solution {
                assignment,
                objective,
            };
            (s.clone(), s, objective, None)
        }
        SolverSpec::Sa => {
            let cfg = HadofConfig {
                solver: SubSolver::Sa,
                ..cfg.clone()
            };
            let samples = solve_whole(q, &cfg)?;
            let plan = partition_variables(q.n(), q.n())?;
            let set = std::slice::from_ref(&samples);
            let st = solution_stats(&aggregate(set, &plan)?, set, &plan, q)?;
            (st.best, st.most_probable, st.average, None)
        }
        SolverSpec::HadofSa | SolverSpec::HadofQaoa => {
            let sub = if solver == SolverSpec::HadofSa {
                SubSolver::Sa
            } else {
                SubSolver::Qaoa
            };
            let cfg = HadofConfig {
                solver: sub,
                ..cfg.clone()
            };
            let r = run_hadof(q, &cfg)?;
            (
                r.best.clone(),
                r.most_probable.clone(),
                r.average_objective,
                Some(r),
            )
        }
    };
    Ok(RunSummary {
        solver,
        best,
        most_probable,
        average,
        wall_time_s: start.elapsed().as_secs_f64(),
        hadof,
    })
}

/// Which solver produced a scaling reference.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ReferenceKind {
    Exact,
    Sa,
}

/// Exhaustive optimum when `n` is within the exact cap, otherwise the best
/// read of the global SA baseline.
pub fn reference_run(q: &QuboMatrix, cfg: &HadofConfig) -> Result<(ReferenceKind, RunSummary)> {
    if q.n() <= DEFAULT_EXACT_CAP {
        Ok((ReferenceKind::Exact, run_solver(q, SolverSpec::Exact, cfg)?))
    } else {
        Ok((ReferenceKind::Sa, run_solver(q, SolverSpec::Sa, cfg)?))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Scaled {
    pub best: f64,
    pub most_probable: f64,
    pub average: f64,
}

pub fn scale_summary(summary: &RunSummary, reference: f64) -> Result<Scaled> {
    Ok(Scaled {
        best: scaled_objective(summary.best.objective, reference)?,
        most_probable: scaled_objective(summary.most_probable.objective, reference)?,
        average: scaled_objective(summary.average, reference)?,
    })
}

pub fn instance_file_name(n: usize, seed: u64) -> String {
    format!("qubo_n{n}_seed{seed}.txt")
}

/// Writes `count` instances with seeds `seed, seed + 1, ...` and a
/// `manifest.txt` listing their file names. Returns the written paths.
pub fn generate_instances(
    n: usize,
    count: usize,
    seed: u64,
    lo: f64,
    hi: f64,
    out_dir: &Path,
) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(out_dir)?;
    let mut manifest = String::new();
    let mut paths = Vec::with_capacity(count);
    for i in 0..count as u64 {
        let s = seed.wrapping_add(i);
        let q = generate_random_qubo(n, s, lo, hi)?;
        let name = instance_file_name(n, s);
        let path = out_dir.join(&name);
        fs::write(&path, serialize_qubo(&q))?;
        manifest.push_str(&name);
        manifest.push('\n');
        paths.push(path);
    }
    fs::write(out_dir.join("manifest.txt"), manifest)?;
    Ok(paths)
}

pub fn load_instance(path: &Path) -> Result<QuboMatrix> {
    let text = fs::read_to_string(path)
        .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    parse_qubo(&text)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchConfig {
    pub sizes: Vec<usize>,
    pub k_values: Vec<usize>,
    pub solvers: Vec<SolverSpec>,
    pub instances: usize,
    pub seed: u64,
    /// Solver settings; `k` and `seed` are overridden per row.
    pub base: HadofConfig,
    pub jobs: usize,
}

/// One CSV row. Field order is the file's column order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub n: usize,
    pub k: Option<usize>,
    pub solver: SolverSpec,
    pub seed: u64,
    pub best_obj: Option<f64>,
    pub most_probable_obj: Option<f64>,
    pub avg_obj: Option<f64>,
    pub reference_obj: Option<f64>,
    pub scaled_best: Option<f64>,
    pub scaled_most_probable: Option<f64>,
    pub scaled_avg: Option<f64>,
    pub wall_time_s: Option<f64>,
    pub error: Option<String>,
}

pub const CSV_COLUMNS: [&str; 13] = [
    "n",
    "k",
    "solver",
    "seed",
    "best_obj",
    "most_probable_obj",
    "avg_obj",
    "reference_obj",
    "scaled_best",
    "scaled_most_probable",
    "scaled_avg",
    "wall_time_s",
    "error",
];

impl BenchRow {
    fn failed(n: usize, k: Option<usize>, solver: SolverSpec, seed: u64, e: &Error) -> Self {
        Self {
            n,
            k,
            solver,
            seed,
            best_obj: None,
            most_probable_obj: None,
            avg_obj: None,
            reference_obj: None,
            scaled_best: None,
            scaled_most_probable: None,
            scaled_avg: None,
            wall_time_s: None,
            error: Some(e.to_string()),
        }
    }
}

fn row_for(
    n: usize,
    k: Option<usize>,
    seed: u64,
    summary: &RunSummary,
    reference: Option<f64>,
) -> BenchRow {
    let scaled = reference.map(|r| scale_summary(summary, r));
    let (scaled, error) = match scaled {
        Some(Ok(s)) => (Some(s), None),
        Some(Err(e)) => (None, Some(e.to_string())),
        None => (None, None),
    };
    BenchRow {
        n,
        k,
        solver: summary.solver,
        seed,
        best_obj: Some(summary.best.objective),
        most_probable_obj: Some(summary.most_probable.objective),
        avg_obj: Some(summary.average),
        reference_obj: reference,
        scaled_best: scaled.map(|s| s.best),
        scaled_most_probable: scaled.map(|s| s.most_probable),
        scaled_avg: scaled.map(|s| s.average),
        wall_time_s: Some(summary.wall_time_s),
        error,
    }
}

fn bench_instance(cfg: &BenchConfig, n: usize, seed: u64) -> Vec<BenchRow> {
    let run_cfg = HadofConfig {
        seed,
        ..cfg.base.clone()
    };
    let q = match generate_random_qubo(n, seed, -10.0, 10.0) {
        Ok(q) => q,
        Err(e) => {
            return cfg
                .solvers
                .iter()
                .map(|&s| BenchRow::failed(n, None, s, seed, &e))
                .collect()
        }
    };
    let reference = reference_run(&q, &run_cfg);
    let reference_obj = reference.as_ref().ok().map(|(_, r)| r.best.objective);

    let mut rows = Vec::new();
    for &solver in &cfg.solvers {
        let ks: Vec<Option<usize>> = if solver.is_decomposed() {
            cfg.k_values.iter().map(|&k| Some(k)).collect()
        } else {
            vec![None]
        };
        for k in ks {
            let reused = match (&reference, solver) {
                (Ok((ReferenceKind::Exact, r)), SolverSpec::Exact)
                | (Ok((ReferenceKind::Sa, r)), SolverSpec::Sa) => Some(r.clone()),
                _ => None,
            };
            let outcome = match reused {
                Some(r) => Ok(r),
                None => {
                    let cfg_k = HadofConfig {
                        k: k.unwrap_or(run_cfg.k),
                        ..run_cfg.clone()
                    };
                    run_solver(&q, solver, &cfg_k)
                }
            };
            let mut row = match outcome {
                Ok(summary) => row_for(n, k, seed, &summary, reference_obj),
                Err(e) => BenchRow::failed(n, k, solver, seed, &e),
            };
            if let (Err(e), None) = (&reference, &row.error) {
                row.error = Some(format!("reference: {e}"));
            }
            rows.push(row);
        }
    }
    rows
}

/// Runs the cross product of sizes, instances, solvers and block sizes.
/// Instance `i` of size `n` uses seed `seed + i` for both generation and
/// the solvers. Rows come back in (size, instance, solver, k) order
/// regardless of `jobs`.
pub fn run_bench(cfg: &BenchConfig) -> Result<Vec<BenchRow>> {
    if cfg.jobs == 0 {
        return Err(invalid("jobs must be positive"));
    }
    let tasks: Vec<(usize, u64)> = cfg
        .sizes
        .iter()
        .flat_map(|&n| (0..cfg.instances as u64).map(move |i| (n, cfg.seed.wrapping_add(i))))
        .collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.jobs)
        .build()
        .map_err(|e| invalid(e.to_string()))?;
    let rows = pool.install(|| {
        tasks
            .par_iter()
            .map(|&(n, seed)| bench_instance(cfg, n, seed))
            .collect::<Vec<_>>()
    });
    Ok(rows.into_iter().flatten().collect())
}

/// Appends rows to a CSV file, writing the header only when the file is new
/// or empty.
pub fn append_csv(path: &Path, rows: &[BenchRow]) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)?;
    }
    let fresh = fs::metadata(path).map(|m| m.len() == 0).unwrap_or(true);
    let file = OpenOptions::new().create(true).append(true).open(path)?;
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(file);
    let csv_err = |e: csv::Error| Error::Io(e.to_string());
    if fresh {
        w.write_record(CSV_COLUMNS).map_err(csv_err)?;
    }
    for row in rows {
        w.serialize(row).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_csv(path: &Path) -> Result<Vec<BenchRow>> {
    let mut r = csv::Reader::from_path(path).map_err(|e| Error::Io(e.to_string()))?;
    r.deserialize()
        .map(|row| row.map_err(|e| Error::Io(e.to_string())))
        .collect()
}
