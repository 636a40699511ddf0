use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde::Deserialize;

use hadof::bench::{
    append_csv, generate_instances, load_instance, reference_run, run_bench, run_solver,
    scale_summary, BenchConfig, SolverSpec,
};
use hadof::report::SolveReport;
use hadof::{HadofConfig, UpdateMode};

const OUT_DIR_ENV: &str = "HADOF_OUT_DIR";

#[derive(Parser)]
#[command(name = "hadof", version, about = "QUBO decomposition with QAOA and SA sub-solvers")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate random QUBO instances with entries uniform on [lo, hi).
    Gen {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        count: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = -10.0, allow_hyphen_values = true)]
        lo: f64,
        #[arg(long, default_value_t = 10.0, allow_hyphen_values = true)]
        hi: f64,
        /// Output directory (default: $HADOF_OUT_DIR or the current directory).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Solve one instance file and print a JSON report.
    Solve {
        instance: PathBuf,
        #[arg(long, default_value = "hadof-qaoa")]
        solver: SolverSpec,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        #[command(flatten)]
        overrides: Overrides,
        /// Write the report here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a benchmark suite and append rows to a CSV file.
    Bench {
        /// Problem sizes, comma separated.
        #[arg(long = "n", alias = "sizes", value_delimiter = ',', required = true)]
        sizes: Vec<usize>,
        /// Block sizes for the decomposed solvers, comma separated.
        #[arg(long = "k", value_delimiter = ',', default_value = "5")]
        k_values: Vec<usize>,
        #[arg(long, value_delimiter = ',', default_value = "exact,sa,hadof-sa,hadof-qaoa")]
        solver: Vec<SolverSpec>,
        #[arg(long, default_value_t = 10)]
        instances: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        #[command(flatten)]
        overrides: Overrides,
        /// CSV path (default: $HADOF_OUT_DIR/bench.csv or ./bench.csv).
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Solver settings. Precedence: flag, then config file, then defaults.
#[derive(Args)]
struct Overrides {
    /// TOML file with any of the HadofConfig keys.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    p: Option<usize>,
    /// Shots per marginal estimate; 0 = exact marginals (QAOA only).
    #[arg(long)]
    shots: Option<usize>,
    #[arg(long)]
    final_shots: Option<usize>,
    #[arg(long)]
    update_mode: Option<UpdateMode>,
    #[arg(long)]
    sa_sweeps: Option<usize>,
    #[arg(long)]
    sa_beta_hot: Option<f64>,
    #[arg(long)]
    sa_beta_cold: Option<f64>,
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    k: Option<usize>,
    p: Option<usize>,
    marginal_shots: Option<usize>,
    final_shots: Option<usize>,
    update_mode: Option<UpdateMode>,
    seed: Option<u64>,
    sa_sweeps_per_stage: Option<usize>,
    sa_beta_hot: Option<f64>,
    sa_beta_cold: Option<f64>,
}

impl Overrides {
    fn resolve(&self, k: Option<usize>, seed: Option<u64>) -> Result<HadofConfig> {
        let file: ConfigFile = match &self.config {
            Some(path) => {
                let text = fs::read_to_string(path)
                    .with_context(|| format!("reading {}", path.display()))?;
                toml::from_str(&text).with_context(|| format!("parsing {}", path.display()))?
            }
            None => ConfigFile::default(),
        };
        let d = HadofConfig::default();
        Ok(HadofConfig {
            k: k.or(file.k).unwrap_or(d.k),
            p: self.p.or(file.p).unwrap_or(d.p),
            marginal_shots: self.shots.or(file.marginal_shots).unwrap_or(d.marginal_shots),
            final_shots: self.final_shots.or(file.final_shots).unwrap_or(d.final_shots),
            solver: d.solver,
            update_mode: self.update_mode.or(file.update_mode).unwrap_or(d.update_mode),
            seed: seed.or(file.seed).unwrap_or(d.seed),
            sa_sweeps_per_stage: self
                .sa_sweeps
                .or(file.sa_sweeps_per_stage)
                .unwrap_or(d.sa_sweeps_per_stage),
            sa_beta_hot: self.sa_beta_hot.or(file.sa_beta_hot).unwrap_or(d.sa_beta_hot),
            sa_beta_cold: self.sa_beta_cold.or(file.sa_beta_cold).unwrap_or(d.sa_beta_cold),
        })
    }
}

fn default_out_dir() -> PathBuf {
    std::env::var_os(OUT_DIR_ENV)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from("."))
}

fn cmd_gen(n: usize, count: usize, seed: u64, lo: f64, hi: f64, out: Option<PathBuf>) -> Result<()> {
    let dir = out.unwrap_or_else(default_out_dir);
    let paths = generate_instances(n, count, seed, lo, hi, &dir)
        .with_context(|| format!("writing instances to {}", dir.display()))?;
    eprintln!("wrote {} instance(s) to {}", paths.len(), dir.display());
    Ok(())
}

fn cmd_solve(instance: &Path, solver: SolverSpec, cfg: HadofConfig, out: Option<PathBuf>) -> Result<()> {
    let q = load_instance(instance)?;
    let summary = run_solver(&q, solver, &cfg)?;
    let reference = match solver {
        SolverSpec::Exact => Some((hadof::bench::ReferenceKind::Exact, summary.best.objective)),
        _ => reference_run(&q, &cfg)
            .ok()
            .map(|(kind, r)| (kind, r.best.objective)),
    };
    let scaled = reference.and_then(|(_, r)| scale_summary(&summary, r).ok());
    let report = SolveReport::new(q.n(), &summary, reference, scaled);
    let json = report.to_json();
    match out {
        Some(path) => fs::write(&path, json + "\n")
            .with_context(|| format!("writing {}", path.display()))?,
        None => println!("{json}"),
    }
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Gen {
            n,
            count,
            seed,
            lo,
            hi,
            out,
        } => cmd_gen(n, count, seed, lo, hi, out),
        Command::Solve {
            instance,
            solver,
            k,
            seed,
            overrides,
            out,
        } => {
            let cfg = overrides.resolve(k, seed)?;
            cmd_solve(&instance, solver, cfg, out)
        }
        Command::Bench {
            sizes,
            k_values,
            solver,
            instances,
            seed,
            jobs,
            overrides,
            out,
        } => {
            if jobs == 0 {
                bail!("--jobs must be positive");
            }
            let base = overrides.resolve(None, Some(seed))?;
            let cfg = BenchConfig {
                sizes,
                k_values,
                solvers: solver,
                instances,
                seed,
                base,
                jobs,
            };
            let rows = run_bench(&cfg)?;
            let path = out.unwrap_or_else(|| default_out_dir().join("bench.csv"));
            append_csv(&path, &rows).with_context(|| format!("writing {}", path.display()))?;
            let failed = rows.iter().filter(|r| r.error.is_some()).count();
            eprintln!("{} row(s) appended to {} ({failed} with errors)", rows.len(), path.display());
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
