//! Seeded statistical checks of the samplers and solvers.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use hadof::bench::{reference_run, run_bench, run_solver, BenchConfig, SolverSpec};
use hadof::sa::MetropolisChain;
use hadof::{
    anneal_schedule, apply_qaoa, brute_force, generate_random_qubo, qubit_marginals, run_hadof,
    sa_solve, sample, scaled_objective, HadofConfig, QuboMatrix, SaParams, StateVector,
    SubProblem, SubSolver,
};

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

#[test]
fn shot_marginals_converge_to_exact() {
    let q = generate_random_qubo(6, 11, -10.0, 10.0).unwrap();
    let state = apply_qaoa(&q.to_ising(), &anneal_schedule(10).unwrap(), 4).unwrap();
    let exact = qubit_marginals(&state, 0, 0);
    let shots = qubit_marginals(&state, 100_000, 5);
    for (e, s) in exact.as_slice().iter().zip(shots.as_slice()) {
        assert!((e - s).abs() < 0.01, "exact {e}, sampled {s}");
    }
}

#[test]
fn uniform_register_sampling_is_balanced() {
    let state = StateVector::plus(2).unwrap();
    let set = sample(&state, 5000, 9).unwrap();
    let counts = set.counts();
    assert_eq!(counts.len(), 4);
    for c in counts.values() {
        assert!(c.abs_diff(1250) <= 250, "count {c}");
    }
}

/// `P(x = 1)` after the annealing schedule on one qubit with field `h`
/// (cost `h z`, normalized so `|h| = 1`), by explicit 2x2 products.
fn single_qubit_oracle(h: f64, p: usize) -> f64 {
    type C = (f64, f64);
    let mul = |a: C, b: C| (a.0 * b.0 - a.1 * b.1, a.0 * b.1 + a.1 * b.0);
    let add = |a: C, b: C| (a.0 + b.0, a.1 + b.1);
    let s = h.signum();
    let r = std::f64::consts::FRAC_1_SQRT_2;
    // amplitudes of x = 0 (z = -1) and x = 1 (z = +1)
    let (mut a0, mut a1): (C, C) = ((r, 0.0), (r, 0.0));
    for m in 1..=p {
        let gamma = m as f64 / p as f64;
        let beta = 1.0 - gamma;
        a0 = mul(a0, ((gamma * s).cos(), (gamma * s).sin()));
        a1 = mul(a1, ((gamma * s).cos(), -(gamma * s).sin()));
        let c = (beta.cos(), 0.0);
        let is = (0.0, beta.sin());
        (a0, a1) = (add(mul(c, a0), mul(is, a1)), add(mul(is, a0), mul(c, a1)));
    }
    a1.0 * a1.0 + a1.1 * a1.1
}

#[test]
fn single_qubit_anneal_matches_oracle() {
    for q00 in [-10.0, -3.0, -0.5, 2.0, 10.0] {
        let q = QuboMatrix::from_entries(1, [(0, 0, q00)]).unwrap();
        let h = q.to_ising().h[0];
        let state = apply_qaoa(&q.to_ising(), &anneal_schedule(10).unwrap(), 10).unwrap();
        let p1 = state.probabilities()[1];
        assert!((p1 - single_qubit_oracle(h, 10)).abs() < 1e-12, "q00 = {q00}");
    }
    let q = QuboMatrix::from_entries(1, [(0, 0, -10.0)]).unwrap();
    let state = apply_qaoa(&q.to_ising(), &anneal_schedule(10).unwrap(), 10).unwrap();
    assert!(state.probabilities()[1] > 0.9);
}

#[test]
fn long_anneal_favors_unique_ground_state() {
    let schedule = anneal_schedule(50).unwrap();
    let mut tested = 0;
    for seed in 0..200u64 {
        let q = generate_random_qubo(2, seed, -10.0, 10.0).unwrap();
        let mut energies: Vec<(f64, usize)> = (0..4)
            .map(|i| (q.evaluate(&hadof::Assignment::from_index(i as u64, 2)).unwrap(), i))
            .collect();
        energies.sort_by(|a, b| a.0.total_cmp(&b.0));
        if energies[1].0 - energies[0].0 < 0.5 {
            continue;
        }
        tested += 1;
        let probs = apply_qaoa(&q.to_ising(), &schedule, 50).unwrap().probabilities();
        let ground = energies[0].1;
        for (i, &p) in probs.iter().enumerate() {
            if i != ground {
                assert!(probs[ground] > p, "seed {seed}: {probs:?}, ground {ground}");
            }
        }
    }
    assert!(tested > 100);
}

#[test]
fn metropolis_reaches_boltzmann() {
    let q = QuboMatrix::from_entries(2, [(0, 0, -1.0), (0, 1, 1.5), (1, 1, -0.4)]).unwrap();
    let beta = 1.0;
    let couplings = q.dense_couplings();
    let mut chain = MetropolisChain::new(&couplings, vec![0, 0]);
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..1000 {
        chain.sweep(beta, &mut rng);
    }
    let sweeps = 100_000;
    let mut counts = [0u64; 4];
    for _ in 0..sweeps {
        chain.sweep(beta, &mut rng);
        let b = chain.bits();
        counts[(b[0] | b[1] << 1) as usize] += 1;
    }
    let weights: Vec<f64> = (0..4u64)
        .map(|i| (-beta * q.evaluate(&hadof::Assignment::from_index(i, 2)).unwrap()).exp())
        .collect();
    let z: f64 = weights.iter().sum();
    for (i, &c) in counts.iter().enumerate() {
        let p = weights[i] / z;
        let expected = p * sweeps as f64;
        let sigma = (sweeps as f64 * p * (1.0 - p)).sqrt();
        assert!(
            (c as f64 - expected).abs() <= 3.0 * sigma,
            "state {i}: {c} vs {expected:.0} +/- {sigma:.0}"
        );
    }
}

#[test]
fn colder_anneal_reaches_lower_energy() {
    let q = generate_random_qubo(12, 4, -10.0, 10.0).unwrap();
    let sub = SubProblem::whole(&q);
    let schedule = anneal_schedule(10).unwrap();
    let mean_energy = |beta_cold: f64| {
        let params = SaParams {
            beta_cold,
            ..SaParams::default().with_reads(1)
        };
        let energies: Vec<f64> = (0..100)
            .map(|seed| {
                let set = sa_solve(&sub, &schedule, 10, &params, seed).unwrap();
                q.evaluate(&set.draws()[0]).unwrap()
            })
            .collect();
        mean(&energies)
    };
    assert!(mean_energy(4.0) <= mean_energy(0.5));
}

#[test]
fn sa_finds_optimum_at_sixteen_variables() {
    let schedule = anneal_schedule(10).unwrap();
    let params = SaParams::default();
    let hits = (0..100u64)
        .into_par_iter()
        .filter(|&seed| {
            let q = generate_random_qubo(16, 900 + seed, -10.0, 10.0).unwrap();
            let set = sa_solve(&SubProblem::whole(&q), &schedule, 10, &params, seed).unwrap();
            let best = set
                .draws()
                .iter()
                .map(|a| q.evaluate(a).unwrap())
                .fold(f64::INFINITY, f64::min);
            (best - brute_force(&q).unwrap().1).abs() < 1e-9
        })
        .count();
    assert!(hits >= 99, "{hits}/100");
}

#[test]
fn hadof_sa_close_to_global_sa_at_fifty() {
    let scores: Vec<f64> = (0..100u64)
        .into_par_iter()
        .map(|seed| {
            let q = generate_random_qubo(50, 5000 + seed, -10.0, 10.0).unwrap();
            let cfg = HadofConfig {
                k: 10,
                seed,
                ..HadofConfig::default()
            };
            let (_, reference) = reference_run(&q, &cfg).unwrap();
            let r = run_solver(&q, SolverSpec::HadofSa, &cfg).unwrap();
            scaled_objective(r.most_probable.objective, reference.best.objective).unwrap()
        })
        .collect();
    let m = mean(&scores);
    assert!(m >= 0.9, "mean scaled most probable {m}");
}

#[test]
fn hadof_sa_average_at_twelve() {
    let cfg = BenchConfig {
        sizes: vec![12],
        k_values: vec![4],
        solvers: vec![SolverSpec::HadofSa],
        instances: 100,
        seed: 0,
        base: HadofConfig::default(),
        jobs: 4,
    };
    let rows = run_bench(&cfg).unwrap();
    assert_eq!(rows.len(), 100);
    let scaled: Vec<f64> = rows.iter().map(|r| r.scaled_avg.unwrap()).collect();
    let m = mean(&scaled);
    assert!(m >= 0.85, "mean scaled average {m}");
    for r in &rows {
        assert!(r.best_obj.unwrap() <= r.avg_obj.unwrap());
        assert!(r.best_obj.unwrap() >= r.reference_obj.unwrap() - 1e-9);
    }
}

#[test]
fn separable_run_recovers_sign_pattern() {
    let mut q = QuboMatrix::new(10).unwrap();
    for (i, d) in [3.0, -1.0, 7.5, -9.0, 1.0, -2.5, 4.0, -6.0, 1.5, -1.2].into_iter().enumerate() {
        q.set(i, i, d).unwrap();
    }
    let cfg = HadofConfig {
        k: 5,
        marginal_shots: 0,
        solver: SubSolver::Qaoa,
        ..HadofConfig::default()
    };
    let r = run_hadof(&q, &cfg).unwrap();
    assert_eq!(r.most_probable.assignment, brute_force(&q).unwrap().0);
}
