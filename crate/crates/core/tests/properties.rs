use proptest::prelude::*;

use hadof::decomposition::SubsetPlan;
use hadof::engine::{run_hadof_with_plan, UpdateMode};
use hadof::ising::spins_from_index;
use hadof::qaoa::scaled_energies;
use hadof::{
    aggregate, anneal_schedule, apply_qaoa, brute_force, build_sub_qubo, generate_random_qubo,
    parse_qubo, partition_variables, qubit_marginals, run_hadof, serialize_qubo, solution_stats,
    Assignment, HadofConfig, MarginalVector, QuboMatrix, SampleSet, StateVector, SubSolver,
};

const GRID: [f64; 5] = [0.0, 0.25, 0.5, 0.75, 1.0];

fn qubo(n: usize, values: &[f64]) -> QuboMatrix {
    let mut q = QuboMatrix::new(n).unwrap();
    let mut it = values.iter();
    for i in 0..n {
        for j in i..n {
            q.set(i, j, *it.next().unwrap()).unwrap();
        }
    }
    q
}

/// Random QUBO with `n` in `lo..=hi` and entries in [-10, 10].
fn arb_qubo(lo: usize, hi: usize) -> impl Strategy<Value = QuboMatrix> {
    (lo..=hi).prop_flat_map(|n| {
        proptest::collection::vec(-10.0f64..10.0, n * (n + 1) / 2).prop_map(move |v| qubo(n, &v))
    })
}

fn bits_of(index: usize, n: usize) -> Vec<u8> {
    (0..n).map(|j| (index >> j & 1) as u8).collect()
}

/// Objective expectation with `subset` fixed to `y` and every other
/// variable an independent Bernoulli(p_j), by enumerating the complement.
fn complement_expectation(q: &QuboMatrix, subset: &[usize], y: &[u8], p: &[f64]) -> f64 {
    let rest: Vec<usize> = (0..q.n()).filter(|i| !subset.contains(i)).collect();
    let mut bits = vec![0u8; q.n()];
    for (&i, &b) in subset.iter().zip(y) {
        bits[i] = b;
    }
    (0..1usize << rest.len())
        .map(|mask| {
            let mut w = 1.0;
            for (t, &j) in rest.iter().enumerate() {
                bits[j] = (mask >> t & 1) as u8;
                w *= if bits[j] == 1 { p[j] } else { 1.0 - p[j] };
            }
            w * q.evaluate_bits(&bits)
        })
        .sum()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn ising_matches_qubo(q in arb_qubo(1, 10)) {
        let ising = q.to_ising();
        for index in 0..1usize << q.n() {
            let x = Assignment::from_index(index as u64, q.n());
            let spins = spins_from_index(index as u64, q.n());
            prop_assert!((q.evaluate(&x).unwrap() - ising.energy(&spins)).abs() < 1e-9);
        }
    }

    #[test]
    fn evaluate_is_affine_per_coordinate(q in arb_qubo(1, 9), index in any::<usize>(), i in any::<usize>()) {
        let n = q.n();
        let i = i % n;
        let mut bits = bits_of(index % (1 << n), n);
        bits[i] = 1;
        let on = q.evaluate_bits(&bits);
        bits[i] = 0;
        let off = q.evaluate_bits(&bits);
        let mut analytic = q.get(i, i);
        for j in (0..n).filter(|&j| j != i && bits[j] == 1) {
            analytic += q.coupling(i, j);
        }
        prop_assert!((on - off - analytic).abs() < 1e-9);
        prop_assert!((q.partial(i, &bits) - analytic).abs() < 1e-9);
    }

    #[test]
    fn generation_is_seeded(n in 2usize..30, seed in any::<u64>()) {
        let a = generate_random_qubo(n, seed, -10.0, 10.0).unwrap();
        prop_assert_eq!(&a, &generate_random_qubo(n, seed, -10.0, 10.0).unwrap());
        prop_assert_ne!(&a, &generate_random_qubo(n, seed.wrapping_add(1), -10.0, 10.0).unwrap());
    }

    #[test]
    fn text_format_round_trips(q in arb_qubo(1, 12)) {
        prop_assert_eq!(parse_qubo(&serialize_qubo(&q)).unwrap(), q);
    }

    #[test]
    fn clamping_identity(
        q in arb_qubo(1, 8),
        mask in any::<usize>(),
        grid in proptest::collection::vec(0usize..5, 8),
    ) {
        let n = q.n();
        let mask = 1 + mask % ((1 << n) - 1);
        let subset: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).collect();
        let p: Vec<f64> = grid[..n].iter().map(|&g| GRID[g]).collect();
        let sub = build_sub_qubo(&q, &subset, &MarginalVector::new(p.clone()).unwrap()).unwrap();
        for ymask in 0..1usize << subset.len() {
            let y = bits_of(ymask, subset.len());
            let want = complement_expectation(&q, &subset, &y, &p);
            prop_assert!((sub.energy(&y) - want).abs() < 1e-9);
        }
    }

    #[test]
    fn partition_covers_once(n in 1usize..200, k in 1usize..40) {
        let k = k.min(n);
        let plan = partition_variables(n, k).unwrap();
        let mut seen = vec![0u32; n];
        for block in plan.subsets() {
            prop_assert!(!block.is_empty() && block.len() <= k);
            for &i in block {
                seen[i] += 1;
            }
        }
        prop_assert!(seen.iter().all(|&c| c == 1));
        prop_assert_eq!(plan.len(), n.div_ceil(k));

        let parts: Vec<Vec<u8>> = plan.subsets().iter().map(|b| b.iter().map(|&i| (i % 2) as u8).collect()).collect();
        let refs: Vec<&[u8]> = parts.iter().map(Vec::as_slice).collect();
        let global = plan.assemble(&refs).unwrap();
        prop_assert!(global.bits().iter().enumerate().all(|(i, &b)| b == (i % 2) as u8));
    }

    #[test]
    fn full_subset_is_identity(q in arb_qubo(1, 10), g in 0usize..5) {
        let all: Vec<usize> = (0..q.n()).collect();
        let sub = build_sub_qubo(&q, &all, &MarginalVector::uniform(q.n(), GRID[g]).unwrap()).unwrap();
        prop_assert_eq!(sub.sub_q, q);
        prop_assert_eq!(sub.offset, 0.0);
    }

    #[test]
    fn layers_preserve_norm(
        q in arb_qubo(1, 8),
        angles in proptest::collection::vec((-3.0f64..3.0, -3.0f64..3.0), 1..12),
    ) {
        let energies = scaled_energies(&q.to_ising());
        let mut state = StateVector::plus(q.n()).unwrap();
        for (beta, gamma) in angles {
            state.apply_cost_layer(&energies, gamma);
            prop_assert!((state.norm_sqr() - 1.0).abs() < 1e-9);
            state.apply_mixer_layer(beta);
            prop_assert!((state.norm_sqr() - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn cost_phase_keeps_probabilities(q in arb_qubo(1, 8), beta in -3.0f64..3.0, gamma in -3.0f64..3.0) {
        let energies = scaled_energies(&q.to_ising());
        let mut state = StateVector::plus(q.n()).unwrap();
        state.apply_mixer_layer(beta);
        state.apply_cost_layer(&energies, 0.3);
        let before = state.probabilities();
        state.apply_cost_layer(&energies, gamma);
        for (a, b) in before.iter().zip(state.probabilities()) {
            prop_assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn exact_marginals_in_unit_interval(q in arb_qubo(1, 8), depth in 0usize..=6) {
        let state = apply_qaoa(&q.to_ising(), &anneal_schedule(6).unwrap(), depth).unwrap();
        let m = qubit_marginals(&state, 0, 0);
        prop_assert!(m.as_slice().iter().all(|v| (0.0..=1.0).contains(v)));
    }

    #[test]
    fn aggregate_pairs_draws_in_order(
        draws in proptest::collection::vec((0u64..8, 0u64..4), 1..60),
    ) {
        let plan = partition_variables(5, 3).unwrap();
        let a = SampleSet::from_draws(3, draws.iter().map(|d| Assignment::from_index(d.0, 3)).collect()).unwrap();
        let b = SampleSet::from_draws(2, draws.iter().map(|d| Assignment::from_index(d.1, 2)).collect()).unwrap();
        let globals = aggregate(&[a, b], &plan).unwrap();
        prop_assert_eq!(globals.len(), draws.len());
        for (g, d) in globals.iter().zip(&draws) {
            prop_assert_eq!(g.to_index(), d.0 | d.1 << 3);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn stats_recomputable_and_bounded_by_oracle(seed in any::<u64>(), n in 4usize..=12, sa in any::<bool>()) {
        let q = generate_random_qubo(n, seed, -10.0, 10.0).unwrap();
        let cfg = HadofConfig {
            k: 4.min(n),
            p: 4,
            marginal_shots: 100,
            final_shots: 300,
            solver: if sa { SubSolver::Sa } else { SubSolver::Qaoa },
            seed,
            ..HadofConfig::default()
        };
        let r = run_hadof(&q, &cfg).unwrap();
        let (_, optimum) = brute_force(&q).unwrap();

        prop_assert_eq!(r.global_samples.len(), cfg.final_shots);
        let objectives: Vec<f64> = r.global_samples.iter().map(|s| q.evaluate(&s.assignment).unwrap()).collect();
        let min = objectives.iter().copied().fold(f64::INFINITY, f64::min);
        let mean = objectives.iter().sum::<f64>() / objectives.len() as f64;
        prop_assert_eq!(r.best.objective, min);
        prop_assert!((r.average_objective - mean).abs() < 1e-9);
        prop_assert!(r.best.objective <= r.average_objective);
        prop_assert!(objectives.iter().all(|&o| o >= optimum - 1e-9));
        prop_assert!(r.most_probable.objective >= optimum - 1e-9);
        if r.global_samples.iter().any(|s| s.assignment == r.most_probable.assignment) {
            prop_assert!(r.best.objective <= r.most_probable.objective);
        }
        for m in &r.marginal_trajectory {
            prop_assert!(m.as_slice().iter().all(|v| (0.0..=1.0).contains(v)));
        }

        let globals: Vec<Assignment> = r.global_samples.iter().map(|s| s.assignment.clone()).collect();
        let stats = solution_stats(&globals, &r.subset_samples, &r.plan, &q).unwrap();
        prop_assert_eq!(stats.best, r.best.clone());
        prop_assert_eq!(stats.most_probable, r.most_probable.clone());
    }

    #[test]
    fn snapshot_ignores_block_order(seed in any::<u64>(), sa in any::<bool>(), rotate in 1usize..4) {
        let q = generate_random_qubo(12, seed, -10.0, 10.0).unwrap();
        let cfg = HadofConfig {
            k: 3,
            p: 4,
            marginal_shots: 100,
            final_shots: 200,
            solver: if sa { SubSolver::Sa } else { SubSolver::Qaoa },
            update_mode: UpdateMode::Snapshot,
            seed,
            ..HadofConfig::default()
        };
        let plan = partition_variables(12, 3).unwrap();
        let mut blocks = plan.subsets().to_vec();
        blocks.rotate_left(rotate);
        blocks.swap(0, 1);
        let permuted = SubsetPlan::new(12, 3, blocks).unwrap();

        let a = run_hadof_with_plan(&q, &cfg, plan).unwrap();
        let b = run_hadof_with_plan(&q, &cfg, permuted).unwrap();
        prop_assert_eq!(a.marginal_trajectory, b.marginal_trajectory);
    }

    #[test]
    fn separable_marginals_saturate(
        magnitudes in proptest::collection::vec(5.0f64..=10.0, 10),
        signs in proptest::collection::vec(any::<bool>(), 10),
    ) {
        let mut q = QuboMatrix::new(10).unwrap();
        for (i, (&m, &neg)) in magnitudes.iter().zip(&signs).enumerate() {
            q.set(i, i, if neg { -m } else { m }).unwrap();
        }
        let cfg = HadofConfig {
            k: 5,
            marginal_shots: 0,
            final_shots: 200,
            solver: SubSolver::Qaoa,
            ..HadofConfig::default()
        };
        let r = run_hadof(&q, &cfg).unwrap();
        let last = r.marginal_trajectory.last().unwrap();
        for (i, &neg) in signs.iter().enumerate() {
            let target = if neg { 1.0 } else { 0.0 };
            prop_assert!((last.get(i) - target).abs() <= 0.05, "var {i}: {}", last.get(i));
        }
    }

    #[test]
    fn separable_mode_is_optimal(diag in proptest::collection::vec(
        prop_oneof![-10.0f64..=-1.0, 1.0f64..=10.0], 10,
    )) {
        let mut q = QuboMatrix::new(10).unwrap();
        for (i, &d) in diag.iter().enumerate() {
            q.set(i, i, d).unwrap();
        }
        let cfg = HadofConfig {
            k: 5,
            marginal_shots: 0,
            final_shots: 500,
            solver: SubSolver::Qaoa,
            ..HadofConfig::default()
        };
        let r = run_hadof(&q, &cfg).unwrap();
        let (opt, value) = brute_force(&q).unwrap();
        prop_assert_eq!(r.most_probable.assignment, opt);
        prop_assert_eq!(r.most_probable.objective, value);
    }
}
