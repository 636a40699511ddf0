//! Dense statevector QAOA with a fixed annealing ramp.
//!
//! Qubit `j` is bit `j` of the basis-state index (bit 0 least significant)
//! and a set bit means `x_j = 1`. Each layer applies the cost phase
//! `exp(-i gamma_m E(z) / s)` followed by the mixer `exp(+i beta_m X_j)` on
//! every qubit, starting from `|+>^k`. `E` is the Ising energy without its
//! offset and `s` is the largest absolute Ising coefficient, so the ramp
//! sees an O(1) energy scale regardless of the instance. The mixer is the
//! propagator of `-sum_j X_j`, whose ground state is `|+>^k`; with
//! `beta: 1 -> 0` and `gamma: 0 -> 1` the circuit is a Trotterised anneal
//! from that ground state toward the cost ground state.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::decomposition::MarginalVector;
use crate::error::{invalid, Error, Result};
use crate::ising::IsingModel;
use crate::qubo::Assignment;
use crate::rng::{rng_from_seed, unit_f64};
use crate::samples::SampleSet;

/// Largest register the simulator accepts (16 MiB of amplitudes).
pub const QUBIT_CAP: usize = 20;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Schedule {
    betas: Vec<f64>,
    gammas: Vec<f64>,
}

impl Schedule {
    pub fn new(betas: Vec<f64>, gammas: Vec<f64>) -> Result<Self> {
        if betas.is_empty() || betas.len() != gammas.len() {
            return Err(invalid(format!(
                "schedule needs equal nonzero lengths, got {} betas and {} gammas",
                betas.len(),
                gammas.len()
            )));
        }
        Ok(Self { betas, gammas })
    }

    /// Number of layers.
    pub fn p(&self) -> usize {
        self.betas.len()
    }

    pub fn betas(&self) -> &[f64] {
        &self.betas
    }

    pub fn gammas(&self) -> &[f64] {
        &self.gammas
    }

    /// `(beta_m, gamma_m)` for 1-based layer `m`.
    pub fn layer(&self, m: usize) -> (f64, f64) {
        (self.betas[m - 1], self.gammas[m - 1])
    }
}

/// Linear ramp with `beta_m = 1 - m/p` and `gamma_m = m/p` for `m = 1..=p`.
pub fn anneal_schedule(p: usize) -> Result<Schedule> {
    if p == 0 {
        return Err(invalid("schedule needs at least one layer"));
    }
    let pf = p as f64;
    let betas = (1..=p).map(|m| 1.0 - m as f64 / pf).collect();
    let gammas = (1..=p).map(|m| m as f64 / pf).collect();
    Schedule::new(betas, gammas)
}

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    k: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    /// Uniform superposition `|+>^k`.
    pub fn plus(k: usize) -> Result<Self> {
        check_qubits(k)?;
        let size = 1usize << k;
        let a = Complex64::new(1.0 / (size as f64).sqrt(), 0.0);
        Ok(Self {
            k,
            amps: vec![a; size],
        })
    }

    /// Computational basis state `|index>`.
    pub fn basis(k: usize, index: usize) -> Result<Self> {
        check_qubits(k)?;
        let size = 1usize << k;
        if index >= size {
            return Err(Error::IndexOutOfRange { index, n: size });
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); size];
        amps[index] = Complex64::new(1.0, 0.0);
        Ok(Self { k, amps })
    }

    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self> {
        if !amps.len().is_power_of_two() {
            return Err(invalid("amplitude count must be a power of two"));
        }
        let k = amps.len().trailing_zeros() as usize;
        check_qubits(k)?;
        Ok(Self { k, amps })
    }

    pub fn qubits(&self) -> usize {
        self.k
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Born probabilities of every basis state.
    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    /// Multiplies amplitude `z` by `exp(-i gamma energies[z])`.
    pub fn apply_cost_layer(&mut self, energies: &[f64], gamma: f64) {
        assert_eq!(energies.len(), self.amps.len());
        for (a, &e) in self.amps.iter_mut().zip(energies) {
            *a *= Complex64::from_polar(1.0, -gamma * e);
        }
    }

    /// Applies `exp(+i beta X)` to every qubit.
    pub fn apply_mixer_layer(&mut self, beta: f64) {
        let (s, c) = beta.sin_cos();
        let is = Complex64::new(0.0, s);
        for q in 0..self.k {
            let stride = 1usize << q;
            for block in (0..self.amps.len()).step_by(stride << 1) {
                for lo in block..block + stride {
                    let hi = lo + stride;
                    let (a0, a1) = (self.amps[lo], self.amps[hi]);
                    self.amps[lo] = a0 * c + a1 * is;
                    self.amps[hi] = a0 * is + a1 * c;
                }
            }
        }
    }

    /// Exact per-qubit probability of reading 1, normalized by the total
    /// probability. Each qubit's 0 and 1 halves are summed pairwise in the
    /// same order, so a state symmetric in that qubit gives exactly 0.5.
    pub fn exact_marginals(&self) -> MarginalVector {
        let probs = self.probabilities();
        let ones = (0..self.k)
            .map(|q| {
                let bit = 1usize << q;
                let (mut zero, mut one) = (0.0, 0.0);
                for idx in (0..probs.len()).filter(|i| i & bit == 0) {
                    zero += probs[idx];
                    one += probs[idx | bit];
                }
                let total = zero + one;
                if total > 0.0 {
                    (one / total).min(1.0)
                } else {
                    0.5
                }
            })
            .collect();
        MarginalVector::new(ones).expect("normalized marginals are in range")
    }
}

fn check_qubits(k: usize) -> Result<()> {
    if k == 0 {
        return Err(invalid("register needs at least one qubit"));
    }
    if k > QUBIT_CAP {
        return Err(Error::CapExceeded {
            what: "qubit register",
            got: k,
            cap: QUBIT_CAP,
        });
    }
    Ok(())
}

/// Basis energies divided by the largest absolute Ising coefficient.
pub fn scaled_energies(ising: &IsingModel) -> Vec<f64> {
    let mut e = ising.basis_energies();
    let scale = ising.max_abs_coefficient();
    if scale > 0.0 {
        for v in &mut e {
            *v /= scale;
        }
    }
    e
}

/// Runs layers `1..=depth` of `schedule` on `|+>^k`.
pub fn apply_qaoa(ising: &IsingModel, schedule: &Schedule, depth: usize) -> Result<StateVector> {
    if depth > schedule.p() {
        return Err(invalid(format!(
            "depth {depth} exceeds schedule length {}",
            schedule.p()
        )));
    }
    let mut state = StateVector::plus(ising.n())?;
    if depth == 0 {
        return Ok(state);
    }
    let energies = scaled_energies(ising);
    for m in 1..=depth {
        let (beta, gamma) = schedule.layer(m);
        state.apply_cost_layer(&energies, gamma);
        state.apply_mixer_layer(beta);
    }
    Ok(state)
}

/// Inverse-CDF sampler over basis indices.
struct BornSampler {
    cdf: Vec<f64>,
}

impl BornSampler {
    fn new(state: &StateVector) -> Self {
        let mut acc = 0.0;
        let cdf = state
            .amps
            .iter()
            .map(|a| {
                acc += a.norm_sqr();
                acc
            })
            .collect();
        Self { cdf }
    }

    fn draw<R: rand::RngCore>(&self, rng: &mut R) -> usize {
        let total = *self.cdf.last().expect("nonempty state");
        let u = unit_f64(rng) * total;
        self.cdf
            .partition_point(|&c| c <= u)
            .min(self.cdf.len() - 1)
    }
}

/// Per-qubit marginals. `shots == 0` returns the exact Born marginals;
/// otherwise the register is measured `shots` times and each qubit's
/// empirical frequency of 1 is returned.
pub fn qubit_marginals(state: &StateVector, shots: usize, seed: u64) -> MarginalVector {
    if shots == 0 {
        return state.exact_marginals();
    }
    let sampler = BornSampler::new(state);
    let mut rng = rng_from_seed(seed);
    let mut ones = vec![0u64; state.k];
    for _ in 0..shots {
        let idx = sampler.draw(&mut rng);
        for (q, acc) in ones.iter_mut().enumerate() {
            *acc += ((idx >> q) & 1) as u64;
        }
    }
    MarginalVector::new(ones.into_iter().map(|c| c as f64 / shots as f64).collect())
        .expect("frequencies are in range")
}

/// Draws `shots` bitstrings from the Born distribution, in order.
pub fn sample(state: &StateVector, shots: usize, seed: u64) -> Result<SampleSet> {
    if shots == 0 {
        return Err(invalid("need at least one shot"));
    }
    let sampler = BornSampler::new(state);
    let mut rng = rng_from_seed(seed);
    let mut set = SampleSet::new(state.k);
    for _ in 0..shots {
        let idx = sampler.draw(&mut rng);
        set.push(Assignment::from_index(idx as u64, state.k));
    }
    Ok(set)
}
