//! Single-flip Metropolis simulated annealing over a sub-problem.
//!
//! The annealing ramp reuses the schedule's `gamma` values: stage `m` runs
//! at inverse temperature `beta_hot + (beta_cold - beta_hot) * gamma_m`, so
//! a depth-`l` solve stops partway down the same ramp the QAOA circuit
//! follows.

use rand::{RngCore, SeedableRng};
use serde::{Deserialize, Serialize};

use crate::decomposition::{MarginalVector, SubProblem};
use crate::error::{invalid, Error, Result};
use crate::qaoa::Schedule;
use crate::qubo::{Assignment, DenseCouplings};
use crate::rng::{unit_f64, Rng};
use crate::samples::SampleSet;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SaParams {
    pub sweeps_per_stage: usize,
    /// Independent restarts; each contributes its final state.
    pub reads: usize,
    pub beta_hot: f64,
    pub beta_cold: f64,
}

impl Default for SaParams {
    fn default() -> Self {
        Self {
            sweeps_per_stage: 10,
            reads: 5000,
            beta_hot: 0.1,
            beta_cold: 4.0,
        }
    }
}

impl SaParams {
    pub fn with_reads(self, reads: usize) -> Self {
        Self { reads, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        if self.sweeps_per_stage == 0 || self.reads == 0 {
            return Err(invalid("sweeps_per_stage and reads must be positive"));
        }
        if !(self.beta_hot > 0.0 && self.beta_cold > self.beta_hot) {
            return Err(invalid(format!(
                "need 0 < beta_hot < beta_cold, got {} and {}",
                self.beta_hot, self.beta_cold
            )));
        }
        Ok(())
    }

    /// Inverse temperature at annealing fraction `t` in `[0, 1]`.
    pub fn beta_at(&self, t: f64) -> f64 {
        self.beta_hot + (self.beta_cold - self.beta_hot) * t
    }
}

/// One Metropolis chain with cached local fields.
pub struct MetropolisChain<'a> {
    couplings: &'a DenseCouplings,
    bits: Vec<u8>,
    /// `field[i] = sum_{j != i} Q_ij x_j`
    field: Vec<f64>,
    energy: f64,
}

impl<'a> MetropolisChain<'a> {
    pub fn new(couplings: &'a DenseCouplings, bits: Vec<u8>) -> Self {
        let n = couplings.n;
        assert_eq!(bits.len(), n, "chain state must have one bit per variable");
        let mut field = vec![0.0; n];
        let mut energy = 0.0;
        for (i, _) in bits.iter().enumerate().filter(|(_, &b)| b != 0) {
            energy += couplings.linear[i];
            for (f, w) in field.iter_mut().zip(couplings.row(i)) {
                *f += w;
            }
        }
        // each pair was counted from both ends
        for (_, f) in bits.iter().zip(&field).filter(|(&b, _)| b != 0) {
            energy += f / 2.0;
        }
        Self {
            couplings,
            bits,
            field,
            energy,
        }
    }

    pub fn bits(&self) -> &[u8] {
        &self.bits
    }

    /// Energy tracked incrementally since construction.
    pub fn energy(&self) -> f64 {
        self.energy
    }

    /// One sequential pass of single-flip Metropolis moves at `beta`.
    pub fn sweep<R: rand::RngCore>(&mut self, beta: f64, rng: &mut R) {
        let c = self.couplings;
        for i in 0..c.n {
            let up = self.bits[i] == 0;
            let gain = c.linear[i] + self.field[i];
            let delta = if up { gain } else { -gain };
            if delta > 0.0 && unit_f64(rng) >= (-beta * delta).exp() {
                continue;
            }
            self.bits[i] ^= 1;
            self.energy += delta;
            let sign = if up { 1.0 } else { -1.0 };
            for (f, w) in self.field.iter_mut().zip(c.row(i)) {
                *f += sign * w;
            }
        }
    }
}

/// Per-read generator: stream `read` of the ChaCha8 generator keyed by `seed`.
fn read_rng(seed: u64, read: usize) -> Rng {
    let mut rng = Rng::seed_from_u64(seed);
    rng.set_stream(read as u64);
    rng
}

/// Anneals `params.reads` independent chains through stages `1..=depth`
/// and returns their final states in read order.
pub fn sa_solve(
    sub: &SubProblem,
    schedule: &Schedule,
    depth: usize,
    params: &SaParams,
    seed: u64,
) -> Result<SampleSet> {
    if sub.indices.is_empty() {
        return Err(Error::Empty("subset"));
    }
    if depth == 0 || depth > schedule.p() {
        return Err(invalid(format!(
            "depth {depth} outside 1..={}",
            schedule.p()
        )));
    }
    params.validate()?;
    let couplings = sub.sub_q.dense_couplings();
    let n = couplings.n;
    let betas: Vec<f64> = schedule.gammas()[..depth]
        .iter()
        .map(|&g| params.beta_at(g))
        .collect();

    let mut out = SampleSet::new(n);
    for read in 0..params.reads {
        let mut rng = read_rng(seed, read);
        let init = (0..n).map(|_| (rng.next_u32() >> 31) as u8).collect();
        let mut chain = MetropolisChain::new(&couplings, init);
        for &beta in &betas {
            for _ in 0..params.sweeps_per_stage {
                chain.sweep(beta, &mut rng);
            }
        }
        out.push(Assignment::from_bits(chain.bits).expect("chain bits are binary"));
    }
    Ok(out)
}

/// Per-variable frequency of ones over all reads.
pub fn sa_marginals(samples: &SampleSet) -> Result<MarginalVector> {
    samples.marginals()
}
