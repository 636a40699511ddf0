//! Variable partitioning and mean-field clamping.
//!
//! A sub-problem over a subset `S` keeps the couplings inside `S` verbatim.
//! Every variable outside `S` is treated as an independent Bernoulli
//! variable with mean `p_j`, and the objective is replaced by its
//! expectation over those variables. Couplings between `S` and the
//! complement fold into the sub-problem's linear terms; couplings inside the
//! complement fold into a constant offset.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::qubo::{Assignment, QuboMatrix};

/// Per-variable probability `P(x_i = 1)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MarginalVector(Vec<f64>);

impl MarginalVector {
    pub fn new(p: Vec<f64>) -> Result<Self> {
        if let Some(v) = p.iter().find(|v| !(0.0..=1.0).contains(*v)) {
            return Err(invalid(format!("marginal {v} outside [0, 1]")));
        }
        Ok(Self(p))
    }

    pub fn uniform(n: usize, value: f64) -> Result<Self> {
        Self::new(vec![value; n])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn get(&self, i: usize) -> f64 {
        self.0[i]
    }

    /// Writes `values[a]` to position `indices[a]`.
    pub fn scatter(&mut self, indices: &[usize], values: &MarginalVector) {
        assert_eq!(indices.len(), values.len());
        for (&g, &v) in indices.iter().zip(&values.0) {
            self.0[g] = v;
        }
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }
}

/// All marginals set to 0.5.
pub fn init_marginals(n: usize) -> Result<MarginalVector> {
    if n == 0 {
        return Err(invalid("need at least one variable"));
    }
    MarginalVector::uniform(n, 0.5)
}

/// Ordered disjoint cover of `0..n` by subsets of at most `k` variables.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubsetPlan {
    n: usize,
    k: usize,
    subsets: Vec<Vec<usize>>,
}

impl SubsetPlan {
    /// Validates that `subsets` is a disjoint cover of `0..n` with each
    /// subset nonempty, ascending and no larger than `k`.
    pub fn new(n: usize, k: usize, subsets: Vec<Vec<usize>>) -> Result<Self> {
        let mut seen = vec![false; n];
        for s in &subsets {
            if s.is_empty() || s.len() > k {
                return Err(invalid(format!(
                    "subset of size {} violates 1 <= size <= {k}",
                    s.len()
                )));
            }
            check_subset(s, n, &mut seen)?;
        }
        if let Some(missing) = seen.iter().position(|v| !v) {
            return Err(invalid(format!("variable {missing} is not covered")));
        }
        Ok(Self { n, k, subsets })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn subsets(&self) -> &[Vec<usize>] {
        &self.subsets
    }

    pub fn len(&self) -> usize {
        self.subsets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.subsets.is_empty()
    }

    /// Places each sub-assignment at its subset's global indices.
    pub fn assemble(&self, parts: &[&[u8]]) -> Result<Assignment> {
        if parts.len() != self.subsets.len() {
            return Err(invalid(format!(
                "expected {} sub-assignments, got {}",
                self.subsets.len(),
                parts.len()
            )));
        }
        let mut bits = vec![0u8; self.n];
        for (s, part) in self.subsets.iter().zip(parts) {
            if s.len() != part.len() {
                return Err(Error::LengthMismatch {
                    expected: s.len(),
                    got: part.len(),
                });
            }
            for (&g, &b) in s.iter().zip(part.iter()) {
                bits[g] = b;
            }
        }
        Assignment::from_bits(bits)
    }
}

fn check_subset(s: &[usize], n: usize, seen: &mut [bool]) -> Result<()> {
    for &g in s {
        if g >= n {
            return Err(Error::IndexOutOfRange { index: g, n });
        }
        if std::mem::replace(&mut seen[g], true) {
            return Err(Error::DuplicateIndex(g));
        }
    }
    if s.windows(2).any(|w| w[0] > w[1]) {
        return Err(invalid("subset indices must be ascending"));
    }
    Ok(())
}

/// Strategy for grouping variables into sub-problems.
pub trait PartitionStrategy {
    fn partition(&self, n: usize, k: usize) -> Result<SubsetPlan>;
}

/// Contiguous index blocks `[0, k), [k, 2k), ...`; the last block holds the
/// remainder when `k` does not divide `n`.
#[derive(Debug, Clone, Copy, Default)]
pub struct ContiguousBlocks;

impl PartitionStrategy for ContiguousBlocks {
    fn partition(&self, n: usize, k: usize) -> Result<SubsetPlan> {
        if k == 0 || k > n {
            return Err(invalid(format!("need 1 <= k <= n, got k = {k}, n = {n}")));
        }
        let subsets = (0..n)
            .step_by(k)
            .map(|start| (start..(start + k).min(n)).collect())
            .collect();
        Ok(SubsetPlan { n, k, subsets })
    }
}

pub fn partition_variables(n: usize, k: usize) -> Result<SubsetPlan> {
    ContiguousBlocks.partition(n, k)
}

/// A clamped sub-problem: `f(y) = sub_q(y) + offset` is the expected global
/// objective when the subset takes value `y` and every other variable is an
/// independent Bernoulli draw with its marginal.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubProblem {
    pub indices: Vec<usize>,
    pub sub_q: QuboMatrix,
    pub offset: f64,
}

impl SubProblem {
    pub fn k(&self) -> usize {
        self.indices.len()
    }

    /// The whole problem as a single sub-problem.
    pub fn whole(q: &QuboMatrix) -> Self {
        Self {
            indices: (0..q.n()).collect(),
            sub_q: q.clone(),
            offset: 0.0,
        }
    }

    /// Expected global objective for sub-assignment `y`.
    pub fn energy(&self, y: &[u8]) -> f64 {
        self.sub_q.evaluate_bits(y) + self.offset
    }
}

pub fn build_sub_qubo(q: &QuboMatrix, subset: &[usize], p: &MarginalVector) -> Result<SubProblem> {
    let n = q.n();
    if subset.is_empty() {
        return Err(Error::Empty("subset"));
    }
    if p.len() != n {
        return Err(Error::LengthMismatch {
            expected: n,
            got: p.len(),
        });
    }
    let mut inside = vec![false; n];
    check_subset(subset, n, &mut inside)?;
    let p = p.as_slice();

    let k = subset.len();
    let mut sub_q = QuboMatrix::new(k)?;
    for (a, &ga) in subset.iter().enumerate() {
        let mut linear = q.get(ga, ga);
        for j in (0..n).filter(|&j| !inside[j]) {
            linear += q.coupling(ga, j) * p[j];
        }
        sub_q.set(a, a, linear)?;
        for (b, &gb) in subset.iter().enumerate().skip(a + 1) {
            sub_q.set(a, b, q.get(ga, gb))?;
        }
    }

    let mut offset = 0.0;
    for j in (0..n).filter(|&j| !inside[j]) {
        let row = q.upper_row(j);
        let mut acc = row[0];
        for (d, &w) in row[1..].iter().enumerate() {
            let l = j + 1 + d;
            if !inside[l] {
                acc += w * p[l];
            }
        }
        offset += acc * p[j];
    }

    Ok(SubProblem {
        indices: subset.to_vec(),
        sub_q,
        offset,
    })
}
