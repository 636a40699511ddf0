use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::decomposition::MarginalVector;
use crate::error::{invalid, Error, Result};
use crate::qubo::Assignment;

/// Bitstrings drawn from a sub-solver, kept in draw order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleSet {
    width: usize,
    draws: Vec<Assignment>,
}

impl SampleSet {
    pub fn new(width: usize) -> Self {
        Self {
            width,
            draws: Vec::new(),
        }
    }

    pub fn from_draws(width: usize, draws: Vec<Assignment>) -> Result<Self> {
        if let Some(d) = draws.iter().find(|d| d.len() != width) {
            return Err(Error::LengthMismatch {
                expected: width,
                got: d.len(),
            });
        }
        Ok(Self { width, draws })
    }

    /// Builds an unordered set from `(bitstring, count)` pairs; draws are
    /// laid out in the given order.
    pub fn from_counts<'a, I>(width: usize, counts: I) -> Result<Self>
    where
        I: IntoIterator<Item = (&'a str, u64)>,
    {
        let mut draws = Vec::new();
        for (s, c) in counts {
            if c == 0 {
                return Err(invalid("counts must be positive"));
            }
            let a = Assignment::parse(s)?;
            draws.extend(std::iter::repeat_n(a, c as usize));
        }
        Self::from_draws(width, draws)
    }

    pub(crate) fn push(&mut self, draw: Assignment) {
        debug_assert_eq!(draw.len(), self.width);
        self.draws.push(draw);
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn total(&self) -> usize {
        self.draws.len()
    }

    pub fn is_empty(&self) -> bool {
        self.draws.is_empty()
    }

    /// Draws in sampling order.
    pub fn draws(&self) -> &[Assignment] {
        &self.draws
    }

    pub fn counts(&self) -> BTreeMap<&Assignment, u64> {
        let mut m = BTreeMap::new();
        for d in &self.draws {
            *m.entry(d).or_insert(0) += 1;
        }
        m
    }

    /// Most frequent bitstring; ties go to the lexicographically smallest
    /// string (`x_0` compared first).
    pub fn mode(&self) -> Option<&Assignment> {
        // BTreeMap iterates in ascending order, so the first maximum wins.
        let mut best: Option<(&Assignment, u64)> = None;
        for (a, c) in self.counts() {
            if best.is_none_or(|(_, bc)| c > bc) {
                best = Some((a, c));
            }
        }
        best.map(|(a, _)| a)
    }

    /// Per-bit frequency of ones.
    pub fn marginals(&self) -> Result<MarginalVector> {
        if self.draws.is_empty() {
            return Err(Error::Empty("sample set"));
        }
        let mut ones = vec![0u64; self.width];
        for d in &self.draws {
            for (acc, &b) in ones.iter_mut().zip(d.bits()) {
                *acc += b as u64;
            }
        }
        let total = self.draws.len() as f64;
        MarginalVector::new(ones.into_iter().map(|c| c as f64 / total).collect())
    }
}
