//! Ising form of a QUBO.
//!
//! Spin convention: `x_i = (1 + z_i) / 2`, so `x_i = 1` maps to `z_i = +1`.

use serde::{Deserialize, Serialize};

use crate::qubo::QuboMatrix;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IsingModel {
    pub h: Vec<f64>,
    /// Nonzero couplings `(i, j, J_ij)` with `i < j`, row-major.
    pub couplings: Vec<(usize, usize, f64)>,
    pub offset: f64,
}

impl IsingModel {
    pub fn n(&self) -> usize {
        self.h.len()
    }

    /// `sum_i h_i z_i + sum_{i<j} J_ij z_i z_j + offset` for spins in `{-1, +1}`.
    pub fn energy(&self, spins: &[i8]) -> f64 {
        debug_assert_eq!(spins.len(), self.n());
        let mut e = self.offset;
        for (h, &z) in self.h.iter().zip(spins) {
            e += h * z as f64;
        }
        for &(i, j, w) in &self.couplings {
            e += w * (spins[i] * spins[j]) as f64;
        }
        e
    }

    /// Energies of all `2^n` basis states without the offset. Entry `idx`
    /// corresponds to `x_j = (idx >> j) & 1`.
    pub fn basis_energies(&self) -> Vec<f64> {
        let n = self.n();
        assert!(n < usize::BITS as usize);
        // dense coupling rows for the incremental update
        let mut rows = vec![0.0; n * n];
        for &(i, j, w) in &self.couplings {
            rows[i * n + j] += w;
            rows[j * n + i] += w;
        }
        let size = 1usize << n;
        let mut out = vec![0.0; size];
        out[0] = -self.h.iter().sum::<f64>() + self.couplings.iter().map(|c| c.2).sum::<f64>();
        for idx in 1..size {
            // flip the highest set bit t from z = -1 to z = +1; all bits above t are 0
            let t = usize::BITS as usize - 1 - idx.leading_zeros() as usize;
            let prev = idx ^ (1 << t);
            let row = &rows[t * n..t * n + n];
            let mut field = self.h[t];
            for (j, w) in row.iter().enumerate() {
                if j == t || *w == 0.0 {
                    continue;
                }
                let z = if (prev >> j) & 1 == 1 { 1.0 } else { -1.0 };
                field += w * z;
            }
            out[idx] = out[prev] + 2.0 * field;
        }
        out
    }

    /// Largest `|h_i|` or `|J_ij|`; zero for an empty Hamiltonian.
    pub fn max_abs_coefficient(&self) -> f64 {
        self.h
            .iter()
            .copied()
            .chain(self.couplings.iter().map(|c| c.2))
            .fold(0.0, |m, v| m.max(v.abs()))
    }
}

/// Converts `Q` to `(h, J, offset)` with
/// `h_i = Q_ii/2 + (sum_{j != i} Q_{ij})/4`, `J_ij = Q_ij/4` and
/// `offset = sum_i Q_ii/2 + sum_{i<j} Q_ij/4`.
pub fn to_ising(q: &QuboMatrix) -> IsingModel {
    let n = q.n();
    let mut h = vec![0.0; n];
    let mut couplings = Vec::new();
    let mut offset = 0.0;
    for i in 0..n {
        let row = q.upper_row(i);
        h[i] += row[0] / 2.0;
        offset += row[0] / 2.0;
        for (d, &w) in row[1..].iter().enumerate() {
            if w == 0.0 {
                continue;
            }
            let j = i + 1 + d;
            h[i] += w / 4.0;
            h[j] += w / 4.0;
            offset += w / 4.0;
            couplings.push((i, j, w / 4.0));
        }
    }
    IsingModel {
        h,
        couplings,
        offset,
    }
}

impl QuboMatrix {
    pub fn to_ising(&self) -> IsingModel {
        to_ising(self)
    }
}

/// Spins for basis index `idx` on `n` variables.
pub fn spins_from_index(idx: u64, n: usize) -> Vec<i8> {
    (0..n)
        .map(|j| if (idx >> j) & 1 == 1 { 1 } else { -1 })
        .collect()
}
