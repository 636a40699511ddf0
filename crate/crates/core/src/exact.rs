//! Exhaustive minimiser used as ground truth for small instances.
//!
//! Assignments are visited in reflected Gray-code order, so consecutive
//! states differ by one bit and each step costs O(n) for the local-field
//! update. Ties are broken toward the smallest assignment index
//! `sum_j x_j 2^j`.

use crate::error::{Error, Result};
use crate::qubo::{Assignment, QuboMatrix};

pub const DEFAULT_EXACT_CAP: usize = 24;

/// Energies within this distance count as ties; incremental updates drift
/// by round-off, so exact float equality is not usable.
const TIE_TOLERANCE: f64 = 1e-9;

pub fn brute_force(q: &QuboMatrix) -> Result<(Assignment, f64)> {
    brute_force_with_cap(q, DEFAULT_EXACT_CAP)
}

pub fn brute_force_with_cap(q: &QuboMatrix, cap: usize) -> Result<(Assignment, f64)> {
    let n = q.n();
    if n > cap || n >= 63 {
        return Err(Error::CapExceeded {
            what: "exhaustive search",
            got: n,
            cap: cap.min(62),
        });
    }
    let c = q.dense_couplings();
    let mut field = vec![0.0; n];
    let mut bits = vec![0u8; n];
    let mut energy = 0.0;
    let mut code = 0u64;
    let (mut best_e, mut best_idx) = (0.0, 0u64);

    for step in 1u64..(1u64 << n) {
        let i = step.trailing_zeros() as usize;
        let up = bits[i] == 0;
        let gain = c.linear[i] + field[i];
        energy += if up { gain } else { -gain };
        bits[i] ^= 1;
        code ^= 1 << i;
        let sign = if up { 1.0 } else { -1.0 };
        for (f, w) in field.iter_mut().zip(c.row(i)) {
            *f += sign * w;
        }
        if energy < best_e - TIE_TOLERANCE
            || (energy <= best_e + TIE_TOLERANCE && code < best_idx)
        {
            best_e = best_e.min(energy);
            best_idx = code;
        }
    }

    let best = Assignment::from_index(best_idx, n);
    let value = q.evaluate_bits(best.bits());
    Ok((best, value))
}
