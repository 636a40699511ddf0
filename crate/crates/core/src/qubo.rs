//! QUBO matrices, binary assignments, seeded instance generation and the
//! plain-text instance format.

use std::fmt::{self, Write as _};

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::rng::{rng_from_seed, unit_f64};

/// Upper-triangular QUBO coefficient matrix.
///
/// The objective is `sum_{i <= j} Q_ij x_i x_j`; diagonal entries act as
/// linear terms because `x_i^2 = x_i`. Entries below the diagonal are never
/// stored and read as zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuboMatrix {
    n: usize,
    /// Packed upper triangle, row-major: row `i` holds columns `i..n`.
    upper: Vec<f64>,
}

#[inline]
fn row_offset(n: usize, i: usize) -> usize {
    i * n - i * i.saturating_sub(1) / 2
}

impl QuboMatrix {
    /// All-zero matrix on `n >= 1` variables.
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(invalid("a QUBO needs at least one variable"));
        }
        Ok(Self {
            n,
            upper: vec![0.0; n * (n + 1) / 2],
        })
    }

    /// Builds a matrix from `(i, j, value)` triples with `i <= j`.
    /// Repeated keys are rejected.
    pub fn from_entries<I>(n: usize, entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, f64)>,
    {
        let mut q = Self::new(n)?;
        let mut seen = vec![false; q.upper.len()];
        for (i, j, v) in entries {
            let idx = q.index(i, j)?;
            if std::mem::replace(&mut seen[idx], true) {
                return Err(invalid(format!("duplicate entry ({i}, {j})")));
            }
            q.upper[idx] = v;
        }
        Ok(q)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    fn index(&self, i: usize, j: usize) -> Result<usize> {
        if i >= self.n {
            return Err(Error::IndexOutOfRange { index: i, n: self.n });
        }
        if j >= self.n {
            return Err(Error::IndexOutOfRange { index: j, n: self.n });
        }
        if j < i {
            return Err(invalid(format!(
                "entry ({i}, {j}) lies below the diagonal"
            )));
        }
        Ok(row_offset(self.n, i) + (j - i))
    }

    /// `Q_ij`; zero for `i > j`. Panics on out-of-range indices.
    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        assert!(i < self.n && j < self.n, "index out of range");
        if j < i {
            0.0
        } else {
            self.upper[row_offset(self.n, i) + (j - i)]
        }
    }

    /// Coefficient of the `x_i x_j` monomial regardless of argument order.
    #[inline]
    pub fn coupling(&self, i: usize, j: usize) -> f64 {
        if i <= j {
            self.get(i, j)
        } else {
            self.get(j, i)
        }
    }

    pub fn set(&mut self, i: usize, j: usize, value: f64) -> Result<()> {
        let idx = self.index(i, j)?;
        self.upper[idx] = value;
        Ok(())
    }

    pub fn add(&mut self, i: usize, j: usize, value: f64) -> Result<()> {
        let idx = self.index(i, j)?;
        self.upper[idx] += value;
        Ok(())
    }

    /// Row `i` of the upper triangle, i.e. `Q_ii, Q_i(i+1), ..., Q_i(n-1)`.
    #[inline]
    pub fn upper_row(&self, i: usize) -> &[f64] {
        let start = row_offset(self.n, i);
        &self.upper[start..start + (self.n - i)]
    }

    /// Iterates over nonzero `(i, j, Q_ij)` entries in row-major order.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.n).flat_map(move |i| {
            self.upper_row(i)
                .iter()
                .enumerate()
                .filter(|(_, v)| **v != 0.0)
                .map(move |(d, v)| (i, i + d, *v))
        })
    }

    /// Objective value `x^T Q x`.
    pub fn evaluate(&self, x: &Assignment) -> Result<f64> {
        if x.len() != self.n {
            return Err(Error::LengthMismatch {
                expected: self.n,
                got: x.len(),
            });
        }
        Ok(self.evaluate_bits(x.bits()))
    }

    /// Objective value for a raw 0/1 slice of length `n`.
    pub fn evaluate_bits(&self, bits: &[u8]) -> f64 {
        debug_assert_eq!(bits.len(), self.n);
        let mut total = 0.0;
        for i in 0..self.n {
            if bits[i] == 0 {
                continue;
            }
            let row = self.upper_row(i);
            total += row[0];
            for (d, q) in row[1..].iter().enumerate() {
                if bits[i + 1 + d] != 0 {
                    total += q;
                }
            }
        }
        total
    }

    /// `f(x | x_i = 1) - f(x | x_i = 0)`, i.e. `Q_ii + sum_{j != i} Q_{ij} x_j`.
    pub fn partial(&self, i: usize, bits: &[u8]) -> f64 {
        let mut g = self.get(i, i);
        for (j, &b) in bits.iter().enumerate() {
            if j != i && b != 0 {
                g += self.coupling(i, j);
            }
        }
        g
    }

    /// Dense symmetric coupling rows with a zero diagonal, plus the linear
    /// terms. Used by the local-search routines for O(1) flip deltas.
    pub fn dense_couplings(&self) -> DenseCouplings {
        let n = self.n;
        let mut sym = vec![0.0; n * n];
        let mut linear = vec![0.0; n];
        for i in 0..n {
            let row = self.upper_row(i);
            linear[i] = row[0];
            for (d, &q) in row[1..].iter().enumerate() {
                let j = i + 1 + d;
                sym[i * n + j] = q;
                sym[j * n + i] = q;
            }
        }
        DenseCouplings { n, linear, sym }
    }
}

/// Symmetric `n x n` coupling matrix with zero diagonal plus linear terms.
pub struct DenseCouplings {
    pub n: usize,
    pub linear: Vec<f64>,
    pub sym: Vec<f64>,
}

impl DenseCouplings {
    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.sym[i * self.n..(i + 1) * self.n]
    }
}

/// A binary assignment `x in {0, 1}^n`, stored one bit per byte.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Assignment(Vec<u8>);

impl Assignment {
    pub fn zeros(n: usize) -> Self {
        Self(vec![0; n])
    }

    /// Validates that every entry is 0 or 1.
    pub fn from_bits(bits: Vec<u8>) -> Result<Self> {
        if let Some(b) = bits.iter().find(|b| **b > 1) {
            return Err(invalid(format!("bit value {b} is not 0 or 1")));
        }
        Ok(Self(bits))
    }

    /// Bit `j` of `index` becomes `x_j`.
    pub fn from_index(index: u64, n: usize) -> Self {
        Self((0..n).map(|j| ((index >> j) & 1) as u8).collect())
    }

    /// Inverse of [`Assignment::from_index`]; requires `n <= 64`.
    pub fn to_index(&self) -> u64 {
        assert!(self.0.len() <= 64);
        self.0
            .iter()
            .enumerate()
            .fold(0u64, |acc, (j, &b)| acc | ((b as u64) << j))
    }

    /// Parses a string of `0`/`1` characters, `x_0` first.
    pub fn parse(s: &str) -> Result<Self> {
        s.chars()
            .map(|c| match c {
                '0' => Ok(0),
                '1' => Ok(1),
                _ => Err(invalid(format!("'{c}' is not a bit"))),
            })
            .collect::<Result<Vec<u8>>>()
            .map(Self)
    }

    pub fn bits(&self) -> &[u8] {
        &self.0
    }

    pub fn into_bits(self) -> Vec<u8> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl fmt::Display for Assignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.0 {
            f.write_char(if b == 0 { '0' } else { '1' })?;
        }
        Ok(())
    }
}

/// Random instance with every upper-triangular entry (diagonal included)
/// drawn i.i.d. uniform on `[lo, hi)`.
///
/// The generator is ChaCha8 seeded through `seed_from_u64(seed)`; entries
/// are filled row-major over `i <= j`, each as
/// `lo + (hi - lo) * (next_u64 >> 11) * 2^-53`. The output is therefore
/// identical on every platform.
pub fn generate_random_qubo(n: usize, seed: u64, lo: f64, hi: f64) -> Result<QuboMatrix> {
    if !lo.is_finite() || !hi.is_finite() || lo >= hi {
        return Err(invalid(format!("need finite lo < hi, got [{lo}, {hi}]")));
    }
    let mut q = QuboMatrix::new(n)?;
    let mut rng = rng_from_seed(seed);
    let width = hi - lo;
    for v in q.upper.iter_mut() {
        *v = lo + width * unit_f64(&mut rng);
    }
    Ok(q)
}

/// Writes the text form: `qubo <n>` followed by one `i j value` line per
/// nonzero entry. Values use the shortest representation that parses back
/// to the same `f64`.
pub fn serialize_qubo(q: &QuboMatrix) -> String {
    let mut out = String::with_capacity(16 + q.upper.len() * 24);
    let _ = writeln!(out, "qubo {}", q.n);
    for (i, j, v) in q.entries() {
        let _ = writeln!(out, "{i} {j} {v}");
    }
    out
}

/// Parses the text form written by [`serialize_qubo`]. Blank lines and lines
/// starting with `#` are ignored.
pub fn parse_qubo(text: &str) -> Result<QuboMatrix> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(no, l)| (no + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));

    let (hline, header) = lines.next().ok_or(Error::Parse {
        line: 1,
        msg: "missing `qubo <n>` header".into(),
    })?;
    let mut head = header.split_whitespace();
    let n = match (head.next(), head.next(), head.next()) {
        (Some("qubo"), Some(n), None) => n.parse::<usize>().map_err(|_| Error::Parse {
            line: hline,
            msg: format!("bad variable count `{n}`"),
        })?,
        _ => {
            return Err(Error::Parse {
                line: hline,
                msg: format!("expected `qubo <n>`, found `{header}`"),
            })
        }
    };
    let mut q = QuboMatrix::new(n).map_err(|e| Error::Parse {
        line: hline,
        msg: e.to_string(),
    })?;
    let mut seen = vec![false; q.upper.len()];

    for (line, l) in lines {
        let err = |msg: String| Error::Parse { line, msg };
        let fields: Vec<&str> = l.split_whitespace().collect();
        let [i, j, v] = fields[..] else {
            return Err(err(format!("expected `i j value`, found `{l}`")));
        };
        let i: usize = i.parse().map_err(|_| err(format!("bad row index `{i}`")))?;
        let j: usize = j.parse().map_err(|_| err(format!("bad column index `{j}`")))?;
        let v: f64 = v.parse().map_err(|_| err(format!("bad value `{v}`")))?;
        let idx = q.index(i, j).map_err(|e| err(e.to_string()))?;
        if std::mem::replace(&mut seen[idx], true) {
            return Err(err(format!("duplicate entry ({i}, {j})")));
        }
        q.upper[idx] = v;
    }
    Ok(q)
}
