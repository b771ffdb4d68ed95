//! Permanents of (0,1)-matrices and the Bregman–Minc upper bound.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_rational::Ratio;
use num_traits::{Signed, Zero};
use thiserror::Error;

use crate::bounds::LogBound;
use crate::grid::Grid;

/// Largest size for the permutation-sum oracle.
pub const NAIVE_LIMIT: usize = 9;
/// Largest size for Ryser's formula (`2^m` subsets).
pub const RYSER_LIMIT: usize = 30;
/// Largest size a [`BinaryMatrix`] can hold (rows are 64-bit masks).
pub const MAX_MATRIX_SIZE: usize = 64;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PermanentError {
    #[error("{size}x{size} matrix exceeds the {method} limit of {limit}")]
    TooLarge {
        method: &'static str,
        size: usize,
        limit: usize,
    },
    #[error("matrix size {0} outside 0..={MAX_MATRIX_SIZE}")]
    InvalidSize(usize),
    #[error("row {row}: expected {expected} entries, found {found}")]
    RowLength {
        row: usize,
        expected: usize,
        found: usize,
    },
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error("target row {0} is not empty")]
    RowNotEmpty(usize),
    #[error("row index {row} outside 0..{side}")]
    RowOutOfRange { row: usize, side: usize },
}

/// A square (0,1)-matrix; row `i` is a bit mask over columns.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BinaryMatrix {
    size: usize,
    rows: Vec<u64>,
}

impl BinaryMatrix {
    pub fn zeros(size: usize) -> Result<Self, PermanentError> {
        if size > MAX_MATRIX_SIZE {
            return Err(PermanentError::InvalidSize(size));
        }
        Ok(BinaryMatrix {
            size,
            rows: vec![0; size],
        })
    }

    pub fn ones(size: usize) -> Result<Self, PermanentError> {
        let mut m = Self::zeros(size)?;
        let full = full_mask(size);
        m.rows.iter_mut().for_each(|r| *r = full);
        Ok(m)
    }

    pub fn identity(size: usize) -> Result<Self, PermanentError> {
        let mut m = Self::zeros(size)?;
        for (i, r) in m.rows.iter_mut().enumerate() {
            *r = 1 << i;
        }
        Ok(m)
    }

    pub fn from_rows(rows: &[Vec<bool>]) -> Result<Self, PermanentError> {
        let mut m = Self::zeros(rows.len())?;
        for (i, row) in rows.iter().enumerate() {
            if row.len() != m.size {
                return Err(PermanentError::RowLength {
                    row: i,
                    expected: m.size,
                    found: row.len(),
                });
            }
            for (j, &v) in row.iter().enumerate() {
                m.set(i, j, v);
            }
        }
        Ok(m)
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        self.rows[i] >> j & 1 == 1
    }

    pub fn set(&mut self, i: usize, j: usize, value: bool) {
        if value {
            self.rows[i] |= 1 << j;
        } else {
            self.rows[i] &= !(1 << j);
        }
    }

    /// Number of ones in row `i`.
    pub fn row_weight(&self, i: usize) -> u32 {
        self.rows[i].count_ones()
    }

    pub fn row_weights(&self) -> Vec<u32> {
        self.rows.iter().map(|r| r.count_ones()).collect()
    }

    /// Applies `row_perm` to rows and `col_perm` to columns: entry `(i, j)`
    /// moves to `(row_perm[i], col_perm[j])`.
    pub fn permuted(&self, row_perm: &[usize], col_perm: &[usize]) -> BinaryMatrix {
        let mut out = BinaryMatrix {
            size: self.size,
            rows: vec![0; self.size],
        };
        for i in 0..self.size {
            for j in 0..self.size {
                if self.get(i, j) {
                    out.set(row_perm[i], col_perm[j], true);
                }
            }
        }
        out
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("m {}\n", self.size);
        for i in 0..self.size {
            let row: Vec<&str> = (0..self.size)
                .map(|j| if self.get(i, j) { "1" } else { "0" })
                .collect();
            out.push_str(&row.join(" "));
            out.push('\n');
        }
        out
    }
}

fn full_mask(size: usize) -> u64 {
    if size == 64 {
        u64::MAX
    } else {
        (1u64 << size) - 1
    }
}

impl FromStr for BinaryMatrix {
    type Err = PermanentError;

    fn from_str(text: &str) -> Result<Self, PermanentError> {
        let mut lines = text
            .lines()
            .enumerate()
            .filter(|(_, l)| !l.trim().is_empty());
        let header = lines.next().ok_or(PermanentError::Malformed {
            line: 1,
            message: "missing `m <int>` header".into(),
        })?;
        let size = match header.1.split_whitespace().collect::<Vec<_>>().as_slice() {
            ["m", v] => v.parse().map_err(|_| PermanentError::Malformed {
                line: header.0 + 1,
                message: format!("bad integer `{v}`"),
            })?,
            _ => {
                return Err(PermanentError::Malformed {
                    line: header.0 + 1,
                    message: "expected `m <int>`".into(),
                })
            }
        };
        let mut rows = Vec::with_capacity(size);
        for (idx, line) in lines {
            let row = line
                .split_whitespace()
                .map(|t| match t {
                    "0" => Ok(false),
                    "1" => Ok(true),
                    _ => Err(PermanentError::Malformed {
                        line: idx + 1,
                        message: format!("entry `{t}` is not 0 or 1"),
                    }),
                })
                .collect::<Result<Vec<_>, _>>()?;
            rows.push(row);
        }
        if rows.len() != size {
            return Err(PermanentError::Malformed {
                line: 1,
                message: format!("header says {size} rows, found {}", rows.len()),
            });
        }
        BinaryMatrix::from_rows(&rows)
    }
}

impl fmt::Display for BinaryMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

/// Permanent by summing `∏ a_{i,σ(i)}` over every permutation `σ`.
///
/// Branches stop at the first zero factor, which skips only permutations
/// whose product is zero.
pub fn permanent_naive(a: &BinaryMatrix) -> Result<BigUint, PermanentError> {
    if a.size > NAIVE_LIMIT {
        return Err(PermanentError::TooLarge {
            method: "naive",
            size: a.size,
            limit: NAIVE_LIMIT,
        });
    }
    fn expand(a: &BinaryMatrix, row: usize, used: u64) -> u64 {
        if row == a.size {
            return 1;
        }
        (0..a.size)
            .filter(|&j| used >> j & 1 == 0 && a.get(row, j))
            .map(|j| expand(a, row + 1, used | 1 << j))
            .sum()
    }
    Ok(BigUint::from(expand(a, 0, 0)))
}

/// Permanent by Ryser's inclusion–exclusion formula
/// `per A = (-1)^m Σ_S (-1)^|S| ∏_i Σ_{j∈S} a_ij`,
/// visiting column subsets in Gray-code order so each step updates the row
/// sums for a single column.
pub fn permanent_ryser(a: &BinaryMatrix) -> Result<BigUint, PermanentError> {
    let m = a.size;
    if m > RYSER_LIMIT {
        return Err(PermanentError::TooLarge {
            method: "ryser",
            size: m,
            limit: RYSER_LIMIT,
        });
    }
    if m == 0 {
        return Ok(BigUint::from(1u32));
    }
    // Column-major bits so toggling column j touches rows via one mask.
    let cols: Vec<u64> = (0..m)
        .map(|j| {
            (0..m)
                .filter(|&i| a.get(i, j))
                .fold(0u64, |acc, i| acc | 1 << i)
        })
        .collect();
    let mut sums = vec![0i64; m];
    let mut in_subset = 0u64;
    // m ≤ 20 keeps every product below 20^20 and the running total inside i128.
    let small = m <= 20;
    let mut total_small: i128 = 0;
    let mut total_big = BigInt::zero();
    for k in 1u64..(1u64 << m) {
        let j = k.trailing_zeros() as usize;
        let adding = in_subset >> j & 1 == 0;
        in_subset ^= 1 << j;
        let delta = if adding { 1 } else { -1 };
        let mut rows = cols[j];
        while rows != 0 {
            let i = rows.trailing_zeros() as usize;
            sums[i] += delta;
            rows &= rows - 1;
        }
        if sums.contains(&0) {
            continue;
        }
        let negative = (m - in_subset.count_ones() as usize) % 2 == 1;
        if small {
            let p: i128 = sums.iter().map(|&s| s as i128).product();
            total_small += if negative { -p } else { p };
        } else {
            let p: BigInt = sums.iter().map(|&s| BigInt::from(s)).product();
            if negative {
                total_big -= p;
            } else {
                total_big += p;
            }
        }
    }
    let total = if small {
        BigInt::from(total_small)
    } else {
        total_big
    };
    debug_assert!(!total.is_negative());
    Ok(total
        .to_biguint()
        .expect("permanent of a (0,1)-matrix is non-negative"))
}

/// `∏_i r_i!^(1/r_i)` over the row weights `r_i`, which bounds the permanent
/// from above. A zero row forces the bound (and the permanent) to zero.
pub fn bregman_minc_bound(a: &BinaryMatrix) -> LogBound {
    let mut factors: BTreeMap<u64, Ratio<i64>> = BTreeMap::new();
    for r in a.row_weights() {
        if r == 0 {
            return LogBound::zero();
        }
        *factors.entry(r as u64).or_insert_with(Ratio::zero) += Ratio::new(1, r as i64);
    }
    LogBound::factorial_product(factors)
}

/// The cells of `row` against the values `1..=n²`: entry `(i, v-1)` is set
/// when `v` clashes with nothing already in the column or block of cell `i`.
///
/// The target row must be empty; its permanent then counts the ways of
/// filling that row.
pub fn admissibility_matrix(g: &Grid, row: usize) -> Result<BinaryMatrix, PermanentError> {
    let side = g.side();
    if row >= side {
        return Err(PermanentError::RowOutOfRange { row, side });
    }
    if !g.row_is_empty(row) {
        return Err(PermanentError::RowNotEmpty(row));
    }
    let n = g.n();
    let mut m = BinaryMatrix::ones(side)?;
    for col in 0..side {
        let mut blocked = 0u64;
        for r in 0..side {
            if let Some(v) = g.get(r, col) {
                blocked |= 1 << (v - 1);
            }
        }
        let (br, bc) = (row / n * n, col / n * n);
        for r in br..br + n {
            for c in bc..bc + n {
                if let Some(v) = g.get(r, c) {
                    blocked |= 1 << (v - 1);
                }
            }
        }
        m.rows[col] &= !blocked;
    }
    Ok(m)
}
