//! Integer triangles consumed by the pipeline: binomial coefficients,
//! unsigned Stirling numbers of the first kind, Stirling numbers of the
//! second kind, and the central-factorial-style triangle `T(n,k)` with
//! `T(n,k) = T(n-1,k-1) + k^2 T(n-1,k)`.
//!
//! Each triangle is generated row by row from its recurrence. Dense tables
//! cache every row; [`stream_rows`] delivers rows in order while holding at
//! most two of them, which is what keeps the streaming engine's working set
//! linear.

use num_bigint::BigInt;
use num_traits::{One, Zero};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TriangleKind {
    Binomial,
    Stirling1,
    Stirling2,
    CentralT,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TriangleError {
    #[error("binomial row {n} is outside the extended domain n >= -1")]
    RowOutOfDomain { n: i64 },
    #[error("binomial column {k} is negative")]
    ColumnOutOfDomain { k: i64 },
}

fn row_zero() -> Vec<BigInt> {
    vec![BigInt::one()]
}

/// Row `n` of a triangle from row `n-1`, by the standard recurrences.
pub(crate) fn next_row(kind: TriangleKind, n: usize, prev: &[BigInt]) -> Vec<BigInt> {
    debug_assert_eq!(prev.len(), n);
    let mut row = vec![BigInt::zero(); n + 1];
    match kind {
        TriangleKind::Binomial => {
            row[0] = BigInt::one();
            for k in 1..n {
                row[k] = &prev[k - 1] + &prev[k];
            }
            row[n] = BigInt::one();
        }
        TriangleKind::Stirling1 => {
            let factor = BigInt::from(n - 1);
            for k in 1..=n {
                let mut v = &prev[k - 1] + BigInt::zero();
                if k < n {
                    v += &factor * &prev[k];
                }
                row[k] = v;
            }
        }
        TriangleKind::Stirling2 => {
            for k in 1..=n {
                let mut v = &prev[k - 1] + BigInt::zero();
                if k < n {
                    v += BigInt::from(k) * &prev[k];
                }
                row[k] = v;
            }
        }
        TriangleKind::CentralT => {
            // T(n,0) = 0 for n >= 1 and T(n,n) = 1
            for k in 1..=n {
                let mut v = &prev[k - 1] + BigInt::zero();
                if k < n {
                    v += BigInt::from(k * k) * &prev[k];
                }
                row[k] = v;
            }
        }
    }
    row
}

/// Delivers rows `0..=n_max` in order, retaining at most two rows (the row
/// being produced and its predecessor) at any instant.
pub fn stream_rows<F>(kind: TriangleKind, n_max: usize, mut consumer: F)
where
    F: FnMut(usize, &[BigInt]),
{
    let mut current = row_zero();
    consumer(0, &current);
    for n in 1..=n_max {
        let next = next_row(kind, n, &current);
        current = next;
        consumer(n, &current);
    }
}

/// A dense triangle with rows `0..=n_max` cached and immutable.
#[derive(Debug, Clone)]
pub struct TriangleTable {
    kind: TriangleKind,
    rows: Vec<Vec<BigInt>>,
    zero: BigInt,
}

impl TriangleTable {
    pub fn build(kind: TriangleKind, n_max: usize) -> Self {
        let mut rows = Vec::with_capacity(n_max + 1);
        stream_rows(kind, n_max, |_, row| rows.push(row.to_vec()));
        Self {
            kind,
            rows,
            zero: BigInt::zero(),
        }
    }

    pub fn kind(&self) -> TriangleKind {
        self.kind
    }

    pub fn n_max(&self) -> usize {
        self.rows.len() - 1
    }

    pub fn row(&self, n: usize) -> &[BigInt] {
        &self.rows[n]
    }

    /// Entry `(n, k)`; columns past the end of the row read as zero, which
    /// silently skips empty summation terms.
    pub fn get(&self, n: usize, k: usize) -> &BigInt {
        if k > n {
            &self.zero
        } else {
            &self.rows[n][k]
        }
    }
}

/// Binomial coefficient on the extended domain `n >= -1`, `k >= 0`:
/// `binomial(-1, 0) = 1`, `binomial(-1, k) = 0` for `k >= 1`, and
/// `binomial(n, k) = 0` for `k > n >= 0`. These conventions make
/// `binomial(n-1, n-m)` count surjective distributions of `n` identical
/// balls among `m` urns for every `m` including zero.
pub fn binomial(n: i64, k: i64) -> Result<BigInt, TriangleError> {
    if n < -1 {
        return Err(TriangleError::RowOutOfDomain { n });
    }
    if k < 0 {
        return Err(TriangleError::ColumnOutOfDomain { k });
    }
    if n == -1 {
        return Ok(if k == 0 { BigInt::one() } else { BigInt::zero() });
    }
    if k > n {
        return Ok(BigInt::zero());
    }
    let k = (k as u64).min((n - k) as u64);
    let mut result = BigInt::one();
    for i in 0..k {
        result = result * BigInt::from(n as u64 - i) / BigInt::from(i + 1);
    }
    Ok(result)
}

pub fn stirling1_row(n: usize) -> Vec<BigInt> {
    last_row(TriangleKind::Stirling1, n)
}

pub fn stirling2_row(n: usize) -> Vec<BigInt> {
    last_row(TriangleKind::Stirling2, n)
}

pub fn t_row(n: usize) -> Vec<BigInt> {
    last_row(TriangleKind::CentralT, n)
}

fn last_row(kind: TriangleKind, n: usize) -> Vec<BigInt> {
    let mut out = Vec::new();
    stream_rows(kind, n, |i, row| {
        if i == n {
            out = row.to_vec();
        }
    });
    out
}
