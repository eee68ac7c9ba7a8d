//! Signed chain weights `h_{t,c}` and even-block ordered set-partition
//! counts.
//!
//! Two independent routes compute `h_{t,c}`:
//!
//! * [`h_direct`] evaluates the alternating sum
//!   `sum_{k=c}^{t-c} (-1)^k (c+k)! S2(t, c+k) binomial(k-1, k-c)`
//!   literally, including the extended binomial conventions
//!   `binomial(-1,0) = 1` and `binomial(k-1,k) = 0` for `k >= 1`;
//! * [`h_fast`] uses `h_{2n,k} = (-1)^k (2k)! T(n,k)` (and zero for odd
//!   `t`), which drops the computation from cubic to quadratic time.
//!
//! `h_fast` is the production path; `h_direct` exists as a cross-check.
//! The quantity `|h_{2n,k}| / 2^k` counts ordered set-partitions of a
//! `2n`-set into `k` parts of even cardinality and satisfies
//! `S(n,k) = k^2 S(n-1,k) + k (2k-1) S(n-1,k-1)`.

use num_bigint::BigInt;
use num_traits::Zero;
use thiserror::Error;

use crate::arith::factorials;
use crate::triangles::{binomial, stirling2_row, TriangleKind, TriangleTable};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ChainsError {
    #[error("h_({t},{c}) is outside the domain 0 <= 2c <= t")]
    DomainError { t: usize, c: usize },
}

/// The alternating-sum definition of `h_{t,c}`.
pub fn h_direct(t: usize, c: usize) -> Result<BigInt, ChainsError> {
    if 2 * c > t {
        return Err(ChainsError::DomainError { t, c });
    }
    let s2 = stirling2_row(t);
    let facts = factorials(t);
    let mut sum = BigInt::zero();
    for k in c..=(t - c) {
        let b = binomial(k as i64 - 1, (k - c) as i64).expect("k >= c keeps the domain valid");
        if b.is_zero() {
            continue;
        }
        let term = &facts[c + k] * &s2[c + k] * b;
        if k % 2 == 0 {
            sum += term;
        } else {
            sum -= term;
        }
    }
    Ok(sum)
}

/// The central-factorial route: zero for odd `t`, otherwise
/// `(-1)^c (2c)! T(t/2, c)`.
pub fn h_fast(t: usize, c: usize, central_t: &TriangleTable) -> Result<BigInt, ChainsError> {
    if 2 * c > t {
        return Err(ChainsError::DomainError { t, c });
    }
    if t % 2 == 1 {
        return Ok(BigInt::zero());
    }
    debug_assert_eq!(central_t.kind(), TriangleKind::CentralT);
    let facts = factorials(2 * c);
    let magnitude = &facts[2 * c] * central_t.get(t / 2, c);
    Ok(if c % 2 == 0 { magnitude } else { -magnitude })
}

/// Table of `S(n,k) = |h_{2n,k}| / 2^k` for `0 <= k <= n <= n_max`: the
/// number of ordered set-partitions of `{1..2n}` into `k` parts of even
/// cardinality.
pub fn even_block_table(n_max: usize) -> Vec<Vec<BigInt>> {
    let mut rows: Vec<Vec<BigInt>> = Vec::with_capacity(n_max + 1);
    rows.push(vec![BigInt::from(1)]);
    for n in 1..=n_max {
        let mut row = vec![BigInt::zero(); n + 1];
        for k in 1..=n {
            let mut v = BigInt::from(k * k) * rows[n - 1].get(k).unwrap_or(&BigInt::zero());
            v += BigInt::from(k * (2 * k - 1)) * &rows[n - 1][k - 1];
            row[k] = v;
        }
        rows.push(row);
    }
    rows
}

/// `S(n,k)` for a single pair of indices.
pub fn even_block_count(n: usize, k: usize) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    even_block_table(n)[n][k].clone()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::exact_div;
    use num_traits::Signed;

    fn bi(v: i64) -> BigInt {
        BigInt::from(v)
    }

    #[test]
    fn direct_small_values() {
        assert_eq!(h_direct(2, 1).unwrap(), bi(-2));
        assert_eq!(h_direct(0, 0).unwrap(), bi(1));
        assert_eq!(h_direct(3, 1).unwrap(), bi(0));
        assert_eq!(h_direct(1, 1), Err(ChainsError::DomainError { t: 1, c: 1 }));
    }

    #[test]
    fn fast_small_values() {
        let central = TriangleTable::build(TriangleKind::CentralT, 5);
        assert_eq!(h_fast(4, 2, &central).unwrap(), bi(24));
        assert_eq!(h_fast(2, 1, &central).unwrap(), bi(-2));
        assert_eq!(h_fast(6, 1, &central).unwrap(), bi(-2));
        assert_eq!(h_fast(5, 1, &central).unwrap(), bi(0));
        assert_eq!(
            h_fast(3, 2, &central),
            Err(ChainsError::DomainError { t: 3, c: 2 })
        );
    }

    #[test]
    fn both_routes_agree_up_to_60() {
        let central = TriangleTable::build(TriangleKind::CentralT, 30);
        for t in 0..=60 {
            for c in 0..=(t / 2) {
                assert_eq!(
                    h_direct(t, c).unwrap(),
                    h_fast(t, c, &central).unwrap(),
                    "t={t} c={c}"
                );
            }
        }
    }

    #[test]
    fn even_block_counts() {
        assert_eq!(even_block_count(1, 1), bi(1));
        assert_eq!(even_block_count(2, 2), bi(6)); // (2n)!/2^n at n = 2
        assert_eq!(even_block_count(2, 1), bi(1));
        let facts = factorials(20);
        let table = even_block_table(10);
        for n in 1..=10usize {
            // S(n,n) = (2n)!/2^n
            let expected = exact_div(&facts[2 * n], &bi(2).pow(n as u32)).unwrap();
            assert_eq!(table[n][n], expected, "n={n}");
            assert_eq!(table[n][0], bi(0));
        }
    }

    #[test]
    fn even_blocks_match_h_magnitude() {
        let central = TriangleTable::build(TriangleKind::CentralT, 20);
        let table = even_block_table(20);
        for n in 0..=20usize {
            for k in 0..=n {
                let h = h_fast(2 * n, k, &central).unwrap();
                let expected_sign_positive = k % 2 == 0;
                if !h.is_zero() {
                    assert_eq!(
                        h > BigInt::zero(),
                        expected_sign_positive,
                        "sign at n={n} k={k}"
                    );
                }
                assert_eq!(&table[n][k] * bi(2).pow(k as u32), h.abs() + bi(0));
            }
        }
    }

    #[test]
    fn magnitude_bound() {
        // |h_{t,c}| <= 2^c c^t
        let central = TriangleTable::build(TriangleKind::CentralT, 20);
        for t in 0..=40usize {
            for c in 0..=(t / 2) {
                let h = h_fast(t, c, &central).unwrap().abs();
                let bound = bi(2).pow(c as u32) * bi(c as i64).pow(t as u32);
                assert!(h <= bound, "t={t} c={c}");
            }
        }
    }
}
