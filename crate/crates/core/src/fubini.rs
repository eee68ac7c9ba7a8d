//! Generalized Fubini numbers and their pairwise convolution.
//!
//! `f_{n,k}` counts weak orders on `{1..n}` in which each of the first `k`
//! elements sits in a part by itself; `f_{n,0}` is the ordinary Fubini
//! (ordered Bell) number. The convolution
//! `g_{n,c} = sum_j f_{n,j} f_{n,c-j} / (j! (c-j)!)` feeds the engine's
//! `q_n` assembly.
//!
//! `k!` divides every `f_{n,k}`, so `g` is computed as
//! `sum_j (f_{n,j}/j!) (f_{n,c-j}/(c-j)!)` with each factor divided exactly
//! before multiplying. The division doubles as a live integrality check:
//! a remainder means the `f` table is wrong.

use num_bigint::BigInt;
use num_traits::Zero;

use crate::arith::{exact_div, factorials, ArithError};
use crate::triangles::{stream_rows, TriangleKind, TriangleTable};

/// Dense table of `f_{n,k}` for `0 <= k <= n <= n_max`.
#[derive(Debug, Clone)]
pub struct FubiniTable {
    rows: Vec<Vec<BigInt>>,
    zero: BigInt,
}

impl FubiniTable {
    /// `f_{n,k} = sum_{l=k..n} l! S2(n-k, l-k)`.
    pub fn build(n_max: usize) -> Self {
        let facts = factorials(n_max);
        let s2 = TriangleTable::build(TriangleKind::Stirling2, n_max);
        let mut rows = Vec::with_capacity(n_max + 1);
        for n in 0..=n_max {
            let mut row = Vec::with_capacity(n + 1);
            for k in 0..=n {
                let mut sum = BigInt::zero();
                for l in k..=n {
                    sum += &facts[l] * s2.get(n - k, l - k);
                }
                row.push(sum);
            }
            rows.push(row);
        }
        Self {
            rows,
            zero: BigInt::zero(),
        }
    }

    pub fn n_max(&self) -> usize {
        self.rows.len() - 1
    }

    /// `f_{n,k}`; reads with `k > n` are zero (no weak order can have more
    /// forced singletons than elements).
    pub fn get(&self, n: usize, k: usize) -> &BigInt {
        if k > n {
            &self.zero
        } else {
            &self.rows[n][k]
        }
    }

    /// The ordinary Fubini number `f_n = f_{n,0}`.
    pub fn ordinary(&self, n: usize) -> &BigInt {
        &self.rows[n][0]
    }
}

/// Dense table of `g_{n,c}` for `0 <= c <= n <= n_max`.
#[derive(Debug, Clone)]
pub struct GTable {
    rows: Vec<Vec<BigInt>>,
}

impl GTable {
    pub fn build(fubini: &FubiniTable) -> Result<Self, ArithError> {
        let n_max = fubini.n_max();
        let facts = factorials(n_max);
        let mut rows = Vec::with_capacity(n_max + 1);
        for n in 0..=n_max {
            let reduced = reduced_slice(&fubini.rows[n], &facts)?;
            rows.push(g_slice(&reduced, n));
        }
        Ok(Self { rows })
    }

    pub fn get(&self, n: usize, c: usize) -> &BigInt {
        &self.rows[n][c]
    }
}

/// One slice `f_{m,0..m}` computed from streamed Stirling rows, for the
/// streaming engine: row `r` of the second-kind triangle yields
/// `f_{m,m-r} = sum_{i=0..r} (i + m - r)! S2(r, i)`.
pub fn fubini_slice(m: usize, facts: &[BigInt]) -> Vec<BigInt> {
    let mut slice = vec![BigInt::zero(); m + 1];
    stream_rows(TriangleKind::Stirling2, m, |r, row| {
        let k = m - r;
        let mut sum = BigInt::zero();
        for (i, entry) in row.iter().enumerate() {
            if !entry.is_zero() {
                sum += &facts[i + k] * entry;
            }
        }
        slice[k] = sum;
    });
    slice
}

/// `f_{m,k} / k!` for each `k`, asserting the divisibility.
pub fn reduced_slice(f_slice: &[BigInt], facts: &[BigInt]) -> Result<Vec<BigInt>, ArithError> {
    f_slice
        .iter()
        .enumerate()
        .map(|(k, f)| exact_div(f, &facts[k]))
        .collect()
}

/// `g_{m,c}` for `c = 0..=c_max` from the reduced slice.
pub fn g_slice(reduced: &[BigInt], c_max: usize) -> Vec<BigInt> {
    let m = reduced.len() - 1;
    (0..=c_max)
        .map(|c| {
            let mut sum = BigInt::zero();
            for j in 0..=c {
                if j <= m && c - j <= m {
                    sum += &reduced[j] * &reduced[c - j];
                }
            }
            sum
        })
        .collect()
}

/// One verified instance of the Fubini convolution identity.
#[derive(Debug, Clone)]
pub struct ConvolutionCheck {
    pub n: usize,
    pub k: usize,
    pub lhs: BigInt,
    pub rhs: BigInt,
}

impl ConvolutionCheck {
    pub fn passed(&self) -> bool {
        self.lhs == self.rhs
    }
}

#[derive(Debug, Clone)]
pub struct ConvolutionReport {
    pub checks: Vec<ConvolutionCheck>,
}

impl ConvolutionReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(ConvolutionCheck::passed)
    }

    pub fn failures(&self) -> Vec<&ConvolutionCheck> {
        self.checks.iter().filter(|c| !c.passed()).collect()
    }
}

/// Verifies `f_{n+k,k} = k! sum_{n_0+..+n_k=n} n!/(n_0!..n_k!) f_{n_0}..f_{n_k}`
/// for all `n <= n_max`, `k <= k_max`, evaluating the right-hand side by
/// direct enumeration of compositions.
pub fn check_convolution(n_max: usize, k_max: usize) -> ConvolutionReport {
    let table = FubiniTable::build(n_max + k_max);
    let facts = factorials(n_max + k_max);
    let mut checks = Vec::new();
    for n in 0..=n_max {
        for k in 0..=k_max {
            let lhs = table.get(n + k, k).clone();
            let mut rhs = BigInt::zero();
            let mut parts = vec![0usize; k + 1];
            compositions_of(n, k + 1, &mut parts, 0, &mut |parts| {
                let mut term = facts[n].clone();
                for &p in parts {
                    term = exact_div(&term, &facts[p]).expect("multinomial is integral");
                }
                for &p in parts {
                    term *= table.ordinary(p);
                }
                rhs += term;
            });
            rhs *= &facts[k];
            checks.push(ConvolutionCheck { n, k, lhs, rhs });
        }
    }
    ConvolutionReport { checks }
}

fn compositions_of(
    remaining: usize,
    slots: usize,
    parts: &mut Vec<usize>,
    idx: usize,
    visit: &mut impl FnMut(&[usize]),
) {
    if idx == slots - 1 {
        parts[idx] = remaining;
        visit(parts);
        return;
    }
    for v in 0..=remaining {
        parts[idx] = v;
        compositions_of(remaining - v, slots, parts, idx + 1, visit);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    fn bi(v: i64) -> BigInt {
        BigInt::from(v)
    }

    // Ordinary Fubini numbers f_0..f_10, cross-checkable against A000670.
    const ORDINARY: [i64; 11] = [
        1, 1, 3, 13, 75, 541, 4683, 47293, 545835, 7087261, 102247563,
    ];

    #[test]
    fn ordinary_fubini_values() {
        let table = FubiniTable::build(10);
        for (n, &want) in ORDINARY.iter().enumerate() {
            assert_eq!(*table.ordinary(n), bi(want), "f_{n}");
        }
    }

    #[test]
    fn small_generalized_values() {
        let table = FubiniTable::build(4);
        assert_eq!(*table.get(3, 0), bi(13));
        assert_eq!(*table.get(2, 2), bi(2));
        assert_eq!(*table.get(2, 1), bi(2));
        // weak orders on {1,2,3} with 1 boxed alone: {1}{23} in 2 orders
        // plus three singletons in 3! orders
        assert_eq!(*table.get(3, 1), bi(8));
        assert_eq!(*table.get(4, 4), bi(24)); // f_{n,n} = n!
    }

    #[test]
    fn factorial_divides_every_entry() {
        let table = FubiniTable::build(20);
        let facts = factorials(20);
        for n in 0..=20 {
            for k in 0..=n {
                assert!(
                    exact_div(table.get(n, k), &facts[k]).is_ok(),
                    "k! | f_({n},{k})"
                );
            }
        }
    }

    #[test]
    fn g_small_values() {
        let table = FubiniTable::build(4);
        let g = GTable::build(&table).unwrap();
        assert_eq!(*g.get(2, 0), bi(9));
        assert_eq!(*g.get(0, 0), bi(1));
        assert_eq!(*g.get(2, 1), bi(12));
    }

    #[test]
    fn g_row_zero_is_fubini_squared() {
        let table = FubiniTable::build(30);
        let g = GTable::build(&table).unwrap();
        for n in 0..=30 {
            assert_eq!(*g.get(n, 0), table.ordinary(n) * table.ordinary(n));
        }
    }

    #[test]
    fn g_sum_is_symmetric_under_reversal() {
        let table = FubiniTable::build(50);
        let facts = factorials(50);
        for n in (0..=50).step_by(10) {
            let reduced = reduced_slice(&table.rows[n], &facts).unwrap();
            for c in 0..=n {
                let forward: BigInt = (0..=c).map(|j| &reduced[j] * &reduced[c - j]).sum();
                let reversed: BigInt = (0..=c).rev().map(|j| &reduced[j] * &reduced[c - j]).sum();
                assert_eq!(forward, reversed, "n={n} c={c}");
            }
        }
    }

    #[test]
    fn slices_match_dense_table() {
        let table = FubiniTable::build(40);
        let facts = factorials(40);
        for m in 0..=40 {
            let slice = fubini_slice(m, &facts);
            for k in 0..=m {
                assert_eq!(slice[k], *table.get(m, k), "m={m} k={k}");
            }
            let reduced = reduced_slice(&slice, &facts).unwrap();
            let g = g_slice(&reduced, m);
            let dense_g = GTable::build(&FubiniTable::build(m)).unwrap();
            for c in 0..=m.min(5) {
                assert_eq!(g[c], *dense_g.get(m, c), "g m={m} c={c}");
            }
        }
    }

    #[test]
    fn convolution_identity_small() {
        let report = check_convolution(6, 4);
        assert!(report.all_passed(), "failures: {:?}", report.failures());
        // hand-checked instances
        let lookup = |n: usize, k: usize| {
            report
                .checks
                .iter()
                .find(|c| c.n == n && c.k == k)
                .unwrap()
                .clone()
        };
        let c11 = lookup(1, 1);
        assert_eq!(c11.lhs, bi(2)); // f_{2,1} = 1!(f_0 f_1 + f_1 f_0)
        let c0k = lookup(0, 4);
        assert_eq!(c0k.lhs, bi(24)); // f_{k,k} = k!
        let c21 = lookup(2, 1);
        assert_eq!(c21.lhs, c21.rhs);
        assert_eq!(c21.lhs, bi(8)); // f_{3,1}, both sides evaluated independently
    }

    #[test]
    fn distinguished_singletons_inject_into_all_weak_orders() {
        // f_{n,k} <= f_n for all k
        let table = FubiniTable::build(15);
        for n in 0..=15 {
            for k in 0..=n {
                assert!(table.get(n, k) <= table.ordinary(n), "n={n} k={k}");
            }
        }
    }

    #[test]
    fn ordinary_fubini_periodicity_mod_prime_powers() {
        // f_{n+phi(p^m)} = f_n (mod p^m) for p in {2,3,5}, m <= 2
        let table = FubiniTable::build(50);
        for p in [2u32, 3, 5] {
            for m in 1u32..=2 {
                let period = (p.pow(m - 1) * (p - 1)) as usize;
                let modulus = BigInt::from(p.pow(m));
                for n in m as usize..=(50 - period) {
                    let a = table.ordinary(n + period) % &modulus;
                    let b = table.ordinary(n) % &modulus;
                    assert_eq!(a, b, "p={p} m={m} n={n}");
                }
            }
        }
    }
}
