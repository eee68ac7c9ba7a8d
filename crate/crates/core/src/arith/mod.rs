//! Exact integer helpers shared by every stage of the pipeline.
//!
//! All counting quantities are arbitrary-precision signed integers
//! ([`num_bigint::BigInt`]); there is no silent overflow or rounding
//! anywhere on an integer path. Division is only ever performed through
//! [`exact_div`], which fails loudly when the divisibility a formula
//! promises does not hold.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

pub mod decimal;

pub use decimal::BigDecimal;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ArithError {
    #[error("division by zero (dividend has {dividend_bits} bits)")]
    DivisionByZero { dividend_bits: u64 },
    /// Non-divisibility on a path that promised exactness. This always
    /// signals a formula-implementation bug, never bad user input.
    #[error(
        "exact division failed: dividend ({dividend_bits} bits) is not divisible \
         by divisor ({divisor_bits} bits)"
    )]
    NotDivisible {
        dividend_bits: u64,
        divisor_bits: u64,
    },
}

/// Divides `a` by `b`, requiring the division to be exact.
pub fn exact_div(a: &BigInt, b: &BigInt) -> Result<BigInt, ArithError> {
    if b.is_zero() {
        return Err(ArithError::DivisionByZero {
            dividend_bits: a.bits(),
        });
    }
    let (q, r) = a.div_rem(b);
    if !r.is_zero() {
        return Err(ArithError::NotDivisible {
            dividend_bits: a.bits(),
            divisor_bits: b.bits(),
        });
    }
    Ok(q)
}

/// Table of `0!, 1!, ..., n!`.
pub fn factorials(n: usize) -> Vec<BigInt> {
    let mut out = Vec::with_capacity(n + 1);
    out.push(BigInt::one());
    for i in 1..=n {
        let next = &out[i - 1] * BigInt::from(i);
        out.push(next);
    }
    out
}

/// Number of decimal digits of `|x|`; zero has one digit.
pub fn decimal_digits(x: &BigInt) -> usize {
    if x.is_zero() {
        return 1;
    }
    x.abs().to_str_radix(10).len()
}

/// Rounds an exact integer to a decimal with `precision` significant digits.
///
/// The result differs from the true value by a relative error below
/// `10^(1-precision)`.
pub fn to_decimal(a: &BigInt, precision: usize) -> BigDecimal {
    BigDecimal::from_bigint(a, precision)
}
