//! Fixed-precision base-10 decimal arithmetic.
//!
//! A [`BigDecimal`] is `significand * 10^exponent` with an exact big-integer
//! significand carried to `working_precision` significant digits. Every
//! operation rounds half-away-from-zero to the working precision, so each
//! operation carries a relative error below `10^(1 - working_precision)`.
//! Base 10 (rather than binary floating point) keeps printed digits exact:
//! a value rounded to six decimals prints the same digits the arithmetic
//! produced, with no binary-to-decimal conversion in between.
//!
//! The default working precision used across the analysis pipeline is
//! [`DEFAULT_PRECISION`] (80 significant digits).

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::decimal_digits;

/// Default number of significant decimal digits carried by the analysis
/// pipeline. The worst cancellation it must survive is `K - r_n` at
/// `n = 5000` (about `2 * 10^-5`), which still leaves more than 70
/// meaningful digits of headroom.
pub const DEFAULT_PRECISION: usize = 80;

#[derive(Debug, Clone)]
pub struct BigDecimal {
    sig: BigInt,
    exp: i64,
    prec: usize,
}

fn pow10(k: u64) -> BigInt {
    let mut result = BigInt::one();
    let mut base = BigInt::from(10);
    let mut e = k;
    while e > 0 {
        if e & 1 == 1 {
            result = &result * &base;
        }
        base = &base * &base;
        e >>= 1;
    }
    result
}

/// Divides by `10^shift`, rounding half away from zero.
fn shift_round(sig: &BigInt, shift: u64) -> BigInt {
    let div = pow10(shift);
    let (q, r) = sig.div_rem(&div);
    let mut q = q;
    if &r.abs() * 2u32 >= div {
        if sig.is_negative() {
            q -= 1;
        } else {
            q += 1;
        }
    }
    q
}

impl BigDecimal {
    /// Builds `sig * 10^exp` rounded to `prec` significant digits.
    pub(crate) fn normalized(mut sig: BigInt, mut exp: i64, prec: usize) -> Self {
        assert!(prec >= 1, "precision must be at least one digit");
        if sig.is_zero() {
            return Self { sig, exp: 0, prec };
        }
        let digits = decimal_digits(&sig);
        if digits > prec {
            let shift = (digits - prec) as u64;
            sig = shift_round(&sig, shift);
            exp += shift as i64;
            // Rounding 999.. up can grow the digit count by one.
            if decimal_digits(&sig) > prec {
                sig = &sig / BigInt::from(10);
                exp += 1;
            }
        }
        let ten = BigInt::from(10);
        loop {
            let (q, r) = sig.div_rem(&ten);
            if r.is_zero() && !sig.is_zero() {
                sig = q;
                exp += 1;
            } else {
                break;
            }
        }
        Self { sig, exp, prec }
    }

    pub fn zero(prec: usize) -> Self {
        Self::normalized(BigInt::zero(), 0, prec)
    }

    pub fn one(prec: usize) -> Self {
        Self::normalized(BigInt::one(), 0, prec)
    }

    pub fn from_int(value: i64, prec: usize) -> Self {
        Self::normalized(BigInt::from(value), 0, prec)
    }

    pub fn from_bigint(value: &BigInt, prec: usize) -> Self {
        Self::normalized(value.clone(), 0, prec)
    }

    /// Parses a plain decimal literal such as `-2.23` or `0.409223`.
    pub fn parse(text: &str, prec: usize) -> Option<Self> {
        let (neg, rest) = match text.strip_prefix('-') {
            Some(r) => (true, r),
            None => (false, text.strip_prefix('+').unwrap_or(text)),
        };
        let (int_part, frac_part) = match rest.split_once('.') {
            Some((i, f)) => (i, f),
            None => (rest, ""),
        };
        if int_part.is_empty() && frac_part.is_empty() {
            return None;
        }
        if !int_part.chars().all(|c| c.is_ascii_digit())
            || !frac_part.chars().all(|c| c.is_ascii_digit())
        {
            return None;
        }
        let mut digits = String::with_capacity(int_part.len() + frac_part.len());
        digits.push_str(int_part);
        digits.push_str(frac_part);
        let mut sig: BigInt = if digits.is_empty() {
            BigInt::zero()
        } else {
            digits.parse().ok()?
        };
        if neg {
            sig = -sig;
        }
        Some(Self::normalized(sig, -(frac_part.len() as i64), prec))
    }

    pub fn precision(&self) -> usize {
        self.prec
    }

    pub fn with_precision(&self, prec: usize) -> Self {
        Self::normalized(self.sig.clone(), self.exp, prec)
    }

    pub fn is_zero(&self) -> bool {
        self.sig.is_zero()
    }

    pub fn is_positive(&self) -> bool {
        self.sig.is_positive()
    }

    pub fn is_negative(&self) -> bool {
        self.sig.is_negative()
    }

    pub fn neg(&self) -> Self {
        Self {
            sig: -&self.sig,
            exp: self.exp,
            prec: self.prec,
        }
    }

    pub fn abs(&self) -> Self {
        Self {
            sig: self.sig.abs(),
            exp: self.exp,
            prec: self.prec,
        }
    }

    /// Decimal position of the leading digit: the value's magnitude lies in
    /// `[10^(order-1), 10^order)`. Zero reports `i64::MIN`.
    pub fn order(&self) -> i64 {
        if self.sig.is_zero() {
            i64::MIN
        } else {
            self.exp + decimal_digits(&self.sig) as i64
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let prec = self.prec.max(other.prec);
        if self.sig.is_zero() {
            return other.with_precision(prec);
        }
        if other.sig.is_zero() {
            return self.with_precision(prec);
        }
        let (hi, lo) = if self.exp >= other.exp {
            (self, other)
        } else {
            (other, self)
        };
        // A term far below the result's last retained digit cannot change it.
        if lo.order() + prec as i64 + 4 < hi.order() {
            return hi.with_precision(prec);
        }
        let shift = (hi.exp - lo.exp) as u64;
        let scaled = &hi.sig * pow10(shift);
        Self::normalized(scaled + &lo.sig, lo.exp, prec)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        Self::normalized(
            &self.sig * &other.sig,
            self.exp + other.exp,
            self.prec.max(other.prec),
        )
    }

    pub fn div(&self, other: &Self) -> Self {
        assert!(!other.sig.is_zero(), "BigDecimal division by zero");
        let prec = self.prec.max(other.prec);
        if self.sig.is_zero() {
            return Self::zero(prec);
        }
        let da = decimal_digits(&self.sig) as i64;
        let db = decimal_digits(&other.sig) as i64;
        let scale = (prec as i64 + 2 + db - da).max(0) as u64;
        let num = &self.sig * pow10(scale);
        let (q, r) = num.div_rem(&other.sig);
        let mut q = q;
        if &r.abs() * 2u32 >= other.sig.abs() {
            let quotient_negative = self.sig.is_negative() != other.sig.is_negative();
            if quotient_negative {
                q -= 1;
            } else {
                q += 1;
            }
        }
        Self::normalized(q, self.exp - other.exp - scale as i64, prec)
    }

    pub fn pow(&self, exponent: u64) -> Self {
        let mut result = Self::one(self.prec);
        let mut base = self.clone();
        let mut e = exponent;
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        result
    }

    /// Exact value comparison (independent of working precision).
    pub fn cmp_exact(&self, other: &Self) -> Ordering {
        let sa = self.sig.sign();
        let sb = other.sig.sign();
        if sa != sb {
            return sa.cmp(&sb);
        }
        if self.sig.is_zero() {
            return Ordering::Equal;
        }
        let (oa, ob) = (self.order(), other.order());
        if oa != ob {
            let by_order = oa.cmp(&ob);
            return if self.sig.is_negative() {
                by_order.reverse()
            } else {
                by_order
            };
        }
        // Same sign and same leading-digit position: align and compare.
        let m = self.exp.min(other.exp);
        let a = &self.sig * pow10((self.exp - m) as u64);
        let b = &other.sig * pow10((other.exp - m) as u64);
        a.cmp(&b)
    }

    /// Rounds `value * 10^decimals` to the nearest integer (half away from
    /// zero).
    fn scaled_int(&self, decimals: usize) -> BigInt {
        let target = self.exp + decimals as i64;
        if target >= 0 {
            &self.sig * pow10(target as u64)
        } else {
            shift_round(&self.sig, (-target) as u64)
        }
    }

    /// Fixed-point rendering with exactly `decimals` fractional digits.
    pub fn to_fixed_string(&self, decimals: usize) -> String {
        let v = self.scaled_int(decimals);
        let neg = v.is_negative();
        let mut s = v.abs().to_str_radix(10);
        if s.len() <= decimals {
            s = format!("{}{}", "0".repeat(decimals - s.len() + 1), s);
        }
        let split = s.len() - decimals;
        let mut out = String::new();
        if neg {
            out.push('-');
        }
        out.push_str(&s[..split]);
        if decimals > 0 {
            out.push('.');
            out.push_str(&s[split..]);
        }
        out
    }

    /// Fixed-point rendering with trailing zeros (and a bare trailing dot)
    /// removed, the style used by the ratio column.
    pub fn to_fixed_trimmed(&self, decimals: usize) -> String {
        let s = self.to_fixed_string(decimals);
        if !s.contains('.') {
            return s;
        }
        let s = s.trim_end_matches('0').trim_end_matches('.');
        if s.is_empty() || s == "-" {
            "0".to_string()
        } else {
            s.to_string()
        }
    }

    /// Scientific rendering with exactly `digits` significant digits, such
    /// as `2.27150e4`.
    pub fn to_sci_string_digits(&self, digits: usize) -> String {
        assert!(digits >= 1);
        if self.sig.is_zero() {
            return "0".to_string();
        }
        let rounded = self.with_precision(digits);
        let mut s = rounded.sig.abs().to_str_radix(10);
        let adjusted = rounded.exp + s.len() as i64 - 1;
        while s.len() < digits {
            s.push('0');
        }
        let mut out = String::new();
        if rounded.sig.is_negative() {
            out.push('-');
        }
        out.push_str(&s[..1]);
        if s.len() > 1 {
            out.push('.');
            out.push_str(&s[1..]);
        }
        out.push_str(&format!("e{adjusted}"));
        out
    }

    /// Minimal plain-decimal rendering; falls back to scientific notation
    /// for extreme magnitudes.
    pub fn to_plain_string(&self) -> String {
        if self.sig.is_zero() {
            return "0".to_string();
        }
        let order = self.order();
        if self.exp > 24 || order < -24 {
            let digits = decimal_digits(&self.sig);
            return self.to_sci_string_digits(digits);
        }
        if self.exp >= 0 {
            let mut s = self.sig.to_str_radix(10);
            for _ in 0..self.exp {
                s.push('0');
            }
            return s;
        }
        let frac_len = (-self.exp) as usize;
        self.to_fixed_string(frac_len)
    }

    /// Rounds to `digits` significant digits and renders minimally; used
    /// for CSV emission.
    pub fn to_sig_string(&self, digits: usize) -> String {
        self.with_precision(digits).to_plain_string()
    }

    /// True when `self` and `other` agree to `digits` significant digits,
    /// i.e. their difference is within `10^(1-digits)` relative to `self`.
    pub fn agrees_to_digits(&self, other: &Self, digits: usize) -> bool {
        let diff = self.sub(other).abs();
        if diff.is_zero() {
            return true;
        }
        let bound = self
            .abs()
            .mul(&Self::one(self.prec).div(&Self::from_int(10, self.prec).pow(digits as u64 - 1)));
        diff.cmp_exact(&bound) != Ordering::Greater
    }
}

impl fmt::Display for BigDecimal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_plain_string())
    }
}

impl PartialEq for BigDecimal {
    fn eq(&self, other: &Self) -> bool {
        self.cmp_exact(other) == Ordering::Equal
    }
}

impl PartialOrd for BigDecimal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp_exact(other))
    }
}

/// `sum_{k>=0} 10^work / ((2k+1) m^(2k+1))`, i.e. `atanh(1/m)` scaled by
/// `10^work`, for integer `m >= 2`.
fn atanh_recip_scaled(m: u64, work: usize) -> BigInt {
    let scale = pow10(work as u64);
    let m2 = BigInt::from(m) * BigInt::from(m);
    let mut power = &scale / BigInt::from(m);
    let mut acc = BigInt::zero();
    let mut k: u64 = 0;
    while !power.is_zero() {
        acc += &power / BigInt::from(2 * k + 1);
        power = &power / &m2;
        k += 1;
    }
    acc
}

/// Natural logarithm of 2 with relative error below `10^(1-precision)`.
pub fn ln2(precision: usize) -> BigDecimal {
    assert!(precision >= 1);
    let work = precision + 12;
    let acc = atanh_recip_scaled(3, work) * 2;
    BigDecimal::normalized(acc, -(work as i64), precision)
}

/// Natural logarithm of 10: `3 ln 2 + 2 atanh(1/9)`.
pub fn ln10(precision: usize) -> BigDecimal {
    assert!(precision >= 1);
    let work = precision + 12;
    let acc = atanh_recip_scaled(3, work) * 6 + atanh_recip_scaled(9, work) * 2;
    BigDecimal::normalized(acc, -(work as i64), precision)
}

fn atanh_small(z: &BigDecimal, work: usize) -> BigDecimal {
    let zz = z.mul(z);
    let mut term = z.clone();
    let mut acc = z.clone();
    let mut k: i64 = 1;
    loop {
        term = term.mul(&zz);
        let contrib = term.div(&BigDecimal::from_int(2 * k + 1, work));
        if contrib.is_zero() || contrib.order() < acc.order() - work as i64 - 2 {
            break;
        }
        acc = acc.add(&contrib);
        k += 1;
    }
    acc
}

/// Natural logarithm of a positive value, at the argument's precision.
pub fn ln(x: &BigDecimal) -> BigDecimal {
    assert!(x.is_positive(), "ln of a non-positive value");
    let prec = x.precision();
    let work = prec + 10;
    // x = m * 10^dec_exp with m in [1, 10)
    let digits = decimal_digits(&x.sig) as i64;
    let dec_exp = x.exp + digits - 1;
    let mut m = BigDecimal::normalized(x.sig.clone(), -(digits - 1), work);
    let four_thirds = BigDecimal::from_int(4, work).div(&BigDecimal::from_int(3, work));
    let two = BigDecimal::from_int(2, work);
    let mut halvings: i64 = 0;
    while m.cmp_exact(&four_thirds) == Ordering::Greater {
        m = m.div(&two);
        halvings += 1;
    }
    // m in (2/3, 4/3]; the atanh series at z = (m-1)/(m+1) has |z| <= 0.2
    let one = BigDecimal::one(work);
    let z = m.sub(&one).div(&m.add(&one));
    let mut result = atanh_small(&z, work).mul(&two);
    if halvings != 0 {
        result = result.add(&ln2(work).mul(&BigDecimal::from_int(halvings, work)));
    }
    if dec_exp != 0 {
        result = result.add(&ln10(work).mul(&BigDecimal::from_int(dec_exp, work)));
    }
    result.with_precision(prec)
}

/// `e^x` at the argument's precision, by range reduction and the Taylor
/// series.
pub fn exp(x: &BigDecimal) -> BigDecimal {
    let prec = x.precision();
    if x.is_zero() {
        return BigDecimal::one(prec);
    }
    let work = prec + 16;
    let mut r = x.with_precision(work);
    let quarter = BigDecimal::parse("0.25", work).unwrap();
    let two = BigDecimal::from_int(2, work);
    let mut squarings = 0u32;
    while r.abs().cmp_exact(&quarter) == Ordering::Greater {
        r = r.div(&two);
        squarings += 1;
        assert!(squarings < 64, "exp argument out of supported range");
    }
    let mut acc = BigDecimal::one(work).add(&r);
    let mut term = r.clone();
    let mut k: i64 = 2;
    loop {
        term = term.mul(&r).div(&BigDecimal::from_int(k, work));
        if term.is_zero() || term.order() < acc.order() - work as i64 - 2 {
            break;
        }
        acc = acc.add(&term);
        k += 1;
    }
    for _ in 0..squarings {
        acc = acc.mul(&acc);
    }
    acc.with_precision(prec)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::to_decimal;
    use num_bigint::BigInt;
    use num_traits::One;
    use proptest::prelude::*;

    // Reference digits of ln 2 for cross-checking the series.
    const LN2_100: &str =
        "0.6931471805599453094172321214581765680755001343602552541206800094933936219696947156058633269964186875";

    #[test]
    fn to_decimal_examples() {
        let d = to_decimal(&BigInt::from(22715), 6);
        assert_eq!(d.to_sci_string_digits(6), "2.27150e4");
        assert_eq!(to_decimal(&BigInt::from(0), 10).to_plain_string(), "0");
        let big = pow10(100) + BigInt::one();
        assert_eq!(
            to_decimal(&big, 10).to_sci_string_digits(10),
            "1.000000000e100"
        );
    }

    #[test]
    fn ln2_digits() {
        assert_eq!(ln2(7).to_plain_string(), "0.6931472");
        let reference = BigDecimal::parse(LN2_90, 90).unwrap();
        assert!(ln2(85).agrees_to_digits(&reference, 84));
    }

    #[test]
    fn exp_identity() {
        assert_eq!(exp(&BigDecimal::zero(20)).to_plain_string(), "1");
    }

    #[test]
    fn limit_constant_six_digits() {
        // exp(-(ln 2)^2 / 2) / (4 (ln 2)^2) = 0.409223...
        let prec = 30;
        let l = ln2(prec);
        let l2 = l.mul(&l);
        let num = exp(&l2.div(&BigDecimal::from_int(-2, prec)));
        let den = l2.mul(&BigDecimal::from_int(4, prec));
        let k = num.div(&den);
        assert_eq!(k.to_fixed_trimmed(6), "0.409223");
    }

    #[test]
    fn precision_doubling_is_stable() {
        let coarse = ln2(40);
        let fine = ln2(80);
        assert!(fine.agrees_to_digits(&coarse, 39));
        let e_coarse = exp(&coarse);
        let e_fine = exp(&fine).with_precision(40);
        assert!(e_fine.agrees_to_digits(&e_coarse, 38));
    }

    #[test]
    fn ln_matches_ln2_and_ln10() {
        let two = BigDecimal::from_int(2, 60);
        assert!(ln(&two).agrees_to_digits(&ln2(60), 58));
        let ten = BigDecimal::from_int(10, 60);
        assert!(ln(&ten).agrees_to_digits(&ln10(60), 58));
        // ln(e) = 1
        let e = exp(&BigDecimal::one(60));
        let one = BigDecimal::one(60);
        assert!(ln(&e).agrees_to_digits(&one, 58));
    }

    #[test]
    fn fixed_point_rendering() {
        let v = BigDecimal::parse("0.35120049259", 40).unwrap();
        assert_eq!(v.to_fixed_string(6), "0.351200");
        assert_eq!(v.to_fixed_trimmed(6), "0.3512");
        let neg = BigDecimal::parse("-2.23", 40).unwrap();
        assert_eq!(neg.to_fixed_string(4), "-2.2300");
        assert_eq!(neg.to_fixed_trimmed(4), "-2.23");
    }

    #[test]
    fn comparison_is_exact() {
        let a = BigDecimal::parse("0.409223", 80).unwrap();
        let b = BigDecimal::parse("0.409201", 20).unwrap();
        assert!(a > b);
        assert_eq!(
            BigDecimal::from_int(5, 10),
            BigDecimal::parse("5.0", 50).unwrap()
        );
    }

    #[test]
    fn arithmetic_round_trip() {
        let a = BigDecimal::parse("123.456", 30).unwrap();
        let b = BigDecimal::parse("0.001953125", 30).unwrap(); // 2^-9
        let q = a.div(&b);
        let back = q.mul(&b);
        assert!(back.agrees_to_digits(&a, 28));
    }

    proptest! {
        #[test]
        fn to_decimal_is_monotone(a in any::<i128>(), b in any::<i128>()) {
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            let lo_d = to_decimal(&BigInt::from(lo), 12);
            let hi_d = to_decimal(&BigInt::from(hi), 12);
            prop_assert!(lo_d.cmp_exact(&hi_d) != std::cmp::Ordering::Greater);
        }

        #[test]
        fn add_sub_cancels(a in -1_000_000_000i64..1_000_000_000, b in -1_000_000_000i64..1_000_000_000) {
            let da = BigDecimal::from_int(a, 25);
            let db = BigDecimal::from_int(b, 25);
            let sum = da.add(&db).sub(&db);
            // the operands are exactly representable at 25 digits
            prop_assert_eq!(sum, da);
        }
    }
}
