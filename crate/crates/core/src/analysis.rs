//! Asymptotic diagnostics and the congruence checker.
//!
//! The central quantity is the ratio `r_n = p_n (ln 2)^{2n} / n!`, which
//! approaches the constant `K = e^{-(ln 2)^2/2} / (4 (ln 2)^2)` from below.
//! This module computes `r_n` in high-precision decimal arithmetic,
//! tabulates the gap `K - r_n` on log/log axes, fits the tail with a least
//! squares line (free slope and slope fixed to -1), and scans the computed
//! `q_n` values for counterexamples to the periodicity conjecture
//! `q_{n+phi(p^m)} = q_n (mod p^m)`. The congruence scan reports findings;
//! it never asserts the conjecture.

use num_bigint::BigInt;
use num_traits::One;
use thiserror::Error;

use crate::arith::decimal::{self, BigDecimal, DEFAULT_PRECISION};
use crate::arith::to_decimal;
use crate::engine::SequenceRecord;

/// Ratios need enough working digits that the gap `K - r_n` survives the
/// cancellation with room to spare.
pub const MIN_RATIO_PRECISION: usize = 20;

#[derive(Debug, Error)]
pub enum AnalysisError {
    #[error("gap K - r_n is nonpositive at n={n}, contradicting all computed data")]
    NonpositiveGap { n: usize },
    #[error("{p} is not prime")]
    NotPrime { p: u64 },
    #[error("need at least 2 points with n >= {n_min}, found {found}")]
    TooFewPoints { n_min: usize, found: usize },
    #[error("all selected points share one abscissa; no line is determined")]
    DegenerateFit,
    #[error("precision {given} is below the minimum {min} for ratio computation")]
    PrecisionTooLow { given: usize, min: usize },
}

/// `K = e^{-(ln 2)^2 / 2} / (4 (ln 2)^2)`, the limit of `r_n`, at the
/// requested number of significant digits.
pub fn constant_k(precision: usize) -> BigDecimal {
    assert!(precision >= 1);
    let work = precision + 10;
    let l = decimal::ln2(work);
    let l_squared = l.mul(&l);
    let numerator = decimal::exp(&l_squared.div(&BigDecimal::from_int(-2, work)));
    let denominator = l_squared.mul(&BigDecimal::from_int(4, work));
    numerator.div(&denominator).with_precision(precision)
}

/// One ratio row: `r_n`, its gap below `K`, and the log/log coordinates
/// used by the tail fit. `log_gap` is empty when the gap is not positive.
#[derive(Debug, Clone)]
pub struct RatioRecord {
    pub n: usize,
    pub r: BigDecimal,
    pub gap: BigDecimal,
    pub log_n: BigDecimal,
    pub log_gap: Option<BigDecimal>,
}

/// Caches `ln 2` and `K` at working precision so that batch ratio
/// computation does not re-derive them per row.
pub struct RatioComputer {
    precision: usize,
    work: usize,
    ln2_w: BigDecimal,
    k_w: BigDecimal,
}

impl RatioComputer {
    pub fn new(precision: usize) -> Result<Self, AnalysisError> {
        if precision < MIN_RATIO_PRECISION {
            return Err(AnalysisError::PrecisionTooLow {
                given: precision,
                min: MIN_RATIO_PRECISION,
            });
        }
        let work = precision + 10;
        Ok(Self {
            precision,
            work,
            ln2_w: decimal::ln2(work),
            k_w: constant_k(work),
        })
    }

    pub fn limit_constant(&self) -> BigDecimal {
        self.k_w.with_precision(self.precision)
    }

    /// `r_n` from the exact `p_n`: the integer's top digits are taken at
    /// working precision (never the full multi-thousand-digit expansion),
    /// then scaled by `(ln 2)^{2n} / n!`.
    pub fn ratio(&self, n: usize, p_n: &BigInt, factorial_n: &BigInt) -> RatioRecord {
        assert!(n >= 1, "ratios start at n = 1");
        let p_dec = to_decimal(p_n, self.work);
        let scale = self.ln2_w.pow(2 * n as u64);
        let r_w = p_dec.mul(&scale).div(&to_decimal(factorial_n, self.work));
        let gap_w = self.k_w.sub(&r_w);
        let log_gap = if gap_w.is_positive() {
            Some(decimal::ln(&gap_w).with_precision(self.precision))
        } else {
            None
        };
        let log_n = decimal::ln(&BigDecimal::from_int(n as i64, self.work))
            .with_precision(self.precision);
        RatioRecord {
            n,
            r: r_w.with_precision(self.precision),
            gap: gap_w.with_precision(self.precision),
            log_n,
            log_gap,
        }
    }
}

/// `r_n` for a single index. `precision` must be at least
/// [`MIN_RATIO_PRECISION`]; the result carries relative error below
/// `10^(5-precision)`.
pub fn compute_ratio(
    n: usize,
    p_n: &BigInt,
    precision: usize,
) -> Result<RatioRecord, AnalysisError> {
    let computer = RatioComputer::new(precision)?;
    let mut factorial = BigInt::one();
    for i in 2..=n {
        factorial *= BigInt::from(i);
    }
    Ok(computer.ratio(n, p_n, &factorial))
}

/// Ratio rows for every record with `n >= 1`.
pub fn ratio_records(
    records: &[SequenceRecord],
    precision: usize,
) -> Result<Vec<RatioRecord>, AnalysisError> {
    let computer = RatioComputer::new(precision)?;
    let mut factorial = BigInt::one();
    let mut out = Vec::new();
    for record in records {
        if record.n >= 1 {
            factorial *= BigInt::from(record.n);
            out.push(computer.ratio(record.n, &record.p, &factorial));
        }
    }
    Ok(out)
}

/// Fills the `ratio` field of each record with `n >= 1`.
pub fn attach_ratios(
    records: &mut [SequenceRecord],
    precision: usize,
) -> Result<(), AnalysisError> {
    let ratios = ratio_records(records, precision)?;
    let mut iter = ratios.into_iter();
    for record in records.iter_mut() {
        if record.n >= 1 {
            record.ratio = Some(iter.next().expect("one ratio per record").r);
        }
    }
    Ok(())
}

#[derive(Debug, Clone)]
pub struct Figure4Point {
    pub n: usize,
    pub log_n: BigDecimal,
    pub log_gap: BigDecimal,
}

/// The gap data on log/log axes, one point per ratio row. A nonpositive
/// gap is an error: every computed value lies strictly below `K`.
pub fn figure4_data(records: &[RatioRecord]) -> Result<Vec<Figure4Point>, AnalysisError> {
    records
        .iter()
        .map(|r| match &r.log_gap {
            Some(log_gap) => Ok(Figure4Point {
                n: r.n,
                log_n: r.log_n.clone(),
                log_gap: log_gap.clone(),
            }),
            None => Err(AnalysisError::NonpositiveGap { n: r.n }),
        })
        .collect()
}

/// CSV emission: header `n,log_n,log_gap`, values at 12 significant digits.
pub fn figure4_csv(points: &[Figure4Point]) -> String {
    let mut out = String::from("n,log_n,log_gap\n");
    for p in points {
        out.push_str(&format!(
            "{},{},{}\n",
            p.n,
            p.log_n.to_sig_string(12),
            p.log_gap.to_sig_string(12)
        ));
    }
    out
}

#[derive(Debug, Clone)]
pub struct FitPoint {
    pub n: usize,
    pub x: BigDecimal,
    pub y: BigDecimal,
}

impl From<&Figure4Point> for FitPoint {
    fn from(p: &Figure4Point) -> Self {
        FitPoint {
            n: p.n,
            x: p.log_n.clone(),
            y: p.log_gap.clone(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct TailFit {
    pub slope: BigDecimal,
    pub intercept: BigDecimal,
    /// Intercept of the constrained fit with slope fixed to -1.
    pub slope_fixed_intercept: BigDecimal,
    pub points_used: usize,
}

/// Least-squares line over the points with `n >= n_min`, plus the
/// constrained fit with slope fixed to -1 (whose intercept is the mean of
/// `y + x`).
pub fn fit_tail_intercept(points: &[FitPoint], n_min: usize) -> Result<TailFit, AnalysisError> {
    let selected: Vec<&FitPoint> = points.iter().filter(|p| p.n >= n_min).collect();
    if selected.len() < 2 {
        return Err(AnalysisError::TooFewPoints {
            n_min,
            found: selected.len(),
        });
    }
    let prec = selected
        .iter()
        .map(|p| p.x.precision())
        .max()
        .unwrap_or(DEFAULT_PRECISION);
    let count = BigDecimal::from_int(selected.len() as i64, prec);
    let mut sx = BigDecimal::zero(prec);
    let mut sy = BigDecimal::zero(prec);
    let mut sxy = BigDecimal::zero(prec);
    let mut sxx = BigDecimal::zero(prec);
    let mut s_sum = BigDecimal::zero(prec);
    for p in &selected {
        sx = sx.add(&p.x);
        sy = sy.add(&p.y);
        sxy = sxy.add(&p.x.mul(&p.y));
        sxx = sxx.add(&p.x.mul(&p.x));
        s_sum = s_sum.add(&p.y.add(&p.x));
    }
    let denom = count.mul(&sxx).sub(&sx.mul(&sx));
    if denom.is_zero() {
        return Err(AnalysisError::DegenerateFit);
    }
    let slope = count.mul(&sxy).sub(&sx.mul(&sy)).div(&denom);
    let intercept = sy.sub(&slope.mul(&sx)).div(&count);
    let slope_fixed_intercept = s_sum.div(&count);
    Ok(TailFit {
        slope,
        intercept,
        slope_fixed_intercept,
        points_used: selected.len(),
    })
}

/// Deterministic primality by trial division; the scan only ever uses
/// small primes.
pub fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    if p % 2 == 0 {
        return p == 2;
    }
    let mut d = 3u64;
    while d.saturating_mul(d) <= p {
        if p % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

/// Euler's totient of a prime power: `phi(p^m) = p^(m-1) (p - 1)`.
pub fn totient_prime_power(p: u64, m: u32) -> Result<BigInt, AnalysisError> {
    if !is_prime(p) {
        return Err(AnalysisError::NotPrime { p });
    }
    assert!(m >= 1);
    Ok(BigInt::from(p).pow(m - 1) * BigInt::from(p - 1))
}

#[derive(Debug, Clone)]
pub struct CongruenceReport {
    pub p: u64,
    pub m: u32,
    /// `phi(p^m)`.
    pub period: usize,
    /// Inclusive range of `n` actually compared (empty when `n_hi < n_lo`).
    pub n_lo: usize,
    pub n_hi: usize,
    pub checked: usize,
    /// Indices `n` where `q_{n+period} != q_n (mod p^m)`.
    pub violations: Vec<usize>,
}

impl CongruenceReport {
    pub fn holds(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Tests `q_{n+phi(p^m)} = q_n (mod p^m)` for all
/// `n in [max(n_min, m), len - 1 - period]`, reducing the stored exact
/// values. Violations are reported, never asserted away.
pub fn check_congruence(
    qs: &[BigInt],
    p: u64,
    m: u32,
    n_min: usize,
) -> Result<CongruenceReport, AnalysisError> {
    if !is_prime(p) {
        return Err(AnalysisError::NotPrime { p });
    }
    assert!(m >= 1);
    let period_big = totient_prime_power(p, m)?;
    let period: usize = period_big.to_string().parse().expect("small period");
    let modulus = BigInt::from(p).pow(m);
    let n_lo = n_min.max(m as usize);
    let n_hi = qs.len().saturating_sub(1).saturating_sub(period);
    let mut violations = Vec::new();
    let mut checked = 0;
    for n in n_lo..=n_hi {
        if n + period >= qs.len() {
            break;
        }
        checked += 1;
        if &qs[n + period] % &modulus != &qs[n] % &modulus {
            violations.push(n);
        }
    }
    Ok(CongruenceReport {
        p,
        m,
        period,
        n_lo,
        n_hi,
        checked,
        violations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::factorials;
    use crate::triangles::{TriangleKind, TriangleTable};
    use num_bigint::BigInt;

    #[test]
    fn limit_constant_digits() {
        assert_eq!(constant_k(6).to_plain_string(), "0.409223");
        assert_eq!(constant_k(1).to_plain_string(), "0.4");
        // K exceeds the deepest tabulated ratio
        let r5000 = BigDecimal::parse("0.409201", 40).unwrap();
        assert!(constant_k(40) > r5000);
        // doubling precision never changes earlier digits
        assert!(constant_k(80).agrees_to_digits(&constant_k(40), 39));
    }

    #[test]
    fn first_ratio() {
        let record = compute_ratio(1, &BigInt::from(1), 30).unwrap();
        assert_eq!(record.r.to_fixed_trimmed(6), "0.480453");
        assert!(record.gap.is_positive());
    }

    #[test]
    fn golden_ratio_at_twenty() {
        let p20: BigInt = "2285943548113541477123970".parse().unwrap();
        let record = compute_ratio(20, &p20, 40).unwrap();
        assert_eq!(record.r.to_fixed_trimmed(6), "0.403608");
    }

    #[test]
    fn precision_floor_is_enforced() {
        assert!(matches!(
            compute_ratio(1, &BigInt::from(1), 10),
            Err(AnalysisError::PrecisionTooLow { .. })
        ));
    }

    #[test]
    fn figure4_rejects_nonpositive_gap() {
        let bad = RatioRecord {
            n: 7,
            r: BigDecimal::from_int(1, 20),
            gap: BigDecimal::from_int(-1, 20),
            log_n: BigDecimal::zero(20),
            log_gap: None,
        };
        assert!(matches!(
            figure4_data(&[bad]),
            Err(AnalysisError::NonpositiveGap { n: 7 })
        ));
        assert!(figure4_data(&[]).unwrap().is_empty());
    }

    #[test]
    fn figure4_csv_shape() {
        let record = compute_ratio(20, &"2285943548113541477123970".parse().unwrap(), 40).unwrap();
        let points = figure4_data(&[record]).unwrap();
        let csv = figure4_csv(&points);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines.len(), 2);
        assert_eq!(lines[0], "n,log_n,log_gap");
        assert!(lines[1].starts_with("20,"));
    }

    #[test]
    fn collinear_fit() {
        let points = vec![
            FitPoint {
                n: 0,
                x: BigDecimal::zero(30),
                y: BigDecimal::zero(30),
            },
            FitPoint {
                n: 1,
                x: BigDecimal::from_int(1, 30),
                y: BigDecimal::from_int(-1, 30),
            },
        ];
        let fit = fit_tail_intercept(&points, 0).unwrap();
        assert_eq!(fit.slope, BigDecimal::from_int(-1, 30));
        assert!(fit.intercept.is_zero());
        assert!(fit.slope_fixed_intercept.is_zero());
        assert_eq!(fit.points_used, 2);
        assert!(matches!(
            fit_tail_intercept(&points, 5),
            Err(AnalysisError::TooFewPoints { found: 0, .. })
        ));
    }

    #[test]
    fn totient_values() {
        assert_eq!(totient_prime_power(2, 1).unwrap(), BigInt::from(1));
        assert_eq!(totient_prime_power(3, 2).unwrap(), BigInt::from(6));
        assert_eq!(totient_prime_power(5, 1).unwrap(), BigInt::from(4));
        assert!(matches!(
            totient_prime_power(4, 1),
            Err(AnalysisError::NotPrime { p: 4 })
        ));
    }

    #[test]
    fn congruence_on_small_table() {
        let qs: Vec<BigInt> = [1u64, 1, 5, 97, 3365, 177601]
            .iter()
            .map(|&v| BigInt::from(v))
            .collect();
        // p=2, m=1 (period 1): consecutive q are all odd
        let report = check_congruence(&qs, 2, 1, 1).unwrap();
        assert!(report.holds());
        assert_eq!(report.period, 1);
        assert!(report.checked >= 4);
        // p=3, m=1 (period 2): 3365 = 5 = 2 (mod 3)
        assert!(check_congruence(&qs, 3, 1, 1).unwrap().holds());
        // p=2, m=2 (period 2): 3365 = 5 = 1 (mod 4)
        assert!(check_congruence(&qs, 2, 2, 2).unwrap().holds());
        assert!(matches!(
            check_congruence(&qs, 4, 1, 1),
            Err(AnalysisError::NotPrime { p: 4 })
        ));
    }

    #[test]
    fn stirling_first_kind_bound() {
        // s(n, n-k) <= n^{2k} / (2^k k!), compared exactly as
        // s(n, n-k) 2^k k! <= n^{2k}
        let table = TriangleTable::build(TriangleKind::Stirling1, 60);
        let facts = factorials(60);
        for n in 0..=60usize {
            for k in 0..=n {
                let lhs = table.get(n, n - k) * BigInt::from(2).pow(k as u32) * &facts[k];
                let rhs = BigInt::from(n as u64).pow(2 * k as u32);
                if n == 0 && k == 0 {
                    continue; // 0^0 convention; s(0,0) = 1 = bound
                }
                assert!(lhs <= rhs, "n={n} k={k}");
            }
        }
    }
}
