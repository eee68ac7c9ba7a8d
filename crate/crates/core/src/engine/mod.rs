//! Assembly of the target sequences from the component tables.
//!
//! The quantities are
//!
//! * `q_{n,k}` — pairs of weak orders on `{1..n}` with `k` distinguished
//!   consecutive embeddings;
//! * `q_n = sum_k (-1)^k q_{n,k}` — pairs with no consecutive embedding,
//!   assembled directly as
//!   `q_n = sum_c sum_t binomial(n,t) h_{t,c} g_{n-t+c,c}`;
//! * `p_n = (1/n!) sum_k s(n,k) q_k` — the number of parabolic double
//!   cosets of `S_n` (equivalently, maximal two-way contingency tables
//!   with sum `n`), where the division is exact by construction.
//!
//! Two execution modes produce bit-identical records:
//!
//! * [`run_dense`] caches all triangles and tables (quadratic memory,
//!   single-threaded);
//! * [`run_streaming`] reindexes the `q_n` sum over `m = n - t + c`, keeps
//!   only one `f`/`g` slice and two triangle rows at a time (linear table
//!   memory), distributes independent `(m, c)` cells over a worker pool,
//!   and checkpoints at row boundaries.

pub mod checkpoint;
mod streaming;

use std::path::PathBuf;

use num_bigint::BigInt;
use num_traits::Zero;
use thiserror::Error;

use crate::arith::{decimal_digits, exact_div, factorials, ArithError, BigDecimal};
use crate::fubini::{FubiniTable, GTable};
use crate::triangles::{binomial, TriangleKind, TriangleTable};

pub use checkpoint::{read_checkpoint, write_checkpoint, CheckpointError, CheckpointState};
pub use streaming::{run_streaming, StreamOutcome};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Dense,
    Streaming,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Dense => "dense",
            Mode::Streaming => "streaming",
        }
    }

    pub fn parse(text: &str) -> Option<Self> {
        match text {
            "dense" => Some(Mode::Dense),
            "streaming" => Some(Mode::Streaming),
            _ => None,
        }
    }
}

/// Dense tables refuse to build past this bound by default; the quadratic
/// table footprint is the limiting resource, exactly what streaming mode
/// exists to avoid.
pub const DENSE_CUTOFF_DEFAULT: usize = 1000;

#[derive(Debug, Clone)]
pub struct EngineConfig {
    pub max_n: usize,
    pub mode: Mode,
    pub workers: usize,
    pub checkpoint_path: Option<PathBuf>,
    /// Rows between checkpoint writes (streaming mode).
    pub checkpoint_interval: usize,
    /// Streaming mode: halt after this row completes, leaving any written
    /// checkpoint behind. Used by checkpoint/resume drills.
    pub stop_after_row: Option<usize>,
    pub dense_cutoff: usize,
}

impl EngineConfig {
    pub fn new(max_n: usize) -> Self {
        Self {
            max_n,
            mode: Mode::Dense,
            workers: 1,
            checkpoint_path: None,
            checkpoint_interval: 32,
            stop_after_row: None,
            dense_cutoff: DENSE_CUTOFF_DEFAULT,
        }
    }

    pub fn with_mode(mut self, mode: Mode) -> Self {
        self.mode = mode;
        self
    }

    pub fn with_workers(mut self, workers: usize) -> Self {
        self.workers = workers;
        self
    }

    fn validate(&self) -> Result<(), EngineError> {
        if self.workers < 1 {
            return Err(EngineError::Config("workers must be at least 1".into()));
        }
        if self.checkpoint_interval < 1 {
            return Err(EngineError::Config(
                "checkpoint interval must be at least 1 row".into(),
            ));
        }
        Ok(())
    }
}

/// One output row of the pipeline. The ratio field stays empty until the
/// analysis stage fills it.
#[derive(Debug, Clone, PartialEq)]
pub struct SequenceRecord {
    pub n: usize,
    pub q: BigInt,
    pub p: BigInt,
    pub digit_count: usize,
    pub ratio: Option<BigDecimal>,
}

impl SequenceRecord {
    fn new(n: usize, q: BigInt, p: BigInt) -> Self {
        let digit_count = decimal_digits(&p);
        Self {
            n,
            q,
            p,
            digit_count,
            ratio: None,
        }
    }
}

#[derive(Debug, Error)]
pub enum EngineError {
    #[error("invalid engine configuration: {0}")]
    Config(String),
    #[error("formula integrality violated: {0}")]
    Arith(#[from] ArithError),
    #[error("checkpoint: {0}")]
    Checkpoint(#[from] CheckpointError),
    #[error("refusing to resume: checkpoint does not match this run ({0})")]
    CheckpointMismatch(String),
    #[error("dense mode is capped at max_n <= {cutoff}; use streaming mode")]
    DenseCutoff { cutoff: usize },
    #[error("failed to build worker pool: {0}")]
    Pool(String),
}

/// All precomputed tables for dense-mode evaluation up to `n_max`.
#[derive(Debug)]
pub struct DenseTables {
    n_max: usize,
    pub binomial: TriangleTable,
    pub stirling1: TriangleTable,
    pub stirling2: TriangleTable,
    pub central_t: TriangleTable,
    pub fubini: FubiniTable,
    pub g: GTable,
    pub facts: Vec<BigInt>,
}

impl DenseTables {
    pub fn new(n_max: usize) -> Result<Self, EngineError> {
        let fubini = FubiniTable::build(n_max);
        let g = GTable::build(&fubini)?;
        Ok(Self {
            n_max,
            binomial: TriangleTable::build(TriangleKind::Binomial, n_max),
            stirling1: TriangleTable::build(TriangleKind::Stirling1, n_max),
            stirling2: TriangleTable::build(TriangleKind::Stirling2, n_max),
            central_t: TriangleTable::build(TriangleKind::CentralT, n_max / 2),
            fubini,
            g,
            facts: factorials(n_max),
        })
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    /// `h_{2a,c} = (-1)^c (2c)! T(a,c)` using the cached factorials.
    fn h_even(&self, a: usize, c: usize) -> BigInt {
        let magnitude = &self.facts[2 * c] * self.central_t.get(a, c);
        if c % 2 == 0 {
            magnitude
        } else {
            -magnitude
        }
    }

    /// Pairs of weak orders on `{1..n}` with `k` distinguished consecutive
    /// embeddings. Zero for `k > n`; `2 n!` for `k = n - 1 >= 1`.
    pub fn q_nk(&self, n: usize, k: usize) -> BigInt {
        assert!(n <= self.n_max, "q_nk index past built tables");
        if k > n {
            return BigInt::zero();
        }
        let mut total = BigInt::zero();
        // The t-range is empty for c > n - k, so c is capped at min(k, n-k).
        for c in 0..=k.min(n - k) {
            let split = binomial(k as i64 - 1, (k - c) as i64)
                .expect("k >= c keeps the extended binomial in domain");
            if split.is_zero() {
                continue;
            }
            let mut c_sum = BigInt::zero();
            for t in (c + k)..=n {
                let s2 = self.stirling2.get(t, c + k);
                if s2.is_zero() {
                    continue;
                }
                c_sum += self.binomial.get(n, t) * &self.facts[c + k] * s2 * self.g.get(n - t + c, c);
            }
            total += split * c_sum;
        }
        total
    }

    /// `q_n = sum_{c=0..n/2} sum_{t=2c..n} binomial(n,t) h_{t,c} g_{n-t+c,c}`;
    /// odd `t` contributes nothing since `h` vanishes there.
    pub fn q_value(&self, n: usize) -> BigInt {
        assert!(n <= self.n_max, "q index past built tables");
        let mut sum = BigInt::zero();
        for c in 0..=(n / 2) {
            for t in (2 * c..=n).step_by(2) {
                let h = self.h_even(t / 2, c);
                if h.is_zero() {
                    continue;
                }
                sum += self.binomial.get(n, t) * h * self.g.get(n - t + c, c);
            }
        }
        sum
    }

    pub fn q_seq(&self) -> Vec<BigInt> {
        (0..=self.n_max).map(|n| self.q_value(n)).collect()
    }

    /// `q_{n,0} = f_n^2`.
    pub fn q0_seq(&self) -> Vec<BigInt> {
        (0..=self.n_max)
            .map(|n| self.fubini.ordinary(n) * self.fubini.ordinary(n))
            .collect()
    }
}

/// `p_n = (1/n!) sum_{k=0..n} s(n,k) q_k` for every prefix of `qs`. The
/// same transform maps `q_{n,0}` to `p_{n,0}`. Non-divisibility is a
/// formula bug and surfaces as a hard error.
pub fn p_seq(
    stirling1: &TriangleTable,
    facts: &[BigInt],
    qs: &[BigInt],
) -> Result<Vec<BigInt>, EngineError> {
    (0..qs.len())
        .map(|n| {
            let mut sum = BigInt::zero();
            for (k, q) in qs.iter().enumerate().take(n + 1) {
                let s = stirling1.get(n, k);
                if !s.is_zero() {
                    sum += s * q;
                }
            }
            exact_div(&sum, &facts[n]).map_err(EngineError::from)
        })
        .collect()
}

fn make_records(qs: Vec<BigInt>, ps: Vec<BigInt>) -> Vec<SequenceRecord> {
    qs.into_iter()
        .zip(ps)
        .enumerate()
        .map(|(n, (q, p))| SequenceRecord::new(n, q, p))
        .collect()
}

/// Single-threaded dense evaluation: all tables cached, quadratic memory.
pub fn run_dense(config: &EngineConfig) -> Result<Vec<SequenceRecord>, EngineError> {
    config.validate()?;
    if config.max_n > config.dense_cutoff {
        return Err(EngineError::DenseCutoff {
            cutoff: config.dense_cutoff,
        });
    }
    let tables = DenseTables::new(config.max_n)?;
    let qs = tables.q_seq();
    let ps = p_seq(&tables.stirling1, &tables.facts, &qs)?;
    Ok(make_records(qs, ps))
}

/// Runs the configured mode to completion.
pub fn run(config: &EngineConfig) -> Result<Vec<SequenceRecord>, EngineError> {
    match config.mode {
        Mode::Dense => run_dense(config),
        Mode::Streaming => match run_streaming(config)? {
            StreamOutcome::Complete(records) => Ok(records),
            StreamOutcome::Stopped { last_row } => Err(EngineError::Config(format!(
                "streaming run halted after row {last_row} by stop_after_row"
            ))),
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::factorials;

    fn bi(v: i64) -> BigInt {
        BigInt::from(v)
    }

    // Table of small q_n / q_{n,k} values used across the suite.
    pub(crate) const TABLE_Q: [i64; 6] = [1, 1, 5, 97, 3365, 177601];
    pub(crate) const TABLE_QNK: [[i64; 5]; 6] = [
        [1, 0, 0, 0, 0],
        [1, 0, 0, 0, 0],
        [9, 4, 0, 0, 0],
        [169, 84, 12, 0, 0],
        [5625, 2812, 600, 48, 0],
        [292681, 145380, 34380, 4320, 240],
    ];

    #[test]
    fn q_nk_small_table() {
        let tables = DenseTables::new(5).unwrap();
        for (n, row) in TABLE_QNK.iter().enumerate() {
            for (k, &want) in row.iter().enumerate() {
                assert_eq!(tables.q_nk(n, k), bi(want), "q_({n},{k})");
            }
        }
        assert_eq!(tables.q_nk(3, 2), bi(12));
        assert_eq!(tables.q_nk(5, 4), bi(240));
        assert_eq!(tables.q_nk(4, 7), bi(0));
    }

    #[test]
    fn q_sequence_small() {
        let tables = DenseTables::new(5).unwrap();
        let qs = tables.q_seq();
        for (n, &want) in TABLE_Q.iter().enumerate() {
            assert_eq!(qs[n], bi(want), "q_{n}");
        }
    }

    #[test]
    fn q0_sequence_small() {
        let tables = DenseTables::new(5).unwrap();
        let q0 = tables.q0_seq();
        assert_eq!(q0[0], bi(1));
        assert_eq!(q0[4], bi(5625));
        assert_eq!(q0[5], bi(292681));
        assert_eq!(q0[5], bi(541) * bi(541));
    }

    #[test]
    fn p_small_values() {
        let records = run_dense(&EngineConfig::new(8)).unwrap();
        assert_eq!(records[3].p, bi(19));
        assert_eq!(records[8].p, bi(5597524));
    }

    #[test]
    fn p0_via_same_transform() {
        let tables = DenseTables::new(4).unwrap();
        let p0 = p_seq(&tables.stirling1, &tables.facts, &tables.q0_seq()).unwrap();
        assert_eq!(p0[1..], [bi(1), bi(5), bi(33), bi(281)]);
    }

    #[test]
    fn run_dense_single_row() {
        let records = run_dense(&EngineConfig::new(0)).unwrap();
        assert_eq!(records.len(), 1);
        assert_eq!(records[0].n, 0);
        assert_eq!(records[0].q, bi(1));
        assert_eq!(records[0].p, bi(1));
        assert_eq!(records[0].digit_count, 1);
    }

    #[test]
    fn dense_cutoff_is_enforced() {
        let mut config = EngineConfig::new(50);
        config.dense_cutoff = 20;
        assert!(matches!(
            run_dense(&config),
            Err(EngineError::DenseCutoff { cutoff: 20 })
        ));
    }

    #[test]
    fn inclusion_exclusion_consistency() {
        let tables = DenseTables::new(25).unwrap();
        let qs = tables.q_seq();
        for n in 0..=25usize {
            let mut alternating = BigInt::zero();
            for k in 0..=n {
                let term = tables.q_nk(n, k);
                if k % 2 == 0 {
                    alternating += term;
                } else {
                    alternating -= term;
                }
            }
            assert_eq!(alternating, qs[n], "n={n}");
        }
    }

    #[test]
    fn single_chain_rows() {
        let tables = DenseTables::new(25).unwrap();
        let facts = factorials(25);
        for n in 2..=25usize {
            assert_eq!(tables.q_nk(n, n - 1), bi(2) * &facts[n], "n={n}");
            for k in n..=(n + 3) {
                assert_eq!(tables.q_nk(n, k), bi(0), "n={n} k={k}");
            }
        }
    }
}
