//! Low-memory streaming evaluation.
//!
//! Reindexing the `q_n` sum over `m = n - t + c` turns the assembly into a
//! scatter: each slice `m` contributes
//! `binomial(n, n-m+c) h_{n-m+c,c} g_{m,c}` to every `q_n` with `n >= m`,
//! where `0 <= c <= min(m, n - m)` (derived from `2c <= t <= n`). The
//! slice's `f` and `g` values are computed once from streamed Stirling
//! rows, the `h` factor comes from streamed rows of the `T(a,c)` triangle
//! (`t = 2a`; odd-`t` rows vanish and are never materialized), and
//! binomials step along each row by one exact small-integer update. The
//! working set is therefore one slice plus two triangle rows plus the
//! accumulator vector: linear in `max_n` table entries, with only the
//! big-integer digit growth on top.
//!
//! Within one triangle row every cell targets a distinct `n`, so cells are
//! farmed out to the worker pool and applied in ascending `(m, c)` order;
//! all arithmetic is exact, so any worker count yields bit-identical
//! records.
//!
//! Accumulator state is checkpointed every `checkpoint_interval` completed
//! rows. `q_n` is final once every slice `m <= n` has been applied, so a
//! resumed run continues exactly where the checkpoint left off.

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::arith::{exact_div, factorials};
use crate::fubini::{fubini_slice, g_slice, reduced_slice};
use crate::triangles::{next_row, TriangleKind};

use super::checkpoint::{read_checkpoint, write_checkpoint, CheckpointState};
use super::{make_records, EngineConfig, EngineError, Mode, SequenceRecord};

#[derive(Debug)]
pub enum StreamOutcome {
    Complete(Vec<SequenceRecord>),
    /// The run halted early at `stop_after_row`; final records were not
    /// produced. Any checkpoint written so far remains on disk.
    Stopped { last_row: usize },
}

pub fn run_streaming(config: &EngineConfig) -> Result<StreamOutcome, EngineError> {
    config.validate()?;
    let n_max = config.max_n;
    let facts = factorials(n_max);

    let (mut q_acc, start_row) = match resume_state(config)? {
        Some(state) => (state.q_acc, state.last_row + 1),
        None => (vec![BigInt::zero(); n_max + 1], 0),
    };

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.workers)
        .build()
        .map_err(|e| EngineError::Pool(e.to_string()))?;

    let stopped = pool.install(|| accumulate_slices(config, &facts, &mut q_acc, start_row))?;
    if let Some(last_row) = stopped {
        return Ok(StreamOutcome::Stopped { last_row });
    }

    let ps = pool.install(|| p_seq_streamed(&facts, &q_acc))?;
    Ok(StreamOutcome::Complete(make_records(q_acc, ps)))
}

/// Loads and validates a checkpoint when one is configured and present.
fn resume_state(config: &EngineConfig) -> Result<Option<CheckpointState>, EngineError> {
    let Some(path) = &config.checkpoint_path else {
        return Ok(None);
    };
    if !path.exists() {
        return Ok(None);
    }
    let state = read_checkpoint(path)?;
    if state.n_max != config.max_n {
        return Err(EngineError::CheckpointMismatch(format!(
            "checkpoint n_max={} but run has max_n={}",
            state.n_max, config.max_n
        )));
    }
    if state.mode != Mode::Streaming {
        return Err(EngineError::CheckpointMismatch(format!(
            "checkpoint mode={} but run is streaming",
            state.mode.as_str()
        )));
    }
    Ok(Some(state))
}

/// Applies slices `start_row..=n_max` to the accumulators. Returns
/// `Some(row)` when halted early by `stop_after_row`.
fn accumulate_slices(
    config: &EngineConfig,
    facts: &[BigInt],
    q_acc: &mut [BigInt],
    start_row: usize,
) -> Result<Option<usize>, EngineError> {
    let n_max = config.max_n;
    for m in start_row..=n_max {
        let f_slice = fubini_slice(m, facts);
        let reduced = reduced_slice(&f_slice, facts)?;
        let c_cap = m.min(n_max - m);
        let g = par_g_slice(&reduced, c_cap);

        let span = n_max - m;
        let a_max = (span + c_cap) / 2;
        let mut t_row: Vec<BigInt> = vec![BigInt::one()];
        for a in 0..=a_max {
            if a > 0 {
                t_row = next_row(TriangleKind::CentralT, a, &t_row);
            }
            let c_lo = (2 * a).saturating_sub(span);
            let c_hi = a.min(c_cap);
            if c_lo > c_hi {
                continue;
            }
            let binoms = row_binomials(facts, m, a, c_lo, c_hi)?;
            // Every cell in this row targets a distinct n = m + 2a - c.
            let terms: Vec<BigInt> = (c_lo..=c_hi)
                .into_par_iter()
                .map(|c| {
                    let t_val = &t_row[c];
                    if t_val.is_zero() {
                        return BigInt::zero();
                    }
                    let v = &binoms[c - c_lo] * &facts[2 * c] * t_val * &g[c];
                    if c % 2 == 0 {
                        v
                    } else {
                        -v
                    }
                })
                .collect();
            for (i, term) in terms.into_iter().enumerate() {
                let n = m + 2 * a - (c_lo + i);
                q_acc[n] += term;
            }
        }

        if let Some(path) = &config.checkpoint_path {
            if (m + 1) % config.checkpoint_interval == 0 {
                let state = CheckpointState {
                    n_max,
                    mode: Mode::Streaming,
                    last_row: m,
                    q_acc: q_acc.to_vec(),
                };
                write_checkpoint(&state, path)?;
            }
        }
        if config.stop_after_row == Some(m) {
            return Ok(Some(m));
        }
    }
    Ok(None)
}

fn par_g_slice(reduced: &[BigInt], c_cap: usize) -> Vec<BigInt> {
    if reduced.len() <= 16 {
        return g_slice(reduced, c_cap);
    }
    (0..=c_cap)
        .into_par_iter()
        .map(|c| {
            let m = reduced.len() - 1;
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

/// `binomial(m + 2a - c, 2a)` for `c = c_lo..=c_hi`: one factorial-based
/// division up front, then the exact ratio
/// `C(n-1, 2a) = C(n, 2a)(n-2a)/n` per step.
fn row_binomials(
    facts: &[BigInt],
    m: usize,
    a: usize,
    c_lo: usize,
    c_hi: usize,
) -> Result<Vec<BigInt>, EngineError> {
    let n0 = m + 2 * a - c_lo;
    let mut out = Vec::with_capacity(c_hi - c_lo + 1);
    let denom = &facts[2 * a] * &facts[n0 - 2 * a];
    out.push(exact_div(&facts[n0], &denom)?);
    for c in (c_lo + 1)..=c_hi {
        let n_prev = m + 2 * a - (c - 1);
        let next = exact_div(
            &(out.last().unwrap() * BigInt::from(m - c + 1)),
            &BigInt::from(n_prev),
        )?;
        out.push(next);
    }
    Ok(out)
}

/// Phase two: `p_n` from the finished `q` values, streaming first-kind
/// Stirling rows and splitting each dot product over the pool. Integer
/// addition is exact, so chunked summation is reduction-order independent.
fn p_seq_streamed(facts: &[BigInt], qs: &[BigInt]) -> Result<Vec<BigInt>, EngineError> {
    let n_max = qs.len() - 1;
    let mut ps = Vec::with_capacity(n_max + 1);
    let mut row: Vec<BigInt> = vec![BigInt::one()];
    for n in 0..=n_max {
        if n > 0 {
            row = next_row(TriangleKind::Stirling1, n, &row);
        }
        let sum: BigInt = row
            .par_iter()
            .zip(qs[..=n].par_iter())
            .with_min_len(64)
            .map(|(s, q)| if s.is_zero() { BigInt::zero() } else { s * q })
            .sum();
        ps.push(exact_div(&sum, &facts[n])?);
    }
    Ok(ps)
}
