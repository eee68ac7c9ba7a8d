//! Checkpoint files for the streaming engine.
//!
//! The format is line-oriented UTF-8 text:
//!
//! ```text
//! ccv1
//! n_max=<N>
//! mode=<dense|streaming>
//! last_row=<m>
//! q <n> <decimal value>        (one line per accumulator, n = 0..=N)
//! sha256=<hex digest of everything above>
//! ```
//!
//! A checkpoint captures the accumulator state after row `last_row`
//! completed; partial rows are never persisted. The trailing digest covers
//! every preceding byte, so a truncated or altered file fails closed and is
//! never partially loaded. Files are written to a temporary sibling and
//! renamed into place.

use std::fs;
use std::path::Path;

use num_bigint::BigInt;
use sha2::{Digest, Sha256};
use thiserror::Error;

use super::Mode;

pub const CHECKPOINT_MAGIC: &str = "ccv1";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckpointState {
    pub n_max: usize,
    pub mode: Mode,
    /// Index of the last fully accumulated row.
    pub last_row: usize,
    /// Partial `q` accumulators for every `n <= n_max`.
    pub q_acc: Vec<BigInt>,
}

#[derive(Debug, Error)]
pub enum CheckpointError {
    #[error("checkpoint io: {0}")]
    Io(#[from] std::io::Error),
    #[error("unsupported checkpoint version {found:?} (expected {CHECKPOINT_MAGIC:?})")]
    Version { found: String },
    #[error("checksum mismatch: checkpoint is truncated or corrupted")]
    Checksum,
    #[error("malformed checkpoint: {0}")]
    Malformed(String),
}

pub fn write_checkpoint(state: &CheckpointState, path: &Path) -> Result<(), CheckpointError> {
    let mut body = String::new();
    body.push_str(CHECKPOINT_MAGIC);
    body.push('\n');
    body.push_str(&format!("n_max={}\n", state.n_max));
    body.push_str(&format!("mode={}\n", state.mode.as_str()));
    body.push_str(&format!("last_row={}\n", state.last_row));
    for (n, q) in state.q_acc.iter().enumerate() {
        body.push_str(&format!("q {n} {}\n", q.to_str_radix(10)));
    }
    let digest = Sha256::digest(body.as_bytes());
    body.push_str(&format!("sha256={digest:x}\n"));

    let tmp = path.with_extension("ckpt.tmp");
    fs::write(&tmp, &body)?;
    fs::rename(&tmp, path)?;
    Ok(())
}

pub fn read_checkpoint(path: &Path) -> Result<CheckpointState, CheckpointError> {
    let text = fs::read_to_string(path)?;

    // The digest line must be last and must cover everything before it.
    let tail_at = text.rfind("sha256=").ok_or(CheckpointError::Checksum)?;
    let (body, tail) = text.split_at(tail_at);
    let stated = tail
        .trim_end()
        .strip_prefix("sha256=")
        .ok_or(CheckpointError::Checksum)?;
    let digest = Sha256::digest(body.as_bytes());
    if format!("{digest:x}") != stated {
        return Err(CheckpointError::Checksum);
    }

    let mut lines = body.lines();
    let magic = lines.next().unwrap_or_default();
    if magic != CHECKPOINT_MAGIC {
        return Err(CheckpointError::Version {
            found: magic.to_string(),
        });
    }

    let n_max = parse_field(lines.next(), "n_max")?;
    let mode_text = parse_field_str(lines.next(), "mode")?;
    let mode = Mode::parse(&mode_text)
        .ok_or_else(|| CheckpointError::Malformed(format!("unknown mode {mode_text:?}")))?;
    let last_row = parse_field(lines.next(), "last_row")?;

    let mut q_acc = Vec::with_capacity(n_max + 1);
    for (expected, line) in lines.enumerate() {
        let mut parts = line.splitn(3, ' ');
        if parts.next() != Some("q") {
            return Err(CheckpointError::Malformed(format!(
                "expected accumulator line, found {line:?}"
            )));
        }
        let n: usize = parts
            .next()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| CheckpointError::Malformed("bad accumulator index".into()))?;
        if n != expected {
            return Err(CheckpointError::Malformed(format!(
                "accumulator lines out of order at n={n}"
            )));
        }
        let value: BigInt = parts
            .next()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| CheckpointError::Malformed("bad accumulator value".into()))?;
        q_acc.push(value);
    }
    if q_acc.len() != n_max + 1 {
        return Err(CheckpointError::Malformed(format!(
            "expected {} accumulators, found {}",
            n_max + 1,
            q_acc.len()
        )));
    }
    if last_row > n_max {
        return Err(CheckpointError::Malformed(format!(
            "last_row {last_row} exceeds n_max {n_max}"
        )));
    }
    Ok(CheckpointState {
        n_max,
        mode,
        last_row,
        q_acc,
    })
}

fn parse_field(line: Option<&str>, key: &str) -> Result<usize, CheckpointError> {
    parse_field_str(line, key)?
        .parse()
        .map_err(|_| CheckpointError::Malformed(format!("field {key} is not an integer")))
}

fn parse_field_str(line: Option<&str>, key: &str) -> Result<String, CheckpointError> {
    let line = line.ok_or_else(|| CheckpointError::Malformed(format!("missing field {key}")))?;
    line.strip_prefix(&format!("{key}="))
        .map(str::to_string)
        .ok_or_else(|| CheckpointError::Malformed(format!("expected field {key}, found {line:?}")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use sha2::{Digest, Sha256};

    fn sample_state() -> CheckpointState {
        CheckpointState {
            n_max: 4,
            mode: Mode::Streaming,
            last_row: 2,
            q_acc: (0..=4).map(|n| BigInt::from(n * 100 + 7)).collect(),
        }
    }

    #[test]
    fn round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("state.ckpt");
        let state = sample_state();
        write_checkpoint(&state, &path).unwrap();
        let loaded = read_checkpoint(&path).unwrap();
        assert_eq!(loaded, state);
    }

    #[test]
    fn truncated_file_fails_checksum() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("state.ckpt");
        write_checkpoint(&sample_state(), &path).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        std::fs::write(&path, &text[..text.len() / 2]).unwrap();
        assert!(matches!(
            read_checkpoint(&path),
            Err(CheckpointError::Checksum)
        ));
    }

    #[test]
    fn altered_payload_fails_checksum() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("state.ckpt");
        write_checkpoint(&sample_state(), &path).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        std::fs::write(&path, text.replace("107", "108")).unwrap();
        assert!(matches!(
            read_checkpoint(&path),
            Err(CheckpointError::Checksum)
        ));
    }

    #[test]
    fn old_version_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("state.ckpt");
        // well-formed file with a valid digest but a v0 header
        let mut body = String::from("ccv0\nn_max=1\nmode=streaming\nlast_row=0\nq 0 1\nq 1 1\n");
        let digest = Sha256::digest(body.as_bytes());
        body.push_str(&format!("sha256={digest:x}\n"));
        std::fs::write(&path, body).unwrap();
        match read_checkpoint(&path) {
            Err(CheckpointError::Version { found }) => assert_eq!(found, "ccv0"),
            other => panic!("expected version error, got {other:?}"),
        }
    }
}
