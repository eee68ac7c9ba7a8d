//! Results files: the on-disk record format shared by the CLI commands.
//!
//! The TSV form is one record per line with TAB-separated fields
//! `n`, decimal `p_n`, `digit_count`, and (when requested) decimal `q_n`.
//! The JSON form is an array of objects with the same fields. Big values
//! are carried as decimal strings in both forms, so files round-trip
//! losslessly into the ratio and congruence commands.

use std::io::{self, BufRead, Write};

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::engine::SequenceRecord;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FileFormat {
    Tsv,
    Json,
}

#[derive(Debug, Error)]
pub enum ResultsError {
    #[error("results io: {0}")]
    Io(#[from] io::Error),
    #[error("results file is empty")]
    Empty,
    #[error("line {line}: {reason}")]
    Malformed { line: usize, reason: String },
    #[error("results json: {0}")]
    Json(#[from] serde_json::Error),
}

/// A record as read back from disk; `q` is present only in files written
/// with the q column enabled.
#[derive(Debug, Clone, PartialEq)]
pub struct StoredRecord {
    pub n: usize,
    pub p: BigInt,
    pub digit_count: usize,
    pub q: Option<BigInt>,
}

#[derive(Serialize, Deserialize)]
struct JsonRecord {
    n: usize,
    p_n: String,
    digit_count: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    q_n: Option<String>,
}

pub fn write_records(
    w: &mut impl Write,
    records: &[SequenceRecord],
    format: FileFormat,
    emit_q: bool,
) -> Result<(), ResultsError> {
    match format {
        FileFormat::Tsv => {
            for r in records {
                if emit_q {
                    writeln!(w, "{}\t{}\t{}\t{}", r.n, r.p, r.digit_count, r.q)?;
                } else {
                    writeln!(w, "{}\t{}\t{}", r.n, r.p, r.digit_count)?;
                }
            }
        }
        FileFormat::Json => {
            let rows: Vec<JsonRecord> = records
                .iter()
                .map(|r| JsonRecord {
                    n: r.n,
                    p_n: r.p.to_string(),
                    digit_count: r.digit_count,
                    q_n: emit_q.then(|| r.q.to_string()),
                })
                .collect();
            serde_json::to_writer_pretty(&mut *w, &rows)?;
            writeln!(w)?;
        }
    }
    Ok(())
}

/// Reads either format back, detecting JSON by a leading `[`.
pub fn read_records(reader: impl BufRead) -> Result<Vec<StoredRecord>, ResultsError> {
    let mut content = String::new();
    let mut reader = reader;
    reader.read_to_string(&mut content)?;
    let trimmed = content.trim_start();
    if trimmed.is_empty() {
        return Err(ResultsError::Empty);
    }
    if trimmed.starts_with('[') {
        let rows: Vec<JsonRecord> = serde_json::from_str(trimmed)?;
        if rows.is_empty() {
            return Err(ResultsError::Empty);
        }
        rows.into_iter()
            .enumerate()
            .map(|(i, row)| {
                let parse = |s: &str| -> Result<BigInt, ResultsError> {
                    s.parse().map_err(|_| ResultsError::Malformed {
                        line: i + 1,
                        reason: format!("bad integer {s:?}"),
                    })
                };
                Ok(StoredRecord {
                    n: row.n,
                    p: parse(&row.p_n)?,
                    digit_count: row.digit_count,
                    q: row.q_n.as_deref().map(parse).transpose()?,
                })
            })
            .collect()
    } else {
        content
            .lines()
            .enumerate()
            .filter(|(_, line)| !line.trim().is_empty())
            .map(|(i, line)| parse_tsv_line(i + 1, line))
            .collect()
    }
}

fn parse_tsv_line(line_no: usize, line: &str) -> Result<StoredRecord, ResultsError> {
    let fields: Vec<&str> = line.split('\t').collect();
    if fields.len() != 3 && fields.len() != 4 {
        return Err(ResultsError::Malformed {
            line: line_no,
            reason: format!("expected 3 or 4 TAB-separated fields, found {}", fields.len()),
        });
    }
    let bad = |what: &str| ResultsError::Malformed {
        line: line_no,
        reason: format!("bad {what} field"),
    };
    Ok(StoredRecord {
        n: fields[0].parse().map_err(|_| bad("n"))?,
        p: fields[1].parse().map_err(|_| bad("p"))?,
        digit_count: fields[2].parse().map_err(|_| bad("digit_count"))?,
        q: fields
            .get(3)
            .map(|s| s.parse().map_err(|_| bad("q")))
            .transpose()?,
    })
}
