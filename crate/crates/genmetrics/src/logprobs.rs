//! Log-prob tables: UTF-8 TSV with header
//! `sample_id<TAB>origin<TAB>logp<TAB>logq[<TAB>length]`.
//!
//! `origin` is `P` (oracle sample) or `Q` (model sample); `logp` and `logq`
//! are natural-log densities and must be finite. Empty lines are ignored.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use genmetrics_core::{LogProbRecord, LogProbTable, Origin};

use crate::error::{Error, Location, Result};

const BASE_HEADER: [&str; 4] = ["sample_id", "origin", "logp", "logq"];

pub fn read_logprobs(path: impl AsRef<Path>) -> Result<LogProbTable> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    let text = std::str::from_utf8(&bytes).map_err(|e| {
        let line = bytes[..e.valid_up_to()].iter().filter(|&&b| b == b'\n').count() + 1;
        Error::parse(path, Location::Line(line), "invalid UTF-8")
    })?;
    parse_logprobs(text, path)
}

/// Parses TSV text; `path` is only used in diagnostics.
pub fn parse_logprobs(text: &str, path: &Path) -> Result<LogProbTable> {
    let mut lines = text.lines().enumerate();
    let (_, header) = lines
        .next()
        .ok_or_else(|| Error::parse(path, Location::Header, "missing header"))?;
    let columns: Vec<&str> = header.split('\t').collect();
    let has_length = match columns.as_slice() {
        [a, b, c, d] if [*a, *b, *c, *d] == BASE_HEADER => false,
        [a, b, c, d, "length"] if [*a, *b, *c, *d] == BASE_HEADER => true,
        _ => {
            return Err(Error::parse(
                path,
                Location::Line(1),
                format!("expected header `{}[\\tlength]`", BASE_HEADER.join("\\t")),
            ))
        }
    };
    let width = columns.len();

    let mut records = Vec::new();
    for (i, line) in lines {
        let at = Location::Line(i + 1);
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != width {
            return Err(Error::parse(path, at, format!("expected {width} fields, found {}", fields.len())));
        }
        let sample_id = fields[0].to_string();
        let origin = match fields[1] {
            "P" => Origin::P,
            "Q" => Origin::Q,
            other => return Err(Error::parse(path, at, format!("origin must be P or Q, found `{other}`"))),
        };
        let logp = parse_log_density(fields[2], "logp", &sample_id).map_err(|m| Error::parse(path, at, m))?;
        let logq = parse_log_density(fields[3], "logq", &sample_id).map_err(|m| Error::parse(path, at, m))?;
        let length = if has_length {
            let len: u32 = fields[4]
                .trim()
                .parse()
                .map_err(|_| Error::parse(path, at, format!("invalid length `{}`", fields[4])))?;
            Some(len)
        } else {
            None
        };
        records.push(LogProbRecord {
            sample_id,
            origin,
            logp,
            logq,
            length,
        });
    }
    LogProbTable::new(records).map_err(|source| Error::Data {
        path: path.to_path_buf(),
        source,
    })
}

fn parse_log_density(field: &str, column: &str, sample_id: &str) -> std::result::Result<f64, String> {
    let v: f64 = field
        .trim()
        .parse()
        .map_err(|_| format!("invalid {column} `{field}` for sample `{sample_id}`"))?;
    if v == f64::NEG_INFINITY {
        Err(format!("{column} is -inf (zero density) for sample `{sample_id}`"))
    } else if !v.is_finite() {
        Err(format!("{column} is {v} for sample `{sample_id}`"))
    } else {
        Ok(v)
    }
}

/// Renders a table in the same TSV format.
pub fn format_logprobs(table: &LogProbTable) -> String {
    let with_length = table.has_lengths();
    let mut out = BASE_HEADER.join("\t");
    if with_length {
        out.push_str("\tlength");
    }
    out.push('\n');
    for r in table.records() {
        let _ = write!(out, "{}\t{}\t{}\t{}", r.sample_id, r.origin.as_char(), r.logp, r.logq);
        if let (true, Some(len)) = (with_length, r.length) {
            let _ = write!(out, "\t{len}");
        }
        out.push('\n');
    }
    out
}
