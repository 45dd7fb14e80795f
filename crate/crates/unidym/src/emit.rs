//! Result emission: CSV (RFC-4180-style quoting) and JSON lines.
//!
//! Numbers are printed with 17 significant digits so every `f64`
//! round-trips exactly.  CSV files start with one metadata comment line
//! carrying the experiment id, the seed and a timestamp; everything below
//! it is deterministic for a fixed config and seed.  JSON-lines output has
//! no metadata line and `parse_jsonl` inverts `jsonl_string` exactly.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use chrono::{SecondsFormat, Utc};

use crate::error::{HarnessError, Result};
use crate::record::{ParamValue, ResultRecord};

/// Output format selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    /// Comma-separated values with a `#` metadata header line.
    Csv,
    /// One JSON object per line.
    Jsonl,
}

impl Format {
    /// File extension for the format.
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Jsonl => "jsonl",
        }
    }
}

/// 17-significant-digit rendering; round-trips any finite `f64`.
pub fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}

fn render_params(params: &[(String, ParamValue)]) -> String {
    params
        .iter()
        .map(|(k, v)| format!("{k}={}", v.render()))
        .collect::<Vec<_>>()
        .join(";")
}

/// The CSV body: header plus one row per record, no metadata line.
pub fn csv_body(records: &[ResultRecord]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "experiment",
        "kind",
        "params",
        "measured",
        "bound",
        "margin",
        "status",
        "flags",
    ])
    .map_err(|e| HarnessError::Internal(format!("csv write: {e}")))?;
    for r in records {
        w.write_record([
            r.experiment.as_str(),
            r.kind.as_str(),
            &render_params(&r.params),
            &fmt_float(r.measured),
            &fmt_float(r.bound),
            &fmt_float(r.margin),
            r.status.as_str(),
            &r.flags.join(";"),
        ])
        .map_err(|e| HarnessError::Internal(format!("csv write: {e}")))?;
    }
    let bytes = w
        .into_inner()
        .map_err(|e| HarnessError::Internal(format!("csv flush: {e}")))?;
    String::from_utf8(bytes).map_err(|e| HarnessError::Internal(format!("csv utf-8: {e}")))
}

/// Full CSV file content: metadata line, header, rows.
pub fn csv_string(records: &[ResultRecord], experiment: &str, seed: u64) -> Result<String> {
    let stamp = Utc::now().to_rfc3339_opts(SecondsFormat::Secs, true);
    let mut out = format!("# unidym {experiment} seed={seed} generated={stamp}\n");
    out.push_str(&csv_body(records)?);
    Ok(out)
}

fn json_string_fragment(s: &str) -> String {
    serde_json::to_string(s).expect("strings always serialize")
}

fn json_param(v: &ParamValue) -> String {
    match v {
        ParamValue::Int(i) => format!("{i}"),
        ParamValue::Float(f) => fmt_float(*f),
        ParamValue::Text(t) => json_string_fragment(t),
    }
}

/// JSON-lines content: one object per record, schema-stable key order.
pub fn jsonl_string(records: &[ResultRecord]) -> String {
    let mut out = String::new();
    for r in records {
        let params = r
            .params
            .iter()
            .map(|(k, v)| format!("[{},{}]", json_string_fragment(k), json_param(v)))
            .collect::<Vec<_>>()
            .join(",");
        let flags = r
            .flags
            .iter()
            .map(|f| json_string_fragment(f))
            .collect::<Vec<_>>()
            .join(",");
        let _ = writeln!(
            out,
            "{{\"experiment\":{},\"kind\":{},\"params\":[{}],\
             \"measured\":{},\"bound\":{},\"margin\":{},\
             \"status\":{},\"flags\":[{}]}}",
            json_string_fragment(&r.experiment),
            json_string_fragment(&r.kind),
            params,
            fmt_float(r.measured),
            fmt_float(r.bound),
            fmt_float(r.margin),
            json_string_fragment(r.status.as_str()),
            flags
        );
    }
    out
}

/// Parses JSON-lines content back into records; inverse of
/// [`jsonl_string`] on its output.
pub fn parse_jsonl(text: &str) -> Result<Vec<ResultRecord>> {
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .map(|line| {
            serde_json::from_str::<ResultRecord>(line)
                .map_err(|e| HarnessError::Usage(format!("invalid record line: {e}")))
        })
        .collect()
}

/// Writes the records under `dir` as `<experiment>.<ext>`; returns the path.
pub fn write_output(
    dir: &Path,
    experiment: &str,
    format: Format,
    records: &[ResultRecord],
    seed: u64,
) -> Result<PathBuf> {
    fs::create_dir_all(dir)
        .map_err(|e| HarnessError::Io(format!("cannot create {}: {e}", dir.display())))?;
    let path = dir.join(format!("{experiment}.{}", format.extension()));
    let content = match format {
        Format::Csv => csv_string(records, experiment, seed)?,
        Format::Jsonl => jsonl_string(records),
    };
    fs::write(&path, content)
        .map_err(|e| HarnessError::Io(format!("cannot write {}: {e}", path.display())))?;
    Ok(path)
}
