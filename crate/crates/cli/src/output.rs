use std::io::Write;
use std::path::Path;

use serde_json::{json, Value};

use crate::config::Format;
use crate::error::{CliError, CliResult};
use crate::figure::{Crossing, CurvePoint};
use crate::format::{fmt_g, round_g};

pub fn curve_csv(rows: &[CurvePoint]) -> CliResult<Vec<u8>> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    let io = |e: csv::Error| CliError::usage(format!("csv: {e}"));
    w.write_record(["eta", "energy", "source", "branch", "n"]).map_err(io)?;
    for r in rows {
        w.write_record([
            fmt_g(r.eta),
            fmt_g(r.energy),
            r.source.as_str().to_string(),
            r.branch.clone(),
            r.n.to_string(),
        ])
        .map_err(io)?;
    }
    w.into_inner().map_err(|e| CliError::usage(format!("csv: {e}")))
}

/// JSON mirror of the CSV; numbers carry the same twelve significant digits.
pub fn curve_json(rows: &[CurvePoint]) -> Vec<u8> {
    let arr: Vec<Value> = rows
        .iter()
        .map(|r| {
            json!({
                "eta": round_g(r.eta),
                "energy": round_g(r.energy),
                "source": r.source.as_str(),
                "branch": r.branch,
                "n": r.n,
            })
        })
        .collect();
    let mut out = serde_json::to_vec_pretty(&Value::Array(arr)).expect("serializable");
    out.push(b'\n');
    out
}

pub fn curves(rows: &[CurvePoint], format: Format) -> CliResult<Vec<u8>> {
    match format {
        Format::Csv => curve_csv(rows),
        Format::Json => Ok(curve_json(rows)),
    }
}

pub fn crossings(rows: &[Crossing], format: Format) -> CliResult<Vec<u8>> {
    match format {
        Format::Json => {
            let arr: Vec<Value> = rows
                .iter()
                .map(|c| {
                    json!({
                        "eta": round_g(c.eta),
                        "energy": round_g(c.energy),
                        "rwa_branch": c.rwa_branch,
                        "rwa_n": c.rwa_n,
                        "curve": c.curve,
                    })
                })
                .collect();
            let mut out = serde_json::to_vec_pretty(&Value::Array(arr)).expect("serializable");
            out.push(b'\n');
            Ok(out)
        }
        Format::Csv => {
            let mut w = csv::WriterBuilder::new()
                .terminator(csv::Terminator::Any(b'\n'))
                .from_writer(Vec::new());
            let io = |e: csv::Error| CliError::usage(format!("csv: {e}"));
            w.write_record(["eta", "energy", "rwa_branch", "rwa_n", "curve"]).map_err(io)?;
            for c in rows {
                w.write_record([
                    fmt_g(c.eta),
                    fmt_g(c.energy),
                    c.rwa_branch.clone(),
                    c.rwa_n.to_string(),
                    c.curve.clone(),
                ])
                .map_err(io)?;
            }
            w.into_inner().map_err(|e| CliError::usage(format!("csv: {e}")))
        }
    }
}

pub fn json_bytes(v: &Value) -> Vec<u8> {
    let mut out = serde_json::to_vec_pretty(v).expect("serializable");
    out.push(b'\n');
    out
}

/// Writes to `path`, or to stdout when it is absent or `-`.
pub fn emit(path: Option<&Path>, bytes: &[u8]) -> CliResult<()> {
    match path {
        Some(p) if p.as_os_str() != "-" => std::fs::write(p, bytes)
            .map_err(|e| CliError::usage(format!("cannot write {}: {e}", p.display()))),
        _ => {
            let mut out = std::io::stdout().lock();
            out.write_all(bytes)
                .and_then(|_| out.flush())
                .map_err(|e| CliError::usage(format!("cannot write stdout: {e}")))
        }
    }
}
