//! CSV and JSON writers. Floats in CSV use 17 significant digits.

use std::io::Write;

use ltlab_core::verifier::{CheckReport, ProbeReport};

use crate::CliError;

pub const REPORT_HEADER: [&str; 9] = [
    "check_id",
    "dim",
    "family",
    "lhs",
    "rhs",
    "margin",
    "status",
    "tolerance",
    "runtime_ms",
];

pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn csv_bytes(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<Vec<u8>, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for row in rows {
        w.write_record(&row)?;
    }
    w.into_inner().map_err(|e| CliError::Io(e.into_error()))
}

pub fn reports_csv(reports: &[CheckReport]) -> Result<Vec<u8>, CliError> {
    csv_bytes(
        &REPORT_HEADER,
        reports.iter().map(|r| {
            vec![
                r.check_id.clone(),
                r.dim.to_string(),
                r.family.clone(),
                num(r.lhs),
                num(r.rhs),
                num(r.margin),
                r.status.to_string(),
                num(r.tolerance),
                r.runtime_ms.to_string(),
            ]
        }),
    )
}

/// Parses a report CSV written by [`reports_csv`].
pub fn read_reports_csv(data: &[u8]) -> Result<Vec<CheckReport>, CliError> {
    let mut r = csv::Reader::from_reader(data);
    let bad = |what: &str| CliError::Usage(format!("malformed report field {what}"));
    let mut out = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        let f = |i: usize| rec.get(i).ok_or_else(|| bad(REPORT_HEADER[i]));
        let x = |i: usize| -> Result<f64, CliError> { f(i)?.parse().map_err(|_| bad(REPORT_HEADER[i])) };
        out.push(CheckReport {
            check_id: f(0)?.to_string(),
            dim: f(1)?.parse().map_err(|_| bad("dim"))?,
            family: f(2)?.to_string(),
            lhs: x(3)?,
            rhs: x(4)?,
            margin: x(5)?,
            status: f(6)?.parse().map_err(|_| bad("status"))?,
            tolerance: x(7)?,
            runtime_ms: f(8)?.parse().map_err(|_| bad("runtime_ms"))?,
        });
    }
    Ok(out)
}

pub fn reports_json(reports: &[CheckReport]) -> Result<Vec<u8>, CliError> {
    let mut v = serde_json::to_vec_pretty(reports)?;
    v.push(b'\n');
    Ok(v)
}

pub fn probe_csv(p: &ProbeReport) -> Result<Vec<u8>, CliError> {
    csv_bytes(
        &["eps", "value", "energy", "overflow", "verdict"],
        (0..p.eps_grid.len()).map(|k| {
            vec![
                num(p.eps_grid[k]),
                num(p.values[k]),
                num(p.energies[k]),
                p.overflow[k].to_string(),
                p.verdict.to_string(),
            ]
        }),
    )
}

/// One functional evaluation.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct EvalRecord {
    pub param: Option<String>,
    pub param_value: Option<f64>,
    pub functional: String,
    pub dim: usize,
    pub family: String,
    pub value: f64,
    pub quad_error: f64,
    pub overflow: bool,
}

pub fn eval_csv(records: &[EvalRecord], sweep: bool) -> Result<Vec<u8>, CliError> {
    let mut header = vec!["functional", "dim", "family", "value", "quad_error", "overflow"];
    if sweep {
        header.splice(0..0, ["param", "param_value"]);
    }
    csv_bytes(
        &header,
        records.iter().map(|r| {
            let mut row = vec![
                r.functional.clone(),
                r.dim.to_string(),
                r.family.clone(),
                num(r.value),
                num(r.quad_error),
                r.overflow.to_string(),
            ];
            if sweep {
                row.splice(
                    0..0,
                    [r.param.clone().unwrap_or_default(), r.param_value.map(num).unwrap_or_default()],
                );
            }
            row
        }),
    )
}

pub fn json<T: serde::Serialize + ?Sized>(v: &T) -> Result<Vec<u8>, CliError> {
    let mut out = serde_json::to_vec_pretty(v)?;
    out.push(b'\n');
    Ok(out)
}

pub fn write_file(path: &std::path::Path, bytes: &[u8]) -> Result<(), CliError> {
    let mut f = std::fs::File::create(path).map_err(CliError::Io)?;
    f.write_all(bytes).map_err(CliError::Io)
}
