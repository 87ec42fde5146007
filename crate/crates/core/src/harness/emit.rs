//! CSV and JSON output of sweep results.

use std::fmt::Write as _;
use std::io::{Read, Write};
use std::path::Path;
use std::str::FromStr;

use super::sweep::{SweepResult, SweepRow};
use crate::error::{Error, Result};

pub const CSV_HEADER: [&str; 9] = [
    "variable",
    "value",
    "metric",
    "mode",
    "estimate",
    "ci_half_width",
    "lower_bound",
    "upper_bound",
    "agrees",
];

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            _ => Err(Error::InvalidParameter {
                field: "format".into(),
                reason: format!("unknown format `{s}` (csv, json)"),
            }),
        }
    }
}

/// 17 significant digits, enough to round-trip any `f64`.
pub fn format_float(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else if x.is_nan() {
        "NaN".into()
    } else if x > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

fn opt_float(x: Option<f64>) -> String {
    x.map(format_float).unwrap_or_default()
}

fn opt_bool(b: Option<bool>) -> &'static str {
    match b {
        Some(true) => "true",
        Some(false) => "false",
        None => "",
    }
}

fn io_err(e: impl std::fmt::Display) -> Error {
    Error::Io(e.to_string())
}

pub fn write_csv<W: Write>(result: &SweepResult, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER).map_err(io_err)?;
    for r in &result.rows {
        w.write_record([
            r.variable.clone(),
            format_float(r.value),
            r.metric.clone(),
            r.mode.clone(),
            format_float(r.estimate),
            opt_float(r.ci_half_width),
            opt_float(r.lower_bound),
            opt_float(r.upper_bound),
            opt_bool(r.agrees).to_string(),
        ])
        .map_err(io_err)?;
    }
    w.flush().map_err(io_err)
}

fn json_str(s: &str) -> String {
    serde_json::Value::String(s.to_string()).to_string()
}

fn json_float(x: Option<f64>) -> String {
    match x {
        Some(v) if v.is_finite() => format_float(v),
        _ => "null".into(),
    }
}

/// Writes `{"schema_version": 1, "rows": [...]}` with the same fields
/// and float formatting as the CSV.
pub fn write_json<W: Write>(result: &SweepResult, mut out: W) -> Result<()> {
    let mut s = String::new();
    let _ = writeln!(s, "{{\n  \"schema_version\": {SCHEMA_VERSION},\n  \"rows\": [");
    for (i, r) in result.rows.iter().enumerate() {
        let agrees = r.agrees.map(|b| b.to_string()).unwrap_or_else(|| "null".into());
        let _ = write!(
            s,
            "    {{\"variable\": {}, \"value\": {}, \"metric\": {}, \"mode\": {}, \"estimate\": {}, \
             \"ci_half_width\": {}, \"lower_bound\": {}, \"upper_bound\": {}, \"agrees\": {}}}",
            json_str(&r.variable),
            json_float(Some(r.value)),
            json_str(&r.metric),
            json_str(&r.mode),
            json_float(Some(r.estimate)),
            json_float(r.ci_half_width),
            json_float(r.lower_bound),
            json_float(r.upper_bound),
            agrees,
        );
        s.push_str(if i + 1 < result.rows.len() { ",\n" } else { "\n" });
    }
    s.push_str("  ]\n}\n");
    out.write_all(s.as_bytes()).map_err(io_err)
}

pub fn write_result<W: Write>(result: &SweepResult, format: Format, out: W) -> Result<()> {
    match format {
        Format::Csv => write_csv(result, out),
        Format::Json => write_json(result, out),
    }
}

pub fn emit(result: &SweepResult, format: Format, path: &Path) -> Result<()> {
    let f = std::fs::File::create(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    write_result(result, format, std::io::BufWriter::new(f))
}

fn parse_float(s: &str, line: usize) -> Result<f64> {
    s.parse::<f64>()
        .map_err(|_| Error::Io(format!("line {line}: bad number `{s}`")))
}

fn parse_opt(s: &str, line: usize) -> Result<Option<f64>> {
    if s.is_empty() { Ok(None) } else { parse_float(s, line).map(Some) }
}

/// Reads rows written by [`write_csv`].
pub fn read_csv<R: Read>(input: R) -> Result<SweepResult> {
    let mut rd = csv::Reader::from_reader(input);
    let header = rd.headers().map_err(io_err)?;
    if header.iter().ne(CSV_HEADER.iter().copied()) {
        return Err(Error::Io(format!("unexpected header: {:?}", header.iter().collect::<Vec<_>>())));
    }
    let mut rows = Vec::new();
    for (i, rec) in rd.records().enumerate() {
        let rec = rec.map_err(io_err)?;
        let line = i + 2;
        let agrees = match &rec[8] {
            "true" => Some(true),
            "false" => Some(false),
            "" => None,
            other => return Err(Error::Io(format!("line {line}: bad flag `{other}`"))),
        };
        rows.push(SweepRow {
            variable: rec[0].to_string(),
            value: parse_float(&rec[1], line)?,
            metric: rec[2].to_string(),
            mode: rec[3].to_string(),
            estimate: parse_float(&rec[4], line)?,
            ci_half_width: parse_opt(&rec[5], line)?,
            lower_bound: parse_opt(&rec[6], line)?,
            upper_bound: parse_opt(&rec[7], line)?,
            agrees,
        });
    }
    Ok(SweepResult { rows })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> SweepResult {
        SweepResult {
            rows: vec![
                SweepRow {
                    variable: "sigma".into(),
                    value: 0.1,
                    metric: "rel_multi".into(),
                    mode: "analytic".into(),
                    estimate: 1.0 / 3.0,
                    ci_half_width: None,
                    lower_bound: Some(0.25),
                    upper_bound: Some(std::f64::consts::PI),
                    agrees: Some(true),
                },
                SweepRow {
                    variable: "sigma".into(),
                    value: 0.1,
                    metric: "rel_multi".into(),
                    mode: "simulate".into(),
                    estimate: 0.3333,
                    ci_half_width: Some(1e-300),
                    lower_bound: None,
                    upper_bound: None,
                    agrees: None,
                },
            ],
        }
    }

    #[test]
    fn empty_result_is_header_only() {
        let mut buf = Vec::new();
        write_csv(&SweepResult::default(), &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), CSV_HEADER.join(",") + "\n");
    }

    #[test]
    fn csv_round_trip_is_exact() {
        let mut buf = Vec::new();
        write_csv(&sample(), &mut buf).unwrap();
        assert_eq!(read_csv(buf.as_slice()).unwrap(), sample());
    }

    #[test]
    fn json_is_valid_and_versioned() {
        let mut buf = Vec::new();
        write_json(&sample(), &mut buf).unwrap();
        let v: serde_json::Value = serde_json::from_slice(&buf).unwrap();
        assert_eq!(v["schema_version"], 1);
        assert_eq!(v["rows"].as_array().unwrap().len(), 2);
        assert!(v["rows"][1]["lower_bound"].is_null());
        assert_eq!(v["rows"][0]["agrees"], true);
    }
}
