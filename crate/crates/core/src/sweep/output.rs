//! CSV and hashing helpers for run artifacts.
//!
//! Numbers are written with 12 significant digits, `.` as decimal separator,
//! trailing zeros removed.

use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::result::{Diagnostics, RunResult, TraceColumn};

/// Format `x` with 12 significant digits.
pub fn fmt_sig(x: f64) -> String {
    if x.is_nan() {
        return "NaN".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{x:.11e}");
    let (mantissa, exp) = sci.split_once('e').unwrap();
    let exp: i32 = exp.parse().unwrap();
    if (-5..12).contains(&exp) {
        let decimals = (11 - exp) as usize;
        trim(format!("{x:.decimals$}"))
    } else {
        format!("{}e{exp}", trim(mantissa.to_string()))
    }
}

fn trim(s: String) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

fn parse(field: &str, what: &str) -> Result<f64> {
    match field {
        "" => Ok(f64::NAN),
        "inf" => Ok(f64::INFINITY),
        "-inf" => Ok(f64::NEG_INFINITY),
        f => f
            .parse()
            .map_err(|_| Error::invalid(what.to_string(), format!("not a number: {f:?}"))),
    }
}

/// Time series as CSV: `t,F1,F2` followed by the run's diagnostic columns.
pub fn trace_csv(result: &RunResult) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["t".to_string(), "F1".into(), "F2".into()];
    header.extend(result.columns.iter().map(|c| c.name.clone()));
    w.write_record(&header)?;
    for k in 0..result.len() {
        let mut row = vec![
            fmt_sig(result.times[k]),
            fmt_sig(result.f1[k]),
            fmt_sig(result.f2[k]),
        ];
        row.extend(result.columns.iter().map(|c| fmt_sig(c.values[k])));
        w.write_record(&row)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("CSV output is ASCII"))
}

/// Read a trace written by [`trace_csv`]. Run-level diagnostics are not
/// stored in the trace and come back empty.
pub fn read_trace_csv(path: impl AsRef<Path>) -> Result<RunResult> {
    let mut r = csv::Reader::from_path(path)?;
    let header: Vec<String> = r.headers()?.iter().map(str::to_string).collect();
    if header.len() < 3 || header[..3] != ["t", "F1", "F2"] {
        return Err(Error::invalid("trace", "header must start with t,F1,F2"));
    }
    let mut result = RunResult::new();
    result.columns = header[3..]
        .iter()
        .map(|n| TraceColumn {
            name: n.clone(),
            values: Vec::new(),
        })
        .collect();
    for rec in r.records() {
        let rec = rec?;
        result.times.push(parse(&rec[0], "t")?);
        result.f1.push(parse(&rec[1], "F1")?);
        result.f2.push(parse(&rec[2], "F2")?);
        for (c, f) in result.columns.iter_mut().zip(rec.iter().skip(3)) {
            c.values.push(parse(f, &c.name)?);
        }
    }
    Ok(result)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PointStatus {
    Ok,
    Failed,
}

/// Outcome of one grid point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointRecord {
    pub index: usize,
    pub coords: Vec<f64>,
    pub status: PointStatus,
    /// Final fidelity `F₂(∞)`.
    pub f: Option<f64>,
    pub f1: Option<f64>,
    pub diagnostics: Option<Diagnostics>,
    pub error: Option<String>,
}

const DIAGNOSTIC_COLUMNS: [&str; 7] = [
    "trace_drift",
    "hermiticity_drift",
    "excitation_drift",
    "fock_leakage",
    "max_step_discarded_weight",
    "cumulative_discarded_weight",
    "max_bond_dim",
];

fn diagnostic_values(d: &Diagnostics) -> [Option<f64>; 7] {
    [
        d.trace_drift,
        d.hermiticity_drift,
        d.excitation_drift,
        d.fock_leakage,
        d.max_step_discarded_weight,
        d.cumulative_discarded_weight,
        d.max_bond_dim.map(|x| x as f64),
    ]
}

/// One row per point: index, axis values, status, `F`, `F1`, diagnostics,
/// error message.
pub fn grid_csv(axis_labels: &[&str], records: &[PointRecord]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["index".to_string()];
    header.extend(axis_labels.iter().map(|s| s.to_string()));
    header.extend(["status", "F", "F1"].map(String::from));
    header.extend(DIAGNOSTIC_COLUMNS.map(String::from));
    header.push("error".into());
    w.write_record(&header)?;
    let opt = |x: Option<f64>| x.map(fmt_sig).unwrap_or_default();
    for r in records {
        let mut row = vec![r.index.to_string()];
        row.extend(r.coords.iter().map(|&x| fmt_sig(x)));
        row.push(
            match r.status {
                PointStatus::Ok => "ok",
                PointStatus::Failed => "failed",
            }
            .into(),
        );
        row.push(opt(r.f));
        row.push(opt(r.f1));
        let diag = r.diagnostics.clone().unwrap_or_default();
        row.extend(diagnostic_values(&diag).map(opt));
        row.push(r.error.clone().unwrap_or_default());
        w.write_record(&row)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("grid CSV is UTF-8"))
}

/// Read `grid.csv` back as `(axis labels, records)`.
pub fn read_grid_csv(path: impl AsRef<Path>) -> Result<(Vec<String>, Vec<PointRecord>)> {
    let mut r = csv::Reader::from_path(path)?;
    let header: Vec<String> = r.headers()?.iter().map(str::to_string).collect();
    let n_fixed = 1 + 3 + DIAGNOSTIC_COLUMNS.len() + 1;
    if header.len() < n_fixed || header[0] != "index" {
        return Err(Error::invalid("grid.csv", "unexpected header"));
    }
    let n_axes = header.len() - n_fixed;
    let labels = header[1..1 + n_axes].to_vec();
    let opt = |f: &str, what: &str| -> Result<Option<f64>> {
        if f.is_empty() {
            Ok(None)
        } else {
            parse(f, what).map(Some)
        }
    };
    let mut records = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        let index = rec[0]
            .parse()
            .map_err(|_| Error::invalid("grid.csv", "bad index"))?;
        let coords = (0..n_axes)
            .map(|k| parse(&rec[1 + k], &labels[k]))
            .collect::<Result<Vec<_>>>()?;
        let base = 1 + n_axes;
        let status = match &rec[base] {
            "ok" => PointStatus::Ok,
            "failed" => PointStatus::Failed,
            s => return Err(Error::invalid("grid.csv", format!("bad status {s:?}"))),
        };
        let d: Vec<Option<f64>> = (0..DIAGNOSTIC_COLUMNS.len())
            .map(|k| opt(&rec[base + 3 + k], DIAGNOSTIC_COLUMNS[k]))
            .collect::<Result<_>>()?;
        let error = &rec[base + 3 + DIAGNOSTIC_COLUMNS.len()];
        records.push(PointRecord {
            index,
            coords,
            status,
            f: opt(&rec[base + 1], "F")?,
            f1: opt(&rec[base + 2], "F1")?,
            diagnostics: (status == PointStatus::Ok).then(|| Diagnostics {
                trace_drift: d[0],
                hermiticity_drift: d[1],
                excitation_drift: d[2],
                fock_leakage: d[3],
                max_step_discarded_weight: d[4],
                cumulative_discarded_weight: d[5],
                max_bond_dim: d[6].map(|x| x as usize),
            }),
            error: (!error.is_empty()).then(|| error.to_string()),
        });
    }
    Ok((labels, records))
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

pub fn sha256_file(path: impl AsRef<Path>) -> Result<String> {
    Ok(sha256_hex(&std::fs::read(path)?))
}

/// Write through a temporary file so readers never see a partial file.
pub fn write_atomic(path: impl AsRef<Path>, contents: impl AsRef<[u8]>) -> Result<()> {
    let path = path.as_ref();
    let tmp = path.with_extension("partial");
    std::fs::write(&tmp, contents)?;
    std::fs::rename(tmp, path)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn significant_digits() {
        assert_eq!(fmt_sig(0.0), "0");
        assert_eq!(fmt_sig(-0.0), "0");
        assert_eq!(fmt_sig(1.0), "1");
        assert_eq!(fmt_sig(0.1), "0.1");
        assert_eq!(fmt_sig(1.0 / 3.0), "0.333333333333");
        assert_eq!(fmt_sig(-2.0 / 3.0), "-0.666666666667");
        assert_eq!(fmt_sig(123456.789), "123456.789");
        assert_eq!(fmt_sig(1e-7 / 3.0), "3.33333333333e-8");
        assert_eq!(fmt_sig(6.02e23), "6.02e23");
        assert_eq!(fmt_sig(9.9999999999996), "10");
    }

    proptest! {
        #[test]
        fn twelve_digits_round_trip(x in -1e6f64..1e6) {
            let y: f64 = fmt_sig(x).parse().unwrap();
            prop_assert!((x - y).abs() <= 1e-11 * x.abs().max(1e-300));
        }
    }

    #[test]
    fn trace_round_trip() {
        let mut r = RunResult::new();
        r.times = vec![-1.0, 0.0, 1.0];
        r.f1 = vec![1.0, 0.5, 0.25];
        r.f2 = vec![0.0, 0.25, 0.5];
        r.columns.push(TraceColumn {
            name: "norm".into(),
            values: vec![1.0, 1.0, 1.0],
        });
        let text = trace_csv(&r).unwrap();
        assert!(text.starts_with("t,F1,F2,norm\n-1,1,0,1\n"));
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("t.csv");
        std::fs::write(&p, &text).unwrap();
        assert_eq!(read_trace_csv(&p).unwrap(), r);
    }

    #[test]
    fn grid_round_trip_and_quoting() {
        let recs = vec![
            PointRecord {
                index: 0,
                coords: vec![0.0, 1.5],
                status: PointStatus::Ok,
                f: Some(0.75),
                f1: Some(0.125),
                diagnostics: Some(Diagnostics {
                    trace_drift: Some(1e-12),
                    ..Default::default()
                }),
                error: None,
            },
            PointRecord {
                index: 1,
                coords: vec![0.0, 2.5],
                status: PointStatus::Failed,
                f: None,
                f1: None,
                diagnostics: None,
                error: Some("bad, \"quoted\"".into()),
            },
        ];
        let text = grid_csv(&["temperature", "g"], &recs).unwrap();
        assert!(text.contains("\"bad, \"\"quoted\"\"\""));
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("grid.csv");
        std::fs::write(&p, &text).unwrap();
        let (labels, back) = read_grid_csv(&p).unwrap();
        assert_eq!(labels, vec!["temperature", "g"]);
        assert_eq!(back, recs);
    }
}
