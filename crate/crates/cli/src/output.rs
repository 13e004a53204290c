//! CSV and JSON artifacts. Every number is written with 9 significant
//! digits.

use std::io::{Read, Write};
use std::path::Path;

use misr_core::simkernel::{EmpiricalCcdf, ThetaGrid};
use serde::Serialize;

use crate::error::{CliError, Result};

pub const CSV_HEADER: [&str; 4] = ["theta_db", "theta_linear", "ccdf", "stderr"];
pub const SIGNIFICANT_DIGITS: usize = 9;

/// `%.9g`-style formatting: fixed notation for exponents in `[-5, 9)`,
/// scientific otherwise, trailing zeros removed.
pub fn fmt_sig(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let sci = format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x);
    let (mant, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-5..SIGNIFICANT_DIGITS as i32).contains(&exp) {
        return format!("{}e{exp}", trim_zeros(mant));
    }
    let decimals = (SIGNIFICANT_DIGITS as i32 - 1 - exp).max(0) as usize;
    trim_zeros(&format!("{x:.decimals$}")).to_string()
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// `x` rounded to 9 significant digits.
pub fn round_sig(x: f64) -> f64 {
    fmt_sig(x).parse().unwrap_or(x)
}

pub fn write_ccdf_csv<W: Write>(ccdf: &EmpiricalCcdf, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let err = |e: csv::Error| CliError::Csv {
        path: "<output>".into(),
        message: e.to_string(),
    };
    w.write_record(CSV_HEADER).map_err(err)?;
    for i in 0..ccdf.len() {
        w.write_record([
            fmt_sig(ccdf.theta_db[i]),
            fmt_sig(ccdf.theta_linear[i]),
            fmt_sig(ccdf.probs[i]),
            fmt_sig(ccdf.stderr[i]),
        ])
        .map_err(err)?;
    }
    w.flush().map_err(|e| CliError::Csv {
        path: "<output>".into(),
        message: e.to_string(),
    })
}

pub fn ccdf_csv_string(ccdf: &EmpiricalCcdf) -> Result<String> {
    let mut buf = Vec::new();
    write_ccdf_csv(ccdf, &mut buf)?;
    Ok(String::from_utf8(buf).expect("ascii csv"))
}

/// Reads a ccdf CSV. The sample count is not part of the schema and comes
/// back as 0.
pub fn read_ccdf_csv<R: Read>(input: R, origin: &str) -> Result<EmpiricalCcdf> {
    let bad = |line: Option<u64>, message: String| CliError::Csv {
        path: origin.to_string(),
        message: match line {
            Some(l) => format!("line {l}: {message}"),
            None => message,
        },
    };
    let mut r = csv::Reader::from_reader(input);
    let header = r.headers().map_err(|e| bad(None, e.to_string()))?.clone();
    if header.iter().collect::<Vec<_>>() != CSV_HEADER {
        return Err(bad(Some(1), format!("expected header `{}`", CSV_HEADER.join(","))));
    }
    let mut cols: [Vec<f64>; 4] = Default::default();
    for rec in r.records() {
        let rec = rec.map_err(|e| bad(None, e.to_string()))?;
        let line = rec.position().map(|p| p.line());
        if rec.len() != 4 {
            return Err(bad(line, format!("expected 4 fields, got {}", rec.len())));
        }
        for (col, field) in cols.iter_mut().zip(rec.iter()) {
            col.push(field.trim().parse().map_err(|_| bad(line, format!("not a number: `{field}`")))?);
        }
    }
    let [db, linear, probs, stderr] = cols;
    // keep the stored linear column rather than recomputing it from dB
    let grid = ThetaGrid::from_parts(db, linear).map_err(|e| bad(None, e.to_string()))?;
    EmpiricalCcdf::from_parts(grid, probs, stderr, 0).map_err(|e| bad(None, e.to_string()))
}

/// Writes `text` to `path`, or returns it for stdout when `path` is None.
pub fn emit(path: Option<&Path>, text: &str) -> Result<Option<String>> {
    match path {
        Some(p) => {
            std::fs::write(p, text).map_err(|e| CliError::io(p, e))?;
            Ok(None)
        }
        None => Ok(Some(text.to_string())),
    }
}

/// Pretty JSON with every float rounded to 9 significant digits.
pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut v = serde_json::to_value(value)?;
    round_json(&mut v);
    let mut s = serde_json::to_string_pretty(&v)?;
    s.push('\n');
    Ok(s)
}

fn round_json(v: &mut serde_json::Value) {
    use serde_json::Value;
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = round_sig(n.as_f64().expect("f64"));
            if let Some(r) = serde_json::Number::from_f64(x) {
                *n = r;
            }
        }
        Value::Array(a) => a.iter_mut().for_each(round_json),
        Value::Object(o) => o.values_mut().for_each(round_json),
        _ => {}
    }
}
