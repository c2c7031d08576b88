//! CSV and JSON rendering.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use weakmetro::statics::StaticAnalysis;
use weakmetro::{EstimationReport, QfiMatrix, UhlmannMatrix};

use crate::{CliError, Loaded, OutputFormat};

/// 17 significant digits; `inf` for infinities.
pub fn number(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf" } else { "-inf" }.into()
    } else {
        format!("{x:.16e}")
    }
}

fn optional(x: Option<f64>) -> String {
    x.map(number).unwrap_or_default()
}

fn rows_of(dim: usize, get: impl Fn(usize, usize) -> f64) -> Vec<Vec<f64>> {
    (0..dim).map(|m| (0..dim).map(|n| get(m, n)).collect()).collect()
}

fn qfim_rows(q: &QfiMatrix) -> Vec<Vec<f64>> {
    rows_of(q.dim(), |m, n| q.get(m, n))
}

fn uhlmann_rows(d: &UhlmannMatrix) -> Vec<Vec<f64>> {
    rows_of(d.dim(), |m, n| d.get(m, n))
}

fn finite(x: f64) -> Option<f64> {
    x.is_finite().then_some(x)
}

fn json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string(value).expect("plain data serializes");
    s.push('\n');
    s
}

fn push_matrix_entries(out: &mut String, q: &[Vec<f64>], d: &[Vec<f64>]) {
    let p = q.len();
    for m in 0..p {
        for n in m..p {
            let _ = writeln!(out, "Q{}{},{}", m + 1, n + 1, number(q[m][n]));
        }
    }
    for m in 0..p {
        for n in m + 1..p {
            let _ = writeln!(out, "D{}{},{}", m + 1, n + 1, number(d[m][n]));
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StaticOutput {
    pub model: String,
    pub dim: usize,
    pub level: usize,
    pub squared_norms: Vec<f64>,
    /// `[re, im]` pairs; absent when a correction vanishes.
    pub overlaps: Option<Vec<Vec<[f64; 2]>>>,
    pub qfim: Vec<Vec<f64>>,
    pub uhlmann: Vec<Vec<f64>>,
    /// `null` when the QFI matrix is singular.
    pub bound_b: Option<f64>,
    pub quantumness_r: Option<f64>,
}

impl StaticOutput {
    pub fn new(m: &Loaded, a: &StaticAnalysis) -> Self {
        Self {
            model: m.name.clone(),
            dim: m.problem.dim(),
            level: m.problem.level(),
            squared_norms: a.squared_norms(),
            overlaps: a.overlaps.as_ref().map(|w| {
                (0..w.len())
                    .map(|m| (0..w.len()).map(|n| [w.get(m, n).re, w.get(m, n).im]).collect())
                    .collect()
            }),
            qfim: qfim_rows(&a.report.qfim),
            uhlmann: uhlmann_rows(&a.report.uhlmann),
            bound_b: finite(a.report.bound_b),
            quantumness_r: a.report.quantumness_r,
        }
    }

    pub fn render(&self, format: OutputFormat) -> String {
        match format {
            OutputFormat::Json => json(self),
            OutputFormat::Csv => {
                let mut out = String::from("quantity,value\n");
                for (i, n) in self.squared_norms.iter().enumerate() {
                    let _ = writeln!(out, "N{},{}", i + 1, number(*n));
                }
                if let Some(w) = &self.overlaps {
                    for m in 0..w.len() {
                        for n in m + 1..w.len() {
                            let _ = writeln!(out, "omega{}{}_re,{}", m + 1, n + 1, number(w[m][n][0]));
                            let _ = writeln!(out, "omega{}{}_im,{}", m + 1, n + 1, number(w[m][n][1]));
                        }
                    }
                }
                push_matrix_entries(&mut out, &self.qfim, &self.uhlmann);
                let _ = writeln!(out, "B,{}", number(self.bound_b.unwrap_or(f64::INFINITY)));
                let _ = writeln!(out, "R,{}", optional(self.quantumness_r));
                out
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DynamicOutput {
    pub model: String,
    pub dim: usize,
    pub time: f64,
    pub qfim: Vec<Vec<f64>>,
    pub uhlmann: Vec<Vec<f64>>,
    pub bound_b: Option<f64>,
    pub quantumness_r: Option<f64>,
}

impl DynamicOutput {
    pub fn new(m: &Loaded, time: f64, r: &EstimationReport) -> Self {
        Self {
            model: m.name.clone(),
            dim: m.problem.dim(),
            time,
            qfim: qfim_rows(&r.qfim),
            uhlmann: uhlmann_rows(&r.uhlmann),
            bound_b: finite(r.bound_b),
            quantumness_r: r.quantumness_r,
        }
    }

    pub fn render(&self, format: OutputFormat) -> String {
        match format {
            OutputFormat::Json => json(self),
            OutputFormat::Csv => {
                let mut out = String::from("quantity,value\n");
                let _ = writeln!(out, "t,{}", number(self.time));
                push_matrix_entries(&mut out, &self.qfim, &self.uhlmann);
                let _ = writeln!(out, "B,{}", number(self.bound_b.unwrap_or(f64::INFINITY)));
                let _ = writeln!(out, "R,{}", optional(self.quantumness_r));
                out
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanRow {
    pub t: f64,
    pub qfim: Vec<Vec<f64>>,
    pub uhlmann: Vec<Vec<f64>>,
    pub bound_b: Option<f64>,
    pub quantumness_r: Option<f64>,
}

impl ScanRow {
    pub fn new(t: f64, r: &EstimationReport) -> Self {
        Self {
            t,
            qfim: qfim_rows(&r.qfim),
            uhlmann: uhlmann_rows(&r.uhlmann),
            bound_b: finite(r.bound_b),
            quantumness_r: r.quantumness_r,
        }
    }
}

pub const SCAN_HEADER: &str = "t,Q11,Q12,Q22,D12,B,R";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanOutput {
    pub model: String,
    pub static_reference: Option<f64>,
    pub rows: Vec<ScanRow>,
}

impl ScanOutput {
    pub fn render(&self, format: OutputFormat) -> Result<String, CliError> {
        if format == OutputFormat::Json {
            return Ok(json(self));
        }
        let mut out = format!("{SCAN_HEADER}\n");
        for row in &self.rows {
            let b = number(row.bound_b.unwrap_or(f64::INFINITY));
            let r = optional(row.quantumness_r);
            let line = match row.qfim.len() {
                1 => format!("{},{},,,,{b},{r}", number(row.t), number(row.qfim[0][0])),
                2 => format!(
                    "{},{},{},{},{},{b},{r}",
                    number(row.t),
                    number(row.qfim[0][0]),
                    number(row.qfim[0][1]),
                    number(row.qfim[1][1]),
                    number(row.uhlmann[0][1]),
                ),
                p => {
                    return Err(CliError::Validation(format!(
                        "the CSV scan table holds one or two couplings, got {p}; use --output-format json"
                    )))
                }
            };
            out.push_str(&line);
            out.push('\n');
        }
        let _ = writeln!(out, "# static_reference={}", optional(self.static_reference));
        Ok(out)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleRow {
    pub scheme: String,
    pub entry: String,
    pub engine: f64,
    pub oracle: f64,
    /// Only for entries whose engine value exceeds 1e-3 in magnitude.
    pub relative_error: Option<f64>,
}

impl OracleRow {
    pub fn compare(scheme: &str, q: &QfiMatrix, d: &UhlmannMatrix, q_fd: &QfiMatrix, d_fd: &UhlmannMatrix) -> Vec<Self> {
        let row = |entry: String, engine: f64, oracle: f64| OracleRow {
            scheme: scheme.to_string(),
            entry,
            engine,
            oracle,
            relative_error: (engine.abs() > 1e-3).then(|| (oracle - engine).abs() / engine.abs()),
        };
        let p = q.dim();
        let mut rows = Vec::new();
        for m in 0..p {
            for n in m..p {
                rows.push(row(format!("Q{}{}", m + 1, n + 1), q.get(m, n), q_fd.get(m, n)));
            }
        }
        for m in 0..p {
            for n in m + 1..p {
                rows.push(row(format!("D{}{}", m + 1, n + 1), d.get(m, n), d_fd.get(m, n)));
            }
        }
        rows
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleOutput {
    pub model: String,
    pub lambda: Vec<f64>,
    pub rows: Vec<OracleRow>,
}

impl OracleOutput {
    pub fn render(&self, format: OutputFormat) -> String {
        match format {
            OutputFormat::Json => json(self),
            OutputFormat::Csv => {
                let mut out = String::from("scheme,entry,engine,oracle,relative_error\n");
                for r in &self.rows {
                    let _ = writeln!(
                        out,
                        "{},{},{},{},{}",
                        r.scheme,
                        r.entry,
                        number(r.engine),
                        number(r.oracle),
                        optional(r.relative_error)
                    );
                }
                out
            }
        }
    }
}
