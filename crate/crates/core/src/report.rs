//! Residual reports and their JSON / CSV encodings.
//!
//! JSON field order follows the struct declarations below and is stable:
//! `tool, scene_hash, rng_seed, m, h_values, conventions, points,
//! convergence, summary`. Each point carries `index, seed, status,
//! error_kind, error, f_residual, entries`; each entry carries
//! `suite, h, name, value, tolerance, asserted, pass`.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Conventions {
    pub xi_orientation: String,
    pub nijenhuis: String,
    pub exterior_derivative: String,
    pub exterior_derivative_alt: String,
    pub wedge: String,
    pub finite_difference: String,
}

impl Default for Conventions {
    fn default() -> Self {
        Self {
            xi_orientation: "xi = +grad(Re f)/|grad(Re f)|; s(X) = g(D_X xi, J1 xi)".into(),
            nijenhuis: crate::normality::NIJENHUIS_CONVENTION.into(),
            exterior_derivative: crate::normality::EXTERIOR_CONVENTION.into(),
            exterior_derivative_alt: crate::normality::EXTERIOR_HALF_CONVENTION.into(),
            wedge: "(a^b)(X,Y) = a(X)b(Y) - a(Y)b(X)".into(),
            finite_difference: "central, 2nd order, along Gauss-Newton projected lines".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Entry {
    pub suite: String,
    /// Step size, `None` for algebraic suites.
    pub h: Option<f64>,
    pub name: String,
    /// `None` if the computed value was not finite.
    pub value: Option<f64>,
    pub tolerance: Option<f64>,
    pub asserted: bool,
    pub pass: Option<bool>,
}

impl Entry {
    pub fn asserted(suite: &str, h: Option<f64>, name: &str, value: f64, tolerance: f64) -> Self {
        Self {
            suite: suite.to_owned(),
            h,
            name: name.to_owned(),
            value: value.is_finite().then_some(value),
            tolerance: Some(tolerance),
            asserted: true,
            pass: Some(value <= tolerance),
        }
    }

    pub fn diagnostic(suite: &str, h: Option<f64>, name: &str, value: f64) -> Self {
        Self {
            suite: suite.to_owned(),
            h,
            name: name.to_owned(),
            value: value.is_finite().then_some(value),
            tolerance: None,
            asserted: false,
            pass: None,
        }
    }

    pub fn failed(&self) -> bool {
        self.asserted && self.pass != Some(true)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointReport {
    pub index: usize,
    pub seed: Vec<f64>,
    /// `"ok"` or `"error"`.
    pub status: String,
    pub error_kind: Option<String>,
    pub error: Option<String>,
    pub f_residual: Option<f64>,
    pub entries: Vec<Entry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceEntry {
    pub point: usize,
    pub suite: String,
    pub name: String,
    pub h_coarse: f64,
    pub h_fine: f64,
    pub coarse: Option<f64>,
    pub fine: Option<f64>,
    pub ratio: Option<f64>,
    /// `(h_coarse / h_fine)^2`.
    pub expected: f64,
    pub asserted: bool,
    pub pass: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub asserted: usize,
    pub failed: usize,
    pub errors: usize,
    pub exit_code: i32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidualReport {
    pub tool: String,
    pub scene_hash: String,
    pub rng_seed: u64,
    pub m: usize,
    pub h_values: Vec<f64>,
    pub conventions: Conventions,
    pub points: Vec<PointReport>,
    pub convergence: Vec<ConvergenceEntry>,
    pub summary: Summary,
}

impl ResidualReport {
    pub fn entries(&self) -> impl Iterator<Item = (usize, &Entry)> {
        self.points
            .iter()
            .flat_map(|p| p.entries.iter().map(move |e| (p.index, e)))
    }

    /// Recompute the summary from the entries and point statuses.
    pub fn summarize(&mut self) {
        let asserted = self.entries().filter(|(_, e)| e.asserted).count()
            + self.convergence.iter().filter(|c| c.asserted).count();
        let failed = self.entries().filter(|(_, e)| e.failed()).count()
            + self
                .convergence
                .iter()
                .filter(|c| c.asserted && c.pass != Some(true))
                .count();
        let errors = self.points.iter().filter(|p| p.status != "ok").count();
        let exit_code = if errors > 0 {
            2
        } else if failed > 0 {
            1
        } else {
            0
        };
        self.summary = Summary {
            asserted,
            failed,
            errors,
            exit_code,
        };
    }
}

/// 0 when every asserted residual passes, 1 on any failure, 2 on an
/// infrastructure error (singular point, projection failure).
pub fn exit_code(report: &ResidualReport) -> i32 {
    report.summary.exit_code
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

impl std::str::FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            other => Err(format!("unknown format `{other}` (expected json or csv)")),
        }
    }
}

pub const CSV_HEADER: &str = "point,suite,h,name,value,tolerance,asserted,pass";

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

pub fn emit(report: &ResidualReport, format: Format) -> Vec<u8> {
    match format {
        Format::Json => {
            let mut out = serde_json::to_vec_pretty(report).expect("report serializes");
            out.push(b'\n');
            out
        }
        Format::Csv => {
            let mut out = String::from(CSV_HEADER);
            out.push('\n');
            for (point, e) in report.entries() {
                let _ = writeln!(
                    out,
                    "{point},{},{},{},{},{},{},{}",
                    e.suite,
                    opt(e.h),
                    e.name,
                    opt(e.value),
                    opt(e.tolerance),
                    e.asserted,
                    opt(e.pass),
                );
            }
            out.into_bytes()
        }
    }
}
