//! Line-oriented scene files driving a verification run.
//!
//! ```text
//! # comment
//! m = 2
//! term = 1 0 : 2 0 0 0          # coefficient (re im) : exponent vector
//! term = -1 0 : 0 0 0 0
//! seed = 0.8 0.2 0.3 -0.1 -0.25 0.15 0.4 0.05
//! h_values = 1e-3 5e-4
//! rng_seed = 42
//! trials = 20
//! suites = axioms covariant normal_form
//! tolerance.first_derivative = 1e-5
//! ```
//!
//! `term` and `seed` may repeat; every other key may appear once.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::connection::FdConfig;
use crate::hypersurface::{HoloPolynomial, Hypersurface, DEFAULT_MAX_ITER, DEFAULT_NEWTON_TOL};
use crate::quatlin::{AmbientVector, QuaternionicStructure};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {message}")]
pub struct SceneError {
    pub line: usize,
    pub message: String,
}

fn err(line: usize, message: impl Into<String>) -> SceneError {
    SceneError {
        line,
        message: message.into(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Suite {
    Axioms,
    Covariant,
    NormalForm,
    Skew,
    Normality,
    Contact,
    Frame,
    Gauge,
}

impl Suite {
    pub const ALL: [Suite; 8] = [
        Suite::Axioms,
        Suite::Gauge,
        Suite::Frame,
        Suite::Covariant,
        Suite::NormalForm,
        Suite::Skew,
        Suite::Normality,
        Suite::Contact,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Axioms => "axioms",
            Suite::Covariant => "covariant",
            Suite::NormalForm => "normal_form",
            Suite::Skew => "skew",
            Suite::Normality => "normality",
            Suite::Contact => "contact",
            Suite::Frame => "frame",
            Suite::Gauge => "gauge",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Suite::ALL
            .into_iter()
            .find(|suite| suite.name() == s)
            .ok_or_else(|| format!("unknown suite `{s}`"))
    }
}

/// Thresholds applied to asserted residuals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Pointwise algebraic identities.
    pub algebraic: f64,
    /// Gauge rotation composition.
    pub composition: f64,
    /// First-derivative finite-difference residuals.
    pub first_derivative: f64,
    /// Residuals involving second derivatives (brackets of brackets, torsion).
    pub second_derivative: f64,
    /// Agreement of a tensor under two field extensions.
    pub extension: f64,
    /// Richardson ratio band for a halving of `h`.
    pub ratio_low: f64,
    pub ratio_high: f64,
    /// Ratios are only asserted when the coarse residual exceeds this.
    pub ratio_floor: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            algebraic: 1e-10,
            composition: 1e-12,
            first_derivative: 1e-5,
            second_derivative: 1e-4,
            extension: 1e-6,
            ratio_low: 3.5,
            ratio_high: 4.5,
            ratio_floor: 1e-8,
        }
    }
}

impl Tolerances {
    pub const NAMES: [&'static str; 8] = [
        "algebraic",
        "composition",
        "first_derivative",
        "second_derivative",
        "extension",
        "ratio_low",
        "ratio_high",
        "ratio_floor",
    ];

    fn slot(&mut self, name: &str) -> Option<&mut f64> {
        Some(match name {
            "algebraic" => &mut self.algebraic,
            "composition" => &mut self.composition,
            "first_derivative" => &mut self.first_derivative,
            "second_derivative" => &mut self.second_derivative,
            "extension" => &mut self.extension,
            "ratio_low" => &mut self.ratio_low,
            "ratio_high" => &mut self.ratio_high,
            "ratio_floor" => &mut self.ratio_floor,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone)]
pub struct Scene {
    pub m: usize,
    pub polynomial: HoloPolynomial,
    pub seeds: Vec<AmbientVector>,
    pub h_values: Vec<f64>,
    pub tolerances: Tolerances,
    pub rng_seed: u64,
    pub trials: usize,
    pub newton_tol: f64,
    pub max_iter: usize,
    pub suites: Vec<Suite>,
    /// SHA-256 of the scene text.
    pub hash: String,
}

impl Scene {
    pub fn hypersurface(&self) -> crate::Result<Hypersurface> {
        Hypersurface::new(QuaternionicStructure::new(self.m)?, self.polynomial.clone())
    }

    pub fn fd_config(&self, h: f64) -> FdConfig {
        FdConfig {
            h,
            newton_tol: self.newton_tol,
            max_iter: self.max_iter,
        }
    }

    /// Replace the suite list, keeping the canonical order.
    pub fn set_suites(&mut self, suites: impl IntoIterator<Item = Suite>) {
        let chosen: HashSet<Suite> = suites.into_iter().collect();
        self.suites = Suite::ALL.into_iter().filter(|s| chosen.contains(s)).collect();
    }

    /// Append halved steps until at least two step sizes are present.
    pub fn ensure_convergence_study(&mut self) {
        while self.h_values.len() < 2 {
            let last = *self.h_values.last().expect("h_values is nonempty");
            self.h_values.push(last / 2.0);
        }
    }
}

fn parse_reals(line: usize, key: &str, value: &str) -> Result<Vec<f64>, SceneError> {
    value
        .split_whitespace()
        .map(|tok| {
            tok.parse::<f64>()
                .ok()
                .filter(|x| x.is_finite())
                .ok_or_else(|| err(line, format!("`{key}`: `{tok}` is not a finite real")))
        })
        .collect()
}

fn parse_scalar<T: FromStr>(line: usize, key: &str, value: &str) -> Result<T, SceneError> {
    value
        .parse()
        .map_err(|_| err(line, format!("`{key}`: cannot parse `{value}`")))
}

fn parse_term(line: usize, value: &str) -> Result<(Vec<u32>, Complex64), SceneError> {
    let (coeff, exps) = value
        .split_once(':')
        .ok_or_else(|| err(line, format!("term `{value}`: expected `re im : e1 e2 ...`")))?;
    let c = parse_reals(line, "term", coeff)?;
    if c.len() != 2 {
        return Err(err(line, format!("term `{value}`: coefficient needs exactly two reals")));
    }
    let exponents = exps
        .split_whitespace()
        .map(|tok| {
            tok.parse::<u32>()
                .map_err(|_| err(line, format!("term `{value}`: bad exponent `{tok}`")))
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok((exponents, Complex64::new(c[0], c[1])))
}

pub fn parse_scene(text: &str) -> Result<Scene, SceneError> {
    let mut seen: HashSet<String> = HashSet::new();
    let mut m: Option<(usize, usize)> = None;
    let mut terms: Vec<(usize, String, Vec<u32>, Complex64)> = Vec::new();
    let mut seeds: Vec<(usize, Vec<f64>)> = Vec::new();
    let mut h_values: Option<(usize, Vec<f64>)> = None;
    let mut tolerances = Tolerances::default();
    let mut rng_seed = 0u64;
    let mut trials = 20usize;
    let mut newton_tol = DEFAULT_NEWTON_TOL;
    let mut max_iter = DEFAULT_MAX_ITER;
    let mut suites: Option<Vec<Suite>> = None;

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (key, value) = content
            .split_once('=')
            .ok_or_else(|| err(line, format!("expected `key = value`, found `{content}`")))?;
        let (key, value) = (key.trim(), value.trim());
        if key != "term" && key != "seed" && !seen.insert(key.to_owned()) {
            return Err(err(line, format!("duplicate key `{key}`")));
        }
        match key {
            "m" => m = Some((line, parse_scalar(line, key, value)?)),
            "term" => {
                let (e, c) = parse_term(line, value)?;
                terms.push((line, value.to_owned(), e, c));
            }
            "seed" => seeds.push((line, parse_reals(line, key, value)?)),
            "h_values" => h_values = Some((line, parse_reals(line, key, value)?)),
            "rng_seed" => rng_seed = parse_scalar(line, key, value)?,
            "trials" => trials = parse_scalar(line, key, value)?,
            "newton_tol" => newton_tol = parse_scalar(line, key, value)?,
            "max_iter" => max_iter = parse_scalar(line, key, value)?,
            "suites" => {
                let list = value
                    .split_whitespace()
                    .map(|s| s.parse::<Suite>().map_err(|e| err(line, e)))
                    .collect::<Result<Vec<_>, _>>()?;
                if list.is_empty() {
                    return Err(err(line, "`suites` is empty"));
                }
                suites = Some(list);
            }
            _ => match key.strip_prefix("tolerance.") {
                Some(name) => {
                    let v: f64 = parse_scalar(line, key, value)?;
                    *tolerances
                        .slot(name)
                        .ok_or_else(|| err(line, format!("unknown tolerance `{name}`")))? = v;
                }
                None => return Err(err(line, format!("unknown key `{key}`"))),
            },
        }
    }

    let last_line = text.lines().count().max(1);
    let (m_line, m) = m.ok_or_else(|| err(last_line, "missing key `m`"))?;
    if m == 0 {
        return Err(err(m_line, "`m` must be at least 1"));
    }
    let num_vars = 2 * m;
    for (line, value, e, _) in &terms {
        if e.len() != num_vars {
            return Err(err(
                *line,
                format!(
                    "term `{value}` has {} exponents but m = {m} needs {num_vars}",
                    e.len()
                ),
            ));
        }
    }
    let first_term_line = terms.first().map(|t| t.0).unwrap_or(last_line);
    if terms.is_empty() {
        return Err(err(last_line, "missing key `term`"));
    }
    let polynomial = HoloPolynomial::new(num_vars, terms.into_iter().map(|(_, _, e, c)| (e, c)))
        .map_err(|e| err(first_term_line, e.to_string()))?;

    if seeds.is_empty() {
        return Err(err(last_line, "missing key `seed`"));
    }
    let seeds = seeds
        .into_iter()
        .map(|(line, s)| {
            if s.len() == 4 * m {
                Ok(AmbientVector::from_vec(s))
            } else {
                Err(err(line, format!("seed has {} coordinates, expected {}", s.len(), 4 * m)))
            }
        })
        .collect::<Result<Vec<_>, _>>()?;

    let (h_line, h_values) = h_values.unwrap_or((last_line, vec![crate::connection::DEFAULT_STEP]));
    if h_values.is_empty() {
        return Err(err(h_line, "`h_values` is empty"));
    }
    if h_values.windows(2).any(|w| w[0] <= w[1]) {
        return Err(err(h_line, "`h_values` must be strictly descending"));
    }
    for &h in &h_values {
        let cfg = FdConfig {
            h,
            newton_tol,
            max_iter,
        };
        cfg.validate().map_err(|e| err(h_line, e.to_string()))?;
    }
    let suites = suites.ok_or_else(|| err(last_line, "missing key `suites`"))?;

    let mut scene = Scene {
        m,
        polynomial,
        seeds,
        h_values,
        tolerances,
        rng_seed,
        trials,
        newton_tol,
        max_iter,
        suites: Vec::new(),
        hash: hex::encode(Sha256::digest(text.as_bytes())),
    };
    scene.set_suites(suites);
    Ok(scene)
}
