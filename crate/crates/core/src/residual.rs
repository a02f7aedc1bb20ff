//! Named residual values collected by the identity checkers.

use nalgebra::DVector;
use rand::Rng;

use crate::quatlin::{AmbientMatrix, AmbientVector};

#[derive(Debug, Clone, PartialEq)]
pub struct Residual {
    pub name: String,
    pub value: f64,
}

/// Ordered name -> value list. Recording a name twice keeps the maximum.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ResidualSet {
    entries: Vec<Residual>,
}

impl ResidualSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn record(&mut self, name: &str, value: f64) {
        match self.entries.iter_mut().find(|r| r.name == name) {
            // NaN must win so that broken inputs never look like a pass.
            Some(r) => {
                if value.is_nan() || value > r.value {
                    r.value = value;
                }
            }
            None => self.entries.push(Residual {
                name: name.to_owned(),
                value,
            }),
        }
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        self.entries.iter().find(|r| r.name == name).map(|r| r.value)
    }

    /// Largest value, NaN if any entry is NaN.
    pub fn max(&self) -> f64 {
        self.entries.iter().fold(0.0, |acc: f64, r| {
            if acc.is_nan() || r.value.is_nan() {
                f64::NAN
            } else {
                acc.max(r.value)
            }
        })
    }

    pub fn iter(&self) -> impl Iterator<Item = &Residual> {
        self.entries.iter()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn extend_prefixed(&mut self, prefix: &str, other: &ResidualSet) {
        for r in other.iter() {
            self.record(&format!("{prefix}{}", r.name), r.value);
        }
    }
}

/// Unit vector in the range of `projector`, drawn from a uniform box.
pub fn random_tangent<R: Rng + ?Sized>(rng: &mut R, projector: &AmbientMatrix) -> AmbientVector {
    let n = projector.nrows();
    loop {
        let raw = DVector::from_fn(n, |_, _| rng.random_range(-1.0..1.0));
        let x = projector * raw;
        let norm = x.norm();
        if norm > 1e-3 {
            return x / norm;
        }
    }
}
