//! Complex hypersurfaces `M = f^{-1}(0)` for holomorphic polynomials `f`.

use std::collections::BTreeMap;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::quatlin::{AmbientMatrix, AmbientVector, QuaternionicStructure};

pub const DEFAULT_NEWTON_TOL: f64 = 1e-12;
pub const DEFAULT_SINGULAR_TOL: f64 = 1e-8;
pub const DEFAULT_MAX_ITER: usize = 50;

/// Holomorphic polynomial `f: C^n -> C` stored as exponent vector to
/// coefficient.
#[derive(Debug, Clone, PartialEq)]
pub struct HoloPolynomial {
    num_vars: usize,
    terms: BTreeMap<Vec<u32>, Complex64>,
}

impl HoloPolynomial {
    /// Like terms are summed; terms whose coefficients cancel are dropped.
    pub fn new<I>(num_vars: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Vec<u32>, Complex64)>,
    {
        let mut table: BTreeMap<Vec<u32>, Complex64> = BTreeMap::new();
        for (exponents, coeff) in terms {
            if exponents.len() != num_vars {
                return Err(Error::InvalidPolynomial(format!(
                    "term {coeff} has exponent vector {exponents:?} of length {}, expected {num_vars}",
                    exponents.len()
                )));
            }
            *table.entry(exponents).or_default() += coeff;
        }
        table.retain(|_, c| *c != Complex64::new(0.0, 0.0));
        if table.is_empty() {
            return Err(Error::InvalidPolynomial("no nonzero coefficients".into()));
        }
        let poly = Self {
            num_vars,
            terms: table,
        };
        if poly.degree() == 0 {
            return Err(Error::InvalidPolynomial(
                "constant polynomial defines no hypersurface".into(),
            ));
        }
        Ok(poly)
    }

    /// `f = z_{index+1}`.
    pub fn coordinate(num_vars: usize, index: usize) -> Result<Self> {
        let mut e = vec![0; num_vars];
        *e.get_mut(index).ok_or(Error::DimensionMismatch {
            expected: num_vars,
            found: index + 1,
        })? = 1;
        Self::new(num_vars, [(e, Complex64::new(1.0, 0.0))])
    }

    /// `f = z_1^2 + ... + z_n^2 - radius_sq`.
    pub fn sphere(num_vars: usize, radius_sq: Complex64) -> Result<Self> {
        let squares = (0..num_vars).map(|j| {
            let mut e = vec![0; num_vars];
            e[j] = 2;
            (e, Complex64::new(1.0, 0.0))
        });
        Self::new(
            num_vars,
            squares.chain(std::iter::once((vec![0; num_vars], -radius_sq))),
        )
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn degree(&self) -> u32 {
        self.terms
            .keys()
            .map(|e| e.iter().sum::<u32>())
            .max()
            .unwrap_or(0)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[u32], Complex64)> {
        self.terms.iter().map(|(e, c)| (e.as_slice(), *c))
    }

    pub fn eval(&self, z: &[Complex64]) -> Result<Complex64> {
        self.check_len(z.len())?;
        Ok(self
            .terms
            .iter()
            .map(|(e, c)| c * monomial(z, e, None))
            .sum())
    }

    /// `(df/dz_1, ..., df/dz_n)` by formal differentiation.
    pub fn wirtinger_gradient(&self, z: &[Complex64]) -> Result<Vec<Complex64>> {
        self.check_len(z.len())?;
        let mut grad = vec![Complex64::new(0.0, 0.0); self.num_vars];
        for (e, c) in &self.terms {
            for (j, g) in grad.iter_mut().enumerate() {
                if e[j] > 0 {
                    *g += c * f64::from(e[j]) * monomial(z, e, Some(j));
                }
            }
        }
        Ok(grad)
    }

    fn check_len(&self, len: usize) -> Result<()> {
        if len != self.num_vars {
            return Err(Error::DimensionMismatch {
                expected: self.num_vars,
                found: len,
            });
        }
        Ok(())
    }
}

/// `prod_k z_k^{e_k}`, with the exponent of `lowered` reduced by one.
fn monomial(z: &[Complex64], e: &[u32], lowered: Option<usize>) -> Complex64 {
    z.iter()
        .zip(e)
        .enumerate()
        .map(|(k, (zk, &ek))| {
            let ek = if lowered == Some(k) { ek - 1 } else { ek };
            zk.powu(ek)
        })
        .product()
}

/// A regular point of `M` with its normal frame `{xi, J1 xi}` and the
/// orthogonal projector onto `T_p M`.
#[derive(Debug, Clone, PartialEq)]
pub struct SurfacePoint {
    pub p: AmbientVector,
    pub xi: AmbientVector,
    pub j1xi: AmbientVector,
    pub projector: AmbientMatrix,
    pub f_residual: f64,
    pub iterations: usize,
}

impl SurfacePoint {
    /// `X - g(X, xi) xi - g(X, J1 xi) J1 xi`.
    pub fn tangential(&self, x: &AmbientVector) -> AmbientVector {
        x - &self.xi * self.xi.dot(x) - &self.j1xi * self.j1xi.dot(x)
    }

    /// Norm of the component of `x` in the normal plane.
    pub fn normal_norm(&self, x: &AmbientVector) -> f64 {
        self.xi.dot(x).hypot(self.j1xi.dot(x))
    }
}

/// `M = f^{-1}(0)` inside the flat quaternionic space.
#[derive(Debug, Clone)]
pub struct Hypersurface {
    structure: QuaternionicStructure,
    poly: HoloPolynomial,
    singular_tol: f64,
}

impl Hypersurface {
    pub fn new(structure: QuaternionicStructure, poly: HoloPolynomial) -> Result<Self> {
        if poly.num_vars() != structure.complex_dim() {
            return Err(Error::DimensionMismatch {
                expected: structure.complex_dim(),
                found: poly.num_vars(),
            });
        }
        Ok(Self {
            structure,
            poly,
            singular_tol: DEFAULT_SINGULAR_TOL,
        })
    }

    pub fn with_singular_tol(mut self, singular_tol: f64) -> Self {
        self.singular_tol = singular_tol;
        self
    }

    pub fn structure(&self) -> &QuaternionicStructure {
        &self.structure
    }

    pub fn poly(&self) -> &HoloPolynomial {
        &self.poly
    }

    pub fn value(&self, p: &AmbientVector) -> Result<Complex64> {
        self.poly.eval(&self.structure.complex_coords(p)?)
    }

    /// Euclidean gradient of `Re f`. Writing `f' = df/dz_j`, its
    /// `(x_j, y_j)` components are `(Re f', -Im f')`, i.e. the real
    /// coordinates of `conj(f')`. The gradient of `Im f` is `J1` of it.
    pub fn grad_re(&self, p: &AmbientVector) -> Result<AmbientVector> {
        let z = self.structure.complex_coords(p)?;
        let grad: Vec<Complex64> = self
            .poly
            .wirtinger_gradient(&z)?
            .into_iter()
            .map(|g| g.conj())
            .collect();
        self.structure.real_coords(&grad)
    }

    /// `(xi, J1 xi)` with `xi = grad Re f / |grad Re f|`.
    pub fn unit_normal(&self, p: &AmbientVector) -> Result<(AmbientVector, AmbientVector)> {
        let grad = self.grad_re(p)?;
        let norm = grad.norm();
        if !(norm >= self.singular_tol) {
            return Err(Error::SingularPoint {
                grad_norm: norm,
                singular_tol: self.singular_tol,
            });
        }
        let xi = grad / norm;
        let j1xi = self.structure.j1() * &xi;
        Ok((xi, j1xi))
    }

    /// Gauss-Newton on `(Re f, Im f) = 0` with the minimal-norm step.
    ///
    /// The two constraint gradients are orthogonal with equal norm, so the
    /// pseudo-inverse step is `-(Re f grad Re f + Im f grad Im f) / |grad Re f|^2`.
    /// Once `|f| <= newton_tol` one extra step is taken if it does not
    /// increase `|f|`, which pushes the residual to rounding level.
    pub fn project(
        &self,
        seed: &AmbientVector,
        newton_tol: f64,
        max_iter: usize,
    ) -> Result<SurfacePoint> {
        self.structure.check_len(seed.len())?;
        let mut p = seed.clone();
        let mut value = self.value(&p)?;
        let mut iterations = 0;
        while value.norm() > newton_tol {
            if iterations == max_iter {
                return Err(Error::NonConvergence {
                    iterations,
                    residual: value.norm(),
                });
            }
            p = self.newton_step(&p, value)?;
            value = self.value(&p)?;
            iterations += 1;
        }
        if value.norm() > 0.0 {
            if let Ok(polished) = self.newton_step(&p, value) {
                let polished_value = self.value(&polished)?;
                if polished_value.norm() <= value.norm() {
                    p = polished;
                    value = polished_value;
                }
            }
        }
        let mut sp = self.point_at(p)?;
        sp.f_residual = value.norm();
        sp.iterations = iterations;
        Ok(sp)
    }

    fn newton_step(&self, p: &AmbientVector, value: Complex64) -> Result<AmbientVector> {
        let grad_re = self.grad_re(p)?;
        let norm_sq = grad_re.norm_squared();
        if !(norm_sq.sqrt() >= self.singular_tol) {
            return Err(Error::SingularPoint {
                grad_norm: norm_sq.sqrt(),
                singular_tol: self.singular_tol,
            });
        }
        let grad_im = self.structure.j1() * &grad_re;
        Ok(p - (grad_re * value.re + grad_im * value.im) / norm_sq)
    }

    /// Normal frame and projector at `p`, without any projection.
    pub fn point_at(&self, p: AmbientVector) -> Result<SurfacePoint> {
        let (xi, j1xi) = self.unit_normal(&p)?;
        let n = self.structure.real_dim();
        let projector = AmbientMatrix::identity(n, n) - &xi * xi.transpose() - &j1xi * j1xi.transpose();
        let f_residual = self.value(&p)?.norm();
        Ok(SurfacePoint {
            p,
            xi,
            j1xi,
            projector,
            f_residual,
            iterations: 0,
        })
    }
}
