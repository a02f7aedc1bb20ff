//! Extrinsic geometry by finite differences along `M`.
//!
//! The ambient space is flat, so the ambient connection is the directional
//! derivative. A derivative along a tangent vector `X` at `p` is a central
//! difference over the curve `c(t) = proj(p + t X)`, where `proj` is the
//! Gauss-Newton projection; `c(0) = p` and `c'(0) = X`.
//!
//! ```text
//! D_X xi     = -A X + s(X) J1 xi            (Weingarten)
//! D_X W      = nabla_X W + g(AX, W) xi + g(J1 AX, W) J1 xi   (Gauss)
//! ```

use crate::error::{Error, Result};
use crate::hypersurface::{Hypersurface, SurfacePoint, DEFAULT_MAX_ITER, DEFAULT_NEWTON_TOL};
use crate::induced::InducedStructure;
use crate::quatlin::{AmbientMatrix, AmbientVector};

pub const DEFAULT_STEP: f64 = 1e-3;

/// Central second-order finite differences.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FdConfig {
    pub h: f64,
    pub newton_tol: f64,
    pub max_iter: usize,
}

impl Default for FdConfig {
    fn default() -> Self {
        Self {
            h: DEFAULT_STEP,
            newton_tol: DEFAULT_NEWTON_TOL,
            max_iter: DEFAULT_MAX_ITER,
        }
    }
}

impl FdConfig {
    pub fn with_step(h: f64) -> Result<Self> {
        let cfg = Self {
            h,
            ..Self::default()
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// `0 < h < 0.1` and `newton_tol <= h^3`.
    pub fn validate(&self) -> Result<()> {
        if !(self.h > 0.0 && self.h < 0.1) {
            return Err(Error::InvalidConfig(format!("step h = {} outside (0, 0.1)", self.h)));
        }
        if !(self.newton_tol > 0.0 && self.newton_tol <= self.h.powi(3)) {
            return Err(Error::InvalidConfig(format!(
                "newton_tol = {} must lie in (0, h^3 = {}]",
                self.newton_tol,
                self.h.powi(3)
            )));
        }
        Ok(())
    }
}

/// A vector field defined on points of `M`.
pub trait TangentField {
    fn at(&self, q: &SurfacePoint) -> Result<AmbientVector>;
}

impl<F> TangentField for F
where
    F: Fn(&SurfacePoint) -> Result<AmbientVector>,
{
    fn at(&self, q: &SurfacePoint) -> Result<AmbientVector> {
        self(q)
    }
}

/// Which of the two induced `(1,1)` tensors.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StructureTensor {
    G,
    H,
}

impl StructureTensor {
    pub fn name(self) -> &'static str {
        match self {
            StructureTensor::G => "G",
            StructureTensor::H => "H",
        }
    }

    fn index(self) -> usize {
        match self {
            StructureTensor::G => 2,
            StructureTensor::H => 3,
        }
    }

    pub fn matrix(self, s: &InducedStructure) -> &AmbientMatrix {
        match self {
            StructureTensor::G => &s.g,
            StructureTensor::H => &s.h,
        }
    }

    /// `P_q J_a P_q w` at the point `q`.
    pub fn apply_at(self, surf: &Hypersurface, q: &SurfacePoint, w: &AmbientVector) -> AmbientVector {
        let j = surf
            .structure()
            .matrix(self.index())
            .expect("index is 2 or 3");
        q.tangential(&(j * q.tangential(w)))
    }
}

/// `proj(p + t X)`; `t = 0` returns the base point itself.
pub fn curve_point(
    surf: &Hypersurface,
    sp: &SurfacePoint,
    x: &AmbientVector,
    t: f64,
    cfg: &FdConfig,
) -> Result<SurfacePoint> {
    if t == 0.0 {
        return Ok(sp.clone());
    }
    surf.project(&(&sp.p + x * t), cfg.newton_tol, cfg.max_iter)
}

/// The two points `c(h)`, `c(-h)` used by every central difference along `X`.
#[derive(Debug, Clone)]
pub struct Curve {
    pub plus: SurfacePoint,
    pub minus: SurfacePoint,
    pub h: f64,
}

impl Curve {
    pub fn through(surf: &Hypersurface, sp: &SurfacePoint, x: &AmbientVector, cfg: &FdConfig) -> Result<Self> {
        Ok(Self {
            plus: curve_point(surf, sp, x, cfg.h, cfg)?,
            minus: curve_point(surf, sp, x, -cfg.h, cfg)?,
            h: cfg.h,
        })
    }

    /// `(W(c(h)) - W(c(-h))) / 2h`.
    pub fn derivative(&self, field: &dyn TangentField) -> Result<AmbientVector> {
        Ok((field.at(&self.plus)? - field.at(&self.minus)?) / (2.0 * self.h))
    }

    pub fn scalar_derivative<F>(&self, phi: F) -> Result<f64>
    where
        F: Fn(&SurfacePoint) -> Result<f64>,
    {
        Ok((phi(&self.plus)? - phi(&self.minus)?) / (2.0 * self.h))
    }
}

/// Shape operator and normal connection form along one direction.
#[derive(Debug, Clone, PartialEq)]
pub struct ExtrinsicData {
    /// `D_X xi`.
    pub d_xi: AmbientVector,
    /// `A X = -(D_X xi - s(X) J1 xi)`.
    pub a_x: AmbientVector,
    /// `s(X) = g(D_X xi, J1 xi)`.
    pub s_x: f64,
    /// `g(D_X xi, xi)`, zero up to truncation since `|xi| = 1`.
    pub normal_sanity: f64,
}

pub fn shape_operator(
    surf: &Hypersurface,
    sp: &SurfacePoint,
    x: &AmbientVector,
    cfg: &FdConfig,
) -> Result<ExtrinsicData> {
    let curve = Curve::through(surf, sp, x, cfg)?;
    Ok(shape_operator_on(&curve, sp))
}

fn shape_operator_on(curve: &Curve, sp: &SurfacePoint) -> ExtrinsicData {
    let d_xi = (&curve.plus.xi - &curve.minus.xi) / (2.0 * curve.h);
    let s_x = d_xi.dot(&sp.j1xi);
    let a_x = -(&d_xi - &sp.j1xi * s_x);
    ExtrinsicData {
        normal_sanity: d_xi.dot(&sp.xi),
        d_xi,
        a_x,
        s_x,
    }
}

/// `q -> P_q Y0`.
pub fn extend_tangent_field(y0: AmbientVector) -> impl Fn(&SurfacePoint) -> Result<AmbientVector> {
    move |q: &SurfacePoint| Ok(q.tangential(&y0))
}

/// `q -> P_q (Y0 + B (q - p0))`, another extension agreeing with
/// [`extend_tangent_field`] at `p0` when `Y0` is tangent there.
pub fn affine_extension(
    y0: AmbientVector,
    b: AmbientMatrix,
    p0: AmbientVector,
) -> impl Fn(&SurfacePoint) -> Result<AmbientVector> {
    move |q: &SurfacePoint| Ok(q.tangential(&(&y0 + &b * (&q.p - &p0))))
}

/// `q -> J2 xi_q`.
pub fn u_field(surf: &Hypersurface) -> impl Fn(&SurfacePoint) -> Result<AmbientVector> + '_ {
    move |q: &SurfacePoint| Ok(surf.structure().j2() * &q.xi)
}

/// `q -> J3 xi_q`.
pub fn v_field(surf: &Hypersurface) -> impl Fn(&SurfacePoint) -> Result<AmbientVector> + '_ {
    move |q: &SurfacePoint| Ok(surf.structure().j3() * &q.xi)
}

/// `q -> T_q W(q)` for the induced tensor `T`.
pub fn tensor_field<'a>(
    surf: &'a Hypersurface,
    tensor: StructureTensor,
    w: &'a dyn TangentField,
) -> impl Fn(&SurfacePoint) -> Result<AmbientVector> + 'a {
    move |q: &SurfacePoint| Ok(tensor.apply_at(surf, q, &w.at(q)?))
}

/// `nabla_X W = P (D_X W)`.
pub fn covariant_derivative(
    surf: &Hypersurface,
    sp: &SurfacePoint,
    x: &AmbientVector,
    w: &dyn TangentField,
    cfg: &FdConfig,
) -> Result<AmbientVector> {
    let curve = Curve::through(surf, sp, x, cfg)?;
    Ok(sp.tangential(&curve.derivative(w)?))
}

/// `(nabla_X T) Y = nabla_X (T W) - T nabla_X W` with `W` the given
/// extension of `Y`.
pub fn nabla_tensor_with(
    surf: &Hypersurface,
    sp: &SurfacePoint,
    x: &AmbientVector,
    w: &dyn TangentField,
    tensor: StructureTensor,
    cfg: &FdConfig,
) -> Result<AmbientVector> {
    let curve = Curve::through(surf, sp, x, cfg)?;
    nabla_tensor_on(surf, sp, &curve, w, tensor)
}

fn nabla_tensor_on(
    surf: &Hypersurface,
    sp: &SurfacePoint,
    curve: &Curve,
    w: &dyn TangentField,
    tensor: StructureTensor,
) -> Result<AmbientVector> {
    let tw = tensor_field(surf, tensor, w);
    let nabla_tw = sp.tangential(&curve.derivative(&tw)?);
    let nabla_w = sp.tangential(&curve.derivative(w)?);
    Ok(nabla_tw - tensor.apply_at(surf, sp, &nabla_w))
}

pub fn nabla_g(
    surf: &Hypersurface,
    sp: &SurfacePoint,
    x: &AmbientVector,
    y: &AmbientVector,
    cfg: &FdConfig,
) -> Result<AmbientVector> {
    let w = extend_tangent_field(y.clone());
    nabla_tensor_with(surf, sp, x, &w, StructureTensor::G, cfg)
}

pub fn nabla_h(
    surf: &Hypersurface,
    sp: &SurfacePoint,
    x: &AmbientVector,
    y: &AmbientVector,
    cfg: &FdConfig,
) -> Result<AmbientVector> {
    let w = extend_tangent_field(y.clone());
    nabla_tensor_with(surf, sp, x, &w, StructureTensor::H, cfg)
}

/// Closed form of `(nabla_X T) Y` in terms of `A X`:
///
/// ```text
/// (nabla_X G) Y = -u(Y) AX + v(Y) J AX + g(AX, Y) U - g(J AX, Y) V
/// (nabla_X H) Y = -u(Y) J AX - v(Y) AX + g(AX, Y) V + g(J AX, Y) U
/// ```
pub fn predicted_nabla(
    s: &InducedStructure,
    j1: &AmbientMatrix,
    a_x: &AmbientVector,
    y: &AmbientVector,
    tensor: StructureTensor,
) -> AmbientVector {
    let ja_x = j1 * a_x;
    let (uy, vy) = (s.u_of(y), s.v_of(y));
    let (ay, jay) = (a_x.dot(y), ja_x.dot(y));
    match tensor {
        StructureTensor::G => -a_x * uy + &ja_x * vy + &s.u * ay - &s.v * jay,
        StructureTensor::H => -&ja_x * uy - a_x * vy + &s.v * ay + &s.u * jay,
    }
}

/// Norms of LHS - RHS for the `G` and `H` covariant-derivative formulas.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CovariantResidual {
    pub res_g: f64,
    pub res_h: f64,
    /// Largest normal component of `(nabla_X G) Y`, `(nabla_X H) Y`, `A X`.
    pub normal_leak: f64,
}

pub fn covariant_residual(
    surf: &Hypersurface,
    sp: &SurfacePoint,
    x: &AmbientVector,
    y: &AmbientVector,
    cfg: &FdConfig,
) -> Result<CovariantResidual> {
    let s = InducedStructure::new(surf.structure(), sp);
    let curve = Curve::through(surf, sp, x, cfg)?;
    let ext = shape_operator_on(&curve, sp);
    let w = extend_tangent_field(y.clone());
    let mut res = [0.0; 2];
    let mut normal_leak = sp.normal_norm(&ext.a_x);
    for (slot, tensor) in res.iter_mut().zip([StructureTensor::G, StructureTensor::H]) {
        let lhs = nabla_tensor_on(surf, sp, &curve, &w, tensor)?;
        normal_leak = normal_leak.max(sp.normal_norm(&lhs));
        let rhs = predicted_nabla(&s, surf.structure().j1(), &ext.a_x, y, tensor);
        *slot = (lhs - rhs).norm();
    }
    Ok(CovariantResidual {
        res_g: res[0],
        res_h: res[1],
        normal_leak,
    })
}

/// `sigma(X) = g(nabla_X U, V)`.
pub fn sigma_form(surf: &Hypersurface, sp: &SurfacePoint, x: &AmbientVector, cfg: &FdConfig) -> Result<f64> {
    let curve = Curve::through(surf, sp, x, cfg)?;
    sigma_on(surf, sp, &curve)
}

fn sigma_on(surf: &Hypersurface, sp: &SurfacePoint, curve: &Curve) -> Result<f64> {
    let v = surf.structure().j3() * &sp.xi;
    Ok(sp.tangential(&curve.derivative(&u_field(surf))?).dot(&v))
}

/// Values entering the relation `s = g(nabla V, U) = -sigma`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormalFormCheck {
    pub s: f64,
    pub sigma: f64,
    /// `g(nabla_X V, U)`.
    pub nabla_v_u: f64,
}

impl NormalFormCheck {
    pub fn residual(&self) -> f64 {
        (self.s + self.sigma).abs().max((self.s - self.nabla_v_u).abs())
    }
}

pub fn normal_form_check(
    surf: &Hypersurface,
    sp: &SurfacePoint,
    x: &AmbientVector,
    cfg: &FdConfig,
) -> Result<NormalFormCheck> {
    let curve = Curve::through(surf, sp, x, cfg)?;
    let s = shape_operator_on(&curve, sp).s_x;
    let sigma = sigma_on(surf, sp, &curve)?;
    let u = surf.structure().j2() * &sp.xi;
    let nabla_v_u = sp.tangential(&curve.derivative(&v_field(surf))?).dot(&u);
    Ok(NormalFormCheck { s, sigma, nabla_v_u })
}

pub fn normal_form_residual(surf: &Hypersurface, sp: &SurfacePoint, x: &AmbientVector, cfg: &FdConfig) -> Result<f64> {
    Ok(normal_form_check(surf, sp, x, cfg)?.residual())
}

/// Max over `(Y, Z)` of `|g((nabla_X T) Y, Z) + g((nabla_X T) Z, Y)|`,
/// returned for `T = G` and `T = H`.
pub fn skew_residual(
    surf: &Hypersurface,
    sp: &SurfacePoint,
    x: &AmbientVector,
    pairs: &[(AmbientVector, AmbientVector)],
    cfg: &FdConfig,
) -> Result<(f64, f64)> {
    let curve = Curve::through(surf, sp, x, cfg)?;
    let mut out = [0.0f64; 2];
    for (y, z) in pairs {
        let wy = extend_tangent_field(y.clone());
        let wz = extend_tangent_field(z.clone());
        for (slot, tensor) in out.iter_mut().zip([StructureTensor::G, StructureTensor::H]) {
            let ty = nabla_tensor_on(surf, sp, &curve, &wy, tensor)?;
            let tz = nabla_tensor_on(surf, sp, &curve, &wz, tensor)?;
            *slot = slot.max((ty.dot(z) + tz.dot(y)).abs());
        }
    }
    Ok((out[0], out[1]))
}
