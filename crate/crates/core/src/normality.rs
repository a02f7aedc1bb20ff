//! Nijenhuis torsion of `G` and `H`, the normality tensors `S` and `T`, and
//! the contact-metric condition, all evaluated numerically.
//!
//! Conventions (the two that are not forced by the construction):
//!
//! ```text
//! [G,G](X,Y) = G^2 [X,Y] + [GX,GY] - G[GX,Y] - G[X,GY]
//! dw(X,Y)    = X w(Y) - Y w(X) - w([X,Y])        (a half-factor variant is also reported)
//! ```
//!
//! `S` and `T` are reported, never expected to vanish.

use crate::connection::{sigma_form, Curve, FdConfig, StructureTensor, TangentField};
use crate::error::Result;
use crate::hypersurface::{Hypersurface, SurfacePoint};
use crate::induced::InducedStructure;
use crate::quatlin::AmbientVector;

pub const NIJENHUIS_CONVENTION: &str = "[T,T](X,Y) = T^2[X,Y] + [TX,TY] - T[TX,Y] - T[X,TY]";
pub const EXTERIOR_CONVENTION: &str = "dw(X,Y) = X w(Y) - Y w(X) - w([X,Y])";
pub const EXTERIOR_HALF_CONVENTION: &str = "dw(X,Y) = (X w(Y) - Y w(X) - w([X,Y])) / 2";

/// `[W1, W2](p) = D_{W1(p)} W2 - D_{W2(p)} W1`, both along projected curves.
pub fn lie_bracket(
    surf: &Hypersurface,
    sp: &SurfacePoint,
    w1: &dyn TangentField,
    w2: &dyn TangentField,
    cfg: &FdConfig,
) -> Result<AmbientVector> {
    let along_w1 = Curve::through(surf, sp, &w1.at(sp)?, cfg)?;
    let along_w2 = Curve::through(surf, sp, &w2.at(sp)?, cfg)?;
    Ok(along_w1.derivative(w2)? - along_w2.derivative(w1)?)
}

/// The field `q -> [W1, W2](q)`.
pub fn bracket_field<'a>(
    surf: &'a Hypersurface,
    w1: &'a dyn TangentField,
    w2: &'a dyn TangentField,
    cfg: &'a FdConfig,
) -> impl Fn(&SurfacePoint) -> Result<AmbientVector> + 'a {
    move |q: &SurfacePoint| lie_bracket(surf, q, w1, w2, cfg)
}

/// `[W1,[W2,W3]] + [W2,[W3,W1]] + [W3,[W1,W2]]` at `sp`.
pub fn jacobi_residual(
    surf: &Hypersurface,
    sp: &SurfacePoint,
    fields: [&dyn TangentField; 3],
    cfg: &FdConfig,
) -> Result<AmbientVector> {
    let [a, b, c] = fields;
    let bc = bracket_field(surf, b, c, cfg);
    let ca = bracket_field(surf, c, a, cfg);
    let ab = bracket_field(surf, a, b, cfg);
    Ok(lie_bracket(surf, sp, a, &bc, cfg)?
        + lie_bracket(surf, sp, b, &ca, cfg)?
        + lie_bracket(surf, sp, c, &ab, cfg)?)
}

/// `[T,T](W_X, W_Y)` at `sp` for the given extensions.
pub fn nijenhuis_with(
    surf: &Hypersurface,
    sp: &SurfacePoint,
    tensor: StructureTensor,
    wx: &dyn TangentField,
    wy: &dyn TangentField,
    cfg: &FdConfig,
) -> Result<AmbientVector> {
    let twx = move |q: &SurfacePoint| Ok(tensor.apply_at(surf, q, &wx.at(q)?));
    let twy = move |q: &SurfacePoint| Ok(tensor.apply_at(surf, q, &wy.at(q)?));
    let t = |w: &AmbientVector| tensor.apply_at(surf, sp, w);

    let xy = lie_bracket(surf, sp, wx, wy, cfg)?;
    let txty = lie_bracket(surf, sp, &twx, &twy, cfg)?;
    let txy = lie_bracket(surf, sp, &twx, wy, cfg)?;
    let xty = lie_bracket(surf, sp, wx, &twy, cfg)?;
    Ok(t(&t(&xy)) + txty - t(&txy) - t(&xty))
}

/// `[T,T](X, Y)` with the projected-constant extensions of `X` and `Y`.
pub fn nijenhuis_torsion(
    surf: &Hypersurface,
    sp: &SurfacePoint,
    tensor: StructureTensor,
    x: &AmbientVector,
    y: &AmbientVector,
    cfg: &FdConfig,
) -> Result<AmbientVector> {
    let wx = crate::connection::extend_tangent_field(x.clone());
    let wy = crate::connection::extend_tangent_field(y.clone());
    nijenhuis_with(surf, sp, tensor, &wx, &wy, cfg)
}

/// Which normality tensor.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NormalityTensor {
    S,
    T,
}

/// One evaluation of `S(X,Y)` or `T(X,Y)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TensorSample {
    pub value: AmbientVector,
    /// `[G,G](X,Y)` for `S`, `[H,H](X,Y)` for `T`.
    pub torsion: AmbientVector,
    /// Everything except the torsion term.
    pub remainder: AmbientVector,
    /// `sigma` evaluated at `X, Y, GX, GY, HX, HY`.
    pub sigma: [f64; 6],
}

impl TensorSample {
    pub fn normal_leak(&self, sp: &SurfacePoint) -> f64 {
        sp.normal_norm(&self.value)
    }
}

/// `sigma` at the six directions the tensors need.
fn sigma_terms(
    surf: &Hypersurface,
    sp: &SurfacePoint,
    s: &InducedStructure,
    x: &AmbientVector,
    y: &AmbientVector,
    cfg: &FdConfig,
) -> Result<[f64; 6]> {
    let dirs = [x.clone(), y.clone(), &s.g * x, &s.g * y, &s.h * x, &s.h * y];
    let mut out = [0.0; 6];
    for (slot, d) in out.iter_mut().zip(&dirs) {
        *slot = sigma_form(surf, sp, d, cfg)?;
    }
    Ok(out)
}

/// Non-torsion terms of `S` or `T` given the `sigma` values.
pub fn normality_remainder(
    s: &InducedStructure,
    which: NormalityTensor,
    x: &AmbientVector,
    y: &AmbientVector,
    sigma: &[f64; 6],
) -> AmbientVector {
    let [sx, sy, sgx, sgy, shx, shy] = *sigma;
    let (gx, gy, hx, hy) = (&s.g * x, &s.g * y, &s.h * x, &s.h * y);
    let x_gy = x.dot(&gy);
    let x_hy = x.dot(&hy);
    let ghy = &s.g * &hy;
    let ghx = &s.g * &hx;
    let shared = &ghy * sx - &ghx * sy;
    match which {
        NormalityTensor::S => {
            &s.u * (2.0 * x_gy) - &s.v * (2.0 * x_hy) + &hx * (2.0 * s.v_of(y)) - &hy * (2.0 * s.v_of(x))
                + &hx * sgy
                - &hy * sgx
                + shared
        }
        NormalityTensor::T => {
            -&s.u * (2.0 * x_gy) + &s.v * (2.0 * x_hy) + &gx * (2.0 * s.u_of(y)) - &gy * (2.0 * s.u_of(x))
                + &gy * shx
                - &gx * shy
                + shared
        }
    }
}

pub fn normality_tensor(
    surf: &Hypersurface,
    sp: &SurfacePoint,
    which: NormalityTensor,
    x: &AmbientVector,
    y: &AmbientVector,
    cfg: &FdConfig,
) -> Result<TensorSample> {
    let s = InducedStructure::new(surf.structure(), sp);
    let tensor = match which {
        NormalityTensor::S => StructureTensor::G,
        NormalityTensor::T => StructureTensor::H,
    };
    let torsion = nijenhuis_torsion(surf, sp, tensor, x, y, cfg)?;
    let sigma = sigma_terms(surf, sp, &s, x, y, cfg)?;
    let remainder = normality_remainder(&s, which, x, y, &sigma);
    Ok(TensorSample {
        value: &torsion + &remainder,
        torsion,
        remainder,
        sigma,
    })
}

pub fn s_tensor(
    surf: &Hypersurface,
    sp: &SurfacePoint,
    x: &AmbientVector,
    y: &AmbientVector,
    cfg: &FdConfig,
) -> Result<TensorSample> {
    normality_tensor(surf, sp, NormalityTensor::S, x, y, cfg)
}

pub fn t_tensor(
    surf: &Hypersurface,
    sp: &SurfacePoint,
    x: &AmbientVector,
    y: &AmbientVector,
    cfg: &FdConfig,
) -> Result<TensorSample> {
    normality_tensor(surf, sp, NormalityTensor::T, x, y, cfg)
}

/// Residuals of `g(X,GY) = du(X,Y) + (sigma ^ v)(X,Y)` and
/// `g(X,HY) = dv(X,Y) - (sigma ^ u)(X,Y)`, with
/// `(a ^ b)(X,Y) = a(X) b(Y) - a(Y) b(X)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContactResidual {
    pub du: f64,
    pub dv: f64,
    pub res_u_full: f64,
    pub res_u_half: f64,
    pub res_v_full: f64,
    pub res_v_half: f64,
}

pub fn contact_metric_residual(
    surf: &Hypersurface,
    sp: &SurfacePoint,
    x: &AmbientVector,
    y: &AmbientVector,
    cfg: &FdConfig,
) -> Result<ContactResidual> {
    let q = surf.structure();
    let s = InducedStructure::new(q, sp);
    let wx = crate::connection::extend_tangent_field(x.clone());
    let wy = crate::connection::extend_tangent_field(y.clone());
    let along_x = Curve::through(surf, sp, x, cfg)?;
    let along_y = Curve::through(surf, sp, y, cfg)?;
    let bracket = lie_bracket(surf, sp, &wx, &wy, cfg)?;

    let exterior = |vertical: &crate::quatlin::AmbientMatrix, form_at_p: &AmbientVector| -> Result<f64> {
        let x_wy = along_x.scalar_derivative(|c| Ok((vertical * &c.xi).dot(&wy.at(c)?)))?;
        let y_wx = along_y.scalar_derivative(|c| Ok((vertical * &c.xi).dot(&wx.at(c)?)))?;
        Ok(x_wy - y_wx - form_at_p.dot(&bracket))
    };
    let du = exterior(q.j2(), &s.u)?;
    let dv = exterior(q.j3(), &s.v)?;

    let (sx, sy) = (sigma_form(surf, sp, x, cfg)?, sigma_form(surf, sp, y, cfg)?);
    let sigma_v = sx * s.v_of(y) - sy * s.v_of(x);
    let sigma_u = sx * s.u_of(y) - sy * s.u_of(x);
    let x_gy = x.dot(&(&s.g * y));
    let x_hy = x.dot(&(&s.h * y));
    Ok(ContactResidual {
        du,
        dv,
        res_u_full: (x_gy - du - sigma_v).abs(),
        res_u_half: (x_gy - 0.5 * du - sigma_v).abs(),
        res_v_full: (x_hy - dv + sigma_u).abs(),
        res_v_half: (x_hy - 0.5 * dv + sigma_u).abs(),
    })
}
