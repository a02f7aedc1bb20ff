//! The complex almost contact metric structure `(G, H, J, u, v, U, V, g)`
//! induced on a complex hypersurface by the tangential parts of `J2` and `J3`.
//!
//! With `P` the tangential projector at a point and `xi` the unit normal:
//!
//! ```text
//! U = J2 xi,   V = J3 xi,   u = g(U, .),   v = g(V, .)
//! G = P J2 P,  H = P J3 P,  J = P J1 P
//! ```
//!
//! All tensors are stored as ambient matrices that vanish on the normal
//! plane; the identities are only claimed on tangent vectors.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::hypersurface::SurfacePoint;
use crate::quatlin::{AmbientMatrix, AmbientVector, QuaternionicStructure};
use crate::residual::{random_tangent, ResidualSet};

/// Tolerance on `a^2 + b^2 = 1` for gauge rotations.
pub const GAUGE_UNIT_TOL: f64 = 1e-12;

const FRAME_DEGENERACY_TOL: f64 = 1e-8;
const FRAME_RETRY_BUDGET: usize = 20;

#[derive(Debug, Clone, PartialEq)]
pub struct InducedStructure {
    pub u: AmbientVector,
    pub v: AmbientVector,
    pub g: AmbientMatrix,
    pub h: AmbientMatrix,
    pub j: AmbientMatrix,
    pub projector: AmbientMatrix,
    pub xi: AmbientVector,
    pub j1xi: AmbientVector,
    /// Accumulated gauge rotation `(a, b)` relative to the construction.
    pub gauge: (f64, f64),
    j2xi: AmbientVector,
    j3xi: AmbientVector,
    pj2p: AmbientMatrix,
    pj3p: AmbientMatrix,
}

impl InducedStructure {
    pub fn new(q: &QuaternionicStructure, sp: &SurfacePoint) -> Self {
        let p = &sp.projector;
        let j2xi = q.j2() * &sp.xi;
        let j3xi = q.j3() * &sp.xi;
        let pj2p = p * q.j2() * p;
        let pj3p = p * q.j3() * p;
        Self {
            u: j2xi.clone(),
            v: j3xi.clone(),
            g: pj2p.clone(),
            h: pj3p.clone(),
            j: p * q.j1() * p,
            projector: p.clone(),
            xi: sp.xi.clone(),
            j1xi: sp.j1xi.clone(),
            gauge: (1.0, 0.0),
            j2xi,
            j3xi,
            pj2p,
            pj3p,
        }
    }

    /// `u(X) = g(U, X)`.
    pub fn u_of(&self, x: &AmbientVector) -> f64 {
        self.u.dot(x)
    }

    /// `v(X) = g(V, X)`.
    pub fn v_of(&self, x: &AmbientVector) -> f64 {
        self.v.dot(x)
    }

    /// The transformation law between overlapping charts:
    /// `u' = a u - b v`, `v' = b u + a v`, `G' = a G - b H`, `H' = b G + a H`
    /// and the same rotation on `(U, V)`.
    pub fn gauge_rotate(&self, a: f64, b: f64) -> Result<Self> {
        if !((a * a + b * b - 1.0).abs() <= GAUGE_UNIT_TOL) {
            return Err(Error::NonUnitGauge { a, b });
        }
        let (a0, b0) = self.gauge;
        Ok(Self {
            u: &self.u * a - &self.v * b,
            v: &self.u * b + &self.v * a,
            g: &self.g * a - &self.h * b,
            h: &self.g * b + &self.h * a,
            gauge: (a0 * a - b0 * b, a0 * b + a * b0),
            ..self.clone()
        })
    }

    /// Largest entrywise difference of all tensors.
    pub fn max_difference(&self, other: &Self) -> f64 {
        [
            (&self.u - &other.u).amax(),
            (&self.v - &other.v).amax(),
            (&self.g - &other.g).amax(),
            (&self.h - &other.h).amax(),
            (&self.j - &other.j).amax(),
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }

    /// Max over random unit tangent vectors of every structure identity.
    pub fn residuals(&self, trials: usize, rng_seed: u64) -> ResidualSet {
        let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
        let mut out = ResidualSet::new();
        let (a, b) = self.gauge;
        let (u, v) = (&self.u, &self.v);
        let (g, h, j, p) = (&self.g, &self.h, &self.j, &self.projector);

        out.record("U_from_J2xi", (u - (&self.j2xi * a - &self.j3xi * b)).norm());
        out.record("V_from_J3xi", (v - (&self.j2xi * b + &self.j3xi * a)).norm());
        out.record("G_from_PJ2P", (g - (&self.pj2p * a - &self.pj3p * b)).amax());
        out.record("H_from_PJ3P", (h - (&self.pj2p * b + &self.pj3p * a)).amax());

        out.record("U_unit", (u.norm() - 1.0).abs());
        out.record("V_unit", (v.norm() - 1.0).abs());
        out.record("U_perp_V", u.dot(v).abs());
        out.record("U_tangent", (p * u - u).norm());
        out.record("V_tangent", (p * v - v).norm());
        out.record("V_equals_JU", (j * u - v).norm());
        out.record("u_of_U", (self.u_of(u) - 1.0).abs());
        out.record("u_of_V", self.u_of(v).abs());
        out.record("v_of_V", (self.v_of(v) - 1.0).abs());
        out.record("v_of_U", self.v_of(u).abs());
        out.record("GU_zero", (g * u).norm());
        out.record("GV_zero", (g * v).norm());
        out.record("HU_zero", (h * u).norm());
        out.record("HV_zero", (h * v).norm());

        for _ in 0..trials {
            let x = random_tangent(&mut rng, p);
            let y = random_tangent(&mut rng, p);
            let (gx, hx, jx) = (g * &x, h * &x, j * &x);
            let vertical = u * self.u_of(&x) + v * self.v_of(&x);

            out.record("G_squared", (g * &gx + &x - &vertical).norm());
            out.record("H_squared", (h * &hx + &x - &vertical).norm());
            out.record("u_of_GX", self.u_of(&gx).abs());
            out.record("v_of_GX", self.v_of(&gx).abs());
            out.record("u_of_HX", self.u_of(&hx).abs());
            out.record("v_of_HX", self.v_of(&hx).abs());
            out.record("G_skew", (gx.dot(&y) + x.dot(&(g * &y))).abs());
            out.record("H_skew", (hx.dot(&y) + x.dot(&(h * &y))).abs());
            out.record("GJ_anticommute", (g * &jx + j * &gx).norm());
            out.record("H_equals_JG", (&hx - j * &gx).norm());
            out.record("GJ_equals_minus_H", (g * &jx + &hx).norm());
            out.record(
                "GH_formula",
                (g * &hx - (&jx + u * self.v_of(&x) - v * self.u_of(&x))).norm(),
            );
            out.record("v_equals_minus_uJ", (self.v_of(&x) + self.u_of(&jx)).abs());
            out.record(
                "G_metric",
                (gx.dot(&(g * &y)) - x.dot(&y) + self.u_of(&x) * self.u_of(&y)
                    + self.v_of(&x) * self.v_of(&y))
                .abs(),
            );
            out.record("G_tangent_valued", (p * &gx - &gx).norm());
            out.record("H_tangent_valued", (p * &hx - &hx).norm());
        }
        out
    }

    /// Orthonormal tangent frame `(X_i, J X_i, G X_i, H X_i)_{i=1..n}, U, V`.
    pub fn adapted_frame(&self, rng_seed: u64) -> Result<AdaptedFrame> {
        let tangent_dim = self.projector.trace().round() as usize;
        let n = tangent_dim.saturating_sub(2) / 4;
        let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
        let mut quads: Vec<AmbientVector> = Vec::with_capacity(4 * n);
        let mut attempts = 0;
        for _ in 0..n {
            let x = loop {
                if attempts == FRAME_RETRY_BUDGET {
                    return Err(Error::FrameDegeneracy { attempts });
                }
                attempts += 1;
                let mut x = random_tangent(&mut rng, &self.projector);
                // two passes of Gram-Schmidt
                for _ in 0..2 {
                    for e in quads.iter().chain([&self.u, &self.v]) {
                        x -= e * e.dot(&x);
                    }
                }
                let norm = x.norm();
                if norm >= FRAME_DEGENERACY_TOL {
                    break x / norm;
                }
            };
            let jx = &self.j * &x;
            let gx = &self.g * &x;
            let hx = &self.h * &x;
            quads.extend([x, jx, gx, hx]);
        }
        let mut vectors = quads;
        vectors.push(self.u.clone());
        vectors.push(self.v.clone());
        let correction = gram_schmidt_correction(&vectors);
        Ok(AdaptedFrame {
            vectors,
            n,
            correction,
        })
    }
}

/// Largest change re-orthonormalization would make to any frame vector.
fn gram_schmidt_correction(vectors: &[AmbientVector]) -> f64 {
    let mut orthonormal: Vec<AmbientVector> = Vec::with_capacity(vectors.len());
    let mut worst: f64 = 0.0;
    for v in vectors {
        let mut w = v.clone();
        for e in &orthonormal {
            w -= e * e.dot(&w);
        }
        let w = w.normalize();
        worst = worst.max((&w - v).norm());
        orthonormal.push(w);
    }
    worst
}

/// Orthonormal tangent basis adapted to the structure.
#[derive(Debug, Clone, PartialEq)]
pub struct AdaptedFrame {
    pub vectors: Vec<AmbientVector>,
    /// Number of `(X, JX, GX, HX)` quadruples.
    pub n: usize,
    /// Size of the Gram-Schmidt correction that was measured but not applied.
    pub correction: f64,
}

impl AdaptedFrame {
    pub fn gram_residual(&self) -> f64 {
        let k = self.vectors.len();
        let mut worst: f64 = 0.0;
        for i in 0..k {
            for j in 0..k {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((self.vectors[i].dot(&self.vectors[j]) - target).abs());
            }
        }
        worst
    }

    pub fn tangency_residual(&self, projector: &AmbientMatrix) -> f64 {
        self.vectors
            .iter()
            .map(|e| (projector * e - e).norm())
            .fold(0.0, f64::max)
    }

    /// `JX`, `GX`, `HX` against the stored second, third and fourth vectors.
    pub fn quadruple_residual(&self, s: &InducedStructure) -> f64 {
        self.vectors
            .chunks(4)
            .take(self.n)
            .map(|q| {
                [(&s.j, &q[1]), (&s.g, &q[2]), (&s.h, &q[3])]
                    .into_iter()
                    .map(|(t, e)| (t * &q[0] - e).amax())
                    .fold(0.0, f64::max)
            })
            .fold(0.0, f64::max)
    }
}
