//! Numerical construction and verification of the complex almost contact
//! metric structure induced on complex hypersurfaces of flat quaternionic
//! space `R^{4m}`.

// `!(x <= tol)` is used on purpose so that NaN fails a check.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod connection;
pub mod error;
pub mod hypersurface;
pub mod induced;
pub mod normality;
pub mod quatlin;
pub mod report;
pub mod residual;
pub mod scene;
pub mod suites;

pub use error::{Error, Result};
pub use hypersurface::{HoloPolynomial, Hypersurface, SurfacePoint};
pub use induced::{AdaptedFrame, InducedStructure};
pub use quatlin::{AmbientMatrix, AmbientVector, QuaternionicStructure};
pub use report::{emit, exit_code, Format, ResidualReport};
pub use scene::{parse_scene, Scene, SceneError, Suite};
pub use suites::run;

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/quaternionic.md")]
    mod quaternionic {}
    #[doc = include_str!("../../../book/src/hypersurfaces.md")]
    mod hypersurfaces {}
    #[doc = include_str!("../../../book/src/induced.md")]
    mod induced {}
    #[doc = include_str!("../../../book/src/connection.md")]
    mod connection {}
    #[doc = include_str!("../../../book/src/normality.md")]
    mod normality {}
    #[doc = include_str!("../../../book/src/scenes.md")]
    mod scenes {}
}
