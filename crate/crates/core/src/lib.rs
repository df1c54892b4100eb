//! Mather's beta function for convex billiard tables.
//!
//! `β(ρ)` is minus the average length of a minimizing orbit of rotation
//! number `ρ`. For ellipses it is computed from confocal caustics in closed
//! form; for general tables given by a support function, rational values come
//! from maximal periodic orbits.
//!
//! ```
//! use billiard_beta::elliptic::beta_caustic;
//! use billiard_beta::geometry::Ellipse;
//! use billiard_beta::numerics::Tolerance;
//!
//! let e = Ellipse::new(2.0, 1.0)?;
//! let beta = beta_caustic(&e, 0.5, &Tolerance::default())?;
//! assert!((beta + 4.0).abs() < 1e-12);
//! # Ok::<(), billiard_beta::Error>(())
//! ```
//!
//! Modules, bottom up: [`numerics`] (quadrature, roots, elliptic integrals),
//! [`geometry`] (tables), [`elliptic`] (caustics and closed forms),
//! [`variational`] (maximal orbits), [`rigidity`] (inverse problems),
//! [`classify`] (arithmetic of rotation numbers).

pub mod classify;
pub mod elliptic;
pub mod error;
pub mod geometry;
pub mod numerics;
pub mod rigidity;
mod rotation;
pub mod variational;

pub use error::{Error, Result};
pub use rotation::RotationNumber;

// Compiles every rust snippet of the guide as a doc-test.
#[cfg(doctest)]
mod guide {
    #[doc = include_str!("../../../README.md")]
    mod readme {}
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/domains.md")]
    mod domains {}
    #[doc = include_str!("../../../book/src/ellipses.md")]
    mod ellipses {}
    #[doc = include_str!("../../../book/src/periodic-orbits.md")]
    mod periodic_orbits {}
    #[doc = include_str!("../../../book/src/first-variation.md")]
    mod first_variation {}
    #[doc = include_str!("../../../book/src/rigidity.md")]
    mod rigidity {}
    #[doc = include_str!("../../../book/src/classification.md")]
    mod classification {}
    #[doc = include_str!("../../../book/src/numerics.md")]
    mod numerics {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
