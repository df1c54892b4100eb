//! Numerical kernels shared by the rest of the crate.
//!
//! Everything here is a pure function of its inputs: periodic trapezoidal
//! quadrature, a bracketing root finder, a golden-section maximizer, and
//! complete/symmetric elliptic integrals.

mod elliptic_integrals;
mod optimize;
mod quadrature;
mod roots;

pub use elliptic_integrals::{
    carlson_rc, carlson_rd, carlson_rf, carlson_rj, complete_elliptic_e, complete_elliptic_k,
};
pub use optimize::maximize_on_interval;
pub use quadrature::{integrate_periodic, Quadrature};
pub use roots::find_root;

use crate::error::{Error, Result};

/// Stopping rule shared by quadrature and root finding.
///
/// A computation stops once its error estimate drops below
/// `abs + rel * |value|`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub rel: f64,
    pub abs: f64,
    /// Quadrature doublings allowed past the initial 16 nodes.
    pub max_refinements: u32,
}

impl Tolerance {
    pub const DEFAULT_REL: f64 = 1e-12;
    pub const DEFAULT_ABS: f64 = 1e-14;
    pub const DEFAULT_REFINEMENTS: u32 = 20;
    pub const MAX_REFINEMENTS: u32 = 30;

    pub fn new(rel: f64, abs: f64, max_refinements: u32) -> Result<Self> {
        if !(rel >= 16.0 * f64::EPSILON) || !rel.is_finite() {
            return Err(Error::Domain(format!(
                "relative tolerance {rel:e} is below 16 machine epsilons"
            )));
        }
        if !(abs >= 0.0) || !abs.is_finite() {
            return Err(Error::Domain(format!("absolute tolerance {abs} must be >= 0")));
        }
        if max_refinements == 0 || max_refinements > Self::MAX_REFINEMENTS {
            return Err(Error::Domain(format!(
                "max_refinements {max_refinements} must lie in 1..={}",
                Self::MAX_REFINEMENTS
            )));
        }
        Ok(Tolerance { rel, abs, max_refinements })
    }

    /// Same absolute floor and refinement budget, different relative tolerance.
    pub fn with_rel(self, rel: f64) -> Result<Self> {
        Tolerance::new(rel, self.abs, self.max_refinements)
    }

    pub(crate) fn threshold(&self, value: f64) -> f64 {
        self.abs + self.rel * value.abs()
    }
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance {
            rel: Self::DEFAULT_REL,
            abs: Self::DEFAULT_ABS,
            max_refinements: Self::DEFAULT_REFINEMENTS,
        }
    }
}
