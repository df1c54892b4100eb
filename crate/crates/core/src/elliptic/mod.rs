//! Billiards in ellipses: confocal caustics, rotation numbers, the beta
//! function at every rotation number, its first variation along families
//! of ellipses, and constant-angle diagnostics.
//!
//! A caustic with parameter `λ` carries an invariant curve of the billiard
//! map. In the normal angle `ψ` of the tangency point, the reflection angle
//! obeys `sin δ(ψ) = J h(ψ)` with Joachimsthal's invariant `J = √λ/(ab)`,
//! and the invariant measure has density `1/(sin δ cos δ)`. All integrals
//! of that density are complete or incomplete elliptic integrals, which
//! are evaluated in Carlson's symmetric form.

mod beta;
mod caustic;
mod diagnostics;

pub use beta::{
    beta_caustic, beta_caustic_report, beta_derivative, BetaReport, FamilyPoint, FirstVariation,
    DEGENERATION_WARNING,
};
pub use caustic::{
    advance, caustic_data, curve_for_rotation, delta_angle, lambda_for_rotation, rotation_number,
    Caustic, CausticData, InvariantCurve, DEFAULT_BASE_POINT,
};
pub use diagnostics::{curve_diagnostics, InvariantCurveDiagnostics};
