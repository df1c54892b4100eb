use super::caustic::{curve_for_rotation, tight};
use crate::error::{Error, Result};
use crate::geometry::Ellipse;
use crate::numerics::{integrate_periodic, Tolerance};
use serde::Serialize;
use std::f64::consts::{PI, TAU};

/// Points of the `ψ`-grid on which the criticality profile is sampled.
/// A multiple of four, so both vertices are on the grid.
const PROFILE_GRID: usize = 4096;

/// How far an invariant curve of an ellipse is from having constant angle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InvariantCurveDiagnostics {
    pub rho: f64,
    /// `∫₀¹ δ(Θ) dΘ`, equal to `πρ` on every invariant curve.
    pub delta_mean: f64,
    /// Mean over `ψ` of the profile `sin δ(ψ) Θ'(ψ)`.
    pub criticality_m: f64,
    /// `max − min` of the profile; zero exactly for disks.
    pub criticality_defect: f64,
    pub beta: f64,
    /// `∫₀¹ sin δ(Θ) dΘ`
    pub sin_mean: f64,
    /// `−(|∂Ω|/π) ∫₀¹ sin δ dΘ`, which equals `beta` when the angle is constant.
    pub constant_angle_beta: f64,
    /// Quadrature nodes used in the action variable.
    pub nodes: usize,
}

/// Integrates `δ` and `sin δ` in the action variable `Θ`, where the
/// billiard map is a rigid rotation, and samples the criticality profile
/// `sin δ Θ' = 1/(W cos δ)` on a `ψ`-grid.
pub fn curve_diagnostics(ellipse: &Ellipse, rho: f64, tol: &Tolerance) -> Result<InvariantCurveDiagnostics> {
    let curve = curve_for_rotation(ellipse, rho, tol)?;
    if curve.is_asymptotic() {
        return Err(Error::Accuracy(format!(
            "rotation number {rho} too close to 1/2 for pointwise diagnostics"
        )));
    }
    let inner = tight();
    let psi_of = |theta: f64| curve.angle_at_action(theta, &inner).unwrap_or(f64::NAN);
    let delta = integrate_periodic(|t| curve.delta(psi_of(t)), 1.0, tol)?;
    let sin = integrate_periodic(|t| curve.sin_cos_delta(psi_of(t)).0, 1.0, tol)?;

    let w_total = curve.total_measure();
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for i in 0..PROFILE_GRID {
        let psi = TAU * i as f64 / PROFILE_GRID as f64;
        let v = 1.0 / (w_total * curve.sin_cos_delta(psi).1);
        lo = lo.min(v);
        hi = hi.max(v);
    }
    let perimeter = ellipse.perimeter_agm();
    Ok(InvariantCurveDiagnostics {
        rho,
        delta_mean: delta.value,
        criticality_m: sin.value / TAU,
        criticality_defect: hi - lo,
        beta: curve.beta(),
        sin_mean: sin.value,
        constant_angle_beta: -perimeter / PI * sin.value,
        nodes: delta.nodes.max(sin.nodes),
    })
}
