use super::caustic::{curve_for_rotation, CausticData, InvariantCurve};
use crate::error::{Error, Result};
use crate::geometry::Ellipse;
use crate::numerics::Tolerance;
use serde::Serialize;

/// Rotation numbers closer than this to one half get a warning: the
/// caustic has nearly collapsed onto the boundary.
pub const DEGENERATION_WARNING: f64 = 1e-6;

/// Beta value together with the invariant curve it came from.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BetaReport {
    pub beta: f64,
    pub rho: f64,
    /// Absent at `rho = 1/2`, where the curve is the two-periodic orbit
    /// along the major axis.
    pub caustic: Option<CausticData>,
    pub warnings: Vec<String>,
}

/// Mather's beta function of an ellipse, `β(ρ)` for `0 < ρ ≤ 1/2`.
///
/// ```
/// use billiard_beta::elliptic::beta_caustic;
/// use billiard_beta::geometry::Ellipse;
/// use billiard_beta::numerics::Tolerance;
///
/// let e = Ellipse::new(2.0, 1.0).unwrap();
/// assert_eq!(beta_caustic(&e, 0.5, &Tolerance::default()).unwrap(), -4.0);
/// ```
pub fn beta_caustic(ellipse: &Ellipse, rho: f64, tol: &Tolerance) -> Result<f64> {
    Ok(beta_caustic_report(ellipse, rho, tol)?.beta)
}

pub fn beta_caustic_report(ellipse: &Ellipse, rho: f64, tol: &Tolerance) -> Result<BetaReport> {
    if rho == 0.5 {
        return Ok(BetaReport { beta: -2.0 * ellipse.a(), rho, caustic: None, warnings: Vec::new() });
    }
    let curve = curve_for_rotation(ellipse, rho, tol)?;
    let mut warnings = Vec::new();
    if rho > 0.5 - DEGENERATION_WARNING {
        warnings.push(format!(
            "rotation number within {DEGENERATION_WARNING:e} of 1/2: caustic gap exp({:.6e})",
            curve.caustic().log_gap()
        ));
    }
    let caustic = CausticData {
        lambda: curve.caustic().lambda(),
        gap: curve.caustic().gap(),
        j: curve.caustic().lambda().sqrt() / (ellipse.a() * ellipse.b()),
        k2: {
            let e = ellipse.eccentricity();
            (1.0 - curve.caustic().gap()) * e * e / curve.caustic().gap()
        },
        rho,
    };
    Ok(BetaReport { beta: curve.beta(), rho, caustic: Some(caustic), warnings })
}

/// A point of a smooth family of ellipses `(a_τ, b_τ)` with its τ-derivatives.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FamilyPoint {
    pub a: f64,
    pub b: f64,
    pub da: f64,
    pub db: f64,
}

impl FamilyPoint {
    pub fn new(a: f64, b: f64, da: f64, db: f64) -> Result<Self> {
        Ellipse::new(a, b)?;
        if !da.is_finite() || !db.is_finite() {
            return Err(Error::Domain("family derivatives must be finite".into()));
        }
        Ok(FamilyPoint { a, b, da, db })
    }

    pub fn ellipse(&self) -> Result<Ellipse> {
        Ellipse::new(self.a, self.b)
    }
}

/// First variation of `β(ρ)` along a family of ellipses at fixed `ρ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FirstVariation {
    pub dbeta: f64,
    /// `∫₀^{2π} (a a' cos²ψ + b b' sin²ψ) / √((1 − e² sin²ψ)(1 + k² sin²ψ)) dψ`
    pub raw_integral: f64,
    /// `dbeta / raw_integral = −2b / (W a √(b² − λ))`, always negative.
    pub constant: f64,
}

/// `dβ/dτ = −2 ∫₀¹ ∂_τ h(ψ(Θ)) sin δ(Θ) dΘ`, evaluated in closed form.
///
/// Along the homothety family `(a', b') = (a, b)` this returns `β` itself.
pub fn beta_derivative(family: &FamilyPoint, rho: f64, tol: &Tolerance) -> Result<FirstVariation> {
    let ellipse = family.ellipse()?;
    let curve = curve_for_rotation(&ellipse, rho, tol)?;
    Ok(first_variation(&curve, family))
}

pub(crate) fn first_variation(curve: &InvariantCurve, family: &FamilyPoint) -> FirstVariation {
    let (f1, f2) = curve.quarter_integrals();
    let keep = 1.0 - curve.caustic().gap();
    let (a, b) = (family.a, family.b);
    let aa = a * family.da;
    let bb = b * family.db;
    let bracket = aa + (bb - aa) * f2 / f1;
    let dbeta = -2.0 * keep.sqrt() / a * bracket;
    let root_gap = (0.5 * curve.caustic().log_gap()).exp();
    let raw_integral = 4.0 * root_gap * (aa * f1 + (bb - aa) * f2);
    let constant = -2.0 * keep.sqrt() / (4.0 * f1 * a * root_gap);
    FirstVariation { dbeta, raw_integral, constant }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn disk_closed_form() {
        let tol = Tolerance::default();
        for &r in &[1.0, 3.7] {
            let disk = Ellipse::circle(r).unwrap();
            for &rho in &[0.1, 0.25, 1.0 / 3.0, 0.45, 0.49] {
                let beta = beta_caustic(&disk, rho, &tol).unwrap();
                assert!((beta + 2.0 * r * (PI * rho).sin()).abs() < 1e-12, "{r} {rho} {beta}");
            }
        }
    }

    #[test]
    fn half_and_warning() {
        let tol = Tolerance::default();
        let e = Ellipse::new(2.0, 1.0).unwrap();
        let r = beta_caustic_report(&e, 0.5, &tol).unwrap();
        assert_eq!(r.beta, -4.0);
        assert!(r.caustic.is_none());
        let r = beta_caustic_report(&e, 0.5 - 1e-7, &tol).unwrap();
        assert_eq!(r.warnings.len(), 1);
        assert!(r.beta < -4.0 + 1e-5 && r.beta > -4.0);
        assert!(beta_caustic_report(&e, 0.4, &tol).unwrap().warnings.is_empty());
        assert!(beta_caustic(&e, 0.6, &tol).is_err());
    }

    #[test]
    fn prototype_values() {
        let tol = Tolerance::default();
        let e = Ellipse::new(2.0, 1.0).unwrap();
        assert!((beta_caustic(&e, 1.0 / 3.0, &tol).unwrap() + 2.843_613_881_883_001_7).abs() < 1e-11);
        assert!((beta_caustic(&e, 0.4, &tol).unwrap() + 3.307_174_390_691_66).abs() < 1e-11);
        assert!((beta_caustic(&e, 0.25, &tol).unwrap() + 5f64.sqrt()).abs() < 1e-11);
    }

    #[test]
    fn homothety_and_zero_variation() {
        let tol = Tolerance::default();
        let fv = beta_derivative(&FamilyPoint::new(2.0, 1.0, 2.0, 1.0).unwrap(), 0.25, &tol).unwrap();
        let beta = beta_caustic(&Ellipse::new(2.0, 1.0).unwrap(), 0.25, &tol).unwrap();
        assert!((fv.dbeta - beta).abs() < 1e-12);
        assert!((fv.constant * fv.raw_integral - fv.dbeta).abs() < 1e-12);
        assert!(fv.constant < 0.0 && fv.raw_integral > 0.0);
        let fv = beta_derivative(&FamilyPoint::new(1.0, 1.0, 0.0, 0.0).unwrap(), 0.3, &tol).unwrap();
        assert_eq!(fv.dbeta, 0.0);
    }
}
