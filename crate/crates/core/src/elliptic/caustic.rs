use crate::error::{Error, Result};
use crate::geometry::Ellipse;
use crate::numerics::{carlson_rf, carlson_rj, find_root, Tolerance};
use serde::Serialize;
use std::f64::consts::{FRAC_PI_2, PI};

/// Below this value of `k'² = ε b² / (a² − b² + ε b²)` the complete
/// integrals are replaced by their leading logarithmic asymptotics.
/// The neglected terms are `O(k'² ln k'²)`.
const ASYMPTOTIC_KPRIME2: f64 = 1e-20;

/// Default base point of the rotation-number ratio: the minor vertex.
/// Its image under the advance stays clear of the sharp peak of the
/// invariant density at the major vertices.
pub const DEFAULT_BASE_POINT: f64 = FRAC_PI_2;

/// A confocal caustic `x²/(a² − λ) + y²/(b² − λ) = 1` with `0 < λ < b²`.
///
/// Caustics close to the boundary (rotation numbers near one half) have
/// `λ` indistinguishable from `b²` in floating point, so the caustic is
/// stored through its relative gap `ε = 1 − λ/b²`, the logarithm of the gap,
/// and the logit `u = ln(λ / (b² − λ))`. Only `log_gap` stays meaningful
/// once `ε` underflows.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Caustic {
    lambda: f64,
    /// `λ / b²`
    keep: f64,
    gap: f64,
    log_gap: f64,
    logit: f64,
}

impl Caustic {
    pub fn from_lambda(ellipse: &Ellipse, lambda: f64) -> Result<Self> {
        let b2 = ellipse.b() * ellipse.b();
        if !(lambda > 0.0 && lambda < b2) {
            return Err(Error::Domain(format!("caustic parameter {lambda} outside (0, b² = {b2})")));
        }
        let gap = (b2 - lambda) / b2;
        Ok(Caustic {
            lambda,
            keep: lambda / b2,
            gap,
            log_gap: gap.ln(),
            logit: lambda.ln() - (b2 - lambda).ln(),
        })
    }

    /// The caustic with `λ/b² = 1/(1 + exp(−u))`.
    pub fn from_logit(ellipse: &Ellipse, u: f64) -> Result<Self> {
        if !u.is_finite() {
            return Err(Error::Domain(format!("caustic logit {u} must be finite")));
        }
        let log_gap = -softplus(u);
        let keep = (-softplus(-u)).exp();
        Ok(Caustic {
            lambda: ellipse.b() * ellipse.b() * keep,
            keep,
            gap: log_gap.exp(),
            log_gap,
            logit: u,
        })
    }

    /// The caustic with `ln(1 − λ/b²) = log_gap < 0`.
    pub fn from_log_gap(ellipse: &Ellipse, log_gap: f64) -> Result<Self> {
        if !(log_gap < 0.0) || log_gap.is_infinite() {
            return Err(Error::Domain(format!("log gap {log_gap} must be negative and finite")));
        }
        // u = ln((1 − ε)/ε)
        let u = (-(log_gap.exp_m1())).ln() - log_gap;
        let mut c = Caustic::from_logit(ellipse, u)?;
        c.log_gap = log_gap;
        c.gap = log_gap.exp();
        Ok(c)
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn gap(&self) -> f64 {
        self.gap
    }

    pub fn log_gap(&self) -> f64 {
        self.log_gap
    }

    pub fn logit(&self) -> f64 {
        self.logit
    }
}

fn softplus(u: f64) -> f64 {
    u.max(0.0) + (-u.abs()).exp().ln_1p()
}

/// The caustic together with derived invariants, one invariant curve of
/// the elliptic billiard.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CausticData {
    pub lambda: f64,
    /// `1 − λ/b²`
    pub gap: f64,
    /// Joachimsthal invariant `√λ / (ab)`.
    #[serde(rename = "J")]
    pub j: f64,
    /// `λ(a² − b²) / (a²(b² − λ))`; infinite once the gap underflows.
    pub k2: f64,
    pub rho: f64,
}

/// An ellipse with one of its caustics.
///
/// With `s = sin ψ`, `P = 1 − e²s²` and `Q = ε + (1 − ε)e²s²`, the
/// reflection angle satisfies `sin δ = √(1−ε) √P` and `cos δ = √Q`, and the
/// invariant density is `w = 1/(sin δ cos δ)`. All integrals of `w` reduce
/// to the quarter-period integrals
/// `F1 = ∫₀^{π/2} dψ/√(PQ)` and `F2 = ∫₀^{π/2} s² dψ/√(PQ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InvariantCurve {
    ellipse: Ellipse,
    caustic: Caustic,
    e2: f64,
    /// `(b/a)² = 1 − e²`
    ratio2: f64,
    f1: f64,
    f2: f64,
    /// `Some(L)` when the integrals use the logarithmic asymptotics,
    /// `L = ln(16 e² / ((1 − e²) ε))`.
    asymptotic: Option<f64>,
}

impl InvariantCurve {
    pub fn new(ellipse: Ellipse, caustic: Caustic) -> Result<Self> {
        let e = ellipse.eccentricity();
        let e2 = e * e;
        let ratio = ellipse.b() / ellipse.a();
        let ratio2 = ratio * ratio;
        let (gap, keep) = (caustic.gap, caustic.keep);
        let log_kprime2 = if e2 == 0.0 {
            0.0
        } else {
            caustic.log_gap + ratio2.ln() - (e2 + gap * ratio2).ln()
        };
        if log_kprime2 < ASYMPTOTIC_KPRIME2.ln() {
            let big_l = (16.0 * e2 / ratio2).ln() - caustic.log_gap;
            return Ok(InvariantCurve {
                ellipse,
                caustic,
                e2,
                ratio2,
                f1: big_l / (2.0 * e),
                f2: e.atanh() / e2,
                asymptotic: Some(big_l),
            });
        }
        // y = ε P(π/2) and z = Q(π/2)
        let y = gap * ratio2;
        let z = gap + keep * e2;
        let f1 = carlson_rf(0.0, y, z)?;
        let f2 = gap / 3.0 * carlson_rj(0.0, y, z, gap)?;
        Ok(InvariantCurve { ellipse, caustic, e2, ratio2, f1, f2, asymptotic: None })
    }

    pub fn ellipse(&self) -> &Ellipse {
        &self.ellipse
    }

    pub fn caustic(&self) -> &Caustic {
        &self.caustic
    }

    /// True when the caustic is so close to the boundary that the curve is
    /// described by its logarithmic asymptotics.
    pub fn is_asymptotic(&self) -> bool {
        self.asymptotic.is_some()
    }

    /// `(sin δ, cos δ)` at normal angle `psi`.
    pub fn sin_cos_delta(&self, psi: f64) -> (f64, f64) {
        let s2 = psi.sin().powi(2);
        let p = 1.0 - self.e2 * s2;
        let q = self.caustic.gap + self.caustic.keep * self.e2 * s2;
        ((self.caustic.keep * p).sqrt(), q.sqrt())
    }

    pub fn delta(&self, psi: f64) -> f64 {
        let (s, c) = self.sin_cos_delta(psi);
        s.atan2(c)
    }

    /// Invariant density `1/(sin δ cos δ)`, up to the constant `J`.
    pub fn density(&self, psi: f64) -> f64 {
        let (s, c) = self.sin_cos_delta(psi);
        1.0 / (s * c)
    }

    /// `W = ∫₀^{2π} w dψ`.
    pub fn total_measure(&self) -> f64 {
        4.0 * self.f1 / self.caustic.keep.sqrt()
    }

    /// Normal angle of the next tangency point: the unique `ψ1` in
    /// `(ψ0, ψ0 + π)` with `ψ1 − ψ0 = δ(ψ0) + δ(ψ1)`.
    pub fn advance(&self, psi0: f64, tol: &Tolerance) -> Result<f64> {
        let d0 = self.delta(psi0);
        find_root(|psi| psi - psi0 - d0 - self.delta(psi), psi0, psi0 + PI, tol)
    }

    /// `∫₀^φ dψ/√(PQ)` for `0 ≤ φ ≤ π/2`.
    fn quarter_antiderivative(&self, phi: f64) -> Result<f64> {
        let (s, c) = phi.sin_cos();
        let s2 = s * s;
        let gap = self.caustic.gap;
        let rf = carlson_rf(
            gap * c * c,
            gap * (1.0 - self.e2 * s2),
            gap + self.caustic.keep * self.e2 * s2,
        )?;
        Ok(s * rf)
    }

    /// `∫₀^ψ dψ'/√(PQ)`; the integrand has period `π` and is even.
    fn antiderivative(&self, psi: f64) -> Result<f64> {
        let n = (psi / PI).floor();
        let r = psi - n * PI;
        let base = 2.0 * n * self.f1;
        if r <= FRAC_PI_2 {
            Ok(base + self.quarter_antiderivative(r)?)
        } else {
            Ok(base + 2.0 * self.f1 - self.quarter_antiderivative(PI - r)?)
        }
    }

    /// Action coordinate `Θ(ψ) = μ([0, ψ]) / μ([0, 2π])`.
    pub fn action(&self, psi: f64) -> Result<f64> {
        self.require_regular()?;
        Ok(self.antiderivative(psi)? / (4.0 * self.f1))
    }

    /// Inverse of [`InvariantCurve::action`] on `[0, 1)`.
    pub fn angle_at_action(&self, theta: f64, tol: &Tolerance) -> Result<f64> {
        self.require_regular()?;
        let t = theta * 4.0 * self.f1;
        let quarter = (t / self.f1).floor().clamp(0.0, 3.0);
        // the extended antiderivative is increasing on all of ℝ; the margin
        // keeps roots on a quarter boundary strictly inside the bracket
        let (lo, hi) = ((quarter - 0.25) * FRAC_PI_2, (quarter + 1.25) * FRAC_PI_2);
        find_root(|psi| self.antiderivative(psi).map_or(f64::NAN, |v| v - t), lo, hi, tol)
    }

    /// Rotation number from one advance step, starting at `psi0`.
    pub fn rotation_number_from(&self, psi0: f64) -> Result<f64> {
        if let Some(big_l) = self.asymptotic {
            return Ok(0.5 - self.ellipse.eccentricity().atanh() / big_l);
        }
        if self.caustic.keep == 0.0 {
            return Ok(0.0);
        }
        let psi1 = self.advance(psi0, &tight())?;
        let rho = (self.antiderivative(psi1)? - self.antiderivative(psi0)?) / (4.0 * self.f1);
        Ok(rho.clamp(0.0, 0.5))
    }

    pub fn rotation_number(&self) -> Result<f64> {
        self.rotation_number_from(DEFAULT_BASE_POINT)
    }

    /// `β = −2 a √(1−ε) (1 − e² F2/F1)`.
    pub fn beta(&self) -> f64 {
        -2.0 * self.ellipse.a() * self.caustic.keep.sqrt() * (1.0 - self.e2 * self.f2 / self.f1)
    }

    pub(crate) fn quarter_integrals(&self) -> (f64, f64) {
        (self.f1, self.f2)
    }

    pub fn data(&self) -> Result<CausticData> {
        let (a, b) = (self.ellipse.a(), self.ellipse.b());
        let lambda = self.caustic.lambda;
        Ok(CausticData {
            lambda,
            gap: self.caustic.gap,
            j: lambda.sqrt() / (a * b),
            k2: self.caustic.keep * self.e2 / self.caustic.gap,
            rho: self.rotation_number()?,
        })
    }

    fn require_regular(&self) -> Result<()> {
        match self.asymptotic {
            None => Ok(()),
            Some(_) => Err(Error::Accuracy(format!(
                "caustic gap exp({:.6e}) too small to resolve the invariant density pointwise",
                self.caustic.log_gap
            ))),
        }
    }
}

/// Tightest tolerance accepted by [`Tolerance::new`], for inner solves whose
/// error would otherwise leak into outer ones.
pub(crate) fn tight() -> Tolerance {
    Tolerance::new(16.0 * f64::EPSILON, 0.0, Tolerance::DEFAULT_REFINEMENTS)
        .expect("valid tolerance")
}

/// Caustic parameter `λ`, Joachimsthal invariant, `k²` and rotation number.
pub fn caustic_data(ellipse: &Ellipse, lambda: f64) -> Result<CausticData> {
    InvariantCurve::new(*ellipse, Caustic::from_lambda(ellipse, lambda)?)?.data()
}

/// Reflection angle `δ(ψ) = arcsin(J h(ψ))` between chord and tangent at
/// the point with normal angle `psi`.
pub fn delta_angle(ellipse: &Ellipse, lambda: f64, psi: f64) -> Result<f64> {
    let caustic = Caustic::from_lambda(ellipse, lambda)?;
    Ok(InvariantCurve::new(*ellipse, caustic)?.delta(psi))
}

/// One step of the tangency-angle circle map of the caustic `λ`.
pub fn advance(ellipse: &Ellipse, lambda: f64, psi0: f64, tol: &Tolerance) -> Result<f64> {
    let caustic = Caustic::from_lambda(ellipse, lambda)?;
    InvariantCurve::new(*ellipse, caustic)?.advance(psi0, tol)
}

/// Rotation number of the invariant curve tangent to the caustic `λ`:
/// the invariant measure of one advance step divided by the total measure.
///
/// ```
/// use billiard_beta::elliptic::rotation_number;
/// use billiard_beta::geometry::Ellipse;
///
/// let disk = Ellipse::circle(1.0).unwrap();
/// assert!((rotation_number(&disk, 0.5).unwrap() - 0.25).abs() < 1e-14);
/// ```
pub fn rotation_number(ellipse: &Ellipse, lambda: f64) -> Result<f64> {
    let caustic = Caustic::from_lambda(ellipse, lambda)?;
    InvariantCurve::new(*ellipse, caustic)?.rotation_number()
}

/// The invariant curve of rotation number `rho ∈ (0, 1/2)`.
pub fn curve_for_rotation(ellipse: &Ellipse, rho: f64, tol: &Tolerance) -> Result<InvariantCurve> {
    if !(rho > 0.0 && rho < 0.5) {
        return Err(Error::Domain(format!("rotation number {rho} outside (0, 1/2)")));
    }
    let e = ellipse.eccentricity();
    if e > 0.0 {
        // ½ − ρ = artanh(e)/L deep in the asymptotic regime
        let big_l = e.atanh() / (0.5 - rho);
        let log_gap = (16.0 * e * e * (ellipse.a() / ellipse.b()).powi(2)).ln() - big_l;
        if log_gap < 0.0 {
            let curve = InvariantCurve::new(*ellipse, Caustic::from_log_gap(ellipse, log_gap)?)?;
            if curve.is_asymptotic() {
                return Ok(curve);
            }
        }
    }
    let rho_at = |u: f64| -> Result<f64> {
        InvariantCurve::new(*ellipse, Caustic::from_logit(ellipse, u)?)?.rotation_number()
    };
    let (mut lo, mut hi) = (-8.0, 8.0);
    for _ in 0..64 {
        if rho_at(lo)? < rho {
            break;
        }
        lo *= 2.0;
    }
    for _ in 0..64 {
        if rho_at(hi)? > rho {
            break;
        }
        hi *= 2.0;
    }
    let u = find_root(|u| rho_at(u).map_or(f64::NAN, |r| r - rho), lo, hi, tol)?;
    InvariantCurve::new(*ellipse, Caustic::from_logit(ellipse, u)?)
}

/// The caustic parameter `λ` with rotation number `rho`.
///
/// Near `rho = 1/2` the result rounds to `b²`; use [`curve_for_rotation`]
/// to keep the gap `1 − λ/b²` resolved.
pub fn lambda_for_rotation(ellipse: &Ellipse, rho: f64, tol: &Tolerance) -> Result<f64> {
    Ok(curve_for_rotation(ellipse, rho, tol)?.caustic().lambda())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ell(a: f64, b: f64) -> Ellipse {
        Ellipse::new(a, b).unwrap()
    }

    #[test]
    fn caustic_data_examples() {
        let d = caustic_data(&ell(2.0, 1.0), 0.5).unwrap();
        assert!((d.j - 0.5f64.sqrt() / 2.0).abs() < 1e-16);
        assert!((d.k2 - 0.75).abs() < 1e-15);
        let d = caustic_data(&ell(1.0, 1.0), 0.5).unwrap();
        assert!((d.j - 0.5f64.sqrt()).abs() < 1e-16);
        assert_eq!(d.k2, 0.0);
        let near = caustic_data(&ell(2.0, 1.0), 1.0 - 1e-12).unwrap();
        assert!(near.k2 > 1e11);
        assert!(caustic_data(&ell(2.0, 1.0), 1.0).is_err());
        assert!(caustic_data(&ell(2.0, 1.0), 0.0).is_err());
    }

    #[test]
    fn delta_examples() {
        let disk = ell(1.0, 1.0);
        for i in 0..8 {
            let d = delta_angle(&disk, 0.25, 0.4 * i as f64).unwrap();
            assert!((d - PI / 6.0).abs() < 1e-15);
        }
        let d = delta_angle(&ell(2.0, 1.0), 0.5, FRAC_PI_2).unwrap();
        assert!((d - (0.5f64.sqrt() / 2.0).asin()).abs() < 1e-15);
        assert!((d - 0.361_367).abs() < 1e-6);
    }

    #[test]
    fn advance_on_disks() {
        let tol = Tolerance::default();
        let disk = ell(1.0, 1.0);
        assert!((advance(&disk, 0.5, 0.0, &tol).unwrap() - FRAC_PI_2).abs() < 1e-12);
        assert!((advance(&disk, 0.25, 1.0, &tol).unwrap() - (1.0 + PI / 3.0)).abs() < 1e-12);
    }

    #[test]
    fn logit_round_trip() {
        let e = ell(2.0, 1.0);
        let c = Caustic::from_lambda(&e, 0.3).unwrap();
        let d = Caustic::from_logit(&e, c.logit()).unwrap();
        assert!((d.lambda() - 0.3).abs() < 1e-15);
        assert!((d.gap() - 0.7).abs() < 1e-15);
        let deep = Caustic::from_logit(&e, 800.0).unwrap();
        assert_eq!(deep.gap(), 0.0);
        assert!((deep.log_gap() + 800.0).abs() < 1e-12);
        let g = Caustic::from_log_gap(&e, -1e4).unwrap();
        assert_eq!(g.log_gap(), -1e4);
        assert!((g.logit() - 1e4).abs() < 1e-9);
    }

    #[test]
    fn asymptotic_branch_joins_regular_branch() {
        // just above and below the switch the two descriptions agree
        let e = ell(2.0, 1.0);
        let kp2 = |c: &InvariantCurve| c.caustic.log_gap + c.ratio2.ln() - (c.e2 + c.caustic.gap * c.ratio2).ln();
        let reg = InvariantCurve::new(e, Caustic::from_log_gap(&e, -42.0).unwrap()).unwrap();
        assert!(!reg.is_asymptotic() && kp2(&reg) > ASYMPTOTIC_KPRIME2.ln());
        let asy = InvariantCurve::new(e, Caustic::from_log_gap(&e, -49.0).unwrap()).unwrap();
        assert!(asy.is_asymptotic());
        let big_l = |c: &InvariantCurve| (16.0 * c.e2 / c.ratio2).ln() - c.caustic.log_gap;
        let ecc = e.eccentricity();
        for c in [reg, asy] {
            let rho = c.rotation_number().unwrap();
            let predicted = 0.5 - ecc.atanh() / big_l(&c);
            assert!((rho - predicted).abs() < 1e-15, "{rho} {predicted}");
            let beta = c.beta();
            assert!((beta - (-4.0 + 8.0 * ecc * (0.5 - rho))).abs() < 1e-14);
        }
    }

    #[test]
    fn inversion_examples() {
        let tol = Tolerance::default();
        let disk = ell(1.0, 1.0);
        assert!((lambda_for_rotation(&disk, 0.25, &tol).unwrap() - 0.5).abs() < 1e-12);
        assert!((lambda_for_rotation(&disk, 1.0 / 6.0, &tol).unwrap() - 0.25).abs() < 1e-12);
        assert!(lambda_for_rotation(&disk, 0.5, &tol).is_err());
        assert!(lambda_for_rotation(&disk, 0.0, &tol).is_err());

        let e = ell(2.0, 1.0);
        for &rho in &[1e-6, 0.01, 0.2, 0.4, 0.45, 0.49, 0.499_999] {
            let c = curve_for_rotation(&e, rho, &tol).unwrap();
            let back = c.rotation_number().unwrap();
            assert!((back - rho).abs() < 1e-12, "{rho} -> {back}");
        }
    }
}
