//! Families of ellipses along which one spectral datum is frozen, and the
//! inverse problems they solve.
//!
//! Two values of the beta function, or one value and the perimeter,
//! determine an ellipse up to isometry. Both reconstructions reduce to a
//! scalar root in the squared eccentricity along a one-parameter family
//! on which the probed value is strictly monotone.

use crate::elliptic::beta_caustic;
use crate::error::{Error, Result};
use crate::geometry::{perimeter, Domain, Ellipse};
use crate::numerics::{complete_elliptic_e, find_root, integrate_periodic, Tolerance};
use crate::rotation::RotationNumber;
use crate::variational::{beta_rational, OrbitConfig};
use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::{PI, TAU};

/// Largest eccentricity searched by the inverse problems.
pub const DEFAULT_E_MAX: f64 = 0.995;

/// Values closer than this (relative) to a feasibility boundary are
/// treated as lying on it.
const BOUNDARY_SLACK: f64 = 64.0 * f64::EPSILON;

fn check_rho(rho: f64) -> Result<()> {
    if !(rho > 0.0 && rho <= 0.5) {
        return Err(Error::Domain(format!("rotation number {rho} outside (0, 1/2]")));
    }
    Ok(())
}

fn check_eccentricity(e: f64) -> Result<()> {
    if !(0.0..1.0).contains(&e) {
        return Err(Error::Domain(format!("eccentricity {e} outside [0, 1)")));
    }
    Ok(())
}

fn check_negative(c: f64) -> Result<()> {
    if !(c < 0.0) || !c.is_finite() {
        return Err(Error::Domain(format!("beta value {c} must be negative")));
    }
    Ok(())
}

/// The ellipse of eccentricity `e` with `β(rho0) = c`.
///
/// `β` is 1-homogeneous under homotheties, so the member is the reference
/// ellipse `(1, √(1 − e²))` scaled by `c / β_ref(rho0)`.
pub fn isobeta_member(rho0: f64, c: f64, e: f64, tol: &Tolerance) -> Result<Ellipse> {
    check_rho(rho0)?;
    check_negative(c)?;
    let reference = Ellipse::from_eccentricity(1.0, e)?;
    let s = c / beta_caustic(&reference, rho0, tol)?;
    Ellipse::new(s, s * reference.b())
}

/// The ellipse of eccentricity `e` and perimeter `p`: `a = p / (4 E(e²))`.
pub fn perimeter_member(p: f64, e: f64) -> Result<Ellipse> {
    check_eccentricity(e)?;
    if !(p > 0.0) || !p.is_finite() {
        return Err(Error::Domain(format!("perimeter {p} must be positive")));
    }
    let a = p / (4.0 * complete_elliptic_e(e * e)?);
    Ellipse::from_eccentricity(a, e)
}

/// Which spectral datum a family keeps fixed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FamilyKind {
    IsoBeta { rho0: f64, c: f64 },
    ConstPerimeter { p: f64 },
}

/// A family of ellipses sampled on an eccentricity grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FamilySpec {
    pub kind: FamilyKind,
    pub grid: Vec<f64>,
}

impl FamilySpec {
    pub fn new(kind: FamilyKind, grid: Vec<f64>) -> Result<Self> {
        match kind {
            FamilyKind::IsoBeta { rho0, c } => {
                check_rho(rho0)?;
                check_negative(c)?;
            }
            FamilyKind::ConstPerimeter { p } => {
                if !(p > 0.0) || !p.is_finite() {
                    return Err(Error::Domain(format!("perimeter {p} must be positive")));
                }
            }
        }
        if grid.is_empty() {
            return Err(Error::Domain("eccentricity grid is empty".into()));
        }
        if grid.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::Domain("eccentricity grid must be strictly increasing".into()));
        }
        if !(grid[0] >= 0.0) || !(grid[grid.len() - 1] <= DEFAULT_E_MAX) {
            return Err(Error::Domain(format!("eccentricities must lie in [0, {DEFAULT_E_MAX}]")));
        }
        Ok(FamilySpec { kind, grid })
    }

    /// `steps` equally spaced eccentricities from `e_min` to `e_max`.
    pub fn linspace(kind: FamilyKind, e_min: f64, e_max: f64, steps: usize) -> Result<Self> {
        let grid = match steps {
            0 => Vec::new(),
            1 => vec![e_min],
            n => (0..n).map(|i| e_min + (e_max - e_min) * i as f64 / (n - 1) as f64).collect(),
        };
        FamilySpec::new(kind, grid)
    }

    pub fn member(&self, e: f64, tol: &Tolerance) -> Result<Ellipse> {
        match self.kind {
            FamilyKind::IsoBeta { rho0, c } => isobeta_member(rho0, c, e, tol),
            FamilyKind::ConstPerimeter { p } => perimeter_member(p, e),
        }
    }
}

/// One member of a scanned family and its beta value at the probe.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScanRow {
    pub e: f64,
    pub a: f64,
    pub b: f64,
    pub beta: f64,
    /// `beta` minus the previous row's `beta`; absent on the first row.
    pub margin: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Trend {
    StrictlyDecreasing,
    StrictlyIncreasing,
    NotMonotone,
    Constant,
}

/// Monotonicity of the beta column of a scan.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Monotonicity {
    pub trend: Trend,
    /// Smallest `|margin|`; infinite for single-row scans.
    pub min_abs_margin: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Scan {
    pub rows: Vec<ScanRow>,
    pub verdict: Monotonicity,
}

/// Evaluates `β(probe)` on every member of the family. Rows are computed
/// in parallel and returned in grid order.
pub fn scan_family(spec: &FamilySpec, probe: f64, tol: &Tolerance) -> Result<Scan> {
    check_rho(probe)?;
    if let FamilyKind::IsoBeta { rho0, .. } = spec.kind {
        if rho0 == probe {
            return Err(Error::Domain(format!(
                "probe {probe} equals the frozen rotation number; every row would equal c"
            )));
        }
    }
    let values = spec
        .grid
        .par_iter()
        .map(|&e| -> Result<(Ellipse, f64)> {
            let ellipse = spec.member(e, tol)?;
            Ok((ellipse, beta_caustic(&ellipse, probe, tol)?))
        })
        .collect::<Result<Vec<_>>>()?;
    let rows: Vec<ScanRow> = spec
        .grid
        .iter()
        .zip(&values)
        .enumerate()
        .map(|(i, (&e, (ellipse, beta)))| ScanRow {
            e,
            a: ellipse.a(),
            b: ellipse.b(),
            beta: *beta,
            margin: (i > 0).then(|| beta - values[i - 1].1),
        })
        .collect();
    let margins: Vec<f64> = rows.iter().filter_map(|r| r.margin).collect();
    let min_abs_margin = margins.iter().map(|m| m.abs()).fold(f64::INFINITY, f64::min);
    let trend = if margins.iter().all(|&m| m < 0.0) {
        Trend::StrictlyDecreasing
    } else if margins.iter().all(|&m| m > 0.0) {
        Trend::StrictlyIncreasing
    } else if margins.iter().all(|&m| m == 0.0) {
        Trend::Constant
    } else {
        Trend::NotMonotone
    };
    Ok(Scan { rows, verdict: Monotonicity { trend, min_abs_margin } })
}

/// An ellipse recovered from spectral data.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Recovery {
    pub a: f64,
    pub b: f64,
    pub e: f64,
    /// Forward-map mismatch of each prescribed datum.
    pub residuals: Vec<f64>,
}

impl Recovery {
    pub fn ellipse(&self) -> Result<Ellipse> {
        Ellipse::new(self.a, self.b)
    }
}

/// Root of `g` in `m = e²` on `[0, e_max²]`. Endpoint values within
/// rounding of zero count as roots; `None` means no sign change.
fn root_in_squared_eccentricity<G>(g: G, scale: f64, tol: &Tolerance) -> Result<Option<f64>>
where
    G: Fn(f64) -> Result<f64>,
{
    let hi = DEFAULT_E_MAX * DEFAULT_E_MAX;
    let (g_lo, g_hi) = (g(0.0)?, g(hi)?);
    let slack = BOUNDARY_SLACK * scale.abs();
    if g_lo.abs() <= slack {
        return Ok(Some(0.0));
    }
    if g_hi.abs() <= slack {
        return Ok(Some(hi));
    }
    if g_lo.signum() == g_hi.signum() {
        return Ok(None);
    }
    let root_tol = tol.with_rel(tol.rel.min(1e-13))?;
    let m = find_root(|m| g(m).unwrap_or(f64::NAN), 0.0, hi, &root_tol)?;
    Ok(Some(m))
}

/// The ellipse with `β(rho0) = c0` and `β(rho1) = c1`.
///
/// Searches the iso-beta family of `(rho0, c0)` for the member whose beta
/// value at `rho1` is `c1`.
///
/// ```
/// use billiard_beta::elliptic::beta_caustic;
/// use billiard_beta::geometry::Ellipse;
/// use billiard_beta::numerics::Tolerance;
/// use billiard_beta::rigidity::recover_two_values;
///
/// let tol = Tolerance::default();
/// let e = Ellipse::new(2.0, 1.0).unwrap();
/// let (c0, c1) = (beta_caustic(&e, 0.25, &tol).unwrap(), beta_caustic(&e, 1.0 / 3.0, &tol).unwrap());
/// let r = recover_two_values(0.25, c0, 1.0 / 3.0, c1, &tol).unwrap();
/// assert!((r.a - 2.0).abs() < 1e-7 && (r.b - 1.0).abs() < 1e-7);
/// ```
pub fn recover_two_values(rho0: f64, c0: f64, rho1: f64, c1: f64, tol: &Tolerance) -> Result<Recovery> {
    check_rho(rho0)?;
    check_rho(rho1)?;
    check_negative(c0)?;
    check_negative(c1)?;
    if rho0 == rho1 {
        return Err(Error::Domain("the two rotation numbers must differ".into()));
    }
    let g = |m: f64| -> Result<f64> {
        let member = isobeta_member(rho0, c0, m.sqrt(), tol)?;
        Ok(beta_caustic(&member, rho1, tol)? - c1)
    };
    let m = root_in_squared_eccentricity(g, c1, tol)?.ok_or_else(|| {
        Error::Infeasible(format!(
            "no ellipse with e <= {DEFAULT_E_MAX} has beta({rho0}) = {c0} and beta({rho1}) = {c1}"
        ))
    })?;
    let e = m.sqrt();
    let ellipse = isobeta_member(rho0, c0, e, tol)?;
    let residuals = vec![
        beta_caustic(&ellipse, rho0, tol)? - c0,
        beta_caustic(&ellipse, rho1, tol)? - c1,
    ];
    Ok(Recovery { a: ellipse.a(), b: ellipse.b(), e, residuals })
}

/// The ellipse of perimeter `p` with `β(rho) = c`.
///
/// Fails as infeasible when `c` exceeds the disk bound `−(p/π) sin(πρ)`,
/// which no convex domain of perimeter `p` can beat.
pub fn recover_value_perimeter(rho: f64, c: f64, p: f64, tol: &Tolerance) -> Result<Recovery> {
    check_rho(rho)?;
    check_negative(c)?;
    if !(p > 0.0) || !p.is_finite() {
        return Err(Error::Domain(format!("perimeter {p} must be positive")));
    }
    let bound = -(p / PI) * (PI * rho).sin();
    if c > bound + BOUNDARY_SLACK * bound.abs() {
        return Err(Error::Infeasible(format!(
            "beta({rho}) = {c} exceeds the disk bound {bound} for perimeter {p}"
        )));
    }
    let g = |m: f64| -> Result<f64> { Ok(beta_caustic(&perimeter_member(p, m.sqrt())?, rho, tol)? - c) };
    let m = root_in_squared_eccentricity(g, c, tol)?.ok_or_else(|| {
        Error::Infeasible(format!(
            "no ellipse with e <= {DEFAULT_E_MAX} and perimeter {p} has beta({rho}) = {c}"
        ))
    })?;
    let e = m.sqrt();
    let ellipse = perimeter_member(p, e)?;
    let residuals = vec![beta_caustic(&ellipse, rho, tol)? - c, ellipse.perimeter_agm() - p];
    Ok(Recovery { a: ellipse.a(), b: ellipse.b(), e, residuals })
}

/// How beta is evaluated by [`bbs_slack`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BetaMethod {
    Caustic,
    Variational,
}

/// Distance below the disk bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BbsSlack {
    /// `disk_bound − β`; nonnegative for every convex domain.
    pub slack: f64,
    pub perimeter: f64,
    /// `(|∂Ω|/2π) · (−2 sin πρ)`
    pub disk_bound: f64,
    pub beta: f64,
}

/// Compares `β_Ω(ρ)` with the beta function of the disk of equal perimeter.
pub fn bbs_slack(
    domain: &Domain,
    rho: RotationNumber,
    method: BetaMethod,
    cfg: &OrbitConfig,
    tol: &Tolerance,
) -> Result<BbsSlack> {
    let beta = match method {
        BetaMethod::Caustic => {
            let ellipse = domain
                .as_ellipse()
                .ok_or_else(|| Error::Domain("the caustic method needs an ellipse".into()))?;
            beta_caustic(ellipse, rho.value(), tol)?
        }
        BetaMethod::Variational => {
            let (p, q) = rho.as_fraction().ok_or_else(|| {
                Error::Domain("the variational method needs a rational rotation number p/q".into())
            })?;
            beta_rational(domain, p, q, cfg)?
        }
    };
    let length = match domain {
        Domain::Ellipse(e) => e.perimeter_agm(),
        Domain::Support(_) => perimeter(domain, tol)?,
    };
    let disk_bound = -length / TAU * 2.0 * (PI * rho.value()).sin();
    Ok(BbsSlack { slack: disk_bound - beta, perimeter: length, disk_bound, beta })
}

/// `∫∫_{[0,π/2]²} (sin²y − sin²x)(f1(y)/f0(y) − f1(x)/f0(x)) f0(x) f0(y) dx dy`
/// with `f_j(ψ) = 1/√((1 − e² sin²ψ)(1 + k_j² sin²ψ))`.
///
/// The integrand separates into single integrals `μ_j(g) = ∫ g f_j`:
/// the value is `2 (μ0(1) μ1(sin²) − μ0(sin²) μ1(1))`. It is negative
/// whenever `k1² > k0²`, because `f1/f0` then decreases in `sin²`.
pub fn kernel_sign(e: f64, k0sq: f64, k1sq: f64, tol: &Tolerance) -> Result<f64> {
    check_eccentricity(e)?;
    if !(k0sq >= 0.0) || !(k1sq >= 0.0) || !k0sq.is_finite() || !k1sq.is_finite() {
        return Err(Error::Domain("kernel parameters must be finite and nonnegative".into()));
    }
    let moment = |k2: f64, weighted: bool| -> Result<f64> {
        let q = integrate_periodic(
            |psi| {
                let s2 = psi.sin().powi(2);
                let f = 1.0 / ((1.0 - e * e * s2) * (1.0 + k2 * s2)).sqrt();
                if weighted {
                    s2 * f
                } else {
                    f
                }
            },
            TAU,
            tol,
        )?;
        // the integrand is even with period π
        Ok(q.value / 4.0)
    };
    let (m0, m0s) = (moment(k0sq, false)?, moment(k0sq, true)?);
    let (m1, m1s) = (moment(k1sq, false)?, moment(k1sq, true)?);
    Ok(2.0 * (m0 * m1s - m0s * m1))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn isobeta_examples() {
        let tol = Tolerance::default();
        for &e in &[0.0, 0.3, 0.9] {
            let m = isobeta_member(0.5, -4.0, e, &tol).unwrap();
            assert!((m.a() - 2.0).abs() < 1e-15);
            assert!((m.b() - 2.0 * (1.0 - e * e).sqrt()).abs() < 1e-14);
        }
        let disk = isobeta_member(0.3, -1.5, 0.0, &tol).unwrap();
        assert!((disk.a() - 1.5 / (2.0 * (0.3 * PI).sin())).abs() < 1e-12);
        assert!(isobeta_member(0.3, 1.0, 0.2, &tol).is_err());
    }

    #[test]
    fn perimeter_member_examples() {
        let disk = perimeter_member(TAU, 0.0).unwrap();
        assert_eq!((disk.a(), disk.b()), (1.0, 1.0));
        let e = perimeter_member(9.688_448_220_547_675, 3f64.sqrt() / 2.0).unwrap();
        assert!((e.a() - 2.0).abs() < 1e-12 && (e.b() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn scan_rejects_frozen_probe() {
        let tol = Tolerance::default();
        let spec = FamilySpec::linspace(FamilyKind::IsoBeta { rho0: 0.25, c: -2.0 }, 0.0, 0.9, 4).unwrap();
        assert!(scan_family(&spec, 0.25, &tol).is_err());
        let s = scan_family(&spec, 0.5, &tol).unwrap();
        assert_ne!(s.verdict.trend, Trend::NotMonotone);
    }

    #[test]
    fn grid_validation() {
        let kind = FamilyKind::ConstPerimeter { p: 1.0 };
        assert!(FamilySpec::new(kind, vec![0.0, 0.0]).is_err());
        assert!(FamilySpec::new(kind, vec![0.5, 0.999]).is_err());
        assert!(FamilySpec::new(kind, vec![]).is_err());
        assert!(FamilySpec::new(FamilyKind::ConstPerimeter { p: -1.0 }, vec![0.1]).is_err());
    }

    #[test]
    fn value_perimeter_feasibility() {
        let tol = Tolerance::default();
        let p = 5.0;
        let bound = -(p / PI) * (PI / 3.0).sin();
        let r = recover_value_perimeter(1.0 / 3.0, bound, p, &tol).unwrap();
        assert_eq!(r.e, 0.0);
        assert!(matches!(
            recover_value_perimeter(1.0 / 3.0, bound * 0.99, p, &tol),
            Err(Error::Infeasible(_))
        ));
    }

    #[test]
    fn kernel_diagonal_vanishes() {
        let tol = Tolerance::default();
        assert_eq!(kernel_sign(0.5, 0.2, 0.2, &tol).unwrap(), 0.0);
        assert!(kernel_sign(0.5, 0.1, 0.4, &tol).unwrap() < 0.0);
        assert!(kernel_sign(0.5, 0.4, 0.1, &tol).unwrap() > 0.0);
    }
}
