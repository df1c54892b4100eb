//! Arithmetic classification of rotation numbers: exact rationality,
//! Gutkin angles (`tan nx = n tan x`), and the Diophantine condition
//! `|nρ − m| ≥ ν |m| n^{−σ}` checked up to a finite `N`.

use crate::error::{Error, Result};
use crate::numerics::{find_root, Tolerance};
use serde::Serialize;
use std::f64::consts::{FRAC_PI_2, PI};

/// Grid points per unit of `n` in the Gutkin scan.
const GUTKIN_GRID_PER_N: usize = 10_000;

/// Rational reconstruction accepts `|ρ − p/q|` up to this.
pub const RATIONAL_TOL: f64 = 1e-12;

/// Minimum distance from a Gutkin angle for a rotation number to count as free of it.
pub const GUTKIN_TOL: f64 = 1e-10;

/// A solution `x ∈ (0, π/2)` of `tan(nx) = n tan(x)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GutkinRoot {
    pub n: u32,
    pub x: f64,
    /// `|tan(nx) − n tan(x)|` at the returned `x`.
    pub residual: f64,
}

impl GutkinRoot {
    /// First-order change of the residual under a one-ulp change of `x`,
    /// `n sec²(nx) ε`. The residual is at most `1e−12` wherever this is too;
    /// closer to a pole of `tan(nx)` no float `x` can do better.
    pub fn conditioning(&self) -> f64 {
        let t = (f64::from(self.n) * self.x).tan();
        f64::from(self.n) * (1.0 + t * t) * f64::EPSILON
    }
}

/// `|tan(nx) − n tan(x)|` with the rounding of `n·x` compensated to first order.
pub fn gutkin_residual(n: f64, x: f64) -> f64 {
    let nx = n * x;
    let err = n.mul_add(x, -nx);
    let t = nx.tan();
    (t + err * (1.0 + t * t) - n * x.tan()).abs()
}

/// All solutions of `tan(nx) = n tan(x)` in the open interval `(0, π/2)`.
///
/// Scans `10⁴·n` grid points for sign changes of the pole-free form
/// `sin(nx) cos(x) − n cos(nx) sin(x)` and refines each one. That form
/// behaves like `(n³ − n) x³ / 3` at the excluded root `x = 0`.
///
/// ```
/// use billiard_beta::classify::gutkin_roots;
///
/// assert!(gutkin_roots(3).unwrap().is_empty());
/// let roots = gutkin_roots(4).unwrap();
/// assert_eq!(roots.len(), 1);
/// assert!((roots[0].x - 5f64.sqrt().atan()).abs() < 1e-12);
/// ```
pub fn gutkin_roots(n: i32) -> Result<Vec<GutkinRoot>> {
    gutkin_roots_on_grid(n, GUTKIN_GRID_PER_N)
}

pub fn gutkin_roots_on_grid(n: i32, per_n: usize) -> Result<Vec<GutkinRoot>> {
    let n = n.unsigned_abs();
    if n < 2 {
        return Err(Error::Domain(format!("Gutkin equation needs |n| >= 2, got {n}")));
    }
    let nf = f64::from(n);
    let g = |x: f64| (nf * x).sin() * x.cos() - nf * (nf * x).cos() * x.sin();
    let tol = Tolerance::new(16.0 * f64::EPSILON, 0.0, 1).expect("valid tolerance");
    let points = per_n * n as usize;
    let h = FRAC_PI_2 / points as f64;
    let mut roots = Vec::new();
    let mut x0 = h;
    let mut g0 = g(x0);
    for i in 2..points {
        let x1 = h * i as f64;
        let g1 = g(x1);
        if g0 == 0.0 || g0.signum() != g1.signum() {
            let x = if g0 == 0.0 { x0 } else { find_root(g, x0, x1, &tol)? };
            if roots.last().map_or(true, |r: &GutkinRoot| x - r.x > h) {
                let (x, residual) = nearest_float_root(nf, x);
                roots.push(GutkinRoot { n, x, residual });
            }
        }
        (x0, g0) = (x1, g1);
    }
    Ok(roots)
}

/// Among the floats within a few ulps of `x`, the one minimising `|tan(nx) − n tan(x)|`.
/// The slope `n(sec²(nx) − sec²x)` can exceed `10⁴`, so one ulp matters.
fn nearest_float_root(nf: f64, x: f64) -> (f64, f64) {
    let residual = |x: f64| gutkin_residual(nf, x);
    let mut best = (x, residual(x));
    let mut lo = x;
    let mut hi = x;
    for _ in 0..8 {
        lo = lo.next_down();
        hi = hi.next_up();
        for y in [lo, hi] {
            let r = residual(y);
            if r < best.1 {
                best = (y, r);
            }
        }
    }
    best
}

/// A pair `(m, n)` and its margin `|nρ − m| n^σ / (ν |m|)`; below one it violates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Witness {
    pub m: u64,
    pub n: u64,
    pub ratio: f64,
}

/// Outcome of [`diophantine_check`]; only ever valid up to `checked_up_to`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DiophantineVerdict {
    pub nu: f64,
    pub sigma: f64,
    pub checked_up_to: u64,
    pub passed: bool,
    /// First violating pair in order of increasing `n`.
    pub violation: Option<Witness>,
    /// Pair with the smallest ratio.
    pub worst_witness: Witness,
}

/// Checks `|nρ − m| ≥ ν |m| n^{−σ}` for all `1 ≤ n ≤ N` and all integers `m`.
///
/// Only few `m` can violate. `m ≤ 0` never does, since then
/// `|nρ − m| = nρ + |m| > ν|m|`. For `n ≥ 2`, any `m` outside
/// `{⌊nρ⌋, ⌈nρ⌉}` has `d = |nρ − m| ≥ 1` and `m ≤ n/2 + d`, so
/// `ν m n^{−σ} < (n/2 + d) n^{−5/2} ≤ 2^{−3/2} + 2^{−5/2} d < d`.
/// For `n = 1` the bound `ν(ρ + d) < d` can fail when `ν > 2/3`, so
/// every `m` up to `ρ/(1 − ν) + 1` is checked there.
/// Differences within rounding of zero are treated as exact zeros.
pub fn diophantine_check(rho: f64, nu: f64, sigma: f64, n_max: u64) -> Result<DiophantineVerdict> {
    if !(rho > 0.0 && rho <= 0.5) {
        return Err(Error::Domain(format!("rotation number {rho} outside (0, 1/2]")));
    }
    if !(nu > 0.0 && nu < 1.0) {
        return Err(Error::Domain(format!("nu = {nu} must lie in (0, 1)")));
    }
    if !(sigma > 2.5) || !sigma.is_finite() {
        return Err(Error::Domain(format!("sigma = {sigma} must exceed 5/2")));
    }
    if n_max < 2 {
        return Err(Error::Domain(format!("N = {n_max} must be at least 2")));
    }
    let mut worst = Witness { m: 0, n: 0, ratio: f64::INFINITY };
    let mut violation = None;
    let mut visit = |m: u64, n: u64| {
        if m == 0 {
            return;
        }
        let nf = n as f64;
        let raw = (nf * rho - m as f64).abs();
        let d = if raw <= 4.0 * nf * f64::EPSILON { 0.0 } else { raw };
        let ratio = d * nf.powf(sigma) / (nu * m as f64);
        if ratio < worst.ratio {
            worst = Witness { m, n, ratio };
        }
        if ratio < 1.0 && violation.is_none() {
            violation = Some(Witness { m, n, ratio });
        }
    };
    let m_top = (rho / (1.0 - nu)).floor() as u64 + 1;
    for m in 1..=m_top {
        visit(m, 1);
    }
    for n in 2..=n_max {
        let x = n as f64 * rho;
        let (lo, hi) = (x.floor() as u64, x.ceil() as u64);
        visit(lo, n);
        if hi != lo {
            visit(hi, n);
        }
    }
    Ok(DiophantineVerdict {
        nu,
        sigma,
        checked_up_to: n_max,
        passed: violation.is_none(),
        violation,
        worst_witness: worst,
    })
}

/// Whether `tan(n·x)` is read with `x = πρ` or literally with `x = ρ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum GutkinConvention {
    #[default]
    Angle,
    Literal,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ClassifyParams {
    pub nu: f64,
    pub sigma: f64,
    /// `N` of the Diophantine check.
    pub n_check: u64,
    /// Largest `n` of the Gutkin check.
    pub n_max: u32,
    pub q_max: u32,
    pub convention: GutkinConvention,
}

impl Default for ClassifyParams {
    fn default() -> Self {
        ClassifyParams {
            nu: 0.05,
            sigma: 3.0,
            n_check: 100_000,
            n_max: 20,
            q_max: 1000,
            convention: GutkinConvention::Angle,
        }
    }
}

/// Gutkin part of a [`RotationClass`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GutkinVerdict {
    pub convention: GutkinConvention,
    /// The angle compared with the Gutkin roots.
    pub x: f64,
    pub checked_up_to: u32,
    pub free: bool,
    /// Closest root over all checked `n`, if any root exists.
    pub nearest: Option<GutkinRoot>,
    pub distance: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RotationClass {
    pub value: f64,
    pub rational: Option<(u32, u32)>,
    pub gutkin: GutkinVerdict,
    pub diophantine: DiophantineVerdict,
}

/// The convergent `p/q` of `rho` with `q ≤ q_max` and `|ρ − p/q| ≤ tol`, if any.
pub fn rational_approximation(rho: f64, q_max: u32, tol: f64) -> Option<(u32, u32)> {
    let (mut p0, mut q0, mut p1, mut q1) = (0u64, 1u64, 1u64, 0u64);
    let mut x = rho;
    for _ in 0..64 {
        let a = x.floor();
        if a > u32::MAX as f64 {
            return None;
        }
        let a = a as u64;
        let (p2, q2) = (a * p1 + p0, a * q1 + q0);
        if q2 > u64::from(q_max) {
            return None;
        }
        if (rho - p2 as f64 / q2 as f64).abs() <= tol {
            return Some((p2 as u32, q2 as u32));
        }
        (p0, q0, p1, q1) = (p1, q1, p2, q2);
        let frac = x - a as f64;
        if frac == 0.0 {
            return None;
        }
        x = 1.0 / frac;
    }
    None
}

/// Rationality, Gutkin-freeness up to `n_max`, and the Diophantine condition up to `n_check`.
pub fn classify_rotation(rho: f64, params: &ClassifyParams) -> Result<RotationClass> {
    if !(rho > 0.0 && rho <= 0.5) {
        return Err(Error::Domain(format!("rotation number {rho} outside (0, 1/2]")));
    }
    if params.n_max < 2 {
        return Err(Error::Domain("n_max must be at least 2".into()));
    }
    let x = match params.convention {
        GutkinConvention::Angle => PI * rho,
        GutkinConvention::Literal => rho,
    };
    let mut nearest: Option<GutkinRoot> = None;
    let mut distance = f64::INFINITY;
    for n in 2..=params.n_max {
        for root in gutkin_roots(n as i32)? {
            let d = (root.x - x).abs();
            if d < distance {
                distance = d;
                nearest = Some(root);
            }
        }
    }
    Ok(RotationClass {
        value: rho,
        rational: rational_approximation(rho, params.q_max, RATIONAL_TOL),
        gutkin: GutkinVerdict {
            convention: params.convention,
            x,
            checked_up_to: params.n_max,
            free: distance > GUTKIN_TOL,
            nearest,
            distance,
        },
        diophantine: diophantine_check(rho, params.nu, params.sigma, params.n_check)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_n_gutkin_roots() {
        assert!(gutkin_roots(2).unwrap().is_empty());
        assert!(gutkin_roots(3).unwrap().is_empty());
        assert!(gutkin_roots(-3).unwrap().is_empty());
        let r = gutkin_roots(4).unwrap();
        assert_eq!(r.len(), 1);
        assert!((r[0].x - 1.150_262_0).abs() < 1e-7);
        assert!(r[0].residual <= 1e-12);
        assert!(gutkin_roots(1).is_err());
    }

    #[test]
    fn residual_bound_holds_for_all_roots() {
        for n in 2..=30 {
            for r in gutkin_roots(n).unwrap() {
                let c = r.conditioning();
                if c <= 1e-12 {
                    assert!(r.residual <= 1e-12, "n = {n}: {r:?}");
                } else {
                    assert!(r.residual <= 4.0 * c, "n = {n}: {r:?}");
                }
                assert!(r.x > 0.0 && r.x < FRAC_PI_2);
            }
        }
    }

    #[test]
    fn diophantine_examples() {
        let v = diophantine_check(1.0 / 3.0, 0.05, 3.0, 10).unwrap();
        assert!(!v.passed);
        let w = v.violation.unwrap();
        assert_eq!((w.m, w.n), (1, 3));
        assert_eq!(w.ratio, 0.0);
        assert!(diophantine_check(0.3, 0.0, 3.0, 10).is_err());
        assert!(diophantine_check(0.3, 0.05, 2.0, 10).is_err());
    }

    #[test]
    fn first_order_candidates_for_large_nu() {
        // n = 1, m = 2: |1/2 − 2| = 1.5 < 0.8 · 2
        let v = diophantine_check(0.5, 0.8, 3.0, 2).unwrap();
        let w = v.violation.unwrap();
        assert_eq!((w.m, w.n), (1, 1));
        let v = diophantine_check(0.45, 0.9, 3.0, 2).unwrap();
        assert!(!v.passed);
    }

    #[test]
    fn rationality() {
        assert_eq!(rational_approximation(0.25, 1000, 1e-12), Some((1, 4)));
        assert_eq!(rational_approximation(3.0 / 8.0, 1000, 1e-12), Some((3, 8)));
        assert_eq!(rational_approximation(355.0 / 997.0, 1000, 1e-12), Some((355, 997)));
        assert_eq!(rational_approximation((3.0 - 5f64.sqrt()) / 4.0, 1000, 1e-12), None);
    }

    #[test]
    fn classification_examples() {
        let p = ClassifyParams::default();
        let c = classify_rotation(0.25, &p).unwrap();
        assert_eq!(c.rational, Some((1, 4)));
        assert!(!c.diophantine.passed && c.gutkin.free);
        let c = classify_rotation(5f64.sqrt().atan() / PI, &p).unwrap();
        assert!(!c.gutkin.free);
        assert_eq!(c.gutkin.nearest.unwrap().n, 4);
        let c = classify_rotation((3.0 - 5f64.sqrt()) / 4.0, &p).unwrap();
        assert!(c.rational.is_none() && c.diophantine.passed);
    }
}
