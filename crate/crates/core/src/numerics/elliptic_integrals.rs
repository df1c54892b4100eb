//! Complete elliptic integrals (AGM) and Carlson's symmetric integrals.
//!
//! The parameter convention is `m = k²` throughout.

use crate::error::{Error, Result};
use std::f64::consts::FRAC_PI_2;

fn check_parameter(m: f64) -> Result<()> {
    if (0.0..1.0).contains(&m) {
        Ok(())
    } else {
        Err(Error::Domain(format!("elliptic parameter m = {m} must lie in [0, 1)")))
    }
}

/// Runs the arithmetic-geometric mean from `(1, sqrt(1 - m))`.
///
/// Returns the limit and `sum 2^(n-1) c_n²`, which is what Legendre's
/// relation needs to turn `K` into `E`.
fn agm_with_defect(m: f64) -> (f64, f64) {
    let mut a = 1.0;
    let mut b = (1.0 - m).sqrt();
    let mut c = m.sqrt();
    let mut weight = 0.5;
    let mut defect = weight * c * c;
    for _ in 0..64 {
        if (a - b).abs() <= 2.0 * f64::EPSILON * a {
            break;
        }
        let next_a = 0.5 * (a + b);
        let next_b = (a * b).sqrt();
        c = 0.5 * (a - b);
        a = next_a;
        b = next_b;
        weight *= 2.0;
        defect += weight * c * c;
    }
    (0.5 * (a + b), defect)
}

/// Complete elliptic integral of the first kind, `K(m)`.
pub fn complete_elliptic_k(m: f64) -> Result<f64> {
    check_parameter(m)?;
    Ok(FRAC_PI_2 / agm_with_defect(m).0)
}

/// Complete elliptic integral of the second kind, `E(m)`, via the AGM.
///
/// `E(m) = K(m) (1 - sum 2^(n-1) c_n²)`. The perimeter of an ellipse with
/// semi-axes `a >= b` is `4 a E(e²)`.
///
/// ```
/// use billiard_beta::numerics::complete_elliptic_e;
///
/// assert!((complete_elliptic_e(0.0).unwrap() - std::f64::consts::FRAC_PI_2).abs() < 1e-15);
/// assert!((complete_elliptic_e(0.75).unwrap() - 1.211_056_027_568_459_5).abs() < 1e-14);
/// ```
pub fn complete_elliptic_e(m: f64) -> Result<f64> {
    check_parameter(m)?;
    let (mean, defect) = agm_with_defect(m);
    Ok(FRAC_PI_2 / mean * (1.0 - defect))
}

fn check_args(args: &[f64]) -> Result<()> {
    if args.iter().any(|&x| !(x >= 0.0) || !x.is_finite()) {
        return Err(Error::Domain(format!("Carlson arguments {args:?} must be finite and >= 0")));
    }
    Ok(())
}

/// Carlson's degenerate integral `R_C(x, y) = R_F(x, y, y)`, for `y > 0`.
pub fn carlson_rc(x: f64, y: f64) -> Result<f64> {
    check_args(&[x])?;
    if !(y > 0.0) || !y.is_finite() {
        return Err(Error::Domain(format!("R_C needs y > 0, got {y}")));
    }
    Ok(rc_unchecked(x, y))
}

fn rc_unchecked(x: f64, y: f64) -> f64 {
    // R_C(x, y) = R_C(1, 1 + t) / sqrt(x) with t = y/x - 1
    if x == 0.0 {
        return FRAC_PI_2 / y.sqrt();
    }
    let t = (y - x) / x;
    let unit = if t > 0.0 {
        let s = t.sqrt();
        s.atan() / s
    } else if t < 0.0 {
        let s = (-t).sqrt();
        s.atanh() / s
    } else {
        1.0
    };
    unit / x.sqrt()
}

/// Carlson's symmetric integral of the first kind,
/// `R_F(x, y, z) = 1/2 ∫_0^∞ dt / sqrt((t+x)(t+y)(t+z))`.
///
/// At most one argument may vanish.
pub fn carlson_rf(x: f64, y: f64, z: f64) -> Result<f64> {
    check_args(&[x, y, z])?;
    if (x == 0.0) as u8 + (y == 0.0) as u8 + (z == 0.0) as u8 > 1 {
        return Err(Error::Domain("R_F allows at most one zero argument".into()));
    }
    Ok(rf_unchecked(x, y, z))
}

pub(crate) fn rf_unchecked(mut x: f64, mut y: f64, mut z: f64) -> f64 {
    let a0 = (x + y + z) / 3.0;
    let mut a = a0;
    let q = (3.0 * f64::EPSILON).powf(-1.0 / 6.0)
        * (a0 - x).abs().max((a0 - y).abs()).max((a0 - z).abs());
    let (x0, y0) = (x, y);
    let mut scale = 1.0;
    while scale * q >= a.abs() {
        let (sx, sy, sz) = (x.sqrt(), y.sqrt(), z.sqrt());
        let lambda = sx * sy + sx * sz + sy * sz;
        x = 0.25 * (x + lambda);
        y = 0.25 * (y + lambda);
        z = 0.25 * (z + lambda);
        a = 0.25 * (a + lambda);
        scale *= 0.25;
    }
    let dx = (a0 - x0) * scale / a;
    let dy = (a0 - y0) * scale / a;
    let dz = -dx - dy;
    let e2 = dx * dy - dz * dz;
    let e3 = dx * dy * dz;
    (1.0 - e2 / 10.0 + e3 / 14.0 + e2 * e2 / 24.0 - 3.0 * e2 * e3 / 44.0) / a.sqrt()
}

/// Carlson's symmetric integral of the second kind, `R_D(x, y, z) = R_J(x, y, z, z)`.
pub fn carlson_rd(x: f64, y: f64, z: f64) -> Result<f64> {
    check_args(&[x, y, z])?;
    if z == 0.0 || (x == 0.0 && y == 0.0) {
        return Err(Error::Domain("R_D needs z > 0 and at most one of x, y zero".into()));
    }
    Ok(rj_unchecked(x, y, z, z))
}

/// Carlson's symmetric integral of the third kind,
/// `R_J(x, y, z, p) = 3/2 ∫_0^∞ dt / ((t+p) sqrt((t+x)(t+y)(t+z)))`, for `p > 0`.
pub fn carlson_rj(x: f64, y: f64, z: f64, p: f64) -> Result<f64> {
    check_args(&[x, y, z, p])?;
    if p == 0.0 || (x == 0.0) as u8 + (y == 0.0) as u8 + (z == 0.0) as u8 > 1 {
        return Err(Error::Domain("R_J needs p > 0 and at most one of x, y, z zero".into()));
    }
    Ok(rj_unchecked(x, y, z, p))
}

pub(crate) fn rj_unchecked(mut x: f64, mut y: f64, mut z: f64, mut p: f64) -> f64 {
    let a0 = (x + y + z + 2.0 * p) / 5.0;
    let mut a = a0;
    let delta = (p - x) * (p - y) * (p - z);
    let q = (0.25 * f64::EPSILON).powf(-1.0 / 6.0)
        * (a0 - x).abs().max((a0 - y).abs()).max((a0 - z).abs()).max((a0 - p).abs());
    let (x0, y0, z0) = (x, y, z);
    let mut scale = 1.0;
    let mut sum = 0.0;
    while scale * q >= a.abs() {
        let (sx, sy, sz, sp) = (x.sqrt(), y.sqrt(), z.sqrt(), p.sqrt());
        let lambda = sx * sy + sx * sz + sy * sz;
        let d = (sp + sx) * (sp + sy) * (sp + sz);
        let e = delta * scale * scale * scale / (d * d);
        sum += scale / d * rc_unchecked(1.0, 1.0 + e);
        x = 0.25 * (x + lambda);
        y = 0.25 * (y + lambda);
        z = 0.25 * (z + lambda);
        p = 0.25 * (p + lambda);
        a = 0.25 * (a + lambda);
        scale *= 0.25;
    }
    let dx = (a0 - x0) * scale / a;
    let dy = (a0 - y0) * scale / a;
    let dz = (a0 - z0) * scale / a;
    let dp = -(dx + dy + dz) / 2.0;
    let e2 = dx * dy + dx * dz + dy * dz - 3.0 * dp * dp;
    let e3 = dx * dy * dz + 2.0 * e2 * dp + 4.0 * dp * dp * dp;
    let e4 = (2.0 * dx * dy * dz + e2 * dp + 3.0 * dp * dp * dp) * dp;
    let e5 = dx * dy * dz * dp * dp;
    let series = 1.0 - 3.0 * e2 / 14.0 + e3 / 6.0 + 9.0 * e2 * e2 / 88.0 - 3.0 * e4 / 22.0
        - 9.0 * e2 * e3 / 52.0
        + 3.0 * e5 / 26.0;
    scale * series / (a * a.sqrt()) + 6.0 * sum
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn close(a: f64, b: f64, rel: f64) -> bool {
        (a - b).abs() <= rel * b.abs().max(1e-300)
    }

    #[test]
    fn agm_values() {
        assert!(close(complete_elliptic_k(0.0).unwrap(), FRAC_PI_2, 1e-15));
        assert!(close(complete_elliptic_k(0.5).unwrap(), 1.854_074_677_301_372, 1e-14));
        assert!(close(complete_elliptic_e(0.5).unwrap(), 1.350_643_881_047_675_5, 1e-14));
        assert!(close(complete_elliptic_e(0.75).unwrap(), 1.211_056_027_568_459_5, 1e-14));
        let near_one = complete_elliptic_e(1.0 - 1e-15).unwrap();
        assert!((near_one - 1.0).abs() < 1e-12);
        assert!(complete_elliptic_e(1.0).is_err());
        assert!(complete_elliptic_e(-0.1).is_err());
    }

    #[test]
    fn legendre_relation() {
        // E K' + E' K - K K' = pi/2
        for &m in &[0.1, 0.3, 0.5, 0.77, 0.95] {
            let (k, e) = (complete_elliptic_k(m).unwrap(), complete_elliptic_e(m).unwrap());
            let (kc, ec) = (complete_elliptic_k(1.0 - m).unwrap(), complete_elliptic_e(1.0 - m).unwrap());
            assert!((e * kc + ec * k - k * kc - FRAC_PI_2).abs() < 1e-14);
        }
    }

    #[test]
    fn carlson_reference_values() {
        // reference values from Carlson (1995), Numer. Algorithms 10
        assert!(close(carlson_rf(1.0, 2.0, 0.0).unwrap(), 1.311_028_777_146_1, 1e-12));
        assert!(close(carlson_rf(2.0, 3.0, 4.0).unwrap(), 0.584_082_841_677_15, 1e-12));
        assert!(close(carlson_rc(0.0, 0.25).unwrap(), PI, 1e-15));
        assert!(close(carlson_rc(2.25, 2.0).unwrap(), 2f64.ln(), 1e-14));
        assert!(close(carlson_rj(0.0, 1.0, 2.0, 3.0).unwrap(), 0.776_886_237_785_82, 1e-12));
        assert!(close(carlson_rj(2.0, 3.0, 4.0, 5.0).unwrap(), 0.142_975_796_671_57, 1e-12));
        assert!(close(carlson_rd(0.0, 2.0, 1.0).unwrap(), 1.797_210_352_103_4, 1e-12));
        assert!(close(carlson_rd(2.0, 3.0, 4.0).unwrap(), 0.165_105_272_942_61, 1e-12));
    }

    #[test]
    fn carlson_matches_legendre_forms() {
        for &m in &[0.0, 0.2, 0.75, 0.99] {
            let k = carlson_rf(0.0, 1.0 - m, 1.0).unwrap();
            assert!(close(k, complete_elliptic_k(m).unwrap(), 1e-14));
            let e = k - m / 3.0 * carlson_rd(0.0, 1.0 - m, 1.0).unwrap();
            assert!(close(e, complete_elliptic_e(m).unwrap(), 1e-14));
        }
    }

    #[test]
    fn extreme_argument_spread() {
        // R_F(0, y, 1) ~ ln(16/y)/2 as y -> 0
        let y = 1e-40;
        let v = carlson_rf(0.0, y, 1.0).unwrap();
        assert!(close(v, 0.5 * (16.0 / y).ln(), 1e-14));
        // R_D(0, y, y) = 3 pi / (4 y^(3/2))
        let y: f64 = 1e-20;
        assert!(close(carlson_rd(0.0, y, y).unwrap(), 0.75 * PI / y.powf(1.5), 1e-13));
    }

    #[test]
    fn argument_checks() {
        assert!(carlson_rf(0.0, 0.0, 1.0).is_err());
        assert!(carlson_rf(-1.0, 1.0, 1.0).is_err());
        assert!(carlson_rj(1.0, 1.0, 1.0, 0.0).is_err());
        assert!(carlson_rd(1.0, 1.0, 0.0).is_err());
        assert!(carlson_rc(1.0, 0.0).is_err());
    }
}
