use super::Tolerance;
use crate::error::{Error, Result};

const MAX_ITERATIONS: usize = 200;

/// Finds a zero of `g` on `[lo, hi]`.
///
/// Requires a sign change (`g(lo) * g(hi) <= 0`). Iterates secant steps,
/// upgraded to inverse quadratic interpolation when three distinct points
/// are available, and falls back to bisection whenever an interpolated step
/// leaves the bracket or fails to shrink it fast enough (Brent's scheme).
/// Stops when the bracket is narrower than `tol.abs + tol.rel * |x|`.
///
/// ```
/// use billiard_beta::numerics::{find_root, Tolerance};
///
/// let x = find_root(|x| (std::f64::consts::PI * x).sin() - 0.5, 0.0, 0.5, &Tolerance::default()).unwrap();
/// assert!((x - 1.0 / 6.0).abs() < 1e-13);
/// ```
pub fn find_root<G>(g: G, lo: f64, hi: f64, tol: &Tolerance) -> Result<f64>
where
    G: Fn(f64) -> f64,
{
    let eval = |x: f64| -> Result<f64> {
        let y = g(x);
        if y.is_finite() {
            Ok(y)
        } else {
            Err(Error::Evaluation { x })
        }
    };
    let (mut a, mut b) = (lo, hi);
    let (mut fa, mut fb) = (eval(a)?, eval(b)?);
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() {
        return Err(Error::Bracket { lo, hi, f_lo: fa, f_hi: fb });
    }

    // b is the best estimate, c the contrapoint keeping the sign change
    let (mut c, mut fc) = (a, fa);
    let mut d = b - a;
    let mut e = d;
    for _ in 0..MAX_ITERATIONS {
        if fb.signum() == fc.signum() {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let width = tol.abs + tol.rel * b.abs() + 2.0 * f64::EPSILON * b.abs();
        let half = 0.5 * (c - b);
        if half.abs() <= 0.5 * width || fb == 0.0 {
            return Ok(b);
        }
        if e.abs() >= 0.5 * width && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                // secant
                p = 2.0 * half * s;
                q = 1.0 - s;
            } else {
                // inverse quadratic interpolation
                let qa = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * half * qa * (qa - r) - (b - a) * (r - 1.0));
                q = (qa - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            } else {
                p = -p;
            }
            if 2.0 * p < (3.0 * half * q - (0.5 * width * q).abs()).min((e * q).abs()) {
                e = d;
                d = p / q;
            } else {
                d = half;
                e = d;
            }
        } else {
            d = half;
            e = d;
        }
        a = b;
        fa = fb;
        if d.abs() > 0.5 * width {
            b += d;
        } else {
            b += (0.5 * width).copysign(half);
        }
        fb = eval(b)?;
    }
    Ok(b)
}
