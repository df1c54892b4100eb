//! Maximal-perimeter periodic billiard orbits and `β(p/q) = −L_{p/q}/q`.
//!
//! A `(p, q)` orbit is stored by the normal angles `ψ_0 < … < ψ_{q−1}` of
//! its bounce points, lifted so that `ψ_q = ψ_0 + 2πp`. The perimeter is
//! maximized one angle at a time; each update keeps its neighbours fixed,
//! so the perimeter never decreases.

use crate::elliptic::InvariantCurve;
use crate::error::{Error, Result};
use crate::geometry::{boundary_point, validate_convex, Domain, Ellipse, Point};
use crate::numerics::{find_root, maximize_on_interval, Tolerance};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use nalgebra::{DMatrix, DVector};
use std::f64::consts::TAU;

/// Stopping rule and restart policy of [`maximize_orbit`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OrbitConfig {
    /// Maximum number of full sweeps over the bounce points.
    pub max_iters: usize,
    /// Converged once every partial derivative is below `grad_tol * perimeter`.
    pub grad_tol: f64,
    /// Random phase shifts tried besides the equally spaced start.
    pub n_restarts: usize,
    pub seed: u64,
}

impl Default for OrbitConfig {
    fn default() -> Self {
        OrbitConfig { max_iters: 20_000, grad_tol: 1e-12, n_restarts: 2, seed: 0 }
    }
}

impl OrbitConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.grad_tol > 0.0) || !self.grad_tol.is_finite() {
            return Err(Error::Domain(format!("grad_tol {} must be positive", self.grad_tol)));
        }
        if self.max_iters == 0 {
            return Err(Error::Domain("max_iters must be positive".into()));
        }
        Ok(())
    }
}

/// A `(p, q)`-periodic billiard trajectory.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PeriodicOrbit {
    pub p: u32,
    pub q: u32,
    /// Lifted normal angles, strictly increasing, total winding `2πp`.
    pub angles: Vec<f64>,
    pub perimeter: f64,
    /// Largest mismatch between angles of incidence and reflection.
    pub residual: f64,
    /// Largest partial derivative of the perimeter at exit.
    pub gradient: f64,
    pub sweeps: usize,
    pub converged: bool,
}

impl PeriodicOrbit {
    pub fn beta(&self) -> f64 {
        -self.perimeter / f64::from(self.q)
    }
}

pub(crate) fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

fn check_rotation(p: u32, q: u32) -> Result<()> {
    if q < 2 || p == 0 || 2 * u64::from(p) > u64::from(q) || gcd(p.into(), q.into()) != 1 {
        return Err(Error::Domain(format!(
            "rotation number {p}/{q} must be reduced with q >= 2 and 0 < p/q <= 1/2"
        )));
    }
    Ok(())
}

/// Relative size of rounding noise in a sum of two chord lengths. Steps
/// that lose less than this are accepted, so that the exact stationary
/// point can replace a golden-section estimate of equal computed value.
const ROUNDING: f64 = 4.0 * f64::EPSILON;

struct Orbit<'a> {
    domain: &'a Domain,
    winding: f64,
    angles: Vec<f64>,
    points: Vec<Point>,
}

impl<'a> Orbit<'a> {
    fn new(domain: &'a Domain, p: u32, angles: Vec<f64>) -> Self {
        let points = angles.iter().map(|&psi| boundary_point(domain, psi)).collect();
        Orbit { domain, winding: TAU * f64::from(p), angles, points }
    }

    fn len(&self) -> usize {
        self.angles.len()
    }

    /// Lifted angles and points of the neighbours of bounce `i`.
    fn neighbours(&self, i: usize) -> ((f64, Point), (f64, Point)) {
        let q = self.len();
        let prev = if i == 0 {
            (self.angles[q - 1] - self.winding, self.points[q - 1])
        } else {
            (self.angles[i - 1], self.points[i - 1])
        };
        let next = if i + 1 == q {
            (self.angles[0] + self.winding, self.points[0])
        } else {
            (self.angles[i + 1], self.points[i + 1])
        };
        (prev, next)
    }

    fn perimeter(&self) -> f64 {
        let q = self.len();
        (0..q).map(|i| self.points[i].distance(self.points[(i + 1) % q])).sum()
    }

    /// `∂F/∂ψ_i = ϱ ⟨t, u_in − u_out⟩` and the angle mismatch at bounce `i`.
    fn local_condition(&self, i: usize) -> (f64, f64) {
        let ((_, a), (_, b)) = self.neighbours(i);
        reflection(self.domain, self.angles[i], a, b)
    }

    fn gradient(&self) -> DVector<f64> {
        DVector::from_iterator(self.len(), (0..self.len()).map(|i| self.local_condition(i).0))
    }

    fn set_angles(&mut self, angles: &[f64]) {
        for (i, &psi) in angles.iter().enumerate() {
            self.angles[i] = psi;
            self.points[i] = boundary_point(self.domain, psi);
        }
    }

    /// One Newton step on the stationarity equations with the Hessian
    /// eigenvalues replaced by their absolute values, so the step always
    /// points uphill. The Hessian comes from central differences of the
    /// analytic gradient. The step is halved until the perimeter grows, or
    /// holds within rounding while the gradient shrinks.
    fn newton(&mut self) -> bool {
        let q = self.len();
        let base = self.angles.clone();
        let g = self.gradient();
        let h = 1e-6;
        let mut neg_hessian = DMatrix::zeros(q, q);
        let mut shifted = base.clone();
        for j in 0..q {
            shifted[j] = base[j] + h;
            self.set_angles(&shifted);
            let plus = self.gradient();
            shifted[j] = base[j] - h;
            self.set_angles(&shifted);
            let minus = self.gradient();
            shifted[j] = base[j];
            neg_hessian.set_column(j, &((minus - plus) / (2.0 * h)));
        }
        self.set_angles(&base);
        let eig = ((&neg_hessian + neg_hessian.transpose()) * 0.5).symmetric_eigen();
        let floor = 1e-8 * eig.eigenvalues.amax();
        if !(floor > 0.0) {
            return false;
        }
        let coords = eig.eigenvectors.transpose() * &g;
        let scaled = DVector::from_iterator(
            q,
            coords.iter().zip(eig.eigenvalues.iter()).map(|(c, l)| c / l.abs().max(floor)),
        );
        let step = &eig.eigenvectors * scaled;
        let gap = (0..q)
            .map(|i| self.neighbours(i).1 .0 - base[i])
            .fold(f64::INFINITY, f64::min);
        let mut shrink = (0.25 * gap / step.amax()).min(1.0);
        let (f0, g0) = (self.perimeter(), g.amax());
        for _ in 0..20 {
            let trial: Vec<f64> = base.iter().zip(step.iter()).map(|(x, d)| x + shrink * d).collect();
            self.set_angles(&trial);
            let f = self.perimeter();
            if f > f0 + ROUNDING * f0 || (f >= f0 - ROUNDING * f0 && self.gradient().amax() < g0) {
                return true;
            }
            shrink *= 0.5;
        }
        self.set_angles(&base);
        false
    }

    fn gradient_norm(&self) -> (f64, f64) {
        (0..self.len()).map(|i| self.local_condition(i)).fold((0.0, 0.0), |(g, r), (gi, ri)| {
            (g.max(gi.abs()), r.max(ri))
        })
    }

    /// Maximizes the two chords through bounce `i`. Returns the gain.
    fn update(&mut self, i: usize) -> f64 {
        let ((lo, a), (hi, b)) = self.neighbours(i);
        let domain = self.domain;
        let local = |x: f64| {
            let p = boundary_point(domain, x);
            p.distance(a) + p.distance(b)
        };
        let slope = |x: f64| reflection(domain, x, a, b).0;
        let current = local(self.angles[i]);
        let width = hi - lo;
        let (mut x, mut fx) = maximize_on_interval(local, lo, hi, 1e-10 * width);
        let h = 1e-7 * width;
        let (l, r) = ((x - h).max(lo + 0.5 * h), (x + h).min(hi - 0.5 * h));
        if slope(l) > 0.0 && slope(r) < 0.0 {
            let tight = Tolerance::new(16.0 * f64::EPSILON, 0.0, 1).expect("valid tolerance");
            if let Ok(polished) = find_root(slope, l, r, &tight) {
                let fp = local(polished);
                if fp >= fx - ROUNDING * fx {
                    (x, fx) = (polished, fp);
                }
            }
        }
        if fx >= current - ROUNDING * current && x > lo && x < hi {
            self.angles[i] = x;
            self.points[i] = boundary_point(domain, x);
            fx - current
        } else {
            0.0
        }
    }
}

/// Partial derivative of `|X(x) − a| + |b − X(x)|` and the difference of
/// the angles the two chords make with the tangent at `X(x)`.
fn reflection(domain: &Domain, x: f64, a: Point, b: Point) -> (f64, f64) {
    let s = domain.support(x);
    let p = boundary_point(domain, x);
    let (sn, cs) = x.sin_cos();
    let (t, n) = ((-sn, cs), (cs, sn));
    let unit = |u: (f64, f64)| {
        let r = u.0.hypot(u.1);
        (u.0 / r, u.1 / r)
    };
    let u_in = unit((p.x - a.x, p.y - a.y));
    let u_out = unit((b.x - p.x, b.y - p.y));
    let dot = |u: (f64, f64), v: (f64, f64)| u.0 * v.0 + u.1 * v.1;
    let slope = s.radius_of_curvature() * (dot(t, u_in) - dot(t, u_out));
    let angle_in = dot(n, u_in).atan2(dot(t, u_in));
    let angle_out = (-dot(n, u_out)).atan2(dot(t, u_out));
    (slope, (angle_in - angle_out).abs())
}

fn ascend(domain: &Domain, p: u32, q: u32, phase: f64, cfg: &OrbitConfig) -> PeriodicOrbit {
    let step = TAU * f64::from(p) / f64::from(q);
    let angles = (0..q).map(|i| phase + step * f64::from(i)).collect();
    let mut orbit = Orbit::new(domain, p, angles);
    let mut perimeter = orbit.perimeter();
    let mut sweeps = 0;
    let (mut gradient, mut residual) = orbit.gradient_norm();
    while gradient > cfg.grad_tol * perimeter && sweeps < cfg.max_iters {
        for i in 0..orbit.len() {
            orbit.update(i);
        }
        if orbit.gradient_norm().0 > cfg.grad_tol * perimeter {
            orbit.newton();
        }
        let updated = orbit.perimeter();
        perimeter = updated;
        sweeps += 1;
        (gradient, residual) = orbit.gradient_norm();
    }
    PeriodicOrbit {
        p,
        q,
        perimeter: orbit.perimeter(),
        angles: orbit.angles,
        residual,
        gradient,
        sweeps,
        converged: gradient <= cfg.grad_tol * perimeter,
    }
}

/// The `(p, q)` orbit of largest perimeter found from the equally spaced
/// start and `cfg.n_restarts` random phase shifts of it.
///
/// Non-convergence is reported through [`PeriodicOrbit::converged`].
///
/// ```
/// use billiard_beta::geometry::{Domain, SupportDomain};
/// use billiard_beta::variational::{maximize_orbit, OrbitConfig};
///
/// let disk: Domain = SupportDomain::disk(1.0).unwrap().into();
/// let orbit = maximize_orbit(&disk, 1, 3, &OrbitConfig::default()).unwrap();
/// assert!((orbit.perimeter - 3f64.sqrt() * 3.0).abs() < 1e-12);
/// ```
pub fn maximize_orbit(domain: &Domain, p: u32, q: u32, cfg: &OrbitConfig) -> Result<PeriodicOrbit> {
    check_rotation(p, q)?;
    cfg.validate()?;
    validate_convex(domain).into_result()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut phases = vec![0.0];
    phases.extend((0..cfg.n_restarts).map(|_| rng.random_range(0.0..TAU / f64::from(q))));
    let orbits: Vec<PeriodicOrbit> = phases.par_iter().map(|&phase| ascend(domain, p, q, phase, cfg)).collect();
    let mut best = 0;
    for (i, o) in orbits.iter().enumerate() {
        if o.perimeter > orbits[best].perimeter {
            best = i;
        }
    }
    Ok(orbits.into_iter().nth(best).expect("at least one start"))
}

/// `β(p/q) = −L_{p/q}/q` from a converged maximal orbit.
pub fn beta_rational(domain: &Domain, p: u32, q: u32, cfg: &OrbitConfig) -> Result<f64> {
    let orbit = maximize_orbit(domain, p, q, cfg)?;
    if !orbit.converged {
        return Err(Error::OrbitNotConverged { residual: orbit.gradient, iterations: orbit.sweeps });
    }
    Ok(orbit.beta())
}

/// Closure statistics of the orbits tangent to the caustic of rotation number `p/q`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PonceletSpread {
    pub lambda: f64,
    pub min_perimeter: f64,
    pub max_perimeter: f64,
    /// `max_perimeter − min_perimeter`
    pub spread: f64,
    /// Largest `|ψ_q − ψ_0 − 2πp|` over the starts.
    pub residual: f64,
}

/// Follows the caustic of rotation number `p/q` from `n_starts` equally
/// spaced base angles for `q` bounces each.
pub fn poncelet_spread(
    ellipse: &Ellipse,
    p: u32,
    q: u32,
    n_starts: usize,
    tol: &Tolerance,
) -> Result<PonceletSpread> {
    check_rotation(p, q)?;
    if 2 * p == q {
        return Err(Error::Domain("the caustic degenerates at rotation number 1/2".into()));
    }
    if n_starts == 0 {
        return Err(Error::Domain("n_starts must be positive".into()));
    }
    let curve: InvariantCurve =
        crate::elliptic::curve_for_rotation(ellipse, f64::from(p) / f64::from(q), tol)?;
    let domain = Domain::Ellipse(*ellipse);
    let inner = Tolerance::new(16.0 * f64::EPSILON, 0.0, 1).expect("valid tolerance");
    let runs = (0..n_starts)
        .into_par_iter()
        .map(|j| -> Result<(f64, f64)> {
            let psi0 = 0.1 + TAU * j as f64 / n_starts as f64;
            let mut psi = psi0;
            let mut perimeter = 0.0;
            let mut point = boundary_point(&domain, psi);
            for _ in 0..q {
                psi = curve.advance(psi, &inner)?;
                let next = boundary_point(&domain, psi);
                perimeter += point.distance(next);
                point = next;
            }
            Ok((perimeter, (psi - psi0 - TAU * f64::from(p)).abs()))
        })
        .collect::<Result<Vec<_>>>()?;
    let min = runs.iter().map(|r| r.0).fold(f64::INFINITY, f64::min);
    let max = runs.iter().map(|r| r.0).fold(f64::NEG_INFINITY, f64::max);
    let residual = runs.iter().map(|r| r.1).fold(0.0, f64::max);
    Ok(PonceletSpread {
        lambda: curve.caustic().lambda(),
        min_perimeter: min,
        max_perimeter: max,
        spread: max - min,
        residual,
    })
}
