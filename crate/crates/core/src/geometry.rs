//! Strictly convex domains described by their support functions.
//!
//! `h(psi)` is the distance from the origin to the tangent line whose
//! outward normal makes angle `psi` with the x-axis. Everything in this
//! crate works in that angle: boundary points, curvature and perimeter are
//! all read off `h` and its derivatives.

use crate::error::{Error, Result};
use crate::numerics::{integrate_periodic, maximize_on_interval, Tolerance};
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

/// Number of samples used by [`validate_convex`].
pub const CONVEXITY_GRID: usize = 4096;

/// A point of the plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub fn distance(self, other: Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

/// Value and first two angular derivatives of a support function.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Support {
    pub h: f64,
    pub dh: f64,
    pub d2h: f64,
}

impl Support {
    /// `h + h''`, the radius of curvature at the boundary point with normal angle `psi`.
    pub fn radius_of_curvature(&self) -> f64 {
        self.h + self.d2h
    }
}

/// Centered ellipse `x²/a² + y²/b² = 1` with `a >= b > 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ellipse {
    a: f64,
    b: f64,
}

impl Ellipse {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if !(b > 0.0) || !a.is_finite() || !(a >= b) {
            return Err(Error::Domain(format!(
                "ellipse semi-axes must satisfy a >= b > 0, got a = {a}, b = {b}"
            )));
        }
        Ok(Ellipse { a, b })
    }

    pub fn circle(radius: f64) -> Result<Self> {
        Ellipse::new(radius, radius)
    }

    /// The ellipse with major semi-axis `a` and eccentricity `e`.
    pub fn from_eccentricity(a: f64, e: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&e) {
            return Err(Error::Domain(format!("eccentricity {e} must lie in [0, 1)")));
        }
        let b = a * ((1.0 - e) * (1.0 + e)).sqrt();
        Ellipse::new(a, b.min(a))
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    /// `sqrt(1 - b²/a²)`, evaluated without cancellation for nearly round ellipses.
    pub fn eccentricity(&self) -> f64 {
        ((self.a - self.b) * (self.a + self.b)).sqrt() / self.a
    }

    pub fn is_circle(&self) -> bool {
        self.a == self.b
    }

    pub fn scaled(&self, s: f64) -> Result<Self> {
        Ellipse::new(s * self.a, s * self.b)
    }

    /// Perimeter from the AGM, `4 a E(e²)`.
    pub fn perimeter_agm(&self) -> f64 {
        let e = self.eccentricity();
        4.0 * self.a * crate::numerics::complete_elliptic_e(e * e).expect("e < 1 for a valid ellipse")
    }

    pub fn support(&self, psi: f64) -> Support {
        let (s, c) = psi.sin_cos();
        let (a2, b2) = (self.a * self.a, self.b * self.b);
        let g = a2 * c * c + b2 * s * s;
        let h = g.sqrt();
        // g' = (b² - a²) sin 2psi,  g'' = 2 (b² - a²) cos 2psi
        let dg = (b2 - a2) * 2.0 * s * c;
        let d2g = 2.0 * (b2 - a2) * (c * c - s * s);
        let dh = dg / (2.0 * h);
        let d2h = d2g / (2.0 * h) - dg * dg / (4.0 * h * g);
        Support { h, dh, d2h }
    }
}

/// One Fourier mode `cos * cos(k psi) + sin * sin(k psi)` of a support function.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Harmonic {
    pub k: u32,
    #[serde(default)]
    pub cos: f64,
    #[serde(default)]
    pub sin: f64,
}

/// Domain whose support function is the trigonometric polynomial
/// `a0 + sum (c_k cos k psi + s_k sin k psi)` with `k >= 2`.
///
/// First harmonics are rejected: they only translate the domain. Strict
/// convexity is not checked here; see [`validate_convex`].
#[derive(Debug, Clone, PartialEq)]
pub struct SupportDomain {
    a0: f64,
    harmonics: Vec<Harmonic>,
}

impl SupportDomain {
    pub fn new(a0: f64, harmonics: Vec<Harmonic>) -> Result<Self> {
        if !(a0 > 0.0) || !a0.is_finite() {
            return Err(Error::Domain(format!("mean support value a0 = {a0} must be positive")));
        }
        for hm in &harmonics {
            if hm.k < 2 {
                return Err(Error::Domain(format!(
                    "harmonic k = {} not allowed: k = 0 is a0 and k = 1 is a translation",
                    hm.k
                )));
            }
            if !hm.cos.is_finite() || !hm.sin.is_finite() {
                return Err(Error::Domain(format!("harmonic k = {} has non-finite coefficients", hm.k)));
            }
        }
        Ok(SupportDomain { a0, harmonics })
    }

    pub fn disk(radius: f64) -> Result<Self> {
        SupportDomain::new(radius, Vec::new())
    }

    pub fn a0(&self) -> f64 {
        self.a0
    }

    pub fn harmonics(&self) -> &[Harmonic] {
        &self.harmonics
    }

    /// Lower bound `a0 - sum (k² - 1) |(c_k, s_k)|` on the radius of curvature.
    pub fn curvature_lower_bound(&self) -> f64 {
        self.a0
            - self
                .harmonics
                .iter()
                .map(|hm| (f64::from(hm.k).powi(2) - 1.0) * hm.cos.hypot(hm.sin))
                .sum::<f64>()
    }

    pub fn support(&self, psi: f64) -> Support {
        let mut out = Support { h: self.a0, dh: 0.0, d2h: 0.0 };
        for hm in &self.harmonics {
            let k = f64::from(hm.k);
            let (s, c) = (k * psi).sin_cos();
            let mode = hm.cos * c + hm.sin * s;
            out.h += mode;
            out.dh += k * (hm.sin * c - hm.cos * s);
            out.d2h -= k * k * mode;
        }
        out
    }
}

/// Either kind of domain the library understands.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "DomainSpec", into = "DomainSpec")]
pub enum Domain {
    Ellipse(Ellipse),
    Support(SupportDomain),
}

impl Domain {
    pub fn support(&self, psi: f64) -> Support {
        match self {
            Domain::Ellipse(e) => e.support(psi),
            Domain::Support(d) => d.support(psi),
        }
    }

    pub fn as_ellipse(&self) -> Option<&Ellipse> {
        match self {
            Domain::Ellipse(e) => Some(e),
            Domain::Support(_) => None,
        }
    }

    /// True if the domain is a disk.
    pub fn is_disk(&self) -> bool {
        match self {
            Domain::Ellipse(e) => e.is_circle(),
            Domain::Support(d) => d.harmonics.iter().all(|h| h.cos == 0.0 && h.sin == 0.0),
        }
    }
}

impl From<Ellipse> for Domain {
    fn from(e: Ellipse) -> Self {
        Domain::Ellipse(e)
    }
}

impl From<SupportDomain> for Domain {
    fn from(d: SupportDomain) -> Self {
        Domain::Support(d)
    }
}

/// JSON form of a [`Domain`]:
///
/// ```json
/// {"type": "ellipse", "a": 2.0, "b": 1.0}
/// {"type": "support_fourier", "a0": 1.0, "harmonics": [{"k": 2, "cos": 0.01, "sin": 0.0}]}
/// ```
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum DomainSpec {
    Ellipse { a: f64, b: f64 },
    SupportFourier {
        a0: f64,
        #[serde(default)]
        harmonics: Vec<Harmonic>,
    },
}

impl TryFrom<DomainSpec> for Domain {
    type Error = Error;

    fn try_from(spec: DomainSpec) -> Result<Self> {
        match spec {
            DomainSpec::Ellipse { a, b } => Ok(Domain::Ellipse(Ellipse::new(a, b)?)),
            DomainSpec::SupportFourier { a0, harmonics } => {
                Ok(Domain::Support(SupportDomain::new(a0, harmonics)?))
            }
        }
    }
}

impl From<Domain> for DomainSpec {
    fn from(d: Domain) -> Self {
        match d {
            Domain::Ellipse(e) => DomainSpec::Ellipse { a: e.a, b: e.b },
            Domain::Support(s) => DomainSpec::SupportFourier { a0: s.a0, harmonics: s.harmonics },
        }
    }
}

/// `(h, h', h'')` at `psi`.
pub fn support_eval(domain: &Domain, psi: f64) -> Support {
    domain.support(psi)
}

/// Boundary point whose outward normal makes angle `psi` with the x-axis:
/// `h n(psi) + h' t(psi)`.
pub fn boundary_point(domain: &Domain, psi: f64) -> Point {
    let s = domain.support(psi);
    let (sn, cs) = psi.sin_cos();
    Point { x: s.h * cs - s.dh * sn, y: s.h * sn + s.dh * cs }
}

/// Perimeter as the integral of the support function over a full turn.
pub fn perimeter(domain: &Domain, tol: &Tolerance) -> Result<f64> {
    Ok(integrate_periodic(|psi| domain.support(psi).h, TAU, tol)?.value)
}

/// Outcome of [`validate_convex`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConvexityReport {
    pub convex: bool,
    pub min_radius: f64,
    pub at: f64,
    /// The cheap coefficient bound alone already proves convexity.
    pub certified: bool,
}

impl ConvexityReport {
    pub fn into_result(self) -> Result<()> {
        if self.convex {
            Ok(())
        } else {
            Err(Error::NotConvex { min_radius: self.min_radius, at: self.at })
        }
    }
}

/// Samples the radius of curvature and refines the smallest sample.
pub fn validate_convex(domain: &Domain) -> ConvexityReport {
    let (certified, sampled): (bool, &dyn Fn(f64) -> f64) = match domain {
        Domain::Ellipse(e) => {
            // minimum b²/a sits at the ends of the major axis
            let e = *e;
            return ConvexityReport {
                convex: true,
                min_radius: e.b * e.b / e.a,
                at: 0.0,
                certified: true,
            };
        }
        Domain::Support(d) => (d.curvature_lower_bound() > 0.0, &|psi| d.support(psi).radius_of_curvature()),
    };
    let step = TAU / CONVEXITY_GRID as f64;
    let (mut best_i, mut best) = (0, f64::INFINITY);
    for i in 0..CONVEXITY_GRID {
        let r = sampled(i as f64 * step);
        if r < best {
            best = r;
            best_i = i;
        }
    }
    let center = best_i as f64 * step;
    let (at, neg_min) = maximize_on_interval(|psi| -sampled(psi), center - step, center + step, 1e-12);
    let (min_radius, at) = if -neg_min < best { (-neg_min, at) } else { (best, center) };
    ConvexityReport { convex: min_radius > 0.0, min_radius, at: at.rem_euclid(TAU), certified }
}
