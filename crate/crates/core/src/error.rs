use thiserror::Error;

/// Errors produced by the library.
///
/// The variants fall into two families: input problems (`Domain`,
/// `Infeasible`, `NotConvex`) and numerical failures (`Bracket`,
/// `Evaluation`, `QuadratureNotConverged`, `Accuracy`, `OrbitNotConverged`).
/// [`Error::is_numerical`] tells them apart.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// The bracket handed to the root finder has no sign change.
    #[error("no sign change on [{lo}, {hi}]: f(lo) = {f_lo:e}, f(hi) = {f_hi:e}")]
    Bracket { lo: f64, hi: f64, f_lo: f64, f_hi: f64 },

    /// A function evaluation returned NaN or an infinity.
    #[error("non-finite evaluation at x = {x}")]
    Evaluation { x: f64 },

    /// Periodic quadrature ran out of refinements.
    #[error("quadrature did not converge: last two estimates {last} and {previous}")]
    QuadratureNotConverged { last: f64, previous: f64 },

    /// The requested quantity cannot be computed to the advertised accuracy.
    #[error("accuracy error: {0}")]
    Accuracy(String),

    /// A spectral inverse problem has no solution in the searched family.
    #[error("infeasible: {0}")]
    Infeasible(String),

    /// The support function does not describe a strictly convex domain.
    #[error("domain is not strictly convex: radius of curvature {min_radius:e} at psi = {at}")]
    NotConvex { min_radius: f64, at: f64 },

    /// Coordinate ascent stopped before reaching the gradient tolerance.
    #[error("periodic orbit did not converge: residual {residual:e} after {iterations} sweeps")]
    OrbitNotConverged { residual: f64, iterations: usize },
}

impl Error {
    /// True for failures of a numerical method rather than of the input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::Bracket { .. }
                | Error::Evaluation { .. }
                | Error::QuadratureNotConverged { .. }
                | Error::OrbitNotConverged { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
