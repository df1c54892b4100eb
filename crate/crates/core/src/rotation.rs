use crate::error::{Error, Result};
use crate::variational::gcd;
use serde::Serialize;
use std::fmt;
use std::str::FromStr;

/// A rotation number in `(0, 1/2]`, either an exact fraction or a real value.
///
/// Fractions are what the variational method needs; the caustic method
/// accepts either.
///
/// ```
/// use billiard_beta::RotationNumber;
///
/// let r: RotationNumber = "2/5".parse().unwrap();
/// assert_eq!(r, RotationNumber::Rational { p: 2, q: 5 });
/// assert_eq!(r.value(), 0.4);
/// assert!("4/10".parse::<RotationNumber>().is_err());
/// assert!("0.3".parse::<RotationNumber>().unwrap().as_fraction().is_none());
/// ```
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(untagged)]
pub enum RotationNumber {
    Rational { p: u32, q: u32 },
    Real(f64),
}

impl RotationNumber {
    pub fn rational(p: u32, q: u32) -> Result<Self> {
        if q == 0 || p == 0 || 2 * u64::from(p) > u64::from(q) {
            return Err(Error::Domain(format!("rotation number {p}/{q} outside (0, 1/2]")));
        }
        if gcd(p.into(), q.into()) != 1 {
            return Err(Error::Domain(format!("fraction {p}/{q} is not in lowest terms")));
        }
        Ok(RotationNumber::Rational { p, q })
    }

    pub fn real(rho: f64) -> Result<Self> {
        if !(rho > 0.0 && rho <= 0.5) {
            return Err(Error::Domain(format!("rotation number {rho} outside (0, 1/2]")));
        }
        Ok(RotationNumber::Real(rho))
    }

    pub fn value(&self) -> f64 {
        match *self {
            RotationNumber::Rational { p, q } => f64::from(p) / f64::from(q),
            RotationNumber::Real(rho) => rho,
        }
    }

    pub fn as_fraction(&self) -> Option<(u32, u32)> {
        match *self {
            RotationNumber::Rational { p, q } => Some((p, q)),
            RotationNumber::Real(_) => None,
        }
    }
}

impl FromStr for RotationNumber {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        match s.split_once('/') {
            Some((p, q)) => {
                let parse = |t: &str| {
                    t.trim()
                        .parse::<u32>()
                        .map_err(|_| Error::Domain(format!("cannot parse fraction {s:?}")))
                };
                RotationNumber::rational(parse(p)?, parse(q)?)
            }
            None => {
                let rho = s
                    .parse::<f64>()
                    .map_err(|_| Error::Domain(format!("cannot parse rotation number {s:?}")))?;
                RotationNumber::real(rho)
            }
        }
    }
}

impl fmt::Display for RotationNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RotationNumber::Rational { p, q } => write!(f, "{p}/{q}"),
            RotationNumber::Real(rho) => write!(f, "{rho}"),
        }
    }
}
