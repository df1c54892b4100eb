use billiard_beta::Error;
use serde::Serialize;
use serde_json::ser::Formatter;
use std::io::{self, Write};

/// Writes every float with 17 significant digits so identical runs give
/// identical bytes. Non-finite floats never reach it: serde_json turns them into `null`.
struct FixedFloats;

impl Formatter for FixedFloats {
    fn write_f64<W: ?Sized + Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        write!(writer, "{}", float(value))
    }

    fn write_f32<W: ?Sized + Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, f64::from(value))
    }
}

pub fn float(value: f64) -> String {
    format!("{value:.16e}")
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, FixedFloats);
    value.serialize(&mut ser).expect("serializing to memory cannot fail");
    String::from_utf8(out).expect("serde_json writes UTF-8")
}

/// Why a command failed, and the exit code that goes with it.
#[derive(Debug)]
pub enum Failure {
    /// Malformed input: unreadable files, bad JSON, unparsable flags.
    Input(String),
    Library(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Library(e)
    }
}

#[derive(Serialize)]
struct ErrorBody<'a> {
    kind: &'a str,
    message: String,
}

#[derive(Serialize)]
struct ErrorObject<'a> {
    error: ErrorBody<'a>,
}

impl Failure {
    pub fn exit_code(&self) -> u8 {
        match self {
            Failure::Input(_) => 1,
            Failure::Library(e) if e.is_numerical() => 3,
            Failure::Library(_) => 2,
        }
    }

    fn kind(&self) -> &'static str {
        match self {
            Failure::Input(_) => "input",
            Failure::Library(e) => match e {
                Error::Domain(_) => "domain",
                Error::Infeasible(_) => "infeasible",
                Error::NotConvex { .. } => "not_convex",
                Error::Accuracy(_) => "accuracy",
                Error::Bracket { .. } => "bracket",
                Error::Evaluation { .. } => "evaluation",
                Error::QuadratureNotConverged { .. } => "quadrature_not_converged",
                Error::OrbitNotConverged { .. } => "orbit_not_converged",
            },
        }
    }

    pub fn to_json(&self) -> String {
        let message = match self {
            Failure::Input(m) => m.clone(),
            Failure::Library(e) => e.to_string(),
        };
        to_json(&ErrorObject { error: ErrorBody { kind: self.kind(), message } })
    }
}
