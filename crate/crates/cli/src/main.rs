//! `billiard-beta`: command-line access to the beta function of convex billiards.

mod output;

use billiard_beta::classify::{classify_rotation, ClassifyParams, GutkinConvention};
use billiard_beta::elliptic::{
    beta_caustic, beta_caustic_report, beta_derivative, caustic_data, curve_diagnostics,
    lambda_for_rotation, rotation_number, FamilyPoint,
};
use billiard_beta::geometry::{Domain, DomainSpec, Ellipse};
use billiard_beta::numerics::Tolerance;
use billiard_beta::rigidity::{
    bbs_slack, recover_two_values, recover_value_perimeter, scan_family, BetaMethod, FamilyKind,
    FamilySpec,
};
use billiard_beta::variational::{beta_rational, OrbitConfig};
use billiard_beta::RotationNumber;
use clap::{Args, Parser, Subcommand, ValueEnum};
use output::{float, to_json, Failure};
use serde::Serialize;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser, Debug)]
#[command(name = "billiard-beta", version, about = "Mather's beta function for convex billiards")]
struct Cli {
    /// Relative tolerance for quadrature and root finding.
    #[arg(long, global = true, value_name = "REL")]
    tol: Option<f64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Beta value of a domain at one rotation number.
    Beta {
        #[arg(long)]
        domain: PathBuf,
        #[arg(long, value_parser = parse_rho)]
        rho: Rho,
        /// Defaults to caustic for ellipses and variational otherwise.
        #[arg(long, value_enum)]
        method: Option<Method>,
        #[command(flatten)]
        orbit: OrbitArgs,
    },
    /// Rotation number of the caustic with parameter lambda.
    Rotation {
        #[arg(long, value_parser = parse_ellipse)]
        ellipse: Ellipse,
        #[arg(long)]
        lambda: f64,
    },
    /// Caustic carrying a given rotation number.
    Caustic {
        #[arg(long, value_parser = parse_ellipse)]
        ellipse: Ellipse,
        #[arg(long, value_parser = parse_rho)]
        rho: Rho,
    },
    /// Beta along a one-parameter family of ellipses, as CSV.
    Scan(ScanArgs),
    /// Ellipse from two beta values, or from one beta value and the perimeter.
    Recover(RecoverArgs),
    /// Distance of beta below the disk of equal perimeter.
    Bbs {
        #[arg(long)]
        domain: PathBuf,
        #[arg(long, value_parser = parse_rho)]
        rho: Rho,
        #[arg(long, value_enum)]
        method: Option<Method>,
        #[command(flatten)]
        orbit: OrbitArgs,
    },
    /// First variation of beta along a family of ellipses.
    Derivative {
        #[arg(long, value_parser = parse_ellipse)]
        ellipse: Ellipse,
        #[arg(long, allow_hyphen_values = true)]
        da: f64,
        #[arg(long, allow_hyphen_values = true)]
        db: f64,
        #[arg(long, value_parser = parse_rho)]
        rho: Rho,
    },
    /// Rationality, Gutkin and Diophantine status of a rotation number.
    Classify {
        #[arg(long, value_parser = parse_rho)]
        rho: Rho,
        #[arg(long, default_value_t = 0.05)]
        nu: f64,
        #[arg(long, default_value_t = 3.0)]
        sigma: f64,
        /// Largest n in the Gutkin check.
        #[arg(long, default_value_t = 20)]
        nmax: u32,
        /// Largest n in the Diophantine check.
        #[arg(long = "N", default_value_t = 100_000)]
        n_check: u64,
        #[arg(long, default_value_t = 1000)]
        qmax: u32,
        /// Compare tan(n rho) literally instead of tan(n pi rho).
        #[arg(long)]
        literal: bool,
    },
    /// Mean angle and constant-angle defect of an invariant curve.
    Diagnose {
        #[arg(long, value_parser = parse_ellipse)]
        ellipse: Ellipse,
        #[arg(long, value_parser = parse_rho)]
        rho: Rho,
    },
}

#[derive(Args, Debug)]
struct OrbitArgs {
    /// Random phase restarts of the orbit search.
    #[arg(long, default_value_t = 2)]
    restarts: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

impl OrbitArgs {
    fn config(&self) -> OrbitConfig {
        OrbitConfig { n_restarts: self.restarts, seed: self.seed, ..OrbitConfig::default() }
    }
}

#[derive(Args, Debug)]
struct ScanArgs {
    #[arg(long, value_enum)]
    mode: ScanMode,
    #[arg(long, required_if_eq("mode", "isobeta"))]
    rho0: Option<f64>,
    #[arg(long, allow_hyphen_values = true, required_if_eq("mode", "isobeta"))]
    beta0: Option<f64>,
    #[arg(long, required_if_eq("mode", "perimeter"))]
    perimeter: Option<f64>,
    #[arg(long)]
    probe: f64,
    #[arg(long)]
    emin: f64,
    #[arg(long)]
    emax: f64,
    #[arg(long)]
    steps: usize,
}

#[derive(Args, Debug)]
struct RecoverArgs {
    #[arg(long, requires_all = ["beta0", "rho1", "beta1"], conflicts_with_all = ["rho", "beta", "perimeter"])]
    rho0: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    beta0: Option<f64>,
    #[arg(long)]
    rho1: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    beta1: Option<f64>,
    #[arg(long, requires_all = ["beta", "perimeter"])]
    rho: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    beta: Option<f64>,
    #[arg(long)]
    perimeter: Option<f64>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Method {
    Caustic,
    Variational,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum ScanMode {
    Isobeta,
    Perimeter,
}

/// A syntactically valid rotation number; its range is checked later.
#[derive(Clone, Copy, Debug)]
enum Rho {
    Fraction(u32, u32),
    Real(f64),
}

impl Rho {
    fn validate(self) -> Result<RotationNumber, Failure> {
        Ok(match self {
            Rho::Fraction(p, q) => RotationNumber::rational(p, q)?,
            Rho::Real(x) => RotationNumber::real(x)?,
        })
    }
}

fn parse_rho(s: &str) -> Result<Rho, String> {
    match s.split_once('/') {
        Some((p, q)) => {
            let p = p.trim().parse().map_err(|_| format!("bad numerator in {s:?}"))?;
            let q = q.trim().parse().map_err(|_| format!("bad denominator in {s:?}"))?;
            Ok(Rho::Fraction(p, q))
        }
        None => s.trim().parse().map(Rho::Real).map_err(|_| format!("{s:?} is neither p/q nor a number")),
    }
}

fn parse_ellipse(s: &str) -> Result<Ellipse, String> {
    let (a, b) = s.split_once(',').ok_or_else(|| format!("expected a,b but got {s:?}"))?;
    let a: f64 = a.trim().parse().map_err(|_| format!("bad semi-axis {a:?}"))?;
    let b: f64 = b.trim().parse().map_err(|_| format!("bad semi-axis {b:?}"))?;
    Ellipse::new(a, b).map_err(|e| e.to_string())
}

fn read_domain(path: &PathBuf) -> Result<Domain, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::Input(format!("cannot read {}: {e}", path.display())))?;
    let spec: DomainSpec = serde_json::from_str(&text)
        .map_err(|e| Failure::Input(format!("bad domain file {}: {e}", path.display())))?;
    Ok(Domain::try_from(spec)?)
}

fn pick_method(domain: &Domain, requested: Option<Method>) -> BetaMethod {
    match requested {
        Some(Method::Caustic) => BetaMethod::Caustic,
        Some(Method::Variational) => BetaMethod::Variational,
        None if domain.as_ellipse().is_some() => BetaMethod::Caustic,
        None => BetaMethod::Variational,
    }
}

#[derive(Serialize)]
struct BetaOut {
    beta: f64,
    method: BetaMethod,
    rho: f64,
    warnings: Vec<String>,
}

#[derive(Serialize)]
struct RhoOut {
    rho: f64,
}

#[derive(Serialize)]
struct CausticOut {
    lambda: f64,
    #[serde(rename = "J")]
    j: f64,
    k2: f64,
}

#[derive(Serialize)]
struct FdCheck {
    step: f64,
    dbeta: f64,
    rel_diff: f64,
}

#[derive(Serialize)]
struct DerivativeOut {
    dbeta: f64,
    raw_integral: f64,
    constant: f64,
    fd_check: FdCheck,
}

/// Central-difference step of the derivative cross-check.
const FD_STEP: f64 = 1e-4;

fn run(cli: Cli, out: &mut impl Write, err: &mut impl Write) -> Result<(), Failure> {
    let tol = match cli.tol {
        Some(rel) => Tolerance::default().with_rel(rel)?,
        None => Tolerance::default(),
    };
    let line = |out: &mut dyn Write, s: String| writeln!(out, "{s}").map_err(|e| Failure::Input(e.to_string()));
    match cli.command {
        Command::Beta { domain, rho, method, orbit } => {
            let domain = read_domain(&domain)?;
            let rho = rho.validate()?;
            let method = pick_method(&domain, method);
            let (beta, warnings) = match method {
                BetaMethod::Caustic => {
                    let ellipse = domain.as_ellipse().ok_or_else(|| {
                        billiard_beta::Error::Domain("the caustic method needs an ellipse".into())
                    })?;
                    let r = beta_caustic_report(ellipse, rho.value(), &tol)?;
                    (r.beta, r.warnings)
                }
                BetaMethod::Variational => {
                    let (p, q) = rho.as_fraction().ok_or_else(|| {
                        billiard_beta::Error::Domain("the variational method needs a rotation number p/q".into())
                    })?;
                    (beta_rational(&domain, p, q, &orbit.config())?, Vec::new())
                }
            };
            line(out, to_json(&BetaOut { beta, method, rho: rho.value(), warnings }))
        }
        Command::Rotation { ellipse, lambda } => {
            line(out, to_json(&RhoOut { rho: rotation_number(&ellipse, lambda)? }))
        }
        Command::Caustic { ellipse, rho } => {
            let rho = rho.validate()?.value();
            let lambda = lambda_for_rotation(&ellipse, rho, &tol)?;
            let d = caustic_data(&ellipse, lambda)?;
            line(out, to_json(&CausticOut { lambda: d.lambda, j: d.j, k2: d.k2 }))
        }
        Command::Scan(args) => {
            let kind = match args.mode {
                ScanMode::Isobeta => FamilyKind::IsoBeta {
                    rho0: args.rho0.expect("required by clap"),
                    c: args.beta0.expect("required by clap"),
                },
                ScanMode::Perimeter => FamilyKind::ConstPerimeter { p: args.perimeter.expect("required by clap") },
            };
            let spec = FamilySpec::linspace(kind, args.emin, args.emax, args.steps)?;
            let scan = scan_family(&spec, args.probe, &tol)?;
            let mut csv = String::from("e,a,b,beta,margin\n");
            for r in &scan.rows {
                let margin = r.margin.map(float).unwrap_or_default();
                csv += &format!("{},{},{},{},{margin}\n", float(r.e), float(r.a), float(r.b), float(r.beta));
            }
            out.write_all(csv.as_bytes()).map_err(|e| Failure::Input(e.to_string()))?;
            line(err, to_json(&scan.verdict))
        }
        Command::Recover(args) => {
            let r = match (args.rho0, args.beta0, args.rho1, args.beta1) {
                (Some(rho0), Some(c0), Some(rho1), Some(c1)) => recover_two_values(rho0, c0, rho1, c1, &tol)?,
                _ => match (args.rho, args.beta, args.perimeter) {
                    (Some(rho), Some(c), Some(p)) => recover_value_perimeter(rho, c, p, &tol)?,
                    _ => {
                        return Err(Failure::Input(
                            "give --rho0 --beta0 --rho1 --beta1, or --rho --beta --perimeter".into(),
                        ))
                    }
                },
            };
            line(out, to_json(&r))
        }
        Command::Bbs { domain, rho, method, orbit } => {
            let domain = read_domain(&domain)?;
            let rho = rho.validate()?;
            let method = pick_method(&domain, method);
            line(out, to_json(&bbs_slack(&domain, rho, method, &orbit.config(), &tol)?))
        }
        Command::Derivative { ellipse, da, db, rho } => {
            let rho = rho.validate()?.value();
            let (a, b) = (ellipse.a(), ellipse.b());
            let fv = beta_derivative(&FamilyPoint::new(a, b, da, db)?, rho, &tol)?;
            let at = |s: f64| -> Result<f64, Failure> {
                let (x, y) = (a + s * da, b + s * db);
                let e = Ellipse::new(x.max(y), x.min(y))?;
                Ok(beta_caustic(&e, rho, &tol)?)
            };
            let fd = (at(FD_STEP)? - at(-FD_STEP)?) / (2.0 * FD_STEP);
            let rel_diff = (fv.dbeta - fd).abs() / fd.abs().max(f64::MIN_POSITIVE);
            let fd_check = FdCheck { step: FD_STEP, dbeta: fd, rel_diff };
            line(out, to_json(&DerivativeOut { dbeta: fv.dbeta, raw_integral: fv.raw_integral, constant: fv.constant, fd_check }))
        }
        Command::Classify { rho, nu, sigma, nmax, n_check, qmax, literal } => {
            let rho = rho.validate()?.value();
            let convention = if literal { GutkinConvention::Literal } else { GutkinConvention::Angle };
            let params = ClassifyParams { nu, sigma, n_check, n_max: nmax, q_max: qmax, convention };
            line(out, to_json(&classify_rotation(rho, &params)?))
        }
        Command::Diagnose { ellipse, rho } => {
            let rho = rho.validate()?.value();
            line(out, to_json(&curve_diagnostics(&ellipse, rho, &tol)?))
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    match run(cli, &mut stdout.lock(), &mut stderr.lock()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            println!("{}", failure.to_json());
            ExitCode::from(failure.exit_code())
        }
    }
}
