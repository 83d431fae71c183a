//! Command-line interface: polynomial queries, normal ordering, identity
//! verification, the full suite, and Gaussian integration.
//!
//! Exit codes: 0 all checks passed, 1 at least one identity failed, 2 usage
//! or parse error, 3 internal limit (degree or quadrature bound exceeded).

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use opherm::frontend::{self, RenderStyle};
use opherm::identities::{
    parse_selection, run_suite, verify_identity, IdentityId, IdentityReport, Mode, NumberParam,
    SuiteOptions, SuiteReport, SuiteSummary, VerifyParams, DEFAULT_NUMERIC_TOL,
};
use opherm::integrals::{Integrand, GaussianIntegrandSpec, DEFAULT_QUADRATURE_NODES};
use opherm::polynomials::{
    hermite_coefficients, hermite_eval, hermite_eval_c64, two_var_hermite_eval,
};
use opherm::scalars::ExactScalar;
use opherm::Error;

const SCHEMA_VERSION: &str = "1";

#[derive(Parser)]
#[command(
    name = "opherm",
    version,
    about = "Exact normal ordering, operator Hermite polynomials, and Gaussian integral closed forms"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Single-variable Hermite polynomial queries
    Hermite {
        #[command(subcommand)]
        query: HermiteQuery,
    },
    /// Evaluate the two-variable Hermite polynomial H_{m,n}(x, y) exactly
    Hermite2 {
        m: u32,
        n: u32,
        /// First argument, e.g. `2`, `-3/5`, `1/2*sqrt2`
        #[arg(allow_hyphen_values = true)]
        x: String,
        /// Second argument
        #[arg(allow_hyphen_values = true)]
        y: String,
    },
    /// Parse an operator expression and print its canonical normal order
    NormalOrder {
        /// Expression, e.g. "H(2, X) - 2*ad*a"
        #[arg(allow_hyphen_values = true)]
        expr: String,
        /// Emit LaTeX instead of plain text
        #[arg(long)]
        latex: bool,
    },
    /// Check one identity at one parameter point
    Verify(VerifyArgs),
    /// Run the identity suite over deterministic parameter grids
    Suite(SuiteArgs),
    /// Integrate a polynomial in x (and y) against the normalized Gaussian
    /// kernel(s)
    Integrate(IntegrateArgs),
}

#[derive(Subcommand)]
enum HermiteQuery {
    /// Print the exact coefficient table of H_n
    Coeffs { n: u32 },
    /// Evaluate H_n at an exact scalar (or decimal) argument
    Eval {
        n: u32,
        #[arg(allow_hyphen_values = true)]
        z: String,
    },
}

#[derive(Args)]
struct VerifyArgs {
    /// Identity name, e.g. OP-HERMITE-X, GENERAL-FG, INT-C12
    id: String,
    #[arg(long)]
    n: Option<u32>,
    #[arg(long)]
    m: Option<u32>,
    /// Scale factor f (exact: `3/5`, `1/2*sqrt2`; decimal switches to floats)
    #[arg(long, allow_hyphen_values = true)]
    f: Option<String>,
    /// Scale factor g
    #[arg(long, allow_hyphen_values = true)]
    g: Option<String>,
    /// Kernel center y for the one-dimensional integrals
    #[arg(long, allow_hyphen_values = true)]
    y: Option<String>,
    /// Kernel center mu
    #[arg(long, allow_hyphen_values = true)]
    mu: Option<String>,
    /// Kernel center nu
    #[arg(long, allow_hyphen_values = true)]
    nu: Option<String>,
    /// `exact` or `numeric`
    #[arg(long, default_value = "exact")]
    mode: String,
    /// Numeric-mode tolerance (relative per coefficient)
    #[arg(long, default_value_t = DEFAULT_NUMERIC_TOL)]
    tol: f64,
    /// Perturb the left-hand side by one unit first; proves the checker can
    /// fail (exit code 1)
    #[arg(long)]
    perturb: bool,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct SuiteArgs {
    /// `all` or comma-separated identity names
    #[arg(long, default_value = "all")]
    ids: String,
    #[arg(long = "max-n", default_value_t = 12)]
    max_n: u32,
    #[arg(long = "max-two-index", default_value_t = 8)]
    max_two_index: u32,
    /// `exact` or `numeric`
    #[arg(long, default_value = "exact")]
    mode: String,
    #[arg(long, default_value_t = DEFAULT_NUMERIC_TOL)]
    tol: f64,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct IntegrateArgs {
    /// Integrand over x (and y), e.g. "H(2, 3/5*x)" or "x^2*y + 1"
    #[arg(allow_hyphen_values = true)]
    spec: String,
    /// Kernel center for x (rational)
    #[arg(long, allow_hyphen_values = true)]
    mu: String,
    /// Kernel center for y (rational; required when the integrand uses y)
    #[arg(long, allow_hyphen_values = true)]
    nu: Option<String>,
    /// Also evaluate by Gauss-Hermite quadrature and compare
    #[arg(long)]
    check_quadrature: bool,
    #[arg(long)]
    json: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {}", e);
            match e {
                Error::DegreeTooLarge { .. } | Error::QuadratureDegree { .. } => {
                    ExitCode::from(3)
                }
                _ => ExitCode::from(2),
            }
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode, Error> {
    match cli.command {
        Command::Hermite { query } => match query {
            HermiteQuery::Coeffs { n } => {
                println!("{}", hermite_coefficients(n)?);
                Ok(ExitCode::SUCCESS)
            }
            HermiteQuery::Eval { n, z } => {
                match parse_number(&z)? {
                    NumberParam::Exact(z) => println!("{}", hermite_eval(n, &z)?),
                    NumberParam::Float(v) => {
                        println!("{:.15e}", hermite_eval_c64(n, v.into())?.re)
                    }
                }
                Ok(ExitCode::SUCCESS)
            }
        },
        Command::Hermite2 { m, n, x, y } => {
            let x = parse_exact(&x)?;
            let y = parse_exact(&y)?;
            println!("{}", two_var_hermite_eval(m, n, &x, &y)?);
            Ok(ExitCode::SUCCESS)
        }
        Command::NormalOrder { expr, latex } => {
            let ast = frontend::parse_expression(&expr)?;
            let e = frontend::elaborate(&ast)?;
            let style = if latex { RenderStyle::Latex } else { RenderStyle::Plain };
            println!("{}", frontend::render_expression(&e, style));
            Ok(ExitCode::SUCCESS)
        }
        Command::Verify(args) => {
            let id: IdentityId = args.id.parse()?;
            let params = VerifyParams {
                n: args.n,
                m: args.m,
                f: parse_opt_number(&args.f)?,
                g: parse_opt_number(&args.g)?,
                y: parse_opt_number(&args.y)?,
                mu: parse_opt_number(&args.mu)?,
                nu: parse_opt_number(&args.nu)?,
                mode: args.mode.parse::<Mode>()?,
                tol: args.tol,
                perturb_lhs: args.perturb,
            };
            let report = verify_identity(id, &params)?;
            let ok = report.equal;
            if args.json {
                let summary = summarize(std::slice::from_ref(&report));
                print_json(&envelope(vec![report], summary));
            } else {
                print_report_human(&report);
            }
            Ok(exit_pass_fail(ok))
        }
        Command::Suite(args) => {
            let opts = SuiteOptions {
                selection: parse_selection(&args.ids)?,
                mode: args.mode.parse::<Mode>()?,
                max_n: args.max_n,
                max_two_index: args.max_two_index,
                tol: args.tol,
            };
            let suite = run_suite(&opts)?;
            let ok = suite.all_pass();
            if args.json {
                print_json(&envelope(suite.reports, suite.summary));
            } else {
                print_suite_human(&suite);
            }
            Ok(exit_pass_fail(ok))
        }
        Command::Integrate(args) => run_integrate(args),
    }
}

fn exit_pass_fail(ok: bool) -> ExitCode {
    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn parse_exact(text: &str) -> Result<ExactScalar, Error> {
    let ast = frontend::parse_expression(text)?;
    frontend::elaborate_scalar(&ast)
}

/// Exact scalars come from the expression grammar; decimal literals fall back
/// to floats (numeric mode only).
fn parse_number(text: &str) -> Result<NumberParam, Error> {
    match parse_exact(text) {
        Ok(x) => Ok(NumberParam::Exact(x)),
        Err(first) => {
            if let Ok(v) = text.trim().parse::<f64>() {
                Ok(NumberParam::Float(v))
            } else {
                Err(first)
            }
        }
    }
}

fn parse_opt_number(text: &Option<String>) -> Result<Option<NumberParam>, Error> {
    text.as_ref().map(|t| parse_number(t)).transpose()
}

#[derive(Serialize)]
struct Envelope {
    version: &'static str,
    command: String,
    reports: Vec<IdentityReport>,
    summary: SuiteSummary,
}

fn envelope(reports: Vec<IdentityReport>, summary: SuiteSummary) -> Envelope {
    Envelope {
        version: SCHEMA_VERSION,
        command: std::env::args().skip(1).collect::<Vec<_>>().join(" "),
        reports,
        summary,
    }
}

fn summarize(reports: &[IdentityReport]) -> SuiteSummary {
    let mut s = SuiteSummary::default();
    for r in reports {
        if !r.equal {
            s.fail += 1;
        } else if r.mode == opherm::identities::ReportMode::DegenerateLimit {
            s.degenerate += 1;
        } else {
            s.pass += 1;
        }
    }
    s
}

fn print_json<T: Serialize>(value: &T) {
    println!("{}", serde_json::to_string_pretty(value).expect("report serializes"));
}

fn print_report_human(r: &IdentityReport) {
    let status = if r.equal { "PASS" } else { "FAIL" };
    println!("{} {} {} [{}] {:.2} ms", status, r.id, r.paper_eq, r.mode, r.ms);
    println!("  {}", r.quote);
    if !r.params.is_empty() {
        let params: Vec<String> = r.params.iter().map(|(k, v)| format!("{}={}", k, v)).collect();
        println!("  params: {}", params.join(", "));
    }
    println!("  lhs: {}", r.lhs);
    println!("  rhs: {}", r.rhs);
    if let Some(d) = r.max_abs_diff {
        println!("  max abs diff: {:.3e}", d);
    }
}

fn print_suite_human(suite: &SuiteReport) {
    for r in &suite.reports {
        let status = if !r.equal {
            "FAIL"
        } else if r.mode == opherm::identities::ReportMode::DegenerateLimit {
            "DGEN"
        } else {
            "PASS"
        };
        let params: Vec<String> = r.params.iter().map(|(k, v)| format!("{}={}", k, v)).collect();
        println!(
            "{} {:18} {:7} [{}] {} ({:.2} ms)",
            status,
            r.id.to_string(),
            r.paper_eq,
            r.mode,
            params.join(" "),
            r.ms
        );
    }
    println!(
        "summary: {} pass, {} fail, {} degenerate-limit",
        suite.summary.pass, suite.summary.fail, suite.summary.degenerate
    );
}

#[derive(Serialize)]
struct IntegrateOutput {
    version: &'static str,
    command: String,
    integrand: String,
    mu: String,
    nu: Option<String>,
    value: String,
    value_float: f64,
    quadrature: Option<f64>,
    quadrature_error: Option<f64>,
    pass: Option<bool>,
}

fn run_integrate(args: IntegrateArgs) -> Result<ExitCode, Error> {
    let ast = frontend::parse_expression(&args.spec)?;
    let poly = frontend::elaborate_integrand(&ast)?;
    let mu = parse_number(&args.mu)?.rational("mu")?;
    let nu = args
        .nu
        .as_ref()
        .map(|t| parse_number(t).and_then(|p| p.rational("nu")))
        .transpose()?;
    let spec = if poly.uses_y() {
        let nu = nu.clone().ok_or_else(|| {
            Error::InvalidParameter("integrand uses y; pass --nu for the second center".into())
        })?;
        GaussianIntegrandSpec {
            integrand: Integrand::TwoDim(poly.clone()),
            mu: mu.clone(),
            nu: Some(nu),
        }
    } else {
        // project down to the univariate engine
        let mut p1 = opherm::polynomials::Poly1::zero();
        for ((ex, _), c) in poly.terms() {
            p1.add_term(ex, c.clone());
        }
        GaussianIntegrandSpec {
            integrand: Integrand::OneDim(p1),
            mu: mu.clone(),
            nu: None,
        }
    };
    let value = spec.integrate()?;
    let value_float = value.to_c64().re;
    let mut quadrature = None;
    let mut quadrature_error = None;
    let mut pass = None;
    if args.check_quadrature {
        let approx = spec.integrate_quadrature(DEFAULT_QUADRATURE_NODES)?;
        let err = (approx - value_float).abs();
        let ok = if value_float.abs() >= 1e-12 {
            err / value_float.abs() <= DEFAULT_NUMERIC_TOL
        } else {
            err <= 1e-12
        };
        quadrature = Some(approx);
        quadrature_error = Some(err);
        pass = Some(ok);
    }
    if args.json {
        print_json(&IntegrateOutput {
            version: SCHEMA_VERSION,
            command: std::env::args().skip(1).collect::<Vec<_>>().join(" "),
            integrand: poly.to_string(),
            mu: mu.to_string(),
            nu: nu.map(|v| v.to_string()),
            value: value.to_string(),
            value_float,
            quadrature,
            quadrature_error,
            pass,
        });
    } else {
        println!("integrand: {}", poly);
        println!("exact: {}", value);
        println!("float: {:.15e}", value_float);
        if let (Some(q), Some(e)) = (quadrature, quadrature_error) {
            println!("quadrature: {:.15e} (abs diff {:.3e})", q, e);
            println!("check: {}", if pass == Some(true) { "PASS" } else { "FAIL" });
        }
    }
    Ok(exit_pass_fail(pass.unwrap_or(true)))
}
