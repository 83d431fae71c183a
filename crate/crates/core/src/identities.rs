//! Registry of checkable identities, the exact/numeric verification engine,
//! and the suite runner.
//!
//! Every identity is an instance check: both sides are built independently
//! through the operator algebra (or the polynomial/integral engines) and
//! compared in canonical form. Exact mode compares term maps in Q(i, sqrt2);
//! numeric mode rebuilds both sides over complex doubles and compares
//! coefficients under a tolerance, which is also the only legal mode at
//! parameter points whose radicals leave the ring.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::boson::{
    apply_to_vacuum, hermite_of_operator, make_linear_form, normal_symbol_hermite,
    normal_symbol_power, two_var_hermite_of_operators, wick_power, FockKet, LinearForm,
    OperatorExpr,
};
use crate::integrals::{
    closed_form_rhs, moment_engine_value, quadrature_check, ClosedFormId, ClosedFormKind,
    ClosedFormF64, DEFAULT_QUADRATURE_NODES,
};
use crate::integrals::hermite_f64;
use crate::polynomials::{binomial, Poly2};
use crate::scalars::{sqrt_in_ring, Coefficient, ExactScalar};
use crate::{Error, Result};

/// Every identity the suite knows how to check.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub enum IdentityId {
    OpHermiteX,
    XPower,
    PHermite,
    VacuumX,
    VacuumP,
    ScaledX,
    SumXy,
    GeneralFg,
    FgUnity,
    TwoVarNormal,
    TwoVarAntinormal,
    XyPower,
    BinomialLike,
    D1Sum,
    Int5,
    Int8,
    Int9,
    IntC8,
    IntC12,
    IntD8,
    IntD9,
}

impl IdentityId {
    pub const ALL: [IdentityId; 21] = [
        IdentityId::OpHermiteX,
        IdentityId::XPower,
        IdentityId::PHermite,
        IdentityId::VacuumX,
        IdentityId::VacuumP,
        IdentityId::ScaledX,
        IdentityId::SumXy,
        IdentityId::GeneralFg,
        IdentityId::FgUnity,
        IdentityId::TwoVarNormal,
        IdentityId::TwoVarAntinormal,
        IdentityId::XyPower,
        IdentityId::BinomialLike,
        IdentityId::D1Sum,
        IdentityId::Int5,
        IdentityId::Int8,
        IdentityId::Int9,
        IdentityId::IntC8,
        IdentityId::IntC12,
        IdentityId::IntD8,
        IdentityId::IntD9,
    ];

    /// Equation label of the identity in the reference derivation, printed
    /// in every report.
    pub fn eq_label(&self) -> &'static str {
        match self {
            IdentityId::OpHermiteX => "(1)",
            IdentityId::XPower => "(2)",
            IdentityId::PHermite => "(1-P)",
            IdentityId::VacuumX => "(3)",
            IdentityId::VacuumP => "(3-P)",
            IdentityId::ScaledX => "(c10)",
            IdentityId::SumXy => "(a4)",
            IdentityId::GeneralFg => "(d5)",
            IdentityId::FgUnity => "(d6)",
            IdentityId::TwoVarNormal => "(b2)",
            IdentityId::TwoVarAntinormal => "(b8)",
            IdentityId::XyPower => "(b9)",
            IdentityId::BinomialLike => "(b5-0)",
            IdentityId::D1Sum => "(d1)",
            IdentityId::Int5 => "(5)",
            IdentityId::Int8 => "(8)",
            IdentityId::Int9 => "(9)",
            IdentityId::IntC8 => "(c8)",
            IdentityId::IntC12 => "(c12)",
            IdentityId::IntD8 => "(d8)",
            IdentityId::IntD9 => "(d9)",
        }
    }

    /// One-line statement of what is being checked.
    pub fn description(&self) -> &'static str {
        match self {
            IdentityId::OpHermiteX => "H_n(X) = 2^n :X^n:",
            IdentityId::XPower => "X^n = (2i)^-n :H_n(iX):",
            IdentityId::PHermite => "H_n(P) = 2^n :P^n:",
            IdentityId::VacuumX => "H_n(X)|00> = 2^(n/2) ad^n |00>",
            IdentityId::VacuumP => "H_n(P)|00> = i^n 2^(n/2) ad^n |00>",
            IdentityId::ScaledX => "H_n(fX) = (1-f^2)^(n/2) :H_n(fX/sqrt(1-f^2)):",
            IdentityId::SumXy => "H_n((X+Y)/sqrt2) = 2^(n/2) :(X+Y)^n:",
            IdentityId::GeneralFg => {
                "H_m(fX+gY) = (1-f^2-g^2)^(m/2) :H_m((fX+gY)/sqrt(1-f^2-g^2)):"
            }
            IdentityId::FgUnity => "H_m(X+Y) = i^m :H_m(-i(X+Y)):",
            IdentityId::TwoVarNormal => "H_{m,n}(a+bd, ad+b) = :(a+bd)^m (ad+b)^n:",
            IdentityId::TwoVarAntinormal => {
                "(a+bd)^m (ad+b)^n = (-i)^(m+n) :H_{m,n}(i(a+bd), i(ad+b)):"
            }
            IdentityId::XyPower => "(X+Y)^n = (i sqrt2)^-n :H_n(i(X+Y)/sqrt2):",
            IdentityId::BinomialLike => "sum_l C(n,l) H_{l,n-l}(x,y) = H_n((x+y)/2)",
            IdentityId::D1Sum => {
                "sum_k C(m,k) H_{m-k}(sqrt2 f x) H_k(sqrt2 g y) = 2^(m/2) H_m(fx+gy)"
            }
            IdentityId::Int5 => "integral_0^y H_n = [H_{n+1}(y) - H_{n+1}(0)]/(2(n+1))",
            IdentityId::Int8 => "gaussian integral of H_n(x) about y = 2^n y^n",
            IdentityId::Int9 => "gaussian moment integral = (2i)^-n H_n(iy)",
            IdentityId::IntC8 => "2-d gaussian integral of H_n((x+y)/sqrt2) = (sqrt2(mu+nu))^n",
            IdentityId::IntC12 => {
                "gaussian integral of H_n(fx) = (1-f^2)^(n/2) H_n(fy/sqrt(1-f^2))"
            }
            IdentityId::IntD8 => {
                "2-d gaussian integral of H_m(fx+gy) = (1-f^2-g^2)^(m/2) H_m(...)"
            }
            IdentityId::IntD9 => "2-d gaussian integral of H_m(x+y) = i^m H_m(-i(mu+nu))",
        }
    }

    pub fn closed_form_kind(&self) -> Option<ClosedFormKind> {
        match self {
            IdentityId::Int5 => Some(ClosedFormKind::Int5),
            IdentityId::Int8 => Some(ClosedFormKind::Int8),
            IdentityId::Int9 => Some(ClosedFormKind::Int9),
            IdentityId::IntC8 => Some(ClosedFormKind::IntC8),
            IdentityId::IntC12 => Some(ClosedFormKind::IntC12),
            IdentityId::IntD8 => Some(ClosedFormKind::IntD8),
            IdentityId::IntD9 => Some(ClosedFormKind::IntD9),
        _ => None,
        }
    }
}

impl fmt::Display for IdentityId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            IdentityId::OpHermiteX => "OP-HERMITE-X",
            IdentityId::XPower => "X-POWER",
            IdentityId::PHermite => "P-HERMITE",
            IdentityId::VacuumX => "VACUUM-X",
            IdentityId::VacuumP => "VACUUM-P",
            IdentityId::ScaledX => "SCALED-X",
            IdentityId::SumXy => "SUM-XY",
            IdentityId::GeneralFg => "GENERAL-FG",
            IdentityId::FgUnity => "FG-UNITY",
            IdentityId::TwoVarNormal => "TWOVAR-NORMAL",
            IdentityId::TwoVarAntinormal => "TWOVAR-ANTINORMAL",
            IdentityId::XyPower => "XY-POWER",
            IdentityId::BinomialLike => "BINOMIAL-LIKE",
            IdentityId::D1Sum => "D1-SUM",
            IdentityId::Int5 => "INT-5",
            IdentityId::Int8 => "INT-8",
            IdentityId::Int9 => "INT-9",
            IdentityId::IntC8 => "INT-C8",
            IdentityId::IntC12 => "INT-C12",
            IdentityId::IntD8 => "INT-D8",
            IdentityId::IntD9 => "INT-D9",
        };
        write!(f, "{}", s)
    }
}

impl FromStr for IdentityId {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        IdentityId::ALL
            .iter()
            .find(|id| id.to_string() == s)
            .copied()
            .ok_or_else(|| Error::UnknownIdentity(s.to_string()))
    }
}

impl Serialize for IdentityId {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

/// Verification mode requested by the caller.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Mode {
    Exact,
    Numeric,
}

impl FromStr for Mode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(Mode::Exact),
            "numeric" => Ok(Mode::Numeric),
            _ => Err(Error::InvalidParameter(format!(
                "mode must be `exact` or `numeric`, got `{}`",
                s
            ))),
        }
    }
}

/// What actually happened while checking.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum ReportMode {
    Exact,
    Numeric,
    DegenerateLimit,
}

impl fmt::Display for ReportMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ReportMode::Exact => "exact",
            ReportMode::Numeric => "numeric",
            ReportMode::DegenerateLimit => "degenerate-limit",
        };
        write!(f, "{}", s)
    }
}

impl Serialize for ReportMode {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

/// A numeric parameter: exact when it came in as a ring element, float-only
/// when it came in as a decimal.
#[derive(Clone, Debug)]
#[allow(clippy::large_enum_variant)] // parameters are few and short-lived
pub enum NumberParam {
    Exact(ExactScalar),
    Float(f64),
}

impl NumberParam {
    pub fn from_rational(r: BigRational) -> Self {
        NumberParam::Exact(ExactScalar::from_ratio(r))
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            NumberParam::Exact(x) => x.to_c64().re,
            NumberParam::Float(v) => *v,
        }
    }

    pub fn render(&self) -> String {
        match self {
            NumberParam::Exact(x) => x.to_string(),
            NumberParam::Float(v) => format!("{}", v),
        }
    }

    /// The exact view, or an error directing the caller to numeric mode.
    pub fn exact(&self, name: &str) -> Result<ExactScalar> {
        match self {
            NumberParam::Exact(x) => Ok(x.clone()),
            NumberParam::Float(_) => Err(Error::InvalidParameter(format!(
                "parameter `{}` is a float; exact mode needs a ring element",
                name
            ))),
        }
    }

    /// The rational view, required for integral centers in exact mode.
    pub fn rational(&self, name: &str) -> Result<BigRational> {
        let exact = self.exact(name)?;
        exact.as_rational().cloned().ok_or_else(|| {
            Error::InvalidParameter(format!("parameter `{}` must be rational, got {}", name, exact))
        })
    }
}

/// A scale factor `f` usable in exact mode: real, of pure form (rational or
/// rational multiple of sqrt2), so that `f^2` is rational.
fn square_as_rational(f: &ExactScalar, name: &str) -> Result<BigRational> {
    let pure = f.is_real() && (f.r1.is_zero() || f.r2.is_zero());
    if !pure {
        return Err(Error::InvalidParameter(format!(
            "parameter `{}` must be rational or a rational multiple of sqrt2, got {}",
            name, f
        )));
    }
    Ok((f * f).as_rational().expect("square of a pure real is rational").clone())
}

/// Parameters for a single verification. Missing entries fall back to
/// per-identity defaults.
#[derive(Clone, Debug)]
pub struct VerifyParams {
    pub n: Option<u32>,
    pub m: Option<u32>,
    pub f: Option<NumberParam>,
    pub g: Option<NumberParam>,
    pub y: Option<NumberParam>,
    pub mu: Option<NumberParam>,
    pub nu: Option<NumberParam>,
    pub mode: Mode,
    pub tol: f64,
    /// Self-test knob: adds one to a left-hand coefficient before comparing,
    /// so the failure path of the harness itself stays exercised.
    pub perturb_lhs: bool,
}

impl Default for VerifyParams {
    fn default() -> Self {
        VerifyParams {
            n: None,
            m: None,
            f: None,
            g: None,
            y: None,
            mu: None,
            nu: None,
            mode: Mode::Exact,
            tol: DEFAULT_NUMERIC_TOL,
            perturb_lhs: false,
        }
    }
}

/// Default per-coefficient relative tolerance for numeric mode.
pub const DEFAULT_NUMERIC_TOL: f64 = 1e-9;
/// Below this magnitude numeric comparisons switch to absolute error.
pub const NUMERIC_ABS_FLOOR: f64 = 1e-12;

/// Outcome of checking one identity at one parameter point.
#[derive(Clone, Debug)]
pub struct IdentityReport {
    pub id: IdentityId,
    pub paper_eq: &'static str,
    pub quote: &'static str,
    pub params: BTreeMap<String, String>,
    pub mode: ReportMode,
    pub equal: bool,
    pub lhs: String,
    pub rhs: String,
    /// Largest absolute coefficient difference; numeric mode only.
    pub max_abs_diff: Option<f64>,
    pub ms: f64,
}

impl Serialize for IdentityReport {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut s = serializer.serialize_struct("IdentityReport", 10)?;
        s.serialize_field("id", &self.id)?;
        s.serialize_field("paper_eq", self.paper_eq)?;
        s.serialize_field("quote", self.quote)?;
        s.serialize_field("params", &self.params)?;
        s.serialize_field("mode", &self.mode)?;
        s.serialize_field("equal", &self.equal)?;
        s.serialize_field("lhs", &self.lhs)?;
        s.serialize_field("rhs", &self.rhs)?;
        if let Some(d) = self.max_abs_diff {
            s.serialize_field("max_abs_diff", &d)?;
        } else {
            s.skip_field("max_abs_diff")?;
        }
        s.serialize_field("ms", &self.ms)?;
        s.end()
    }
}

/// Either a pair of operator expressions, a pair of kets, a pair of
/// two-variable polynomials, or a pair of scalars: whatever the identity
/// compares.
enum Sides<C: Coefficient> {
    Expr(OperatorExpr<C>, OperatorExpr<C>),
    Ket(FockKet<C>, FockKet<C>),
}

fn lf<C: Coefficient>(symbol: &str) -> Result<LinearForm<C>> {
    Ok(make_linear_form(symbol)?.map(C::from_exact))
}

fn c_exact<C: Coefficient>(x: &ExactScalar) -> C {
    C::from_exact(x)
}

fn two_pow<C: Coefficient>(n: u32) -> C {
    c_exact(&ExactScalar::from_int(2).pow(n))
}

/// `2^(n/2)` with the sqrt2 component carrying odd powers.
fn two_pow_half<C: Coefficient>(n: u32) -> C {
    c_exact(&ExactScalar::sqrt2().pow(n))
}

fn sides_op_hermite_x<C: Coefficient>(n: u32, momentum: bool) -> Result<Sides<C>> {
    let form: LinearForm<C> = lf(if momentum { "P" } else { "X" })?;
    let lhs = hermite_of_operator(n, &form)?;
    let rhs = normal_symbol_power(&form, n)?.scale(&two_pow(n));
    Ok(Sides::Expr(lhs, rhs))
}

fn sides_x_power<C: Coefficient>(n: u32) -> Result<Sides<C>> {
    let form: LinearForm<C> = lf("X")?;
    let lhs = wick_power(&form, n)?;
    let i_form = form.scale(&c_exact(&ExactScalar::i()));
    // (2i)^(-n) = (-i/2)^n
    let factor = c_exact(&(&ExactScalar::ratio(-1, 2) * &ExactScalar::i()).pow(n));
    let rhs = normal_symbol_hermite(n, &i_form)?.scale(&factor);
    Ok(Sides::Expr(lhs, rhs))
}

fn sides_vacuum<C: Coefficient>(n: u32, momentum: bool) -> Result<Sides<C>> {
    let form: LinearForm<C> = lf(if momentum { "P" } else { "X" })?;
    let lhs = apply_to_vacuum(&hermite_of_operator(n, &form)?);
    let mut coeff = ExactScalar::sqrt2().pow(n);
    if momentum {
        coeff = &coeff * &ExactScalar::i().pow(n);
    }
    let mut rhs_expr: OperatorExpr<C> = OperatorExpr::zero();
    rhs_expr.add_term(crate::boson::NormalMonomial::new(n, 0, 0, 0), c_exact(&coeff));
    let rhs = apply_to_vacuum(&rhs_expr);
    Ok(Sides::Ket(lhs, rhs))
}

fn sides_sum_xy<C: Coefficient>(n: u32) -> Result<Sides<C>> {
    let x: LinearForm<C> = lf("X")?;
    let y: LinearForm<C> = lf("Y")?;
    let sum = x.add(&y);
    let inv_sqrt2 = c_exact(&(&ExactScalar::ratio(1, 2) * &ExactScalar::sqrt2()));
    let lhs = hermite_of_operator(n, &sum.scale(&inv_sqrt2))?;
    let rhs = normal_symbol_power(&sum, n)?.scale(&two_pow_half(n));
    Ok(Sides::Expr(lhs, rhs))
}

fn sides_xy_power<C: Coefficient>(n: u32) -> Result<Sides<C>> {
    let x: LinearForm<C> = lf("X")?;
    let y: LinearForm<C> = lf("Y")?;
    let sum = x.add(&y);
    let lhs = sum.to_expr().wick_pow(n)?;
    // i/sqrt2 = (sqrt2/2) i and (i sqrt2)^(-1) = -(sqrt2/2) i
    let half_sqrt2 = &ExactScalar::ratio(1, 2) * &ExactScalar::sqrt2();
    let arg_scale = c_exact(&(&half_sqrt2 * &ExactScalar::i()));
    let factor = c_exact(&(-&(&half_sqrt2 * &ExactScalar::i())).pow(n));
    let rhs = normal_symbol_hermite(n, &sum.scale(&arg_scale))?.scale(&factor);
    Ok(Sides::Expr(lhs, rhs))
}

/// Shared builder for the scaled single-mode identity and its two-mode
/// generalization. `forms` is `f X` (and `g Y`), `radicand` the rational
/// `1 - f^2` (resp. `1 - f^2 - g^2`).
fn sides_scaled_family<C: Coefficient>(
    index: u32,
    combined: &LinearForm<C>,
    root: Option<(&C, &C)>,
) -> Result<(Sides<C>, bool)> {
    let lhs = hermite_of_operator(index, combined)?;
    match root {
        None => {
            // vanishing radical: leading-term limit 2^m :(fX+gY)^m:
            let rhs = normal_symbol_power(combined, index)?.scale(&two_pow(index));
            Ok((Sides::Expr(lhs, rhs), true))
        }
        Some((s, s_inv)) => {
            let arg = combined.scale(s_inv);
            let mut factor = C::one();
            for _ in 0..index {
                factor = factor.mul(s);
            }
            let rhs = normal_symbol_hermite(index, &arg)?.scale(&factor);
            Ok((Sides::Expr(lhs, rhs), false))
        }
    }
}

fn sides_two_var<C: Coefficient>(m: u32, n: u32, antinormal: bool) -> Result<Sides<C>> {
    let a_bd: LinearForm<C> = lf("a+bd")?;
    let ad_b: LinearForm<C> = lf("ad+b")?;
    if antinormal {
        let lhs = a_bd
            .to_expr()
            .wick_pow(m)?
            .normal_order_multiply(&ad_b.to_expr().wick_pow(n)?)?;
        let i = c_exact(&ExactScalar::i());
        let factor = c_exact(&(-&ExactScalar::i()).pow(m + n));
        let rhs = two_var_hermite_of_operators(m, n, &a_bd.scale(&i), &ad_b.scale(&i), true)?
            .scale(&factor);
        Ok(Sides::Expr(lhs, rhs))
    } else {
        let lhs = two_var_hermite_of_operators(m, n, &a_bd, &ad_b, false)?;
        let rhs = a_bd
            .to_expr()
            .commuting_pow(m)?
            .commuting_multiply(&ad_b.to_expr().commuting_pow(n)?)?;
        Ok(Sides::Expr(lhs, rhs))
    }
}

/// Exact polynomial sides of the binomial-like theorem.
fn poly_sides_binomial_like(n: u32) -> Result<(Poly2, Poly2)> {
    let mut lhs = Poly2::zero();
    for l in 0..=n {
        let h = Poly2::two_var_hermite(l, n - l)?;
        lhs = lhs.add(&h.scale(&ExactScalar::from_bigint(&binomial(n, l))));
    }
    let half = ExactScalar::ratio(1, 2);
    let rhs = Poly2::hermite_linear(n, &half, &half)?;
    Ok((lhs, rhs))
}

/// Exact polynomial sides of the Hermite sum formula at fixed `f`, `g`.
fn poly_sides_d1(m: u32, f: &ExactScalar, g: &ExactScalar) -> Result<(Poly2, Poly2)> {
    let sqrt2 = ExactScalar::sqrt2();
    let fx = &sqrt2 * f;
    let gy = &sqrt2 * g;
    let mut lhs = Poly2::zero();
    for k in 0..=m {
        let hx = Poly2::hermite_linear(m - k, &fx, &ExactScalar::zero())?;
        let hy = Poly2::hermite_linear(k, &ExactScalar::zero(), &gy)?;
        let prod = hx.mul(&hy)?;
        lhs = lhs.add(&prod.scale(&ExactScalar::from_bigint(&binomial(m, k))));
    }
    let rhs = Poly2::hermite_linear(m, f, g)?.scale(&sqrt2.pow(m));
    Ok((lhs, rhs))
}

fn compare_exact(sides: &Sides<ExactScalar>) -> (bool, String, String) {
    match sides {
        Sides::Expr(l, r) => (l == r, l.to_string(), r.to_string()),
        Sides::Ket(l, r) => (l == r, l.to_string(), r.to_string()),
    }
}

fn compare_numeric<C: Coefficient>(sides: &Sides<C>, tol: f64) -> (bool, f64, String, String) {
    let (pairs, lhs, rhs): (Vec<(Complex64, Complex64)>, String, String) = match sides {
        Sides::Expr(l, r) => {
            let mut keys: Vec<_> = l.terms().map(|(m, _)| *m).collect();
            keys.extend(r.terms().map(|(m, _)| *m));
            keys.sort();
            keys.dedup();
            (
                keys.iter()
                    .map(|m| (l.coeff(m).to_c64(), r.coeff(m).to_c64()))
                    .collect(),
                render_expr(l),
                render_expr(r),
            )
        }
        Sides::Ket(l, r) => {
            let mut keys: Vec<_> = l.amps().map(|(k, _)| *k).collect();
            keys.extend(r.amps().map(|(k, _)| *k));
            keys.sort();
            keys.dedup();
            (
                keys.iter()
                    .map(|&(p, q)| (l.coeff(p, q).to_c64(), r.coeff(p, q).to_c64()))
                    .collect(),
                render_ket(l),
                render_ket(r),
            )
        }
    };
    let mut equal = true;
    let mut max_diff = 0.0f64;
    for (a, b) in pairs {
        let diff = (a - b).norm();
        max_diff = max_diff.max(diff);
        let scale = a.norm().max(b.norm());
        let ok = if scale >= NUMERIC_ABS_FLOOR {
            diff / scale <= tol
        } else {
            diff <= NUMERIC_ABS_FLOOR
        };
        equal &= ok;
    }
    (equal, max_diff, lhs, rhs)
}

fn render_expr<C: Coefficient>(e: &OperatorExpr<C>) -> String {
    let mut parts: Vec<String> = Vec::new();
    for (m, c) in e.terms() {
        let mono = m.render();
        if mono.is_empty() {
            parts.push(format!("({})", c.render()));
        } else {
            parts.push(format!("({})*{}", c.render(), mono));
        }
    }
    if parts.is_empty() {
        "0".into()
    } else {
        parts.join(" + ")
    }
}

fn render_ket<C: Coefficient>(k: &FockKet<C>) -> String {
    let mut parts: Vec<String> = Vec::new();
    for (&(p, r), c) in k.amps() {
        let mono = crate::boson::NormalMonomial::new(p, 0, r, 0).render();
        if mono.is_empty() {
            parts.push(format!("({})|00>", c.render()));
        } else {
            parts.push(format!("({})*{}|00>", c.render(), mono));
        }
    }
    if parts.is_empty() {
        "0".into()
    } else {
        parts.join(" + ")
    }
}

fn perturb<C: Coefficient>(sides: Sides<C>) -> Sides<C> {
    match sides {
        Sides::Expr(mut l, r) => {
            l.add_term(crate::boson::NormalMonomial::identity(), C::one());
            Sides::Expr(l, r)
        }
        Sides::Ket(mut l, r) => {
            let bumped = l.coeff(0, 0).add(&C::one());
            // rebuild with the bumped vacuum amplitude
            let mut expr: OperatorExpr<C> = OperatorExpr::zero();
            for (&(p, rr), c) in l.amps() {
                if (p, rr) != (0, 0) {
                    expr.add_term(crate::boson::NormalMonomial::new(p, 0, rr, 0), c.clone());
                }
            }
            expr.add_term(crate::boson::NormalMonomial::identity(), bumped);
            l = apply_to_vacuum(&expr);
            Sides::Ket(l, r)
        }
    }
}

/// Resolved parameter set after defaults.
struct Resolved {
    n: u32,
    m: u32,
    f: NumberParam,
    g: NumberParam,
    y: NumberParam,
    mu: NumberParam,
    nu: NumberParam,
}

fn resolve_defaults(id: IdentityId, p: &VerifyParams) -> Resolved {
    let rparam = |a: i64, b: i64| NumberParam::Exact(ExactScalar::ratio(a, b));
    let default_f = match id {
        IdentityId::ScaledX | IdentityId::IntC12 => rparam(3, 5),
        IdentityId::GeneralFg | IdentityId::IntD8 => rparam(2, 3),
        _ => rparam(1, 1),
    };
    let default_g = match id {
        IdentityId::GeneralFg | IdentityId::IntD8 => rparam(2, 3),
        _ => rparam(1, 1),
    };
    Resolved {
        n: p.n.unwrap_or(4),
        m: p.m.or(p.n).unwrap_or(match id {
            IdentityId::TwoVarNormal | IdentityId::TwoVarAntinormal => 3,
            _ => 4,
        }),
        f: p.f.clone().unwrap_or(default_f),
        g: p.g.clone().unwrap_or(default_g),
        y: p.y.clone().unwrap_or(rparam(1, 1)),
        mu: p.mu.clone().unwrap_or(rparam(1, 1)),
        nu: p.nu.clone().unwrap_or(rparam(1, 1)),
    }
}

/// Check one identity at one parameter point.
pub fn verify_identity(id: IdentityId, params: &VerifyParams) -> Result<IdentityReport> {
    let start = Instant::now();
    let r = resolve_defaults(id, params);
    let mut out = match id.closed_form_kind() {
        Some(_) => verify_integral(id, params, &r)?,
        None => match params.mode {
            Mode::Exact => verify_operator_exact(id, params, &r)?,
            Mode::Numeric => verify_operator_numeric(id, params, &r)?,
        },
    };
    out.ms = start.elapsed().as_secs_f64() * 1e3;
    Ok(out)
}

fn report_skeleton(id: IdentityId, params: BTreeMap<String, String>) -> IdentityReport {
    IdentityReport {
        id,
        paper_eq: id.eq_label(),
        quote: id.description(),
        params,
        mode: ReportMode::Exact,
        equal: false,
        lhs: String::new(),
        rhs: String::new(),
        max_abs_diff: None,
        ms: 0.0,
    }
}

fn single_index_params(label: &str, value: u32) -> BTreeMap<String, String> {
    let mut map = BTreeMap::new();
    map.insert(label.to_string(), value.to_string());
    map
}

fn verify_operator_exact(
    id: IdentityId,
    params: &VerifyParams,
    r: &Resolved,
) -> Result<IdentityReport> {
    let (sides, mode, pmap): (Sides<ExactScalar>, ReportMode, BTreeMap<String, String>) = match id {
        IdentityId::OpHermiteX => (
            sides_op_hermite_x(r.n, false)?,
            ReportMode::Exact,
            single_index_params("n", r.n),
        ),
        IdentityId::PHermite => (
            sides_op_hermite_x(r.n, true)?,
            ReportMode::Exact,
            single_index_params("n", r.n),
        ),
        IdentityId::XPower => (
            sides_x_power(r.n)?,
            ReportMode::Exact,
            single_index_params("n", r.n),
        ),
        IdentityId::VacuumX => (
            sides_vacuum(r.n, false)?,
            ReportMode::Exact,
            single_index_params("n", r.n),
        ),
        IdentityId::VacuumP => (
            sides_vacuum(r.n, true)?,
            ReportMode::Exact,
            single_index_params("n", r.n),
        ),
        IdentityId::SumXy => (
            sides_sum_xy(r.n)?,
            ReportMode::Exact,
            single_index_params("n", r.n),
        ),
        IdentityId::XyPower => (
            sides_xy_power(r.n)?,
            ReportMode::Exact,
            single_index_params("n", r.n),
        ),
        IdentityId::ScaledX => {
            let f = r.f.exact("f")?;
            let f_sq = square_as_rational(&f, "f")?;
            let radicand = BigRational::one() - f_sq;
            let x = make_linear_form("X")?.scale(&f);
            let mut pmap = single_index_params("n", r.n);
            pmap.insert("f".into(), f.to_string());
            if radicand.is_zero() {
                let (sides, _) = sides_scaled_family(r.n, &x, None)?;
                (sides, ReportMode::DegenerateLimit, pmap)
            } else {
                let s = sqrt_in_ring(&radicand)?;
                let s_inv = s.inv()?;
                let (sides, _) = sides_scaled_family(r.n, &x, Some((&s, &s_inv)))?;
                (sides, ReportMode::Exact, pmap)
            }
        }
        IdentityId::GeneralFg | IdentityId::FgUnity => {
            let (f, g) = if id == IdentityId::FgUnity {
                (ExactScalar::one(), ExactScalar::one())
            } else {
                (r.f.exact("f")?, r.g.exact("g")?)
            };
            let f_sq = square_as_rational(&f, "f")?;
            let g_sq = square_as_rational(&g, "g")?;
            let radicand = BigRational::one() - f_sq - g_sq;
            let combined = make_linear_form("X")?
                .scale(&f)
                .add(&make_linear_form("Y")?.scale(&g));
            let mut pmap = single_index_params("m", r.m);
            if id == IdentityId::GeneralFg {
                pmap.insert("f".into(), f.to_string());
                pmap.insert("g".into(), g.to_string());
            }
            if radicand.is_zero() {
                let (sides, _) = sides_scaled_family(r.m, &combined, None)?;
                (sides, ReportMode::DegenerateLimit, pmap)
            } else {
                let s = sqrt_in_ring(&radicand)?;
                let s_inv = s.inv()?;
                let (sides, _) = sides_scaled_family(r.m, &combined, Some((&s, &s_inv)))?;
                (sides, ReportMode::Exact, pmap)
            }
        }
        IdentityId::TwoVarNormal => {
            let mut pmap = single_index_params("m", r.m);
            pmap.insert("n".into(), r.n.to_string());
            (sides_two_var(r.m, r.n, false)?, ReportMode::Exact, pmap)
        }
        IdentityId::TwoVarAntinormal => {
            let mut pmap = single_index_params("m", r.m);
            pmap.insert("n".into(), r.n.to_string());
            (sides_two_var(r.m, r.n, true)?, ReportMode::Exact, pmap)
        }
        IdentityId::BinomialLike => {
            let (lhs, rhs) = poly_sides_binomial_like(r.n)?;
            return finish_poly_report(id, params, single_index_params("n", r.n), lhs, rhs);
        }
        IdentityId::D1Sum => {
            let f = r.f.exact("f")?;
            let g = r.g.exact("g")?;
            let (lhs, rhs) = poly_sides_d1(r.m, &f, &g)?;
            let mut pmap = single_index_params("m", r.m);
            pmap.insert("f".into(), f.to_string());
            pmap.insert("g".into(), g.to_string());
            return finish_poly_report(id, params, pmap, lhs, rhs);
        }
        _ => unreachable!("integral ids handled separately"),
    };
    let sides = if params.perturb_lhs { perturb(sides) } else { sides };
    let (equal, lhs, rhs) = compare_exact(&sides);
    let mut report = report_skeleton(id, pmap);
    report.mode = mode;
    report.equal = equal;
    report.lhs = lhs;
    report.rhs = rhs;
    Ok(report)
}

fn finish_poly_report(
    id: IdentityId,
    params: &VerifyParams,
    pmap: BTreeMap<String, String>,
    mut lhs: Poly2,
    rhs: Poly2,
) -> Result<IdentityReport> {
    if params.perturb_lhs {
        lhs.add_term(0, 0, ExactScalar::one());
    }
    let mut report = report_skeleton(id, pmap);
    report.mode = ReportMode::Exact;
    report.equal = lhs == rhs;
    report.lhs = lhs.to_string();
    report.rhs = rhs.to_string();
    Ok(report)
}

fn verify_operator_numeric(
    id: IdentityId,
    params: &VerifyParams,
    r: &Resolved,
) -> Result<IdentityReport> {
    let (sides, degenerate, pmap): (Sides<Complex64>, bool, BTreeMap<String, String>) = match id {
        IdentityId::OpHermiteX => (sides_op_hermite_x(r.n, false)?, false, single_index_params("n", r.n)),
        IdentityId::PHermite => (sides_op_hermite_x(r.n, true)?, false, single_index_params("n", r.n)),
        IdentityId::XPower => (sides_x_power(r.n)?, false, single_index_params("n", r.n)),
        IdentityId::VacuumX => (sides_vacuum(r.n, false)?, false, single_index_params("n", r.n)),
        IdentityId::VacuumP => (sides_vacuum(r.n, true)?, false, single_index_params("n", r.n)),
        IdentityId::SumXy => (sides_sum_xy(r.n)?, false, single_index_params("n", r.n)),
        IdentityId::XyPower => (sides_xy_power(r.n)?, false, single_index_params("n", r.n)),
        IdentityId::ScaledX => {
            let f = r.f.to_f64();
            let radicand = 1.0 - f * f;
            let x: LinearForm<Complex64> = lf("X")?;
            let scaled = x.scale(&Complex64::new(f, 0.0));
            let mut pmap = single_index_params("n", r.n);
            pmap.insert("f".into(), r.f.render());
            if radicand == 0.0 {
                let (sides, _) = sides_scaled_family(r.n, &scaled, None)?;
                (sides, true, pmap)
            } else {
                let s = Complex64::new(radicand, 0.0).sqrt();
                let s_inv = 1.0 / s;
                let (sides, _) = sides_scaled_family(r.n, &scaled, Some((&s, &s_inv)))?;
                (sides, false, pmap)
            }
        }
        IdentityId::GeneralFg | IdentityId::FgUnity => {
            let (f, g) = if id == IdentityId::FgUnity {
                (1.0, 1.0)
            } else {
                (r.f.to_f64(), r.g.to_f64())
            };
            let radicand = 1.0 - f * f - g * g;
            let x: LinearForm<Complex64> = lf("X")?;
            let y: LinearForm<Complex64> = lf("Y")?;
            let combined = x
                .scale(&Complex64::new(f, 0.0))
                .add(&y.scale(&Complex64::new(g, 0.0)));
            let mut pmap = single_index_params("m", r.m);
            if id == IdentityId::GeneralFg {
                pmap.insert("f".into(), r.f.render());
                pmap.insert("g".into(), r.g.render());
            }
            if radicand == 0.0 {
                let (sides, _) = sides_scaled_family(r.m, &combined, None)?;
                (sides, true, pmap)
            } else {
                let s = Complex64::new(radicand, 0.0).sqrt();
                let s_inv = 1.0 / s;
                let (sides, _) = sides_scaled_family(r.m, &combined, Some((&s, &s_inv)))?;
                (sides, false, pmap)
            }
        }
        IdentityId::TwoVarNormal => {
            let mut pmap = single_index_params("m", r.m);
            pmap.insert("n".into(), r.n.to_string());
            (sides_two_var(r.m, r.n, false)?, false, pmap)
        }
        IdentityId::TwoVarAntinormal => {
            let mut pmap = single_index_params("m", r.m);
            pmap.insert("n".into(), r.n.to_string());
            (sides_two_var(r.m, r.n, true)?, false, pmap)
        }
        IdentityId::BinomialLike => {
            return numeric_poly_report(id, params, r, false);
        }
        IdentityId::D1Sum => {
            return numeric_poly_report(id, params, r, true);
        }
        _ => unreachable!("integral ids handled separately"),
    };
    let sides = if params.perturb_lhs { perturb(sides) } else { sides };
    let (equal, max_diff, lhs, rhs) = compare_numeric(&sides, params.tol);
    let mut report = report_skeleton(id, pmap);
    report.mode = if degenerate {
        ReportMode::DegenerateLimit
    } else {
        ReportMode::Numeric
    };
    report.equal = equal;
    report.lhs = lhs;
    report.rhs = rhs;
    report.max_abs_diff = Some(max_diff);
    Ok(report)
}

/// Numeric view of the pure polynomial identities: evaluate both sides at a
/// fixed set of sample points.
fn numeric_poly_report(
    id: IdentityId,
    params: &VerifyParams,
    r: &Resolved,
    d1: bool,
) -> Result<IdentityReport> {
    let samples = [(0.7, -1.3), (1.9, 0.4), (-0.6, -0.2)];
    let mut equal = true;
    let mut max_diff = 0.0f64;
    let mut lhs_vals = Vec::new();
    let mut rhs_vals = Vec::new();
    for (x, y) in samples {
        let (l, rr) = if d1 {
            let (f, g) = (r.f.to_f64(), r.g.to_f64());
            let mut acc = 0.0;
            for k in 0..=r.m {
                let b = crate::polynomials::rat_to_f64(&BigRational::from_integer(binomial(r.m, k)));
                acc += b
                    * hermite_f64(r.m - k, std::f64::consts::SQRT_2 * f * x)
                    * hermite_f64(k, std::f64::consts::SQRT_2 * g * y);
            }
            let rhs = 2f64.powf(r.m as f64 / 2.0) * hermite_f64(r.m, f * x + g * y);
            (acc, rhs)
        } else {
            let mut acc = Complex64::new(0.0, 0.0);
            for l in 0..=r.n {
                let b = crate::polynomials::rat_to_f64(&BigRational::from_integer(binomial(r.n, l)));
                let h = crate::polynomials::two_var_hermite_eval_in(
                    l,
                    r.n - l,
                    &Complex64::new(x, 0.0),
                    &Complex64::new(y, 0.0),
                )?;
                acc += b * h;
            }
            let rhs = hermite_f64(r.n, (x + y) / 2.0);
            (acc.re, rhs)
        };
        let l = if params.perturb_lhs { l + 1.0 } else { l };
        let diff = (l - rr).abs();
        max_diff = max_diff.max(diff);
        let scale = l.abs().max(rr.abs());
        equal &= if scale >= NUMERIC_ABS_FLOOR {
            diff / scale <= params.tol
        } else {
            diff <= NUMERIC_ABS_FLOOR
        };
        lhs_vals.push(format!("{:.12e}", l));
        rhs_vals.push(format!("{:.12e}", rr));
    }
    let mut pmap = if d1 {
        let mut map = single_index_params("m", r.m);
        map.insert("f".into(), r.f.render());
        map.insert("g".into(), r.g.render());
        map
    } else {
        single_index_params("n", r.n)
    };
    pmap.insert("samples".into(), samples.len().to_string());
    let mut report = report_skeleton(id, pmap);
    report.mode = ReportMode::Numeric;
    report.equal = equal;
    report.lhs = lhs_vals.join(", ");
    report.rhs = rhs_vals.join(", ");
    report.max_abs_diff = Some(max_diff);
    Ok(report)
}

fn verify_integral(id: IdentityId, params: &VerifyParams, r: &Resolved) -> Result<IdentityReport> {
    match params.mode {
        Mode::Exact => {
            let cf = closed_form_instance(id, r, true)?;
            let table = closed_form_rhs(&cf)?;
            let engine = moment_engine_value(&cf)?;
            let mut lhs_value = engine;
            if params.perturb_lhs {
                lhs_value = &lhs_value + &ExactScalar::one();
            }
            let mut report = report_skeleton(id, cf.params());
            report.mode = if table.degenerate {
                ReportMode::DegenerateLimit
            } else {
                ReportMode::Exact
            };
            report.equal = lhs_value == table.value;
            report.lhs = lhs_value.to_string();
            report.rhs = table.value.to_string();
            Ok(report)
        }
        Mode::Numeric => {
            let cf = closed_form_f64_instance(id, r);
            let mut check = quadrature_check(&cf, params.tol, DEFAULT_QUADRATURE_NODES)?;
            if params.perturb_lhs {
                check.quadrature += 1.0;
                let diff = (check.quadrature - check.closed_form).abs();
                check.pass = false;
                check.error = diff;
            }
            let mut pmap = float_params(id, r);
            pmap.insert("nodes".into(), DEFAULT_QUADRATURE_NODES.to_string());
            let mut report = report_skeleton(id, pmap);
            report.mode = if check.degenerate {
                ReportMode::DegenerateLimit
            } else {
                ReportMode::Numeric
            };
            report.equal = check.pass;
            report.lhs = format!("{:.15e}", check.quadrature);
            report.rhs = format!("{:.15e}", check.closed_form);
            report.max_abs_diff = Some((check.quadrature - check.closed_form).abs());
            Ok(report)
        }
    }
}

fn closed_form_instance(id: IdentityId, r: &Resolved, exact: bool) -> Result<ClosedFormId> {
    debug_assert!(exact);
    Ok(match id {
        IdentityId::Int5 => ClosedFormId::Int5 {
            n: r.n,
            y: r.y.rational("y")?,
        },
        IdentityId::Int8 => ClosedFormId::Int8 {
            n: r.n,
            y: r.y.rational("y")?,
        },
        IdentityId::Int9 => ClosedFormId::Int9 {
            n: r.n,
            y: r.y.rational("y")?,
        },
        IdentityId::IntC8 => ClosedFormId::IntC8 {
            n: r.n,
            mu: r.mu.rational("mu")?,
            nu: r.nu.rational("nu")?,
        },
        IdentityId::IntC12 => ClosedFormId::IntC12 {
            n: r.n,
            f: r.f.rational("f")?,
            y: r.y.rational("y")?,
        },
        IdentityId::IntD8 => ClosedFormId::IntD8 {
            m: r.m,
            f: r.f.rational("f")?,
            g: r.g.rational("g")?,
            mu: r.mu.rational("mu")?,
            nu: r.nu.rational("nu")?,
        },
        IdentityId::IntD9 => ClosedFormId::IntD9 {
            m: r.m,
            mu: r.mu.rational("mu")?,
            nu: r.nu.rational("nu")?,
        },
        _ => unreachable!("not an integral id"),
    })
}

fn closed_form_f64_instance(id: IdentityId, r: &Resolved) -> ClosedFormF64 {
    match id {
        IdentityId::Int5 => ClosedFormF64::Int5 {
            n: r.n,
            y: r.y.to_f64(),
        },
        IdentityId::Int8 => ClosedFormF64::Int8 {
            n: r.n,
            y: r.y.to_f64(),
        },
        IdentityId::Int9 => ClosedFormF64::Int9 {
            n: r.n,
            y: r.y.to_f64(),
        },
        IdentityId::IntC8 => ClosedFormF64::IntC8 {
            n: r.n,
            mu: r.mu.to_f64(),
            nu: r.nu.to_f64(),
        },
        IdentityId::IntC12 => ClosedFormF64::IntC12 {
            n: r.n,
            f: r.f.to_f64(),
            y: r.y.to_f64(),
        },
        IdentityId::IntD8 => ClosedFormF64::IntD8 {
            m: r.m,
            f: r.f.to_f64(),
            g: r.g.to_f64(),
            mu: r.mu.to_f64(),
            nu: r.nu.to_f64(),
        },
        IdentityId::IntD9 => ClosedFormF64::IntD9 {
            m: r.m,
            mu: r.mu.to_f64(),
            nu: r.nu.to_f64(),
        },
        _ => unreachable!("not an integral id"),
    }
}

fn float_params(id: IdentityId, r: &Resolved) -> BTreeMap<String, String> {
    let mut map = BTreeMap::new();
    match id {
        IdentityId::Int5 | IdentityId::Int8 | IdentityId::Int9 => {
            map.insert("n".into(), r.n.to_string());
            map.insert("y".into(), r.y.render());
        }
        IdentityId::IntC8 => {
            map.insert("n".into(), r.n.to_string());
            map.insert("mu".into(), r.mu.render());
            map.insert("nu".into(), r.nu.render());
        }
        IdentityId::IntC12 => {
            map.insert("n".into(), r.n.to_string());
            map.insert("f".into(), r.f.render());
            map.insert("y".into(), r.y.render());
        }
        IdentityId::IntD8 => {
            map.insert("m".into(), r.m.to_string());
            map.insert("f".into(), r.f.render());
            map.insert("g".into(), r.g.render());
            map.insert("mu".into(), r.mu.render());
            map.insert("nu".into(), r.nu.render());
        }
        IdentityId::IntD9 => {
            map.insert("m".into(), r.m.to_string());
            map.insert("mu".into(), r.mu.render());
            map.insert("nu".into(), r.nu.render());
        }
        _ => {}
    }
    map
}

// ---------------------------------------------------------------------------
// admissible parameter pools
// ---------------------------------------------------------------------------

/// Candidate scale factors: small rationals and small rational multiples of
/// sqrt2, positive, sorted by value.
fn scale_candidates(max_den: i64) -> Vec<ExactScalar> {
    let mut out = Vec::new();
    for q in 1..=max_den {
        for p in 1..=(2 * q) {
            let r = BigRational::new(p.into(), q.into());
            out.push(ExactScalar::from_ratio(r.clone()));
            out.push(&ExactScalar::from_ratio(r) * &ExactScalar::sqrt2());
        }
    }
    out.sort_by(|a, b| a.to_c64().re.partial_cmp(&b.to_c64().re).unwrap());
    out.dedup();
    out
}

/// Scale factors `f` admissible for the scaled single-mode identity: the
/// radicand `1 - f^2` is nonzero and has a root in the ring. Checked with
/// [`sqrt_in_ring`], not hand-listed.
pub fn admissible_scale_factors(max_den: i64, limit: usize) -> Vec<ExactScalar> {
    let mut below = Vec::new();
    let mut above = Vec::new();
    for f in scale_candidates(max_den) {
        let f_sq = match square_as_rational(&f, "f") {
            Ok(v) => v,
            Err(_) => continue,
        };
        let radicand = BigRational::one() - f_sq;
        if radicand.is_zero() || sqrt_in_ring(&radicand).is_err() {
            continue;
        }
        if radicand.is_positive() {
            below.push(f);
        } else {
            above.push(f);
        }
    }
    // mix both branches: real roots first, then imaginary ones
    let mut out: Vec<ExactScalar> = below.into_iter().take(limit.saturating_sub(1).max(1)).collect();
    out.extend(above.into_iter().take(limit.saturating_sub(out.len())));
    out.truncate(limit);
    out
}

/// Pairs `(f, g)` admissible for the two-mode identity, mixing the three
/// radicand branches: positive (real root), zero (degenerate limit) and
/// negative (imaginary root).
pub fn admissible_scale_pairs(max_den: i64, per_branch: usize) -> Vec<(ExactScalar, ExactScalar)> {
    let candidates = scale_candidates(max_den);
    let mut positive = Vec::new();
    let mut zero = Vec::new();
    let mut negative = Vec::new();
    for f in &candidates {
        let f_sq = match square_as_rational(f, "f") {
            Ok(v) => v,
            Err(_) => continue,
        };
        for g in &candidates {
            let g_sq = match square_as_rational(g, "g") {
                Ok(v) => v,
                Err(_) => continue,
            };
            let radicand = BigRational::one() - &f_sq - g_sq;
            if radicand.is_zero() {
                zero.push((f.clone(), g.clone()));
            } else if sqrt_in_ring(&radicand).is_ok() {
                if radicand.is_positive() {
                    positive.push((f.clone(), g.clone()));
                } else {
                    negative.push((f.clone(), g.clone()));
                }
            }
        }
    }
    let mut out = Vec::new();
    out.extend(positive.into_iter().take(per_branch));
    out.extend(zero.into_iter().take(per_branch));
    out.extend(negative.into_iter().take(per_branch));
    out
}

// ---------------------------------------------------------------------------
// suite runner
// ---------------------------------------------------------------------------

#[derive(Clone, Debug)]
pub enum Selection {
    All,
    Ids(Vec<IdentityId>),
}

/// Parse `all` or a comma-separated id list.
pub fn parse_selection(text: &str) -> Result<Selection> {
    if text.trim() == "all" {
        return Ok(Selection::All);
    }
    let mut ids = Vec::new();
    for part in text.split(',') {
        ids.push(IdentityId::from_str(part.trim())?);
    }
    Ok(Selection::Ids(ids))
}

#[derive(Clone, Debug)]
pub struct SuiteOptions {
    pub selection: Selection,
    pub mode: Mode,
    pub max_n: u32,
    pub max_two_index: u32,
    pub tol: f64,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        SuiteOptions {
            selection: Selection::All,
            mode: Mode::Exact,
            max_n: 12,
            max_two_index: 8,
            tol: DEFAULT_NUMERIC_TOL,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, Serialize)]
pub struct SuiteSummary {
    pub pass: usize,
    pub fail: usize,
    pub degenerate: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub reports: Vec<IdentityReport>,
    pub summary: SuiteSummary,
}

impl SuiteReport {
    pub fn all_pass(&self) -> bool {
        self.summary.fail == 0
    }
}

/// Run the selected identities over deterministic parameter grids; reports
/// come out ordered by (identity, parameter tuple).
pub fn run_suite(opts: &SuiteOptions) -> Result<SuiteReport> {
    let ids: Vec<IdentityId> = match &opts.selection {
        Selection::All => IdentityId::ALL.to_vec(),
        Selection::Ids(ids) => {
            let mut sorted = ids.clone();
            sorted.sort();
            sorted.dedup();
            sorted
        }
    };
    let mut reports = Vec::new();
    for id in ids {
        for params in parameter_grid(id, opts) {
            reports.push(verify_identity(id, &params)?);
        }
    }
    let mut summary = SuiteSummary::default();
    for r in &reports {
        if !r.equal {
            summary.fail += 1;
        } else if r.mode == ReportMode::DegenerateLimit {
            summary.degenerate += 1;
        } else {
            summary.pass += 1;
        }
    }
    Ok(SuiteReport { reports, summary })
}

fn base_params(opts: &SuiteOptions) -> VerifyParams {
    VerifyParams {
        mode: opts.mode,
        tol: opts.tol,
        ..VerifyParams::default()
    }
}

fn rational_param(p: i64, q: i64) -> NumberParam {
    NumberParam::Exact(ExactScalar::ratio(p, q))
}

/// The deterministic parameter grid for one identity.
fn parameter_grid(id: IdentityId, opts: &SuiteOptions) -> Vec<VerifyParams> {
    let base = base_params(opts);
    let ns = 0..=opts.max_n;
    let mut grid = Vec::new();
    match id {
        IdentityId::OpHermiteX
        | IdentityId::XPower
        | IdentityId::PHermite
        | IdentityId::VacuumX
        | IdentityId::VacuumP
        | IdentityId::SumXy
        | IdentityId::XyPower
        | IdentityId::FgUnity
        | IdentityId::BinomialLike => {
            for n in ns {
                grid.push(VerifyParams {
                    n: Some(n),
                    m: Some(n),
                    ..base.clone()
                });
            }
        }
        IdentityId::ScaledX => {
            for f in admissible_scale_factors(13, 4) {
                for n in ns.clone() {
                    grid.push(VerifyParams {
                        n: Some(n),
                        f: Some(NumberParam::Exact(f.clone())),
                        ..base.clone()
                    });
                }
            }
        }
        IdentityId::GeneralFg => {
            let m_cap = opts.max_n.min(10);
            for (f, g) in admissible_scale_pairs(5, 2) {
                for m in 0..=m_cap {
                    grid.push(VerifyParams {
                        m: Some(m),
                        f: Some(NumberParam::Exact(f.clone())),
                        g: Some(NumberParam::Exact(g.clone())),
                        ..base.clone()
                    });
                }
            }
        }
        IdentityId::TwoVarNormal | IdentityId::TwoVarAntinormal => {
            for m in 0..=opts.max_two_index {
                for n in 0..=opts.max_two_index {
                    grid.push(VerifyParams {
                        m: Some(m),
                        n: Some(n),
                        ..base.clone()
                    });
                }
            }
        }
        IdentityId::D1Sum => {
            let pairs = [(1, 1, 1, 1), (3, 5, 2, 3), (1, 2, 1, 3)];
            for (fp, fq, gp, gq) in pairs {
                for m in ns.clone() {
                    grid.push(VerifyParams {
                        m: Some(m),
                        f: Some(rational_param(fp, fq)),
                        g: Some(rational_param(gp, gq)),
                        ..base.clone()
                    });
                }
            }
        }
        IdentityId::Int5 | IdentityId::Int8 | IdentityId::Int9 => {
            let ys = [(0, 1), (2, 1), (-3, 2), (1, 3)];
            for (yp, yq) in ys {
                for n in ns.clone() {
                    grid.push(VerifyParams {
                        n: Some(n),
                        y: Some(rational_param(yp, yq)),
                        ..base.clone()
                    });
                }
            }
        }
        IdentityId::IntC8 => {
            let centers = [(1, 1, 1, 1), (2, 1, 3, 1), (-1, 2, 1, 3)];
            for (mp, mq, np_, nq) in centers {
                for n in ns.clone() {
                    grid.push(VerifyParams {
                        n: Some(n),
                        mu: Some(rational_param(mp, mq)),
                        nu: Some(rational_param(np_, nq)),
                        ..base.clone()
                    });
                }
            }
        }
        IdentityId::IntC12 => {
            // rational-only admissible scale factors for the integral table
            let fs: Vec<BigRational> = admissible_scale_factors(13, 6)
                .into_iter()
                .filter_map(|f| f.as_rational().cloned())
                .take(3)
                .collect();
            for f in fs {
                for (yp, yq) in [(0, 1), (3, 4)] {
                    for n in ns.clone() {
                        grid.push(VerifyParams {
                            n: Some(n),
                            f: Some(NumberParam::from_rational(f.clone())),
                            y: Some(rational_param(yp, yq)),
                            ..base.clone()
                        });
                    }
                }
            }
        }
        IdentityId::IntD8 => {
            let pairs = [(2, 3, 2, 3), (3, 5, 4, 5), (1, 1, 1, 1)];
            let centers = [(3, 1, 3, 1), (1, 2, -1, 2)];
            for (fp, fq, gp, gq) in pairs {
                for (mp, mq, np_, nq) in centers {
                    for m in 0..=opts.max_n.min(10) {
                        grid.push(VerifyParams {
                            m: Some(m),
                            f: Some(rational_param(fp, fq)),
                            g: Some(rational_param(gp, gq)),
                            mu: Some(rational_param(mp, mq)),
                            nu: Some(rational_param(np_, nq)),
                            ..base.clone()
                        });
                    }
                }
            }
        }
        IdentityId::IntD9 => {
            let centers = [(2, 1, 3, 1), (1, 2, -1, 2), (0, 1, 0, 1)];
            for (mp, mq, np_, nq) in centers {
                for m in ns.clone() {
                    grid.push(VerifyParams {
                        m: Some(m),
                        mu: Some(rational_param(mp, mq)),
                        nu: Some(rational_param(np_, nq)),
                        ..base.clone()
                    });
                }
            }
        }
    }
    grid
}
