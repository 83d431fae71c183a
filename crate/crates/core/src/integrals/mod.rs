//! Gaussian integrals in closed form, the moment rule they all reduce to,
//! and a floating-point quadrature oracle.
//!
//! The single exact primitive is the moment of the normalized Gaussian
//! kernel,
//!
//! ```text
//! integral dx/sqrt(pi) e^(-(x-mu)^2) x^n = (2i)^(-n) H_n(i mu),
//! ```
//!
//! applied term by term to integrands expanded as polynomials. The named
//! right-hand sides live in a separate closed-form table; tests prove the two
//! routes equal so that each derivation guards the other.

pub mod quadrature;

pub use quadrature::{gauss_hermite_rule, gauss_legendre_rule, GaussHermite, GaussLegendre};

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::polynomials::{hermite_eval, hermite_eval_c64, rat_to_f64, Poly1, Poly2};
use crate::scalars::{sqrt_in_ring, ExactScalar};
use crate::{Error, Result};

/// Exact moment of the normalized Gaussian kernel centered at `mu`:
/// `(2i)^(-n) H_n(i mu)`.
///
/// For real `mu` the imaginary components cancel identically; this is
/// asserted, not assumed.
pub fn gaussian_moment(n: u32, mu: &ExactScalar) -> Result<ExactScalar> {
    // (2i)^(-1) = -i/2
    let minus_half_i = &ExactScalar::ratio(-1, 2) * &ExactScalar::i();
    let arg = &ExactScalar::i() * mu;
    let value = &minus_half_i.pow(n) * &hermite_eval(n, &arg)?;
    if mu.is_real() {
        assert!(
            value.is_real(),
            "moment of a real-centered kernel came out complex: {}",
            value
        );
    }
    Ok(value)
}

/// Exact `integral dx/sqrt(pi) e^(-(x-mu)^2) p(x)` by the moment rule.
pub fn integrate_gaussian_1d(integrand: &Poly1, mu: &BigRational) -> Result<ExactScalar> {
    let center = ExactScalar::from_ratio(mu.clone());
    let mut acc = ExactScalar::zero();
    for (e, c) in integrand.terms() {
        acc = &acc + &(c * &gaussian_moment(e, &center)?);
    }
    Ok(acc)
}

/// Exact `integral dx dy/pi e^(-(x-mu)^2-(y-nu)^2) p(x, y)`; the kernel
/// factorizes, so the moment rule applies per dimension.
pub fn integrate_gaussian_2d(
    integrand: &Poly2,
    mu: &BigRational,
    nu: &BigRational,
) -> Result<ExactScalar> {
    let cx = ExactScalar::from_ratio(mu.clone());
    let cy = ExactScalar::from_ratio(nu.clone());
    let mut acc = ExactScalar::zero();
    for ((ex, ey), c) in integrand.terms() {
        let mx = gaussian_moment(ex, &cx)?;
        let my = gaussian_moment(ey, &cy)?;
        acc = &acc + &(&(c * &mx) * &my);
    }
    Ok(acc)
}

/// A 1-D or 2-D Gaussian integral instance: normalized kernel per dimension,
/// polynomial integrand with exact coefficients.
#[derive(Clone, Debug)]
pub struct GaussianIntegrandSpec {
    pub integrand: Integrand,
    pub mu: BigRational,
    pub nu: Option<BigRational>,
}

#[derive(Clone, Debug)]
pub enum Integrand {
    OneDim(Poly1),
    TwoDim(Poly2),
}

impl GaussianIntegrandSpec {
    pub fn dims(&self) -> usize {
        match self.integrand {
            Integrand::OneDim(_) => 1,
            Integrand::TwoDim(_) => 2,
        }
    }

    /// Exact value via the moment rule.
    pub fn integrate(&self) -> Result<ExactScalar> {
        match (&self.integrand, &self.nu) {
            (Integrand::OneDim(p), _) => integrate_gaussian_1d(p, &self.mu),
            (Integrand::TwoDim(p), Some(nu)) => integrate_gaussian_2d(p, &self.mu, nu),
            (Integrand::TwoDim(_), None) => Err(Error::InvalidParameter(
                "two-dimensional integrand needs a second center".into(),
            )),
        }
    }

    /// Floating-point value by Gauss-Hermite quadrature with `nodes` points
    /// per dimension.
    pub fn integrate_quadrature(&self, nodes: usize) -> Result<f64> {
        let bound = 2 * nodes as u32 - 1;
        let degree = match &self.integrand {
            Integrand::OneDim(p) => p.degree(),
            Integrand::TwoDim(p) => p.total_degree(),
        };
        if degree > bound {
            return Err(Error::QuadratureDegree { degree, bound });
        }
        let rule = quadrature::gauss_hermite_rule(nodes);
        let mu = rat_to_f64(&self.mu);
        match (&self.integrand, &self.nu) {
            (Integrand::OneDim(p), _) => {
                Ok(rule.integrate_normalized(|t| p.eval_c64(Complex64::new(mu + t, 0.0)).re))
            }
            (Integrand::TwoDim(p), Some(nu)) => {
                let nu = rat_to_f64(nu);
                let sqrt_pi = std::f64::consts::PI.sqrt();
                let mut acc = 0.0;
                for (i, &ti) in rule.nodes.iter().enumerate() {
                    let wi = rule.weights[i];
                    for (j, &tj) in rule.nodes.iter().enumerate() {
                        let wj = rule.weights[j];
                        acc += wi * wj
                            * p.eval_c64(
                                Complex64::new(mu + ti, 0.0),
                                Complex64::new(nu + tj, 0.0),
                            )
                            .re;
                    }
                }
                Ok(acc / (sqrt_pi * sqrt_pi))
            }
            (Integrand::TwoDim(_), None) => Err(Error::InvalidParameter(
                "two-dimensional integrand needs a second center".into(),
            )),
        }
    }
}

/// Exact `integral_0^y H_n(x) dx = [H_{n+1}(y) - H_{n+1}(0)] / (2(n+1))`.
pub fn hermite_definite_integral(n: u32, y: &ExactScalar) -> Result<ExactScalar> {
    let at_y = hermite_eval(n + 1, y)?;
    let at_zero = hermite_eval(n + 1, &ExactScalar::zero())?;
    let scale = ExactScalar::ratio(1, 2 * (n as i64 + 1));
    Ok(&(&at_y - &at_zero) * &scale)
}

/// Term-wise power-rule integral `integral_0^y p(x) dx`; the independent
/// route the Hermite antiderivative formula is checked against.
pub fn poly1_definite_integral(p: &Poly1, y: &ExactScalar) -> ExactScalar {
    let mut acc = ExactScalar::zero();
    for (e, c) in p.terms() {
        let power = y.pow(e + 1);
        let scale = ExactScalar::ratio(1, e as i64 + 1);
        acc = &acc + &(&(c * &power) * &scale);
    }
    acc
}

/// The seven named closed forms.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum ClosedFormKind {
    Int5,
    Int8,
    Int9,
    IntC8,
    IntC12,
    IntD8,
    IntD9,
}

impl ClosedFormKind {
    pub const ALL: [ClosedFormKind; 7] = [
        ClosedFormKind::Int5,
        ClosedFormKind::Int8,
        ClosedFormKind::Int9,
        ClosedFormKind::IntC8,
        ClosedFormKind::IntC12,
        ClosedFormKind::IntD8,
        ClosedFormKind::IntD9,
    ];
}

impl fmt::Display for ClosedFormKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ClosedFormKind::Int5 => "INT-5",
            ClosedFormKind::Int8 => "INT-8",
            ClosedFormKind::Int9 => "INT-9",
            ClosedFormKind::IntC8 => "INT-C8",
            ClosedFormKind::IntC12 => "INT-C12",
            ClosedFormKind::IntD8 => "INT-D8",
            ClosedFormKind::IntD9 => "INT-D9",
        };
        write!(f, "{}", s)
    }
}

impl FromStr for ClosedFormKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "INT-5" => Ok(ClosedFormKind::Int5),
            "INT-8" => Ok(ClosedFormKind::Int8),
            "INT-9" => Ok(ClosedFormKind::Int9),
            "INT-C8" => Ok(ClosedFormKind::IntC8),
            "INT-C12" => Ok(ClosedFormKind::IntC12),
            "INT-D8" => Ok(ClosedFormKind::IntD8),
            "INT-D9" => Ok(ClosedFormKind::IntD9),
            _ => Err(Error::UnknownIdentity(s.to_string())),
        }
    }
}

/// A closed form instantiated at exact rational parameters.
#[derive(Clone, Debug)]
pub enum ClosedFormId {
    /// `integral_0^y H_n(x) dx`
    Int5 { n: u32, y: BigRational },
    /// `integral dx/sqrt(pi) e^(-(x-y)^2) H_n(x) = 2^n y^n`
    Int8 { n: u32, y: BigRational },
    /// `integral dx/sqrt(pi) e^(-(x-y)^2) x^n = (2i)^(-n) H_n(i y)`
    Int9 { n: u32, y: BigRational },
    /// `integral dxdy/pi e^(-(x-mu)^2-(y-nu)^2) H_n((x+y)/sqrt2) = (sqrt2 mu + sqrt2 nu)^n`
    IntC8 { n: u32, mu: BigRational, nu: BigRational },
    /// `integral dx/sqrt(pi) e^(-(x-y)^2) H_n(f x) = (1-f^2)^(n/2) H_n(f y / sqrt(1-f^2))`
    IntC12 { n: u32, f: BigRational, y: BigRational },
    /// `integral dxdy/pi e^(-(x-mu)^2-(y-nu)^2) H_m(f x + g y)
    ///   = (1-f^2-g^2)^(m/2) H_m((f mu + g nu)/sqrt(1-f^2-g^2))`
    IntD8 {
        m: u32,
        f: BigRational,
        g: BigRational,
        mu: BigRational,
        nu: BigRational,
    },
    /// `integral dxdy/pi e^(-(x-mu)^2-(y-nu)^2) H_m(x + y) = i^m H_m(-i(mu + nu))`
    IntD9 { m: u32, mu: BigRational, nu: BigRational },
}

/// Result of evaluating a closed form; `degenerate` marks parameter points
/// where the radical vanishes and the leading-term limit was used instead of
/// the generic formula.
#[derive(Clone, Debug, PartialEq)]
pub struct ClosedFormValue {
    pub value: ExactScalar,
    pub degenerate: bool,
}

impl ClosedFormId {
    pub fn kind(&self) -> ClosedFormKind {
        match self {
            ClosedFormId::Int5 { .. } => ClosedFormKind::Int5,
            ClosedFormId::Int8 { .. } => ClosedFormKind::Int8,
            ClosedFormId::Int9 { .. } => ClosedFormKind::Int9,
            ClosedFormId::IntC8 { .. } => ClosedFormKind::IntC8,
            ClosedFormId::IntC12 { .. } => ClosedFormKind::IntC12,
            ClosedFormId::IntD8 { .. } => ClosedFormKind::IntD8,
            ClosedFormId::IntD9 { .. } => ClosedFormKind::IntD9,
        }
    }

    /// Parameter names and values for reports, in a fixed order.
    pub fn params(&self) -> BTreeMap<String, String> {
        let mut map = BTreeMap::new();
        match self {
            ClosedFormId::Int5 { n, y }
            | ClosedFormId::Int8 { n, y }
            | ClosedFormId::Int9 { n, y } => {
                map.insert("n".into(), n.to_string());
                map.insert("y".into(), y.to_string());
            }
            ClosedFormId::IntC8 { n, mu, nu } => {
                map.insert("n".into(), n.to_string());
                map.insert("mu".into(), mu.to_string());
                map.insert("nu".into(), nu.to_string());
            }
            ClosedFormId::IntC12 { n, f, y } => {
                map.insert("n".into(), n.to_string());
                map.insert("f".into(), f.to_string());
                map.insert("y".into(), y.to_string());
            }
            ClosedFormId::IntD8 { m, f, g, mu, nu } => {
                map.insert("m".into(), m.to_string());
                map.insert("f".into(), f.to_string());
                map.insert("g".into(), g.to_string());
                map.insert("mu".into(), mu.to_string());
                map.insert("nu".into(), nu.to_string());
            }
            ClosedFormId::IntD9 { m, mu, nu } => {
                map.insert("m".into(), m.to_string());
                map.insert("mu".into(), mu.to_string());
                map.insert("nu".into(), nu.to_string());
            }
        }
        map
    }

    /// The float-parameter view of the same instance.
    pub fn to_f64(&self) -> ClosedFormF64 {
        match self {
            ClosedFormId::Int5 { n, y } => ClosedFormF64::Int5 {
                n: *n,
                y: rat_to_f64(y),
            },
            ClosedFormId::Int8 { n, y } => ClosedFormF64::Int8 {
                n: *n,
                y: rat_to_f64(y),
            },
            ClosedFormId::Int9 { n, y } => ClosedFormF64::Int9 {
                n: *n,
                y: rat_to_f64(y),
            },
            ClosedFormId::IntC8 { n, mu, nu } => ClosedFormF64::IntC8 {
                n: *n,
                mu: rat_to_f64(mu),
                nu: rat_to_f64(nu),
            },
            ClosedFormId::IntC12 { n, f, y } => ClosedFormF64::IntC12 {
                n: *n,
                f: rat_to_f64(f),
                y: rat_to_f64(y),
            },
            ClosedFormId::IntD8 { m, f, g, mu, nu } => ClosedFormF64::IntD8 {
                m: *m,
                f: rat_to_f64(f),
                g: rat_to_f64(g),
                mu: rat_to_f64(mu),
                nu: rat_to_f64(nu),
            },
            ClosedFormId::IntD9 { m, mu, nu } => ClosedFormF64::IntD9 {
                m: *m,
                mu: rat_to_f64(mu),
                nu: rat_to_f64(nu),
            },
        }
    }

    /// Build the left-hand side as an explicit integrand specification,
    /// ready for the moment engine. `INT-5` is a finite-interval integral,
    /// not a Gaussian one, so it has no such form.
    pub fn integrand_spec(&self) -> Result<Option<GaussianIntegrandSpec>> {
        let inv_sqrt2 = &ExactScalar::ratio(1, 2) * &ExactScalar::sqrt2();
        let one = ExactScalar::one();
        let spec = match self {
            ClosedFormId::Int5 { .. } => return Ok(None),
            ClosedFormId::Int8 { n, y } => GaussianIntegrandSpec {
                integrand: Integrand::OneDim(Poly1::hermite_scaled(*n, &one)?),
                mu: y.clone(),
                nu: None,
            },
            ClosedFormId::Int9 { n, y } => GaussianIntegrandSpec {
                integrand: Integrand::OneDim(Poly1::var().pow(*n)?),
                mu: y.clone(),
                nu: None,
            },
            ClosedFormId::IntC8 { n, mu, nu } => GaussianIntegrandSpec {
                integrand: Integrand::TwoDim(Poly2::hermite_linear(*n, &inv_sqrt2, &inv_sqrt2)?),
                mu: mu.clone(),
                nu: Some(nu.clone()),
            },
            ClosedFormId::IntC12 { n, f, y } => GaussianIntegrandSpec {
                integrand: Integrand::OneDim(Poly1::hermite_scaled(
                    *n,
                    &ExactScalar::from_ratio(f.clone()),
                )?),
                mu: y.clone(),
                nu: None,
            },
            ClosedFormId::IntD8 { m, f, g, mu, nu } => GaussianIntegrandSpec {
                integrand: Integrand::TwoDim(Poly2::hermite_linear(
                    *m,
                    &ExactScalar::from_ratio(f.clone()),
                    &ExactScalar::from_ratio(g.clone()),
                )?),
                mu: mu.clone(),
                nu: Some(nu.clone()),
            },
            ClosedFormId::IntD9 { m, mu, nu } => GaussianIntegrandSpec {
                integrand: Integrand::TwoDim(Poly2::hermite_linear(*m, &one, &one)?),
                mu: mu.clone(),
                nu: Some(nu.clone()),
            },
        };
        Ok(Some(spec))
    }
}

/// Exact value of the integral by the moment engine (term-wise power rule
/// for the finite-interval `INT-5`), independent of the closed-form table.
pub fn moment_engine_value(id: &ClosedFormId) -> Result<ExactScalar> {
    match id {
        ClosedFormId::Int5 { n, y } => {
            let p = Poly1::hermite_scaled(*n, &ExactScalar::one())?;
            Ok(poly1_definite_integral(&p, &ExactScalar::from_ratio(y.clone())))
        }
        _ => id
            .integrand_spec()?
            .expect("every Gaussian id has an integrand")
            .integrate(),
    }
}

/// Exact right-hand side from the closed-form table.
///
/// `INT-C12` at `f^2 = 1` and `INT-D8` at `f^2 + g^2 = 1` hit a vanishing
/// radical; the returned value is the leading-term limit `2^n (f y)^n`
/// (resp. `2^m (f mu + g nu)^m`), flagged as degenerate.
pub fn closed_form_rhs(id: &ClosedFormId) -> Result<ClosedFormValue> {
    let exact = |value: ExactScalar| ClosedFormValue {
        value,
        degenerate: false,
    };
    let two = ExactScalar::from_int(2);
    match id {
        ClosedFormId::Int5 { n, y } => Ok(exact(hermite_definite_integral(
            *n,
            &ExactScalar::from_ratio(y.clone()),
        )?)),
        ClosedFormId::Int8 { n, y } => {
            let y = ExactScalar::from_ratio(y.clone());
            Ok(exact(&two.pow(*n) * &y.pow(*n)))
        }
        ClosedFormId::Int9 { n, y } => {
            Ok(exact(gaussian_moment(*n, &ExactScalar::from_ratio(y.clone()))?))
        }
        ClosedFormId::IntC8 { n, mu, nu } => {
            let sum = ExactScalar::from_ratio(mu + nu);
            let value = (&ExactScalar::sqrt2() * &sum).pow(*n);
            Ok(exact(value))
        }
        ClosedFormId::IntC12 { n, f, y } => {
            let radicand = BigRational::one() - f * f;
            let fy = ExactScalar::from_ratio(f * y);
            if radicand.is_zero() {
                return Ok(ClosedFormValue {
                    value: &two.pow(*n) * &fy.pow(*n),
                    degenerate: true,
                });
            }
            let s = sqrt_in_ring(&radicand)?;
            let arg = &fy * &s.inv()?;
            let value = &s.pow(*n) * &hermite_eval(*n, &arg)?;
            assert!(value.is_real(), "scaled-argument integral must be real");
            Ok(exact(value))
        }
        ClosedFormId::IntD8 { m, f, g, mu, nu } => {
            let radicand = BigRational::one() - f * f - g * g;
            let fmu_gnu = ExactScalar::from_ratio(f * mu + g * nu);
            if radicand.is_zero() {
                return Ok(ClosedFormValue {
                    value: &two.pow(*m) * &fmu_gnu.pow(*m),
                    degenerate: true,
                });
            }
            let s = sqrt_in_ring(&radicand)?;
            let arg = &fmu_gnu * &s.inv()?;
            let value = &s.pow(*m) * &hermite_eval(*m, &arg)?;
            assert!(value.is_real(), "two-center integral must be real");
            Ok(exact(value))
        }
        ClosedFormId::IntD9 { m, mu, nu } => {
            let sum = ExactScalar::from_ratio(mu + nu);
            let arg = &(-&ExactScalar::i()) * &sum;
            let value = &ExactScalar::i().pow(*m) * &hermite_eval(*m, &arg)?;
            assert!(value.is_real(), "unit-coefficient integral must be real");
            Ok(exact(value))
        }
    }
}

/// A closed form instantiated at double-precision parameters, for the
/// quadrature oracle.
#[derive(Clone, Copy, Debug)]
pub enum ClosedFormF64 {
    Int5 { n: u32, y: f64 },
    Int8 { n: u32, y: f64 },
    Int9 { n: u32, y: f64 },
    IntC8 { n: u32, mu: f64, nu: f64 },
    IntC12 { n: u32, f: f64, y: f64 },
    IntD8 { m: u32, f: f64, g: f64, mu: f64, nu: f64 },
    IntD9 { m: u32, mu: f64, nu: f64 },
}

impl ClosedFormF64 {
    pub fn kind(&self) -> ClosedFormKind {
        match self {
            ClosedFormF64::Int5 { .. } => ClosedFormKind::Int5,
            ClosedFormF64::Int8 { .. } => ClosedFormKind::Int8,
            ClosedFormF64::Int9 { .. } => ClosedFormKind::Int9,
            ClosedFormF64::IntC8 { .. } => ClosedFormKind::IntC8,
            ClosedFormF64::IntC12 { .. } => ClosedFormKind::IntC12,
            ClosedFormF64::IntD8 { .. } => ClosedFormKind::IntD8,
            ClosedFormF64::IntD9 { .. } => ClosedFormKind::IntD9,
        }
    }

    /// Polynomial degree of the integrand (per dimension it is never
    /// larger than the total shown here).
    pub fn degree(&self) -> u32 {
        match self {
            ClosedFormF64::Int5 { n, .. }
            | ClosedFormF64::Int8 { n, .. }
            | ClosedFormF64::Int9 { n, .. }
            | ClosedFormF64::IntC8 { n, .. }
            | ClosedFormF64::IntC12 { n, .. } => *n,
            ClosedFormF64::IntD8 { m, .. } | ClosedFormF64::IntD9 { m, .. } => *m,
        }
    }

    /// Float right-hand side; the bool flags the degenerate-limit branch.
    pub fn closed_form(&self) -> (f64, bool) {
        match *self {
            ClosedFormF64::Int5 { n, y } => {
                let v = (hermite_f64(n + 1, y) - hermite_f64(n + 1, 0.0))
                    / (2.0 * (n as f64 + 1.0));
                (v, false)
            }
            ClosedFormF64::Int8 { n, y } => (2f64.powi(n as i32) * y.powi(n as i32), false),
            ClosedFormF64::Int9 { n, y } => {
                let arg = Complex64::new(0.0, y);
                let h = hermite_eval_c64(n, arg).expect("degree within guard");
                let factor = Complex64::new(0.0, -0.5).powu(n);
                ((factor * h).re, false)
            }
            ClosedFormF64::IntC8 { n, mu, nu } => {
                ((std::f64::consts::SQRT_2 * (mu + nu)).powi(n as i32), false)
            }
            ClosedFormF64::IntC12 { n, f, y } => {
                let radicand = 1.0 - f * f;
                if radicand == 0.0 {
                    return ((2.0 * f * y).powi(n as i32), true);
                }
                let s = Complex64::new(radicand, 0.0).sqrt();
                let h = hermite_eval_c64(n, Complex64::new(f * y, 0.0) / s)
                    .expect("degree within guard");
                ((s.powu(n) * h).re, false)
            }
            ClosedFormF64::IntD8 { m, f, g, mu, nu } => {
                let radicand = 1.0 - f * f - g * g;
                let lin = f * mu + g * nu;
                if radicand == 0.0 {
                    return ((2.0 * lin).powi(m as i32), true);
                }
                let s = Complex64::new(radicand, 0.0).sqrt();
                let h = hermite_eval_c64(m, Complex64::new(lin, 0.0) / s)
                    .expect("degree within guard");
                ((s.powu(m) * h).re, false)
            }
            ClosedFormF64::IntD9 { m, mu, nu } => {
                let arg = Complex64::new(0.0, -(mu + nu));
                let h = hermite_eval_c64(m, arg).expect("degree within guard");
                let factor = Complex64::new(0.0, 1.0).powu(m);
                ((factor * h).re, false)
            }
        }
    }

    /// Left-hand integral by quadrature: Gauss-Hermite with the variable
    /// shift `x = center + t` for the Gaussian kernels, Gauss-Legendre on
    /// `[0, y]` for the finite-interval antiderivative form.
    pub fn quadrature(&self, nodes: usize) -> Result<f64> {
        let bound = 2 * nodes as u32 - 1;
        let degree = self.degree();
        if degree > bound {
            return Err(Error::QuadratureDegree { degree, bound });
        }
        let value = match *self {
            ClosedFormF64::Int5 { n, y } => {
                quadrature::gauss_legendre_rule(nodes).integrate_on(0.0, y, |x| hermite_f64(n, x))
            }
            ClosedFormF64::Int8 { n, y } => quadrature::gauss_hermite_rule(nodes)
                .integrate_normalized(|t| hermite_f64(n, y + t)),
            ClosedFormF64::Int9 { n, y } => quadrature::gauss_hermite_rule(nodes)
                .integrate_normalized(|t| (y + t).powi(n as i32)),
            ClosedFormF64::IntC8 { n, mu, nu } => quad_2d(nodes, mu, nu, |x, y| {
                hermite_f64(n, (x + y) / std::f64::consts::SQRT_2)
            }),
            ClosedFormF64::IntC12 { n, f, y } => quadrature::gauss_hermite_rule(nodes)
                .integrate_normalized(|t| hermite_f64(n, f * (y + t))),
            ClosedFormF64::IntD8 { m, f, g, mu, nu } => {
                quad_2d(nodes, mu, nu, |x, y| hermite_f64(m, f * x + g * y))
            }
            ClosedFormF64::IntD9 { m, mu, nu } => {
                quad_2d(nodes, mu, nu, |x, y| hermite_f64(m, x + y))
            }
        };
        Ok(value)
    }
}

fn quad_2d(nodes: usize, mu: f64, nu: f64, f: impl Fn(f64, f64) -> f64) -> f64 {
    let rule = quadrature::gauss_hermite_rule(nodes);
    let mut acc = 0.0;
    for (i, &ti) in rule.nodes.iter().enumerate() {
        for (j, &tj) in rule.nodes.iter().enumerate() {
            acc += rule.weights[i] * rule.weights[j] * f(mu + ti, nu + tj);
        }
    }
    acc / std::f64::consts::PI
}

/// Double-precision `H_n(x)` by the three-term recurrence.
pub fn hermite_f64(n: u32, x: f64) -> f64 {
    let mut prev = 1.0;
    if n == 0 {
        return prev;
    }
    let mut cur = 2.0 * x;
    for k in 1..n {
        let next = 2.0 * x * cur - 2.0 * k as f64 * prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// When the closed-form reference is this close to zero, the comparison
/// switches from relative to absolute error.
pub const NEAR_ZERO_REFERENCE: f64 = 1e-12;

/// Outcome of one quadrature-vs-closed-form comparison.
#[derive(Clone, Debug)]
pub struct QuadratureReport {
    pub kind: ClosedFormKind,
    pub quadrature: f64,
    pub closed_form: f64,
    pub degenerate: bool,
    /// Relative error when the reference is away from zero, absolute
    /// otherwise.
    pub error: f64,
    pub used_relative: bool,
    pub tol: f64,
    pub pass: bool,
}

/// Evaluate the left-hand integral by quadrature and compare against the
/// closed form: relative error at `tol`, absolute at
/// [`NEAR_ZERO_REFERENCE`] when the reference sits below it.
pub fn quadrature_check(id: &ClosedFormF64, tol: f64, nodes: usize) -> Result<QuadratureReport> {
    let (reference, degenerate) = id.closed_form();
    let lhs = id.quadrature(nodes)?;
    let abs_err = (lhs - reference).abs();
    let (error, used_relative, pass) = if reference.abs() >= NEAR_ZERO_REFERENCE {
        let rel = abs_err / reference.abs();
        (rel, true, rel <= tol)
    } else {
        (abs_err, false, abs_err <= NEAR_ZERO_REFERENCE)
    };
    Ok(QuadratureReport {
        kind: id.kind(),
        quadrature: lhs,
        closed_form: reference,
        degenerate,
        error,
        used_relative,
        tol,
        pass,
    })
}

/// Default node count: exact for polynomial degree up to 127.
pub const DEFAULT_QUADRATURE_NODES: usize = 64;

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;
    use crate::polynomials::big_ratio;

    fn rat(p: i64, q: i64) -> BigRational {
        BigRational::new(BigInt::from(p), BigInt::from(q))
    }

    fn int(n: i64) -> ExactScalar {
        ExactScalar::from_int(n)
    }

    #[test]
    fn moment_examples() {
        assert_eq!(gaussian_moment(0, &int(7)).unwrap(), int(1));
        let y = ExactScalar::ratio(5, 3);
        assert_eq!(gaussian_moment(1, &y).unwrap(), y);
        // n = 2: y^2 + 1/2
        let expected = &(&y * &y) + &ExactScalar::ratio(1, 2);
        assert_eq!(gaussian_moment(2, &y).unwrap(), expected);
    }

    /// Independent oracle for the moment rule: shift to central moments,
    /// where odd ones vanish and even ones are (k-1)!!/2^(k/2).
    fn moment_by_binomial_shift(n: u32, mu: &BigRational) -> BigRational {
        let mut acc = BigRational::zero();
        for k in (0..=n).step_by(2) {
            let central = big_ratio(
                (1..k as i64).step_by(2).map(BigInt::from).product::<BigInt>(),
                BigInt::from(2).pow(k / 2),
            );
            let binom = BigRational::from_integer(crate::polynomials::binomial(n, k));
            let shift = mu.pow((n - k) as i32);
            acc += binom * central * shift;
        }
        acc
    }

    #[test]
    fn moment_matches_binomial_shift_oracle() {
        for n in 0..=12u32 {
            for (p, q) in [(0, 1), (1, 1), (-3, 2), (7, 5)] {
                let mu = rat(p, q);
                let direct = gaussian_moment(n, &ExactScalar::from_ratio(mu.clone())).unwrap();
                let oracle = moment_by_binomial_shift(n, &mu);
                assert_eq!(
                    direct,
                    ExactScalar::from_ratio(oracle),
                    "n={} mu={}",
                    n,
                    mu
                );
            }
        }
    }

    #[test]
    fn integrate_1d_examples() {
        // H_2(x) against center 1: 2^2 * 1^2 = 4
        let h2 = Poly1::hermite_scaled(2, &int(1)).unwrap();
        assert_eq!(integrate_gaussian_1d(&h2, &rat(1, 1)).unwrap(), int(4));
        // H_2((3/5) x) at center 0: -32/25
        let h2s = Poly1::hermite_scaled(2, &ExactScalar::ratio(3, 5)).unwrap();
        assert_eq!(
            integrate_gaussian_1d(&h2s, &rat(0, 1)).unwrap(),
            ExactScalar::ratio(-32, 25)
        );
        // normalized kernel
        let one = Poly1::constant(int(1));
        assert_eq!(integrate_gaussian_1d(&one, &rat(4, 7)).unwrap(), int(1));
    }

    #[test]
    fn integrate_2d_examples() {
        let inv_sqrt2 = &ExactScalar::ratio(1, 2) * &ExactScalar::sqrt2();
        // H_1((x+y)/sqrt2), centers 1, 1 -> 2 sqrt2
        let p = Poly2::hermite_linear(1, &inv_sqrt2, &inv_sqrt2).unwrap();
        assert_eq!(
            integrate_gaussian_2d(&p, &rat(1, 1), &rat(1, 1)).unwrap(),
            &int(2) * &ExactScalar::sqrt2()
        );
        // H_1(x+y), centers 2, 3 -> 10
        let p = Poly2::hermite_linear(1, &int(1), &int(1)).unwrap();
        assert_eq!(integrate_gaussian_2d(&p, &rat(2, 1), &rat(3, 1)).unwrap(), int(10));
        let one = Poly2::constant(int(1));
        assert_eq!(integrate_gaussian_2d(&one, &rat(0, 1), &rat(5, 1)).unwrap(), int(1));
    }

    #[test]
    fn antiderivative_examples() {
        assert_eq!(hermite_definite_integral(1, &int(1)).unwrap(), int(1));
        assert_eq!(hermite_definite_integral(0, &int(3)).unwrap(), int(3));
        assert_eq!(hermite_definite_integral(2, &int(0)).unwrap(), int(0));
    }

    #[test]
    fn antiderivative_matches_power_rule() {
        for n in 0..=10u32 {
            for y in [int(0), int(2), ExactScalar::ratio(-3, 4)] {
                let closed = hermite_definite_integral(n, &y).unwrap();
                let p = Poly1::hermite_scaled(n, &int(1)).unwrap();
                assert_eq!(closed, poly1_definite_integral(&p, &y), "n={}", n);
            }
        }
    }

    #[test]
    fn closed_form_examples() {
        let v = closed_form_rhs(&ClosedFormId::Int8 { n: 3, y: rat(2, 1) }).unwrap();
        assert_eq!(v.value, int(64));
        assert!(!v.degenerate);

        let v = closed_form_rhs(&ClosedFormId::IntC12 {
            n: 2,
            f: rat(3, 5),
            y: rat(0, 1),
        })
        .unwrap();
        assert_eq!(v.value, ExactScalar::ratio(-32, 25));

        let v = closed_form_rhs(&ClosedFormId::IntD8 {
            m: 1,
            f: rat(2, 3),
            g: rat(2, 3),
            mu: rat(3, 1),
            nu: rat(3, 1),
        })
        .unwrap();
        assert_eq!(v.value, int(8));
    }

    #[test]
    fn closed_forms_match_moment_engine() {
        let cases = vec![
            ClosedFormId::Int5 { n: 4, y: rat(3, 2) },
            ClosedFormId::Int8 { n: 5, y: rat(-2, 3) },
            ClosedFormId::Int9 { n: 6, y: rat(1, 2) },
            ClosedFormId::IntC8 {
                n: 4,
                mu: rat(1, 2),
                nu: rat(-1, 3),
            },
            ClosedFormId::IntC12 {
                n: 4,
                f: rat(3, 5),
                y: rat(2, 1),
            },
            ClosedFormId::IntD8 {
                m: 3,
                f: rat(2, 3),
                g: rat(2, 3),
                mu: rat(1, 1),
                nu: rat(-1, 2),
            },
            ClosedFormId::IntD9 {
                m: 4,
                mu: rat(1, 3),
                nu: rat(1, 4),
            },
        ];
        for id in &cases {
            let table = closed_form_rhs(id).unwrap();
            let engine = moment_engine_value(id).unwrap();
            assert_eq!(table.value, engine, "{}", id.kind());
            assert!(!table.degenerate);
        }
    }

    #[test]
    fn degenerate_limits() {
        // f = 1 collapses INT-C12 to the plain Hermite moment 2^n y^n
        let v = closed_form_rhs(&ClosedFormId::IntC12 {
            n: 3,
            f: rat(1, 1),
            y: rat(2, 1),
        })
        .unwrap();
        assert!(v.degenerate);
        assert_eq!(v.value, int(64));
        assert_eq!(v.value, moment_engine_value(&ClosedFormId::IntC12 {
            n: 3,
            f: rat(1, 1),
            y: rat(2, 1),
        }).unwrap());

        // f = -1 flips the sign for odd n; the limit keeps track of it
        let v = closed_form_rhs(&ClosedFormId::IntC12 {
            n: 3,
            f: rat(-1, 1),
            y: rat(2, 1),
        })
        .unwrap();
        assert!(v.degenerate);
        assert_eq!(v.value, int(-64));

        // the Pythagorean point (3/5, 4/5) is degenerate for INT-D8
        let id = ClosedFormId::IntD8 {
            m: 2,
            f: rat(3, 5),
            g: rat(4, 5),
            mu: rat(1, 1),
            nu: rat(2, 1),
        };
        let v = closed_form_rhs(&id).unwrap();
        assert!(v.degenerate);
        assert_eq!(v.value, moment_engine_value(&id).unwrap());
    }

    #[test]
    fn imaginary_branch_is_real() {
        // f^2 + g^2 > 1 runs through the imaginary square root
        let id = ClosedFormId::IntD8 {
            m: 4,
            f: rat(1, 1),
            g: rat(1, 1),
            mu: rat(1, 2),
            nu: rat(1, 3),
        };
        let table = closed_form_rhs(&id).unwrap();
        assert!(table.value.is_real());
        assert_eq!(table.value, moment_engine_value(&id).unwrap());
        // and |f| > 1 likewise for the one-dimensional form: 1 - 25/16 = -9/16
        let id = ClosedFormId::IntC12 {
            n: 3,
            f: rat(5, 4),
            y: rat(1, 2),
        };
        let table = closed_form_rhs(&id).unwrap();
        assert!(table.value.is_real());
        assert_eq!(table.value, moment_engine_value(&id).unwrap());
    }

    #[test]
    fn inadmissible_parameters_fail_exact_mode() {
        // 1 - (1/2)^2 = 3/4 has no root in the ring
        let id = ClosedFormId::IntC12 {
            n: 2,
            f: rat(1, 2),
            y: rat(1, 1),
        };
        assert!(matches!(
            closed_form_rhs(&id),
            Err(Error::NotRepresentable(_))
        ));
    }

    #[test]
    fn translation_invariance() {
        // integrating p about center mu equals integrating p(x + mu) about 0
        let p = Poly1::hermite_scaled(5, &ExactScalar::ratio(2, 3)).unwrap();
        let mu = rat(3, 7);
        let direct = integrate_gaussian_1d(&p, &mu).unwrap();
        let shifted = p.shift(&ExactScalar::from_ratio(mu));
        let centered = integrate_gaussian_1d(&shifted, &rat(0, 1)).unwrap();
        assert_eq!(direct, centered);
    }

    #[test]
    fn moment_duality_with_closed_form() {
        // the moment engine re-derives 2^n y^n for Hermite integrands
        for n in 0..=12u32 {
            let y = rat(4, 3);
            let engine = integrate_gaussian_1d(
                &Poly1::hermite_scaled(n, &int(1)).unwrap(),
                &y,
            )
            .unwrap();
            let direct = &int(2).pow(n) * &ExactScalar::from_ratio(y.clone()).pow(n);
            assert_eq!(engine, direct, "n={}", n);
        }
    }

    #[test]
    fn quadrature_check_examples() {
        let r = quadrature_check(&ClosedFormF64::Int8 { n: 4, y: 1.3 }, 1e-9, 64).unwrap();
        assert!(r.pass, "error {}", r.error);
        assert!(r.used_relative);

        // odd degree, centers cancel: reference is exactly zero
        let r = quadrature_check(
            &ClosedFormF64::IntD9 {
                m: 3,
                mu: 0.5,
                nu: -0.5,
            },
            1e-9,
            64,
        )
        .unwrap();
        assert!(!r.used_relative);
        assert!(r.pass, "absolute error {}", r.error);

        // 4 nodes are exact only through degree 7
        assert!(matches!(
            quadrature_check(&ClosedFormF64::Int8 { n: 9, y: 0.5 }, 1e-9, 4),
            Err(Error::QuadratureDegree { degree: 9, bound: 7 })
        ));
    }

    #[test]
    fn quadrature_agrees_across_kinds() {
        let cases = [
            ClosedFormF64::Int5 { n: 6, y: 1.7 },
            ClosedFormF64::Int9 { n: 7, y: -0.8 },
            ClosedFormF64::IntC8 {
                n: 5,
                mu: 0.4,
                nu: 1.1,
            },
            ClosedFormF64::IntC12 {
                n: 6,
                f: 0.37,
                y: 0.9,
            },
            ClosedFormF64::IntD8 {
                m: 5,
                f: 0.5,
                g: 0.25,
                mu: -0.3,
                nu: 0.8,
            },
            ClosedFormF64::IntD9 {
                m: 4,
                mu: 0.6,
                nu: 0.2,
            },
        ];
        for id in cases {
            let r = quadrature_check(&id, 1e-9, 64).unwrap();
            assert!(r.pass, "{} error {}", r.kind, r.error);
        }
    }

    #[test]
    fn spec_struct_roundtrip() {
        let spec = GaussianIntegrandSpec {
            integrand: Integrand::OneDim(Poly1::hermite_scaled(3, &int(1)).unwrap()),
            mu: rat(1, 2),
            nu: None,
        };
        assert_eq!(spec.dims(), 1);
        let exact = spec.integrate().unwrap();
        let approx = spec.integrate_quadrature(32).unwrap();
        assert!((exact.to_c64().re - approx).abs() < 1e-10);
    }
}
