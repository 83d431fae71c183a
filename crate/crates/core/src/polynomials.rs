//! Exact Hermite polynomials and sparse exact polynomials.
//!
//! Single-variable coefficients come from the three-term recurrence
//! `H_{n+1}(z) = 2z H_n(z) - 2n H_{n-1}(z)` and are memoized; two-variable
//! coefficients use the closed form obtained by expanding the generating
//! function `exp(-t t' + t x + t' y)`. Everything is arbitrary precision:
//! the integer coefficients outgrow 64 bits well before degree 20.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::scalars::{Coefficient, ExactScalar};
use crate::{Error, Result};

/// Default upper bound on Hermite degree / index.
pub const DEFAULT_DEGREE_GUARD: u32 = 64;
/// Hard ceiling the configurable guard cannot exceed.
pub const MAX_DEGREE_GUARD: u32 = 256;

fn check_degree(requested: u32, guard: u32) -> Result<()> {
    let guard = guard.min(MAX_DEGREE_GUARD);
    if requested > guard {
        Err(Error::DegreeTooLarge { requested, guard })
    } else {
        Ok(())
    }
}

/// Binomial coefficient from a memoized Pascal triangle.
pub fn binomial(n: u32, k: u32) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    static TABLE: OnceLock<Mutex<Vec<Vec<BigInt>>>> = OnceLock::new();
    let table = TABLE.get_or_init(|| Mutex::new(vec![vec![BigInt::one()]]));
    let mut rows = table.lock().unwrap();
    while rows.len() <= n as usize {
        let prev = rows.last().unwrap();
        let mut row = Vec::with_capacity(prev.len() + 1);
        row.push(BigInt::one());
        for w in prev.windows(2) {
            row.push(&w[0] + &w[1]);
        }
        row.push(BigInt::one());
        rows.push(row);
    }
    rows[n as usize][k as usize].clone()
}

pub fn factorial(n: u32) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

/// Dense coefficient table of `H_n(z) = sum c_k z^k`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct HermitePoly {
    pub degree: u32,
    pub coeffs: Vec<BigInt>,
}

impl HermitePoly {
    pub fn coeff(&self, k: u32) -> BigInt {
        self.coeffs.get(k as usize).cloned().unwrap_or_default()
    }
}

impl fmt::Display for HermitePoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut wrote = false;
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let mag = c.abs();
            if wrote {
                write!(f, " {} ", if c.is_negative() { "-" } else { "+" })?;
            } else {
                if c.is_negative() {
                    write!(f, "-")?;
                }
                wrote = true;
            }
            match k {
                0 => write!(f, "{}", mag)?,
                1 if mag.is_one() => write!(f, "z")?,
                1 => write!(f, "{}*z", mag)?,
                _ if mag.is_one() => write!(f, "z^{}", k)?,
                _ => write!(f, "{}*z^{}", mag, k)?,
            }
        }
        if !wrote {
            write!(f, "0")?;
        }
        Ok(())
    }
}

fn hermite_cache() -> &'static Mutex<Vec<Arc<HermitePoly>>> {
    static CACHE: OnceLock<Mutex<Vec<Arc<HermitePoly>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(Vec::new()))
}

/// `H_n` coefficients under the default degree guard.
pub fn hermite_coefficients(n: u32) -> Result<Arc<HermitePoly>> {
    hermite_coefficients_with_guard(n, DEFAULT_DEGREE_GUARD)
}

/// `H_n` coefficients under an explicit guard (capped at
/// [`MAX_DEGREE_GUARD`]).
pub fn hermite_coefficients_with_guard(n: u32, guard: u32) -> Result<Arc<HermitePoly>> {
    check_degree(n, guard)?;
    let mut cache = hermite_cache().lock().unwrap();
    while cache.len() <= n as usize {
        let next = cache.len();
        let poly = match next {
            0 => HermitePoly {
                degree: 0,
                coeffs: vec![BigInt::one()],
            },
            1 => HermitePoly {
                degree: 1,
                coeffs: vec![BigInt::zero(), BigInt::from(2)],
            },
            _ => {
                let prev = &cache[next - 1];
                let prev2 = &cache[next - 2];
                let mut coeffs = vec![BigInt::zero(); next + 1];
                for (k, c) in prev.coeffs.iter().enumerate() {
                    coeffs[k + 1] += 2 * c;
                }
                let two_n = BigInt::from(2 * (next as u64 - 1));
                for (k, c) in prev2.coeffs.iter().enumerate() {
                    coeffs[k] -= &two_n * c;
                }
                HermitePoly {
                    degree: next as u32,
                    coeffs,
                }
            }
        };
        cache.push(Arc::new(poly));
    }
    Ok(cache[n as usize].clone())
}

/// Horner evaluation of `H_n` over any coefficient domain.
pub fn hermite_eval_in<C: Coefficient>(n: u32, z: &C) -> Result<C> {
    let poly = hermite_coefficients(n)?;
    let mut acc = C::zero();
    for c in poly.coeffs.iter().rev() {
        acc = acc.mul(z).add(&C::from_bigint(c));
    }
    Ok(acc)
}

/// Exact evaluation of `H_n(z)`.
pub fn hermite_eval(n: u32, z: &ExactScalar) -> Result<ExactScalar> {
    hermite_eval_in(n, z)
}

/// Floating-point evaluation of `H_n(z)`.
pub fn hermite_eval_c64(n: u32, z: Complex64) -> Result<Complex64> {
    hermite_eval_in(n, &z)
}

/// Sparse coefficient table of the two-variable Hermite polynomial
/// `H_{m,n}(x, y)`; nonzero entries sit at exponent pairs `(m-l, n-l)`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct TwoVarHermite {
    pub m: u32,
    pub n: u32,
    pub coeffs: BTreeMap<(u32, u32), BigInt>,
}

/// Closed-form coefficients: `coeff(m-l, n-l) = (-1)^l m! n! / (l! (m-l)! (n-l)!)`.
pub fn two_var_hermite_coefficients(m: u32, n: u32) -> Result<TwoVarHermite> {
    check_degree(m, DEFAULT_DEGREE_GUARD)?;
    check_degree(n, DEFAULT_DEGREE_GUARD)?;
    let mut coeffs = BTreeMap::new();
    let m_fact = factorial(m);
    let n_fact = factorial(n);
    for l in 0..=m.min(n) {
        let mut c = &m_fact * &n_fact / (factorial(l) * factorial(m - l) * factorial(n - l));
        if l % 2 == 1 {
            c = -c;
        }
        coeffs.insert((m - l, n - l), c);
    }
    Ok(TwoVarHermite { m, n, coeffs })
}

/// Evaluation of `H_{m,n}(x, y)` over any coefficient domain.
pub fn two_var_hermite_eval_in<C: Coefficient>(m: u32, n: u32, x: &C, y: &C) -> Result<C> {
    let table = two_var_hermite_coefficients(m, n)?;
    let mut acc = C::zero();
    for (&(j, k), c) in &table.coeffs {
        let mut term = C::from_bigint(c);
        term = term.mul(&pow_c(x, j));
        term = term.mul(&pow_c(y, k));
        acc = acc.add(&term);
    }
    Ok(acc)
}

/// Exact evaluation of `H_{m,n}(x, y)`.
pub fn two_var_hermite_eval(
    m: u32,
    n: u32,
    x: &ExactScalar,
    y: &ExactScalar,
) -> Result<ExactScalar> {
    two_var_hermite_eval_in(m, n, x, y)
}

fn pow_c<C: Coefficient>(base: &C, e: u32) -> C {
    let mut acc = C::one();
    for _ in 0..e {
        acc = acc.mul(base);
    }
    acc
}

/// Harmonic-oscillator number-state wave function
/// `psi_n(x) = (2^n n! sqrt(pi))^{-1/2} exp(-x^2/2) H_n(x)`.
///
/// Uses the normalized recurrence
/// `psi_{n+1} = x sqrt(2/(n+1)) psi_n - sqrt(n/(n+1)) psi_{n-1}`, which keeps
/// every intermediate O(1) instead of letting `H_n` and the normalization
/// overflow separately.
pub fn wavefunction_eval(n: u32, x: f64) -> Result<f64> {
    check_degree(n, 32)?;
    let psi0 = std::f64::consts::PI.powf(-0.25) * (-x * x / 2.0).exp();
    if n == 0 {
        return Ok(psi0);
    }
    let mut prev = psi0;
    let mut cur = std::f64::consts::SQRT_2 * x * psi0;
    for k in 1..n {
        let kf = k as f64;
        let next = x * (2.0 / (kf + 1.0)).sqrt() * cur - (kf / (kf + 1.0)).sqrt() * prev;
        prev = cur;
        cur = next;
    }
    Ok(cur)
}

/// Sparse exact polynomial in one variable `x`.
#[derive(Clone, PartialEq, Debug, Default)]
pub struct Poly1 {
    terms: BTreeMap<u32, ExactScalar>,
}

impl Poly1 {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: ExactScalar) -> Self {
        let mut p = Self::zero();
        p.add_term(0, c);
        p
    }

    pub fn var() -> Self {
        let mut p = Self::zero();
        p.add_term(1, ExactScalar::one());
        p
    }

    pub fn add_term(&mut self, exp: u32, c: ExactScalar) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(exp).or_insert_with(ExactScalar::zero);
        *entry = &*entry + &c;
        if entry.is_zero() {
            self.terms.remove(&exp);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (u32, &ExactScalar)> {
        self.terms.iter().map(|(&e, c)| (e, c))
    }

    pub fn degree(&self) -> u32 {
        self.terms.keys().next_back().copied().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, rhs: &Self) -> Self {
        let mut out = self.clone();
        for (e, c) in rhs.terms() {
            out.add_term(e, c.clone());
        }
        out
    }

    pub fn scale(&self, c: &ExactScalar) -> Self {
        let mut out = Self::zero();
        for (e, coeff) in self.terms() {
            out.add_term(e, coeff * c);
        }
        out
    }

    pub fn mul(&self, rhs: &Self) -> Result<Self> {
        let deg = self.degree() + rhs.degree();
        check_degree(deg, MAX_DEGREE_GUARD)?;
        let mut out = Self::zero();
        for (e1, c1) in self.terms() {
            for (e2, c2) in rhs.terms() {
                out.add_term(e1 + e2, c1 * c2);
            }
        }
        Ok(out)
    }

    pub fn pow(&self, n: u32) -> Result<Self> {
        let mut acc = Self::constant(ExactScalar::one());
        for _ in 0..n {
            acc = acc.mul(self)?;
        }
        Ok(acc)
    }

    /// `H_n(scale * x)` as an exact polynomial.
    pub fn hermite_scaled(n: u32, scale: &ExactScalar) -> Result<Self> {
        let poly = hermite_coefficients(n)?;
        let mut out = Self::zero();
        for (k, c) in poly.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            out.add_term(k as u32, ExactScalar::from_bigint(c) * scale.pow(k as u32));
        }
        Ok(out)
    }

    /// Substitute `x -> x + c` (binomial shift).
    pub fn shift(&self, c: &ExactScalar) -> Self {
        let mut out = Self::zero();
        for (e, coeff) in self.terms() {
            for k in 0..=e {
                let factor = ExactScalar::from_bigint(&binomial(e, k)) * c.pow(e - k);
                out.add_term(k, coeff * &factor);
            }
        }
        out
    }

    pub fn eval(&self, x: &ExactScalar) -> ExactScalar {
        let mut acc = ExactScalar::zero();
        for (e, c) in self.terms() {
            acc = &acc + &(c * &x.pow(e));
        }
        acc
    }

    pub fn eval_c64(&self, x: Complex64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (e, c) in self.terms() {
            acc += c.to_c64() * x.powu(e);
        }
        acc
    }
}

impl fmt::Display for Poly1 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_terms(
            f,
            self.terms
                .iter()
                .rev()
                .map(|(&e, c)| (c.clone(), monomial_str_1(e))),
        )
    }
}

/// Sparse exact polynomial in two variables `x`, `y`.
#[derive(Clone, PartialEq, Debug, Default)]
pub struct Poly2 {
    terms: BTreeMap<(u32, u32), ExactScalar>,
}

impl Poly2 {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: ExactScalar) -> Self {
        let mut p = Self::zero();
        p.add_term(0, 0, c);
        p
    }

    pub fn var_x() -> Self {
        let mut p = Self::zero();
        p.add_term(1, 0, ExactScalar::one());
        p
    }

    pub fn var_y() -> Self {
        let mut p = Self::zero();
        p.add_term(0, 1, ExactScalar::one());
        p
    }

    pub fn from_poly1(p: &Poly1) -> Self {
        let mut out = Self::zero();
        for (e, c) in p.terms() {
            out.add_term(e, 0, c.clone());
        }
        out
    }

    pub fn add_term(&mut self, ex: u32, ey: u32, c: ExactScalar) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry((ex, ey)).or_insert_with(ExactScalar::zero);
        *entry = &*entry + &c;
        if entry.is_zero() {
            self.terms.remove(&(ex, ey));
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = ((u32, u32), &ExactScalar)> {
        self.terms.iter().map(|(&e, c)| (e, c))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn uses_y(&self) -> bool {
        self.terms.keys().any(|&(_, ey)| ey > 0)
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(|&(ex, ey)| ex + ey).max().unwrap_or(0)
    }

    pub fn add(&self, rhs: &Self) -> Self {
        let mut out = self.clone();
        for ((ex, ey), c) in rhs.terms() {
            out.add_term(ex, ey, c.clone());
        }
        out
    }

    pub fn scale(&self, c: &ExactScalar) -> Self {
        let mut out = Self::zero();
        for ((ex, ey), coeff) in self.terms() {
            out.add_term(ex, ey, coeff * c);
        }
        out
    }

    pub fn mul(&self, rhs: &Self) -> Result<Self> {
        let deg = self.total_degree() + rhs.total_degree();
        check_degree(deg, MAX_DEGREE_GUARD)?;
        let mut out = Self::zero();
        for ((x1, y1), c1) in self.terms() {
            for ((x2, y2), c2) in rhs.terms() {
                out.add_term(x1 + x2, y1 + y2, c1 * c2);
            }
        }
        Ok(out)
    }

    pub fn pow(&self, n: u32) -> Result<Self> {
        let mut acc = Self::constant(ExactScalar::one());
        for _ in 0..n {
            acc = acc.mul(self)?;
        }
        Ok(acc)
    }

    /// `H_n(f x + g y)` as an exact polynomial.
    pub fn hermite_linear(n: u32, f: &ExactScalar, g: &ExactScalar) -> Result<Self> {
        let poly = hermite_coefficients(n)?;
        let mut lin = Self::zero();
        lin.add_term(1, 0, f.clone());
        lin.add_term(0, 1, g.clone());
        let mut out = Self::zero();
        let mut power = Self::constant(ExactScalar::one());
        for (k, c) in poly.coeffs.iter().enumerate() {
            if k > 0 {
                power = power.mul(&lin)?;
            }
            if !c.is_zero() {
                out = out.add(&power.scale(&ExactScalar::from_bigint(c)));
            }
        }
        Ok(out)
    }

    /// `H_{m,n}(x, y)` as an exact polynomial.
    pub fn two_var_hermite(m: u32, n: u32) -> Result<Self> {
        let table = two_var_hermite_coefficients(m, n)?;
        let mut out = Self::zero();
        for (&(j, k), c) in &table.coeffs {
            out.add_term(j, k, ExactScalar::from_bigint(c));
        }
        Ok(out)
    }

    pub fn eval(&self, x: &ExactScalar, y: &ExactScalar) -> ExactScalar {
        let mut acc = ExactScalar::zero();
        for ((ex, ey), c) in self.terms() {
            acc = &acc + &(&(c * &x.pow(ex)) * &y.pow(ey));
        }
        acc
    }

    pub fn eval_c64(&self, x: Complex64, y: Complex64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for ((ex, ey), c) in self.terms() {
            acc += c.to_c64() * x.powu(ex) * y.powu(ey);
        }
        acc
    }
}

impl fmt::Display for Poly2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut list: Vec<_> = self.terms.iter().collect();
        list.sort_by_key(|(&(ex, ey), _)| (std::cmp::Reverse(ex + ey), std::cmp::Reverse(ex)));
        write_terms(
            f,
            list.into_iter()
                .map(|(&(ex, ey), c)| (c.clone(), monomial_str_2(ex, ey))),
        )
    }
}

fn monomial_str_1(e: u32) -> String {
    match e {
        0 => String::new(),
        1 => "x".to_string(),
        _ => format!("x^{}", e),
    }
}

fn monomial_str_2(ex: u32, ey: u32) -> String {
    let mut parts = Vec::new();
    match ex {
        0 => {}
        1 => parts.push("x".to_string()),
        _ => parts.push(format!("x^{}", ex)),
    }
    match ey {
        0 => {}
        1 => parts.push("y".to_string()),
        _ => parts.push(format!("y^{}", ey)),
    }
    parts.join("*")
}

/// Shared term-joining logic for plain-text rendering.
///
/// Single-component scalars get their sign folded into the joiner; anything
/// mixed is parenthesized so the output re-parses to the same value.
pub(crate) fn write_terms<I>(f: &mut fmt::Formatter<'_>, terms: I) -> fmt::Result
where
    I: Iterator<Item = (ExactScalar, String)>,
{
    let mut wrote = false;
    for (coeff, mono) in terms {
        if coeff.is_zero() {
            continue;
        }
        let (sign_negative, body) = render_coeff_mono(&coeff, &mono);
        if wrote {
            write!(f, " {} {}", if sign_negative { "-" } else { "+" }, body)?;
        } else {
            if sign_negative {
                write!(f, "-{}", body)?;
            } else {
                write!(f, "{}", body)?;
            }
            wrote = true;
        }
    }
    if !wrote {
        write!(f, "0")?;
    }
    Ok(())
}

/// Split a term into (negative sign, unsigned body).
fn render_coeff_mono(coeff: &ExactScalar, mono: &str) -> (bool, String) {
    let components = [&coeff.r1, &coeff.r2, &coeff.i1, &coeff.i2];
    let nonzero = components.iter().filter(|c| !c.is_zero()).count();
    if nonzero > 1 {
        let body = if mono.is_empty() {
            format!("({})", coeff)
        } else {
            format!("({})*{}", coeff, mono)
        };
        return (false, body);
    }
    // exactly one nonzero component: extract its rational sign
    let negative = components.iter().any(|c| c.is_negative());
    let magnitude = if negative { -coeff.clone() } else { coeff.clone() };
    let body = if mono.is_empty() {
        magnitude.to_string()
    } else if magnitude.is_one() {
        mono.to_string()
    } else {
        format!("{}*{}", magnitude, mono)
    };
    (negative, body)
}

#[cfg(test)]
pub(crate) fn big_ratio(n: BigInt, d: BigInt) -> BigRational {
    BigRational::new(n, d)
}

pub(crate) fn rat_to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn int(n: i64) -> ExactScalar {
        ExactScalar::from_int(n)
    }

    /// Independent oracle: coefficients of H_n from the series expansion of
    /// exp(-t^2 + 2 t z), i.e. H_n(z) = sum_j (-1)^j n!/(j! (n-2j)!) (2z)^{n-2j}.
    fn hermite_coeffs_from_series(n: u32) -> Vec<BigInt> {
        let mut coeffs = vec![BigInt::zero(); n as usize + 1];
        let n_fact = factorial(n);
        for j in 0..=(n / 2) {
            let k = n - 2 * j;
            let mut c = &n_fact / (factorial(j) * factorial(k));
            c *= BigInt::from(2).pow(k);
            if j % 2 == 1 {
                c = -c;
            }
            coeffs[k as usize] = c;
        }
        coeffs
    }

    #[test]
    fn low_degree_tables() {
        assert_eq!(hermite_coefficients(0).unwrap().coeffs, vec![BigInt::from(1)]);
        assert_eq!(
            hermite_coefficients(1).unwrap().coeffs,
            vec![BigInt::from(0), BigInt::from(2)]
        );
        // series oracle fixes H_2 = 4z^2 - 2 and H_3 = 8z^3 - 12z
        assert_eq!(
            hermite_coefficients(2).unwrap().coeffs,
            hermite_coeffs_from_series(2)
        );
        assert_eq!(
            hermite_coefficients(2).unwrap().coeffs,
            vec![BigInt::from(-2), BigInt::from(0), BigInt::from(4)]
        );
        assert_eq!(
            hermite_coefficients(3).unwrap().coeffs,
            vec![
                BigInt::from(0),
                BigInt::from(-12),
                BigInt::from(0),
                BigInt::from(8)
            ]
        );
    }

    #[test]
    fn recurrence_matches_series_expansion() {
        for n in 0..=20 {
            assert_eq!(
                hermite_coefficients(n).unwrap().coeffs,
                hermite_coeffs_from_series(n),
                "H_{}",
                n
            );
        }
    }

    #[test]
    fn degree_guard() {
        assert!(hermite_coefficients(64).is_ok());
        assert!(matches!(
            hermite_coefficients(65),
            Err(Error::DegreeTooLarge { .. })
        ));
        assert!(hermite_coefficients_with_guard(100, 128).is_ok());
        // guard is capped: requesting past the ceiling still fails
        assert!(matches!(
            hermite_coefficients_with_guard(300, 1000),
            Err(Error::DegreeTooLarge { .. })
        ));
    }

    #[test]
    fn eval_examples() {
        assert_eq!(hermite_eval(2, &int(0)).unwrap(), int(-2));
        assert_eq!(hermite_eval(3, &int(-1)).unwrap(), int(4));
        assert_eq!(hermite_eval(3, &int(1)).unwrap(), int(-4));
        assert_eq!(
            hermite_eval(1, &ExactScalar::i()).unwrap(),
            &int(2) * &ExactScalar::i()
        );
    }

    #[test]
    fn two_var_low_indices() {
        let h00 = two_var_hermite_coefficients(0, 0).unwrap();
        assert_eq!(h00.coeffs.len(), 1);
        assert_eq!(h00.coeffs[&(0, 0)], BigInt::one());

        // H_{1,1} = xy - 1
        let h11 = two_var_hermite_coefficients(1, 1).unwrap();
        assert_eq!(h11.coeffs[&(1, 1)], BigInt::one());
        assert_eq!(h11.coeffs[&(0, 0)], BigInt::from(-1));

        // H_{2,1} = x^2 y - 2x
        let h21 = two_var_hermite_coefficients(2, 1).unwrap();
        assert_eq!(h21.coeffs[&(2, 1)], BigInt::one());
        assert_eq!(h21.coeffs[&(1, 0)], BigInt::from(-2));
    }

    /// Independent oracle for the two-variable table: expand
    /// exp(-t t' + t x + t' y) as a triple series and collect the
    /// coefficient of t^m t'^n scaled by m! n!.
    fn two_var_from_series(m: u32, n: u32) -> BTreeMap<(u32, u32), BigRational> {
        let mut acc: BTreeMap<(u32, u32), BigRational> = BTreeMap::new();
        for l in 0..=m.min(n) {
            let j = m - l;
            let k = n - l;
            let mut c = big_ratio(
                &factorial(m) * &factorial(n),
                &factorial(l) * &factorial(j) * &factorial(k),
            );
            if l % 2 == 1 {
                c = -c;
            }
            let entry = acc.entry((j, k)).or_insert_with(BigRational::zero);
            *entry += c;
        }
        acc.retain(|_, v| !v.is_zero());
        acc
    }

    #[test]
    fn two_var_closed_form_matches_series_through_order_8() {
        for m in 0..=8u32 {
            for n in 0..=(8 - m) {
                let table = two_var_hermite_coefficients(m, n).unwrap();
                let oracle = two_var_from_series(m, n);
                assert_eq!(table.coeffs.len(), oracle.len());
                for (k, v) in &table.coeffs {
                    assert_eq!(
                        BigRational::from_integer(v.clone()),
                        oracle[k],
                        "H_{{{},{}}} at {:?}",
                        m,
                        n,
                        k
                    );
                }
            }
        }
    }

    #[test]
    fn two_var_eval_examples() {
        assert_eq!(two_var_hermite_eval(1, 1, &int(2), &int(3)).unwrap(), int(5));
        let a = two_var_hermite_eval(2, 1, &int(1), &int(1)).unwrap();
        let b = two_var_hermite_eval(1, 2, &int(1), &int(1)).unwrap();
        assert_eq!(a, int(-1));
        assert_eq!(a, b);
        assert_eq!(two_var_hermite_eval(0, 2, &int(5), &int(2)).unwrap(), int(4));
    }

    #[test]
    fn derivative_identity_on_coefficients() {
        // H_n' = 2n H_{n-1} at the coefficient level
        for n in 1..=16u32 {
            let hn = hermite_coefficients(n).unwrap();
            let hn1 = hermite_coefficients(n - 1).unwrap();
            for k in 0..n {
                let derived = hn.coeff(k + 1) * BigInt::from(k + 1);
                let expected = BigInt::from(2 * n as u64) * hn1.coeff(k);
                assert_eq!(derived, expected);
            }
        }
    }

    #[test]
    fn generating_function_truncation() {
        // partial sums of sum t^n/n! H_n(z) match the Taylor expansion of
        // exp(-t^2 + 2tz) through order N, coefficient-exact in Q[z].
        let order = 12u32;
        for n in 0..=order {
            let from_table: Vec<BigRational> = hermite_coefficients(n)
                .unwrap()
                .coeffs
                .iter()
                .map(|c| big_ratio(c.clone(), factorial(n)))
                .collect();
            // coefficient of t^n in exp(-t^2) exp(2tz):
            // sum over 2j + k = n of (-1)^j/j! * (2z)^k/k!
            let mut expected = vec![BigRational::zero(); n as usize + 1];
            for j in 0..=(n / 2) {
                let k = n - 2 * j;
                let mut c = big_ratio(BigInt::from(2).pow(k), &factorial(j) * &factorial(k));
                if j % 2 == 1 {
                    c = -c;
                }
                expected[k as usize] = c;
            }
            assert_eq!(from_table, expected, "t^{} coefficient", n);
        }
    }

    #[test]
    fn wavefunction_values() {
        let psi0 = wavefunction_eval(0, 0.0).unwrap();
        assert!((psi0 - 0.7511255444649425).abs() < 1e-14);
        assert_eq!(wavefunction_eval(1, 0.0).unwrap(), 0.0);
        assert!(wavefunction_eval(33, 0.0).is_err());
        // spot check against the definition at moderate argument
        let n = 6u32;
        let x = 1.7f64;
        let h = hermite_eval_c64(n, Complex64::new(x, 0.0)).unwrap().re;
        let norm = (2f64.powi(n as i32) * 720.0 * std::f64::consts::PI.sqrt()).sqrt();
        let direct = h * (-x * x / 2.0).exp() / norm;
        let stable = wavefunction_eval(n, x).unwrap();
        assert!((direct - stable).abs() / stable.abs() < 1e-12);
    }

    #[test]
    fn caches_survive_concurrent_access() {
        let handles: Vec<_> = (0..8)
            .map(|k| {
                std::thread::spawn(move || {
                    for n in 0..=(20 + k) {
                        let poly = hermite_coefficients(n).unwrap();
                        assert_eq!(poly.coeffs[n as usize], BigInt::from(2).pow(n));
                        let _ = binomial(n + 4, n / 2 + 1);
                    }
                })
            })
            .collect();
        for h in handles {
            h.join().unwrap();
        }
    }

    #[test]
    fn poly_display() {
        assert_eq!(hermite_coefficients(3).unwrap().to_string(), "8*z^3 - 12*z");
        assert_eq!(hermite_coefficients(0).unwrap().to_string(), "1");
        let p = Poly1::hermite_scaled(2, &ExactScalar::ratio(3, 5)).unwrap();
        assert_eq!(p.to_string(), "36/25*x^2 - 2");
    }

    #[test]
    fn poly_shift_and_eval() {
        // (x+1)^2 = x^2 + 2x + 1
        let p = Poly1::var().pow(2).unwrap();
        let shifted = p.shift(&int(1));
        assert_eq!(shifted.eval(&int(0)), int(1));
        assert_eq!(shifted.eval(&int(1)), int(4));
        assert_eq!(shifted.degree(), 2);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn recurrence_at_random_points(n in 1u32..=13, p in -9i64..=9, q in 1i64..=4) {
            let z = ExactScalar::from_ratio(BigRational::new(BigInt::from(p), BigInt::from(q)));
            let lhs = hermite_eval(n + 1, &z).unwrap();
            let mid = &(&int(2) * &z) * &hermite_eval(n, &z).unwrap();
            let low = &int(2 * n as i64) * &hermite_eval(n - 1, &z).unwrap();
            prop_assert_eq!(lhs, &mid - &low);
        }

        #[test]
        fn parity(n in 0u32..=14, p in -9i64..=9, q in 1i64..=4) {
            let z = ExactScalar::from_ratio(BigRational::new(BigInt::from(p), BigInt::from(q)));
            let plus = hermite_eval(n, &z).unwrap();
            let minus = hermite_eval(n, &-&z).unwrap();
            let expected = if n % 2 == 0 { plus.clone() } else { -&plus };
            prop_assert_eq!(minus, expected);
        }

        #[test]
        fn two_var_symmetry(m in 0u32..=6, n in 0u32..=6, a in -5i64..=5, b in -5i64..=5) {
            let x = int(a);
            let y = int(b);
            let lhs = two_var_hermite_eval(m, n, &x, &y).unwrap();
            let rhs = two_var_hermite_eval(n, m, &y, &x).unwrap();
            prop_assert_eq!(lhs, rhs);
        }
    }
}
