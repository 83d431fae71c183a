//! Two-mode bosonic operator algebra in canonical normal-ordered form.
//!
//! An expression is a finite linear combination of words
//! `ad^p a^q bd^r b^s` (creation operators left), stored as a map from
//! exponent tuple to coefficient. Products are rewritten into this form with
//! the closed-form Wick rule
//!
//! ```text
//! a^q ad^p = sum_k k! C(q,k) C(p,k) ad^(p-k) a^(q-k)
//! ```
//!
//! applied independently per mode; the two modes commute. A term-by-term
//! rewriting oracle using only `a ad -> ad a + 1` lives in [`oracle`] and is
//! kept as the slow reference the fast path is tested against.

use std::collections::BTreeMap;
use std::fmt;


use num_complex::Complex64;

use crate::polynomials::{self, binomial, factorial, hermite_coefficients, two_var_hermite_coefficients};
use crate::scalars::{Coefficient, ExactScalar};
use crate::{Error, Result};

/// Ceiling on the total degree `p + q + r + s` of any stored word.
pub const MAX_TOTAL_DEGREE: u32 = 4 * polynomials::DEFAULT_DEGREE_GUARD;

/// A normal-ordered word `ad^p a^q bd^r b^s`.
///
/// The derived ordering is lexicographic in `(p, q, r, s)`, which fixes the
/// canonical term order used for printing and map comparison.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Default)]
pub struct NormalMonomial {
    pub p: u32,
    pub q: u32,
    pub r: u32,
    pub s: u32,
}

impl NormalMonomial {
    pub fn new(p: u32, q: u32, r: u32, s: u32) -> Self {
        NormalMonomial { p, q, r, s }
    }

    pub fn identity() -> Self {
        Self::default()
    }

    pub fn degree(&self) -> u32 {
        self.p + self.q + self.r + self.s
    }

    pub fn is_identity(&self) -> bool {
        self.degree() == 0
    }

    /// Plain-text form, e.g. `ad^2*a*bd`.
    pub fn render(&self) -> String {
        let mut parts = Vec::new();
        for (name, e) in [("ad", self.p), ("a", self.q), ("bd", self.r), ("b", self.s)] {
            match e {
                0 => {}
                1 => parts.push(name.to_string()),
                _ => parts.push(format!("{}^{}", name, e)),
            }
        }
        parts.join("*")
    }
}

/// A finite linear combination of normal-ordered words.
///
/// No zero coefficients are stored, so two expressions are equal exactly when
/// their term maps are equal.
#[derive(Clone, PartialEq, Debug)]
pub struct OperatorExpr<C: Coefficient = ExactScalar> {
    terms: BTreeMap<NormalMonomial, C>,
}

impl<C: Coefficient> Default for OperatorExpr<C> {
    fn default() -> Self {
        OperatorExpr {
            terms: BTreeMap::new(),
        }
    }
}

impl<C: Coefficient> OperatorExpr<C> {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::scalar(C::one())
    }

    pub fn scalar(c: C) -> Self {
        let mut e = Self::zero();
        e.add_term(NormalMonomial::identity(), c);
        e
    }

    pub fn from_monomial(m: NormalMonomial, c: C) -> Self {
        let mut e = Self::zero();
        e.add_term(m, c);
        e
    }

    pub fn add_term(&mut self, m: NormalMonomial, c: C) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(existing) => {
                let sum = existing.add(&c);
                if sum.is_zero() {
                    self.terms.remove(&m);
                } else {
                    *existing = sum;
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&NormalMonomial, &C)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, m: &NormalMonomial) -> C {
        self.terms.get(m).cloned().unwrap_or_else(C::zero)
    }

    /// Coefficient of the empty word (the scalar part).
    pub fn scalar_part(&self) -> C {
        self.coeff(&NormalMonomial::identity())
    }

    pub fn max_degree(&self) -> u32 {
        self.terms.keys().map(|m| m.degree()).max().unwrap_or(0)
    }

    pub fn add(&self, rhs: &Self) -> Self {
        let mut out = self.clone();
        for (m, c) in rhs.terms() {
            out.add_term(*m, c.clone());
        }
        out
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        let mut out = self.clone();
        for (m, c) in rhs.terms() {
            out.add_term(*m, c.neg());
        }
        out
    }

    pub fn scale(&self, c: &C) -> Self {
        let mut out = Self::zero();
        for (m, coeff) in self.terms() {
            out.add_term(*m, coeff.mul(c));
        }
        out
    }

    pub fn neg(&self) -> Self {
        let mut out = Self::zero();
        for (m, coeff) in self.terms() {
            out.add_term(*m, coeff.neg());
        }
        out
    }

    /// Normal-ordered product, the algebra's true multiplication.
    pub fn normal_order_multiply(&self, rhs: &Self) -> Result<Self> {
        let degree = self.max_degree() + rhs.max_degree();
        if degree > MAX_TOTAL_DEGREE {
            return Err(Error::DegreeTooLarge {
                requested: degree,
                guard: MAX_TOTAL_DEGREE,
            });
        }
        let mut out = Self::zero();
        for (m1, c1) in self.terms() {
            for (m2, c2) in rhs.terms() {
                let c = c1.mul(c2);
                wick_pair_into(&mut out, m1, m2, &c);
            }
        }
        Ok(out)
    }

    /// Product with all generators treated as commuting, i.e. multiplication
    /// inside the normal-ordering symbol: exponents just add.
    pub fn commuting_multiply(&self, rhs: &Self) -> Result<Self> {
        let degree = self.max_degree() + rhs.max_degree();
        if degree > MAX_TOTAL_DEGREE {
            return Err(Error::DegreeTooLarge {
                requested: degree,
                guard: MAX_TOTAL_DEGREE,
            });
        }
        let mut out = Self::zero();
        for (m1, c1) in self.terms() {
            for (m2, c2) in rhs.terms() {
                let m = NormalMonomial::new(m1.p + m2.p, m1.q + m2.q, m1.r + m2.r, m1.s + m2.s);
                out.add_term(m, c1.mul(c2));
            }
        }
        Ok(out)
    }

    pub fn wick_pow(&self, n: u32) -> Result<Self> {
        let mut acc = Self::one();
        for _ in 0..n {
            acc = acc.normal_order_multiply(self)?;
        }
        Ok(acc)
    }

    pub fn commuting_pow(&self, n: u32) -> Result<Self> {
        let mut acc = Self::one();
        for _ in 0..n {
            acc = acc.commuting_multiply(self)?;
        }
        Ok(acc)
    }

    /// Map every coefficient, dropping terms that land on zero.
    pub fn map_coeffs<D: Coefficient>(&self, f: impl Fn(&C) -> D) -> OperatorExpr<D> {
        let mut out = OperatorExpr::zero();
        for (m, c) in self.terms() {
            out.add_term(*m, f(c));
        }
        out
    }

    /// Largest absolute difference between coefficients of two expressions,
    /// over the union of their words.
    pub fn max_abs_diff(&self, rhs: &Self) -> f64 {
        let mut keys: Vec<NormalMonomial> = self.terms.keys().copied().collect();
        keys.extend(rhs.terms.keys().copied());
        keys.sort();
        keys.dedup();
        keys.iter()
            .map(|m| (self.coeff(m).to_c64() - rhs.coeff(m).to_c64()).norm())
            .fold(0.0, f64::max)
    }
}

/// Wick product of two normal-ordered words, accumulated into `out`:
/// contractions happen independently in each mode.
fn wick_pair_into<C: Coefficient>(
    out: &mut OperatorExpr<C>,
    m1: &NormalMonomial,
    m2: &NormalMonomial,
    c: &C,
) {
    for k in 0..=m1.q.min(m2.p) {
        let factor_a = factorial(k) * binomial(m1.q, k) * binomial(m2.p, k);
        for l in 0..=m1.s.min(m2.r) {
            let factor_b = factorial(l) * binomial(m1.s, l) * binomial(m2.r, l);
            let m = NormalMonomial::new(
                m1.p + m2.p - k,
                m1.q + m2.q - k,
                m1.r + m2.r - l,
                m1.s + m2.s - l,
            );
            out.add_term(m, c.mul(&C::from_bigint(&(&factor_a * &factor_b))));
        }
    }
}

/// Canonical plain-text rendering: descending lexicographic in
/// `(p, q, r, s)`, so the highest creation powers print first.
impl fmt::Display for OperatorExpr<ExactScalar> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        polynomials::write_terms(f, self.terms.iter().rev().map(|(m, c)| (c.clone(), m.render())))
    }
}

/// A linear combination `c_a a + c_adag ad + c_b b + c_bdag bd`.
#[derive(Clone, PartialEq, Debug)]
pub struct LinearForm<C: Coefficient = ExactScalar> {
    pub c_a: C,
    pub c_adag: C,
    pub c_b: C,
    pub c_bdag: C,
}

impl<C: Coefficient> LinearForm<C> {
    pub fn new(c_a: C, c_adag: C, c_b: C, c_bdag: C) -> Self {
        LinearForm {
            c_a,
            c_adag,
            c_b,
            c_bdag,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.c_a.is_zero() && self.c_adag.is_zero() && self.c_b.is_zero() && self.c_bdag.is_zero()
    }

    pub fn to_expr(&self) -> OperatorExpr<C> {
        let mut e = OperatorExpr::zero();
        e.add_term(NormalMonomial::new(0, 1, 0, 0), self.c_a.clone());
        e.add_term(NormalMonomial::new(1, 0, 0, 0), self.c_adag.clone());
        e.add_term(NormalMonomial::new(0, 0, 0, 1), self.c_b.clone());
        e.add_term(NormalMonomial::new(0, 0, 1, 0), self.c_bdag.clone());
        e
    }

    pub fn scale(&self, c: &C) -> Self {
        LinearForm::new(
            self.c_a.mul(c),
            self.c_adag.mul(c),
            self.c_b.mul(c),
            self.c_bdag.mul(c),
        )
    }

    pub fn add(&self, rhs: &Self) -> Self {
        LinearForm::new(
            self.c_a.add(&rhs.c_a),
            self.c_adag.add(&rhs.c_adag),
            self.c_b.add(&rhs.c_b),
            self.c_bdag.add(&rhs.c_bdag),
        )
    }

    /// Scalar value of the commutator `[self, rhs]`; linear forms always
    /// commute up to a scalar.
    pub fn commutator(&self, rhs: &Self) -> C {
        // [a, ad] = [b, bd] = 1, every other pair commutes
        let a_part = self.c_a.mul(&rhs.c_adag).sub(&self.c_adag.mul(&rhs.c_a));
        let b_part = self.c_b.mul(&rhs.c_bdag).sub(&self.c_bdag.mul(&rhs.c_b));
        a_part.add(&b_part)
    }

    pub fn map<D: Coefficient>(&self, f: impl Fn(&C) -> D) -> LinearForm<D> {
        LinearForm::new(f(&self.c_a), f(&self.c_adag), f(&self.c_b), f(&self.c_bdag))
    }
}

impl LinearForm<ExactScalar> {
    pub fn to_complex(&self) -> LinearForm<Complex64> {
        self.map(|c| c.to_c64())
    }
}

/// Named operator symbols accepted by [`make_linear_form`].
pub const KNOWN_SYMBOLS: &[&str] = &[
    "X", "Y", "Px", "Py", "P", "a", "ad", "b", "bd", "a+bd", "ad+b",
];

/// Build the linear form for a named operator.
///
/// `X = (a + ad)/sqrt2`, `P = Px = (a - ad)/(i sqrt2)`, with `Y`, `Py` the
/// second-mode analogues.
pub fn make_linear_form(symbol: &str) -> Result<LinearForm<ExactScalar>> {
    let zero = ExactScalar::zero;
    let one = ExactScalar::one;
    // 1/sqrt2 = sqrt2/2
    let inv_sqrt2 = &ExactScalar::ratio(1, 2) * &ExactScalar::sqrt2();
    // 1/(i sqrt2) = -i sqrt2 / 2
    let inv_i_sqrt2 = &(&ExactScalar::ratio(-1, 2) * &ExactScalar::i()) * &ExactScalar::sqrt2();
    let form = match symbol {
        "X" => LinearForm::new(inv_sqrt2.clone(), inv_sqrt2, zero(), zero()),
        "Y" => LinearForm::new(zero(), zero(), inv_sqrt2.clone(), inv_sqrt2),
        "P" | "Px" => LinearForm::new(inv_i_sqrt2.clone(), -&inv_i_sqrt2, zero(), zero()),
        "Py" => LinearForm::new(zero(), zero(), inv_i_sqrt2.clone(), -&inv_i_sqrt2),
        "a" => LinearForm::new(one(), zero(), zero(), zero()),
        "ad" => LinearForm::new(zero(), one(), zero(), zero()),
        "b" => LinearForm::new(zero(), zero(), one(), zero()),
        "bd" => LinearForm::new(zero(), zero(), zero(), one()),
        "a+bd" => LinearForm::new(one(), zero(), zero(), one()),
        "ad+b" => LinearForm::new(zero(), one(), one(), zero()),
        _ => return Err(Error::UnknownSymbol(symbol.to_string())),
    };
    Ok(form)
}

/// `H_n(L)` fully normal ordered: substitute the linear form into the
/// Hermite coefficient table, expanding powers with the Wick product.
pub fn hermite_of_operator<C: Coefficient>(n: u32, form: &LinearForm<C>) -> Result<OperatorExpr<C>> {
    hermite_substitute(n, form, true)
}

/// `:H_n(L):` — the Hermite polynomial expanded with all generators treated
/// as commuting, then read off as normal-ordered words.
pub fn normal_symbol_hermite<C: Coefficient>(
    n: u32,
    form: &LinearForm<C>,
) -> Result<OperatorExpr<C>> {
    hermite_substitute(n, form, false)
}

fn hermite_substitute<C: Coefficient>(
    n: u32,
    form: &LinearForm<C>,
    wick: bool,
) -> Result<OperatorExpr<C>> {
    let poly = hermite_coefficients(n)?;
    let base = form.to_expr();
    let mut acc = OperatorExpr::zero();
    let mut power = OperatorExpr::one();
    for (k, c) in poly.coeffs.iter().enumerate() {
        if k > 0 {
            power = if wick {
                power.normal_order_multiply(&base)?
            } else {
                power.commuting_multiply(&base)?
            };
        }
        if !num_traits::Zero::is_zero(c) {
            acc = acc.add(&power.scale(&C::from_bigint(c)));
        }
    }
    Ok(acc)
}

/// `:L^n:` — the commuting power of a linear form.
pub fn normal_symbol_power<C: Coefficient>(form: &LinearForm<C>, n: u32) -> Result<OperatorExpr<C>> {
    form.to_expr().commuting_pow(n)
}

/// `L^n` as a true operator power, normal ordered.
pub fn wick_power<C: Coefficient>(form: &LinearForm<C>, n: u32) -> Result<OperatorExpr<C>> {
    form.to_expr().wick_pow(n)
}

/// `H_{m,n}(L1, L2)` for commuting linear forms.
///
/// With `inside_normal_symbol` set, powers expand with commuting
/// multiplication (the `:H_{m,n}(...):` right-hand sides); otherwise with the
/// Wick product. The cross commutator must vanish, otherwise the polynomial
/// substitution is ill-defined.
pub fn two_var_hermite_of_operators<C: Coefficient>(
    m: u32,
    n: u32,
    form1: &LinearForm<C>,
    form2: &LinearForm<C>,
    inside_normal_symbol: bool,
) -> Result<OperatorExpr<C>> {
    let comm = form1.commutator(form2);
    if !comm.is_negligible() {
        return Err(Error::NonCommutingArguments(comm.render()));
    }
    let table = two_var_hermite_coefficients(m, n)?;
    let e1 = form1.to_expr();
    let e2 = form2.to_expr();
    let mul = |x: &OperatorExpr<C>, y: &OperatorExpr<C>| -> Result<OperatorExpr<C>> {
        if inside_normal_symbol {
            x.commuting_multiply(y)
        } else {
            x.normal_order_multiply(y)
        }
    };
    // precompute power ladders
    let mut pows1 = vec![OperatorExpr::one()];
    for j in 1..=m {
        let next = mul(&pows1[(j - 1) as usize], &e1)?;
        pows1.push(next);
    }
    let mut pows2 = vec![OperatorExpr::one()];
    for k in 1..=n {
        let next = mul(&pows2[(k - 1) as usize], &e2)?;
        pows2.push(next);
    }
    let mut acc = OperatorExpr::zero();
    for (&(j, k), c) in &table.coeffs {
        let prod = mul(&pows1[j as usize], &pows2[k as usize])?;
        acc = acc.add(&prod.scale(&C::from_bigint(c)));
    }
    Ok(acc)
}

/// A finite combination `sum c_{p,r} ad^p bd^r |00>`.
#[derive(Clone, PartialEq, Debug)]
pub struct FockKet<C: Coefficient = ExactScalar> {
    amps: BTreeMap<(u32, u32), C>,
}

impl<C: Coefficient> Default for FockKet<C> {
    fn default() -> Self {
        FockKet {
            amps: BTreeMap::new(),
        }
    }
}

impl<C: Coefficient> FockKet<C> {
    pub fn is_empty(&self) -> bool {
        self.amps.is_empty()
    }

    pub fn amps(&self) -> impl Iterator<Item = (&(u32, u32), &C)> {
        self.amps.iter()
    }

    pub fn coeff(&self, p: u32, r: u32) -> C {
        self.amps.get(&(p, r)).cloned().unwrap_or_else(C::zero)
    }

    pub fn num_terms(&self) -> usize {
        self.amps.len()
    }

    /// Normalized Fock amplitudes `c * sqrt(p! r!)` as complex doubles; the
    /// square-root factors generally leave the exact ring, so this view is
    /// float-only.
    pub fn fock_amplitudes_f64(&self) -> BTreeMap<(u32, u32), Complex64> {
        self.amps
            .iter()
            .map(|(&(p, r), c)| {
                let norm = (crate::polynomials::rat_to_f64(
                    &num_rational::BigRational::from_integer(factorial(p) * factorial(r)),
                ))
                .sqrt();
                ((p, r), c.to_c64() * norm)
            })
            .collect()
    }
}

impl fmt::Display for FockKet<ExactScalar> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.amps.is_empty() {
            return write!(f, "0");
        }
        polynomials::write_terms(
            f,
            self.amps.iter().map(|(&(p, r), c)| {
                let mono = NormalMonomial::new(p, 0, r, 0).render();
                let label = if mono.is_empty() {
                    "|00>".to_string()
                } else {
                    format!("{}|00>", mono)
                };
                (c.clone(), label)
            }),
        )
    }
}

/// Apply an expression to the two-mode vacuum: every word containing an
/// annihilator dies, the rest keep their coefficients.
pub fn apply_to_vacuum<C: Coefficient>(e: &OperatorExpr<C>) -> FockKet<C> {
    let mut ket = FockKet::default();
    for (m, c) in e.terms() {
        if m.q == 0 && m.s == 0 {
            ket.amps.insert((m.p, m.r), c.clone());
        }
    }
    ket
}

pub mod oracle {
    //! Slow reference normal ordering by pairwise rewriting.
    //!
    //! Words are reduced with the single rule `a ad -> ad a + 1` (per mode),
    //! nothing else. Quadratic-to-exponential in the exponents, so only fit
    //! for cross-checking the Wick closed form on small words.

    use std::collections::BTreeMap;

    use num_bigint::BigInt;
    use num_traits::{One, Zero};

    use super::{NormalMonomial, OperatorExpr};
    use crate::scalars::ExactScalar;

    #[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug)]
    enum Gen {
        Create,
        Annihilate,
    }

    /// Normal order the single-mode word `a^q ad^p` by rewriting; returns a
    /// map from `(creations, annihilations)` to integer coefficient.
    fn order_single_mode(q: u32, p: u32) -> BTreeMap<(u32, u32), BigInt> {
        let mut word = vec![Gen::Annihilate; q as usize];
        word.extend(vec![Gen::Create; p as usize]);
        let mut pending: BTreeMap<Vec<Gen>, BigInt> = BTreeMap::new();
        pending.insert(word, BigInt::one());
        let mut done: BTreeMap<(u32, u32), BigInt> = BTreeMap::new();
        while let Some((word, coeff)) = pending.pop_first() {
            // find the first annihilator immediately left of a creator
            match word
                .windows(2)
                .position(|w| w[0] == Gen::Annihilate && w[1] == Gen::Create)
            {
                None => {
                    let creations = word.iter().filter(|g| **g == Gen::Create).count() as u32;
                    let annihilations = word.len() as u32 - creations;
                    let entry = done
                        .entry((creations, annihilations))
                        .or_insert_with(BigInt::zero);
                    *entry += coeff;
                }
                Some(i) => {
                    // swap branch
                    let mut swapped = word.clone();
                    swapped.swap(i, i + 1);
                    let entry = pending.entry(swapped).or_insert_with(BigInt::zero);
                    *entry += &coeff;
                    // contraction branch
                    let mut contracted = word.clone();
                    contracted.drain(i..i + 2);
                    let entry = pending.entry(contracted).or_insert_with(BigInt::zero);
                    *entry += coeff;
                }
            }
        }
        done
    }

    /// Normal-ordered product of two words via pairwise rewriting only.
    pub fn rewrite_product(m1: &NormalMonomial, m2: &NormalMonomial) -> OperatorExpr<ExactScalar> {
        let mode_a = order_single_mode(m1.q, m2.p);
        let mode_b = order_single_mode(m1.s, m2.r);
        let mut out = OperatorExpr::zero();
        for ((pa, qa), ca) in &mode_a {
            for ((pb, qb), cb) in &mode_b {
                let m = NormalMonomial::new(m1.p + pa, qa + m2.q, m1.r + pb, qb + m2.s);
                out.add_term(m, ExactScalar::from_bigint(&(ca * cb)));
            }
        }
        out
    }
}
