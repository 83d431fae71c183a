//! Exact arithmetic in the ring Q(i, sqrt2).
//!
//! Every coefficient that appears when normal-ordering the operator
//! expressions handled by this crate lives in the ring generated over the
//! rationals by i and sqrt(2). An element is stored as four reduced
//! rationals
//!
//! ```text
//! r1 + r2*sqrt2 + (i1 + i2*sqrt2)*i
//! ```
//!
//! and the representation is unique, so equality of values is component-wise
//! equality and no tolerance ever enters an exact check.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::{Error, Result};

pub const SQRT_2: f64 = std::f64::consts::SQRT_2;

/// An element of Q(i, sqrt2): `r1 + r2*sqrt2 + (i1 + i2*sqrt2)*i`.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct ExactScalar {
    pub r1: BigRational,
    pub r2: BigRational,
    pub i1: BigRational,
    pub i2: BigRational,
}

impl ExactScalar {
    pub fn new(r1: BigRational, r2: BigRational, i1: BigRational, i2: BigRational) -> Self {
        ExactScalar { r1, r2, i1, i2 }
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::from_int(1)
    }

    /// The imaginary unit i.
    pub fn i() -> Self {
        ExactScalar::new(rat0(), rat0(), BigRational::one(), rat0())
    }

    /// The generator sqrt(2).
    pub fn sqrt2() -> Self {
        ExactScalar::new(rat0(), BigRational::one(), rat0(), rat0())
    }

    pub fn from_int(n: i64) -> Self {
        Self::from_ratio(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn from_bigint(n: &BigInt) -> Self {
        Self::from_ratio(BigRational::from_integer(n.clone()))
    }

    pub fn from_ratio(r: BigRational) -> Self {
        ExactScalar::new(r, rat0(), rat0(), rat0())
    }

    /// Convenience rational constructor `p/q`.
    pub fn ratio(p: i64, q: i64) -> Self {
        Self::from_ratio(BigRational::new(BigInt::from(p), BigInt::from(q)))
    }

    pub fn is_zero(&self) -> bool {
        self.r1.is_zero() && self.r2.is_zero() && self.i1.is_zero() && self.i2.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.r1.is_one() && self.r2.is_zero() && self.i1.is_zero() && self.i2.is_zero()
    }

    /// True when both imaginary components vanish.
    pub fn is_real(&self) -> bool {
        self.i1.is_zero() && self.i2.is_zero()
    }

    /// The purely rational view, if the sqrt2 and imaginary parts vanish.
    pub fn as_rational(&self) -> Option<&BigRational> {
        if self.r2.is_zero() && self.is_real() {
            Some(&self.r1)
        } else {
            None
        }
    }

    /// Complex conjugate: negates both imaginary components.
    pub fn conj(&self) -> Self {
        ExactScalar::new(
            self.r1.clone(),
            self.r2.clone(),
            -self.i1.clone(),
            -self.i2.clone(),
        )
    }

    /// `x^n` by repeated squaring; `x^0 = 1`.
    pub fn pow(&self, n: u32) -> Self {
        let mut result = Self::one();
        let mut base = self.clone();
        let mut e = n;
        while e > 0 {
            if e & 1 == 1 {
                result = &result * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        result
    }

    /// Multiplicative inverse. Q(i, sqrt2) is a field, so this succeeds for
    /// every nonzero element.
    ///
    /// Rationalizes in two stages: multiply by the complex conjugate to clear
    /// i, then by the sqrt2-conjugate to clear sqrt2.
    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let c = self.conj();
        let real = self * &c; // r1 + r2*sqrt2, real by construction
        debug_assert!(real.is_real());
        let real_conj = ExactScalar::new(real.r1.clone(), -real.r2.clone(), rat0(), rat0());
        // (r1 + r2*sqrt2)(r1 - r2*sqrt2) = r1^2 - 2 r2^2, a nonzero rational
        let norm = &real.r1 * &real.r1 - BigRational::from_integer(BigInt::from(2)) * &real.r2 * &real.r2;
        debug_assert!(!norm.is_zero());
        let scale = Self::from_ratio(norm.recip());
        Ok(&(&c * &real_conj) * &scale)
    }

    /// Nearest complex double; each component is converted independently.
    pub fn to_c64(&self) -> Complex64 {
        let re = rat_f64(&self.r1) + rat_f64(&self.r2) * SQRT_2;
        let im = rat_f64(&self.i1) + rat_f64(&self.i2) * SQRT_2;
        Complex64::new(re, im)
    }
}

fn rat0() -> BigRational {
    BigRational::zero()
}

fn rat_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

impl Add for &ExactScalar {
    type Output = ExactScalar;
    fn add(self, rhs: &ExactScalar) -> ExactScalar {
        ExactScalar::new(
            &self.r1 + &rhs.r1,
            &self.r2 + &rhs.r2,
            &self.i1 + &rhs.i1,
            &self.i2 + &rhs.i2,
        )
    }
}

impl Sub for &ExactScalar {
    type Output = ExactScalar;
    fn sub(self, rhs: &ExactScalar) -> ExactScalar {
        ExactScalar::new(
            &self.r1 - &rhs.r1,
            &self.r2 - &rhs.r2,
            &self.i1 - &rhs.i1,
            &self.i2 - &rhs.i2,
        )
    }
}

impl Neg for &ExactScalar {
    type Output = ExactScalar;
    fn neg(self) -> ExactScalar {
        ExactScalar::new(
            -self.r1.clone(),
            -self.r2.clone(),
            -self.i1.clone(),
            -self.i2.clone(),
        )
    }
}

impl Mul for &ExactScalar {
    type Output = ExactScalar;
    fn mul(self, rhs: &ExactScalar) -> ExactScalar {
        // Basis products: sqrt2*sqrt2 = 2, i*i = -1, (i sqrt2)^2 = -2,
        // sqrt2 * i = i sqrt2, sqrt2 * i sqrt2 = 2i, i * i sqrt2 = -sqrt2.
        let two = BigRational::from_integer(BigInt::from(2));
        let (a1, a2, a3, a4) = (&self.r1, &self.r2, &self.i1, &self.i2);
        let (b1, b2, b3, b4) = (&rhs.r1, &rhs.r2, &rhs.i1, &rhs.i2);
        let r1 = a1 * b1 + &two * a2 * b2 - a3 * b3 - &two * a4 * b4;
        let r2 = a1 * b2 + a2 * b1 - a3 * b4 - a4 * b3;
        let i1 = a1 * b3 + a3 * b1 + &two * a2 * b4 + &two * a4 * b2;
        let i2 = a1 * b4 + a4 * b1 + a2 * b3 + a3 * b2;
        ExactScalar::new(r1, r2, i1, i2)
    }
}

macro_rules! forward_owned_binop {
    ($trait:ident, $method:ident) => {
        impl $trait for ExactScalar {
            type Output = ExactScalar;
            fn $method(self, rhs: ExactScalar) -> ExactScalar {
                $trait::$method(&self, &rhs)
            }
        }
        impl $trait<&ExactScalar> for ExactScalar {
            type Output = ExactScalar;
            fn $method(self, rhs: &ExactScalar) -> ExactScalar {
                $trait::$method(&self, rhs)
            }
        }
        impl $trait<ExactScalar> for &ExactScalar {
            type Output = ExactScalar;
            fn $method(self, rhs: ExactScalar) -> ExactScalar {
                $trait::$method(self, &rhs)
            }
        }
    };
}

forward_owned_binop!(Add, add);
forward_owned_binop!(Sub, sub);
forward_owned_binop!(Mul, mul);

impl Neg for ExactScalar {
    type Output = ExactScalar;
    fn neg(self) -> ExactScalar {
        -&self
    }
}

/// Canonical text form: `p/q + r/s*sqrt2 + t/u*i + v/w*i*sqrt2` with zero
/// components omitted, or `0`.
impl fmt::Display for ExactScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: [(&BigRational, &str); 4] = [
            (&self.r1, ""),
            (&self.r2, "*sqrt2"),
            (&self.i1, "*i"),
            (&self.i2, "*i*sqrt2"),
        ];
        let mut wrote = false;
        for (coeff, marker) in parts {
            if coeff.is_zero() {
                continue;
            }
            if wrote {
                if coeff.is_negative() {
                    write!(f, " - {}{}", -coeff.clone(), marker)?;
                } else {
                    write!(f, " + {}{}", coeff, marker)?;
                }
            } else {
                write!(f, "{}{}", coeff, marker)?;
                wrote = true;
            }
        }
        if !wrote {
            write!(f, "0")?;
        }
        Ok(())
    }
}

/// Square root of a rational within Q(i, sqrt2).
///
/// Succeeds exactly when `|r|` is `s^2` or `2 s^2` for some rational `s`;
/// negative inputs produce the imaginary principal root. Failure is the
/// dispatch signal telling a caller that a parameter point is only legal in
/// numeric mode.
pub fn sqrt_in_ring(r: &BigRational) -> Result<ExactScalar> {
    if r.is_zero() {
        return Ok(ExactScalar::zero());
    }
    let mag = r.abs();
    let (root, is_sqrt2) = if let Some(s) = rational_sqrt(&mag) {
        (s, false)
    } else if let Some(s) = rational_sqrt(&(&mag / BigRational::from_integer(BigInt::from(2)))) {
        (s, true)
    } else {
        return Err(Error::NotRepresentable(r.clone()));
    };
    let mut out = ExactScalar::zero();
    match (r.is_negative(), is_sqrt2) {
        (false, false) => out.r1 = root,
        (false, true) => out.r2 = root,
        (true, false) => out.i1 = root,
        (true, true) => out.i2 = root,
    }
    Ok(out)
}

/// Exact rational square root of a non-negative rational, if one exists.
fn rational_sqrt(r: &BigRational) -> Option<BigRational> {
    debug_assert!(!r.is_negative());
    let n = integer_sqrt(r.numer())?;
    let d = integer_sqrt(r.denom())?;
    Some(BigRational::new(n, d))
}

fn integer_sqrt(n: &BigInt) -> Option<BigInt> {
    if n.is_negative() {
        return None;
    }
    let root = n.sqrt();
    if &(&root * &root) == n {
        Some(root)
    } else {
        None
    }
}

/// Coefficient domain for the operator algebra: either [`ExactScalar`] for
/// exact verification or [`Complex64`] for the floating-point path.
pub trait Coefficient: Clone + PartialEq + fmt::Debug {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, rhs: &Self) -> Self;
    fn sub(&self, rhs: &Self) -> Self;
    fn mul(&self, rhs: &Self) -> Self;
    fn neg(&self) -> Self;
    fn from_bigint(n: &BigInt) -> Self;
    fn from_exact(x: &ExactScalar) -> Self;
    fn to_c64(&self) -> Complex64;
    fn render(&self) -> String;
    /// Commutator checks in the float domain tolerate roundoff residue.
    fn is_negligible(&self) -> bool {
        self.is_zero()
    }
}

impl Coefficient for ExactScalar {
    fn zero() -> Self {
        ExactScalar::zero()
    }
    fn one() -> Self {
        ExactScalar::one()
    }
    fn is_zero(&self) -> bool {
        ExactScalar::is_zero(self)
    }
    fn add(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn sub(&self, rhs: &Self) -> Self {
        self - rhs
    }
    fn mul(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn neg(&self) -> Self {
        -self
    }
    fn from_bigint(n: &BigInt) -> Self {
        ExactScalar::from_bigint(n)
    }
    fn from_exact(x: &ExactScalar) -> Self {
        x.clone()
    }
    fn to_c64(&self) -> Complex64 {
        ExactScalar::to_c64(self)
    }
    fn render(&self) -> String {
        self.to_string()
    }
}

impl Coefficient for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn one() -> Self {
        Complex64::new(1.0, 0.0)
    }
    fn is_zero(&self) -> bool {
        self.re == 0.0 && self.im == 0.0
    }
    fn add(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn sub(&self, rhs: &Self) -> Self {
        self - rhs
    }
    fn mul(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn neg(&self) -> Self {
        -self
    }
    fn from_bigint(n: &BigInt) -> Self {
        Complex64::new(n.to_f64().unwrap_or(f64::NAN), 0.0)
    }
    fn from_exact(x: &ExactScalar) -> Self {
        x.to_c64()
    }
    fn to_c64(&self) -> Complex64 {
        *self
    }
    fn render(&self) -> String {
        if self.im == 0.0 {
            format!("{:.12e}", self.re)
        } else {
            format!("{:.12e} + {:.12e}*i", self.re, self.im)
        }
    }
    fn is_negligible(&self) -> bool {
        self.norm() <= 1e-12
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn rat(p: i64, q: i64) -> BigRational {
        BigRational::new(BigInt::from(p), BigInt::from(q))
    }

    fn scalar(r1: (i64, i64), r2: (i64, i64), i1: (i64, i64), i2: (i64, i64)) -> ExactScalar {
        ExactScalar::new(rat(r1.0, r1.1), rat(r2.0, r2.1), rat(i1.0, i1.1), rat(i2.0, i2.1))
    }

    #[test]
    fn conjugate_product_of_sqrt2_units() {
        let a = scalar((1, 1), (1, 1), (0, 1), (0, 1)); // 1 + sqrt2
        let b = scalar((1, 1), (-1, 1), (0, 1), (0, 1)); // 1 - sqrt2
        assert_eq!(&a * &b, ExactScalar::from_int(-1));
    }

    #[test]
    fn i_sqrt2_squares_to_minus_two() {
        let x = scalar((0, 1), (0, 1), (0, 1), (1, 1));
        assert_eq!(&x * &x, ExactScalar::from_int(-2));
    }

    #[test]
    fn mixed_product_matches_float_arithmetic() {
        // (1/2 + i) * (2 - i*sqrt2) = (1 + sqrt2) + (2 - sqrt2/2) i
        let a = scalar((1, 2), (0, 1), (1, 1), (0, 1));
        let b = scalar((2, 1), (0, 1), (0, 1), (-1, 1));
        let exact = &a * &b;
        assert_eq!(exact, scalar((1, 1), (1, 1), (2, 1), (-1, 2)));
        let float = a.to_c64() * b.to_c64();
        assert!((exact.to_c64() - float).norm() < 1e-12);
    }

    #[test]
    fn powers() {
        assert_eq!(ExactScalar::i().pow(4), ExactScalar::one());
        assert_eq!(
            ExactScalar::sqrt2().pow(3),
            scalar((0, 1), (2, 1), (0, 1), (0, 1))
        );
        // (1 + i)^2 = 2i, cross-checked against repeated multiplication
        let x = scalar((1, 1), (0, 1), (1, 1), (0, 1));
        assert_eq!(x.pow(2), &x * &x);
        assert_eq!(x.pow(2), scalar((0, 1), (0, 1), (2, 1), (0, 1)));
    }

    #[test]
    fn sqrt_in_ring_cases() {
        assert_eq!(sqrt_in_ring(&rat(9, 25)).unwrap(), ExactScalar::ratio(3, 5));
        assert_eq!(
            sqrt_in_ring(&rat(2, 9)).unwrap(),
            scalar((0, 1), (1, 3), (0, 1), (0, 1))
        );
        assert_eq!(
            sqrt_in_ring(&rat(-16, 25)).unwrap(),
            scalar((0, 1), (0, 1), (4, 5), (0, 1))
        );
        assert_eq!(sqrt_in_ring(&rat(0, 1)).unwrap(), ExactScalar::zero());
        assert!(matches!(
            sqrt_in_ring(&rat(3, 1)),
            Err(Error::NotRepresentable(_))
        ));
        // -1/2 = -(sqrt2/2)^2 * ... : |r| = 2*(1/2)^2 so root is (1/2) i sqrt2
        assert_eq!(
            sqrt_in_ring(&rat(-1, 2)).unwrap(),
            scalar((0, 1), (0, 1), (0, 1), (1, 2))
        );
    }

    #[test]
    fn to_float_components() {
        let x = scalar((1, 1), (1, 1), (0, 1), (0, 1));
        assert!((x.to_c64().re - 2.414213562373095).abs() < 1e-12);
        let y = scalar((0, 1), (0, 1), (0, 1), (1, 1));
        assert!((y.to_c64().im - std::f64::consts::SQRT_2).abs() < 1e-14);
        assert_eq!(ExactScalar::zero().to_c64(), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn inverse_is_exact() {
        let x = scalar((1, 2), (3, 1), (-2, 5), (1, 7));
        let inv = x.inv().unwrap();
        assert!((&x * &inv).is_one());
        assert!(ExactScalar::zero().inv().is_err());
        // 1/sqrt2 = sqrt2/2
        assert_eq!(
            ExactScalar::sqrt2().inv().unwrap(),
            scalar((0, 1), (1, 2), (0, 1), (0, 1))
        );
    }

    #[test]
    fn display_canonical_form() {
        assert_eq!(ExactScalar::zero().to_string(), "0");
        assert_eq!(ExactScalar::ratio(-3, 5).to_string(), "-3/5");
        let x = scalar((1, 2), (0, 1), (-1, 1), (1, 3));
        assert_eq!(x.to_string(), "1/2 - 1*i + 1/3*i*sqrt2");
    }

    fn arb_scalar() -> impl Strategy<Value = ExactScalar> {
        let part = (-20i64..=20, 1i64..=6).prop_map(|(p, q)| rat(p, q));
        (part.clone(), part.clone(), part.clone(), part)
            .prop_map(|(r1, r2, i1, i2)| ExactScalar::new(r1, r2, i1, i2))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(128))]

        #[test]
        fn ring_axioms(a in arb_scalar(), b in arb_scalar(), c in arb_scalar()) {
            prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
            prop_assert_eq!(&a * &b, &b * &a);
            prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
            prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        }

        #[test]
        fn conjugate_product_is_real(a in arb_scalar()) {
            prop_assert!((&a * &a.conj()).is_real());
        }

        #[test]
        fn sqrt_squares_back(p in -60i64..=60, q in 1i64..=12) {
            let r = rat(p, q);
            if let Ok(root) = sqrt_in_ring(&r) {
                prop_assert_eq!(&root * &root, ExactScalar::from_ratio(r));
            }
        }
    }
}
