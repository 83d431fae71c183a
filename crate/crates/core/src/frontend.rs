//! Expression surface syntax: lexer, recursive-descent parser, elaboration
//! into the operator algebra, and rendering.
//!
//! Grammar (whitespace insensitive):
//!
//! ```text
//! expr    := ('+'|'-')? term (('+'|'-') term)*
//! term    := factor ('*' factor)*
//! factor  := atom ('^' nat)?
//! atom    := rational | 'i' | 'sqrt2' | symbol
//!          | 'H' '(' nat ',' expr ')'
//!          | 'H2' '(' nat ',' nat ',' expr ',' expr ')'
//!          | ':' expr ':'
//!          | '(' expr ')'
//! rational := int ('/' int)?
//! ```
//!
//! `ad` and `bd` spell the daggered operators; `:` ... `:` is the
//! normal-ordering symbol, inside which all generators commute.

use std::fmt::Write as _;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use crate::boson::{
    hermite_of_operator, make_linear_form, normal_symbol_hermite, two_var_hermite_of_operators,
    LinearForm, NormalMonomial, OperatorExpr,
};
use crate::polynomials::Poly2;
use crate::scalars::ExactScalar;
use crate::{Error, Result};

/// Abstract syntax of a parsed expression.
#[derive(Clone, PartialEq, Debug)]
pub enum ExprAst {
    Rational(BigRational),
    ImagUnit,
    Sqrt2,
    Symbol(String),
    Neg(Box<ExprAst>),
    Add(Box<ExprAst>, Box<ExprAst>),
    Sub(Box<ExprAst>, Box<ExprAst>),
    Mul(Box<ExprAst>, Box<ExprAst>),
    Pow(Box<ExprAst>, u32),
    Hermite { n: u32, arg: Box<ExprAst> },
    Hermite2 { m: u32, n: u32, arg1: Box<ExprAst>, arg2: Box<ExprAst> },
    NormalOrder(Box<ExprAst>),
}

#[derive(Clone, PartialEq, Debug)]
enum Tok {
    Int(BigInt),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    Colon,
    Comma,
    End,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Int(v) => format!("integer `{}`", v),
            Tok::Ident(s) => format!("`{}`", s),
            Tok::Plus => "`+`".into(),
            Tok::Minus => "`-`".into(),
            Tok::Star => "`*`".into(),
            Tok::Slash => "`/`".into(),
            Tok::Caret => "`^`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::Colon => "`:`".into(),
            Tok::Comma => "`,`".into(),
            Tok::End => "end of input".into(),
        }
    }
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>> {
    let bytes = text.as_bytes();
    let mut toks = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        match c {
            ' ' | '\t' | '\r' | '\n' => i += 1,
            '+' => {
                toks.push((Tok::Plus, i));
                i += 1;
            }
            '-' => {
                toks.push((Tok::Minus, i));
                i += 1;
            }
            '*' => {
                toks.push((Tok::Star, i));
                i += 1;
            }
            '/' => {
                toks.push((Tok::Slash, i));
                i += 1;
            }
            '^' => {
                toks.push((Tok::Caret, i));
                i += 1;
            }
            '(' => {
                toks.push((Tok::LParen, i));
                i += 1;
            }
            ')' => {
                toks.push((Tok::RParen, i));
                i += 1;
            }
            ':' => {
                toks.push((Tok::Colon, i));
                i += 1;
            }
            ',' => {
                toks.push((Tok::Comma, i));
                i += 1;
            }
            '0'..='9' => {
                let start = i;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                let value: BigInt = text[start..i].parse().expect("digit run parses");
                toks.push((Tok::Int(value), start));
            }
            'a'..='z' | 'A'..='Z' => {
                let start = i;
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric()) {
                    i += 1;
                }
                toks.push((Tok::Ident(text[start..i].to_string()), start));
            }
            _ => {
                return Err(Error::Syntax {
                    position: i,
                    expected: format!("a token, found `{}`", c),
                })
            }
        }
    }
    toks.push((Tok::End, bytes.len()));
    Ok(toks)
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn peek_pos(&self) -> usize {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, want: Tok, expected: &str) -> Result<()> {
        if *self.peek() == want {
            self.bump();
            Ok(())
        } else {
            Err(self.error(expected))
        }
    }

    fn error(&self, expected: &str) -> Error {
        Error::Syntax {
            position: self.peek_pos(),
            expected: format!("{}, found {}", expected, self.peek().describe()),
        }
    }

    fn expr(&mut self) -> Result<ExprAst> {
        let negate = match self.peek() {
            Tok::Minus => {
                self.bump();
                true
            }
            Tok::Plus => {
                self.bump();
                false
            }
            _ => false,
        };
        let mut acc = self.term()?;
        if negate {
            acc = ExprAst::Neg(Box::new(acc));
        }
        loop {
            match self.peek() {
                Tok::Plus => {
                    self.bump();
                    let rhs = self.term()?;
                    acc = ExprAst::Add(Box::new(acc), Box::new(rhs));
                }
                Tok::Minus => {
                    self.bump();
                    let rhs = self.term()?;
                    acc = ExprAst::Sub(Box::new(acc), Box::new(rhs));
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<ExprAst> {
        let mut acc = self.factor()?;
        while *self.peek() == Tok::Star {
            self.bump();
            let rhs = self.factor()?;
            acc = ExprAst::Mul(Box::new(acc), Box::new(rhs));
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<ExprAst> {
        let base = self.atom()?;
        if *self.peek() == Tok::Caret {
            self.bump();
            let exp = self.nat("a natural exponent")?;
            return Ok(ExprAst::Pow(Box::new(base), exp));
        }
        Ok(base)
    }

    fn nat(&mut self, what: &str) -> Result<u32> {
        match self.peek().clone() {
            Tok::Int(v) => {
                let out = u32::try_from(&v).map_err(|_| self.error(what))?;
                self.bump();
                Ok(out)
            }
            _ => Err(self.error(what)),
        }
    }

    fn atom(&mut self) -> Result<ExprAst> {
        match self.peek().clone() {
            Tok::Int(numer) => {
                self.bump();
                if *self.peek() == Tok::Slash {
                    self.bump();
                    match self.peek().clone() {
                        Tok::Int(denom) if !denom.is_zero() => {
                            self.bump();
                            Ok(ExprAst::Rational(BigRational::new(numer, denom)))
                        }
                        _ => Err(self.error("a nonzero integer denominator")),
                    }
                } else {
                    Ok(ExprAst::Rational(BigRational::from_integer(numer)))
                }
            }
            Tok::Ident(name) => {
                self.bump();
                match name.as_str() {
                    "i" => Ok(ExprAst::ImagUnit),
                    "sqrt2" => Ok(ExprAst::Sqrt2),
                    "H" => {
                        self.expect(Tok::LParen, "`(` after H")?;
                        let n = self.nat("a natural Hermite index")?;
                        self.expect(Tok::Comma, "`,` between index and argument")?;
                        let arg = self.expr()?;
                        self.expect(Tok::RParen, "`)` closing H(...)")?;
                        Ok(ExprAst::Hermite { n, arg: Box::new(arg) })
                    }
                    "H2" => {
                        self.expect(Tok::LParen, "`(` after H2")?;
                        let m = self.nat("a natural Hermite index")?;
                        self.expect(Tok::Comma, "`,` between indices")?;
                        let n = self.nat("a natural Hermite index")?;
                        self.expect(Tok::Comma, "`,` before the first argument")?;
                        let arg1 = self.expr()?;
                        self.expect(Tok::Comma, "`,` between arguments")?;
                        let arg2 = self.expr()?;
                        self.expect(Tok::RParen, "`)` closing H2(...)")?;
                        Ok(ExprAst::Hermite2 {
                            m,
                            n,
                            arg1: Box::new(arg1),
                            arg2: Box::new(arg2),
                        })
                    }
                    _ => Ok(ExprAst::Symbol(name)),
                }
            }
            Tok::Colon => {
                self.bump();
                let inner = self.expr()?;
                self.expect(Tok::Colon, "`:` closing the normal-ordering symbol")?;
                Ok(ExprAst::NormalOrder(Box::new(inner)))
            }
            Tok::LParen => {
                self.bump();
                let inner = self.expr()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(inner)
            }
            _ => Err(self.error("an expression atom")),
        }
    }
}

/// Parse a complete expression string.
pub fn parse_expression(text: &str) -> Result<ExprAst> {
    let toks = lex(text)?;
    let mut parser = Parser { toks, pos: 0 };
    let ast = parser.expr()?;
    if *parser.peek() != Tok::End {
        return Err(parser.error("end of input"));
    }
    Ok(ast)
}

/// Evaluate a parsed tree into the canonical operator form.
pub fn elaborate(ast: &ExprAst) -> Result<OperatorExpr<ExactScalar>> {
    elab(ast, false)
}

fn elab(ast: &ExprAst, inside: bool) -> Result<OperatorExpr<ExactScalar>> {
    match ast {
        ExprAst::Rational(r) => Ok(OperatorExpr::scalar(ExactScalar::from_ratio(r.clone()))),
        ExprAst::ImagUnit => Ok(OperatorExpr::scalar(ExactScalar::i())),
        ExprAst::Sqrt2 => Ok(OperatorExpr::scalar(ExactScalar::sqrt2())),
        ExprAst::Symbol(name) => Ok(make_linear_form(name)?.to_expr()),
        ExprAst::Neg(e) => Ok(elab(e, inside)?.neg()),
        ExprAst::Add(l, r) => Ok(elab(l, inside)?.add(&elab(r, inside)?)),
        ExprAst::Sub(l, r) => Ok(elab(l, inside)?.sub(&elab(r, inside)?)),
        ExprAst::Mul(l, r) => {
            let l = elab(l, inside)?;
            let r = elab(r, inside)?;
            if inside {
                l.commuting_multiply(&r)
            } else {
                l.normal_order_multiply(&r)
            }
        }
        ExprAst::Pow(b, n) => {
            let b = elab(b, inside)?;
            if inside {
                b.commuting_pow(*n)
            } else {
                b.wick_pow(*n)
            }
        }
        ExprAst::Hermite { n, arg } => {
            let form = linear_form_of(&elab(arg, inside)?)?;
            if inside {
                normal_symbol_hermite(*n, &form)
            } else {
                hermite_of_operator(*n, &form)
            }
        }
        ExprAst::Hermite2 { m, n, arg1, arg2 } => {
            let f1 = linear_form_of(&elab(arg1, inside)?)?;
            let f2 = linear_form_of(&elab(arg2, inside)?)?;
            two_var_hermite_of_operators(*m, *n, &f1, &f2, inside)
        }
        ExprAst::NormalOrder(e) => elab(e, true),
    }
}

/// Demand that an elaborated expression is a pure linear combination of the
/// four mode operators.
fn linear_form_of(e: &OperatorExpr<ExactScalar>) -> Result<LinearForm<ExactScalar>> {
    let mut form = LinearForm::new(
        ExactScalar::zero(),
        ExactScalar::zero(),
        ExactScalar::zero(),
        ExactScalar::zero(),
    );
    for (m, c) in e.terms() {
        match (m.p, m.q, m.r, m.s) {
            (0, 1, 0, 0) => form.c_a = c.clone(),
            (1, 0, 0, 0) => form.c_adag = c.clone(),
            (0, 0, 0, 1) => form.c_b = c.clone(),
            (0, 0, 1, 0) => form.c_bdag = c.clone(),
            _ => return Err(Error::NonLinearHermiteArgument(e.to_string())),
        }
    }
    if form.is_zero() {
        return Err(Error::NonLinearHermiteArgument("0".into()));
    }
    Ok(form)
}

/// Evaluate a parsed tree into a pure scalar; anything touching a mode
/// operator is rejected.
pub fn elaborate_scalar(ast: &ExprAst) -> Result<ExactScalar> {
    let expr = elaborate(ast)?;
    let scalar = expr.scalar_part();
    if expr.num_terms() > if scalar.is_zero() { 0 } else { 1 } {
        return Err(Error::InvalidParameter(format!(
            "expected a scalar, got operator expression {}",
            expr
        )));
    }
    Ok(scalar)
}

/// Evaluate a parsed tree into an exact polynomial in the integration
/// variables `x` (and `y`).
pub fn elaborate_integrand(ast: &ExprAst) -> Result<Poly2> {
    match ast {
        ExprAst::Rational(r) => Ok(Poly2::constant(ExactScalar::from_ratio(r.clone()))),
        ExprAst::ImagUnit => Ok(Poly2::constant(ExactScalar::i())),
        ExprAst::Sqrt2 => Ok(Poly2::constant(ExactScalar::sqrt2())),
        ExprAst::Symbol(name) => match name.as_str() {
            "x" => Ok(Poly2::var_x()),
            "y" => Ok(Poly2::var_y()),
            _ => Err(Error::UnknownSymbol(format!(
                "{} (integrands use the variables x and y)",
                name
            ))),
        },
        ExprAst::Neg(e) => Ok(elaborate_integrand(e)?.scale(&(-&ExactScalar::one()))),
        ExprAst::Add(l, r) => Ok(elaborate_integrand(l)?.add(&elaborate_integrand(r)?)),
        ExprAst::Sub(l, r) => {
            let rneg = elaborate_integrand(r)?.scale(&(-&ExactScalar::one()));
            Ok(elaborate_integrand(l)?.add(&rneg))
        }
        ExprAst::Mul(l, r) => elaborate_integrand(l)?.mul(&elaborate_integrand(r)?),
        ExprAst::Pow(b, n) => elaborate_integrand(b)?.pow(*n),
        ExprAst::Hermite { n, arg } => {
            let inner = elaborate_integrand(arg)?;
            hermite_of_poly(*n, &inner)
        }
        ExprAst::Hermite2 { m, n, arg1, arg2 } => {
            let p1 = elaborate_integrand(arg1)?;
            let p2 = elaborate_integrand(arg2)?;
            let table = crate::polynomials::two_var_hermite_coefficients(*m, *n)?;
            let mut acc = Poly2::zero();
            for (&(j, k), c) in &table.coeffs {
                let term = p1.pow(j)?.mul(&p2.pow(k)?)?;
                acc = acc.add(&term.scale(&ExactScalar::from_bigint(c)));
            }
            Ok(acc)
        }
        ExprAst::NormalOrder(_) => Err(Error::InvalidParameter(
            "normal-ordering symbols have no meaning inside an integrand".into(),
        )),
    }
}

fn hermite_of_poly(n: u32, p: &Poly2) -> Result<Poly2> {
    let table = crate::polynomials::hermite_coefficients(n)?;
    let mut acc = Poly2::zero();
    let mut power = Poly2::constant(ExactScalar::one());
    for (k, c) in table.coeffs.iter().enumerate() {
        if k > 0 {
            power = power.mul(p)?;
        }
        if !c.is_zero() {
            acc = acc.add(&power.scale(&ExactScalar::from_bigint(c)));
        }
    }
    Ok(acc)
}

/// Output style for [`render_expression`].
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum RenderStyle {
    Plain,
    Latex,
}

/// Render a canonical operator expression. Plain output re-parses and
/// re-elaborates to the identical term map.
pub fn render_expression(e: &OperatorExpr<ExactScalar>, style: RenderStyle) -> String {
    match style {
        RenderStyle::Plain => e.to_string(),
        RenderStyle::Latex => render_latex(e),
    }
}

fn render_latex(e: &OperatorExpr<ExactScalar>) -> String {
    let terms: Vec<(&NormalMonomial, &ExactScalar)> = e.terms().collect();
    if terms.is_empty() {
        return "0".into();
    }
    let mut out = String::new();
    for (idx, (m, c)) in terms.iter().rev().enumerate() {
        let mono = latex_monomial(m);
        let (negative, coeff) = latex_coeff(c, !mono.is_empty());
        if idx == 0 {
            if negative {
                out.push('-');
            }
        } else if negative {
            out.push_str(" - ");
        } else {
            out.push_str(" + ");
        }
        out.push_str(&coeff);
        if !coeff.is_empty() && !mono.is_empty() {
            out.push_str("\\,");
        }
        out.push_str(&mono);
    }
    out
}

fn latex_monomial(m: &NormalMonomial) -> String {
    let mut out = String::new();
    for (base, dagger, e) in [
        ("a", true, m.p),
        ("a", false, m.q),
        ("b", true, m.r),
        ("b", false, m.s),
    ] {
        match (dagger, e) {
            (_, 0) => {}
            (true, 1) => write!(out, "{}^{{\\dagger}}", base).unwrap(),
            (true, _) => write!(out, "{}^{{\\dagger {}}}", base, e).unwrap(),
            (false, 1) => out.push_str(base),
            (false, _) => write!(out, "{}^{{{}}}", base, e).unwrap(),
        }
    }
    out
}

fn latex_rational(r: &BigRational) -> String {
    if r.is_integer() {
        r.to_string()
    } else {
        format!("\\tfrac{{{}}}{{{}}}", r.numer(), r.denom())
    }
}

/// Returns (negative sign extracted, coefficient body without sign).
fn latex_coeff(c: &ExactScalar, has_monomial: bool) -> (bool, String) {
    let components = [
        (&c.r1, ""),
        (&c.r2, "\\sqrt{2}"),
        (&c.i1, "i"),
        (&c.i2, "i\\sqrt{2}"),
    ];
    let nonzero: Vec<_> = components.iter().filter(|(v, _)| !v.is_zero()).collect();
    match nonzero.len() {
        0 => (false, "0".into()),
        1 => {
            let (value, marker) = nonzero[0];
            let negative = value.is_negative();
            let mag = value.abs();
            let body = if mag.is_integer() && mag.numer() == &BigInt::from(1) && !marker.is_empty()
            {
                marker.to_string()
            } else if marker.is_empty() {
                latex_rational(&mag)
            } else {
                format!("{}{}", latex_rational(&mag), marker)
            };
            let body = if body.is_empty() && !has_monomial {
                "1".into()
            } else {
                body
            };
            (negative, body)
        }
        _ => {
            let mut inner = String::new();
            let mut first = true;
            for (value, marker) in nonzero {
                let negative = value.is_negative();
                let mag = value.abs();
                if first {
                    if negative {
                        inner.push('-');
                    }
                    first = false;
                } else {
                    inner.push_str(if negative { " - " } else { " + " });
                }
                if marker.is_empty() {
                    inner.push_str(&latex_rational(&mag));
                } else if mag.is_integer() && mag.numer() == &BigInt::from(1) {
                    inner.push_str(marker);
                } else {
                    write!(inner, "{}{}", latex_rational(&mag), marker).unwrap();
                }
            }
            (false, format!("\\left({}\\right)", inner))
        }
    }
}
