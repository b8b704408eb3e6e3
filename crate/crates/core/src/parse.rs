//! Infix polynomial expressions in the variable `z`.
//!
//! ```text
//! expression = ["-"] term { ("+" | "-") ["-"] term }
//! term       = factor { ["*"] factor }      implicit "*" before `z` or "("
//! factor     = atom [ "^" integer ]
//! atom       = number | "z" | "(" expression ")"
//! ```
//!
//! Integer literals give an exact [`IntPoly`]; any decimal or scientific
//! literal switches the whole expression to [`ComplexPoly`].

use std::fmt::Write as _;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::poly::{ComplexPoly, IntPoly, Poly};

/// Largest degree any intermediate result may reach.
pub const MAX_DEGREE: usize = 10_000;

const MAX_NESTING: usize = 256;
const MAX_COEFF_BITS: u64 = 1 << 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TokenKind {
    Number,
    Variable,
    Plus,
    Minus,
    Star,
    Caret,
    LParen,
    RParen,
    End,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolyExprToken {
    pub kind: TokenKind,
    pub lexeme: String,
    /// Byte offset of the first character.
    pub position: usize,
}

impl PolyExprToken {
    fn describe(&self) -> String {
        match self.kind {
            TokenKind::End => "end of input".to_string(),
            _ => format!("`{}`", self.lexeme),
        }
    }

    fn is_integer_literal(&self) -> bool {
        self.kind == TokenKind::Number && self.lexeme.bytes().all(|b| b.is_ascii_digit())
    }
}

/// Split `text` into tokens, ending with a [`TokenKind::End`] token.
pub fn tokenize(text: &str) -> Result<Vec<PolyExprToken>> {
    let mut tokens = Vec::new();
    let mut iter = text.char_indices().peekable();
    while let Some(&(pos, ch)) = iter.peek() {
        let single = match ch {
            c if c.is_whitespace() => {
                iter.next();
                continue;
            }
            'z' => Some(TokenKind::Variable),
            '+' => Some(TokenKind::Plus),
            '-' | '\u{2212}' => Some(TokenKind::Minus),
            '*' => Some(TokenKind::Star),
            '^' => Some(TokenKind::Caret),
            '(' => Some(TokenKind::LParen),
            ')' => Some(TokenKind::RParen),
            _ => None,
        };
        if let Some(kind) = single {
            iter.next();
            tokens.push(PolyExprToken { kind, lexeme: ch.to_string(), position: pos });
            continue;
        }
        if ch.is_ascii_digit() || ch == '.' {
            let end = scan_number(text, pos)?;
            tokens.push(PolyExprToken {
                kind: TokenKind::Number,
                lexeme: text[pos..end].to_string(),
                position: pos,
            });
            while iter.peek().is_some_and(|&(p, _)| p < end) {
                iter.next();
            }
            continue;
        }
        return Err(Error::Syntax {
            offset: pos,
            expected: "a number, `z`, an operator or a parenthesis".into(),
            found: format!("`{ch}`"),
        });
    }
    tokens.push(PolyExprToken { kind: TokenKind::End, lexeme: String::new(), position: text.len() });
    Ok(tokens)
}

// integer-or-decimal literal with optional exponent; returns the end offset
fn scan_number(text: &str, start: usize) -> Result<usize> {
    let bytes = text.as_bytes();
    let digits = |mut i: usize| {
        while i < bytes.len() && bytes[i].is_ascii_digit() {
            i += 1;
        }
        i
    };
    let mut i = digits(start);
    let int_digits = i - start;
    let mut frac_digits = 0;
    if i < bytes.len() && bytes[i] == b'.' {
        let j = digits(i + 1);
        frac_digits = j - i - 1;
        i = j;
    }
    if int_digits == 0 && frac_digits == 0 {
        return Err(Error::Syntax {
            offset: start,
            expected: "a digit".into(),
            found: "`.`".into(),
        });
    }
    if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
        let mut j = i + 1;
        if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
            j += 1;
        }
        let k = digits(j);
        if k == j {
            return Err(Error::Syntax {
                offset: j,
                expected: "exponent digits".into(),
                found: describe_at(text, j),
            });
        }
        i = k;
    }
    Ok(i)
}

fn describe_at(text: &str, offset: usize) -> String {
    match text[offset..].chars().next() {
        Some(c) => format!("`{c}`"),
        None => "end of input".into(),
    }
}

struct Parser<'a> {
    tokens: &'a [PolyExprToken],
    pos: usize,
    depth: usize,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> &'a PolyExprToken {
        &self.tokens[self.pos]
    }

    fn bump(&mut self) -> &'a PolyExprToken {
        let t = &self.tokens[self.pos];
        if t.kind != TokenKind::End {
            self.pos += 1;
        }
        t
    }

    fn error(&self, expected: &str) -> Error {
        let t = self.peek();
        Error::Syntax { offset: t.position, expected: expected.into(), found: t.describe() }
    }

    fn expression(&mut self) -> Result<Poly> {
        self.depth += 1;
        if self.depth > MAX_NESTING {
            return Err(self.error("less deeply nested parentheses"));
        }
        let mut acc = self.signed_term()?;
        loop {
            match self.peek().kind {
                TokenKind::Plus => {
                    self.bump();
                    let rhs = self.signed_term()?;
                    acc = combine(acc, rhs, Poly::add)?;
                }
                TokenKind::Minus => {
                    self.bump();
                    let rhs = self.signed_term()?;
                    acc = combine(acc, rhs, Poly::sub)?;
                }
                _ => break,
            }
        }
        self.depth -= 1;
        Ok(acc)
    }

    fn signed_term(&mut self) -> Result<Poly> {
        if self.peek().kind == TokenKind::Minus {
            self.bump();
            let t = self.term()?;
            return Ok(negate(t));
        }
        self.term()
    }

    fn term(&mut self) -> Result<Poly> {
        let mut acc = self.factor()?;
        loop {
            let t = self.peek();
            match t.kind {
                TokenKind::Star => {
                    self.bump();
                }
                TokenKind::Variable | TokenKind::LParen => {}
                _ => break,
            }
            let offset = t.position;
            let rhs = self.factor()?;
            let degree = acc.degree().max(0) as usize + rhs.degree().max(0) as usize;
            if degree > MAX_DEGREE {
                return Err(Error::ExpansionLimit {
                    offset,
                    reason: format!("product degree {degree} exceeds {MAX_DEGREE}"),
                });
            }
            acc = combine(acc, rhs, Poly::mul)?;
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<Poly> {
        let base = self.atom()?;
        if self.peek().kind != TokenKind::Caret {
            return Ok(base);
        }
        let caret = self.bump();
        let t = self.peek();
        if !t.is_integer_literal() {
            return Err(Error::BadExponent { offset: t.position, found: t.describe() });
        }
        self.bump();
        let too_big = || Error::ExpansionLimit {
            offset: caret.position,
            reason: format!("exponent {} is too large", t.lexeme),
        };
        let exp: u32 = t.lexeme.parse().map_err(|_| too_big())?;
        let degree = base.degree().max(0) as u64 * exp as u64;
        if degree > MAX_DEGREE as u64 {
            return Err(Error::ExpansionLimit {
                offset: caret.position,
                reason: format!("power degree {degree} exceeds {MAX_DEGREE}"),
            });
        }
        if let Poly::Int(p) = &base {
            if p.max_bits().saturating_sub(1) * exp as u64 > MAX_COEFF_BITS {
                return Err(too_big());
            }
        }
        base.pow(exp as i64)
    }

    fn atom(&mut self) -> Result<Poly> {
        let t = self.peek();
        match t.kind {
            TokenKind::Number => {
                self.bump();
                number(t)
            }
            TokenKind::Variable => {
                self.bump();
                Ok(Poly::Int(IntPoly::monomial(BigInt::one(), 1)))
            }
            TokenKind::LParen => {
                self.bump();
                let inner = self.expression()?;
                if self.peek().kind != TokenKind::RParen {
                    return Err(self.error("`)`"));
                }
                self.bump();
                Ok(inner)
            }
            _ => Err(self.error("a number, `z` or `(`")),
        }
    }
}

fn number(t: &PolyExprToken) -> Result<Poly> {
    if t.is_integer_literal() {
        let v: BigInt = t.lexeme.parse().expect("digits form an integer");
        return Ok(Poly::Int(IntPoly::constant(v)));
    }
    let v: f64 = t.lexeme.parse().map_err(|_| Error::Syntax {
        offset: t.position,
        expected: "a numeric literal".into(),
        found: t.describe(),
    })?;
    Ok(Poly::Complex(ComplexPoly::constant(Complex64::new(v, 0.0))))
}

fn negate(p: Poly) -> Poly {
    match p {
        Poly::Int(p) => Poly::Int(-p),
        Poly::Complex(p) => Poly::Complex(-p),
    }
}

// integer operands are promoted when the other side is already float
fn combine(a: Poly, b: Poly, op: fn(&Poly, &Poly) -> Result<Poly>) -> Result<Poly> {
    match (&a, &b) {
        (Poly::Int(x), Poly::Complex(_)) => op(&Poly::Complex(promote(x)), &b),
        (Poly::Complex(_), Poly::Int(y)) => op(&a, &Poly::Complex(promote(y))),
        _ => op(&a, &b),
    }
}

fn promote(p: &IntPoly) -> ComplexPoly {
    // exact below 2^53, rounded once beyond; literals that large are unusual
    let coeffs = p.coeffs().iter().map(crate::poly::Coefficient::from_bigint).collect();
    ComplexPoly::new(coeffs)
}

/// Parse an expression such as `"z^2 - 2z + 7"` into expanded dense form.
pub fn parse_poly(text: &str) -> Result<Poly> {
    let tokens = tokenize(text)?;
    let mut parser = Parser { tokens: &tokens, pos: 0, depth: 0 };
    if parser.peek().kind == TokenKind::End {
        return Err(parser.error("an expression"));
    }
    let p = parser.expression()?;
    if parser.peek().kind != TokenKind::End {
        return Err(parser.error("an operator or end of input"));
    }
    Ok(p)
}

/// Canonical descending-power text, e.g. `-19z^21 + 492z^20 + ... + 393672761`.
pub fn format_poly(p: &Poly) -> String {
    match p {
        Poly::Int(p) => format_int_poly(p),
        Poly::Complex(p) => format_complex_poly(p),
    }
}

pub fn format_int_poly(p: &IntPoly) -> String {
    let terms = p
        .coeffs()
        .iter()
        .enumerate()
        .rev()
        .filter(|(_, c)| !c.is_zero())
        .map(|(i, c)| (c.is_negative(), i, c.abs().to_string(), c.abs().is_one()));
    join_terms(terms)
}

/// Real coefficients print as plain decimals; a polynomial with any nonzero
/// imaginary part prints each coefficient as `(re+imi)`, which the parser
/// does not read back.
pub fn format_complex_poly(p: &ComplexPoly) -> String {
    if p.coeffs().iter().all(|c| c.im == 0.0) {
        let terms = p
            .coeffs()
            .iter()
            .enumerate()
            .rev()
            .filter(|(_, c)| c.re != 0.0)
            .map(|(i, c)| (c.re < 0.0, i, format!("{}", c.re.abs()), c.re.abs() == 1.0));
        return join_terms(terms);
    }
    let terms = p
        .coeffs()
        .iter()
        .enumerate()
        .rev()
        .filter(|(_, c)| !c.is_zero())
        .map(|(i, c)| (false, i, format!("({}{:+}i)", c.re, c.im), false));
    join_terms(terms)
}

fn join_terms(terms: impl Iterator<Item = (bool, usize, String, bool)>) -> String {
    let mut out = String::new();
    for (negative, power, magnitude, unit) in terms {
        if out.is_empty() {
            if negative {
                out.push('-');
            }
        } else {
            out.push_str(if negative { " - " } else { " + " });
        }
        if !(unit && power > 0) {
            out.push_str(&magnitude);
        }
        match power {
            0 => {}
            1 => out.push('z'),
            _ => {
                let _ = write!(out, "z^{power}");
            }
        }
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}
