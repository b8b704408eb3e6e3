//! Dense univariate polynomials over two coefficient domains.
//!
//! [`IntPoly`] holds arbitrary-size integer coefficients and is used wherever
//! results must be exact (the recurrence terms, lattice-path polynomials).
//! [`ComplexPoly`] holds `f64` complex coefficients and backs evaluation, root
//! finding and curve work. Both are the same [`DensePoly`] with coefficients
//! stored lowest power first; the zero polynomial is the empty vector.

mod complex;
mod exact;
mod modp;
mod int;

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub use complex::{cauchy_root_bound, fujiwara_bound};
pub use exact::{AdaptiveEvaluator, ScaledComplex};
pub use int::{binomial, Dyadic, Rounding};

/// Ring operations needed by [`DensePoly`].
pub trait Coefficient: Clone + PartialEq + fmt::Debug + Zero + One + Neg<Output = Self> + Send + Sync {
    /// Name of the domain, used in error messages.
    const DOMAIN: &'static str;

    /// `self += a * b` without cloning the operands.
    fn mul_add_assign(&mut self, a: &Self, b: &Self);

    fn add_assign_ref(&mut self, a: &Self);

    fn sub_assign_ref(&mut self, a: &Self);

    fn mul_ref(a: &Self, b: &Self) -> Self;

    /// Exact for integers, rounded once for floats.
    fn from_bigint(v: &BigInt) -> Self;
}

impl Coefficient for BigInt {
    const DOMAIN: &'static str = "integer";

    fn mul_add_assign(&mut self, a: &Self, b: &Self) {
        *self += a * b;
    }

    fn add_assign_ref(&mut self, a: &Self) {
        *self += a;
    }

    fn sub_assign_ref(&mut self, a: &Self) {
        *self -= a;
    }

    fn mul_ref(a: &Self, b: &Self) -> Self {
        a * b
    }

    fn from_bigint(v: &BigInt) -> Self {
        v.clone()
    }
}

impl Coefficient for Complex64 {
    const DOMAIN: &'static str = "complex";

    fn mul_add_assign(&mut self, a: &Self, b: &Self) {
        *self += a * b;
    }

    fn add_assign_ref(&mut self, a: &Self) {
        *self += a;
    }

    fn sub_assign_ref(&mut self, a: &Self) {
        *self -= a;
    }

    fn mul_ref(a: &Self, b: &Self) -> Self {
        a * b
    }

    fn from_bigint(v: &BigInt) -> Self {
        Complex64::new(v.to_f64().unwrap_or(f64::NAN), 0.0)
    }
}

/// Dense polynomial, `coeffs[i]` is the coefficient of `z^i`.
///
/// The leading stored coefficient is never zero; the zero polynomial has no
/// coefficients and degree -1.
#[derive(Clone, PartialEq, Debug, Default)]
pub struct DensePoly<T> {
    coeffs: Vec<T>,
}

pub type IntPoly = DensePoly<BigInt>;
pub type ComplexPoly = DensePoly<Complex64>;

impl<T: Coefficient> DensePoly<T> {
    pub fn new(mut coeffs: Vec<T>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        DensePoly { coeffs }
    }

    pub fn zero() -> Self {
        DensePoly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(T::one())
    }

    pub fn constant(c: T) -> Self {
        Self::new(vec![c])
    }

    /// `c * z^power`
    pub fn monomial(c: T, power: usize) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        let mut coeffs = vec![T::zero(); power + 1];
        coeffs[power] = c;
        DensePoly { coeffs }
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<T> {
        self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, -1 for the zero polynomial.
    pub fn degree(&self) -> isize {
        self.coeffs.len() as isize - 1
    }

    pub fn leading(&self) -> Option<&T> {
        self.coeffs.last()
    }

    /// Coefficient of `z^i`, zero past the degree.
    pub fn coeff(&self, i: usize) -> T {
        self.coeffs.get(i).cloned().unwrap_or_else(T::zero)
    }

    pub fn scale(&self, c: &T) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Self::new(self.coeffs.iter().map(|a| T::mul_ref(a, c)).collect())
    }

    pub fn pow(&self, mut exp: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one();
        while exp > 0 {
            if exp & 1 == 1 {
                acc = &acc * &base;
            }
            exp >>= 1;
            if exp > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Multiply by `z^shift`.
    pub fn shift(&self, shift: usize) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let mut coeffs = vec![T::zero(); shift];
        coeffs.extend(self.coeffs.iter().cloned());
        DensePoly { coeffs }
    }

    /// Formal derivative.
    pub fn derivative(&self) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| T::mul_ref(c, &T::from_bigint(&BigInt::from(i))))
            .collect();
        Self::new(coeffs)
    }

    /// Horner evaluation in the coefficient ring.
    pub fn eval(&self, z: &T) -> T {
        let mut acc = T::zero();
        for c in self.coeffs.iter().rev() {
            acc = T::mul_ref(&acc, z);
            acc.add_assign_ref(c);
        }
        acc
    }

    fn combine(&self, other: &Self, subtract: bool) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut coeffs = Vec::with_capacity(n);
        for i in 0..n {
            let mut c = self.coeffs.get(i).cloned().unwrap_or_else(T::zero);
            if let Some(o) = other.coeffs.get(i) {
                if subtract {
                    c.sub_assign_ref(o);
                } else {
                    c.add_assign_ref(o);
                }
            }
            coeffs.push(c);
        }
        Self::new(coeffs)
    }
}

impl<T: Coefficient> Add for &DensePoly<T> {
    type Output = DensePoly<T>;

    fn add(self, rhs: &DensePoly<T>) -> DensePoly<T> {
        self.combine(rhs, false)
    }
}

impl<T: Coefficient> Sub for &DensePoly<T> {
    type Output = DensePoly<T>;

    fn sub(self, rhs: &DensePoly<T>) -> DensePoly<T> {
        self.combine(rhs, true)
    }
}

impl<T: Coefficient> Mul for &DensePoly<T> {
    type Output = DensePoly<T>;

    fn mul(self, rhs: &DensePoly<T>) -> DensePoly<T> {
        if self.is_zero() || rhs.is_zero() {
            return DensePoly::zero();
        }
        let mut coeffs = vec![T::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                coeffs[i + j].mul_add_assign(a, b);
            }
        }
        // Integer products of nonzero leading terms are nonzero, but float
        // products can underflow.
        DensePoly::new(coeffs)
    }
}

impl<T: Coefficient> Neg for &DensePoly<T> {
    type Output = DensePoly<T>;

    fn neg(self) -> DensePoly<T> {
        DensePoly {
            coeffs: self.coeffs.iter().map(|c| -c.clone()).collect(),
        }
    }
}

macro_rules! forward_owned_binop {
    ($tr:ident, $method:ident) => {
        impl<T: Coefficient> $tr for DensePoly<T> {
            type Output = DensePoly<T>;

            fn $method(self, rhs: DensePoly<T>) -> DensePoly<T> {
                (&self).$method(&rhs)
            }
        }
    };
}

forward_owned_binop!(Add, add);
forward_owned_binop!(Sub, sub);
forward_owned_binop!(Mul, mul);

impl<T: Coefficient> Neg for DensePoly<T> {
    type Output = DensePoly<T>;

    fn neg(self) -> DensePoly<T> {
        -&self
    }
}

impl<T> From<Vec<T>> for DensePoly<T>
where
    T: Coefficient,
{
    fn from(coeffs: Vec<T>) -> Self {
        DensePoly::new(coeffs)
    }
}

impl IntPoly {
    pub fn from_i64s(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }
}

impl ComplexPoly {
    pub fn from_reals(coeffs: &[f64]) -> Self {
        Self::new(coeffs.iter().map(|&c| Complex64::new(c, 0.0)).collect())
    }
}

/// A polynomial in either coefficient domain, as produced by the parser.
#[derive(Clone, PartialEq, Debug)]
pub enum Poly {
    Int(IntPoly),
    Complex(ComplexPoly),
}

/// Scalar operand for [`Poly::scale`].
#[derive(Clone, PartialEq, Debug)]
pub enum Scalar {
    Int(BigInt),
    Complex(Complex64),
}

impl Poly {
    pub fn domain(&self) -> &'static str {
        match self {
            Poly::Int(_) => BigInt::DOMAIN,
            Poly::Complex(_) => Complex64::DOMAIN,
        }
    }

    pub fn degree(&self) -> isize {
        match self {
            Poly::Int(p) => p.degree(),
            Poly::Complex(p) => p.degree(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.degree() < 0
    }

    /// Float view. Integer coefficients are rounded once.
    pub fn to_complex(&self) -> Result<ComplexPoly> {
        match self {
            Poly::Int(p) => p.to_complex().map(|(c, _)| c),
            Poly::Complex(p) => Ok(p.clone()),
        }
    }

    pub fn add(&self, rhs: &Poly) -> Result<Poly> {
        match (self, rhs) {
            (Poly::Int(a), Poly::Int(b)) => Ok(Poly::Int(a + b)),
            (Poly::Complex(a), Poly::Complex(b)) => Ok(Poly::Complex(a + b)),
            _ => Err(self.mismatch(rhs)),
        }
    }

    pub fn sub(&self, rhs: &Poly) -> Result<Poly> {
        match (self, rhs) {
            (Poly::Int(a), Poly::Int(b)) => Ok(Poly::Int(a - b)),
            (Poly::Complex(a), Poly::Complex(b)) => Ok(Poly::Complex(a - b)),
            _ => Err(self.mismatch(rhs)),
        }
    }

    pub fn mul(&self, rhs: &Poly) -> Result<Poly> {
        match (self, rhs) {
            (Poly::Int(a), Poly::Int(b)) => Ok(Poly::Int(a * b)),
            (Poly::Complex(a), Poly::Complex(b)) => Ok(Poly::Complex(a * b)),
            _ => Err(self.mismatch(rhs)),
        }
    }

    pub fn scale(&self, c: &Scalar) -> Result<Poly> {
        match (self, c) {
            (Poly::Int(a), Scalar::Int(c)) => Ok(Poly::Int(a.scale(c))),
            (Poly::Complex(a), Scalar::Complex(c)) => Ok(Poly::Complex(a.scale(c))),
            (_, Scalar::Int(_)) => Err(Error::DomainMismatch {
                left: self.domain(),
                right: BigInt::DOMAIN,
            }),
            (_, Scalar::Complex(_)) => Err(Error::DomainMismatch {
                left: self.domain(),
                right: Complex64::DOMAIN,
            }),
        }
    }

    pub fn pow(&self, exp: i64) -> Result<Poly> {
        let exp = u32::try_from(exp).map_err(|_| {
            if exp < 0 {
                Error::NegativeExponent(exp)
            } else {
                Error::ExpansionLimit {
                    offset: 0,
                    reason: format!("exponent {exp} out of range"),
                }
            }
        })?;
        Ok(match self {
            Poly::Int(p) => Poly::Int(p.pow(exp)),
            Poly::Complex(p) => Poly::Complex(p.pow(exp)),
        })
    }

    fn mismatch(&self, rhs: &Poly) -> Error {
        Error::DomainMismatch {
            left: self.domain(),
            right: rhs.domain(),
        }
    }
}

impl From<IntPoly> for Poly {
    fn from(p: IntPoly) -> Self {
        Poly::Int(p)
    }
}

impl From<ComplexPoly> for Poly {
    fn from(p: ComplexPoly) -> Self {
        Poly::Complex(p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ip(c: &[i64]) -> IntPoly {
        IntPoly::from_i64s(c)
    }

    #[test]
    fn add_and_mul_examples() {
        assert_eq!(&ip(&[1, 1]) + &ip(&[0, 0, 1]), ip(&[1, 1, 1]));
        assert_eq!(&ip(&[1, 1]) * &ip(&[-1, 1]), ip(&[-1, 0, 1]));
    }

    #[test]
    fn pow_matches_repeated_convolution() {
        // (z^2 - 2z + 7)^2 expanded by schoolbook convolution
        let b = [7i64, -2, 1];
        let mut sq = [0i64; 5];
        for i in 0..3 {
            for j in 0..3 {
                sq[i + j] += b[i] * b[j];
            }
        }
        assert_eq!(sq, [49, -28, 18, -4, 1]);
        assert_eq!(ip(&b).pow(2), ip(&sq));
        assert_eq!(ip(&b).pow(0), ip(&[1]));
    }

    #[test]
    fn zero_normalization() {
        assert!(ip(&[0, 0, 0]).is_zero());
        assert_eq!(ip(&[]).degree(), -1);
        assert!((&ip(&[1, 2]) - &ip(&[1, 2])).is_zero());
        assert_eq!((&ip(&[1, 2, 3]) - &ip(&[0, 0, 3])).degree(), 1);
    }

    #[test]
    fn enum_domain_errors() {
        let a = Poly::Int(ip(&[1, 1]));
        let b = Poly::Complex(ComplexPoly::from_reals(&[1.0]));
        assert!(matches!(a.add(&b), Err(Error::DomainMismatch { .. })));
        assert!(matches!(a.mul(&b), Err(Error::DomainMismatch { .. })));
        assert!(matches!(a.scale(&Scalar::Complex(Complex64::new(1.0, 0.0))), Err(Error::DomainMismatch { .. })));
        assert_eq!(a.pow(-1), Err(Error::NegativeExponent(-1)));
        assert_eq!(a.pow(2).unwrap(), Poly::Int(ip(&[1, 2, 1])));
        assert_eq!(a.scale(&Scalar::Int(BigInt::from(-3))).unwrap(), Poly::Int(ip(&[-3, -3])));
    }

    #[test]
    fn derivative_and_eval() {
        let p = ip(&[1, 1, 0, 1]);
        assert_eq!(p.derivative(), ip(&[1, 0, 3]));
        assert_eq!(p.eval(&BigInt::from(2)), BigInt::from(11));
        assert_eq!(ip(&[]).eval(&BigInt::from(5)), BigInt::from(0));
    }

    fn small_poly() -> impl Strategy<Value = IntPoly> {
        prop::collection::vec(-20i64..=20, 0..8).prop_map(|c| ip(&c))
    }

    proptest! {
        #![proptest_config(ProptestConfig { cases: 256, rng_algorithm: proptest::test_runner::RngAlgorithm::ChaCha, ..ProptestConfig::default() })]

        #[test]
        fn distributive(p in small_poly(), q in small_poly(), r in small_poly()) {
            prop_assert_eq!(&p * &(&q + &r), &(&p * &q) + &(&p * &r));
        }

        #[test]
        fn commutative_and_associative(p in small_poly(), q in small_poly(), r in small_poly()) {
            prop_assert_eq!(&p * &q, &q * &p);
            prop_assert_eq!(&(&p * &q) * &r, &p * &(&q * &r));
            prop_assert_eq!(&(&p + &q) + &r, &p + &(&q + &r));
        }

        #[test]
        fn complex_eval_is_multiplicative(
            p in prop::collection::vec(-10.0f64..10.0, 1..8),
            q in prop::collection::vec(-10.0f64..10.0, 1..8),
            r in 0.0f64..1.0,
            theta in 0.0f64..std::f64::consts::TAU,
        ) {
            let p = ComplexPoly::from_reals(&p);
            let q = ComplexPoly::from_reals(&q);
            let z = Complex64::from_polar(r, theta);
            let lhs = (&p * &q).eval(&z);
            let rhs = p.eval(&z) * q.eval(&z);
            // scale by the absolute-value evaluation so cancellation does not
            // turn a rounding-level difference into a large relative one
            let scale = p.abs_eval(z.norm()) * q.abs_eval(z.norm());
            prop_assert!((lhs - rhs).norm() <= 1e-12 * scale.max(f64::MIN_POSITIVE));
        }
    }
}
