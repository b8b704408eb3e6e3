use num_bigint::{BigInt, Sign};
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{Float, One, Signed, ToPrimitive, Zero};

use super::{ComplexPoly, IntPoly};
use crate::error::{Error, Result};

/// How an integer polynomial was rounded into double precision.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Rounding {
    /// Every coefficient was representable exactly.
    pub exact: bool,
    /// Largest `|c - fl(c)| / |c|` over all coefficients.
    pub max_rel_err: f64,
}

/// A dyadic rational `num / 2^shift`. Every finite `f64` is one.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Dyadic {
    pub num: BigInt,
    pub shift: u32,
}

impl Dyadic {
    pub fn from_f64(x: f64) -> Dyadic {
        assert!(x.is_finite(), "dyadic conversion of non-finite value");
        if x == 0.0 {
            return Dyadic { num: BigInt::zero(), shift: 0 };
        }
        let (mant, exp, sign) = x.integer_decode();
        let mut num = BigInt::from(mant);
        if sign < 0 {
            num = -num;
        }
        if exp >= 0 {
            Dyadic { num: num << exp as usize, shift: 0 }.normalized()
        } else {
            Dyadic { num, shift: (-exp) as u32 }.normalized()
        }
    }

    pub fn from_int(v: BigInt) -> Dyadic {
        Dyadic { num: v, shift: 0 }
    }

    pub fn midpoint(&self, other: &Dyadic) -> Dyadic {
        let shift = self.shift.max(other.shift);
        let a = &self.num << (shift - self.shift) as usize;
        let b = &other.num << (shift - other.shift) as usize;
        Dyadic { num: a + b, shift: shift + 1 }.normalized()
    }

    pub fn to_f64(&self) -> f64 {
        // exact ratio of two big integers rounded once
        let n = self.num.to_f64().unwrap_or(f64::NAN);
        if n.is_finite() {
            return n * (-(self.shift as f64)).exp2();
        }
        let bits = self.num.bits() as i64;
        let drop = (bits - 60).max(0);
        let top = (&self.num >> drop as usize).to_f64().unwrap_or(f64::NAN);
        top * ((drop - self.shift as i64) as f64).exp2()
    }

    fn normalized(mut self) -> Dyadic {
        if self.num.is_zero() {
            self.shift = 0;
            return self;
        }
        let tz = self.num.trailing_zeros().unwrap_or(0).min(self.shift as u64);
        if tz > 0 {
            self.num >>= tz as usize;
            self.shift -= tz as u32;
        }
        self
    }
}

impl IntPoly {
    /// Round every coefficient to the nearest double.
    pub fn to_complex(&self) -> Result<(ComplexPoly, Rounding)> {
        let mut exact = true;
        let mut max_rel_err: f64 = 0.0;
        let mut out = Vec::with_capacity(self.coeffs.len());
        for (index, c) in self.coeffs.iter().enumerate() {
            let f = c.to_f64().unwrap_or(f64::INFINITY);
            if !f.is_finite() {
                return Err(Error::CoefficientOverflow { index });
            }
            if c.bits() > 53 {
                let back = bigint_from_f64(f);
                if &back != c {
                    exact = false;
                    let diff = (c - back).abs().to_f64().unwrap_or(f64::INFINITY);
                    max_rel_err = max_rel_err.max(diff / f.abs());
                }
            }
            out.push(Complex64::new(f, 0.0));
        }
        Ok((ComplexPoly::new(out), Rounding { exact, max_rel_err }))
    }

    /// Largest coefficient bit length.
    pub fn max_bits(&self) -> u64 {
        self.coeffs.iter().map(|c| c.bits()).max().unwrap_or(0)
    }

    /// Gcd of the coefficients, nonnegative; zero for the zero polynomial.
    pub fn content(&self) -> BigInt {
        self.coeffs.iter().fold(BigInt::zero(), |g, c| g.gcd(c))
    }

    /// Divide out the content and make the leading coefficient positive.
    pub fn primitive_part(&self) -> IntPoly {
        if self.is_zero() {
            return IntPoly::zero();
        }
        let mut g = self.content();
        if self.coeffs.last().is_some_and(|c| c.is_negative()) {
            g = -g;
        }
        IntPoly::new(self.coeffs.iter().map(|c| c / &g).collect())
    }

    /// Pseudo-remainder: `lc(b)^(deg a - deg b + 1) a = q b + r`.
    pub fn pseudo_rem(&self, b: &IntPoly) -> IntPoly {
        assert!(!b.is_zero(), "pseudo-remainder by zero polynomial");
        let db = b.degree();
        if self.degree() < db {
            return self.clone();
        }
        let lb = b.coeffs.last().unwrap();
        let mut r = self.coeffs.clone();
        let steps = self.degree() - db + 1;
        let mut done = 0;
        while r.len() as isize > db && !r.is_empty() {
            let dr = r.len() - 1;
            let lr = r[dr].clone();
            for c in r.iter_mut() {
                *c *= lb;
            }
            let off = dr - db as usize;
            for (j, bc) in b.coeffs.iter().enumerate() {
                r[off + j] -= &lr * bc;
            }
            r.pop();
            while r.last().is_some_and(|c| c.is_zero()) {
                r.pop();
            }
            done += 1;
        }
        // bring the multiplier up to the full power so the result has a
        // predictable sign relationship with the true remainder
        if done < steps {
            let extra = num_traits::pow(lb.clone(), (steps - done) as usize);
            for c in r.iter_mut() {
                *c *= &extra;
            }
        }
        IntPoly::new(r)
    }

    /// Greatest common divisor over `Q[z]`, returned primitive with positive
    /// leading coefficient (the zero polynomial if both inputs are zero).
    pub fn gcd(&self, other: &IntPoly) -> IntPoly {
        let (mut a, mut b) = if self.degree() >= other.degree() {
            (self.primitive_part(), other.primitive_part())
        } else {
            (other.primitive_part(), self.primitive_part())
        };
        while !b.is_zero() {
            let r = a.pseudo_rem(&b).primitive_part();
            a = b;
            b = r;
        }
        a
    }

    /// Exact quotient `self / divisor`, or `None` if the division leaves a
    /// remainder or a non-integral quotient.
    pub fn div_exact(&self, divisor: &IntPoly) -> Option<IntPoly> {
        assert!(!divisor.is_zero(), "division by zero polynomial");
        if self.is_zero() {
            return Some(IntPoly::zero());
        }
        let db = divisor.degree() as usize;
        if self.degree() < db as isize {
            return None;
        }
        let lb = divisor.coeffs.last().unwrap();
        let mut r = self.coeffs.clone();
        let mut q = vec![BigInt::zero(); r.len() - db];
        for pos in (0..q.len()).rev() {
            let top = &r[pos + db];
            if top.is_zero() {
                continue;
            }
            let (qc, rem) = top.div_rem(lb);
            if !rem.is_zero() {
                return None;
            }
            for (j, bc) in divisor.coeffs.iter().enumerate() {
                r[pos + j] -= &qc * bc;
            }
            q[pos] = qc;
        }
        if r.iter().all(|c| c.is_zero()) {
            Some(IntPoly::new(q))
        } else {
            None
        }
    }

    /// Squarefree part, primitive with positive leading coefficient.
    pub fn squarefree_part(&self) -> IntPoly {
        if self.degree() < 1 {
            return self.primitive_part();
        }
        let g = self.gcd(&self.derivative());
        self.primitive_part()
            .div_exact(&g)
            .expect("gcd divides its argument")
    }

    /// Sign of `p(x)` at a dyadic rational, evaluated exactly.
    pub fn sign_at(&self, x: &Dyadic) -> i8 {
        if self.is_zero() {
            return 0;
        }
        // Σ c_i num^i 2^(shift (d - i)) has the sign of p(x)
        let d = self.coeffs.len() - 1;
        let mut acc = self.coeffs[d].clone();
        for i in (0..d).rev() {
            acc *= &x.num;
            acc += &self.coeffs[i] << (x.shift as usize * (d - i));
        }
        sign_of(&acc)
    }

    /// Sign of `p(x)` as `x -> -inf` (`neg = true`) or `x -> +inf`.
    pub fn sign_at_infinity(&self, neg: bool) -> i8 {
        match self.coeffs.last() {
            None => 0,
            Some(lc) => {
                let s = sign_of(lc);
                if neg && self.coeffs.len().is_multiple_of(2) {
                    -s
                } else {
                    s
                }
            }
        }
    }
}

pub(crate) fn sign_of(v: &BigInt) -> i8 {
    match v.sign() {
        Sign::Minus => -1,
        Sign::NoSign => 0,
        Sign::Plus => 1,
    }
}

fn bigint_from_f64(f: f64) -> BigInt {
    let d = Dyadic::from_f64(f);
    assert_eq!(d.shift, 0, "integral double expected");
    d.num
}

/// Multiplicative binomial coefficient `C(n, r)` in exact arithmetic.
pub fn binomial(n: u64, r: u64) -> BigInt {
    if r > n {
        return BigInt::zero();
    }
    let r = r.min(n - r);
    let mut acc = BigInt::one();
    for i in 0..r {
        acc *= n - i;
        acc /= i + 1;
    }
    acc
}
