//! Exact evaluation of integer polynomials at floating-point points.
//!
//! A double is a dyadic rational, so `p(z)` for integer `p` and
//! `z = x + iy` with `x, y` doubles is a Gaussian dyadic rational that can be
//! formed without any rounding. Only the final value is rounded, which keeps
//! Newton corrections accurate even where Horner's rule in doubles loses
//! every significant digit to cancellation.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{Float, ToPrimitive, Zero};

use super::{ComplexPoly, IntPoly};

/// `mantissa * 2^exponent` with `|mantissa|` near 1, so values far outside
/// the double range can still be compared and divided.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScaledComplex {
    pub mantissa: Complex64,
    pub exponent: i64,
}

impl ScaledComplex {
    pub fn zero() -> ScaledComplex {
        ScaledComplex { mantissa: Complex64::new(0.0, 0.0), exponent: 0 }
    }

    pub fn is_zero(&self) -> bool {
        self.mantissa.norm() == 0.0
    }

    /// `value * 2^exponent`, renormalized so the mantissa is near one.
    pub fn new(value: Complex64, exponent: i64) -> ScaledComplex {
        let m = value.re.abs().max(value.im.abs());
        if m == 0.0 || !m.is_finite() {
            return ScaledComplex { mantissa: value, exponent };
        }
        let e = m.log2().floor() as i32 + 1;
        ScaledComplex { mantissa: value * 2f64.powi(-e), exponent: exponent + e as i64 }
    }

    /// `(re + i im) / 2^shift`, rounded once per part.
    fn from_parts(re: &BigInt, im: &BigInt, shift: i64) -> ScaledComplex {
        let bits = re.bits().max(im.bits()) as i64;
        if bits == 0 {
            return ScaledComplex::zero();
        }
        let drop = (bits - 62).max(0);
        let top = |v: &BigInt| (v >> drop as usize).to_f64().unwrap_or(0.0) * (-(bits - drop) as f64).exp2();
        ScaledComplex { mantissa: Complex64::new(top(re), top(im)), exponent: bits - shift }
    }

    /// Nearest double, saturating to infinity or zero outside the range.
    pub fn to_complex(&self) -> Complex64 {
        let e = self.exponent.clamp(-2200, 2200) as i32;
        // two steps so that an intermediate power of two cannot overflow
        let half = e / 2;
        self.mantissa * 2f64.powi(half) * 2f64.powi(e - half)
    }

    pub fn norm_log2(&self) -> f64 {
        self.mantissa.norm().log2() + self.exponent as f64
    }

    pub fn div(&self, other: &ScaledComplex) -> ScaledComplex {
        ScaledComplex { mantissa: self.mantissa / other.mantissa, exponent: self.exponent - other.exponent }
    }
}

// the two parts of a double as integers over a common power of two
fn common_dyadic(z: Complex64) -> (BigInt, BigInt, u32) {
    let part = |x: f64| -> (BigInt, i64) {
        if x == 0.0 {
            return (BigInt::zero(), 0);
        }
        let (m, e, s) = x.integer_decode();
        let v = BigInt::from(m) * s;
        (v, e as i64)
    };
    let (mut xr, er) = part(z.re);
    let (mut xi, ei) = part(z.im);
    let low = match (z.re == 0.0, z.im == 0.0) {
        (true, true) => 0,
        (true, false) => ei,
        (false, true) => er,
        (false, false) => er.min(ei),
    };
    if z.re != 0.0 {
        xr <<= (er - low) as usize;
    }
    if z.im != 0.0 {
        xi <<= (ei - low) as usize;
    }
    if low >= 0 {
        (xr << low as usize, xi << low as usize, 0)
    } else {
        (xr, xi, (-low) as u32)
    }
}

/// Gaussian dyadic `(re + i im) 2^e` with a mantissa truncated to a fixed
/// number of bits.
struct Approx {
    re: BigInt,
    im: BigInt,
    e: i64,
}

impl Approx {
    fn bits(&self) -> i64 {
        self.re.bits().max(self.im.bits()) as i64
    }

    fn truncate(mut self, prec: i64) -> Approx {
        let b = self.bits();
        if b > prec {
            let sh = (b - prec) as usize;
            self.re >>= sh;
            self.im >>= sh;
            self.e += sh as i64;
        }
        self
    }

    fn mul(&self, x: &BigInt, y: &BigInt, s: i64) -> Approx {
        Approx { re: &self.re * x - &self.im * y, im: &self.re * y + &self.im * x, e: self.e - s }
    }

    fn add(self, other: Approx, prec: i64) -> Approx {
        let top = |a: &Approx| if a.bits() == 0 { i64::MIN } else { a.bits() + a.e };
        let hi = top(&self).max(top(&other));
        if hi == i64::MIN {
            return Approx { re: BigInt::zero(), im: BigInt::zero(), e: 0 };
        }
        let e = self.e.min(other.e).max(hi - prec - 4);
        let align = |v: &BigInt, ve: i64| if ve >= e { v << (ve - e) as usize } else { v >> (e - ve) as usize };
        let re = align(&self.re, self.e) + align(&other.re, other.e);
        let im = align(&self.im, self.e) + align(&other.im, other.e);
        Approx { re, im, e }.truncate(prec)
    }

    fn rounded(&self) -> ScaledComplex {
        ScaledComplex::from_parts(&self.re, &self.im, -self.e)
    }
}

/// Evaluates an integer polynomial and its derivative at double points with
/// just enough working precision.
///
/// Horner's rule with `prec`-bit mantissas has absolute error at most about
/// `(d + 1) 2^(2 - prec) Σ|c_i| |z|^i`. The precision starts at 128 bits and
/// doubles until that bound certifies roughly 60 correct bits of `p(z)` and
/// 40 of `p'(z)`; past 4096 bits the evaluation is done exactly.
#[derive(Clone, Debug)]
pub struct AdaptiveEvaluator {
    poly: IntPoly,
    // coefficient moduli times 2^-bits, for the error bounds
    scaled: ComplexPoly,
    dscaled: ComplexPoly,
    bits: f64,
}

impl AdaptiveEvaluator {
    pub fn new(poly: &IntPoly) -> AdaptiveEvaluator {
        let scaled = poly.to_complex_scaled();
        let dscaled = scaled.derivative();
        AdaptiveEvaluator { poly: poly.clone(), scaled, dscaled, bits: poly.max_bits() as f64 }
    }

    pub fn poly(&self) -> &IntPoly {
        &self.poly
    }

    /// `log2 Σ |c_i| r^i`
    pub fn log2_scale(&self, r: f64) -> f64 {
        self.scaled.abs_eval(r).log2() + self.bits
    }

    pub fn eval_with_derivative(&self, z: Complex64) -> (ScaledComplex, ScaledComplex) {
        if self.poly.degree() < 1 {
            return self.poly.eval_exact_with_derivative(z);
        }
        let r = z.norm();
        let d = self.poly.degree() as f64;
        let slack = (4.0 * (d + 1.0)).log2();
        let scale = self.log2_scale(r) + slack;
        let dscale = self.dscaled.abs_eval(r).log2() + self.bits + slack;
        let mut prec = 128;
        while prec <= 4096 {
            let (v, dv) = self.truncated(z, prec);
            let v_ok = !v.is_zero() && v.norm_log2() - (scale - prec as f64) >= 60.0;
            let dv_ok = !dv.is_zero() && dv.norm_log2() - (dscale - prec as f64) >= 40.0;
            if v_ok && dv_ok {
                return (v, dv);
            }
            prec *= 2;
        }
        self.poly.eval_exact_with_derivative(z)
    }

    fn truncated(&self, z: Complex64, prec: i64) -> (ScaledComplex, ScaledComplex) {
        let (x, y, s) = common_dyadic(z);
        let s = s as i64;
        let c = &self.poly.coeffs;
        let d = c.len() - 1;
        let coeff = |i: usize| Approx { re: c[i].clone(), im: BigInt::zero(), e: 0 };
        let mut acc = coeff(d).truncate(prec);
        let mut dacc = Approx { re: BigInt::zero(), im: BigInt::zero(), e: 0 };
        for i in (0..d).rev() {
            dacc = dacc.mul(&x, &y, s).add(Approx { re: acc.re.clone(), im: acc.im.clone(), e: acc.e }, prec);
            acc = acc.mul(&x, &y, s).add(coeff(i), prec);
        }
        (acc.rounded(), dacc.rounded())
    }
}

impl IntPoly {
    /// `(p(z), p'(z))` computed exactly and rounded once each.
    pub fn eval_exact_with_derivative(&self, z: Complex64) -> (ScaledComplex, ScaledComplex) {
        assert!(z.is_finite(), "exact evaluation at a non-finite point");
        if self.is_zero() {
            return (ScaledComplex::zero(), ScaledComplex::zero());
        }
        let (x, y, s) = common_dyadic(z);
        let s = s as usize;
        let d = self.coeffs.len() - 1;
        // acc = (ar + i ai) / 2^t, dacc = (dr + i di) / 2^(t - s)
        let mut ar = self.coeffs[d].clone();
        let mut ai = BigInt::zero();
        let mut dr = BigInt::zero();
        let mut di = BigInt::zero();
        let mut t = 0usize;
        for i in (0..d).rev() {
            // dacc <- dacc z + acc, both over 2^t
            let ndr = &dr * &x - &di * &y + &ar;
            let ndi = &dr * &y + &di * &x + &ai;
            dr = ndr;
            di = ndi;
            // acc <- acc z + c_i over 2^(t + s)
            let nar = &ar * &x - &ai * &y + (&self.coeffs[i] << (t + s));
            let nai = &ar * &y + &ai * &x;
            ar = nar;
            ai = nai;
            t += s;
        }
        let p = ScaledComplex::from_parts(&ar, &ai, t as i64);
        let dp = ScaledComplex::from_parts(&dr, &di, t as i64 - s as i64);
        (p, dp)
    }

    /// Rounded copy scaled by a power of two so the largest coefficient is
    /// near one; same roots, never overflows.
    pub fn to_complex_scaled(&self) -> ComplexPoly {
        let bits = self.max_bits() as i64;
        let coeffs = self
            .coeffs
            .iter()
            .map(|c| {
                // each coefficient keeps its own leading bits; only values
                // below 2^-1000 of the largest underflow
                let shift = (c.bits() as i64 - 60).max(0);
                let top = (c >> shift as usize).to_f64().unwrap_or(0.0);
                Complex64::new(top * ((shift - bits) as f64).exp2(), 0.0)
            })
            .collect();
        ComplexPoly::new(coeffs)
    }

    /// `true` only if `p` certainly has no repeated root (a modular check;
    /// `false` means "unknown or not squarefree").
    pub fn is_certainly_squarefree(&self) -> bool {
        super::modp::squarefree_certificate(self)
    }

    /// Squarefree factorization `p = c * Π f_i^i` of the primitive part, as
    /// `(f_i, i)` pairs with nonconstant `f_i`.
    pub fn squarefree_decomposition(&self) -> Vec<(IntPoly, usize)> {
        let f = self.primitive_part();
        if f.degree() < 1 {
            return Vec::new();
        }
        if super::modp::squarefree_certificate(&f) {
            return vec![(f, 1)];
        }
        let mut g = f.gcd(&f.derivative());
        let mut w = f.div_exact(&g).expect("gcd divides its argument");
        let mut out = Vec::new();
        let mut i = 1;
        while w.degree() >= 1 {
            let y = w.gcd(&g);
            let factor = w.div_exact(&y).expect("gcd divides its argument");
            if factor.degree() >= 1 {
                out.push((factor, i));
            }
            g = g.div_exact(&y).expect("gcd divides its argument");
            w = y;
            i += 1;
        }
        out
    }
}
