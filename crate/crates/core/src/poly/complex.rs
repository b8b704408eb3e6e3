use num_complex::Complex64;

use super::ComplexPoly;
use crate::error::{Error, Result};

impl ComplexPoly {
    /// `p(z)` by Horner's scheme.
    pub fn eval_at(&self, z: Complex64) -> Complex64 {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, c| acc * z + c)
    }

    /// `Σ |c_i| r^i`, the natural scale for rounding errors in `p(z)` at `|z| = r`.
    pub fn abs_eval(&self, r: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * r + c.norm())
    }

    /// Returns `(p(z), p'(z))` in one Horner pass.
    pub fn eval_with_derivative(&self, z: Complex64) -> (Complex64, Complex64) {
        let mut p = Complex64::new(0.0, 0.0);
        let mut dp = Complex64::new(0.0, 0.0);
        for c in self.coeffs.iter().rev() {
            dp = dp * z + p;
            p = p * z + c;
        }
        (p, dp)
    }

    /// Newton correction `p(z)/p'(z)` and the scaled residual
    /// `|p(z)| / Σ|c_i| max(1,|z|)^i`.
    ///
    /// For `|z| > 1` both are computed from the reversed polynomial in `1/z`
    /// so that high degrees cannot overflow.
    pub(crate) fn newton_step(&self, z: Complex64) -> (Complex64, f64) {
        let d = self.degree();
        if z.norm() <= 1.0 {
            let (p, dp) = self.eval_with_derivative(z);
            let scale = self.abs_eval(1.0);
            return (p / dp, p.norm() / scale);
        }
        // p(z) = z^d q(w), w = 1/z, q(w) = Σ c_i w^(d-i)
        let w = z.inv();
        let mut q = Complex64::new(0.0, 0.0);
        let mut dq = Complex64::new(0.0, 0.0);
        let mut scale = 0.0;
        let wn = w.norm();
        for c in self.coeffs.iter() {
            dq = dq * w + q;
            q = q * w + c;
            scale = scale * wn + c.norm();
        }
        // p/p' = 1 / (w (d - w q'/q))
        let ratio = (w * (Complex64::new(d as f64, 0.0) - w * dq / q)).inv();
        (ratio, q.norm() / scale)
    }

    /// Scaled residual `|p(z)| / Σ|c_i| max(1,|z|)^i`.
    pub fn scaled_residual(&self, z: Complex64) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        if z.norm() <= 1.0 {
            return self.eval_at(z).norm() / self.abs_eval(1.0);
        }
        let w = z.inv();
        let wn = w.norm();
        let mut q = Complex64::new(0.0, 0.0);
        let mut scale = 0.0;
        for c in self.coeffs.iter() {
            q = q * w + c;
            scale = scale * wn + c.norm();
        }
        q.norm() / scale
    }
}

fn require_nonconstant(p: &ComplexPoly) -> Result<(usize, f64)> {
    let d = p.degree();
    if d < 1 {
        return Err(Error::ConstantPolynomial { degree: d });
    }
    let lead = p.coeffs[d as usize].norm();
    Ok((d as usize, lead))
}

/// Cauchy's bound `1 + max_{i<d} |c_i| / |c_d|` on the modulus of every root.
pub fn cauchy_root_bound(p: &ComplexPoly) -> Result<f64> {
    let (d, lead) = require_nonconstant(p)?;
    let m = p.coeffs[..d].iter().map(|c| c.norm()).fold(0.0, f64::max);
    Ok(1.0 + m / lead)
}

/// Fujiwara's bound `2 max_i |c_{d-i}/c_d|^(1/i)`, usually much tighter than
/// Cauchy's when coefficients vary over many orders of magnitude.
pub fn fujiwara_bound(p: &ComplexPoly) -> Result<f64> {
    let (d, lead) = require_nonconstant(p)?;
    let mut m: f64 = 0.0;
    for i in 1..=d {
        let c = p.coeffs[d - i].norm() / lead;
        if c == 0.0 {
            continue;
        }
        let term = if i == d { (c / 2.0).powf(1.0 / i as f64) } else { c.powf(1.0 / i as f64) };
        m = m.max(term);
    }
    Ok(2.0 * m)
}
