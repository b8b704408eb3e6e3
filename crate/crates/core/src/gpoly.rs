//! Lattice-path generating polynomials
//!
//! ```text
//! G_{l,k,n}(τ) = Σ_{u=1..s} C(i_u + j_u, i_u) τ^(u-1)
//! ```
//!
//! over the lattice points `(i_u, j_u)` of `i l + j k = n`, ordered by
//! increasing `i`. Its roots are real and negative; [`real_negative_roots`]
//! confirms that for a given polynomial with an exact certificate.

use num_bigint::BigInt;
use num_complex::Complex64;

use crate::config::ToleranceConfig;
use crate::error::{Error, Result};
use crate::isolate::{self, Point};
use crate::poly::{binomial, ComplexPoly, Dyadic, IntPoly};
use crate::recurrence::{lattice_solutions, LatticeSolutionSet};
use crate::recurrence::{PointEvaluator, RecurrenceSpec};
use crate::rootfind::{aberth_polish, find_roots, find_roots_exact};

/// Default relative width of refined root brackets.
pub const DEFAULT_ROOT_TOL: f64 = 1e-10;

/// Above these sizes the Sturm fallback is skipped.
pub const STURM_MAX_DEGREE: isize = 60;
pub const STURM_MAX_BITS: u64 = 2048;

#[derive(Clone, Debug, PartialEq)]
pub struct GPoly {
    pub ell: usize,
    pub k: usize,
    pub n: usize,
    /// Coefficients in `τ`; zero polynomial for an empty lattice.
    pub coeffs: IntPoly,
    pub lattice: LatticeSolutionSet,
}

/// Build `G_{l,k,n}`. Requires `gcd(l, k) = 1`.
pub fn g_poly(ell: usize, k: usize, n: usize) -> Result<GPoly> {
    let lattice = lattice_solutions(ell, k, n)?;
    let coeffs = lattice
        .solutions
        .iter()
        .map(|&(i, j)| binomial((i + j) as u64, i as u64))
        .collect::<Vec<BigInt>>();
    Ok(GPoly { ell, k, n, coeffs: IntPoly::new(coeffs), lattice })
}

/// How the root count was established.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Certificate {
    /// Exact signs alternate across `degree` consecutive brackets in `(-R, 0)`.
    SignChanges,
    /// Sturm-sequence isolation over the dyadic rationals.
    Sturm,
    /// Floating-point roots only; nothing certified.
    Floating,
}

#[derive(Clone, Debug, PartialEq)]
pub struct NegativeRoots {
    /// Real roots in increasing order, repeated by multiplicity.
    pub roots: Vec<f64>,
    /// The number of negative roots, with multiplicity, equals the degree.
    pub certified: bool,
    pub method: Certificate,
    pub warning: Option<String>,
}

/// Find the real roots of `g` and certify that all of them are negative.
///
/// The fast path takes floating Aberth roots, places a dyadic separator
/// between consecutive ones, and checks exactly that `g` changes sign across
/// every bracket of `(-R, ..., 0)`. With `degree` sign changes the
/// intermediate value theorem accounts for every root. When that fails
/// (clustered or repeated roots), Sturm isolation decides instead.
pub fn real_negative_roots(g: &GPoly, tol: f64) -> Result<NegativeRoots> {
    let p = &g.coeffs;
    if p.degree() < 1 {
        return Err(Error::ConstantPolynomial { degree: p.degree() });
    }
    if let Some(roots) = float_approximations(p).and_then(|a| sign_change_certificate(p, a, tol)) {
        return Ok(NegativeRoots { roots, certified: true, method: Certificate::SignChanges, warning: None });
    }
    if let Some(roots) = lattice_approximations(g).and_then(|a| sign_change_certificate(p, a, tol)) {
        return Ok(NegativeRoots { roots, certified: true, method: Certificate::SignChanges, warning: None });
    }
    negative_roots_of(p, tol)
}

// Roots of G polished through the recurrence: with A = -1 and B = -z the
// terms are P_n(z) = z^(i_1) G(z^k), which the recurrence evaluates stably
// where the expanded G cancels.
fn lattice_approximations(g: &GPoly) -> Option<Vec<f64>> {
    let (i1, _) = g.lattice.first()?;
    let one = Complex64::new(1.0, 0.0);
    let spec = RecurrenceSpec::new(ComplexPoly::new(vec![-one]), ComplexPoly::new(vec![0.0 * one, -one]), g.ell, g.k).ok()?;
    let ev = PointEvaluator::new(&spec, g.n);
    let (fp, _) = g.coeffs.to_complex().ok()?;
    let mut tau = find_roots(&fp, &ToleranceConfig::default()).ok()?.values_with_multiplicity();
    let k = g.k as f64;
    aberth_polish(&mut tau, ToleranceConfig::default().max_aberth_iters, |t| {
        let z = t.powf(1.0 / k);
        let (v, dv) = ev.eval(z);
        if v.is_zero() {
            return Complex64::new(0.0, 0.0);
        }
        // G / G' = k t / (z P'/P - i_1)
        k * t / (z * dv.div(&v).to_complex() - i1 as f64)
    });
    Some(tau.iter().map(|t| t.re).collect())
}

/// [`real_negative_roots`] for an arbitrary integer polynomial.
pub fn negative_roots_of(p: &IntPoly, tol: f64) -> Result<NegativeRoots> {
    let degree = p.degree();
    if degree < 1 {
        return Err(Error::ConstantPolynomial { degree });
    }
    // double-precision roots first; clustered roots need exactly polished ones
    let attempts: [fn(&IntPoly) -> Option<Vec<f64>>; 2] = [float_approximations, exact_approximations];
    for approximate in attempts {
        if let Some(roots) = approximate(p).and_then(|a| sign_change_certificate(p, a, tol)) {
            return Ok(NegativeRoots { roots, certified: true, method: Certificate::SignChanges, warning: None });
        }
    }
    if degree <= STURM_MAX_DEGREE && p.max_bits() <= STURM_MAX_BITS {
        return Ok(sturm_certificate(p, tol));
    }
    let warning = format!(
        "degree {degree} / {} coefficient bits too large for exact isolation; roots are floating only",
        p.max_bits()
    );
    let roots = floating_real_roots(p)?;
    Ok(NegativeRoots { roots, certified: false, method: Certificate::Floating, warning: Some(warning) })
}

fn floating_real_roots(p: &IntPoly) -> Result<Vec<f64>> {
    let (fp, _) = p.to_complex()?;
    let set = find_roots(&fp, &ToleranceConfig::default())?;
    let mut re: Vec<f64> = set
        .values_with_multiplicity()
        .into_iter()
        .filter(|z| z.im.abs() <= 1e-8 * z.norm().max(1e-300))
        .map(|z| z.re)
        .collect();
    re.sort_by(f64::total_cmp);
    Ok(re)
}

fn float_approximations(p: &IntPoly) -> Option<Vec<f64>> {
    let (fp, _) = p.to_complex().ok()?;
    let set = find_roots(&fp, &ToleranceConfig::default()).ok()?;
    Some(set.values_with_multiplicity().iter().map(|z| z.re).collect())
}

fn exact_approximations(p: &IntPoly) -> Option<Vec<f64>> {
    let set = find_roots_exact(p, &ToleranceConfig::default()).ok()?;
    Some(set.values_with_multiplicity().iter().map(|z| z.re).collect())
}

fn sign_change_certificate(p: &IntPoly, mut approx: Vec<f64>, tol: f64) -> Option<Vec<f64>> {
    let d = p.degree() as usize;
    if approx.len() != d || approx.iter().any(|x| !x.is_finite() || *x >= 0.0) {
        return None;
    }
    approx.sort_by(f64::total_cmp);
    // separators: -R, geometric means of neighbours, 0
    let mut seps = Vec::with_capacity(d + 1);
    seps.push(Dyadic::from_int(-isolate::root_radius(p)));
    for w in approx.windows(2) {
        let m = -(w[0] * w[1]).sqrt();
        if !(m > w[0] && m < w[1]) {
            return None;
        }
        seps.push(Dyadic::from_f64(m));
    }
    seps.push(Dyadic::from_f64(0.0));
    let signs: Vec<i8> = seps.iter().map(|x| p.sign_at(x)).collect();
    if signs.contains(&0) || signs.windows(2).any(|w| w[0] == w[1]) {
        return None;
    }
    // an approximation bracketed within the tolerance is kept as is
    let roots = seps
        .windows(2)
        .zip(&approx)
        .map(|(w, &x)| {
            let (lo, hi) = (x * (1.0 + 0.5 * tol), x * (1.0 - 0.5 * tol));
            let inside = lo > w[0].to_f64() && hi < w[1].to_f64();
            let (s_lo, s_hi) = (p.sign_at(&Dyadic::from_f64(lo)), p.sign_at(&Dyadic::from_f64(hi)));
            if inside && s_lo != 0 && s_lo == -s_hi {
                x
            } else {
                isolate::bisect_sign_change(p, w[0].clone(), w[1].clone(), tol)
            }
        })
        .collect();
    Some(roots)
}

fn sturm_certificate(p: &IntPoly, tol: f64) -> NegativeRoots {
    let d = p.degree() as usize;
    let zero = Point::At(Dyadic::from_f64(0.0));
    let negative = isolate::count_with_multiplicity(p, &Point::NegInf, &zero);
    let s = p.squarefree_part();
    let mut roots = Vec::with_capacity(d);
    for iv in isolate::isolate_real_roots(p) {
        let x = isolate::refine_root(&s, &iv, tol);
        roots.extend(std::iter::repeat_n(x, iv.multiplicity));
    }
    NegativeRoots { roots, certified: negative == d, method: Certificate::Sturm, warning: None }
}
