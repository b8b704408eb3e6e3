//! Simultaneous root finding by the Aberth-Ehrlich iteration.
//!
//! Starting points come from the Newton polygon of the coefficient moduli
//! (one circle per hull edge), so widely spread root moduli do not cost
//! hundreds of iterations to reach. Updates are Jacobi style: every
//! correction in a sweep is computed from the previous iterate, which makes
//! the result independent of evaluation order.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::config::ToleranceConfig;
use crate::error::{Error, Result};
use crate::poly::{AdaptiveEvaluator, ComplexPoly, IntPoly};

/// Angular offset of the starting configuration, in radians.
pub const START_ANGLE: f64 = 0.37;

/// Converged roots closer than this are reported as one multiple root.
pub const CLUSTER_RADIUS: f64 = 1e-7;

const EPS: f64 = f64::EPSILON;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Root {
    pub value: Complex64,
    /// `|p(z)| / Σ |c_i| max(1, |z|)^i`
    pub residual: f64,
    pub multiplicity_hint: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RootSet {
    pub roots: Vec<Root>,
    pub source_degree: usize,
    pub converged: bool,
    pub iterations: usize,
}

impl RootSet {
    /// Root values with each multiple root repeated `multiplicity_hint` times.
    pub fn values_with_multiplicity(&self) -> Vec<Complex64> {
        self.roots
            .iter()
            .flat_map(|r| std::iter::repeat_n(r.value, r.multiplicity_hint))
            .collect()
    }

    pub fn total_multiplicity(&self) -> usize {
        self.roots.iter().map(|r| r.multiplicity_hint).sum()
    }
}

/// Scaled residual of each candidate root, in input order.
pub fn residual_report(p: &ComplexPoly, roots: &[Complex64]) -> Vec<f64> {
    roots.iter().map(|&z| p.scaled_residual(z)).collect()
}

/// All complex roots of `p`.
pub fn find_roots(p: &ComplexPoly, cfg: &ToleranceConfig) -> Result<RootSet> {
    cfg.validate()?;
    let degree = p.degree();
    if degree < 1 {
        return Err(Error::ConstantPolynomial { degree });
    }
    let degree = degree as usize;
    let zeros = p.coeffs().iter().take_while(|c| c.norm() == 0.0).count();
    let q = ComplexPoly::new(p.coeffs()[zeros..].to_vec());

    let (mut values, settled, iterations) = match q.degree() {
        0 => (Vec::new(), true, 0),
        1 => {
            let c = q.coeffs();
            (vec![-c[0] / c[1]], true, 0)
        }
        _ => aberth(&q, cfg.max_aberth_iters),
    };
    for z in values.iter_mut() {
        *z = polish(&q, *z);
    }

    let mut roots: Vec<Root> = values
        .iter()
        .map(|&z| Root { value: z, residual: q.scaled_residual(z), multiplicity_hint: 1 })
        .collect();
    let all_small = roots.iter().all(|r| r.residual <= cfg.root_residual_tol);
    roots = cluster(roots, &q);
    if zeros > 0 {
        roots.insert(0, Root { value: Complex64::new(0.0, 0.0), residual: 0.0, multiplicity_hint: zeros });
    }
    Ok(RootSet { roots, source_degree: degree, converged: settled && all_small, iterations })
}

/// All complex roots of an integer polynomial.
///
/// The polynomial is split into squarefree factors exactly; each factor is
/// solved in doubles and the result polished by Aberth corrections whose
/// Newton ratios come from evaluation with certified working precision
/// ([`AdaptiveEvaluator`]). Every root is therefore
/// accurate to about one ulp even when the coefficients are large and the
/// roots badly conditioned in the monomial basis. Residuals are accurate too,
/// measured against `p` itself.
pub fn find_roots_exact(p: &IntPoly, cfg: &ToleranceConfig) -> Result<RootSet> {
    cfg.validate()?;
    let degree = p.degree();
    if degree < 1 {
        return Err(Error::ConstantPolynomial { degree });
    }
    let zeros = p.coeffs().iter().take_while(|c| num_traits::Zero::is_zero(*c)).count();
    let q = IntPoly::new(p.coeffs()[zeros..].to_vec());
    let whole = AdaptiveEvaluator::new(p);

    let mut roots = Vec::new();
    let mut converged = true;
    let mut iterations = 0;
    if zeros > 0 {
        roots.push(Root { value: Complex64::new(0.0, 0.0), residual: 0.0, multiplicity_hint: zeros });
    }
    for (factor, mult) in q.squarefree_decomposition() {
        let fp = factor.to_complex_scaled();
        let mut z = if fp.degree() == 1 {
            vec![-fp.coeffs()[0] / fp.coeffs()[1]]
        } else {
            find_roots(&fp, cfg)?.values_with_multiplicity()
        };
        let (settled, its) = polish_exact(&factor, &mut z, cfg.max_aberth_iters);
        converged &= settled;
        iterations += its;
        for value in z {
            let (v, _) = whole.eval_with_derivative(value);
            let scale_log2 = whole.log2_scale(value.norm().max(1.0));
            let residual = if v.is_zero() { 0.0 } else { (v.norm_log2() - scale_log2).exp2() };
            roots.push(Root { value, residual, multiplicity_hint: mult });
        }
    }
    let all_small = roots.iter().all(|r| r.residual <= cfg.root_residual_tol);
    Ok(RootSet { roots, source_degree: degree as usize, converged: converged && all_small, iterations })
}

fn polish_exact(f: &IntPoly, z: &mut [Complex64], max_iters: usize) -> (bool, usize) {
    let ev = AdaptiveEvaluator::new(f);
    aberth_polish(z, max_iters, |x| {
        let (v, dv) = ev.eval_with_derivative(x);
        if v.is_zero() {
            Complex64::new(0.0, 0.0)
        } else {
            v.div(&dv).to_complex()
        }
    })
}

// relative step below which a non-shrinking correction is treated as noise
const NOISE_STEP: f64 = 1e-11;

/// Aberth sweeps from the given approximations, with Newton ratios
/// `p(z) / p'(z)` supplied by `ratio`. Returns whether every root settled
/// (last correction within a few ulps, or small and no longer shrinking)
/// and the number of sweeps.
pub fn aberth_polish<F>(z: &mut [Complex64], max_iters: usize, ratio: F) -> (bool, usize)
where
    F: Fn(Complex64) -> Complex64 + Sync,
{
    let d = z.len();
    let mut done = vec![false; d];
    let mut last = vec![f64::INFINITY; d];
    for it in 1..=max_iters {
        let ratios: Vec<Option<Complex64>> =
            (0..d).into_par_iter().map(|i| (!done[i]).then(|| ratio(z[i]))).collect();
        let steps: Vec<Option<Complex64>> = ratios
            .iter()
            .enumerate()
            .map(|(i, r)| {
                let r = (*r)?;
                let mut s = Complex64::new(0.0, 0.0);
                for j in 0..d {
                    let diff = z[i] - z[j];
                    if j != i && diff.norm() > 0.0 {
                        s += diff.inv();
                    }
                }
                let w = r / (Complex64::new(1.0, 0.0) - r * s);
                Some(if w.is_finite() {
                    w
                } else if r.is_finite() {
                    r
                } else {
                    Complex64::new(0.0, 0.0)
                })
            })
            .collect();
        for (i, w) in steps.into_iter().enumerate() {
            let Some(w) = w else { continue };
            let size = w.norm();
            // stop at the rounding floor, or once small steps stop shrinking (noise)
            if size <= 4.0 * EPS * z[i].norm() || (size >= last[i] && size <= NOISE_STEP * z[i].norm()) {
                done[i] = true;
            }
            last[i] = size;
            z[i] -= w;
        }
        if done.iter().all(|&x| x) {
            return (true, it);
        }
    }
    (false, max_iters)
}

/// Starting points on circles given by the upper convex hull of
/// `(i, ln |c_i|)`.
pub fn initial_points(p: &ComplexPoly) -> Vec<Complex64> {
    let d = p.degree() as usize;
    let pts: Vec<(usize, f64)> = p
        .coeffs()
        .iter()
        .enumerate()
        .filter(|(_, c)| c.norm() > 0.0)
        .map(|(i, c)| (i, c.norm().ln()))
        .collect();
    let mut hull: Vec<(usize, f64)> = Vec::with_capacity(pts.len());
    for &pt in &pts {
        while hull.len() >= 2 {
            let (a, b) = (hull[hull.len() - 2], hull[hull.len() - 1]);
            // drop b unless it lies strictly above the chord a-pt
            let cross = (b.0 as f64 - a.0 as f64) * (pt.1 - a.1) - (b.1 - a.1) * (pt.0 as f64 - a.0 as f64);
            if cross >= 0.0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(pt);
    }
    let mut out = Vec::with_capacity(d);
    for (h, w) in hull.windows(2).enumerate() {
        let (i0, l0) = w[0];
        let (i1, l1) = w[1];
        let count = i1 - i0;
        let radius = ((l0 - l1) / count as f64).exp();
        for j in 0..count {
            let theta = TAU * j as f64 / count as f64 + TAU * h as f64 / d as f64 + START_ANGLE;
            out.push(Complex64::from_polar(radius, theta));
        }
    }
    out
}

// returns (roots, all settled, iterations used)
fn aberth(p: &ComplexPoly, max_iters: usize) -> (Vec<Complex64>, bool, usize) {
    let d = p.degree() as usize;
    let mut z = initial_points(p);
    let mut done = vec![false; d];
    let settle_residual = 4.0 * d as f64 * EPS;
    for it in 1..=max_iters {
        let steps: Vec<Option<Complex64>> = (0..d)
            .map(|i| {
                if done[i] {
                    return None;
                }
                let (ratio, res) = p.newton_step(z[i]);
                if res <= settle_residual || !ratio.is_finite() {
                    return Some(Complex64::new(0.0, 0.0));
                }
                let mut s = Complex64::new(0.0, 0.0);
                for j in 0..d {
                    if j != i {
                        let diff = z[i] - z[j];
                        if diff.norm() > 0.0 {
                            s += diff.inv();
                        }
                    }
                }
                let w = ratio / (Complex64::new(1.0, 0.0) - ratio * s);
                Some(if w.is_finite() { w } else { ratio })
            })
            .collect();
        for (i, step) in steps.into_iter().enumerate() {
            if let Some(w) = step {
                if w.norm() <= 2.0 * EPS * z[i].norm() {
                    done[i] = true;
                }
                z[i] -= w;
            }
        }
        if done.iter().all(|&x| x) {
            return (z, true, it);
        }
    }
    (z, false, max_iters)
}

// a few Newton steps, kept only while the residual improves
fn polish(p: &ComplexPoly, mut z: Complex64) -> Complex64 {
    let mut res = p.scaled_residual(z);
    for _ in 0..3 {
        if res == 0.0 {
            break;
        }
        let (ratio, _) = p.newton_step(z);
        let cand = z - ratio;
        if !cand.is_finite() {
            break;
        }
        let r = p.scaled_residual(cand);
        if r < res {
            z = cand;
            res = r;
        } else {
            break;
        }
    }
    z
}

// merge roots within CLUSTER_RADIUS (relative to max(1, |z|)) into one entry
pub(crate) fn cluster(mut roots: Vec<Root>, p: &ComplexPoly) -> Vec<Root> {
    let mut out: Vec<Root> = Vec::with_capacity(roots.len());
    let mut used = vec![false; roots.len()];
    for i in 0..roots.len() {
        if used[i] {
            continue;
        }
        used[i] = true;
        let mut members = vec![roots[i].value];
        for j in i + 1..roots.len() {
            if used[j] {
                continue;
            }
            let scale = roots[i].value.norm().max(1.0);
            if (roots[j].value - roots[i].value).norm() <= CLUSTER_RADIUS * scale {
                used[j] = true;
                members.push(roots[j].value);
            }
        }
        if members.len() == 1 {
            out.push(roots[i]);
        } else {
            let centroid = members.iter().sum::<Complex64>() / members.len() as f64;
            out.push(Root { value: centroid, residual: p.scaled_residual(centroid), multiplicity_hint: members.len() });
        }
    }
    roots.clear();
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cp(c: &[f64]) -> ComplexPoly {
        ComplexPoly::from_reals(c)
    }

    fn sorted_re(set: &RootSet) -> Vec<f64> {
        let mut v: Vec<f64> = set.values_with_multiplicity().iter().map(|z| z.re).collect();
        v.sort_by(f64::total_cmp);
        v
    }

    #[test]
    fn plus_minus_i() {
        let set = find_roots(&cp(&[1.0, 0.0, 1.0]), &ToleranceConfig::default()).unwrap();
        assert!(set.converged);
        assert_eq!(set.roots.len(), 2);
        for r in &set.roots {
            assert!((r.value.norm() - 1.0).abs() < 1e-14 && r.value.re.abs() < 1e-14);
            assert!(r.residual < 1e-12);
        }
        assert!((set.roots[0].value.im + set.roots[1].value.im).abs() < 1e-14);
    }

    #[test]
    fn cubic_with_known_roots() {
        // (z-1)(z-2)(z-3)
        let set = find_roots(&cp(&[-6.0, 11.0, -6.0, 1.0]), &ToleranceConfig::default()).unwrap();
        assert!(set.converged);
        let re = sorted_re(&set);
        for (got, want) in re.iter().zip([1.0, 2.0, 3.0]) {
            assert!((got - want).abs() < 1e-12);
        }
    }

    #[test]
    fn monomial_deflation() {
        let set = find_roots(&cp(&[0.0, 0.0, 1.0]), &ToleranceConfig::default()).unwrap();
        assert_eq!(set.roots.len(), 1);
        assert_eq!(set.roots[0].value, Complex64::new(0.0, 0.0));
        assert_eq!(set.roots[0].multiplicity_hint, 2);
        assert!(set.converged);
    }

    #[test]
    fn constant_is_an_error() {
        let cfg = ToleranceConfig::default();
        assert!(matches!(find_roots(&cp(&[3.0]), &cfg), Err(Error::ConstantPolynomial { degree: 0 })));
        assert!(matches!(find_roots(&cp(&[]), &cfg), Err(Error::ConstantPolynomial { degree: -1 })));
    }

    #[test]
    fn residual_examples() {
        let p = cp(&[-1.0, 1.0]);
        assert_eq!(residual_report(&p, &[Complex64::new(1.0, 0.0)]), vec![0.0]);
        let r = residual_report(&p, &[Complex64::new(1.0 + 1e-6, 0.0)])[0];
        // |p| = 1e-6 over the scale 1 + (1 + 1e-6)
        assert!((r - 1e-6 / (2.0 + 1e-6)).abs() < 1e-15);
        let r = residual_report(&cp(&[1.0, 0.0, 1.0]), &[Complex64::i()])[0];
        assert!(r <= 1e-15);
    }

    #[test]
    fn wide_modulus_spread() {
        // roots 1e-6, 1, 1e6 need several hull circles
        let a = cp(&[-1e-6, 1.0]);
        let b = cp(&[-1.0, 1.0]);
        let c = cp(&[-1e6, 1.0]);
        let p = &(&a * &b) * &c;
        let set = find_roots(&p, &ToleranceConfig::default()).unwrap();
        assert!(set.converged, "{set:?}");
        let re = sorted_re(&set);
        assert!((re[0] - 1e-6).abs() < 1e-18);
        assert!((re[1] - 1.0).abs() < 1e-12);
        assert!((re[2] - 1e6).abs() < 1e-6);
    }

    #[test]
    fn double_root_is_clustered() {
        // (z - 2)^2 (z + 1)
        let p = &cp(&[-2.0, 1.0]).pow(2) * &cp(&[1.0, 1.0]);
        let set = find_roots(&p, &ToleranceConfig::default()).unwrap();
        assert_eq!(set.total_multiplicity(), 3);
        let double = set.roots.iter().find(|r| r.multiplicity_hint == 2).expect("double root");
        assert!((double.value - Complex64::new(2.0, 0.0)).norm() < 1e-7);
    }

    #[test]
    fn exact_polish_resolves_ill_conditioned_roots() {
        // Wilkinson's polynomial: doubles leave errors near 1e-3 on the middle roots
        let p = (1..=20).fold(IntPoly::one(), |acc, r| &acc * &IntPoly::from_i64s(&[-r, 1]));
        let set = find_roots_exact(&p, &ToleranceConfig::default()).unwrap();
        assert!(set.converged);
        let re = sorted_re(&set);
        for (got, want) in re.iter().zip(1..=20) {
            assert!((got - want as f64).abs() <= 4.0 * EPS * want as f64, "{got} vs {want}");
        }
    }

    #[test]
    fn exact_multiplicities_and_zero_roots() {
        // z^2 (z - 3)^3 (z^2 + 2)
        let p = &(&IntPoly::from_i64s(&[0, 0, 1]) * &IntPoly::from_i64s(&[-3, 1]).pow(3)) * &IntPoly::from_i64s(&[2, 0, 1]);
        let set = find_roots_exact(&p, &ToleranceConfig::default()).unwrap();
        assert_eq!(set.total_multiplicity(), 7);
        assert!(set.converged);
        let triple = set.roots.iter().find(|r| r.multiplicity_hint == 3).unwrap();
        assert_eq!(triple.value, Complex64::new(3.0, 0.0));
        let zero = set.roots.iter().find(|r| r.multiplicity_hint == 2).unwrap();
        assert_eq!(zero.value, Complex64::new(0.0, 0.0));
        for r in set.roots.iter().filter(|r| r.multiplicity_hint == 1) {
            assert!((r.value.im.abs() - 2f64.sqrt()).abs() < 1e-15 && r.value.re.abs() < 1e-15);
        }
        assert!(matches!(find_roots_exact(&IntPoly::from_i64s(&[4]), &ToleranceConfig::default()), Err(Error::ConstantPolynomial { degree: 0 })));
    }

    #[test]
    fn initial_points_follow_hull() {
        let p = cp(&[1.0, 0.0, 0.0, 0.0, 1.0]);
        let pts = initial_points(&p);
        assert_eq!(pts.len(), 4);
        assert!(pts.iter().all(|z| (z.norm() - 1.0).abs() < 1e-12));
    }
}
