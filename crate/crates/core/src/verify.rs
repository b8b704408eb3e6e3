//! End-to-end check that the roots of `P_n` lie on `Im(B^k / A^l) = 0`.
//!
//! Exact mode builds `P_n` over the integers and divides out every factor it
//! shares with `A B` before root finding: such factors are exactly the roots
//! the curve statement excludes, and they tend to be multiple roots, which
//! floating root finders resolve poorly. The stripped roots are still
//! reported, as excluded. The other roots are polished with Newton ratios
//! computed by running the recurrence at the point
//! ([`PointEvaluator`]), which stays accurate where the expanded
//! coefficients cancel catastrophically. Float mode runs the recurrence in complex doubles
//! and classifies each root numerically.
//!
//! Each root off the zeros of `A B` is also matched against the negative
//! roots of `G_{l,k,n}`, since `(-1)^(k-l) B^k / A^l` must be one of them.

use num_complex::Complex64;
use num_traits::Zero;

use crate::config::ToleranceConfig;
use crate::curve::{membership, MembershipVerdict};
use crate::error::{Error, Result};
use crate::gpoly::{g_poly, real_negative_roots, DEFAULT_ROOT_TOL};
use crate::poly::{AdaptiveEvaluator, ComplexPoly, IntPoly, Rounding};
use crate::recurrence::{nth_term, PointEvaluator, RecurrenceSpec};
use crate::rootfind::{aberth_polish, cluster, find_roots, find_roots_exact, Root};
use num_bigint::BigInt;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Exact,
    Float,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RootStatus {
    OnCurve,
    /// At (or numerically indistinguishable from) a zero of `A B`.
    Excluded,
    Failed,
}

/// Nearest negative root of `G_{l,k,n}` to the signed map value.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GMatch {
    pub tau: f64,
    pub rel_err: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RootVerdict {
    pub root: Root,
    pub membership: MembershipVerdict,
    pub status: RootStatus,
    pub g_match: Option<GMatch>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Summary {
    pub total: usize,
    pub on_curve_count: usize,
    pub excluded_count: usize,
    pub failed_count: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct VerifyReport {
    pub mode: Mode,
    pub n: usize,
    /// Degree of `P_n`; `-1` for the zero polynomial.
    pub degree: isize,
    pub roots: Vec<RootVerdict>,
    pub summary: Summary,
    /// Root finding converged for every factor examined.
    pub converged: bool,
    /// Rounding of the integer `P_n` to doubles (exact mode only; `None` if
    /// a coefficient overflows).
    pub rounding: Option<Rounding>,
    pub warnings: Vec<String>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.summary.failed_count == 0
    }
}

fn summarize(roots: &[RootVerdict]) -> Summary {
    let mut s = Summary { total: roots.len(), ..Summary::default() };
    for r in roots {
        match r.status {
            RootStatus::OnCurve => s.on_curve_count += 1,
            RootStatus::Excluded => s.excluded_count += 1,
            RootStatus::Failed => s.failed_count += 1,
        }
    }
    s
}

/// Negative roots of `G_{l,k,n}`, or empty when `G` is constant.
fn g_roots(ell: usize, k: usize, n: usize) -> Result<(Vec<f64>, Option<String>)> {
    let g = g_poly(ell, k, n)?;
    if g.coeffs.degree() < 1 {
        return Ok((Vec::new(), None));
    }
    let r = real_negative_roots(&g, DEFAULT_ROOT_TOL)?;
    Ok((r.roots, r.warning))
}

fn match_g(signed_value: f64, taus: &[f64]) -> Option<GMatch> {
    taus.iter()
        .map(|&tau| GMatch { tau, rel_err: (signed_value - tau).abs() / tau.abs() })
        .min_by(|a, b| a.rel_err.total_cmp(&b.rel_err))
}

struct Classifier<'a> {
    a: ComplexPoly,
    b: ComplexPoly,
    ell: usize,
    k: usize,
    cfg: &'a ToleranceConfig,
    taus: Vec<f64>,
}

impl Classifier<'_> {
    fn classify(&self, root: Root, forced_excluded: bool) -> Result<RootVerdict> {
        let m = membership(&self.a, &self.b, self.ell, self.k, root.value, self.cfg)?;
        let status = if forced_excluded || m.near_ab_zero {
            RootStatus::Excluded
        } else if m.on_curve {
            RootStatus::OnCurve
        } else {
            RootStatus::Failed
        };
        let g_match = match status {
            RootStatus::Excluded => None,
            _ => match_g(m.signed_value, &self.taus),
        };
        Ok(RootVerdict { root, membership: m, status, g_match })
    }
}

fn expand(roots: Vec<Root>) -> Vec<Root> {
    // one verdict per root counted with multiplicity, so totals equal the degree
    roots
        .into_iter()
        .flat_map(|r| std::iter::repeat_n(Root { multiplicity_hint: 1, ..r }, r.multiplicity_hint))
        .collect()
}

/// Roots of `P_n`, split by whether they were divided out as common factors
/// with `A B` (exact mode only; float mode leaves `at_ab_zeros` empty).
#[derive(Clone, Debug, PartialEq)]
pub struct TermRoots {
    pub degree: isize,
    pub at_ab_zeros: Vec<Root>,
    pub others: Vec<Root>,
    pub converged: bool,
    /// Rounding of the exact coefficients to doubles; `None` in float mode
    /// or when a coefficient overflows.
    pub rounding: Option<Rounding>,
}

impl TermRoots {
    /// All roots, those at zeros of `A B` first.
    pub fn all(&self) -> impl Iterator<Item = &Root> {
        self.at_ab_zeros.iter().chain(&self.others)
    }
}

fn sort_roots(roots: &mut [Root]) {
    roots.sort_by(|x, y| x.value.re.total_cmp(&y.value.re).then(x.value.im.total_cmp(&y.value.im)));
}

fn complex_spec(spec: &RecurrenceSpec<BigInt>) -> Result<RecurrenceSpec<Complex64>> {
    RecurrenceSpec::new(int_to_complex(spec.a())?, int_to_complex(spec.b())?, spec.ell(), spec.k())
}

// |P_n(z)| / Σ|c_i| max(1,|z|)^i with the value taken from the recurrence
fn term_residual(ev: &PointEvaluator, log2_scale: impl Fn(f64) -> f64, z: Complex64) -> f64 {
    let (v, _) = ev.eval(z);
    if v.is_zero() {
        return 0.0;
    }
    (v.norm_log2() - log2_scale(z.norm().max(1.0))).exp2()
}

/// Roots of the exact `P_n`.
///
/// Factors shared with `A B` are split off exactly and solved on their own.
/// The remaining cofactor is solved in doubles and then polished with
/// Newton ratios of `P_n` evaluated through the recurrence, corrected for
/// the split-off factors. Falls back to [`find_roots_exact`] if the cofactor
/// cannot be shown squarefree.
pub fn term_roots_exact(spec: &RecurrenceSpec<BigInt>, n: usize, cfg: &ToleranceConfig) -> Result<TermRoots> {
    cfg.validate()?;
    let p = nth_term(spec, n);
    let degree = p.degree();
    let rounding = p.to_complex().ok().map(|(_, r)| r);
    let mut out = TermRoots { degree, at_ab_zeros: Vec::new(), others: Vec::new(), converged: true, rounding };
    if degree < 1 {
        return Ok(out);
    }
    let (stripped, cofactor) = strip_ab_factors(&p, spec.a(), spec.b());
    if stripped.degree() >= 1 {
        let set = find_roots_exact(&stripped, cfg)?;
        out.converged &= set.converged;
        out.at_ab_zeros = set.roots;
    }
    if cofactor.degree() >= 1 {
        if cofactor.is_certainly_squarefree() {
            let ev = PointEvaluator::new(&complex_spec(spec)?, n);
            let removed: Vec<(ComplexPoly, ComplexPoly, f64)> = stripped
                .squarefree_decomposition()
                .into_iter()
                .map(|(g, m)| {
                    let gf = g.to_complex_scaled();
                    (gf.derivative(), gf, m as f64)
                })
                .collect();
            let mut z = find_roots(&cofactor.to_complex_scaled(), cfg)?.values_with_multiplicity();
            let (settled, _) = aberth_polish(&mut z, cfg.max_aberth_iters, |x| {
                let (v, dv) = ev.eval(x);
                if v.is_zero() {
                    return Complex64::new(0.0, 0.0);
                }
                // (P / S)' / (P / S) = P'/P - Σ m g'/g
                let mut log_derivative = dv.div(&v).to_complex();
                for (dg, g, m) in &removed {
                    log_derivative -= *m * dg.eval_at(x) / g.eval_at(x);
                }
                log_derivative.inv()
            });
            let whole = AdaptiveEvaluator::new(&p);
            let roots: Vec<Root> = z
                .into_iter()
                .map(|value| Root {
                    value,
                    residual: term_residual(&ev, |r| whole.log2_scale(r), value),
                    multiplicity_hint: 1,
                })
                .collect();
            out.converged &= settled && roots.iter().all(|r| r.residual <= cfg.root_residual_tol);
            out.others = roots;
        } else {
            let set = find_roots_exact(&cofactor, cfg)?;
            out.converged &= set.converged;
            out.others = set.roots;
        }
    }
    sort_roots(&mut out.at_ab_zeros);
    sort_roots(&mut out.others);
    Ok(out)
}

/// Roots of `P_n` generated in complex doubles, polished with Newton ratios
/// evaluated through the recurrence.
pub fn term_roots_float(spec: &RecurrenceSpec<Complex64>, n: usize, cfg: &ToleranceConfig) -> Result<TermRoots> {
    cfg.validate()?;
    let p = nth_term(spec, n);
    let degree = p.degree();
    let mut out = TermRoots { degree, at_ab_zeros: Vec::new(), others: Vec::new(), converged: true, rounding: None };
    if degree < 1 {
        return Ok(out);
    }
    let ev = PointEvaluator::new(spec, n);
    let mut z = find_roots(&p, cfg)?.values_with_multiplicity();
    let (settled, _) = aberth_polish(&mut z, cfg.max_aberth_iters, |x| ev.newton_ratio(x));
    let log2_scale = |r: f64| p.abs_eval(r).log2();
    let roots: Vec<Root> = z
        .into_iter()
        .map(|value| Root { value, residual: term_residual(&ev, log2_scale, value), multiplicity_hint: 1 })
        .collect();
    let all_small = roots.iter().all(|r| r.residual <= cfg.root_residual_tol);
    out.others = cluster(roots, &p);
    // repeated roots converge only linearly, so they do not count against convergence
    out.converged = all_small && (settled || out.others.iter().any(|r| r.multiplicity_hint > 1));
    sort_roots(&mut out.others);
    Ok(out)
}

fn report(
    mode: Mode,
    n: usize,
    roots: TermRoots,
    classifier: &Classifier,
    mut warnings: Vec<String>,
) -> Result<VerifyReport> {
    if roots.degree < 1 {
        return Ok(empty_report(mode, n, roots.degree, warnings));
    }
    let mut verdicts = Vec::with_capacity(roots.degree as usize);
    for r in expand(roots.at_ab_zeros) {
        verdicts.push(classifier.classify(r, true)?);
    }
    for r in expand(roots.others) {
        verdicts.push(classifier.classify(r, false)?);
    }
    if let Some(r) = roots.rounding.filter(|r| !r.exact) {
        warnings.push(format!(
            "coefficients exceed 2^53 (max relative rounding {:.3e}); roots were polished without rounded coefficients",
            r.max_rel_err
        ));
    }
    let summary = summarize(&verdicts);
    Ok(VerifyReport {
        mode,
        n,
        degree: roots.degree,
        roots: verdicts,
        summary,
        converged: roots.converged,
        rounding: roots.rounding,
        warnings,
    })
}

/// Verify the roots of the exact integer `P_n`. The spec must have coprime
/// `l` and `k`.
pub fn verify_exact(spec: &RecurrenceSpec<BigInt>, n: usize, cfg: &ToleranceConfig) -> Result<VerifyReport> {
    cfg.validate()?;
    require_coprime(spec.ell(), spec.k())?;
    let (taus, g_warning) = g_roots(spec.ell(), spec.k(), n)?;
    let fspec = complex_spec(spec)?;
    let classifier = Classifier { a: fspec.a().clone(), b: fspec.b().clone(), ell: spec.ell(), k: spec.k(), cfg, taus };
    let roots = term_roots_exact(spec, n, cfg)?;
    report(Mode::Exact, n, roots, &classifier, g_warning.into_iter().collect())
}

/// Verify the roots of `P_n` generated in complex floating point.
pub fn verify_float(spec: &RecurrenceSpec<Complex64>, n: usize, cfg: &ToleranceConfig) -> Result<VerifyReport> {
    cfg.validate()?;
    require_coprime(spec.ell(), spec.k())?;
    let (taus, g_warning) = g_roots(spec.ell(), spec.k(), n)?;
    let classifier = Classifier { a: spec.a().clone(), b: spec.b().clone(), ell: spec.ell(), k: spec.k(), cfg, taus };
    let roots = term_roots_float(spec, n, cfg)?;
    report(Mode::Float, n, roots, &classifier, g_warning.into_iter().collect())
}

fn empty_report(mode: Mode, n: usize, degree: isize, mut warnings: Vec<String>) -> VerifyReport {
    if degree < 0 {
        warnings.push(format!("P_{n} is the zero polynomial"));
    }
    VerifyReport { mode, n, degree, roots: Vec::new(), summary: Summary::default(), converged: true, rounding: None, warnings }
}

fn require_coprime(ell: usize, k: usize) -> Result<()> {
    let gcd = num_integer::gcd(ell, k);
    if gcd != 1 {
        return Err(Error::NotCoprime { ell, k, gcd });
    }
    Ok(())
}

fn int_to_complex(p: &IntPoly) -> Result<ComplexPoly> {
    Ok(p.to_complex()?.0)
}

/// Split `p = stripped * cofactor` where `stripped` collects every factor of
/// `p` shared with `A B` (with full multiplicity) and `cofactor` has no root
/// in common with `A B`.
pub fn strip_ab_factors(p: &IntPoly, a: &IntPoly, b: &IntPoly) -> (IntPoly, IntPoly) {
    let ab = match (a.is_zero(), b.is_zero()) {
        (false, false) => a * b,
        (true, false) => b.clone(),
        (false, true) => a.clone(),
        (true, true) => IntPoly::zero(),
    };
    let mut stripped = IntPoly::one();
    let mut cofactor = p.clone();
    if ab.degree() < 1 || p.is_zero() {
        return (stripped, cofactor);
    }
    let s = ab.squarefree_part();
    loop {
        let g = cofactor.gcd(&s);
        if g.degree() < 1 {
            break;
        }
        cofactor = cofactor.div_exact(&g).expect("gcd divides its argument");
        stripped = &stripped * &g;
    }
    // keep the product exactly equal to p (content and sign live in the cofactor)
    debug_assert!((&stripped * &cofactor - p.clone()).coeffs().iter().all(Zero::is_zero));
    (stripped, cofactor)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::recurrence::int_spec;

    #[test]
    fn degree_21_example_passes() {
        let spec = int_spec(&[1, 1, 0, 1], &[7, -2, 1], 2, 3).unwrap();
        let report = verify_exact(&spec, 21, &ToleranceConfig::default()).unwrap();
        assert_eq!(report.degree, 21);
        // A divides P_21 (the last lattice point is (9, 1)); its three roots are excluded
        assert_eq!(report.summary, Summary { total: 21, on_curve_count: 18, excluded_count: 3, failed_count: 0 });
        assert!(report.converged && report.passed());
        for r in report.roots.iter().filter(|r| r.status == RootStatus::OnCurve) {
            assert!(r.membership.signed_value < 0.0);
            assert!(r.g_match.unwrap().rel_err < 1e-5);
        }
    }

    #[test]
    fn float_mode_agrees() {
        let spec = int_spec(&[1, 1, 0, 1], &[7, -2, 1], 2, 3).unwrap();
        let fspec = RecurrenceSpec::new(
            int_to_complex(spec.a()).unwrap(),
            int_to_complex(spec.b()).unwrap(),
            2,
            3,
        )
        .unwrap();
        let report = verify_float(&fspec, 21, &ToleranceConfig::default()).unwrap();
        assert_eq!(report.summary.on_curve_count, 18);
        assert_eq!(report.summary.excluded_count, 3);
    }

    #[test]
    fn shared_factors_are_excluded() {
        // A = z: P_n picks up powers of z whenever the lattice forces j_1 > 0
        let spec = int_spec(&[0, 1], &[1, 1], 1, 2).unwrap();
        let p = nth_term(&spec, 7);
        let (stripped, cofactor) = strip_ab_factors(&p, spec.a(), spec.b());
        assert_eq!(&stripped * &cofactor, p);
        assert!(stripped.degree() >= 1);
        let report = verify_exact(&spec, 7, &ToleranceConfig::default()).unwrap();
        assert_eq!(report.summary.total as isize, report.degree);
        assert!(report.summary.excluded_count as isize >= stripped.degree());
        assert_eq!(report.summary.failed_count, 0);
    }

    #[test]
    fn zero_polynomial_and_constants() {
        let spec = int_spec(&[1, 1], &[0], 2, 3).unwrap();
        // with B = 0 only multiples of 3 survive
        let report = verify_exact(&spec, 4, &ToleranceConfig::default()).unwrap();
        assert_eq!(report.degree, -1);
        assert_eq!(report.summary.total, 0);
        assert!(report.warnings.iter().any(|w| w.contains("zero polynomial")));
        let report = verify_exact(&spec, 0, &ToleranceConfig::default()).unwrap();
        assert_eq!(report.degree, 0);
        assert!(report.passed());
    }

    #[test]
    fn non_coprime_is_rejected() {
        let spec = int_spec(&[1, 1], &[2, 1], 2, 4).unwrap();
        assert!(matches!(verify_exact(&spec, 8, &ToleranceConfig::default()), Err(Error::NotCoprime { .. })));
    }
}
