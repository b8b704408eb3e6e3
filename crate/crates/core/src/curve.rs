//! The rational map `f = B^k / A^l` and the curve `Im f = 0`.
//!
//! Besides plain membership this module carries the `l = 1` region test
//! `0 <= (-1)^k Re(B^k / A) <= k^k / (k-1)^(k-1)` and the
//! Beraha-Kahane-Weiss discriminator: the gap between the two largest root
//! moduli of the symbol equation `t^k + Q_1(z) t^(k-1) + ... + Q_k(z) = 0`.

use num_complex::Complex64;
use num_integer::Integer;

use rayon::prelude::*;

use crate::config::ToleranceConfig;
use crate::contour::{refine_crossing, BoxRegion, CurveSegments, Grid};
use crate::error::{Error, Result};
use crate::poly::ComplexPoly;
use crate::rootfind::find_roots;

/// Value of `B^k / A^l` at a point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum MapValue {
    Finite(Complex64),
    /// `A(z)^l` underflowed to zero or the quotient overflowed.
    Pole,
}

impl MapValue {
    pub fn finite(self) -> Option<Complex64> {
        match self {
            MapValue::Finite(v) => Some(v),
            MapValue::Pole => None,
        }
    }
}

fn int_pow(z: Complex64, e: usize) -> Complex64 {
    (0..e).fold(Complex64::new(1.0, 0.0), |acc, _| acc * z)
}

/// `B(z)^k / A(z)^l` by repeated multiplication of the two evaluations.
pub fn rational_map_value(a: &ComplexPoly, b: &ComplexPoly, ell: usize, k: usize, z: Complex64) -> MapValue {
    let den = int_pow(a.eval_at(z), ell);
    if den.norm() == 0.0 {
        return MapValue::Pole;
    }
    let v = int_pow(b.eval_at(z), k) / den;
    if v.is_finite() {
        MapValue::Finite(v)
    } else {
        MapValue::Pole
    }
}

/// Outcome of a curve-membership test at one point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MembershipVerdict {
    pub z: Complex64,
    /// `B^k / A^l`, `None` at a pole.
    pub f_value: Option<Complex64>,
    pub im_abs: f64,
    /// `Re((-1)^(k-l) f)`; negative at roots of the recurrence terms.
    pub signed_value: f64,
    pub near_ab_zero: bool,
    pub on_curve: bool,
}

/// `|A(z) B(z)| <= eps * (Σ|a_i| r^i)(Σ|b_i| r^i)` with `r = max(1, |z|)`.
pub fn near_ab_zero(a: &ComplexPoly, b: &ComplexPoly, z: Complex64, eps: f64) -> bool {
    let r = z.norm().max(1.0);
    let scale = a.abs_eval(r) * b.abs_eval(r);
    (a.eval_at(z) * b.eval_at(z)).norm() <= eps * scale
}

/// Decide whether `z` lies on `Im(B^k / A^l) = 0` away from the zeros of `A B`.
pub fn membership(
    a: &ComplexPoly,
    b: &ComplexPoly,
    ell: usize,
    k: usize,
    z: Complex64,
    cfg: &ToleranceConfig,
) -> Result<MembershipVerdict> {
    let gcd = ell.gcd(&k);
    if gcd != 1 {
        return Err(Error::NotCoprime { ell, k, gcd });
    }
    Ok(verdict(a, b, ell, k, z, cfg))
}

fn verdict(a: &ComplexPoly, b: &ComplexPoly, ell: usize, k: usize, z: Complex64, cfg: &ToleranceConfig) -> MembershipVerdict {
    let near = near_ab_zero(a, b, z, cfg.ab_exclusion_eps);
    let sign = if (k - ell).is_multiple_of(2) { 1.0 } else { -1.0 };
    match rational_map_value(a, b, ell, k, z) {
        MapValue::Finite(f) => {
            let im_abs = f.im.abs();
            MembershipVerdict {
                z,
                f_value: Some(f),
                im_abs,
                signed_value: sign * f.re,
                near_ab_zero: near,
                on_curve: !near && im_abs <= cfg.curve_im_tol * f.norm().max(1.0),
            }
        }
        MapValue::Pole => MembershipVerdict {
            z,
            f_value: None,
            im_abs: f64::INFINITY,
            signed_value: f64::NAN,
            near_ab_zero: true,
            on_curve: false,
        },
    }
}

/// `k^k / (k-1)^(k-1)`, the right end of the `l = 1` region.
pub fn tran_bound(k: usize) -> f64 {
    let k = k as f64;
    k.powf(k) / (k - 1.0).powf(k - 1.0)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TranVerdict {
    pub membership: MembershipVerdict,
    /// `(-1)^k Re(B^k / A)`
    pub re_value: f64,
    pub bound: f64,
    pub re_in_range: bool,
}

/// Membership for `l = 1` plus the range condition on `(-1)^k Re(B^k / A)`,
/// each side relaxed by `cfg.curve_im_tol`.
pub fn tran_region_check(
    a: &ComplexPoly,
    b: &ComplexPoly,
    k: usize,
    z: Complex64,
    cfg: &ToleranceConfig,
) -> Result<TranVerdict> {
    if k < 2 {
        return Err(Error::OrderTooSmall(k));
    }
    let m = verdict(a, b, 1, k, z, cfg);
    let bound = tran_bound(k);
    let tol = cfg.curve_im_tol;
    let re_value = match m.f_value {
        Some(f) => if k.is_multiple_of(2) { f.re } else { -f.re },
        None => f64::NAN,
    };
    let re_in_range = re_value >= -tol && re_value <= bound + tol;
    Ok(TranVerdict { membership: m, re_value, bound, re_in_range })
}

/// Symbol coefficients `Q_1 = B`, `Q_k = A`, others zero, for
/// `P_n + B P_{n-1} + A P_{n-k} = 0`.
pub fn tran_symbol(a: &ComplexPoly, b: &ComplexPoly, k: usize) -> Vec<ComplexPoly> {
    let mut q = vec![ComplexPoly::zero(); k];
    q[0] = b.clone();
    q[k - 1] = a.clone();
    q
}

// roots of t^k + Q_1(z) t^(k-1) + ... + Q_k(z), largest modulus first
fn symbol_roots(q: &[ComplexPoly], z: Complex64, cfg: &ToleranceConfig) -> Result<Vec<Complex64>> {
    let k = q.len();
    if k < 2 {
        return Err(Error::OrderTooSmall(k));
    }
    // lowest power first: Q_k(z), ..., Q_1(z), 1
    let mut coeffs: Vec<Complex64> = q.iter().rev().map(|p| p.eval_at(z)).collect();
    coeffs.push(Complex64::new(1.0, 0.0));
    let mut roots = find_roots(&ComplexPoly::new(coeffs), cfg)?.values_with_multiplicity();
    roots.sort_by(|x, y| y.norm().total_cmp(&x.norm()));
    Ok(roots)
}

/// `t_1 - t_2 >= 0` where `t_1 >= t_2 >= ...` are the root moduli of
/// `t^k + Q_1(z) t^(k-1) + ... + Q_k(z)`.
pub fn bkw_discriminator(q: &[ComplexPoly], z: Complex64, cfg: &ToleranceConfig) -> Result<f64> {
    let roots = symbol_roots(q, z, cfg)?;
    Ok(roots[0].norm() - roots[1].norm())
}

/// `ln(t_1 / t_2)`, a scale-free version of [`bkw_discriminator`];
/// infinite when `t_2 = 0`.
pub fn bkw_log_ratio(q: &[ComplexPoly], z: Complex64, cfg: &ToleranceConfig) -> Result<f64> {
    let roots = symbol_roots(q, z, cfg)?;
    Ok((roots[0].norm() / roots[1].norm()).ln())
}

// Match each of `pair` to its nearest root; `None` unless both matches are
// clear (nearest well inside the distance to the runner-up) and distinct.
fn match_pair(pair: [Complex64; 2], roots: &[Complex64]) -> Option<[usize; 2]> {
    let mut out = [0; 2];
    for (slot, t) in pair.into_iter().enumerate() {
        let mut d: Vec<(f64, usize)> = roots.iter().enumerate().map(|(i, r)| ((r - t).norm(), i)).collect();
        d.sort_by(|x, y| x.0.total_cmp(&y.0));
        if d.len() > 1 && d[0].0 > MATCH_RATIO * d[1].0 {
            return None;
        }
        out[slot] = d[0].1;
    }
    (out[0] != out[1]).then_some(out)
}

const MATCH_RATIO: f64 = 0.3;
const MAX_BISECTIONS: usize = 6;

// Continue the root pair from z0 to z1 (whose roots are `end`), halving the
// step while matching is ambiguous.
fn continue_pair(
    q: &[ComplexPoly],
    pair: [Complex64; 2],
    z0: Complex64,
    z1: Complex64,
    end: &[Complex64],
    cfg: &ToleranceConfig,
    depth: usize,
) -> Option<[Complex64; 2]> {
    if let Some([a, b]) = match_pair(pair, end) {
        return Some([end[a], end[b]]);
    }
    if depth == MAX_BISECTIONS {
        return None;
    }
    let mid = 0.5 * (z0 + z1);
    let mid_roots = symbol_roots(q, mid, cfg).ok()?;
    let half = continue_pair(q, pair, z0, mid, &mid_roots, cfg, depth + 1)?;
    continue_pair(q, half, mid, z1, end, cfg, depth + 1)
}

// ln|t_a| - ln|t_b| for a pair continued to a point with roots `roots`,
// provided the pair is still the dominant one there
fn pair_gap(pair: [Complex64; 2], roots: &[Complex64]) -> Option<f64> {
    let dominant = roots.len() < 3 || roots[2].norm() < pair[1].norm().min(pair[0].norm());
    let v = pair[0].norm().ln() - pair[1].norm().ln();
    (dominant && v.is_finite()).then_some(v)
}

/// Trace the Beraha-Kahane-Weiss curve of the symbol `q`: the points where
/// the two largest root moduli coincide.
///
/// `t_1 - t_2` never changes sign, so it cannot be contoured directly.
/// Instead each grid cell takes the two dominant roots at its south-west
/// corner, continues them along the cell edges to the other corners, and
/// contours `ln|t_a| - ln|t_b|`, which changes sign where the two swap.
/// Cells where the continued pair stops being dominant, a root vanishes, or
/// continuation stays ambiguous (next to a multiple root) are skipped.
pub fn trace_bkw(
    q: &[ComplexPoly],
    bbox: BoxRegion,
    nx: usize,
    ny: usize,
    cfg: &ToleranceConfig,
) -> Result<CurveSegments> {
    if q.len() < 2 {
        return Err(Error::OrderTooSmall(q.len()));
    }
    cfg.validate()?;
    let grid = Grid::new(bbox, nx, ny)?;
    let roots: Vec<Vec<Option<Vec<Complex64>>>> = (0..ny)
        .into_par_iter()
        .map(|j| (0..nx).map(|i| symbol_roots(q, grid.node(i, j), cfg).ok()).collect())
        .collect();
    let at = |i: usize, j: usize| roots[j][i].as_deref();
    let cells: Vec<Vec<Option<[f64; 4]>>> = (0..ny - 1)
        .into_par_iter()
        .map(|j| {
            (0..nx - 1)
                .map(|i| {
                    let (sw, se, ne, nw) = (at(i, j)?, at(i + 1, j)?, at(i + 1, j + 1)?, at(i, j + 1)?);
                    let pair = [sw[0], sw[1]];
                    let walk = |p, a: (usize, usize), b: (usize, usize), end| {
                        continue_pair(q, p, grid.node(a.0, a.1), grid.node(b.0, b.1), end, cfg, 0)
                    };
                    let p_se = walk(pair, (i, j), (i + 1, j), se)?;
                    let p_nw = walk(pair, (i, j), (i, j + 1), nw)?;
                    let p_ne = walk(p_se, (i + 1, j), (i + 1, j + 1), ne)?;
                    // the two routes to NE must agree, or the cell holds a branch point
                    let check = walk(p_nw, (i, j + 1), (i + 1, j + 1), ne)?;
                    if check != p_ne {
                        return None;
                    }
                    Some([pair_gap(pair, sw)?, pair_gap(p_se, se)?, pair_gap(p_ne, ne)?, pair_gap(p_nw, nw)?])
                })
                .collect()
        })
        .collect();
    // gap of the pair dominant at z0, continued along the segment to z
    let gap_from = |z0: Complex64, z: Complex64| {
        let start = symbol_roots(q, z0, cfg).ok()?;
        let end = symbol_roots(q, z, cfg).ok()?;
        let p = continue_pair(q, [start[0], start[1]], z0, z, &end, cfg, 0)?;
        pair_gap(p, &end)
    };
    let centre = |i, j, _: &[f64; 4]| gap_from(grid.node(i, j), grid.centre(i, j));
    let refine = |z0: Complex64, v0: f64, z1: Complex64, v1: f64| {
        // the corner values may carry either sign; orient them from z0
        let s = if v0 >= 0.0 { 1.0 } else { -1.0 };
        refine_crossing(|z| gap_from(z0, z), z0, s * v0, z1, s * v1)
    };
    Ok(grid.march(&cells, centre, refine))
}

/// The `l = 1` region: the part of `Im(B^k / A) = 0` where
/// `0 <= (-1)^k Re(B^k / A) <= k^k / (k-1)^(k-1)` (each side relaxed by
/// `cfg.curve_im_tol`). Polylines of the full curve are cut where they
/// leave the range.
pub fn trace_tran(
    a: &ComplexPoly,
    b: &ComplexPoly,
    k: usize,
    bbox: BoxRegion,
    nx: usize,
    ny: usize,
    cfg: &ToleranceConfig,
) -> Result<CurveSegments> {
    if k < 2 {
        return Err(Error::OrderTooSmall(k));
    }
    cfg.validate()?;
    let full = crate::contour::trace_curve(im_field(a, b, 1, k), bbox, nx, ny)?;
    let bound = tran_bound(k);
    let sign = if k.is_multiple_of(2) { 1.0 } else { -1.0 };
    let tol = cfg.curve_im_tol;
    let inside = |z: Complex64| {
        rational_map_value(a, b, 1, k, z).finite().is_some_and(|f| {
            let r = sign * f.re;
            r >= -tol && r <= bound + tol
        })
    };
    let mut segments = Vec::new();
    for line in &full.segments {
        let mut run: Vec<Complex64> = Vec::new();
        for &z in line {
            if inside(z) {
                run.push(z);
            } else if !run.is_empty() {
                segments.push(std::mem::take(&mut run));
            }
        }
        if !run.is_empty() {
            segments.push(run);
        }
    }
    Ok(CurveSegments { segments, ..full })
}

/// `Im f / max(1, |f|)` for `f = B^k / A^l`; same zero set as `Im f`, but
/// bounded, which keeps grid interpolation well behaved near poles.
pub fn im_field<'a>(
    a: &'a ComplexPoly,
    b: &'a ComplexPoly,
    ell: usize,
    k: usize,
) -> impl Fn(Complex64) -> Option<f64> + Sync + 'a {
    move |z| {
        // masking follows the pole threshold used for grid nodes
        if a.eval_at(z).norm() < 1e-300 {
            return None;
        }
        rational_map_value(a, b, ell, k, z).finite().map(|f| f.im / f.norm().max(1.0))
    }
}
