//! Exact real-root counting and isolation for integer polynomials.
//!
//! Sturm chains are built from primitive pseudo-remainders, so every sign is
//! decided in exact integer arithmetic. Evaluation points are dyadic
//! rationals, which keeps midpoints exact and lets `f64` values be used as
//! interval endpoints without rounding.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

use crate::poly::{Dyadic, IntPoly};

/// A point of the extended real line.
#[derive(Clone, Debug, PartialEq)]
pub enum Point {
    NegInf,
    At(Dyadic),
    PosInf,
}

/// Sturm chain `p, p', -rem(p, p'), ...`, each element primitive.
#[derive(Clone, Debug)]
pub struct SturmChain {
    chain: Vec<IntPoly>,
}

impl SturmChain {
    pub fn new(p: &IntPoly) -> SturmChain {
        let mut chain = vec![p.clone()];
        if p.degree() < 1 {
            return SturmChain { chain };
        }
        chain.push(primitive_keep_sign(&p.derivative()));
        loop {
            let n = chain.len();
            let (a, b) = (&chain[n - 2], &chain[n - 1]);
            if b.degree() < 1 {
                break;
            }
            let r = a.pseudo_rem(b);
            if r.is_zero() {
                break;
            }
            // prem = lc(b)^e rem; the chain needs -rem up to a positive factor
            let e = a.degree() - b.degree() + 1;
            let lc_negative = b.leading().is_some_and(|c| c.is_negative());
            let flip = lc_negative && e % 2 == 1;
            let next = if flip { r } else { -&r };
            chain.push(primitive_keep_sign(&next));
        }
        SturmChain { chain }
    }

    pub fn len(&self) -> usize {
        self.chain.len()
    }

    pub fn is_empty(&self) -> bool {
        self.chain.is_empty()
    }

    /// Number of sign changes along the chain at `x` (zeros skipped).
    pub fn variations(&self, x: &Point) -> usize {
        let mut count = 0;
        let mut prev = 0i8;
        for p in &self.chain {
            let s = match x {
                Point::NegInf => p.sign_at_infinity(true),
                Point::PosInf => p.sign_at_infinity(false),
                Point::At(d) => p.sign_at(d),
            };
            if s == 0 {
                continue;
            }
            if prev != 0 && s != prev {
                count += 1;
            }
            prev = s;
        }
        count
    }

    /// Distinct real roots in the half-open interval `(lo, hi]`.
    pub fn count(&self, lo: &Point, hi: &Point) -> usize {
        self.variations(lo).saturating_sub(self.variations(hi))
    }
}

// divide by the positive content only
fn primitive_keep_sign(p: &IntPoly) -> IntPoly {
    let g = p.content();
    if g.is_zero() {
        return p.clone();
    }
    IntPoly::new(p.coeffs().iter().map(|c| c / &g).collect())
}

/// Real roots counted with multiplicity in `(lo, hi]`.
///
/// Uses `N(p) = distinct(p) + N(gcd(p, p'))`: each repeated root of `p` is
/// a root of `gcd(p, p')` of multiplicity one less.
pub fn count_with_multiplicity(p: &IntPoly, lo: &Point, hi: &Point) -> usize {
    let mut total = 0;
    let mut current = p.primitive_part();
    while current.degree() >= 1 {
        total += SturmChain::new(&current).count(lo, hi);
        current = current.gcd(&current.derivative());
    }
    total
}

/// Integer `R` with every real root in `(-R, R)`.
pub fn root_radius(p: &IntPoly) -> BigInt {
    let lc = p.leading().expect("nonzero polynomial").abs();
    let m = p.coeffs()[..p.coeffs().len() - 1].iter().map(|c| c.abs()).max().unwrap_or_default();
    let (q, r) = m.div_rem(&lc);
    q + if r.is_zero() { 1 } else { 2 }
}

/// An interval `(lo, hi]` holding exactly one distinct real root.
#[derive(Clone, Debug, PartialEq)]
pub struct IsolatingInterval {
    pub lo: Dyadic,
    pub hi: Dyadic,
    pub multiplicity: usize,
}

/// Isolate every distinct real root of `p` (degree at least 1), in
/// increasing order, with multiplicities.
pub fn isolate_real_roots(p: &IntPoly) -> Vec<IsolatingInterval> {
    assert!(p.degree() >= 1, "isolation needs a nonconstant polynomial");
    let s = p.squarefree_part();
    let chain = SturmChain::new(&s);
    let r = root_radius(&s);
    let mut pending = vec![(Dyadic::from_int(-r.clone()), Dyadic::from_int(r))];
    let mut found = Vec::new();
    while let Some((lo, hi)) = pending.pop() {
        let c = chain.count(&Point::At(lo.clone()), &Point::At(hi.clone()));
        match c {
            0 => {}
            1 => found.push((lo, hi)),
            _ => {
                let mid = lo.midpoint(&hi);
                // upper half first so the stack pops the lower half next
                pending.push((mid.clone(), hi));
                pending.push((lo, mid));
            }
        }
    }
    found.sort_by(|a, b| a.0.to_f64().total_cmp(&b.0.to_f64()));

    // multiplicity: the number of successive derivatives-gcds still vanishing there
    let mut gcds = Vec::new();
    let mut g = p.primitive_part();
    loop {
        g = g.gcd(&g.derivative());
        if g.degree() < 1 {
            break;
        }
        gcds.push(g.squarefree_part());
    }
    found
        .into_iter()
        .map(|(lo, hi)| {
            let lo_p = Point::At(lo.clone());
            let hi_p = Point::At(hi.clone());
            let mut multiplicity = 1;
            for h in &gcds {
                let common = s.gcd(h);
                if common.degree() >= 1 && SturmChain::new(&common).count(&lo_p, &hi_p) == 1 {
                    multiplicity += 1;
                } else {
                    break;
                }
            }
            IsolatingInterval { lo, hi, multiplicity }
        })
        .collect()
}

/// Shrink an isolating interval of a squarefree polynomial until its width is
/// at most `rel_tol` times its magnitude (or `rel_tol` near zero), returning
/// the midpoint.
pub fn refine_root(s: &IntPoly, iv: &IsolatingInterval, rel_tol: f64) -> f64 {
    let mut lo = iv.lo.clone();
    let mut hi = iv.hi.clone();
    if s.sign_at(&hi) == 0 {
        return hi.to_f64();
    }
    // the left end may be a root of a neighbouring interval; move it inside
    let chain = SturmChain::new(s);
    while s.sign_at(&lo) == 0 {
        let mid = lo.midpoint(&hi);
        if chain.count(&Point::At(mid.clone()), &Point::At(hi.clone())) == 1 {
            lo = mid;
        } else {
            hi = mid;
            if s.sign_at(&hi) == 0 {
                return hi.to_f64();
            }
        }
    }
    bisect_sign_change(s, lo, hi, rel_tol)
}

/// Bisection on a sign change `s(lo) s(hi) < 0`.
pub fn bisect_sign_change(s: &IntPoly, mut lo: Dyadic, mut hi: Dyadic, rel_tol: f64) -> f64 {
    let s_lo = s.sign_at(&lo);
    debug_assert!(s_lo != 0 && s_lo == -s.sign_at(&hi));
    for _ in 0..2000 {
        let (a, b) = (lo.to_f64(), hi.to_f64());
        let mid_f = 0.5 * (a + b);
        let scale = a.abs().max(b.abs()).max(f64::MIN_POSITIVE);
        if (b - a) <= rel_tol * scale || mid_f == a || mid_f == b {
            break;
        }
        let mid = lo.midpoint(&hi);
        match s.sign_at(&mid) {
            0 => return mid.to_f64(),
            sm if sm == s_lo => lo = mid,
            _ => hi = mid,
        }
    }
    0.5 * (lo.to_f64() + hi.to_f64())
}
