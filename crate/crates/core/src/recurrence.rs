//! The recurrence `P_n + B P_{n-l} + A P_{n-k} = 0` with `P_0 = 1` and
//! `P_m = 0` for `-k < m < 0`.
//!
//! Terms are produced two independent ways: by direct iteration
//! ([`gen_recurrence`], [`nth_term`]) and by the lattice-point sum
//! ([`closed_form`])
//!
//! ```text
//! P_n = Σ_{i l + j k = n} (-1)^(i+j) C(i+j, i) A^j B^i
//! ```
//!
//! which comes from expanding `1 / (1 + B t^l + A t^k)` as a geometric series.

use std::collections::VecDeque;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;

use crate::error::{Error, Result};
use crate::poly::{binomial, Coefficient, ComplexPoly, DensePoly, ScaledComplex};

/// Coefficients and shifts of the recurrence.
#[derive(Clone, Debug, PartialEq)]
pub struct RecurrenceSpec<T> {
    a: DensePoly<T>,
    b: DensePoly<T>,
    ell: usize,
    k: usize,
}

impl<T: Coefficient> RecurrenceSpec<T> {
    /// Requires `1 <= ell < k` and `A`, `B` not both zero.
    pub fn new(a: DensePoly<T>, b: DensePoly<T>, ell: usize, k: usize) -> Result<Self> {
        if ell == 0 {
            return Err(Error::InvalidSpec("l must be at least 1".into()));
        }
        if ell >= k {
            return Err(Error::InvalidSpec(format!("l must be smaller than k (got l = {ell}, k = {k})")));
        }
        if a.is_zero() && b.is_zero() {
            return Err(Error::InvalidSpec("A and B are both the zero polynomial".into()));
        }
        Ok(RecurrenceSpec { a, b, ell, k })
    }

    pub fn a(&self) -> &DensePoly<T> {
        &self.a
    }

    pub fn b(&self) -> &DensePoly<T> {
        &self.b
    }

    pub fn ell(&self) -> usize {
        self.ell
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn is_coprime(&self) -> bool {
        self.ell.gcd(&self.k) == 1
    }

    fn require_coprime(&self) -> Result<()> {
        require_coprime(self.ell, self.k)
    }
}

fn require_coprime(ell: usize, k: usize) -> Result<()> {
    let gcd = ell.gcd(&k);
    if gcd != 1 {
        return Err(Error::NotCoprime { ell, k, gcd });
    }
    Ok(())
}

/// Divide `(l, k)` by their gcd `d`.
///
/// The generating function of the original recurrence is that of the reduced
/// one evaluated at `t^d`, so the original terms are `Q_{dn} = P_n` and
/// `Q_m = 0` when `d` does not divide `m`.
pub fn reduce_spec<T: Coefficient>(
    a: DensePoly<T>,
    b: DensePoly<T>,
    ell: usize,
    k: usize,
) -> Result<(RecurrenceSpec<T>, usize)> {
    // validate the original shifts before dividing them
    let original = RecurrenceSpec::new(a, b, ell, k)?;
    let d = ell.gcd(&k);
    let RecurrenceSpec { a, b, .. } = original;
    Ok((RecurrenceSpec { a, b, ell: ell / d, k: k / d }, d))
}

/// Nonnegative solutions `(i, j)` of `i l + j k = n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LatticeSolutionSet {
    pub ell: usize,
    pub k: usize,
    pub n: usize,
    /// Ordered by strictly increasing `i`; consecutive entries differ by `(+k, -l)`.
    pub solutions: Vec<(usize, usize)>,
}

impl LatticeSolutionSet {
    /// Number of solutions.
    pub fn len(&self) -> usize {
        self.solutions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.solutions.is_empty()
    }

    /// Solution with the smallest `i` (and largest `j`).
    pub fn first(&self) -> Option<(usize, usize)> {
        self.solutions.first().copied()
    }

    /// Solution with the largest `i` (and smallest `j`).
    pub fn last(&self) -> Option<(usize, usize)> {
        self.solutions.last().copied()
    }
}

/// All nonnegative `(i, j)` with `i l + j k = n`, smallest `i` first.
///
/// With `gcd(l, k) = 1` the general integer solution is
/// `(i0 + k u, j0 - l u)`; the smallest admissible `i` is `n l^{-1} mod k`.
pub fn lattice_solutions(ell: usize, k: usize, n: usize) -> Result<LatticeSolutionSet> {
    if ell == 0 || k == 0 {
        return Err(Error::InvalidSpec("l and k must be positive".into()));
    }
    require_coprime(ell, k)?;
    let mut solutions = Vec::new();
    let inv = mod_inverse(ell as i128, k as i128);
    let i0 = ((n as i128 % k as i128) * inv).rem_euclid(k as i128) as usize;
    let mut i = i0;
    while i * ell <= n {
        let rest = n - i * ell;
        debug_assert_eq!(rest % k, 0);
        solutions.push((i, rest / k));
        i += k;
    }
    Ok(LatticeSolutionSet { ell, k, n, solutions })
}

fn mod_inverse(a: i128, m: i128) -> i128 {
    if m == 1 {
        return 0;
    }
    let e = a.extended_gcd(&m);
    debug_assert_eq!(e.gcd, 1);
    e.x.rem_euclid(m)
}

/// `P_0, ..., P_{n_max}` by direct iteration. Coprimality is not required.
pub fn gen_recurrence<T: Coefficient>(spec: &RecurrenceSpec<T>, n_max: usize) -> Vec<DensePoly<T>> {
    let mut out: Vec<DensePoly<T>> = Vec::with_capacity(n_max + 1);
    out.push(DensePoly::one());
    for n in 1..=n_max {
        let term = next_term(spec, n, |m| out.get(m));
        debug_assert_eq!(out.len(), n);
        out.push(term);
    }
    out
}

/// `P_n` alone, keeping only the last `k` terms in memory.
pub fn nth_term<T: Coefficient>(spec: &RecurrenceSpec<T>, n: usize) -> DensePoly<T> {
    // window holds P_{m-k} .. P_{m-1} once filled; index m maps to m - start
    let mut window: VecDeque<DensePoly<T>> = VecDeque::with_capacity(spec.k + 1);
    window.push_back(DensePoly::one());
    let mut start = 0usize;
    for m in 1..=n {
        let term = next_term(spec, m, |idx| idx.checked_sub(start).and_then(|o| window.get(o)));
        debug_assert_eq!(start + window.len(), m);
        window.push_back(term);
        if window.len() > spec.k {
            window.pop_front();
            start += 1;
        }
    }
    window.pop_back().expect("window is never empty")
}

/// Evaluates `P_n(z)` and `P_n'(z)` at a point by running the recurrence
/// on values rather than polynomials.
///
/// This costs `O(n)` operations per point, and its rounding error is
/// relative to the growth of the recurrence at `z` instead of to the
/// coefficient sizes of `P_n`, which near the root curve are enormous
/// compared with `|P_n(z)|`.
#[derive(Clone, Debug)]
pub struct PointEvaluator {
    a: ComplexPoly,
    b: ComplexPoly,
    da: ComplexPoly,
    db: ComplexPoly,
    ell: usize,
    k: usize,
    n: usize,
}

impl PointEvaluator {
    pub fn new(spec: &RecurrenceSpec<Complex64>, n: usize) -> PointEvaluator {
        PointEvaluator {
            da: spec.a.derivative(),
            db: spec.b.derivative(),
            a: spec.a.clone(),
            b: spec.b.clone(),
            ell: spec.ell,
            k: spec.k,
            n,
        }
    }

    /// `(P_n(z), P_n'(z))`; the pair shares one power-of-two scale, so
    /// neither overflows.
    pub fn eval(&self, z: Complex64) -> (ScaledComplex, ScaledComplex) {
        let zero = Complex64::new(0.0, 0.0);
        let (a, b) = (self.a.eval_at(z), self.b.eval_at(z));
        let (da, db) = (self.da.eval_at(z), self.db.eval_at(z));
        let len = self.k + 1;
        // ring buffers of (P_m, P_m') for the last k + 1 indices
        let mut p = vec![zero; len];
        let mut dp = vec![zero; len];
        p[0] = Complex64::new(1.0, 0.0);
        let mut exponent = 0i64;
        for m in 1..=self.n {
            let mut v = zero;
            let mut dv = zero;
            if m >= self.ell {
                let j = (m - self.ell) % len;
                v -= b * p[j];
                dv -= db * p[j] + b * dp[j];
            }
            if m >= self.k {
                let j = (m - self.k) % len;
                v -= a * p[j];
                dv -= da * p[j] + a * dp[j];
            }
            p[m % len] = v;
            dp[m % len] = dv;
            let big = p.iter().chain(dp.iter()).map(|c| c.re.abs().max(c.im.abs())).fold(0.0, f64::max);
            if big > 1e150 || (big < 1e-150 && big > 0.0) {
                let e = big.log2().floor() as i32;
                let f = 2f64.powi(-e);
                p.iter_mut().chain(dp.iter_mut()).for_each(|c| *c *= f);
                exponent += e as i64;
            }
        }
        let j = self.n % len;
        (ScaledComplex::new(p[j], exponent), ScaledComplex::new(dp[j], exponent))
    }

    /// Newton ratio `P_n(z) / P_n'(z)`.
    pub fn newton_ratio(&self, z: Complex64) -> Complex64 {
        let (v, dv) = self.eval(z);
        if v.is_zero() {
            return Complex64::new(0.0, 0.0);
        }
        v.div(&dv).to_complex()
    }
}

// P_m = -B P_{m-l} - A P_{m-k}, where `get(idx)` returns a stored P_idx and
// indices below zero contribute nothing
fn next_term<'a, T: Coefficient + 'a>(
    spec: &RecurrenceSpec<T>,
    m: usize,
    get: impl Fn(usize) -> Option<&'a DensePoly<T>>,
) -> DensePoly<T> {
    let mut term = DensePoly::zero();
    if let Some(p) = m.checked_sub(spec.ell).and_then(&get) {
        term = &term - &(&spec.b * p);
    }
    if let Some(p) = m.checked_sub(spec.k).and_then(&get) {
        term = &term - &(&spec.a * p);
    }
    term
}

/// `P_n` from the lattice-point sum. Requires `gcd(l, k) = 1`.
///
/// Returns the zero polynomial when `i l + j k = n` has no nonnegative
/// solution.
pub fn closed_form<T: Coefficient>(spec: &RecurrenceSpec<T>, n: usize) -> Result<DensePoly<T>> {
    spec.require_coprime()?;
    let lattice = lattice_solutions(spec.ell, spec.k, n)?;
    let Some((i_first, _)) = lattice.first() else {
        return Ok(DensePoly::zero());
    };
    let (_, j_last) = lattice.last().expect("nonempty");
    // walk u = 1..s: B^{i_u} grows by B^k, A^{j_u} shrinks by A^l, so build
    // the A powers from the small end and consume them in reverse
    let b_step = spec.b.pow(spec.k as u32);
    let a_step = spec.a.pow(spec.ell as u32);
    let mut a_powers = Vec::with_capacity(lattice.len());
    let mut ap = spec.a.pow(j_last as u32);
    for idx in 0..lattice.len() {
        if idx > 0 {
            ap = &ap * &a_step;
        }
        a_powers.push(ap.clone());
    }
    let mut bp = spec.b.pow(i_first as u32);
    let mut sum = DensePoly::zero();
    for (idx, &(i, j)) in lattice.solutions.iter().enumerate() {
        if idx > 0 {
            bp = &bp * &b_step;
        }
        let mut c = binomial((i + j) as u64, i as u64);
        if (i + j) % 2 == 1 {
            c = -c;
        }
        let term = (&bp * &a_powers[lattice.len() - 1 - idx]).scale(&T::from_bigint(&c));
        sum = &sum + &term;
    }
    Ok(sum)
}

/// Convenience for exact integer specs given as coefficient slices.
pub fn int_spec(a: &[i64], b: &[i64], ell: usize, k: usize) -> Result<RecurrenceSpec<BigInt>> {
    RecurrenceSpec::new(crate::poly::IntPoly::from_i64s(a), crate::poly::IntPoly::from_i64s(b), ell, k)
}
