//! Polynomial gcd degree over a prime field, as a cheap filter in front of
//! the exact integer gcd.
//!
//! If `q` divides neither leading coefficient, the reduction mod `q` of the
//! integer gcd divides both reductions, so a constant gcd mod `q` proves the
//! integer gcd is constant too.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::ToPrimitive;

use super::IntPoly;

const PRIMES: [u64; 3] = [(1 << 61) - 1, 4_611_686_018_427_387_847, 2_305_843_009_213_693_921];

fn mul_mod(a: u64, b: u64, q: u64) -> u64 {
    ((a as u128 * b as u128) % q as u128) as u64
}

fn pow_mod(mut a: u64, mut e: u64, q: u64) -> u64 {
    let mut r = 1;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, a, q);
        }
        a = mul_mod(a, a, q);
        e >>= 1;
    }
    r
}

fn reduce(p: &IntPoly, q: u64) -> Vec<u64> {
    let qb = BigInt::from(q);
    let mut v: Vec<u64> = p.coeffs().iter().map(|c| c.mod_floor(&qb).to_u64().unwrap()).collect();
    while v.last() == Some(&0) {
        v.pop();
    }
    v
}

// a mod b in place over GF(q); b must have a nonzero leading coefficient
fn rem_mod(a: &mut Vec<u64>, b: &[u64], q: u64) {
    let db = b.len() - 1;
    let inv = pow_mod(b[db], q - 2, q);
    while a.len() > db {
        let top = mul_mod(*a.last().unwrap(), inv, q);
        let off = a.len() - 1 - db;
        for (j, &bc) in b.iter().enumerate() {
            a[off + j] = (a[off + j] + q - mul_mod(top, bc, q)) % q;
        }
        a.pop();
        while a.last() == Some(&0) {
            a.pop();
        }
    }
}

fn gcd_degree_mod(a: &IntPoly, b: &IntPoly, q: u64) -> Option<isize> {
    let mut x = reduce(a, q);
    let mut y = reduce(b, q);
    if x.len() != a.coeffs().len() || y.len() != b.coeffs().len() || x.is_empty() || y.is_empty() {
        return None;
    }
    while !y.is_empty() {
        rem_mod(&mut x, &y, q);
        std::mem::swap(&mut x, &mut y);
    }
    Some(x.len() as isize - 1)
}

/// `true` only if `gcd(a, b)` over the rationals is certainly constant.
pub(crate) fn coprime_certificate(a: &IntPoly, b: &IntPoly) -> bool {
    if a.is_zero() || b.is_zero() {
        return false;
    }
    PRIMES.iter().find_map(|&q| gcd_degree_mod(a, b, q)).is_some_and(|d| d == 0)
}

/// `true` only if `p` is certainly squarefree.
pub(crate) fn squarefree_certificate(p: &IntPoly) -> bool {
    if p.degree() < 1 {
        return true;
    }
    let dp = p.derivative();
    !dp.is_zero() && coprime_certificate(p, &dp)
}
