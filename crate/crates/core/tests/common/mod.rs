#![allow(dead_code)]

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tran_core::recurrence::{int_spec, RecurrenceSpec};
use tran_core::ComplexPoly;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Integer coefficients in [-9, 9], degree at most `max_degree`, nonzero leading term.
pub fn small_poly(rng: &mut ChaCha8Rng, max_degree: usize) -> Vec<i64> {
    let d = rng.gen_range(0..=max_degree);
    let mut c: Vec<i64> = (0..=d).map(|_| rng.gen_range(-9..=9)).collect();
    while c[d] == 0 {
        c[d] = rng.gen_range(-9..=9);
    }
    c
}

#[derive(Clone, Debug)]
pub struct Sample {
    pub a: Vec<i64>,
    pub b: Vec<i64>,
    pub ell: usize,
    pub k: usize,
}

impl Sample {
    pub fn exact(&self) -> RecurrenceSpec<BigInt> {
        int_spec(&self.a, &self.b, self.ell, self.k).unwrap()
    }

    pub fn float(&self) -> RecurrenceSpec<Complex64> {
        let f = |c: &[i64]| ComplexPoly::from_reals(&c.iter().map(|&x| x as f64).collect::<Vec<_>>());
        RecurrenceSpec::new(f(&self.a), f(&self.b), self.ell, self.k).unwrap()
    }
}

/// Coprime `1 <= l < k <= max_k`, `A`, `B` of degree at most 3.
pub fn coprime_sample(rng: &mut ChaCha8Rng, max_k: usize) -> Sample {
    let (ell, k) = loop {
        let k = rng.gen_range(2..=max_k);
        let ell = rng.gen_range(1..k);
        if ell.gcd(&k) == 1 {
            break (ell, k);
        }
    };
    Sample { a: small_poly(rng, 3), b: small_poly(rng, 3), ell, k }
}

/// `l = 1` and the given `k`, with `A`, `B` of degree 1 to 3.
pub fn tran_sample(rng: &mut ChaCha8Rng, k: usize) -> Sample {
    let nonconstant = |rng: &mut ChaCha8Rng| loop {
        let p = small_poly(rng, 3);
        if p.len() > 1 {
            break p;
        }
    };
    Sample { a: nonconstant(rng), b: nonconstant(rng), ell: 1, k }
}
