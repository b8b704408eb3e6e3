use std::time::Instant;

use num_integer::Integer;
use num_traits::Signed;
use tran_core::gpoly::{g_poly, real_negative_roots, DEFAULT_ROOT_TOL};
use tran_core::poly::Dyadic;

fn coprime_pairs(max_k: usize) -> Vec<(usize, usize)> {
    (2..=max_k).flat_map(|k| (1..k).filter(move |l| l.gcd(&k) == 1).map(move |l| (l, k))).collect()
}

#[test]
fn every_lattice_polynomial_has_only_negative_roots() {
    let start = Instant::now();
    let mut checked = 0;
    for (ell, k) in coprime_pairs(7) {
        for n in 0..=200 {
            let g = g_poly(ell, k, n).unwrap();
            let d = g.coeffs.degree();
            if d < 1 {
                continue;
            }
            let r = real_negative_roots(&g, DEFAULT_ROOT_TOL).unwrap();
            assert!(r.certified, "l={ell} k={k} n={n} {:?}", r.method);
            assert_eq!(r.roots.len(), d as usize);
            assert!(r.roots.iter().all(|&x| x < 0.0));
            assert!(r.roots.windows(2).all(|w| w[0] <= w[1]));
            checked += 1;
        }
    }
    assert!(checked > 3000);
    assert!(start.elapsed().as_secs() < 120, "{:?}", start.elapsed());
}

#[test]
fn coefficients_are_positive_so_nonnegative_axis_is_root_free() {
    for (ell, k) in coprime_pairs(7) {
        for n in 0..=80 {
            let g = g_poly(ell, k, n).unwrap();
            assert!(g.coeffs.coeffs().iter().all(|c| c.is_positive()));
            if g.coeffs.is_zero() {
                continue;
            }
            for x in [0.0, 1e-3, 0.5, 1.0, 7.0, 1e6] {
                assert_eq!(g.coeffs.sign_at(&Dyadic::from_f64(x)), 1, "l={ell} k={k} n={n} x={x}");
            }
        }
    }
}

#[test]
fn root_product_matches_constant_over_leading() {
    for (ell, k) in coprime_pairs(7) {
        for n in 1..=60 {
            let g = g_poly(ell, k, n).unwrap();
            let d = g.coeffs.degree();
            if d < 1 {
                continue;
            }
            let r = real_negative_roots(&g, DEFAULT_ROOT_TOL).unwrap();
            // compare logarithms; the product itself can leave the double range
            let log_product: f64 = r.roots.iter().map(|x| x.abs().ln()).sum();
            let c0 = Dyadic::from_int(g.coeffs.coeff(0)).to_f64();
            let cd = Dyadic::from_int(g.coeffs.coeff(d as usize)).to_f64();
            assert!((log_product - (c0 / cd).ln()).abs() < 1e-8, "l={ell} k={k} n={n}");
            // all roots negative, so the signed product is (-1)^d |product|
            let sign = if d % 2 == 0 { 1.0 } else { -1.0 };
            assert_eq!(sign * r.roots.iter().map(|x| x.signum()).product::<f64>(), 1.0);
        }
    }
}
