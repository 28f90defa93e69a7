//! Property tests of the local factors, the Zagier L-values and the
//! archimedean ingredients.

use num_complex::Complex64;
use proptest::prelude::*;
use rootbias::archimedean::{arch_limit_factor, ArchFactorInput};
use rootbias::basefield::{FieldTag, RingElement};
use rootbias::localweights::{rs_weight_displayed, rs_weight_quotient, unram_local_factor, LocalWeightQuery};
use rootbias::quadarith::is_prime;
use rootbias::zagier::{correction_primes, euler_bracket, euler_correction, gen_zagier_l, l_eta, JIdeal};

fn rel_close(a: Complex64, b: Complex64, tol: f64) -> bool {
    (a - b).norm() <= tol * a.norm().max(b.norm()).max(1e-300)
}

fn prime_power() -> impl Strategy<Value = u64> {
    (2u64..60, 1u32..3).prop_filter_map("prime power", |(p, e)| is_prime(p).then(|| p.pow(e)))
}

proptest! {
    #[test]
    fn unram_factor_is_euler_correction(q in prime_power(), a in 0u32..=4, eta in -1i32..=1,
                                        re in -1.5f64..1.5, im in -2.0f64..2.0) {
        let s = Complex64::new(re, im);
        let lhs = unram_local_factor(q, a, eta, s).unwrap();
        let rhs = euler_correction(q as f64, a, eta, s + 0.5);
        prop_assert!(rel_close(lhs, rhs, 1e-12), "{lhs} vs {rhs}");
    }

    #[test]
    fn bracket_symmetric_under_reflection(q in prime_power(), k in 0u32..=5, eta in -1i32..=1,
                                          re in -1.0f64..1.0, im in -1.0f64..1.0) {
        let s = Complex64::new(re, im);
        let plus = euler_bracket(q as f64, k, eta, s + 0.5);
        let minus = euler_bracket(q as f64, k, eta, -s + 0.5);
        prop_assert!(rel_close(plus, minus, 1e-11), "{plus} vs {minus}");
        // the full factor picks up Z^(2k) under the reflection
        let z = Complex64::new(q as f64, 0.0).powc(s);
        let full_plus = unram_local_factor(q, k, eta, s).unwrap();
        let full_minus = unram_local_factor(q, k, eta, -s).unwrap();
        prop_assert!(rel_close(full_minus, full_plus * z.powi(2 * k as i32), 1e-10));
    }

    #[test]
    fn weight_telescoped_matches_quotient(q in prime_power(), r in 0u32..=6, eta in -1i32..=1,
                                          re in 0.05f64..1.5, im in -1.0f64..1.0, flip in any::<bool>()) {
        let s = Complex64::new(if flip { -re } else { re }, im);
        let query = LocalWeightQuery { q, r, eta, s };
        let a = rs_weight_displayed(query).unwrap();
        let b = rs_weight_quotient(query).unwrap();
        prop_assert!(rel_close(a, b, 1e-9), "{a} vs {b}");
    }

    #[test]
    fn arch_factor_k_independent_at_zero_trace(k in 1u32..200, n in 0.5f64..500.0) {
        let a = arch_limit_factor(ArchFactorInput::from_embeddings(k, n, 0.0)).unwrap();
        let b = arch_limit_factor(ArchFactorInput::from_embeddings(k + 1, n, 0.0)).unwrap();
        prop_assert!((a - b).abs() <= 1e-12 * a.abs());
    }

    #[test]
    fn arch_factor_finite(k in 1u32..=200, n in 0.5f64..1000.0, frac in -0.999f64..0.999) {
        let t = frac * 2.0 * n.sqrt();
        let v = arch_limit_factor(ArchFactorInput::from_embeddings(k, n, t)).unwrap();
        prop_assert!(v.is_finite());
        // |sqrt|Delta| + i t|^2 = 4N, so |v| <= (4N)^(1/2) / (2 pi)
        prop_assert!(v.abs() <= n.sqrt() / std::f64::consts::PI * (1.0 + 1e-9));
    }
}

/// Discriminants over F of the form b^2 - 4c, rational and not squares.
fn sample_deltas(tag: FieldTag) -> Vec<RingElement> {
    let mut out = Vec::new();
    for b in -12i64..=12 {
        for c in -15i64..=15 {
            let d = b * b - 4 * c;
            if d == 0 || RingElement::rational(d).is_square_in(tag) {
                continue;
            }
            out.push(RingElement::rational(d));
        }
    }
    out.sort_by_key(|x| x.a);
    out.dedup();
    out
}

#[test]
fn gen_zagier_bounded_by_local_factors() {
    let one = Complex64::new(1.0, 0.0);
    let mut checked = 0;
    for tag in FieldTag::ALL {
        for delta in sample_deltas(tag) {
            let Ok(v) = gen_zagier_l(one, delta, JIdeal::TRIVIAL, tag, None) else { continue };
            checked += 1;
            let l = l_eta(tag, delta, one).unwrap();
            let bound: f64 = correction_primes(tag, delta)
                .unwrap()
                .iter()
                .map(|ld| (1.0 + 3.0 / ld.q as f64).powi(ld.exponent as i32))
                .product();
            assert!(v.norm() <= l.norm() * bound * (1.0 + 1e-12), "{tag} delta = {delta}");
        }
    }
    assert!(checked > 300, "only {checked} discriminants evaluated");
}

#[test]
fn strip_consistency() {
    let one = Complex64::new(1.0, 0.0);
    let mut checked = 0;
    for tag in FieldTag::ALL {
        for delta in sample_deltas(tag) {
            let Ok(full) = gen_zagier_l(one, delta, JIdeal::TRIVIAL, tag, None) else { continue };
            checked += 1;
            for level in [2u64, 3, 6, 7, 15] {
                let stripped = gen_zagier_l(one, delta, JIdeal::TRIVIAL, tag, Some(level)).unwrap();
                let omitted: Complex64 = correction_primes(tag, delta)
                    .unwrap()
                    .iter()
                    .filter(|ld| level % ld.prime.p == 0)
                    .map(|ld| euler_correction(ld.q as f64, ld.exponent, ld.eta, one))
                    .product();
                assert!(rel_close(stripped * omitted, full, 1e-14), "{tag} delta = {delta} N = {level}");
            }
        }
    }
    assert!(checked > 300, "only {checked} discriminants evaluated");
}
