//! The Siegel-Zagier L-function and its generalization over the base fields.
//!
//! Every public function takes the displayed argument `w`, so that the
//! values quoted in corollaries are at `w = 1`. Internally the Euler
//! corrections are written in the variable Z = q^(w - 1/2).
//!
//! Over Q two independent routes are provided: the counting definition
//! zeta(2w)/zeta(w) * sum rho_q(delta) q^-w truncated at a bound Q, and the
//! factored form L(w, chi_D) times a finite product over p^k || l.

use crate::basefield::{self, FieldTag, PrimeIdeal, RingElement};
use crate::error::{Error, Result};
use crate::quadarith::{self, fundamental_decompose, kronecker};
use crate::special::{compensated_sum, zeta};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;

/// Per-prime data of E = F(sqrt delta) entering the Euler correction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadExtensionLocalData {
    pub prime: PrimeIdeal,
    /// Residue norm Nr(p).
    pub q: u64,
    /// +1 split, -1 inert, 0 ramified.
    pub eta: i32,
    /// k + k_p, the depth of the correction (k_p = 0 for the trivial ideal J).
    pub exponent: u32,
}

/// The ideal J of a J-discriminant. The supported fields have narrow class
/// number one, so only the unit ideal is accepted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct JIdeal {
    pub norm: u64,
}

impl JIdeal {
    pub const TRIVIAL: JIdeal = JIdeal { norm: 1 };
}

fn check_discriminant(delta: i64) -> Result<()> {
    if delta == 0 || delta.rem_euclid(4) > 1 {
        return Err(Error::NotDiscriminant(delta));
    }
    Ok(())
}

/// #{x mod 2q : x^2 = delta mod 4q}, by exhaustive count.
pub fn rho_q(delta: i64, q: i64) -> Result<u64> {
    check_discriminant(delta)?;
    if q <= 0 {
        return Err(Error::InvalidArgument(format!("q = {q} must be positive")));
    }
    let m = 4 * q as i128;
    let target = (delta as i128).rem_euclid(m);
    Ok((0..2 * q as i128).filter(|&x| (x * x) % m == target).count() as u64)
}

/// rho_q(delta) for every 1 <= q <= qmax (index 0 unused).
///
/// rho is multiplicative in q. Prime powers of primes dividing 2 delta are
/// counted exhaustively; for the remaining primes rho_{p^e} = 1 + (delta | p).
pub fn rho_table(delta: i64, qmax: usize) -> Result<Vec<u64>> {
    check_discriminant(delta)?;
    let mut spf = vec![0u32; qmax + 1];
    for i in 2..=qmax {
        if spf[i] == 0 {
            let mut j = i;
            while j <= qmax {
                if spf[j] == 0 {
                    spf[j] = i as u32;
                }
                j += i;
            }
        }
    }
    let bad = |p: u64| p == 2 || delta.unsigned_abs() % p == 0;
    let mut cache: HashMap<u64, u64> = HashMap::new();
    let mut table = vec![0u64; qmax + 1];
    if qmax >= 1 {
        table[1] = 1;
    }
    for q in 2..=qmax {
        let mut n = q;
        let mut val = 1u64;
        while n > 1 {
            let p = spf[n] as usize;
            let mut pe = 1usize;
            while n % p == 0 {
                n /= p;
                pe *= p;
            }
            let pp = p as u64;
            let local = if bad(pp) {
                *cache.entry(pe as u64).or_insert_with(|| rho_q(delta, pe as i64).expect("checked discriminant"))
            } else {
                (1 + kronecker(delta, pp as i64)) as u64
            };
            val *= local;
            if val == 0 {
                break;
            }
        }
        table[q] = val;
    }
    Ok(table)
}

/// Largest value of tau(n) / n^e over all n, as the finite Euler product
/// prod_p max_a (a+1) / p^(a e). Primes p >= 2^(1/e) contribute 1.
pub fn divisor_bound_constant(e: f64) -> f64 {
    assert!(e > 0.0 && e < 1.0);
    let pmax = 2f64.powf(1.0 / e).ceil() as u64;
    let mut c = 1.0;
    for p in 2..=pmax {
        if !quadarith::is_prime(p) {
            continue;
        }
        let mut best = 1.0f64;
        for a in 1..200 {
            let v = (a + 1) as f64 / (p as f64).powf(a as f64 * e);
            best = best.max(v);
        }
        c *= best;
    }
    c
}

/// Exponent used for the divisor bound inside the reported tail bound.
pub const TAIL_BOUND_EPS: f64 = 0.25;

/// Result of the truncated counting series.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TruncatedZagier {
    pub s: f64,
    pub delta: i64,
    pub q_max: u64,
    /// zeta(2s)/zeta(s) * sum_{q <= Q} rho_q q^-s.
    pub raw: f64,
    /// raw plus the estimated tail zeta(2s)/zeta(s) * c Q^(1-s)/(s-1),
    /// with c the measured mean of rho_q over q <= Q.
    pub corrected: f64,
    /// The tail estimate that was added.
    pub tail_estimate: f64,
    /// Rigorous but crude bound on the omitted tail, from
    /// rho_q <= 2 tau(q) sqrt(q) and tau(q) <= C q^(1/4). Infinite when s <= 7/4.
    pub tail_bound: f64,
}

/// The counting definition of L(s, delta) truncated at q <= Q.
pub fn zagier_l_truncated(s: f64, delta: i64, q_max: u64) -> Result<TruncatedZagier> {
    if s <= 1.0 {
        return Err(Error::InvalidArgument(format!("s = {s} must exceed 1")));
    }
    if q_max < 1 {
        return Err(Error::InvalidArgument("Q must be positive".into()));
    }
    let table = rho_table(delta, q_max as usize)?;
    let partial = compensated_sum((1..=q_max as usize).map(|q| table[q] as f64 * (q as f64).powf(-s)));
    let mean = table[1..].iter().sum::<u64>() as f64 / q_max as f64;
    let qf = q_max as f64;
    let tail = mean * qf.powf(1.0 - s) / (s - 1.0);
    let pref = zeta(2.0 * s) / zeta(s);
    let e = TAIL_BOUND_EPS;
    let tail_bound = if s > 1.5 + e {
        let c = divisor_bound_constant(e);
        pref * 2.0 * c * qf.powf(1.5 + e - s) / (s - 1.5 - e)
    } else {
        f64::INFINITY
    };
    Ok(TruncatedZagier {
        s,
        delta,
        q_max,
        raw: pref * partial,
        corrected: pref * (partial + tail),
        tail_estimate: pref * tail,
        tail_bound,
    })
}

/// U_m(Z) = (Z^m - Z^-m)/(Z - Z^-1) as the geometric sum sum_j Z^(m-1-2j).
/// Negative m gives -U_{|m|}.
fn u_geometric(z: Complex64, m: i64) -> Complex64 {
    if m < 0 {
        return -u_geometric(z, -m);
    }
    let zi = z.inv();
    let mut term = z.powi(m as i32 - 1);
    let step = zi * zi;
    let mut acc = Complex64::new(0.0, 0.0);
    for _ in 0..m {
        acc += term;
        term *= step;
    }
    acc
}

/// The bracket U_{k+1}(Z) - eta q^(-1/2) U_k(Z) of the Euler correction,
/// a Laurent polynomial in Z invariant under Z -> 1/Z.
pub fn euler_bracket(q: f64, k: u32, eta: i32, w: Complex64) -> Complex64 {
    let z = Complex64::new(q, 0.0).powc(w - 0.5);
    let k = k as i64;
    u_geometric(z, k + 1) - eta as f64 * q.powf(-0.5) * u_geometric(z, k)
}

/// Euler correction at a prime of norm q with depth k and eta = eta_E(p):
/// q^((1/2-w)k) [ U_{k+1} - eta q^(-1/2) U_k ] with Z = q^(w-1/2),
/// evaluated through the telescoped geometric sums (no division by Z - 1/Z).
pub fn euler_correction(q: f64, k: u32, eta: i32, w: Complex64) -> Complex64 {
    let z = Complex64::new(q, 0.0).powc(w - 0.5);
    z.powi(-(k as i32)) * euler_bracket(q, k, eta, w)
}

/// The same correction written as the displayed quotient
/// q^((1/2-w)k) [(q^((1/2-w)(k+1)) - q^((w-1/2)(k+1))) - eta q^(-1/2) (q^((1/2-w)k) - q^((w-1/2)k))]
/// / (q^(1/2-w) - q^(w-1/2)). Falls back to the telescoped form when the
/// denominator is within 1e-6 of zero.
pub fn euler_correction_quotient(q: f64, k: u32, eta: i32, w: Complex64) -> Complex64 {
    let a = Complex64::new(q, 0.0).powc(Complex64::new(0.5, 0.0) - w);
    let b = a.inv();
    let den = a - b;
    if den.norm() < 1e-6 {
        return euler_correction(q, k, eta, w);
    }
    let k = k as i32;
    let num = (a.powi(k + 1) - b.powi(k + 1)) - eta as f64 * q.powf(-0.5) * (a.powi(k) - b.powi(k));
    a.powi(k) * num / den
}

/// L(w, delta) over Q from the factored form: L(w, chi_D) times the
/// correction at every p^k || l. At w = 1 the value L(1, chi_D) comes from
/// the class number formula route of `quadarith::dirichlet_l1`.
pub fn zagier_l_factored(w: Complex64, delta: i64) -> Result<Complex64> {
    check_discriminant(delta)?;
    let fd = fundamental_decompose(delta)?;
    let lval = if w == Complex64::new(1.0, 0.0) {
        if fd.d == 1 {
            return Err(Error::InvalidArgument(format!("L(w, {delta}) has a pole at w = 1 (square delta)")));
        }
        Complex64::new(quadarith::dirichlet_l1(fd.d)?, 0.0)
    } else {
        quadarith::dirichlet_l(fd.d, w)?
    };
    let corr = quadarith::factorize(fd.l).into_iter().fold(Complex64::new(1.0, 0.0), |acc, (p, k)| {
        acc * euler_correction(p as f64, k, kronecker(fd.d, p as i64), w)
    });
    Ok(lval * corr)
}

/// eta_{E/F} at a prime of F, for E = F(sqrt delta).
pub fn eta_at_prime(tag: FieldTag, delta: RingElement, pr: &PrimeIdeal) -> Result<i32> {
    Ok(basefield::local_extension(tag, delta, pr)?.eta)
}

/// Local data of F(sqrt delta)/F at every prime where the Euler correction is nontrivial.
pub fn correction_primes(tag: FieldTag, delta: RingElement) -> Result<Vec<QuadExtensionLocalData>> {
    let rd = basefield::rel_discriminant_of(tag, delta)?;
    let mut out = Vec::new();
    for le in &rd.local {
        if le.l_exp() < 0 {
            return Err(Error::InvalidArgument(format!("{delta} is not a discriminant over {tag} (not a square mod 4)")));
        }
        if le.l_exp() > 0 {
            out.push(QuadExtensionLocalData {
                prime: le.prime,
                q: le.prime.norm(),
                eta: le.eta,
                exponent: le.l_exp() as u32,
            });
        }
    }
    Ok(out)
}

/// L(w, eta_E) for E = F(sqrt delta).
///
/// Over Q this is L(w, chi_D). Over a quadratic base delta must be rational
/// and E is biquadratic over Q; at w = 1 with delta < 0 the Herglotz class
/// number route is used, and otherwise L(w, chi_D1) L(w, chi_D2) over the
/// two other quadratic subfields.
pub fn l_eta(tag: FieldTag, delta: RingElement, w: Complex64) -> Result<Complex64> {
    let at_one = w == Complex64::new(1.0, 0.0);
    if tag == FieldTag::Q {
        let d = fundamental_decompose(delta.a)?.d;
        return if at_one {
            Ok(Complex64::new(quadarith::dirichlet_l1(d)?, 0.0))
        } else {
            quadarith::dirichlet_l(d, w)
        };
    }
    if !delta.is_rational() {
        return Err(Error::UnsupportedExtension(format!(
            "delta = {delta} is irrational, so F(sqrt delta) is not biquadratic over Q ({tag})"
        )));
    }
    let m = delta.a;
    if at_one && m < 0 {
        let n = quadarith::squarefree_kernel(-m) as u64;
        match basefield::l1_eta_biquad(tag, n) {
            Ok(b) => return Ok(Complex64::new(b.l1, 0.0)),
            // Q(zeta_8): the product of the subfield L-values stays valid.
            Err(Error::UnsupportedExtension(_)) => {}
            Err(e) => return Err(e),
        }
    }
    if at_one {
        return Ok(Complex64::new(basefield::l1_eta_product(tag, m)?, 0.0));
    }
    let (d1, d2) = basefield::biquadratic_subfields(tag, m)?;
    Ok(quadarith::dirichlet_l(d1, w)? * quadarith::dirichlet_l(d2, w)?)
}

/// Generalized Zagier L-value Nr(J)^-w L(w, eta_E) prod_p correction_p,
/// with the primes dividing the level `strip` omitted from the product.
///
/// delta must be a nonzero non-square J-discriminant that is totally
/// positive or totally negative.
pub fn gen_zagier_l(
    w: Complex64,
    delta: RingElement,
    j: JIdeal,
    tag: FieldTag,
    strip: Option<u64>,
) -> Result<Complex64> {
    if j != JIdeal::TRIVIAL {
        return Err(Error::InvalidArgument("only the unit ideal J = o is supported".into()));
    }
    if delta.is_zero() {
        return Err(Error::InvalidArgument("delta = 0".into()));
    }
    if tag != FieldTag::Q && !delta.is_rational() {
        return Err(Error::UnsupportedExtension(format!(
            "delta = {delta} is irrational, so F(sqrt delta) is not biquadratic over Q ({tag})"
        )));
    }
    if !delta.is_totally_positive(tag) && !delta.is_totally_negative(tag) {
        return Err(Error::InvalidArgument(format!("{delta} is neither totally positive nor totally negative")));
    }
    if tag == FieldTag::Q {
        check_discriminant(delta.a)?;
    }
    let local = correction_primes(tag, delta)?;
    let lval = l_eta(tag, delta, w)?;
    let corr = local
        .iter()
        .filter(|ld| strip.map_or(true, |n| n % ld.prime.p != 0))
        .fold(Complex64::new(1.0, 0.0), |acc, ld| acc * euler_correction(ld.q as f64, ld.exponent, ld.eta, w));
    Ok(lval * corr)
}

/// Real-valued convenience wrapper of [`gen_zagier_l`] at w = 1.
pub fn gen_zagier_l1(delta: RingElement, tag: FieldTag, strip: Option<u64>) -> Result<f64> {
    Ok(gen_zagier_l(Complex64::new(1.0, 0.0), delta, JIdeal::TRIVIAL, tag, strip)?.re)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };

    #[test]
    fn rho_examples() {
        assert_eq!(rho_q(1, 1).unwrap(), 1);
        assert_eq!(rho_q(1, 2).unwrap(), 2);
        assert!(rho_q(2, 3).is_err());
        assert!(rho_q(5, 0).is_err());
    }

    #[test]
    fn rho_table_matches_exhaustion() {
        for delta in [5i64, 8, 12, -3, -4, -8, -20, 45, -48, 1, 16] {
            let t = rho_table(delta, 400).unwrap();
            for q in 1..=400 {
                assert_eq!(t[q], rho_q(delta, q as i64).unwrap(), "delta={delta} q={q}");
            }
        }
    }

    #[test]
    fn factored_examples() {
        let v = zagier_l_factored(ONE, -12).unwrap().re;
        let l3 = quadarith::dirichlet_l1(-3).unwrap();
        assert!((v - 2.0 * l3).abs() < 1e-14);
        let s = Complex64::new(2.0, 0.0);
        let a = zagier_l_factored(s, 5).unwrap();
        let b = quadarith::dirichlet_l(5, s).unwrap();
        assert!((a - b).norm() < 1e-15);
    }

    #[test]
    fn corrections_agree_and_are_symmetric() {
        for &(q, k, eta, w) in &[(2.0, 1, -1, 1.0), (3.0, 2, 1, 1.7), (9.0, 3, 0, 0.8), (5.0, 4, -1, 2.3)] {
            let w = Complex64::new(w, 0.0);
            let a = euler_correction(q, k, eta, w);
            let b = euler_correction_quotient(q, k, eta, w);
            assert!((a - b).norm() < 1e-12 * a.norm());
            // the bracket only depends on Z + 1/Z
            let w_ref = Complex64::new(1.0, 0.0) - w;
            let (c, d) = (euler_bracket(q, k, eta, w), euler_bracket(q, k, eta, w_ref));
            assert!((c - d).norm() < 1e-12 * c.norm());
        }
        // removable singularity at w = 1/2
        let half = Complex64::new(0.5, 0.0);
        let v = euler_correction(2.0, 2, -1, half);
        let expect = 3.0 + 2.0 * 2f64.powf(-0.5);
        assert!((v.re - expect).abs() < 1e-14);
        assert!((euler_correction_quotient(2.0, 2, -1, half) - v).norm() < 1e-14);
    }

    #[test]
    fn gen_examples() {
        let v = gen_zagier_l1(RingElement::rational(-8), FieldTag::Q, Some(2)).unwrap();
        assert!((v - PI / (2.0 * 2f64.sqrt())).abs() < 1e-14);
        for n in [3u64, 11, 19, 43] {
            let d = RingElement::rational(-4 * n as i64);
            let v = gen_zagier_l1(d, FieldTag::Qsqrt2, Some(n)).unwrap();
            let l = basefield::l1_eta_biquad(FieldTag::Qsqrt2, n).unwrap().l1;
            assert!((v - 2.5 * l).abs() < 1e-12 * v, "N={n}");
        }
    }

    #[test]
    fn gen_matches_factored_over_q() {
        for delta in [5i64, 8, 12, 13, -3, -4, -8, -20, 45, -48, -12, 60, -300, 17 * 9] {
            for w in [0.75, 1.0, 2.0] {
                let w = Complex64::new(w, 0.0);
                let a = gen_zagier_l(w, RingElement::rational(delta), JIdeal::TRIVIAL, FieldTag::Q, None).unwrap();
                let b = zagier_l_factored(w, delta).unwrap();
                assert!((a - b).norm() < 1e-12 * b.norm().max(1e-300), "delta={delta} w={w}");
            }
        }
    }

    #[test]
    fn eta_examples() {
        let two = |t| basefield::primes_above(t, 2)[0];
        let d = RingElement::rational(-12);
        assert_eq!(eta_at_prime(FieldTag::Qsqrt2, d, &two(FieldTag::Qsqrt2)).unwrap(), -1);
        assert_eq!(eta_at_prime(FieldTag::Qsqrt5, d, &two(FieldTag::Qsqrt5)).unwrap(), 1);
        assert_eq!(eta_at_prime(FieldTag::Q, RingElement::rational(-4), &two(FieldTag::Q)).unwrap(), 0);
    }

    #[test]
    fn truncated_close_at_s3() {
        let t = zagier_l_truncated(3.0, 8, 10_000).unwrap();
        let f = zagier_l_factored(Complex64::new(3.0, 0.0), 8).unwrap().re;
        assert!((t.raw - f).abs() / f < 1e-4);
        assert!((t.corrected - f).abs() / f < 1e-8);
        assert!(t.tail_bound.is_finite() && t.tail_bound > (t.raw - f).abs());
        assert!(zagier_l_truncated(1.5, 8, 1000).unwrap().tail_bound.is_infinite());
    }

    #[test]
    fn divisor_constant_bounds_tau() {
        let c = divisor_bound_constant(0.25);
        for n in 1..20000u64 {
            let tau = quadarith::factorize(n).iter().map(|&(_, e)| e as u64 + 1).product::<u64>();
            assert!(tau as f64 <= c * (n as f64).powf(0.25) + 1e-9);
        }
    }
}
