//! Exact arithmetic of rational quadratic fields.
//!
//! Fundamental discriminants, the Kronecker symbol, class numbers by reduced
//! binary quadratic forms, unit data from continued fractions, and the values
//! L(s, chi_D) of quadratic Dirichlet characters.
//!
//! Integers are `i64`. Every routine documents its own range; the CLI layer
//! bounds |D| by 10^6.

use crate::error::{Error, Result};
use crate::special;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// A discriminant written as `delta = D * l^2` with `D` fundamental.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FundamentalDecomposition {
    pub delta: i64,
    /// Fundamental discriminant, or 1 when `delta` is a perfect square.
    pub d: i64,
    pub l: u64,
}

/// Class number and unit count of an imaginary quadratic field.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ImagQuadData {
    pub d: i64,
    pub h: u64,
    pub omega: u32,
}

/// Class number and regulator of a real quadratic field.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RealQuadData {
    pub d: i64,
    /// Wide class number.
    pub h: u64,
    /// Narrow class number (number of cycles of reduced indefinite forms).
    pub h_plus: u64,
    /// log of the fundamental unit eps > 1.
    pub reg: f64,
    /// Norm of the fundamental unit, +1 or -1.
    pub unit_norm: i32,
    /// Length of the continued-fraction period that produced `reg`.
    pub period: usize,
}

/// Floor of the square root of a nonnegative integer.
pub fn isqrt(n: u64) -> u64 {
    if n < 2 {
        return n;
    }
    let mut x = (n as f64).sqrt() as u64;
    while x.checked_mul(x).map_or(true, |sq| sq > n) {
        x -= 1;
    }
    while (x + 1).checked_mul(x + 1).map_or(false, |sq| sq <= n) {
        x += 1;
    }
    x
}

/// True iff `n` is the square of an integer (negative numbers are not).
pub fn is_square(n: i64) -> bool {
    if n < 0 {
        return false;
    }
    let r = isqrt(n as u64);
    r * r == n as u64
}

/// Prime factorization by trial division, primes in increasing order.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    if n < 2 {
        return out;
    }
    let mut p = 2u64;
    while p * p <= n {
        if n % p == 0 {
            let mut e = 0;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// True iff `n` is prime.
pub fn is_prime(n: u64) -> bool {
    n >= 2 && factorize(n).len() == 1 && factorize(n)[0].1 == 1
}

/// True iff no square of a prime divides `n` (`n >= 1`).
pub fn is_squarefree(n: u64) -> bool {
    n >= 1 && factorize(n).iter().all(|&(_, e)| e == 1)
}

/// The square-free integer `m` with `n = m * r^2`, keeping the sign of `n`.
pub fn squarefree_kernel(n: i64) -> i64 {
    assert!(n != 0, "squarefree_kernel of zero");
    let core: i64 = factorize(n.unsigned_abs())
        .iter()
        .filter(|&&(_, e)| e % 2 == 1)
        .map(|&(p, _)| p as i64)
        .product();
    n.signum() * core
}

/// Discriminant of Q(sqrt m) for a square-free `m != 1`.
pub fn field_discriminant(m: i64) -> i64 {
    debug_assert!(m != 0 && m != 1);
    if m.rem_euclid(4) == 1 {
        m
    } else {
        4 * m
    }
}

/// True iff `d` is a fundamental discriminant different from 1.
pub fn is_fundamental(d: i64) -> bool {
    if d == 0 || d == 1 {
        return false;
    }
    match d.rem_euclid(4) {
        1 => is_squarefree(d.unsigned_abs()),
        0 => {
            let m = d / 4;
            matches!(m.rem_euclid(4), 2 | 3) && is_squarefree(m.unsigned_abs())
        }
        _ => false,
    }
}

/// Write a discriminant as `D * l^2` with `D` fundamental (or `D = 1` for squares).
pub fn fundamental_decompose(delta: i64) -> Result<FundamentalDecomposition> {
    if delta == 0 || !matches!(delta.rem_euclid(4), 0 | 1) {
        return Err(Error::NotDiscriminant(delta));
    }
    let kernel = squarefree_kernel(delta);
    let d = if kernel == 1 { 1 } else { field_discriminant(kernel) };
    let l2 = delta / d;
    debug_assert_eq!(l2 * d, delta);
    let l = isqrt(l2 as u64);
    debug_assert_eq!((l * l) as i64, l2);
    Ok(FundamentalDecomposition { delta, d, l })
}

/// The Kronecker symbol (a | n) for arbitrary integers.
pub fn kronecker(a: i64, n: i64) -> i32 {
    const TAB2: [i32; 8] = [0, 1, 0, -1, 0, -1, 0, 1];
    let mut a = a as i128;
    let mut b = n as i128;
    if b == 0 {
        return if a.abs() == 1 { 1 } else { 0 };
    }
    if a % 2 == 0 && b % 2 == 0 {
        return 0;
    }
    let mut v = 0;
    while b % 2 == 0 {
        b /= 2;
        v += 1;
    }
    let mut k = if v % 2 == 0 { 1 } else { TAB2[(a & 7) as usize] };
    if b < 0 {
        b = -b;
        if a < 0 {
            k = -k;
        }
    }
    loop {
        if a == 0 {
            return if b > 1 { 0 } else { k };
        }
        let mut v = 0;
        while a % 2 == 0 {
            a /= 2;
            v += 1;
        }
        if v % 2 == 1 {
            k *= TAB2[(b & 7) as usize];
        }
        if a & b & 2 != 0 {
            k = -k;
        }
        let r = a.abs();
        a = b % r;
        b = r;
    }
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn require_fundamental(d: i64) -> Result<()> {
    if is_fundamental(d) {
        Ok(())
    } else {
        Err(Error::NotFundamental(d))
    }
}

/// Reduced primitive positive definite forms (a, b, c) of discriminant `d < 0`.
pub fn reduced_forms_imag(d: i64) -> Result<Vec<(i64, i64, i64)>> {
    if d >= 0 || !matches!(d.rem_euclid(4), 0 | 1) {
        return Err(Error::InvalidArgument(format!("{d} is not a negative discriminant")));
    }
    let n_abs = d.unsigned_abs();
    let mut out = Vec::new();
    let mut b: i64 = d.rem_euclid(2);
    // |b| <= a <= c forces 3 b^2 <= |d|
    while 3 * (b as u64) * (b as u64) <= n_abs {
        let ac = ((b * b - d) / 4) as u64;
        let mut a = (b as u64).max(1);
        while a * a <= ac {
            if ac % a == 0 {
                let c = ac / a;
                if gcd(gcd(a, b as u64), c) == 1 {
                    let (ai, ci) = (a as i64, c as i64);
                    out.push((ai, b, ci));
                    if b != 0 && b != ai && ai != ci {
                        out.push((ai, -b, ci));
                    }
                }
            }
            a += 1;
        }
        b += 2;
    }
    out.sort_unstable();
    Ok(out)
}

/// Class number h(D) of a negative fundamental discriminant by counting reduced forms.
pub fn class_number_imag(d: i64) -> Result<u64> {
    if d >= 0 {
        return Err(Error::NotFundamental(d));
    }
    require_fundamental(d)?;
    Ok(reduced_forms_imag(d)?.len() as u64)
}

/// Number of roots of unity in Q(sqrt D) for a negative fundamental `D`.
pub fn omega_units(d: i64) -> Result<u32> {
    if d >= 0 {
        return Err(Error::NotFundamental(d));
    }
    require_fundamental(d)?;
    Ok(match d {
        -3 => 6,
        -4 => 4,
        _ => 2,
    })
}

/// Class number and unit count together.
pub fn imag_quad_data(d: i64) -> Result<ImagQuadData> {
    Ok(ImagQuadData { d, h: class_number_imag(d)?, omega: omega_units(d)? })
}

/// Sum over the period of the continued fraction of (p0 + sqrt r) / q0.
///
/// Returns (sum of log of complete quotients over one period, period length).
/// Requires q0 > 0 dividing r - p0^2 and r not a square.
fn cf_period_log(r: i64, p0: i64, q0: i64) -> (f64, usize) {
    let s = isqrt(r as u64) as i64;
    let sqrt_r = (r as f64).sqrt();
    let step = |p: i64, q: i64| -> (i64, i64) {
        let a = (p + s).div_euclid(q);
        let p1 = a * q - p;
        let q1 = (r - p1 * p1) / q;
        (p1, q1)
    };
    let (p1, q1) = step(p0, q0);
    let (mut p, mut q) = (p1, q1);
    let mut logs = Vec::new();
    loop {
        logs.push(((p as f64 + sqrt_r) / q as f64).ln());
        let next = step(p, q);
        p = next.0;
        q = next.1;
        if (p, q) == (p1, q1) {
            break;
        }
    }
    let len = logs.len();
    (special::compensated_sum(logs), len)
}

/// Reduced indefinite forms (a, b, c) of a positive non-square discriminant.
fn reduced_forms_real(d: i64) -> Vec<(i64, i64, i64)> {
    let s = isqrt(d as u64) as i64;
    let mut out = Vec::new();
    let mut b = if d % 2 == 0 { 2 } else { 1 };
    while b <= s {
        let n = (d - b * b) / 4; // = -a c > 0
        let mut e = 1;
        while e * e <= n {
            if n % e == 0 {
                let pair = [e, n / e];
                for &a in pair.iter().take(if e * e == n { 1 } else { 2 }) {
                    let two_a = 2 * a;
                    // sqrt(d) - b < 2|a| < sqrt(d) + b
                    let lower = (two_a + b) * (two_a + b) > d;
                    let upper = two_a <= b || (two_a - b) * (two_a - b) < d;
                    if lower && upper && gcd(gcd(a as u64, b as u64), (n / a) as u64) == 1 {
                        out.push((a, b, -(n / a)));
                        out.push((-a, b, n / a));
                    }
                }
            }
            e += 1;
        }
        b += 2;
    }
    out.sort_unstable();
    out
}

/// One step of the reduction operator on indefinite forms.
fn rho_step(d: i64, form: (i64, i64, i64)) -> (i64, i64, i64) {
    let s = isqrt(d as u64) as i64;
    let (_, b, c) = form;
    let m = 2 * c.abs();
    let b1 = s - (s + b).rem_euclid(m);
    (c, b1, (b1 * b1 - d) / (4 * c))
}

/// Class number, narrow class number and regulator of Q(sqrt D), `D > 0` fundamental.
pub fn real_quad_data(d: i64) -> Result<RealQuadData> {
    if d <= 1 {
        return Err(Error::NotFundamental(d));
    }
    require_fundamental(d)?;
    let (reg, period) = if d % 4 == 0 { cf_period_log(d / 4, 0, 1) } else { cf_period_log(d, 1, 2) };
    let unit_norm = if period % 2 == 0 { 1 } else { -1 };

    let forms = reduced_forms_real(d);
    let mut seen = std::collections::BTreeSet::new();
    let mut cycles = 0u64;
    for f in &forms {
        if seen.contains(f) {
            continue;
        }
        cycles += 1;
        let mut g = *f;
        loop {
            seen.insert(g);
            g = rho_step(d, g);
            if g == *f {
                break;
            }
            if !forms.binary_search(&g).is_ok() {
                return Err(Error::Inconsistent(format!("reduction left the reduced set at D={d}")));
            }
        }
    }
    let h = if unit_norm == -1 { cycles } else { cycles / 2 };
    Ok(RealQuadData { d, h, h_plus: cycles, reg, unit_norm, period })
}

/// L(1, chi_D) for a real fundamental discriminant by the finite log-sine formula.
///
/// L(1, chi_D) = -(2/sqrt D) sum_{0<a<D/2} chi_D(a) log sin(pi a / D). Cost O(D).
pub fn l1_real_log_sine(d: i64) -> f64 {
    let df = d as f64;
    let terms = (1..(d + 1) / 2).filter_map(|a| {
        let chi = kronecker(d, a);
        (chi != 0).then(|| chi as f64 * (PI * a as f64 / df).sin().ln())
    });
    -2.0 / df.sqrt() * special::compensated_sum(terms)
}

/// L(1, chi_D) for a real fundamental discriminant by the theta-function series.
///
/// L(1, chi_D) = sum_n chi_D(n) [erfc(n sqrt(pi/D)) / n + E1(pi n^2 / D) / sqrt D].
/// Terms decay like exp(-pi n^2 / D); the sum stops at n = 7 sqrt D, where the
/// neglected tail is below 1e-60.
pub fn l1_real_theta(d: i64) -> f64 {
    let df = d as f64;
    let sd = df.sqrt();
    let n_max = (7.0 * sd).ceil() as i64 + 1;
    let c = (PI / df).sqrt();
    let terms = (1..=n_max).filter_map(|n| {
        let chi = kronecker(d, n);
        (chi != 0).then(|| {
            let nf = n as f64;
            chi as f64 * (special::erfc(nf * c) / nf + special::exp_integral_e1(PI * nf * nf / df) / sd)
        })
    });
    special::compensated_sum(terms)
}

/// Largest real discriminant handled by the O(D) log-sine formula.
pub const LOG_SINE_LIMIT: i64 = 200_000;

/// L(1, chi_D) for a fundamental discriminant `D != 1`.
///
/// Negative `D`: 2 pi h / (omega sqrt|D|). Positive `D`: the log-sine formula
/// up to [`LOG_SINE_LIMIT`], the theta series beyond it.
pub fn dirichlet_l1(d: i64) -> Result<f64> {
    require_fundamental(d)?;
    if d < 0 {
        let data = imag_quad_data(d)?;
        Ok(2.0 * PI * data.h as f64 / (data.omega as f64 * (d.unsigned_abs() as f64).sqrt()))
    } else if d <= LOG_SINE_LIMIT {
        Ok(l1_real_log_sine(d))
    } else {
        Ok(l1_real_theta(d))
    }
}

/// L(s, chi_D) for a fundamental `D` (or `D = 1`, giving zeta) at `s != 1`.
///
/// Uses L(s, chi) = |D|^{-s} sum_{a=1}^{|D|} chi(a) zeta(s, a/|D|).
pub fn dirichlet_l(d: i64, s: Complex64) -> Result<Complex64> {
    if d != 1 {
        require_fundamental(d)?;
    }
    if (s - 1.0).norm() < 1e-12 {
        if d == 1 {
            return Err(Error::InvalidArgument("zeta has a pole at s = 1".into()));
        }
        return Ok(Complex64::new(dirichlet_l1(d)?, 0.0));
    }
    let m = d.unsigned_abs();
    let mf = m as f64;
    let mut sum = Complex64::new(0.0, 0.0);
    for a in 1..=m {
        let chi = kronecker(d, a as i64);
        if chi != 0 {
            sum += chi as f64 * special::hurwitz_zeta(s, a as f64 / mf);
        }
    }
    Ok(sum * Complex64::new(mf, 0.0).powc(-s))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decompose_examples() {
        assert_eq!(fundamental_decompose(-12).unwrap(), FundamentalDecomposition { delta: -12, d: -3, l: 2 });
        assert_eq!(fundamental_decompose(5).unwrap().l, 1);
        assert_eq!(fundamental_decompose(-16).unwrap(), FundamentalDecomposition { delta: -16, d: -4, l: 2 });
        assert_eq!(fundamental_decompose(45).unwrap(), FundamentalDecomposition { delta: 45, d: 5, l: 3 });
        assert_eq!(fundamental_decompose(-48).unwrap(), FundamentalDecomposition { delta: -48, d: -3, l: 4 });
        assert_eq!(fundamental_decompose(9).unwrap().d, 1);
        assert!(matches!(fundamental_decompose(6), Err(Error::NotDiscriminant(6))));
        assert!(fundamental_decompose(0).is_err());
    }

    #[test]
    fn kronecker_examples() {
        assert_eq!(kronecker(-7, 2), 1);
        assert_eq!(kronecker(-3, 2), -1);
        assert_eq!(kronecker(-4, 2), 0);
        assert_eq!(kronecker(5, 2), -1);
        assert_eq!(kronecker(8, 7), 1);
        assert_eq!(kronecker(-20, 3), 1);
    }

    #[test]
    fn class_numbers() {
        for (d, h) in [(-3, 1), (-4, 1), (-7, 1), (-8, 1), (-20, 2), (-23, 3), (-56, 4), (-84, 4), (-163, 1), (-260, 8)] {
            assert_eq!(class_number_imag(d).unwrap(), h, "h({d})");
        }
        assert!(class_number_imag(-12).is_err());
        assert!(class_number_imag(5).is_err());
    }

    #[test]
    fn omega_examples() {
        assert_eq!(omega_units(-4).unwrap(), 4);
        assert_eq!(omega_units(-3).unwrap(), 6);
        assert_eq!(omega_units(-163).unwrap(), 2);
    }

    #[test]
    fn l1_imag_examples() {
        assert!((dirichlet_l1(-8).unwrap() - PI / (2.0 * 2f64.sqrt())).abs() < 1e-15);
        assert!((dirichlet_l1(-4).unwrap() - PI / 4.0).abs() < 1e-15);
    }

    #[test]
    fn real_units() {
        let q5 = real_quad_data(5).unwrap();
        assert!((q5.reg - ((1.0 + 5f64.sqrt()) / 2.0).ln()).abs() < 1e-14);
        assert_eq!((q5.h, q5.unit_norm), (1, -1));
        let q8 = real_quad_data(8).unwrap();
        assert!((q8.reg - (1.0 + 2f64.sqrt()).ln()).abs() < 1e-14);
        let q12 = real_quad_data(12).unwrap();
        assert!((q12.reg - (2.0 + 3f64.sqrt()).ln()).abs() < 1e-14);
        assert_eq!((q12.h, q12.h_plus, q12.unit_norm), (1, 2, 1));
        // Q(sqrt 10) and Q(sqrt 79) have class number 2 and 3
        assert_eq!(real_quad_data(40).unwrap().h, 2);
        assert_eq!(real_quad_data(316).unwrap().h, 3);
    }

    #[test]
    fn real_l1_routes_agree() {
        for d in [5i64, 8, 12, 13, 17, 21, 24, 28, 29, 33, 40, 316, 1001, 4001] {
            if !is_fundamental(d) {
                continue;
            }
            let a = l1_real_log_sine(d);
            let b = l1_real_theta(d);
            let q = real_quad_data(d).unwrap();
            let c = 2.0 * q.h as f64 * q.reg / (d as f64).sqrt();
            assert!((a - b).abs() < 1e-12, "D={d}: {a} {b}");
            assert!((a - c).abs() < 1e-11, "D={d}: {a} {c}");
        }
    }

    #[test]
    fn dirichlet_l_at_two() {
        // L(2, chi_{-4}) is Catalan's constant
        let v = dirichlet_l(-4, Complex64::new(2.0, 0.0)).unwrap();
        assert!((v.re - 0.915_965_594_177_219).abs() < 1e-13);
        let z = dirichlet_l(1, Complex64::new(2.0, 0.0)).unwrap();
        assert!((z.re - PI * PI / 6.0).abs() < 1e-13);
    }
}
