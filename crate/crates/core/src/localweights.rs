//! Local non-archimedean factors at a single prime.
//!
//! Conventions: `q` is the residue cardinality and `s` the local variable
//! with Z = q^s, so the global argument is w = s + 1/2. Volume prefactors are
//! stripped here and re-inserted once by the bias assembly.

use crate::basefield::{self, FieldTag, RingElement};
use crate::error::{Error, Result};
use num_complex::Complex64;
use num_rational::Ratio;
use serde::{Deserialize, Serialize};

/// Arguments of the Rankin-Selberg weight.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LocalWeightQuery {
    /// Residue cardinality, at least 2.
    pub q: u64,
    /// Lattice depth.
    pub r: u32,
    /// +1 split, -1 unramified (inert), 0 ramified.
    pub eta: i32,
    pub s: Complex64,
}

fn check_query(q: u64, eta: i32) -> Result<()> {
    if q < 2 {
        return Err(Error::InvalidArgument(format!("residue norm q = {q} must be at least 2")));
    }
    if !(-1..=1).contains(&eta) {
        return Err(Error::InvalidArgument(format!("eta = {eta} must lie in {{-1, 0, 1}}")));
    }
    Ok(())
}

/// L_p(1, eta): (1 + 1/q)^-1 inert, 1 ramified, (1 - 1/q)^-1 split.
pub fn local_l1(q: f64, eta: i32) -> f64 {
    1.0 / (1.0 - eta as f64 / q)
}

/// Chebyshev-type values U_0, ..., U_m with U_m = (Z^m - Z^-m)/(Z - Z^-1),
/// generated by U_{j+1} = (Z + 1/Z) U_j - U_{j-1}.
fn u_recurrence(z: Complex64, m: usize) -> Vec<Complex64> {
    let t = z + z.inv();
    let mut u = vec![Complex64::new(0.0, 0.0); m + 1];
    if m >= 1 {
        u[1] = Complex64::new(1.0, 0.0);
    }
    for j in 1..m {
        u[j + 1] = t * u[j] - u[j - 1];
    }
    u
}

fn u_signed(u: &[Complex64], m: i64) -> Complex64 {
    if m < 0 {
        -u[(-m) as usize]
    } else {
        u[m as usize]
    }
}

/// Coefficients (a_i, e_i) of A(Z) = sum a_i Z^e_i, where the weight for
/// r >= 1 reads [A(Z)(q^(1/2) Z)^r - A(1/Z)(q^(1/2)/Z)^r] / (Z - 1/Z).
fn weight_poly(q: f64, eta: i32) -> Vec<(f64, i64)> {
    let rq = q.powf(-0.5);
    match eta {
        -1 => vec![(1.0, 1), (-1.0 / q, -1)],
        0 => vec![(1.0, 1), (-rq, 0)],
        _ => vec![(1.0, 1), (1.0 / q, -1), (-2.0 * rq, 0)],
    }
}

/// L_p(1, eta) wt(s; r, E/F) / Vol(GL_2(o)), the displayed case formula,
/// in the telescoped form q^(r/2) sum_i a_i U_{e_i + r}(Z).
pub fn rs_weight_displayed(query: LocalWeightQuery) -> Result<Complex64> {
    check_query(query.q, query.eta)?;
    let q = query.q as f64;
    if query.r == 0 {
        return Ok(Complex64::new(local_l1(q, query.eta), 0.0));
    }
    let z = Complex64::new(q, 0.0).powc(query.s);
    let r = query.r as i64;
    let u = u_recurrence(z, query.r as usize + 2);
    let sum: Complex64 = weight_poly(q, query.eta).iter().map(|&(a, e)| a * u_signed(&u, e + r)).sum();
    Ok(q.powf(r as f64 / 2.0) * sum)
}

/// wt(s; r, E/F) / Vol(GL_2(o)); equal to 1 at r = 0.
pub fn rs_weight(query: LocalWeightQuery) -> Result<Complex64> {
    Ok(rs_weight_displayed(query)? / local_l1(query.q as f64, query.eta))
}

/// The displayed case formula evaluated literally as a quotient by Z - 1/Z.
/// Used only to cross-check [`rs_weight_displayed`] away from |Z| = 1.
pub fn rs_weight_quotient(query: LocalWeightQuery) -> Result<Complex64> {
    check_query(query.q, query.eta)?;
    let q = query.q as f64;
    if query.r == 0 {
        return Ok(Complex64::new(local_l1(q, query.eta), 0.0));
    }
    let z = Complex64::new(q, 0.0).powc(query.s);
    let zi = z.inv();
    let den = z - zi;
    if den.norm() < 1e-8 {
        return Err(Error::InvalidArgument("quotient form is singular at Z = +-1".into()));
    }
    let c = q.sqrt();
    let rq = 1.0 / c;
    let (a_z, a_zi) = match query.eta {
        -1 => (z - zi / q, zi - z / q),
        0 => (z - rq, zi - rq),
        _ => (z + zi / q - 2.0 * rq, zi + z / q - 2.0 * rq),
    };
    let r = query.r as i32;
    Ok((a_z * (c * z).powi(r) - a_zi * (c * zi).powi(r)) / den)
}

/// Exact rational value of [`rs_weight_displayed`] when q = c^2 is a perfect
/// square and Z is rational.
pub fn rs_weight_displayed_exact(c: i64, r: u32, eta: i32, z: Ratio<i128>) -> Result<Ratio<i128>> {
    let q = c * c;
    check_query(q as u64, eta)?;
    let qr = Ratio::from_integer(q as i128);
    let cr = Ratio::from_integer(c as i128);
    if r == 0 {
        let one = Ratio::from_integer(1);
        return Ok(one / (one - Ratio::from_integer(eta as i128) / qr));
    }
    let zi = z.recip();
    let (a_z, a_zi) = match eta {
        -1 => (z - zi / qr, zi - z / qr),
        0 => (z - cr.recip(), zi - cr.recip()),
        _ => (z + zi / qr - Ratio::from_integer(2) / cr, zi + z / qr - Ratio::from_integer(2) / cr),
    };
    let den = z - zi;
    if den == Ratio::from_integer(0) {
        return Err(Error::InvalidArgument("exact form needs Z != +-1".into()));
    }
    let r = r as i32;
    Ok((a_z * (cr * z).pow(r) - a_zi * (cr * zi).pow(r)) / den)
}

/// q^(-as) [U_{a+1}(Z) - eta q^(-1/2) U_a(Z)] with Z = q^s, the unramified
/// local factor at conductor exponent a (zeta_E and volume stripped).
pub fn unram_local_factor(q: u64, a: u32, eta: i32, s: Complex64) -> Result<Complex64> {
    check_query(q, eta)?;
    let qf = q as f64;
    let z = Complex64::new(qf, 0.0).powc(s);
    let u = u_recurrence(z, a as usize + 1);
    let bracket = u[a as usize + 1] - eta as f64 * qf.powf(-0.5) * u[a as usize];
    Ok(z.powi(-(a as i32)) * bracket)
}

/// Exact rational value of [`unram_local_factor`] for q = c^2 and rational Z.
pub fn unram_local_factor_exact(c: i64, a: u32, eta: i32, z: Ratio<i128>) -> Result<Ratio<i128>> {
    check_query((c * c) as u64, eta)?;
    let zi = z.recip();
    let t = z + zi;
    let mut u = vec![Ratio::from_integer(0i128); a as usize + 2];
    u[1] = Ratio::from_integer(1);
    for j in 1..=a as usize {
        u[j + 1] = t * u[j] - u[j - 1];
    }
    let bracket = u[a as usize + 1] - Ratio::new(eta as i128, c as i128) * u[a as usize];
    Ok(zi.pow(a as i32) * bracket)
}

/// The local constituent of A(n, N) at a prime of norm q dividing the level:
/// q - 1 when n lies in the prime (times J), -1 otherwise.
pub fn ramified_level_constant(q: u64, n_div: bool) -> i64 {
    if n_div {
        q as i64 - 1
    } else {
        -1
    }
}

/// A(n, N) = product over primes p | N of [`ramified_level_constant`].
pub fn a_factor(tag: FieldTag, n: RingElement, level: u64) -> Result<i64> {
    basefield::check_level(tag, level)?;
    Ok(basefield::primes_dividing(tag, level)
        .iter()
        .map(|pr| ramified_level_constant(pr.norm(), basefield::in_prime(tag, n, pr)))
        .product())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn query(q: u64, r: u32, eta: i32, s: f64) -> LocalWeightQuery {
        LocalWeightQuery { q, r, eta, s: Complex64::new(s, 0.0) }
    }

    #[test]
    fn weight_at_depth_zero_is_one() {
        for eta in -1..=1 {
            assert_eq!(rs_weight(query(7, 0, eta, 0.3)).unwrap(), Complex64::new(1.0, 0.0));
        }
    }

    #[test]
    fn ramified_weight_q9() {
        let v = rs_weight_displayed(query(9, 1, 0, 0.5)).unwrap();
        assert!((v.re - 9.0).abs() < 1e-12 && v.im.abs() < 1e-12);
        let e = rs_weight_displayed_exact(3, 1, 0, Ratio::from_integer(3)).unwrap();
        assert_eq!(e, Ratio::from_integer(9));
    }

    #[test]
    fn split_weight_q4_exact() {
        // q = 4, s = 1/2, Z = 2: A(1/Z) = 1/2 + 1/2 - 1 vanishes, leaving A(Z)(2Z)/(Z - 1/Z).
        let e = rs_weight_displayed_exact(2, 1, 1, Ratio::from_integer(2)).unwrap();
        assert_eq!(e, Ratio::from_integer(3));
        let v = rs_weight_displayed(query(4, 1, 1, 0.5)).unwrap();
        assert!((v.re - 3.0).abs() < 1e-12);
    }

    #[test]
    fn unram_examples() {
        let half = Complex64::new(0.5, 0.0);
        assert!((unram_local_factor(2, 1, -1, half).unwrap().re - 2.0).abs() < 1e-14);
        assert!((unram_local_factor(2, 1, 1, half).unwrap().re - 1.0).abs() < 1e-14);
        for eta in -1..=1 {
            assert!((unram_local_factor(5, 0, eta, Complex64::new(0.9, 0.4)).unwrap() - 1.0).norm() < 1e-15);
        }
        let e = unram_local_factor_exact(3, 2, -1, Ratio::from_integer(3)).unwrap();
        let f = unram_local_factor(9, 2, -1, half).unwrap();
        assert!((f.re - *e.numer() as f64 / *e.denom() as f64).abs() < 1e-13);
    }

    #[test]
    fn level_constants() {
        assert_eq!(ramified_level_constant(3, true), 2);
        assert_eq!(ramified_level_constant(3, false), -1);
        assert_eq!(ramified_level_constant(9, true), 8);
        assert_eq!(a_factor(FieldTag::Qsqrt2, RingElement::ZERO, 7).unwrap(), 36);
        assert_eq!(a_factor(FieldTag::Qsqrt2, RingElement::ONE, 3).unwrap(), -1);
        assert_eq!(a_factor(FieldTag::Q, RingElement::rational(5), 15).unwrap(), -4);
    }
}
