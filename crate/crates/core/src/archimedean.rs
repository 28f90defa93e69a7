//! Weight-k archimedean ingredients: the function P_k(s) and the limit
//! factor of an elliptic term at a real place.

use crate::error::{Error, Result};
use crate::special::ln_gamma;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Inputs of [`arch_limit_factor`] at one real place.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ArchFactorInput {
    /// Half the weight, at least 1.
    pub k: u32,
    /// Embedding of u N, positive.
    pub n_emb: f64,
    /// Embedding of n u N.
    pub t_emb: f64,
    /// Embedding of (n u N)^2 - 4 u N, at most 0.
    pub delta_emb: f64,
}

impl ArchFactorInput {
    /// Builds the input from the embeddings of N and nN, deriving delta.
    pub fn from_embeddings(k: u32, n_emb: f64, t_emb: f64) -> Self {
        ArchFactorInput { k, n_emb, t_emb, delta_emb: t_emb * t_emb - 4.0 * n_emb }
    }
}

fn is_nonpositive_integer(z: Complex64) -> bool {
    z.im == 0.0 && z.re <= 0.0 && z.re.fract() == 0.0
}

fn binomial(n: u32, k: u32) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// P_k(s) = sum_{j=0}^k (-1)^j C(2k, 2j) Gamma(s+k+j-1/2) Gamma(k-j+1/2) / Gamma(s+2k).
pub fn p_k(k: u32, s: Complex64) -> Result<Complex64> {
    if k == 0 {
        return Err(Error::InvalidArgument("k must be at least 1".into()));
    }
    if is_nonpositive_integer(s + 2.0 * k as f64) {
        return Err(Error::InvalidArgument(format!("s = {s} is a pole of 1/Gamma(s + 2k) handling")));
    }
    let lg_den = ln_gamma(s + 2.0 * k as f64);
    let mut acc = Complex64::new(0.0, 0.0);
    for j in 0..=k {
        let arg = s + (k + j) as f64 - 0.5;
        if is_nonpositive_integer(arg) {
            return Err(Error::InvalidArgument(format!("s = {s} is a pole of Gamma(s + k + j - 1/2)")));
        }
        let lg = ln_gamma(arg) + ln_gamma(Complex64::new((k - j) as f64 + 0.5, 0.0)) - lg_den;
        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
        acc += sign * binomial(2 * k, 2 * j) * lg.exp();
    }
    Ok(acc)
}

/// Nodes and weights of the 10-point Gauss-Legendre rule on [-1, 1] (positive half).
const GL10: [(f64, f64); 5] = [
    (0.148_874_338_981_631_21, 0.295_524_224_714_752_87),
    (0.433_395_394_129_247_19, 0.269_266_719_309_996_36),
    (0.679_409_568_299_024_41, 0.219_086_362_515_982_04),
    (0.865_063_366_688_984_51, 0.149_451_349_150_580_59),
    (0.973_906_528_517_171_72, 0.066_671_344_308_688_14),
];

/// Composite 10-point Gauss-Legendre quadrature of a complex integrand on [a, b].
pub fn gauss_legendre(f: impl Fn(f64) -> Complex64, a: f64, b: f64, panels: usize) -> Complex64 {
    let h = (b - a) / panels as f64;
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..panels {
        let mid = a + (i as f64 + 0.5) * h;
        let half = h / 2.0;
        let mut panel = Complex64::new(0.0, 0.0);
        for &(x, wt) in &GL10 {
            panel += wt * (f(mid - half * x) + f(mid + half * x));
        }
        acc += panel * half;
    }
    acc
}

/// Quadrature of int_{-X}^{X} (x - i)^(-2k) (x^2 + 1)^(-s) dx with X chosen so
/// that the omitted tail, at most X^(1-2k-2Re s)/(2k+2Re s-1) on each side,
/// is below `tail_tol`. Returns (value, X).
pub fn p_k_quadrature(k: u32, s: Complex64, tail_tol: f64) -> Result<(Complex64, f64)> {
    let expo = 2.0 * k as f64 + 2.0 * s.re - 1.0;
    if expo <= 0.0 {
        return Err(Error::InvalidArgument("integral diverges".into()));
    }
    // X^(-expo)/expo < tail_tol / 2
    let x_max = (2.0 / (tail_tol * expo)).powf(1.0 / expo).max(4.0);
    let i = Complex64::new(0.0, 1.0);
    let f = |x: f64| (Complex64::new(x, 0.0) - i).powi(-2 * k as i32) * Complex64::new(x * x + 1.0, 0.0).powc(-s);
    let panels = (x_max * 40.0).ceil() as usize;
    Ok((gauss_legendre(f, -x_max, x_max, panels), x_max))
}

/// The limit factor (4N)^k / (2 pi) Re((sqrt|Delta| + i t)^(1-2k)) at one real place,
/// evaluated in polar form so that large k cannot overflow.
pub fn arch_limit_factor(input: ArchFactorInput) -> Result<f64> {
    let ArchFactorInput { k, n_emb, t_emb, delta_emb } = input;
    if k == 0 {
        return Err(Error::InvalidArgument("k must be at least 1".into()));
    }
    if n_emb <= 0.0 {
        return Err(Error::InvalidArgument(format!("embedding of uN = {n_emb} must be positive")));
    }
    if delta_emb > 0.0 {
        return Err(Error::InvalidArgument(format!("delta = {delta_emb} must be at most 0")));
    }
    let expect = t_emb * t_emb - 4.0 * n_emb;
    if (delta_emb - expect).abs() > 1e-12 * expect.abs().max(1.0) {
        return Err(Error::InvalidArgument(format!("delta = {delta_emb} differs from t^2 - 4N = {expect}")));
    }
    let re = delta_emb.abs().sqrt();
    let modulus = re.hypot(t_emb);
    let theta = t_emb.atan2(re);
    let m = 2.0 * k as f64 - 1.0;
    let log_mag = k as f64 * (4.0 * n_emb).ln() - m * modulus.ln();
    Ok(log_mag.exp() * (m * theta).cos() / (2.0 * PI))
}
