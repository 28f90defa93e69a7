//! The three supported base fields Q, Q(sqrt 2) and Q(sqrt 5).
//!
//! Elements of the ring of integers are pairs (a, b) standing for a + b w,
//! with w = sqrt 2 or w = (1 + sqrt 5)/2. Every supported field is a PID with
//! narrow class number one, so prime ideals are carried by a generator.
//!
//! The module also holds the local analysis of quadratic extensions
//! E = F(sqrt delta): valuations, residue symbols, the 2-adic square-class
//! exhaustion and the relative discriminant, plus L(1, eta_{E/F}) for
//! biquadratic E.

use crate::error::{Error, Result};
use crate::quadarith::{self, field_discriminant, is_square, squarefree_kernel};
use num_rational::Ratio;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::fmt;
use std::sync::OnceLock;

/// Which of the supported base fields.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum FieldTag {
    Q,
    Qsqrt2,
    Qsqrt5,
}

impl FieldTag {
    /// All supported fields.
    pub const ALL: [FieldTag; 3] = [FieldTag::Q, FieldTag::Qsqrt2, FieldTag::Qsqrt5];

    /// Degree over Q.
    pub fn degree(self) -> usize {
        match self {
            FieldTag::Q => 1,
            _ => 2,
        }
    }

    /// Absolute discriminant D_F.
    pub fn disc(self) -> i64 {
        match self {
            FieldTag::Q => 1,
            FieldTag::Qsqrt2 => 8,
            FieldTag::Qsqrt5 => 5,
        }
    }

    /// The square-free m with F = Q(sqrt m), or 1 for Q.
    pub fn radicand(self) -> i64 {
        match self {
            FieldTag::Q => 1,
            FieldTag::Qsqrt2 => 2,
            FieldTag::Qsqrt5 => 5,
        }
    }

    /// The rational prime that ramifies in F, if any.
    pub fn ramified_prime(self) -> Option<u64> {
        match self {
            FieldTag::Q => None,
            FieldTag::Qsqrt2 => Some(2),
            FieldTag::Qsqrt5 => Some(5),
        }
    }

    /// Short name used in reports and on the command line.
    pub fn name(self) -> &'static str {
        match self {
            FieldTag::Q => "Q",
            FieldTag::Qsqrt2 => "Qsqrt2",
            FieldTag::Qsqrt5 => "Qsqrt5",
        }
    }

    /// Parse a command-line field tag.
    pub fn parse(s: &str) -> Option<FieldTag> {
        match s {
            "Q" => Some(FieldTag::Q),
            "Qsqrt2" => Some(FieldTag::Qsqrt2),
            "Qsqrt5" => Some(FieldTag::Qsqrt5),
            _ => None,
        }
    }
}

impl fmt::Display for FieldTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Constants of a supported base field.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BaseFieldDescriptor {
    pub tag: FieldTag,
    pub degree: usize,
    pub disc: i64,
    pub ring_generator: &'static str,
    /// Norm of the fundamental unit (None for Q).
    pub fundamental_unit_norm: Option<i32>,
    /// Totally positive units modulo squares.
    pub u2: Vec<RingElement>,
}

/// The descriptor of a supported field.
pub fn descriptor(tag: FieldTag) -> BaseFieldDescriptor {
    let (ring_generator, fundamental_unit_norm) = match tag {
        FieldTag::Q => ("1", None),
        FieldTag::Qsqrt2 => ("sqrt2", Some(RingElement::new(1, 1).norm(tag) as i32)),
        FieldTag::Qsqrt5 => ("(1+sqrt5)/2", Some(RingElement::new(0, 1).norm(tag) as i32)),
    };
    BaseFieldDescriptor {
        tag,
        degree: tag.degree(),
        disc: tag.disc(),
        ring_generator,
        fundamental_unit_norm,
        u2: enumerate_units_u2(tag),
    }
}

/// Representatives of totally positive units modulo squares of units.
///
/// The group of units is {+-1} x eps^Z. A unit +-eps^j is totally positive
/// exactly when it is positive at both embeddings; modulo squares only
/// j in {0, 1} and both signs matter, so those four candidates are tested.
pub fn enumerate_units_u2(tag: FieldTag) -> Vec<RingElement> {
    let eps = match tag {
        FieldTag::Q => return vec![RingElement::ONE],
        FieldTag::Qsqrt2 => RingElement::new(1, 1),
        FieldTag::Qsqrt5 => RingElement::new(0, 1),
    };
    let candidates = [RingElement::ONE, RingElement::new(-1, 0), eps, eps.neg()];
    candidates.into_iter().filter(|u| u.is_totally_positive(tag)).collect()
}

/// An element a + b w of the ring of integers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct RingElement {
    pub a: i64,
    pub b: i64,
}

/// Sign of u + v sqrt(m) for m > 1 square-free, computed exactly.
fn sign_surd(u: i64, v: i64, m: i64) -> i32 {
    let su = u.signum() as i32;
    let sv = v.signum() as i32;
    if su == 0 {
        return sv;
    }
    if sv == 0 || su == sv {
        return su;
    }
    let lhs = (u as i128) * (u as i128);
    let rhs = (m as i128) * (v as i128) * (v as i128);
    if lhs > rhs {
        su
    } else {
        sv
    }
}

impl RingElement {
    pub const ZERO: RingElement = RingElement { a: 0, b: 0 };
    pub const ONE: RingElement = RingElement { a: 1, b: 0 };

    pub const fn new(a: i64, b: i64) -> Self {
        RingElement { a, b }
    }

    /// The rational integer n.
    pub const fn rational(n: i64) -> Self {
        RingElement { a: n, b: 0 }
    }

    pub fn is_zero(self) -> bool {
        self.a == 0 && self.b == 0
    }

    pub fn is_rational(self) -> bool {
        self.b == 0
    }

    pub fn neg(self) -> Self {
        RingElement::new(-self.a, -self.b)
    }

    pub fn add(self, o: Self) -> Self {
        RingElement::new(self.a + o.a, self.b + o.b)
    }

    pub fn sub(self, o: Self) -> Self {
        RingElement::new(self.a - o.a, self.b - o.b)
    }

    pub fn scale(self, k: i64) -> Self {
        RingElement::new(self.a * k, self.b * k)
    }

    /// Product in the ring of integers of `tag`.
    pub fn mul(self, o: Self, tag: FieldTag) -> Self {
        let (a1, b1, a2, b2) = (self.a, self.b, o.a, o.b);
        match tag {
            FieldTag::Q => RingElement::new(a1 * a2, 0),
            FieldTag::Qsqrt2 => RingElement::new(a1 * a2 + 2 * b1 * b2, a1 * b2 + a2 * b1),
            FieldTag::Qsqrt5 => RingElement::new(a1 * a2 + b1 * b2, a1 * b2 + a2 * b1 + b1 * b2),
        }
    }

    /// Galois conjugate.
    pub fn conj(self, tag: FieldTag) -> Self {
        match tag {
            FieldTag::Q => self,
            FieldTag::Qsqrt2 => RingElement::new(self.a, -self.b),
            FieldTag::Qsqrt5 => RingElement::new(self.a + self.b, -self.b),
        }
    }

    /// Absolute norm.
    pub fn norm(self, tag: FieldTag) -> i64 {
        let (a, b) = (self.a, self.b);
        match tag {
            FieldTag::Q => a,
            FieldTag::Qsqrt2 => a * a - 2 * b * b,
            FieldTag::Qsqrt5 => a * a + a * b - b * b,
        }
    }

    /// Exact quotient self / d when it lies in the ring, else None.
    pub fn div_exact(self, d: Self, tag: FieldTag) -> Option<Self> {
        if tag == FieldTag::Q {
            return (d.a != 0 && self.a % d.a == 0).then(|| RingElement::rational(self.a / d.a));
        }
        let n = d.norm(tag);
        if n == 0 {
            return None;
        }
        let num = self.mul(d.conj(tag), tag);
        if num.a % n == 0 && num.b % n == 0 {
            Some(RingElement::new(num.a / n, num.b / n))
        } else {
            None
        }
    }

    /// Real embeddings (one for Q, two for quadratic fields) as floats.
    pub fn embeddings(self, tag: FieldTag) -> Vec<f64> {
        let (a, b) = (self.a as f64, self.b as f64);
        match tag {
            FieldTag::Q => vec![a],
            FieldTag::Qsqrt2 => {
                let r = 2f64.sqrt();
                vec![a + b * r, a - b * r]
            }
            FieldTag::Qsqrt5 => {
                let r = 5f64.sqrt();
                vec![a + b * (1.0 + r) / 2.0, a + b * (1.0 - r) / 2.0]
            }
        }
    }

    /// Exact signs at the real embeddings, in the order of [`Self::embeddings`].
    pub fn embedding_signs(self, tag: FieldTag) -> Vec<i32> {
        match tag {
            FieldTag::Q => vec![self.a.signum() as i32],
            FieldTag::Qsqrt2 => vec![sign_surd(self.a, self.b, 2), sign_surd(self.a, -self.b, 2)],
            FieldTag::Qsqrt5 => {
                // a + b(1 +- sqrt5)/2 has the sign of (2a + b) +- b sqrt5
                let u = 2 * self.a + self.b;
                vec![sign_surd(u, self.b, 5), sign_surd(u, -self.b, 5)]
            }
        }
    }

    pub fn is_totally_positive(self, tag: FieldTag) -> bool {
        self.embedding_signs(tag).iter().all(|&s| s > 0)
    }

    pub fn is_totally_negative(self, tag: FieldTag) -> bool {
        self.embedding_signs(tag).iter().all(|&s| s < 0)
    }

    /// True iff the element is the square of an element of F.
    pub fn is_square_in(self, tag: FieldTag) -> bool {
        if self.is_zero() {
            return true;
        }
        match tag {
            FieldTag::Q => is_square(self.a),
            _ => {
                // x = y^2 forces Nr(x) to be a rational square and x totally nonnegative;
                // then search y among elements with Nr(y)^2 = Nr(x).
                let n = self.norm(tag);
                if !is_square(n) || !self.is_totally_positive(tag) {
                    return false;
                }
                let bound = (self.embeddings(tag).iter().fold(0f64, |m, v| m.max(v.abs()))).sqrt().ceil() as i64 + 2;
                for b in -bound..=bound {
                    for a in -2 * bound..=2 * bound {
                        let y = RingElement::new(a, b);
                        if y.mul(y, tag) == self {
                            return true;
                        }
                    }
                }
                false
            }
        }
    }
}

impl fmt::Display for RingElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.b == 0 {
            write!(f, "{}", self.a)
        } else {
            write!(f, "{}{:+}w", self.a, self.b)
        }
    }
}

/// How a rational prime decomposes in F.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SplitType {
    /// F = Q: the prime itself.
    Rational,
    Split,
    Inert,
    Ramified,
}

/// A prime ideal of the ring of integers, carried by a generator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PrimeIdeal {
    /// The rational prime below.
    pub p: u64,
    /// Residue degree.
    pub f: u32,
    /// Ramification index.
    pub e: u32,
    /// A generator of the ideal.
    pub gen: RingElement,
    /// For residue degree 1: the image r of w in Z/p (w = r mod the prime).
    pub root: u64,
}

impl PrimeIdeal {
    /// Absolute norm q = p^f.
    pub fn norm(&self) -> u64 {
        self.p.pow(self.f)
    }
}

/// The decomposition shape of p in F, from the congruence rules.
pub fn split_type(tag: FieldTag, p: u64) -> SplitType {
    match tag {
        FieldTag::Q => SplitType::Rational,
        FieldTag::Qsqrt2 => match p % 8 {
            _ if p == 2 => SplitType::Ramified,
            1 | 7 => SplitType::Split,
            _ => SplitType::Inert,
        },
        FieldTag::Qsqrt5 => match p % 5 {
            0 => SplitType::Ramified,
            1 | 4 => SplitType::Split,
            _ => SplitType::Inert,
        },
    }
}

fn mod_inv(a: u64, p: u64) -> u64 {
    pow_mod(a % p, p - 2, p)
}

/// a^e mod m.
pub fn pow_mod(mut a: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1u64 % m;
    a %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = ((r as u128 * a as u128) % m as u128) as u64;
        }
        a = ((a as u128 * a as u128) % m as u128) as u64;
        e >>= 1;
    }
    r
}

/// Find an element of norm +-p by a bounded search (fields are norm-Euclidean).
fn element_of_norm(tag: FieldTag, p: u64) -> RingElement {
    let p = p as i64;
    let mut bound = 1i64;
    loop {
        for b in 1..=bound {
            for a in -bound..=bound {
                let x = RingElement::new(a, b);
                if x.norm(tag).abs() == p {
                    return x;
                }
            }
        }
        bound *= 2;
    }
}

/// The primes of F above the rational prime p, sorted.
pub fn primes_above(tag: FieldTag, p: u64) -> Vec<PrimeIdeal> {
    let inert = |p| PrimeIdeal { p, f: 2, e: 1, gen: RingElement::rational(p as i64), root: 0 };
    let deg_one = |gen: RingElement, e: u32| {
        let (a, b) = (gen.a.rem_euclid(p as i64) as u64, gen.b.rem_euclid(p as i64) as u64);
        // a + b r = 0 mod p
        let root = ((p - a) % p * mod_inv(b, p)) % p;
        PrimeIdeal { p, f: 1, e, gen, root }
    };
    let mut out = match split_type(tag, p) {
        SplitType::Rational => {
            vec![PrimeIdeal { p, f: 1, e: 1, gen: RingElement::rational(p as i64), root: 0 }]
        }
        SplitType::Inert => vec![inert(p)],
        SplitType::Ramified => vec![deg_one(element_of_norm(tag, p), 2)],
        SplitType::Split => {
            let g = element_of_norm(tag, p);
            vec![deg_one(g, 1), deg_one(g.conj(tag), 1)]
        }
    };
    out.sort();
    out
}

/// All primes of F dividing the nonzero rational integer n, sorted.
pub fn primes_dividing(tag: FieldTag, n: u64) -> Vec<PrimeIdeal> {
    let mut out: Vec<PrimeIdeal> =
        quadarith::factorize(n).into_iter().flat_map(|(p, _)| primes_above(tag, p)).collect();
    out.sort();
    out
}

/// True iff x lies in the prime ideal.
pub fn in_prime(tag: FieldTag, x: RingElement, pr: &PrimeIdeal) -> bool {
    let p = pr.p as i64;
    if tag == FieldTag::Q {
        return x.a % p == 0;
    }
    if pr.f == 2 {
        return x.a % p == 0 && x.b % p == 0;
    }
    (x.a.rem_euclid(p) + x.b.rem_euclid(p) * pr.root as i64) % p == 0
}

/// Valuation of a nonzero element at a prime, and the cofactor x / gen^v.
pub fn valuation(tag: FieldTag, x: RingElement, pr: &PrimeIdeal) -> (u32, RingElement) {
    assert!(!x.is_zero(), "valuation of zero");
    let mut v = 0;
    let mut y = x;
    while in_prime(tag, y, pr) {
        y = y.div_exact(pr.gen, tag).expect("element of a principal prime is divisible by its generator");
        v += 1;
    }
    (v, y)
}

/// Image of x in the residue field, for an odd prime.
///
/// Returns (c0, c1) with the residue c0 + c1 w in F_p[w]; c1 = 0 for degree-one primes.
fn residue(tag: FieldTag, x: RingElement, pr: &PrimeIdeal) -> (u64, u64) {
    let p = pr.p as i64;
    if tag == FieldTag::Q {
        return (x.a.rem_euclid(p) as u64, 0);
    }
    if pr.f == 1 {
        let r = (x.a.rem_euclid(p) + x.b.rem_euclid(p) * pr.root as i64) % p;
        return (r as u64, 0);
    }
    (x.a.rem_euclid(p) as u64, x.b.rem_euclid(p) as u64)
}

/// Quadratic residue symbol of a unit at an odd prime: +1 square, -1 non-square.
pub fn residue_symbol(tag: FieldTag, x: RingElement, pr: &PrimeIdeal) -> i32 {
    assert!(pr.p % 2 == 1, "residue_symbol needs an odd prime");
    let p = pr.p;
    let (c0, c1) = residue(tag, x, pr);
    assert!(c0 != 0 || c1 != 0, "residue_symbol of a non-unit");
    if pr.f == 1 {
        let e = pow_mod(c0, (p - 1) / 2, p);
        return if e == 1 { 1 } else { -1 };
    }
    // F_{p^2} = F_p[w], w^2 = 2 or w^2 = w + 1
    let mulf = |x: (u64, u64), y: (u64, u64)| -> (u64, u64) {
        let (a, b, c, d) = (x.0 as u128, x.1 as u128, y.0 as u128, y.1 as u128);
        let pp = p as u128;
        let bd = b * d % pp;
        let (re, im) = match tag {
            FieldTag::Qsqrt2 => ((a * c + 2 * bd) % pp, (a * d + b * c) % pp),
            FieldTag::Qsqrt5 => ((a * c + bd) % pp, (a * d + b * c + bd) % pp),
            FieldTag::Q => unreachable!(),
        };
        (re as u64, im as u64)
    };
    let mut e = (p * p - 1) / 2;
    let mut base = (c0, c1);
    let mut acc = (1u64, 0u64);
    while e > 0 {
        if e & 1 == 1 {
            acc = mulf(acc, base);
        }
        base = mulf(base, base);
        e >>= 1;
    }
    if acc == (1, 0) {
        1
    } else {
        -1
    }
}

/// Local behaviour of F(sqrt delta)/F at one prime.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LocalExtension {
    pub prime: PrimeIdeal,
    /// ord of delta at the prime.
    pub ord_delta: u32,
    /// Exponent of the prime in the relative discriminant.
    pub disc_exp: u32,
    /// +1 split, -1 inert, 0 ramified.
    pub eta: i32,
}

impl LocalExtension {
    /// Exponent of the prime in l, where delta = D_{E/F} l^2 locally.
    ///
    /// Negative only above 2, when delta is not a discriminant (not a square modulo 4).
    pub fn l_exp(&self) -> i32 {
        (self.ord_delta as i32 - self.disc_exp as i32) / 2
    }
}

/// Squares of units of the ring of integers modulo 2^5, as (a, b) residue pairs.
fn unit_squares_mod32(tag: FieldTag) -> &'static [(i64, i64)] {
    static CACHE: [OnceLock<Vec<(i64, i64)>>; 3] = [OnceLock::new(), OnceLock::new(), OnceLock::new()];
    let idx = tag as usize;
    CACHE[idx].get_or_init(|| {
        let pr = primes_above(tag, 2)[0];
        let bmax = if tag == FieldTag::Q { 1 } else { 32 };
        let mut out = Vec::new();
        for a in 0..32 {
            for b in 0..bmax {
                let x = RingElement::new(a, b);
                if in_prime(tag, x, &pr) {
                    continue;
                }
                let sq = x.mul(x, tag);
                out.push((sq.a.rem_euclid(32), sq.b.rem_euclid(32)));
            }
        }
        out.sort_unstable();
        out.dedup();
        out
    })
}

/// Valuation at the prime above 2 of an element known modulo 2^5, capped at the precision.
fn val2_mod32(tag: FieldTag, a: i64, b: i64) -> u32 {
    let v2 = |n: i64| if n.rem_euclid(32) == 0 { 5 } else { n.rem_euclid(32).trailing_zeros() };
    match tag {
        FieldTag::Q => v2(a),
        FieldTag::Qsqrt5 => v2(a).min(v2(b)),
        // pi = sqrt 2: v(a + b sqrt2) = min(2 v2(a), 2 v2(b) + 1), known up to 10
        FieldTag::Qsqrt2 => (2 * v2(a)).min(2 * v2(b) + 1).min(10),
    }
}

/// Largest j such that the unit u is congruent to a unit square modulo pi^j,
/// found by exhaustion over the unit squares modulo 2^5 (capped at 5e).
pub fn square_depth_at_2(tag: FieldTag, u: RingElement) -> u32 {
    unit_squares_mod32(tag)
        .iter()
        .map(|&(sa, sb)| val2_mod32(tag, u.a - sa, u.b - sb))
        .max()
        .unwrap_or(0)
}

/// Local analysis of F(sqrt delta)/F at a prime.
///
/// Odd primes: ramified iff ord is odd, otherwise the residue symbol of the
/// unit part decides split or inert. Primes above 2: with e the ramification
/// index and k the square depth of the unit part, k >= 2e+1 means a square
/// (Hensel), k = 2e unramified non-square, and k < 2e ramified with
/// discriminant exponent 2e + 1 - k. Odd ord gives exponent 2e + 1.
pub fn local_extension(tag: FieldTag, delta: RingElement, pr: &PrimeIdeal) -> Result<LocalExtension> {
    let (ord, unit) = valuation(tag, delta, pr);
    if pr.p != 2 {
        let (disc_exp, eta) = if ord % 2 == 1 { (1, 0) } else { (0, residue_symbol(tag, unit, pr)) };
        return Ok(LocalExtension { prime: *pr, ord_delta: ord, disc_exp, eta });
    }
    let e = pr.e;
    if ord % 2 == 1 {
        return Ok(LocalExtension { prime: *pr, ord_delta: ord, disc_exp: 2 * e + 1, eta: 0 });
    }
    let k = square_depth_at_2(tag, unit);
    let (disc_exp, eta) = if k > 2 * e {
        (0, 1)
    } else if k == 2 * e {
        (0, -1)
    } else {
        if k % 2 == 0 {
            return Err(Error::Inconsistent(format!("even square depth {k} at 2 for {delta} over {tag}")));
        }
        (2 * e + 1 - k, 0)
    };
    Ok(LocalExtension { prime: *pr, ord_delta: ord, disc_exp, eta })
}

/// Relative discriminant D_{E/F} of E = F(sqrt delta) with its cofactor l.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RelDiscriminant {
    pub delta: RingElement,
    /// (prime, exponent in D_{E/F}), only primes with positive exponent.
    pub disc: Vec<(PrimeIdeal, u32)>,
    /// (prime, exponent in l), only primes with nonzero exponent.
    pub l: Vec<(PrimeIdeal, i32)>,
    /// Absolute norm of D_{E/F}.
    pub norm: u64,
    /// Local data at every prime dividing 2 delta.
    pub local: Vec<LocalExtension>,
}

/// Every prime of F dividing 2 * Nr(delta).
fn candidate_primes(tag: FieldTag, delta: RingElement) -> Vec<PrimeIdeal> {
    let n = delta.norm(tag).unsigned_abs() * 2;
    primes_dividing(tag, n)
}

/// Relative discriminant of F(sqrt delta)/F for a nonzero non-square delta.
pub fn rel_discriminant_of(tag: FieldTag, delta: RingElement) -> Result<RelDiscriminant> {
    if delta.is_zero() {
        return Err(Error::InvalidArgument("delta = 0".into()));
    }
    if delta.is_square_in(tag) {
        return Err(Error::SquareDelta(format!("{delta} over {tag}")));
    }
    let mut disc = Vec::new();
    let mut l = Vec::new();
    let mut local = Vec::new();
    let mut norm = 1u64;
    for pr in candidate_primes(tag, delta) {
        let le = local_extension(tag, delta, &pr)?;
        if (le.ord_delta + le.disc_exp) % 2 == 1 {
            return Err(Error::Inconsistent(format!(
                "discriminant exponent {} and ord {} differ in parity at {:?}",
                le.disc_exp, le.ord_delta, pr
            )));
        }
        if le.disc_exp > 0 {
            disc.push((pr, le.disc_exp));
            norm *= pr.norm().pow(le.disc_exp);
        }
        if le.l_exp() != 0 {
            l.push((pr, le.l_exp()));
        }
        local.push(le);
    }
    Ok(RelDiscriminant { delta, disc, l, norm, local })
}

/// Relative discriminant of F(sqrt(-4N))/F, the case used at n = 0.
pub fn rel_discriminant(tag: FieldTag, n: u64) -> Result<RelDiscriminant> {
    rel_discriminant_of(tag, RingElement::rational(-4 * n as i64))
}

/// Discriminants (D1, D2) of the two quadratic subfields of E = F(sqrt delta)
/// other than F, for rational non-square delta over quadratic F.
pub fn biquadratic_subfields(tag: FieldTag, delta: i64) -> Result<(i64, i64)> {
    let m = tag.radicand();
    if m == 1 {
        return Err(Error::InvalidArgument("biquadratic subfields need a quadratic base".into()));
    }
    let k1 = squarefree_kernel(delta);
    let k2 = squarefree_kernel(delta * m);
    if k1 == 1 || k2 == 1 {
        return Err(Error::SquareDelta(format!("{delta} over {tag}")));
    }
    Ok((field_discriminant(k1), field_discriminant(k2)))
}

/// Number of roots of unity in the biquadratic field with imaginary subfield discriminants d1, d2.
fn biquadratic_omega(d1: i64, d2: i64) -> u32 {
    let has = |d: i64| d1 == d || d2 == d;
    match (has(-4), has(-3), has(-8)) {
        (true, _, true) => 8,
        (_, true, _) => 6,
        (true, _, _) => 4,
        _ => 2,
    }
}

/// Data of the biquadratic extension E = F(sqrt(-N)) and its value L(1, eta_{E/F}).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BiquadExtData {
    /// E = F(sqrt(-n)).
    pub n: u64,
    pub d1: i64,
    pub d2: i64,
    /// Nr(D_{E/F}) = |D1 D2| / D_F.
    pub rel_disc_norm: u64,
    /// h_E / h_F = h(D1) h(D2) / 2.
    pub h_ratio: Ratio<u64>,
    pub omega_e: u32,
    pub l1: f64,
}

/// L(1, eta_{E/F}) for E = F(sqrt(-N)) over a quadratic base, through the
/// class number formula of E with the unit index lambda_0 = 2 and regulator
/// ratio R_E / R_F = 2.
///
/// The field Q(sqrt 2, i) = Q(zeta_8) is rejected: it carries eight roots of
/// unity and its unit index differs, so the formula above does not apply.
pub fn l1_eta_biquad(tag: FieldTag, n: u64) -> Result<BiquadExtData> {
    if tag == FieldTag::Q {
        return Err(Error::InvalidArgument("l1_eta_biquad needs a quadratic base field".into()));
    }
    if n == 0 {
        return Err(Error::InvalidArgument("N = 0".into()));
    }
    let (d1, d2) = biquadratic_subfields(tag, -(n as i64))?;
    let omega_e = biquadratic_omega(d1, d2);
    if omega_e == 8 {
        return Err(Error::UnsupportedExtension(format!(
            "F(sqrt(-{n})) = Q(zeta_8) over {tag}: unit index outside the supported class"
        )));
    }
    let h1 = quadarith::class_number_imag(d1)?;
    let h2 = quadarith::class_number_imag(d2)?;
    let df = tag.disc() as u64;
    let prod = d1.unsigned_abs() * d2.unsigned_abs();
    if prod % df != 0 {
        return Err(Error::Inconsistent(format!("D_F = {df} does not divide |D1 D2| = {prod}")));
    }
    let rel_disc_norm = prod / df;
    let h_ratio = Ratio::new(h1 * h2, 2);
    let abs_de = (df * prod) as f64;
    let l1 = PI * PI * (2.0 / omega_e as f64) * 2.0 * (h1 * h2) as f64 / 2.0 * (df as f64 / abs_de).sqrt();
    Ok(BiquadExtData { n, d1, d2, rel_disc_norm, h_ratio, omega_e, l1 })
}

/// L(1, eta_{E/F}) as the product L(1, chi_{D1}) L(1, chi_{D2}) over the two
/// quadratic subfields of E other than F. Valid for every rational
/// non-square delta over a quadratic base (both signs).
pub fn l1_eta_product(tag: FieldTag, delta: i64) -> Result<f64> {
    let (d1, d2) = biquadratic_subfields(tag, delta)?;
    Ok(quadarith::dirichlet_l1(d1)? * quadarith::dirichlet_l1(d2)?)
}

/// Euler totient of a square-free level over F: product of Nr(p) - 1.
pub fn euler_phi_f(tag: FieldTag, n: u64) -> Result<u64> {
    check_level(tag, n)?;
    Ok(primes_dividing(tag, n).iter().map(|pr| pr.norm() - 1).product())
}

/// Check that N >= 1 is square-free in the ring of integers of F.
pub fn check_level(tag: FieldTag, n: u64) -> Result<()> {
    let ok = quadarith::is_squarefree(n) && tag.ramified_prime().map_or(true, |p| n % p != 0);
    if ok {
        Ok(())
    } else {
        Err(Error::LevelNotSquareFree(n, tag.name()))
    }
}
