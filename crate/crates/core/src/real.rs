//! Certified real numbers: every value can be enclosed in a rational interval
//! of any requested width.

use std::fmt;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{FromPrimitive, One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Closed rational interval `[lo, hi]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Interval {
    pub lo: BigRational,
    pub hi: BigRational,
}

impl Interval {
    pub fn new(lo: BigRational, hi: BigRational) -> Self {
        debug_assert!(lo <= hi);
        Interval { lo, hi }
    }

    pub fn point(r: BigRational) -> Self {
        Interval { lo: r.clone(), hi: r }
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }

    pub fn width(&self) -> BigRational {
        &self.hi - &self.lo
    }

    pub fn contains(&self, r: &BigRational) -> bool {
        &self.lo <= r && r <= &self.hi
    }

    pub fn shift(&self, r: &BigRational) -> Interval {
        Interval { lo: &self.lo + r, hi: &self.hi + r }
    }

    /// Enclosure of `|v - r|` for `v` in the interval.
    pub fn abs_dist(&self, r: &BigRational) -> Interval {
        let a = &self.lo - r;
        let b = &self.hi - r;
        if a.is_negative() && b.is_positive() {
            let m = if -a.clone() > b { -a } else { b };
            Interval { lo: BigRational::zero(), hi: m }
        } else {
            let (x, y) = (a.abs(), b.abs());
            if x <= y {
                Interval { lo: x, hi: y }
            } else {
                Interval { lo: y, hi: x }
            }
        }
    }

    /// Common floor of both endpoints, if there is one.
    pub fn common_floor(&self) -> Option<BigInt> {
        let a = self.lo.floor().to_integer();
        let b = self.hi.floor().to_integer();
        (a == b).then_some(a)
    }

    pub fn mid_f64(&self) -> f64 {
        rational_to_f64(&((&self.lo + &self.hi) / BigRational::from_integer(BigInt::from(2))))
    }
}

/// `(a + b·√n) / c` with `c > 0`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuadraticSurd {
    pub a: BigInt,
    pub b: BigInt,
    pub n: BigUint,
    pub c: BigInt,
}

impl QuadraticSurd {
    pub fn new(a: BigInt, b: BigInt, n: BigUint, c: BigInt) -> Result<Self> {
        if !c.is_positive() {
            return Err(Error::InvalidArgument("surd denominator must be positive".into()));
        }
        Ok(QuadraticSurd { a, b, n, c })
    }

    pub fn sqrt(n: u64) -> Self {
        QuadraticSurd { a: 0.into(), b: 1.into(), n: n.into(), c: 1.into() }
    }

    pub fn golden_ratio() -> Self {
        QuadraticSurd { a: 1.into(), b: 1.into(), n: 5u32.into(), c: 2.into() }
    }

    fn enclose(&self, bits: u32) -> Interval {
        let root = self.n.sqrt();
        if &root * &root == self.n {
            let v = BigRational::new(&self.a + &self.b * BigInt::from(root), self.c.clone());
            return Interval::point(v);
        }
        let k = bits as usize + self.b.bits() as usize + 4;
        let s = (&self.n << (2 * k)).sqrt();
        let scale = BigInt::one() << k;
        let s_lo = BigRational::new(BigInt::from(s.clone()), scale.clone());
        let s_hi = BigRational::new(BigInt::from(s) + 1, scale);
        let (bl, bh) = if self.b.is_negative() {
            (BigRational::from_integer(self.b.clone()) * &s_hi, BigRational::from_integer(self.b.clone()) * &s_lo)
        } else {
            (BigRational::from_integer(self.b.clone()) * &s_lo, BigRational::from_integer(self.b.clone()) * &s_hi)
        };
        let a = BigRational::from_integer(self.a.clone());
        let c = BigRational::from_integer(self.c.clone());
        Interval::new((&a + bl) / &c, (&a + bh) / &c)
    }
}

/// A real number that can be enclosed to arbitrary precision.
#[derive(Debug, Clone, PartialEq)]
pub enum Real {
    Rational(BigRational),
    Surd(QuadraticSurd),
    Pi,
    E,
}

impl Real {
    pub fn rational(num: i64, den: i64) -> Real {
        Real::Rational(BigRational::new(num.into(), den.into()))
    }

    pub fn golden_ratio() -> Real {
        Real::Surd(QuadraticSurd::golden_ratio())
    }

    pub fn sqrt(n: u64) -> Real {
        Real::Surd(QuadraticSurd::sqrt(n))
    }

    /// `√n + offset` for an integer offset.
    pub fn sqrt_offset(n: u64, offset: i64) -> Real {
        Real::Surd(QuadraticSurd { a: offset.into(), b: 1.into(), n: n.into(), c: 1.into() })
    }

    /// Rational interval containing the value, of width at most about `2^-bits`.
    pub fn enclose(&self, bits: u32) -> Interval {
        match self {
            Real::Rational(r) => Interval::point(r.clone()),
            Real::Surd(s) => s.enclose(bits),
            Real::Pi => pi_enclosure(bits),
            Real::E => e_enclosure(bits),
        }
    }

    pub fn is_rational(&self) -> bool {
        match self {
            Real::Rational(_) => true,
            Real::Surd(s) => {
                let r = s.n.sqrt();
                &r * &r == s.n || s.b.is_zero()
            }
            _ => false,
        }
    }

    pub fn to_f64(&self) -> f64 {
        self.enclose(80).mid_f64()
    }

    /// Parses `pi`, `e`, `phi`, rationals (`p/q`, decimals) and expressions such
    /// as `sqrt2-1`, `3*sqrt(5)+1/2` or `(1+sqrt5)/2`.
    pub fn parse(text: &str) -> Result<Real> {
        let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        match s.as_str() {
            "pi" => return Ok(Real::Pi),
            "e" => return Ok(Real::E),
            "phi" | "golden" => return Ok(Real::golden_ratio()),
            _ => {}
        }
        if let Ok(r) = parse_rational(&s) {
            return Ok(Real::Rational(r));
        }
        let (body, div) = match s.strip_prefix('(') {
            Some(rest) => {
                let close =
                    rest.find(')').ok_or_else(|| Error::Parse(format!("unbalanced parentheses in '{text}'")))?;
                let body = &rest[..close];
                let tail = &rest[close + 1..];
                let div = match tail.strip_prefix('/') {
                    Some(d) => parse_rational(d)?,
                    None if tail.is_empty() => BigRational::one(),
                    None => return Err(Error::Parse(format!("unexpected '{tail}' in '{text}'"))),
                };
                (body.to_string(), div)
            }
            None => (s.clone(), BigRational::one()),
        };
        let mut rat = BigRational::zero();
        let mut coef = BigRational::zero();
        let mut radicand: Option<BigUint> = None;
        for (sign, term) in split_terms(&body) {
            if let Some(pos) = term.find("sqrt") {
                let k = if pos == 0 { BigRational::one() } else { parse_rational(term[..pos].trim_end_matches('*'))? };
                let arg = term[pos + 4..].trim_start_matches('(').trim_end_matches(')');
                let n: BigUint = arg.parse().map_err(|_| Error::Parse(format!("bad radicand '{arg}'")))?;
                if let Some(prev) = &radicand {
                    if *prev != n {
                        return Err(Error::Parse("mixed radicands are not supported".into()));
                    }
                }
                radicand = Some(n);
                coef += k * BigRational::from_integer(sign.into());
            } else {
                rat += parse_rational(&term)? * BigRational::from_integer(sign.into());
            }
        }
        let rat = rat / &div;
        let coef = coef / &div;
        match radicand {
            None => Ok(Real::Rational(rat)),
            Some(n) => {
                // Bring a/c + (b/c')√n over a common denominator.
                let den = rat.denom().lcm(coef.denom());
                let a = rat.numer() * (&den / rat.denom());
                let b = coef.numer() * (&den / coef.denom());
                Ok(Real::Surd(QuadraticSurd { a, b, n, c: den }))
            }
        }
    }
}

impl fmt::Display for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Real::Rational(r) => write!(f, "{r}"),
            Real::Surd(s) => write!(f, "({}+{}*sqrt({}))/{}", s.a, s.b, s.n, s.c),
            Real::Pi => write!(f, "pi"),
            Real::E => write!(f, "e"),
        }
    }
}

fn split_terms(s: &str) -> Vec<(i64, String)> {
    let mut out = Vec::new();
    let mut sign = 1i64;
    let mut cur = String::new();
    let mut prev: Option<char> = None;
    for ch in s.chars() {
        let exponent_sign = matches!(prev, Some('e') | Some('E')) && !cur.contains("sqrt");
        if (ch == '+' || ch == '-') && !cur.is_empty() && !exponent_sign {
            out.push((sign, std::mem::take(&mut cur)));
            sign = if ch == '-' { -1 } else { 1 };
        } else if (ch == '+' || ch == '-') && cur.is_empty() {
            if ch == '-' {
                sign = -sign;
            }
        } else {
            cur.push(ch);
        }
        prev = Some(ch);
    }
    if !cur.is_empty() {
        out.push((sign, cur));
    }
    out
}

/// Parses `p/q`, an integer, or a decimal such as `0.25` or `1e-3` exactly.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let err = || Error::Parse(format!("not a rational number: '{s}'"));
    if s.is_empty() {
        return Err(err());
    }
    if let Some((p, q)) = s.split_once('/') {
        let p: BigInt = p.parse().map_err(|_| err())?;
        let q: BigInt = q.parse().map_err(|_| err())?;
        if q.is_zero() {
            return Err(Error::Domain("zero denominator".into()));
        }
        return Ok(BigRational::new(p, q));
    }
    let (mant, exp) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().map_err(|_| err())?),
        None => (s, 0),
    };
    let (neg, mant) = match mant.strip_prefix('-') {
        Some(m) => (true, m),
        None => (false, mant.strip_prefix('+').unwrap_or(mant)),
    };
    let (int, frac) = mant.split_once('.').unwrap_or((mant, ""));
    if int.is_empty() && frac.is_empty() {
        return Err(err());
    }
    if !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return Err(err());
    }
    let digits: BigInt = format!("{int}{frac}0").parse::<BigInt>().map_err(|_| err())? / 10;
    let scale = exp - frac.len() as i32;
    let ten = BigInt::from(10);
    let mut r = if scale >= 0 {
        BigRational::from_integer(digits * num_traits::pow(ten, scale as usize))
    } else {
        BigRational::new(digits, num_traits::pow(ten, (-scale) as usize))
    };
    if neg {
        r = -r;
    }
    Ok(r)
}

/// Natural logarithm of a positive big integer, accurate to f64 precision
/// regardless of magnitude.
pub fn ln_bigint(n: &BigInt) -> f64 {
    debug_assert!(n.sign() == Sign::Plus);
    let bits = n.bits();
    if bits <= 1000 {
        return n.to_f64().unwrap_or(f64::INFINITY).ln();
    }
    let shift = bits - 64;
    let top = (n >> shift).to_f64().unwrap_or(f64::INFINITY);
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

/// `floor(e^b)` for `b >= 0`, correct to f64 relative precision at any magnitude.
pub fn exp_floor_bigint(b: f64) -> BigInt {
    debug_assert!(b >= 0.0 && b.is_finite());
    if b < 700.0 {
        return BigInt::from_f64(b.exp().floor()).unwrap_or_else(BigInt::zero);
    }
    let log2 = b / std::f64::consts::LN_2;
    let e = log2.floor();
    let mantissa = (log2 - e).exp2() * 2f64.powi(52);
    BigInt::from(mantissa as u64) << (e as u64 - 52)
}

/// Natural logarithm of a positive rational, robust to huge numerators and denominators.
pub fn ln_rational(r: &BigRational) -> f64 {
    ln_bigint(r.numer()) - ln_bigint(r.denom())
}

/// Converts a rational to f64 without overflowing on huge components.
pub fn rational_to_f64(r: &BigRational) -> f64 {
    if r.is_zero() {
        return 0.0;
    }
    if let (Some(n), Some(d)) = (r.numer().to_f64(), r.denom().to_f64()) {
        if n.is_finite() && d.is_finite() && d != 0.0 {
            return n / d;
        }
    }
    let sign = if r.is_negative() { -1.0 } else { 1.0 };
    sign * ln_rational(&r.abs()).exp()
}

fn fixed_point_interval(center: BigInt, err: BigInt, p: usize) -> Interval {
    let scale = BigInt::one() << p;
    Interval::new(BigRational::new(&center - &err, scale.clone()), BigRational::new(center + err, scale))
}

/// `Σ (-1)^j / ((2j+1) m^(2j+1))` scaled by `2^p`, with its truncation error bound.
fn atan_inv_fixed(m: u32, p: usize) -> (BigInt, BigInt) {
    let m = BigInt::from(m);
    let m2 = &m * &m;
    let mut power = (BigInt::one() << p) / &m;
    let mut sum = BigInt::zero();
    let mut j: u64 = 0;
    while !power.is_zero() {
        let term = &power / BigInt::from(2 * j + 1);
        if j.is_even() {
            sum += term;
        } else {
            sum -= term;
        }
        power /= &m2;
        j += 1;
    }
    (sum, BigInt::from(2 * j + 2))
}

fn pi_enclosure(bits: u32) -> Interval {
    let p = bits as usize + 24;
    let (s5, e5) = atan_inv_fixed(5, p);
    let (s239, e239) = atan_inv_fixed(239, p);
    let center = BigInt::from(16) * s5 - BigInt::from(4) * s239;
    let err = BigInt::from(16) * e5 + BigInt::from(4) * e239;
    fixed_point_interval(center, err, p)
}

fn e_enclosure(bits: u32) -> Interval {
    let p = bits as usize + 24;
    let mut term = BigInt::one() << p;
    let mut sum = term.clone();
    let mut k: u64 = 1;
    while !term.is_zero() {
        term /= BigInt::from(k);
        sum += &term;
        k += 1;
    }
    fixed_point_interval(sum, BigInt::from(2 * k + 2), p)
}
