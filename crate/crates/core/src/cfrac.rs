//! Exact continued fractions: expansion, convergents, error brackets, the greedy
//! construction from target denominators, and reduction of an arbitrary rational
//! approximation to a convergent.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::ser::SerializeSeq;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::real::{Interval, Real};

/// Exact rational with arbitrary-precision parts, always stored reduced.
pub type Rational = BigRational;

/// `[a0; a1, a2, ...]` with `a_n >= 1` for `n >= 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContinuedFraction {
    pub a0: BigInt,
    pub partial_quotients: Vec<BigInt>,
}

/// The `n`-th convergent `p_n / q_n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Convergent {
    pub p: BigInt,
    pub q: BigInt,
    pub index: usize,
}

impl Convergent {
    pub fn value(&self) -> Rational {
        Rational::new(self.p.clone(), self.q.clone())
    }
}

impl ContinuedFraction {
    pub fn new(a0: BigInt, partial_quotients: Vec<BigInt>) -> Result<Self> {
        if let Some(bad) = partial_quotients.iter().position(|a| a < &BigInt::one()) {
            return Err(Error::InvalidSequence(format!("partial quotient a_{} < 1", bad + 1)));
        }
        Ok(ContinuedFraction { a0, partial_quotients })
    }

    pub fn from_i64s(terms: &[i64]) -> Result<Self> {
        let (first, rest) =
            terms.split_first().ok_or_else(|| Error::InvalidSequence("empty continued fraction".into()))?;
        ContinuedFraction::new(BigInt::from(*first), rest.iter().map(|&a| BigInt::from(a)).collect())
    }

    /// Index of the last partial quotient (0 for `[a0]`).
    pub fn last_index(&self) -> usize {
        self.partial_quotients.len()
    }

    /// All terms `a0, a1, ...` as one list.
    pub fn terms(&self) -> Vec<BigInt> {
        std::iter::once(self.a0.clone()).chain(self.partial_quotients.iter().cloned()).collect()
    }

    /// The `n`-th term (`a0` for `n = 0`).
    pub fn term(&self, n: usize) -> Option<&BigInt> {
        if n == 0 {
            Some(&self.a0)
        } else {
            self.partial_quotients.get(n - 1)
        }
    }

    /// Canonical form: the last quotient is at least 2 whenever there is more than one term.
    pub fn is_canonical(&self) -> bool {
        self.partial_quotients.last().map_or(true, |a| a >= &BigInt::from(2))
    }

    /// Exact value of the (finite) expansion.
    pub fn value(&self) -> Rational {
        convergents(self, self.last_index()).pop().expect("at least one convergent").value()
    }

    pub fn truncated(&self, n: usize) -> ContinuedFraction {
        ContinuedFraction {
            a0: self.a0.clone(),
            partial_quotients: self.partial_quotients.iter().take(n).cloned().collect(),
        }
    }
}

impl Serialize for ContinuedFraction {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let terms = self.terms();
        let mut seq = serializer.serialize_seq(Some(terms.len()))?;
        for a in &terms {
            match i64::try_from(a) {
                Ok(v) => seq.serialize_element(&v)?,
                Err(_) => seq.serialize_element(&a.to_string())?,
            }
        }
        seq.end()
    }
}

impl<'de> Deserialize<'de> for ContinuedFraction {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Term {
            Int(i64),
            Text(String),
        }
        let raw = Vec::<Term>::deserialize(deserializer)?;
        let mut terms = Vec::with_capacity(raw.len());
        for t in raw {
            terms.push(match t {
                Term::Int(v) => BigInt::from(v),
                Term::Text(s) => s.parse().map_err(serde::de::Error::custom)?,
            });
        }
        if terms.is_empty() {
            return Err(serde::de::Error::custom("empty continued fraction"));
        }
        let a0 = terms.remove(0);
        ContinuedFraction::new(a0, terms).map_err(serde::de::Error::custom)
    }
}

/// Euclid's algorithm; the result is canonical and reconstructs `r` exactly.
pub fn expand_rational(r: &Rational) -> ContinuedFraction {
    let mut num = r.numer().clone();
    let mut den = r.denom().clone();
    let mut terms = Vec::new();
    loop {
        let a = num_integer::Integer::div_floor(&num, &den);
        let rem = &num - &a * &den;
        terms.push(a);
        if rem.is_zero() {
            break;
        }
        num = std::mem::replace(&mut den, rem);
    }
    let a0 = terms.remove(0);
    ContinuedFraction { a0, partial_quotients: terms }
}

/// Floor-and-invert on a certified enclosure of `x`. Returns `depth` terms
/// (including `a0`), fewer if `x` is rational and the expansion terminates.
pub fn expand_real(x: &Real, depth: usize, bits: u32) -> Result<ContinuedFraction> {
    if let Real::Rational(r) = x {
        return Ok(expand_rational(r).truncated(depth.saturating_sub(1)));
    }
    let mut iv = x.enclose(bits);
    let mut terms: Vec<BigInt> = Vec::with_capacity(depth);
    while terms.len() < depth {
        let a = iv.common_floor().ok_or(Error::PrecisionExhausted { obtained: terms.len(), bits })?;
        let a_r = Rational::from_integer(a.clone());
        let lo = &iv.lo - &a_r;
        let hi = &iv.hi - &a_r;
        terms.push(a);
        if lo.is_zero() {
            if hi.is_zero() {
                break;
            }
            if terms.len() < depth {
                return Err(Error::PrecisionExhausted { obtained: terms.len(), bits });
            }
            break;
        }
        if terms.len() < depth {
            iv = Interval::new(hi.recip(), lo.recip());
        }
    }
    let a0 = terms.remove(0);
    Ok(ContinuedFraction { a0, partial_quotients: terms })
}

/// Convergents `0..=upto` via `p_n = a_n p_{n-1} + p_{n-2}`, `q_n = a_n q_{n-1} + q_{n-2}`
/// with `p_{-1} = 1, q_{-1} = 0`.
pub fn convergents(cf: &ContinuedFraction, upto: usize) -> Vec<Convergent> {
    let upto = upto.min(cf.last_index());
    let mut out = Vec::with_capacity(upto + 1);
    let (mut p2, mut q2) = (BigInt::one(), BigInt::zero());
    let (mut p1, mut q1) = (cf.a0.clone(), BigInt::one());
    out.push(Convergent { p: p1.clone(), q: q1.clone(), index: 0 });
    for (i, a) in cf.partial_quotients.iter().take(upto).enumerate() {
        let p = a * &p1 + &p2;
        let q = a * &q1 + &q2;
        p2 = std::mem::replace(&mut p1, p);
        q2 = std::mem::replace(&mut q1, q);
        out.push(Convergent { p: p1.clone(), q: q1.clone(), index: i + 1 });
    }
    out
}

/// Checks `p_n q_{n-1} - p_{n-1} q_n = (-1)^(n-1)` for every adjacent pair.
pub fn determinant_identity_holds(convs: &[Convergent]) -> bool {
    convs.windows(2).all(|w| {
        let n = w[1].index;
        let det = &w[1].p * &w[0].q - &w[0].p * &w[1].q;
        det == if n % 2 == 1 { BigInt::one() } else { -BigInt::one() }
    })
}

/// Exact bounds on `|x - p_n/q_n|`, optionally checked against an enclosure of `x`.
#[derive(Debug, Clone, PartialEq)]
pub struct ErrorBracket {
    pub index: usize,
    pub lower: Rational,
    pub upper: Rational,
    /// Enclosure of the true error, when `x` was supplied.
    pub error: Option<Interval>,
    /// Whether the enclosure of the error lies inside `[lower, upper]`.
    pub verified: Option<bool>,
}

/// `1/(q_n (q_n + q_{n+1})) <= |x - p_n/q_n| <= 1/(q_n q_{n+1})`; degenerate `[0, 0]`
/// at the last index of a finite expansion.
pub fn convergent_error_bracket(x: Option<&Real>, cf: &ContinuedFraction, n: usize, bits: u32) -> Result<ErrorBracket> {
    if n > cf.last_index() {
        return Err(Error::InvalidArgument(format!("index {n} beyond expansion length {}", cf.last_index())));
    }
    let convs = convergents(cf, n + 1);
    let (lower, upper) = if n == cf.last_index() {
        (Rational::zero(), Rational::zero())
    } else {
        let qn = &convs[n].q;
        let qn1 = &convs[n + 1].q;
        (Rational::new(BigInt::one(), qn * (qn + qn1)), Rational::new(BigInt::one(), qn * qn1))
    };
    let (error, verified) = match x {
        Some(x) => {
            let e = x.enclose(bits).abs_dist(&convs[n].value());
            let ok = e.lo >= lower && e.hi <= upper;
            (Some(e), Some(ok))
        }
        None => (None, None),
    };
    Ok(ErrorBracket { index: n, lower, upper, error, verified })
}

/// Greedy construction: `a_M` is the largest integer with `a q_{M-1} + q_{M-2} <= target_M`.
/// Resulting denominators satisfy `target_n / 2 <= q_n <= target_n`. The constructed
/// number lies in `(0, 1)` (`a0 = 0`).
pub fn denominators_to_cf(target_q: &[BigInt]) -> Result<ContinuedFraction> {
    match target_q.first() {
        Some(q0) if q0.is_one() => {}
        _ => return Err(Error::InvalidSequence("target sequence must start at 1".into())),
    }
    for (n, w) in target_q.windows(2).enumerate() {
        if w[1] < BigInt::from(2) * &w[0] {
            return Err(Error::InvalidSequence(format!("doubling condition fails at index {}", n + 1)));
        }
    }
    let (mut q2, mut q1) = (BigInt::zero(), BigInt::one());
    let mut quotients = Vec::with_capacity(target_q.len().saturating_sub(1));
    for target in &target_q[1..] {
        let a = (target - &q2) / &q1;
        let q = &a * &q1 + &q2;
        quotients.push(a);
        q2 = std::mem::replace(&mut q1, q);
    }
    Ok(ContinuedFraction { a0: BigInt::zero(), partial_quotients: quotients })
}

/// Outcome of reducing `p/q` to a convergent.
#[derive(Debug, Clone, PartialEq)]
pub struct Reduction {
    pub index: usize,
    /// `q / q_n`.
    pub q_ratio: f64,
    /// `|x - p/q| / |x - p_n/q_n|`; infinite when the convergent is exact.
    pub error_ratio: f64,
}

/// Smallest `n` with `q >= c1 q_n` and `|x - p/q| >= c2 |x - p_n/q_n|`. Errors are
/// compared on certified enclosures, refining the precision as needed.
pub fn best_approx_reduce(
    x: &Real,
    cf: &ContinuedFraction,
    r: &Rational,
    c1: &Rational,
    c2: &Rational,
) -> Result<Reduction> {
    let convs = convergents(cf, cf.last_index());
    let q = Rational::from_integer(r.denom().clone());
    let bound = Rational::from_integer(BigInt::from(2)) * &q;
    let covered = convs.iter().any(|c| Rational::from_integer(c.q.clone()) > bound) || x.is_rational();
    if !covered {
        return Err(Error::InvalidArgument("expansion too short: need some q_n > 2q".into()));
    }
    let mut bits = 64u32;
    'refine: loop {
        let xi = x.enclose(bits);
        let target = xi.abs_dist(r);
        for c in &convs {
            if q < c1 * Rational::from_integer(c.q.clone()) {
                continue;
            }
            let en = xi.abs_dist(&c.value());
            let scaled_hi = c2 * &en.hi;
            let scaled_lo = c2 * &en.lo;
            if target.lo >= scaled_hi {
                let q_ratio = crate::real::rational_to_f64(&(&q / Rational::from_integer(c.q.clone())));
                let error_ratio = if en.hi.is_zero() { f64::INFINITY } else { target.mid_f64() / en.mid_f64() };
                return Ok(Reduction { index: c.index, q_ratio, error_ratio });
            }
            if target.hi >= scaled_lo && !(target.is_point() && en.is_point()) {
                if bits >= 1 << 16 {
                    return Err(Error::PrecisionExhausted { obtained: c.index, bits });
                }
                bits *= 2;
                continue 'refine;
            }
        }
        return Err(Error::Counterexample { candidate: r.to_string() });
    }
}

/// Absolute error `|x - r|` as an f64 natural logarithm, refined until the
/// enclosure determines it to about 1e-9 relative.
pub fn ln_abs_error(x: &Real, r: &Rational) -> Result<f64> {
    let mut bits = 128u32;
    loop {
        let e = x.enclose(bits).abs_dist(r);
        if e.lo.is_positive() {
            let lo = crate::real::ln_rational(&e.lo);
            let hi = crate::real::ln_rational(&e.hi);
            if hi - lo < 1e-9 {
                return Ok(0.5 * (lo + hi));
            }
        } else if e.hi.is_zero() {
            return Ok(f64::NEG_INFINITY);
        }
        if bits > 1 << 20 {
            return Err(Error::PrecisionExhausted { obtained: 0, bits });
        }
        bits *= 2;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ints(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&a| BigInt::from(a)).collect()
    }

    #[test]
    fn expand_rational_examples() {
        assert_eq!(expand_rational(&Rational::new(355.into(), 113.into())).terms(), ints(&[3, 7, 16]));
        assert_eq!(expand_rational(&Rational::new(7.into(), 1.into())).terms(), ints(&[7]));
        assert_eq!(expand_rational(&Rational::new(3.into(), 2.into())).terms(), ints(&[1, 2]));
        assert_eq!(expand_rational(&Rational::new((-7).into(), 3.into())).terms(), ints(&[-3, 1, 2]));
    }

    #[test]
    fn expand_real_examples() {
        let phi = expand_real(&Real::golden_ratio(), 6, 64).unwrap();
        assert_eq!(phi.terms(), ints(&[1, 1, 1, 1, 1, 1]));
        let s2 = expand_real(&Real::sqrt(2), 5, 64).unwrap();
        assert_eq!(s2.terms(), ints(&[1, 2, 2, 2, 2]));
        let pi = expand_real(&Real::Pi, 5, 64).unwrap();
        assert_eq!(pi.terms(), ints(&[3, 7, 15, 1, 292]));
    }

    #[test]
    fn expand_real_reports_exhaustion() {
        let err = expand_real(&Real::Pi, 200, 32).unwrap_err();
        assert!(matches!(err, Error::PrecisionExhausted { .. }));
    }

    #[test]
    fn convergent_examples() {
        let cf = ContinuedFraction::from_i64s(&[3, 7, 15, 1]).unwrap();
        let c = convergents(&cf, 3);
        assert_eq!(c.iter().map(|c| c.q.clone()).collect::<Vec<_>>(), ints(&[1, 7, 106, 113]));
        assert_eq!(c.iter().map(|c| c.p.clone()).collect::<Vec<_>>(), ints(&[3, 22, 333, 355]));
        assert!(determinant_identity_holds(&c));
        let fib = convergents(&ContinuedFraction::from_i64s(&[1, 1, 1, 1, 1]).unwrap(), 4);
        assert_eq!(fib.iter().map(|c| c.q.clone()).collect::<Vec<_>>(), ints(&[1, 1, 2, 3, 5]));
        let seven = convergents(&ContinuedFraction::from_i64s(&[7]).unwrap(), 0);
        assert_eq!((seven[0].p.clone(), seven[0].q.clone()), (BigInt::from(7), BigInt::from(1)));
    }

    #[test]
    fn error_bracket_pi() {
        let cf = expand_real(&Real::Pi, 6, 256).unwrap();
        let b = convergent_error_bracket(Some(&Real::Pi), &cf, 1, 256).unwrap();
        assert_eq!(b.verified, Some(true));
        let err = b.error.unwrap().mid_f64();
        assert!((err - 1.264489e-3).abs() < 1e-9);
    }

    #[test]
    fn error_bracket_golden() {
        let cf = expand_real(&Real::golden_ratio(), 12, 128).unwrap();
        let b = convergent_error_bracket(Some(&Real::golden_ratio()), &cf, 4, 128).unwrap();
        assert_eq!(b.verified, Some(true));
        assert!(b.lower >= Rational::new(1.into(), 65.into()) && b.upper <= Rational::new(1.into(), 40.into()));
    }

    #[test]
    fn error_bracket_rational_last_index_is_degenerate() {
        let r = Rational::new(355.into(), 113.into());
        let cf = expand_rational(&r);
        let b = convergent_error_bracket(Some(&Real::Rational(r)), &cf, 2, 64).unwrap();
        assert!(b.lower.is_zero() && b.upper.is_zero());
        assert_eq!(b.verified, Some(true));
    }

    #[test]
    fn greedy_denominators() {
        let cf = denominators_to_cf(&ints(&[1, 2, 4, 8, 16])).unwrap();
        assert_eq!(cf.partial_quotients, ints(&[2, 1, 2, 1]));
        let q: Vec<_> = convergents(&cf, 4).into_iter().map(|c| c.q).collect();
        assert_eq!(q, ints(&[1, 2, 3, 8, 11]));
        let cf = denominators_to_cf(&ints(&[1, 2, 4])).unwrap();
        assert_eq!(convergents(&cf, 1)[1].q, BigInt::from(2));
    }

    #[test]
    fn greedy_powers_of_two_sandwich() {
        let targets: Vec<BigInt> = (0..=20).map(|n| BigInt::one() << n).collect();
        let cf = denominators_to_cf(&targets).unwrap();
        for (n, c) in convergents(&cf, 20).iter().enumerate().skip(1) {
            assert!(c.q >= BigInt::one() << (n - 1) && c.q <= BigInt::one() << n);
        }
    }

    #[test]
    fn greedy_rejects_bad_sequences() {
        assert!(denominators_to_cf(&ints(&[2, 4])).is_err());
        assert!(denominators_to_cf(&ints(&[1, 3, 5])).is_err());
    }

    #[test]
    fn reduce_examples() {
        let c1 = Rational::new(1.into(), 2.into());
        let c2 = Rational::new(1.into(), 8.into());
        let pi_cf = expand_real(&Real::Pi, 8, 128).unwrap();
        let r = best_approx_reduce(&Real::Pi, &pi_cf, &Rational::new(22.into(), 7.into()), &c1, &c2).unwrap();
        assert_eq!(r.index, 1);
        let r = best_approx_reduce(&Real::Pi, &pi_cf, &Rational::new(314.into(), 100.into()), &c1, &c2).unwrap();
        assert!(r.index <= 1);
        let phi_cf = expand_real(&Real::golden_ratio(), 12, 128).unwrap();
        let r =
            best_approx_reduce(&Real::golden_ratio(), &phi_cf, &Rational::new(4.into(), 3.into()), &c1, &c2).unwrap();
        assert!(r.index <= 3);
    }

    #[test]
    fn json_round_trip() {
        let cf = ContinuedFraction::from_i64s(&[3, 7, 16]).unwrap();
        let mut big = cf.clone();
        big.partial_quotients.push(BigInt::one() << 100);
        for c in [cf, big] {
            let text = serde_json::to_string(&c).unwrap();
            let back: ContinuedFraction = serde_json::from_str(&text).unwrap();
            assert_eq!(back, c);
        }
    }
}
