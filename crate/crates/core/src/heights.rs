//! Height functions on rational points and the exponent constants attached to them.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive};
use serde::{Deserialize, Serialize};

use crate::cfrac::Rational;
use crate::error::{Error, Result};
use crate::real::ln_bigint;

/// A point of `Q^d`; coordinates are reduced by construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalPoint {
    pub coords: Vec<Rational>,
}

impl RationalPoint {
    pub fn new(coords: Vec<Rational>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::UnsupportedDimension(0));
        }
        Ok(RationalPoint { coords })
    }

    pub fn from_pairs(pairs: &[(i64, i64)]) -> Result<Self> {
        let mut coords = Vec::with_capacity(pairs.len());
        for &(p, q) in pairs {
            if q == 0 {
                return Err(Error::Domain("zero denominator".into()));
            }
            coords.push(Rational::new(p.into(), q.into()));
        }
        RationalPoint::new(coords)
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn denominators(&self) -> Vec<BigInt> {
        self.coords.iter().map(|c| c.denom().clone()).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum HeightKind {
    Max,
    Min,
    Prod,
    Lcm,
}

impl HeightKind {
    pub const ALL: [HeightKind; 4] = [HeightKind::Max, HeightKind::Min, HeightKind::Prod, HeightKind::Lcm];

    /// Applies the kind's combining rule to a list of denominators.
    pub fn combine(self, qs: &[BigInt]) -> BigInt {
        let mut it = qs.iter();
        let first = it.next().cloned().unwrap_or_else(BigInt::one);
        it.fold(first, |acc, q| match self {
            HeightKind::Max => acc.max(q.clone()),
            HeightKind::Min => acc.min(q.clone()),
            HeightKind::Prod => acc * q,
            HeightKind::Lcm => acc.lcm(q),
        })
    }
}

impl fmt::Display for HeightKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            HeightKind::Max => "max",
            HeightKind::Min => "min",
            HeightKind::Prod => "prod",
            HeightKind::Lcm => "lcm",
        })
    }
}

impl FromStr for HeightKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "max" => Ok(HeightKind::Max),
            "min" => Ok(HeightKind::Min),
            "prod" => Ok(HeightKind::Prod),
            "lcm" => Ok(HeightKind::Lcm),
            other => Err(Error::Parse(format!("unknown height kind '{other}'"))),
        }
    }
}

/// `Θ(q_1, ..., q_d)` over the reduced denominators.
pub fn height(kind: HeightKind, r: &RationalPoint) -> BigInt {
    kind.combine(&r.denominators())
}

/// `γ_d = (d-1)^(1/d)`.
pub fn gamma_d(d: usize) -> f64 {
    ((d as f64) - 1.0).powf(1.0 / d as f64)
}

/// `α_d = d (d-1)^(-(d-1)/d)`.
pub fn alpha_d(d: usize) -> f64 {
    let df = d as f64;
    df * (df - 1.0).powf(-(df - 1.0) / df)
}

/// Exponent of irrationality of the height on `R^d`. Every kind gives 2 when `d = 1`.
pub fn omega_exponent(kind: HeightKind, d: usize) -> Result<f64> {
    if d == 0 {
        return Err(Error::UnsupportedDimension(0));
    }
    if d == 1 {
        return Ok(2.0);
    }
    let df = d as f64;
    Ok(match kind {
        HeightKind::Max => alpha_d(d),
        HeightKind::Min => 2.0,
        HeightKind::Prod => 2.0 / df,
        HeightKind::Lcm => 1.0 + 1.0 / df,
    })
}

/// `β_d`: 2 for max and min, `2/d` for prod. Not defined for lcm.
pub fn beta_d(kind: HeightKind, d: usize) -> Result<f64> {
    match kind {
        HeightKind::Max | HeightKind::Min => Ok(2.0),
        HeightKind::Prod => Ok(2.0 / d as f64),
        HeightKind::Lcm => Err(Error::InvalidArgument("beta_d is defined for max, min and prod only".into())),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExponentConstants {
    pub d: usize,
    pub gamma_d: f64,
    pub alpha_d: f64,
}

impl ExponentConstants {
    pub fn new(d: usize) -> Result<Self> {
        if d < 2 {
            return Err(Error::UnsupportedDimension(d));
        }
        Ok(ExponentConstants { d, gamma_d: gamma_d(d), alpha_d: alpha_d(d) })
    }

    pub fn beta_d(&self, kind: HeightKind) -> Result<f64> {
        beta_d(kind, self.d)
    }
}

/// `(min, prod^(1/d), max, lcm, prod)` for a rational point.
#[derive(Debug, Clone, PartialEq)]
pub struct HeightChain {
    pub min: BigInt,
    /// `prod^(1/d)` as an f64 (its logarithm is exact to f64 precision).
    pub prod_root: f64,
    pub max: BigInt,
    pub lcm: BigInt,
    pub prod: BigInt,
    pub holds: bool,
}

/// Evaluates the chain `min <= prod^(1/d) <= max <= lcm <= prod`; comparisons
/// against the root are done exactly via `min^d <= prod <= max^d`.
pub fn check_height_chain(r: &RationalPoint) -> HeightChain {
    let d = r.dim();
    let min = height(HeightKind::Min, r);
    let max = height(HeightKind::Max, r);
    let lcm = height(HeightKind::Lcm, r);
    let prod = height(HeightKind::Prod, r);
    let holds =
        num_traits::pow(min.clone(), d) <= prod && prod <= num_traits::pow(max.clone(), d) && max <= lcm && lcm <= prod;
    let prod_root = match prod.to_f64() {
        Some(p) if p.is_finite() => p.powf(1.0 / d as f64),
        _ => (ln_bigint(&prod) / d as f64).exp(),
    };
    HeightChain { min, prod_root, max, lcm, prod, holds }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn height_examples() {
        let r = RationalPoint::from_pairs(&[(1, 2), (2, 3)]).unwrap();
        assert_eq!(height(HeightKind::Prod, &r), 6.into());
        let r = RationalPoint::from_pairs(&[(1, 4), (5, 6)]).unwrap();
        assert_eq!(height(HeightKind::Lcm, &r), 12.into());
        let r = RationalPoint::from_pairs(&[(3, 1), (2, 7)]).unwrap();
        assert_eq!(height(HeightKind::Min, &r), 1.into());
    }

    #[test]
    fn denominators_are_reduced() {
        let r = RationalPoint::from_pairs(&[(2, 4), (6, 9)]).unwrap();
        assert_eq!(height(HeightKind::Prod, &r), 6.into());
    }

    #[test]
    fn omega_examples() {
        assert!((omega_exponent(HeightKind::Max, 3).unwrap() - 1.889882).abs() < 1e-6);
        assert_eq!(omega_exponent(HeightKind::Prod, 4).unwrap(), 0.5);
        assert_eq!(omega_exponent(HeightKind::Min, 7).unwrap(), 2.0);
        for k in HeightKind::ALL {
            assert_eq!(omega_exponent(k, 1).unwrap(), 2.0);
        }
        assert!((omega_exponent(HeightKind::Max, 2).unwrap() - 2.0).abs() < 1e-15);
    }

    #[test]
    fn chain_examples() {
        let c = check_height_chain(&RationalPoint::from_pairs(&[(1, 2), (2, 3)]).unwrap());
        assert!(c.holds);
        assert_eq!((c.min, c.max, c.lcm, c.prod), (2.into(), 3.into(), 6.into(), 6.into()));
        assert!((c.prod_root - 6f64.sqrt()).abs() < 1e-12);
        let c = check_height_chain(&RationalPoint::from_pairs(&[(1, 6), (1, 4)]).unwrap());
        assert_eq!((c.min, c.max, c.lcm, c.prod), (4.into(), 6.into(), 12.into(), 24.into()));
        assert!(c.holds);
        let c = check_height_chain(&RationalPoint::from_pairs(&[(1, 9), (1, 9)]).unwrap());
        assert_eq!((c.min.clone(), c.max.clone(), c.lcm.clone(), c.prod), (9.into(), 9.into(), 9.into(), 81.into()));
        assert!((c.prod_root - 9.0).abs() < 1e-12);
    }

    #[test]
    fn omega_chain_on_grid() {
        for d in 2..=12 {
            let w = |k| omega_exponent(k, d).unwrap();
            let df = d as f64;
            assert!(w(HeightKind::Prod) <= w(HeightKind::Lcm));
            assert!(w(HeightKind::Lcm) <= w(HeightKind::Max) + 1e-15);
            assert!(w(HeightKind::Max) <= df * w(HeightKind::Prod) + 1e-15);
            assert!(df * w(HeightKind::Prod) <= w(HeightKind::Min) + 1e-15);
        }
    }

    #[test]
    fn alpha_gamma_identity() {
        for d in 3..=12 {
            let g = gamma_d(d);
            assert!((alpha_d(d) - (g + g.powi(-(d as i32 - 1)))).abs() < 1e-12);
            assert!(g > 1.0);
        }
        assert_eq!(gamma_d(2), 1.0);
    }
}
