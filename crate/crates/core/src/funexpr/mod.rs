//! Approximation functions `ψ`, the derived transforms `Ψ`, `Φ`, `f_ψ`, and the
//! comparison families `ψ_{N,C}` and `f_{N,C}`.

pub mod asym;
mod expr;
mod parse;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use expr::{FuncExpr, Node};
pub use parse::parse_expr;

pub(crate) use expr::tower;

use crate::error::{Error, Result};
use crate::heights::{alpha_d, gamma_d};

/// An approximation function `ψ(q)`.
#[derive(Debug, Clone, PartialEq)]
pub enum PsiSpec {
    /// `ψ(q) = q^(-α)`.
    PowerLaw(f64),
    FamilyNC {
        d: usize,
        n: u32,
        c: f64,
    },
    Custom(FuncExpr),
}

impl PsiSpec {
    pub fn expr(&self) -> Result<FuncExpr> {
        match self {
            PsiSpec::PowerLaw(a) => Ok(FuncExpr::var().powf(-a)),
            PsiSpec::FamilyNC { d, n, c } => psi_nc_expr(*d, *n, *c),
            PsiSpec::Custom(e) => Ok(e.clone()),
        }
    }
}

impl fmt::Display for PsiSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PsiSpec::PowerLaw(a) => write!(f, "power:{a}"),
            PsiSpec::FamilyNC { d, n, c } => write!(f, "nc:{d},{n},{c}"),
            PsiSpec::Custom(e) => write!(f, "custom:{e}"),
        }
    }
}

impl FromStr for PsiSpec {
    type Err = Error;

    /// Accepts `power:A`, `nc:D,N,C` and `custom:EXPR`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (kind, rest) =
            s.split_once(':').ok_or_else(|| Error::Parse(format!("psi spec '{s}' lacks a kind prefix")))?;
        let num = |t: &str| -> Result<f64> {
            crate::real::parse_rational(t.trim()).map(|r| crate::real::rational_to_f64(&r))
        };
        match kind.trim() {
            "power" => {
                let a = num(rest)?;
                if a < 0.0 {
                    return Err(Error::InvalidArgument("power-law exponent must be >= 0".into()));
                }
                Ok(PsiSpec::PowerLaw(a))
            }
            "nc" => {
                let parts: Vec<&str> = rest.split(',').collect();
                if parts.len() != 3 {
                    return Err(Error::Parse("nc expects D,N,C".into()));
                }
                let d: usize = parts[0].trim().parse().map_err(|_| Error::Parse(format!("bad d '{}'", parts[0])))?;
                let n: u32 = parts[1].trim().parse().map_err(|_| Error::Parse(format!("bad N '{}'", parts[1])))?;
                psi_nc(d, n, num(parts[2])?)
            }
            "custom" => Ok(PsiSpec::Custom(parse_expr(rest)?)),
            other => Err(Error::Parse(format!("unknown psi kind '{other}'"))),
        }
    }
}

impl Serialize for PsiSpec {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for PsiSpec {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// `d γ_d log²(γ_d) / 8`.
pub fn nc_leading_constant(d: usize) -> f64 {
    let g = gamma_d(d);
    d as f64 * g * g.ln().powi(2) / 8.0
}

/// `Π_{i=lo}^{hi} (log^(i) x)^(-2)`.
fn inv_sq_product(lo: u32, hi: u32) -> FuncExpr {
    let mut acc = FuncExpr::rational(1, 1);
    for i in lo..=hi {
        acc = acc.mul(&FuncExpr::iterated_log(i).powf(-2.0));
    }
    acc
}

pub fn psi_nc(d: usize, n: u32, c: f64) -> Result<PsiSpec> {
    if d < 3 {
        return Err(Error::UnsupportedDimension(d));
    }
    if n < 1 || !(c >= 0.0) {
        return Err(Error::InvalidArgument("psi_NC needs N >= 1 and C >= 0".into()));
    }
    Ok(PsiSpec::FamilyNC { d, n, c })
}

fn psi_nc_expr(d: usize, n: u32, c: f64) -> Result<FuncExpr> {
    if d < 3 {
        return Err(Error::UnsupportedDimension(d));
    }
    let mut bracket = FuncExpr::rational(0, 1);
    for m in 2..=n {
        bracket = bracket.add(&inv_sq_product(2, m));
    }
    bracket = bracket.add(&inv_sq_product(2, n + 1).scale(c));
    let e = FuncExpr::constant(-alpha_d(d)).add(&bracket.scale(nc_leading_constant(d)));
    Ok(FuncExpr::var().pow(&e).with_domain(tower(n as i32)))
}

/// `f_{N,C}(x) = (1/4) Σ_{n=0}^N Π_{i=0}^n (log^(i) x)^(-2) + C Π_{i=0}^{N+1} (log^(i) x)^(-2)`.
pub fn f_nc(n: i32, c: f64) -> FuncExpr {
    let mut acc = FuncExpr::rational(0, 1);
    for m in 0..=n {
        acc = acc.add(&inv_sq_product(0, m as u32).scale(0.25));
    }
    acc.add(&inv_sq_product(0, (n + 1) as u32).scale(c)).with_domain(tower(n))
}

#[derive(Debug, Clone, PartialEq)]
pub struct DerivedForms {
    pub big_psi: FuncExpr,
    pub phi: FuncExpr,
    pub f_psi: FuncExpr,
}

/// `Ψ(b) = -log ψ(e^b)`, `Φ(b) = α_d - Ψ(b)/b`, `f_ψ(x) = (2/(d γ_d)) Φ(γ_d^x)`.
pub fn derive_forms(psi: &PsiSpec, d: usize) -> Result<DerivedForms> {
    if d < 2 {
        return Err(Error::UnsupportedDimension(d));
    }
    let p = psi.expr()?;
    let t_q = p.t_domain();
    let b_dom = if t_q > 0.0 { t_q.ln() } else { f64::NEG_INFINITY };
    let big_psi = p.compose(&FuncExpr::var().exp()).log().neg().with_domain(b_dom);
    let phi = FuncExpr::constant(alpha_d(d)).sub(&big_psi.div(&FuncExpr::var())).with_domain(b_dom.max(0.0));
    let g = gamma_d(d);
    let x_dom = if g > 1.0 && b_dom > 0.0 { b_dom.ln() / g.ln() } else { f64::NEG_INFINITY };
    let gx = FuncExpr::constant(g).pow(&FuncExpr::var());
    let f_psi = phi.compose(&gx).scale(2.0 / (d as f64 * g)).with_domain(x_dom);
    Ok(DerivedForms { big_psi, phi, f_psi })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Comparison {
    Le,
    Ge,
    Mixed,
}

pub const DEFAULT_WINDOW: (f64, f64) = (1e4, 1e12);
pub const DEFAULT_SAMPLES: usize = 512;

/// Log-spaced grid of `n` points on `[lo, hi]`.
pub fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n <= 1 {
        return vec![lo];
    }
    let (a, b) = (lo.ln(), hi.ln());
    (0..n).map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp()).collect()
}

/// Sign of `f - g` on a log-spaced sample of the window. A sampled heuristic:
/// it reports what the grid shows, not a proof of eventual order.
pub fn eventually_compare(f: &FuncExpr, g: &FuncExpr, window: (f64, f64), samples: usize) -> Result<Comparison> {
    let (lo, hi) = window;
    if !(lo > 0.0 && hi > lo) {
        return Err(Error::InvalidArgument(format!("bad window [{lo}, {hi}]")));
    }
    let (mut le, mut ge) = (true, true);
    for x in log_grid(lo, hi, samples.max(2)) {
        let (a, b) = (f.eval(x)?, g.eval(x)?);
        let tol = 1e-13 * a.abs().max(b.abs());
        if a - b > tol {
            le = false;
        }
        if b - a > tol {
            ge = false;
        }
    }
    Ok(match (le, ge) {
        (true, _) => Comparison::Le,
        (false, true) => Comparison::Ge,
        _ => Comparison::Mixed,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PsiHypothesisReport {
    pub psi: String,
    pub window: (f64, f64),
    pub samples: usize,
    pub increasing: bool,
    /// Sample pairs `(b_i, b_{i+1})` over which `Ψ` failed to increase.
    pub violations: Vec<(f64, f64)>,
    pub max_slope: f64,
}

/// Samples `Ψ(b)` for `b = log q`, `q` log-spaced over the window.
pub fn validate_psi_hypotheses(psi: &PsiSpec, window: (f64, f64), samples: usize) -> Result<PsiHypothesisReport> {
    let p = psi.expr()?;
    let big_psi = p.compose(&FuncExpr::var().exp()).log().neg();
    let (lo, hi) = window;
    if !(lo > 0.0 && hi > lo) {
        return Err(Error::InvalidArgument(format!("bad window [{lo}, {hi}]")));
    }
    let n = samples.max(2);
    let (a, b) = (lo.ln(), hi.ln());
    let bs: Vec<f64> = (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect();
    let mut vals = Vec::with_capacity(n);
    for &bi in &bs {
        vals.push(big_psi.eval(bi)?);
    }
    let mut violations = Vec::new();
    let mut max_slope = f64::NEG_INFINITY;
    for i in 1..n {
        let slope = (vals[i] - vals[i - 1]) / (bs[i] - bs[i - 1]);
        max_slope = max_slope.max(slope);
        if vals[i] <= vals[i - 1] {
            violations.push((bs[i - 1], bs[i]));
        }
    }
    Ok(PsiHypothesisReport {
        psi: psi.to_string(),
        window,
        samples: n,
        increasing: violations.is_empty(),
        violations,
        max_slope,
    })
}
