//! Asymptotic expansions in log-monomials `c · Π L_i^{e_i}` with `L_0 = x`
//! and `L_i = log^(i) x`, ordered by dominance as `x → ∞`.

use std::cmp::Ordering;
use std::fmt;

use super::expr::{build, FuncExpr, Node};

/// Number of tracked log levels (`L_0 .. L_{DEPTH-1}`).
pub const DEPTH: usize = 10;
/// Maximum number of terms kept after each operation.
pub const MAX_TERMS: usize = 14;
const EXP_TOL: f64 = 1e-12;
const CANCEL_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct Monomial {
    pub coef: f64,
    pub exps: [f64; DEPTH],
}

impl Monomial {
    pub fn constant(c: f64) -> Self {
        Monomial { coef: c, exps: [0.0; DEPTH] }
    }

    /// `c · L_level^e`.
    pub fn power(c: f64, level: usize, e: f64) -> Self {
        let mut exps = [0.0; DEPTH];
        exps[level] = e;
        Monomial { coef: c, exps }
    }

    pub fn is_constant(&self) -> bool {
        self.exps.iter().all(|e| e.abs() <= EXP_TOL)
    }

    /// Growth class relative to the constant 1.
    pub fn vs_one(&self) -> Ordering {
        cmp_exps(&self.exps, &[0.0; DEPTH])
    }

    fn mul(&self, o: &Monomial) -> Monomial {
        let mut exps = [0.0; DEPTH];
        for (i, e) in exps.iter_mut().enumerate() {
            *e = self.exps[i] + o.exps[i];
        }
        Monomial { coef: self.coef * o.coef, exps }
    }

    pub fn to_expr(&self) -> FuncExpr {
        let mut root = build::c(self.coef);
        for (i, &e) in self.exps.iter().enumerate() {
            if e.abs() > EXP_TOL {
                let li = build::logk(i as u32, build::var());
                root = build::mul(root, build::pow(li, build::c(e)));
            }
        }
        FuncExpr::new(root)
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.coef)?;
        for (i, &e) in self.exps.iter().enumerate() {
            if e.abs() > EXP_TOL {
                write!(f, "·L{i}^{e}")?;
            }
        }
        Ok(())
    }
}

/// Lexicographic comparison of exponent vectors; `Greater` means faster growth.
pub fn cmp_exps(a: &[f64; DEPTH], b: &[f64; DEPTH]) -> Ordering {
    for i in 0..DEPTH {
        let d = a[i] - b[i];
        if d > EXP_TOL {
            return Ordering::Greater;
        }
        if d < -EXP_TOL {
            return Ordering::Less;
        }
    }
    Ordering::Equal
}

/// Sum of monomials, most dominant first. `exact` is false once truncation has
/// discarded any term.
#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub terms: Vec<Monomial>,
    pub exact: bool,
}

impl fmt::Display for Series {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, t) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{t}")?;
        }
        if !self.exact {
            write!(f, " + ...")?;
        }
        Ok(())
    }
}

impl Series {
    pub fn zero() -> Self {
        Series { terms: vec![], exact: true }
    }

    pub fn constant(c: f64) -> Self {
        Series::from_terms(vec![Monomial::constant(c)], true)
    }

    pub fn from_terms(terms: Vec<Monomial>, exact: bool) -> Self {
        let mut terms = terms;
        terms.sort_by(|a, b| cmp_exps(&b.exps, &a.exps));
        let mut merged: Vec<Monomial> = Vec::with_capacity(terms.len());
        let mut scale: Vec<f64> = Vec::new();
        for t in terms {
            if let Some(last) = merged.last_mut() {
                if cmp_exps(&last.exps, &t.exps) == Ordering::Equal {
                    last.coef += t.coef;
                    let s = scale.last_mut().unwrap();
                    *s = s.max(t.coef.abs());
                    continue;
                }
            }
            scale.push(t.coef.abs());
            merged.push(t);
        }
        let mut out: Vec<Monomial> = merged
            .into_iter()
            .zip(scale)
            .filter(|(m, s)| m.coef != 0.0 && m.coef.abs() > CANCEL_TOL * s)
            .map(|(m, _)| m)
            .collect();
        let mut exact = exact;
        if out.len() > MAX_TERMS {
            out.truncate(MAX_TERMS);
            exact = false;
        }
        Series { terms: out, exact }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn lead(&self) -> Option<&Monomial> {
        self.terms.first()
    }

    pub fn as_constant(&self) -> Option<f64> {
        match self.terms.as_slice() {
            [] => Some(0.0),
            [t] if t.is_constant() => Some(t.coef),
            _ => None,
        }
    }

    pub fn add(&self, o: &Series) -> Series {
        let mut t = self.terms.clone();
        t.extend(o.terms.iter().cloned());
        Series::from_terms(t, self.exact && o.exact)
    }

    pub fn neg(&self) -> Series {
        self.scale(-1.0)
    }

    pub fn scale(&self, k: f64) -> Series {
        let t = self.terms.iter().map(|m| Monomial { coef: m.coef * k, exps: m.exps }).collect();
        Series::from_terms(t, self.exact)
    }

    pub fn mul(&self, o: &Series) -> Series {
        let mut t = Vec::with_capacity(self.terms.len() * o.terms.len());
        for a in &self.terms {
            for b in &o.terms {
                t.push(a.mul(b));
            }
        }
        Series::from_terms(t, self.exact && o.exact)
    }

    fn mul_mono(&self, m: &Monomial) -> Series {
        Series::from_terms(self.terms.iter().map(|a| a.mul(m)).collect(), self.exact)
    }

    /// Splits `s = lead · (1 + u)` with every term of `u` vanishing.
    fn split(&self) -> Option<(Monomial, Series)> {
        let lead = self.lead()?.clone();
        let inv = Monomial { coef: 1.0 / lead.coef, exps: lead.exps.map(|e| -e) };
        let rest = Series::from_terms(self.terms[1..].iter().map(|m| m.mul(&inv)).collect(), self.exact);
        Some((lead, rest))
    }

    /// `Σ_n c_n u^n` for `n = 0..=MAX_TERMS`.
    fn power_series(u: &Series, coef: impl Fn(usize) -> f64) -> Series {
        let mut acc = Series::constant(coef(0));
        if u.is_zero() {
            return acc;
        }
        let mut un = Series::constant(1.0);
        for n in 1..=MAX_TERMS {
            un = un.mul(u);
            if un.is_zero() {
                break;
            }
            let c = coef(n);
            if c != 0.0 {
                acc = acc.add(&un.scale(c));
            }
        }
        // the tail beyond MAX_TERMS is not represented
        acc.exact = false;
        acc
    }

    pub fn powf(&self, p: f64) -> Option<Series> {
        if p == 0.0 {
            return Some(Series::constant(1.0));
        }
        let (lead, u) = match self.split() {
            Some(s) => s,
            None => return (p > 0.0).then(Series::zero),
        };
        let lc = if lead.coef > 0.0 {
            lead.coef.powf(p)
        } else if p.fract() == 0.0 {
            lead.coef.powi(p as i32)
        } else {
            return None;
        };
        let lp = Monomial { coef: lc, exps: lead.exps.map(|e| e * p) };
        let bin = |n: usize| {
            let mut c = 1.0;
            for k in 0..n {
                c *= (p - k as f64) / (k as f64 + 1.0);
            }
            c
        };
        let s = if u.is_zero() {
            Series::constant(1.0)
        } else {
            let mut s = Series::power_series(&u, bin);
            s.exact = u.exact && p.fract() == 0.0 && p > 0.0 && (p as usize) < MAX_TERMS;
            s
        };
        Some(s.mul_mono(&lp))
    }

    pub fn inv(&self) -> Option<Series> {
        self.powf(-1.0)
    }

    pub fn log(&self) -> Option<Series> {
        let (lead, u) = self.split()?;
        if lead.coef <= 0.0 || lead.exps[DEPTH - 1].abs() > EXP_TOL {
            return None;
        }
        let mut terms = vec![Monomial::constant(lead.coef.ln())];
        for i in 0..DEPTH - 1 {
            if lead.exps[i].abs() > EXP_TOL {
                terms.push(Monomial::power(lead.exps[i], i + 1, 1.0));
            }
        }
        let base = Series::from_terms(terms, true);
        if u.is_zero() {
            return Some(base);
        }
        let tail = Series::power_series(&u, |n| {
            if n == 0 {
                0.0
            } else {
                let s = if n % 2 == 1 { 1.0 } else { -1.0 };
                s / n as f64
            }
        });
        Some(base.add(&tail))
    }

    /// Defined when the argument is a constant plus `Σ c_j L_j` (`j ≥ 1`) plus
    /// vanishing terms.
    /// An argument tending to `-∞` at least like `-x^ε` gives an inexact zero.
    pub fn exp(&self) -> Option<Series> {
        if let Some(lead) = self.lead() {
            if lead.coef < 0.0 && lead.exps[0] > EXP_TOL {
                return Some(Series::from_terms(vec![], false));
            }
        }
        let mut head = Monomial::constant(1.0);
        let mut rest = Vec::new();
        for t in &self.terms {
            if t.is_constant() {
                head.coef *= t.coef.exp();
                continue;
            }
            match t.vs_one() {
                Ordering::Less => rest.push(t.clone()),
                _ => {
                    let nz: Vec<usize> = (0..DEPTH).filter(|&i| t.exps[i].abs() > EXP_TOL).collect();
                    match nz.as_slice() {
                        [j] if *j >= 1 && (t.exps[*j] - 1.0).abs() <= EXP_TOL => head.exps[j - 1] += t.coef,
                        _ => return None,
                    }
                }
            }
        }
        if !head.coef.is_finite() {
            return None;
        }
        let v = Series::from_terms(rest, self.exact);
        let e = if v.is_zero() {
            Series::constant(1.0)
        } else {
            Series::power_series(&v, |n| {
                let mut f = 1.0;
                for k in 1..=n {
                    f /= k as f64;
                }
                f
            })
        };
        Some(e.mul_mono(&head))
    }

    /// Expression `Σ c · Π L_i^{e_i}`.
    pub fn to_expr(&self) -> FuncExpr {
        let mut root = build::c(0.0);
        let mut t_dom = f64::NEG_INFINITY;
        for t in &self.terms {
            let e = t.to_expr();
            t_dom = t_dom.max(e.t_domain());
            root = build::add(root, e.root().clone());
        }
        FuncExpr::new(root).with_domain(t_dom)
    }
}

/// Expansion of an expression, when it lies in the supported class.
pub fn expand(f: &FuncExpr) -> Option<Series> {
    expand_node(f.root())
}

fn expand_node(n: &Node) -> Option<Series> {
    Some(match n {
        Node::Const(v) => Series::constant(*v),
        Node::Rat(a, b) => Series::constant(*a as f64 / *b as f64),
        Node::Var => Series::from_terms(vec![Monomial::power(1.0, 0, 1.0)], true),
        Node::Add(a, b) => expand_node(a)?.add(&expand_node(b)?),
        Node::Sub(a, b) => expand_node(a)?.add(&expand_node(b)?.neg()),
        Node::Mul(a, b) => expand_node(a)?.mul(&expand_node(b)?),
        Node::Div(a, b) => expand_node(a)?.mul(&expand_node(b)?.inv()?),
        Node::Neg(a) => expand_node(a)?.neg(),
        Node::Pow(a, b) => {
            let base = expand_node(a)?;
            let e = expand_node(b)?;
            match e.as_constant() {
                Some(p) => base.powf(p)?,
                None => e.mul(&base.log()?).exp()?,
            }
        }
        Node::Exp(a) => expand_node(a)?.exp()?,
        Node::Log(k, a) => {
            let mut s = expand_node(a)?;
            for _ in 0..*k {
                s = s.log()?;
            }
            s
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::funexpr::parse_expr;

    fn ex(s: &str) -> Series {
        expand(&parse_expr(s).unwrap()).unwrap()
    }

    #[test]
    fn power_laws() {
        let s = ex("0.2/x^2");
        assert_eq!(s.terms.len(), 1);
        assert!((s.terms[0].coef - 0.2).abs() < 1e-15);
        assert_eq!(s.terms[0].exps[0], -2.0);
    }

    #[test]
    fn log_of_scaled_argument() {
        let s = ex("log(3*x)");
        assert_eq!(s.terms.len(), 2);
        assert_eq!(s.terms[0].exps[1], 1.0);
        assert!((s.terms[1].coef - 3f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn iterated_log_of_scaled_argument_has_vanishing_tail() {
        let s = ex("log(log(2*x))");
        assert_eq!(s.terms[0].exps[2], 1.0);
        let t = &s.terms[1];
        assert_eq!(t.exps[1], -1.0);
        assert!((t.coef - 2f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn exp_of_log_linear() {
        let s = ex("exp(2*log(x) + 1)");
        assert_eq!(s.terms.len(), 1);
        assert!((s.terms[0].coef - 1f64.exp()).abs() < 1e-15);
        assert_eq!(s.terms[0].exps[0], 2.0);
        assert!(expand(&parse_expr("exp(x)").unwrap()).is_none());
    }

    #[test]
    fn exponentially_small_terms_are_dropped() {
        let s = ex("0.5 + 0.8^x");
        assert_eq!(s.as_constant(), Some(0.5));
        assert!(!s.exact);
        assert!(!ex("exp(-sqrt(x))").exact);
    }

    #[test]
    fn expansion_matches_values() {
        let f = parse_expr("(1/x^2)*(1/4 + 0.3/log(x)^2) + log(x)/x^3").unwrap();
        let s = expand(&f).unwrap();
        let g = s.to_expr();
        for x in [1e3, 1e6, 1e9] {
            let a = f.eval(x).unwrap();
            let b = g.eval(x).unwrap();
            assert!((a - b).abs() <= 1e-12 * a.abs(), "{a} {b}");
        }
    }

    #[test]
    fn cancellation_to_zero() {
        let s = ex("1/(4*x^2) - 0.25*x^(-2)");
        assert!(s.is_zero());
    }
}
