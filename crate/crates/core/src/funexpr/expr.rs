use std::fmt;
use std::sync::Arc;

use astro_float::{BigFloat, Consts, RoundingMode};

use crate::error::{Error, Result};

type E = Arc<Node>;

/// Expression tree over one variable. Logarithms are natural.
#[derive(Debug, Clone, PartialEq)]
pub enum Node {
    Const(f64),
    /// Exact rational constant `num/den`, `den > 0`, reduced.
    Rat(i64, i64),
    Var,
    Add(E, E),
    Sub(E, E),
    Mul(E, E),
    Div(E, E),
    Pow(E, E),
    Neg(E),
    Exp(E),
    /// `log^(k)` applied to the argument, `k >= 1`.
    Log(u32, E),
}

/// An expression together with the left end of its domain `(t_domain, ∞)`.
#[derive(Debug, Clone, PartialEq)]
pub struct FuncExpr {
    root: E,
    t_domain: f64,
}

fn rat(n: i128, d: i128) -> Option<Node> {
    if d == 0 {
        return None;
    }
    let (n, d) = if d < 0 { (-n, -d) } else { (n, d) };
    let g = {
        let (mut a, mut b) = (n.unsigned_abs(), d.unsigned_abs());
        while b != 0 {
            (a, b) = (b, a % b);
        }
        a.max(1) as i128
    };
    let (n, d) = (n / g, d / g);
    (i64::try_from(n).ok()).zip(i64::try_from(d).ok()).map(|(n, d)| Node::Rat(n, d))
}

impl Node {
    fn const_value(&self) -> Option<f64> {
        match self {
            Node::Const(c) => Some(*c),
            Node::Rat(n, d) => Some(*n as f64 / *d as f64),
            _ => None,
        }
    }

    fn is_const(&self) -> bool {
        self.const_value().is_some()
    }

    fn is_zero(&self) -> bool {
        self.const_value() == Some(0.0)
    }

    fn is_one(&self) -> bool {
        matches!(self, Node::Rat(1, 1)) || matches!(self, Node::Const(c) if *c == 1.0)
    }
}

fn fold(op: char, a: &Node, b: &Node) -> Option<Node> {
    if let (Node::Rat(an, ad), Node::Rat(bn, bd)) = (a, b) {
        let (an, ad, bn, bd) = (*an as i128, *ad as i128, *bn as i128, *bd as i128);
        let exact = match op {
            '+' => rat(an * bd + bn * ad, ad * bd),
            '-' => rat(an * bd - bn * ad, ad * bd),
            '*' => rat(an * bn, ad * bd),
            '/' if bn != 0 => rat(an * bd, ad * bn),
            '^' if bd == 1 && bn.abs() <= 64 => {
                let e = bn.unsigned_abs() as u32;
                let (pn, pd) = (an.checked_pow(e), ad.checked_pow(e));
                match (pn, pd) {
                    (Some(pn), Some(pd)) if bn >= 0 => rat(pn, pd),
                    (Some(pn), Some(pd)) if pn != 0 => rat(pd, pn),
                    _ => None,
                }
            }
            _ => None,
        };
        if exact.is_some() {
            return exact;
        }
    }
    let (x, y) = (a.const_value()?, b.const_value()?);
    let v = match op {
        '+' => x + y,
        '-' => x - y,
        '*' => x * y,
        '/' => x / y,
        '^' => x.powf(y),
        _ => return None,
    };
    v.is_finite().then_some(Node::Const(v))
}

pub(crate) mod build {
    //! Simplifying constructors. They keep compositions such as `log(exp(u))`
    //! and `log(q^a)` in a form that can be evaluated at large arguments.
    use super::*;

    pub fn c(v: f64) -> E {
        if v.fract() == 0.0 && v.abs() < 1e15 {
            return Arc::new(Node::Rat(v as i64, 1));
        }
        Arc::new(Node::Const(v))
    }

    pub fn r(n: i64, d: i64) -> E {
        Arc::new(rat(n as i128, d as i128).expect("nonzero denominator"))
    }

    pub fn var() -> E {
        Arc::new(Node::Var)
    }

    pub fn add(a: E, b: E) -> E {
        if a.is_zero() {
            return b;
        }
        if b.is_zero() {
            return a;
        }
        if let Some(v) = fold('+', &a, &b) {
            return Arc::new(v);
        }
        if b.is_const() && !a.is_const() {
            return add(b, a);
        }
        if a.is_const() {
            if let Node::Add(x, y) = &*b {
                if x.is_const() {
                    return add(add(a.clone(), x.clone()), y.clone());
                }
            }
        }
        if let Node::Neg(nb) = &*b {
            return sub(a, nb.clone());
        }
        Arc::new(Node::Add(a, b))
    }

    pub fn sub(a: E, b: E) -> E {
        if b.is_zero() {
            return a;
        }
        if a == b {
            return r(0, 1);
        }
        if let Some(v) = fold('-', &a, &b) {
            return Arc::new(v);
        }
        if a.is_zero() {
            return neg(b);
        }
        if let Node::Neg(nb) = &*b {
            return add(a, nb.clone());
        }
        if b.is_const() {
            return add(neg(b), a);
        }
        if let Node::Add(x, y) = &*b {
            if *x == a {
                return neg(y.clone());
            }
            if x.is_const() && a.is_const() {
                return sub(sub(a.clone(), x.clone()), y.clone());
            }
        }
        Arc::new(Node::Sub(a, b))
    }

    pub fn neg(a: E) -> E {
        match &*a {
            Node::Rat(n, d) => Arc::new(Node::Rat(-n, *d)),
            Node::Const(v) => Arc::new(Node::Const(-v)),
            Node::Neg(x) => x.clone(),
            _ => Arc::new(Node::Neg(a)),
        }
    }

    pub fn mul(a: E, b: E) -> E {
        if a.is_zero() || b.is_zero() {
            return r(0, 1);
        }
        if a.is_one() {
            return b;
        }
        if b.is_one() {
            return a;
        }
        if let Some(v) = fold('*', &a, &b) {
            return Arc::new(v);
        }
        if b.is_const() && !a.is_const() {
            return mul(b, a);
        }
        if let Node::Neg(x) = &*a {
            return neg(mul(x.clone(), b));
        }
        if let Node::Neg(y) = &*b {
            return neg(mul(a, y.clone()));
        }
        if a.is_const() {
            if let Node::Mul(x, y) = &*b {
                if x.is_const() {
                    return mul(mul(a.clone(), x.clone()), y.clone());
                }
            }
        }
        Arc::new(Node::Mul(a, b))
    }

    pub fn div(a: E, b: E) -> E {
        if b.is_one() {
            return a;
        }
        if a == b {
            return r(1, 1);
        }
        if let Some(v) = fold('/', &a, &b) {
            return Arc::new(v);
        }
        if let Node::Neg(x) = &*a {
            return neg(div(x.clone(), b));
        }
        match &*a {
            Node::Mul(x, y) if *y == b => return x.clone(),
            Node::Mul(x, y) if *x == b => return y.clone(),
            Node::Add(x, y) => return add(div(x.clone(), b.clone()), div(y.clone(), b)),
            Node::Sub(x, y) => return sub(div(x.clone(), b.clone()), div(y.clone(), b)),
            _ => {}
        }
        if let Some(v) = b.const_value() {
            if v != 0.0 && !a.is_const() {
                if let Node::Rat(n, d) = &*b {
                    return mul(r(*d, *n), a);
                }
            }
        }
        Arc::new(Node::Div(a, b))
    }

    pub fn pow(a: E, b: E) -> E {
        if b.is_zero() {
            return r(1, 1);
        }
        if b.is_one() {
            return a;
        }
        if let Some(v) = fold('^', &a, &b) {
            return Arc::new(v);
        }
        if let Node::Exp(u) = &*a {
            return exp(mul(b, u.clone()));
        }
        if let Node::Pow(x, y) = &*a {
            if b.is_const() && y.is_const() {
                return pow(x.clone(), mul(y.clone(), b));
            }
        }
        Arc::new(Node::Pow(a, b))
    }

    pub fn exp(a: E) -> E {
        if let Some(v) = a.const_value() {
            if v == 0.0 {
                return r(1, 1);
            }
            return c(v.exp());
        }
        if let Node::Log(1, u) = &*a {
            return u.clone();
        }
        Arc::new(Node::Exp(a))
    }

    pub fn log(a: E) -> E {
        logk(1, a)
    }

    /// `log` applied `k` times.
    pub fn logk(k: u32, a: E) -> E {
        if k == 0 {
            return a;
        }
        match &*a {
            Node::Exp(u) => logk(k - 1, u.clone()),
            Node::Log(j, u) => Arc::new(Node::Log(k + j, u.clone())),
            Node::Pow(x, y) => logk(k - 1, mul(y.clone(), log(x.clone()))),
            Node::Mul(x, y) if x.const_value().is_some_and(|v| v > 0.0) => {
                logk(k - 1, add(log(x.clone()), log(y.clone())))
            }
            _ => match a.const_value() {
                Some(v) if v > 0.0 => logk(k - 1, c(v.ln())),
                _ => Arc::new(Node::Log(k, a)),
            },
        }
    }
}

use build::*;

impl FuncExpr {
    pub fn new(root: Arc<Node>) -> Self {
        let t_domain = domain_guard(&root);
        FuncExpr { root, t_domain }
    }

    pub fn with_domain(mut self, t: f64) -> Self {
        self.t_domain = self.t_domain.max(t);
        self
    }

    pub fn root(&self) -> &Arc<Node> {
        &self.root
    }

    pub fn t_domain(&self) -> f64 {
        self.t_domain
    }

    pub fn constant(v: f64) -> Self {
        FuncExpr::new(c(v))
    }

    pub fn rational(n: i64, d: i64) -> Self {
        FuncExpr::new(r(n, d))
    }

    pub fn var() -> Self {
        FuncExpr::new(var())
    }

    /// `log^(i)(x)`; `i = 0` is the identity.
    pub fn iterated_log(i: u32) -> Self {
        FuncExpr::new(logk(i, var()))
    }

    pub fn is_constant(&self) -> Option<f64> {
        self.root.const_value()
    }

    pub fn add(&self, o: &FuncExpr) -> FuncExpr {
        self.combine(o, add(self.root.clone(), o.root.clone()))
    }

    pub fn sub(&self, o: &FuncExpr) -> FuncExpr {
        self.combine(o, sub(self.root.clone(), o.root.clone()))
    }

    pub fn mul(&self, o: &FuncExpr) -> FuncExpr {
        self.combine(o, mul(self.root.clone(), o.root.clone()))
    }

    pub fn div(&self, o: &FuncExpr) -> FuncExpr {
        self.combine(o, div(self.root.clone(), o.root.clone()))
    }

    pub fn pow(&self, o: &FuncExpr) -> FuncExpr {
        self.combine(o, pow(self.root.clone(), o.root.clone()))
    }

    pub fn powf(&self, p: f64) -> FuncExpr {
        self.pow(&FuncExpr::constant(p))
    }

    pub fn scale(&self, k: f64) -> FuncExpr {
        FuncExpr { root: mul(c(k), self.root.clone()), t_domain: self.t_domain }
    }

    pub fn neg(&self) -> FuncExpr {
        FuncExpr { root: neg(self.root.clone()), t_domain: self.t_domain }
    }

    pub fn exp(&self) -> FuncExpr {
        FuncExpr::new(exp(self.root.clone())).with_domain(self.t_domain)
    }

    pub fn log(&self) -> FuncExpr {
        FuncExpr::new(log(self.root.clone())).with_domain(self.t_domain)
    }

    fn combine(&self, o: &FuncExpr, root: E) -> FuncExpr {
        FuncExpr::new(root).with_domain(self.t_domain.max(o.t_domain))
    }

    /// `self(inner(x))`; the domain is recomputed from the composed tree.
    pub fn compose(&self, inner: &FuncExpr) -> FuncExpr {
        FuncExpr::new(substitute(&self.root, &inner.root)).with_domain(inner.t_domain)
    }

    /// Evaluates in f64. Errors below the domain and on any non-finite or
    /// undefined intermediate value.
    pub fn eval(&self, x: f64) -> Result<f64> {
        if !(x > self.t_domain) {
            return Err(Error::Domain(format!("x = {x} is not above the domain bound {}", self.t_domain)));
        }
        eval_f64(&self.root, x)
    }

    /// Evaluates with `bits` of working precision.
    pub fn eval_big(&self, x: &BigFloat, bits: usize) -> Result<BigFloat> {
        let mut cc = Consts::new().map_err(|e| Error::Domain(format!("{e:?}")))?;
        if self.t_domain.is_finite() && x.cmp(&BigFloat::from_f64(self.t_domain, bits)) != Some(1) {
            return Err(Error::Domain(format!("argument is not above the domain bound {}", self.t_domain)));
        }
        eval_big(&self.root, x, bits + 32, &mut cc)
    }

    /// High-precision evaluation with decimal input and output.
    pub fn eval_decimal(&self, x: &str, bits: usize) -> Result<String> {
        let mut cc = Consts::new().map_err(|e| Error::Domain(format!("{e:?}")))?;
        let xv = BigFloat::parse(x, astro_float::Radix::Dec, bits + 32, RoundingMode::ToEven, &mut cc);
        if xv.is_nan() {
            return Err(Error::Parse(format!("bad number '{x}'")));
        }
        let v = self.eval_big(&xv, bits)?;
        let mut v = v;
        v.set_precision(bits, RoundingMode::ToEven).map_err(|e| Error::Domain(format!("{e:?}")))?;
        v.format(astro_float::Radix::Dec, RoundingMode::ToEven, &mut cc).map_err(|e| Error::Domain(format!("{e:?}")))
    }

    /// Evaluation of the same tree at `x` given as `log(x)`, for arguments too
    /// large for f64. Only supported when every occurrence of the variable sits
    /// under at least one logarithm or in a power-law factor.
    pub fn eval_at_log(&self, ln_x: f64) -> Result<f64> {
        eval_log_arg(&self.root, ln_x)
    }
}

impl fmt::Display for FuncExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.root)
    }
}

impl fmt::Display for Node {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Node::Const(v) => write!(f, "{v:?}"),
            Node::Rat(n, 1) => write!(f, "{n}"),
            Node::Rat(n, d) => write!(f, "{n}/{d}"),
            Node::Var => write!(f, "x"),
            Node::Add(a, b) => write!(f, "(add {a} {b})"),
            Node::Sub(a, b) => write!(f, "(sub {a} {b})"),
            Node::Mul(a, b) => write!(f, "(mul {a} {b})"),
            Node::Div(a, b) => write!(f, "(div {a} {b})"),
            Node::Pow(a, b) => write!(f, "(pow {a} {b})"),
            Node::Neg(a) => write!(f, "(neg {a})"),
            Node::Exp(a) => write!(f, "(exp {a})"),
            Node::Log(1, a) => write!(f, "(log {a})"),
            Node::Log(k, a) => write!(f, "(ilog {k} {a})"),
        }
    }
}

pub(crate) fn substitute(node: &E, inner: &E) -> E {
    match &**node {
        Node::Var => inner.clone(),
        Node::Const(_) | Node::Rat(..) => node.clone(),
        Node::Add(a, b) => add(substitute(a, inner), substitute(b, inner)),
        Node::Sub(a, b) => sub(substitute(a, inner), substitute(b, inner)),
        Node::Mul(a, b) => mul(substitute(a, inner), substitute(b, inner)),
        Node::Div(a, b) => div(substitute(a, inner), substitute(b, inner)),
        Node::Pow(a, b) => pow(substitute(a, inner), substitute(b, inner)),
        Node::Neg(a) => neg(substitute(a, inner)),
        Node::Exp(a) => exp(substitute(a, inner)),
        Node::Log(k, a) => logk(*k, substitute(a, inner)),
    }
}

/// `exp^(k)(1)`, with `tower(-1) = 0`.
pub(crate) fn tower(k: i32) -> f64 {
    if k < 0 {
        return 0.0;
    }
    let mut t = 1.0f64;
    for _ in 0..k {
        t = t.exp();
    }
    t
}

/// Lower bound of the domain: `log^(k)(c·x)` is defined for `c·x > exp^(k-2)(1)`.
/// Positivity of intermediate values is checked again during evaluation.
fn domain_guard(node: &Node) -> f64 {
    match node {
        Node::Var | Node::Const(_) | Node::Rat(..) => f64::NEG_INFINITY,
        Node::Log(k, a) => {
            let inner = domain_guard(a);
            let own = match &**a {
                Node::Var => tower(*k as i32 - 2),
                Node::Mul(s, v) if matches!(**v, Node::Var) => match s.const_value() {
                    Some(sc) if sc > 0.0 => tower(*k as i32 - 2) / sc,
                    _ => f64::NEG_INFINITY,
                },
                _ => f64::NEG_INFINITY,
            };
            inner.max(own)
        }
        Node::Add(a, b) | Node::Sub(a, b) | Node::Mul(a, b) | Node::Div(a, b) | Node::Pow(a, b) => {
            domain_guard(a).max(domain_guard(b))
        }
        Node::Neg(a) | Node::Exp(a) => domain_guard(a),
    }
}

fn finite(v: f64, what: &str) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::Domain(format!("{what} produced a non-finite value")))
    }
}

fn eval_f64(node: &Node, x: f64) -> Result<f64> {
    Ok(match node {
        Node::Const(v) => *v,
        Node::Rat(n, d) => *n as f64 / *d as f64,
        Node::Var => x,
        Node::Add(a, b) => eval_f64(a, x)? + eval_f64(b, x)?,
        Node::Sub(a, b) => eval_f64(a, x)? - eval_f64(b, x)?,
        Node::Mul(a, b) => finite(eval_f64(a, x)? * eval_f64(b, x)?, "product")?,
        Node::Div(a, b) => {
            let den = eval_f64(b, x)?;
            if den == 0.0 {
                return Err(Error::Domain("division by zero".into()));
            }
            finite(eval_f64(a, x)? / den, "quotient")?
        }
        Node::Pow(a, b) => {
            let base = eval_f64(a, x)?;
            let e = eval_f64(b, x)?;
            if base < 0.0 && e.fract() != 0.0 {
                return Err(Error::Domain(format!("negative base {base} with fractional exponent")));
            }
            if base == 0.0 && e < 0.0 {
                return Err(Error::Domain("zero to a negative power".into()));
            }
            finite(base.powf(e), "power")?
        }
        Node::Neg(a) => -eval_f64(a, x)?,
        Node::Exp(a) => finite(eval_f64(a, x)?.exp(), "exp")?,
        Node::Log(k, a) => {
            let mut v = eval_f64(a, x)?;
            for _ in 0..*k {
                if !(v > 0.0) {
                    return Err(Error::Domain(format!("log of non-positive value {v}")));
                }
                v = v.ln();
            }
            v
        }
    })
}

/// Evaluation with the variable supplied as its logarithm. Supports `log^(k)(c·x)`
/// and `x^p` factors appearing multiplicatively; the result must itself fit in f64.
fn eval_log_arg(node: &Node, ln_x: f64) -> Result<f64> {
    fn ln_abs(node: &Node, ln_x: f64) -> Result<Option<(f64, f64)>> {
        // Returns (log|value|, sign) for multiplicative structures.
        Ok(match node {
            Node::Var => Some((ln_x, 1.0)),
            Node::Mul(a, b) => match (ln_abs(a, ln_x)?, ln_abs(b, ln_x)?) {
                (Some((la, sa)), Some((lb, sb))) => Some((la + lb, sa * sb)),
                _ => None,
            },
            Node::Div(a, b) => match (ln_abs(a, ln_x)?, ln_abs(b, ln_x)?) {
                (Some((la, sa)), Some((lb, sb))) => Some((la - lb, sa * sb)),
                _ => None,
            },
            Node::Pow(a, b) => {
                let e = eval_log_arg(b, ln_x)?;
                match ln_abs(a, ln_x)? {
                    Some((la, 1.0)) => Some((la * e, 1.0)),
                    _ => None,
                }
            }
            Node::Neg(a) => ln_abs(a, ln_x)?.map(|(l, s)| (l, -s)),
            _ => {
                let v = eval_log_arg(node, ln_x)?;
                if v == 0.0 {
                    return Ok(Some((f64::NEG_INFINITY, 1.0)));
                }
                Some((v.abs().ln(), v.signum()))
            }
        })
    }
    Ok(match node {
        Node::Const(v) => *v,
        Node::Rat(n, d) => *n as f64 / *d as f64,
        Node::Var => finite(ln_x.exp(), "variable")?,
        Node::Add(a, b) => eval_log_arg(a, ln_x)? + eval_log_arg(b, ln_x)?,
        Node::Sub(a, b) => eval_log_arg(a, ln_x)? - eval_log_arg(b, ln_x)?,
        Node::Neg(a) => -eval_log_arg(a, ln_x)?,
        Node::Exp(a) => finite(eval_log_arg(a, ln_x)?.exp(), "exp")?,
        Node::Log(k, a) => {
            let mut v = match ln_abs(a, ln_x)? {
                Some((l, s)) if s > 0.0 => l,
                _ => return Err(Error::Domain("log of non-positive value".into())),
            };
            for _ in 1..*k {
                if !(v > 0.0) {
                    return Err(Error::Domain(format!("log of non-positive value {v}")));
                }
                v = v.ln();
            }
            v
        }
        Node::Mul(..) | Node::Div(..) | Node::Pow(..) => match ln_abs(node, ln_x)? {
            Some((l, s)) => s * finite(l.exp(), "product")?,
            None => return Err(Error::Domain("unsupported structure for log-argument evaluation".into())),
        },
    })
}

fn big_err(v: BigFloat, what: &str) -> Result<BigFloat> {
    if v.is_nan() || v.is_inf() {
        Err(Error::Domain(format!("{what} produced a non-finite value")))
    } else {
        Ok(v)
    }
}

fn eval_big(node: &Node, x: &BigFloat, p: usize, cc: &mut Consts) -> Result<BigFloat> {
    let rm = RoundingMode::ToEven;
    Ok(match node {
        Node::Const(v) => BigFloat::from_f64(*v, p),
        Node::Rat(n, d) => BigFloat::from_i64(*n, p).div(&BigFloat::from_i64(*d, p), p, rm),
        Node::Var => x.clone(),
        Node::Add(a, b) => eval_big(a, x, p, cc)?.add(&eval_big(b, x, p, cc)?, p, rm),
        Node::Sub(a, b) => eval_big(a, x, p, cc)?.sub(&eval_big(b, x, p, cc)?, p, rm),
        Node::Mul(a, b) => big_err(eval_big(a, x, p, cc)?.mul(&eval_big(b, x, p, cc)?, p, rm), "product")?,
        Node::Div(a, b) => {
            let den = eval_big(b, x, p, cc)?;
            if den.is_zero() {
                return Err(Error::Domain("division by zero".into()));
            }
            big_err(eval_big(a, x, p, cc)?.div(&den, p, rm), "quotient")?
        }
        Node::Pow(a, b) => {
            let base = eval_big(a, x, p, cc)?;
            let e = eval_big(b, x, p, cc)?;
            if base.is_negative() {
                if !e.is_int() {
                    return Err(Error::Domain("negative base with fractional exponent".into()));
                }
                let mag = base.abs().pow(&e, p, rm, cc);
                let odd = !e.div(&BigFloat::from_i64(2, p), p, rm).is_int();
                if odd {
                    mag.neg()
                } else {
                    mag
                }
            } else {
                if base.is_zero() && e.is_negative() {
                    return Err(Error::Domain("zero to a negative power".into()));
                }
                big_err(base.pow(&e, p, rm, cc), "power")?
            }
        }
        Node::Neg(a) => eval_big(a, x, p, cc)?.neg(),
        Node::Exp(a) => big_err(eval_big(a, x, p, cc)?.exp(p, rm, cc), "exp")?,
        Node::Log(k, a) => {
            let mut v = eval_big(a, x, p, cc)?;
            for _ in 0..*k {
                if !v.is_positive() || v.is_zero() {
                    return Err(Error::Domain("log of non-positive value".into()));
                }
                v = v.ln(p, rm, cc);
            }
            v
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simplifications() {
        let x = var();
        assert_eq!(log(exp(x.clone())), x);
        assert_eq!(log(log(x.clone())), logk(2, x.clone()));
        let p = pow(x.clone(), c(-2.0));
        assert_eq!(*log(p), Node::Mul(r(-2, 1), log(x.clone())));
        assert_eq!(sub(c(1.5), c(1.5)), r(0, 1));
        assert_eq!(div(mul(x.clone(), log(x.clone())), log(x.clone())), x);
        assert_eq!(add(r(1, 4), r(1, 4)), r(1, 2));
    }

    #[test]
    fn eval_examples() {
        let psi2 = FuncExpr::var().powf(-2.0);
        assert!((psi2.eval(10.0).unwrap() - 0.01).abs() < 1e-17);
        let ll = FuncExpr::iterated_log(2);
        assert_eq!(ll.eval(std::f64::consts::E).unwrap(), 0.0);
        assert!(ll.eval(1.0).is_err());
        let l = FuncExpr::new(log(log(var())));
        assert!(l.eval(0.5).is_err());
    }

    #[test]
    fn domain_guard_below_is_error() {
        let f = FuncExpr::iterated_log(3);
        assert_eq!(f.t_domain(), std::f64::consts::E);
        assert!(matches!(f.eval(2.0), Err(Error::Domain(_))));
        assert!(f.eval(20.0).is_ok());
        let g = FuncExpr::iterated_log(2).powf(-2.0);
        assert!(matches!(g.eval(std::f64::consts::E), Err(Error::Domain(_))));
    }

    #[test]
    fn big_eval_matches_f64() {
        let f = FuncExpr::new(div(r(1, 4), pow(var(), r(2, 1)))).add(&FuncExpr::new(log(var())));
        let x = BigFloat::from_f64(7.25, 200);
        let v = f.eval_big(&x, 200).unwrap();
        let s = format!("{v}");
        let parsed: f64 = s.parse().unwrap();
        assert!((parsed - f.eval(7.25).unwrap()).abs() < 1e-14);
    }

    #[test]
    fn log_arg_evaluation() {
        let f = FuncExpr::new(mul(c(3.0), logk(2, mul(c(0.5), var()))));
        let direct = f.eval(1e20).unwrap();
        let via = f.eval_at_log(1e20f64.ln()).unwrap();
        assert!((direct - via).abs() < 1e-12);
        let huge = f.eval_at_log(1e6).unwrap();
        assert!((huge - 3.0 * (1e6 - 2f64.ln()).ln()).abs() < 1e-9);
    }

    #[test]
    fn rat_exactness() {
        assert_eq!(*r(2, 4), Node::Rat(1, 2));
    }
}
