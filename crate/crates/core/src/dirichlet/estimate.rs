//! Estimates of `C_{H,ψ}(x)` and `ω_H(x)` over tuples of per-coordinate convergents.

use num_bigint::BigInt;
use serde::{Serialize, Serializer};

use crate::cfrac::{convergents, expand_real, ln_abs_error, Convergent, Rational};
use crate::error::{Error, Result};
use crate::funexpr::{FuncExpr, PsiSpec};
use crate::heights::{HeightKind, RationalPoint};
use crate::real::{ln_bigint, Real};

/// Convergents of each coordinate with `ln q <= ln_q_max`, with `ln q` and
/// `ln |x_i - p/q|` precomputed.
#[derive(Debug, Clone)]
pub struct ConvergentTable {
    pub convs: Vec<Vec<Convergent>>,
    pub ln_q: Vec<Vec<f64>>,
    pub ln_err: Vec<Vec<f64>>,
}

fn expand_to(x: &Real, ln_q_max: f64) -> Result<Vec<Convergent>> {
    if let Real::Rational(r) = x {
        let cf = crate::cfrac::expand_rational(r);
        return Ok(convergents(&cf, cf.last_index()));
    }
    // q_n >= Fib(n+1) bounds the depth; each term costs about 2 log2 q bits
    let depth = (ln_q_max / 0.48).ceil() as usize + 4;
    let mut bits = (4.0 * ln_q_max / std::f64::consts::LN_2) as u32 + 128;
    loop {
        match expand_real(x, depth, bits) {
            Ok(cf) => {
                let cs = convergents(&cf, cf.last_index());
                let top = cs.last().map(|c| ln_bigint(&c.q)).unwrap_or(0.0);
                if top > ln_q_max || cf.last_index() + 1 < depth {
                    return Ok(cs);
                }
                return Err(Error::PrecisionExhausted { obtained: cs.len(), bits });
            }
            Err(Error::PrecisionExhausted { .. }) if bits < 1 << 20 => bits *= 2,
            Err(e) => return Err(e),
        }
    }
}

pub fn convergent_table(x: &[Real], ln_q_max: f64) -> Result<ConvergentTable> {
    if x.is_empty() {
        return Err(Error::UnsupportedDimension(0));
    }
    let mut t = ConvergentTable { convs: vec![], ln_q: vec![], ln_err: vec![] };
    for xi in x {
        let cs: Vec<Convergent> =
            expand_to(xi, ln_q_max)?.into_iter().filter(|c| ln_bigint(&c.q) <= ln_q_max).collect();
        let mut lq = Vec::with_capacity(cs.len());
        let mut le = Vec::with_capacity(cs.len());
        for c in &cs {
            lq.push(ln_bigint(&c.q));
            le.push(ln_abs_error(xi, &c.value())?);
        }
        t.convs.push(cs);
        t.ln_q.push(lq);
        t.ln_err.push(le);
    }
    Ok(t)
}

struct Tuple {
    idx: Vec<usize>,
    ln_h: f64,
    ln_err: f64,
}

/// Every tuple with `2 <= H <= e^{ln_q_max}` and nonzero error.
fn tuples(t: &ConvergentTable, kind: HeightKind, ln_q_max: f64) -> Vec<Tuple> {
    let d = t.convs.len();
    let mut out = Vec::new();
    let mut idx = vec![0usize; d];
    if t.convs.iter().any(|c| c.is_empty()) {
        return out;
    }
    loop {
        let ln_h = match kind {
            HeightKind::Max => idx.iter().enumerate().map(|(i, &n)| t.ln_q[i][n]).fold(f64::NEG_INFINITY, f64::max),
            HeightKind::Min => idx.iter().enumerate().map(|(i, &n)| t.ln_q[i][n]).fold(f64::INFINITY, f64::min),
            HeightKind::Prod => idx.iter().enumerate().map(|(i, &n)| t.ln_q[i][n]).sum(),
            HeightKind::Lcm => {
                let qs: Vec<BigInt> = idx.iter().enumerate().map(|(i, &n)| t.convs[i][n].q.clone()).collect();
                ln_bigint(&kind.combine(&qs))
            }
        };
        let ln_err = idx.iter().enumerate().map(|(i, &n)| t.ln_err[i][n]).fold(f64::NEG_INFINITY, f64::max);
        if ln_h >= std::f64::consts::LN_2 - 1e-12 && ln_h <= ln_q_max + 1e-12 && ln_err > f64::NEG_INFINITY {
            out.push(Tuple { idx: idx.clone(), ln_h, ln_err });
        }
        let mut j = 0;
        loop {
            if j == d {
                return out;
            }
            idx[j] += 1;
            if idx[j] < t.convs[j].len() {
                break;
            }
            idx[j] = 0;
            j += 1;
        }
    }
}

fn ser_point<S: Serializer>(r: &RationalPoint, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(r.coords.iter().map(|c| c.to_string()))
}

fn ser_int<S: Serializer>(n: &BigInt, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&n.to_string())
}

/// A candidate rational point with its height and error. Errors come from
/// certified enclosures refined until the logarithm is known to about 1e-9.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ApproximationRecord {
    #[serde(serialize_with = "ser_point")]
    pub r: RationalPoint,
    #[serde(serialize_with = "ser_int")]
    pub height: BigInt,
    pub ln_height: f64,
    /// `ln max_i |x_i - r_i|`.
    pub ln_error: f64,
    /// `ln (error / ψ(height))`.
    pub ln_ratio: f64,
}

impl ApproximationRecord {
    pub fn error(&self) -> f64 {
        self.ln_error.exp()
    }

    pub fn ratio(&self) -> f64 {
        self.ln_ratio.exp()
    }
}

fn record(t: &ConvergentTable, tup: &Tuple, kind: HeightKind, ln_ratio: f64) -> Result<ApproximationRecord> {
    let coords: Vec<Rational> = tup.idx.iter().enumerate().map(|(i, &n)| t.convs[i][n].value()).collect();
    let r = RationalPoint::new(coords)?;
    let height = crate::heights::height(kind, &r);
    Ok(ApproximationRecord { r, height, ln_height: tup.ln_h, ln_error: tup.ln_err, ln_ratio })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RunningMin {
    pub ln_height: f64,
    pub min_ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CEstimate {
    /// Minimum of `error / ψ(H)` over candidates with `H` in the window.
    pub min_ratio: f64,
    pub best: Option<ApproximationRecord>,
    /// Running minimum in order of increasing height.
    pub running: Vec<RunningMin>,
    /// `(ln H_lo, ln H_hi)`.
    pub window: (f64, f64),
    pub candidates: usize,
}

fn big_psi(psi: &PsiSpec) -> Result<FuncExpr> {
    Ok(psi.expr()?.compose(&FuncExpr::var().exp()).log().neg())
}

/// Minimum of `|x - r| / ψ(H(r))` over convergent tuples with
/// `H(r) ∈ [h_lo, q_max]`; `h_lo` defaults to `sqrt(q_max)`. Requiring a large
/// height keeps every coordinate of the candidates close to `x`.
pub fn estimate_c(x: &[Real], kind: HeightKind, psi: &PsiSpec, q_max: f64, h_lo: Option<f64>) -> Result<CEstimate> {
    if !(q_max >= 2.0) {
        return Err(Error::InvalidArgument("Q_max must be at least 2".into()));
    }
    estimate_c_log(x, kind, psi, q_max.ln(), h_lo.map(f64::ln))
}

pub fn estimate_c_log(
    x: &[Real],
    kind: HeightKind,
    psi: &PsiSpec,
    ln_q_max: f64,
    ln_h_lo: Option<f64>,
) -> Result<CEstimate> {
    let lo = ln_h_lo.unwrap_or(0.5 * ln_q_max).max(std::f64::consts::LN_2);
    let table = convergent_table(x, ln_q_max)?;
    let bp = big_psi(psi)?;
    let mut cands: Vec<(Tuple, f64)> = Vec::new();
    for tup in tuples(&table, kind, ln_q_max) {
        if tup.ln_h < lo - 1e-12 {
            continue;
        }
        let lr = tup.ln_err + bp.eval(tup.ln_h)?;
        cands.push((tup, lr));
    }
    cands.sort_by(|a, b| a.0.ln_h.total_cmp(&b.0.ln_h));
    let mut running = Vec::new();
    let mut best: Option<usize> = None;
    for (i, (tup, lr)) in cands.iter().enumerate() {
        if best.map_or(true, |b| *lr < cands[b].1) {
            best = Some(i);
        }
        running.push(RunningMin { ln_height: tup.ln_h, min_ratio: cands[best.unwrap()].1.exp() });
    }
    let best_rec = match best {
        Some(b) => Some(record(&table, &cands[b].0, kind, cands[b].1)?),
        None => None,
    };
    Ok(CEstimate {
        min_ratio: best_rec.as_ref().map_or(f64::INFINITY, |r| r.ratio()),
        best: best_rec,
        running,
        window: (lo, ln_q_max),
        candidates: cands.len(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OmegaEstimate {
    /// Slope of the upper hull of `(ln H, -ln error)` over the middle of the window.
    pub omega: f64,
    /// Largest `-ln error / ln H` in the window.
    pub window_max: f64,
    /// `(ln H_lo, ln H_hi)`.
    pub window: (f64, f64),
    pub hull_points: usize,
    /// `hull` or `window_max` when the hull is too short.
    pub method: String,
    pub candidates: usize,
}

/// Upper convex hull of points sorted by abscissa.
fn upper_hull(pts: &[(f64, f64)]) -> Vec<(f64, f64)> {
    let mut u: Vec<(f64, f64)> = Vec::new();
    for &p in pts {
        while u.len() >= 2 {
            let (a, b) = (u[u.len() - 2], u[u.len() - 1]);
            if (b.0 - a.0) * (p.1 - a.1) - (b.1 - a.1) * (p.0 - a.0) >= 0.0 {
                u.pop();
            } else {
                break;
            }
        }
        u.push(p);
    }
    u
}

fn hull_value(u: &[(f64, f64)], a: f64) -> f64 {
    for w in u.windows(2) {
        if w[0].0 <= a && a <= w[1].0 {
            let t = (a - w[0].0) / (w[1].0 - w[0].0);
            return w[0].1 + t * (w[1].1 - w[0].1);
        }
    }
    u.last().map_or(f64::NAN, |p| p.1)
}

/// Estimates `ω_H(x)` from candidates with `H ∈ [sqrt(Q_max), Q_max]`.
///
/// The best approximations trace a line `-ln error ≈ ω ln H + c`; the window
/// maximum of the ratio carries the bias `c / ln H`, so the reported value is
/// the slope of the upper hull between `0.625` and `0.875` of `ln Q_max`.
pub fn estimate_omega(x: &[Real], kind: HeightKind, q_max: f64) -> Result<OmegaEstimate> {
    if !(q_max >= 4.0) {
        return Err(Error::InvalidArgument("Q_max must be at least 4".into()));
    }
    estimate_omega_log(x, kind, q_max.ln())
}

pub fn estimate_omega_log(x: &[Real], kind: HeightKind, ln_q_max: f64) -> Result<OmegaEstimate> {
    let table = convergent_table(x, ln_q_max)?;
    let l = ln_q_max;
    let mut win: Vec<(f64, f64)> = tuples(&table, kind, l)
        .into_iter()
        .filter(|t| t.ln_h >= 0.5 * l - 1e-12)
        .map(|t| (t.ln_h, -t.ln_err))
        .collect();
    if win.is_empty() {
        return Err(Error::InvalidArgument(format!("no candidates with ln H in [{}, {l}]", 0.5 * l)));
    }
    win.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    win.dedup();
    let window_max = win.iter().map(|p| p.1 / p.0).fold(f64::NEG_INFINITY, f64::max);
    // a point is dominated when another reaches a smaller error at no larger height
    let mut front: Vec<(f64, f64)> = Vec::new();
    let mut best = f64::NEG_INFINITY;
    for (i, p) in win.iter().enumerate() {
        let later_same_height = win[i + 1..].iter().take_while(|q| q.0 == p.0).any(|q| q.1 > p.1);
        if p.1 > best && !later_same_height {
            front.push(*p);
        }
        best = best.max(p.1);
    }
    let u = upper_hull(&front);
    let a0 = (0.625 * l).max(u[0].0);
    let a1 = (0.875 * l).min(u[u.len() - 1].0);
    let (omega, method) = if u.len() >= 2 && a1 > a0 {
        ((hull_value(&u, a1) - hull_value(&u, a0)) / (a1 - a0), "hull")
    } else {
        (window_max, "window_max")
    };
    Ok(OmegaEstimate {
        omega,
        window_max,
        window: (0.5 * l, l),
        hull_points: u.len(),
        method: method.into(),
        candidates: win.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn badly() -> Vec<Real> {
        vec![Real::sqrt_offset(2, -1), Real::sqrt_offset(3, -1)]
    }

    #[test]
    fn hurwitz_constant_of_the_golden_ratio() {
        let e = estimate_c(&[Real::golden_ratio()], HeightKind::Max, &PsiSpec::PowerLaw(2.0), 1.4e6, None).unwrap();
        assert!((e.min_ratio - 1.0 / 5f64.sqrt()).abs() < 1e-3, "{}", e.min_ratio);
        assert!(e.running.windows(2).all(|w| w[1].min_ratio <= w[0].min_ratio));
    }

    #[test]
    fn min_height_gives_a_finite_positive_constant() {
        let x = vec![Real::golden_ratio(), Real::sqrt(2)];
        let e = estimate_c(&x, HeightKind::Min, &PsiSpec::PowerLaw(2.0), 1e6, None).unwrap();
        assert!(e.min_ratio > 0.0 && e.min_ratio.is_finite());
        let r = e.best.unwrap();
        assert!(r.height >= BigInt::from(1000));
    }

    #[test]
    fn constant_psi_estimate_shrinks() {
        let x = badly();
        let a = estimate_c(&x, HeightKind::Max, &PsiSpec::PowerLaw(0.0), 1e3, None).unwrap().min_ratio;
        let b = estimate_c(&x, HeightKind::Max, &PsiSpec::PowerLaw(0.0), 1e8, None).unwrap().min_ratio;
        assert!(b < a && b < 1e-7);
    }

    #[test]
    fn omega_for_min_and_prod() {
        let x = badly();
        let w = estimate_omega(&x, HeightKind::Min, 1e6).unwrap();
        assert!((w.omega - 2.0).abs() < 0.05, "{w:?}");
        let w = estimate_omega(&x, HeightKind::Prod, 1e6).unwrap();
        assert!((w.omega - 1.0).abs() < 0.05, "{w:?}");
    }

    #[test]
    fn hull_of_a_line() {
        let pts: Vec<(f64, f64)> = (1..10).map(|i| (i as f64, 2.0 * i as f64)).collect();
        let u = upper_hull(&pts);
        assert_eq!(u.len(), 2);
        assert_eq!(hull_value(&u, 4.5), 9.0);
    }
}
