//! A point of `R^d` that is badly approximable for `H_max` at the scale of `ψ`.
//!
//! The sequence `S_{k+1} = S_k - S_k² - C₁ S_k³ - f_ψ(k) - C₁/k³` started from
//! `S_{k0} = 1/(2 max(2, C₁))` is kept nonnegative; `s_k = S_k` drives
//! `A_k = γ_d^k Π_{j=k0}^{k-1} (1 + s_j)` with `i_k = (k mod d) + 1`, and the
//! progression is turned into a point.

use serde::Serialize;

use super::estimate::{estimate_omega_log, OmegaEstimate};
use crate::cfrac::{convergents, ContinuedFraction};
use crate::dataprog::{cost, point_from_progression, CostReport, DataProgression, PointConstruction, XiKind};
use crate::error::{Error, Result};
use crate::funexpr::{derive_forms, FuncExpr, PsiSpec};
use crate::heights::{gamma_d, HeightKind};
use crate::real::{ln_bigint, Real};
use crate::recint::{decide_rr, Method, RrConfig, Verdict};

pub const DEFAULT_C1: f64 = 8.0;
/// Steps over which the driving sequence must stay nonnegative.
const SURVIVAL_STEPS: u64 = 400_000;
const MAX_K0: u64 = 1 << 16;
const MAX_C1: f64 = 1024.0;

#[derive(Debug, Clone, Serialize)]
pub struct BadPoint {
    pub d: usize,
    pub psi: PsiSpec,
    pub c1: f64,
    pub k0: u64,
    /// `s_{k0}, s_{k0+1}, ...` used in the progression.
    pub s: Vec<f64>,
    pub progression: DataProgression,
    pub construction: PointConstruction,
    pub cost: CostReport,
    /// Natural log of the largest convergent denominator of the point.
    pub ln_q_max: f64,
    pub log: Vec<String>,
}

impl BadPoint {
    pub fn coords(&self) -> &[ContinuedFraction] {
        &self.construction.coords
    }

    pub fn reals(&self) -> Vec<Real> {
        self.coords().iter().map(|cf| Real::Rational(cf.value())).collect()
    }

    pub fn estimate_omega(&self) -> Result<OmegaEstimate> {
        estimate_omega_log(&self.reals(), HeightKind::Max, self.ln_q_max)
    }
}

/// `Some(s_{k0..k0+keep})` when the sequence stays nonnegative for `steps` steps.
fn drive(f: &FuncExpr, c1: f64, k0: u64, steps: u64, keep: usize) -> Result<Option<Vec<f64>>> {
    let mut s = 1.0 / (2.0 * c1.max(2.0));
    let mut kept = Vec::with_capacity(keep);
    for k in k0..k0 + steps {
        if kept.len() < keep {
            kept.push(s);
        }
        let kf = k as f64;
        s = s - s * s - c1 * s * s * s - f.eval(kf)? - c1 / (kf * kf * kf);
        if s < 0.0 {
            return Ok(None);
        }
    }
    Ok(Some(kept))
}

/// Smallest `k0` (searched by doubling, then bisection) whose sequence survives.
fn find_k0(f: &FuncExpr, c1: f64, start: u64) -> Result<Option<u64>> {
    let ok = |k: u64| -> Result<bool> { Ok(drive(f, c1, k, SURVIVAL_STEPS, 0)?.is_some()) };
    let mut hi = start.max(1);
    while !ok(hi)? {
        hi *= 2;
        if hi > MAX_K0 {
            return Ok(None);
        }
    }
    let mut lo = start.max(1);
    if ok(lo)? {
        return Ok(Some(lo));
    }
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if ok(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(Some(hi))
}

/// Builds the point from `n_terms` progression entries past `k0`. Fails when
/// `f_ψ` is not certified in RR, or when no `C₁` up to 1024 gives a surviving
/// sequence and a nonnegative cost.
pub fn build_bad_point_for_max(d: usize, psi: &PsiSpec, n_terms: usize, cfg: &RrConfig) -> Result<BadPoint> {
    if d < 3 {
        return Err(Error::UnsupportedDimension(d));
    }
    if n_terms < 2 * d {
        return Err(Error::InvalidArgument(format!("need at least {} terms", 2 * d)));
    }
    let forms = derive_forms(psi, d)?;
    let f = forms.f_psi.clone();
    let rr = decide_rr(&f, Method::Recurrence, cfg)?;
    if rr.verdict != Verdict::InRR {
        return Err(Error::Construction(format!("f_ψ is not certified in RR (got {:?}) for {psi}", rr.verdict)));
    }
    let g = gamma_d(d);
    let start = f.t_domain().max(0.0).ceil() as u64 + 1;
    let mut log = Vec::new();
    let mut c1 = DEFAULT_C1;
    while c1 <= MAX_C1 {
        let Some(k0) = find_k0(&f, c1, start)? else {
            log.push(format!("C1 = {c1}: no k0 <= {MAX_K0} keeps S_k nonnegative"));
            c1 *= 2.0;
            continue;
        };
        let s = drive(&f, c1, k0, SURVIVAL_STEPS, n_terms)?.expect("k0 was checked");
        let k_end = k0 as usize + n_terms;
        let mut prod = 1.0;
        let mut entries = Vec::with_capacity(k_end);
        for k in 1..=k_end {
            if k as u64 > k0 {
                prod *= 1.0 + s[k - 1 - k0 as usize];
            }
            entries.push((g.powi(k as i32) * prod, k % d + 1));
        }
        let progression = DataProgression::new(d, entries)?;
        let bp = forms.big_psi.clone();
        let report = cost(&progression, XiKind::Max, |b| bp.eval(b), usize::MAX)?;
        let negative: Vec<usize> = report
            .terms
            .iter()
            .filter(|t| t.k as u64 >= k0 + d as u64 && t.value < -1e-9 * t.scale.max(1.0))
            .map(|t| t.k)
            .collect();
        log.push(format!("C1 = {c1}: k0 = {k0}, s_k0 = {:.6}", s[0]));
        if !negative.is_empty() {
            log.push(format!("C1 = {c1}: cost negative at k = {negative:?}"));
            c1 *= 2.0;
            continue;
        }
        let construction = point_from_progression(&progression, usize::MAX)?;
        let ln_q_max = construction
            .coords
            .iter()
            .filter_map(|cf| convergents(cf, cf.last_index()).last().map(|c| ln_bigint(&c.q)))
            .fold(0.0, f64::max);
        return Ok(BadPoint { d, psi: psi.clone(), c1, k0, s, progression, construction, cost: report, ln_q_max, log });
    }
    Err(Error::Construction(log.join("; ")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::heights::alpha_d;

    #[test]
    fn critical_power_point() {
        let p = build_bad_point_for_max(3, &PsiSpec::PowerLaw(alpha_d(3)), 25, &RrConfig::default()).unwrap();
        assert_eq!(p.c1, 8.0);
        assert_eq!(p.k0, 10);
        assert!((p.s[0] - 1.0 / 16.0).abs() < 1e-15);
        assert!(p.ln_q_max > 1000.0);
        let w = p.estimate_omega().unwrap();
        assert!((w.omega - alpha_d(3)).abs() < 0.05, "{w:?}");
    }

    #[test]
    fn family_member_in_rr() {
        let psi = crate::funexpr::psi_nc(3, 1, 0.5).unwrap();
        let p = build_bad_point_for_max(3, &psi, 20, &RrConfig::default()).unwrap();
        assert!(p.cost.terms.iter().filter(|t| t.k as u64 >= p.k0 + 3).all(|t| t.value >= -1e-9 * t.scale));
    }

    #[test]
    fn family_member_outside_rr_is_refused() {
        let psi = crate::funexpr::psi_nc(3, 1, 2.0).unwrap();
        assert!(matches!(build_bad_point_for_max(3, &psi, 20, &RrConfig::default()), Err(Error::Construction(_))));
    }
}
