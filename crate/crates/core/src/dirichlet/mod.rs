//! Dirichlet decisions for approximation functions under `H_max`, the uniform
//! checks for the other heights, and empirical estimators of `C_{H,ψ}(x)` and
//! `ω_H(x)`.
//!
//! For `d >= 3`, `ψ` is Dirichlet for `H_max` exactly when `f_ψ` is eventually
//! nonnegative and not in RR. When `f_ψ` is eventually negative, `ψ` lies below
//! `ψ_{α_d}`, which is already not Dirichlet.

mod checks;
mod construction;
mod estimate;

use serde::{Deserialize, Serialize};

pub use checks::{gamma_optimum_check, minprod_uniform_check, GammaOptimumReport, MinProdReport};
pub use construction::{build_bad_point_for_max, BadPoint, DEFAULT_C1};
pub use estimate::{
    convergent_table, estimate_c, estimate_c_log, estimate_omega, estimate_omega_log, ApproximationRecord, CEstimate,
    ConvergentTable, OmegaEstimate, RunningMin,
};

use crate::error::{Error, Result};
use crate::funexpr::{
    derive_forms, eventually_compare, f_nc, psi_nc, validate_psi_hypotheses, Comparison, FuncExpr, PsiSpec,
};
use crate::funexpr::{DEFAULT_SAMPLES, DEFAULT_WINDOW};
use crate::heights::gamma_d;
use crate::recint::{decide_rr_both, ladder, scale, LadderEnd, RecIntDecision, RrConfig, Verdict};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DirichletOutcome {
    Dirichlet,
    NotDirichlet,
    Undetermined,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Nonnegativity {
    /// `Some(true)` when `f_ψ` is eventually nonnegative.
    pub eventually_nonnegative: Option<bool>,
    /// `asymptotic` when read off the expansion of `f_ψ`, `sampled` otherwise.
    pub method: String,
    pub sampled: Option<Comparison>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DirichletVerdict {
    pub verdict: DirichletOutcome,
    pub psi: PsiSpec,
    pub d: usize,
    pub f_psi: String,
    pub nonnegativity: Nonnegativity,
    /// RR decisions the verdict rests on.
    pub basis: Vec<RecIntDecision>,
    pub route: String,
    /// The generic decision on the same `ψ`, for family decisions.
    pub cross_check: Option<Box<DirichletVerdict>>,
    pub notes: Vec<String>,
}

fn outcome_of(v: Verdict) -> DirichletOutcome {
    match v {
        Verdict::InRR => DirichletOutcome::NotDirichlet,
        Verdict::NotInRR => DirichletOutcome::Dirichlet,
        Verdict::Undetermined => DirichletOutcome::Undetermined,
    }
}

fn combined_rr(f: &FuncExpr, cfg: &RrConfig, notes: &mut Vec<String>) -> Result<(Verdict, Vec<RecIntDecision>)> {
    let c = decide_rr_both(f, cfg)?;
    notes.extend(c.notes);
    Ok((c.verdict, c.decisions))
}

fn sample_window(f: &FuncExpr) -> (f64, f64) {
    let t = f.t_domain();
    let lo = if t.is_finite() { (2.0 * t).max(t + 10.0).max(10.0) } else { 10.0 };
    (lo, lo * 1e2)
}

/// Decides whether `ψ` is Dirichlet on `R^d` with respect to `H_max`.
pub fn dirichlet_decide(psi: &PsiSpec, d: usize, cfg: &RrConfig) -> Result<DirichletVerdict> {
    if d < 3 {
        return Err(Error::UnsupportedDimension(d));
    }
    let forms = derive_forms(psi, d)?;
    decide_f(psi, d, forms.f_psi, cfg)
}

/// Decides `c·ψ` from the forms of `ψ`: `f_{cψ}(x) = f_ψ(x) + (2 log c/(d γ_d)) γ_d^{-x}`.
/// Building `f_{cψ}` from `c·ψ` directly would lose the perturbation to rounding.
pub fn dirichlet_decide_scaled(psi: &PsiSpec, c: f64, d: usize, cfg: &RrConfig) -> Result<DirichletVerdict> {
    if d < 3 {
        return Err(Error::UnsupportedDimension(d));
    }
    if !(c > 0.0) {
        return Err(Error::InvalidArgument("scale factor must be positive".into()));
    }
    let forms = derive_forms(psi, d)?;
    let g = gamma_d(d);
    let decay = FuncExpr::constant(1.0 / g).pow(&FuncExpr::var()).scale(2.0 * c.ln() / (d as f64 * g));
    let f = forms.f_psi.add(&decay);
    let scaled = PsiSpec::Custom(psi.expr()?.scale(c));
    let mut v = decide_f(&scaled, d, f, cfg)?;
    v.notes.push(format!("{psi} scaled by {c}"));
    Ok(v)
}

fn decide_f(psi: &PsiSpec, d: usize, f: FuncExpr, cfg: &RrConfig) -> Result<DirichletVerdict> {
    let hyp = validate_psi_hypotheses(psi, DEFAULT_WINDOW, DEFAULT_SAMPLES)?;
    if !hyp.increasing {
        return Err(Error::InvalidArgument(format!("-log ψ(e^b) is not increasing on the sampled window for {psi}")));
    }
    let mut out = DirichletVerdict {
        verdict: DirichletOutcome::Undetermined,
        psi: psi.clone(),
        d,
        f_psi: f.to_string(),
        nonnegativity: Nonnegativity { eventually_nonnegative: None, method: "asymptotic".into(), sampled: None },
        basis: vec![],
        route: "rr".into(),
        cross_check: None,
        notes: vec![format!("Ψ increasing on q in [{:e}, {:e}]", hyp.window.0, hyp.window.1)],
    };
    match ladder(&f) {
        Some(l) => out.nonnegativity.eventually_nonnegative = Some(l.end != LadderEnd::Negative),
        None => {
            let w = sample_window(&f);
            let cmp = eventually_compare(&f, &FuncExpr::constant(0.0), w, DEFAULT_SAMPLES)?;
            out.nonnegativity.method = "sampled".into();
            out.nonnegativity.sampled = Some(cmp);
            out.nonnegativity.eventually_nonnegative = match cmp {
                Comparison::Ge => Some(true),
                Comparison::Le if f.eval(w.1)? < 0.0 => Some(false),
                Comparison::Le => Some(true),
                Comparison::Mixed => None,
            };
        }
    }
    match out.nonnegativity.eventually_nonnegative {
        Some(false) => {
            out.verdict = DirichletOutcome::NotDirichlet;
            out.route = "below-critical-power".into();
            out.notes.push("f_ψ is eventually negative, so ψ <= ψ_{α_d} for large q".into());
        }
        Some(true) => {
            let (v, basis) = combined_rr(&f, cfg, &mut out.notes)?;
            out.verdict = outcome_of(v);
            out.basis = basis;
        }
        None => out.notes.push("sign of f_ψ is not settled on the sampled window".into()),
    }
    Ok(out)
}

/// Decides `ψ_{N,C}` through `f_ψ(x) = log²(γ_d) f_{N-2,C/4}(x log γ_d)`: the
/// scaled function is in RR exactly when `f_{N-2,C/4}` is. The generic decision
/// on the same `ψ` is attached as a cross-check.
pub fn dirichlet_decide_family(d: usize, n: u32, c: f64, cfg: &RrConfig) -> Result<DirichletVerdict> {
    let psi = psi_nc(d, n, c)?;
    let forms = derive_forms(&psi, d)?;
    let lg = gamma_d(d).ln();
    let member = f_nc(n as i32 - 2, c / 4.0);
    let scaled = scale(&member, lg)?;
    check_identity(&forms.f_psi, &scaled)?;

    let mut notes = Vec::new();
    let (v, basis) = combined_rr(&member, cfg, &mut notes)?;
    let generic = dirichlet_decide(&psi, d, cfg)?;
    let verdict = outcome_of(v);
    if verdict != DirichletOutcome::Undetermined
        && generic.verdict != DirichletOutcome::Undetermined
        && generic.verdict != verdict
    {
        return Err(Error::Assertion(format!(
            "family route gives {verdict:?} but the generic route gives {:?} for {psi}",
            generic.verdict
        )));
    }
    notes.push(format!("f_ψ = log²(γ_d) f_{{{},{}}}(x log γ_d), checked on samples", n as i32 - 2, c / 4.0));
    Ok(DirichletVerdict {
        verdict,
        psi,
        d,
        f_psi: forms.f_psi.to_string(),
        nonnegativity: Nonnegativity { eventually_nonnegative: Some(true), method: "asymptotic".into(), sampled: None },
        basis,
        route: "family".into(),
        cross_check: Some(Box::new(generic)),
        notes,
    })
}

fn check_identity(f: &FuncExpr, g: &FuncExpr) -> Result<()> {
    let lo = f.t_domain().max(g.t_domain()).max(1.0) + 5.0;
    for x in crate::funexpr::log_grid(lo, lo * 1e3, 24) {
        let (a, b) = (f.eval(x)?, g.eval(x)?);
        if (a - b).abs() > 1e-8 * a.abs().max(b.abs()) + 1e-300 {
            return Err(Error::Assertion(format!("f_ψ and the scaled family member differ at x = {x}: {a} vs {b}")));
        }
    }
    Ok(())
}
