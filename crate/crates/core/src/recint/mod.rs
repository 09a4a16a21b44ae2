//! Recursive integrability: does `-g' = g² + f` have a nonnegative solution on
//! some tail `[t1, ∞)`?
//!
//! Two numeric methods are available, an ODE witness search and the backward
//! recurrence `S_k = S_{k+1} + S_{k+1}² + f(k)`. On their own they decide only
//! inputs that sit well away from the threshold `1/(4x²)`. [`decide_rr`] first
//! classifies `f` asymptotically against the family `f_{N,C}` and then runs the
//! chosen numeric method on the rung where that classification is decided.

mod ladder;
mod ode;
mod recurrence;

use serde::{Deserialize, Serialize};

pub use ladder::{ladder, ladder_of_series, peel, Ladder, LadderEnd, QUARTER_TOL};
pub use ode::{
    ode_witness, OdeCrossing, OdeTrace, OdeWitness, StepLog, Termination, DEFAULT_TOL, ESCALATION_FACTOR, H_MARGIN,
};
pub use recurrence::{
    backward_sequence, default_k0, doubling_schedule, forward_c2, ForwardRun, ScheduleEntry, SupersolutionCertificate,
    DEFAULT_BLOWUP,
};

use crate::error::{Error, Result};
use crate::funexpr::{eventually_compare, f_nc, log_grid, Comparison, FuncExpr, DEFAULT_SAMPLES, DEFAULT_WINDOW};
use ode::{certify_witness, run_ode, tail_above_quarter, OdeOutcome};
use recurrence::{run_recurrence, RecurrenceOutcome};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    InRR,
    NotInRR,
    Undetermined,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Ode,
    Recurrence,
}

impl std::str::FromStr for Method {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ode" => Ok(Method::Ode),
            "recurrence" | "rec" => Ok(Method::Recurrence),
            other => Err(Error::Parse(format!("unknown method '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RrConfig {
    pub horizon: f64,
    /// `t1` values for the ODE search; chosen from `f` when empty.
    pub t1_grid: Vec<f64>,
    /// `g0 = m / t1` for each multiplier `m`.
    pub g0_multipliers: Vec<f64>,
    /// First index of the recurrence; chosen from `f` when `None`.
    pub k0: Option<u64>,
    pub n_min: u64,
    pub n_max: u64,
    pub blowup: f64,
}

impl Default for RrConfig {
    fn default() -> Self {
        RrConfig {
            horizon: 1e6,
            t1_grid: vec![],
            g0_multipliers: vec![0.5, 1.0, 2.0, 5.0, 10.0],
            k0: None,
            n_min: 1 << 10,
            n_max: 1 << 20,
            blowup: DEFAULT_BLOWUP,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    /// Rung of the asymptotic ladder the witness solves; 0 is `f` itself.
    /// A witness `G` on rung `j+1` gives `g(x) = (1/x)(1/2 + G(log x))` on rung `j`.
    pub rung: usize,
    pub ode: Option<OdeWitness>,
    pub supersolution: Option<SupersolutionCertificate>,
    /// Closed form, when the rung is exactly `1/(4x²)` or `0`.
    pub exact: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Evidence {
    OdeCrossings {
        crossings: Vec<OdeCrossing>,
        escalation_ratio: f64,
    },
    RecurrenceBlowup {
        n: u64,
        schedule: Vec<ScheduleEntry>,
    },
    RecurrenceBounded {
        schedule: Vec<ScheduleEntry>,
        increment_ratio: Option<f64>,
        /// `k S_k^{(N)}` at the start of the certified range.
        k_times_s: f64,
    },
    Ladder {
        rungs: Vec<String>,
        end: LadderEnd,
        terminal: usize,
        check_rung: Option<usize>,
        family_n: Option<i32>,
        family_c: Option<f64>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecIntDecision {
    pub verdict: Verdict,
    pub method: String,
    pub function: String,
    pub config: RrConfig,
    pub witness: Option<Witness>,
    pub evidence: Vec<Evidence>,
    pub notes: Vec<String>,
}

impl RecIntDecision {
    fn new(method: &str, f: &FuncExpr, config: &RrConfig) -> Self {
        RecIntDecision {
            verdict: Verdict::Undetermined,
            method: method.into(),
            function: f.to_string(),
            config: config.clone(),
            witness: None,
            evidence: vec![],
            notes: vec![],
        }
    }
}

fn default_t1(f: &FuncExpr) -> f64 {
    let t = f.t_domain();
    if t.is_finite() && t > 0.0 {
        (2.0 * t).max(t + 1.0).max(1.0)
    } else {
        1.0
    }
}

/// ODE search over the given grids. InRR needs a trace from `g0 = 1/(2 t1)`
/// that keeps `x g(x)` near or above `1/2`; NotInRR needs every grid `g0`,
/// and twice the largest, to reach zero before the horizon.
pub fn decide_rr_ode(f: &FuncExpr, t1_grid: &[f64], g0_grid: &[f64], horizon: f64) -> Result<RecIntDecision> {
    let cfg = RrConfig { horizon, t1_grid: t1_grid.to_vec(), ..RrConfig::default() };
    let mut d = RecIntDecision::new("ode", f, &cfg);
    apply_ode(&mut d, run_ode(f, t1_grid, g0_grid, horizon)?, 0);
    Ok(d)
}

fn apply_ode(d: &mut RecIntDecision, out: OdeOutcome, rung: usize) {
    match out {
        OdeOutcome::Witness(w) => {
            d.verdict = Verdict::InRR;
            d.witness = Some(Witness { rung, ode: Some(w.thinned()), supersolution: None, exact: None });
        }
        OdeOutcome::Negative { crossings, escalation_ratio } => {
            d.verdict = Verdict::NotInRR;
            d.evidence.push(Evidence::OdeCrossings { crossings, escalation_ratio });
        }
        OdeOutcome::Inconclusive { note } => {
            d.verdict = Verdict::Undetermined;
            d.notes.push(note);
        }
    }
}

impl OdeWitness {
    fn thinned(self) -> OdeWitness {
        OdeWitness { trace: self.trace.thinned(200), ..self }
    }
}

/// Backward recurrence over a schedule of `N`. InRR needs a range
/// `[k_start, N_max]` on which `1/(2(k-1))` is a supersolution; NotInRR needs
/// `S_{k0}^{(N)}` to pass `blowup` while `k² f(k) > 1/4` over the range.
pub fn decide_rr_recurrence(f: &FuncExpr, k0: u64, schedule: &[u64], blowup: f64) -> Result<RecIntDecision> {
    let cfg = RrConfig {
        k0: Some(k0),
        n_min: schedule.iter().copied().min().unwrap_or(0),
        n_max: schedule.iter().copied().max().unwrap_or(0),
        blowup,
        ..RrConfig::default()
    };
    let mut d = RecIntDecision::new("recurrence", f, &cfg);
    apply_recurrence(&mut d, run_recurrence(f, k0, schedule, blowup)?, f, 0)?;
    Ok(d)
}

fn apply_recurrence(d: &mut RecIntDecision, out: RecurrenceOutcome, f: &FuncExpr, rung: usize) -> Result<()> {
    match out {
        RecurrenceOutcome::Bounded { certificate, schedule, increment_ratio } => {
            let k = certificate.k_start;
            let k_times_s = {
                let full = recurrence::Samples::new(f, k, certificate.n_max)?;
                k as f64 * full.backward_value(k, certificate.n_max, f64::INFINITY)
            };
            d.verdict = Verdict::InRR;
            d.evidence.push(Evidence::RecurrenceBounded { schedule, increment_ratio, k_times_s });
            d.witness = Some(Witness { rung, ode: None, supersolution: Some(certificate), exact: None });
        }
        RecurrenceOutcome::Blowup { n, schedule } => {
            d.verdict = Verdict::NotInRR;
            d.evidence.push(Evidence::RecurrenceBlowup { n, schedule });
        }
        RecurrenceOutcome::Inconclusive { schedule, increment_ratio, note } => {
            d.verdict = Verdict::Undetermined;
            d.notes.push(note);
            if let Some(r) = increment_ratio {
                d.notes.push(format!("last increment ratio of S_k0 under doubling N: {r:.4}"));
            }
            if let Some(last) = schedule.last() {
                d.notes.push(format!("S_k0 at N = {}: {}", last.n, last.s_k0));
            }
        }
    }
    Ok(())
}

fn numeric_raw(f: &FuncExpr, method: Method, cfg: &RrConfig) -> Result<RecIntDecision> {
    // a tail where x² f stays at or below 1/4 on samples can be certified directly
    let lo = default_t1(f).max(cfg.k0.unwrap_or(1) as f64);
    if start_candidates(lo, cfg.horizon).into_iter().any(|t| quarter_side(f, t, cfg.horizon, true)) {
        let mut d = confirm(f, true, method, cfg, 0)?;
        if d.verdict == Verdict::InRR {
            d.method = d.method.replace("ladder+", "tail+");
            return Ok(d);
        }
    }
    match method {
        Method::Ode => {
            let t1s = if cfg.t1_grid.is_empty() { vec![default_t1(f)] } else { cfg.t1_grid.clone() };
            let mut d = RecIntDecision::new("ode", f, cfg);
            for &t1 in &t1s {
                let g0s: Vec<f64> = cfg.g0_multipliers.iter().map(|m| m / t1).collect();
                apply_ode(&mut d, run_ode(f, &[t1], &g0s, cfg.horizon)?, 0);
                if d.verdict != Verdict::Undetermined {
                    break;
                }
            }
            Ok(d)
        }
        Method::Recurrence => {
            let k0 = match cfg.k0 {
                Some(k) => k,
                // no index with f(k) <= 1/k: start low and let the blowup test decide
                None => default_k0(f, cfg.n_max as f64).unwrap_or((f.t_domain().max(1.0).floor() as u64 + 1).max(2)),
            };
            let mut d = RecIntDecision::new("recurrence", f, cfg);
            let sched = doubling_schedule(cfg.n_min.max(k0 + 8), cfg.n_max);
            apply_recurrence(&mut d, run_recurrence(f, k0, &sched, cfg.blowup)?, f, 0)?;
            Ok(d)
        }
    }
}

/// Log-spaced candidate starting points between `lo` and `horizon / 100`.
fn start_candidates(lo: f64, horizon: f64) -> Vec<f64> {
    let hi = horizon / 100.0;
    if !(hi > lo) {
        return vec![lo];
    }
    let n = ((hi / lo).log10() * 2.0).ceil() as usize + 1;
    log_grid(lo, hi, n.max(2))
}

/// `x² g(x)` compared with `1/4` on samples of `[t, horizon]`; `below = true`
/// asks for `<=`, otherwise for `>`.
fn quarter_side(g: &FuncExpr, t: f64, horizon: f64, below: bool) -> bool {
    log_grid(t, horizon, 64).iter().all(|&x| match g.eval(x) {
        Ok(v) if below => x * x * v <= 0.25 * (1.0 + 1e-12),
        Ok(v) => x * x * v > 0.25,
        Err(_) => false,
    })
}

fn confirm(g: &FuncExpr, expect_in: bool, method: Method, cfg: &RrConfig, rung: usize) -> Result<RecIntDecision> {
    let name = match method {
        Method::Ode => "ladder+ode",
        Method::Recurrence => "ladder+recurrence",
    };
    let mut d = RecIntDecision::new(name, g, cfg);
    let lo = default_t1(g).max(cfg.k0.unwrap_or(1) as f64);
    let Some(t) = start_candidates(lo, cfg.horizon).into_iter().find(|&t| quarter_side(g, t, cfg.horizon, expect_in))
    else {
        d.notes.push(format!(
            "no start point where x² f(x) stays {} 1/4 up to the horizon on rung {rung}",
            if expect_in { "at or below" } else { "above" }
        ));
        return Ok(d);
    };
    match method {
        Method::Ode => {
            if expect_in {
                match certify_witness(g, t, cfg.horizon)? {
                    Some(w) => apply_ode(&mut d, OdeOutcome::Witness(w), rung),
                    None => d.notes.push(format!("trace from t1 = {t} lost the witness margin")),
                }
            } else {
                let g0s: Vec<f64> = cfg.g0_multipliers.iter().map(|m| m / t).collect();
                apply_ode(&mut d, run_ode(g, &[t], &g0s, cfg.horizon)?, rung);
            }
        }
        Method::Recurrence => {
            let k0 = (t.ceil() as u64).max(cfg.k0.unwrap_or(2)).max(2);
            if cfg.n_max <= k0 + 8 {
                d.notes.push(format!("N_max = {} leaves no range above k0 = {k0}", cfg.n_max));
                return Ok(d);
            }
            let sched = doubling_schedule(cfg.n_min.max(k0 + 8), cfg.n_max);
            apply_recurrence(&mut d, run_recurrence(g, k0, &sched, cfg.blowup)?, g, rung)?;
        }
    }
    Ok(d)
}

/// Decides `f ∈ RR`. The asymptotic classification proposes a verdict and the
/// chosen numeric method must confirm it on the deciding rung; otherwise the
/// result is Undetermined. Inputs without an expansion fall back to the raw
/// numeric method.
pub fn decide_rr(f: &FuncExpr, method: Method, cfg: &RrConfig) -> Result<RecIntDecision> {
    let Some(l) = ladder(f) else {
        let mut d = numeric_raw(f, method, cfg)?;
        d.notes.push("no asymptotic expansion; numeric method only".into());
        return Ok(d);
    };
    let family = l.family_position();
    let check = l.check_rung();
    let ev = Evidence::Ladder {
        rungs: l.describe(),
        end: l.end,
        terminal: l.terminal,
        check_rung: check.as_ref().map(|c| c.0),
        family_n: family.map(|p| p.0),
        family_c: family.and_then(|p| p.1),
    };
    let expected = match l.end {
        LadderEnd::Negative => {
            return Err(Error::Domain(format!("f is eventually negative: leading term {}", l.rungs[0])))
        }
        LadderEnd::Unresolved => {
            let mut d = numeric_raw(f, method, cfg)?;
            d.evidence.push(ev);
            d.notes.push(l.note.clone().unwrap_or_else(|| "asymptotic classification unresolved".into()));
            return Ok(d);
        }
        _ => l.in_rr().expect("resolved ladder has a verdict"),
    };
    let (rung, series) = check.expect("resolved ladder has a check rung");
    let g = series.to_expr();
    let mut d = confirm(&g, expected, method, cfg, rung)?;
    d.function = f.to_string();
    d.evidence.insert(0, ev);
    let exact = match l.end {
        LadderEnd::Zero => Some("g(x) = 1/x".to_string()),
        LadderEnd::Boundary if series.exact && series.terms.len() == 1 => {
            Some("g(x) = 1/(2x) on the checked rung".into())
        }
        _ => None,
    };
    let want = if expected { Verdict::InRR } else { Verdict::NotInRR };
    if d.verdict == want {
        if let (Some(w), Some(e)) = (d.witness.as_mut(), exact) {
            w.exact = Some(e);
        }
        return Ok(d);
    }
    let numeric = d.verdict;
    d.verdict = Verdict::Undetermined;
    d.witness = None;
    d.notes.push(format!("asymptotic classification says {want:?}, numeric check on rung {rung} gave {numeric:?}"));
    Ok(d)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CombinedDecision {
    pub verdict: Verdict,
    pub decisions: Vec<RecIntDecision>,
    pub notes: Vec<String>,
}

/// Runs both methods. A decisive method wins over an undetermined one and
/// conflicting decisive verdicts give Undetermined.
pub fn decide_rr_both(f: &FuncExpr, cfg: &RrConfig) -> Result<CombinedDecision> {
    let ode = decide_rr(f, Method::Ode, cfg)?;
    let rec = decide_rr(f, Method::Recurrence, cfg)?;
    let mut notes = Vec::new();
    let verdict = match (ode.verdict, rec.verdict) {
        (a, b) if a == b => a,
        (Verdict::Undetermined, b) => {
            notes.push("ODE method undetermined; verdict from the recurrence".into());
            b
        }
        (a, Verdict::Undetermined) => {
            notes.push("recurrence undetermined; verdict from the ODE method".into());
            a
        }
        (a, b) => {
            notes.push(format!("methods disagree: ode {a:?}, recurrence {b:?}"));
            Verdict::Undetermined
        }
    };
    Ok(CombinedDecision { verdict, decisions: vec![ode, rec], notes })
}

/// `F(x) = (1/x²)(1/4 + f(log x))`.
pub fn log_transform(f: &FuncExpr) -> FuncExpr {
    let inner = f.compose(&FuncExpr::var().log());
    let t = f.t_domain();
    let dom = if t.is_finite() { t.exp().max(1.0) } else { 1.0 };
    FuncExpr::var().powf(-2.0).mul(&FuncExpr::rational(1, 4).add(&inner)).with_domain(dom)
}

/// `f_λ(x) = λ² f(λx)`.
pub fn scale(f: &FuncExpr, lambda: f64) -> Result<FuncExpr> {
    if !(lambda > 0.0) {
        return Err(Error::InvalidArgument("scale factor must be positive".into()));
    }
    if lambda == 1.0 {
        return Ok(f.clone());
    }
    let t = f.t_domain();
    let inner = FuncExpr::var().scale(lambda);
    Ok(f.compose(&inner).scale(lambda * lambda).with_domain(if t.is_finite() { t / lambda } else { t }))
}

/// Decides `f1 + f2` for `f1 ∈ RR`, using the recurrence method.
pub fn ignorable_margin(f1: &FuncExpr, f2: &FuncExpr, cfg: &RrConfig) -> Result<RecIntDecision> {
    let base = decide_rr(f1, Method::Recurrence, cfg)?;
    if base.verdict != Verdict::InRR {
        return Err(Error::InvalidArgument(format!("f1 is not certified in RR (got {:?})", base.verdict)));
    }
    decide_rr(&f1.add(f2), Method::Recurrence, cfg)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FamilySide {
    BelowInRR,
    AboveNotInRR,
    Undetermined,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FamilyClassification {
    pub n: Option<i32>,
    /// Comparison constant; `None` with side Above means every `C`.
    pub c: Option<f64>,
    pub side: FamilySide,
    /// Leading coefficient of the terminal rung, when of order `x^{-2}`.
    pub leading_coefficient: Option<f64>,
    /// Sampled comparison against the reported member, when its domain fits the window.
    pub sampled: Option<Comparison>,
}

/// Places `f` relative to the family `f_{N,C}` for `N <= n_max`.
pub fn classify_vs_family(f: &FuncExpr, n_max: i32) -> Result<FamilyClassification> {
    let undetermined =
        |n, c| FamilyClassification { n, c, side: FamilySide::Undetermined, leading_coefficient: None, sampled: None };
    let Some(l) = ladder(f) else { return Ok(undetermined(None, None)) };
    if l.end == LadderEnd::Negative {
        return Err(Error::Domain("f is eventually negative".into()));
    }
    let Some((n, c)) = l.family_position() else { return Ok(undetermined(None, None)) };
    if n > n_max {
        return Ok(undetermined(Some(n), c));
    }
    let in_rr = l.in_rr() == Some(true);
    let c_cmp = c.unwrap_or(1.0);
    let member = f_nc(n.max(-1), c_cmp);
    let lo = DEFAULT_WINDOW.0.max(10.0 * member.t_domain().max(f.t_domain()).max(1.0));
    let sampled = if lo < DEFAULT_WINDOW.1 {
        Some(eventually_compare(f, &member, (lo, DEFAULT_WINDOW.1), DEFAULT_SAMPLES)?)
    } else {
        None
    };
    let agrees = match sampled {
        Some(Comparison::Le) => in_rr,
        Some(Comparison::Ge) => !in_rr,
        Some(Comparison::Mixed) => false,
        None => true,
    };
    let side = match (agrees, in_rr) {
        (false, _) => FamilySide::Undetermined,
        (true, true) => FamilySide::BelowInRR,
        (true, false) => FamilySide::AboveNotInRR,
    };
    Ok(FamilyClassification { n: Some(n), c, side, leading_coefficient: l.terminal_coefficient(), sampled })
}

/// `true` when `x² f(x) > 1/4` on samples of `[lo, hi]`.
pub fn exceeds_quarter(f: &FuncExpr, lo: f64, hi: f64) -> Result<bool> {
    tail_above_quarter(f, lo, hi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::funexpr::parse_expr;

    fn verdict(s: &str, m: Method) -> Verdict {
        decide_rr(&parse_expr(s).unwrap(), m, &RrConfig::default()).unwrap().verdict
    }

    #[test]
    fn inverse_square_threshold() {
        for m in [Method::Ode, Method::Recurrence] {
            for c in [0.15, 0.2, 0.24] {
                assert_eq!(verdict(&format!("{c}/x^2"), m), Verdict::InRR, "{c} {m:?}");
            }
            for c in [0.26, 0.3, 0.4] {
                assert_eq!(verdict(&format!("{c}/x^2"), m), Verdict::NotInRR, "{c} {m:?}");
            }
            assert_ne!(verdict("0.25/x^2", m), Verdict::NotInRR);
        }
    }

    #[test]
    fn family_members() {
        for m in [Method::Ode, Method::Recurrence] {
            for n in [0, 1] {
                assert_eq!(verdict(&format!("fNC({n}, 0.2)"), m), Verdict::InRR);
                assert_eq!(verdict(&format!("fNC({n}, 0.3)"), m), Verdict::NotInRR);
            }
            assert_eq!(verdict("1/x^2.5", m), Verdict::InRR);
        }
    }

    #[test]
    fn raw_deciders() {
        let f = parse_expr("0.2/x^2").unwrap();
        let d = decide_rr_ode(&f, &[1.0], &[0.5, 1.0, 2.0], 1e6).unwrap();
        assert_eq!(d.verdict, Verdict::InRR);
        let w = d.witness.unwrap().ode.unwrap();
        assert!(w.trace.is_decreasing());
        let g = parse_expr("0.3/x^2").unwrap();
        assert_eq!(decide_rr_ode(&g, &[1.0], &[0.5, 1.0, 2.0, 10.0], 1e6).unwrap().verdict, Verdict::NotInRR);
        let d = decide_rr_recurrence(&f, 10, &doubling_schedule(1 << 10, 1 << 18), DEFAULT_BLOWUP).unwrap();
        assert_eq!(d.verdict, Verdict::InRR);
    }

    #[test]
    fn negative_input_is_rejected() {
        let f = parse_expr("-1/x^2").unwrap();
        assert!(decide_rr(&f, Method::Ode, &RrConfig::default()).is_err());
    }

    #[test]
    fn log_transform_examples() {
        let z = log_transform(&FuncExpr::constant(0.0));
        for x in [2.0, 10.0, 1e5] {
            assert!((z.eval(x).unwrap() * x * x - 0.25).abs() < 1e-15);
        }
        for n in [-1, 0, 1] {
            let a = log_transform(&f_nc(n, 0.2));
            let b = f_nc(n + 1, 0.2);
            for x in [1e3, 1e6, 1e9] {
                let (u, v) = (a.eval(x).unwrap(), b.eval(x).unwrap());
                assert!((u - v).abs() <= 1e-12 * v, "N = {n}, x = {x}: {u} vs {v}");
            }
        }
        let c = log_transform(&FuncExpr::constant(0.1));
        assert_eq!(decide_rr(&c, Method::Recurrence, &RrConfig::default()).unwrap().verdict, Verdict::NotInRR);
    }

    #[test]
    fn scale_examples() {
        let f = parse_expr("0.3/x^2").unwrap();
        let g = scale(&f, 3.0).unwrap();
        for x in [1.0, 7.0, 1e4] {
            assert!((f.eval(x).unwrap() - g.eval(x).unwrap()).abs() < 1e-15);
        }
        assert_eq!(scale(&f, 1.0).unwrap(), f);
        for c in [0.2, 0.3] {
            let base = decide_rr(&f_nc(0, c), Method::Recurrence, &RrConfig::default()).unwrap().verdict;
            let scaled =
                decide_rr(&scale(&f_nc(0, c), 2.0).unwrap(), Method::Recurrence, &RrConfig::default()).unwrap();
            assert_eq!(base, scaled.verdict, "C = {c}");
        }
        assert!(scale(&f, 0.0).is_err());
    }

    #[test]
    fn ignorable_examples() {
        let cfg = RrConfig::default();
        let p = |s: &str| parse_expr(s).unwrap();
        assert_eq!(ignorable_margin(&p("0.2/x^2"), &p("1/x^3"), &cfg).unwrap().verdict, Verdict::InRR);
        assert_eq!(ignorable_margin(&p("0.2/x^2"), &p("0.1/x^2"), &cfg).unwrap().verdict, Verdict::NotInRR);
        assert_eq!(ignorable_margin(&f_nc(0, 0.2), &p("log(x)/x^3"), &cfg).unwrap().verdict, Verdict::InRR);
        assert!(ignorable_margin(&p("0.3/x^2"), &p("1/x^3"), &cfg).is_err());
    }

    #[test]
    fn family_classification() {
        let c = classify_vs_family(&parse_expr("0.2/x^2").unwrap(), 3).unwrap();
        assert_eq!((c.n, c.c, c.side), (Some(-1), Some(0.25), FamilySide::BelowInRR));
        let c = classify_vs_family(&parse_expr("1/x^1.9").unwrap(), 3).unwrap();
        assert_eq!((c.n, c.c, c.side), (Some(-1), None, FamilySide::AboveNotInRR));
        assert_eq!(c.sampled, Some(Comparison::Ge));
        let c = classify_vs_family(&f_nc(1, 0.2), 3).unwrap();
        assert_eq!((c.n, c.c, c.side), (Some(1), Some(0.25), FamilySide::BelowInRR));
    }

    #[test]
    fn decision_json_round_trip() {
        let d = decide_rr(&parse_expr("0.2/x^2").unwrap(), Method::Ode, &RrConfig::default()).unwrap();
        let s = serde_json::to_string(&d).unwrap();
        let back: RecIntDecision = serde_json::from_str(&s).unwrap();
        assert_eq!(back.verdict, Verdict::InRR);
    }
}
