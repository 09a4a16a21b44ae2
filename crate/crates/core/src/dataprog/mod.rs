//! Data progressions `Δ = (A_k, i_k)`: a `d`-vector state in which step `k`
//! overwrites coordinate `i_k` with `A_{k+1}`.

mod adversary;
mod correspondence;

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

pub use adversary::{
    adversary_step, has_legal_move, random_play, variance, variance_descent_report, AdversaryPlay, MoveOutcome,
    VarianceReport, VarianceStep, LATTICE_STEP,
};
pub use correspondence::{point_from_progression, progression_from_point, PointConstruction};

use crate::error::{Error, Result};
use crate::heights::HeightKind;

/// `Ξ = log Θ exp` for `Θ` in {max, min, prod}.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum XiKind {
    Max,
    Min,
    Sum,
}

impl XiKind {
    pub fn apply(self, b: &[f64]) -> f64 {
        match self {
            XiKind::Max => b.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            XiKind::Min => b.iter().copied().fold(f64::INFINITY, f64::min),
            XiKind::Sum => b.iter().sum(),
        }
    }

    pub fn from_height(kind: HeightKind) -> Result<Self> {
        match kind {
            HeightKind::Max => Ok(XiKind::Max),
            HeightKind::Min => Ok(XiKind::Min),
            HeightKind::Prod => Ok(XiKind::Sum),
            HeightKind::Lcm => Err(Error::InvalidArgument("lcm has no coordinatewise log image".into())),
        }
    }
}

impl std::str::FromStr for XiKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "max" => Ok(XiKind::Max),
            "min" => Ok(XiKind::Min),
            "sum" | "prod" => Ok(XiKind::Sum),
            other => Err(Error::Parse(format!("unknown Xi kind '{other}'"))),
        }
    }
}

/// Materialized window of a progression. `entries[k-1] = (A_k, i_k)` with
/// `i_k` in `1..=d`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DataProgression {
    pub d: usize,
    pub entries: Vec<(f64, usize)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProgressionState {
    pub k: usize,
    pub b: Vec<f64>,
}

impl DataProgression {
    pub fn new(d: usize, entries: Vec<(f64, usize)>) -> Result<Self> {
        if d == 0 {
            return Err(Error::UnsupportedDimension(0));
        }
        if let Some(k) = entries.iter().position(|&(a, i)| i == 0 || i > d || !a.is_finite()) {
            return Err(Error::InvalidArgument(format!("entry {} is out of range", k + 1)));
        }
        Ok(DataProgression { d, entries })
    }

    /// Materializes `k = 1..=len` from a generator.
    pub fn from_fn(d: usize, len: usize, mut gen: impl FnMut(usize) -> (f64, usize)) -> Result<Self> {
        Self::new(d, (1..=len).map(&mut gen).collect())
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn a(&self, k: usize) -> f64 {
        self.entries[k - 1].0
    }

    pub fn index(&self, k: usize) -> usize {
        self.entries[k - 1].1
    }

    /// First `k` at which every coordinate has been written, i.e. every index
    /// occurs among `i_1, ..., i_{k-1}`.
    pub fn warmup(&self) -> Result<usize> {
        let mut seen = vec![false; self.d];
        let mut missing = self.d;
        for (k, &(_, i)) in self.entries.iter().enumerate() {
            if !seen[i - 1] {
                seen[i - 1] = true;
                missing -= 1;
                if missing == 0 {
                    return Ok(k + 2);
                }
            }
        }
        let absent: Vec<usize> = (1..=self.d).filter(|&i| !seen[i - 1]).collect();
        Err(Error::UndefinedState(format!("indices {absent:?} never occur in the window")))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("progression serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let p: DataProgression = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        Self::new(p.d, p.entries)
    }
}

/// States `Δ_k` for `k` in `range`, clipped to the warm-up and the window.
pub fn state_seq(p: &DataProgression, range: std::ops::RangeInclusive<usize>) -> Result<Vec<ProgressionState>> {
    let w = p.warmup()?;
    if *range.start() < w {
        return Err(Error::UndefinedState(format!("Δ_k is defined from k = {w}, requested k = {}", range.start())));
    }
    let hi = (*range.end()).min(p.len());
    let mut b = vec![f64::NAN; p.d];
    let mut out = Vec::new();
    // b_{k+1}^{(i_k)} = A_{k+1}
    for k in 1..=hi {
        if k >= *range.start() {
            out.push(ProgressionState { k, b: b.clone() });
        }
        if k < p.len() {
            b[p.index(k) - 1] = p.a(k + 1);
        }
    }
    Ok(out)
}

/// All states from the warm-up to the end of the window.
pub fn all_states(p: &DataProgression) -> Result<Vec<ProgressionState>> {
    let w = p.warmup()?;
    state_seq(p, w..=p.len())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub warmup: usize,
    /// First `k` past the warm-up with `b_{k+1}^{(i_k)} <= b_k^{(i_k)}`.
    pub condition_i_violation: Option<usize>,
    /// Start of the first window of length `w` in which `max(Δ_k)` does not increase.
    pub condition_ii_violation: Option<usize>,
    pub window: usize,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.condition_i_violation.is_none() && self.condition_ii_violation.is_none()
    }
}

/// Checks strict growth of the updated coordinate and growth of the maximum
/// within every window of `w` steps (`w = 8d` when `None`).
pub fn validate(p: &DataProgression, w: Option<usize>) -> Result<ValidationReport> {
    let window = w.unwrap_or(8 * p.d).max(1);
    let states = all_states(p)?;
    let warmup = p.warmup()?;
    let mut cond_i = None;
    for pair in states.windows(2) {
        let i = p.index(pair[0].k) - 1;
        if !(pair[1].b[i] > pair[0].b[i]) {
            cond_i = Some(pair[0].k);
            break;
        }
    }
    let maxes: Vec<f64> = states.iter().map(|s| XiKind::Max.apply(&s.b)).collect();
    let mut cond_ii = None;
    if maxes.len() > window {
        for start in 0..maxes.len() - window {
            if !(maxes[start + window] > maxes[start]) {
                cond_ii = Some(states[start].k);
                break;
            }
        }
    }
    Ok(ValidationReport { warmup, condition_i_violation: cond_i, condition_ii_violation: cond_ii, window })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Limit {
    NegInf,
    Zero,
    PosInf,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CostTerm {
    pub k: usize,
    pub value: f64,
    /// Rounding scale of the three summands.
    pub scale: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CostReport {
    pub terms: Vec<CostTerm>,
    pub running_min: f64,
    /// Tail behaviour over the last quarter of the window; `None` when it fits
    /// none of the three patterns.
    pub trend: Option<Limit>,
}

/// `Ψ(Ξ(Δ_k)) - b_k^{(i_k)} - b_{k+1}^{(i_k)}` for `k` from the warm-up up to
/// `min(horizon, len - 1)`.
pub fn cost<F>(p: &DataProgression, xi: XiKind, psi: F, horizon: usize) -> Result<CostReport>
where
    F: Fn(f64) -> Result<f64>,
{
    let states = all_states(p)?;
    let mut terms = Vec::new();
    for pair in states.windows(2) {
        let (s, next) = (&pair[0], &pair[1]);
        if s.k > horizon {
            break;
        }
        let i = p.index(s.k) - 1;
        let big = psi(xi.apply(&s.b))?;
        let value = big - s.b[i] - next.b[i];
        let scale = big.abs() + s.b[i].abs() + next.b[i].abs();
        terms.push(CostTerm { k: s.k, value, scale });
    }
    if terms.is_empty() {
        return Err(Error::InvalidArgument("window too short for a cost term".into()));
    }
    let running_min = terms.iter().map(|t| t.value).fold(f64::INFINITY, f64::min);
    let trend = tail_trend(&terms);
    Ok(CostReport { terms, running_min, trend })
}

fn tail_trend(terms: &[CostTerm]) -> Option<Limit> {
    let tail = &terms[terms.len() - (terms.len() / 4).max(2).min(terms.len())..];
    let negligible = |t: &CostTerm| t.value.abs() <= 1e-12 * t.scale.max(1.0);
    if tail.iter().all(negligible) {
        return Some(Limit::Zero);
    }
    if tail.iter().any(negligible) {
        return None;
    }
    let rising = tail.windows(2).all(|w| w[1].value > w[0].value);
    let falling = tail.windows(2).all(|w| w[1].value < w[0].value);
    if tail.iter().all(|t| t.value > 0.0) && rising {
        Some(Limit::PosInf)
    } else if tail.iter().all(|t| t.value < 0.0) && falling {
        Some(Limit::NegInf)
    } else {
        None
    }
}

/// `A_k = γ^k`, `i_k = ((k-1) mod d) + 1`, for `k = 1..=len`.
pub fn periodic_geometric(d: usize, gamma: f64, len: usize) -> Result<DataProgression> {
    if d == 0 {
        return Err(Error::UnsupportedDimension(0));
    }
    if !(gamma > 1.0) || !gamma.is_finite() {
        return Err(Error::InvalidArgument(format!("multiplier must exceed 1, got {gamma}")));
    }
    DataProgression::from_fn(d, len, |k| (gamma.powi(k as i32), (k - 1) % d + 1))
}

/// Sign of `α - γ - γ^{-(d-1)}`, which fixes the cost of a periodic geometric
/// progression under `Ξ = max`, `Ψ(b) = α b`.
pub fn classify_periodic_geometric(d: usize, gamma: f64, alpha: f64) -> Result<Limit> {
    if !(gamma > 1.0) || !(alpha >= 0.0) || d == 0 {
        return Err(Error::InvalidArgument("need d >= 1, γ > 1 and α >= 0".into()));
    }
    let rival = gamma + gamma.powi(1 - d as i32);
    let s = alpha - rival;
    Ok(if s.abs() <= 1e-12 * (alpha + rival) {
        Limit::Zero
    } else if s > 0.0 {
        Limit::PosInf
    } else {
        Limit::NegInf
    })
}

/// CSV rows `k,b_1,...,b_d,cost` for the states that have a cost term.
pub fn states_csv(p: &DataProgression, report: &CostReport) -> Result<String> {
    let states = all_states(p)?;
    let mut out = String::from("k");
    for i in 1..=p.d {
        let _ = write!(out, ",b{i}");
    }
    out.push_str(",cost\n");
    for t in &report.terms {
        let s = states.iter().find(|s| s.k == t.k).expect("cost term has a state");
        let _ = write!(out, "{}", s.k);
        for v in &s.b {
            let _ = write!(out, ",{v}");
        }
        let _ = writeln!(out, ",{}", t.value);
    }
    Ok(out)
}
