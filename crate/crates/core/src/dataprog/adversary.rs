//! The variance-descent game: an adversary keeps
//! `b_k^{(i_k)} + b_{k+1}^{(i_k)} <= β_d Ξ(Δ_k) - 1` while growing the updated
//! coordinate. For min and prod (and max with `d = 2`) the variance of the state
//! drops by at least `1/max(4, d)` whenever the maximum grows, so the game ends.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::XiKind;
use crate::error::{Error, Result};
use crate::heights::{beta_d, HeightKind};

/// Moves in random plays are multiples of this step.
pub const LATTICE_STEP: f64 = 0.125;
const UNITS: i64 = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MoveOutcome {
    Accepted,
    Infeasible,
}

/// Checks one proposed move `(A_{k+1}, i_k)` against the adversary's constraint.
/// `i` is 1-based. The move must increase coordinate `i`.
pub fn adversary_step(kind: HeightKind, b: &[f64], i: usize, a: f64) -> Result<MoveOutcome> {
    let d = b.len();
    if i == 0 || i > d {
        return Err(Error::InvalidArgument(format!("index {i} outside 1..={d}")));
    }
    let bi = b[i - 1];
    if !(a > bi) {
        return Err(Error::InvalidArgument(format!("move must increase coordinate {i}: {a} <= {bi}")));
    }
    let rhs = beta_d(kind, d)? * XiKind::from_height(kind)?.apply(b) - 1.0;
    let slack = 1e-12 * (rhs.abs() + bi.abs() + a.abs()).max(1.0);
    Ok(if bi + a <= rhs + slack { MoveOutcome::Accepted } else { MoveOutcome::Infeasible })
}

/// Whether any coordinate admits a move of at least `step`.
pub fn has_legal_move(kind: HeightKind, b: &[f64], step: f64) -> Result<bool> {
    for i in 1..=b.len() {
        if adversary_step(kind, b, i, b[i - 1] + step)? == MoveOutcome::Accepted {
            return Ok(true);
        }
    }
    Ok(false)
}

/// Population variance.
pub fn variance(b: &[f64]) -> f64 {
    let n = b.len() as f64;
    let mean = b.iter().sum::<f64>() / n;
    b.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdversaryPlay {
    pub kind: HeightKind,
    pub d: usize,
    pub states: Vec<Vec<f64>>,
    /// `(i_k, A_{k+1})` with 1-based `i_k`.
    pub moves: Vec<(usize, f64)>,
    /// `true` when the last state admits no lattice move.
    pub terminated: bool,
}

/// Largest lattice value (in units) coordinate `i` may move to.
fn lattice_cap(kind: HeightKind, b: &[i64], i: usize) -> i64 {
    let d = b.len() as i64;
    match kind {
        HeightKind::Max => 2 * b.iter().max().unwrap() - UNITS - b[i],
        HeightKind::Min => 2 * b.iter().min().unwrap() - UNITS - b[i],
        // d (b_i + A) <= 2 Σ - d
        HeightKind::Prod => (2 * b.iter().sum::<i64>() - UNITS * d).div_euclid(d) - b[i],
        HeightKind::Lcm => unreachable!(),
    }
}

/// Random play on the `1/8` lattice from a uniform start in `[0, init_max]^d`.
/// Each step picks a coordinate with a legal move and a uniform legal target.
pub fn random_play<R: Rng>(
    kind: HeightKind,
    d: usize,
    rng: &mut R,
    init_max: f64,
    max_steps: usize,
) -> Result<AdversaryPlay> {
    beta_d(kind, d)?;
    if d < 2 {
        return Err(Error::UnsupportedDimension(d));
    }
    let top = (init_max * UNITS as f64).floor() as i64;
    let mut b: Vec<i64> = (0..d).map(|_| rng.gen_range(0..=top)).collect();
    let to_f = |b: &[i64]| b.iter().map(|&u| u as f64 / UNITS as f64).collect::<Vec<f64>>();
    let mut states = vec![to_f(&b)];
    let mut moves = Vec::new();
    for _ in 0..max_steps {
        let legal: Vec<(usize, i64)> =
            (0..d).map(|i| (i, lattice_cap(kind, &b, i))).filter(|&(i, cap)| cap > b[i]).collect();
        if legal.is_empty() {
            return Ok(AdversaryPlay { kind, d, states, moves, terminated: true });
        }
        let (i, cap) = legal[rng.gen_range(0..legal.len())];
        let a = rng.gen_range(b[i] + 1..=cap);
        b[i] = a;
        moves.push((i + 1, a as f64 / UNITS as f64));
        states.push(to_f(&b));
    }
    let terminated = !has_legal_move(kind, states.last().unwrap(), LATTICE_STEP)?;
    Ok(AdversaryPlay { kind, d, states, moves, terminated })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VarianceStep {
    pub k: usize,
    pub var_before: f64,
    pub var_after: f64,
    /// The maximum grew on this step.
    pub k_step: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VarianceReport {
    pub steps: Vec<VarianceStep>,
    pub k_steps: usize,
    /// `ceil(Var(Δ_0) max(4, d))`.
    pub budget: u64,
    pub within_budget: bool,
    /// Steps violating either descent inequality.
    pub violations: Vec<usize>,
    /// Whether the descent inequalities are expected for this kind and dimension.
    pub claim_applies: bool,
}

/// Per-step variances of a play. Fails with `Assertion` when a descent
/// inequality breaks in a setting where it is expected to hold.
pub fn variance_descent_report(play: &AdversaryPlay) -> Result<VarianceReport> {
    let d = play.d;
    let claim_applies =
        matches!(play.kind, HeightKind::Min | HeightKind::Prod) || (play.kind == HeightKind::Max && d == 2);
    let dec = 1.0 / (d.max(4) as f64);
    let mut steps = Vec::new();
    let mut violations = Vec::new();
    for (k, w) in play.states.windows(2).enumerate() {
        let (before, after) = (variance(&w[0]), variance(&w[1]));
        let max0 = XiKind::Max.apply(&w[0]);
        let k_step = XiKind::Max.apply(&w[1]) > max0;
        let tol = 1e-9 * before.max(1.0);
        let ok = after <= before + tol && (!k_step || after <= before - dec + tol);
        if !ok {
            violations.push(k);
        }
        steps.push(VarianceStep { k, var_before: before, var_after: after, k_step });
    }
    let k_steps = steps.iter().filter(|s| s.k_step).count();
    let budget = (variance(&play.states[0]) * d.max(4) as f64 - 1e-9).ceil().max(0.0) as u64;
    let report =
        VarianceReport { steps, k_steps, budget, within_budget: k_steps as u64 <= budget, violations, claim_applies };
    if claim_applies && (!report.violations.is_empty() || !report.within_budget) {
        return Err(Error::Assertion(format!(
            "variance descent fails for {} with d = {d} at steps {:?}",
            play.kind, report.violations
        )));
    }
    Ok(report)
}
