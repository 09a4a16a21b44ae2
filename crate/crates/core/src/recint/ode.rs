//! Adaptive integration of `-g' = g² + f` in the variable `s = log x`, where the
//! scaled unknown `h = x g` obeys `dh/ds = h - h² - x² f(x)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::funexpr::{log_grid, FuncExpr};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    HorizonReached,
    WentNegative,
    StepUnderflow,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct StepLog {
    pub accepted: usize,
    pub rejected: usize,
    pub min_step: f64,
    pub max_step: f64,
    /// Largest accepted local error estimate, relative to the tolerance scale.
    pub max_error_ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OdeTrace {
    pub t1: f64,
    pub g0: f64,
    /// Sampled `(x, g(x))` pairs.
    pub points: Vec<(f64, f64)>,
    pub steps: StepLog,
    pub termination: Termination,
    /// `x` at which `g` reached zero, when it did.
    pub crossing: Option<f64>,
}

impl OdeTrace {
    pub fn last(&self) -> (f64, f64) {
        *self.points.last().expect("trace has at least the initial point")
    }

    /// `x g(x)` at the last sample.
    pub fn h_end(&self) -> f64 {
        let (x, g) = self.last();
        x * g
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("x,g\n");
        for (x, g) in &self.points {
            s.push_str(&format!("{x:.17e},{g:.17e}\n"));
        }
        s
    }

    /// Keeps at most `n` roughly evenly spaced samples, always including both ends.
    pub fn thinned(&self, n: usize) -> OdeTrace {
        let mut t = self.clone();
        if self.points.len() > n && n >= 2 {
            let m = self.points.len() - 1;
            t.points = (0..n).map(|i| self.points[i * m / (n - 1)]).collect();
        }
        t
    }

    pub fn is_decreasing(&self) -> bool {
        self.points.windows(2).all(|w| w[1].1 <= w[0].1)
    }
}

// Dormand–Prince 5(4) tableau.
const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const B4: [f64; 7] =
    [5179.0 / 57600.0, 0.0, 7571.0 / 16695.0, 393.0 / 640.0, -92097.0 / 339200.0, 187.0 / 2100.0, 1.0 / 40.0];

struct Rhs<'a> {
    f: &'a FuncExpr,
}

impl Rhs<'_> {
    fn eval(&self, s: f64, h: f64) -> Result<f64> {
        let x = s.exp();
        let fx = self.f.eval(x)?;
        Ok(h - h * h - x * x * fx)
    }
}

/// One Dormand–Prince step; returns (5th-order value, error estimate).
fn dp_step(rhs: &Rhs, s: f64, h: f64, dt: f64) -> Result<(f64, f64)> {
    let mut k = [0.0f64; 7];
    for i in 0..7 {
        let mut y = h;
        for j in 0..i {
            y += dt * A[i][j] * k[j];
        }
        k[i] = rhs.eval(s + C[i] * dt, y)?;
    }
    let mut y5 = h;
    let mut y4 = h;
    for i in 0..7 {
        y5 += dt * B5[i] * k[i];
        y4 += dt * B4[i] * k[i];
    }
    Ok((y5, (y5 - y4).abs()))
}

/// Integrates from `g(t1) = g0` to `horizon` or to the first zero of `g`.
pub fn ode_witness(f: &FuncExpr, t1: f64, g0: f64, horizon: f64, tol: f64) -> Result<OdeTrace> {
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument("tolerance must be positive".into()));
    }
    if !(t1 > 0.0 && horizon > t1) {
        return Err(Error::InvalidArgument(format!("need 0 < t1 < horizon, got t1 = {t1}, horizon = {horizon}")));
    }
    if !(g0 >= 0.0) {
        return Err(Error::InvalidArgument("g0 must be nonnegative".into()));
    }
    let rhs = Rhs { f };
    let (s0, s_end) = (t1.ln(), horizon.ln());
    let mut s = s0;
    let mut h = t1 * g0;
    let atol = tol * 1e-2;
    let mut dt = 1e-3f64.min(s_end - s0);
    let mut log = StepLog { min_step: f64::INFINITY, ..Default::default() };
    let mut points = vec![(t1, g0)];
    let mut termination = Termination::HorizonReached;
    let mut crossing = None;
    // value 0 at t1 means the trace starts on the boundary
    if h <= 0.0 && f.eval(t1)? > 0.0 {
        return Ok(OdeTrace { t1, g0, points, steps: log, termination: Termination::WentNegative, crossing: Some(t1) });
    }
    while s < s_end {
        dt = dt.min(s_end - s);
        if dt < 1e-13 * s.abs().max(1.0) {
            termination = Termination::StepUnderflow;
            break;
        }
        let (hn, err) = dp_step(&rhs, s, h, dt)?;
        let scale = atol + tol * h.abs().max(hn.abs());
        let ratio = err / scale;
        if !hn.is_finite() || ratio > 1.0 {
            log.rejected += 1;
            let fac = if ratio.is_finite() { (0.9 * ratio.powf(-0.2)).clamp(0.1, 0.5) } else { 0.1 };
            dt *= fac;
            continue;
        }
        if hn < 0.0 {
            // locate the zero by bisection on the step fraction
            let (mut lo, mut hi) = (0.0f64, 1.0f64);
            for _ in 0..60 {
                let mid = 0.5 * (lo + hi);
                let (hm, _) = dp_step(&rhs, s, h, mid * dt)?;
                if hm < 0.0 {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            let sc = s + hi * dt;
            let xc = sc.exp();
            points.push((xc, 0.0));
            crossing = Some(xc);
            termination = Termination::WentNegative;
            log.accepted += 1;
            break;
        }
        log.accepted += 1;
        log.min_step = log.min_step.min(dt);
        log.max_step = log.max_step.max(dt);
        log.max_error_ratio = log.max_error_ratio.max(ratio);
        s += dt;
        h = hn;
        let x = s.exp();
        points.push((x, h / x));
        let fac = if ratio > 0.0 { (0.9 * ratio.powf(-0.2)).clamp(0.2, 5.0) } else { 5.0 };
        dt *= fac;
    }
    if log.min_step == f64::INFINITY {
        log.min_step = 0.0;
    }
    Ok(OdeTrace { t1, g0, points, steps: log, termination, crossing })
}

pub const DEFAULT_TOL: f64 = 1e-10;
/// Allowed drop of `x g(x)` below `1/2` on a certified trace.
pub const H_MARGIN: f64 = 0.05;
/// Doubling the largest `g0` may push the crossing point out by at most this factor.
pub const ESCALATION_FACTOR: f64 = 2.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OdeCrossing {
    pub t1: f64,
    pub g0: f64,
    pub crossing: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OdeWitness {
    pub t1: f64,
    pub g0: f64,
    pub h_end: f64,
    pub h_min_tail: f64,
    pub trace: OdeTrace,
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum OdeOutcome {
    Witness(OdeWitness),
    Negative { crossings: Vec<OdeCrossing>, escalation_ratio: f64 },
    Inconclusive { note: String },
}

/// `true` when `x² f(x) > 1/4` at every sampled point of `[lo, hi]`.
pub(crate) fn tail_above_quarter(f: &FuncExpr, lo: f64, hi: f64) -> Result<bool> {
    if !(hi > lo) {
        return Ok(false);
    }
    for x in log_grid(lo, hi, 64) {
        let v = f.eval(x)?;
        if !(x * x * v > 0.25) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Tries to certify a witness from `g0 = 1/(2 t1)`: the trace must survive to
/// the horizon with `x g(x)` staying above `1/2 - H_MARGIN` over its second half.
pub(crate) fn certify_witness(f: &FuncExpr, t1: f64, horizon: f64) -> Result<Option<OdeWitness>> {
    let g0 = 0.5 / t1;
    let trace = ode_witness(f, t1, g0, horizon, DEFAULT_TOL)?;
    if trace.termination != Termination::HorizonReached {
        return Ok(None);
    }
    let s_mid = 0.5 * (t1.ln() + horizon.ln());
    let h_min_tail =
        trace.points.iter().filter(|(x, _)| x.ln() >= s_mid).map(|(x, g)| x * g).fold(f64::INFINITY, f64::min);
    let h_end = trace.h_end();
    if h_end > 0.0 && h_min_tail >= 0.5 - H_MARGIN {
        return Ok(Some(OdeWitness { t1, g0, h_end, h_min_tail, trace }));
    }
    Ok(None)
}

pub(crate) fn run_ode(f: &FuncExpr, t1_grid: &[f64], g0_grid: &[f64], horizon: f64) -> Result<OdeOutcome> {
    if t1_grid.is_empty() {
        return Err(Error::InvalidArgument("empty t1 grid".into()));
    }
    for &t1 in t1_grid {
        if let Some(w) = certify_witness(f, t1, horizon)? {
            return Ok(OdeOutcome::Witness(w));
        }
    }
    let mut crossings = Vec::new();
    let mut worst_ratio: f64 = 0.0;
    for &t1 in t1_grid {
        let gmax = g0_grid.iter().cloned().fold(0.5 / t1, f64::max);
        let mut grid: Vec<f64> = g0_grid.to_vec();
        grid.push(gmax);
        for &g0 in &grid {
            let tr = ode_witness(f, t1, g0, horizon, DEFAULT_TOL)?;
            match tr.crossing {
                Some(xc) => crossings.push(OdeCrossing { t1, g0, crossing: xc }),
                None => {
                    return Ok(OdeOutcome::Inconclusive {
                        note: format!("g0 = {g0} from t1 = {t1} survives to the horizon without the witness margin"),
                    })
                }
            }
        }
        let base = crossings.last().map(|c| c.crossing).unwrap_or(t1);
        let doubled = ode_witness(f, t1, 2.0 * gmax, horizon, DEFAULT_TOL)?;
        let Some(xd) = doubled.crossing else {
            return Ok(OdeOutcome::Inconclusive {
                note: format!("doubling g0 to {} survives to the horizon", 2.0 * gmax),
            });
        };
        crossings.push(OdeCrossing { t1, g0: 2.0 * gmax, crossing: xd });
        let ratio = xd / base;
        worst_ratio = worst_ratio.max(ratio);
        if ratio > ESCALATION_FACTOR {
            return Ok(OdeOutcome::Inconclusive {
                note: format!("doubling g0 moved the crossing by a factor {ratio:.3}"),
            });
        }
        let first = crossings.iter().filter(|c| c.t1 == t1).map(|c| c.crossing).fold(f64::INFINITY, f64::min);
        if !tail_above_quarter(f, first, horizon)? {
            return Ok(OdeOutcome::Inconclusive {
                note: "x² f(x) drops to 1/4 or below after the crossing; the crossing may be transient".into(),
            });
        }
    }
    Ok(OdeOutcome::Negative { crossings, escalation_ratio: worst_ratio })
}
