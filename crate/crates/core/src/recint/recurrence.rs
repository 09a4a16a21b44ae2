//! Discrete criteria: the backward sequence `S_k = S_{k+1} + S_{k+1}² + f(k)`
//! with `S_N = 0`, and the forward recurrence `S_{k+1} = S_k - S_k² - t S_k³ - f(k)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::funexpr::{log_grid, FuncExpr};

pub const DEFAULT_BLOWUP: f64 = 1e6;

/// Values `f(k)` for `k = k0..=n`, cached for repeated sweeps.
pub(crate) struct Samples {
    pub k0: u64,
    pub vals: Vec<f64>,
}

impl Samples {
    pub fn new(f: &FuncExpr, k0: u64, n: u64) -> Result<Self> {
        let mut vals = Vec::with_capacity((n - k0 + 1) as usize);
        for k in k0..=n {
            vals.push(f.eval(k as f64)?);
        }
        Ok(Samples { k0, vals })
    }

    fn at(&self, k: u64) -> f64 {
        self.vals[(k - self.k0) as usize]
    }

    /// `S_{k}^{(n)}` for `k = from`, stopping early once the value exceeds `cap`.
    pub fn backward_value(&self, from: u64, n: u64, cap: f64) -> f64 {
        let mut s = 0.0f64;
        let mut k = n;
        while k > from {
            k -= 1;
            s = s + s * s + self.at(k);
            if s > cap {
                return f64::INFINITY;
            }
        }
        s
    }
}

/// `(S_k^{(N)})_{k=k0}^{N}` computed from `S_N = 0`.
pub fn backward_sequence(f: &FuncExpr, k0: u64, n: u64) -> Result<Vec<f64>> {
    if n < k0 {
        return Err(Error::InvalidArgument(format!("need N >= k0, got N = {n}, k0 = {k0}")));
    }
    let mut out = vec![0.0; (n - k0 + 1) as usize];
    for k in (k0..n).rev() {
        let next = out[(k + 1 - k0) as usize];
        out[(k - k0) as usize] = next + next * next + f.eval(k as f64)?;
    }
    Ok(out)
}

/// Smallest integer `k >= 2` above the domain guard such that `f(j) <= 1/j` at
/// `j = k` and on a log-spaced sample of `[k, limit]`.
pub fn default_k0(f: &FuncExpr, limit: f64) -> Result<u64> {
    let start = (f.t_domain().max(1.0).floor() as u64 + 1).max(2);
    let ok = |k: u64| -> bool {
        let kf = k as f64;
        let pts = if limit > kf { log_grid(kf, limit, 48) } else { vec![kf] };
        pts.iter().all(|&x| matches!(f.eval(x), Ok(v) if v <= 1.0 / x))
    };
    let mut k = start;
    while (k as f64) < limit {
        if ok(k) {
            return Ok(k);
        }
        k = if k < 64 { k + 1 } else { k + k / 8 };
    }
    Err(Error::Domain("no starting index with f(k) <= 1/k below the limit".into()))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScheduleEntry {
    pub n: u64,
    /// Overflow is written as `null` in JSON.
    #[serde(with = "overflow_as_null")]
    pub s_k0: f64,
}

mod overflow_as_null {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_finite() {
            s.serialize_f64(*v)
        } else {
            s.serialize_none()
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::INFINITY))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SupersolutionCertificate {
    /// First index of the certified range.
    pub k_start: u64,
    pub n_max: u64,
    /// Bound `1/(2(k_start - 1))` dominating every `S_{k_start}^{(N)}`.
    pub bound: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum RecurrenceOutcome {
    Bounded { certificate: SupersolutionCertificate, schedule: Vec<ScheduleEntry>, increment_ratio: Option<f64> },
    Blowup { n: u64, schedule: Vec<ScheduleEntry> },
    Inconclusive { schedule: Vec<ScheduleEntry>, increment_ratio: Option<f64>, note: String },
}

/// `T_k = 1/(2(k-1))` satisfies `T_k >= T_{k+1} + T_{k+1}² + f(k)` exactly when
/// `f(k) <= (k+1)/(4k²(k-1))`. Returns the smallest `k_start` from which this
/// holds up to `n - 1`.
fn supersolution_start(s: &Samples, n: u64) -> Option<u64> {
    let mut start = None;
    for k in (s.k0.max(2)..n).rev() {
        let kf = k as f64;
        let bound = (kf + 1.0) / (4.0 * kf * kf * (kf - 1.0));
        if s.at(k) <= bound * (1.0 + 1e-12) {
            start = Some(k);
        } else {
            break;
        }
    }
    start
}

fn increment_ratio(schedule: &[ScheduleEntry]) -> Option<f64> {
    let m = schedule.len();
    if m < 3 {
        return None;
    }
    let d1 = schedule[m - 2].s_k0 - schedule[m - 3].s_k0;
    let d2 = schedule[m - 1].s_k0 - schedule[m - 2].s_k0;
    (d1 > 0.0 && d2.is_finite()).then(|| d2 / d1)
}

/// Doubling schedule `n_min, 2 n_min, ..., n_max`.
pub fn doubling_schedule(n_min: u64, n_max: u64) -> Vec<u64> {
    let mut v = Vec::new();
    let mut n = n_min.max(1);
    while n < n_max {
        v.push(n);
        n *= 2;
    }
    v.push(n_max);
    v
}

pub(crate) fn run_recurrence(f: &FuncExpr, k0: u64, schedule: &[u64], blowup: f64) -> Result<RecurrenceOutcome> {
    let n_max = *schedule.iter().max().ok_or_else(|| Error::InvalidArgument("empty N schedule".into()))?;
    if n_max <= k0 + 4 {
        return Err(Error::InvalidArgument(format!("N schedule must exceed k0 = {k0}")));
    }
    let s = Samples::new(f, k0, n_max)?;
    let mut sched = Vec::new();
    for &n in schedule.iter().filter(|&&n| n > k0) {
        let v = s.backward_value(k0, n, blowup);
        sched.push(ScheduleEntry { n, s_k0: v });
        if v > blowup {
            // a blow-up only counts when the forcing stays above the critical
            // size over the range that produced it
            let transient = (k0..n).step_by(((n - k0) / 64).max(1) as usize).any(|k| {
                let kf = k as f64;
                !(kf * kf * s.at(k) > 0.25)
            });
            if transient {
                return Ok(RecurrenceOutcome::Inconclusive {
                    schedule: sched,
                    increment_ratio: None,
                    note: "blow-up with k² f(k) <= 1/4 somewhere in the range".into(),
                });
            }
            return Ok(RecurrenceOutcome::Blowup { n, schedule: sched });
        }
    }
    let ratio = increment_ratio(&sched);
    match supersolution_start(&s, n_max) {
        Some(k_start) if k_start <= n_max / 4 => {
            let bound = 0.5 / (k_start as f64 - 1.0);
            let certificate = SupersolutionCertificate { k_start, n_max, bound };
            let check = s.backward_value(k_start, n_max, f64::INFINITY);
            if check > bound * (1.0 + 1e-9) {
                return Ok(RecurrenceOutcome::Inconclusive {
                    schedule: sched,
                    increment_ratio: ratio,
                    note: format!("computed S exceeds the supersolution bound ({check} > {bound})"),
                });
            }
            Ok(RecurrenceOutcome::Bounded { certificate, schedule: sched, increment_ratio: ratio })
        }
        _ => Ok(RecurrenceOutcome::Inconclusive {
            schedule: sched,
            increment_ratio: ratio,
            note: "bounded on the schedule but no supersolution range was found".into(),
        }),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForwardRun {
    pub k0: u64,
    pub t: f64,
    pub values: Vec<f64>,
    /// First `k` with `S_k < 0`.
    pub first_negative: Option<u64>,
}

/// `S_{k+1} = S_k - S_k² - t S_k³ - f(k)` from `S_{k0} = s_start` up to `k = kmax`.
pub fn forward_c2(f: &FuncExpr, t: f64, s_start: f64, k0: u64, kmax: u64) -> Result<ForwardRun> {
    let guard = 1.0 / 5f64.max(t.abs() + 1.0);
    if !(s_start >= 0.0 && s_start <= guard) {
        return Err(Error::InvalidArgument(format!("S_start must lie in [0, {guard}]")));
    }
    let mut values = vec![s_start];
    let mut sk = s_start;
    let mut first_negative = None;
    for k in k0..kmax {
        sk = sk - sk * sk - t * sk * sk * sk - f.eval(k as f64)?;
        values.push(sk);
        if sk < 0.0 {
            first_negative = Some(k + 1);
            break;
        }
    }
    Ok(ForwardRun { k0, t, values, first_negative })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::funexpr::parse_expr;

    #[test]
    fn zero_forcing_sequence_is_zero() {
        let f = parse_expr("0").unwrap();
        assert_eq!(backward_sequence(&f, 10, 12).unwrap(), vec![0.0, 0.0, 0.0]);
    }

    #[test]
    fn subcritical_converges_and_supercritical_diverges() {
        let f = parse_expr("0.2/x^2").unwrap();
        let sched = doubling_schedule(1 << 10, 1 << 17);
        match run_recurrence(&f, 10, &sched, DEFAULT_BLOWUP).unwrap() {
            RecurrenceOutcome::Bounded { schedule, .. } => {
                assert!(schedule.windows(2).all(|w| w[0].s_k0 <= w[1].s_k0));
            }
            other => panic!("{other:?}"),
        }
        let g = parse_expr("0.3/x^2").unwrap();
        let sched = doubling_schedule(1 << 10, 1 << 20);
        match run_recurrence(&g, 10, &sched, DEFAULT_BLOWUP).unwrap() {
            RecurrenceOutcome::Inconclusive { schedule, .. } => {
                assert!(schedule.windows(2).all(|w| w[0].s_k0 < w[1].s_k0));
            }
            other => panic!("{other:?}"),
        }
        let sched = doubling_schedule(1 << 10, 1 << 22);
        assert!(matches!(run_recurrence(&g, 2, &sched, DEFAULT_BLOWUP).unwrap(), RecurrenceOutcome::Blowup { .. }));
    }

    #[test]
    fn forward_examples() {
        let z = parse_expr("0").unwrap();
        let r = forward_c2(&z, 0.0, 0.1, 1, 1000).unwrap();
        assert!(r.first_negative.is_none());
        assert!(r.values.windows(2).all(|w| w[1] < w[0] && w[1] > 0.0));
        let g = parse_expr("0.3/x^2").unwrap();
        for s0 in [0.01, 0.05, 0.1] {
            assert!(forward_c2(&g, 0.0, s0, 10, 1_000_000).unwrap().first_negative.is_some());
        }
        let h = parse_expr("0.2/x^2").unwrap();
        // the fixed point branch a/k with a - a² = 0.2 is a ≈ 0.7236
        let r = forward_c2(&h, 0.0, 0.2, 10, 1_000_000).unwrap();
        assert!(r.first_negative.is_none());
        assert!(forward_c2(&h, 0.0, 0.5, 10, 100).is_err());
    }

    #[test]
    fn k0_rule() {
        let f = parse_expr("100/x^3").unwrap();
        assert_eq!(default_k0(&f, 1e6).unwrap(), 10);
        let g = parse_expr("0.3/x^2").unwrap();
        assert_eq!(default_k0(&g, 1e6).unwrap(), 2);
    }
}
