//! Both directions between points of `R^d` and data progressions.

use num_bigint::BigInt;
use num_traits::One;
use serde::{Deserialize, Serialize};

use super::{all_states, DataProgression};
use crate::cfrac::{convergents, denominators_to_cf, ContinuedFraction};
use crate::error::{Error, Result};
use crate::real::{exp_floor_bigint, ln_bigint};

/// Merges the convergent denominators of every coordinate by the key
/// `q_n q_{n+1}`. Entry `k` records `i_k` and `A_{k+1} = log q_{m_k+1}^{(i_k)}`;
/// `A_1` is set to `log q_{m_1}^{(i_1)}`.
///
/// Coordinates whose expansion ends before `depth` are treated as rational and
/// contribute every pair. Otherwise the merge stops at the smallest last key
/// among the non-terminating coordinates so that no pair is missing below it.
pub fn progression_from_point(x: &[ContinuedFraction], depth: usize) -> Result<DataProgression> {
    if x.is_empty() {
        return Err(Error::UnsupportedDimension(0));
    }
    if depth < 2 {
        return Err(Error::InvalidArgument("need at least two convergents per coordinate".into()));
    }
    let mut pairs: Vec<(BigInt, usize, usize)> = Vec::new();
    let mut qs_all = Vec::with_capacity(x.len());
    let mut cutoff: Option<BigInt> = None;
    for (i, cf) in x.iter().enumerate() {
        let qs: Vec<BigInt> = convergents(cf, depth).into_iter().map(|c| c.q).collect();
        let finite = cf.last_index() < depth;
        for n in 0..qs.len() - 1 {
            pairs.push((&qs[n] * &qs[n + 1], i, n));
        }
        if !finite && qs.len() >= 2 {
            let last = &qs[qs.len() - 2] * &qs[qs.len() - 1];
            cutoff = Some(match cutoff {
                Some(c) if c <= last => c,
                _ => last,
            });
        }
        qs_all.push(qs);
    }
    if let Some(c) = &cutoff {
        pairs.retain(|p| &p.0 <= c);
    }
    pairs.sort();
    let mut entries = Vec::with_capacity(pairs.len());
    let (_, i1, m1) = &pairs[0];
    let mut a = ln_bigint(&qs_all[*i1][*m1]);
    for (_, i, m) in &pairs {
        entries.push((a, i + 1));
        a = ln_bigint(&qs_all[*i][m + 1]);
    }
    DataProgression::new(x.len(), entries)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointConstruction {
    pub coords: Vec<ContinuedFraction>,
    /// `b` values at the milestones used for `q_1, q_2, ...` of each coordinate.
    pub milestones: Vec<Vec<f64>>,
    /// Target denominators `1, floor(e^{b_1}), ...` handed to the greedy construction.
    #[serde(skip)]
    pub targets: Vec<Vec<BigInt>>,
    /// Coordinates that produced fewer than the requested number of milestones;
    /// on an infinite progression such a coordinate would be rational.
    pub exhausted: Vec<bool>,
}

/// Thins each coordinate's `b` sequence to milestones at least `log 2` apart and
/// builds a number whose convergent denominators sit within a factor 2 of
/// `exp` of those milestones.
pub fn point_from_progression(p: &DataProgression, n_terms: usize) -> Result<PointConstruction> {
    let states = all_states(p)?;
    let mut coords = Vec::with_capacity(p.d);
    let mut milestones = Vec::with_capacity(p.d);
    let mut targets = Vec::with_capacity(p.d);
    let mut exhausted = Vec::with_capacity(p.d);
    for i in 0..p.d {
        let mut marks = vec![states[0].b[i]];
        for s in &states[1..] {
            if marks.len() > n_terms {
                break;
            }
            let last = marks[marks.len() - 1];
            if s.b[i] >= last + std::f64::consts::LN_2 - 1e-12 * last.abs().max(1.0) {
                marks.push(s.b[i]);
            }
        }
        let mut used = Vec::new();
        let mut tq = vec![BigInt::one()];
        for &m in &marks[1..] {
            if used.len() == n_terms {
                break;
            }
            if m < std::f64::consts::LN_2 {
                continue;
            }
            let mut q = exp_floor_bigint(m);
            let twice = BigInt::from(2) * &tq[tq.len() - 1];
            // milestones exactly log 2 apart can lose the doubling to rounding
            if q < twice && ln_bigint(&twice) - m <= 1e-9 {
                q = twice.clone();
            }
            if q >= twice {
                tq.push(q);
                used.push(m);
            }
        }
        exhausted.push(used.len() < n_terms);
        coords.push(denominators_to_cf(&tq)?);
        milestones.push(used);
        targets.push(tq);
    }
    Ok(PointConstruction { coords, milestones, targets, exhausted })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cfrac::expand_real;
    use crate::dataprog::{periodic_geometric, validate};
    use crate::heights::gamma_d;
    use crate::real::Real;

    #[test]
    fn golden_ratio_gives_fibonacci() {
        let cf = expand_real(&Real::golden_ratio(), 40, 256).unwrap();
        let p = progression_from_point(&[cf], 40).unwrap();
        let mut fib = vec![1.0f64, 1.0];
        while fib.len() < 45 {
            let n = fib.len();
            fib.push(fib[n - 1] + fib[n - 2]);
        }
        // fib[n] = Fib(n + 1), so A_k = log Fib(k) = ln fib[k - 1]
        for k in 1..=p.len() {
            assert!((p.a(k) - fib[k - 1].ln()).abs() < 1e-12, "k = {k}");
            assert_eq!(p.index(k), 1);
        }
    }

    #[test]
    fn two_coordinate_merge() {
        let x = [expand_real(&Real::golden_ratio(), 30, 256).unwrap(), expand_real(&Real::sqrt(2), 30, 256).unwrap()];
        let p = progression_from_point(&x, 30).unwrap();
        assert!(p.entries.iter().any(|e| e.1 == 1) && p.entries.iter().any(|e| e.1 == 2));
        let r = validate(&p, None).unwrap();
        assert!(r.passed(), "{r:?}");
    }

    #[test]
    fn sandwich_on_periodic_geometric() {
        let p = periodic_geometric(3, gamma_d(3), 60).unwrap();
        let c = point_from_progression(&p, 8).unwrap();
        for i in 0..3 {
            let convs = convergents(&c.coords[i], 100);
            for (n, m) in c.milestones[i].iter().enumerate() {
                let q = &convs[n + 1].q;
                let t = &c.targets[i][n + 1];
                assert!(q <= t && BigInt::from(2) * q >= *t);
                assert!((ln_bigint(q) - m).abs() <= std::f64::consts::LN_2 + 1e-9);
            }
        }
    }

    #[test]
    fn powers_of_two() {
        let p = DataProgression::from_fn(1, 30, |k| ((k as f64) * std::f64::consts::LN_2, 1)).unwrap();
        let c = point_from_progression(&p, 20).unwrap();
        assert!(!c.exhausted[0]);
        for n in 1..=20 {
            let t = c.targets[0][n].to_string().parse::<f64>().unwrap();
            let want = 2f64.powi(n as i32 + 2);
            assert!(t <= want && t >= want - 1.0, "n = {n}: {t}");
        }
        assert_eq!(c.coords[0], denominators_to_cf(&c.targets[0]).unwrap());
    }

    #[test]
    fn coordinate_touched_finitely_often() {
        let mut entries: Vec<(f64, usize)> = vec![(1.0, 2), (1.0, 1)];
        for k in 3..=60 {
            entries.push((k as f64, 1));
        }
        let p = DataProgression::new(2, entries).unwrap();
        let c = point_from_progression(&p, 5).unwrap();
        assert!(c.exhausted[1]);
        assert!(!c.exhausted[0]);
    }
}
