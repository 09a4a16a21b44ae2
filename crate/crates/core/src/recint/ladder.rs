//! Asymptotic classification against the family `f_{N,C}`.
//!
//! Rung 0 is the expansion of `f`. When rung `j` is `1/(4x²)` plus lower-order
//! terms, rung `j+1` is `F(y) = e^{2y} f_j(e^y) - 1/4`, so that
//! `f_j(x) = (1/x²)(1/4 + F(log x))`. Terms below `x^{-2}` by a power of `x`
//! become exponentially small and are dropped.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::funexpr::asym::{cmp_exps, expand, Monomial, Series, DEPTH};
use crate::funexpr::FuncExpr;

/// Tolerance for treating a leading coefficient as exactly `1/4`.
pub const QUARTER_TOL: f64 = 1e-9;
const MAX_RUNGS: usize = DEPTH - 2;

fn inv_square() -> [f64; DEPTH] {
    let mut e = [0.0; DEPTH];
    e[0] = -2.0;
    e
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LadderEnd {
    /// Leading term is `c/x²` with `c < 1/4`, or decays faster than `x^{-2}`.
    Below,
    /// Leading term is `c/x²` with `c > 1/4`, or decays slower than `x^{-2}`.
    Above,
    /// The rung after a peel has a negative leading term: the previous rung is
    /// eventually at most `1/(4x²)`.
    NegativeRemainder,
    /// The rung after a peel vanishes up to exponentially small terms.
    Boundary,
    /// `f` vanishes identically.
    Zero,
    /// `f` itself is eventually negative.
    Negative,
    Unresolved,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Ladder {
    pub rungs: Vec<Series>,
    pub end: LadderEnd,
    /// Rung on which the end was detected.
    pub terminal: usize,
    pub note: Option<String>,
}

/// Peels `1/4` off a rung whose leading term is `c/x²`, returning the next rung.
/// The result is marked exact when every discarded term was below `x^{-2}` by
/// a power of `x`.
pub fn peel(s: &Series, forced: bool) -> Series {
    let mut terms = Vec::new();
    let mut complete = s.exact;
    for (i, t) in s.terms.iter().enumerate() {
        let e0 = t.exps[0];
        if (e0 + 2.0).abs() <= 1e-12 {
            let mut exps = [0.0; DEPTH];
            exps[..DEPTH - 1].copy_from_slice(&t.exps[1..]);
            let coef = if i == 0 && forced { t.coef - 0.25 } else { t.coef };
            if i == 0 && !forced {
                continue;
            }
            terms.push(Monomial { coef, exps });
        }
    }
    // every e0 = -2 term dominates every e0 < -2 term, so if none of the kept
    // tail terms sits at e0 = -2, neither did anything truncated away
    if s.terms.iter().skip(1).all(|t| t.exps[0] < -2.0 - 1e-12) {
        complete = true;
    }
    Series::from_terms(terms, complete)
}

pub fn ladder_of_series(s0: Series) -> Ladder {
    let mut rungs = vec![s0];
    loop {
        let j = rungs.len() - 1;
        let s = &rungs[j];
        let done = |end, note: Option<String>, rungs: Vec<Series>| Ladder { rungs, end, terminal: j, note };
        let Some(lead) = s.lead().cloned() else {
            let end = match (j, s.exact) {
                (0, true) => LadderEnd::Zero,
                (_, true) => LadderEnd::Boundary,
                _ => return done(LadderEnd::Unresolved, Some("remainder lost to truncation".into()), rungs),
            };
            return done(end, None, rungs);
        };
        if lead.coef < 0.0 {
            let end = if j == 0 { LadderEnd::Negative } else { LadderEnd::NegativeRemainder };
            return done(end, None, rungs);
        }
        match cmp_exps(&lead.exps, &inv_square()) {
            Ordering::Greater => return done(LadderEnd::Above, None, rungs),
            Ordering::Less => return done(LadderEnd::Below, None, rungs),
            Ordering::Equal => {
                if lead.coef > 0.25 + QUARTER_TOL {
                    return done(LadderEnd::Above, None, rungs);
                }
                if lead.coef < 0.25 - QUARTER_TOL {
                    return done(LadderEnd::Below, None, rungs);
                }
            }
        }
        if j >= MAX_RUNGS {
            return done(LadderEnd::Unresolved, Some(format!("no decision after {MAX_RUNGS} rungs")), rungs);
        }
        let next = peel(s, false);
        rungs.push(next);
    }
}

/// `None` when `f` has no expansion in the supported class.
pub fn ladder(f: &FuncExpr) -> Option<Ladder> {
    expand(f).map(ladder_of_series)
}

impl Ladder {
    /// RR verdict implied by the asymptotics alone; `None` when unresolved or
    /// when `f` is eventually negative.
    pub fn in_rr(&self) -> Option<bool> {
        match self.end {
            LadderEnd::Below | LadderEnd::NegativeRemainder | LadderEnd::Boundary | LadderEnd::Zero => Some(true),
            LadderEnd::Above => Some(false),
            LadderEnd::Negative | LadderEnd::Unresolved => None,
        }
    }

    /// Rung whose function the numeric methods should be run on, and the
    /// expression for it.
    pub fn check_rung(&self) -> Option<(usize, Series)> {
        let j = self.terminal;
        match self.end {
            LadderEnd::Below | LadderEnd::Zero => Some((j, self.rungs[j].clone())),
            LadderEnd::NegativeRemainder | LadderEnd::Boundary => Some((j - 1, self.rungs[j - 1].clone())),
            LadderEnd::Above => {
                let s = &self.rungs[j];
                let lead = s.lead()?;
                if cmp_exps(&lead.exps, &inv_square()) == Ordering::Equal {
                    Some((j + 1, peel(s, true)))
                } else {
                    Some((j, s.clone()))
                }
            }
            LadderEnd::Negative | LadderEnd::Unresolved => None,
        }
    }

    /// `(N, C)` of the family member `f` is compared with: `f <= f_{N,1/4}`
    /// when in RR; `f >= f_{N,C}` for a `C > 1/4` otherwise (`C = None` when
    /// `f` dominates every member with that `N`).
    pub fn family_position(&self) -> Option<(i32, Option<f64>)> {
        let j = self.terminal as i32;
        match self.end {
            LadderEnd::Below => Some((j - 1, Some(0.25))),
            LadderEnd::NegativeRemainder | LadderEnd::Boundary => Some((j - 2, Some(0.25))),
            LadderEnd::Zero => Some((-1, Some(0.25))),
            LadderEnd::Above => {
                let lead = self.rungs[self.terminal].lead()?;
                if cmp_exps(&lead.exps, &inv_square()) == Ordering::Equal {
                    Some((j - 1, Some(0.5 * (lead.coef + 0.25))))
                } else {
                    Some((j - 1, None))
                }
            }
            LadderEnd::Negative | LadderEnd::Unresolved => None,
        }
    }

    /// Leading coefficient on the terminal rung when it is of order `x^{-2}`.
    pub fn terminal_coefficient(&self) -> Option<f64> {
        let lead = self.rungs.get(self.terminal)?.lead()?;
        (cmp_exps(&lead.exps, &inv_square()) == Ordering::Equal).then_some(lead.coef)
    }

    pub fn describe(&self) -> Vec<String> {
        self.rungs.iter().map(|s| s.to_string()).collect()
    }
}
