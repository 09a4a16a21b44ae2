//! The adversary check for min, prod and two-dimensional max, and the
//! optimisation facts behind `γ_d` and `α_d`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dataprog::{random_play, variance_descent_report};
use crate::error::{Error, Result};
use crate::heights::{alpha_d, gamma_d, HeightKind};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MinProdReport {
    pub kind: HeightKind,
    pub d: usize,
    pub trials: usize,
    pub seed: u64,
    pub terminated: usize,
    pub max_k_steps: usize,
    pub max_budget: u64,
    pub max_moves: usize,
    /// Plays whose first state already had no legal move.
    pub dead_on_arrival: usize,
}

/// Plays `trials` random adversary games and checks that each one stops
/// with the number of max-raising moves inside the variance budget.
pub fn minprod_uniform_check(kind: HeightKind, d: usize, trials: usize, seed: u64) -> Result<MinProdReport> {
    match kind {
        HeightKind::Lcm => return Err(Error::InvalidArgument("the adversary game is not defined for lcm".into())),
        HeightKind::Max if d > 2 => {
            return Err(Error::InvalidArgument("the variance argument covers max only for d <= 2".into()))
        }
        _ => {}
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut r = MinProdReport {
        kind,
        d,
        trials,
        seed,
        terminated: 0,
        max_k_steps: 0,
        max_budget: 0,
        max_moves: 0,
        dead_on_arrival: 0,
    };
    for t in 0..trials {
        let play = random_play(kind, d, &mut rng, 20.0, 1_000_000)?;
        if !play.terminated {
            return Err(Error::Assertion(format!("play {t} is still alive after {} moves", play.moves.len())));
        }
        let v = variance_descent_report(&play)?;
        r.terminated += 1;
        r.max_k_steps = r.max_k_steps.max(v.k_steps);
        r.max_budget = r.max_budget.max(v.budget);
        r.max_moves = r.max_moves.max(play.moves.len());
        if play.moves.is_empty() {
            r.dead_on_arrival += 1;
        }
    }
    Ok(r)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GammaOptimumReport {
    pub d: usize,
    pub gamma_d: f64,
    pub alpha_d: f64,
    pub grid_step: f64,
    /// Grid point maximising `f_d(γ) = (α_d - γ) γ^{d-1}`.
    pub grid_argmax: f64,
    /// Maximiser after golden-section refinement around the grid argmax.
    pub argmax: f64,
    pub max_value: f64,
    /// Grid point minimising `γ + γ^{1-d}`, and the refined minimum.
    pub grid_argmin: f64,
    pub min_value: f64,
    /// `f_d(γ) < 1` at every grid point away from `γ_d`.
    pub strict_on_grid: bool,
}

fn golden_max(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    while b - a > 1e-13 {
        let (c, e) = (b - r * (b - a), a + r * (b - a));
        if f(c) >= f(e) {
            b = e;
        } else {
            a = c;
        }
    }
    0.5 * (a + b)
}

/// Evaluates `f_d` and `γ + γ^{1-d}` on a grid over `(1, 3]`.
pub fn gamma_optimum_check(d: usize, grid_step: f64) -> Result<GammaOptimumReport> {
    if d < 3 {
        return Err(Error::UnsupportedDimension(d));
    }
    if !(grid_step > 0.0 && grid_step < 1.0) {
        return Err(Error::InvalidArgument(format!("grid step {grid_step} outside (0, 1)")));
    }
    let (a, g) = (alpha_d(d), gamma_d(d));
    let f = |x: f64| (a - x) * x.powi(d as i32 - 1);
    let h = |x: f64| x + x.powi(1 - d as i32);
    let n = (2.0 / grid_step).floor() as usize;
    let grid: Vec<f64> = (1..=n).map(|i| 1.0 + i as f64 * grid_step).collect();
    let grid_argmax = grid.iter().copied().fold(grid[0], |m, x| if f(x) > f(m) { x } else { m });
    let grid_argmin = grid.iter().copied().fold(grid[0], |m, x| if h(x) < h(m) { x } else { m });
    let argmax = golden_max(f, grid_argmax - grid_step, grid_argmax + grid_step);
    let argmin = golden_max(|x| -h(x), grid_argmin - grid_step, grid_argmin + grid_step);
    let strict_on_grid = grid.iter().filter(|&&x| (x - g).abs() > 1e-6).all(|&x| f(x) < 1.0);
    Ok(GammaOptimumReport {
        d,
        gamma_d: g,
        alpha_d: a,
        grid_step,
        grid_argmax,
        argmax,
        max_value: f(argmax),
        grid_argmin,
        min_value: h(argmin),
        strict_on_grid,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gamma_optimum() {
        let r = gamma_optimum_check(3, 1e-3).unwrap();
        assert!((r.grid_argmax - 1.259921).abs() <= 1e-3);
        assert!((r.max_value - 1.0).abs() < 1e-9);
        assert!(r.strict_on_grid);
        let r = gamma_optimum_check(4, 1e-3).unwrap();
        assert!((r.min_value - 1.754765).abs() < 1e-6);
        assert!((r.grid_argmin - 1.316074).abs() <= 1e-3);
        assert!((r.min_value - r.alpha_d).abs() < 1e-9);
    }

    #[test]
    fn adversary_plays_die() {
        for (kind, d) in [(HeightKind::Prod, 2), (HeightKind::Min, 3), (HeightKind::Max, 2), (HeightKind::Prod, 4)] {
            let r = minprod_uniform_check(kind, d, 300, 11).unwrap();
            assert_eq!(r.terminated, 300);
            assert!(r.max_k_steps as u64 <= r.max_budget.max(1) || r.max_k_steps == 0);
        }
        assert!(minprod_uniform_check(HeightKind::Max, 3, 1, 0).is_err());
    }
}
