//! Critical temperature from the linearised gap equation.
//!
//! At temperature `T` the linearisation of the gap equation about `Δ = 0`
//! replaces `1/E` by `tanh(ξ/2T)/ξ`. On a [`MomentumGrid`] this gives the
//! symmetric nonnegative matrix
//! `G_ij = −(2π)^{-3/2} √(w_i w_j) p_i p_j k(p_i,p_j) / √(K_T(p_i) K_T(p_j))`,
//! and `T_c` is where its top eigenvalue crosses 1.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::Serialize;

use crate::asymptotics::predict_tc;
use crate::error::{Error, Result};
use crate::fermi_ops::b_mu;
use crate::gap_solver::{GapProblem, GridParams, KernelMatrix, MomentumGrid};
use crate::potential::{RadialPotential, INV_TWO_PI_3_2};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TcConfig {
    pub grid: GridParams,
    /// Relative eigen-residual `‖Gv − λv‖/λ` accepted by power iteration.
    pub power_tol: f64,
    pub power_max_iter: usize,
    /// Bisection stops when `T_hi/T_lo − 1` drops below this.
    pub rel_width: f64,
    /// Initial bracket is `T_pred × [1/f, f]`.
    pub bracket_factor: f64,
    /// Smallest admissible predicted `T_c/μ`.
    pub gate_floor: f64,
}

impl Default for TcConfig {
    fn default() -> Self {
        Self {
            grid: GridParams::default(),
            power_tol: 1e-10,
            power_max_iter: 5000,
            rel_width: 1e-8,
            bracket_factor: 1e3,
            gate_floor: 1e-12,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct TcReport {
    pub mu: f64,
    pub g: f64,
    pub t_c: f64,
    pub lambda_max_at_tc: f64,
    pub bisection_iters: usize,
    pub bracket: (f64, f64),
}

/// `1/K_T(ξ) = tanh(ξ/2T)/ξ`, with its limit `1/(2T)` at small `ξ/T`.
pub fn inverse_thermal_energy(xi: f64, t: f64) -> f64 {
    let x = xi / (2.0 * t);
    if x.abs() < 1e-4 {
        // tanh(x)/x = 1 − x²/3 + …
        (1.0 - x * x / 3.0) / (2.0 * t)
    } else {
        x.tanh() / xi
    }
}

/// The temperature-independent part `H_ij = −c √(w_i w_j) p_i p_j k_ij`
/// of the linearised operator on one grid.
#[derive(Debug, Clone)]
pub struct LinearizedOperator {
    xi: Vec<f64>,
    n: usize,
    h: Vec<f64>,
}

impl LinearizedOperator {
    pub fn new(grid: &MomentumGrid, kernel: &KernelMatrix) -> Self {
        let n = grid.len();
        let scale: Vec<f64> = (0..n).map(|i| grid.w[i].sqrt() * grid.p[i]).collect();
        let mut h = vec![0.0; n * n];
        h.par_chunks_mut(n).enumerate().for_each(|(i, row)| {
            for (j, out) in row.iter_mut().enumerate() {
                // Factor order is symmetric in (i, j) so H is exactly symmetric.
                *out = -INV_TWO_PI_3_2 * (scale[i] * scale[j]) * kernel.get(i, j);
            }
        });
        Self {
            xi: grid.xi.clone(),
            n,
            h,
        }
    }

    pub fn from_problem(problem: &GapProblem) -> Self {
        Self::new(&problem.grid, &problem.kernel)
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// `max |G_ij − G_ji|` at temperature `t`.
    pub fn max_asymmetry(&self, t: f64) -> f64 {
        let s = self.thermal_scale(t);
        let g = |i: usize, j: usize| s[i] * self.h[i * self.n + j] * s[j];
        (0..self.n)
            .into_par_iter()
            .map(|i| (0..i).map(|j| (g(i, j) - g(j, i)).abs()).fold(0.0, f64::max))
            .reduce(|| 0.0, f64::max)
    }

    fn thermal_scale(&self, t: f64) -> Vec<f64> {
        self.xi.iter().map(|&x| inverse_thermal_energy(x, t).sqrt()).collect()
    }

    fn apply(&self, s: &[f64], v: &[f64], out: &mut [f64]) {
        let sv: Vec<f64> = s.iter().zip(v).map(|(a, b)| a * b).collect();
        out.par_iter_mut().enumerate().for_each(|(i, o)| {
            let row = &self.h[i * self.n..(i + 1) * self.n];
            *o = s[i] * row.iter().zip(&sv).map(|(a, b)| a * b).sum::<f64>();
        });
    }

    /// Largest eigenvalue of `G(T)` and its unit eigenvector, warm-started
    /// from `start` when given.
    pub fn lambda_max(&self, t: f64, start: Option<&[f64]>, cfg: &TcConfig) -> Result<(f64, Vec<f64>)> {
        if !(t > 0.0) || !t.is_finite() {
            return Err(Error::Domain {
                what: "temperature must be positive",
                value: t,
            });
        }
        let s = self.thermal_scale(t);
        let mut v: Vec<f64> = match start {
            Some(v0) if v0.len() == self.n => v0.to_vec(),
            _ => s.clone(),
        };
        if normalize(&mut v) == 0.0 {
            return Ok((0.0, v));
        }
        let mut gv = vec![0.0; self.n];
        let mut residual = f64::INFINITY;
        for _ in 0..cfg.power_max_iter {
            self.apply(&s, &v, &mut gv);
            let lambda = dot(&v, &gv);
            if lambda == 0.0 && gv.iter().all(|&x| x == 0.0) {
                return Ok((0.0, v));
            }
            residual = gv
                .iter()
                .zip(&v)
                .map(|(a, b)| (a - lambda * b).powi(2))
                .sum::<f64>()
                .sqrt()
                / lambda.abs();
            v.copy_from_slice(&gv);
            normalize(&mut v);
            if residual <= cfg.power_tol {
                return Ok((lambda, v));
            }
        }
        log::debug!("power iteration stagnated at T = {t:e} (residual {residual:e}); Rayleigh refinement");
        self.rayleigh_refine(&s, v, cfg)
    }

    /// Rayleigh-quotient iteration, at most 200 dense solves.
    fn rayleigh_refine(&self, s: &[f64], mut v: Vec<f64>, cfg: &TcConfig) -> Result<(f64, Vec<f64>)> {
        let n = self.n;
        let mut gv = vec![0.0; n];
        let mut residual = f64::INFINITY;
        for iteration in 0..200 {
            self.apply(s, &v, &mut gv);
            let lambda = dot(&v, &gv);
            residual = gv
                .iter()
                .zip(&v)
                .map(|(a, b)| (a - lambda * b).powi(2))
                .sum::<f64>()
                .sqrt()
                / lambda.abs();
            if residual <= cfg.power_tol {
                return Ok((lambda, v));
            }
            let a = DMatrix::from_fn(n, n, |i, j| {
                s[i] * self.h[i * n + j] * s[j] - if i == j { lambda } else { 0.0 }
            });
            let solved = a.lu().solve(&DVector::from_column_slice(&v));
            let mut x: Vec<f64> = match solved {
                Some(x) if x.iter().all(|e| e.is_finite()) => x.iter().copied().collect(),
                _ => Vec::new(),
            };
            if x.is_empty() || normalize(&mut x) == 0.0 {
                return Err(Error::PowerIteration {
                    iterations: cfg.power_max_iter + iteration,
                    residual,
                });
            }
            // Fix the sign so the Perron vector stays nonnegative.
            if x.iter().sum::<f64>() < 0.0 {
                x.iter_mut().for_each(|e| *e = -*e);
            }
            v = x;
        }
        Err(Error::PowerIteration {
            iterations: cfg.power_max_iter + 200,
            residual,
        })
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn normalize(v: &mut [f64]) -> f64 {
    let norm = dot(v, v).sqrt();
    if norm > 0.0 && norm.is_finite() {
        v.iter_mut().for_each(|x| *x /= norm);
        norm
    } else {
        0.0
    }
}

/// `λ_max(G(T))` on `grid`.
pub fn linear_lambda_max(v: &RadialPotential, t: f64, grid: &MomentumGrid) -> Result<f64> {
    let kernel = KernelMatrix::assemble(v, grid);
    let op = LinearizedOperator::new(grid, &kernel);
    Ok(op.lambda_max(t, None, &TcConfig::default())?.0)
}

/// Predicted `T_c` from `b_μ^(0)`, gated like the gap solver.
pub fn tc_prediction(v: &RadialPotential, mu: f64, floor: f64) -> Result<f64> {
    let infeasible = |ratio: f64| Error::UnderflowInfeasible {
        mu,
        predicted_ratio: ratio,
        floor,
    };
    if v.coupling() == 0.0 {
        return Err(infeasible(0.0));
    }
    let b = match b_mu(v, mu, 0.0) {
        Ok(d) if d.b_mu_kappa < 0.0 => d.b_mu_kappa,
        Ok(_) | Err(Error::Rejected(_)) => return Err(infeasible(0.0)),
        Err(e) => return Err(e),
    };
    let pred = predict_tc(mu, b)?;
    if pred.underflow || pred.value / mu < floor {
        return Err(infeasible(pred.value / mu));
    }
    Ok(pred.value)
}

/// `T_c` on a fresh grid built for the predicted temperature.
pub fn critical_temperature(v: &RadialPotential, mu: f64, cfg: &TcConfig) -> Result<TcReport> {
    let t_pred = tc_prediction(v, mu, cfg.gate_floor)?;
    let grid = MomentumGrid::build(v, mu, &cfg.grid, t_pred / mu)?;
    let kernel = KernelMatrix::assemble(v, &grid);
    let op = LinearizedOperator::new(&grid, &kernel);
    critical_temperature_with(&op, mu, v.coupling(), t_pred, cfg)
}

/// `T_c` for a prepared operator, bracketing around `t_guess`.
pub fn critical_temperature_with(
    op: &LinearizedOperator,
    mu: f64,
    g: f64,
    t_guess: f64,
    cfg: &TcConfig,
) -> Result<TcReport> {
    if !(t_guess > 0.0) {
        return Err(Error::Domain {
            what: "temperature guess must be positive",
            value: t_guess,
        });
    }
    let mut t_lo = t_guess / cfg.bracket_factor;
    let mut t_hi = t_guess * cfg.bracket_factor;
    let (mut l_lo, mut v_lo) = op.lambda_max(t_lo, None, cfg)?;
    while l_lo <= 1.0 {
        let next = t_lo / cfg.bracket_factor;
        if next < 1e-280 * mu {
            return Err(Error::BracketFailure {
                temperature: t_lo,
                lambda: l_lo,
            });
        }
        t_lo = next;
        (l_lo, v_lo) = op.lambda_max(t_lo, Some(&v_lo), cfg)?;
    }
    let (mut l_hi, mut v_hi) = op.lambda_max(t_hi, Some(&v_lo), cfg)?;
    while l_hi >= 1.0 {
        let next = t_hi * cfg.bracket_factor;
        if !next.is_finite() || next > 1e12 * mu {
            return Err(Error::BracketFailure {
                temperature: t_hi,
                lambda: l_hi,
            });
        }
        t_hi = next;
        (l_hi, v_hi) = op.lambda_max(t_hi, Some(&v_hi), cfg)?;
    }
    let bracket = (t_lo, t_hi);
    let mut iters = 0;
    while t_hi / t_lo - 1.0 > cfg.rel_width {
        let t_mid = (t_lo * t_hi).sqrt();
        let (l_mid, v_mid) = op.lambda_max(t_mid, Some(&v_lo), cfg)?;
        if !(l_mid <= l_lo && l_mid >= l_hi) {
            return Err(Error::NonMonotone {
                t_lo,
                t_mid,
                t_hi,
                l_lo,
                l_mid,
                l_hi,
            });
        }
        if l_mid > 1.0 {
            (t_lo, l_lo, v_lo) = (t_mid, l_mid, v_mid);
        } else {
            (t_hi, l_hi) = (t_mid, l_mid);
        }
        iters += 1;
    }
    let t_c = (t_lo * t_hi).sqrt();
    let (lambda, _) = op.lambda_max(t_c, Some(&v_lo), cfg)?;
    Ok(TcReport {
        mu,
        g,
        t_c,
        lambda_max_at_tc: lambda,
        bisection_iters: iters,
        bracket,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn thermal_factor_is_continuous() {
        let t = 0.3;
        assert_eq!(inverse_thermal_energy(0.0, t), 1.0 / (2.0 * t));
        for xi in [1e-5f64, 5.9e-5, 6.1e-5, 1e-3, 1.0] {
            let exact = (xi / (2.0 * t)).tanh() / xi;
            assert!(
                (inverse_thermal_energy(xi, t) - exact).abs() < 1e-15 * exact.max(1.0),
                "{xi}"
            );
            assert!((inverse_thermal_energy(-xi, t) - exact).abs() < 1e-15 * exact.max(1.0));
        }
    }

    #[test]
    fn zero_potential_has_zero_lambda() {
        let v = RadialPotential::gaussian(0.0);
        let grid = MomentumGrid::build(&RadialPotential::gaussian(1.0), 100.0, &GridParams::default(), 1e-6).unwrap();
        assert_eq!(linear_lambda_max(&v, 0.1, &grid).unwrap(), 0.0);
    }

    #[test]
    fn operator_is_symmetric_and_lambda_decreases() {
        let v = RadialPotential::gaussian(30.0);
        let grid = MomentumGrid::build(&v, 100.0, &GridParams::default(), 5e-7).unwrap();
        let op = LinearizedOperator::new(&grid, &KernelMatrix::assemble(&v, &grid));
        assert!(op.max_asymmetry(1e-5) <= 1e-14);
        let cfg = TcConfig::default();
        let l: Vec<f64> = [1e-5, 1e-4, 1e-3]
            .iter()
            .map(|&t| op.lambda_max(t, None, &cfg).unwrap().0)
            .collect();
        assert!(l[0] > l[1] && l[1] > l[2], "{l:?}");
    }
}
