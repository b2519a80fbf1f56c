//! Zero-temperature gap equation
//! `Δ(p) = −(2π)^{-3/2} ∫₀^∞ q² k(p,q) Δ(q)/E(q) dq`, `E = √((q²−μ)² + Δ²)`,
//! solved by Nyström discretisation on a [`MomentumGrid`].
//!
//! The iteration runs on `log Δ`, so positivity holds by construction and
//! exponentially small gaps are represented without loss. Plain damped
//! mixing contracts the overall amplitude only by `1 − θ/|log(μ/Δ)|` per
//! sweep, so Anderson mixing is layered on top.

mod anderson;
pub mod grid;
mod kernel;

use std::f64::consts::PI;
use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use crate::asymptotics::predict_xi;
use crate::error::{Error, Result};
use crate::fermi_ops::b_mu;
use crate::potential::{RadialPotential, INV_TWO_PI_3_2};
use anderson::Anderson;
pub use grid::{GridParams, MomentumGrid, Panel, PanelKind};
pub use kernel::KernelMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GapConfig {
    pub grid: GridParams,
    /// Damping `θ` in `x ← x + θ (log T(Δ) − x)`.
    pub theta: f64,
    /// Convergence threshold on `sup |T(Δ)/Δ − 1|`.
    pub tol: f64,
    pub max_iter: usize,
    /// Anderson history length; 0 gives plain damping.
    pub anderson_depth: usize,
    /// Smallest admissible predicted `Δ(√μ)/μ`.
    pub gate_floor: f64,
    /// Seed amplitude relative to the predicted gap.
    pub seed_scale: f64,
}

impl Default for GapConfig {
    fn default() -> Self {
        Self {
            grid: GridParams::default(),
            theta: 0.5,
            tol: 1e-8,
            max_iter: 500,
            anderson_depth: 5,
            gate_floor: 1e-12,
            seed_scale: 1.0,
        }
    }
}

/// Potential, grid and kernel matrix for one `μ`.
#[derive(Debug, Clone)]
pub struct GapProblem {
    pub potential: RadialPotential,
    pub grid: Arc<MomentumGrid>,
    pub kernel: Arc<KernelMatrix>,
}

impl GapProblem {
    pub fn new(v: &RadialPotential, grid: MomentumGrid) -> Self {
        let kernel = KernelMatrix::assemble(v, &grid);
        Self {
            potential: v.clone(),
            grid: Arc::new(grid),
            kernel: Arc::new(kernel),
        }
    }

    /// `(TΔ)(p_i)` for node values `delta`.
    pub fn rhs(&self, delta: &[f64]) -> Vec<f64> {
        let g = &self.grid;
        let a: Vec<f64> = (0..g.len())
            .map(|j| {
                let e = g.xi[j].hypot(delta[j]);
                if delta[j] == 0.0 {
                    0.0
                } else {
                    g.w[j] * g.p[j] * g.p[j] * delta[j] / e
                }
            })
            .collect();
        (0..g.len())
            .into_par_iter()
            .map(|i| {
                let row = self.kernel.row(i);
                -INV_TWO_PI_3_2 * row.iter().zip(&a).map(|(k, x)| k * x).sum::<f64>()
            })
            .collect()
    }

    /// Nyström extension `(TΔ)(p)` at arbitrary momenta.
    pub fn rhs_at(&self, delta: &[f64], points: &[f64]) -> Vec<f64> {
        let g = &self.grid;
        let a: Vec<f64> = (0..g.len())
            .map(|j| g.w[j] * g.p[j] * g.p[j] * delta[j] / g.xi[j].hypot(delta[j]))
            .collect();
        points
            .par_iter()
            .map(|&p| {
                -INV_TWO_PI_3_2
                    * g.p
                        .iter()
                        .zip(&a)
                        .map(|(&q, x)| self.potential.angular_kernel_unchecked(p, q) * x)
                        .sum::<f64>()
            })
            .collect()
    }

    /// Iterate from `seed` (positive node values) to a fixed point.
    pub fn iterate(&self, seed: &[f64], cfg: &GapConfig) -> Result<GapFunction> {
        let n = self.grid.len();
        if seed.len() != n || seed.iter().any(|&d| !(d > 0.0) || !d.is_finite()) {
            return Err(Error::Invalid("gap seed must be positive on every node".into()));
        }
        let mut x: Vec<f64> = seed.iter().map(|d| d.ln()).collect();
        let mut mixer = Anderson::new(cfg.anderson_depth, cfg.theta);
        let mut best: (f64, Vec<f64>) = (f64::INFINITY, x.clone());
        let mut residual = f64::INFINITY;
        let fermi_node = self.fermi_node();
        for iteration in 0..cfg.max_iter {
            let delta: Vec<f64> = x.iter().map(|v| v.exp()).collect();
            let t = self.rhs(&delta);
            if t.iter().all(|&v| v == 0.0) {
                return Err(Error::TrivialSolution);
            }
            if let Some(node) = t.iter().position(|&v| !(v > 0.0) || !v.is_finite()) {
                return Err(Error::PositivityLost { iteration, node });
            }
            residual = t
                .iter()
                .zip(&delta)
                .map(|(a, b)| (a / b - 1.0).abs())
                .fold(0.0, f64::max);
            if residual <= cfg.tol {
                return Ok(GapFunction::new(self.clone(), x, residual, iteration));
            }
            let f: Vec<f64> = t.iter().zip(&x).map(|(a, b)| a.ln() - b).collect();
            if residual < best.0 {
                best = (residual, x.clone());
            } else if residual > 1e3 * best.0 {
                // Anderson overshoot: restart from the best iterate.
                mixer.reset();
                x = best.1.clone();
                continue;
            }
            x = mixer.step(&x, &f);
            if !x[fermi_node].is_finite() || x[fermi_node] < -700.0 {
                return Err(Error::TrivialSolution);
            }
        }
        Err(Error::GapNotConverged {
            iterations: cfg.max_iter,
            residual,
        })
    }

    fn fermi_node(&self) -> usize {
        let xi = &self.grid.xi;
        (0..xi.len())
            .min_by(|&a, &b| xi[a].abs().total_cmp(&xi[b].abs()))
            .unwrap_or(0)
    }

    /// Seed `Δ₀(p) ∝ −k(p, √μ)` with `Δ₀(√μ) = amplitude`.
    pub fn seed(&self, amplitude: f64) -> Vec<f64> {
        let kf = self.grid.fermi_momentum();
        let k0 = self.potential.angular_kernel_unchecked(kf, kf);
        self.grid
            .p
            .iter()
            .map(|&p| {
                let r = self.potential.angular_kernel_unchecked(p, kf) / k0;
                amplitude * r.max(1e-200)
            })
            .collect()
    }
}

/// Converged gap on a grid.
#[derive(Debug, Clone)]
pub struct GapFunction {
    pub problem: GapProblem,
    log_delta: Vec<f64>,
    pub residual: f64,
    pub iterations: usize,
}

impl GapFunction {
    fn new(problem: GapProblem, log_delta: Vec<f64>, residual: f64, iterations: usize) -> Self {
        Self {
            problem,
            log_delta,
            residual,
            iterations,
        }
    }

    /// Wrap given node values (e.g. a constant) without solving.
    pub fn from_values(problem: GapProblem, values: &[f64]) -> Result<Self> {
        if values.len() != problem.grid.len() || values.iter().any(|&d| !(d > 0.0)) {
            return Err(Error::Invalid("gap values must be positive on every node".into()));
        }
        Ok(Self::new(problem, values.iter().map(|d| d.ln()).collect(), f64::NAN, 0))
    }

    pub fn grid(&self) -> &MomentumGrid {
        &self.problem.grid
    }

    pub fn mu(&self) -> f64 {
        self.grid().mu
    }

    pub fn values(&self) -> Vec<f64> {
        self.log_delta.iter().map(|v| v.exp()).collect()
    }

    pub fn log_values(&self) -> &[f64] {
        &self.log_delta
    }

    /// `Δ` at relative offset `s = (p² − μ)/μ`.
    pub fn eval_s(&self, s: f64) -> f64 {
        let g = self.grid();
        let k = g.panel_for_s(s);
        let x = g.native_of(k, s);
        self.eval_panel(k, x).exp()
    }

    /// `Δ(p)`.
    pub fn eval(&self, p: f64) -> f64 {
        let kf = self.grid().fermi_momentum();
        self.eval_s((p - kf) * (p + kf) / self.mu())
    }

    /// Barycentric Lagrange interpolation of `log Δ` within panel `k`.
    fn eval_panel(&self, k: usize, x: f64) -> f64 {
        let g = self.grid();
        let panel = &g.panels[k];
        let nodes = &g.native[panel.start..panel.start + panel.len];
        let vals = &self.log_delta[panel.start..panel.start + panel.len];
        if vals.iter().all(|&v| v == vals[0]) {
            return vals[0];
        }
        if let Some(i) = nodes.iter().position(|&t| t == x) {
            return vals[i];
        }
        let mut num = 0.0;
        let mut den = 0.0;
        for (j, (&tj, &vj)) in nodes.iter().zip(vals).enumerate() {
            let mut wj = 1.0;
            for (m, &tm) in nodes.iter().enumerate() {
                if m != j {
                    wj /= tj - tm;
                }
            }
            let c = wj / (x - tj);
            num += c * vj;
            den += c;
        }
        num / den
    }

    /// `Δ(√μ)`.
    pub fn delta_fermi(&self) -> f64 {
        self.eval_s(0.0)
    }

    fn dispersion(&self, s: f64) -> f64 {
        (self.mu() * s).hypot(self.eval_s(s))
    }

    /// `Ξ = min_p E(p)`: node argmin refined by golden section on the
    /// interpolant; never above `Δ(√μ)`.
    pub fn energy_gap(&self) -> f64 {
        let g = self.grid();
        let values = self.values();
        let (imin, _) =
            g.xi.iter()
                .zip(&values)
                .map(|(x, d)| x.hypot(*d))
                .enumerate()
                .fold((0, f64::INFINITY), |b, (i, e)| if e < b.1 { (i, e) } else { b });
        let lo = g.xi[imin.saturating_sub(1)] / g.mu;
        let hi = g.xi[(imin + 1).min(g.len() - 1)] / g.mu;
        let at_fermi = self.delta_fermi();
        let ends = [self.dispersion(lo), self.dispersion(hi), g.xi[imin].hypot(values[imin])];
        let spread =
            ends.iter().fold(f64::NEG_INFINITY, |m, &e| m.max(e)) - ends.iter().fold(f64::INFINITY, |m, &e| m.min(e));
        if spread <= 1e-14 * at_fermi {
            return at_fermi;
        }
        let (mut a, mut b) = (lo, hi);
        let r = 0.5 * (5f64.sqrt() - 1.0);
        let mut c = b - r * (b - a);
        let mut d = a + r * (b - a);
        let (mut fc, mut fd) = (self.dispersion(c), self.dispersion(d));
        for _ in 0..200 {
            if (b - a).abs() <= 1e-17 * (1.0 + a.abs().max(b.abs())) {
                break;
            }
            if fc < fd {
                b = d;
                d = c;
                fd = fc;
                c = b - r * (b - a);
                fc = self.dispersion(c);
            } else {
                a = c;
                c = d;
                fc = fd;
                d = a + r * (b - a);
                fd = self.dispersion(d);
            }
        }
        fc.min(fd).min(ends[2]).min(at_fermi)
    }

    /// `m_μ^(κ)(Δ) = ∫₀^∞ p² (1/E(p) − 1/(p² + κ²μ)) dp`, with the range past
    /// `Λ` in closed form (`Δ` negligible there).
    pub fn m_integral(&self, kappa: f64) -> Result<f64> {
        if !(kappa >= 0.0) {
            return Err(Error::Domain {
                what: "kappa must be >= 0",
                value: kappa,
            });
        }
        let g = self.grid();
        let mu = g.mu;
        let k2 = kappa * kappa * mu;
        let values = self.values();
        let mut sum = 0.0;
        for j in 0..g.len() {
            let p2 = g.p[j] * g.p[j];
            let e = g.xi[j].hypot(values[j]);
            let f = p2 / e - p2 / (p2 + k2);
            if !f.is_finite() {
                return Err(Error::NonFinite { node: g.p[j], value: f });
            }
            sum += g.w[j] * f;
        }
        Ok(sum + m_tail(mu, kappa, g.cutoff))
    }

    /// `sup |Δ − TΔ| / sup Δ` at the midpoints between nodes, where `Δ`
    /// comes from the interpolant.
    pub fn certificate(&self) -> f64 {
        let g = self.grid();
        let mids = g.offset_nodes();
        let points: Vec<f64> = mids.iter().map(|m| m.2).collect();
        let t = self.problem.rhs_at(&self.values(), &points);
        let sup = self.values().iter().fold(0.0f64, |m, &v| m.max(v));
        mids.iter()
            .zip(&t)
            .map(|(&(k, x, _, _), &tv)| (self.eval_panel(k, x).exp() - tv).abs())
            .fold(0.0, f64::max)
            / sup
    }

    /// This gap interpolated onto another grid for the same potential.
    pub fn resample(&self, problem: GapProblem) -> Result<GapFunction> {
        let target = problem.grid.clone();
        let values: Vec<f64> = target.xi.iter().map(|&x| self.eval_s(x / target.mu)).collect();
        GapFunction::from_values(problem, &values)
    }
}

/// `∫_Λ^∞ p² (1/(p² − μ) − 1/(p² + κ²μ)) dp`.
pub fn m_tail(mu: f64, kappa: f64, cutoff: f64) -> f64 {
    let kf = mu.sqrt();
    let a = kappa * kf;
    let log_part = -0.5 * kf * ((cutoff - kf) / (cutoff + kf)).ln();
    let atan_part = if a > 0.0 {
        a * (0.5 * PI - (cutoff / a).atan())
    } else {
        0.0
    };
    log_part + atan_part
}

/// Predicted `Δ(√μ)/μ` from `b_μ^(0)`, or the infeasibility error.
pub fn feasibility(v: &RadialPotential, mu: f64, floor: f64) -> Result<(f64, f64)> {
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
    let pred = predict_xi(mu, b)?;
    let ratio = pred.value / mu;
    if pred.underflow || ratio < floor {
        return Err(infeasible(ratio));
    }
    Ok((ratio, b))
}

/// Solve the gap equation at `mu`, seeded from the asymptotic prediction.
pub fn solve_gap(v: &RadialPotential, mu: f64, cfg: &GapConfig) -> Result<GapFunction> {
    let (ratio, _) = feasibility(v, mu, cfg.gate_floor)?;
    let grid = MomentumGrid::build(v, mu, &cfg.grid, ratio)?;
    let problem = GapProblem::new(v, grid);
    let seed = problem.seed(cfg.seed_scale * ratio * mu);
    let gap = problem.iterate(&seed, cfg)?;
    let actual = gap.delta_fermi() / mu;
    if gap.grid().s_min > 1e-2 * actual && gap.grid().s_min > cfg.grid.s_min_floor {
        log::debug!("re-gridding at mu = {mu}: predicted ratio {ratio:e}, actual {actual:e}");
        let grid = MomentumGrid::build(v, mu, &cfg.grid, actual)?;
        let problem = GapProblem::new(v, grid);
        let seed = gap.resample(problem.clone())?.values();
        return problem.iterate(&seed, cfg);
    }
    Ok(gap)
}

/// `T(Δ)` on the grid nodes of `gap`.
pub fn gap_rhs(gap: &GapFunction) -> Vec<f64> {
    gap.problem.rhs(&gap.values())
}

pub fn energy_gap(gap: &GapFunction) -> f64 {
    gap.energy_gap()
}

pub fn m_integral(gap: &GapFunction, kappa: f64) -> Result<f64> {
    gap.m_integral(kappa)
}
