//! Radial momentum grids clustered on the Fermi sphere.
//!
//! Near `p = √μ` nodes live in the relative offset `s = (p² − μ)/μ`: a short
//! Gauss panel on `|s| ≤ s_min`, then one panel per decade in `ln |s|` out to
//! `s_max` on each side. Away from the shell, plain panels in `p` grow
//! geometrically from the edge of the log region out to `Λ` and down to 0.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::numerics::gauss_legendre;
use crate::potential::RadialPotential;

/// Grid resolution knobs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridParams {
    /// Gauss nodes per decade of `|s|` at unit density.
    pub nodes_per_decade: usize,
    /// Gauss nodes on the central `|s| ≤ s_min` panel at unit density.
    pub central_nodes: usize,
    /// Gauss nodes per outer `p` panel at unit density.
    pub outer_nodes: usize,
    /// Multiplier on the near-Fermi node counts.
    pub near_density: f64,
    /// Multiplier on the outer node counts.
    pub outer_density: f64,
    /// `s_min = s_min_factor × (predicted Δ/μ)`, clamped below.
    pub s_min_factor: f64,
    /// Floor for `s_min`.
    pub s_min_floor: f64,
    /// `Λ ≤ lambda_factor √μ`.
    pub lambda_factor: f64,
    /// Widest outer panel, in momentum scales of the potential.
    pub max_outer_width: f64,
}

impl Default for GridParams {
    fn default() -> Self {
        Self {
            nodes_per_decade: 12,
            central_nodes: 16,
            outer_nodes: 12,
            near_density: 1.0,
            outer_density: 1.0,
            s_min_factor: 1e-3,
            s_min_floor: 1e-14,
            lambda_factor: 40.0,
            max_outer_width: 4.0,
        }
    }
}

impl GridParams {
    /// Same grid with every node count scaled by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            near_density: self.near_density * factor,
            outer_density: self.outer_density * factor,
            ..*self
        }
    }

    fn count(base: usize, density: f64) -> usize {
        ((base as f64 * density).round() as usize).max(2)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum PanelKind {
    /// Native coordinate `p`.
    LinearP,
    /// Native coordinate `t = ln|s|`, `s = sign · e^t`.
    LogS { sign: f64 },
    /// Native coordinate `s`.
    CentralS,
}

#[derive(Debug, Clone, Serialize)]
pub struct Panel {
    pub kind: PanelKind,
    /// Native-coordinate interval.
    pub lo: f64,
    pub hi: f64,
    /// Index range of the panel's nodes.
    pub start: usize,
    pub len: usize,
}

/// Quadrature nodes in `p` with weights for `∫ … dp`.
#[derive(Debug, Clone, Serialize)]
pub struct MomentumGrid {
    pub mu: f64,
    pub params: GridParams,
    pub s_min: f64,
    pub s_max: f64,
    pub cutoff: f64,
    /// Increasing momenta.
    pub p: Vec<f64>,
    /// `p² − μ`, exact on the near-Fermi panels.
    pub xi: Vec<f64>,
    /// Weights for `dp`.
    pub w: Vec<f64>,
    /// Native coordinate of each node.
    pub native: Vec<f64>,
    pub panels: Vec<Panel>,
}

impl MomentumGrid {
    /// Grid at chemical potential `mu` for a gap of relative size about
    /// `predicted_ratio = Δ(√μ)/μ`.
    pub fn build(v: &RadialPotential, mu: f64, params: &GridParams, predicted_ratio: f64) -> Result<Self> {
        if !(mu > 0.0) || !mu.is_finite() {
            return Err(Error::Domain {
                what: "chemical potential must be positive",
                value: mu,
            });
        }
        if !(predicted_ratio > 0.0) {
            return Err(Error::Domain {
                what: "predicted gap ratio must be positive",
                value: predicted_ratio,
            });
        }
        let kf = mu.sqrt();
        let s_min = (params.s_min_factor * predicted_ratio).clamp(params.s_min_floor, 1e-4);
        let s_max = (0.5 / kf).min(0.5);
        let mscale = 1.0 / v.length_scale();
        let q_lo = kf * (1.0 - s_max).sqrt();
        let q_hi = kf * (1.0 + s_max).sqrt();
        let cap = params.lambda_factor * kf;
        let cutoff = v
            .kernel_cutoff(mu, 1e-12, cap)
            .max(q_hi + 2.0 * mscale)
            .min(cap.max(q_hi + 2.0 * mscale));

        let mut g = GridBuilder::default();
        let outer_n = GridParams::count(params.outer_nodes, params.outer_density);
        let decade_n = GridParams::count(params.nodes_per_decade, params.near_density);
        let central_n = GridParams::count(params.central_nodes, params.near_density);

        // Below the shell: panels from 0 up to q_lo, graded toward q_lo.
        let below = outer_breaks(q_lo, kf, mscale, 0.0, params.max_outer_width);
        for w in below.windows(2).rev() {
            g.linear(w[1], w[0], outer_n, mu);
        }
        // Log panels, s < 0, from -s_max toward -s_min.
        let decades = log_breaks(s_min, s_max);
        for w in decades.windows(2).rev() {
            g.log(-1.0, w[0], w[1], decade_n, mu);
        }
        g.central(s_min, central_n, mu);
        for w in decades.windows(2) {
            g.log(1.0, w[0], w[1], decade_n, mu);
        }
        let above = outer_breaks(q_hi, kf, mscale, cutoff, params.max_outer_width);
        for w in above.windows(2) {
            g.linear(w[0], w[1], outer_n, mu);
        }
        let grid = Self {
            mu,
            params: *params,
            s_min,
            s_max,
            cutoff,
            p: g.p,
            xi: g.xi,
            w: g.w,
            native: g.native,
            panels: g.panels,
        };
        debug_assert!(grid.p.windows(2).all(|w| w[0] < w[1]));
        Ok(grid)
    }

    pub fn len(&self) -> usize {
        self.p.len()
    }

    pub fn is_empty(&self) -> bool {
        self.p.is_empty()
    }

    pub fn fermi_momentum(&self) -> f64 {
        self.mu.sqrt()
    }

    /// Number of nodes with `|p² − μ|/μ ≤ rel`.
    pub fn nodes_within(&self, rel: f64) -> usize {
        self.xi.iter().filter(|&&x| (x / self.mu).abs() <= rel).count()
    }

    /// Index of the panel containing relative offset `s` (or the nearest).
    pub fn panel_for_s(&self, s: f64) -> usize {
        let kf = self.fermi_momentum();
        let coord = |k: &PanelKind| match k {
            PanelKind::CentralS => s,
            PanelKind::LogS { .. } => s.abs().max(1e-300).ln(),
            PanelKind::LinearP => kf * (1.0 + s).max(0.0).sqrt(),
        };
        let side = |k: &PanelKind| match k {
            PanelKind::CentralS => s.abs() <= self.s_min,
            PanelKind::LogS { sign } => s.abs() > self.s_min && s.abs() <= self.s_max && s * sign > 0.0,
            PanelKind::LinearP => s.abs() > self.s_max,
        };
        let mut best = 0;
        let mut best_dist = f64::INFINITY;
        for (i, panel) in self.panels.iter().enumerate() {
            if !side(&panel.kind) {
                continue;
            }
            let x = coord(&panel.kind);
            let d = if x < panel.lo {
                panel.lo - x
            } else if x > panel.hi {
                x - panel.hi
            } else {
                0.0
            };
            if d < best_dist {
                best_dist = d;
                best = i;
            }
            if d == 0.0 {
                break;
            }
        }
        best
    }

    /// Native coordinate of offset `s` within `panel`.
    pub fn native_of(&self, panel: usize, s: f64) -> f64 {
        match self.panels[panel].kind {
            PanelKind::CentralS => s,
            PanelKind::LogS { .. } => s.abs().ln(),
            PanelKind::LinearP => self.fermi_momentum() * (1.0 + s).max(0.0).sqrt(),
        }
    }

    /// Midpoints between consecutive nodes of every panel, in native
    /// coordinates, as `(panel, native, p, ξ)`.
    pub fn offset_nodes(&self) -> Vec<(usize, f64, f64, f64)> {
        let kf = self.fermi_momentum();
        let mut out = Vec::new();
        for (k, panel) in self.panels.iter().enumerate() {
            for i in panel.start..panel.start + panel.len - 1 {
                let x = 0.5 * (self.native[i] + self.native[i + 1]);
                let (p, xi) = match panel.kind {
                    PanelKind::LinearP => (x, (x - kf) * (x + kf)),
                    PanelKind::LogS { sign } => {
                        let s = sign * x.exp();
                        (kf * (1.0 + s).sqrt(), self.mu * s)
                    }
                    PanelKind::CentralS => (kf * (1.0 + x).sqrt(), self.mu * x),
                };
                out.push((k, x, p, xi));
            }
        }
        out
    }
}

/// Breakpoints `s_min, 10 s_min, …, s_max`.
fn log_breaks(s_min: f64, s_max: f64) -> Vec<f64> {
    let mut t = vec![s_min.ln()];
    let end = s_max.ln();
    let step = std::f64::consts::LN_10;
    while *t.last().unwrap() + step < end - 0.25 * step {
        let next = t.last().unwrap() + step;
        t.push(next);
    }
    t.push(end);
    t.into_iter().map(f64::exp).collect()
}

/// Panel breaks from `edge` away from `kf` toward `stop` (0 or `Λ`):
/// width equal to the distance from `kf` (capped at half a momentum scale)
/// inside ten momentum scales, then growing by 1.5 per panel up to
/// `max_width` scales.
fn outer_breaks(edge: f64, kf: f64, mscale: f64, stop: f64, max_width: f64) -> Vec<f64> {
    let dir = if stop > edge { 1.0 } else { -1.0 };
    let mut x = edge;
    let mut out = vec![edge];
    if (stop - edge) * dir <= 0.0 {
        return out;
    }
    let core = 10.0 * mscale;
    let mut width: f64 = 0.0;
    loop {
        let dist = (x - kf).abs();
        width = if dist < core {
            dist.min(0.5 * mscale)
        } else {
            (width * 1.5).clamp(0.5 * mscale, max_width.max(0.5) * mscale)
        };
        let next = x + dir * width;
        if (stop - next) * dir <= 0.25 * width {
            out.push(stop);
            break;
        }
        out.push(next);
        x = next;
    }
    out
}

#[derive(Default)]
struct GridBuilder {
    p: Vec<f64>,
    xi: Vec<f64>,
    w: Vec<f64>,
    native: Vec<f64>,
    panels: Vec<Panel>,
}

impl GridBuilder {
    fn begin(&mut self, kind: PanelKind, lo: f64, hi: f64, n: usize) {
        self.panels.push(Panel {
            kind,
            lo,
            hi,
            start: self.p.len(),
            len: n,
        });
    }

    fn linear(&mut self, a: f64, b: f64, n: usize, mu: f64) {
        let kf = mu.sqrt();
        self.begin(PanelKind::LinearP, a, b, n);
        let (x, w) = gauss_legendre(n);
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        for (xi, wi) in x.iter().zip(w) {
            let p = mid + half * xi;
            self.p.push(p);
            self.xi.push((p - kf) * (p + kf));
            self.w.push(half * wi);
            self.native.push(p);
        }
    }

    /// `s = sign · e^t` for `t ∈ [ln a, ln b]`, nodes emitted in increasing `p`.
    fn log(&mut self, sign: f64, a: f64, b: f64, n: usize, mu: f64) {
        let kf = mu.sqrt();
        let (t0, t1) = (a.ln(), b.ln());
        self.begin(PanelKind::LogS { sign }, t0, t1, n);
        let (x, w) = gauss_legendre(n);
        let half = 0.5 * (t1 - t0);
        let mid = 0.5 * (t0 + t1);
        let mut idx: Vec<usize> = (0..n).collect();
        if sign < 0.0 {
            idx.reverse();
        }
        for i in idx {
            let t = mid + half * x[i];
            let s_abs = t.exp();
            let s = sign * s_abs;
            let root = (1.0 + s).sqrt();
            self.p.push(kf * root);
            self.xi.push(mu * s);
            // dp = (μ / 2p) ds,  ds = |s| dt
            self.w.push(half * w[i] * s_abs * kf / (2.0 * root));
            self.native.push(t);
        }
    }

    fn central(&mut self, s_min: f64, n: usize, mu: f64) {
        let kf = mu.sqrt();
        self.begin(PanelKind::CentralS, -s_min, s_min, n);
        let (x, w) = gauss_legendre(n);
        for (xi, wi) in x.iter().zip(w) {
            let s = s_min * xi;
            let root = (1.0 + s).sqrt();
            self.p.push(kf * root);
            self.xi.push(mu * s);
            self.w.push(s_min * wi * kf / (2.0 * root));
            self.native.push(s);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(mu: f64, ratio: f64) -> MomentumGrid {
        MomentumGrid::build(&RadialPotential::gaussian(30.0), mu, &GridParams::default(), ratio).unwrap()
    }

    #[test]
    fn nodes_increase_and_cluster() {
        let g = grid(100.0, 5e-7);
        assert!(g.p.windows(2).all(|w| w[0] < w[1]));
        assert!(g.nodes_within(1e-2) >= 40);
        assert!(g.s_min <= 1e-2 * 5e-7);
        assert!(g.w.iter().all(|&w| w > 0.0));
        assert!(g.xi.iter().all(|&x| x != 0.0));
    }

    #[test]
    fn weights_integrate_polynomials() {
        let g = grid(100.0, 5e-7);
        let l = g.cutoff;
        let sum: f64 = g.p.iter().zip(&g.w).map(|(p, w)| w * p * p).sum();
        assert!((sum - l * l * l / 3.0).abs() < 1e-12 * l * l * l);
    }

    #[test]
    fn s_min_is_clamped() {
        assert_eq!(grid(100.0, 1e-20).s_min, 1e-14);
        assert_eq!(grid(100.0, 1.0).s_min, 1e-4);
    }

    #[test]
    fn locating_panels() {
        let g = grid(100.0, 5e-7);
        for (i, &x) in g.xi.iter().enumerate() {
            let k = g.panel_for_s(x / g.mu);
            let panel = &g.panels[k];
            assert!(i >= panel.start && i < panel.start + panel.len, "node {i}");
        }
    }
}
