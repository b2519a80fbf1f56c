//! Tails of oscillatory integrals.

use super::gauss::gauss_legendre;
use crate::error::{Error, Result};

const PANEL_NODES: usize = 16;
const EULER_DEPTH: usize = 12;
const MAX_TAIL_PANELS: usize = 250_000;

/// 16-point Gauss–Legendre estimate of `∫_a^b f`.
pub fn gauss_panel<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Result<f64> {
    let (x, w) = gauss_legendre(PANEL_NODES);
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    let mut s = 0.0;
    for (xi, wi) in x.iter().zip(w) {
        let r = mid + half * xi;
        let v = f(r);
        if !v.is_finite() {
            return Err(Error::NonFinite { node: r, value: v });
        }
        s += wi * v;
    }
    Ok(half * s)
}

/// `∫_start^∞ f` for an integrand whose consecutive panels
/// `[start + k·half, start + (k+1)·half]` alternate in sign with slowly
/// varying magnitude. Partial sums are accelerated by repeated averaging
/// (the Euler transform). `scale` sets the absolute size below which a panel
/// counts as negligible.
pub fn alternating_tail<F: Fn(f64) -> f64>(f: &F, start: f64, half: f64, scale: f64) -> Result<f64> {
    let mut partial = Vec::with_capacity(64);
    let mut acc = 0.0;
    let mut a = start;
    let mut prev = f64::NAN;
    let mut stable = 0;
    for _ in 0..MAX_TAIL_PANELS {
        let b = a + half;
        let term = gauss_panel(f, a, b)?;
        acc += term;
        a = b;
        partial.push(acc);
        let reference = acc.abs().max(scale.abs()).max(1e-300);
        if term == 0.0 || (partial.len() >= 2 && term.abs() <= 1e-17 * reference) {
            return Ok(acc);
        }
        if partial.len() < EULER_DEPTH {
            continue;
        }
        let est = euler_average(&partial[partial.len() - EULER_DEPTH..]);
        if (est - prev).abs() <= 1e-14 * est.abs().max(scale.abs()).max(1e-300) {
            stable += 1;
            if stable >= 2 {
                return Ok(est);
            }
        } else {
            stable = 0;
        }
        prev = est;
    }
    Err(Error::Quadrature(format!(
        "oscillatory tail from {start:e} did not settle"
    )))
}

fn euler_average(sums: &[f64]) -> f64 {
    let mut level = sums.to_vec();
    while level.len() > 1 {
        level = level.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect();
    }
    level[0]
}
