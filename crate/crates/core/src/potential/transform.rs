use rayon::prelude::*;

use super::RadialPotential;
use crate::error::{Error, Result};
use crate::numerics::{alternating_tail, gauss_legendre, gauss_panel};

const MAX_PANELS: usize = 4_000_000;

/// `∫₀^∞ g(r) sin(pr) dr` for `p > 0`.
///
/// Panels resolve both the oscillation and the length scale of `g`. Past
/// `decay` the remaining half-period panels alternate in sign and their
/// partial sums are accelerated by repeated averaging (Euler transform).
pub(crate) fn sine_transform<G: Fn(f64) -> f64>(g: G, p: f64, length: f64, decay: f64) -> Result<f64> {
    let f = |r: f64| g(r) * (p * r).sin();
    let half = std::f64::consts::PI / p;
    let fine = 0.25 * length;

    let (core, end) = if decay < half {
        // Slow oscillation: resolve g, then geometric panels up to the first
        // zero of the sine.
        let panels = ((decay / fine).ceil() as usize).clamp(8, MAX_PANELS);
        let mut sum = graded_core(&f, decay, panels)?;
        let mut a = decay;
        while 2.0 * a < half {
            sum += gauss_panel(&f, a, 2.0 * a)?;
            a *= 2.0;
        }
        sum += gauss_panel(&f, a, half)?;
        (sum, half)
    } else {
        let periods = (decay / half).ceil();
        let end = periods * half;
        let per_half = (half / fine).ceil().max(1.0);
        let panels = (periods * per_half) as usize;
        if panels > MAX_PANELS {
            return Err(Error::Quadrature(format!(
                "sine transform at p = {p:e} needs {panels} panels"
            )));
        }
        (graded_core(&f, end, panels)?, end)
    };

    Ok(core + alternating_tail(&f, end, half, core)?)
}

fn graded_core<F: Fn(f64) -> f64>(f: &F, end: f64, panels: usize) -> Result<f64> {
    let w = end / panels as f64;
    // Geometric grading of the first panel toward r = 0.
    let mut sum = 0.0;
    let mut lo = w * 1e-6;
    sum += gauss_panel(f, 0.0, lo)?;
    while lo < w {
        let hi = (lo * 10.0).min(w);
        sum += gauss_panel(f, lo, hi)?;
        lo = hi;
    }
    for k in 1..panels {
        sum += gauss_panel(f, k as f64 * w, (k + 1) as f64 * w)?;
    }
    Ok(sum)
}

/// `V̂` and `Φ(s) = ∫₀^s t V̂(t) dt` at unit coupling, tabulated once per
/// potential for the angular kernel of tabulated inputs. Between knots `Φ`
/// is the cubic Hermite interpolant with the exact slopes `s V̂(s)`.
#[derive(Debug)]
pub(crate) struct FourierMomentTable {
    s: Vec<f64>,
    vhat: Vec<f64>,
    phi: Vec<f64>,
}

impl FourierMomentTable {
    pub(crate) fn build(v: &RadialPotential) -> Self {
        let unit = RadialPotential {
            coupling: 1.0,
            ..v.clone()
        };
        let l = unit.length_scale();
        let mut s = Vec::new();
        let h = 0.05 / l;
        let mut x = 0.0;
        while x < 20.0 / l {
            s.push(x);
            x += h;
        }
        while x < 2000.0 / l {
            s.push(x);
            x *= 1.05;
        }
        s.push(x);

        let (gx, gw) = gauss_legendre(4);
        let vh = |p: f64| unit.fourier_by_quadrature(p).unwrap_or(0.0);
        let vhat: Vec<f64> = s.par_iter().map(|&p| vh(p)).collect();
        let increments: Vec<f64> = s
            .par_windows(2)
            .map(|w| {
                let half = 0.5 * (w[1] - w[0]);
                let mid = 0.5 * (w[1] + w[0]);
                gx.iter()
                    .zip(gw)
                    .map(|(xi, wi)| {
                        let t = mid + half * xi;
                        wi * t * vh(t)
                    })
                    .sum::<f64>()
                    * half
            })
            .collect();
        let mut phi = Vec::with_capacity(s.len());
        phi.push(0.0);
        for inc in increments {
            let last = *phi.last().unwrap();
            phi.push(last + inc);
        }
        Self { s, vhat, phi }
    }

    fn locate(&self, x: f64) -> Option<usize> {
        let n = self.s.len();
        if x >= self.s[n - 1] {
            None
        } else {
            Some(self.s.partition_point(|&k| k <= x).saturating_sub(1))
        }
    }

    fn hermite(&self, i: usize, x: f64, y: &[f64], dy: &dyn Fn(usize) -> f64) -> f64 {
        let (x0, x1) = (self.s[i], self.s[i + 1]);
        let h = x1 - x0;
        let t = (x - x0) / h;
        let t2 = t * t;
        let t3 = t2 * t;
        let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
        let h10 = t3 - 2.0 * t2 + t;
        let h01 = -2.0 * t3 + 3.0 * t2;
        let h11 = t3 - t2;
        h00 * y[i] + h10 * h * dy(i) + h01 * y[i + 1] + h11 * h * dy(i + 1)
    }

    pub(crate) fn fourier(&self, p: f64) -> f64 {
        match self.locate(p) {
            None => 0.0,
            Some(i) => {
                let (x0, x1) = (self.s[i], self.s[i + 1]);
                let t = (p - x0) / (x1 - x0);
                (1.0 - t) * self.vhat[i] + t * self.vhat[i + 1]
            }
        }
    }

    pub(crate) fn phi(&self, x: f64) -> f64 {
        match self.locate(x) {
            None => *self.phi.last().unwrap(),
            Some(i) => {
                let dy = |j: usize| self.s[j] * self.vhat[j];
                self.hermite(i, x, &self.phi, &dy)
            }
        }
    }

    /// `Φ(hi) − Φ(lo)`.
    pub(crate) fn moment(&self, lo: f64, hi: f64) -> f64 {
        self.phi(hi) - self.phi(lo)
    }
}
