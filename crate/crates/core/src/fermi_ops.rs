//! Fermi-surface operators: the eigenvalues `e_μ^(ℓ)` of `𝒱_μ`, the
//! second-order form `⟨u|𝒲_μ^(κ)|u⟩` for the constant `u`, and
//! `b_μ^(κ) = (π/2)(e_μ − ⟨u|𝒲_μ^(κ)|u⟩)`.
//!
//! `b_μ^(κ)` is reported as the constant-function expectation of
//! `𝓑_μ^(κ)`, not its lowest eigenvalue; the two agree to first order.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numerics::{
    adaptive_integrate_with, alternating_tail, gauss_legendre, spherical_bessel, spherical_bessel_array,
    AdaptiveOptions,
};
use crate::potential::{RadialPotential, INV_TWO_PI_3_2};

/// Default angular-momentum cutoff for trace checks.
pub const DEFAULT_L_MAX: usize = 60;

/// Offset from `ρ = 1` used by the Lipschitz probe.
pub const LIPSCHITZ_OFFSET: f64 = 1e-6;

#[derive(Debug, Clone, Serialize)]
pub struct SphericalSpectrum {
    pub mu: f64,
    pub eigenvalues: Vec<f64>,
    pub e_mu: f64,
    pub argmin: usize,
    pub trace_partial: f64,
}

impl SphericalSpectrum {
    /// `√(2/π) V̂(0)`, the full trace of `𝒱_μ`.
    pub fn trace_target(v: &RadialPotential) -> Result<f64> {
        Ok(crate::potential::SQRT_2_OVER_PI * v.fourier(0.0)?)
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct SecondOrderData {
    pub mu: f64,
    pub kappa: f64,
    pub e_mu: f64,
    pub w_expect: f64,
    pub b_mu_kappa: f64,
}

/// Left and right difference quotients of `A` at `ρ = 1` against a centred
/// finite difference.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct LipschitzProbe {
    pub left: f64,
    pub right: f64,
    pub derivative: f64,
    pub passed: bool,
}

fn check_mu(mu: f64) -> Result<()> {
    if mu > 0.0 && mu.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain {
            what: "chemical potential must be positive",
            value: mu,
        })
    }
}

/// Nodes and weights on `[0, R]` resolving both `V` and `j_ℓ(√μ r)²`.
struct BesselRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    end: f64,
    panels: Vec<usize>,
}

fn bessel_rule(v: &RadialPotential, k: f64) -> BesselRule {
    let decay = v.decay_radius(1e-12);
    let width = (PI / k).min(0.25 * v.length_scale());
    let panels = (decay / width).ceil().max(4.0) as usize;
    let end = panels as f64 * width;
    let (x, w) = gauss_legendre(16);
    let mut nodes = Vec::with_capacity(16 * (panels + 8));
    let mut weights = Vec::with_capacity(nodes.capacity());
    let mut starts = Vec::with_capacity(panels + 8);
    let mut push = |a: f64, b: f64, nodes: &mut Vec<f64>, weights: &mut Vec<f64>| {
        starts.push(nodes.len());
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        for (xi, wi) in x.iter().zip(w) {
            nodes.push(mid + half * xi);
            weights.push(half * wi);
        }
    };
    let mut lo = width * 1e-6;
    push(0.0, lo, &mut nodes, &mut weights);
    while lo < width {
        let hi = (lo * 10.0).min(width);
        push(lo, hi, &mut nodes, &mut weights);
        lo = hi;
    }
    for i in 1..panels {
        push(i as f64 * width, (i + 1) as f64 * width, &mut nodes, &mut weights);
    }
    BesselRule {
        nodes,
        weights,
        end,
        panels: starts,
    }
}

/// `(1/2μ) ∫_R^∞ V dr` and `(1/2μ) ∫_R^∞ V cos(2√μ r) dr`: with
/// `j_ℓ(x)² ≈ (1 − (−1)^ℓ cos 2x) / (2x²)` these give the tail of every
/// `e_μ^(ℓ)` beyond `R`.
fn bessel_tail(v: &RadialPotential, k: f64, end: f64) -> Result<(f64, f64)> {
    let mu = k * k;
    let scale = v.coupling() * INV_TWO_PI_3_2.max(v.eval_unchecked(end).abs()) * v.length_scale();
    let opts = AdaptiveOptions::new(1e-16 * scale.max(1e-300));
    let mean = adaptive_integrate_with(|r| v.eval_unchecked(r), end, f64::INFINITY, &opts)?;
    // First zero of cos(2kr) at or beyond `end`.
    let n = ((2.0 * k * end - 0.5 * PI) / PI).ceil().max(0.0);
    let zero = (0.5 * PI + n * PI) / (2.0 * k);
    let f = |r: f64| v.eval_unchecked(r) * (2.0 * k * r).cos();
    let head = crate::numerics::gauss_panel(&f, end, zero)?;
    let osc = head + alternating_tail(&f, zero, PI / (2.0 * k), mean.abs())?;
    Ok((mean / (2.0 * mu), osc / (2.0 * mu)))
}

/// `e_μ^(ℓ) = (2/π) ∫₀^∞ r² V(r) j_ℓ(√μ r)² dr`.
pub fn ell_eigenvalue(v: &RadialPotential, mu: f64, ell: usize) -> Result<f64> {
    check_mu(mu)?;
    if v.coupling() == 0.0 {
        return Ok(0.0);
    }
    let k = mu.sqrt();
    let rule = bessel_rule(v, k);
    let mut sum = 0.0;
    for (&r, &w) in rule.nodes.iter().zip(&rule.weights) {
        let j = spherical_bessel(ell, k * r)?;
        let f = r * v.r_times_v(r) * j * j;
        if !f.is_finite() {
            return Err(Error::NonFinite { node: r, value: f });
        }
        sum += w * f;
    }
    let (mean, osc) = bessel_tail(v, k, rule.end)?;
    let sign = if ell % 2 == 0 { 1.0 } else { -1.0 };
    Ok(2.0 / PI * (sum + mean - sign * osc))
}

/// All `e_μ^(ℓ)` for `ℓ ≤ l_max`, their minimum and the partial trace
/// `Σ (2ℓ+1) e_μ^(ℓ)`.
pub fn spectrum(v: &RadialPotential, mu: f64, l_max: usize) -> Result<SphericalSpectrum> {
    check_mu(mu)?;
    if l_max < 8 {
        return Err(Error::Domain {
            what: "spectrum needs l_max >= 8",
            value: l_max as f64,
        });
    }
    let eigenvalues = if v.coupling() == 0.0 {
        vec![0.0; l_max + 1]
    } else {
        let k = mu.sqrt();
        let rule = bessel_rule(v, k);
        let mut bounds = rule.panels.clone();
        bounds.push(rule.nodes.len());
        let partials: Vec<Vec<f64>> = bounds
            .par_windows(2)
            .map(|b| {
                let mut acc = vec![0.0; l_max + 1];
                for i in b[0]..b[1] {
                    let r = rule.nodes[i];
                    let js = spherical_bessel_array(l_max, k * r)?;
                    let base = rule.weights[i] * r * v.r_times_v(r);
                    if !base.is_finite() {
                        return Err(Error::NonFinite { node: r, value: base });
                    }
                    for (a, j) in acc.iter_mut().zip(&js) {
                        *a += base * j * j;
                    }
                }
                Ok(acc)
            })
            .collect::<Result<_>>()?;
        let mut sums = vec![0.0; l_max + 1];
        for p in &partials {
            for (s, x) in sums.iter_mut().zip(p) {
                *s += x;
            }
        }
        let (mean, osc) = bessel_tail(v, k, rule.end)?;
        sums.iter()
            .enumerate()
            .map(|(l, s)| {
                let sign = if l % 2 == 0 { 1.0 } else { -1.0 };
                2.0 / PI * (s + mean - sign * osc)
            })
            .collect()
    };
    let (argmin, e_mu) =
        eigenvalues.iter().copied().enumerate().fold(
            (0, f64::INFINITY),
            |best, (l, e)| if e < best.1 { (l, e) } else { best },
        );
    let trace_partial = eigenvalues
        .iter()
        .enumerate()
        .map(|(l, e)| (2 * l + 1) as f64 * e)
        .sum();
    Ok(SphericalSpectrum {
        mu,
        eigenvalues,
        e_mu,
        argmin,
        trace_partial,
    })
}

/// `e_μ^(0)` through momentum space: `(2π)^{-3/2} k(√μ, √μ)`.
pub fn e_mu_momentum(v: &RadialPotential, mu: f64) -> Result<f64> {
    check_mu(mu)?;
    let k = mu.sqrt();
    Ok(INV_TWO_PI_3_2 * v.angular_kernel(k, k)?)
}

/// `φ̂(√μ ρ)` for the constant `u = (4π)^{-1/2}`.
pub fn phi_hat_radial(v: &RadialPotential, mu: f64, rho: f64) -> Result<f64> {
    check_mu(mu)?;
    if !(rho >= 0.0) {
        return Err(Error::Domain {
            what: "rho must be >= 0",
            value: rho,
        });
    }
    let k = mu.sqrt();
    Ok(INV_TWO_PI_3_2 / (4.0 * PI).sqrt() * v.angular_kernel(k * rho, k)?)
}

/// `A(ρ) = ∫_{S²} |φ̂(√μ ρ ω)|² dω`.
fn angular_density(v: &RadialPotential, k: f64, rho: f64) -> f64 {
    let kern = INV_TWO_PI_3_2 * v.angular_kernel_unchecked(k * rho, k);
    kern * kern
}

/// Combined radial integrand of `⟨u|𝒲_μ^(κ)|u⟩ / √μ` at `ρ ≠ 1`.
pub fn w_integrand(v: &RadialPotential, mu: f64, kappa: f64, rho: f64) -> Result<f64> {
    check_mu(mu)?;
    let k = mu.sqrt();
    let a1 = angular_density(v, k, 1.0);
    Ok(combined(angular_density(v, k, rho), a1, kappa, rho))
}

fn combined(a: f64, a1: f64, kappa: f64, rho: f64) -> f64 {
    let r2 = rho * rho;
    r2 * ((a - a1) / (r2 - 1.0).abs() + a1 / (r2 + kappa * kappa))
}

pub fn lipschitz_probe(v: &RadialPotential, mu: f64) -> Result<LipschitzProbe> {
    check_mu(mu)?;
    let k = mu.sqrt();
    let a1 = angular_density(v, k, 1.0);
    let h = LIPSCHITZ_OFFSET;
    let quotient = |rho: f64| (angular_density(v, k, rho) - a1) / (rho * rho - 1.0).abs();
    let left = quotient(1.0 - h);
    let right = quotient(1.0 + h);
    let d = 1e-4;
    let derivative = (angular_density(v, k, 1.0 + d) - angular_density(v, k, 1.0 - d)) / (2.0 * d);
    let slack = 1e-3 * (0.5 * derivative).abs() + 1e-8 * a1;
    let passed = (right - 0.5 * derivative).abs() <= slack && (left + 0.5 * derivative).abs() <= slack;
    Ok(LipschitzProbe {
        left,
        right,
        derivative,
        passed,
    })
}

/// `⟨u|𝒲_μ^(κ)|u⟩` for constant `u`, as one combined radial integral.
pub fn w_expectation(v: &RadialPotential, mu: f64, kappa: f64) -> Result<f64> {
    check_mu(mu)?;
    if !(kappa >= 0.0) || !kappa.is_finite() {
        return Err(Error::Domain {
            what: "kappa must be >= 0",
            value: kappa,
        });
    }
    if v.coupling() == 0.0 {
        return Ok(0.0);
    }
    let probe = lipschitz_probe(v, mu)?;
    if !probe.passed {
        return Err(Error::LipschitzProbe {
            left: probe.left,
            right: probe.right,
            fd: probe.derivative,
        });
    }
    let k = mu.sqrt();
    let a1 = angular_density(v, k, 1.0);
    let tol = 1e-14 * a1.max(1e-300);
    let f = |rho: f64| combined(angular_density(v, k, rho), a1, kappa, rho);
    let split = 3.0;
    let inner = adaptive_integrate_with(f, 0.0, 1.0, &AdaptiveOptions::new(tol).with_hints(&[1.0]))?;
    let outer = adaptive_integrate_with(f, 1.0, split, &AdaptiveOptions::new(tol).with_hints(&[1.0]))?;
    // Beyond the split only A(ρ) needs quadrature; the A(1) part is closed form.
    let far = adaptive_integrate_with(
        |rho| {
            let r2 = rho * rho;
            r2 * angular_density(v, k, rho) / (r2 - 1.0)
        },
        split,
        f64::INFINITY,
        &AdaptiveOptions::new(tol),
    )?;
    let analytic = -kappa * (kappa / split).atan() + 0.5 * ((split - 1.0) / (split + 1.0)).ln();
    Ok(k * (inner + outer + far + a1 * analytic))
}

/// `b = (π/2)(e − w)`.
pub fn b_from_parts(e_mu: f64, w_expect: f64) -> f64 {
    0.5 * PI * (e_mu - w_expect)
}

/// `b_μ^(κ)` with `e_μ = e_μ^(0)` (the ground state for `V̂ ≤ 0`).
pub fn b_mu(v: &RadialPotential, mu: f64, kappa: f64) -> Result<SecondOrderData> {
    let e_mu = e_mu_momentum(v, mu)?;
    if !(e_mu < 0.0) {
        return Err(Error::Rejected(format!("e_mu = {e_mu:e} is not negative at mu = {mu}")));
    }
    let w_expect = w_expectation(v, mu, kappa)?;
    Ok(SecondOrderData {
        mu,
        kappa,
        e_mu,
        w_expect,
        b_mu_kappa: b_from_parts(e_mu, w_expect),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gauss() -> RadialPotential {
        RadialPotential::gaussian(1.0)
    }

    #[test]
    fn bessel_and_momentum_routes_agree() {
        for v in [gauss(), RadialPotential::yukawa(1.0), RadialPotential::lorentzian(1.0)] {
            for mu in [4.0, 25.0, 100.0] {
                let a = ell_eigenvalue(&v, mu, 0).unwrap();
                let b = e_mu_momentum(&v, mu).unwrap();
                assert!((a - b).abs() <= 1e-10 * b.abs(), "{:?} mu={mu}: {a} {b}", v.kind());
            }
        }
    }

    #[test]
    fn zero_potential() {
        let v = RadialPotential::gaussian(0.0);
        assert_eq!(ell_eigenvalue(&v, 9.0, 3).unwrap(), 0.0);
        assert_eq!(phi_hat_radial(&v, 9.0, 0.7).unwrap(), 0.0);
        assert_eq!(w_expectation(&v, 9.0, 1.0).unwrap(), 0.0);
    }

    #[test]
    fn spectrum_matches_single_ell() {
        let v = RadialPotential::lorentzian(1.0);
        let s = spectrum(&v, 25.0, 12).unwrap();
        for l in [0, 5, 12] {
            let e = ell_eigenvalue(&v, 25.0, l).unwrap();
            assert!((s.eigenvalues[l] - e).abs() <= 1e-12 * e.abs().max(1e-14), "l={l}");
        }
        assert_eq!(s.argmin, 0);
        assert!(spectrum(&v, 25.0, 4).is_err());
    }

    #[test]
    fn phi_hat_at_fermi_surface_is_e_mu() {
        let v = gauss();
        let e = e_mu_momentum(&v, 25.0).unwrap();
        let phi = phi_hat_radial(&v, 25.0, 1.0).unwrap();
        assert!(((4.0 * PI).sqrt() * phi - e).abs() <= 1e-12 * e.abs());
        assert!(phi_hat_radial(&v, 25.0, 1e3).unwrap().abs() < 1e-300_f64.max(1e-30));
    }

    #[test]
    fn w_is_linear_in_kappa() {
        let v = RadialPotential::gaussian(30.0);
        let mu = 50.0;
        let e = e_mu_momentum(&v, mu).unwrap();
        let w1 = w_expectation(&v, mu, 0.5).unwrap();
        let w2 = w_expectation(&v, mu, 2.0).unwrap();
        let want = mu.sqrt() * e * e * 0.5 * PI * 1.5;
        assert!(((w1 - w2) - want).abs() <= 1e-9 * want.abs(), "{} {}", w1 - w2, want);
    }

    #[test]
    fn lipschitz_probe_passes() {
        for v in [gauss(), RadialPotential::yukawa(1.0)] {
            assert!(lipschitz_probe(&v, 25.0).unwrap().passed);
        }
    }

    #[test]
    fn leading_order_b() {
        assert_eq!(b_from_parts(-0.2, 0.0), 0.5 * PI * -0.2);
        let d = b_mu(&gauss(), 100.0, 1.0).unwrap();
        assert!(d.b_mu_kappa < 0.0);
    }
}
