use std::f64::consts::PI;

use rayon::prelude::*;
use serde::Serialize;

use super::RadialPotential;
use crate::error::{Error, Result};
use crate::numerics::{adaptive_integrate_with, gauss_legendre, AdaptiveOptions};

/// Number of momenta sampled for the sign of `V̂`.
pub const FOURIER_SAMPLES: usize = 401;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    AdmissibleChecked,
    AdmissibleUnverifiableParts,
    Rejected,
}

impl Verdict {
    pub fn name(self) -> &'static str {
        match self {
            Self::AdmissibleChecked => "admissible-checked",
            Self::AdmissibleUnverifiableParts => "admissible-unverifiable-parts",
            Self::Rejected => "rejected",
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct AdmissibilityOptions {
    /// Largest positive `V̂` sample tolerated as round-off.
    pub tol: f64,
    /// The caller vouches for the rearrangement condition, which cannot be
    /// decided from samples.
    pub assume_rearrangement_condition: bool,
}

impl AdmissibilityOptions {
    pub fn new(tol: f64) -> Self {
        Self {
            tol,
            assume_rearrangement_condition: false,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct AdmissibilityReport {
    pub fourier_nonpositive: bool,
    /// `max(0, max_p V̂(p))` over the samples.
    pub worst_fourier_violation: f64,
    pub fourier_at_zero: f64,
    pub l1_norm: f64,
    pub l32_norm: f64,
    pub weighted_l2_norm: f64,
    pub s_star_plus: f64,
    pub s_star_minus: f64,
    pub s_star_estimate: f64,
    /// Heuristic sign-dominance condition from the `s*` estimates.
    pub sign_dominance_estimate: bool,
    pub rearrangement_checked: bool,
    pub verdict: Verdict,
    pub reasons: Vec<String>,
}

/// Computable parts of the admissibility definition.
pub fn admissibility(v: &RadialPotential, opts: AdmissibilityOptions) -> Result<AdmissibilityReport> {
    if !(opts.tol > 0.0) {
        return Err(Error::Domain {
            what: "admissibility tolerance must be > 0",
            value: opts.tol,
        });
    }
    let fourier_at_zero = v.fourier(0.0)?;
    let samples: Vec<f64> = (0..FOURIER_SAMPLES)
        .into_par_iter()
        .map(|i| {
            let p = 1e-3 * 1e6f64.powf(i as f64 / (FOURIER_SAMPLES - 1) as f64);
            v.fourier(p)
        })
        .collect::<Result<_>>()?;
    let worst = samples.iter().fold(0.0f64, |m, &x| m.max(x));
    let fourier_nonpositive = worst <= opts.tol;

    let l1_norm = 4.0 * PI * radial_moment(v, |r, x| r * r * x.abs())?;
    let l32_norm = (4.0 * PI * radial_moment(v, |r, x| r * r * x.abs().powf(1.5))?).powf(2.0 / 3.0);
    let weighted_l2_norm = (4.0 * PI * radial_moment(v, |r, x| r.powi(4) * x * x)?).sqrt();

    let s_star_plus = s_star(|r| v.eval_unchecked(r).max(0.0));
    let s_star_minus = s_star(|r| (-v.eval_unchecked(r)).max(0.0));
    let s_star_estimate = s_star_plus.min(s_star_minus);
    let sign_dominance_estimate = s_star_estimate > 2.0 || s_star_minus < s_star_plus;

    let mut reasons = Vec::new();
    if !(fourier_at_zero < 0.0) {
        reasons.push(format!("V̂(0) = {fourier_at_zero:e} is not negative"));
    }
    if !fourier_nonpositive {
        reasons.push(format!("V̂ reaches {worst:e} > tolerance {:e}", opts.tol));
    }
    if !l1_norm.is_finite() || !l32_norm.is_finite() {
        reasons.push("V is not in L^1 ∩ L^3/2".into());
    }
    if !weighted_l2_norm.is_finite() {
        reasons.push("|x| V is not in L^2".into());
    }
    if !(s_star_estimate > 1.4) {
        reasons.push(format!("s* ≈ {s_star_estimate} does not exceed 7/5"));
    }
    let verdict = if !reasons.is_empty() {
        Verdict::Rejected
    } else if opts.assume_rearrangement_condition {
        Verdict::AdmissibleChecked
    } else {
        reasons.push("rearrangement condition not checked".into());
        Verdict::AdmissibleUnverifiableParts
    };
    if !sign_dominance_estimate {
        reasons.push("sign-dominance condition appears to fail (heuristic)".into());
    }
    Ok(AdmissibilityReport {
        fourier_nonpositive,
        worst_fourier_violation: worst,
        fourier_at_zero,
        l1_norm,
        l32_norm,
        weighted_l2_norm,
        s_star_plus,
        s_star_minus,
        s_star_estimate,
        sign_dominance_estimate,
        rearrangement_checked: opts.assume_rearrangement_condition,
        verdict,
        reasons,
    })
}

/// `∫₀^∞ h(r, V(r)) dr`.
fn radial_moment(v: &RadialPotential, h: impl Fn(f64, f64) -> f64) -> Result<f64> {
    if v.coupling() == 0.0 {
        return Ok(0.0);
    }
    let mut hints = vec![0.0];
    if let Some(t) = v.table() {
        hints.push(t.radii()[0]);
        hints.push(*t.radii().last().unwrap());
    }
    hints.retain(|&x| x >= 0.0);
    hints.dedup();
    let scale = v.coupling() * v.eval_scale() * v.length_scale().powi(3);
    let f = |r: f64| {
        if r == 0.0 {
            return 0.0;
        }
        h(r, v.eval_unchecked(r))
    };
    let opts = AdaptiveOptions::new(1e-13 * scale.max(1e-300)).with_hints(&hints);
    match adaptive_integrate_with(f, 0.0, f64::INFINITY, &opts) {
        Ok(x) => Ok(x),
        Err(Error::QuadratureNoConvergence { .. }) | Err(Error::NonFinite { .. }) => Ok(f64::INFINITY),
        Err(e) => Err(e),
    }
}

/// `∫ r^{2-s} u(r) dr` over the shell `[10^{-k-1}, 10^{-k}]`, in `ln r`.
fn shell(u: &impl Fn(f64) -> f64, s: f64, k: i32) -> f64 {
    let (x, w) = gauss_legendre(32);
    let lo = 10f64.powi(-k - 1).ln();
    let hi = 10f64.powi(-k).ln();
    let half = 0.5 * (hi - lo);
    let mid = 0.5 * (hi + lo);
    x.iter()
        .zip(w)
        .map(|(xi, wi)| {
            let r = (mid + half * xi).exp();
            wi * r.powf(3.0 - s) * u(r)
        })
        .sum::<f64>()
        * half
}

/// Bisection for `sup{s : |x|^{-s} u ∈ L¹}` using the trend of the shell
/// integrals as `r → 0`. Returns `∞` when `u` vanishes near the origin.
fn s_star(u: impl Fn(f64) -> f64) -> f64 {
    let finite = |s: f64| {
        let inner = shell(&u, s, 9);
        let outer = shell(&u, s, 8);
        inner.is_finite() && inner < outer
    };
    if shell(&u, 0.0, 9) == 0.0 && shell(&u, 0.0, 8) == 0.0 {
        return f64::INFINITY;
    }
    let (mut lo, mut hi) = (0.0, 12.0);
    if finite(hi) {
        return f64::INFINITY;
    }
    if !finite(lo) {
        return 0.0;
    }
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if finite(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potential::PotentialTable;

    #[test]
    fn gaussian_report() {
        let r = admissibility(&RadialPotential::gaussian(1.0), AdmissibilityOptions::new(1e-12)).unwrap();
        assert_eq!(r.verdict, Verdict::AdmissibleUnverifiableParts);
        assert!((r.fourier_at_zero + 0.063494).abs() < 1e-6);
        assert!((r.s_star_estimate - 3.0).abs() < 1e-6, "{}", r.s_star_estimate);
        assert_eq!(r.s_star_plus, f64::INFINITY);
        // ‖V‖₁ = (2π)^{-3/2} · (2π)^{3/2} = 1
        assert!((r.l1_norm - 1.0).abs() < 1e-10, "{}", r.l1_norm);
    }

    #[test]
    fn yukawa_report() {
        let r = admissibility(&RadialPotential::yukawa(1.0), AdmissibilityOptions::new(1e-12)).unwrap();
        assert_eq!(r.verdict, Verdict::AdmissibleUnverifiableParts);
        assert!((r.s_star_estimate - 2.0).abs() < 1e-6, "{}", r.s_star_estimate);
        // ‖V‖₁ = ∫₀^∞ r e^{-r} dr = 1
        assert!((r.l1_norm - 1.0).abs() < 1e-10, "{}", r.l1_norm);
    }

    #[test]
    fn asserted_rearrangement_gives_checked() {
        let mut opts = AdmissibilityOptions::new(1e-12);
        opts.assume_rearrangement_condition = true;
        let r = admissibility(&RadialPotential::lorentzian(1.0), opts).unwrap();
        assert_eq!(r.verdict, Verdict::AdmissibleChecked);
    }

    #[test]
    fn zero_table_is_rejected() {
        let radii: Vec<f64> = (0..20).map(|i| i as f64 * 0.5).collect();
        let t = PotentialTable::new(radii, vec![0.0; 20]).unwrap();
        let v = RadialPotential::tabulated(t, 1.0).unwrap();
        let r = admissibility(&v, AdmissibilityOptions::new(1e-12)).unwrap();
        assert_eq!(r.verdict, Verdict::Rejected);
        assert_eq!(r.fourier_at_zero, 0.0);
    }
}
