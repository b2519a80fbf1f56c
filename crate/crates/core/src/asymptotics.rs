//! High-density predictions for `Ξ` and `T_c`, the gap functional
//! `log(μ/Ξ) + π/(2√μ b)`, the κ-shift table and universality diagnostics.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::EULER_GAMMA;

/// `2 − log 8`, the limit of [`thm1_functional`].
pub const THM1_TARGET: f64 = 2.0 - 2.079_441_541_679_835_8;

/// `π e^{−γ} ≈ 1.764`, the limit of `Ξ / T_c`.
pub const UNIVERSAL_RATIO: f64 = 1.763_876_988_862_045_6;

/// Exponents below this are reported as underflow.
pub const UNDERFLOW_EXPONENT: f64 = -700.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Prediction {
    pub value: f64,
    /// `π / (2√μ b)`.
    pub exponent: f64,
    pub underflow: bool,
}

fn exponent(mu: f64, b: f64) -> Result<f64> {
    if !(mu > 0.0) {
        return Err(Error::Domain {
            what: "chemical potential must be positive",
            value: mu,
        });
    }
    if !(b < 0.0) && b != 0.0 {
        return Err(Error::Domain {
            what: "b must be negative",
            value: b,
        });
    }
    if b == 0.0 {
        return Ok(f64::NEG_INFINITY);
    }
    Ok(PI / (2.0 * mu.sqrt() * b))
}

fn predict(mu: f64, b: f64, prefactor: f64) -> Result<Prediction> {
    let exponent = exponent(mu, b)?;
    if exponent < UNDERFLOW_EXPONENT {
        return Ok(Prediction {
            value: 0.0,
            exponent,
            underflow: true,
        });
    }
    Ok(Prediction {
        value: mu * prefactor * exponent.exp(),
        exponent,
        underflow: false,
    })
}

/// `8 e^{−2}`.
pub fn xi_prefactor() -> f64 {
    8.0 * (-2.0f64).exp()
}

/// `(8/π) e^{γ−2}`.
pub fn tc_prefactor() -> f64 {
    8.0 / PI * (EULER_GAMMA - 2.0).exp()
}

/// `Ξ ≈ μ · 8e^{−2} · exp(π/(2√μ b))`.
pub fn predict_xi(mu: f64, b: f64) -> Result<Prediction> {
    predict(mu, b, xi_prefactor())
}

/// `T_c ≈ μ · (8/π) e^{γ−2} · exp(π/(2√μ b))`.
pub fn predict_tc(mu: f64, b: f64) -> Result<Prediction> {
    predict(mu, b, tc_prefactor())
}

/// `log(μ/Ξ) + π/(2√μ b)`.
pub fn thm1_functional(xi: f64, mu: f64, b: f64) -> Result<f64> {
    if !(xi > 0.0) {
        return Err(Error::Domain {
            what: "energy gap must be positive",
            value: xi,
        });
    }
    if !(b < 0.0) {
        return Err(Error::Domain {
            what: "b must be negative",
            value: b,
        });
    }
    Ok((mu / xi).ln() + exponent(mu, b)?)
}

/// `π/(2√μ b^(κ)) + κπ/2`, which tends to a κ-independent limit.
pub fn shifted_exponent(mu: f64, kappa: f64, b_kappa: f64) -> Result<f64> {
    Ok(exponent(mu, b_kappa)? + 0.5 * PI * kappa)
}

/// `b` at κ = 0 implied by `b^(κ)` through the κ-shift.
pub fn effective_b_zero(mu: f64, kappa: f64, b_kappa: f64) -> Result<f64> {
    let shifted = shifted_exponent(mu, kappa, b_kappa)?;
    Ok(PI / (2.0 * mu.sqrt() * shifted))
}

#[derive(Debug, Clone, Serialize)]
pub struct KappaShiftRow {
    pub kappa: f64,
    pub b_kappa: f64,
    pub shifted: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct KappaShiftTable {
    pub mu: f64,
    pub rows: Vec<KappaShiftRow>,
    /// Largest pairwise difference of the shifted values.
    pub spread: f64,
}

/// Shifted exponents for several κ at one μ.
pub fn kappa_shift(mu: f64, entries: &[(f64, f64)]) -> Result<KappaShiftTable> {
    if entries.len() < 2 {
        return Err(Error::Invalid(
            "the kappa-shift table needs at least two kappa values".into(),
        ));
    }
    let rows = entries
        .iter()
        .map(|&(kappa, b_kappa)| {
            Ok(KappaShiftRow {
                kappa,
                b_kappa,
                shifted: shifted_exponent(mu, kappa, b_kappa)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let max = rows.iter().map(|r| r.shifted).fold(f64::NEG_INFINITY, f64::max);
    let min = rows.iter().map(|r| r.shifted).fold(f64::INFINITY, f64::min);
    Ok(KappaShiftTable {
        mu,
        rows,
        spread: max - min,
    })
}

/// Everything computed at one `(V, μ, κ)`.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct SweepRecord {
    pub mu: f64,
    pub g: f64,
    pub kappa: f64,
    pub e_mu: f64,
    pub b_mu_kappa: f64,
    /// `b` evaluated directly at κ = 0.
    pub b_mu_zero: f64,
    /// `b` at κ = 0 implied by `b^(κ)` and the κ-shift.
    pub b_mu_zero_effective: f64,
    pub xi: f64,
    pub delta_fermi: f64,
    pub t_c: f64,
    pub m_mu: f64,
    pub thm1_functional: f64,
    pub tc_prediction: f64,
    pub xi_prediction: f64,
    pub ratio: f64,
    pub status: String,
}

impl SweepRecord {
    /// A row carrying only its identity and a failure status.
    pub fn failed(mu: f64, g: f64, kappa: f64, status: impl Into<String>) -> Self {
        Self {
            mu,
            g,
            kappa,
            e_mu: f64::NAN,
            b_mu_kappa: f64::NAN,
            b_mu_zero: f64::NAN,
            b_mu_zero_effective: f64::NAN,
            xi: f64::NAN,
            delta_fermi: f64::NAN,
            t_c: f64::NAN,
            m_mu: f64::NAN,
            thm1_functional: f64::NAN,
            tc_prediction: f64::NAN,
            xi_prediction: f64::NAN,
            ratio: f64::NAN,
            status: status.into(),
        }
    }

    pub fn is_ok(&self) -> bool {
        self.status == "ok"
    }
}

pub const CSV_SCHEMA_VERSION: u32 = 1;

pub const CSV_HEADER: &str = "schema_version,mu,g,kappa,e_mu,b_mu,xi,delta_fermi,t_c,m_mu,thm1_functional,ratio,status";

/// Seventeen significant digits, enough to round-trip any `f64`.
pub fn format_float(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf" } else { "-inf" }.into()
    } else {
        format!("{x:.16e}")
    }
}

/// One CSV line (without newline) in the fixed schema.
pub fn csv_row(r: &SweepRecord) -> String {
    let status = r.status.replace([',', '\n', '\r'], ";");
    format!(
        "{CSV_SCHEMA_VERSION},{},{},{},{},{},{},{},{},{},{},{},{status}",
        format_float(r.mu),
        format_float(r.g),
        format_float(r.kappa),
        format_float(r.e_mu),
        format_float(r.b_mu_kappa),
        format_float(r.xi),
        format_float(r.delta_fermi),
        format_float(r.t_c),
        format_float(r.m_mu),
        format_float(r.thm1_functional),
        format_float(r.ratio),
    )
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct UniversalityDiagnostic {
    pub ratio: f64,
    pub deviation: f64,
    /// `|Ξ − Δ(√μ)| / Δ(√μ)`.
    pub fermi_relative_gap: f64,
    pub xi_le_delta: bool,
}

pub fn universality(r: &SweepRecord) -> Result<UniversalityDiagnostic> {
    if !(r.xi > 0.0 && r.t_c > 0.0 && r.delta_fermi > 0.0) {
        return Err(Error::Invalid(format!(
            "universality needs positive xi, t_c and delta (mu = {})",
            r.mu
        )));
    }
    let ratio = r.xi / r.t_c;
    Ok(UniversalityDiagnostic {
        ratio,
        deviation: (ratio - UNIVERSAL_RATIO).abs(),
        fermi_relative_gap: (r.xi - r.delta_fermi).abs() / r.delta_fermi,
        xi_le_delta: r.xi <= r.delta_fermi,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constants() {
        assert!((THM1_TARGET + 0.0794415).abs() < 1e-7);
        assert!((UNIVERSAL_RATIO - PI * (-EULER_GAMMA).exp()).abs() < 1e-15);
        assert!((xi_prefactor() - 1.08268).abs() < 1e-5);
        assert!((EULER_GAMMA - 0.5772156649).abs() < 1e-10);
    }

    #[test]
    fn inverted_prediction_hits_target() {
        let (mu, b) = (100.0, -0.011);
        let xi = predict_xi(mu, b).unwrap().value;
        let f = thm1_functional(xi, mu, b).unwrap();
        assert!((f - THM1_TARGET).abs() < 1e-13);
    }

    #[test]
    fn ratio_of_predictions_is_universal() {
        for (mu, b) in [(50.0, -0.02), (400.0, -0.003), (7.0, -1.0)] {
            let r = predict_xi(mu, b).unwrap().value / predict_tc(mu, b).unwrap().value;
            assert!((r - UNIVERSAL_RATIO).abs() < 1e-14 * UNIVERSAL_RATIO);
        }
    }

    #[test]
    fn underflow_and_monotonicity() {
        let p = predict_xi(100.0, -0.0).unwrap();
        assert!(p.underflow && p.value == 0.0);
        let p = predict_xi(100.0, -1e-5).unwrap();
        assert!(p.underflow);
        let a = predict_xi(100.0, -0.02).unwrap().value;
        let b = predict_xi(100.0, -0.01).unwrap().value;
        assert!(b < a);
        assert!(predict_xi(100.0, 0.1).is_err());
    }

    #[test]
    fn shift_table() {
        let t = kappa_shift(100.0, &[(1.0, -0.01), (1.0, -0.01)]).unwrap();
        assert_eq!(t.spread, 0.0);
        let t = kappa_shift(100.0, &[(0.0, -0.01), (1.0, -0.012)]).unwrap();
        assert_eq!(t.rows[0].shifted, PI / (2.0 * 10.0 * -0.01));
        assert!(kappa_shift(100.0, &[(0.0, -0.01)]).is_err());
    }

    #[test]
    fn csv_round_trips() {
        let mut r = SweepRecord::failed(100.0, 30.0, 1.0, "ok");
        r.xi = 0.1 + 0.2;
        let row = csv_row(&r);
        let field: f64 = row.split(',').nth(6).unwrap().parse().unwrap();
        assert_eq!(field, 0.1 + 0.2);
        assert_eq!(row.split(',').count(), CSV_HEADER.split(',').count());
    }
}
