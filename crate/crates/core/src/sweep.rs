//! One `(V, μ)` point of a sweep: spectrum, `b_μ^(κ)`, gap, `T_c` and the
//! derived diagnostics.

use serde::Serialize;

use crate::asymptotics::{effective_b_zero, predict_tc, predict_xi, thm1_functional, SweepRecord};
use crate::error::{Error, Result};
use crate::fermi_ops::{b_mu, SecondOrderData};
use crate::gap_solver::{solve_gap, GapConfig, GapFunction};
use crate::potential::RadialPotential;
use crate::tc_solver::{critical_temperature_with, LinearizedOperator, TcConfig, TcReport};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepConfig {
    pub gap: GapConfig,
    pub tc: TcConfig,
    pub kappas: Vec<f64>,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            gap: GapConfig::default(),
            tc: TcConfig::default(),
            kappas: vec![0.0, 0.5, 1.0, 2.0],
        }
    }
}

impl SweepConfig {
    /// Both solvers on the same grid parameters.
    pub fn with_grid(mut self, grid: crate::gap_solver::GridParams) -> Self {
        self.gap.grid = grid;
        self.tc.grid = grid;
        self
    }
}

/// Everything computed at one `μ`.
#[derive(Debug, Clone)]
pub struct PointData {
    pub mu: f64,
    pub g: f64,
    pub b_zero: SecondOrderData,
    /// One entry per requested κ, in order.
    pub second_order: Vec<SecondOrderData>,
    pub gap: GapFunction,
    pub xi: f64,
    pub delta_fermi: f64,
    pub tc: TcReport,
    /// `m_μ^(κ)(Δ)` per requested κ.
    pub m: Vec<f64>,
}

/// Full pipeline at one `μ`. `T_c` reuses the gap grid and kernel.
pub fn compute_point(v: &RadialPotential, mu: f64, cfg: &SweepConfig) -> Result<PointData> {
    if cfg.kappas.iter().any(|&k| !(k >= 0.0) || !k.is_finite()) {
        return Err(Error::Invalid("kappa values must be finite and nonnegative".into()));
    }
    let b_zero = b_mu(v, mu, 0.0)?;
    let second_order = cfg
        .kappas
        .iter()
        .map(|&k| if k == 0.0 { Ok(b_zero) } else { b_mu(v, mu, k) })
        .collect::<Result<Vec<_>>>()?;
    let gap = solve_gap(v, mu, &cfg.gap)?;
    let xi = gap.energy_gap();
    let delta_fermi = gap.delta_fermi();
    let t_pred = predict_tc(mu, b_zero.b_mu_kappa)?.value;
    let op = LinearizedOperator::from_problem(&gap.problem);
    let tc = critical_temperature_with(&op, mu, v.coupling(), t_pred, &cfg.tc)?;
    let m = cfg
        .kappas
        .iter()
        .map(|&k| gap.m_integral(k))
        .collect::<Result<Vec<_>>>()?;
    Ok(PointData {
        mu,
        g: v.coupling(),
        b_zero,
        second_order,
        gap,
        xi,
        delta_fermi,
        tc,
        m,
    })
}

impl PointData {
    /// One record per κ.
    pub fn records(&self) -> Result<Vec<SweepRecord>> {
        let b0 = self.b_zero.b_mu_kappa;
        let thm1 = thm1_functional(self.xi, self.mu, b0)?;
        let xi_prediction = predict_xi(self.mu, b0)?.value;
        let tc_prediction = predict_tc(self.mu, b0)?.value;
        self.second_order
            .iter()
            .zip(&self.m)
            .map(|(so, &m)| {
                Ok(SweepRecord {
                    mu: self.mu,
                    g: self.g,
                    kappa: so.kappa,
                    e_mu: so.e_mu,
                    b_mu_kappa: so.b_mu_kappa,
                    b_mu_zero: b0,
                    b_mu_zero_effective: effective_b_zero(self.mu, so.kappa, so.b_mu_kappa)?,
                    xi: self.xi,
                    delta_fermi: self.delta_fermi,
                    t_c: self.tc.t_c,
                    m_mu: m,
                    thm1_functional: thm1,
                    tc_prediction,
                    xi_prediction,
                    ratio: self.xi / self.tc.t_c,
                    status: "ok".into(),
                })
            })
            .collect()
    }
}

/// Short status tag for a failed point.
pub fn failure_status(e: &Error) -> String {
    let tag = match e {
        Error::UnderflowInfeasible { .. } => "infeasible",
        Error::GapNotConverged { .. } | Error::TrivialSolution | Error::PositivityLost { .. } => "gap-failed",
        Error::BracketFailure { .. } | Error::NonMonotone { .. } | Error::PowerIteration { .. } => "tc-failed",
        Error::Rejected(_) => "rejected",
        _ => "error",
    };
    format!("{tag}: {e}")
}

/// Records for one `μ`; failures become rows with a status message.
pub fn run_point(v: &RadialPotential, mu: f64, cfg: &SweepConfig) -> Vec<SweepRecord> {
    match compute_point(v, mu, cfg).and_then(|p| p.records()) {
        Ok(rows) => rows,
        Err(e) => {
            let status = failure_status(&e);
            cfg.kappas
                .iter()
                .map(|&k| SweepRecord::failed(mu, v.coupling(), k, status.clone()))
                .collect()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn infeasible_point_yields_status_rows() {
        let rows = run_point(&RadialPotential::gaussian(30.0), 400.0, &SweepConfig::default());
        assert_eq!(rows.len(), 4);
        assert!(rows.iter().all(|r| r.status.starts_with("infeasible") && r.xi.is_nan()));
    }

    #[test]
    fn records_share_gap_and_differ_in_kappa() {
        let p = compute_point(&RadialPotential::gaussian(30.0), 50.0, &SweepConfig::default()).unwrap();
        let rows = p.records().unwrap();
        assert_eq!(rows.len(), 4);
        assert!(rows.windows(2).all(|w| w[0].xi == w[1].xi && w[0].m_mu < w[1].m_mu));
        assert!(rows.iter().all(|r| r.is_ok() && r.b_mu_kappa < 0.0));
        assert_eq!(rows[0].b_mu_kappa, rows[0].b_mu_zero);
    }
}
