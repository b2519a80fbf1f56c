use std::path::PathBuf;

use thiserror::Error;

/// Errors produced anywhere in the solver stack.
#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {what} (got {value})")]
    Domain { what: &'static str, value: f64 },

    #[error("integrand is not finite at node {node}: f = {value}")]
    NonFinite { node: f64, value: f64 },

    #[error("adaptive quadrature did not converge: worst subinterval [{a}, {b}] has error estimate {estimate:e}")]
    QuadratureNoConvergence { a: f64, b: f64, estimate: f64 },

    #[error("quadrature failed: {0}")]
    Quadrature(String),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("potential is not admissible: {0}")]
    Rejected(String),

    #[error(
        "gap is numerically infeasible at mu = {mu}: predicted Delta/mu = {predicted_ratio:e} is below {floor:e}; raise the coupling g"
    )]
    UnderflowInfeasible { mu: f64, predicted_ratio: f64, floor: f64 },

    #[error("iteration collapsed onto the trivial solution Delta = 0")]
    TrivialSolution,

    #[error("gap iteration did not converge after {iterations} iterations (residual {residual:e})")]
    GapNotConverged { iterations: usize, residual: f64 },

    #[error("positivity lost at iteration {iteration}, node {node}")]
    PositivityLost { iteration: usize, node: usize },

    #[error("power iteration stagnated after {iterations} iterations (residual {residual:e})")]
    PowerIteration { iterations: usize, residual: f64 },

    #[error("could not bracket T_c: lambda_max = {lambda} at T = {temperature:e}")]
    BracketFailure { temperature: f64, lambda: f64 },

    #[error(
        "lambda_max is not decreasing in T: lambda({t_lo:e}) = {l_lo}, lambda({t_mid:e}) = {l_mid}, lambda({t_hi:e}) = {l_hi}"
    )]
    NonMonotone {
        t_lo: f64,
        t_mid: f64,
        t_hi: f64,
        l_lo: f64,
        l_mid: f64,
        l_hi: f64,
    },

    #[error("Lipschitz probe at rho = 1 failed: left {left:e}, right {right:e}, finite difference {fd:e}")]
    LipschitzProbe { left: f64, right: f64, fd: f64 },

    #[error("{0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
