//! Zero-temperature BCS gap equation, critical temperature and the
//! Fermi-surface spectral quantities that control both in the high-density
//! limit, for radial interaction potentials.
//!
//! Units are `ħ = 2m = 1`: the dispersion is `p² − μ`.

pub mod acceptance;
pub mod asymptotics;
pub mod error;
pub mod fermi_ops;
pub mod gap_solver;
pub mod numerics;
pub mod potential;
pub mod sweep;
pub mod tc_solver;

pub use error::{Error, Result};
