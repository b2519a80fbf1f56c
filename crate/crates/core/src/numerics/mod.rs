//! Special functions, quadrature and interpolation primitives.

mod adaptive;
mod bessel;
mod gauss;
mod interp;
mod oscillatory;
mod quadrature;

pub use adaptive::{adaptive_integrate, adaptive_integrate_with, AdaptiveOptions};
pub use bessel::{spherical_bessel, spherical_bessel_array, spherical_bessel_miller, spherical_bessel_upward, MAX_ELL};
pub use gauss::gauss_legendre;
pub use interp::Interpolant1D;
pub use oscillatory::{alternating_tail, gauss_panel};
pub use quadrature::{integrate, Domain, QuadratureRule};

/// Euler–Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Breakpoints `a = x_0 < … < x_n = b` such that every panel spans at most
/// `period / 2` (one oscillation of `sin²`), with the first `graded` levels
/// refined geometrically toward `a` for weak endpoint singularities.
pub fn oscillatory_breaks(a: f64, b: f64, period: f64, graded: usize) -> Vec<f64> {
    let width = 0.5 * period;
    let panels = ((b - a) / width).ceil().max(1.0) as usize;
    let mut breaks = Vec::with_capacity(panels + graded + 1);
    breaks.push(a);
    let first = a + (b - a) / panels as f64;
    for k in (1..=graded).rev() {
        breaks.push(a + (first - a) * 0.1f64.powi(k as i32));
    }
    for i in 1..=panels {
        breaks.push(a + (b - a) * i as f64 / panels as f64);
    }
    breaks
}
