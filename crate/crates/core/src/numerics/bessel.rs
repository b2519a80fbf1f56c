//! Spherical Bessel functions of the first kind, `j_ℓ(x)` for real `x ≥ 0`.
//!
//! `ℓ ≤ 2` use closed forms, small arguments use the power series, and
//! `ℓ ≥ 3` use the normalised downward (Miller) recurrence where `x < ℓ`.
//! Once `x` exceeds `ℓ` the upward recurrence is stable and much cheaper for
//! the large arguments that show up in oscillatory radial integrals.

use crate::error::{Error, Result};

pub const MAX_ELL: usize = 200;

const SERIES_CUTOFF: f64 = 1.0;
const RESCALE: f64 = 1e250;

fn check(ell: usize, x: f64) -> Result<()> {
    if ell > MAX_ELL {
        return Err(Error::Domain {
            what: "spherical Bessel order exceeds the supported range",
            value: ell as f64,
        });
    }
    if !(x >= 0.0) || !x.is_finite() {
        return Err(Error::Domain {
            what: "spherical Bessel argument must be finite and >= 0",
            value: x,
        });
    }
    Ok(())
}

/// `j_ℓ(x)`.
pub fn spherical_bessel(ell: usize, x: f64) -> Result<f64> {
    check(ell, x)?;
    Ok(eval_unchecked(ell, x))
}

fn eval_unchecked(ell: usize, x: f64) -> f64 {
    if x == 0.0 {
        return if ell == 0 { 1.0 } else { 0.0 };
    }
    if x <= SERIES_CUTOFF {
        return series(ell, x);
    }
    let (s, c) = x.sin_cos();
    match ell {
        0 => s / x,
        1 => (s / x - c) / x,
        2 => ((3.0 / (x * x) - 1.0) * s - 3.0 * c / x) / x,
        _ if x > ell as f64 => upward(ell, x, s, c),
        _ => miller(ell, x, s, c),
    }
}

/// All orders `0..=lmax` at one argument.
pub fn spherical_bessel_array(lmax: usize, x: f64) -> Result<Vec<f64>> {
    check(lmax, x)?;
    let mut out = vec![0.0; lmax + 1];
    if x == 0.0 {
        out[0] = 1.0;
        return Ok(out);
    }
    if x <= SERIES_CUTOFF {
        for (l, o) in out.iter_mut().enumerate() {
            *o = series(l, x);
        }
        return Ok(out);
    }
    let (s, c) = x.sin_cos();
    let j0 = s / x;
    let j1 = (j0 - c) / x;
    out[0] = j0;
    if lmax == 0 {
        return Ok(out);
    }
    out[1] = j1;
    if x > lmax as f64 {
        for l in 1..lmax {
            out[l + 1] = (2 * l + 1) as f64 / x * out[l] - out[l - 1];
        }
        return Ok(out);
    }
    let start = miller_start(lmax, x);
    let mut f_next = 0.0;
    let mut f = 1e-30;
    for n in (1..=start).rev() {
        let f_prev = (2 * n + 1) as f64 / x * f - f_next;
        f_next = f;
        f = f_prev;
        if n - 1 <= lmax {
            out[n - 1] = f;
        }
        if n <= lmax {
            out[n] = f_next;
        }
        if f.abs() > RESCALE {
            f /= RESCALE;
            f_next /= RESCALE;
            for o in out.iter_mut() {
                *o /= RESCALE;
            }
        }
    }
    let scale = if j0.abs() >= j1.abs() { j0 / out[0] } else { j1 / out[1] };
    for o in out.iter_mut() {
        *o *= scale;
    }
    Ok(out)
}

/// Three-term upward recurrence from `j_0`, `j_1`. Only stable for `x > ℓ`.
pub fn spherical_bessel_upward(ell: usize, x: f64) -> Result<f64> {
    check(ell, x)?;
    if x == 0.0 {
        return Ok(if ell == 0 { 1.0 } else { 0.0 });
    }
    let (s, c) = x.sin_cos();
    Ok(upward(ell, x, s, c))
}

fn upward(ell: usize, x: f64, s: f64, c: f64) -> f64 {
    let mut jm = s / x;
    if ell == 0 {
        return jm;
    }
    let mut j = (jm - c) / x;
    for l in 1..ell {
        let jp = (2 * l + 1) as f64 / x * j - jm;
        jm = j;
        j = jp;
    }
    j
}

/// Downward recurrence normalised against `j_0` or `j_1`.
pub fn spherical_bessel_miller(ell: usize, x: f64) -> Result<f64> {
    check(ell, x)?;
    if x == 0.0 {
        return Ok(if ell == 0 { 1.0 } else { 0.0 });
    }
    let (s, c) = x.sin_cos();
    Ok(miller(ell, x, s, c))
}

fn miller_start(ell: usize, x: f64) -> usize {
    let top = (ell as f64).max(x);
    ell.max(x.ceil() as usize) + 20 + (40.0 * top).sqrt().ceil() as usize
}

fn miller(ell: usize, x: f64, s: f64, c: f64) -> f64 {
    let start = miller_start(ell, x);
    let mut f_next = 0.0;
    let mut f = 1e-30;
    let mut at_ell = if start == ell { f } else { 0.0 };
    for n in (1..=start).rev() {
        let f_prev = (2 * n + 1) as f64 / x * f - f_next;
        f_next = f;
        f = f_prev;
        if n - 1 == ell {
            at_ell = f;
        }
        if f.abs() > RESCALE {
            f /= RESCALE;
            f_next /= RESCALE;
            at_ell /= RESCALE;
        }
    }
    // f now holds the unnormalised j_0, f_next the unnormalised j_1.
    let j0 = s / x;
    let j1 = (j0 - c) / x;
    if j0.abs() >= j1.abs() {
        at_ell * (j0 / f)
    } else {
        at_ell * (j1 / f_next)
    }
}

fn series(ell: usize, x: f64) -> f64 {
    let mut lead = 1.0;
    for i in 1..=ell {
        lead *= x / (2 * i + 1) as f64;
    }
    let y = -0.5 * x * x;
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 0..60 {
        term *= y / ((k + 1) as f64 * (2 * ell + 2 * k + 3) as f64);
        sum += term;
        if term.abs() <= 1e-17 * sum.abs() {
            break;
        }
    }
    lead * sum
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn trivial_values() {
        assert_eq!(spherical_bessel(0, 0.0).unwrap(), 1.0);
        assert_eq!(spherical_bessel(1, 0.0).unwrap(), 0.0);
        assert!(spherical_bessel(0, PI).unwrap().abs() < 1e-16);
    }

    #[test]
    fn domain_errors() {
        assert!(spherical_bessel(0, -1.0).is_err());
        assert!(spherical_bessel(MAX_ELL + 1, 1.0).is_err());
        assert!(spherical_bessel(3, f64::NAN).is_err());
    }

    #[test]
    fn array_matches_scalar() {
        for &x in &[0.3, 1.0, 2.7, 15.0, 59.5, 61.0, 140.0] {
            let arr = spherical_bessel_array(60, x).unwrap();
            for (l, a) in arr.iter().enumerate() {
                let s = spherical_bessel(l, x).unwrap();
                let tol = 1e-12 * s.abs().max(1e-300) + 1e-300;
                assert!((a - s).abs() <= tol.max(1e-15 * (1.0 / x)), "l={l} x={x}: {a} vs {s}");
            }
        }
    }
}
