//! Globally adaptive Gauss–Kronrod (7/15) integration.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use super::gauss::{GK15_GAUSS_WEIGHTS, GK15_KRONROD_WEIGHTS, GK15_NODES};
use crate::error::{Error, Result};

/// Controls for [`adaptive_integrate_with`].
#[derive(Debug, Clone)]
pub struct AdaptiveOptions {
    /// Absolute tolerance on the summed error estimate.
    pub tol: f64,
    /// Points where the integrand may be singular. Subintervals touching a
    /// hint are integrated in the variable `u = sqrt(|x - hint|)`.
    pub hints: Vec<f64>,
    pub max_depth: usize,
    pub max_intervals: usize,
}

impl AdaptiveOptions {
    pub fn new(tol: f64) -> Self {
        Self {
            tol,
            hints: Vec::new(),
            max_depth: 80,
            max_intervals: 20_000,
        }
    }

    pub fn with_hints(mut self, hints: &[f64]) -> Self {
        self.hints = hints.to_vec();
        self
    }
}

#[derive(Debug)]
struct Interval {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
    depth: usize,
    singular_a: bool,
    singular_b: bool,
}

impl PartialEq for Interval {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Interval {}
impl PartialOrd for Interval {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Interval {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn gk15<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> Result<(f64, f64)> {
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    let mut kronrod = 0.0;
    let mut gauss = 0.0;
    for (i, (&x, &wk)) in GK15_NODES.iter().zip(&GK15_KRONROD_WEIGHTS).enumerate() {
        let pts: &[f64] = if x == 0.0 { &[0.0] } else { &[-1.0, 1.0] };
        for &s in pts {
            let t = mid + s * half * x;
            let v = f(t);
            if !v.is_finite() {
                return Err(Error::NonFinite { node: t, value: v });
            }
            kronrod += wk * v;
            if i % 2 == 1 {
                gauss += GK15_GAUSS_WEIGHTS[i / 2] * v;
            }
        }
    }
    Ok((kronrod * half, ((kronrod - gauss) * half).abs()))
}

/// GK15 on `[a, b]`, with the substitution `x = end ± (b - a) u²` when one
/// end is a declared singular point. That turns `|x - c|^{-1/2}` into a
/// smooth integrand.
fn gk15_mapped<F: FnMut(f64) -> f64>(
    f: &mut F,
    a: f64,
    b: f64,
    singular_a: bool,
    singular_b: bool,
) -> Result<(f64, f64)> {
    let len = b - a;
    match (singular_a, singular_b) {
        (true, false) => {
            let mut g = |u: f64| {
                let v = f(a + len * u * u);
                v * 2.0 * len * u
            };
            gk15(&mut g, 0.0, 1.0).map_err(|e| remap_err(e, |u| a + len * u * u))
        }
        (false, true) => {
            let mut g = |u: f64| {
                let v = f(b - len * u * u);
                v * 2.0 * len * u
            };
            gk15(&mut g, 0.0, 1.0).map_err(|e| remap_err(e, |u| b - len * u * u))
        }
        _ => gk15(f, a, b),
    }
}

fn remap_err(e: Error, to_x: impl Fn(f64) -> f64) -> Error {
    match e {
        Error::NonFinite { node, value } => Error::NonFinite {
            node: to_x(node),
            value,
        },
        other => other,
    }
}

/// Integrate `f` over `[a, b]` (`b` may be `+∞`) to absolute tolerance `tol`.
pub fn adaptive_integrate<F: FnMut(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> Result<f64> {
    adaptive_integrate_with(f, a, b, &AdaptiveOptions::new(tol))
}

pub fn adaptive_integrate_with<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, opts: &AdaptiveOptions) -> Result<f64> {
    if !(a < b) || a.is_nan() {
        return Err(Error::Domain {
            what: "adaptive_integrate requires a < b",
            value: b - a,
        });
    }
    if !(opts.tol > 0.0) {
        return Err(Error::Domain {
            what: "adaptive_integrate requires tol > 0",
            value: opts.tol,
        });
    }
    if b.is_infinite() {
        // r = a + t/(1-t), t in [0, 1)
        let hints: Vec<f64> = opts
            .hints
            .iter()
            .filter(|&&h| h >= a && h.is_finite())
            .map(|&h| (h - a) / (1.0 + h - a))
            .collect();
        let mapped = AdaptiveOptions { hints, ..opts.clone() };
        let g = move |t: f64| {
            let om = 1.0 - t;
            if om <= 0.0 {
                return 0.0;
            }
            f(a + t / om) / (om * om)
        };
        return run(g, 0.0, 1.0, &mapped);
    }
    run(f, a, b, opts)
}

fn run<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, opts: &AdaptiveOptions) -> Result<f64> {
    let is_hint = |x: f64| opts.hints.iter().any(|&h| (h - x).abs() <= 1e-15 * (1.0 + x.abs()));
    let mut breaks = vec![a];
    let mut interior: Vec<f64> = opts.hints.iter().copied().filter(|&h| h > a && h < b).collect();
    interior.sort_by(f64::total_cmp);
    interior.dedup();
    breaks.extend(interior);
    breaks.push(b);

    let mut heap = BinaryHeap::new();
    let mut total_err = 0.0;
    let mut pieces = Vec::new();
    for w in breaks.windows(2) {
        let (sa, sb) = (is_hint(w[0]), is_hint(w[1]));
        if sa && sb {
            let m = 0.5 * (w[0] + w[1]);
            pieces.push((w[0], m, true, false));
            pieces.push((m, w[1], false, true));
        } else {
            pieces.push((w[0], w[1], sa, sb));
        }
    }
    for (a, b, singular_a, singular_b) in pieces {
        let (value, error) = gk15_mapped(&mut f, a, b, singular_a, singular_b)?;
        total_err += error;
        heap.push(Interval {
            a,
            b,
            value,
            error,
            depth: 0,
            singular_a,
            singular_b,
        });
    }

    while total_err > opts.tol {
        let worst = heap.pop().expect("heap is never empty");
        if worst.depth >= opts.max_depth || heap.len() + 2 > opts.max_intervals {
            return Err(Error::QuadratureNoConvergence {
                a: worst.a,
                b: worst.b,
                estimate: worst.error,
            });
        }
        let split = 0.5 * (worst.a + worst.b);
        if !(split > worst.a && split < worst.b) {
            return Err(Error::QuadratureNoConvergence {
                a: worst.a,
                b: worst.b,
                estimate: worst.error,
            });
        }
        let (lv, le) = gk15_mapped(&mut f, worst.a, split, worst.singular_a, false)?;
        let (rv, re) = gk15_mapped(&mut f, split, worst.b, false, worst.singular_b)?;
        total_err += le + re - worst.error;
        heap.push(Interval {
            a: worst.a,
            b: split,
            value: lv,
            error: le,
            depth: worst.depth + 1,
            singular_a: worst.singular_a,
            singular_b: false,
        });
        heap.push(Interval {
            a: split,
            b: worst.b,
            value: rv,
            error: re,
            depth: worst.depth + 1,
            singular_a: false,
            singular_b: worst.singular_b,
        });
    }
    // Sum in interval order so the result does not depend on heap layout.
    let mut parts: Vec<Interval> = heap.into_vec();
    parts.sort_by(|x, y| x.a.total_cmp(&y.a));
    Ok(parts.iter().map(|p| p.value).sum())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_sqrt_with_hint() {
        let opts = AdaptiveOptions::new(1e-9).with_hints(&[0.0]);
        let v = adaptive_integrate_with(|x| 1.0 / x.sqrt(), 0.0, 1.0, &opts).unwrap();
        assert!((v - 2.0).abs() < 1e-9, "{v}");
    }

    #[test]
    fn zero_integrand() {
        assert_eq!(adaptive_integrate(|_| 0.0, 0.0, 1.0, 1e-12).unwrap(), 0.0);
    }

    #[test]
    fn mapped_gaussian_moment() {
        let v = adaptive_integrate(|r| r * r * (-r * r / 2.0).exp(), 0.0, f64::INFINITY, 1e-11).unwrap();
        let exact = (std::f64::consts::PI / 2.0).sqrt();
        assert!((v - exact).abs() < 1e-9, "{v} vs {exact}");
    }

    #[test]
    fn interior_singularities_at_hints() {
        for c in [0.13, 0.5, 0.91] {
            let opts = AdaptiveOptions::new(1e-9).with_hints(&[c]);
            let v = adaptive_integrate_with(|x: f64| 1.0 / (x - c).abs().sqrt(), 0.0, 1.0, &opts).unwrap();
            let exact = 2.0 * c.sqrt() + 2.0 * (1.0 - c).sqrt();
            assert!((v - exact).abs() < 1e-8, "c = {c}: {v} vs {exact}");
        }
    }

    #[test]
    fn reports_worst_subinterval() {
        let mut opts = AdaptiveOptions::new(1e-12);
        opts.max_depth = 3;
        let err = adaptive_integrate_with(|x: f64| (1.0 / x).sin(), 1e-6, 1.0, &opts).unwrap_err();
        assert!(matches!(err, Error::QuadratureNoConvergence { .. }));
    }

    #[test]
    fn bad_interval() {
        assert!(adaptive_integrate(|x| x, 1.0, 0.0, 1e-8).is_err());
    }
}
