//! Fixed composite quadrature rules.

use super::gauss::gauss_legendre;
use crate::error::{Error, Result};

/// Region a [`QuadratureRule`] integrates over.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Domain {
    Finite {
        a: f64,
        b: f64,
    },
    /// `[a, ∞)` reached through `r = a + scale · t / (1 - t)`.
    SemiInfinite {
        a: f64,
        scale: f64,
    },
}

/// Nodes and positive weights; integration is the weighted sum.
#[derive(Debug, Clone)]
pub struct QuadratureRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    domain: Domain,
}

pub const DEFAULT_MAPPED_PANELS: usize = 8;
pub const DEFAULT_MAPPED_NODES: usize = 64;

impl QuadratureRule {
    /// Single Gauss–Legendre panel on `[a, b]`.
    pub fn gauss_legendre(n: usize, a: f64, b: f64) -> Self {
        Self::composite(&[a, b], n)
    }

    /// Gauss–Legendre with `n` nodes on every panel `[breaks[i], breaks[i+1]]`.
    pub fn composite(breaks: &[f64], n: usize) -> Self {
        assert!(breaks.len() >= 2, "need at least one panel");
        let mut nodes = Vec::with_capacity(n * (breaks.len() - 1));
        let mut weights = Vec::with_capacity(nodes.capacity());
        for w in breaks.windows(2) {
            push_panel(&mut nodes, &mut weights, w[0], w[1], n);
        }
        Self {
            nodes,
            weights,
            domain: Domain::Finite {
                a: breaks[0],
                b: breaks[breaks.len() - 1],
            },
        }
    }

    /// `[a, b]` split into `panels` equal pieces.
    pub fn uniform_composite(a: f64, b: f64, panels: usize, n: usize) -> Self {
        let breaks: Vec<f64> = (0..=panels).map(|i| a + (b - a) * i as f64 / panels as f64).collect();
        Self::composite(&breaks, n)
    }

    /// `[a, ∞)` with the map `r = a + scale·t/(1-t)` and Gauss–Legendre panels in `t`.
    pub fn semi_infinite(a: f64, scale: f64, panels: usize, n: usize) -> Self {
        let t_rule = Self::uniform_composite(0.0, 1.0, panels, n);
        let mut nodes = Vec::with_capacity(t_rule.len());
        let mut weights = Vec::with_capacity(t_rule.len());
        for (&t, &w) in t_rule.nodes.iter().zip(&t_rule.weights) {
            let one_minus = 1.0 - t;
            nodes.push(a + scale * t / one_minus);
            weights.push(w * scale / (one_minus * one_minus));
        }
        Self {
            nodes,
            weights,
            domain: Domain::SemiInfinite { a, scale },
        }
    }

    /// Default mapped rule: 8 panels of 64 nodes.
    pub fn semi_infinite_default(a: f64, scale: f64) -> Self {
        Self::semi_infinite(a, scale, DEFAULT_MAPPED_PANELS, DEFAULT_MAPPED_NODES)
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Concatenate rules over adjacent domains.
    pub fn chain(mut self, other: &QuadratureRule) -> Self {
        self.nodes.extend_from_slice(&other.nodes);
        self.weights.extend_from_slice(&other.weights);
        let a = match self.domain {
            Domain::Finite { a, .. } | Domain::SemiInfinite { a, .. } => a,
        };
        self.domain = match other.domain {
            Domain::Finite { b, .. } => Domain::Finite { a, b },
            Domain::SemiInfinite { scale, .. } => Domain::SemiInfinite { a, scale },
        };
        self
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.nodes.iter().copied().zip(self.weights.iter().copied())
    }
}

pub(crate) fn push_panel(nodes: &mut Vec<f64>, weights: &mut Vec<f64>, a: f64, b: f64, n: usize) {
    let (x, w) = gauss_legendre(n);
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    for (xi, wi) in x.iter().zip(w) {
        nodes.push(mid + half * xi);
        weights.push(half * wi);
    }
}

/// Weighted sum of `f` over the rule. Summation order is the node order, so
/// the result is reproducible bit for bit.
pub fn integrate<F: FnMut(f64) -> f64>(mut f: F, rule: &QuadratureRule) -> Result<f64> {
    let mut sum = 0.0;
    for (x, w) in rule.iter() {
        let v = f(x);
        if !v.is_finite() {
            return Err(Error::NonFinite { node: x, value: v });
        }
        sum += w * v;
    }
    Ok(sum)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_on_interval() {
        let rule = QuadratureRule::gauss_legendre(16, 0.0, 2.0);
        let v = integrate(|_| 1.0, &rule).unwrap();
        assert!((v - 2.0).abs() <= 2e-12 * 2.0);
    }

    #[test]
    fn polynomial_exactness() {
        let rule = QuadratureRule::gauss_legendre(4, 0.0, 1.0);
        let v = integrate(|x| x * x, &rule).unwrap();
        assert!((v - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn mapped_exponential() {
        let rule = QuadratureRule::semi_infinite_default(0.0, 1.0);
        let v = integrate(|x| (-x).exp(), &rule).unwrap();
        assert!((v - 1.0).abs() < 1e-10, "{v}");
    }

    #[test]
    fn non_finite_names_node() {
        let rule = QuadratureRule::gauss_legendre(3, -1.0, 1.0);
        let err = integrate(|x| if x == 0.0 { f64::NAN } else { 1.0 }, &rule).unwrap_err();
        match err {
            Error::NonFinite { node, .. } => assert_eq!(node, 0.0),
            other => panic!("unexpected {other}"),
        }
    }

    #[test]
    fn nodes_increasing_weights_positive() {
        let rule =
            QuadratureRule::uniform_composite(-3.0, 5.0, 7, 9).chain(&QuadratureRule::semi_infinite_default(5.0, 2.0));
        assert!(rule.nodes().windows(2).all(|w| w[0] < w[1]));
        assert!(rule.weights().iter().all(|&w| w > 0.0));
    }
}
