//! Anderson mixing for fixed-point problems `x = F(x)`.

use std::collections::VecDeque;

use nalgebra::{DMatrix, DVector};

/// Type-II Anderson acceleration with depth `m` and mixing `beta`.
#[derive(Debug)]
pub(crate) struct Anderson {
    depth: usize,
    beta: f64,
    prev: Option<(Vec<f64>, Vec<f64>)>,
    dx: VecDeque<Vec<f64>>,
    df: VecDeque<Vec<f64>>,
}

impl Anderson {
    pub(crate) fn new(depth: usize, beta: f64) -> Self {
        Self {
            depth,
            beta,
            prev: None,
            dx: VecDeque::new(),
            df: VecDeque::new(),
        }
    }

    pub(crate) fn reset(&mut self) {
        self.prev = None;
        self.dx.clear();
        self.df.clear();
    }

    /// Next iterate from the current `x` and residual `f = F(x) − x`.
    pub(crate) fn step(&mut self, x: &[f64], f: &[f64]) -> Vec<f64> {
        if let Some((px, pf)) = self.prev.take() {
            self.dx.push_back(x.iter().zip(&px).map(|(a, b)| a - b).collect());
            self.df.push_back(f.iter().zip(&pf).map(|(a, b)| a - b).collect());
            if self.dx.len() > self.depth {
                self.dx.pop_front();
                self.df.pop_front();
            }
        }
        self.prev = Some((x.to_vec(), f.to_vec()));

        let mut next: Vec<f64> = x.iter().zip(f).map(|(a, b)| a + self.beta * b).collect();
        let m = self.df.len();
        if m == 0 || self.depth == 0 {
            return next;
        }
        // Least squares min ‖f − ΔF γ‖ via regularised normal equations.
        let a = DMatrix::from_fn(m, m, |i, j| dot(&self.df[i], &self.df[j]));
        let rhs = DVector::from_fn(m, |i, _| dot(&self.df[i], f));
        let a = &a + DMatrix::identity(m, m) * (1e-12 * a.trace().max(1e-300));
        let Some(gamma) = a.lu().solve(&rhs).filter(|g| g.iter().all(|v| v.is_finite())) else {
            self.reset();
            return next;
        };
        for (k, g) in gamma.iter().enumerate() {
            for ((out, dx), df) in next.iter_mut().zip(&self.dx[k]).zip(&self.df[k]) {
                *out -= g * (dx + self.beta * df);
            }
        }
        next
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn accelerates_slow_linear_map() {
        // x = A x + c with spectral radius 0.99: plain iteration is slow.
        let target = [1.0, -2.0, 0.5];
        let map = |x: &[f64]| -> Vec<f64> {
            let a = [[0.99, 0.0, 0.0], [0.0, 0.5, 0.1], [0.0, 0.1, 0.3]];
            (0..3)
                .map(|i| target[i] + (0..3).map(|j| a[i][j] * (x[j] - target[j])).sum::<f64>())
                .collect()
        };
        let mut acc = Anderson::new(5, 0.5);
        let mut x = vec![0.0; 3];
        for _ in 0..40 {
            let fx = map(&x);
            let f: Vec<f64> = fx.iter().zip(&x).map(|(a, b)| a - b).collect();
            x = acc.step(&x, &f);
        }
        for (a, b) in x.iter().zip(target) {
            assert!((a - b).abs() < 1e-10);
        }
    }
}
