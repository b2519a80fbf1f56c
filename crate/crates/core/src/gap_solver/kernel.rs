use rayon::prelude::*;

use super::grid::MomentumGrid;
use crate::potential::RadialPotential;

/// Dense `k(p_i, p_j)` on a grid, row-major, shared by the gap and `T_c`
/// solvers.
#[derive(Debug, Clone)]
pub struct KernelMatrix {
    n: usize,
    data: Vec<f64>,
}

impl KernelMatrix {
    pub fn assemble(v: &RadialPotential, grid: &MomentumGrid) -> Self {
        let n = grid.len();
        let mut data = vec![0.0; n * n];
        data.par_chunks_mut(n).enumerate().for_each(|(i, row)| {
            let p = grid.p[i];
            for (j, out) in row.iter_mut().enumerate() {
                *out = v.angular_kernel_unchecked(p, grid.p[j]);
            }
        });
        Self { n, data }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }
}
