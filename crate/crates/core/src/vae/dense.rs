use rand::Rng as _;

use crate::rng::Rng;

/// Fully connected layer, row-major `rows × cols` weights (`out = W·x + b`).
#[derive(Debug, Clone, PartialEq)]
pub struct Dense {
    pub(crate) rows: usize,
    pub(crate) cols: usize,
    pub(crate) weights: Vec<f64>,
    pub(crate) bias: Vec<f64>,
}

impl Dense {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Dense {
            rows,
            cols,
            weights: vec![0.0; rows * cols],
            bias: vec![0.0; rows],
        }
    }

    /// Glorot-uniform weights, zero bias.
    pub fn glorot(rows: usize, cols: usize, rng: &mut Rng) -> Self {
        let limit = (6.0 / (rows + cols) as f64).sqrt();
        Dense {
            rows,
            cols,
            weights: (0..rows * cols).map(|_| rng.random_range(-limit..limit)).collect(),
            bias: vec![0.0; rows],
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn bias(&self) -> &[f64] {
        &self.bias
    }

    pub(crate) fn forward(&self, x: &[f64], out: &mut [f64]) {
        debug_assert_eq!(x.len(), self.cols);
        debug_assert_eq!(out.len(), self.rows);
        for (r, o) in out.iter_mut().enumerate() {
            let row = &self.weights[r * self.cols..(r + 1) * self.cols];
            *o = self.bias[r] + dot(row, x);
        }
    }

    /// `grad.W += δ ⊗ input`, `grad.b += δ`.
    pub(crate) fn accumulate(&self, grad: &mut Dense, input: &[f64], delta: &[f64]) {
        for (r, &d) in delta.iter().enumerate() {
            grad.bias[r] += d;
            if d != 0.0 {
                let row = &mut grad.weights[r * self.cols..(r + 1) * self.cols];
                for (g, &xi) in row.iter_mut().zip(input) {
                    *g += d * xi;
                }
            }
        }
    }

    /// `out = Wᵀ·δ`.
    pub(crate) fn backprop(&self, delta: &[f64], out: &mut [f64]) {
        out.iter_mut().for_each(|v| *v = 0.0);
        for (r, &d) in delta.iter().enumerate() {
            if d != 0.0 {
                let row = &self.weights[r * self.cols..(r + 1) * self.cols];
                for (o, &w) in out.iter_mut().zip(row) {
                    *o += d * w;
                }
            }
        }
    }

    /// Batched `forward`: `x` is `n × cols`, `out` is `n × rows`, both row-major.
    pub(crate) fn forward_batch(&self, x: &[f64], n: usize, out: &mut [f64]) {
        assert!(x.len() == n * self.cols && out.len() == n * self.rows);
        for row in out.chunks_exact_mut(self.rows) {
            row.copy_from_slice(&self.bias);
        }
        // SAFETY: the asserted lengths cover every index dgemm touches with these strides.
        unsafe {
            matrixmultiply::dgemm(
                n,
                self.cols,
                self.rows,
                1.0,
                x.as_ptr(),
                self.cols as isize,
                1,
                self.weights.as_ptr(),
                1,
                self.cols as isize,
                1.0,
                out.as_mut_ptr(),
                self.rows as isize,
                1,
            );
        }
    }

    /// Batched `accumulate`: `grad.W += δᵀ·input` summed over the batch.
    pub(crate) fn accumulate_batch(&self, grad: &mut Dense, input: &[f64], delta: &[f64], n: usize) {
        assert!(input.len() == n * self.cols && delta.len() == n * self.rows);
        assert!(grad.weights.len() == self.weights.len() && grad.bias.len() == self.rows);
        for d in delta.chunks_exact(self.rows) {
            for (g, v) in grad.bias.iter_mut().zip(d) {
                *g += v;
            }
        }
        // SAFETY: as in forward_batch.
        unsafe {
            matrixmultiply::dgemm(
                self.rows,
                n,
                self.cols,
                1.0,
                delta.as_ptr(),
                1,
                self.rows as isize,
                input.as_ptr(),
                self.cols as isize,
                1,
                1.0,
                grad.weights.as_mut_ptr(),
                self.cols as isize,
                1,
            );
        }
    }

    /// Batched `backprop`: `out = δ·W`, `n × cols`.
    pub(crate) fn backprop_batch(&self, delta: &[f64], n: usize, out: &mut [f64]) {
        assert!(delta.len() == n * self.rows && out.len() == n * self.cols);
        // SAFETY: as in forward_batch.
        unsafe {
            matrixmultiply::dgemm(
                n,
                self.rows,
                self.cols,
                1.0,
                delta.as_ptr(),
                self.rows as isize,
                1,
                self.weights.as_ptr(),
                self.cols as isize,
                1,
                0.0,
                out.as_mut_ptr(),
                self.cols as isize,
                1,
            );
        }
    }

    pub(crate) fn is_finite(&self) -> bool {
        self.weights.iter().chain(&self.bias).all(|v| v.is_finite())
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}
