use faer::Mat;
use num_complex::Complex64;

use super::matrix::ComplexMatrix;

/// Coordinate-list copy of the nonzero entries of a square matrix.
///
/// Embedded few-body operators have a handful of nonzeros per row, so
/// multiplying them onto a dense matrix this way is much cheaper than a dense
/// product.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseMatrix {
    dim: usize,
    /// `(row, col, value)`, column-major order.
    entries: Vec<(usize, usize, Complex64)>,
}

impl SparseMatrix {
    pub fn from_dense(m: &ComplexMatrix) -> Self {
        let dim = m.dim();
        let mut entries = Vec::new();
        for j in 0..dim {
            for i in 0..dim {
                let z = m.get(i, j);
                if z != Complex64::new(0.0, 0.0) {
                    entries.push((i, j, z));
                }
            }
        }
        SparseMatrix { dim, entries }
    }

    /// Same as [`Self::from_dense`] but only when at most `max_fill` of the entries are nonzero.
    pub fn from_dense_if_sparse(m: &ComplexMatrix, max_fill: f64) -> Option<Self> {
        let s = Self::from_dense(m);
        (s.fill() <= max_fill).then_some(s)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, Complex64)> + '_ {
        self.entries.iter().copied()
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    /// Fraction of nonzero entries.
    pub fn fill(&self) -> f64 {
        self.entries.len() as f64 / (self.dim * self.dim) as f64
    }

    /// `self * b`.
    pub fn mul_dense(&self, b: &ComplexMatrix) -> ComplexMatrix {
        let d = self.dim;
        let b = b.as_inner();
        let mut out = Mat::<Complex64>::zeros(d, b.ncols());
        for col in 0..b.ncols() {
            for &(i, j, v) in &self.entries {
                out[(i, col)] += v * b[(j, col)];
            }
        }
        ComplexMatrix(out)
    }

    pub fn to_dense(&self) -> ComplexMatrix {
        let mut m = ComplexMatrix::zeros(self.dim);
        for &(i, j, v) in &self.entries {
            m.set(i, j, v);
        }
        m
    }
}
