use faer::{Mat, Side};
use num_complex::Complex64;

use super::matrix::{ComplexMatrix, HERMITIAN_TOL};
use crate::error::{Error, Result};

/// Spectral decomposition `A = U diag(values) U^dagger` of a Hermitian matrix.
///
/// `values` are ascending and column `k` of `vectors` pairs with `values[k]`.
#[derive(Clone, Debug)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    pub vectors: ComplexMatrix,
}

/// Diagonalizes a Hermitian matrix.
///
/// The input is symmetrized to its exact Hermitian part before the
/// decomposition so that sub-tolerance asymmetry cannot leak into the result.
pub fn eig_hermitian(a: &ComplexMatrix) -> Result<HermitianEigen> {
    a.ensure_hermitian(HERMITIAN_TOL)?;
    let h = a.hermitian_part();
    let dim = h.dim();
    let decomposition = h
        .0
        .self_adjoint_eigen(Side::Lower)
        .map_err(|e| Error::Consistency(format!("Hermitian eigensolver failed: {e:?}")))?;
    let raw: Vec<f64> = decomposition.S().column_vector().iter().map(|z| z.re).collect();
    let u = decomposition.U();

    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&i, &j| raw[i].total_cmp(&raw[j]).then(i.cmp(&j)));
    let values = order.iter().map(|&k| raw[k]).collect();
    let vectors = Mat::from_fn(dim, dim, |i, j| u[(i, order[j])]);
    Ok(HermitianEigen {
        values,
        vectors: ComplexMatrix(vectors),
    })
}

impl HermitianEigen {
    pub fn dim(&self) -> usize {
        self.values.len()
    }

    /// `U diag(f(values)) U^dagger`.
    pub fn map_spectrum(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let weights: Vec<f64> = self.values.iter().map(|&v| f(v)).collect();
        self.from_diagonal(&weights)
    }

    /// `U diag(weights) U^dagger`.
    pub fn from_diagonal(&self, weights: &[f64]) -> ComplexMatrix {
        let u = &self.vectors.0;
        let scaled = Mat::from_fn(u.nrows(), u.ncols(), |i, j| u[(i, j)] * weights[j]);
        ComplexMatrix(scaled * u.adjoint())
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        self.from_diagonal(&self.values)
    }

    /// `U^dagger M U`: `M` expressed in the eigenbasis.
    pub fn to_eigenbasis(&self, m: &ComplexMatrix) -> ComplexMatrix {
        let u = &self.vectors.0;
        ComplexMatrix(u.adjoint() * &m.0 * u)
    }

    /// `U^dagger Y`; with `Y = M U` this is [`Self::to_eigenbasis`] of `M`.
    pub fn project(&self, y: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(self.vectors.0.adjoint() * &y.0)
    }

    /// `U M U^dagger`: inverse of [`Self::to_eigenbasis`].
    pub fn from_eigenbasis(&self, m: &ComplexMatrix) -> ComplexMatrix {
        let u = &self.vectors.0;
        ComplexMatrix(u * &m.0 * u.adjoint())
    }

    pub fn vector(&self, k: usize) -> Vec<Complex64> {
        self.vectors.column(k)
    }
}
