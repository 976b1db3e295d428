//! Directional derivative of the matrix exponential, `D = d/dt exp(X + tE)`
//! at `t = 0`, for Hermitian `X`.
//!
//! Two routes are provided. The divided-difference route works in the
//! eigenbasis of `X`, where `D` is the Hadamard product of `U^dagger E U`
//! with the first divided differences of `exp` on the spectrum. The
//! augmented-block route exponentiates `[[X, E], [0, X]]` and reads `D` from
//! the upper-right block; it is slower and serves as a cross-check.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::eigen::{eig_hermitian, HermitianEigen};
use super::expm::expm;
use super::matrix::{ComplexMatrix, HERMITIAN_TOL};
use crate::error::Result;

/// Eigenvalue pairs closer than this use the midpoint limit of the divided difference.
pub const DEGENERACY_TOL: f64 = 1e-8;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FrechetMethod {
    #[default]
    DividedDifference,
    AugmentedBlock,
}

/// First divided difference of `exp` at `a` and `b`.
pub fn exp_divided_difference(a: f64, b: f64) -> f64 {
    let delta = a - b;
    if delta.abs() < DEGENERACY_TOL {
        return (0.5 * (a + b)).exp();
    }
    // e^{max} (1 - e^{-|delta|}) / |delta|, no cancellation in either factor
    let hi = a.max(b);
    let gap = delta.abs();
    hi.exp() * (-(-gap).exp_m1()) / gap
}

pub fn frechet_exp(
    x: &ComplexMatrix,
    e: &ComplexMatrix,
    method: FrechetMethod,
) -> Result<ComplexMatrix> {
    x.ensure_same_dim(e)?;
    x.ensure_hermitian(HERMITIAN_TOL)?;
    match method {
        FrechetMethod::DividedDifference => {
            let eig = eig_hermitian(x)?;
            Ok(frechet_exp_eigen(&eig, e))
        }
        FrechetMethod::AugmentedBlock => frechet_exp_augmented(x, e),
    }
}

/// Divided-difference route with a precomputed decomposition of `X`.
pub fn frechet_exp_eigen(eig: &HermitianEigen, e: &ComplexMatrix) -> ComplexMatrix {
    let rotated = eig.to_eigenbasis(e);
    let inner = apply_divided_differences(&eig.values, &rotated);
    eig.from_eigenbasis(&inner)
}

/// Hadamard product `Phi ∘ M` where `Phi[k][l]` is the divided difference of
/// `exp` at `values[k]`, `values[l]`. `M` is expressed in the eigenbasis.
pub fn apply_divided_differences(values: &[f64], m: &ComplexMatrix) -> ComplexMatrix {
    let d = values.len();
    ComplexMatrix::from_fn(d, |k, l| {
        m.get(k, l) * exp_divided_difference(values[k], values[l])
    })
}

fn frechet_exp_augmented(x: &ComplexMatrix, e: &ComplexMatrix) -> Result<ComplexMatrix> {
    let d = x.dim();
    let zero = Complex64::new(0.0, 0.0);
    let g = ComplexMatrix::from_fn(2 * d, |i, j| match (i < d, j < d) {
        (true, true) => x.get(i, j),
        (false, false) => x.get(i - d, j - d),
        (true, false) => e.get(i, j - d),
        (false, true) => zero,
    });
    let exp_g = expm(&g)?;
    // exp(G) applied to the stacked initial condition [0; I] yields the
    // right block column; its upper half is the derivative.
    let block = ComplexMatrix::from_fn(d, |i, j| exp_g.get(i, j + d));
    block.check_finite()?;
    Ok(block)
}
