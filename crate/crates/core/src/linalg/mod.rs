//! Dense complex matrix kernel.

mod eigen;
mod expm;
mod frechet;
mod matrix;
mod sparse;

pub use eigen::{eig_hermitian, HermitianEigen};
pub use expm::{exp_neg_hermitian, expm};
pub use frechet::{
    apply_divided_differences, exp_divided_difference, frechet_exp, frechet_exp_eigen,
    FrechetMethod, DEGENERACY_TOL,
};
pub use matrix::{inner, ComplexMatrix, HermitianOperator, HERMITIAN_TOL};
pub use sparse::SparseMatrix;

/// `E + E^dagger`. Squareness is guaranteed by [`ComplexMatrix`] construction.
pub fn hermitize(e: &ComplexMatrix) -> ComplexMatrix {
    e + &e.adjoint()
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    #[test]
    fn hermitize_examples() {
        let s = ComplexMatrix::from_real_rows(&[vec![1.0, 2.0], vec![2.0, -3.0]]).unwrap();
        assert_eq!(hermitize(&s), s.scale(2.0));
        let e = ComplexMatrix::from_real_rows(&[vec![0.0, 1.0], vec![0.0, 0.0]]).unwrap();
        let x = ComplexMatrix::from_real_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        assert_eq!(hermitize(&e), x);
        let c = ComplexMatrix::from_fn(8, |i, j| Complex64::new(i as f64 * 0.1, j as f64 - 2.0));
        assert!(hermitize(&c).hermitian_deviation() < 1e-14);
    }
}
