//! Comparison of reconstructed and true Hamiltonians, and recovery of the
//! eigenvalue and eigenstate from a solution.
//!
//! The objective is even in `x` and `x` carries an arbitrary positive scale,
//! so a solution determines `c` only up to a nonzero real factor. Reports
//! therefore carry both the signed fidelity and its absolute value.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{eig_hermitian, inner, HermitianOperator};
use crate::objective::Objective;
use crate::operators::{assemble, level_gap, target_eigenpair, MeasurementRecord, OperatorBasis};
use crate::optimizer::SolveResult;

/// Ground-space gap of `K^2` below which the recovered state is flagged.
pub const STATE_GAP_TOL: f64 = 1e-8;

/// `tr(H1 H2) / sqrt(tr H1^2 tr H2^2)`.
pub fn hamiltonian_fidelity(h1: &HermitianOperator, h2: &HermitianOperator) -> Result<f64> {
    h1.ensure_same_dim(h2)?;
    let n1 = h1.frobenius_norm();
    let n2 = h2.frobenius_norm();
    if n1 == 0.0 || n2 == 0.0 {
        return Err(Error::ZeroOperator);
    }
    // for Hermitian arguments tr(H1 H2) is the real Frobenius inner product
    let overlap = h1.trace_product(h2).re;
    Ok((overlap / (n1 * n2)).clamp(-1.0, 1.0))
}

/// Eigenvalue `sum_i xhat_i a_i` of the unit-norm Hamiltonian `sum_i xhat_i A_i`, `xhat = x / |x|`.
pub fn recover_eigenvalue(x: &[f64], a: &[f64]) -> Result<f64> {
    if x.len() != a.len() {
        return Err(Error::LengthMismatch {
            expected: a.len(),
            got: x.len(),
        });
    }
    let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    if norm == 0.0 {
        return Err(Error::ZeroVector);
    }
    Ok(x.iter().zip(a).map(|(xi, ai)| xi * ai).sum::<f64>() / norm)
}

#[derive(Clone, Debug, PartialEq)]
pub struct RecoveredState {
    pub state: Vec<Complex64>,
    /// Eigenvalue of `K^2` belonging to `state`.
    pub energy: f64,
    /// Set when the ground level of `K^2` is not separated by at least [`STATE_GAP_TOL`].
    pub degeneracy_gap: Option<f64>,
}

/// Lowest eigenvector of `K(x)^2`, phased so the first nonzero component is real and positive.
pub fn recover_eigenstate(basis: &OperatorBasis, x: &[f64], a: &[f64]) -> Result<RecoveredState> {
    if x.iter().all(|&v| v == 0.0) {
        return Err(Error::ZeroVector);
    }
    let objective = Objective::new(basis, a)?;
    let k = objective.shifted_hamiltonian(x)?;
    let eig = eig_hermitian(&k)?;
    let energies: Vec<f64> = eig.values.iter().map(|h| h * h).collect();
    let ground = (0..energies.len())
        .min_by(|&i, &j| energies[i].total_cmp(&energies[j]))
        .expect("dimension >= 1");
    let mut sorted = energies.clone();
    sorted.sort_by(f64::total_cmp);
    let gap = level_gap(&sorted, 0);

    let mut state = eig.vector(ground);
    let largest = state.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if let Some(pivot) = state.iter().find(|z| z.norm() > 1e-8 * largest).copied() {
        let phase = pivot.conj() / pivot.norm();
        for z in &mut state {
            *z *= phase;
        }
    }
    Ok(RecoveredState {
        state,
        energy: energies[ground],
        degeneracy_gap: (gap < STATE_GAP_TOL).then_some(gap),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReconstructionReport {
    pub fidelity: f64,
    pub abs_fidelity: f64,
    pub lambda_hat: f64,
    pub state_overlap: Option<f64>,
}

/// Compares a solution against the ground truth stored in `record`.
pub fn report(basis: &OperatorBasis, solve: &SolveResult, record: &MeasurementRecord) -> Result<ReconstructionReport> {
    let truth = record.truth.as_ref().ok_or(Error::MissingTruth)?;
    let h_true = assemble(basis, &truth.c_true)?;
    let h_hat = assemble(basis, &solve.x_opt)?;
    let fidelity = hamiltonian_fidelity(&h_hat, &h_true)?;
    let lambda_hat = recover_eigenvalue(&solve.x_opt, &record.a)?;
    let (_, psi_true) = target_eigenpair(basis, &truth.c_true, truth.eigen_index)?;
    let recovered = recover_eigenstate(basis, &solve.x_opt, &record.a)?;
    let overlap = inner(&recovered.state, &psi_true).norm_sqr().min(1.0);
    Ok(ReconstructionReport {
        fidelity,
        abs_fidelity: fidelity.abs(),
        lambda_hat,
        state_overlap: Some(overlap),
    })
}
