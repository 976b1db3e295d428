//! Thermal-state reconstruction objective and its exact gradient.
//!
//! For an estimate `x` the shifted Hamiltonian is `K = sum_i x_i (A_i - a_i I)`
//! and the trial state is `rho = exp(-K^2) / tr exp(-K^2)`. The objective is
//!
//! ```text
//! f(x) = sum_i (tr(A_i rho) - a_i)^2 + tr(K^2 rho)
//! ```
//!
//! which vanishes exactly when the measured state is the zero-energy ground
//! state of `K^2`. The inverse temperature is folded into the scale of `x`.
//!
//! Two gradient routes are available. [`gradient`] walks the computational
//! graph node by node in the computational basis and fills a [`GraphEval`];
//! [`Objective::value_and_gradient`] performs the same forward propagation in
//! the eigenbasis of `K`, which is what the optimizer calls.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{
    eig_hermitian, exp_divided_difference, frechet_exp, frechet_exp_eigen,
    ComplexMatrix, FrechetMethod, HermitianEigen, HermitianOperator, SparseMatrix,
};
use crate::operators::OperatorBasis;

/// Largest tolerated imaginary residue of a trace of Hermitian quantities, relative to `max(1, |re|)`.
const IMAG_RESIDUE_TOL: f64 = 1e-8;

/// Terms with at most this fraction of nonzero entries are rotated through a sparse product.
const SPARSE_FILL: f64 = 0.25;

/// `B_i = A_i - a_i I`; also the derivative of `K` along `x_i`.
pub fn build_shifted_terms(basis: &OperatorBasis, a: &[f64]) -> Result<Vec<HermitianOperator>> {
    if a.len() != basis.len() {
        return Err(Error::LengthMismatch {
            expected: basis.len(),
            got: a.len(),
        });
    }
    let ident = ComplexMatrix::identity(basis.dim);
    Ok(basis
        .operators()
        .zip(a)
        .map(|(op, &ai)| op - &ident.scale(ai))
        .collect())
}

fn real_trace(value: Complex64, what: &str) -> Result<f64> {
    if value.im.abs() > IMAG_RESIDUE_TOL * value.re.abs().max(1.0) {
        return Err(Error::Consistency(format!(
            "{what} has imaginary residue {:e}",
            value.im
        )));
    }
    Ok(value.re)
}

fn ensure_finite(x: &[f64]) -> Result<()> {
    if x.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite)
    }
}

/// Values of every node of the computational graph at one point.
///
/// `v4` holds the shifted kernel `exp(-(v3 - shift I))` with
/// `shift = lambda_min(v3)`; the shift cancels in `v6` and every node after it.
#[derive(Clone, Debug, Serialize)]
pub struct GraphEval {
    pub x: Vec<f64>,
    pub v2: ComplexMatrix,
    pub v3: ComplexMatrix,
    pub shift: f64,
    pub v4: ComplexMatrix,
    pub v5: f64,
    pub v6: ComplexMatrix,
    pub v7: Vec<f64>,
    pub v8: f64,
    pub v9: f64,
    pub v10: f64,
    pub grad: Vec<f64>,
}

/// Spectral monitoring data for `K^2`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Diagnostics {
    /// Ascending eigenvalues of `K^2`.
    pub spectrum: Vec<f64>,
    /// Boltzmann weight of the lowest level.
    pub ground_prob: f64,
    pub gaps: Vec<f64>,
}

impl Diagnostics {
    /// First gap that is nonzero relative to the spectral scale.
    pub fn first_positive_gap(&self) -> Option<f64> {
        let scale = self.spectrum.last().copied().unwrap_or(0.0).abs().max(1.0);
        self.gaps.iter().copied().find(|&g| g > 1e-10 * scale)
    }
}

/// Objective value, gradient and ground-level weight at one point.
#[derive(Clone, Debug, PartialEq)]
pub struct Evaluation {
    pub f: f64,
    pub grad: Vec<f64>,
    pub ground_prob: f64,
}

/// Spectral data of `K(x)` shared by the value, gradient and diagnostics.
struct Spectrum {
    eig: HermitianEigen,
    /// Eigenvalues of `K^2` paired with the columns of `eig.vectors`.
    energies: Vec<f64>,
    shift: f64,
    /// `exp(-(E_k - shift))`.
    weights: Vec<f64>,
    partition: f64,
}

impl Spectrum {
    fn probabilities(&self) -> Vec<f64> {
        self.weights.iter().map(|w| w / self.partition).collect()
    }
}

/// Reconstruction objective for one basis and one measurement vector.
pub struct Objective<'a> {
    basis: &'a OperatorBasis,
    a: &'a [f64],
    shifted: Vec<HermitianOperator>,
    /// Sparse copies of the unshifted `A_i`, where that pays off.
    sparse: Vec<Option<SparseMatrix>>,
}

impl<'a> Objective<'a> {
    pub fn new(basis: &'a OperatorBasis, a: &'a [f64]) -> Result<Self> {
        let shifted = build_shifted_terms(basis, a)?;
        let sparse = basis
            .operators()
            .map(|op| SparseMatrix::from_dense_if_sparse(op, SPARSE_FILL))
            .collect();
        Ok(Objective {
            basis,
            a,
            shifted,
            sparse,
        })
    }

    /// `A_i U`, the product every eigenbasis quantity of term `i` is read from.
    fn times_vectors(&self, eig: &HermitianEigen, i: usize) -> ComplexMatrix {
        match &self.sparse[i] {
            Some(sp) => sp.mul_dense(&eig.vectors),
            None => &self.basis.terms[i].matrix * &eig.vectors,
        }
    }

    /// Diagonal of `U^dagger B_i U`.
    fn rotated_diagonal(&self, eig: &HermitianEigen, i: usize) -> Vec<Complex64> {
        let u = &eig.vectors;
        let d = u.dim();
        let mut diag = vec![Complex64::new(-self.a[i], 0.0); d];
        match &self.sparse[i] {
            Some(sp) => {
                for (r, c, v) in sp.entries() {
                    for (k, acc) in diag.iter_mut().enumerate() {
                        *acc += u.get(r, k).conj() * v * u.get(c, k);
                    }
                }
            }
            None => {
                let au = &self.basis.terms[i].matrix * u;
                for (k, acc) in diag.iter_mut().enumerate() {
                    *acc += (0..d).map(|r| u.get(r, k).conj() * au.get(r, k)).sum::<Complex64>();
                }
            }
        }
        diag
    }

    pub fn dim(&self) -> usize {
        self.basis.dim
    }

    pub fn num_terms(&self) -> usize {
        self.shifted.len()
    }

    pub fn shifted_terms(&self) -> &[HermitianOperator] {
        &self.shifted
    }

    fn check_point(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.shifted.len() {
            return Err(Error::LengthMismatch {
                expected: self.shifted.len(),
                got: x.len(),
            });
        }
        ensure_finite(x)
    }

    /// `K(x) = sum_i x_i B_i`.
    pub fn shifted_hamiltonian(&self, x: &[f64]) -> Result<ComplexMatrix> {
        self.check_point(x)?;
        let mut k = ComplexMatrix::zeros(self.dim());
        for (xi, b) in x.iter().zip(&self.shifted) {
            k.add_scaled(*xi, b);
        }
        Ok(k)
    }

    fn spectrum(&self, x: &[f64]) -> Result<Spectrum> {
        let k = self.shifted_hamiltonian(x)?;
        let eig = eig_hermitian(&k)?;
        let energies: Vec<f64> = eig.values.iter().map(|h| h * h).collect();
        let shift = energies.iter().copied().fold(f64::INFINITY, f64::min);
        let weights: Vec<f64> = energies.iter().map(|e| (-(e - shift)).exp()).collect();
        let partition = weights.iter().sum();
        Ok(Spectrum {
            eig,
            energies,
            shift,
            weights,
            partition,
        })
    }

    /// `rho(x) = exp(-K^2) / tr exp(-K^2)`, evaluated with a spectral shift.
    pub fn density_matrix(&self, x: &[f64]) -> Result<ComplexMatrix> {
        let s = self.spectrum(x)?;
        Ok(s.eig.from_diagonal(&s.probabilities()))
    }

    pub fn evaluate(&self, x: &[f64]) -> Result<f64> {
        let s = self.spectrum(x)?;
        let p = s.probabilities();
        let mut residual_sq = 0.0;
        for i in 0..self.num_terms() {
            let r = weighted_real_sum(&self.rotated_diagonal(&s.eig, i), &p)?;
            residual_sq += r * r;
        }
        let energy: f64 = p.iter().zip(&s.energies).map(|(pk, e)| pk * e).sum();
        Ok(residual_sq + energy)
    }

    /// Objective and exact gradient by forward propagation in the eigenbasis of `K`.
    pub fn value_and_gradient(&self, x: &[f64]) -> Result<Evaluation> {
        let s = self.spectrum(x)?;
        let d = self.dim();
        let m = self.num_terms();
        let p = s.probabilities();
        let h = &s.eig.values;
        let u = &s.eig.vectors;
        let products: Vec<ComplexMatrix> = (0..m).map(|i| self.times_vectors(&s.eig, i)).collect();
        // diagonals of B~_i = U^dagger A_i U - a_i I
        let diagonals: Vec<Vec<f64>> = products
            .iter()
            .zip(self.a)
            .map(|(y, ai)| {
                (0..d)
                    .map(|k| (0..d).map(|r| (u.get(r, k).conj() * y.get(r, k)).re).sum::<f64>() - ai)
                    .collect()
            })
            .collect();

        let residuals: Vec<f64> = diagonals
            .iter()
            .map(|diag| diag.iter().zip(&p).map(|(b, pk)| b * pk).sum())
            .collect();
        let energy: f64 = p.iter().zip(&s.energies).map(|(pk, e)| pk * e).sum();
        let f = residuals.iter().map(|r| r * r).sum::<f64>() + energy;

        // With dS = d(K^2) = B K + K B, in the eigenbasis of K dS_kl = B~_kl (h_k + h_l), and
        // d rho_kl = -dS_kl Phi_kl / Z - delta_kl w_k dZ / Z^2 with dZ = -sum_k w_k dS_kk,
        // where Phi holds divided differences of exp on the shifted spectrum of -K^2.
        // The residual term contributes tr(M d rho) with M = sum_j 2 r_j B~_j.
        let exponents: Vec<f64> = s.energies.iter().map(|e| -(e - s.shift)).collect();
        let z = s.partition;
        let mut combined = ComplexMatrix::zeros(d);
        let mut shift = 0.0;
        for ((y, r), ai) in products.iter().zip(&residuals).zip(self.a) {
            combined.add_scaled(2.0 * r, y);
            shift += 2.0 * r * ai;
        }
        let weighted = s.eig.project(&combined);
        let kernel = ComplexMatrix::from_fn(d, |k, l| {
            let phi = exp_divided_difference(exponents[k], exponents[l]);
            let m_kl = if k == l { weighted.get(k, k) - shift } else { weighted.get(k, l) };
            m_kl.conj() * ((h[k] + h[l]) * phi / z)
        });
        let norm_weight: f64 = (0..d)
            .map(|k| s.weights[k] * (weighted.get(k, k).re - shift + s.energies[k]))
            .sum();
        // sum_kl C_kl B~_kl = sum_al (A U)_al (conj(U) C)_al - a tr C
        let pulled = &u.conj() * &kernel;
        let kernel_trace = kernel.trace().re;

        let mut grad = vec![0.0; m];
        for (i, g) in grad.iter_mut().enumerate() {
            let y = &products[i];
            let mut off = -self.a[i] * kernel_trace;
            for l in 0..d {
                for a in 0..d {
                    let (b, c) = (y.get(a, l), pulled.get(a, l));
                    off += b.re * c.re - b.im * c.im;
                }
            }
            let (mut d_z, mut diag) = (0.0, 0.0);
            for k in 0..d {
                let d_sq = 2.0 * h[k] * diagonals[i][k];
                d_z -= s.weights[k] * d_sq;
                diag += d_sq * (p[k] - s.energies[k] * s.weights[k] / z);
            }
            *g = -off + diag - d_z / (z * z) * norm_weight;
        }

        Ok(Evaluation {
            f,
            grad,
            ground_prob: 1.0 / z,
        })
    }

    /// Forward propagation through every graph node in the computational basis.
    pub fn graph(&self, x: &[f64], method: FrechetMethod) -> Result<GraphEval> {
        let s = self.spectrum(x)?;
        let d = self.dim();
        let v2 = self.shifted_hamiltonian(x)?;
        let v3 = &v2 * &v2;
        let v4 = s.eig.from_diagonal(&s.weights);
        let v5 = real_trace(v4.trace(), "tr v4")?;
        let v6 = v4.scale(1.0 / v5);
        let v7 = self
            .basis
            .operators()
            .zip(self.a)
            .map(|(op, &ai)| Ok(real_trace(op.trace_product(&v6), "tr(A_j v6)")? - ai))
            .collect::<Result<Vec<f64>>>()?;
        let v8: f64 = v7.iter().map(|r| r * r).sum();
        let v9 = real_trace(v3.trace_product(&v6), "tr(v3 v6)")?;
        let v10 = v8 + v9;

        // exponent of v4 and its spectral decomposition (shared by all directions)
        let exponent = (&ComplexMatrix::identity(d).scale(s.shift) - &v3).hermitian_part();
        let exponent_eig = HermitianEigen {
            values: s.energies.iter().map(|e| -(e - s.shift)).collect(),
            vectors: s.eig.vectors.clone(),
        };

        let mut grad = Vec::with_capacity(self.num_terms());
        for b in &self.shifted {
            let dv3 = &(b * &v2) + &(&v2 * b);
            let neg_dv3 = -&dv3;
            let dv4 = match method {
                FrechetMethod::DividedDifference => frechet_exp_eigen(&exponent_eig, &neg_dv3),
                FrechetMethod::AugmentedBlock => {
                    frechet_exp(&exponent, &neg_dv3, FrechetMethod::AugmentedBlock)?
                }
            };
            let dv5 = real_trace(dv4.trace(), "tr dv4")?;
            let dv6 = &dv4.scale(1.0 / v5) - &v4.scale(dv5 / (v5 * v5));
            let mut dv8 = 0.0;
            for (j, op) in self.basis.operators().enumerate() {
                let dv7 = real_trace(op.trace_product(&dv6), "tr(A_j dv6)")?;
                dv8 += 2.0 * v7[j] * dv7;
            }
            let dv9 = real_trace(dv3.trace_product(&v6) + v3.trace_product(&dv6), "dv9")?;
            grad.push(dv8 + dv9);
        }

        Ok(GraphEval {
            x: x.to_vec(),
            v2,
            v3,
            shift: s.shift,
            v4,
            v5,
            v6,
            v7,
            v8,
            v9,
            v10,
            grad,
        })
    }

    pub fn diagnostics(&self, x: &[f64]) -> Result<Diagnostics> {
        let s = self.spectrum(x)?;
        let mut spectrum = s.energies.clone();
        spectrum.sort_by(f64::total_cmp);
        let ground = spectrum[0];
        let unshifted: f64 = spectrum.iter().map(|e| (-e).exp()).sum();
        let ground_prob = if unshifted > 1e-280 && ground < 600.0 {
            (-ground).exp() / unshifted
        } else {
            1.0 / s.partition
        };
        let gaps = spectrum.windows(2).map(|w| w[1] - w[0]).collect();
        Ok(Diagnostics {
            spectrum,
            ground_prob,
            gaps,
        })
    }
}

fn weighted_real_sum(diag: &[Complex64], p: &[f64]) -> Result<f64> {
    let acc: Complex64 = diag.iter().zip(p).map(|(z, pk)| z * pk).sum();
    real_trace(acc, "expectation in the eigenbasis")
}

pub fn density_matrix(basis: &OperatorBasis, a: &[f64], x: &[f64]) -> Result<ComplexMatrix> {
    Objective::new(basis, a)?.density_matrix(x)
}

pub fn evaluate(basis: &OperatorBasis, a: &[f64], x: &[f64]) -> Result<f64> {
    Objective::new(basis, a)?.evaluate(x)
}

/// Gradient through the computational graph, using divided differences for `d exp`.
pub fn gradient(basis: &OperatorBasis, a: &[f64], x: &[f64]) -> Result<GraphEval> {
    Objective::new(basis, a)?.graph(x, FrechetMethod::DividedDifference)
}

pub fn diagnostics(basis: &OperatorBasis, a: &[f64], x: &[f64]) -> Result<Diagnostics> {
    Objective::new(basis, a)?.diagnostics(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::BasisTerm;

    fn sigma_z_basis() -> OperatorBasis {
        OperatorBasis::new(vec![BasisTerm {
            label: "Z".into(),
            support: None,
            matrix: ComplexMatrix::from_diagonal_real(&[1.0, -1.0]),
        }])
        .unwrap()
    }

    /// Scalar closed form for basis {sigma_z}, a = (1): K^2 = diag(0, 4x^2).
    fn scalar_f(x: f64) -> f64 {
        let s = 4.0 * x * x;
        let q = (-s).exp() / (1.0 + (-s).exp());
        // tr(Z rho) = (1 - e^{-s}) / (1 + e^{-s}) = tanh(s/2)
        ((s / 2.0).tanh() - 1.0).powi(2) + s * q
    }

    fn scalar_df(x: f64) -> f64 {
        // d/dx of (tanh(2x^2) - 1)^2 + 4x^2 sigmoid(-4x^2)
        let t = (2.0 * x * x).tanh();
        let first = 2.0 * (t - 1.0) * (1.0 - t * t) * 4.0 * x;
        let s = 4.0 * x * x;
        let sig = 1.0 / (1.0 + s.exp());
        let second = 8.0 * x * sig + s * (-sig * (1.0 - sig)) * 8.0 * x;
        first + second
    }

    #[test]
    fn shifted_terms() {
        let b = sigma_z_basis();
        let t = build_shifted_terms(&b, &[1.0]).unwrap();
        assert_eq!(t[0], ComplexMatrix::from_diagonal_real(&[0.0, -2.0]));
        let id = OperatorBasis::new(vec![BasisTerm {
            label: "I".into(),
            support: None,
            matrix: ComplexMatrix::identity(2),
        }])
        .unwrap();
        assert_eq!(build_shifted_terms(&id, &[1.0]).unwrap()[0], ComplexMatrix::zeros(2));
        assert!(build_shifted_terms(&b, &[1.0, 2.0]).is_err());
    }

    #[test]
    fn density_matrix_examples() {
        let b = sigma_z_basis();
        let rho0 = density_matrix(&b, &[1.0], &[0.0]).unwrap();
        assert!(rho0.max_abs_diff(&ComplexMatrix::identity(2).scale(0.5)) < 1e-15);

        let rho1 = density_matrix(&b, &[1.0], &[1.0]).unwrap();
        let e4 = (-4.0f64).exp();
        let expected = ComplexMatrix::from_diagonal_real(&[1.0 / (1.0 + e4), e4 / (1.0 + e4)]);
        assert!(rho1.max_abs_diff(&expected) < 1e-14);
        assert!((rho1.get(0, 0).re - 0.982014).abs() < 1e-6);

        let rho3 = density_matrix(&b, &[1.0], &[3.0]).unwrap();
        assert!(rho3.max_abs_diff(&ComplexMatrix::from_diagonal_real(&[1.0, 0.0])) < 1e-14);
    }

    #[test]
    fn evaluate_examples() {
        let b = sigma_z_basis();
        assert!((evaluate(&b, &[1.0], &[0.0]).unwrap() - 1.0).abs() < 1e-15);
        let f1 = evaluate(&b, &[1.0], &[1.0]).unwrap();
        assert!((f1 - scalar_f(1.0)).abs() < 1e-14);
        assert!((f1 - 0.073238).abs() < 5e-6, "{f1}");
    }

    #[test]
    fn gradient_examples() {
        let b = sigma_z_basis();
        let g0 = gradient(&b, &[1.0], &[0.0]).unwrap();
        assert_eq!(g0.grad, vec![0.0]);
        let g1 = gradient(&b, &[1.0], &[1.0]).unwrap();
        assert!((g1.grad[0] - scalar_df(1.0)).abs() < 1e-12);
        assert!((g1.grad[0] - (-0.44166)).abs() < 1e-4, "{}", g1.grad[0]);
        let fast = Objective::new(&b, &[1.0]).unwrap().value_and_gradient(&[1.0]).unwrap();
        assert!((fast.grad[0] - g1.grad[0]).abs() < 1e-13);
        assert!((fast.f - g1.v10).abs() < 1e-14);
    }

    #[test]
    fn scalar_derivative_oracle_self_check() {
        let h = 1e-6;
        for x in [0.3, 1.0, 1.7] {
            let fd = (scalar_f(x + h) - scalar_f(x - h)) / (2.0 * h);
            assert!((fd - scalar_df(x)).abs() < 1e-8);
        }
    }

    #[test]
    fn diagnostics_examples() {
        let b = sigma_z_basis();
        let d0 = diagnostics(&b, &[1.0], &[0.0]).unwrap();
        assert!((d0.ground_prob - 0.5).abs() < 1e-15);
        let d1 = diagnostics(&b, &[1.0], &[1.0]).unwrap();
        assert!((d1.ground_prob - 1.0 / (1.0 + (-4.0f64).exp())).abs() < 1e-15);
        assert_eq!(d1.spectrum, vec![0.0, 4.0]);
        assert_eq!(d1.first_positive_gap(), Some(4.0));
        // far past overflow of the unshifted sum's ratio form
        let d2 = diagnostics(&b, &[1.0], &[30.0]).unwrap();
        assert_eq!(d2.ground_prob, 1.0);
    }

    #[test]
    fn wrong_length_point_rejected() {
        let b = sigma_z_basis();
        let obj = Objective::new(&b, &[1.0]).unwrap();
        assert!(matches!(obj.evaluate(&[1.0, 2.0]), Err(Error::LengthMismatch { .. })));
        assert!(matches!(obj.evaluate(&[f64::NAN]), Err(Error::NonFinite)));
    }
}
