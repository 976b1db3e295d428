//! Operator bases, Hamiltonian assembly and eigenstate measurement records.
//!
//! Qubits are labelled from 1 and qubit 1 is the most significant tensor
//! factor, so basis index `b` has qubit `q` in state `(b >> (n - q)) & 1`.

use std::collections::HashSet;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{eig_hermitian, hermitize, inner, ComplexMatrix, HermitianOperator, HERMITIAN_TOL};

/// Minimum spectral gap around the selected eigenvalue.
pub const EIGEN_GAP_TOL: f64 = 1e-8;

/// Tolerance for the numerical-range check on measurement values.
pub const RANGE_TOL: f64 = 1e-10;

/// `E + E^dagger` with real and imaginary parts of `E` drawn uniformly from (-1, 1).
pub fn random_hermitian<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Result<HermitianOperator> {
    if d < 2 {
        return Err(Error::Dimension(format!("random Hermitian needs d >= 2, got {d}")));
    }
    let e = ComplexMatrix::from_fn(d, |_, _| {
        let re = rng.random_range(-1.0..1.0);
        let im = rng.random_range(-1.0..1.0);
        Complex64::new(re, im)
    });
    Ok(hermitize(&e))
}

/// Embeds a 4x4 operator acting on qubits `(i, j)` of an `n`-qubit register.
pub fn embed_two_local(a4: &HermitianOperator, i: usize, j: usize, n: usize) -> Result<HermitianOperator> {
    if a4.dim() != 4 {
        return Err(Error::Dimension(format!("two-local operator must be 4x4, got {}", a4.dim())));
    }
    if !(1 <= i && i < j && j <= n) {
        return Err(Error::OutOfRange(format!("qubit pair ({i}, {j}) on {n} qubits")));
    }
    if n > 8 {
        return Err(Error::OutOfRange(format!("{n} qubits exceeds the dense envelope (d <= 256)")));
    }
    let d = 1usize << n;
    let shift_i = n - i;
    let shift_j = n - j;
    let pair_mask = (1usize << shift_i) | (1usize << shift_j);
    let local = |b: usize| (((b >> shift_i) & 1) << 1) | ((b >> shift_j) & 1);
    Ok(ComplexMatrix::from_fn(d, |r, c| {
        if r & !pair_mask == c & !pair_mask {
            a4.get(local(r), local(c))
        } else {
            Complex64::new(0.0, 0.0)
        }
    }))
}

/// Qubit-pair interaction graph with 1-indexed qubits.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LatticeSpec {
    pub num_qubits: usize,
    pub edges: Vec<(usize, usize)>,
}

impl LatticeSpec {
    pub fn new(num_qubits: usize, edges: Vec<(usize, usize)>) -> Result<Self> {
        let lattice = LatticeSpec { num_qubits, edges };
        lattice.validate()?;
        Ok(lattice)
    }

    /// Every pair `i < j`, in lexicographic order.
    pub fn fully_connected(num_qubits: usize) -> Self {
        let edges = (1..=num_qubits)
            .flat_map(|i| (i + 1..=num_qubits).map(move |j| (i, j)))
            .collect();
        LatticeSpec { num_qubits, edges }
    }

    /// Open chain `(1,2), (2,3), ..., (n-1,n)`.
    pub fn chain(num_qubits: usize) -> Self {
        let edges = (1..num_qubits).map(|i| (i, i + 1)).collect();
        LatticeSpec { num_qubits, edges }
    }

    pub fn validate(&self) -> Result<()> {
        if self.num_qubits < 2 || self.num_qubits > 8 {
            return Err(Error::config("lattice.num_qubits", "must lie in 2..=8"));
        }
        if self.edges.is_empty() {
            return Err(Error::config("lattice.edges", "at least one edge required"));
        }
        let mut seen = HashSet::new();
        for &(i, j) in &self.edges {
            if !(1 <= i && i < j && j <= self.num_qubits) {
                return Err(Error::config(
                    "lattice.edges",
                    format!("edge ({i}, {j}) must satisfy 1 <= i < j <= {}", self.num_qubits),
                ));
            }
            if !seen.insert((i, j)) {
                return Err(Error::config("lattice.edges", format!("duplicate edge ({i}, {j})")));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BasisTerm {
    pub label: String,
    pub support: Option<(usize, usize)>,
    pub matrix: HermitianOperator,
}

/// Ordered list of Hermitian operators `A_1, ..., A_m` of common dimension `2^n`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OperatorBasis {
    pub dim: usize,
    pub n_qubits: usize,
    pub terms: Vec<BasisTerm>,
}

impl OperatorBasis {
    pub fn new(terms: Vec<BasisTerm>) -> Result<Self> {
        let first = terms
            .first()
            .ok_or_else(|| Error::config("terms", "basis needs at least one term"))?;
        let dim = first.matrix.dim();
        if !dim.is_power_of_two() || dim < 2 {
            return Err(Error::Dimension(format!("basis dimension {dim} is not 2^n with n >= 1")));
        }
        let n_qubits = dim.trailing_zeros() as usize;
        let mut labels = HashSet::new();
        for term in &terms {
            if term.matrix.dim() != dim {
                return Err(Error::Dimension(format!(
                    "term `{}` has dimension {}, expected {dim}",
                    term.label,
                    term.matrix.dim()
                )));
            }
            term.matrix.ensure_hermitian(HERMITIAN_TOL)?;
            if !labels.insert(term.label.as_str()) {
                return Err(Error::config("terms", format!("duplicate label `{}`", term.label)));
            }
            if let Some((i, j)) = term.support {
                if !(1 <= i && i < j && j <= n_qubits) {
                    return Err(Error::config(
                        "terms.support",
                        format!("support ({i}, {j}) is outside 1..={n_qubits}"),
                    ));
                }
            }
        }
        Ok(OperatorBasis { dim, n_qubits, terms })
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn operators(&self) -> impl Iterator<Item = &HermitianOperator> {
        self.terms.iter().map(|t| &t.matrix)
    }

    pub fn labels(&self) -> Vec<&str> {
        self.terms.iter().map(|t| t.label.as_str()).collect()
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}

impl<'de> Deserialize<'de> for OperatorBasis {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            dim: usize,
            n_qubits: usize,
            terms: Vec<BasisTerm>,
        }
        let raw = Raw::deserialize(deserializer)?;
        let basis = OperatorBasis::new(raw.terms).map_err(serde::de::Error::custom)?;
        if basis.dim != raw.dim || basis.n_qubits != raw.n_qubits {
            return Err(serde::de::Error::custom(format!(
                "header says dim {} / n_qubits {}, terms have dim {} / n_qubits {}",
                raw.dim, raw.n_qubits, basis.dim, basis.n_qubits
            )));
        }
        Ok(basis)
    }
}

/// `m` independent random Hermitian terms labelled `A1..Am`.
pub fn basis_generic<R: Rng + ?Sized>(d: usize, m: usize, rng: &mut R) -> Result<OperatorBasis> {
    if m == 0 {
        return Err(Error::config("m_terms", "must be >= 1"));
    }
    let terms = (1..=m)
        .map(|k| {
            Ok(BasisTerm {
                label: format!("A{k}"),
                support: None,
                matrix: random_hermitian(d, rng)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    OperatorBasis::new(terms)
}

/// One embedded random 4x4 Hermitian term per lattice edge, in edge order.
pub fn basis_two_local<R: Rng + ?Sized>(lattice: &LatticeSpec, rng: &mut R) -> Result<OperatorBasis> {
    lattice.validate()?;
    let n = lattice.num_qubits;
    let terms = lattice
        .edges
        .iter()
        .map(|&(i, j)| {
            let local = random_hermitian(4, rng)?;
            Ok(BasisTerm {
                label: format!("A{i}_{j}"),
                support: Some((i, j)),
                matrix: embed_two_local(&local, i, j, n)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    OperatorBasis::new(terms)
}

/// `sum_i c_i A_i`.
pub fn assemble(basis: &OperatorBasis, c: &[f64]) -> Result<HermitianOperator> {
    if c.len() != basis.len() {
        return Err(Error::LengthMismatch {
            expected: basis.len(),
            got: c.len(),
        });
    }
    let mut h = ComplexMatrix::zeros(basis.dim);
    for (coef, op) in c.iter().zip(basis.operators()) {
        h.add_scaled(*coef, op);
    }
    Ok(h)
}

/// `<psi|A|psi>` for Hermitian `A`; the imaginary residue is checked.
pub fn expectation(op: &HermitianOperator, psi: &[Complex64]) -> Result<f64> {
    let value = inner(psi, &op.mul_vec(psi));
    let scale = value.re.abs().max(1.0);
    if value.im.abs() > 1e-8 * scale {
        return Err(Error::Consistency(format!(
            "expectation of a Hermitian operator has imaginary part {:e}",
            value.im
        )));
    }
    Ok(value.re)
}

/// Ground truth attached to generated records.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Truth {
    pub c_true: Vec<f64>,
    pub eigen_index: usize,
    pub lambda_true: f64,
    pub seed: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeasurementRecord {
    pub basis_ref: String,
    pub a: Vec<f64>,
    pub truth: Option<Truth>,
}

impl MeasurementRecord {
    pub fn new(basis_ref: impl Into<String>, a: Vec<f64>) -> Self {
        MeasurementRecord {
            basis_ref: basis_ref.into(),
            a,
            truth: None,
        }
    }

    pub fn with_basis_ref(mut self, basis_ref: impl Into<String>) -> Self {
        self.basis_ref = basis_ref.into();
        self
    }

    /// Checks the length and that every `a_i` lies in the numerical range of `A_i`.
    pub fn validate_against(&self, basis: &OperatorBasis) -> Result<()> {
        validate_measurements(basis, &self.a)
    }
}

pub fn validate_measurements(basis: &OperatorBasis, a: &[f64]) -> Result<()> {
    if a.len() != basis.len() {
        return Err(Error::LengthMismatch {
            expected: basis.len(),
            got: a.len(),
        });
    }
    for (index, (&value, op)) in a.iter().zip(basis.operators()).enumerate() {
        if !value.is_finite() {
            return Err(Error::NonFinite);
        }
        let eig = eig_hermitian(op)?;
        let low = eig.values[0];
        let high = eig.values[eig.dim() - 1];
        if value < low - RANGE_TOL || value > high + RANGE_TOL {
            return Err(Error::InconsistentMeasurement { index, value, low, high });
        }
    }
    Ok(())
}

/// Eigenpair `k` (ascending order) of `H = sum c_i A_i`, rejecting degenerate levels.
pub fn target_eigenpair(basis: &OperatorBasis, c: &[f64], k: usize) -> Result<(f64, Vec<Complex64>)> {
    let h = assemble(basis, c)?;
    if k >= basis.dim {
        return Err(Error::OutOfRange(format!("eigen index {k} >= dimension {}", basis.dim)));
    }
    let eig = eig_hermitian(&h)?;
    let gap = level_gap(&eig.values, k);
    if gap < EIGEN_GAP_TOL {
        return Err(Error::Degenerate { index: k, gap });
    }
    Ok((eig.values[k], eig.vector(k)))
}

/// Distance from level `k` to its nearest neighbour.
pub fn level_gap(values: &[f64], k: usize) -> f64 {
    let below = if k > 0 { values[k] - values[k - 1] } else { f64::INFINITY };
    let above = if k + 1 < values.len() { values[k + 1] - values[k] } else { f64::INFINITY };
    below.min(above)
}

/// Measures every basis term on eigenstate `k` of `sum c_i A_i`.
pub fn eigenstate_measurements(
    basis: &OperatorBasis,
    c: &[f64],
    eigen_index: usize,
    seed: Option<u64>,
) -> Result<MeasurementRecord> {
    let (lambda, psi) = target_eigenpair(basis, c, eigen_index)?;
    let a = basis
        .operators()
        .map(|op| expectation(op, &psi))
        .collect::<Result<Vec<_>>>()?;
    Ok(MeasurementRecord {
        basis_ref: String::new(),
        a,
        truth: Some(Truth {
            c_true: c.to_vec(),
            eigen_index,
            lambda_true: lambda,
            seed,
        }),
    })
}
