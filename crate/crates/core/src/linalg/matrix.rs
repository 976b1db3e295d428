use std::ops::{Add, Mul, Neg, Sub};

use faer::linalg::solvers::Solve;
use faer::Mat;
use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Tolerance used when a caller promises a Hermitian argument.
pub const HERMITIAN_TOL: f64 = 1e-10;

/// Dense square complex matrix.
///
/// Constructors that take external data check squareness and finiteness;
/// arithmetic between valid matrices of equal dimension preserves both.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMatrix(pub(crate) Mat<Complex64>);

/// A [`ComplexMatrix`] that is expected to be Hermitian. Operations that
/// depend on hermiticity check it at their boundary.
pub type HermitianOperator = ComplexMatrix;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

impl ComplexMatrix {
    pub fn zeros(dim: usize) -> Self {
        ComplexMatrix(Mat::zeros(dim, dim))
    }

    pub fn identity(dim: usize) -> Self {
        ComplexMatrix(Mat::identity(dim, dim))
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        ComplexMatrix(Mat::from_fn(dim, dim, |i, j| f(i, j)))
    }

    pub fn from_diagonal_real(diag: &[f64]) -> Self {
        let d = diag.len();
        Self::from_fn(d, |i, j| if i == j { Complex64::new(diag[i], 0.0) } else { ZERO })
    }

    /// Builds a matrix from row-major real and imaginary parts.
    pub fn from_parts(re: &[Vec<f64>], im: &[Vec<f64>]) -> Result<Self> {
        let d = re.len();
        if d == 0 {
            return Err(Error::Dimension("matrix must have dimension >= 1".into()));
        }
        if im.len() != d {
            return Err(Error::Dimension(format!(
                "real part has {d} rows, imaginary part has {}",
                im.len()
            )));
        }
        for (r, row) in re.iter().chain(im.iter()).enumerate() {
            if row.len() != d {
                return Err(Error::Dimension(format!(
                    "row {} has length {}, expected {d}",
                    r % d,
                    row.len()
                )));
            }
        }
        let m = Self::from_fn(d, |i, j| Complex64::new(re[i][j], im[i][j]));
        m.check_finite()?;
        Ok(m)
    }

    /// Builds a matrix from row-major complex entries.
    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Self> {
        let d = rows.len();
        if d == 0 {
            return Err(Error::Dimension("matrix must have dimension >= 1".into()));
        }
        if let Some(bad) = rows.iter().find(|r| r.len() != d) {
            return Err(Error::Dimension(format!(
                "matrix is not square: {d} rows, a row of length {}",
                bad.len()
            )));
        }
        let m = Self::from_fn(d, |i, j| rows[i][j]);
        m.check_finite()?;
        Ok(m)
    }

    /// Builds a matrix from real row-major entries.
    pub fn from_real_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let d = rows.len();
        let im = vec![vec![0.0; d]; d];
        Self::from_parts(rows, &im)
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.0[(i, j)]
    }

    pub fn set(&mut self, i: usize, j: usize, value: Complex64) {
        self.0[(i, j)] = value;
    }

    pub fn as_inner(&self) -> &Mat<Complex64> {
        &self.0
    }

    pub fn into_inner(self) -> Mat<Complex64> {
        self.0
    }

    /// Wraps a faer matrix after checking the matrix invariants.
    pub fn try_from_inner(m: Mat<Complex64>) -> Result<Self> {
        if m.nrows() != m.ncols() || m.nrows() == 0 {
            return Err(Error::Dimension(format!(
                "expected a non-empty square matrix, got {}x{}",
                m.nrows(),
                m.ncols()
            )));
        }
        let m = ComplexMatrix(m);
        m.check_finite()?;
        Ok(m)
    }

    fn entries(&self) -> impl Iterator<Item = Complex64> + '_ {
        let d = self.dim();
        (0..d).flat_map(move |j| (0..d).map(move |i| self.0[(i, j)]))
    }

    fn map(&self, f: impl Fn(Complex64) -> Complex64) -> Self {
        ComplexMatrix(Mat::from_fn(self.dim(), self.dim(), |i, j| f(self.0[(i, j)])))
    }

    /// Entrywise complex conjugate.
    pub fn conj(&self) -> Self {
        self.map(|z| z.conj())
    }

    pub fn adjoint(&self) -> Self {
        ComplexMatrix(self.0.adjoint().to_owned())
    }

    pub fn scale(&self, s: f64) -> Self {
        self.map(|z| z * s)
    }

    /// `self += alpha * other`.
    pub fn add_scaled(&mut self, alpha: f64, other: &Self) {
        let d = self.dim();
        for j in 0..d {
            for i in 0..d {
                self.0[(i, j)] += other.0[(i, j)] * alpha;
            }
        }
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim()).map(|i| self.0[(i, i)]).sum()
    }

    /// `tr(self * other)` without forming the product.
    pub fn trace_product(&self, other: &Self) -> Complex64 {
        let d = self.dim();
        let mut acc = ZERO;
        for i in 0..d {
            for k in 0..d {
                acc += self.0[(i, k)] * other.0[(k, i)];
            }
        }
        acc
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.entries().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.entries()
            .zip(other.entries())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Largest entrywise modulus of `self - self^dagger`.
    pub fn hermitian_deviation(&self) -> f64 {
        let d = self.dim();
        let mut worst: f64 = 0.0;
        for i in 0..d {
            for j in i..d {
                worst = worst.max((self.0[(i, j)] - self.0[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermitian_deviation() <= tol
    }

    pub fn ensure_hermitian(&self, tol: f64) -> Result<()> {
        let deviation = self.hermitian_deviation();
        if deviation > tol {
            return Err(Error::NotHermitian {
                deviation,
                tolerance: tol,
            });
        }
        Ok(())
    }

    pub fn ensure_same_dim(&self, other: &Self) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::Dimension(format!(
                "{} vs {}",
                self.dim(),
                other.dim()
            )));
        }
        Ok(())
    }

    pub fn check_finite(&self) -> Result<()> {
        if self.entries().all(|z| z.re.is_finite() && z.im.is_finite()) {
            Ok(())
        } else {
            Err(Error::NonFinite)
        }
    }

    /// `(self + self^dagger) / 2`.
    pub fn hermitian_part(&self) -> Self {
        let d = self.dim();
        Self::from_fn(d, |i, j| (self.0[(i, j)] + self.0[(j, i)].conj()) * 0.5)
    }

    pub fn l1_norm(&self) -> f64 {
        let d = self.dim();
        (0..d)
            .map(|j| (0..d).map(|i| self.0[(i, j)].norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// Kronecker product `self ⊗ other` (self is the more significant factor).
    pub fn kron(&self, other: &Self) -> Self {
        let q = other.dim();
        Self::from_fn(self.dim() * q, |i, j| self.0[(i / q, j / q)] * other.0[(i % q, j % q)])
    }

    /// Matrix-vector product `self * v`.
    pub fn mul_vec(&self, v: &[Complex64]) -> Vec<Complex64> {
        let d = self.dim();
        (0..d)
            .map(|i| (0..d).map(|j| self.0[(i, j)] * v[j]).sum())
            .collect()
    }

    /// `self * other - other * self`.
    pub fn commutator(&self, other: &Self) -> Self {
        ComplexMatrix(&self.0 * &other.0 - &other.0 * &self.0)
    }

    /// `X` with `self * X = rhs`, by LU with partial pivoting.
    pub fn solve(&self, rhs: &Self) -> Result<Self> {
        self.ensure_same_dim(rhs)?;
        let x = ComplexMatrix(self.0.partial_piv_lu().solve(&rhs.0));
        x.check_finite()
            .map_err(|_| Error::Consistency("singular system in LU solve".into()))?;
        Ok(x)
    }

    pub fn column(&self, j: usize) -> Vec<Complex64> {
        (0..self.dim()).map(|i| self.0[(i, j)]).collect()
    }

    pub fn real_diagonal(&self) -> Vec<f64> {
        (0..self.dim()).map(|i| self.0[(i, i)].re).collect()
    }
}

/// `<u|v>` with the conjugate on the left argument.
pub fn inner(u: &[Complex64], v: &[Complex64]) -> Complex64 {
    u.iter().zip(v).map(|(a, b)| a.conj() * b).sum()
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(&self.0 + &rhs.0)
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(&self.0 - &rhs.0)
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(&self.0 * &rhs.0)
    }
}

impl Neg for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn neg(self) -> ComplexMatrix {
        self.map(|z| -z)
    }
}

impl Add for ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: ComplexMatrix) -> ComplexMatrix {
        &self + &rhs
    }
}

impl Sub for ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: ComplexMatrix) -> ComplexMatrix {
        &self - &rhs
    }
}

impl Mul for ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: ComplexMatrix) -> ComplexMatrix {
        &self * &rhs
    }
}

/// Wire form: `{"dim": d, "re": [[..]], "im": [[..]]}`, row-major.
#[derive(Serialize, Deserialize)]
struct MatrixJson {
    dim: usize,
    re: Vec<Vec<f64>>,
    im: Vec<Vec<f64>>,
}

impl Serialize for ComplexMatrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let d = self.dim();
        let rows = |part: fn(&Complex64) -> f64| -> Vec<Vec<f64>> {
            (0..d)
                .map(|i| (0..d).map(|j| part(&self.0[(i, j)])).collect())
                .collect()
        };
        MatrixJson {
            dim: d,
            re: rows(|z| z.re),
            im: rows(|z| z.im),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for ComplexMatrix {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let raw = MatrixJson::deserialize(deserializer)?;
        if raw.re.len() != raw.dim {
            return Err(serde::de::Error::custom(format!(
                "`dim` is {} but `re` has {} rows",
                raw.dim,
                raw.re.len()
            )));
        }
        ComplexMatrix::from_parts(&raw.re, &raw.im).map_err(serde::de::Error::custom)
    }
}
