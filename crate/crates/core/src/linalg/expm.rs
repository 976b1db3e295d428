
use super::eigen::eig_hermitian;
use super::matrix::ComplexMatrix;
use crate::error::{Error, Result};

/// `e^{-X}` for Hermitian `X`, computed on the spectrum.
pub fn exp_neg_hermitian(x: &ComplexMatrix) -> Result<ComplexMatrix> {
    let eig = eig_hermitian(x)?;
    Ok(eig.map_spectrum(|v| (-v).exp()))
}

// Degree-13 Padé numerator coefficients (denominator uses alternating signs).
const PADE13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];

// Largest 1-norm for which the degree-13 approximant meets double precision.
const THETA13: f64 = 5.371920351148152;

/// Matrix exponential of a general square matrix by scaling and squaring
/// around a fixed degree-13 Padé approximant.
pub fn expm(a: &ComplexMatrix) -> Result<ComplexMatrix> {
    let n = a.dim();
    let norm = a.l1_norm();
    if !norm.is_finite() {
        return Err(Error::NonFinite);
    }
    let squarings = if norm > THETA13 {
        (norm / THETA13).log2().ceil() as i32
    } else {
        0
    };
    let scaled = a.scale(2f64.powi(-squarings));

    let ident = ComplexMatrix::identity(n);
    let a2 = &scaled * &scaled;
    let a4 = &a2 * &a2;
    let a6 = &a2 * &a4;
    let combo = |terms: [(&ComplexMatrix, usize); 3]| {
        let mut acc = ComplexMatrix::zeros(n);
        for (m, k) in terms {
            acc.add_scaled(PADE13[k], m);
        }
        acc
    };

    let mut u_inner = &a6 * &combo([(&a6, 13), (&a4, 11), (&a2, 9)]);
    for (m, k) in [(&a6, 7), (&a4, 5), (&a2, 3), (&ident, 1)] {
        u_inner.add_scaled(PADE13[k], m);
    }
    let u = &scaled * &u_inner;
    let mut v = &a6 * &combo([(&a6, 12), (&a4, 10), (&a2, 8)]);
    for (m, k) in [(&a6, 6), (&a4, 4), (&a2, 2), (&ident, 0)] {
        v.add_scaled(PADE13[k], m);
    }

    let numerator = &v + &u;
    let denominator = &v - &u;
    let mut r = denominator.solve(&numerator)?;
    for _ in 0..squarings {
        r = &r * &r;
    }
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::hermitize;
    use num_complex::Complex64;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Independent oracle: truncated Taylor series on a scaled argument, then squaring.
    fn taylor_expm(a: &ComplexMatrix) -> ComplexMatrix {
        let squarings = 12;
        let scaled = a.scale(2f64.powi(-squarings));
        let d = a.dim();
        let mut term = ComplexMatrix::identity(d);
        let mut sum = ComplexMatrix::identity(d);
        for k in 1..30 {
            term = (&term * &scaled).scale(1.0 / k as f64);
            sum = &sum + &term;
        }
        for _ in 0..squarings {
            sum = &sum * &sum;
        }
        sum
    }

    fn random_hermitian(d: usize, seed: u64, width: f64) -> ComplexMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let e = ComplexMatrix::from_fn(d, |_, _| {
            Complex64::new(rng.random_range(-width..width), rng.random_range(-width..width))
        });
        hermitize(&e)
    }

    #[test]
    fn zero_gives_identity() {
        let e = exp_neg_hermitian(&ComplexMatrix::zeros(4)).unwrap();
        assert!(e.max_abs_diff(&ComplexMatrix::identity(4)) < 1e-15);
    }

    #[test]
    fn diagonal_case() {
        let e = exp_neg_hermitian(&ComplexMatrix::from_diagonal_real(&[0.0, 4.0])).unwrap();
        assert!((e.get(0, 0).re - 1.0).abs() < 1e-15);
        assert!((e.get(1, 1).re - 0.018315638888734179).abs() < 1e-15);
        assert!(e.get(0, 1).norm() < 1e-15);
    }

    #[test]
    fn spectral_matches_taylor_oracle() {
        for seed in 0..4 {
            let x = random_hermitian(8, seed, 0.5);
            let spectral = exp_neg_hermitian(&x).unwrap();
            let oracle = taylor_expm(&-&x);
            let diff = (&spectral - &oracle).frobenius_norm();
            assert!(diff < 1e-10, "seed {seed}: {diff:e}");
        }
    }

    #[test]
    fn pade_matches_taylor_oracle_on_non_hermitian() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let a = ComplexMatrix::from_fn(6, |_, _| {
            Complex64::new(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0))
        });
        let pade = expm(&a).unwrap();
        let oracle = taylor_expm(&a);
        let rel = (&pade - &oracle).frobenius_norm() / oracle.frobenius_norm();
        assert!(rel < 1e-10, "{rel:e}");
    }

    #[test]
    fn commutes_with_argument() {
        let x = random_hermitian(10, 5, 1.0);
        let e = exp_neg_hermitian(&x).unwrap();
        assert!(e.commutator(&x).frobenius_norm() < 1e-10);
    }
}
