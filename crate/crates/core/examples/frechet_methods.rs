//! Directional derivative of the matrix exponential by both routes, checked
//! against a central difference, with timings per dimension.
//!
//! cargo run --release --example frechet_methods

use std::time::Instant;

use hamlearn::linalg::{expm, frechet_exp, ComplexMatrix, FrechetMethod};
use hamlearn::operators::random_hermitian;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn central_difference(x: &ComplexMatrix, e: &ComplexMatrix, h: f64) -> hamlearn::error::Result<ComplexMatrix> {
    let mut plus = x.clone();
    plus.add_scaled(h, e);
    let mut minus = x.clone();
    minus.add_scaled(-h, e);
    let mut d = expm(&plus)?;
    d.add_scaled(-1.0, &expm(&minus)?);
    Ok(d.scale(0.5 / h))
}

fn main() -> hamlearn::error::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    println!("{:>4} {:>12} {:>12} {:>10} {:>10}", "d", "|dd - blk|", "|dd - fd|", "dd us", "blk us");
    for d in [2, 4, 8, 16, 32, 64] {
        let x = random_hermitian(d, &mut rng)?.scale(0.5);
        let e = random_hermitian(d, &mut rng)?;

        let t = Instant::now();
        let dd = frechet_exp(&x, &e, FrechetMethod::DividedDifference)?;
        let t_dd = t.elapsed().as_micros();
        let t = Instant::now();
        let blk = frechet_exp(&x, &e, FrechetMethod::AugmentedBlock)?;
        let t_blk = t.elapsed().as_micros();
        let fd = central_difference(&x, &e, 1e-5)?;

        let rel = |a: &ComplexMatrix, b: &ComplexMatrix| {
            let mut diff = a.clone();
            diff.add_scaled(-1.0, b);
            diff.frobenius_norm() / b.frobenius_norm()
        };
        println!(
            "{d:>4} {:>12.3e} {:>12.3e} {t_dd:>10} {t_blk:>10}",
            rel(&dd, &blk),
            rel(&dd, &fd)
        );
    }
    Ok(())
}
