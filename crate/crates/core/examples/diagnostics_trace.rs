//! Follow a single successful reconstruction: objective, gradient norm, the
//! weight of the lowest level of the thermal state, and the first gap of
//! the squared shifted Hamiltonian.
//!
//! cargo run --release --example diagnostics_trace

use hamlearn::objective::Objective;
use hamlearn::operators::{basis_two_local, eigenstate_measurements, LatticeSpec};
use hamlearn::optimizer::{solve_hamiltonian, SolveConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() -> hamlearn::error::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let basis = basis_two_local(&LatticeSpec::chain(3), &mut rng)?;
    let c: Vec<f64> = (0..basis.len()).map(|_| rng.random_range(0.0..1.0)).collect();
    let record = eigenstate_measurements(&basis, &c, 3, None)?;

    let cfg = SolveConfig {
        max_restarts: 2000,
        seed: 1,
        ..SolveConfig::default()
    };
    let solution = solve_hamiltonian(&basis, &record.a, &cfg)?;
    let objective = Objective::new(&basis, &record.a)?;
    let last = solution.restarts_used - 1;
    println!(
        "{} terms, converged {} on restart {}",
        basis.len(),
        solution.converged,
        solution.restarts_used
    );

    let gap = |x: &[f64]| -> hamlearn::error::Result<f64> {
        Ok(objective.diagnostics(x)?.first_positive_gap().unwrap_or(0.0))
    };
    println!("first gap at start {:.4e}", gap(&solution.x_initial)?);
    println!("{:>5} {:>12} {:>12} {:>10}", "iter", "f", "|grad|", "P(ground)");
    let samples: Vec<_> = solution.trace.iter().filter(|t| t.restart == last).collect();
    let stride = (samples.len() / 25).max(1);
    for (i, t) in samples.iter().enumerate() {
        if i % stride == 0 || i + 1 == samples.len() {
            println!("{:>5} {:>12.4e} {:>12.4e} {:>10.6}", t.iteration, t.f, t.grad_norm, t.ground_prob);
        }
    }
    println!("first gap at end   {:.4e}", gap(&solution.x_opt)?);
    Ok(())
}
