//! Reconstruct a Hamiltonian built from random Hermitian terms, given only
//! the expectation values of those terms in one of its eigenstates.
//!
//! cargo run --release --example generic_reconstruction -- [n_qubits] [m_terms] [seed]

use hamlearn::metrics::report;
use hamlearn::operators::{basis_generic, eigenstate_measurements};
use hamlearn::optimizer::{solve_hamiltonian, SolveConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() -> hamlearn::error::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let n: u32 = args.first().map_or(3, |s| s.parse().expect("n_qubits"));
    let m: usize = args.get(1).map_or(3, |s| s.parse().expect("m_terms"));
    let seed: u64 = args.get(2).map_or(7, |s| s.parse().expect("seed"));

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let d = 2usize.pow(n);
    let basis = basis_generic(d, m, &mut rng)?;
    let c_true: Vec<f64> = (0..m).map(|_| rng.random_range(0.0..1.0)).collect();
    let k = rng.random_range(0..d);
    let record = eigenstate_measurements(&basis, &c_true, k, None)?;

    println!("d = {d}, m = {m}, eigenstate index {k}");
    println!("measured a = {:.6?}", record.a);

    let cfg = SolveConfig {
        max_restarts: 500,
        seed,
        ..SolveConfig::default()
    };
    let solution = solve_hamiltonian(&basis, &record.a, &cfg)?;
    let r = report(&basis, &solution, &record)?;

    let norm = |v: &[f64]| v.iter().map(|x| x * x).sum::<f64>().sqrt();
    let (nx, nc) = (norm(&solution.x_opt), norm(&c_true));
    let sign = r.fidelity.signum();
    println!(
        "converged {} after {} restart(s), f = {:.3e}",
        solution.converged, solution.restarts_used, solution.f_final
    );
    for (i, (x, c)) in solution.x_opt.iter().zip(&c_true).enumerate() {
        println!("  c[{i}]  true {:+.6}  recovered {:+.6}", c / nc, sign * x / nx);
    }
    println!("fidelity {:.8}", r.abs_fidelity);
    println!("eigenvalue of unit-norm H: {:.6}", r.lambda_hat);
    if let Some(p) = r.state_overlap {
        println!("state overlap {p:.8}");
    }
    Ok(())
}
