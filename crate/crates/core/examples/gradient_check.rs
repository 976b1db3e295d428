//! The objective gradient three ways: the fused eigenbasis formula, the
//! step-by-step computational graph (with either derivative of exp), and a
//! central finite difference.
//!
//! cargo run --release --example gradient_check -- [n_qubits] [m_terms]

use hamlearn::linalg::FrechetMethod;
use hamlearn::objective::Objective;
use hamlearn::operators::{basis_generic, eigenstate_measurements};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() -> hamlearn::error::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let n: u32 = args.first().map_or(3, |s| s.parse().expect("n_qubits"));
    let m: usize = args.get(1).map_or(4, |s| s.parse().expect("m_terms"));

    let mut rng = ChaCha8Rng::seed_from_u64(19);
    let basis = basis_generic(2usize.pow(n), m, &mut rng)?;
    let c: Vec<f64> = (0..m).map(|_| rng.random_range(0.0..1.0)).collect();
    let record = eigenstate_measurements(&basis, &c, 1, None)?;
    let objective = Objective::new(&basis, &record.a)?;
    let x: Vec<f64> = (0..m).map(|_| rng.random_range(-1.0..1.0)).collect();

    let fast = objective.value_and_gradient(&x)?;
    let graph = objective.graph(&x, FrechetMethod::DividedDifference)?;
    let block = objective.graph(&x, FrechetMethod::AugmentedBlock)?;
    println!("f(x) = {:.12}  (graph {:.12})", fast.f, graph.v10);

    let h = 1e-5;
    println!("{:>3} {:>16} {:>16} {:>16} {:>16}", "i", "fast", "graph", "block", "central diff");
    for i in 0..m {
        let mut xp = x.clone();
        xp[i] += h;
        let mut xm = x.clone();
        xm[i] -= h;
        let fd = (objective.evaluate(&xp)? - objective.evaluate(&xm)?) / (2.0 * h);
        println!(
            "{i:>3} {:>16.10} {:>16.10} {:>16.10} {:>16.10}",
            fast.grad[i], graph.grad[i], block.grad[i], fd
        );
    }
    Ok(())
}
