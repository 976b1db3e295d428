//! Reconstruct one fully connected 2-local Hamiltonian from each of its
//! eigenstates in turn. The ground state is not special to the method.
//!
//! cargo run --release --example level_sweep -- [n_qubits] [seed]

use hamlearn::harness::{run_experiment, summarize, ExperimentConfig, Preset};

fn main() -> hamlearn::error::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let n: usize = args.first().map_or(3, |s| s.parse().expect("n_qubits"));
    let seed: u64 = args.get(1).map_or(4, |s| s.parse().expect("seed"));

    let mut cfg = ExperimentConfig::new(Preset::LevelSweep, n);
    cfg.seed = seed;
    cfg.solve.max_restarts = 5000;
    cfg.validate()?;

    let rows = run_experiment(&cfg)?;
    println!("{:>5} {:>12} {:>10} {:>9} {:>9}", "level", "fidelity", "f", "restarts", "P(ground)");
    for row in &rows {
        println!(
            "{:>5} {:>12.8} {:>10.2e} {:>9} {:>9.6}",
            row.eigen_index.unwrap_or(0),
            row.abs_fidelity.unwrap_or(f64::NAN),
            row.f_final,
            row.restarts,
            row.ground_prob_final
        );
    }
    let s = summarize(&rows)?;
    println!(
        "min fidelity {:.8}, mean {:.8}, converged {}/{}",
        s.min_abs_fidelity.unwrap_or(f64::NAN),
        s.mean_abs_fidelity.unwrap_or(f64::NAN),
        s.converged,
        s.rows
    );
    Ok(())
}
