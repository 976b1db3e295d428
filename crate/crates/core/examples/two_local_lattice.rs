//! A small 2-local suite on a chain, run through the experiment harness.
//! Prints one JSON row per instance and then the summary.
//!
//! cargo run --release --example two_local_lattice -- [n_qubits] [instances]

use hamlearn::harness::{run_experiment, summarize, ExperimentConfig, Preset};

fn main() -> hamlearn::error::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let n: usize = args.first().map_or(4, |s| s.parse().expect("n_qubits"));
    let count: usize = args.get(1).map_or(3, |s| s.parse().expect("instances"));

    let mut cfg = ExperimentConfig::new(Preset::LocalChain, n);
    cfg.num_instances = count;
    cfg.seed = 11;
    cfg.solve.max_restarts = 2000;
    cfg.validate()?;

    let lattice = cfg.resolved_lattice().expect("local preset");
    let rows = run_experiment(&cfg)?;
    println!("{} qubits, edges {:?}, {} terms", n, lattice.edges, rows[0].m);
    for row in &rows {
        println!(
            "instance {:>2}  level {:>2}  fidelity {:.6}  restarts {:>4}  {} ms",
            row.instance_id,
            row.eigen_index.unwrap_or(0),
            row.abs_fidelity.unwrap_or(f64::NAN),
            row.restarts,
            row.wall_ms
        );
    }
    let summary = summarize(&rows)?;
    println!("{}", serde_json::to_string_pretty(&summary)?);
    Ok(())
}
