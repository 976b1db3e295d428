use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Parser, Subcommand};
use hamlearn::error::{Error, Result};
use hamlearn::harness::{
    generate_instances, read_rows, run_instance, run_instances, summarize_with, write_rows, ExperimentConfig,
    HistogramSpec, Instance, OutputFormat, ResultRow, Summary,
};
use hamlearn::operators::{MeasurementRecord, OperatorBasis};
use hamlearn::optimizer::SolveConfig;

/// Reconstruct Hamiltonians from eigenstate expectation values.
#[derive(Parser)]
#[command(name = "hamlearn", version)]
struct Cli {
    /// Master seed; overrides the config file.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads (defaults to all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Jsonl)]
    format: OutputFormat,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write the bases and measurement records of a suite without solving.
    Gen {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Reconstruct one Hamiltonian from a basis file and a measurement file.
    Solve {
        #[arg(long)]
        basis: PathBuf,
        #[arg(long)]
        measurements: PathBuf,
        /// Solver settings, or an experiment config whose `solve` section is used.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run a full suite and write one row per instance plus a summary.
    Exp {
        #[arg(long)]
        config: PathBuf,
        /// Result table; defaults to the config's out_path.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Summary JSON; defaults to `<out>.summary.json`.
        #[arg(long)]
        summary: Option<PathBuf>,
    },
    /// Aggregate a result table (JSONL, or CSV by extension).
    Summarize {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, default_value_t = 20)]
        bins: usize,
        #[arg(long, default_value_t = 0.99)]
        low: f64,
        #[arg(long, default_value_t = 1.0)]
        high: f64,
    },
}

enum Outcome {
    Done,
    NotConverged(usize),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(Outcome::Done) => ExitCode::SUCCESS,
        Ok(Outcome::NotConverged(n)) => {
            eprintln!("{n} instance(s) did not converge");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: Cli) -> Result<Outcome> {
    if let Some(threads) = cli.threads {
        if threads == 0 {
            return Err(config_error("--threads", "must be >= 1"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| config_error("--threads", &e.to_string()))?;
    }
    match cli.command {
        Command::Gen { config, out } => {
            let cfg = load_experiment(&config, cli.seed)?;
            generate(&cfg, &out)?;
            Ok(Outcome::Done)
        }
        Command::Solve {
            basis,
            measurements,
            config,
            out,
        } => {
            let mut solve = match config {
                Some(path) => load_solve_config(&path)?,
                None => SolveConfig::default(),
            };
            if let Some(seed) = cli.seed {
                solve.seed = seed;
            }
            solve.validate()?;
            let basis = OperatorBasis::from_json(&std::fs::read_to_string(&basis)?)?;
            let record: MeasurementRecord = serde_json::from_str(&std::fs::read_to_string(&measurements)?)?;
            record.validate_against(&basis)?;
            let labels: Vec<String> = basis.labels().into_iter().map(String::from).collect();
            let inst = Instance {
                instance_id: 0,
                hamiltonian_id: 0,
                basis: Arc::new(basis),
                record,
                solve_seed: solve.seed,
            };
            let (row, result) = run_instance(&inst, &solve)?;
            write_table(&[row.clone()], cli.format, &out)?;
            let norm = result.x_opt.iter().map(|v| v * v).sum::<f64>().sqrt();
            let c_hat: Vec<f64> = result.x_opt.iter().map(|v| v / norm).collect();
            let solution = serde_json::json!({
                "labels": labels,
                "x_opt": result.x_opt,
                "c_hat": c_hat,
                "converged": result.converged,
                "f_final": result.f_final,
            });
            println!("{solution}");
            Ok(convergence(&[row]))
        }
        Command::Exp { config, out, summary } => {
            let cfg = load_experiment(&config, cli.seed)?;
            let out = out
                .or_else(|| cfg.out_path.clone())
                .ok_or_else(|| config_error("out_path", "give --out or set out_path in the config"))?;
            let instances = generate_instances(&cfg)?;
            let rows = run_instances(&instances, &cfg.solve)?;
            write_table(&rows, cli.format, &out)?;
            let summary_path = summary.unwrap_or_else(|| {
                let mut s = out.clone().into_os_string();
                s.push(".summary.json");
                PathBuf::from(s)
            });
            let summary = summarize_with(&rows, HistogramSpec::default())?;
            write_summary(&summary, &summary_path)?;
            println!("{}", serde_json::to_string(&summary)?);
            Ok(convergence(&rows))
        }
        Command::Summarize { input, bins, low, high } => {
            let rows = read_rows(&input)?;
            let summary = summarize_with(&rows, HistogramSpec { low, high, bins })?;
            println!("{}", serde_json::to_string_pretty(&summary)?);
            Ok(Outcome::Done)
        }
    }
}

fn config_error(field: &str, message: &str) -> Error {
    Error::InvalidConfig {
        field: field.to_string(),
        message: message.to_string(),
    }
}

fn load_experiment(path: &Path, seed: Option<u64>) -> Result<ExperimentConfig> {
    let mut cfg: ExperimentConfig = serde_json::from_str(&std::fs::read_to_string(path)?)?;
    if let Some(seed) = seed {
        cfg.seed = seed;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn load_solve_config(path: &Path) -> Result<SolveConfig> {
    let value: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(path)?)?;
    if value.get("preset").is_some() {
        let cfg: ExperimentConfig = serde_json::from_value(value)?;
        Ok(cfg.solve)
    } else {
        Ok(serde_json::from_value(value)?)
    }
}

fn generate(cfg: &ExperimentConfig, dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    let instances = generate_instances(cfg)?;
    let mut written = None;
    for inst in &instances {
        let basis_name = format!("basis_{}.json", inst.hamiltonian_id);
        if written != Some(inst.hamiltonian_id) {
            std::fs::write(dir.join(&basis_name), serde_json::to_string(inst.basis.as_ref())?)?;
            written = Some(inst.hamiltonian_id);
        }
        let record = inst.record.clone().with_basis_ref(basis_name);
        std::fs::write(
            dir.join(format!("measurements_{}.json", inst.instance_id)),
            serde_json::to_string_pretty(&record)?,
        )?;
    }
    eprintln!("wrote {} instance(s) to {}", instances.len(), dir.display());
    Ok(())
}

fn write_table(rows: &[ResultRow], format: OutputFormat, path: &Path) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    write_rows(rows, format, &mut out)?;
    out.flush()?;
    Ok(())
}

fn write_summary(summary: &Summary, path: &Path) -> Result<()> {
    std::fs::write(path, serde_json::to_string_pretty(summary)?)?;
    Ok(())
}

fn convergence(rows: &[ResultRow]) -> Outcome {
    match rows.iter().filter(|r| !r.converged).count() {
        0 => Outcome::Done,
        n => Outcome::NotConverged(n),
    }
}
