//! Seeded experiment suites: instance generation, parallel reconstruction,
//! result tables and summaries.
//!
//! Every Hamiltonian is generated from its own ChaCha8 stream: the generator
//! is seeded with the master seed and its stream is set to the Hamiltonian
//! index, so instances are independent of thread count and execution order.

use std::io::{BufRead, Write};
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metrics::{recover_eigenvalue, report};
use crate::objective::Objective;
use crate::operators::{
    basis_generic, basis_two_local, eigenstate_measurements, LatticeSpec, MeasurementRecord, OperatorBasis,
};
use crate::optimizer::{solve_hamiltonian, SolveConfig, SolveResult};

/// Attempts at drawing a Hamiltonian whose target levels are non-degenerate.
pub const MAX_REDRAWS: usize = 10;

/// Largest qubit count accepted for the generic preset.
pub const MAX_GENERIC_QUBITS: usize = 10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Preset {
    Generic,
    LocalFull,
    LocalChain,
    /// Every eigenstate of each generated fully connected 2-local Hamiltonian.
    LevelSweep,
    /// A single basis and measurement record read from files.
    Custom,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EigenIndexPolicy {
    Random,
    Fixed(usize),
    All,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub preset: Preset,
    #[serde(default)]
    pub n_qubits: usize,
    /// Number of random terms for the generic preset.
    #[serde(default)]
    pub m_terms: Option<usize>,
    /// Overrides the lattice implied by a local preset.
    #[serde(default)]
    pub lattice: Option<LatticeSpec>,
    #[serde(default = "one")]
    pub num_instances: usize,
    /// Defaults to `all` for `level_sweep` and `random` otherwise.
    #[serde(default)]
    pub eigen_index_policy: Option<EigenIndexPolicy>,
    #[serde(default)]
    pub solve: SolveConfig,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub out_path: Option<PathBuf>,
    /// Basis file for the custom preset.
    #[serde(default)]
    pub basis_path: Option<PathBuf>,
    /// Measurement file for the custom preset.
    #[serde(default)]
    pub measurements_path: Option<PathBuf>,
}

fn one() -> usize {
    1
}

impl ExperimentConfig {
    pub fn new(preset: Preset, n_qubits: usize) -> Self {
        ExperimentConfig {
            preset,
            n_qubits,
            m_terms: (preset == Preset::Generic).then_some(3),
            lattice: None,
            num_instances: 1,
            eigen_index_policy: None,
            solve: SolveConfig::default(),
            seed: 0,
            out_path: None,
            basis_path: None,
            measurements_path: None,
        }
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let cfg: ExperimentConfig = serde_json::from_str(s)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn policy(&self) -> EigenIndexPolicy {
        self.eigen_index_policy.unwrap_or(match self.preset {
            Preset::LevelSweep => EigenIndexPolicy::All,
            _ => EigenIndexPolicy::Random,
        })
    }

    /// Lattice of a local preset.
    pub fn resolved_lattice(&self) -> Option<LatticeSpec> {
        match self.preset {
            Preset::LocalFull | Preset::LevelSweep => {
                Some(self.lattice.clone().unwrap_or_else(|| LatticeSpec::fully_connected(self.n_qubits)))
            }
            Preset::LocalChain => Some(self.lattice.clone().unwrap_or_else(|| LatticeSpec::chain(self.n_qubits))),
            Preset::Generic | Preset::Custom => None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.solve.validate()?;
        if self.num_instances == 0 {
            return Err(Error::config("num_instances", "must be >= 1"));
        }
        let local = matches!(self.preset, Preset::LocalFull | Preset::LocalChain | Preset::LevelSweep);
        if self.preset != Preset::Generic && self.m_terms.is_some() {
            return Err(Error::config("m_terms", "only valid for the generic preset"));
        }
        if !local && self.lattice.is_some() {
            return Err(Error::config("lattice", "only valid for local presets"));
        }
        if self.preset != Preset::Custom && (self.basis_path.is_some() || self.measurements_path.is_some()) {
            return Err(Error::config("basis_path", "only valid for the custom preset"));
        }
        match self.preset {
            Preset::Generic => {
                if !(1..=MAX_GENERIC_QUBITS).contains(&self.n_qubits) {
                    return Err(Error::config(
                        "n_qubits",
                        format!("generic preset needs 1 <= n_qubits <= {MAX_GENERIC_QUBITS}, got {}", self.n_qubits),
                    ));
                }
                match self.m_terms {
                    Some(m) if m >= 1 => {}
                    _ => return Err(Error::config("m_terms", "generic preset needs m_terms >= 1")),
                }
            }
            Preset::LocalFull | Preset::LocalChain | Preset::LevelSweep => {
                let lattice = self.resolved_lattice().expect("local preset");
                if lattice.num_qubits != self.n_qubits {
                    return Err(Error::config(
                        "lattice",
                        format!("lattice has {} qubits but n_qubits = {}", lattice.num_qubits, self.n_qubits),
                    ));
                }
                lattice
                    .validate()
                    .map_err(|e| Error::config("lattice", e.to_string()))?;
            }
            Preset::Custom => {
                if self.basis_path.is_none() {
                    return Err(Error::config("basis_path", "custom preset needs a basis file"));
                }
                if self.measurements_path.is_none() {
                    return Err(Error::config("measurements_path", "custom preset needs a measurement file"));
                }
                if self.num_instances != 1 {
                    return Err(Error::config("num_instances", "custom preset runs exactly one instance"));
                }
            }
        }
        if let EigenIndexPolicy::Fixed(k) = self.policy() {
            if self.preset != Preset::Custom && k >= 1usize << self.n_qubits {
                return Err(Error::config(
                    "eigen_index_policy",
                    format!("fixed index {k} >= dimension {}", 1usize << self.n_qubits),
                ));
            }
        }
        Ok(())
    }
}

/// One reconstruction task: a basis, its measurements and the solver seed.
#[derive(Clone, Debug)]
pub struct Instance {
    pub instance_id: usize,
    /// Index of the generated Hamiltonian; several instances share one under `all`.
    pub hamiltonian_id: usize,
    pub basis: Arc<OperatorBasis>,
    pub record: MeasurementRecord,
    pub solve_seed: u64,
}

/// Generator for Hamiltonian `index` of an experiment with master seed `master`.
pub fn instance_rng(master: u64, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master);
    rng.set_stream(index as u64);
    rng
}

/// Builds every instance of a suite without solving it.
pub fn generate_instances(cfg: &ExperimentConfig) -> Result<Vec<Instance>> {
    cfg.validate()?;
    if cfg.preset == Preset::Custom {
        return load_custom(cfg).map(|i| vec![i]);
    }
    let per_hamiltonian = (0..cfg.num_instances)
        .into_par_iter()
        .map(|h| generate_hamiltonian(cfg, h))
        .collect::<Result<Vec<_>>>()?;
    let mut out = Vec::new();
    for batch in per_hamiltonian {
        for mut inst in batch {
            inst.instance_id = out.len();
            out.push(inst);
        }
    }
    Ok(out)
}

fn generate_basis(cfg: &ExperimentConfig, rng: &mut ChaCha8Rng) -> Result<OperatorBasis> {
    match cfg.resolved_lattice() {
        Some(lattice) => basis_two_local(&lattice, rng),
        None => basis_generic(1 << cfg.n_qubits, cfg.m_terms.unwrap_or(3), rng),
    }
}

fn generate_hamiltonian(cfg: &ExperimentConfig, h: usize) -> Result<Vec<Instance>> {
    let mut rng = instance_rng(cfg.seed, h);
    let mut last_err = None;
    for _ in 0..MAX_REDRAWS {
        let basis = generate_basis(cfg, &mut rng)?;
        let c: Vec<f64> = (0..basis.len()).map(|_| rng.random_range(0.0..1.0)).collect();
        let indices: Vec<usize> = match cfg.policy() {
            EigenIndexPolicy::Random => vec![rng.random_range(0..basis.dim)],
            EigenIndexPolicy::Fixed(k) => vec![k],
            EigenIndexPolicy::All => (0..basis.dim).collect(),
        };
        let records: Result<Vec<_>> = indices
            .iter()
            .map(|&k| eigenstate_measurements(&basis, &c, k, Some(cfg.seed)))
            .collect();
        match records {
            Ok(records) => {
                let basis = Arc::new(basis);
                return Ok(records
                    .into_iter()
                    .map(|record| Instance {
                        instance_id: 0,
                        hamiltonian_id: h,
                        basis: Arc::clone(&basis),
                        record: record.with_basis_ref(format!("hamiltonian_{h}")),
                        solve_seed: rng.random(),
                    })
                    .collect());
            }
            Err(e @ Error::Degenerate { .. }) => last_err = Some(e),
            Err(e) => return Err(e),
        }
    }
    Err(last_err.expect("at least one draw"))
}

fn load_custom(cfg: &ExperimentConfig) -> Result<Instance> {
    let basis_path = cfg.basis_path.as_ref().expect("validated");
    let meas_path = cfg.measurements_path.as_ref().expect("validated");
    let basis = OperatorBasis::from_json(&std::fs::read_to_string(basis_path)?)?;
    let record: MeasurementRecord = serde_json::from_str(&std::fs::read_to_string(meas_path)?)?;
    record.validate_against(&basis)?;
    if let (Some(truth), EigenIndexPolicy::Fixed(k)) = (&record.truth, cfg.policy()) {
        if truth.eigen_index != k {
            return Err(Error::config(
                "eigen_index_policy",
                format!("record was measured on level {}, config asks for {k}", truth.eigen_index),
            ));
        }
    }
    Ok(Instance {
        instance_id: 0,
        hamiltonian_id: 0,
        basis: Arc::new(basis),
        record,
        solve_seed: cfg.solve.seed,
    })
}

/// One line of the result table.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub instance_id: usize,
    pub hamiltonian_id: usize,
    pub n: usize,
    pub m: usize,
    /// Target level, when known.
    pub eigen_index: Option<usize>,
    /// `None` only when the measurement record carries no ground truth.
    pub fidelity: Option<f64>,
    pub abs_fidelity: Option<f64>,
    pub f_final: f64,
    pub grad_norm: f64,
    pub converged: bool,
    pub restarts: usize,
    pub iterations: usize,
    pub ground_prob_final: f64,
    pub first_gap_initial: Option<f64>,
    pub first_gap_final: Option<f64>,
    pub lambda_hat: f64,
    pub state_overlap: Option<f64>,
    pub wall_ms: u64,
    /// Solver seed of this instance.
    pub seed: u64,
}

/// Solves one instance and scores it against its ground truth, if any.
pub fn run_instance(inst: &Instance, solve: &SolveConfig) -> Result<(ResultRow, SolveResult)> {
    let start = Instant::now();
    let cfg = SolveConfig {
        seed: inst.solve_seed,
        ..solve.clone()
    };
    let basis = inst.basis.as_ref();
    let a = &inst.record.a;
    let result = solve_hamiltonian(basis, a, &cfg)?;
    let objective = Objective::new(basis, a)?;
    let initial = objective.diagnostics(&result.x_initial)?;
    let fin = objective.diagnostics(&result.x_opt)?;
    let (fidelity, state_overlap) = match inst.record.truth {
        Some(_) => {
            let r = report(basis, &result, &inst.record)?;
            (Some(r.fidelity), r.state_overlap)
        }
        None => (None, None),
    };
    let row = ResultRow {
        instance_id: inst.instance_id,
        hamiltonian_id: inst.hamiltonian_id,
        n: basis.n_qubits,
        m: basis.len(),
        eigen_index: inst.record.truth.as_ref().map(|t| t.eigen_index),
        fidelity,
        abs_fidelity: fidelity.map(f64::abs),
        f_final: result.f_final,
        grad_norm: result.grad_norm_final,
        converged: result.converged,
        restarts: result.restarts_used,
        iterations: result.iterations_total,
        ground_prob_final: fin.ground_prob,
        first_gap_initial: initial.first_positive_gap(),
        first_gap_final: fin.first_positive_gap(),
        lambda_hat: recover_eigenvalue(&result.x_opt, a)?,
        state_overlap,
        wall_ms: start.elapsed().as_millis() as u64,
        seed: inst.solve_seed,
    };
    Ok((row, result))
}

/// Solves prepared instances in parallel; rows come back in instance order.
pub fn run_instances(instances: &[Instance], solve: &SolveConfig) -> Result<Vec<ResultRow>> {
    instances
        .par_iter()
        .map(|inst| run_instance(inst, solve).map(|(row, _)| row))
        .collect()
}

pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Vec<ResultRow>> {
    let instances = generate_instances(cfg)?;
    run_instances(&instances, &cfg.solve)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HistogramSpec {
    pub low: f64,
    pub high: f64,
    pub bins: usize,
}

impl Default for HistogramSpec {
    fn default() -> Self {
        HistogramSpec {
            low: 0.99,
            high: 1.0,
            bins: 20,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    pub spec: HistogramSpec,
    /// Bin edges, `bins + 1` values.
    pub edges: Vec<f64>,
    pub counts: Vec<usize>,
    pub below: usize,
    pub above: usize,
}

impl Histogram {
    /// Bins are half-open `[lo, hi)` except the last, which includes `high`.
    pub fn new(spec: HistogramSpec, values: &[f64]) -> Result<Self> {
        if spec.bins == 0 || !(spec.low < spec.high) {
            return Err(Error::config("histogram", "need bins >= 1 and low < high"));
        }
        let width = (spec.high - spec.low) / spec.bins as f64;
        let edges = (0..=spec.bins).map(|i| spec.low + width * i as f64).collect();
        let mut counts = vec![0; spec.bins];
        let (mut below, mut above) = (0, 0);
        for &v in values {
            if v < spec.low {
                below += 1;
            } else if v > spec.high {
                above += 1;
            } else {
                let bin = (((v - spec.low) / width) as usize).min(spec.bins - 1);
                counts[bin] += 1;
            }
        }
        Ok(Histogram {
            spec,
            edges,
            counts,
            below,
            above,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub rows: usize,
    /// Rows that carry a fidelity.
    pub scored: usize,
    pub converged: usize,
    pub convergence_rate: f64,
    pub mean_abs_fidelity: Option<f64>,
    pub median_abs_fidelity: Option<f64>,
    pub min_abs_fidelity: Option<f64>,
    pub max_abs_fidelity: Option<f64>,
    pub total_wall_ms: u64,
    pub histogram: Histogram,
}

pub fn summarize(rows: &[ResultRow]) -> Result<Summary> {
    summarize_with(rows, HistogramSpec::default())
}

pub fn summarize_with(rows: &[ResultRow], spec: HistogramSpec) -> Result<Summary> {
    if rows.is_empty() {
        return Err(Error::config("rows", "cannot summarize an empty result table"));
    }
    let mut fids: Vec<f64> = rows.iter().filter_map(|r| r.abs_fidelity).collect();
    fids.sort_by(f64::total_cmp);
    let converged = rows.iter().filter(|r| r.converged).count();
    let (mean, median, min, max) = if fids.is_empty() {
        (None, None, None, None)
    } else {
        let n = fids.len();
        let median = if n % 2 == 1 {
            fids[n / 2]
        } else {
            0.5 * (fids[n / 2 - 1] + fids[n / 2])
        };
        (
            Some(fids.iter().sum::<f64>() / n as f64),
            Some(median),
            Some(fids[0]),
            Some(fids[n - 1]),
        )
    };
    Ok(Summary {
        rows: rows.len(),
        scored: fids.len(),
        converged,
        convergence_rate: converged as f64 / rows.len() as f64,
        mean_abs_fidelity: mean,
        median_abs_fidelity: median,
        min_abs_fidelity: min,
        max_abs_fidelity: max,
        total_wall_ms: rows.iter().map(|r| r.wall_ms).sum(),
        histogram: Histogram::new(spec, &fids)?,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    #[default]
    Jsonl,
    Csv,
}

pub fn write_jsonl<W: Write>(rows: &[ResultRow], mut out: W) -> Result<()> {
    for row in rows {
        serde_json::to_writer(&mut out, row)?;
        out.write_all(b"\n")?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_jsonl<R: BufRead>(input: R) -> Result<Vec<ResultRow>> {
    let mut rows = Vec::new();
    for line in input.lines() {
        let line = line?;
        if !line.trim().is_empty() {
            rows.push(serde_json::from_str(&line)?);
        }
    }
    Ok(rows)
}

pub fn write_csv<W: Write>(rows: &[ResultRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_csv<R: std::io::Read>(input: R) -> Result<Vec<ResultRow>> {
    csv::Reader::from_reader(input)
        .deserialize()
        .map(|r| r.map_err(Error::from))
        .collect()
}

pub fn write_rows<W: Write>(rows: &[ResultRow], format: OutputFormat, out: W) -> Result<()> {
    match format {
        OutputFormat::Jsonl => write_jsonl(rows, out),
        OutputFormat::Csv => write_csv(rows, out),
    }
}

/// Reads a result table, choosing the format from the extension (`.csv` or JSONL otherwise).
pub fn read_rows(path: &Path) -> Result<Vec<ResultRow>> {
    let file = std::fs::File::open(path)?;
    if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv")) {
        read_csv(file)
    } else {
        read_jsonl(std::io::BufReader::new(file))
    }
}

/// JSONL with the timing field removed, for reproducibility comparisons.
pub fn jsonl_without_timing(rows: &[ResultRow]) -> Result<String> {
    let mut out = String::new();
    for row in rows {
        let mut v = serde_json::to_value(row)?;
        if let Some(obj) = v.as_object_mut() {
            obj.remove("wall_ms");
        }
        out.push_str(&serde_json::to_string(&v)?);
        out.push('\n');
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(fid: f64, converged: bool) -> ResultRow {
        ResultRow {
            instance_id: 0,
            hamiltonian_id: 0,
            n: 2,
            m: 1,
            eigen_index: Some(0),
            fidelity: Some(fid),
            abs_fidelity: Some(fid.abs()),
            f_final: 0.0,
            grad_norm: 0.0,
            converged,
            restarts: 1,
            iterations: 1,
            ground_prob_final: 1.0,
            first_gap_initial: None,
            first_gap_final: None,
            lambda_hat: 0.0,
            state_overlap: Some(1.0),
            wall_ms: 3,
            seed: 0,
        }
    }

    #[test]
    fn summary_of_perfect_rows() {
        let s = summarize(&[row(1.0, true), row(1.0, true), row(-1.0, true)]).unwrap();
        assert_eq!(s.mean_abs_fidelity, Some(1.0));
        assert_eq!(s.min_abs_fidelity, Some(1.0));
        assert_eq!(s.histogram.counts.iter().filter(|&&c| c > 0).count(), 1);
        assert_eq!(s.histogram.counts[19], 3);
        assert_eq!(s.convergence_rate, 1.0);
    }

    #[test]
    fn summary_mean_and_median() {
        let s = summarize(&[row(1.0, true), row(0.998, false)]).unwrap();
        assert!((s.mean_abs_fidelity.unwrap() - 0.999).abs() < 1e-15);
        assert!((s.median_abs_fidelity.unwrap() - 0.999).abs() < 1e-15);
        assert_eq!(s.converged, 1);
        assert_eq!(s.convergence_rate, 0.5);
        let s = summarize(&[row(0.5, true), row(0.9, true), row(0.7, true)]).unwrap();
        assert_eq!(s.median_abs_fidelity, Some(0.7));
        assert_eq!(s.histogram.below, 3);
    }

    #[test]
    fn summary_rejects_empty() {
        assert!(summarize(&[]).is_err());
    }

    #[test]
    fn histogram_edges() {
        let h = Histogram::new(HistogramSpec::default(), &[0.99, 0.9905, 1.0, 1.5, 0.2]).unwrap();
        assert_eq!(h.edges.len(), 21);
        assert_eq!(h.counts[0], 1);
        assert_eq!(h.counts[1], 1);
        assert_eq!(h.counts[19], 1);
        assert_eq!((h.below, h.above), (1, 1));
    }

    #[test]
    fn config_validation() {
        let mut cfg = ExperimentConfig::new(Preset::Generic, 3);
        cfg.validate().unwrap();
        cfg.num_instances = 0;
        assert!(matches!(cfg.validate(), Err(Error::InvalidConfig { field, .. }) if field == "num_instances"));

        let mut cfg = ExperimentConfig::new(Preset::Generic, 3);
        cfg.m_terms = None;
        assert!(cfg.validate().is_err());

        let mut cfg = ExperimentConfig::new(Preset::LocalChain, 4);
        cfg.lattice = Some(LatticeSpec::chain(5));
        assert!(matches!(cfg.validate(), Err(Error::InvalidConfig { field, .. }) if field == "lattice"));

        let mut cfg = ExperimentConfig::new(Preset::LocalFull, 3);
        cfg.eigen_index_policy = Some(EigenIndexPolicy::Fixed(8));
        assert!(cfg.validate().is_err());
        cfg.eigen_index_policy = Some(EigenIndexPolicy::Fixed(7));
        cfg.validate().unwrap();

        let cfg = ExperimentConfig::new(Preset::Custom, 0);
        assert!(matches!(cfg.validate(), Err(Error::InvalidConfig { field, .. }) if field == "basis_path"));
    }

    #[test]
    fn config_json() {
        let cfg = ExperimentConfig::from_json(
            r#"{"preset":"level_sweep","n_qubits":3,"num_instances":1,"seed":4,"solve":{"max_restarts":5}}"#,
        )
        .unwrap();
        assert_eq!(cfg.policy(), EigenIndexPolicy::All);
        assert_eq!(cfg.solve.max_restarts, 5);
        assert_eq!(cfg.resolved_lattice().unwrap().edges.len(), 3);
        let cfg = ExperimentConfig::from_json(
            r#"{"preset":"generic","n_qubits":2,"m_terms":2,"eigen_index_policy":{"fixed":1}}"#,
        )
        .unwrap();
        assert_eq!(cfg.policy(), EigenIndexPolicy::Fixed(1));
        assert!(ExperimentConfig::from_json(r#"{"preset":"generic","n_qubits":2,"m_terms":2,"bogus":1}"#).is_err());
        assert!(ExperimentConfig::from_json(r#"{"preset":"generic","n_qubits":2}"#).is_err());
    }

    #[test]
    fn instance_streams_are_independent_of_count() {
        let mut cfg = ExperimentConfig::new(Preset::Generic, 2);
        cfg.num_instances = 2;
        let few = generate_instances(&cfg).unwrap();
        cfg.num_instances = 5;
        let many = generate_instances(&cfg).unwrap();
        for (a, b) in few.iter().zip(&many) {
            assert_eq!(a.record, b.record);
            assert_eq!(a.solve_seed, b.solve_seed);
        }
        assert_ne!(many[0].record.a, many[1].record.a);
    }

    #[test]
    fn level_sweep_covers_every_level() {
        let mut cfg = ExperimentConfig::new(Preset::LevelSweep, 2);
        cfg.seed = 9;
        let inst = generate_instances(&cfg).unwrap();
        assert_eq!(inst.len(), 4);
        let levels: Vec<usize> = inst.iter().map(|i| i.record.truth.as_ref().unwrap().eigen_index).collect();
        assert_eq!(levels, vec![0, 1, 2, 3]);
        assert!(inst.iter().all(|i| Arc::ptr_eq(&i.basis, &inst[0].basis)));
        assert_eq!(inst.iter().map(|i| i.instance_id).collect::<Vec<_>>(), vec![0, 1, 2, 3]);
    }

    #[test]
    fn csv_and_jsonl_roundtrip() {
        let rows = vec![row(0.999, true), row(-0.5, false)];
        let mut buf = Vec::new();
        write_jsonl(&rows, &mut buf).unwrap();
        assert_eq!(read_jsonl(buf.as_slice()).unwrap(), rows);
        let mut buf = Vec::new();
        write_csv(&rows, &mut buf).unwrap();
        assert_eq!(read_csv(buf.as_slice()).unwrap(), rows);
        assert!(!jsonl_without_timing(&rows).unwrap().contains("wall_ms"));
    }
}
