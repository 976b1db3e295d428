//! BFGS with a strong-Wolfe line search, and the random-restart driver that
//! reconstructs Hamiltonian coefficients.

use std::cell::RefCell;

use faer::Mat;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::objective::Objective;
use crate::operators::{validate_measurements, OperatorBasis};

/// Curvature pairs with `s^T y` at or below this are not used to update the inverse Hessian.
pub const CURVATURE_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolveConfig {
    /// Objective value below which a run is accepted.
    pub eps: f64,
    /// Gradient 2-norm below which a run is considered stationary.
    pub eps0: f64,
    pub max_iters: usize,
    pub max_restarts: usize,
    pub init_low: f64,
    pub init_high: f64,
    /// When above 1, restarts multiply their initial draw by a factor taken
    /// log-uniformly from `[1, S]`, where `ln S` rises linearly from 0 to
    /// `ln init_scale_max` over the first `init_scale_ramp` restarts.
    pub init_scale_max: f64,
    pub init_scale_ramp: usize,
    /// Shrinks an initial point whose `K^2` has its first gap above this
    /// value, so no restart begins from an already frozen thermal state.
    pub init_gap_max: Option<f64>,
    pub wolfe_c1: f64,
    pub wolfe_c2: f64,
    /// Objective evaluations allowed per line search.
    pub max_step_halvings: usize,
    pub seed: u64,
}

impl Default for SolveConfig {
    fn default() -> Self {
        SolveConfig {
            eps: 1e-8,
            eps0: 1e-6,
            max_iters: 500,
            max_restarts: 50,
            init_low: -1.0,
            init_high: 1.0,
            init_scale_max: 1.0,
            init_scale_ramp: 0,
            init_gap_max: None,
            wolfe_c1: 1e-4,
            wolfe_c2: 0.9,
            max_step_halvings: 60,
            seed: 0,
        }
    }
}

impl SolveConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = |field: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::config(field, format!("must be a positive finite number, got {v}")))
            }
        };
        positive("solve.eps", self.eps)?;
        positive("solve.eps0", self.eps0)?;
        if !(0.0 < self.wolfe_c1 && self.wolfe_c1 < self.wolfe_c2 && self.wolfe_c2 < 1.0) {
            return Err(Error::config(
                "solve.wolfe_c1",
                format!(
                    "need 0 < wolfe_c1 < wolfe_c2 < 1, got c1 = {}, c2 = {}",
                    self.wolfe_c1, self.wolfe_c2
                ),
            ));
        }
        if !(self.init_low < self.init_high) || !self.init_low.is_finite() || !self.init_high.is_finite() {
            return Err(Error::config("solve.init_low", "init_low must be below init_high"));
        }
        if !(self.init_scale_max >= 1.0 && self.init_scale_max.is_finite()) {
            return Err(Error::config(
                "solve.init_scale_max",
                format!("must be a finite number >= 1, got {}", self.init_scale_max),
            ));
        }
        if let Some(g) = self.init_gap_max {
            positive("solve.init_gap_max", g)?;
        }
        for (field, v) in [
            ("solve.max_iters", self.max_iters),
            ("solve.max_restarts", self.max_restarts),
            ("solve.max_step_halvings", self.max_step_halvings),
        ] {
            if v == 0 {
                return Err(Error::config(field, "must be >= 1"));
            }
        }
        Ok(())
    }

    fn bfgs_options(&self) -> BfgsOptions {
        BfgsOptions {
            grad_tol: self.eps0,
            f_target: Some(self.eps),
            max_iters: self.max_iters,
            c1: self.wolfe_c1,
            c2: self.wolfe_c2,
            max_line_search_evals: self.max_step_halvings,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BfgsOptions {
    pub grad_tol: f64,
    /// Stop as soon as the objective drops below this value.
    pub f_target: Option<f64>,
    pub max_iters: usize,
    pub c1: f64,
    pub c2: f64,
    pub max_line_search_evals: usize,
}

impl Default for BfgsOptions {
    fn default() -> Self {
        SolveConfig::default().bfgs_options()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BfgsStatus {
    Stationary,
    TargetReached,
    MaxIterations,
    LineSearchFailed,
}

#[derive(Clone, Debug)]
pub struct BfgsOutcome {
    pub x: Vec<f64>,
    pub f: f64,
    pub grad: Vec<f64>,
    pub grad_norm: f64,
    pub iterations: usize,
    pub status: BfgsStatus,
    /// Final inverse-Hessian approximation.
    pub inverse_hessian: Mat<f64>,
}

impl BfgsOutcome {
    pub fn is_stationary(&self) -> bool {
        self.status == BfgsStatus::Stationary
    }
}

/// State after an accepted step, reported to the observer.
#[derive(Clone, Debug)]
pub struct IterationInfo<'a> {
    pub iteration: usize,
    pub x: &'a [f64],
    pub f: f64,
    pub grad_norm: f64,
    pub step: f64,
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn mat_vec(m: &Mat<f64>, v: &[f64]) -> Vec<f64> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| m[(i, j)] * v[j]).sum())
        .collect()
}

struct Probe {
    alpha: f64,
    f: f64,
    grad: Vec<f64>,
    slope: f64,
}

/// Minimizes `fg` (returning value and gradient) from `x0`.
pub fn bfgs_minimize<F>(mut fg: F, x0: &[f64], opts: &BfgsOptions) -> Result<BfgsOutcome>
where
    F: FnMut(&[f64]) -> Result<(f64, Vec<f64>)>,
{
    bfgs_minimize_observed(&mut fg, x0, opts, &mut |_| {})
}

pub fn bfgs_minimize_observed<F>(
    fg: &mut F,
    x0: &[f64],
    opts: &BfgsOptions,
    observer: &mut dyn FnMut(&IterationInfo),
) -> Result<BfgsOutcome>
where
    F: FnMut(&[f64]) -> Result<(f64, Vec<f64>)>,
{
    let n = x0.len();
    if x0.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite);
    }
    let mut x = x0.to_vec();
    let (mut f, mut g) = fg(&x)?;
    if g.len() != n {
        return Err(Error::LengthMismatch { expected: n, got: g.len() });
    }
    let mut h_inv = Mat::<f64>::identity(n, n);
    let mut scaled = false;
    let mut iterations = 0;

    let status = loop {
        if opts.f_target.is_some_and(|t| f < t) {
            break BfgsStatus::TargetReached;
        }
        if norm(&g) < opts.grad_tol {
            break BfgsStatus::Stationary;
        }
        if iterations >= opts.max_iters {
            break BfgsStatus::MaxIterations;
        }

        let mut p: Vec<f64> = mat_vec(&h_inv, &g).iter().map(|v| -v).collect();
        if dot(&p, &g) >= 0.0 {
            h_inv = Mat::identity(n, n);
            p = g.iter().map(|v| -v).collect();
        }
        let initial_step = if iterations == 0 {
            (1.0 / norm(&g)).min(1.0)
        } else {
            1.0
        };

        let Some(probe) = line_search(fg, &x, f, &g, &p, initial_step, opts)? else {
            break BfgsStatus::LineSearchFailed;
        };

        let s: Vec<f64> = p.iter().map(|pi| probe.alpha * pi).collect();
        let y: Vec<f64> = probe.grad.iter().zip(&g).map(|(a, b)| a - b).collect();
        let sy = dot(&s, &y);
        if sy > CURVATURE_TOL {
            if !scaled {
                let gamma = sy / dot(&y, &y);
                h_inv = Mat::from_fn(n, n, |i, j| if i == j { gamma } else { 0.0 });
                scaled = true;
            }
            let rho = 1.0 / sy;
            let hy = mat_vec(&h_inv, &y);
            let yhy = dot(&y, &hy);
            // (I - rho s y^T) H (I - rho y s^T) + rho s s^T, expanded
            let updated = Mat::from_fn(n, n, |i, j| {
                h_inv[(i, j)] + (rho * rho * yhy + rho) * s[i] * s[j] - rho * (hy[i] * s[j] + s[i] * hy[j])
            });
            h_inv = Mat::from_fn(n, n, |i, j| 0.5 * (updated[(i, j)] + updated[(j, i)]));
        }

        for (xi, si) in x.iter_mut().zip(&s) {
            *xi += si;
        }
        f = probe.f;
        g = probe.grad;
        iterations += 1;
        observer(&IterationInfo {
            iteration: iterations,
            x: &x,
            f,
            grad_norm: norm(&g),
            step: probe.alpha,
        });
    };

    Ok(BfgsOutcome {
        grad_norm: norm(&g),
        x,
        f,
        grad: g,
        iterations,
        status,
        inverse_hessian: h_inv,
    })
}

/// Strong-Wolfe line search with cubic-interpolation zoom.
///
/// Returns `None` when no step with sufficient decrease was found within the
/// evaluation budget.
fn line_search<F>(
    fg: &mut F,
    x: &[f64],
    f0: f64,
    g0: &[f64],
    p: &[f64],
    initial_step: f64,
    opts: &BfgsOptions,
) -> Result<Option<Probe>>
where
    F: FnMut(&[f64]) -> Result<(f64, Vec<f64>)>,
{
    let slope0 = dot(g0, p);
    let mut evals = 0;
    let mut probe = |alpha: f64, evals: &mut usize| -> Result<Probe> {
        *evals += 1;
        let trial: Vec<f64> = x.iter().zip(p).map(|(xi, pi)| xi + alpha * pi).collect();
        let (f, grad) = fg(&trial)?;
        let f = if f.is_finite() { f } else { f64::INFINITY };
        let slope = dot(&grad, p);
        Ok(Probe { alpha, f, grad, slope })
    };
    let armijo = |pr: &Probe| pr.f <= f0 + opts.c1 * pr.alpha * slope0;
    let curvature = |pr: &Probe| pr.slope.abs() <= -opts.c2 * slope0;

    let start = Probe {
        alpha: 0.0,
        f: f0,
        grad: g0.to_vec(),
        slope: slope0,
    };
    let mut prev = start;
    let mut alpha = initial_step;
    let (mut lo, mut hi) = loop {
        if evals >= opts.max_line_search_evals {
            return Ok(accept_if_decreasing(prev, f0));
        }
        let cur = probe(alpha, &mut evals)?;
        if !armijo(&cur) || (prev.alpha > 0.0 && cur.f >= prev.f) {
            break (prev, cur);
        }
        if curvature(&cur) {
            return Ok(Some(cur));
        }
        if cur.slope >= 0.0 {
            break (cur, prev);
        }
        alpha = 2.0 * cur.alpha;
        prev = cur;
    };

    loop {
        if evals >= opts.max_line_search_evals {
            return Ok(accept_if_decreasing(lo, f0));
        }
        let alpha = interpolate(&lo, &hi);
        let cur = probe(alpha, &mut evals)?;
        if !armijo(&cur) || cur.f >= lo.f {
            hi = cur;
        } else {
            if curvature(&cur) {
                return Ok(Some(cur));
            }
            if cur.slope * (hi.alpha - lo.alpha) >= 0.0 {
                hi = lo;
            }
            lo = cur;
        }
        if (hi.alpha - lo.alpha).abs() <= f64::EPSILON * lo.alpha.abs().max(1.0) {
            return Ok(accept_if_decreasing(lo, f0));
        }
    }
}

fn accept_if_decreasing(candidate: Probe, f0: f64) -> Option<Probe> {
    (candidate.alpha > 0.0 && candidate.f < f0).then_some(candidate)
}

/// Minimizer of the cubic matching values and slopes at both ends, kept away from the endpoints.
fn interpolate(a: &Probe, b: &Probe) -> f64 {
    let (lo, hi) = (a.alpha.min(b.alpha), a.alpha.max(b.alpha));
    let width = hi - lo;
    let d1 = a.slope + b.slope - 3.0 * (a.f - b.f) / (a.alpha - b.alpha);
    let disc = d1 * d1 - a.slope * b.slope;
    let candidate = if disc >= 0.0 && a.f.is_finite() && b.f.is_finite() {
        let d2 = (b.alpha - a.alpha).signum() * disc.sqrt();
        b.alpha - (b.alpha - a.alpha) * (b.slope + d2 - d1) / (b.slope - a.slope + 2.0 * d2)
    } else {
        f64::NAN
    };
    let margin = 0.05 * width;
    if candidate.is_finite() && candidate >= lo + margin && candidate <= hi - margin {
        candidate
    } else if candidate.is_finite() && candidate > lo && candidate < hi {
        candidate.clamp(lo + margin, hi - margin)
    } else {
        0.5 * (lo + hi)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceSample {
    pub restart: usize,
    pub iteration: usize,
    pub f: f64,
    pub grad_norm: f64,
    pub ground_prob: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolveResult {
    pub x_opt: Vec<f64>,
    /// Initial point of the run that produced `x_opt`.
    pub x_initial: Vec<f64>,
    pub f_final: f64,
    pub grad_norm_final: f64,
    /// Number of random initializations tried (at least 1).
    pub restarts_used: usize,
    pub iterations_total: usize,
    pub converged: bool,
    pub status: BfgsStatus,
    pub trace: Vec<TraceSample>,
}

fn init_scale(cfg: &SolveConfig, restart: usize, rng: &mut ChaCha8Rng) -> f64 {
    if cfg.init_scale_max <= 1.0 {
        return 1.0;
    }
    let ramp = if cfg.init_scale_ramp == 0 {
        1.0
    } else {
        (restart as f64 / cfg.init_scale_ramp as f64).min(1.0)
    };
    let top = ramp * cfg.init_scale_max.ln();
    if top > 0.0 {
        rng.random_range(0.0..top).exp()
    } else {
        1.0
    }
}

/// Random-restart BFGS reconstruction of `c` (up to scale and sign) from measurements `a`.
pub fn solve_hamiltonian(basis: &OperatorBasis, a: &[f64], cfg: &SolveConfig) -> Result<SolveResult> {
    cfg.validate()?;
    validate_measurements(basis, a)?;
    let objective = Objective::new(basis, a)?;
    let m = basis.len();
    let opts = cfg.bfgs_options();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);

    let last_ground_prob: RefCell<Option<(Vec<f64>, f64)>> = RefCell::new(None);
    let mut fg = |x: &[f64]| -> Result<(f64, Vec<f64>)> {
        let e = objective.value_and_gradient(x)?;
        *last_ground_prob.borrow_mut() = Some((x.to_vec(), e.ground_prob));
        Ok((e.f, e.grad))
    };

    let mut trace = Vec::new();
    let mut best: Option<(BfgsOutcome, Vec<f64>)> = None;
    let mut iterations_total = 0;
    let mut restarts_used = 0;

    for restart in 0..cfg.max_restarts {
        restarts_used += 1;
        let scale = init_scale(cfg, restart, &mut rng);
        let mut x0: Vec<f64> = (0..m)
            .map(|_| scale * rng.random_range(cfg.init_low..cfg.init_high))
            .collect();
        if let Some(cap) = cfg.init_gap_max {
            // gaps of K(s x)^2 scale as s^2
            if let Some(gap) = objective.diagnostics(&x0)?.first_positive_gap() {
                if gap > cap {
                    let shrink = (cap / gap).sqrt();
                    x0.iter_mut().for_each(|v| *v *= shrink);
                }
            }
        }
        let start_prob = objective.value_and_gradient(&x0)?;
        trace.push(TraceSample {
            restart,
            iteration: 0,
            f: start_prob.f,
            grad_norm: norm(&start_prob.grad),
            ground_prob: start_prob.ground_prob,
        });
        let mut observer = |info: &IterationInfo| {
            let cached = last_ground_prob.borrow();
            let ground_prob = match cached.as_ref() {
                Some((x, p)) if x.as_slice() == info.x => *p,
                // the accepted probe was not the last one evaluated
                _ => objective
                    .value_and_gradient(info.x)
                    .map_or(f64::NAN, |e| e.ground_prob),
            };
            trace.push(TraceSample {
                restart,
                iteration: info.iteration,
                f: info.f,
                grad_norm: info.grad_norm,
                ground_prob,
            });
        };
        let outcome = bfgs_minimize_observed(&mut fg, &x0, &opts, &mut observer)?;
        iterations_total += outcome.iterations;
        let done = outcome.f < cfg.eps;
        if best.as_ref().is_none_or(|(b, _)| outcome.f < b.f) {
            best = Some((outcome, x0));
        }
        if done {
            break;
        }
    }

    let (outcome, x_initial) = best.expect("max_restarts >= 1");
    Ok(SolveResult {
        converged: outcome.f < cfg.eps,
        x_opt: outcome.x,
        x_initial,
        f_final: outcome.f,
        grad_norm_final: outcome.grad_norm,
        restarts_used,
        iterations_total,
        status: outcome.status,
        trace,
    })
}
