//! Numerical search for SIC fiducials.
//!
//! Minimizes the frame potential of the Weyl–Heisenberg orbit over unit
//! vectors with projected gradient descent and backtracking, restarting
//! from seeded random points until an orbit meets the target residual.
//!
//! On the unit sphere the frame potential equals its minimum plus
//! d² Σ_{(a,b)≠(0,0)} (|⟨ψ|D_{a,b}|ψ⟩|² − 1/(d+1))². The descent compares
//! candidates by this gap.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::C64;
use crate::quantum::{random_unit_vector, HilbertDim};
use crate::sic::{
    displace, displace_adjoint, frame_potential_minimum, frame_potential_of, orbit, verify_sic,
    Fiducial,
};

/// Armijo sufficient-decrease constant.
const ARMIJO: f64 = 1e-4;
/// Upper bound on spectral trial steps.
const MAX_STEP: f64 = 1e6;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StepPolicy {
    pub initial: f64,
    pub shrink: f64,
    pub min_step: f64,
}

impl Default for StepPolicy {
    fn default() -> Self {
        Self {
            initial: 0.1,
            shrink: 0.5,
            min_step: 1e-12,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SearchConfig {
    pub dim: HilbertDim,
    pub max_restarts: usize,
    pub max_iterations: usize,
    pub target_residual: f64,
    pub seed: u64,
    pub step: StepPolicy,
}

impl SearchConfig {
    pub fn new(dim: HilbertDim, seed: u64) -> Self {
        Self {
            dim,
            max_restarts: 64,
            max_iterations: 20_000,
            target_residual: 1e-9,
            seed,
            step: StepPolicy::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.max_restarts < 1 {
            return Err(Error::InvalidConfig(
                "max_restarts must be at least 1".into(),
            ));
        }
        if self.max_iterations < 1 {
            return Err(Error::InvalidConfig(
                "max_iterations must be at least 1".into(),
            ));
        }
        if !(self.target_residual > 0.0) || !self.target_residual.is_finite() {
            return Err(Error::InvalidConfig(
                "target_residual must be positive".into(),
            ));
        }
        let s = &self.step;
        if !(s.initial > 0.0 && s.min_step > 0.0 && s.min_step <= s.initial) {
            return Err(Error::InvalidConfig(
                "step sizes must satisfy 0 < min_step <= initial".into(),
            ));
        }
        if !(s.shrink > 0.0 && s.shrink < 1.0) {
            return Err(Error::InvalidConfig(
                "shrink factor must lie in (0, 1)".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SearchStatus {
    Found,
    NotFound,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SearchResult {
    pub dim: HilbertDim,
    pub status: SearchStatus,
    /// Present only when `status` is `Found`.
    pub fiducial: Option<Fiducial>,
    /// Orbit residual of the winning restart, or of the best restart when nothing was found.
    pub residual: f64,
    /// Achieved frame potential minus its theoretical minimum.
    pub frame_potential_gap: f64,
    pub restarts_used: usize,
    pub iterations_used: usize,
    pub seed: u64,
}

/// Result of one descent from a starting fiducial.
#[derive(Clone, Debug, PartialEq)]
pub struct LocalMinimum {
    pub fiducial: Fiducial,
    pub frame_potential: f64,
    pub frame_potential_gap: f64,
    /// Orbit residual computed from the WH overlaps.
    pub residual: f64,
    pub iterations: usize,
    /// Frame potential after every accepted step, starting with the input.
    pub accepted: Vec<f64>,
}

/// Overlap data at one point of the sphere.
struct Evaluation {
    overlaps: Vec<C64>,
    gap: f64,
    residual: f64,
}

fn evaluate(psi: &[C64]) -> Evaluation {
    let d = psi.len();
    let target = 1.0 / (d as f64 + 1.0);
    let mut overlaps = Vec::with_capacity(d * d);
    let mut sum = 0.0;
    let mut residual: f64 = 0.0;
    for a in 0..d {
        for b in 0..d {
            let shifted = displace(a, b, psi);
            let c: C64 = psi.iter().zip(&shifted).map(|(x, y)| x.conj() * y).sum();
            if a != 0 || b != 0 {
                let dev = c.norm_sqr() - target;
                sum += dev * dev;
                residual = residual.max(dev.abs());
            } else {
                residual = residual.max((c.norm_sqr() - 1.0).abs());
            }
            overlaps.push(c);
        }
    }
    Evaluation {
        overlaps,
        gap: (d * d) as f64 * sum,
        residual,
    }
}

fn gradient_with(psi: &[C64], overlaps: &[C64]) -> Vec<C64> {
    let d = psi.len();
    let scale = 4.0 * (d * d) as f64;
    let mut grad = vec![C64::new(0.0, 0.0); d];
    for a in 0..d {
        for b in 0..d {
            if a == 0 && b == 0 {
                continue;
            }
            let c = overlaps[a * d + b];
            let weight = c.norm_sqr();
            let forward = displace(a, b, psi);
            let backward = displace_adjoint(a, b, psi);
            for k in 0..d {
                grad[k] += weight * (c.conj() * forward[k] + c * backward[k]);
            }
        }
    }
    grad.iter_mut().for_each(|g| *g *= scale);
    grad
}

/// Analytic gradient of [`frame_potential_of`] with respect to the 2d real
/// coordinates: entry k packs (∂F/∂Re ψ_k) + i (∂F/∂Im ψ_k).
pub fn frame_potential_gradient(psi: &[C64]) -> Vec<C64> {
    gradient_with(psi, &evaluate(psi).overlaps)
}

fn real_dot(a: &[C64], b: &[C64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.re * y.re + x.im * y.im)
        .sum()
}

fn normalize(v: &mut [C64]) {
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    v.iter_mut().for_each(|z| *z /= norm);
}

struct Descent {
    psi: Vec<C64>,
    eval: Evaluation,
    iterations: usize,
    accepted: Vec<f64>,
}

/// Barzilai–Borwein trial step ⟨s,s⟩/⟨s,y⟩ from the last two iterates,
/// or `None` when the curvature estimate is not positive.
fn spectral_step(psi: &[C64], grad: &[C64], prev_psi: &[C64], prev_grad: &[C64]) -> Option<f64> {
    let s: Vec<C64> = psi.iter().zip(prev_psi).map(|(a, b)| a - b).collect();
    let y: Vec<C64> = grad.iter().zip(prev_grad).map(|(a, b)| a - b).collect();
    let sy = real_dot(&s, &y);
    let ss = real_dot(&s, &s);
    (sy > 0.0 && ss > 0.0).then(|| (ss / sy).min(MAX_STEP))
}

/// Projected gradient descent with backtracking. Each iteration starts
/// from a spectral trial step (the initial step on the first iteration)
/// and halves it until the Armijo condition holds. Stops when the orbit
/// residual reaches `config.target_residual`, the step underflows
/// `min_step`, or `max_iterations` iterations have run.
fn descend(start: &[C64], config: &SearchConfig, track: bool) -> Descent {
    let dim = config.dim;
    let f_min = frame_potential_minimum(dim);
    let mut psi = start.to_vec();
    normalize(&mut psi);
    let mut eval = evaluate(&psi);
    let mut accepted = Vec::new();
    if track {
        accepted.push(f_min + eval.gap);
    }
    let policy = config.step;
    let mut step = policy.initial;
    let mut iterations = 0;
    let mut previous: Option<(Vec<C64>, Vec<C64>)> = None;

    while iterations < config.max_iterations && eval.residual > config.target_residual {
        iterations += 1;
        let mut grad = gradient_with(&psi, &eval.overlaps);
        let radial = real_dot(&psi, &grad);
        for (g, p) in grad.iter_mut().zip(&psi) {
            *g -= p * radial;
        }
        let grad_sq = real_dot(&grad, &grad);
        if grad_sq == 0.0 || !grad_sq.is_finite() {
            break;
        }

        if let Some((prev_psi, prev_grad)) = &previous {
            step = spectral_step(&psi, &grad, prev_psi, prev_grad).unwrap_or(step / policy.shrink);
        }
        previous = Some((psi.clone(), grad.clone()));

        let mut moved = false;
        while step >= policy.min_step {
            let mut trial: Vec<C64> = psi.iter().zip(&grad).map(|(p, g)| p - g * step).collect();
            normalize(&mut trial);
            let trial_eval = evaluate(&trial);
            if trial_eval.gap <= eval.gap - ARMIJO * step * grad_sq {
                psi = trial;
                eval = trial_eval;
                if track {
                    accepted.push(f_min + eval.gap);
                }
                moved = true;
                break;
            }
            step *= policy.shrink;
        }
        if !moved {
            break;
        }
    }

    Descent {
        psi,
        eval,
        iterations,
        accepted,
    }
}

/// Runs one descent from `start`; the returned fiducial is unit norm and gauge fixed.
pub fn local_minimize(start: &Fiducial, config: &SearchConfig) -> LocalMinimum {
    let run = descend(start.vector(), config, true);
    let fiducial = Fiducial::normalized(run.psi).expect("descent keeps the vector on the sphere");
    LocalMinimum {
        frame_potential: frame_potential_of(fiducial.vector()),
        frame_potential_gap: run.eval.gap,
        residual: run.eval.residual,
        iterations: run.iterations,
        accepted: run.accepted,
        fiducial,
    }
}

struct RestartOutcome {
    fiducial: Fiducial,
    residual: f64,
    gap: f64,
    iterations: usize,
    found: bool,
}

/// One seeded descent. A start that reaches the target is polished by
/// continuing the descent with no target until it stalls.
fn run_restart(config: &SearchConfig, restart: usize) -> RestartOutcome {
    let start = random_unit_vector(config.dim, config.seed.wrapping_add(restart as u64));
    let mut run = descend(&start, config, false);
    if run.eval.residual <= config.target_residual {
        let polish_config = SearchConfig {
            target_residual: 0.0,
            ..config.clone()
        };
        let polished = descend(&run.psi, &polish_config, false);
        let extra = polished.iterations;
        if polished.eval.residual <= run.eval.residual {
            run = Descent {
                iterations: run.iterations + extra,
                ..polished
            };
        } else {
            run.iterations += extra;
        }
    }
    let fiducial = Fiducial::normalized(run.psi).expect("descent keeps the vector on the sphere");
    let mut residual = run.eval.residual;
    let mut found = false;
    if residual <= config.target_residual {
        // Certify on the explicit projectors, not just the overlap shortcut.
        let report =
            verify_sic(orbit(&fiducial).projectors(), config.dim).expect("orbit is well formed");
        residual = report.residual;
        found = report.residual <= config.target_residual;
    }
    RestartOutcome {
        fiducial,
        residual,
        gap: run.eval.gap,
        iterations: run.iterations,
        found,
    }
}

/// Searches with one worker per available CPU.
pub fn search(config: &SearchConfig) -> Result<SearchResult> {
    let jobs = std::thread::available_parallelism()
        .map(|n| n.get())
        .unwrap_or(1);
    search_with_jobs(config, jobs)
}

/// Searches with at most `jobs` restarts in flight.
///
/// The lowest-indexed restart that reaches the target wins, and the counts
/// in the result cover exactly restarts `0..=winner`, so the outcome does
/// not depend on `jobs` or on scheduling.
pub fn search_with_jobs(config: &SearchConfig, jobs: usize) -> Result<SearchResult> {
    config.validate()?;
    let jobs = jobs.max(1);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| Error::InvalidConfig(format!("cannot start worker pool: {e}")))?;

    let mut iterations_used = 0;
    let mut best: Option<RestartOutcome> = None;
    let mut next = 0;
    while next < config.max_restarts {
        let batch_end = (next + jobs).min(config.max_restarts);
        let outcomes: Vec<RestartOutcome> = pool.install(|| {
            (next..batch_end)
                .into_par_iter()
                .map(|r| run_restart(config, r))
                .collect()
        });
        for (offset, outcome) in outcomes.into_iter().enumerate() {
            iterations_used += outcome.iterations;
            if outcome.found {
                return Ok(SearchResult {
                    dim: config.dim,
                    status: SearchStatus::Found,
                    residual: outcome.residual,
                    frame_potential_gap: outcome.gap,
                    fiducial: Some(outcome.fiducial),
                    restarts_used: next + offset + 1,
                    iterations_used,
                    seed: config.seed,
                });
            }
            if best.as_ref().is_none_or(|b| outcome.residual < b.residual) {
                best = Some(outcome);
            }
        }
        next = batch_end;
    }

    let best = best.expect("at least one restart ran");
    Ok(SearchResult {
        dim: config.dim,
        status: SearchStatus::NotFound,
        fiducial: None,
        residual: best.residual,
        frame_potential_gap: best.gap,
        restarts_used: config.max_restarts,
        iterations_used,
        seed: config.seed,
    })
}
