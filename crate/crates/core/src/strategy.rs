//! Execution of the estimation strategies and seeded Monte Carlo phase
//! estimation.
//!
//! Every round of a scaling experiment draws from its own [`ChaCha8Rng`]
//! stream, seeded by `seed ⊕ hash(strategy, N, round)` (see
//! [`crate::random::derive_seed`]). Rounds may run on any number of threads;
//! the report depends only on the configuration.
//!
//! [`ChaCha8Rng`]: rand_chacha::ChaCha8Rng

use std::f64::consts::PI;

use rand::Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::information::{crb, time_advantage};
use crate::linalg::{apply_product, ComplexMatrix, ComplexVector};
use crate::random::{derive_seed, rng_from_seed};
use crate::states::{ghz_state, phased_plus, u_phi, Generator, StrategyKind, StrategySpec};

/// `U_φ^n |initial>`, applying the box `n` times.
pub fn evolve_sequential(
    h: &Generator,
    phi: f64,
    n: usize,
    initial: &ComplexVector,
) -> Result<ComplexVector> {
    if h.dim() != initial.dim() {
        return Err(Error::DimensionMismatch(format!(
            "generator of dim {} on a probe of dim {}",
            h.dim(),
            initial.dim()
        )));
    }
    let u = u_phi(h, phi);
    (0..n).try_fold(initial.clone(), |psi, _| u.apply(&psi))
}

/// `U_φ^{⊗n}` applied factor by factor to the GHZ state with phase `lambda`.
pub fn evolve_parallel_entangled(
    h: &Generator,
    phi: f64,
    n: usize,
    lambda: f64,
) -> Result<ComplexVector> {
    let u = u_phi(&h.qubit_restriction(), phi);
    apply_product(&ghz_state(n, lambda)?, &vec![u; n])
}

/// `W† U'_φ V†` with `U'_φ = W e^{iφH} V`.
pub fn corrected_box(w: &ComplexMatrix, v: &ComplexMatrix, h: &Generator, phi: f64) -> Result<ComplexMatrix> {
    let u_prime = w.matmul(&u_phi(&h.qubit_restriction(), phi))?.matmul(v)?;
    w.adjoint().matmul(&u_prime)?.matmul(&v.adjoint())
}

/// Born probability `|<initial|final>|²` of returning to the initial state.
pub fn coincidence_probability(final_state: &ComplexVector, initial: &ComplexVector) -> Result<f64> {
    Ok(initial.inner(final_state)?.norm_sqr().clamp(0.0, 1.0))
}

/// Per-repetition coincidence probability of a strategy at phase `phi`.
/// For the classical strategy this is the single-probe probability.
pub fn strategy_probability(strategy: &StrategySpec, phi: f64) -> Result<f64> {
    let h = strategy.generator().qubit_restriction();
    let n = strategy.n_probes();
    let lambda = strategy.lambda();
    match strategy.kind() {
        StrategyKind::Sequential => {
            let init = phased_plus(lambda);
            coincidence_probability(&evolve_sequential(&h, phi, n, &init)?, &init)
        }
        StrategyKind::ClassicalParallel => {
            let init = phased_plus(lambda);
            coincidence_probability(&evolve_sequential(&h, phi, 1, &init)?, &init)
        }
        StrategyKind::EntangledParallel => coincidence_probability(
            &evolve_parallel_entangled(&h, phi, n, lambda)?,
            &ghz_state(n, lambda)?,
        ),
        StrategyKind::GeneralizedEntangled { w, v } => {
            let boxed = corrected_box(w, v, &h, phi)?;
            let init = ghz_state(n, lambda)?;
            coincidence_probability(&apply_product(&init, &vec![boxed; n])?, &init)
        }
    }
}

/// Outcome counts of one batch of repetitions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrialRecord {
    /// One entry per probe for the classical strategy, a single entry otherwise.
    pub successes_per_probe: Vec<u64>,
    pub trials_per_probe: u64,
}

impl TrialRecord {
    pub fn successes(&self) -> u64 {
        self.successes_per_probe.iter().sum()
    }

    pub fn trials(&self) -> u64 {
        self.trials_per_probe * self.successes_per_probe.len() as u64
    }
}

fn draw_trials(p: f64, probes: usize, nu: u64, seed: u64) -> TrialRecord {
    let mut rng = rng_from_seed(seed);
    let successes_per_probe = (0..probes)
        .map(|_| (0..nu).filter(|_| rng.random::<f64>() < p).count() as u64)
        .collect();
    TrialRecord {
        successes_per_probe,
        trials_per_probe: nu,
    }
}

fn probes_drawn(strategy: &StrategySpec) -> usize {
    match strategy.kind() {
        StrategyKind::ClassicalParallel => strategy.n_probes(),
        _ => 1,
    }
}

/// `nu` Bernoulli repetitions at `phi_true`; the classical strategy draws
/// `N·nu` single-probe trials.
pub fn run_trials(strategy: &StrategySpec, phi_true: f64, nu: u64, seed: u64) -> Result<TrialRecord> {
    if nu == 0 {
        return Err(Error::OutOfRange("nu must be at least 1".into()));
    }
    let p = strategy_probability(strategy, phi_true)?;
    Ok(draw_trials(p, probes_drawn(strategy), nu, seed))
}

/// Inverts `k/ν = cos²(nφ/2)` on the branch `[0, π/n]`.
pub fn estimate_phase(k: u64, nu: u64, n: usize) -> f64 {
    let n = n.max(1) as f64;
    let ratio = if nu == 0 { 0.0 } else { (k as f64 / nu as f64).clamp(0.0, 1.0) };
    ((2.0 / n) * ratio.sqrt().acos()).clamp(0.0, PI / n)
}

/// Configuration of a scaling experiment over several probe counts.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    /// Template strategy; its probe count is replaced by each entry of `n_values`.
    pub strategy: StrategySpec,
    /// `None` selects the per-N operating point `π/(2 N Δ)`.
    pub phi_true: Option<f64>,
    pub nu: u64,
    pub rounds: usize,
    pub seed: u64,
    pub n_values: Vec<usize>,
}

impl ExperimentConfig {
    pub fn new(strategy: StrategySpec, n_values: Vec<usize>, nu: u64, rounds: usize, seed: u64) -> Self {
        Self {
            strategy,
            phi_true: None,
            nu,
            rounds,
            seed,
            n_values,
        }
    }

    /// Operating point for `n` probes.
    pub fn phi_for(&self, n: usize) -> f64 {
        self.phi_true
            .unwrap_or_else(|| PI / (2.0 * n as f64 * self.strategy.generator().gap()))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScalingRow {
    pub strategy: &'static str,
    pub n: usize,
    pub nu: u64,
    pub rounds: usize,
    pub phi_true: f64,
    pub empirical_rmse: f64,
    /// Delta-method standard error of `empirical_rmse`.
    pub rmse_stderr: f64,
    pub crb: f64,
    pub time_advantage: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScalingReport {
    pub strategy: &'static str,
    pub seed: u64,
    pub rows: Vec<ScalingRow>,
    /// OLS slope of `ln RMSE` against `ln N`.
    pub fitted_slope: f64,
    pub slope_stderr: f64,
}

/// Runs `rounds` independent estimation rounds per probe count and fits the
/// log-log error scaling.
pub fn scaling_experiment(cfg: &ExperimentConfig) -> Result<ScalingReport> {
    let mut ns = cfg.n_values.clone();
    ns.sort_unstable();
    ns.dedup();
    if ns.len() < 3 {
        return Err(Error::OutOfRange(format!(
            "a scaling fit needs at least 3 distinct N values, got {:?}",
            cfg.n_values
        )));
    }
    if ns[0] == 0 {
        return Err(Error::OutOfRange("N values must be positive".into()));
    }
    if cfg.nu == 0 || cfg.rounds < 2 {
        return Err(Error::OutOfRange("need nu >= 1 and rounds >= 2".into()));
    }
    let gap = cfg.strategy.generator().gap();
    let rows = ns
        .iter()
        .map(|&n| scaling_row(cfg, n, gap))
        .collect::<Result<Vec<_>>>()?;
    let (fitted_slope, slope_stderr) = fit_log_log(&rows)?;
    Ok(ScalingReport {
        strategy: cfg.strategy.tag(),
        seed: cfg.seed,
        rows,
        fitted_slope,
        slope_stderr,
    })
}

fn scaling_row(cfg: &ExperimentConfig, n: usize, gap: f64) -> Result<ScalingRow> {
    let spec = cfg.strategy.with_probes(n)?;
    let phi = cfg.phi_for(n);
    let is_classical = matches!(spec.kind(), StrategyKind::ClassicalParallel);
    let phase_multiplier = if is_classical { 1 } else { n };
    let accrued = phase_multiplier as f64 * phi * gap;
    if !(accrued > 0.0 && accrued < PI) {
        return Err(Error::OutOfRange(format!(
            "operating point N·φ·Δ = {accrued} lies outside (0, π) for N = {n}"
        )));
    }

    let p = strategy_probability(&spec, phi)?;
    let probes = probes_drawn(&spec);
    let ordinal = spec.kind().ordinal();
    let sq_errors: Vec<f64> = (0..cfg.rounds)
        .into_par_iter()
        .map(|round| {
            let seed = derive_seed(cfg.seed, &[ordinal, n as u64, round as u64]);
            let rec = draw_trials(p, probes, cfg.nu, seed);
            let phi_hat = estimate_phase(rec.successes(), rec.trials(), phase_multiplier) / gap;
            (phi_hat - phi).powi(2)
        })
        .collect();

    let r = sq_errors.len() as f64;
    let mse = sq_errors.iter().sum::<f64>() / r;
    let var = sq_errors.iter().map(|e| (e - mse).powi(2)).sum::<f64>() / (r - 1.0);
    let rmse = mse.sqrt();
    let rmse_stderr = if rmse > 0.0 {
        (var / r).sqrt() / (2.0 * rmse)
    } else {
        0.0
    };
    Ok(ScalingRow {
        strategy: spec.tag(),
        n,
        nu: cfg.nu,
        rounds: cfg.rounds,
        phi_true: phi,
        empirical_rmse: rmse,
        rmse_stderr,
        crb: crb(&spec, cfg.nu)?.bound,
        time_advantage: time_advantage(n),
    })
}

/// Ordinary least squares of `ln RMSE` on `ln N`; returns (slope, stderr).
pub fn fit_log_log(rows: &[ScalingRow]) -> Result<(f64, f64)> {
    let pts: Vec<(f64, f64)> = rows
        .iter()
        .map(|r| ((r.n as f64).ln(), r.empirical_rmse.ln()))
        .collect();
    if pts.iter().any(|(_, y)| !y.is_finite()) {
        return Err(Error::Undefined("zero RMSE cannot be fitted on a log scale".into()));
    }
    ols_slope(&pts)
}

pub(crate) fn ols_slope(pts: &[(f64, f64)]) -> Result<(f64, f64)> {
    let m = pts.len() as f64;
    if pts.len() < 3 {
        return Err(Error::OutOfRange("a slope fit needs at least 3 points".into()));
    }
    let xm = pts.iter().map(|p| p.0).sum::<f64>() / m;
    let ym = pts.iter().map(|p| p.1).sum::<f64>() / m;
    let sxx: f64 = pts.iter().map(|p| (p.0 - xm).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - xm) * (p.1 - ym)).sum();
    if sxx == 0.0 {
        return Err(Error::OutOfRange("degenerate fit: all N values equal".into()));
    }
    let slope = sxy / sxx;
    let intercept = ym - slope * xm;
    let ssr: f64 = pts
        .iter()
        .map(|p| (p.1 - intercept - slope * p.0).powi(2))
        .sum();
    Ok((slope, (ssr / (m - 2.0) / sxx).sqrt()))
}
