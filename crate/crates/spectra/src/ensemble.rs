//! Replica ensembles on a rayon pool.
//!
//! Replica `i` always draws from streams keyed by `(seed, tag, i)`, so results
//! do not depend on the thread count. `SPECTRA_SDE_THREADS` caps the pool size.

use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use spectra_core::linalg::symmetric_eigenvalues;
use spectra_core::nn::{sgd_train, sweep_row, sweep_table, SweepTable, TrainConfig};
use spectra_core::rmt::{ks_distance, EmpiricalSpectrum, MpParams};
use spectra_core::rng::{derive_seed, stream};
use spectra_core::spectral::{
    simulate_dyson, simulate_stationary_particle, DysonConfig, DysonState, DysonTrajectory,
    StationaryParams,
};
use spectra_core::Matrix;

use crate::error::Result;

pub const THREADS_ENV: &str = "SPECTRA_SDE_THREADS";

/// Pool size: `SPECTRA_SDE_THREADS` when it parses as a positive integer,
/// otherwise the available hardware concurrency.
pub fn thread_count() -> usize {
    std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|n| *n > 0)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
}

fn run_parallel<T: Send>(replicas: usize, f: impl Fn(u64) -> T + Sync + Send) -> Vec<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(thread_count())
        .build()
        .expect("thread pool");
    pool.install(|| (0..replicas as u64).into_par_iter().map(&f).collect())
}

/// Gaussian `m x n` matrix with i.i.d. entries of variance `var`.
pub fn gaussian_matrix(m: usize, n: usize, var: f64, seed: u64, tag: &str, index: u64) -> Matrix {
    let sd = var.sqrt();
    let mut rng = stream(seed, tag, index);
    Matrix::from_fn(m, n, |_, _| sd * rng.sample::<f64, _>(StandardNormal))
}

pub fn dyson_ensemble(
    state0: &DysonState,
    config: &DysonConfig,
    seed: u64,
    replicas: usize,
) -> Result<Vec<DysonTrajectory>> {
    run_parallel(replicas, |i| {
        simulate_dyson(state0, config, derive_seed(seed, "dyson/replica", i))
    })
    .into_iter()
    .map(|r| r.map_err(Into::into))
    .collect()
}

/// Pooled post-burn-in samples from independent one-particle runs.
#[allow(clippy::too_many_arguments)]
pub fn stationary_ensemble(
    params: &StationaryParams,
    lambda0: f64,
    dt: f64,
    steps: u64,
    burn_in: u64,
    thin: u64,
    seed: u64,
    replicas: usize,
) -> Result<Vec<f64>> {
    let runs = run_parallel(replicas, |i| {
        simulate_stationary_particle(params, lambda0, dt, steps, burn_in, thin, seed, i)
    });
    let mut out = Vec::new();
    for r in runs {
        out.extend(r?.samples);
    }
    Ok(out)
}

/// Largest eigenvalue of `WᵀW` for `draws` Gaussian `m x n` matrices with
/// entry variance `var`.
pub fn wishart_top_eigenvalues(
    m: usize,
    n: usize,
    var: f64,
    draws: usize,
    seed: u64,
) -> Result<Vec<f64>> {
    run_parallel(draws, |i| {
        let w = gaussian_matrix(m, n, var, seed, "rmt/wishart", i);
        symmetric_eigenvalues(&w.gram()).map(|v| v[0])
    })
    .into_iter()
    .map(|r| r.map_err(Into::into))
    .collect()
}

/// KS distance between the squared singular values of a `N(0, 1/fan_in)`
/// layer (`out x in`) and Marchenko–Pastur, for each of `seeds` draws.
pub fn mp_ks_over_seeds(
    out_dim: usize,
    in_dim: usize,
    seeds: usize,
    seed: u64,
) -> Result<Vec<f64>> {
    let (m, n) = (out_dim.max(in_dim), out_dim.min(in_dim));
    let mp = MpParams::for_matrix(m, n, 1.0 / in_dim as f64)?;
    run_parallel(seeds, |i| -> Result<f64> {
        let w = gaussian_matrix(out_dim, in_dim, 1.0 / in_dim as f64, seed, "rmt/init", i);
        let g = if out_dim >= in_dim {
            w.gram()
        } else {
            w.transpose().gram()
        };
        let spec = EmpiricalSpectrum::from_gram_eigenvalues(symmetric_eigenvalues(&g)?, 1e-10)?;
        Ok(ks_distance(&spec, |x| mp.cdf(x))?)
    })
    .into_iter()
    .collect()
}

/// Learning-rate sweep with one concurrent training run per rate.
pub fn lr_sweep_parallel(config: &TrainConfig, etas: &[f64]) -> Result<SweepTable> {
    let rows = run_parallel(etas.len(), |i| {
        let mut c = config.clone();
        c.eta = etas[i as usize];
        sgd_train(&c).map(|r| sweep_row(&r))
    })
    .into_iter()
    .collect::<std::result::Result<Vec<_>, _>>()?;
    Ok(sweep_table(rows))
}
