//! Random-matrix baselines: the Marchenko–Pastur bulk, the Tracy–Widom edge,
//! and the distribution-comparison statistics used to check a spectrum against them.
//!
//! Orientation: a weight matrix is `m x n` with `m >= n`; its squared singular
//! values are the `n` eigenvalues of `WᵀW`. With i.i.d. entries of variance
//! `scale / m` they follow Marchenko–Pastur with ratio `gamma = n / m` and the
//! given `scale`. Callers holding a wide matrix transpose it first.

mod tw;
#[rustfmt::skip]
mod tw1_table;

use alloc::vec::Vec;
use core::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::quad;

pub use tw::{tw1_cdf, tw1_quantile, TW1_S_MAX, TW1_S_MIN};

/// Marchenko–Pastur law with aspect ratio `gamma` and scale (bulk mean) `scale`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MpParams {
    pub gamma: f64,
    pub scale: f64,
    pub lambda_minus: f64,
    pub lambda_plus: f64,
}

impl MpParams {
    pub fn new(gamma: f64, scale: f64) -> Result<Self> {
        let (lambda_minus, lambda_plus) = mp_support(gamma, scale)?;
        Ok(Self {
            gamma,
            scale,
            lambda_minus,
            lambda_plus,
        })
    }

    /// Law of the squared singular values of an `m x n` matrix (`m >= n`) with
    /// i.i.d. entries of variance `entry_variance`.
    pub fn for_matrix(m: usize, n: usize, entry_variance: f64) -> Result<Self> {
        if m < n || n == 0 {
            return Err(domain(
                "Marchenko-Pastur: need m >= n >= 1 (transpose wide matrices)",
            ));
        }
        Self::new(n as f64 / m as f64, entry_variance * m as f64)
    }

    pub fn density(&self, x: f64) -> f64 {
        mp_density(x, self)
    }

    pub fn cdf(&self, x: f64) -> f64 {
        mp_cdf(x, self)
    }
}

/// Support `(lambda_minus, lambda_plus) = scale * (1 ∓ sqrt(gamma))²`.
pub fn mp_support(gamma: f64, scale: f64) -> Result<(f64, f64)> {
    if !(gamma > 0.0 && gamma <= 1.0) {
        return Err(domain(
            "Marchenko-Pastur ratio must lie in (0, 1]; transpose so m >= n",
        ));
    }
    if !(scale > 0.0) || !scale.is_finite() {
        return Err(domain("Marchenko-Pastur scale must be positive"));
    }
    let r = libm::sqrt(gamma);
    Ok((scale * (1.0 - r) * (1.0 - r), scale * (1.0 + r) * (1.0 + r)))
}

/// Marchenko–Pastur density; zero outside the support and at `x = 0`.
pub fn mp_density(x: f64, p: &MpParams) -> f64 {
    if x <= p.lambda_minus || x >= p.lambda_plus || x <= 0.0 {
        return 0.0;
    }
    libm::sqrt((p.lambda_plus - x) * (x - p.lambda_minus)) / (2.0 * PI * p.gamma * p.scale * x)
}

/// Marchenko–Pastur distribution function.
///
/// Integrates the density after the substitution
/// `x = c - h cos θ` (`c`, `h` the support midpoint and half-width), which
/// removes both square-root edges and the `1/sqrt(x)` singularity at `gamma = 1`.
pub fn mp_cdf(x: f64, p: &MpParams) -> f64 {
    if x <= p.lambda_minus {
        return 0.0;
    }
    if x >= p.lambda_plus {
        return 1.0;
    }
    let c = 0.5 * (p.lambda_plus + p.lambda_minus);
    let h = 0.5 * (p.lambda_plus - p.lambda_minus);
    let theta = libm::acos(((c - x) / h).clamp(-1.0, 1.0));
    let norm = h * h / (2.0 * PI * p.gamma * p.scale);
    let integrand = |t: f64| {
        let xt = c - h * libm::cos(t);
        if xt <= 0.0 {
            // gamma = 1 endpoint: sin²θ / (h (1 - cos θ)) -> (1 + cos θ) / h.
            return norm * (1.0 + libm::cos(t)) / h;
        }
        let s = libm::sin(t);
        norm * s * s / xt
    };
    quad::integrate(integrand, 0.0, theta, 1e-14, 1e-13, 200)
        .value
        .clamp(0.0, 1.0)
}

/// Centering and scaling constants mapping the largest eigenvalue of `WᵀW`
/// to the Tracy–Widom coordinate `chi = (lambda_max - mu) / sigma`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EdgeScaling {
    pub mu: f64,
    pub sigma: f64,
    pub m: usize,
    pub n: usize,
}

impl EdgeScaling {
    /// Asymptotic constants: `mu = lambda_plus`,
    /// `sigma = scale * (1 + sqrt(gamma)) * (1 + gamma^(-1/2))^(1/3) * m^(-2/3)`,
    /// with `m` the larger dimension.
    pub fn asymptotic(m: usize, n: usize, scale: f64) -> Result<Self> {
        if m < n || n == 0 {
            return Err(domain("edge scaling: need m >= n >= 1"));
        }
        let gamma = n as f64 / m as f64;
        let (_, lambda_plus) = mp_support(gamma, scale)?;
        let sigma = scale * (1.0 + libm::sqrt(gamma)) * libm::cbrt(1.0 + 1.0 / libm::sqrt(gamma))
            / libm::pow(m as f64, 2.0 / 3.0);
        Ok(Self {
            mu: lambda_plus,
            sigma,
            m,
            n,
        })
    }

    /// Finite-size (Johnstone) constants with the half-integer corrections
    /// `m - 1/2`, `n - 1/2`. Same limit as [`EdgeScaling::asymptotic`], with
    /// the O(n^(-1/3)) centering bias removed.
    pub fn finite_size(m: usize, n: usize, scale: f64) -> Result<Self> {
        if m < n || n == 0 {
            return Err(domain("edge scaling: need m >= n >= 1"));
        }
        if !(scale > 0.0) {
            return Err(domain("edge scaling: scale must be positive"));
        }
        let a = libm::sqrt(m as f64 - 0.5);
        let b = libm::sqrt(n as f64 - 0.5);
        let per_entry = scale / m as f64;
        Ok(Self {
            mu: per_entry * (a + b) * (a + b),
            sigma: per_entry * (a + b) * libm::cbrt(1.0 / a + 1.0 / b),
            m,
            n,
        })
    }

    #[inline]
    pub fn scaled(&self, lambda: f64) -> f64 {
        (lambda - self.mu) / self.sigma
    }
}

/// Asymptotic edge constants for an `m x n` matrix, `m >= n`.
pub fn edge_scaling(m: usize, n: usize, scale: f64) -> Result<EdgeScaling> {
    EdgeScaling::asymptotic(m, n, scale)
}

/// A sample of spectral values, stored nonincreasing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalSpectrum {
    values: Vec<f64>,
}

impl EmpiricalSpectrum {
    /// Sorts `values` nonincreasing; rejects non-finite or negative entries.
    pub fn new(mut values: Vec<f64>) -> Result<Self> {
        if values.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(domain("spectrum values must be finite and nonnegative"));
        }
        values.sort_by(|a, b| b.total_cmp(a));
        Ok(Self { values })
    }

    /// Eigenvalues of a Gram matrix may come out slightly negative; clamp those
    /// above `-tol * max` to zero before validating.
    pub fn from_gram_eigenvalues(values: Vec<f64>, tol: f64) -> Result<Self> {
        let top = values.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        let cleaned = values
            .into_iter()
            .map(|v| if v < 0.0 && v >= -tol * top { 0.0 } else { v })
            .collect();
        Self::new(cleaned)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn count(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn max(&self) -> Option<f64> {
        self.values.first().copied()
    }

    /// Median (mean of the two middle values for even counts).
    pub fn median(&self) -> Option<f64> {
        let n = self.values.len();
        if n == 0 {
            return None;
        }
        Some(if n % 2 == 1 {
            self.values[n / 2]
        } else {
            0.5 * (self.values[n / 2 - 1] + self.values[n / 2])
        })
    }

    pub fn squared(&self) -> Self {
        Self {
            values: self.values.iter().map(|v| v * v).collect(),
        }
    }
}

/// Kolmogorov–Smirnov distance between the sample and a reference CDF.
pub fn ks_distance(spectrum: &EmpiricalSpectrum, cdf: impl Fn(f64) -> f64) -> Result<f64> {
    if spectrum.is_empty() {
        return Err(domain("KS distance of an empty spectrum"));
    }
    Ok(ks_statistic(
        spectrum.values().iter().rev().copied(),
        spectrum.count(),
        cdf,
    ))
}

// `ascending` must yield `n` values in nondecreasing order.
fn ks_statistic(ascending: impl Iterator<Item = f64>, n: usize, cdf: impl Fn(f64) -> f64) -> f64 {
    let nf = n as f64;
    ascending.enumerate().fold(0.0, |d, (i, x)| {
        let f = cdf(x);
        let above = (i + 1) as f64 / nf - f;
        let below = f - i as f64 / nf;
        d.max(above).max(below)
    })
}

/// Two-sample Kolmogorov–Smirnov statistic.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(domain("two-sample KS needs nonempty samples"));
    }
    let mut x: Vec<f64> = a.to_vec();
    let mut y: Vec<f64> = b.to_vec();
    x.sort_by(f64::total_cmp);
    y.sort_by(f64::total_cmp);
    let (na, nb) = (x.len() as f64, y.len() as f64);
    let (mut i, mut j, mut d) = (0usize, 0usize, 0.0f64);
    while i < x.len() && j < y.len() {
        let v = x[i].min(y[j]);
        while i < x.len() && x[i] <= v {
            i += 1;
        }
        while j < y.len() && y[j] <= v {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    Ok(d)
}

/// Number of values whose edge coordinate `(v - mu) / sigma` exceeds `threshold`.
pub fn tail_count_beyond_edge(
    spectrum: &EmpiricalSpectrum,
    edge: &EdgeScaling,
    threshold: f64,
) -> usize {
    spectrum
        .values()
        .iter()
        .take_while(|&&v| edge.scaled(v) > threshold)
        .count()
}
