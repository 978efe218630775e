//! Stationary law of a single squared singular value under a quadratic
//! restoring force `β₁`: `λ ~ Gamma(shape = (m-n+3)/4, rate = β₁/(4ηD))`.

use alloc::vec::Vec;

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::dyson::LAMBDA_FLOOR;
use crate::error::{domain, Error, Result};
use crate::rng;
use crate::special::{digamma, gamma_p, ln_gamma, trigamma};

/// Minimum sample count accepted by [`fit_stationary`].
pub const MIN_FIT_SAMPLES: usize = 30;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StationaryParams {
    pub eta: f64,
    pub diffusion: f64,
    pub beta1: f64,
    pub m: usize,
    pub n: usize,
}

impl StationaryParams {
    pub fn new(eta: f64, diffusion: f64, beta1: f64, m: usize, n: usize) -> Result<Self> {
        for (name, v) in [("eta", eta), ("diffusion", diffusion), ("beta1", beta1)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(domain(alloc::format!("{name} must be positive and finite")));
            }
        }
        if m < n || n == 0 {
            return Err(domain("need m >= n >= 1"));
        }
        Ok(Self {
            eta,
            diffusion,
            beta1,
            m,
            n,
        })
    }

    /// Power of `λ` in the density, `(m-n-1)/4`.
    pub fn alpha0(&self) -> f64 {
        (self.m as f64 - self.n as f64 - 1.0) / 4.0
    }

    pub fn shape(&self) -> f64 {
        (self.m - self.n + 3) as f64 / 4.0
    }

    pub fn rate(&self) -> f64 {
        self.beta1 / (4.0 * self.eta * self.diffusion)
    }

    pub fn mean(&self) -> f64 {
        self.shape() / self.rate()
    }
}

/// Stationary density of `λ`.
pub fn stationary_lambda_pdf(lambda: f64, p: &StationaryParams) -> f64 {
    gamma_pdf(lambda, p.shape(), p.rate())
}

/// Stationary density of `σ = sqrt(λ)`, proportional to `σ^((m-n+1)/2) exp(-rate σ²)`.
pub fn stationary_sigma_pdf(sigma: f64, p: &StationaryParams) -> f64 {
    if sigma < 0.0 {
        return 0.0;
    }
    2.0 * sigma * stationary_lambda_pdf(sigma * sigma, p)
}

/// Power of `λ` in the large-`r` stationary density, `(m−n+3)/4 − 1`.
pub fn stationary_exponent(m: usize, n: usize) -> Result<f64> {
    if m < n {
        return Err(domain("need m >= n"));
    }
    Ok((m - n + 3) as f64 / 4.0 - 1.0)
}

fn gamma_pdf(x: f64, shape: f64, rate: f64) -> f64 {
    if x < 0.0 {
        return 0.0;
    }
    if x == 0.0 {
        return match shape.partial_cmp(&1.0) {
            Some(core::cmp::Ordering::Greater) => 0.0,
            Some(core::cmp::Ordering::Equal) => rate,
            _ => f64::INFINITY,
        };
    }
    libm::exp(shape * libm::log(rate) + (shape - 1.0) * libm::log(x) - rate * x - ln_gamma(shape))
}

/// Gamma distribution function with the given shape and rate.
pub fn gamma_cdf(x: f64, shape: f64, rate: f64) -> f64 {
    gamma_p(shape, rate * x)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StationaryRun {
    pub samples: Vec<f64>,
    pub reflections: u64,
}

/// Euler–Maruyama for one particle,
/// `dλ = [ηD(m-n+3) - β₁λ] dt + 2 sqrt(2ηDλ) dβ`, reflected at the floor.
///
/// After `burn_in` steps, every `thin`-th state is kept. Draws come from the
/// stream `(seed, "stationary/replica", replica)`.
pub fn simulate_stationary_particle(
    p: &StationaryParams,
    lambda0: f64,
    dt: f64,
    steps: u64,
    burn_in: u64,
    thin: u64,
    seed: u64,
    replica: u64,
) -> Result<StationaryRun> {
    if !(lambda0 > 0.0 && lambda0.is_finite()) {
        return Err(domain("lambda0 must be positive"));
    }
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(domain("dt must be positive"));
    }
    if thin == 0 {
        return Err(domain("thin must be positive"));
    }
    let ed = p.eta * p.diffusion;
    let push = ed * (p.m - p.n + 3) as f64;
    let noise = 2.0 * libm::sqrt(2.0 * ed * dt);
    let mut rng = rng::stream(seed, "stationary/replica", replica);
    let mut lambda = lambda0;
    let mut run = StationaryRun {
        samples: Vec::new(),
        reflections: 0,
    };
    for step in 1..=steps {
        let xi: f64 = rng.sample(StandardNormal);
        let mut next = lambda + (push - p.beta1 * lambda) * dt + noise * libm::sqrt(lambda) * xi;
        if next < LAMBDA_FLOOR {
            run.reflections += 1;
            next = next.abs().max(LAMBDA_FLOOR);
        }
        lambda = next;
        if step > burn_in && (step - burn_in) % thin == 0 {
            run.samples.push(lambda);
        }
    }
    Ok(run)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GammaFitResult {
    pub shape: f64,
    pub rate: f64,
    /// `4ηD · rate`, present when a diffusion estimate was supplied.
    pub implied_beta1: Option<f64>,
    /// Kolmogorov–Smirnov distance between the samples and the fitted law.
    pub gof: f64,
    pub sample_count: usize,
    /// `(m-n+3)/4`.
    pub theoretical_shape: f64,
}

/// Maximum-likelihood gamma fit of stationary `λ` samples.
///
/// Newton iteration on `ln k - ψ(k) = ln(mean) - mean(ln x)` from the
/// method-of-moments shape. Zero sample variance or non-convergence yields
/// [`Error::Fit`] carrying the moment estimates.
pub fn fit_stationary(
    samples: &[f64],
    m: usize,
    n: usize,
    eta: f64,
    diffusion: Option<f64>,
) -> Result<GammaFitResult> {
    if m < n {
        return Err(domain("need m >= n"));
    }
    if samples.len() < MIN_FIT_SAMPLES {
        return Err(domain(alloc::format!(
            "need at least {MIN_FIT_SAMPLES} samples"
        )));
    }
    if samples.iter().any(|x| !(*x > 0.0 && x.is_finite())) {
        return Err(domain("samples must be positive and finite"));
    }
    let count = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / count;
    let var = samples.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / count;
    let moment_shape = mean * mean / var;
    let moment_rate = mean / var;
    let fail = |reason: &str| Error::Fit {
        reason: reason.into(),
        moment_shape,
        moment_rate,
    };
    let s = libm::log(mean) - samples.iter().map(|x| libm::log(*x)).sum::<f64>() / count;
    if !(var > 0.0) || !(s > 0.0) {
        return Err(fail("samples have zero variance"));
    }
    let mut k = if moment_shape.is_finite() && moment_shape > 0.0 {
        moment_shape
    } else {
        0.5 / s
    };
    let mut converged = false;
    for _ in 0..200 {
        let f = libm::log(k) - digamma(k) - s;
        let df = 1.0 / k - trigamma(k);
        let mut next = k - f / df;
        if !(next > 0.0) {
            next = 0.5 * k;
        }
        let delta = (next - k).abs();
        k = next;
        if delta <= 1e-13 * k {
            converged = true;
            break;
        }
    }
    if !converged || !k.is_finite() {
        return Err(fail("Newton iteration did not converge"));
    }
    let rate = k / mean;
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let gof = sorted.iter().enumerate().fold(0.0f64, |acc, (i, &x)| {
        let f = gamma_cdf(x, k, rate);
        acc.max(f - i as f64 / count)
            .max((i + 1) as f64 / count - f)
    });
    let implied_beta1 = match diffusion {
        Some(d) if d > 0.0 && eta > 0.0 => Some(4.0 * eta * d * rate),
        Some(_) => return Err(domain("eta and diffusion must be positive")),
        None => None,
    };
    Ok(GammaFitResult {
        shape: k,
        rate,
        implied_beta1,
        gof,
        sample_count: samples.len(),
        theoretical_shape: (m - n + 3) as f64 / 4.0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use rand_distr::{Distribution, Gamma};

    #[test]
    fn exponent_examples() {
        assert_eq!(stationary_exponent(4, 4).unwrap(), -0.25);
        assert_eq!(stationary_exponent(5, 4).unwrap(), 0.0);
        assert_eq!(stationary_exponent(9, 4).unwrap(), 1.0);
        assert!(stationary_exponent(3, 4).is_err());
    }

    #[test]
    fn square_matrix_shape_and_rate() {
        let p = StationaryParams::new(0.5, 0.5, 1.0, 6, 6).unwrap();
        assert_eq!(p.shape(), 0.75);
        assert_eq!(p.rate(), 1.0);
        assert_eq!(p.alpha0(), -0.25);
    }

    #[test]
    fn pdf_integrates_to_one() {
        let p = StationaryParams::new(0.3, 0.2, 1.5, 9, 4).unwrap();
        let r = crate::quad::integrate(
            |x| stationary_lambda_pdf(x, &p),
            0.0,
            60.0,
            1e-12,
            1e-12,
            500,
        );
        assert!((r.value - 1.0).abs() < 1e-9, "{}", r.value);
        let r = crate::quad::integrate(
            |s| stationary_sigma_pdf(s, &p),
            0.0,
            10.0,
            1e-12,
            1e-12,
            500,
        );
        assert!((r.value - 1.0).abs() < 1e-9, "{}", r.value);
    }

    #[test]
    fn fit_recovers_exact_gamma_samples() {
        let mut rng = rng::stream(5, "test", 0);
        let g = Gamma::new(2.5, 1.0 / 3.0).unwrap();
        let xs: Vec<f64> = (0..20_000).map(|_| g.sample(&mut rng)).collect();
        let fit = fit_stationary(&xs, 10, 3, 0.1, Some(0.5)).unwrap();
        assert!((fit.shape - 2.5).abs() < 0.1, "{fit:?}");
        assert!((fit.rate - 3.0).abs() < 0.15, "{fit:?}");
        assert!(fit.gof < 0.02);
        assert_eq!(fit.theoretical_shape, 2.5);
        assert!((fit.implied_beta1.unwrap() - 0.2 * fit.rate).abs() < 1e-12);
    }

    #[test]
    fn fit_rejects_degenerate_input() {
        let xs = vec![2.0; 50];
        assert!(matches!(
            fit_stationary(&xs, 4, 4, 1.0, None),
            Err(Error::Fit { .. })
        ));
        assert!(matches!(
            fit_stationary(&xs[..10], 4, 4, 1.0, None),
            Err(Error::Domain(_))
        ));
        let mut bad = vec![1.0; 40];
        bad[3] = -1.0;
        assert!(fit_stationary(&bad, 4, 4, 1.0, None).is_err());
    }

    #[test]
    fn particle_is_reproducible() {
        let p = StationaryParams::new(0.5, 0.5, 1.0, 4, 4).unwrap();
        let a = simulate_stationary_particle(&p, 1.0, 1e-2, 1000, 100, 10, 7, 0).unwrap();
        let b = simulate_stationary_particle(&p, 1.0, 1e-2, 1000, 100, 10, 7, 0).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.samples.len(), 90);
        assert!(a.samples.iter().all(|x| *x >= LAMBDA_FLOOR));
    }
}
