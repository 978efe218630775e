//! Singular-value dynamics under the isotropic weight SDE.
//!
//! For `W` (`m x n`, `m >= n`) driven by `dW = -η∇L dt + sqrt(2ηD) dB`, the
//! model drift of `σ_k` and of `λ_k = σ_k²` is
//!
//! ```text
//! dσ_k = [-η g_k + ηD((m-n+1)/(2σ_k) + Σ_{j≠k} σ_k/(σ_k² - σ_j²))] dt + sqrt(2ηD) dβ_k
//! dλ_k = [-2 sqrt(λ_k) η g_k + ηD(m-n+3) + 2ηD Σ_{j≠k} λ_k/(λ_k - λ_j)] dt
//!        + 2 sqrt(2ηD λ_k) dβ_k
//! ```
//!
//! with `g_k = u_kᵀ ∇L v_k` supplied by the caller. The two are related by
//! `dλ = 2σ dσ + 2ηD dt`.
//!
//! The second-order term of the model drift is not the exact Laplacian of
//! `σ_k`; [`exact_sigma_laplacian`] gives the latter, which is what a direct
//! Monte-Carlo of the matrix SDE measures.

mod dyson;
mod hilbert;
mod stationary;

use alloc::vec::Vec;

use crate::error::{domain, Error, Result};

pub use dyson::{
    canonical_drift, simulate_dyson, DysonConfig, DysonState, DysonTrajectory, TimeScale,
    GAP_FLOOR, LAMBDA_FLOOR, MAX_BISECTIONS,
};
pub use hilbert::{hilbert_power_law, hilbert_power_law_leading};
pub use stationary::{
    fit_stationary, gamma_cdf, simulate_stationary_particle, stationary_exponent,
    stationary_lambda_pdf, stationary_sigma_pdf, GammaFitResult, StationaryParams, StationaryRun,
};

/// Relative gap tolerance: pairs with `|x_k - x_j| < GAP_TOL * max|x|` are degenerate.
pub const GAP_TOL: f64 = 1e-10;

fn check_gap(a: f64, b: f64, scale: f64) -> Result<()> {
    let tol = GAP_TOL * scale;
    if (a - b).abs() < tol {
        return Err(Error::Degenerate { a, b, tol });
    }
    Ok(())
}

/// `Σ_{j≠k} σ_k / (σ_k² - σ_j²)`.
fn sigma_repulsion(sigmas: &[f64], k: usize) -> Result<f64> {
    let sk = sigmas[k];
    let top = sigmas.iter().fold(0.0f64, |a, s| a.max(s * s));
    let mut acc = 0.0;
    for (j, &sj) in sigmas.iter().enumerate() {
        if j == k {
            continue;
        }
        check_gap(sk * sk, sj * sj, top)?;
        acc += sk / (sk * sk - sj * sj);
    }
    Ok(acc)
}

fn check_mode(values: &[f64], k: usize, m: usize, n: usize) -> Result<()> {
    if m < n {
        return Err(domain("need m >= n (transpose wide matrices)"));
    }
    if k >= values.len() {
        return Err(domain("mode index out of range"));
    }
    if values.len() > n {
        return Err(domain("more singular values than min(m, n)"));
    }
    if !(values[k] > 0.0) {
        return Err(domain("singular value must be positive"));
    }
    Ok(())
}

/// Model drift of `σ_k`:
/// `-η g + ηD[(m-n+1)/(2σ_k) + Σ_{j≠k} σ_k/(σ_k² - σ_j²)]`.
pub fn sigma_drift(
    sigmas: &[f64],
    k: usize,
    grad_proj: f64,
    eta: f64,
    diffusion: f64,
    m: usize,
    n: usize,
) -> Result<f64> {
    check_mode(sigmas, k, m, n)?;
    let sk = sigmas[k];
    let ito = (m - n + 1) as f64 / (2.0 * sk) + sigma_repulsion(sigmas, k)?;
    Ok(-eta * grad_proj + eta * diffusion * ito)
}

/// Exact Laplacian of `σ_k` over `m x n` matrices with all `n` singular
/// values given: `(m-n)/σ_k + 2 Σ_{j≠k} σ_k/(σ_k² - σ_j²)`.
///
/// Under isotropic noise the exact Itô drift of `σ_k` is
/// `-η g + ηD · exact_sigma_laplacian`.
pub fn exact_sigma_laplacian(sigmas: &[f64], k: usize, m: usize, n: usize) -> Result<f64> {
    check_mode(sigmas, k, m, n)?;
    if sigmas.len() != n {
        return Err(domain("the exact Laplacian needs all n singular values"));
    }
    Ok((m - n) as f64 / sigmas[k] + 2.0 * sigma_repulsion(sigmas, k)?)
}

/// `Σ_{j≠k} λ_k / (λ_k - λ_j)`.
pub fn lambda_repulsion(lambdas: &[f64], k: usize) -> Result<f64> {
    let lk = lambdas[k];
    let top = lambdas.iter().fold(0.0f64, |a, l| a.max(l.abs()));
    let mut acc = 0.0;
    for (j, &lj) in lambdas.iter().enumerate() {
        if j == k {
            continue;
        }
        check_gap(lk, lj, top)?;
        acc += lk / (lk - lj);
    }
    Ok(acc)
}

/// Per-particle model drift of the squared singular values.
///
/// `grad_proj[k] = u_kᵀ ∇L v_k`; pass an empty slice for the zero-gradient case.
pub fn lambda_drift(
    state: &DysonState,
    grad_proj: &[f64],
    eta: f64,
    diffusion: f64,
) -> Result<Vec<f64>> {
    let lambdas = state.lambdas();
    if !grad_proj.is_empty() && grad_proj.len() != lambdas.len() {
        return Err(domain("grad_proj length must match particle count"));
    }
    let base = eta * diffusion * (state.m() - state.n() + 3) as f64;
    lambdas
        .iter()
        .enumerate()
        .map(|(k, &lk)| {
            let g = grad_proj.get(k).copied().unwrap_or(0.0);
            Ok(-2.0 * libm::sqrt(lk) * eta * g
                + base
                + 2.0 * eta * diffusion * lambda_repulsion(lambdas, k)?)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn single_value_has_no_repulsion() {
        let (eta, d, g, s) = (0.1, 0.3, 0.7, 2.0);
        let m = 5;
        let got = sigma_drift(&[s], 0, g, eta, d, m, 1).unwrap();
        let expect = -eta * g + eta * d * m as f64 / (2.0 * s);
        assert!((got - expect).abs() < 1e-15);
    }

    #[test]
    fn two_value_plug_in() {
        let (eta, d) = (0.2, 0.5);
        let got = sigma_drift(&[2.0, 1.0], 0, 0.0, eta, d, 2, 2).unwrap();
        let expect = eta * d * (0.25 + 2.0 / 3.0);
        assert!((got - expect).abs() < 1e-15, "{got} vs {expect}");
    }

    #[test]
    fn sigma_drift_errors() {
        assert!(matches!(
            sigma_drift(&[1.0, 0.0], 1, 0.0, 1.0, 1.0, 2, 2),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            sigma_drift(&[1.0, 1.0], 0, 0.0, 1.0, 1.0, 2, 2),
            Err(Error::Degenerate { .. })
        ));
        assert!(sigma_drift(&[1.0], 0, 0.0, 1.0, 1.0, 1, 2).is_err());
    }

    #[test]
    fn lambda_drift_single_particle() {
        let st = DysonState::new(vec![3.0], 7, 4).unwrap();
        let d = lambda_drift(&st, &[], 0.1, 0.2).unwrap();
        assert!((d[0] - 0.1 * 0.2 * 6.0).abs() < 1e-15);
    }

    #[test]
    fn lambda_drift_rejects_mismatched_gradients() {
        let st = DysonState::new(vec![3.0, 1.0], 4, 2).unwrap();
        assert!(lambda_drift(&st, &[1.0], 0.1, 0.2).is_err());
    }

    #[test]
    fn exact_laplacian_two_by_two() {
        let got = exact_sigma_laplacian(&[3.0, 1.0], 0, 2, 2).unwrap();
        assert!((got - 0.75).abs() < 1e-15);
        assert!(exact_sigma_laplacian(&[3.0], 0, 2, 2).is_err());
    }
}
