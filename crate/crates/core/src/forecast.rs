//! Bootstrapped-drift forecasting of the top-k singular triplets.
//!
//! Each step projects the update `G = -η∇ℓ` onto the tracked frames,
//! `M = U_kᵀ G V_k`, moves `σ_i` by `M_ii` and rotates the frames by the
//! first-order mixing terms, then re-orthonormalizes (modified Gram–Schmidt)
//! and aligns signs with the previous frame. Callers pass the raw gradient;
//! the `-η` factor is applied here.

use alloc::vec;
use alloc::vec::Vec;
use core::borrow::Borrow;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::linalg::{dot, orthonormalize_columns, svd, Matrix};

/// How the singular vectors are rotated each step.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum VectorUpdate {
    /// `du_i, dv_i = Σ_{j≠i} (M_ji/(σ_i-σ_j+ε) + M_ij/(σ_i+σ_j+ε)) (u_j, v_j)`.
    AsWritten,
    /// First-order rotation within the tracked frames plus the component of
    /// `G` outside them, with the untracked singular values neglected.
    FirstOrder,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ForecastConfig {
    pub k: usize,
    pub eta: f64,
    /// Gap regularizer; `None` resolves to `1e-8 σ_1(W0)` at initialization.
    pub epsilon: Option<f64>,
    /// Positivity floor for the tracked values.
    pub delta: f64,
    /// Re-orthonormalize every `orth_every` steps.
    pub orth_every: u64,
    pub vector_update: VectorUpdate,
    /// Adds the isotropic-noise Itô drift with this diffusion constant. Off by default.
    pub drift_correction: Option<f64>,
}

impl ForecastConfig {
    pub fn new(k: usize, eta: f64) -> Self {
        Self {
            k,
            eta,
            epsilon: None,
            delta: 1e-12,
            orth_every: 1,
            vector_update: VectorUpdate::AsWritten,
            drift_correction: None,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.k == 0 {
            return Err(domain("k must be at least 1"));
        }
        if !self.eta.is_finite() {
            return Err(domain("eta must be finite"));
        }
        if let Some(e) = self.epsilon {
            if !(e > 0.0 && e.is_finite()) {
                return Err(domain("epsilon must be positive"));
            }
        }
        if !(self.delta > 0.0 && self.delta.is_finite()) {
            return Err(domain("delta must be positive"));
        }
        if self.orth_every == 0 {
            return Err(domain("orth_every must be positive"));
        }
        if let Some(d) = self.drift_correction {
            if !(d >= 0.0 && d.is_finite()) {
                return Err(domain("drift-correction diffusion must be nonnegative"));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ForecastState {
    /// `m x k`, orthonormal columns.
    pub u: Matrix,
    /// Nonincreasing, each at least `delta`.
    pub sigmas: Vec<f64>,
    /// `n x k`, orthonormal columns.
    pub v: Matrix,
    pub step: u64,
    /// Resolved gap regularizer.
    pub epsilon: f64,
    /// Permutation applied at the last step when tracked values crossed
    /// (`new[i] = old[perm[i]]`), if any.
    pub last_permutation: Option<Vec<usize>>,
    pub crossings: u64,
}

impl ForecastState {
    pub fn k(&self) -> usize {
        self.sigmas.len()
    }

    /// `U diag(σ) Vᵀ`.
    pub fn reconstruct(&self) -> Matrix {
        let mut us = self.u.clone();
        for (j, s) in self.sigmas.iter().enumerate() {
            for i in 0..us.rows() {
                us[(i, j)] *= s;
            }
        }
        us.matmul(&self.v.transpose())
    }
}

/// Truncated SVD of `w0`. A zero matrix yields `σ = δ` and arbitrary frames.
pub fn init_forecast(w0: &Matrix, config: &ForecastConfig) -> Result<ForecastState> {
    config.validate()?;
    let (m, n) = w0.shape();
    if config.k > m.min(n) {
        return Err(domain("k exceeds min(m, n)"));
    }
    let full = svd(w0)?;
    let k = config.k;
    let sigmas: Vec<f64> = full.s[..k].iter().map(|s| s.max(config.delta)).collect();
    let epsilon = config
        .epsilon
        .unwrap_or_else(|| (1e-8 * full.s[0]).max(f64::MIN_POSITIVE));
    Ok(ForecastState {
        u: full.u.columns(k),
        sigmas,
        v: full.v.columns(k),
        step: 0,
        epsilon,
        last_permutation: None,
        crossings: 0,
    })
}

/// Advances the forecast by one gradient.
pub fn forecast_step(
    state: &ForecastState,
    grad: &Matrix,
    config: &ForecastConfig,
) -> Result<ForecastState> {
    config.validate()?;
    let (m, k) = state.u.shape();
    let n = state.v.rows();
    grad.check_shape((m, n))?;
    if k != config.k {
        return Err(domain("state and config disagree on k"));
    }
    let eta = config.eta;
    let eps = state.epsilon;
    let sig = &state.sigmas;

    // M = U_kᵀ G V_k with G = -η∇ℓ, formed as -η U_kᵀ (∇ℓ V_k).
    let gv = grad.matmul(&state.v);
    let mut mm = state.u.tr_matmul(&gv);
    mm.as_mut_slice().iter_mut().for_each(|x| *x *= -eta);

    let mut sigmas: Vec<f64> = (0..k).map(|i| sig[i] + mm[(i, i)]).collect();
    if let Some(d) = config.drift_correction {
        let dim = (m.max(n) - m.min(n) + 1) as f64;
        for i in 0..k {
            let mut push = dim / (2.0 * sig[i]);
            for j in 0..k {
                if j != i {
                    push += sig[i] / (sig[i] * sig[i] - sig[j] * sig[j] + eps);
                }
            }
            sigmas[i] += eta * d * push;
        }
    }
    for s in sigmas.iter_mut() {
        *s = s.max(config.delta);
    }

    // In-frame mixing: column i of U gains mix_u[(j, i)] u_j, likewise for V.
    let mut mix_u = Matrix::identity(k);
    let mut mix_v = Matrix::identity(k);
    for i in 0..k {
        for j in 0..k {
            if j == i {
                continue;
            }
            let (cu, cv) = match config.vector_update {
                VectorUpdate::AsWritten => {
                    let c =
                        mm[(j, i)] / (sig[i] - sig[j] + eps) + mm[(i, j)] / (sig[i] + sig[j] + eps);
                    (c, c)
                }
                VectorUpdate::FirstOrder => {
                    // du_i gets (σ_i M_ji + σ_j M_ij)/(σ_i² - σ_j²) u_j,
                    // dv_i gets (σ_j M_ji + σ_i M_ij)/(σ_i² - σ_j²) v_j.
                    let den = sig[i] * sig[i] - sig[j] * sig[j];
                    let den = if den >= 0.0 {
                        den + eps * sig[i]
                    } else {
                        den - eps * sig[i]
                    };
                    (
                        (sig[i] * mm[(j, i)] + sig[j] * mm[(i, j)]) / den,
                        (sig[j] * mm[(j, i)] + sig[i] * mm[(i, j)]) / den,
                    )
                }
            };
            mix_u[(j, i)] = cu;
            mix_v[(j, i)] = cv;
        }
    }
    let mut u_new = state.u.matmul(&mix_u);
    let mut v_new = state.v.matmul(&mix_v);
    if config.vector_update == VectorUpdate::FirstOrder {
        // Out of frame: (I - UUᵀ) G v_i / σ_i and (I - VVᵀ) Gᵀ u_i / σ_i.
        let gtu = grad.tr_matmul(&state.u);
        let mut outside_u = gv.scaled(-eta);
        outside_u.axpy(-1.0, &state.u.matmul(&mm));
        let mut outside_v = gtu.scaled(-eta);
        outside_v.axpy(-1.0, &state.v.matmul(&mm.transpose()));
        for i in 0..k {
            let inv = 1.0 / sig[i];
            for r in 0..m {
                u_new[(r, i)] += inv * outside_u[(r, i)];
            }
            for r in 0..n {
                v_new[(r, i)] += inv * outside_v[(r, i)];
            }
        }
    }

    let step = state.step + 1;
    if step % config.orth_every == 0 {
        orthonormalize_columns(&mut u_new);
        orthonormalize_columns(&mut v_new);
    }
    for j in 0..k {
        let overlap: f64 = (0..m).map(|r| state.u[(r, j)] * u_new[(r, j)]).sum();
        if overlap < 0.0 {
            for r in 0..m {
                u_new[(r, j)] = -u_new[(r, j)];
            }
            for r in 0..n {
                v_new[(r, j)] = -v_new[(r, j)];
            }
        }
    }

    let mut next = ForecastState {
        u: u_new,
        sigmas,
        v: v_new,
        step,
        epsilon: eps,
        last_permutation: None,
        crossings: state.crossings,
    };
    if next.sigmas.windows(2).any(|w| w[0] < w[1]) {
        let mut perm: Vec<usize> = (0..k).collect();
        perm.sort_by(|&a, &b| next.sigmas[b].total_cmp(&next.sigmas[a]));
        next.sigmas = perm.iter().map(|&p| next.sigmas[p]).collect();
        next.u = Matrix::from_fn(m, k, |r, c| next.u[(r, perm[c])]);
        next.v = Matrix::from_fn(n, k, |r, c| next.v[(r, perm[c])]);
        next.last_permutation = Some(perm);
        next.crossings += 1;
    }
    Ok(next)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ForecastTrajectory {
    /// `sigmas[t]` is the prediction after `t` gradients; `sigmas[0]` is the initial SVD.
    pub sigmas: Vec<Vec<f64>>,
    /// Exact top-k singular values of the reference weights, when supplied.
    pub reference_sigmas: Vec<Vec<f64>>,
    /// `‖U_predᵀ U_true‖_F² / k` per step, when a reference is supplied.
    pub alignment: Vec<f64>,
    pub crossings: u64,
    pub final_state: ForecastState,
}

impl ForecastTrajectory {
    /// `max_i |σ_pred - σ_true| / σ_true` per recorded step.
    pub fn relative_errors(&self) -> Vec<f64> {
        self.sigmas
            .iter()
            .zip(&self.reference_sigmas)
            .map(|(p, t)| {
                p.iter()
                    .zip(t)
                    .fold(0.0f64, |acc, (a, b)| acc.max((a - b).abs() / b.abs()))
            })
            .collect()
    }
}

/// Runs [`forecast_step`] over a gradient stream.
///
/// `reference`, when given, holds the true weights at steps `0..=T`; exact
/// SVDs of those supply the comparison and alignment series.
pub fn forecast_trajectory<I>(
    w0: &Matrix,
    grads: I,
    config: &ForecastConfig,
    reference: Option<&[Matrix]>,
) -> Result<ForecastTrajectory>
where
    I: IntoIterator,
    I::Item: Borrow<Matrix>,
{
    let mut state = init_forecast(w0, config)?;
    let mut traj = ForecastTrajectory {
        sigmas: vec![state.sigmas.clone()],
        reference_sigmas: Vec::new(),
        alignment: Vec::new(),
        crossings: 0,
        final_state: state.clone(),
    };
    let compare = |state: &ForecastState, t: usize, traj: &mut ForecastTrajectory| -> Result<()> {
        if let Some(refs) = reference {
            let Some(w) = refs.get(t) else { return Ok(()) };
            let exact = svd(w)?;
            let k = state.k();
            traj.reference_sigmas.push(exact.s[..k].to_vec());
            let mut overlap = 0.0;
            for i in 0..k {
                let ui = state.u.column(i);
                for j in 0..k {
                    let c = dot(&ui, &exact.u.column(j));
                    overlap += c * c;
                }
            }
            traj.alignment.push(overlap / k as f64);
        }
        Ok(())
    };
    compare(&state, 0, &mut traj)?;
    for (t, g) in grads.into_iter().enumerate() {
        state = forecast_step(&state, g.borrow(), config)?;
        traj.sigmas.push(state.sigmas.clone());
        compare(&state, t + 1, &mut traj)?;
    }
    traj.crossings = state.crossings;
    traj.final_state = state;
    Ok(traj)
}

/// Dominant per-step operation count `k m n + k² max(m, n)`.
pub fn step_cost_model(m: usize, n: usize, k: usize) -> Result<u64> {
    if m == 0 || n == 0 || k == 0 {
        return Err(domain("dimensions must be positive"));
    }
    let (m, n, k) = (m as u64, n as u64, k as u64);
    Ok(k * m * n + k * k * m.max(n))
}
