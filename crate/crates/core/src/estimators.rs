//! Estimators for the diffusion constant `D`, the minibatch noise constant
//! `β₁`, and the per-mode stochastic term `β_k` with its force decomposition.

use alloc::vec;
use alloc::vec::Vec;

use rand::seq::index;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::linalg::Matrix;
use crate::nn::SpectrumSnapshot;
use crate::rng;
use crate::spectral::GAP_TOL;

/// Default number of Monte-Carlo minibatches in [`estimate_beta1`].
pub const DEFAULT_MINIBATCH_DRAWS: usize = 200;

/// `(σ_max - σ_med)² / t_b` from the final snapshot.
pub fn estimate_diffusion(snapshots: &[SpectrumSnapshot], t_b: f64) -> Result<f64> {
    if !(t_b > 0.0) {
        return Err(domain("t_b must be positive"));
    }
    let last = snapshots.last().ok_or_else(|| domain("no snapshots"))?;
    if last.values.is_empty() {
        return Err(domain("empty snapshot"));
    }
    let mut v = last.values.clone();
    v.sort_by(|a, b| b.total_cmp(a));
    let k = v.len();
    let med = if k % 2 == 1 {
        v[k / 2]
    } else {
        0.5 * (v[k / 2 - 1] + v[k / 2])
    };
    let spread = v[0] - med;
    Ok(spread * spread / t_b)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoiseStats {
    /// Estimate of `E‖∇L_S - ∇L‖²` (squared Frobenius norm).
    pub beta1: f64,
    /// Monte-Carlo standard error; zero when every minibatch was enumerated.
    pub standard_error: f64,
    /// Number of minibatches averaged.
    pub sample_count: usize,
    pub batch_size: usize,
    /// Every size-`B` subset was enumerated.
    pub exhaustive: bool,
}

fn mean_gradient(grads: &[Matrix], idx: impl Iterator<Item = usize>, count: usize) -> Matrix {
    let (r, c) = grads[0].shape();
    let mut acc = Matrix::zeros(r, c);
    for i in idx {
        acc.axpy(1.0, &grads[i]);
    }
    acc.scaled(1.0 / count as f64)
}

fn check_grads(grads: &[Matrix], batch_size: usize) -> Result<()> {
    if grads.len() < 2 {
        return Err(domain("need at least two examples"));
    }
    if batch_size == 0 || batch_size > grads.len() {
        return Err(domain("batch size must lie in 1..=N"));
    }
    let shape = grads[0].shape();
    for g in grads {
        g.check_shape(shape)?;
    }
    Ok(())
}

fn binomial_at_most(n: usize, k: usize, cap: usize) -> Option<usize> {
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
        if acc > cap as u128 {
            return None;
        }
    }
    Some(acc as usize)
}

/// Minibatch gradient variance around the full-batch gradient, sampling
/// minibatches of size `batch_size` without replacement.
///
/// When there are at most `draws` distinct minibatches they are all
/// enumerated and the result is exact; otherwise `draws` minibatches are
/// drawn from the stream `(seed, "estimators/beta1", 0)`.
pub fn estimate_beta1(
    grads: &[Matrix],
    batch_size: usize,
    draws: usize,
    seed: u64,
) -> Result<NoiseStats> {
    check_grads(grads, batch_size)?;
    if draws < 2 {
        return Err(domain("need at least two minibatch draws"));
    }
    let n = grads.len();
    let full = mean_gradient(grads, 0..n, n);
    let dev = |idx: &[usize]| {
        let mb = mean_gradient(grads, idx.iter().copied(), idx.len());
        let d = &mb - &full;
        d.dot(&d)
    };
    if let Some(total) = binomial_at_most(n, batch_size, draws) {
        let mut comb: Vec<usize> = (0..batch_size).collect();
        let mut acc = 0.0;
        loop {
            acc += dev(&comb);
            // Next combination in lexicographic order.
            let mut i = batch_size;
            while i > 0 && comb[i - 1] == n - batch_size + i - 1 {
                i -= 1;
            }
            if i == 0 {
                break;
            }
            comb[i - 1] += 1;
            for j in i..batch_size {
                comb[j] = comb[j - 1] + 1;
            }
        }
        return Ok(NoiseStats {
            beta1: acc / total as f64,
            standard_error: 0.0,
            sample_count: total,
            batch_size,
            exhaustive: true,
        });
    }
    let mut rng = rng::stream(seed, "estimators/beta1", 0);
    let samples: Vec<f64> = (0..draws)
        .map(|_| dev(&index::sample(&mut rng, n, batch_size).into_vec()))
        .collect();
    let mean = samples.iter().sum::<f64>() / draws as f64;
    let var = samples.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (draws - 1) as f64;
    Ok(NoiseStats {
        beta1: mean,
        standard_error: libm::sqrt(var / draws as f64),
        sample_count: draws,
        batch_size,
        exhaustive: false,
    })
}

/// Closed form of the quantity [`estimate_beta1`] samples:
/// `(1/B - 1/N) · N/(N-1) · (1/N) Σ ‖g_i - ḡ‖²`.
pub fn beta1_exact(grads: &[Matrix], batch_size: usize) -> Result<f64> {
    check_grads(grads, batch_size)?;
    let n = grads.len();
    let full = mean_gradient(grads, 0..n, n);
    let spread: f64 = grads
        .iter()
        .map(|g| {
            let d = g - &full;
            d.dot(&d)
        })
        .sum::<f64>()
        / n as f64;
    let (b, nf) = (batch_size as f64, n as f64);
    Ok((1.0 / b - 1.0 / nf) * nf / (nf - 1.0) * spread)
}

/// Which constants to use when solving for `β_k`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum BetaConvention {
    /// `β = (∂λ_k/∂t + sqrt(η) λ_k g_k - Σ_{j≠k} λ_k/(λ_k - λ_j)) / sqrt(η λ_k)`
    /// with central differences for the time derivative.
    PaperLiteral,
    /// Inverts one Euler step of the squared-singular-value SDE:
    /// `β = (Δλ_k - drift_k dt) / (2 sqrt(2ηD λ_k dt))`.
    Theorem31Consistent,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExtractParams {
    pub eta: f64,
    /// Required by the SDE-consistent convention.
    pub diffusion: Option<f64>,
    pub dt: f64,
    pub m: usize,
    pub n: usize,
}

/// Per-step, per-mode series (`[step][mode]`).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BetaSeries {
    pub convention: BetaConvention,
    pub dt: f64,
    pub beta: Vec<Vec<f64>>,
    pub dlambda: Vec<Vec<f64>>,
    pub grad_force: Vec<Vec<f64>>,
    pub repulsion: Vec<Vec<f64>>,
}

impl BetaSeries {
    pub fn steps(&self) -> usize {
        self.beta.len()
    }

    /// Brownian increments `β sqrt(dt)`; meaningful for the SDE-consistent convention.
    pub fn increments(&self) -> Vec<Vec<f64>> {
        let s = libm::sqrt(self.dt);
        self.beta
            .iter()
            .map(|row| row.iter().map(|b| b * s).collect())
            .collect()
    }
}

/// Smallest `λ` accepted relative to the largest in the trajectory.
const LAMBDA_REL_MIN: f64 = 1e-14;

fn repulsion_row(lambdas: &[f64]) -> Result<Vec<f64>> {
    let top = lambdas.iter().fold(0.0f64, |a, l| a.max(l.abs()));
    let tol = GAP_TOL * top;
    (0..lambdas.len())
        .map(|k| {
            let mut acc = 0.0;
            for (j, &lj) in lambdas.iter().enumerate() {
                if j == k {
                    continue;
                }
                if (lambdas[k] - lj).abs() < tol {
                    return Err(Error::Degenerate {
                        a: lambdas[k],
                        b: lj,
                        tol,
                    });
                }
                acc += lambdas[k] / (lambdas[k] - lj);
            }
            Ok(acc)
        })
        .collect()
}

/// Solves for the stochastic term of each mode along a trajectory.
///
/// `lambda_traj[t][k]` is `λ_k` at step `t`; `grad_force[t][k]` is the
/// projected gradient `u_kᵀ ∇L v_k` at step `t`.
pub fn extract_beta(
    lambda_traj: &[Vec<f64>],
    grad_force: &[Vec<f64>],
    params: &ExtractParams,
    convention: BetaConvention,
) -> Result<BetaSeries> {
    let steps = lambda_traj.len();
    if steps < 2 {
        return Err(domain("need at least two time points"));
    }
    if grad_force.len() != steps {
        return Err(domain("gradient series length must match the trajectory"));
    }
    let r = lambda_traj[0].len();
    if r == 0
        || lambda_traj
            .iter()
            .chain(grad_force)
            .any(|row| row.len() != r)
    {
        return Err(domain(
            "every row must hold the same nonzero number of modes",
        ));
    }
    if !(params.eta > 0.0 && params.dt > 0.0) {
        return Err(domain("eta and dt must be positive"));
    }
    if params.m < params.n {
        return Err(domain("need m >= n"));
    }
    let top = lambda_traj.iter().flatten().fold(0.0f64, |a, l| a.max(*l));
    if lambda_traj
        .iter()
        .flatten()
        .any(|l| !(l.is_finite() && *l > LAMBDA_REL_MIN * top))
    {
        return Err(domain("trajectory must stay strictly positive"));
    }
    if grad_force.iter().flatten().any(|g| !g.is_finite()) {
        return Err(domain("gradient series must be finite"));
    }
    let reps: Vec<Vec<f64>> = lambda_traj
        .iter()
        .map(|row| repulsion_row(row))
        .collect::<Result<_>>()?;
    let (eta, dt) = (params.eta, params.dt);
    let mut out = BetaSeries {
        convention,
        dt,
        beta: Vec::new(),
        dlambda: Vec::new(),
        grad_force: Vec::new(),
        repulsion: Vec::new(),
    };
    match convention {
        BetaConvention::PaperLiteral => {
            let se = libm::sqrt(eta);
            for t in 0..steps {
                let (lo, hi) = (t.saturating_sub(1), (t + 1).min(steps - 1));
                let span = (hi - lo) as f64 * dt;
                let mut row = vec![0.0; r];
                let mut dl = vec![0.0; r];
                let mut gf = vec![0.0; r];
                for k in 0..r {
                    let l = lambda_traj[t][k];
                    dl[k] = (lambda_traj[hi][k] - lambda_traj[lo][k]) / span;
                    gf[k] = se * l * grad_force[t][k];
                    row[k] = (dl[k] + gf[k] - reps[t][k]) / libm::sqrt(eta * l);
                }
                out.beta.push(row);
                out.dlambda.push(dl);
                out.grad_force.push(gf);
                out.repulsion.push(reps[t].clone());
            }
        }
        BetaConvention::Theorem31Consistent => {
            let d = params.diffusion.filter(|d| *d > 0.0).ok_or_else(|| {
                domain("the SDE-consistent convention needs a positive diffusion constant")
            })?;
            let ed = eta * d;
            let base = ed * (params.m - params.n + 3) as f64;
            for t in 0..steps - 1 {
                let mut row = vec![0.0; r];
                let mut dl = vec![0.0; r];
                let mut gf = vec![0.0; r];
                let mut rp = vec![0.0; r];
                for k in 0..r {
                    let l = lambda_traj[t][k];
                    let inc = lambda_traj[t + 1][k] - l;
                    gf[k] = -2.0 * libm::sqrt(l) * eta * grad_force[t][k];
                    rp[k] = 2.0 * ed * reps[t][k];
                    dl[k] = inc / dt;
                    let drift = gf[k] + base + rp[k];
                    row[k] = (inc - drift * dt) / (2.0 * libm::sqrt(2.0 * ed * l * dt));
                }
                out.beta.push(row);
                out.dlambda.push(dl);
                out.grad_force.push(gf);
                out.repulsion.push(rp);
            }
        }
    }
    if out.beta.iter().flatten().any(|b| !b.is_finite()) {
        return Err(domain("extracted series is not finite"));
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MagnitudeShares {
    pub dlambda: f64,
    pub grad_force: f64,
    pub repulsion: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorrelationReport {
    pub repulsion_vs_dlambda: Option<f64>,
    pub repulsion_vs_gradforce: Option<f64>,
    pub magnitude_shares: MagnitudeShares,
    /// Set when some correlation is undefined because a series is constant.
    pub undefined: bool,
    pub steps: usize,
}

/// Pearson correlation, `None` when either series has zero variance.
pub fn pearson(a: &[f64], b: &[f64]) -> Option<f64> {
    if a.len() != b.len() || a.len() < 2 {
        return None;
    }
    let n = a.len() as f64;
    let ma = a.iter().sum::<f64>() / n;
    let mb = b.iter().sum::<f64>() / n;
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        sab += (x - ma) * (y - mb);
        saa += (x - ma) * (x - ma);
        sbb += (y - mb) * (y - mb);
    }
    if saa <= 0.0 || sbb <= 0.0 {
        return None;
    }
    Some((sab / libm::sqrt(saa * sbb)).clamp(-1.0, 1.0))
}

/// Correlations of the repulsion force with the other components, pooled
/// over modes, and the share of mean absolute magnitude of each component.
pub fn noise_correlation_report(series: &BetaSeries) -> Result<CorrelationReport> {
    if series.steps() < 30 {
        return Err(domain("need at least 30 steps"));
    }
    let flat = |s: &[Vec<f64>]| s.iter().flatten().copied().collect::<Vec<f64>>();
    let (dl, gf, rp) = (
        flat(&series.dlambda),
        flat(&series.grad_force),
        flat(&series.repulsion),
    );
    let vs_dl = pearson(&rp, &dl);
    let vs_gf = pearson(&rp, &gf);
    let mag = |v: &[f64]| v.iter().map(|x| x.abs()).sum::<f64>() / v.len().max(1) as f64;
    let (a, b, c) = (mag(&dl), mag(&gf), mag(&rp));
    let total = a + b + c;
    let share = |x: f64| if total > 0.0 { x / total } else { 0.0 };
    Ok(CorrelationReport {
        repulsion_vs_dlambda: vs_dl,
        repulsion_vs_gradforce: vs_gf,
        magnitude_shares: MagnitudeShares {
            dlambda: share(a),
            grad_force: share(b),
            repulsion: share(c),
        },
        undefined: vs_dl.is_none() || vs_gf.is_none(),
        steps: series.steps(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn snap(values: Vec<f64>) -> SpectrumSnapshot {
        SpectrumSnapshot { step: 0, values }
    }

    #[test]
    fn diffusion_plug_in() {
        assert_eq!(
            estimate_diffusion(&[snap(vec![2.0, 2.0, 2.0])], 10.0).unwrap(),
            0.0
        );
        let d = estimate_diffusion(&[snap(vec![5.0, 3.0, 1.0])], 100.0).unwrap();
        assert!((d - 0.04).abs() < 1e-15);
        assert!(estimate_diffusion(&[snap(vec![1.0])], 0.0).is_err());
        assert!(estimate_diffusion(&[], 1.0).is_err());
    }

    #[test]
    fn beta1_identical_and_full_batch() {
        let g = Matrix::from_fn(2, 3, |i, j| (i + 2 * j) as f64);
        let same = vec![g.clone(); 5];
        assert_eq!(estimate_beta1(&same, 2, 200, 0).unwrap().beta1, 0.0);
        let varied: Vec<Matrix> = (0..6).map(|s| g.scaled(s as f64)).collect();
        let full = estimate_beta1(&varied, 6, 200, 0).unwrap();
        assert!(full.beta1.abs() < 1e-24 && full.exhaustive);
        assert!(estimate_beta1(&varied, 7, 200, 0).is_err());
    }

    #[test]
    fn beta1_antipodal_pair() {
        let g = Matrix::from_fn(3, 2, |i, j| 1.0 + i as f64 - 0.5 * j as f64);
        let pair = vec![g.clone(), g.scaled(-1.0)];
        let st = estimate_beta1(&pair, 1, 200, 0).unwrap();
        assert_eq!(st.beta1, g.dot(&g));
        assert!(st.exhaustive);
        assert_eq!(st.sample_count, 2);
    }

    #[test]
    fn enumeration_matches_closed_form() {
        let grads: Vec<Matrix> = (0..7)
            .map(|s| Matrix::from_fn(2, 2, |i, j| ((s * 5 + i * 3 + j) % 7) as f64))
            .collect();
        for b in 1..=7 {
            let st = estimate_beta1(&grads, b, 1000, 0).unwrap();
            assert!(st.exhaustive);
            let exact = beta1_exact(&grads, b).unwrap();
            assert!((st.beta1 - exact).abs() < 1e-12 * exact.max(1.0), "B={b}");
        }
    }

    #[test]
    fn pearson_edge_cases() {
        let a = [1.0, 2.0, 4.0, 3.0];
        assert!((pearson(&a, &a).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(pearson(&a, &[1.0; 4]), None);
    }

    #[test]
    fn degenerate_trajectory_rejected() {
        let traj = vec![vec![2.0, 1.0], vec![1.5, 1.5]];
        let grads = vec![vec![0.0; 2]; 2];
        let p = ExtractParams {
            eta: 0.1,
            diffusion: Some(1.0),
            dt: 0.01,
            m: 3,
            n: 2,
        };
        assert!(matches!(
            extract_beta(&traj, &grads, &p, BetaConvention::PaperLiteral),
            Err(Error::Degenerate { .. })
        ));
        let traj = vec![vec![2.0, 1.0], vec![1.5, 0.0]];
        assert!(matches!(
            extract_beta(&traj, &grads, &p, BetaConvention::PaperLiteral),
            Err(Error::Domain(_))
        ));
    }
}
