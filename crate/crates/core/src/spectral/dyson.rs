use alloc::vec::Vec;

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::lambda_repulsion;
use crate::error::{domain, Error, Result};
use crate::rng;

/// Absolute floor for a squared singular value; steps that cross it are reflected.
pub const LAMBDA_FLOOR: f64 = 1e-12;
/// Relative gap floor: consecutive particles must stay `GAP_FLOOR * λ_1` apart.
pub const GAP_FLOOR: f64 = 1e-10;
/// Maximum bisection depth for a single step.
/// Largest drift displacement in one sub-step, as a fraction of the nearest gap.
pub const DRIFT_REACH: f64 = 0.5;

pub const MAX_BISECTIONS: u32 = 20;

/// Ordered squared singular values of an `m x n` matrix (`m >= n`).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DysonState {
    lambdas: Vec<f64>,
    m: usize,
    n: usize,
}

impl DysonState {
    /// `lambdas` must be strictly decreasing and positive with at most `n` entries.
    pub fn new(lambdas: Vec<f64>, m: usize, n: usize) -> Result<Self> {
        if m < n {
            return Err(domain("need m >= n"));
        }
        if lambdas.is_empty() || lambdas.len() > n {
            return Err(domain("particle count must lie in 1..=n"));
        }
        if lambdas.iter().any(|l| !l.is_finite() || *l <= 0.0) {
            return Err(domain(
                "squared singular values must be finite and positive",
            ));
        }
        let gap = GAP_FLOOR * lambdas[0];
        for w in lambdas.windows(2) {
            if w[0] - w[1] <= gap {
                return Err(Error::Degenerate {
                    a: w[0],
                    b: w[1],
                    tol: gap,
                });
            }
        }
        Ok(Self { lambdas, m, n })
    }

    pub fn lambdas(&self) -> &[f64] {
        &self.lambdas
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.lambdas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lambdas.is_empty()
    }

    pub fn trace(&self) -> f64 {
        self.lambdas.iter().sum()
    }
}

/// Which clock the simulation runs on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum TimeScale {
    /// Physical time `t`, drift and noise carry the `ηD` factors.
    Physical,
    /// Rescaled time `s = 2ηD t`:
    /// `dY_k = [(m-n+3)/2 + Σ_{j≠k} Y_k/(Y_k - Y_j)] ds + 2 sqrt(Y_k) dW_k`.
    Canonical,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DysonConfig {
    pub eta: f64,
    pub diffusion: f64,
    /// Step on the chosen clock.
    pub dt: f64,
    pub steps: u64,
    /// Record every `record_stride` steps (and the initial state).
    pub record_stride: u64,
    pub time_scale: TimeScale,
    /// Mean-field restoring force `-β₁ λ_k` on the physical clock (0 for pure repulsion).
    pub beta1: f64,
}

impl DysonConfig {
    pub fn new(eta: f64, diffusion: f64, dt: f64, steps: u64) -> Self {
        Self {
            eta,
            diffusion,
            dt,
            steps,
            record_stride: 1,
            time_scale: TimeScale::Physical,
            beta1: 0.0,
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.eta > 0.0 && self.eta.is_finite()) {
            return Err(domain("eta must be positive"));
        }
        if !(self.diffusion >= 0.0 && self.diffusion.is_finite()) {
            return Err(domain("diffusion must be finite and nonnegative"));
        }
        if self.time_scale == TimeScale::Canonical && self.diffusion == 0.0 {
            return Err(domain("the canonical clock needs positive diffusion"));
        }
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(domain("dt must be positive"));
        }
        if !(self.beta1 >= 0.0 && self.beta1.is_finite()) {
            return Err(domain("beta1 must be finite and nonnegative"));
        }
        if self.record_stride == 0 {
            return Err(domain("record_stride must be positive"));
        }
        Ok(())
    }

    // (drift multiplier, noise variance rate, restoring rate) on the configured clock.
    fn coefficients(&self) -> (f64, f64, f64) {
        match self.time_scale {
            TimeScale::Physical => (
                self.eta * self.diffusion,
                2.0 * self.eta * self.diffusion,
                self.beta1,
            ),
            TimeScale::Canonical => (0.5, 1.0, self.beta1 / (2.0 * self.eta * self.diffusion)),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DysonTrajectory {
    pub steps: Vec<u64>,
    pub times: Vec<f64>,
    pub lambdas: Vec<Vec<f64>>,
    /// Steps whose first attempt violated ordering or the floor and were bisected.
    pub bisected_steps: u64,
    /// Floor reflections applied.
    pub reflections: u64,
    /// Sub-steps that still violated ordering at the bisection limit and were
    /// resolved by relabelling.
    pub collisions: u64,
    pub total_steps: u64,
}

impl DysonTrajectory {
    pub fn bisection_fraction(&self) -> f64 {
        if self.total_steps == 0 {
            0.0
        } else {
            self.bisected_steps as f64 / self.total_steps as f64
        }
    }

    pub fn last(&self) -> &[f64] {
        self.lambdas.last().map(Vec::as_slice).unwrap_or(&[])
    }
}

/// Zero-gradient drift on the canonical clock:
/// `(m-n+3)/2 + Σ_{j≠k} Y_k/(Y_k - Y_j)`.
pub fn canonical_drift(state: &DysonState) -> Result<Vec<f64>> {
    let base = 0.5 * (state.m - state.n + 3) as f64;
    (0..state.len())
        .map(|k| Ok(base + lambda_repulsion(&state.lambdas, k)?))
        .collect()
}

struct Stepper {
    drift_scale: f64,
    noise_rate: f64,
    dim_term: f64,
    restoring: f64,
    reflections: u64,
    splits: u64,
    collisions: u64,
}

impl Stepper {
    fn drift(&self, lambdas: &[f64]) -> Result<Vec<f64>> {
        (0..lambdas.len())
            .map(|k| {
                let push = self.drift_scale * (self.dim_term + 2.0 * lambda_repulsion(lambdas, k)?);
                Ok(push - self.restoring * lambdas[k])
            })
            .collect()
    }

    // One Euler–Maruyama attempt with a given Brownian increment.
    fn attempt(&self, lambdas: &[f64], h: f64, dw: &[f64]) -> Result<Option<(Vec<f64>, u64)>> {
        let drift = self.drift(lambdas)?;
        let r = lambdas.len();
        let overshoots = (0..r).any(|k| {
            let below = if k + 1 < r {
                lambdas[k] - lambdas[k + 1]
            } else {
                f64::INFINITY
            };
            let above = if k > 0 {
                lambdas[k - 1] - lambdas[k]
            } else {
                f64::INFINITY
            };
            (drift[k] * h).abs() > DRIFT_REACH * below.min(above)
        });
        if overshoots {
            return Ok(None);
        }
        let mut reflected = 0;
        let next: Vec<f64> = lambdas
            .iter()
            .zip(&drift)
            .zip(dw)
            .map(|((&l, &b), &w)| {
                let v = l + b * h + 2.0 * libm::sqrt(self.noise_rate * l) * w;
                if v < LAMBDA_FLOOR {
                    reflected += 1;
                    v.abs().max(LAMBDA_FLOOR)
                } else {
                    v
                }
            })
            .collect();
        if next.iter().any(|v| !v.is_finite()) {
            return Ok(None);
        }
        let gap = GAP_FLOOR * next[0];
        if next.windows(2).any(|w| w[0] - w[1] <= gap) {
            return Ok(None);
        }
        Ok(Some((next, reflected)))
    }

    // Step below the bisection floor: repulsion gaps are clamped to the local
    // noise scale, then the particles are relabelled in order and separated.
    fn collide(&mut self, lambdas: &[f64], h: f64, dw: &[f64], step: u64) -> Result<Vec<f64>> {
        self.collisions += 1;
        let resolution = libm::sqrt(self.noise_rate * lambdas[0] * h).max(GAP_FLOOR * lambdas[0]);
        let mut next: Vec<f64> = (0..lambdas.len())
            .map(|k| {
                let lk = lambdas[k];
                let rep: f64 = lambdas
                    .iter()
                    .enumerate()
                    .filter(|(j, _)| *j != k)
                    .map(|(_, &lj)| {
                        let gap = lk - lj;
                        lk / (gap.signum() * gap.abs().max(resolution))
                    })
                    .sum();
                let drift = self.drift_scale * (self.dim_term + 2.0 * rep) - self.restoring * lk;
                let v = lk + drift * h + 2.0 * libm::sqrt(self.noise_rate * lk) * dw[k];
                if v < LAMBDA_FLOOR {
                    self.reflections += 1;
                    v.abs().max(LAMBDA_FLOOR)
                } else {
                    v
                }
            })
            .collect();
        if next.iter().any(|v| !v.is_finite()) {
            return Err(Error::Integration {
                step: step as usize,
                bisections: MAX_BISECTIONS as usize,
                reason: "non-finite state after maximum step bisection".into(),
            });
        }
        next.sort_by(|a, b| b.total_cmp(a));
        let sep = 2.0 * GAP_FLOOR * next[0];
        for i in (0..next.len() - 1).rev() {
            next[i] = next[i].max(next[i + 1] + sep);
        }
        Ok(next)
    }

    // Advance by `h` with increment `dw`; on failure refine with a Brownian bridge.
    fn advance<R: Rng>(
        &mut self,
        lambdas: &[f64],
        h: f64,
        dw: &[f64],
        depth: u32,
        step: u64,
        rng: &mut R,
    ) -> Result<Vec<f64>> {
        if let Some((next, reflected)) = self.attempt(lambdas, h, dw)? {
            self.reflections += reflected;
            return Ok(next);
        }
        if depth >= MAX_BISECTIONS {
            return self.collide(lambdas, h, dw, step);
        }
        self.splits += 1;
        let half = 0.5 * h;
        let bridge = libm::sqrt(0.25 * h);
        let first: Vec<f64> = dw
            .iter()
            .map(|w| 0.5 * w + bridge * rng.sample::<f64, _>(StandardNormal))
            .collect();
        let second: Vec<f64> = dw.iter().zip(&first).map(|(w, a)| w - a).collect();
        let mid = self.advance(lambdas, half, &first, depth + 1, step, rng)?;
        self.advance(&mid, half, &second, depth + 1, step, rng)
    }
}

/// Euler–Maruyama simulation of the squared singular values with zero
/// gradient, optionally under the mean-field restoring force.
///
/// Step `i` draws from the stream `(seed, "dyson/step", i)`, so runs are
/// reproducible independently of recording or threading.
pub fn simulate_dyson(
    state0: &DysonState,
    config: &DysonConfig,
    seed: u64,
) -> Result<DysonTrajectory> {
    config.validate()?;
    let (drift_scale, noise_rate, restoring) = config.coefficients();
    let mut stepper = Stepper {
        drift_scale,
        noise_rate,
        dim_term: (state0.m - state0.n + 3) as f64,
        restoring,
        reflections: 0,
        splits: 0,
        collisions: 0,
    };
    let mut traj = DysonTrajectory {
        steps: Vec::new(),
        times: Vec::new(),
        lambdas: Vec::new(),
        bisected_steps: 0,
        reflections: 0,
        collisions: 0,
        total_steps: config.steps,
    };
    let mut current = state0.lambdas.clone();
    traj.steps.push(0);
    traj.times.push(0.0);
    traj.lambdas.push(current.clone());
    let sd = libm::sqrt(config.dt);
    for step in 0..config.steps {
        let mut rng = rng::stream(seed, "dyson/step", step);
        let dw: Vec<f64> = (0..current.len())
            .map(|_| sd * rng.sample::<f64, _>(StandardNormal))
            .collect();
        let before = stepper.splits;
        current = stepper.advance(&current, config.dt, &dw, 0, step, &mut rng)?;
        if stepper.splits > before {
            traj.bisected_steps += 1;
        }
        let done = step + 1;
        if done % config.record_stride == 0 {
            traj.steps.push(done);
            traj.times.push(done as f64 * config.dt);
            traj.lambdas.push(current.clone());
        }
    }
    traj.reflections = stepper.reflections;
    traj.collisions = stepper.collisions;
    Ok(traj)
}
