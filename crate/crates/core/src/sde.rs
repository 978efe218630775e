//! Euler–Maruyama integration of the matrix SGD diffusion
//!
//! ```text
//! dW = -η ∇L dt + sqrt(2ηD) dB          (isotropic)
//! dW = -η ∇L dt + B(W,t) dB,  B Bᵀ = 2η Σ(W,t)   (anisotropic)
//! ```
//!
//! The anisotropic covariance is an operator on matrix perturbations,
//! `Cov(dW_ij, dW_pq) = 2η Σ[(i,j),(p,q)] dt`, so structured covariances
//! never need an `(mn)²` array.

use alloc::format;
use alloc::sync::Arc;
use alloc::vec::Vec;

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::linalg::{complete_basis, svd, symmetric_eigen, Matrix};
use crate::rng;

/// Weight matrix at a point of the trajectory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightState {
    pub matrix: Matrix,
    pub step: u64,
    pub time: f64,
}

impl WeightState {
    pub fn new(matrix: Matrix) -> Result<Self> {
        if !matrix.is_finite() {
            return Err(domain("weight matrix has non-finite entries"));
        }
        Ok(Self {
            matrix,
            step: 0,
            time: 0.0,
        })
    }
}

/// Noise covariance as a linear operator on `m x n` perturbations.
pub trait CovarianceOperator: Send + Sync {
    /// `Σ(W, t)[p]`.
    fn apply(&self, w: &Matrix, t: f64, p: &Matrix) -> Matrix;

    /// `Σ(W, t)^{1/2}[xi]`, the symmetric square root applied to `xi`.
    fn apply_sqrt(&self, w: &Matrix, t: f64, xi: &Matrix) -> Matrix;
}

/// `Σ = D · I`.
#[derive(Debug, Clone, Copy)]
pub struct ScaledIdentity(pub f64);

impl ScaledIdentity {
    pub fn new(d: f64) -> Result<Self> {
        if !(d >= 0.0) {
            return Err(domain("covariance scale must be nonnegative"));
        }
        Ok(Self(d))
    }
}

impl CovarianceOperator for ScaledIdentity {
    fn apply(&self, _w: &Matrix, _t: f64, p: &Matrix) -> Matrix {
        p.scaled(self.0)
    }

    fn apply_sqrt(&self, _w: &Matrix, _t: f64, xi: &Matrix) -> Matrix {
        xi.scaled(libm::sqrt(self.0))
    }
}

/// Independent entries with per-entry variances.
#[derive(Debug, Clone)]
pub struct DiagonalCovariance {
    variances: Matrix,
}

impl DiagonalCovariance {
    pub fn new(variances: Matrix) -> Result<Self> {
        if variances
            .as_slice()
            .iter()
            .any(|v| !(*v >= 0.0) || !v.is_finite())
        {
            return Err(domain("diagonal covariance is not positive semidefinite"));
        }
        Ok(Self { variances })
    }
}

impl CovarianceOperator for DiagonalCovariance {
    fn apply(&self, _w: &Matrix, _t: f64, p: &Matrix) -> Matrix {
        Matrix::from_fn(p.rows(), p.cols(), |i, j| {
            self.variances[(i, j)] * p[(i, j)]
        })
    }

    fn apply_sqrt(&self, _w: &Matrix, _t: f64, xi: &Matrix) -> Matrix {
        Matrix::from_fn(xi.rows(), xi.cols(), |i, j| {
            libm::sqrt(self.variances[(i, j)]) * xi[(i, j)]
        })
    }
}

/// Separable covariance `Cov(P_ij, P_pq) = A_ip · B_jq`, i.e. `Σ[P] = A P B`.
#[derive(Debug, Clone)]
pub struct KroneckerCovariance {
    row: Matrix,
    col: Matrix,
    row_sqrt: Matrix,
    col_sqrt: Matrix,
}

impl KroneckerCovariance {
    /// `row` is `m x m`, `col` is `n x n`; both must be symmetric PSD.
    pub fn new(row: Matrix, col: Matrix) -> Result<Self> {
        let row_sqrt = psd_sqrt(&row)?;
        let col_sqrt = psd_sqrt(&col)?;
        Ok(Self {
            row,
            col,
            row_sqrt,
            col_sqrt,
        })
    }
}

impl CovarianceOperator for KroneckerCovariance {
    fn apply(&self, _w: &Matrix, _t: f64, p: &Matrix) -> Matrix {
        self.row.matmul(p).matmul(&self.col)
    }

    fn apply_sqrt(&self, _w: &Matrix, _t: f64, xi: &Matrix) -> Matrix {
        self.row_sqrt.matmul(xi).matmul(&self.col_sqrt)
    }
}

fn psd_sqrt(a: &Matrix) -> Result<Matrix> {
    let n = a.rows();
    a.check_shape((n, n))?;
    let asym = (a - &a.transpose()).max_abs();
    if asym > 1e-12 * a.max_abs().max(1.0) {
        return Err(domain("covariance factor is not symmetric"));
    }
    let eig = symmetric_eigen(a)?;
    let top = eig.values.first().copied().unwrap_or(0.0).abs();
    if eig
        .values
        .iter()
        .any(|&l| l < -1e-12 * top.max(f64::MIN_POSITIVE))
    {
        return Err(domain("covariance factor is not positive semidefinite"));
    }
    let roots: Vec<f64> = eig.values.iter().map(|&l| libm::sqrt(l.max(0.0))).collect();
    let scaled = Matrix::from_fn(n, n, |i, j| eig.vectors[(i, j)] * roots[j]);
    Ok(scaled.matmul(&eig.vectors.transpose()))
}

#[derive(Clone)]
pub enum NoiseModel {
    Isotropic,
    Anisotropic(Arc<dyn CovarianceOperator>),
}

impl core::fmt::Debug for NoiseModel {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            NoiseModel::Isotropic => f.write_str("Isotropic"),
            NoiseModel::Anisotropic(_) => f.write_str("Anisotropic(..)"),
        }
    }
}

/// Learning rate, diffusion constant and time step of the weight SDE.
#[derive(Debug, Clone)]
pub struct SdeParams {
    pub eta: f64,
    pub diffusion: f64,
    pub dt: f64,
    pub noise: NoiseModel,
}

impl SdeParams {
    pub fn isotropic(eta: f64, diffusion: f64, dt: f64) -> Result<Self> {
        let p = Self {
            eta,
            diffusion,
            dt,
            noise: NoiseModel::Isotropic,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn anisotropic(eta: f64, dt: f64, sigma: Arc<dyn CovarianceOperator>) -> Result<Self> {
        let p = Self {
            eta,
            diffusion: 0.0,
            dt,
            noise: NoiseModel::Anisotropic(sigma),
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.eta > 0.0) || !(self.diffusion >= 0.0) || !(self.dt > 0.0) {
            return Err(domain("SDE parameters need eta > 0, D >= 0, dt > 0"));
        }
        Ok(())
    }
}

/// Supplies `∇_W L` at the current state.
pub trait GradientOracle {
    fn gradient(&mut self, state: &WeightState) -> Matrix;
}

impl<F: FnMut(&WeightState) -> Matrix> GradientOracle for F {
    fn gradient(&mut self, state: &WeightState) -> Matrix {
        self(state)
    }
}

fn gaussian_matrix<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> Matrix {
    Matrix::from_fn(rows, cols, |_, _| rng.sample::<f64, _>(StandardNormal))
}

/// One Euler–Maruyama step `W' = W - η ∇L dt + noise`.
pub fn step_matrix_sde<R: Rng + ?Sized>(
    state: &WeightState,
    grad: &Matrix,
    params: &SdeParams,
    rng: &mut R,
) -> Result<WeightState> {
    params.validate()?;
    grad.check_shape(state.matrix.shape())?;
    if !grad.is_finite() {
        return Err(domain("gradient has non-finite entries"));
    }
    let (m, n) = state.matrix.shape();
    let mut next = state.matrix.clone();
    next.axpy(-params.eta * params.dt, grad);
    match &params.noise {
        NoiseModel::Isotropic => {
            if params.diffusion > 0.0 {
                let amp = libm::sqrt(2.0 * params.eta * params.diffusion * params.dt);
                for v in next.as_mut_slice() {
                    *v += amp * rng.sample::<f64, _>(StandardNormal);
                }
            }
        }
        NoiseModel::Anisotropic(sigma) => {
            let xi = gaussian_matrix(m, n, rng);
            // Probe the quadratic form with the drawn direction.
            let q = xi.dot(&sigma.apply(&state.matrix, state.time, &xi));
            if q < -1e-10 * xi.dot(&xi) {
                return Err(domain(
                    "anisotropic covariance is not positive semidefinite",
                ));
            }
            let noise = sigma.apply_sqrt(&state.matrix, state.time, &xi);
            noise.check_shape((m, n))?;
            next.axpy(libm::sqrt(2.0 * params.eta * params.dt), &noise);
        }
    }
    Ok(WeightState {
        matrix: next,
        step: state.step + 1,
        time: (state.step + 1) as f64 * params.dt,
    })
}

/// Runs `steps` SDE steps from `w0`.
///
/// Step `s` draws its noise from the stream keyed by `(seed, "sde/step", s)`.
/// `recorder` sees the initial state and every state whose step is a multiple
/// of `stride` (`stride = 0` records nothing).
pub fn simulate_weights(
    w0: &WeightState,
    grad_oracle: &mut dyn GradientOracle,
    params: &SdeParams,
    steps: u64,
    seed: u64,
    stride: u64,
    recorder: &mut dyn FnMut(&WeightState),
) -> Result<WeightState> {
    params.validate()?;
    if stride > 0 {
        recorder(w0);
    }
    let mut state = w0.clone();
    for _ in 0..steps {
        let grad = grad_oracle.gradient(&state);
        let mut stream = rng::stream(seed, "sde/step", state.step);
        state = step_matrix_sde(&state, &grad, params, &mut stream)?;
        if stride > 0 && state.step % stride == 0 {
            recorder(&state);
        }
    }
    Ok(state)
}

/// Second-order Itô correction `η Tr[Σ ∇²σ_k]` to the drift of the k-th
/// (0-based, descending) singular value.
///
/// Contracts `Σ` against the exact second-order perturbation of `σ_k`:
/// with `a_j = u_jᵀ E v_k` and `b_j = u_kᵀ E v_j`,
///
/// ```text
/// σ_k(W+E) - σ_k - u_kᵀEv_k ≈ Σ_{j≠k, j<n} [σ_k(a_j² + b_j²) + 2σ_j a_j b_j] / (2(σ_k² - σ_j²))
///                            + Σ_{j≥n} a_j² / (2σ_k)
/// ```
///
/// summed over every singular triplet (no truncation). Pairs with
/// `|σ_k² - σ_j²| < gap_tol · σ_1²` are rejected as degenerate.
pub fn anisotropic_sigma_drift(
    w: &Matrix,
    sigma: &dyn CovarianceOperator,
    t: f64,
    k: usize,
    eta: f64,
    gap_tol: f64,
) -> Result<f64> {
    if w.rows() < w.cols() {
        let wt = w.transpose();
        let transposed = Transposed(sigma);
        return anisotropic_sigma_drift(&wt, &transposed, t, k, eta, gap_tol);
    }
    let (m, n) = w.shape();
    if k >= n {
        return Err(domain(format!("mode index {k} out of range for {m}x{n}")));
    }
    let d = svd(w)?;
    let s = &d.s;
    let sk = s[k];
    if !(sk > 0.0) {
        return Err(domain("singular value must be positive"));
    }
    let tol = gap_tol * s[0] * s[0];
    let u_full = complete_basis(&d.u);
    let vk = d.v.column(k);
    let uk = d.u.column(k);
    let quad = |p: &Matrix, q: &Matrix| p.dot(&sigma.apply(w, t, q));

    let mut second = 0.0;
    for j in 0..n {
        if j == k {
            continue;
        }
        let gap = sk * sk - s[j] * s[j];
        if gap.abs() < tol {
            return Err(Error::Degenerate {
                a: sk,
                b: s[j],
                tol,
            });
        }
        let uj = u_full.column(j);
        let vj = d.v.column(j);
        let pa = Matrix::outer(&uj, &vk);
        let pb = Matrix::outer(&uk, &vj);
        let aa = quad(&pa, &pa);
        let bb = quad(&pb, &pb);
        let ab = quad(&pa, &pb);
        second += (sk * (aa + bb) + 2.0 * s[j] * ab) / (2.0 * gap);
    }
    for j in n..m {
        let pa = Matrix::outer(&u_full.column(j), &vk);
        second += quad(&pa, &pa) / (2.0 * sk);
    }
    // Tr[Σ H] = E[Eᵀ H E] = 2 E[second-order term] for E ~ N(0, Σ).
    Ok(eta * 2.0 * second)
}

struct Transposed<'a>(&'a dyn CovarianceOperator);

impl CovarianceOperator for Transposed<'_> {
    fn apply(&self, w: &Matrix, t: f64, p: &Matrix) -> Matrix {
        self.0.apply(&w.transpose(), t, &p.transpose()).transpose()
    }

    fn apply_sqrt(&self, w: &Matrix, t: f64, xi: &Matrix) -> Matrix {
        self.0
            .apply_sqrt(&w.transpose(), t, &xi.transpose())
            .transpose()
    }
}
