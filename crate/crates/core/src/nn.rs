//! A small fully connected network trained by minibatch SGD.
//!
//! Layer `x` computes `z(x) = W(x) a(x-1) + b(x)`, `a(x) = f(z(x))`, with
//! `W(x)` of shape `out x in`. Batches are stored one example per row.
//! Backpropagation follows `δ(x) = (W(x+1)ᵀ δ(x+1)) ⊙ f'(z(x))`,
//! `∂L/∂W(x) = δ(x) a(x-1)ᵀ`, `∂L/∂b(x) = δ(x)`.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::linalg::{singular_values, svd, Matrix, Svd};
use crate::rng;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Activation {
    Tanh,
    /// Subgradient 0 at the origin.
    Relu,
    Identity,
}

impl Activation {
    pub fn apply(self, z: f64) -> f64 {
        match self {
            Activation::Tanh => libm::tanh(z),
            Activation::Relu => z.max(0.0),
            Activation::Identity => z,
        }
    }

    pub fn derivative(self, z: f64) -> f64 {
        match self {
            Activation::Tanh => {
                let t = libm::tanh(z);
                1.0 - t * t
            }
            Activation::Relu => {
                if z > 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
            Activation::Identity => 1.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Layer {
    /// `out x in`.
    pub w: Matrix,
    pub b: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Mlp {
    pub layers: Vec<Layer>,
    /// Activation of the hidden layers.
    pub activation: Activation,
    /// Activation of the last layer (identity for logits or regression).
    pub output_activation: Activation,
}

impl Mlp {
    /// Gaussian `N(0, 1/fan_in)` weights and zero biases; layer `x` draws from
    /// the stream `(seed, "nn/init", x)`.
    pub fn new(dims: &[usize], activation: Activation, seed: u64) -> Result<Self> {
        if dims.len() < 2 || dims.contains(&0) {
            return Err(domain("need at least two positive layer widths"));
        }
        let layers = dims
            .windows(2)
            .enumerate()
            .map(|(x, w)| {
                let (fan_in, fan_out) = (w[0], w[1]);
                let sd = libm::sqrt(1.0 / fan_in as f64);
                let mut rng = rng::stream(seed, "nn/init", x as u64);
                Layer {
                    w: Matrix::from_fn(fan_out, fan_in, |_, _| {
                        sd * rng.sample::<f64, _>(StandardNormal)
                    }),
                    b: vec![0.0; fan_out],
                }
            })
            .collect();
        Ok(Self {
            layers,
            activation,
            output_activation: Activation::Identity,
        })
    }

    /// Builds a network from explicit layers after checking their shapes.
    pub fn from_layers(
        layers: Vec<Layer>,
        activation: Activation,
        output_activation: Activation,
    ) -> Result<Self> {
        if layers.is_empty() {
            return Err(domain("need at least one layer"));
        }
        for (i, l) in layers.iter().enumerate() {
            if l.b.len() != l.w.rows() {
                return Err(domain("bias length must match layer output width"));
            }
            if i > 0 && layers[i - 1].w.rows() != l.w.cols() {
                return Err(domain("consecutive layer dimensions disagree"));
            }
        }
        Ok(Self {
            layers,
            activation,
            output_activation,
        })
    }

    pub fn input_dim(&self) -> usize {
        self.layers[0].w.cols()
    }

    pub fn output_dim(&self) -> usize {
        self.layers[self.layers.len() - 1].w.rows()
    }

    pub fn dims(&self) -> Vec<usize> {
        let mut d = vec![self.input_dim()];
        d.extend(self.layers.iter().map(|l| l.w.rows()));
        d
    }

    fn activation_of(&self, x: usize) -> Activation {
        if x + 1 == self.layers.len() {
            self.output_activation
        } else {
            self.activation
        }
    }

    /// Applies `W(x) -= step * dW(x)`, `b(x) -= step * db(x)`.
    pub fn apply_update(&mut self, grads: &Gradients, step: f64) {
        for (l, (dw, db)) in self.layers.iter_mut().zip(grads.dw.iter().zip(&grads.db)) {
            l.w.axpy(-step, dw);
            for (b, d) in l.b.iter_mut().zip(db) {
                *b -= step * d;
            }
        }
    }
}

/// Retained pre-activations `z(x)` and activations `a(x)`; `a[0]` is the input.
#[derive(Clone, Debug, PartialEq)]
pub struct Activations {
    pub z: Vec<Matrix>,
    pub a: Vec<Matrix>,
}

impl Activations {
    pub fn output(&self) -> &Matrix {
        &self.a[self.a.len() - 1]
    }
}

pub fn forward(params: &Mlp, input: &Matrix) -> Result<Activations> {
    if input.cols() != params.input_dim() {
        return Err(domain("input width does not match the first layer"));
    }
    let mut acts = Activations {
        z: Vec::with_capacity(params.layers.len()),
        a: vec![input.clone()],
    };
    for (x, layer) in params.layers.iter().enumerate() {
        let f = params.activation_of(x);
        let mut z = acts.a[x].matmul(&layer.w.transpose());
        for i in 0..z.rows() {
            for (j, b) in layer.b.iter().enumerate() {
                z[(i, j)] += b;
            }
        }
        let mut a = z.clone();
        a.as_mut_slice().iter_mut().for_each(|v| *v = f.apply(*v));
        acts.z.push(z);
        acts.a.push(a);
    }
    Ok(acts)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Gradients {
    pub dw: Vec<Matrix>,
    pub db: Vec<Vec<f64>>,
    /// Error signals `δ(x)`, one row per example.
    pub deltas: Vec<Matrix>,
}

/// Backward pass given `∂L/∂a` at the output (one row per example).
pub fn backprop(params: &Mlp, acts: &Activations, loss_grad: &Matrix) -> Result<Gradients> {
    let depth = params.layers.len();
    if acts.z.len() != depth || acts.a.len() != depth + 1 {
        return Err(domain("activations do not belong to this network"));
    }
    for (x, layer) in params.layers.iter().enumerate() {
        if acts.z[x].cols() != layer.w.rows() || acts.a[x].cols() != layer.w.cols() {
            return Err(domain("stale activations: layer widths disagree"));
        }
    }
    loss_grad.check_shape(acts.z[depth - 1].shape())?;
    let mut deltas = vec![Matrix::zeros(0, 0); depth];
    let mut delta = loss_grad.clone();
    for x in (0..depth).rev() {
        let f = params.activation_of(x);
        for (d, z) in delta.as_mut_slice().iter_mut().zip(acts.z[x].as_slice()) {
            *d *= f.derivative(*z);
        }
        let next = if x > 0 {
            Some(delta.matmul(&params.layers[x].w))
        } else {
            None
        };
        deltas[x] = delta;
        if let Some(nx) = next {
            delta = nx;
        } else {
            break;
        }
    }
    let dw = (0..depth)
        .map(|x| deltas[x].tr_matmul(&acts.a[x]))
        .collect();
    let db = deltas
        .iter()
        .map(|d| {
            (0..d.cols())
                .map(|j| (0..d.rows()).map(|i| d[(i, j)]).sum())
                .collect()
        })
        .collect();
    Ok(Gradients { dw, db, deltas })
}

/// Mean softmax cross-entropy over the batch and its gradient with respect to the logits.
pub fn softmax_cross_entropy(logits: &Matrix, labels: &[usize]) -> Result<(f64, Matrix)> {
    let (b, c) = logits.shape();
    if labels.len() != b || b == 0 {
        return Err(domain("one label per row required"));
    }
    if labels.iter().any(|&y| y >= c) {
        return Err(domain("label out of range"));
    }
    let mut grad = Matrix::zeros(b, c);
    let mut loss = 0.0;
    for i in 0..b {
        let row = logits.row(i);
        let max = row.iter().fold(f64::NEG_INFINITY, |a, v| a.max(*v));
        let sum: f64 = row.iter().map(|v| libm::exp(v - max)).sum();
        let log_z = max + libm::log(sum);
        loss += log_z - row[labels[i]];
        for j in 0..c {
            grad[(i, j)] =
                (libm::exp(row[j] - log_z) - if j == labels[i] { 1.0 } else { 0.0 }) / b as f64;
        }
    }
    Ok((loss / b as f64, grad))
}

/// `(1/B) Σ ½‖o - y‖²` and its gradient.
pub fn mse(output: &Matrix, targets: &Matrix) -> Result<(f64, Matrix)> {
    targets.check_shape(output.shape())?;
    let b = output.rows() as f64;
    let diff = output - targets;
    let loss = 0.5 * diff.dot(&diff) / b;
    Ok((loss, diff.scaled(1.0 / b)))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum Targets {
    Classes { labels: Vec<usize>, count: usize },
    Values(Matrix),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    /// One example per row.
    pub inputs: Matrix,
    pub targets: Targets,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DatasetKind {
    /// Gaussian blobs around random unit-norm class centers.
    Blobs,
    /// Targets from a random one-hidden-layer tanh teacher plus noise.
    Teacher,
}

impl Dataset {
    pub fn len(&self) -> usize {
        self.inputs.rows()
    }

    pub fn is_empty(&self) -> bool {
        self.inputs.rows() == 0
    }

    pub fn input_dim(&self) -> usize {
        self.inputs.cols()
    }

    pub fn output_dim(&self) -> usize {
        match &self.targets {
            Targets::Classes { count, .. } => *count,
            Targets::Values(v) => v.cols(),
        }
    }

    pub fn generate(
        kind: DatasetKind,
        n: usize,
        input_dim: usize,
        output_dim: usize,
        seed: u64,
    ) -> Result<Self> {
        match kind {
            DatasetKind::Blobs => blobs(n, input_dim, output_dim, 3.0, seed),
            DatasetKind::Teacher => teacher_regression(n, input_dim, output_dim, 0.1, seed),
        }
    }

    /// Rows `idx` as a batch.
    pub fn batch(&self, idx: &[usize]) -> (Matrix, Targets) {
        let d = self.input_dim();
        let x = Matrix::from_fn(idx.len(), d, |i, j| self.inputs[(idx[i], j)]);
        let t = match &self.targets {
            Targets::Classes { labels, count } => Targets::Classes {
                labels: idx.iter().map(|&i| labels[i]).collect(),
                count: *count,
            },
            Targets::Values(v) => {
                Targets::Values(Matrix::from_fn(idx.len(), v.cols(), |i, j| v[(idx[i], j)]))
            }
        };
        (x, t)
    }
}

/// `classes` Gaussian blobs of unit within-class variance whose centers lie
/// at distance `separation` from the origin in random directions.
pub fn blobs(n: usize, dim: usize, classes: usize, separation: f64, seed: u64) -> Result<Dataset> {
    if n == 0 || dim == 0 || classes < 2 {
        return Err(domain(
            "blobs need n >= 1, dim >= 1 and at least two classes",
        ));
    }
    let mut rng = rng::stream(seed, "nn/data", 0);
    let mut centers = Matrix::from_fn(classes, dim, |_, _| rng.sample::<f64, _>(StandardNormal));
    for c in 0..classes {
        let nrm =
            libm::sqrt(centers.row(c).iter().map(|v| v * v).sum::<f64>()).max(f64::MIN_POSITIVE);
        for j in 0..dim {
            centers[(c, j)] *= separation / nrm;
        }
    }
    let labels: Vec<usize> = (0..n).map(|i| i % classes).collect();
    let inputs = Matrix::from_fn(n, dim, |i, j| {
        centers[(labels[i], j)] + rng.sample::<f64, _>(StandardNormal)
    });
    Ok(Dataset {
        inputs,
        targets: Targets::Classes {
            labels,
            count: classes,
        },
    })
}

/// Standard-normal inputs mapped through a random tanh teacher of width
/// `2 * dim`, plus Gaussian noise of standard deviation `noise`.
pub fn teacher_regression(
    n: usize,
    dim: usize,
    outputs: usize,
    noise: f64,
    seed: u64,
) -> Result<Dataset> {
    if n == 0 || dim == 0 || outputs == 0 {
        return Err(domain("teacher data needs positive sizes"));
    }
    let teacher = Mlp::new(
        &[dim, 2 * dim, outputs],
        Activation::Tanh,
        rng::derive_seed(seed, "nn/teacher", 0),
    )?;
    let mut rng = rng::stream(seed, "nn/data", 1);
    let inputs = Matrix::from_fn(n, dim, |_, _| rng.sample::<f64, _>(StandardNormal));
    let mut y = forward(&teacher, &inputs)?.output().clone();
    y.as_mut_slice()
        .iter_mut()
        .for_each(|v| *v += noise * rng.sample::<f64, _>(StandardNormal));
    Ok(Dataset {
        inputs,
        targets: Targets::Values(y),
    })
}

/// Loss and output gradient for a batch.
pub fn batch_loss(output: &Matrix, targets: &Targets) -> Result<(f64, Matrix)> {
    match targets {
        Targets::Classes { labels, .. } => softmax_cross_entropy(output, labels),
        Targets::Values(y) => mse(output, y),
    }
}

/// Loss and gradients for a batch.
pub fn loss_and_gradients(
    params: &Mlp,
    input: &Matrix,
    targets: &Targets,
) -> Result<(f64, Gradients)> {
    let acts = forward(params, input)?;
    let (loss, g) = batch_loss(acts.output(), targets)?;
    Ok((loss, backprop(params, &acts, &g)?))
}

/// Per-example weight gradients `[example][layer]` from one batched pass.
pub fn per_example_gradients(
    params: &Mlp,
    input: &Matrix,
    targets: &Targets,
) -> Result<Vec<Vec<Matrix>>> {
    let acts = forward(params, input)?;
    let (_, g) = batch_loss(acts.output(), targets)?;
    // Undo the batch mean so each row is that example's own loss gradient.
    let b = input.rows() as f64;
    let grads = backprop(params, &acts, &g.scaled(b))?;
    Ok((0..input.rows())
        .map(|e| {
            grads
                .deltas
                .iter()
                .zip(&acts.a)
                .map(|(d, a)| Matrix::outer(d.row(e), a.row(e)))
                .collect()
        })
        .collect())
}

/// Singular values of one layer at one step, nonincreasing.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectrumSnapshot {
    pub step: u64,
    pub values: Vec<f64>,
}

/// Full singular values by one-sided Jacobi.
pub fn record_spectrum(w: &Matrix) -> Result<SpectrumSnapshot> {
    Ok(SpectrumSnapshot {
        step: 0,
        values: singular_values(w)?,
    })
}

/// Singular values together with the singular vectors.
pub fn record_spectrum_with_vectors(w: &Matrix) -> Result<Svd> {
    svd(w)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    /// Layer widths, input first.
    pub dims: Vec<usize>,
    pub activation: Activation,
    pub dataset: DatasetKind,
    pub dataset_size: usize,
    pub batch_size: usize,
    pub eta: f64,
    pub steps: u64,
    /// Record spectra every `record_stride` steps.
    pub record_stride: u64,
    /// Record the minibatch gradient applied at every multiple of this stride.
    pub grad_sample_stride: Option<u64>,
    /// Record per-example gradients at every multiple of this stride.
    pub per_example_stride: Option<u64>,
    /// Examples per per-example record (0 for the whole dataset).
    pub per_example_count: usize,
    pub seed: u64,
}

impl TrainConfig {
    pub fn new(dims: Vec<usize>, dataset: DatasetKind, eta: f64, steps: u64, seed: u64) -> Self {
        Self {
            dims,
            activation: Activation::Tanh,
            dataset,
            dataset_size: 1024,
            batch_size: 32,
            eta,
            steps,
            record_stride: 10,
            grad_sample_stride: None,
            per_example_stride: None,
            per_example_count: 0,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.dims.len() < 2 || self.dims.contains(&0) {
            return Err(domain("architecture needs at least two positive widths"));
        }
        if self.dataset == DatasetKind::Blobs && self.dims[self.dims.len() - 1] < 2 {
            return Err(domain("classification needs at least two outputs"));
        }
        if self.dataset_size == 0 {
            return Err(domain("dataset must be nonempty"));
        }
        if self.batch_size == 0 || self.batch_size > self.dataset_size {
            return Err(domain("batch size must lie in 1..=dataset size"));
        }
        if !(self.eta >= 0.0 && self.eta.is_finite()) {
            return Err(domain("eta must be finite and nonnegative"));
        }
        if self.record_stride == 0
            || self.grad_sample_stride == Some(0)
            || self.per_example_stride == Some(0)
        {
            return Err(domain("strides must be positive"));
        }
        Ok(())
    }

    pub fn make_dataset(&self) -> Result<Dataset> {
        Dataset::generate(
            self.dataset,
            self.dataset_size,
            self.dims[0],
            self.dims[self.dims.len() - 1],
            rng::derive_seed(self.seed, "nn/dataset", 0),
        )
    }
}

/// Parses `"784x64x64x10"` into layer widths.
pub fn parse_arch(s: &str) -> Result<Vec<usize>> {
    let dims: Vec<usize> = s
        .split('x')
        .map(|p| {
            p.trim()
                .parse::<usize>()
                .map_err(|_| domain(alloc::format!("bad layer width {p:?}")))
        })
        .collect::<Result<_>>()?;
    if dims.len() < 2 || dims.contains(&0) {
        return Err(domain("architecture needs at least two positive widths"));
    }
    Ok(dims)
}

pub fn format_arch(dims: &[usize]) -> String {
    let parts: Vec<String> = dims.iter().map(|d| alloc::format!("{d}")).collect();
    parts.join("x")
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GradSample {
    pub step: u64,
    /// One gradient per layer.
    pub layers: Vec<Matrix>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PerExampleSample {
    pub step: u64,
    /// `[layer][example]`.
    pub layers: Vec<Vec<Matrix>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrainRecord {
    pub config: TrainConfig,
    /// Minibatch loss at each completed step.
    pub losses: Vec<(u64, f64)>,
    /// `[layer][snapshot]`, sorted by step.
    pub spectra: Vec<Vec<SpectrumSnapshot>>,
    pub grads: Vec<GradSample>,
    pub per_example: Vec<PerExampleSample>,
    pub initial_weights: Vec<Matrix>,
    pub final_weights: Vec<Matrix>,
    /// Training stopped early because the loss or weights became non-finite.
    pub diverged: bool,
}

impl TrainRecord {
    pub fn final_spectra(&self) -> Vec<&SpectrumSnapshot> {
        self.spectra.iter().filter_map(|s| s.last()).collect()
    }
}

/// Minibatch SGD with reshuffled without-replacement epochs.
///
/// Epoch `e` is shuffled by the stream `(seed, "nn/epoch", e)`; an
/// incomplete final batch is dropped. Spectra are recorded at step 0 and at
/// every multiple of `record_stride`; gradient samples hold the gradient
/// applied at that step.
pub fn sgd_train(config: &TrainConfig) -> Result<TrainRecord> {
    config.validate()?;
    let data = config.make_dataset()?;
    let mut net = Mlp::new(&config.dims, config.activation, config.seed)?;
    let depth = net.layers.len();
    let mut rec = TrainRecord {
        config: config.clone(),
        losses: Vec::new(),
        spectra: vec![Vec::new(); depth],
        grads: Vec::new(),
        per_example: Vec::new(),
        initial_weights: net.layers.iter().map(|l| l.w.clone()).collect(),
        final_weights: Vec::new(),
        diverged: false,
    };
    let snapshot = |net: &Mlp, step: u64, rec: &mut TrainRecord| -> Result<()> {
        for (x, l) in net.layers.iter().enumerate() {
            let mut s = record_spectrum(&l.w)?;
            s.step = step;
            rec.spectra[x].push(s);
        }
        Ok(())
    };
    snapshot(&net, 0, &mut rec)?;
    let n = data.len();
    let per_epoch = n / config.batch_size;
    let mut order: Vec<usize> = Vec::new();
    for step in 0..config.steps {
        let slot = (step as usize) % per_epoch;
        if slot == 0 {
            let epoch = step / per_epoch as u64;
            order = (0..n).collect();
            order.shuffle(&mut rng::stream(config.seed, "nn/epoch", epoch));
        }
        let idx = &order[slot * config.batch_size..(slot + 1) * config.batch_size];
        let (x, t) = data.batch(idx);
        if config.per_example_stride.is_some_and(|s| step % s == 0) {
            let count = if config.per_example_count == 0 {
                n
            } else {
                config.per_example_count.min(n)
            };
            let sel: Vec<usize> = (0..count).collect();
            let (px, pt) = data.batch(&sel);
            let per = per_example_gradients(&net, &px, &pt)?;
            let layers = (0..depth)
                .map(|x| per.iter().map(|e| e[x].clone()).collect())
                .collect();
            rec.per_example.push(PerExampleSample { step, layers });
        }
        let (loss, grads) = loss_and_gradients(&net, &x, &t)?;
        if !loss.is_finite() || grads.dw.iter().any(|g| !g.is_finite()) {
            rec.diverged = true;
            break;
        }
        if config.grad_sample_stride.is_some_and(|s| step % s == 0) {
            rec.grads.push(GradSample {
                step,
                layers: grads.dw.clone(),
            });
        }
        net.apply_update(&grads, config.eta);
        rec.losses.push((step + 1, loss));
        if net.layers.iter().any(|l| !l.w.is_finite()) {
            rec.diverged = true;
            break;
        }
        if (step + 1) % config.record_stride == 0 {
            snapshot(&net, step + 1, &mut rec)?;
        }
    }
    rec.final_weights = net.layers.iter().map(|l| l.w.clone()).collect();
    Ok(rec)
}

/// `σ_max - σ_med` of a nonincreasing spectrum.
pub fn spread(values: &[f64]) -> f64 {
    let k = values.len();
    if k == 0 {
        return 0.0;
    }
    let med = if k % 2 == 1 {
        values[k / 2]
    } else {
        0.5 * (values[k / 2 - 1] + values[k / 2])
    };
    values[0] - med
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub eta: f64,
    /// Final spread per layer.
    pub spreads: Vec<f64>,
    pub diverged: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepTable {
    pub rows: Vec<SweepRow>,
    /// Least-squares slope of `ln spread` against `ln η` per layer over the
    /// non-divergent rows; absent with fewer than two distinct rates.
    pub slopes: Option<Vec<f64>>,
}

pub fn sweep_row(record: &TrainRecord) -> SweepRow {
    SweepRow {
        eta: record.config.eta,
        spreads: record
            .final_spectra()
            .iter()
            .map(|s| spread(&s.values))
            .collect(),
        diverged: record.diverged,
    }
}

/// Assembles a sweep table and its per-layer slopes.
pub fn sweep_table(rows: Vec<SweepRow>) -> SweepTable {
    let ok: Vec<&SweepRow> = rows.iter().filter(|r| !r.diverged && r.eta > 0.0).collect();
    let distinct = ok.iter().any(|r| r.eta != ok[0].eta);
    let slopes = if ok.len() >= 2 && distinct {
        let layers = ok[0].spreads.len();
        Some(
            (0..layers)
                .map(|x| {
                    let pts: Vec<(f64, f64)> = ok
                        .iter()
                        .filter(|r| r.spreads[x] > 0.0)
                        .map(|r| (libm::log(r.eta), libm::log(r.spreads[x])))
                        .collect();
                    least_squares_slope(&pts)
                })
                .collect(),
        )
    } else {
        None
    };
    SweepTable { rows, slopes }
}

/// Slope of the least-squares line through `points` (NaN with fewer than two distinct abscissae).
pub fn least_squares_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    if points.len() < 2 {
        return f64::NAN;
    }
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = points.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    if sxx == 0.0 {
        f64::NAN
    } else {
        sxy / sxx
    }
}

/// Trains one model per learning rate with otherwise identical configuration.
pub fn lr_sweep(config: &TrainConfig, etas: &[f64]) -> Result<SweepTable> {
    if etas.is_empty() {
        return Err(domain("need at least one learning rate"));
    }
    let rows = etas
        .iter()
        .map(|&eta| {
            let mut c = config.clone();
            c.eta = eta;
            sgd_train(&c).map(|r| sweep_row(&r))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(sweep_table(rows))
}
