//! The `spectra` command line.
//!
//! Exit status: 0 on success, 1 on a runtime or numerical failure, 2 on a
//! usage error. Every command that writes a file also writes a manifest:
//! `<dir>/manifest.json` for directory outputs, `<file>.manifest.json` for
//! file outputs.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use spectra_core::estimators::{
    estimate_beta1, estimate_diffusion, extract_beta, noise_correlation_report, BetaConvention,
    ExtractParams, DEFAULT_MINIBATCH_DRAWS,
};
use spectra_core::forecast::{forecast_step, init_forecast, ForecastConfig, VectorUpdate};
use spectra_core::linalg::{singular_values, svd};
use spectra_core::nn::{format_arch, parse_arch, sgd_train, Activation, DatasetKind, TrainConfig};
use spectra_core::rmt::{
    ks_distance, mp_density, tail_count_beyond_edge, tw1_cdf, EdgeScaling, EmpiricalSpectrum,
    MpParams,
};
use spectra_core::sde::{simulate_weights, SdeParams};
use spectra_core::spectral::{
    fit_stationary, simulate_dyson, stationary_lambda_pdf, DysonConfig, DysonState,
    StationaryParams, TimeScale,
};
use spectra_core::{Error as CoreError, Matrix};

use crate::csvio::{self, numbered};
use crate::ensemble::gaussian_matrix;
use crate::error::{Error, Result};
use crate::manifest::{manifest_path_for, RunManifest};
use crate::record::{save_record, RecordDir};
use crate::schema::validate_csv;

#[derive(Parser, Debug)]
#[command(
    name = "spectra",
    version,
    about = "Singular-value dynamics of weight matrices under SGD"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Simulate the matrix SDE or the squared-singular-value particle system.
    #[command(subcommand)]
    Simulate(SimulateCmd),
    /// Train the MLP harness and write a training record.
    Train(TrainArgs),
    /// Reports on records and trajectories.
    #[command(subcommand)]
    Analyze(AnalyzeCmd),
    /// Forecast the top-k singular values of one layer from its gradients.
    Forecast(ForecastArgs),
    /// Check CSV schemas and manifest digests.
    Validate(ValidateArgs),
    /// Tabulate a reference density or distribution function.
    #[command(subcommand)]
    Table(TableCmd),
}

#[derive(Subcommand, Debug)]
pub enum TableCmd {
    /// Marchenko–Pastur density, `x,density`.
    Mp {
        /// Aspect ratio n/m in (0, 1].
        #[arg(long)]
        gamma: f64,
        #[arg(long, default_value_t = 1.0)]
        scale: f64,
        #[arg(long, default_value_t = 200)]
        points: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Tracy–Widom F1, `s,cdf`.
    Tw {
        #[arg(long, default_value_t = -10.0)]
        from: f64,
        #[arg(long, default_value_t = 8.0)]
        to: f64,
        #[arg(long, default_value_t = 200)]
        points: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Stationary squared-singular-value density, `x,density`.
    Stationary {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        eta: f64,
        #[arg(long)]
        diffusion: f64,
        #[arg(long)]
        beta1: f64,
        /// Right end of the grid (default: ten means).
        #[arg(long)]
        to: Option<f64>,
        #[arg(long, default_value_t = 200)]
        points: usize,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Args, Debug, Clone)]
pub struct SimCommon {
    #[arg(long)]
    pub m: usize,
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub eta: f64,
    #[arg(long)]
    pub diffusion: f64,
    #[arg(long)]
    pub steps: u64,
    #[arg(long)]
    pub dt: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
    /// Write every `record-stride` steps.
    #[arg(long, default_value_t = 1)]
    pub record_stride: u64,
    /// Quadratic restoring strength (0 for pure noise).
    #[arg(long, default_value_t = 0.0)]
    pub beta1: f64,
}

#[derive(Subcommand, Debug)]
pub enum SimulateCmd {
    /// Isotropic matrix SDE from a Gaussian start; writes singular values.
    Matrix(SimCommon),
    /// Squared singular values as interacting particles.
    Dyson {
        #[command(flatten)]
        common: SimCommon,
        /// Number of particles (top values of the initial matrix).
        #[arg(long)]
        r: usize,
        /// Run on the rescaled clock s = 2ηD t.
        #[arg(long)]
        canonical: bool,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum DataArg {
    Blobs,
    Teacher,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum ActivationArg {
    Tanh,
    Relu,
    Identity,
}

#[derive(Args, Debug)]
pub struct TrainArgs {
    /// Layer widths, e.g. 784x64x64x10.
    #[arg(long)]
    pub arch: String,
    #[arg(long, value_enum, default_value_t = DataArg::Blobs)]
    pub data: DataArg,
    #[arg(long, default_value_t = 32)]
    pub batch: usize,
    #[arg(long)]
    pub eta: f64,
    #[arg(long)]
    pub steps: u64,
    #[arg(long, default_value_t = 10)]
    pub record_stride: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value_t = 1024)]
    pub dataset_size: usize,
    #[arg(long, value_enum, default_value_t = ActivationArg::Tanh)]
    pub activation: ActivationArg,
    /// Dump the applied minibatch gradient every `grad-stride` steps.
    #[arg(long)]
    pub grad_stride: Option<u64>,
    /// Dump per-example gradients every `per-example-stride` steps.
    #[arg(long)]
    pub per_example_stride: Option<u64>,
    /// Examples per per-example dump (0 for all).
    #[arg(long, default_value_t = 0)]
    pub per_example_count: usize,
}

#[derive(Args, Debug, Clone)]
pub struct RecordSel {
    /// Training-record directory.
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long, default_value_t = 1)]
    pub layer: usize,
    /// Snapshot step (default: first).
    #[arg(long)]
    pub step: Option<u64>,
    /// Write the JSON report here (also printed to stdout).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum ConventionArg {
    Literal,
    Sde,
}

#[derive(Args, Debug, Clone)]
pub struct BetaArgs {
    #[command(flatten)]
    pub sel: RecordSel,
    /// Tracked modes.
    #[arg(long, default_value_t = 8)]
    pub k: usize,
    #[arg(long, value_enum, default_value_t = ConventionArg::Literal)]
    pub convention: ConventionArg,
    /// Diffusion constant; estimated from the final spectrum when omitted.
    #[arg(long)]
    pub diffusion: Option<f64>,
    /// Steps to analyze (default: all recorded).
    #[arg(long)]
    pub steps: Option<u64>,
    /// CSV of the extracted series.
    #[arg(long)]
    pub series_out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
pub enum AnalyzeCmd {
    /// KS distance of a layer's squared singular values to Marchenko–Pastur.
    MpCheck {
        #[command(flatten)]
        sel: RecordSel,
        #[arg(long, default_value_t = 0.08)]
        threshold: f64,
        /// Histogram against the MP density as CSV.
        #[arg(long)]
        table: Option<PathBuf>,
    },
    /// Largest squared singular value in Tracy–Widom coordinates.
    TwEdge {
        #[command(flatten)]
        sel: RecordSel,
        /// Use finite-size centering constants.
        #[arg(long)]
        finite_size: bool,
    },
    /// Gamma fit of a stationary trajectory column.
    FitGamma {
        /// Trajectory CSV from `simulate`.
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, default_value = "lambda_1")]
        column: String,
        /// Rows with step below this are discarded.
        #[arg(long, default_value_t = 0)]
        burn_in: u64,
        #[arg(long)]
        m: Option<usize>,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        eta: Option<f64>,
        #[arg(long)]
        diffusion: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Per-mode stochastic term along a recorded trajectory.
    ExtractBeta(BetaArgs),
    /// Diffusion and noise constants plus the force-correlation summary.
    NoiseReport(BetaArgs),
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum VectorUpdateArg {
    AsWritten,
    FirstOrder,
}

#[derive(Args, Debug)]
pub struct ForecastArgs {
    /// Training-record directory.
    #[arg(long, conflicts_with_all = ["weights", "grads"])]
    pub record: Option<PathBuf>,
    #[arg(long, default_value_t = 1)]
    pub layer: usize,
    /// Initial weights dump (instead of a record).
    #[arg(long, requires = "grads")]
    pub weights: Option<PathBuf>,
    /// Directory of `step<t>.bin` gradient dumps (instead of a record).
    #[arg(long, requires = "weights")]
    pub grads: Option<PathBuf>,
    #[arg(long, default_value_t = 8)]
    pub k: usize,
    /// Learning rate (default: the record's).
    #[arg(long)]
    pub eta: Option<f64>,
    /// Steps to forecast (default: the record's).
    #[arg(long)]
    pub steps: Option<u64>,
    /// Add relative-error columns against exact SVDs of the true weights.
    #[arg(long)]
    pub compare: bool,
    /// Use zero gradients instead of dumps.
    #[arg(long)]
    pub zero_grads: bool,
    #[arg(long, value_enum, default_value_t = VectorUpdateArg::AsWritten)]
    pub vector_update: VectorUpdateArg,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args, Debug)]
pub struct ValidateArgs {
    /// CSV files, manifests, or output directories.
    #[arg(required = true)]
    pub paths: Vec<PathBuf>,
}

/// Parses `args` and runs the command, returning the exit status.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match run(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("spectra: {e}");
            e.exit_code()
        }
    }
}

pub fn run(command: Command) -> Result<()> {
    match command {
        Command::Simulate(SimulateCmd::Matrix(c)) => simulate_matrix(&c),
        Command::Simulate(SimulateCmd::Dyson {
            common,
            r,
            canonical,
        }) => simulate_dyson_cmd(&common, r, canonical),
        Command::Train(a) => train(&a),
        Command::Analyze(a) => analyze(a),
        Command::Forecast(a) => forecast(&a),
        Command::Validate(a) => validate(&a),
        Command::Table(t) => table(t),
    }
}

fn usage(msg: impl Into<String>) -> Error {
    Error::Usage(msg.into())
}

/// Numerical-domain failures caused by flag values are usage errors.
fn flag_error(e: CoreError) -> Error {
    match e {
        CoreError::Domain(msg) => Error::Usage(msg),
        other => other.into(),
    }
}

fn ensure_parent(path: &Path) -> Result<()> {
    if let Some(p) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(p).map_err(|e| Error::io(p, e))?;
    }
    Ok(())
}

fn base_dir(path: &Path) -> PathBuf {
    path.parent().map(Path::to_path_buf).unwrap_or_default()
}

fn write_file_manifest(
    out: &Path,
    subcommand: &str,
    config: serde_json::Value,
    seed: Option<u64>,
    inputs: &[&Path],
) -> Result<()> {
    let base = base_dir(out);
    let mut m = RunManifest::new(subcommand, config, seed);
    for i in inputs {
        if i.is_file() {
            m.add_input(&base, i)?;
        }
    }
    m.add_output(&base, out)?;
    m.write(&manifest_path_for(out))
}

fn emit_report(
    report: &serde_json::Value,
    out: Option<&Path>,
    subcommand: &str,
    config: serde_json::Value,
    inputs: &[&Path],
) -> Result<()> {
    let text = serde_json::to_string_pretty(report)?;
    println!("{text}");
    if let Some(out) = out {
        ensure_parent(out)?;
        fs::write(out, text + "\n").map_err(|e| Error::io(out, e))?;
        write_file_manifest(out, subcommand, config, None, inputs)?;
    }
    Ok(())
}

fn check_sim(c: &SimCommon) -> Result<()> {
    if c.m == 0 || c.n == 0 {
        return Err(usage("--m and --n must be positive"));
    }
    if !(c.eta > 0.0 && c.diffusion > 0.0 && c.dt > 0.0) {
        return Err(usage("--eta, --diffusion and --dt must be positive"));
    }
    if c.record_stride == 0 {
        return Err(usage("--record-stride must be positive"));
    }
    if !(c.beta1 >= 0.0) {
        return Err(usage("--beta1 must be nonnegative"));
    }
    Ok(())
}

fn sim_config_json(c: &SimCommon, kind: &str) -> serde_json::Value {
    json!({
        "kind": kind, "m": c.m, "n": c.n, "eta": c.eta, "diffusion": c.diffusion,
        "steps": c.steps, "dt": c.dt, "seed": c.seed, "record_stride": c.record_stride, "beta1": c.beta1,
    })
}

fn simulate_matrix(c: &SimCommon) -> Result<()> {
    check_sim(c)?;
    let w0 = gaussian_matrix(c.m, c.n, 1.0 / c.n as f64, c.seed, "cli/init", 0);
    let params = SdeParams::isotropic(c.eta, c.diffusion, c.dt).map_err(flag_error)?;
    let beta1 = c.beta1;
    let mut grad = |s: &spectra_core::sde::WeightState| s.matrix.scaled(beta1);
    let p = c.m.min(c.n);
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut failure = None;
    let mut record = |s: &spectra_core::sde::WeightState| {
        if failure.is_some() {
            return;
        }
        match singular_values(&s.matrix) {
            Ok(sv) => {
                let mut row = vec![s.step as f64, s.time];
                row.extend(sv);
                rows.push(row);
            }
            Err(e) => failure = Some(e),
        }
    };
    let w0 = spectra_core::sde::WeightState::new(w0).map_err(flag_error)?;
    simulate_weights(
        &w0,
        &mut grad,
        &params,
        c.steps,
        c.seed,
        c.record_stride,
        &mut record,
    )?;
    if let Some(e) = failure {
        return Err(e.into());
    }
    let mut header = vec!["step".to_string(), "time".to_string()];
    header.extend(numbered("sigma", p));
    ensure_parent(&c.out)?;
    csvio::write_numeric(&c.out, &header, rows)?;
    write_file_manifest(
        &c.out,
        "simulate matrix",
        sim_config_json(c, "matrix"),
        Some(c.seed),
        &[],
    )
}

fn simulate_dyson_cmd(c: &SimCommon, r: usize, canonical: bool) -> Result<()> {
    check_sim(c)?;
    if c.m < c.n {
        return Err(usage("dyson needs --m >= --n"));
    }
    if r == 0 || r > c.n {
        return Err(usage("--r must lie in 1..=n"));
    }
    let w0 = gaussian_matrix(c.m, c.n, 1.0 / c.m as f64, c.seed, "cli/init", 0);
    let lambdas: Vec<f64> = singular_values(&w0)?
        .iter()
        .take(r)
        .map(|s| s * s)
        .collect();
    let state = DysonState::new(lambdas, c.m, c.n)?;
    let mut cfg = DysonConfig::new(c.eta, c.diffusion, c.dt, c.steps);
    cfg.record_stride = c.record_stride;
    cfg.beta1 = c.beta1;
    if canonical {
        cfg.time_scale = TimeScale::Canonical;
    }
    let traj = simulate_dyson(&state, &cfg, c.seed)?;
    let mut header = vec!["step".to_string(), "time".to_string()];
    header.extend(numbered("lambda", r));
    let rows = traj
        .steps
        .iter()
        .zip(&traj.times)
        .zip(&traj.lambdas)
        .map(|((s, t), l)| {
            let mut row = vec![*s as f64, *t];
            row.extend(l);
            row
        });
    ensure_parent(&c.out)?;
    csvio::write_numeric(&c.out, &header, rows)?;
    let mut config = sim_config_json(c, "dyson");
    config["r"] = json!(r);
    config["canonical"] = json!(canonical);
    config["bisected_steps"] = json!(traj.bisected_steps);
    config["reflections"] = json!(traj.reflections);
    config["collisions"] = json!(traj.collisions);
    write_file_manifest(&c.out, "simulate dyson", config, Some(c.seed), &[])
}

fn train(a: &TrainArgs) -> Result<()> {
    let dims = parse_arch(&a.arch).map_err(flag_error)?;
    let dataset = match a.data {
        DataArg::Blobs => DatasetKind::Blobs,
        DataArg::Teacher => DatasetKind::Teacher,
    };
    let mut cfg = TrainConfig::new(dims, dataset, a.eta, a.steps, a.seed);
    cfg.batch_size = a.batch;
    cfg.record_stride = a.record_stride;
    cfg.dataset_size = a.dataset_size;
    cfg.activation = match a.activation {
        ActivationArg::Tanh => Activation::Tanh,
        ActivationArg::Relu => Activation::Relu,
        ActivationArg::Identity => Activation::Identity,
    };
    cfg.grad_sample_stride = a.grad_stride;
    cfg.per_example_stride = a.per_example_stride;
    cfg.per_example_count = a.per_example_count;
    cfg.validate().map_err(flag_error)?;
    let record = sgd_train(&cfg)?;
    if a.out.exists() {
        fs::remove_dir_all(&a.out).map_err(|e| Error::io(&a.out, e))?;
    }
    save_record(&record, &a.out)?;
    let mut m = RunManifest::new("train", serde_json::to_value(&cfg)?, Some(a.seed));
    m.add_output_tree(&a.out)?;
    m.write(&manifest_path_for(&a.out))?;
    if record.diverged {
        eprintln!(
            "spectra: training diverged after {} steps",
            record.losses.len()
        );
    }
    Ok(())
}

/// `(m, n, entry variance)` of a layer, oriented `m >= n`.
fn layer_geometry(rec: &RecordDir, layer: usize) -> (usize, usize, f64) {
    let (fan_in, fan_out) = (rec.config.dims[layer - 1], rec.config.dims[layer]);
    (
        fan_in.max(fan_out),
        fan_in.min(fan_out),
        1.0 / fan_in as f64,
    )
}

fn snapshot_at(rec: &RecordDir, sel: &RecordSel) -> Result<(u64, Vec<f64>)> {
    let snaps = rec.spectra(sel.layer)?;
    let snap = match sel.step {
        Some(t) => snaps
            .into_iter()
            .find(|s| s.step == t)
            .ok_or_else(|| usage(format!("no spectrum recorded at step {t}")))?,
        None => snaps
            .into_iter()
            .next()
            .ok_or_else(|| usage("record has no spectra"))?,
    };
    Ok((snap.step, snap.values))
}

fn open_record(path: &Path) -> Result<RecordDir> {
    if !path.join("config.json").is_file() {
        return Err(usage(format!(
            "{} is not a training record",
            path.display()
        )));
    }
    RecordDir::open(path)
}

fn analyze(cmd: AnalyzeCmd) -> Result<()> {
    match cmd {
        AnalyzeCmd::MpCheck {
            sel,
            threshold,
            table,
        } => {
            let rec = open_record(&sel.input)?;
            rec.check_layer(sel.layer)?;
            let (step, sv) = snapshot_at(&rec, &sel)?;
            let (m, n, var) = layer_geometry(&rec, sel.layer);
            let mp = MpParams::for_matrix(m, n, var)?;
            let spec = EmpiricalSpectrum::new(sv.iter().map(|s| s * s).collect())?;
            let ks = ks_distance(&spec, |x| mp.cdf(x))?;
            if let Some(t) = &table {
                write_density_table(t, &spec, &mp)?;
                write_file_manifest(
                    t,
                    "analyze mp-check",
                    json!({"layer": sel.layer, "step": step}),
                    None,
                    &[],
                )?;
            }
            let report = json!({
                "layer": sel.layer, "step": step, "m": m, "n": n, "gamma": mp.gamma, "scale": mp.scale,
                "ks": ks, "threshold": threshold, "pass": ks < threshold,
            });
            emit_report(
                &report,
                sel.out.as_deref(),
                "analyze mp-check",
                json!({"layer": sel.layer, "step": step, "threshold": threshold}),
                &[],
            )
        }
        AnalyzeCmd::TwEdge { sel, finite_size } => {
            let rec = open_record(&sel.input)?;
            rec.check_layer(sel.layer)?;
            let (step, sv) = snapshot_at(&rec, &sel)?;
            let (m, n, var) = layer_geometry(&rec, sel.layer);
            let scale = var * m as f64;
            let edge = if finite_size {
                EdgeScaling::finite_size(m, n, scale)?
            } else {
                EdgeScaling::asymptotic(m, n, scale)?
            };
            let spec = EmpiricalSpectrum::new(sv.iter().map(|s| s * s).collect())?;
            let top = spec.max().unwrap_or(0.0);
            let chi = edge.scaled(top);
            let report = json!({
                "layer": sel.layer, "step": step, "m": m, "n": n, "lambda_max": top,
                "mu": edge.mu, "sigma": edge.sigma, "chi": chi, "tw_cdf": tw1_cdf(chi),
                "beyond_edge": tail_count_beyond_edge(&spec, &edge, 0.0),
                "finite_size": finite_size,
            });
            emit_report(
                &report,
                sel.out.as_deref(),
                "analyze tw-edge",
                json!({"layer": sel.layer, "step": step, "finite_size": finite_size}),
                &[],
            )
        }
        AnalyzeCmd::FitGamma {
            input,
            column,
            burn_in,
            m,
            n,
            eta,
            diffusion,
            out,
        } => fit_gamma(
            &input,
            &column,
            burn_in,
            m,
            n,
            eta,
            diffusion,
            out.as_deref(),
        ),
        AnalyzeCmd::ExtractBeta(a) => {
            let (series, _, _) = beta_series(&a)?;
            let k = series.beta.first().map_or(0, Vec::len);
            let mut header = vec!["step".to_string()];
            header.extend(numbered("beta", k));
            let rows: Vec<Vec<f64>> = series
                .beta
                .iter()
                .enumerate()
                .map(|(t, row)| {
                    std::iter::once(t as f64)
                        .chain(row.iter().copied())
                        .collect()
                })
                .collect();
            let target = a
                .series_out
                .clone()
                .or_else(|| a.sel.out.clone())
                .ok_or_else(|| usage("extract-beta needs --series-out or --out"))?;
            ensure_parent(&target)?;
            csvio::write_numeric(&target, &header, rows)?;
            write_file_manifest(
                &target,
                "analyze extract-beta",
                beta_config_json(&a),
                None,
                &[],
            )
        }
        AnalyzeCmd::NoiseReport(a) => noise_report(&a),
    }
}

fn write_density_table(path: &Path, spec: &EmpiricalSpectrum, mp: &MpParams) -> Result<()> {
    let bins = 40usize;
    let hi = spec.max().unwrap_or(mp.lambda_plus).max(mp.lambda_plus);
    let width = hi / bins as f64;
    let mut counts = vec![0usize; bins];
    for &v in spec.values() {
        counts[((v / width) as usize).min(bins - 1)] += 1;
    }
    let total = spec.count() as f64;
    let rows: Vec<Vec<String>> = (0..bins)
        .map(|b| {
            let x = (b as f64 + 0.5) * width;
            let emp = counts[b] as f64 / (total * width);
            vec![
                csvio::fmt_sig6(x),
                csvio::fmt_sig6(emp),
                csvio::fmt_sig6(mp_density(x, mp)),
            ]
        })
        .collect();
    ensure_parent(path)?;
    csvio::write_table(
        path,
        &["x".into(), "empirical".into(), "model".into()],
        &rows,
    )
}

#[allow(clippy::too_many_arguments)]
fn fit_gamma(
    input: &Path,
    column: &str,
    burn_in: u64,
    m: Option<usize>,
    n: Option<usize>,
    eta: Option<f64>,
    diffusion: Option<f64>,
    out: Option<&Path>,
) -> Result<()> {
    if !input.is_file() {
        return Err(usage(format!("missing input {}", input.display())));
    }
    let table = csvio::read_table(input)?;
    let steps = table
        .column("step")
        .ok_or_else(|| usage("input has no step column"))?;
    let values = table
        .column(column)
        .ok_or_else(|| usage(format!("input has no column {column}")))?;
    let sidecar = manifest_path_for(input);
    let echo = RunManifest::read(&sidecar).ok().map(|m| m.config);
    let from_echo = |key: &str| echo.as_ref().and_then(|c| c.get(key).cloned());
    let m = m.or_else(|| from_echo("m").and_then(|v| v.as_u64()).map(|v| v as usize));
    let n = n.or_else(|| from_echo("n").and_then(|v| v.as_u64()).map(|v| v as usize));
    let eta = eta.or_else(|| from_echo("eta").and_then(|v| v.as_f64()));
    let diffusion = diffusion.or_else(|| from_echo("diffusion").and_then(|v| v.as_f64()));
    let (Some(m), Some(n)) = (m, n) else {
        return Err(usage(
            "--m and --n are required when the input has no manifest",
        ));
    };
    let samples: Vec<f64> = steps
        .iter()
        .zip(&values)
        .filter(|(s, _)| **s >= burn_in as f64)
        .map(|(_, v)| *v)
        .collect();
    let config = json!({"column": column, "burn_in": burn_in, "m": m, "n": n, "eta": eta, "diffusion": diffusion});
    match fit_stationary(
        &samples,
        m,
        n,
        eta.unwrap_or(0.0),
        diffusion.filter(|_| eta.is_some()),
    ) {
        Ok(fit) => emit_report(
            &serde_json::to_value(&fit)?,
            out,
            "analyze fit-gamma",
            config,
            &[input],
        ),
        Err(CoreError::Fit {
            reason,
            moment_shape,
            moment_rate,
        }) => {
            let payload =
                json!({"error": reason, "moment_shape": moment_shape, "moment_rate": moment_rate});
            println!("{}", serde_json::to_string_pretty(&payload)?);
            Err(CoreError::Fit {
                reason,
                moment_shape,
                moment_rate,
            }
            .into())
        }
        Err(CoreError::Domain(msg)) => Err(usage(msg)),
        Err(e) => Err(e.into()),
    }
}

fn beta_config_json(a: &BetaArgs) -> serde_json::Value {
    json!({
        "layer": a.sel.layer, "k": a.k, "steps": a.steps, "diffusion": a.diffusion,
        "convention": format!("{:?}", a.convention),
    })
}

/// Weights after each of the first `steps` updates, rebuilt from the initial
/// weights and the gradient dumps.
fn replay_weights(rec: &RecordDir, layer: usize, steps: u64, eta: f64) -> Result<Vec<Matrix>> {
    let mut w = rec.initial_weights(layer)?;
    let mut out = vec![w.clone()];
    for t in 0..steps {
        let g = rec.gradient(t, layer)?;
        w.axpy(-eta, &g);
        out.push(w.clone());
    }
    Ok(out)
}

/// Extracted series, the diffusion constant used, and the final spectrum.
fn beta_series(a: &BetaArgs) -> Result<(spectra_core::estimators::BetaSeries, f64, Vec<f64>)> {
    let rec = open_record(&a.sel.input)?;
    rec.check_layer(a.sel.layer)?;
    let (m, n, _) = layer_geometry(&rec, a.sel.layer);
    if a.k == 0 || a.k > n {
        return Err(usage(format!("--k must lie in 1..={n}")));
    }
    let steps = a.steps.unwrap_or(rec.config.steps);
    let eta = rec.config.eta;
    let weights = replay_weights(&rec, a.sel.layer, steps, eta)?;
    let mut lambdas = Vec::with_capacity(weights.len());
    let mut proj = Vec::with_capacity(weights.len());
    for (t, w) in weights.iter().enumerate() {
        let d = svd(w)?;
        lambdas.push(d.s[..a.k].iter().map(|s| s * s).collect::<Vec<f64>>());
        let g = if (t as u64) < steps {
            rec.gradient(t as u64, a.sel.layer)?
        } else {
            Matrix::zeros(w.rows(), w.cols())
        };
        proj.push(
            (0..a.k)
                .map(|i| {
                    let u = d.u.column(i);
                    let gv = g.matvec(&d.v.column(i));
                    u.iter().zip(&gv).map(|(x, y)| x * y).sum()
                })
                .collect::<Vec<f64>>(),
        );
    }
    let final_sv = d_final(&weights)?;
    let diffusion = match a.diffusion {
        Some(d) => d,
        None => estimate_diffusion(
            &[spectra_core::nn::SpectrumSnapshot {
                step: steps,
                values: final_sv.clone(),
            }],
            steps.max(1) as f64,
        )?,
    };
    let convention = match a.convention {
        ConventionArg::Literal => BetaConvention::PaperLiteral,
        ConventionArg::Sde => BetaConvention::Theorem31Consistent,
    };
    let params = ExtractParams {
        eta,
        diffusion: Some(diffusion),
        dt: 1.0,
        m,
        n,
    };
    let series = extract_beta(&lambdas, &proj, &params, convention)?;
    Ok((series, diffusion, final_sv))
}

fn d_final(weights: &[Matrix]) -> Result<Vec<f64>> {
    Ok(singular_values(
        weights.last().expect("at least the initial weights"),
    )?)
}

fn noise_report(a: &BetaArgs) -> Result<()> {
    let (series, d_hat, _) = beta_series(a)?;
    let corr = noise_correlation_report(&series).map_err(flag_error)?;
    let rec = open_record(&a.sel.input)?;
    let (beta1_hat, beta1_se) = match rec.per_example_steps(a.sel.layer).first() {
        Some(&t) => {
            let grads = rec.per_example(t, a.sel.layer)?;
            let b = rec.config.batch_size.min(grads.len());
            let st = estimate_beta1(&grads, b, DEFAULT_MINIBATCH_DRAWS, rec.config.seed)?;
            (Some(st.beta1), Some(st.standard_error))
        }
        None => (None, None),
    };
    let report = json!({
        "D_hat": d_hat,
        "beta1_hat": beta1_hat,
        "beta1_se": beta1_se,
        "correlations": {
            "repulsion_vs_dlambda": corr.repulsion_vs_dlambda,
            "repulsion_vs_gradforce": corr.repulsion_vs_gradforce,
        },
        "magnitude_shares": corr.magnitude_shares,
        "undefined_correlation": corr.undefined,
        "steps": corr.steps,
    });
    if let Some(p) = &a.series_out {
        let k = series.beta.first().map_or(0, Vec::len);
        let mut header = vec!["step".to_string()];
        header.extend(numbered("beta", k));
        let rows = series.beta.iter().enumerate().map(|(t, row)| {
            std::iter::once(t as f64)
                .chain(row.iter().copied())
                .collect()
        });
        ensure_parent(p)?;
        csvio::write_numeric(p, &header, rows)?;
        write_file_manifest(p, "analyze noise-report", beta_config_json(a), None, &[])?;
    }
    emit_report(
        &report,
        a.sel.out.as_deref(),
        "analyze noise-report",
        beta_config_json(a),
        &[],
    )
}

fn forecast(a: &ForecastArgs) -> Result<()> {
    let (w0, eta, steps, source): (Matrix, f64, u64, Box<dyn Fn(u64) -> Result<Matrix>>) =
        match (&a.record, &a.weights, &a.grads) {
            (Some(dir), None, None) => {
                let rec = open_record(dir)?;
                rec.check_layer(a.layer)?;
                let w0 = rec.initial_weights(a.layer)?;
                let eta = a.eta.unwrap_or(rec.config.eta);
                let steps = a.steps.unwrap_or(rec.config.steps);
                let layer = a.layer;
                (w0, eta, steps, Box::new(move |t| rec.gradient(t, layer)))
            }
            (None, Some(wp), Some(gd)) => {
                if !wp.is_file() {
                    return Err(usage(format!("missing weights {}", wp.display())));
                }
                let w0 = crate::dump::load(wp)?.1;
                let eta = a
                    .eta
                    .ok_or_else(|| usage("--eta is required with --weights"))?;
                let gd = gd.clone();
                let steps = match a.steps {
                    Some(s) => s,
                    None => (0u64..)
                        .take_while(|t| gd.join(format!("step{t}.bin")).is_file())
                        .count() as u64,
                };
                (
                    w0,
                    eta,
                    steps,
                    Box::new(move |t| {
                        let p = gd.join(format!("step{t}.bin"));
                        if !p.is_file() {
                            return Err(Error::MissingGradient { step: t, path: p });
                        }
                        Ok(crate::dump::load(&p)?.1)
                    }),
                )
            }
            _ => return Err(usage("give either --record or both --weights and --grads")),
        };
    let (m, n) = w0.shape();
    if a.k == 0 || a.k > m.min(n) {
        return Err(usage(format!("--k must lie in 1..={}", m.min(n))));
    }
    let mut cfg = ForecastConfig::new(a.k, eta);
    cfg.vector_update = match a.vector_update {
        VectorUpdateArg::AsWritten => VectorUpdate::AsWritten,
        VectorUpdateArg::FirstOrder => VectorUpdate::FirstOrder,
    };
    let mut state = init_forecast(&w0, &cfg).map_err(flag_error)?;
    let mut truth = w0.clone();
    let mut rows = Vec::with_capacity(steps as usize + 1);
    let row = |t: u64, pred: &[f64], truth: Option<&Matrix>| -> Result<Vec<f64>> {
        let mut r = vec![t as f64];
        r.extend(pred);
        if let Some(w) = truth {
            let sv = singular_values(w)?;
            r.extend(pred.iter().zip(&sv).map(|(p, s)| (p - s).abs() / s));
        }
        Ok(r)
    };
    rows.push(row(0, &state.sigmas, a.compare.then_some(&truth))?);
    for t in 0..steps {
        let g = if a.zero_grads {
            Matrix::zeros(m, n)
        } else {
            source(t)?
        };
        state = forecast_step(&state, &g, &cfg)?;
        if a.compare {
            truth.axpy(-eta, &g);
        }
        rows.push(row(t + 1, &state.sigmas, a.compare.then_some(&truth))?);
    }
    let mut header = vec!["step".to_string()];
    header.extend(numbered("sigma", a.k));
    if a.compare {
        header.extend(numbered("err", a.k));
    }
    ensure_parent(&a.out)?;
    csvio::write_numeric(&a.out, &header, rows)?;
    let config = json!({
        "record": a.record, "layer": a.layer, "weights": a.weights, "grads": a.grads, "k": a.k, "eta": eta,
        "steps": steps, "compare": a.compare, "zero_grads": a.zero_grads,
        "vector_update": format!("{:?}", cfg.vector_update), "epsilon": state.epsilon, "delta": cfg.delta,
    });
    let inputs: Vec<&Path> = a.weights.iter().map(PathBuf::as_path).collect();
    write_file_manifest(&a.out, "forecast", config, None, &inputs)
}

fn validate(a: &ValidateArgs) -> Result<()> {
    let mut failures = 0usize;
    for p in &a.paths {
        let outcome = if p.is_dir() {
            let mp = manifest_path_for(p);
            RunManifest::read(&mp)
                .map(|m| m.verify_outputs(p))
                .map(|bad| {
                    if bad.is_empty() {
                        "manifest ok".to_string()
                    } else {
                        format!("digest mismatch: {}", bad.join(", "))
                    }
                })
        } else if p.to_string_lossy().ends_with(".manifest.json") {
            RunManifest::read(p)
                .map(|m| m.verify_outputs(&base_dir(p)))
                .map(|bad| {
                    if bad.is_empty() {
                        "manifest ok".to_string()
                    } else {
                        format!("digest mismatch: {}", bad.join(", "))
                    }
                })
        } else {
            validate_csv(p).map(|s| format!("{s:?}"))
        };
        match outcome {
            Ok(msg) if !msg.starts_with("digest mismatch") => println!("{}: {msg}", p.display()),
            Ok(msg) => {
                failures += 1;
                println!("{}: {msg}", p.display());
            }
            Err(e) => {
                failures += 1;
                println!("{}: {e}", p.display());
            }
        }
    }
    if failures > 0 {
        return Err(Error::format(
            PathBuf::new(),
            format!("{failures} file(s) failed validation"),
        ));
    }
    Ok(())
}

fn grid(from: f64, to: f64, points: usize) -> Result<Vec<f64>> {
    if points < 2 || !(to > from) || !from.is_finite() || !to.is_finite() {
        return Err(usage(
            "need at least 2 points on a finite, nonempty interval",
        ));
    }
    Ok((0..points)
        .map(|i| from + (to - from) * i as f64 / (points - 1) as f64)
        .collect())
}

fn write_pairs(out: &Path, cols: [&str; 2], xs: &[f64], f: impl Fn(f64) -> f64) -> Result<()> {
    let rows: Vec<Vec<String>> = xs
        .iter()
        .map(|&x| vec![csvio::fmt_sig6(x), csvio::fmt_sig6(f(x))])
        .collect();
    ensure_parent(out)?;
    csvio::write_table(out, &[cols[0].to_string(), cols[1].to_string()], &rows)
}

fn table(cmd: TableCmd) -> Result<()> {
    match cmd {
        TableCmd::Mp {
            gamma,
            scale,
            points,
            out,
        } => {
            let mp = MpParams::new(gamma, scale).map_err(flag_error)?;
            let xs = grid(mp.lambda_minus, mp.lambda_plus, points)?;
            write_pairs(&out, ["x", "density"], &xs, |x| mp_density(x, &mp))?;
            let config = json!({"kind": "mp", "gamma": gamma, "scale": scale, "points": points});
            write_file_manifest(&out, "table mp", config, None, &[])
        }
        TableCmd::Tw {
            from,
            to,
            points,
            out,
        } => {
            let xs = grid(from, to, points)?;
            write_pairs(&out, ["s", "cdf"], &xs, tw1_cdf)?;
            let config = json!({"kind": "tw", "from": from, "to": to, "points": points});
            write_file_manifest(&out, "table tw", config, None, &[])
        }
        TableCmd::Stationary {
            m,
            n,
            eta,
            diffusion,
            beta1,
            to,
            points,
            out,
        } => {
            let p = StationaryParams::new(eta, diffusion, beta1, m, n).map_err(flag_error)?;
            let hi = to.unwrap_or(10.0 * p.mean());
            let xs = grid(0.0, hi, points)?;
            write_pairs(&out, ["x", "density"], &xs[1..], |x| {
                stationary_lambda_pdf(x, &p)
            })?;
            let config = json!({
                "kind": "stationary", "m": m, "n": n, "eta": eta, "diffusion": diffusion, "beta1": beta1,
                "to": hi, "points": points,
            });
            write_file_manifest(&out, "table stationary", config, None, &[])
        }
    }
}

/// Arch string of a training configuration.
pub fn arch_of(cfg: &TrainConfig) -> String {
    format_arch(&cfg.dims)
}
