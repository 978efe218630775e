//! End-to-end acceptance run. Prints one verdict line per criterion.
//!
//! `cargo test -p spectra --test acceptance`

use std::time::{Duration, Instant};

use rand::Rng;
use rand_distr::StandardNormal;
use spectra::ensemble::{
    dyson_ensemble, lr_sweep_parallel, mp_ks_over_seeds, stationary_ensemble,
    wishart_top_eigenvalues,
};
use spectra_core::estimators::{
    beta1_exact, estimate_beta1, extract_beta, BetaConvention, ExtractParams,
};
use spectra_core::forecast::{forecast_step, forecast_trajectory, init_forecast, ForecastConfig};
use spectra_core::linalg::singular_values;
use spectra_core::nn::{
    batch_loss, forward, loss_and_gradients, sgd_train, Activation, DatasetKind, Mlp, Targets,
    TrainConfig,
};
use spectra_core::rmt::{edge_scaling, tw1_cdf};
use spectra_core::rng::stream;
use spectra_core::spectral::{
    fit_stationary, lambda_repulsion, DysonConfig, DysonState, StationaryParams,
};
use spectra_core::Matrix;

struct Verdict {
    pass: bool,
    detail: String,
}

fn gaussian(m: usize, n: usize, seed: u64, tag: &str) -> Matrix {
    let mut rng = stream(seed, tag, 0);
    Matrix::from_fn(m, n, |_, _| rng.sample::<f64, _>(StandardNormal))
}

fn slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

/// One-sample KS distance against a continuous CDF, computed directly.
fn ks(samples: &mut [f64], cdf: impl Fn(f64) -> f64) -> f64 {
    samples.sort_by(f64::total_cmp);
    let n = samples.len() as f64;
    samples.iter().enumerate().fold(0.0f64, |d, (i, &x)| {
        let f = cdf(x);
        d.max((f - i as f64 / n).abs())
            .max(((i + 1) as f64 / n - f).abs())
    })
}

fn mp_law() -> Verdict {
    let small = mp_ks_over_seeds(64, 64, 100, 1).unwrap();
    let large = mp_ks_over_seeds(256, 256, 100, 2).unwrap();
    let a = small.iter().filter(|d| **d < 0.08).count();
    let b = large.iter().filter(|d| **d < 0.05).count();
    Verdict {
        pass: a >= 95 && b >= 95,
        detail: format!("64x64 {a}/100 below 0.08, 256x256 {b}/100 below 0.05"),
    }
}

fn tracy_widom() -> Verdict {
    let (m, n, draws) = (200, 200, 2000);
    let top = wishart_top_eigenvalues(m, n, 1.0, draws, 3).unwrap();
    let edge = edge_scaling(m, n, m as f64).unwrap();
    let mut chi: Vec<f64> = top.iter().map(|l| edge.scaled(*l)).collect();
    let d = ks(&mut chi, tw1_cdf);
    Verdict {
        pass: d < 0.08,
        detail: format!("KS {d:.4} over {draws} draws"),
    }
}

fn dyson_trace() -> Verdict {
    let (r, m, n) = (16usize, 20usize, 16usize);
    let (eta, d) = (1.0, 1e-3);
    let lambdas: Vec<f64> = (0..r).map(|i| 1.0 + 0.1 * (r - i) as f64).collect();
    let pairs = (r * (r - 1)) as f64 / 2.0;
    let total: f64 = (0..r).map(|k| lambda_repulsion(&lambdas, k).unwrap()).sum();
    let identity_ok = (total - pairs).abs() <= 1e-12 * pairs;
    let state = DysonState::new(lambdas, m, n).unwrap();
    let mut cfg = DysonConfig::new(eta, d, 0.05, 2000);
    cfg.record_stride = 100;
    let replicas = 200;
    let runs = dyson_ensemble(&state, &cfg, 4, replicas).unwrap();
    let times = runs[0].times.clone();
    let points: Vec<(f64, f64)> = times
        .iter()
        .enumerate()
        .map(|(j, t)| {
            (
                *t,
                runs.iter()
                    .map(|tr| tr.lambdas[j].iter().sum::<f64>())
                    .sum::<f64>()
                    / replicas as f64,
            )
        })
        .collect();
    let got = slope(&points);
    let want = eta * d * (r * (m - n + 2 + r)) as f64;
    let rel = got / want - 1.0;
    let bisect = runs.iter().map(|t| t.bisection_fraction()).sum::<f64>() / replicas as f64;
    Verdict {
        pass: rel.abs() < 0.05 && identity_ok,
        detail: format!(
            "slope {got:.4} vs {want:.4} ({:+.2}%), pairwise sum {total} vs {pairs}, bisected steps {:.1}%",
            100.0 * rel,
            100.0 * bisect
        ),
    }
}

fn stationary_gamma() -> Verdict {
    let (eta, d, beta1) = (0.1, 0.01, 0.5);
    let mut pass = true;
    let mut parts = Vec::new();
    for gap in [0usize, 1, 2, 4, 8] {
        let (m, n) = (8 + gap, 8);
        let p = StationaryParams::new(eta, d, beta1, m, n).unwrap();
        let samples =
            stationary_ensemble(&p, p.mean(), 0.01, 2_000_000, 5_000, 50, 5 + gap as u64, 4)
                .unwrap();
        let fit = fit_stationary(&samples, m, n, eta, Some(d)).unwrap();
        let es = fit.shape / p.shape() - 1.0;
        let er = fit.rate / p.rate() - 1.0;
        pass &= es.abs() < 0.1 && er.abs() < 0.1;
        parts.push(format!(
            "m-n={gap}: shape {:+.1}% rate {:+.1}%",
            100.0 * es,
            100.0 * er
        ));
    }
    Verdict {
        pass,
        detail: parts.join(", "),
    }
}

fn one_step_error(w: &Matrix, grad: &Matrix, eta: f64) -> f64 {
    let cfg = ForecastConfig::new(8, eta);
    let pred = forecast_step(&init_forecast(w, &cfg).unwrap(), grad, &cfg).unwrap();
    let mut moved = w.clone();
    moved.axpy(-eta, grad);
    let exact = singular_values(&moved).unwrap();
    pred.sigmas
        .iter()
        .zip(&exact)
        .fold(0.0f64, |a, (p, t)| a.max((p - t).abs()))
}

fn first_order_exactness() -> Verdict {
    let etas: [f64; 4] = [2e-3, 1e-3, 5e-4, 2.5e-4];
    let mut slopes = Vec::new();
    for seed in 0..5 {
        let w = gaussian(64, 64, 100 + seed, "acceptance/w");
        let g = gaussian(64, 64, 200 + seed, "acceptance/g");
        let pts: Vec<(f64, f64)> = etas
            .iter()
            .map(|&e| (e.ln(), one_step_error(&w, &g, e).ln()))
            .collect();
        slopes.push(slope(&pts));
    }
    let pass = slopes.iter().all(|s| (s - 2.0).abs() <= 0.2);
    Verdict {
        pass,
        detail: format!(
            "log-log slopes {:?}",
            slopes.iter().map(|s| format!("{s:.3}")).collect::<Vec<_>>()
        ),
    }
}

fn desk_config(eta: f64, seed: u64) -> TrainConfig {
    TrainConfig::new(vec![32, 64, 64, 64, 4], DatasetKind::Blobs, eta, 800, seed)
}

fn forecast_tracking() -> Verdict {
    let layer = 1;
    let eta = 0.01;
    let mut cfg = desk_config(eta, 7);
    cfg.grad_sample_stride = Some(1);
    cfg.record_stride = 800;
    let rec = sgd_train(&cfg).unwrap();
    let grads: Vec<&Matrix> = rec.grads.iter().map(|g| &g.layers[layer]).collect();
    let mut weights = vec![rec.initial_weights[layer].clone()];
    for g in &grads {
        let mut w = weights.last().unwrap().clone();
        w.axpy(-eta, g);
        weights.push(w);
    }
    let traj = forecast_trajectory(
        &weights[0],
        grads.iter().copied(),
        &ForecastConfig::new(8, eta),
        Some(&weights),
    )
    .unwrap();
    let errs = traj.relative_errors();
    let head = errs[..=200].iter().fold(0.0f64, |a, e| a.max(*e));
    let tail: Vec<String> = [300, 400, 600, 800]
        .iter()
        .map(|&t| {
            format!(
                "t={t} {:.3}",
                errs[..=t].iter().fold(0.0f64, |a, e| a.max(*e))
            )
        })
        .collect();
    Verdict {
        pass: head < 0.05,
        detail: format!(
            "max relative error {head:.4} over steps 0..200; running max {}",
            tail.join(", ")
        ),
    }
}

fn loss_of(net: &Mlp, x: &Matrix, t: &Targets) -> f64 {
    batch_loss(forward(net, x).unwrap().output(), t).unwrap().0
}

fn backprop_check() -> Verdict {
    let archs: [&[usize]; 10] = [
        &[3, 2],
        &[4, 5, 3],
        &[5, 4, 4, 2],
        &[2, 8, 3],
        &[6, 3, 5, 4],
        &[3, 7, 7, 3],
        &[4, 4, 4, 4, 2],
        &[1, 6, 2],
        &[8, 6, 4, 2],
        &[7, 5, 3, 5, 2],
    ];
    let mut worst = 0.0f64;
    for (i, dims) in archs.iter().enumerate() {
        let act = if i % 3 == 2 {
            Activation::Identity
        } else {
            Activation::Tanh
        };
        let mut net = Mlp::new(dims, act, 300 + i as u64).unwrap();
        let mut rng = stream(i as u64, "acceptance/bias", 0);
        for l in &mut net.layers {
            l.b.iter_mut()
                .for_each(|b| *b = 0.3 * rng.sample::<f64, _>(StandardNormal));
        }
        let x = gaussian(5, dims[0], i as u64, "acceptance/x");
        let out = *dims.last().unwrap();
        let t = if i % 2 == 0 {
            Targets::Classes {
                labels: (0..5).map(|e| (e + i) % out).collect(),
                count: out,
            }
        } else {
            Targets::Values(gaussian(5, out, i as u64, "acceptance/y"))
        };
        let (_, g) = loss_and_gradients(&net, &x, &t).unwrap();
        for li in 0..net.layers.len() {
            let scale = g.dw[li]
                .max_abs()
                .max(g.db[li].iter().fold(0.0f64, |a, v| a.max(v.abs())));
            let nw = net.layers[li].w.rows() * net.layers[li].w.cols();
            for p in 0..nw + net.layers[li].b.len() {
                let eval = |delta: f64| {
                    let mut n2 = net.clone();
                    let layer = &mut n2.layers[li];
                    let v = if p < nw {
                        &mut layer.w.as_mut_slice()[p]
                    } else {
                        &mut layer.b[p - nw]
                    };
                    let h = 1e-5 * v.abs().max(1.0);
                    *v += delta * h;
                    (loss_of(&n2, &x, &t), h)
                };
                let ((lp, h), (lm, _)) = (eval(1.0), eval(-1.0));
                let fd = (lp - lm) / (2.0 * h);
                let an = if p < nw {
                    g.dw[li].as_slice()[p]
                } else {
                    g.db[li][p - nw]
                };
                let denom = an.abs().max(fd.abs()).max(1e-4 * scale).max(1e-300);
                worst = worst.max((an - fd).abs() / denom);
            }
        }
    }
    Verdict {
        pass: worst < 1e-6,
        detail: format!("{} networks, worst relative error {worst:.2e}", archs.len()),
    }
}

fn beta_round_trip() -> Verdict {
    let (eta, d, dt, m, n) = (0.05, 0.2, 0.01, 10, 6);
    let steps = 500;
    let mut rng = stream(8, "acceptance/inject", 0);
    let noise: Vec<Vec<f64>> = (0..steps)
        .map(|_| {
            (0..3)
                .map(|_| rng.sample::<f64, _>(StandardNormal))
                .collect()
        })
        .collect();
    let grads: Vec<Vec<f64>> = (0..=steps)
        .map(|t| vec![0.1 * (t as f64 * 0.1).sin(), -0.05, 0.02])
        .collect();
    // Euler steps of dλ = [-2 sqrt(λ) η g + ηD(m-n+3) + 2ηD Σ λ_k/(λ_k-λ_j)] dt + 2 sqrt(2ηDλ dt) β.
    let mut traj = vec![vec![9.0, 4.0, 1.0]];
    for (t, beta) in noise.iter().enumerate() {
        let cur = traj.last().unwrap().clone();
        let next = (0..3)
            .map(|k| {
                let rep: f64 = (0..3)
                    .filter(|&j| j != k)
                    .map(|j| cur[k] / (cur[k] - cur[j]))
                    .sum();
                let drift = -2.0 * cur[k].sqrt() * eta * grads[t][k]
                    + eta * d * (m - n + 3) as f64
                    + 2.0 * eta * d * rep;
                cur[k] + drift * dt + 2.0 * (2.0 * eta * d * cur[k] * dt).sqrt() * beta[k]
            })
            .collect();
        traj.push(next);
    }
    let params = ExtractParams {
        eta,
        diffusion: Some(d),
        dt,
        m,
        n,
    };
    let series = extract_beta(&traj, &grads, &params, BetaConvention::Theorem31Consistent).unwrap();
    let worst = series
        .beta
        .iter()
        .flatten()
        .zip(noise.iter().flatten())
        .fold(0.0f64, |a, (g, w)| a.max((g - w).abs() / w.abs().max(1.0)));
    Verdict {
        pass: worst <= 1e-9,
        detail: format!("{steps} steps x 3 modes, worst relative error {worst:.2e}"),
    }
}

fn beta1_estimator() -> Verdict {
    let g = gaussian(4, 3, 9, "acceptance/g");
    let pair = estimate_beta1(&[g.clone(), g.scaled(-1.0)], 1, 200, 0).unwrap();
    let exact_ok = pair.exhaustive
        && pair.beta1 == g.dot(&g)
        && beta1_exact(&[g.clone(), g.scaled(-1.0)], 1).unwrap() == g.dot(&g);
    let grads: Vec<Matrix> = (0..64)
        .map(|i| gaussian(6, 6, i, "acceptance/nested"))
        .collect();
    let mut nested_ok = true;
    let mut prev: Option<(f64, f64)> = None;
    let mut values = Vec::new();
    for b in [1usize, 2, 4, 8, 16, 32] {
        let st = estimate_beta1(&grads, b, 200, 10).unwrap();
        if let Some((v, se)) = prev {
            nested_ok &= st.beta1 <= v + 2.0 * (se + st.standard_error);
        }
        prev = Some((st.beta1, st.standard_error));
        values.push(format!("B={b} {:.3}", st.beta1));
    }
    Verdict {
        pass: exact_ok && nested_ok,
        detail: format!(
            "{{g,-g}}: {} vs {}; nested {}",
            pair.beta1,
            g.dot(&g),
            values.join(", ")
        ),
    }
}

fn lr_sweep() -> Verdict {
    let etas = [1e-3, 1e-2, 1e-1];
    let layer = 1;
    let mut slopes = Vec::new();
    for seed in 0..5 {
        let mut cfg = desk_config(etas[0], 20 + seed);
        cfg.record_stride = 800;
        let table = lr_sweep_parallel(&cfg, &etas).unwrap();
        slopes.push(table.slopes.map_or(f64::NAN, |s| s[layer]));
    }
    let positive = slopes.iter().filter(|s| **s > 0.0).count();
    Verdict {
        pass: positive == 5,
        detail: format!(
            "{positive}/5 seeds with positive log-spread slope (one-sided sign test p = {}), slopes {:?}",
            0.5f64.powi(positive as i32),
            slopes.iter().map(|s| format!("{s:.3}")).collect::<Vec<_>>()
        ),
    }
}

/// Fastest of `reps` interleaved `forecast_step` calls at each size, so both
/// sizes see the same background load.
fn step_times(sizes: [(usize, usize); 2], k: usize, reps: usize) -> [Duration; 2] {
    let cfg = ForecastConfig::new(k, 1e-3);
    let cases: Vec<_> = sizes
        .iter()
        .map(|&(m, n)| {
            let st = init_forecast(&gaussian(m, n, 1, "acceptance/cost/w"), &cfg).unwrap();
            (st, gaussian(m, n, 2, "acceptance/cost/g"))
        })
        .collect();
    let mut best = [Duration::MAX; 2];
    for _ in 0..reps {
        for (b, (st, grad)) in best.iter_mut().zip(&cases) {
            let t0 = Instant::now();
            std::hint::black_box(forecast_step(st, grad, &cfg).unwrap());
            *b = (*b).min(t0.elapsed());
        }
    }
    best
}

fn complexity() -> Verdict {
    let mut ratios: Vec<f64> = (0..5)
        .map(|_| {
            let [small, large] = step_times([(256, 256), (512, 512)], 8, 101);
            large.as_secs_f64() / small.as_secs_f64()
        })
        .collect();
    ratios.sort_by(f64::total_cmp);
    let ratio = ratios[2];
    Verdict {
        pass: (3.0..=5.0).contains(&ratio),
        detail: format!(
            "k=8, 256x256 -> 512x512, median time ratio {ratio:.2} over rounds {:?}",
            ratios.iter().map(|r| format!("{r:.2}")).collect::<Vec<_>>()
        ),
    }
}

fn main() {
    type Check = (&'static str, fn() -> Verdict, u64);
    let checks: [Check; 11] = [
        ("Marchenko-Pastur initialization", mp_law, 60),
        ("Tracy-Widom edge", tracy_widom, 300),
        ("Dyson trace drift", dyson_trace, 120),
        ("stationary gamma law", stationary_gamma, 180),
        ("first-order exactness", first_order_exactness, 60),
        ("forecast tracking", forecast_tracking, 120),
        ("backprop correctness", backprop_check, 30),
        ("beta round trip", beta_round_trip, 10),
        ("beta1 estimator", beta1_estimator, 10),
        ("learning-rate sweep", lr_sweep, 600),
        ("complexity contract", complexity, 120),
    ];
    let mut failed = Vec::new();
    for (i, (name, run, budget)) in checks.iter().enumerate() {
        let t0 = Instant::now();
        let v = run();
        let secs = t0.elapsed().as_secs_f64();
        let pass = v.pass && secs < *budget as f64;
        println!(
            "criterion {:>2} {}: {name}: {} [{secs:.1}s of {budget}s]",
            i + 1,
            if pass { "PASS" } else { "FAIL" },
            v.detail
        );
        if !pass {
            failed.push(i + 1);
        }
    }
    if !failed.is_empty() {
        eprintln!("failed criteria: {failed:?}");
        std::process::exit(1);
    }
}
