//! Training records on disk.
//!
//! ```text
//! <dir>/config.json                  training configuration
//! <dir>/loss.csv                     step,loss
//! <dir>/spectra/layer<i>.csv         step,sv_1..sv_p
//! <dir>/grads/step<t>_layer<i>.bin   minibatch gradient applied at step t
//! <dir>/per_example/step<t>_layer<i>.bin  per-example gradients, concatenated
//! <dir>/weights/step<t>_layer<i>.bin initial and final weights
//! <dir>/manifest.json
//! ```
//!
//! Layers are numbered from 1, input side first.

use std::fs;
use std::path::{Path, PathBuf};

use spectra_core::nn::{SpectrumSnapshot, TrainConfig, TrainRecord};
use spectra_core::Matrix;

use crate::csvio::{self, numbered};
use crate::dump;
use crate::error::{Error, Result};

pub fn grad_path(dir: &Path, step: u64, layer: usize) -> PathBuf {
    dir.join("grads")
        .join(format!("step{step}_layer{layer}.bin"))
}

pub fn per_example_path(dir: &Path, step: u64, layer: usize) -> PathBuf {
    dir.join("per_example")
        .join(format!("step{step}_layer{layer}.bin"))
}

pub fn weights_path(dir: &Path, step: u64, layer: usize) -> PathBuf {
    dir.join("weights")
        .join(format!("step{step}_layer{layer}.bin"))
}

pub fn spectra_path(dir: &Path, layer: usize) -> PathBuf {
    dir.join("spectra").join(format!("layer{layer}.csv"))
}

fn mkdir(p: &Path) -> Result<()> {
    fs::create_dir_all(p).map_err(|e| Error::io(p, e))
}

fn step32(path: &Path, step: u64) -> Result<u32> {
    u32::try_from(step).map_err(|_| Error::format(path, "step does not fit the dump header"))
}

/// Writes `record` under `dir` (created if needed). The manifest is left to the caller.
pub fn save_record(record: &TrainRecord, dir: &Path) -> Result<()> {
    mkdir(dir)?;
    let cfg = dir.join("config.json");
    fs::write(&cfg, serde_json::to_string_pretty(&record.config)? + "\n")
        .map_err(|e| Error::io(&cfg, e))?;

    let header = vec!["step".to_string(), "loss".to_string()];
    csvio::write_numeric(
        &dir.join("loss.csv"),
        &header,
        record.losses.iter().map(|(s, l)| vec![*s as f64, *l]),
    )?;

    mkdir(&dir.join("spectra"))?;
    for (x, snaps) in record.spectra.iter().enumerate() {
        let width = snaps.first().map_or(0, |s| s.values.len());
        let mut header = vec!["step".to_string()];
        header.extend(numbered("sv", width));
        csvio::write_numeric(
            &spectra_path(dir, x + 1),
            &header,
            snaps.iter().map(|s| {
                std::iter::once(s.step as f64)
                    .chain(s.values.iter().copied())
                    .collect()
            }),
        )?;
    }

    if !record.grads.is_empty() {
        mkdir(&dir.join("grads"))?;
    }
    for g in &record.grads {
        for (x, m) in g.layers.iter().enumerate() {
            let p = grad_path(dir, g.step, x + 1);
            dump::save(&p, m, step32(&p, g.step)?)?;
        }
    }

    if !record.per_example.is_empty() {
        mkdir(&dir.join("per_example"))?;
    }
    for s in &record.per_example {
        for (x, per) in s.layers.iter().enumerate() {
            let p = per_example_path(dir, s.step, x + 1);
            let step = step32(&p, s.step)?;
            dump::save_all(&p, per.iter().map(|m| (step, m)))?;
        }
    }

    mkdir(&dir.join("weights"))?;
    let last = record.losses.last().map_or(0, |(s, _)| *s);
    for (x, w) in record.initial_weights.iter().enumerate() {
        let p = weights_path(dir, 0, x + 1);
        dump::save(&p, w, 0)?;
    }
    if last > 0 {
        for (x, w) in record.final_weights.iter().enumerate() {
            let p = weights_path(dir, last, x + 1);
            dump::save(&p, w, step32(&p, last)?)?;
        }
    }
    Ok(())
}

/// Read-side view of a record directory.
pub struct RecordDir {
    pub dir: PathBuf,
    pub config: TrainConfig,
}

impl RecordDir {
    pub fn open(dir: &Path) -> Result<Self> {
        let cfg = dir.join("config.json");
        let text = fs::read_to_string(&cfg).map_err(|e| Error::io(&cfg, e))?;
        Ok(Self {
            dir: dir.to_path_buf(),
            config: serde_json::from_str(&text)?,
        })
    }

    pub fn layer_count(&self) -> usize {
        self.config.dims.len() - 1
    }

    pub fn check_layer(&self, layer: usize) -> Result<()> {
        if layer == 0 || layer > self.layer_count() {
            return Err(Error::Usage(format!(
                "layer must lie in 1..={}",
                self.layer_count()
            )));
        }
        Ok(())
    }

    pub fn spectra(&self, layer: usize) -> Result<Vec<SpectrumSnapshot>> {
        self.check_layer(layer)?;
        let t = csvio::read_table(&spectra_path(&self.dir, layer))?;
        Ok(t.rows
            .iter()
            .map(|r| SpectrumSnapshot {
                step: r[0] as u64,
                values: r[1..].to_vec(),
            })
            .collect())
    }

    pub fn losses(&self) -> Result<Vec<(u64, f64)>> {
        let t = csvio::read_table(&self.dir.join("loss.csv"))?;
        Ok(t.rows.iter().map(|r| (r[0] as u64, r[1])).collect())
    }

    pub fn initial_weights(&self, layer: usize) -> Result<Matrix> {
        self.check_layer(layer)?;
        Ok(dump::load(&weights_path(&self.dir, 0, layer))?.1)
    }

    /// Gradient applied at `step`, or [`Error::MissingGradient`].
    pub fn gradient(&self, step: u64, layer: usize) -> Result<Matrix> {
        let p = grad_path(&self.dir, step, layer);
        if !p.exists() {
            return Err(Error::MissingGradient { step, path: p });
        }
        Ok(dump::load(&p)?.1)
    }

    /// Per-example gradients recorded at `step`.
    pub fn per_example(&self, step: u64, layer: usize) -> Result<Vec<Matrix>> {
        let p = per_example_path(&self.dir, step, layer);
        Ok(dump::load_all(&p)?.into_iter().map(|(_, m)| m).collect())
    }

    /// Steps with per-example gradient dumps for `layer`, ascending.
    pub fn per_example_steps(&self, layer: usize) -> Vec<u64> {
        let suffix = format!("_layer{layer}.bin");
        let mut steps: Vec<u64> = fs::read_dir(self.dir.join("per_example"))
            .map(|rd| {
                rd.filter_map(|e| e.ok())
                    .filter_map(|e| {
                        let name = e.file_name().to_string_lossy().into_owned();
                        name.strip_prefix("step")?
                            .strip_suffix(&suffix)?
                            .parse()
                            .ok()
                    })
                    .collect()
            })
            .unwrap_or_default();
        steps.sort_unstable();
        steps
    }
}
