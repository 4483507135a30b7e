//! Dataset generation and model train/score helpers behind the `dataset`
//! and `model` subcommands.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::ValueEnum;
use serde::Serialize;

use eqsep::data::{
    gen_circles_ad, gen_gaussians2d_split, gen_linear1_split, gen_logic, save_csv, CirclesConfig,
    Gate, Gaussians2dConfig, LabeledDataset, Linear1Config,
};
use eqsep::metrics::{anomaly_aupr, normal_aupr};
use eqsep::network::{train, Ensemble, NetworkModel};
use eqsep::units::LossKind;
use eqsep::Scorer;

use crate::config::{CirclesParams, HeadKind, HiddenKind};
use crate::experiments::{architecture, network_config};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Generator {
    And,
    Or,
    Xor,
    Linear1,
    Linear2,
    Circles,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DatasetRequest {
    pub generator: Generator,
    pub seed: u64,
    pub dim: usize,
    /// Noise std for linear1, noise multiplier for linear2.
    pub noise: f64,
    pub m: usize,
    pub pos_ratio: Option<f64>,
}

/// Generated splits labelled by role (`train`, `test`, or `all`).
pub fn generate(req: &DatasetRequest) -> Result<Vec<(&'static str, LabeledDataset)>> {
    let pair = |(a, b): (LabeledDataset, LabeledDataset)| vec![("train", a), ("test", b)];
    Ok(match req.generator {
        Generator::And => vec![("all", gen_logic(Gate::And))],
        Generator::Or => vec![("all", gen_logic(Gate::Or))],
        Generator::Xor => vec![("all", gen_logic(Gate::Xor))],
        Generator::Linear1 => {
            let cfg = Linear1Config {
                dim: req.dim,
                noise_std: req.noise,
                m: req.m,
                pos_ratio: req.pos_ratio.unwrap_or(0.9),
            };
            pair(gen_linear1_split(&cfg, req.seed)?)
        }
        Generator::Linear2 => {
            let cfg = Gaussians2dConfig {
                noise_multiplier: req.noise,
                m: req.m,
                pos_ratio: req.pos_ratio.unwrap_or(0.9),
            };
            pair(gen_gaussians2d_split(&cfg, req.seed)?)
        }
        Generator::Circles => {
            let cfg = CirclesConfig {
                m: req.m,
                pos_ratio: req.pos_ratio.unwrap_or(0.75),
                ..CirclesConfig::default()
            };
            pair(gen_circles_ad(&cfg, req.seed)?)
        }
    })
}

/// `out.csv` for a single set; `out_train.csv` and `out_test.csv` for splits.
pub fn write_datasets(out: &Path, sets: &[(&str, LabeledDataset)]) -> Result<Vec<PathBuf>> {
    if let Some(parent) = out.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent)?;
    }
    let mut written = Vec::new();
    for (role, data) in sets {
        let path = if sets.len() == 1 {
            out.to_path_buf()
        } else {
            let stem = out.file_stem().and_then(|s| s.to_str()).unwrap_or("data");
            out.with_file_name(format!("{stem}_{role}.csv"))
        };
        save_csv(data, &path).with_context(|| format!("writing {}", path.display()))?;
        written.push(path);
    }
    Ok(written)
}

/// Trains one network per seed on `data`.
pub fn train_models(
    data: &LabeledDataset,
    p: &CirclesParams,
    head: HeadKind,
    hidden: HiddenKind,
    loss: LossKind,
    seeds: &[u64],
) -> Result<Vec<NetworkModel>> {
    if !data.has_both_labels() {
        bail!("training data needs both normal (1) and anomalous (0) rows");
    }
    seeds
        .iter()
        .map(|&seed| {
            let arch = architecture(p, data.dim(), head, hidden)?;
            let (model, _) = train(
                &NetworkModel::init(arch, seed),
                data,
                loss,
                &network_config(p, seed),
            )?;
            Ok(model)
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScoreSummary {
    pub members: usize,
    pub points: usize,
    /// Present when the data holds both labels.
    pub normal_aupr: Option<f64>,
    pub anomaly_aupr: Option<f64>,
}

/// Ensemble-mean scores of `models` on `data`.
pub fn score_dataset(
    models: Vec<NetworkModel>,
    data: &LabeledDataset,
) -> Result<(Vec<f64>, ScoreSummary)> {
    let members = models.len();
    let ensemble = Ensemble::new(models)?;
    let scores = data
        .rows()
        .map(|x| ensemble.score(x))
        .collect::<eqsep::Result<Vec<f64>>>()?;
    let (normal, anomaly) = if data.has_both_labels() {
        (
            Some(normal_aupr(&scores, data.labels())?),
            Some(anomaly_aupr(&scores, data.labels())?),
        )
    } else {
        (None, None)
    };
    Ok((
        scores,
        ScoreSummary {
            members,
            points: data.len(),
            normal_aupr: normal,
            anomaly_aupr: anomaly,
        },
    ))
}

pub fn write_scores(path: &Path, scores: &[f64], labels: &[u8]) -> Result<()> {
    let mut w =
        csv::Writer::from_path(path).with_context(|| format!("opening {}", path.display()))?;
    w.write_record(["score", "label"])?;
    for (s, l) in scores.iter().zip(labels) {
        w.write_record([s.to_string(), l.to_string()])?;
    }
    w.flush()?;
    Ok(())
}
