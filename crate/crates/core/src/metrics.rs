//! Precision-recall evaluation, separation diagnostics and score grids.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::vecops::mean;
use crate::Scorer;

/// Precision-recall points at descending unique score thresholds.
#[derive(Debug, Clone, PartialEq)]
pub struct PRCurve {
    /// `(recall, precision)` after admitting each group of tied scores.
    pub points: Vec<(f64, f64)>,
    pub thresholds: Vec<f64>,
    pub positives: usize,
    pub negatives: usize,
}

impl PRCurve {
    /// Step-wise average precision `Σ (R_k − R_{k−1}) · P_k`.
    pub fn average_precision(&self) -> f64 {
        let mut prev = 0.0;
        let mut ap = 0.0;
        for &(r, p) in &self.points {
            ap += (r - prev) * p;
            prev = r;
        }
        ap
    }
}

/// Builds the PR curve for `scores` where label 1 is the positive class and
/// higher scores rank first. Equal scores form a single threshold.
pub fn pr_curve(scores: &[f64], labels: &[u8]) -> Result<PRCurve> {
    check_dim(scores.len(), labels.len())?;
    if scores.iter().any(|s| s.is_nan()) {
        return Err(Error::invalid("scores contain NaN"));
    }
    let positives = labels.iter().filter(|&&l| l == 1).count();
    if positives == 0 {
        return Err(Error::Undefined(
            "no positive labels: recall is undefined".into(),
        ));
    }
    let negatives = labels.len() - positives;
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]));

    let mut points = Vec::new();
    let mut thresholds = Vec::new();
    let (mut tp, mut fp) = (0usize, 0usize);
    let mut i = 0;
    while i < order.len() {
        let t = scores[order[i]];
        while i < order.len() && scores[order[i]] == t {
            if labels[order[i]] == 1 {
                tp += 1;
            } else {
                fp += 1;
            }
            i += 1;
        }
        points.push((tp as f64 / positives as f64, tp as f64 / (tp + fp) as f64));
        thresholds.push(t);
    }
    Ok(PRCurve {
        points,
        thresholds,
        positives,
        negatives,
    })
}

/// Average precision of `scores` (higher = more anomalous) against
/// `anomaly_labels` (1 = anomaly).
pub fn aupr(scores: &[f64], anomaly_labels: &[u8]) -> Result<f64> {
    Ok(pr_curve(scores, anomaly_labels)?.average_precision())
}

/// AUPR with anomalies as the positive class, starting from scores that are
/// high for normal points and labels where 1 marks a normal point.
///
/// Scores are negated rather than subtracted from one so that values near 1
/// keep their order.
pub fn anomaly_aupr(normal_scores: &[f64], normal_labels: &[u8]) -> Result<f64> {
    let scores: Vec<f64> = normal_scores.iter().map(|s| -s).collect();
    let labels: Vec<u8> = normal_labels.iter().map(|l| 1 - l.min(&1)).collect();
    aupr(&scores, &labels)
}

/// AUPR with the normal (label 1) class as positive.
pub fn normal_aupr(normal_scores: &[f64], normal_labels: &[u8]) -> Result<f64> {
    aupr(normal_scores, normal_labels)
}

/// Group means of scores and, for equality heads, of the distance to the
/// output hyperplane.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeparationReport {
    pub normal_mean_score: f64,
    pub anomaly_mean_score: f64,
    pub normal_mean_distance: Option<f64>,
    pub anomaly_mean_distance: Option<f64>,
}

impl SeparationReport {
    /// Mean normal score minus mean anomaly score.
    pub fn score_gap(&self) -> f64 {
        self.normal_mean_score - self.anomaly_mean_score
    }

    /// How many times further anomalies sit from the plane than normals.
    pub fn distance_ratio(&self) -> Option<f64> {
        Some(self.anomaly_mean_distance? / self.normal_mean_distance?)
    }
}

/// `normal_labels` uses 1 for normal points. `distances` are signed
/// distances; their absolute values are averaged.
pub fn separation_report(
    scores: &[f64],
    distances: Option<&[f64]>,
    normal_labels: &[u8],
) -> Result<SeparationReport> {
    check_dim(normal_labels.len(), scores.len())?;
    if let Some(d) = distances {
        check_dim(normal_labels.len(), d.len())?;
    }
    let pick = |values: &[f64], label: u8| -> Vec<f64> {
        values
            .iter()
            .zip(normal_labels)
            .filter(|(_, &l)| l == label)
            .map(|(v, _)| *v)
            .collect()
    };
    let normal = pick(scores, 1);
    let anomaly = pick(scores, 0);
    if normal.is_empty() || anomaly.is_empty() {
        return Err(Error::Undefined(
            "separation needs both normal and anomalous points".into(),
        ));
    }
    let abs_mean = |d: &[f64], label| {
        let v: Vec<f64> = pick(d, label).iter().map(|x| x.abs()).collect();
        mean(&v)
    };
    Ok(SeparationReport {
        normal_mean_score: mean(&normal),
        anomaly_mean_score: mean(&anomaly),
        normal_mean_distance: distances.map(|d| abs_mean(d, 1)),
        anomaly_mean_distance: distances.map(|d| abs_mean(d, 0)),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bounds {
    pub xmin: f64,
    pub xmax: f64,
    pub ymin: f64,
    pub ymax: f64,
}

impl Bounds {
    pub fn square(r: f64) -> Self {
        Self {
            xmin: -r,
            xmax: r,
            ymin: -r,
            ymax: r,
        }
    }
}

/// Scores sampled at cell centres; row `j` holds the `j`-th y value
/// (ascending), column `i` the `i`-th x value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub bounds: Bounds,
    pub gx: usize,
    pub gy: usize,
    pub values: Vec<f64>,
}

impl Grid {
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[j * self.gx + i]
    }

    pub fn cell_center(&self, i: usize, j: usize) -> [f64; 2] {
        cell_center(&self.bounds, self.gx, self.gy, i, j)
    }

    /// `gy` lines of `gx` comma-separated values, no header.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for row in self.values.chunks_exact(self.gx) {
            let line: Vec<String> = row.iter().map(|v| format!("{v:.16e}")).collect();
            out.push_str(&line.join(","));
            out.push('\n');
        }
        out
    }

    /// Writes the CSV matrix and a `<path>.meta.json` sidecar with bounds and
    /// resolution.
    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        fs::write(path, self.to_csv()).map_err(|e| Error::io(path, e))?;
        let meta = GridMeta {
            bounds: self.bounds,
            gx: self.gx,
            gy: self.gy,
            layout: "rows are ascending y, columns ascending x, values at cell centres".into(),
        };
        let mut mp = path.as_os_str().to_owned();
        mp.push(".meta.json");
        let mp = PathBuf::from(mp);
        fs::write(&mp, serde_json::to_string_pretty(&meta)? + "\n").map_err(|e| Error::io(&mp, e))
    }
}

#[derive(Serialize)]
struct GridMeta {
    bounds: Bounds,
    gx: usize,
    gy: usize,
    layout: String,
}

fn cell_center(b: &Bounds, gx: usize, gy: usize, i: usize, j: usize) -> [f64; 2] {
    let dx = (b.xmax - b.xmin) / gx as f64;
    let dy = (b.ymax - b.ymin) / gy as f64;
    [
        b.xmin + (i as f64 + 0.5) * dx,
        b.ymin + (j as f64 + 0.5) * dy,
    ]
}

pub fn heatmap_grid(scorer: &dyn Scorer, bounds: Bounds, gx: usize, gy: usize) -> Result<Grid> {
    if scorer.input_dim() != 2 {
        return Err(Error::invalid(format!(
            "heatmaps need a 2-D model, got input dimension {}",
            scorer.input_dim()
        )));
    }
    if gx == 0 || gy == 0 {
        return Err(Error::invalid("grid resolution must be positive"));
    }
    if !(bounds.xmax > bounds.xmin && bounds.ymax > bounds.ymin) {
        return Err(Error::invalid("grid bounds must be non-empty"));
    }
    let mut values = Vec::with_capacity(gx * gy);
    for j in 0..gy {
        for i in 0..gx {
            values.push(scorer.score(&cell_center(&bounds, gx, gy, i, j))?);
        }
    }
    Ok(Grid {
        bounds,
        gx,
        gy,
        values,
    })
}

/// Adapts a closure into a [`Scorer`].
pub struct FnScorer<F> {
    pub dim: usize,
    pub f: F,
}

impl<F: Fn(&[f64]) -> f64> Scorer for FnScorer<F> {
    fn input_dim(&self) -> usize {
        self.dim
    }

    fn score(&self, x: &[f64]) -> Result<f64> {
        check_dim(self.dim, x.len())?;
        Ok((self.f)(x))
    }
}
