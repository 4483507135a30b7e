//! Browser bindings for three interactive views: fitting a linear equality
//! separator to clicked points, training a network on the circles data, and
//! checking which labelings of a small point set a strict separator realizes.
//!
//! Each view is a plain function returning a serializable struct so it can
//! be tested natively; the `#[wasm_bindgen]` wrappers hand JSON to the page.

use serde::Serialize;
use wasm_bindgen::prelude::*;

use eqsep::data::{gen_circles_ad, CirclesConfig, LabeledDataset, Meta, Role};
use eqsep::geometry::{shatter_search, MAX_SHATTER_POINTS};
use eqsep::linear::fit_linear_es;
use eqsep::metrics::{anomaly_aupr, heatmap_grid, normal_aupr, Bounds, Grid};
use eqsep::model::Polarity;
use eqsep::network::{train, Activation, Architecture, Head, NetworkModel};
use eqsep::optim::OptimConfig;
use eqsep::units::{BumpParams, LossKind};
use eqsep::Scorer;

pub const MAX_RESOLUTION: usize = 200;
pub const MAX_RESTARTS: usize = 100;

fn invalid(msg: impl Into<String>) -> eqsep::Error {
    eqsep::Error::InvalidParameter(msg.into())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HeatmapView {
    pub extent: f64,
    pub resolution: usize,
    /// Row-major from the bottom row (lowest y) up.
    pub values: Vec<f64>,
}

impl From<Grid> for HeatmapView {
    fn from(g: Grid) -> Self {
        Self {
            extent: g.bounds.xmax,
            resolution: g.gx,
            values: g.values,
        }
    }
}

fn grid(scorer: &dyn Scorer, extent: f64, resolution: usize) -> eqsep::Result<HeatmapView> {
    if resolution == 0 || resolution > MAX_RESOLUTION {
        return Err(invalid(format!(
            "resolution must be in 1..={MAX_RESOLUTION}"
        )));
    }
    Ok(heatmap_grid(scorer, Bounds::square(extent), resolution, resolution)?.into())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LinearView {
    /// `[w₁, w₂, b]` of the fitted line `w·x + b = 0`.
    pub line: [f64; 3],
    /// `"inside"` when label 1 sits on the line, `"outside"` when label 0 does.
    pub polarity: &'static str,
    pub correct: usize,
    pub total: usize,
    pub heatmap: HeatmapView,
}

fn points_dataset(xy: &[f64], labels: &[u8]) -> eqsep::Result<LabeledDataset> {
    if xy.len() != 2 * labels.len() {
        return Err(invalid("expected two coordinates per label"));
    }
    LabeledDataset::new(
        2,
        xy.to_vec(),
        labels.to_vec(),
        Meta::new("clicked", 0, Role::Train),
    )
}

/// Fits a linear equality separator from `restarts` random starts (seeds
/// `seed, seed+1, …`) under both polarities and keeps the fit with the
/// fewest training errors, then the lowest final loss.
pub fn fit_points(
    xy: &[f64],
    labels: &[u8],
    sigma: f64,
    loss: &str,
    seed: u64,
    restarts: usize,
    resolution: usize,
) -> eqsep::Result<LinearView> {
    if restarts == 0 || restarts > MAX_RESTARTS {
        return Err(invalid(format!("restarts must be in 1..={MAX_RESTARTS}")));
    }
    let data = points_dataset(xy, labels)?;
    if !data.has_both_labels() {
        return Err(invalid("place points of both classes"));
    }
    let kind: LossKind = loss.parse()?;
    let bump = BumpParams::centered(sigma)?;
    let mut fits = Vec::with_capacity(2 * restarts);
    for s in seed..seed + restarts as u64 {
        for polarity in [Polarity::InsidePositive, Polarity::OutsidePositive] {
            let (model, trace) = fit_linear_es(
                &data,
                bump,
                kind,
                polarity,
                &OptimConfig::bfgs(1000, s),
                None,
            )?;
            fits.push((
                model.misclassified(&data)?,
                trace.final_loss(),
                model,
                polarity,
            ));
        }
    }
    fits.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.total_cmp(&b.1)));
    let (wrong, _, model, polarity) = fits.swap_remove(0);
    let clf = model.margin_classifier()?;
    let (w, b) = (clf.plane().weights(), clf.plane().bias());
    let extent = xy.iter().fold(1.0_f64, |m, v| m.max(v.abs())) * 1.25;
    Ok(LinearView {
        line: [w[0], w[1], b],
        polarity: match polarity {
            Polarity::InsidePositive => "inside",
            Polarity::OutsidePositive => "outside",
        },
        correct: data.len() - wrong,
        total: data.len(),
        heatmap: grid(&model, extent, resolution)?,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CirclesView {
    pub normal_aupr: f64,
    pub anomaly_aupr: f64,
    pub epochs: usize,
    /// Flattened `[x, y, label]` triples.
    pub train: Vec<f64>,
    pub test: Vec<f64>,
    pub heatmap: HeatmapView,
}

fn triples(d: &LabeledDataset) -> Vec<f64> {
    d.rows()
        .zip(d.labels())
        .flat_map(|(x, &l)| [x[0], x[1], f64::from(l)])
        .collect()
}

/// Trains a 2×5 network on the circles data (normals on the unit circle,
/// training anomalies on radius 2, test anomalies on radius 0.5).
pub fn train_circles(
    head: &str,
    hidden: &str,
    seed: u64,
    epochs: usize,
    resolution: usize,
) -> eqsep::Result<CirclesView> {
    let head = match head {
        "hs" => Head::Halfspace,
        "es" => Head::equality(),
        "rs" => Head::rbf(),
        other => return Err(invalid(format!("unknown head {other:?} (hs|es|rs)"))),
    };
    let act = match hidden {
        "lrelu" => Activation::leaky_relu(),
        "bump" => Activation::bump(),
        "rbf" => Activation::rbf(),
        other => {
            return Err(invalid(format!(
                "unknown hidden unit {other:?} (lrelu|bump|rbf)"
            )))
        }
    };
    let (train_set, test_set) = gen_circles_ad(&CirclesConfig::default(), 0)?;
    let arch = Architecture::uniform(2, 2, 5, act, head)?;
    let cfg = OptimConfig {
        patience: 10,
        validation_fraction: 0.1,
        batch_size: Some(32),
        split_seed: Some(0),
        ..OptimConfig::adam(epochs, seed)
    };
    let (model, report) = train(
        &NetworkModel::init(arch, seed),
        &train_set,
        LossKind::Logistic,
        &cfg,
    )?;
    let scores = model.scores(&test_set)?;
    Ok(CirclesView {
        normal_aupr: normal_aupr(&scores, test_set.labels())?,
        anomaly_aupr: anomaly_aupr(&scores, test_set.labels())?,
        epochs: report.epochs_run,
        train: triples(&train_set),
        test: triples(&test_set),
        heatmap: grid(&model, 2.5, resolution)?,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ShatterView {
    pub points: usize,
    pub feasible: usize,
    pub labelings: usize,
    pub shattered: bool,
    /// A labeling no strict separator realizes, one flag per point.
    pub witness: Option<Vec<bool>>,
}

pub fn shatter_points(xy: &[f64]) -> eqsep::Result<ShatterView> {
    if xy.len() % 2 != 0 {
        return Err(invalid("expected two coordinates per point"));
    }
    let n = xy.len() / 2;
    if n == 0 || n > MAX_SHATTER_POINTS {
        return Err(invalid(format!("place 1 to {MAX_SHATTER_POINTS} points")));
    }
    let pts: Vec<[f64; 2]> = xy.chunks_exact(2).map(|c| [c[0], c[1]]).collect();
    let report = shatter_search(&pts)?;
    Ok(ShatterView {
        points: n,
        feasible: report.feasible.iter().filter(|&&f| f).count(),
        labelings: report.feasible.len(),
        shattered: report.shattered,
        witness: report.witness,
    })
}

fn to_js<T: Serialize>(r: eqsep::Result<T>) -> Result<String, JsError> {
    let v = r.map_err(|e| JsError::new(&e.to_string()))?;
    serde_json::to_string(&v).map_err(|e| JsError::new(&e.to_string()))
}

/// JSON [`LinearView`] for clicked points (`xy` interleaved, labels 0/1).
#[wasm_bindgen(js_name = fitPoints)]
pub fn fit_points_js(
    xy: &[f64],
    labels: &[u8],
    sigma: f64,
    loss: &str,
    seed: u32,
    restarts: u32,
    resolution: u32,
) -> Result<String, JsError> {
    to_js(fit_points(
        xy,
        labels,
        sigma,
        loss,
        seed.into(),
        restarts as usize,
        resolution as usize,
    ))
}

/// JSON [`CirclesView`].
#[wasm_bindgen(js_name = trainCircles)]
pub fn train_circles_js(
    head: &str,
    hidden: &str,
    seed: u32,
    epochs: u32,
    resolution: u32,
) -> Result<String, JsError> {
    to_js(train_circles(
        head,
        hidden,
        seed.into(),
        epochs as usize,
        resolution as usize,
    ))
}

/// JSON [`ShatterView`].
#[wasm_bindgen(js_name = shatterPoints)]
pub fn shatter_points_js(xy: &[f64]) -> Result<String, JsError> {
    to_js(shatter_points(xy))
}
