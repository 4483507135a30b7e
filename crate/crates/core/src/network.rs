//! Feed-forward networks with equality, halfspace or RBF output heads.
//!
//! Hidden layers are either dense (`Wx + b` followed by leaky ReLU or a
//! Gaussian bump) or RBF layers (`exp(−γ‖x − cⱼ‖²)` per unit, learnable
//! centres, unit outer weight). All parameters live in one flat vector so
//! the optimizers and serialization can treat a model as a plain point in
//! parameter space.
//!
//! Layout, per hidden layer with fan-in `d` and width `k`:
//!
//! - dense: `k·d` weights (row per unit), then `k` biases, then one shared
//!   width parameter if the bump width is learnable;
//! - RBF: `k·d` centre coordinates.
//!
//! The head follows: `d` weights and a bias for halfspace and equality heads,
//! `d` centre coordinates for the RBF head.

use std::fs;
use std::path::Path;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::data::LabeledDataset;
use crate::error::{check_dim, Error, Result};
use crate::optim::{early_stop_train, Adam, EarlyStopReport, EpochTrainer, Method, OptimConfig};
use crate::rng::{permutation, seeded, uniform, SeededRng};
use crate::units::{
    bump, bump_grad, bump_grad_sigma, leaky_relu, leaky_relu_grad, loss, loss_grad, sigmoid,
    BumpParams, LossKind,
};
use crate::vecops::{dot, norm, sq_dist};
use crate::Scorer;

/// Lower clamp for learnable bump widths.
pub const MIN_SIGMA: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Activation {
    LeakyRelu { alpha: f64 },
    Bump { sigma: f64, learnable: bool },
    Rbf { gamma: f64 },
}

impl Activation {
    pub fn leaky_relu() -> Self {
        Activation::LeakyRelu { alpha: 0.01 }
    }

    pub fn bump() -> Self {
        Activation::Bump {
            sigma: 0.5,
            learnable: false,
        }
    }

    pub fn rbf() -> Self {
        Activation::Rbf { gamma: 1.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LayerSpec {
    pub width: usize,
    pub activation: Activation,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Head {
    /// Dense unit followed by a sigmoid.
    Halfspace,
    /// Dense unit followed by a zero-centred bump of fixed width.
    EqualitySep { sigma: f64 },
    /// Single RBF unit with a learnable centre.
    RbfSep { gamma: f64 },
}

impl Head {
    pub fn equality() -> Self {
        Head::EqualitySep { sigma: 0.5 }
    }

    pub fn rbf() -> Self {
        Head::RbfSep { gamma: 1.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Architecture {
    pub input_dim: usize,
    pub layers: Vec<LayerSpec>,
    pub head: Head,
}

impl Architecture {
    pub fn new(input_dim: usize, layers: Vec<LayerSpec>, head: Head) -> Result<Self> {
        if input_dim == 0 {
            return Err(Error::invalid("input dimension must be >= 1"));
        }
        for (i, l) in layers.iter().enumerate() {
            if l.width == 0 {
                return Err(Error::invalid(format!("layer {i} has zero width")));
            }
            match l.activation {
                Activation::LeakyRelu { alpha } if !(alpha > 0.0 && alpha < 1.0) => {
                    return Err(Error::invalid(format!(
                        "leaky ReLU slope must be in (0,1), got {alpha}"
                    )))
                }
                Activation::Bump { sigma, .. } if !(sigma > 0.0) => {
                    return Err(Error::invalid(format!(
                        "bump width must be > 0, got {sigma}"
                    )))
                }
                Activation::Rbf { gamma } if !(gamma > 0.0) => {
                    return Err(Error::invalid(format!(
                        "RBF gamma must be > 0, got {gamma}"
                    )))
                }
                _ => {}
            }
        }
        match head {
            Head::EqualitySep { sigma } if !(sigma > 0.0) => {
                return Err(Error::invalid("output bump width must be > 0"))
            }
            Head::RbfSep { gamma } if !(gamma > 0.0) => {
                return Err(Error::invalid("output RBF gamma must be > 0"))
            }
            _ => {}
        }
        Ok(Self {
            input_dim,
            layers,
            head,
        })
    }

    /// `depth` hidden layers of `width` units sharing one activation.
    pub fn uniform(
        input_dim: usize,
        depth: usize,
        width: usize,
        activation: Activation,
        head: Head,
    ) -> Result<Self> {
        Self::new(
            input_dim,
            vec![LayerSpec { width, activation }; depth],
            head,
        )
    }

    fn fan_ins(&self) -> impl Iterator<Item = usize> + '_ {
        std::iter::once(self.input_dim).chain(self.layers.iter().map(|l| l.width))
    }

    fn penultimate_width(&self) -> usize {
        self.layers.last().map_or(self.input_dim, |l| l.width)
    }

    fn layer_size(fan_in: usize, l: &LayerSpec) -> usize {
        match l.activation {
            Activation::Rbf { .. } => fan_in * l.width,
            Activation::Bump {
                learnable: true, ..
            } => (fan_in + 1) * l.width + 1,
            _ => (fan_in + 1) * l.width,
        }
    }

    fn head_size(&self) -> usize {
        let d = self.penultimate_width();
        match self.head {
            Head::RbfSep { .. } => d,
            _ => d + 1,
        }
    }

    pub fn param_count(&self) -> usize {
        self.fan_ins()
            .zip(&self.layers)
            .map(|(d, l)| Self::layer_size(d, l))
            .sum::<usize>()
            + self.head_size()
    }

    fn offsets(&self) -> Vec<usize> {
        let mut off = Vec::with_capacity(self.layers.len() + 1);
        let mut acc = 0;
        for (d, l) in self.fan_ins().zip(&self.layers) {
            off.push(acc);
            acc += Self::layer_size(d, l);
        }
        off.push(acc);
        off
    }
}

/// Intermediate values of one forward pass.
#[derive(Debug, Clone)]
pub struct ForwardPass {
    /// `activations[0]` is the input; `activations[l+1]` the output of layer `l`.
    pub activations: Vec<Vec<f64>>,
    /// Pre-activations per hidden layer (squared distances for RBF layers).
    pub preactivations: Vec<Vec<f64>>,
    /// Head pre-activation: `wᵀh + b` or, for an RBF head, `‖h − c‖²`.
    pub head_preactivation: f64,
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetworkModel {
    pub architecture: Architecture,
    pub seed: u64,
    #[serde(with = "full_precision")]
    pub parameters: Vec<f64>,
}

fn glorot(
    rng: &mut SeededRng,
    fan_in: usize,
    fan_out: usize,
    n: usize,
) -> impl Iterator<Item = f64> + '_ {
    let limit = (6.0 / (fan_in + fan_out) as f64).sqrt();
    (0..n).map(move |_| uniform(rng, -limit, limit))
}

impl NetworkModel {
    /// Glorot-uniform weights and RBF centres, zero biases, learnable widths
    /// at their configured starting value.
    pub fn init(architecture: Architecture, seed: u64) -> Self {
        let mut rng = seeded(seed, 0);
        let mut p = Vec::with_capacity(architecture.param_count());
        for (d, l) in architecture.fan_ins().zip(&architecture.layers) {
            let k = l.width;
            p.extend(glorot(&mut rng, d, k, k * d));
            match l.activation {
                Activation::Rbf { .. } => {}
                Activation::Bump {
                    sigma,
                    learnable: true,
                } => {
                    p.resize(p.len() + k, 0.0);
                    p.push(sigma);
                }
                _ => p.resize(p.len() + k, 0.0),
            }
        }
        let d = architecture.penultimate_width();
        p.extend(glorot(&mut rng, d, 1, d));
        if !matches!(architecture.head, Head::RbfSep { .. }) {
            p.push(0.0);
        }
        debug_assert_eq!(p.len(), architecture.param_count());
        Self {
            architecture,
            seed,
            parameters: p,
        }
    }

    pub fn from_parameters(
        architecture: Architecture,
        parameters: Vec<f64>,
        seed: u64,
    ) -> Result<Self> {
        check_dim(architecture.param_count(), parameters.len())?;
        Ok(Self {
            architecture,
            seed,
            parameters,
        })
    }

    pub fn input_dim(&self) -> usize {
        self.architecture.input_dim
    }

    /// Effective width of each bump layer (clamped), `None` for other layers.
    pub fn layer_sigmas(&self) -> Vec<Option<f64>> {
        let offs = self.architecture.offsets();
        self.architecture
            .fan_ins()
            .zip(&self.architecture.layers)
            .enumerate()
            .map(|(li, (d, l))| match l.activation {
                Activation::Bump {
                    learnable: true, ..
                } => Some(self.parameters[offs[li] + (d + 1) * l.width].max(MIN_SIGMA)),
                Activation::Bump { sigma, .. } => Some(sigma),
                _ => None,
            })
            .collect()
    }

    pub fn forward(&self, x: &[f64]) -> Result<ForwardPass> {
        check_dim(self.input_dim(), x.len())?;
        let arch = &self.architecture;
        let p = &self.parameters;
        let offs = arch.offsets();
        let mut activations = vec![x.to_vec()];
        let mut preactivations = Vec::with_capacity(arch.layers.len());
        for (li, (d, l)) in arch.fan_ins().zip(&arch.layers).enumerate() {
            let input = &activations[li];
            let o = offs[li];
            let k = l.width;
            let (pre, out): (Vec<f64>, Vec<f64>) = match l.activation {
                Activation::Rbf { gamma } => (0..k)
                    .map(|j| {
                        let q = sq_dist(input, &p[o + j * d..o + (j + 1) * d]);
                        (q, (-gamma * q).exp())
                    })
                    .unzip(),
                act => {
                    let sig = match act {
                        Activation::Bump {
                            learnable: true, ..
                        } => p[o + (d + 1) * k].max(MIN_SIGMA),
                        Activation::Bump { sigma, .. } => sigma,
                        _ => 0.0,
                    };
                    (0..k)
                        .map(|j| {
                            let z = dot(&p[o + j * d..o + (j + 1) * d], input) + p[o + k * d + j];
                            let a = match act {
                                Activation::LeakyRelu { alpha } => leaky_relu(z, alpha),
                                _ => bump(
                                    z,
                                    BumpParams {
                                        mu: 0.0,
                                        sigma: sig,
                                    },
                                ),
                            };
                            (z, a)
                        })
                        .unzip()
                }
            };
            preactivations.push(pre);
            activations.push(out);
        }
        let h = activations.last().expect("input is always present");
        let o = offs[arch.layers.len()];
        let d = h.len();
        let (head_preactivation, score) = match arch.head {
            Head::Halfspace => {
                let z = dot(&p[o..o + d], h) + p[o + d];
                (z, sigmoid(z))
            }
            Head::EqualitySep { sigma } => {
                let z = dot(&p[o..o + d], h) + p[o + d];
                (z, bump(z, BumpParams { mu: 0.0, sigma }))
            }
            Head::RbfSep { gamma } => {
                let q = sq_dist(h, &p[o..o + d]);
                (q, (-gamma * q).exp())
            }
        };
        Ok(ForwardPass {
            activations,
            preactivations,
            head_preactivation,
            score,
        })
    }

    pub fn score(&self, x: &[f64]) -> Result<f64> {
        Ok(self.forward(x)?.score)
    }

    /// Signed distance from the penultimate representation to the output
    /// hyperplane; `None` for RBF heads.
    pub fn head_distance(&self, x: &[f64]) -> Result<Option<f64>> {
        if matches!(self.architecture.head, Head::RbfSep { .. }) {
            return Ok(None);
        }
        let fp = self.forward(x)?;
        let o = self.architecture.offsets()[self.architecture.layers.len()];
        let d = self.architecture.penultimate_width();
        let wn = norm(&self.parameters[o..o + d]);
        Ok(Some(fp.head_preactivation / wn))
    }

    /// Gradient of the per-example loss with respect to every parameter.
    pub fn backward(&self, x: &[f64], label: f64, kind: LossKind) -> Result<Vec<f64>> {
        let mut g = vec![0.0; self.parameters.len()];
        let fp = self.forward(x)?;
        self.accumulate_gradient(&fp, label, kind, 1.0, &mut g);
        Ok(g)
    }

    /// Adds `scale · ∂loss/∂θ` for one example into `grad`.
    fn accumulate_gradient(
        &self,
        fp: &ForwardPass,
        label: f64,
        kind: LossKind,
        scale: f64,
        grad: &mut [f64],
    ) {
        let arch = &self.architecture;
        let p = &self.parameters;
        let offs = arch.offsets();
        let nl = arch.layers.len();
        let h = &fp.activations[nl];
        let d = h.len();
        let o = offs[nl];
        let ds = scale * loss_grad(kind, fp.score, label);

        let mut dh = vec![0.0; d];
        match arch.head {
            Head::Halfspace | Head::EqualitySep { .. } => {
                let z = fp.head_preactivation;
                let dz = ds
                    * match arch.head {
                        Head::EqualitySep { sigma } => bump_grad(z, BumpParams { mu: 0.0, sigma }),
                        _ => fp.score * (1.0 - fp.score),
                    };
                for i in 0..d {
                    grad[o + i] += dz * h[i];
                    dh[i] = dz * p[o + i];
                }
                grad[o + d] += dz;
            }
            Head::RbfSep { gamma } => {
                for i in 0..d {
                    // ∂s/∂h = −2γ(h − c)s, ∂s/∂c = +2γ(h − c)s
                    let t = 2.0 * gamma * (h[i] - p[o + i]) * fp.score * ds;
                    grad[o + i] += t;
                    dh[i] = -t;
                }
            }
        }

        let fan_ins: Vec<usize> = arch.fan_ins().collect();
        for li in (0..nl).rev() {
            let l = &arch.layers[li];
            let d = fan_ins[li];
            let k = l.width;
            let o = offs[li];
            let input = &fp.activations[li];
            let out = &fp.activations[li + 1];
            let pre = &fp.preactivations[li];
            let mut dinput = vec![0.0; d];
            match l.activation {
                Activation::Rbf { gamma } => {
                    for j in 0..k {
                        let c = &p[o + j * d..o + (j + 1) * d];
                        let f = 2.0 * gamma * out[j] * dh[j];
                        for i in 0..d {
                            let t = f * (input[i] - c[i]);
                            grad[o + j * d + i] += t;
                            dinput[i] -= t;
                        }
                    }
                }
                act => {
                    let (sig, learn_idx) = match act {
                        Activation::Bump {
                            learnable: true, ..
                        } => {
                            let raw = p[o + (d + 1) * k];
                            (
                                raw.max(MIN_SIGMA),
                                (raw > MIN_SIGMA).then_some(o + (d + 1) * k),
                            )
                        }
                        Activation::Bump { sigma, .. } => (sigma, None),
                        _ => (0.0, None),
                    };
                    for j in 0..k {
                        let z = pre[j];
                        let dz = dh[j]
                            * match act {
                                Activation::LeakyRelu { alpha } => leaky_relu_grad(z, alpha),
                                _ => bump_grad(
                                    z,
                                    BumpParams {
                                        mu: 0.0,
                                        sigma: sig,
                                    },
                                ),
                            };
                        if let Some(si) = learn_idx {
                            grad[si] += dh[j]
                                * bump_grad_sigma(
                                    z,
                                    BumpParams {
                                        mu: 0.0,
                                        sigma: sig,
                                    },
                                );
                        }
                        let w = &p[o + j * d..o + (j + 1) * d];
                        for i in 0..d {
                            grad[o + j * d + i] += dz * input[i];
                            dinput[i] += dz * w[i];
                        }
                        grad[o + k * d + j] += dz;
                    }
                }
            }
            dh = dinput;
        }
    }

    /// Mean loss over `idx` (all rows when `None`) and its gradient.
    pub fn batch_loss_grad(
        &self,
        data: &LabeledDataset,
        idx: &[usize],
        kind: LossKind,
    ) -> Result<(f64, Vec<f64>)> {
        check_dim(self.input_dim(), data.dim())?;
        let mut g = vec![0.0; self.parameters.len()];
        let mut total = 0.0;
        let scale = 1.0 / idx.len() as f64;
        for &i in idx {
            let fp = self.forward(data.row(i))?;
            let y = data.labels()[i] as f64;
            total += loss(kind, fp.score, y);
            self.accumulate_gradient(&fp, y, kind, scale, &mut g);
        }
        Ok((total * scale, g))
    }

    pub fn mean_loss(&self, data: &LabeledDataset, kind: LossKind) -> Result<f64> {
        let mut total = 0.0;
        for (x, &y) in data.rows().zip(data.labels()) {
            total += loss(kind, self.score(x)?, y as f64);
        }
        Ok(total / data.len() as f64)
    }

    pub fn scores(&self, data: &LabeledDataset) -> Result<Vec<f64>> {
        data.rows().map(|x| self.score(x)).collect()
    }

    pub fn to_json(&self) -> Result<String> {
        let doc = ModelDocument {
            format: MODEL_FORMAT.into(),
            version: 1,
            models: vec![self.clone()],
        };
        Ok(serde_json::to_string_pretty(&doc)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let mut models = load_models_str(text)?;
        if models.len() != 1 {
            return Err(Error::invalid(format!(
                "expected one model, found {}",
                models.len()
            )));
        }
        Ok(models.remove(0))
    }
}

impl Scorer for NetworkModel {
    fn input_dim(&self) -> usize {
        self.architecture.input_dim
    }

    fn score(&self, x: &[f64]) -> Result<f64> {
        NetworkModel::score(self, x)
    }
}

pub const MODEL_FORMAT: &str = "eqsep-network";

/// Serialized form of one or more models (an ensemble).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelDocument {
    pub format: String,
    pub version: u32,
    pub models: Vec<NetworkModel>,
}

pub fn save_models(models: &[NetworkModel], path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let doc = ModelDocument {
        format: MODEL_FORMAT.into(),
        version: 1,
        models: models.to_vec(),
    };
    fs::write(path, serde_json::to_string_pretty(&doc)? + "\n").map_err(|e| Error::io(path, e))
}

pub fn load_models(path: impl AsRef<Path>) -> Result<Vec<NetworkModel>> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    load_models_str(&text)
}

fn load_models_str(text: &str) -> Result<Vec<NetworkModel>> {
    let doc: ModelDocument = serde_json::from_str(text)?;
    if doc.format != MODEL_FORMAT {
        return Err(Error::invalid(format!(
            "unknown model format {:?}",
            doc.format
        )));
    }
    for m in &doc.models {
        check_dim(m.architecture.param_count(), m.parameters.len())?;
    }
    Ok(doc.models)
}

/// Writes every parameter with 17 significant digits.
mod full_precision {
    use serde::ser::SerializeSeq;
    use serde::{Deserialize, Deserializer, Serializer};
    use serde_json::value::RawValue;

    pub fn serialize<S: Serializer>(v: &[f64], s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(v.len()))?;
        for x in v {
            let raw =
                RawValue::from_string(format!("{x:.16e}")).map_err(serde::ser::Error::custom)?;
            seq.serialize_element(&raw)?;
        }
        seq.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<f64>, D::Error> {
        Vec::<f64>::deserialize(d)
    }
}

struct NetworkTrainer<'a> {
    model: NetworkModel,
    train: &'a LabeledDataset,
    val: Option<&'a LabeledDataset>,
    kind: LossKind,
    batch: usize,
    adam: Adam,
    rng: SeededRng,
}

impl EpochTrainer for NetworkTrainer<'_> {
    fn parameters(&self) -> Vec<f64> {
        self.model.parameters.clone()
    }

    fn set_parameters(&mut self, params: &[f64]) {
        self.model.parameters.copy_from_slice(params);
    }

    fn train_epoch(&mut self, _epoch: usize) -> Result<f64> {
        let order = permutation(&mut self.rng, self.train.len());
        let mut total = 0.0;
        for chunk in order.chunks(self.batch) {
            let (l, g) = self.model.batch_loss_grad(self.train, chunk, self.kind)?;
            total += l * chunk.len() as f64;
            self.adam.step(&mut self.model.parameters, &g);
        }
        Ok(total / self.train.len() as f64)
    }

    fn validation_loss(&self) -> Option<Result<f64>> {
        self.val.map(|v| self.model.mean_loss(v, self.kind))
    }
}

/// Holds out a `frac` share of each class, chosen by a seeded permutation.
///
/// Per class, `⌊count · (1 − frac)⌋` rows stay in training. Stratifying keeps
/// both classes in small validation sets.
pub fn validation_split(
    data: &LabeledDataset,
    frac: f64,
    seed: u64,
) -> (LabeledDataset, Option<LabeledDataset>) {
    if frac <= 0.0 {
        return (data.clone(), None);
    }
    let mut rng = seeded(seed, 1);
    let (mut tr, mut va) = (vec![], vec![]);
    for label in [1u8, 0] {
        let idx: Vec<usize> = (0..data.len())
            .filter(|&i| data.labels()[i] == label)
            .collect();
        let keep = ((idx.len() as f64) * (1.0 - frac)).floor() as usize;
        let order = permutation(&mut rng, idx.len());
        tr.extend(order[..keep].iter().map(|&k| idx[k]));
        va.extend(order[keep..].iter().map(|&k| idx[k]));
    }
    if va.is_empty() {
        return (data.clone(), None);
    }
    tr.sort_unstable();
    va.sort_unstable();
    (data.subset(&tr), Some(data.subset(&va)))
}

/// Trains with Adam and early stopping.
///
/// Label 1 (normal) is the activated class: inside the margin for an
/// equality head, the high side of a halfspace head.
pub fn train(
    model: &NetworkModel,
    data: &LabeledDataset,
    kind: LossKind,
    cfg: &OptimConfig,
) -> Result<(NetworkModel, EarlyStopReport)> {
    cfg.validate()?;
    if cfg.method != Method::Adam {
        return Err(Error::Config("networks are trained with Adam".into()));
    }
    if data.is_empty() {
        return Err(Error::invalid("training data is empty"));
    }
    check_dim(model.input_dim(), data.dim())?;
    let (tr, va) = validation_split(
        data,
        cfg.validation_fraction,
        cfg.split_seed.unwrap_or(cfg.seed),
    );
    if cfg.patience > 0 && va.is_none() {
        return Err(Error::Config(
            "early stopping needs a non-empty validation split".into(),
        ));
    }
    let batch = cfg.batch_size.unwrap_or(tr.len()).max(1);
    let mut trainer = NetworkTrainer {
        model: model.clone(),
        train: &tr,
        val: va.as_ref(),
        kind,
        batch,
        adam: Adam::new(model.parameters.len(), cfg.learning_rate),
        rng: seeded(cfg.seed, 2),
    };
    let report = early_stop_train(&mut trainer, cfg)?;
    Ok((trainer.model, report))
}

/// Mean of member scores.
pub fn ensemble_score(models: &[NetworkModel], x: &[f64]) -> Result<f64> {
    if models.is_empty() {
        return Err(Error::invalid("ensemble has no members"));
    }
    let mut total = 0.0;
    for m in models {
        total += m.score(x)?;
    }
    Ok(total / models.len() as f64)
}

#[derive(Debug, Clone)]
pub struct Ensemble {
    pub members: Vec<NetworkModel>,
}

impl Ensemble {
    pub fn new(members: Vec<NetworkModel>) -> Result<Self> {
        let Some(first) = members.first() else {
            return Err(Error::invalid("ensemble has no members"));
        };
        let d = first.input_dim();
        if let Some(m) = members.iter().find(|m| m.input_dim() != d) {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: m.input_dim(),
            });
        }
        Ok(Self { members })
    }
}

impl Scorer for Ensemble {
    fn input_dim(&self) -> usize {
        self.members[0].input_dim()
    }

    fn score(&self, x: &[f64]) -> Result<f64> {
        ensemble_score(&self.members, x)
    }
}

/// Random perturbation helper used by gradient checks.
pub fn random_parameters(arch: &Architecture, rng: &mut impl Rng, scale: f64) -> Vec<f64> {
    (0..arch.param_count())
        .map(|_| scale * (2.0 * rng.random::<f64>() - 1.0))
        .collect()
}
