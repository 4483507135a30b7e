//! Experiment configuration: raw settings from flags or a TOML file, and the
//! fully resolved form echoed into every run manifest.

use std::fmt;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::ValueEnum;
use eqsep::units::LossKind;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Experiment {
    Xor,
    Logic,
    Linear1,
    Linear2,
    Circles,
    Closing,
    Vcdim,
    Lrt,
    Heatmap,
}

impl Experiment {
    pub fn name(self) -> &'static str {
        match self {
            Experiment::Xor => "xor",
            Experiment::Logic => "logic",
            Experiment::Linear1 => "linear1",
            Experiment::Linear2 => "linear2",
            Experiment::Circles => "circles",
            Experiment::Closing => "closing",
            Experiment::Vcdim => "vcdim",
            Experiment::Lrt => "lrt",
            Experiment::Heatmap => "heatmap",
        }
    }

    fn default_seed_count(self) -> usize {
        match self {
            Experiment::Closing | Experiment::Vcdim => 100,
            Experiment::Lrt => 1,
            _ => 20,
        }
    }

    /// Override keys that mean something for this experiment.
    fn accepted_keys(self) -> &'static [&'static str] {
        const LINEAR: &[&str] = &["loss", "sigma", "epochs"];
        const NETWORK: &[&str] = &[
            "heads",
            "hidden",
            "loss",
            "sigma",
            "epochs",
            "width",
            "depth",
            "batch_size",
            "learning_rate",
            "patience",
            "validation_fraction",
            "hidden_sigma",
            "learnable_sigma",
            "data_seed",
            "shallow",
            "ensemble",
        ];
        match self {
            Experiment::Xor | Experiment::Logic => LINEAR,
            Experiment::Linear1 => &["loss", "sigma", "epochs", "dims", "noise"],
            Experiment::Linear2 => &["loss", "sigma", "epochs", "noise"],
            Experiment::Circles => NETWORK,
            Experiment::Heatmap => &[
                "heads",
                "hidden",
                "loss",
                "sigma",
                "epochs",
                "width",
                "depth",
                "batch_size",
                "learning_rate",
                "patience",
                "validation_fraction",
                "hidden_sigma",
                "learnable_sigma",
                "data_seed",
                "shallow",
                "ensemble",
                "resolution",
                "extent",
            ],
            Experiment::Closing => &["dims", "samples", "radii"],
            Experiment::Vcdim => &["eps"],
            Experiment::Lrt => &["trials", "samples"],
        }
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum HeadKind {
    /// Sigmoid output.
    Hs,
    /// Bump output.
    Es,
    /// RBF output.
    Rs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum HiddenKind {
    Lrelu,
    Bump,
    Rbf,
}

impl HeadKind {
    pub fn name(self) -> &'static str {
        match self {
            HeadKind::Hs => "hs",
            HeadKind::Es => "es",
            HeadKind::Rs => "rs",
        }
    }
}

impl HiddenKind {
    pub fn name(self) -> &'static str {
        match self {
            HiddenKind::Lrelu => "lrelu",
            HiddenKind::Bump => "bump",
            HiddenKind::Rbf => "rbf",
        }
    }
}

/// Raw, partially specified settings. Every field is optional; unknown keys
/// are rejected when parsing a file or a `--set` fragment.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Settings {
    pub experiment: Option<Experiment>,
    pub out: Option<PathBuf>,
    pub base_seed: Option<u64>,
    pub seeds: Option<usize>,
    pub seed_list: Option<Vec<u64>>,
    pub parallel: Option<bool>,

    pub dims: Option<Vec<usize>>,
    pub noise: Option<Vec<f64>>,
    pub heads: Option<Vec<HeadKind>>,
    pub hidden: Option<Vec<HiddenKind>>,
    pub loss: Option<Vec<LossKind>>,
    pub sigma: Option<f64>,
    pub epochs: Option<usize>,

    pub width: Option<usize>,
    pub depth: Option<usize>,
    pub batch_size: Option<usize>,
    pub learning_rate: Option<f64>,
    pub patience: Option<usize>,
    pub validation_fraction: Option<f64>,
    pub hidden_sigma: Option<f64>,
    pub learnable_sigma: Option<bool>,
    pub data_seed: Option<u64>,
    pub shallow: Option<bool>,
    pub ensemble: Option<bool>,
    pub resolution: Option<usize>,
    pub extent: Option<f64>,

    pub samples: Option<usize>,
    pub radii: Option<Vec<f64>>,
    pub trials: Option<usize>,
    pub eps: Option<f64>,
}

macro_rules! merge_fields {
    ($dst:ident, $src:ident; $($f:ident),* $(,)?) => {
        $( if $src.$f.is_some() { $dst.$f = $src.$f; } )*
    };
}

impl Settings {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| anyhow::anyhow!("invalid config: {}", e.message()))
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        Self::from_toml(&text).with_context(|| format!("in {}", path.display()))
    }

    /// Parses `key=value` where the value uses TOML syntax.
    pub fn from_assignment(assign: &str) -> Result<Self> {
        let Some((key, value)) = assign.split_once('=') else {
            bail!("expected key=value, got {assign:?}");
        };
        let key = key.trim().replace('-', "_");
        let value = value.trim();
        let literal = |v: &str| {
            let v = v.trim();
            if toml::from_str::<toml::Table>(&format!("v = {v}")).is_ok() {
                v.to_string()
            } else {
                format!("{v:?}")
            }
        };
        let list: Vec<String> = value.split(',').map(literal).collect();
        Self::from_toml(&format!("{key} = {}", literal(value)))
            .or_else(|_| Self::from_toml(&format!("{key} = [{}]", list.join(", "))))
            .with_context(|| format!("in --set {assign}"))
    }

    /// Fields set in `other` replace those in `self`.
    pub fn merge(mut self, other: Settings) -> Self {
        merge_fields!(self, other;
            experiment, out, base_seed, seeds, seed_list, parallel, dims, noise, heads, hidden,
            loss, sigma, epochs, width, depth, batch_size, learning_rate, patience,
            validation_fraction, hidden_sigma, learnable_sigma, data_seed, shallow, ensemble,
            resolution, extent, samples, radii, trials, eps);
        self
    }

    fn set_keys(&self) -> Vec<&'static str> {
        let mut keys = Vec::new();
        macro_rules! check {
            ($($f:ident),*) => { $( if self.$f.is_some() { keys.push(stringify!($f)); } )* };
        }
        check!(
            dims,
            noise,
            heads,
            hidden,
            loss,
            sigma,
            epochs,
            width,
            depth,
            batch_size,
            learning_rate,
            patience,
            validation_fraction,
            hidden_sigma,
            learnable_sigma,
            data_seed,
            shallow,
            ensemble,
            resolution,
            extent,
            samples,
            radii,
            trials,
            eps
        );
        keys
    }
}

/// Linear fits on the logic gates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GateParams {
    pub sigma: f64,
    pub losses: Vec<LossKind>,
    pub max_iterations: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Linear1Params {
    pub dims: Vec<usize>,
    pub noise_std: Vec<f64>,
    pub sigma: f64,
    pub losses: Vec<LossKind>,
    pub max_iterations: usize,
    pub m: usize,
    pub pos_ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Linear2Params {
    pub noise_multipliers: Vec<f64>,
    pub sigma: f64,
    pub losses: Vec<LossKind>,
    pub max_iterations: usize,
    pub m: usize,
    pub pos_ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CirclesParams {
    pub data_seed: u64,
    pub heads: Vec<HeadKind>,
    pub hidden: Vec<HiddenKind>,
    pub losses: Vec<LossKind>,
    pub epochs: usize,
    pub width: usize,
    pub depth: usize,
    pub batch_size: usize,
    pub learning_rate: f64,
    pub patience: usize,
    pub validation_fraction: f64,
    pub hidden_sigma: f64,
    pub learnable_sigma: bool,
    pub ensemble: bool,
    /// Also fit the shallow kernel equality separator.
    pub shallow: bool,
    pub kernel_sigma: f64,
    pub kernel_loss: LossKind,
    pub kernel_iterations: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HeatmapParams {
    pub circles: CirclesParams,
    pub resolution: usize,
    /// Grids cover `[-extent, extent]²`.
    pub extent: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClosingParams {
    pub dims: Vec<usize>,
    pub radii: Vec<f64>,
    pub samples_per_box: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VcdimParams {
    pub roots: usize,
    pub random_points: usize,
    pub eps: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LrtParams {
    pub trials: usize,
    pub samples: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "experiment", rename_all = "lowercase")]
pub enum Params {
    Xor(GateParams),
    Logic(GateParams),
    Linear1(Linear1Params),
    Linear2(Linear2Params),
    Circles(CirclesParams),
    Closing(ClosingParams),
    Vcdim(VcdimParams),
    Lrt(LrtParams),
    Heatmap(HeatmapParams),
}

/// Everything a run needs; serialized verbatim into the manifest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub seeds: Vec<u64>,
    pub parallel: bool,
    #[serde(flatten)]
    pub params: Params,
}

impl RunConfig {
    pub fn experiment(&self) -> Experiment {
        match self.params {
            Params::Xor(_) => Experiment::Xor,
            Params::Logic(_) => Experiment::Logic,
            Params::Linear1(_) => Experiment::Linear1,
            Params::Linear2(_) => Experiment::Linear2,
            Params::Circles(_) => Experiment::Circles,
            Params::Closing(_) => Experiment::Closing,
            Params::Vcdim(_) => Experiment::Vcdim,
            Params::Lrt(_) => Experiment::Lrt,
            Params::Heatmap(_) => Experiment::Heatmap,
        }
    }

    pub fn default_for(experiment: Experiment) -> Self {
        resolve(&Settings {
            experiment: Some(experiment),
            ..Settings::default()
        })
        .expect("defaults resolve")
    }
}

fn positive(name: &str, v: f64) -> Result<f64> {
    if !(v > 0.0) || !v.is_finite() {
        bail!("{name} must be a positive number, got {v}");
    }
    Ok(v)
}

fn nonempty<T>(name: &str, v: Vec<T>) -> Result<Vec<T>> {
    if v.is_empty() {
        bail!("{name} must not be empty");
    }
    Ok(v)
}

fn circles_params(s: &Settings) -> Result<CirclesParams> {
    let p = CirclesParams {
        data_seed: s.data_seed.or(s.base_seed).unwrap_or(0),
        heads: nonempty(
            "heads",
            s.heads
                .clone()
                .unwrap_or(vec![HeadKind::Hs, HeadKind::Es, HeadKind::Rs]),
        )?,
        hidden: nonempty(
            "hidden",
            s.hidden
                .clone()
                .unwrap_or(vec![HiddenKind::Lrelu, HiddenKind::Bump, HiddenKind::Rbf]),
        )?,
        losses: nonempty("loss", s.loss.clone().unwrap_or(vec![LossKind::Logistic]))?,
        epochs: s.epochs.unwrap_or(1000),
        width: s.width.unwrap_or(5),
        depth: s.depth.unwrap_or(2),
        batch_size: s.batch_size.unwrap_or(32),
        learning_rate: positive("learning_rate", s.learning_rate.unwrap_or(1e-3))?,
        patience: s.patience.unwrap_or(10),
        validation_fraction: s.validation_fraction.unwrap_or(0.1),
        hidden_sigma: positive("hidden_sigma", s.hidden_sigma.unwrap_or(0.5))?,
        learnable_sigma: s.learnable_sigma.unwrap_or(false),
        ensemble: s.ensemble.unwrap_or(true),
        shallow: s.shallow.unwrap_or(true),
        kernel_sigma: positive("sigma", s.sigma.unwrap_or(10.0))?,
        kernel_loss: LossKind::Mse,
        kernel_iterations: s.epochs.unwrap_or(1000),
    };
    if p.epochs == 0 || p.width == 0 || p.depth == 0 || p.batch_size == 0 {
        bail!("epochs, width, depth and batch_size must be positive");
    }
    if !(0.0..1.0).contains(&p.validation_fraction) {
        bail!("validation_fraction must be in [0, 1)");
    }
    Ok(p)
}

/// Fills in defaults for the chosen experiment and validates the result.
pub fn resolve(s: &Settings) -> Result<RunConfig> {
    let Some(experiment) = s.experiment else {
        bail!("no experiment given");
    };
    let stray: Vec<&str> = s
        .set_keys()
        .into_iter()
        .filter(|k| !experiment.accepted_keys().contains(k))
        .collect();
    if !stray.is_empty() {
        bail!(
            "{} does not apply to experiment {experiment}",
            stray.join(", ")
        );
    }
    let base = s.base_seed.unwrap_or(0);
    let seeds = match (&s.seed_list, s.seeds) {
        (Some(_), Some(_)) => bail!("give either seeds or seed_list, not both"),
        (Some(list), None) => nonempty("seed_list", list.clone())?,
        (None, count) => {
            let count = count.unwrap_or(experiment.default_seed_count());
            if count == 0 {
                bail!("seeds must be positive");
            }
            (base..base + count as u64).collect()
        }
    };
    let sigma = positive("sigma", s.sigma.unwrap_or(10.0))?;
    let iterations = s.epochs.unwrap_or(1000);
    if iterations == 0 {
        bail!("epochs must be positive");
    }
    let linear_losses =
        |default: Vec<LossKind>| nonempty("loss", s.loss.clone().unwrap_or(default));
    let params = match experiment {
        Experiment::Xor | Experiment::Logic => {
            let p = GateParams {
                sigma,
                losses: linear_losses(vec![LossKind::Mse, LossKind::Logistic])?,
                max_iterations: iterations,
            };
            if experiment == Experiment::Xor {
                Params::Xor(p)
            } else {
                Params::Logic(p)
            }
        }
        Experiment::Linear1 => {
            let dims = nonempty("dims", s.dims.clone().unwrap_or(vec![5, 10, 20, 35]))?;
            if dims.iter().any(|&d| d < 2) {
                bail!("linear1 dims must be >= 2");
            }
            let noise = nonempty("noise", s.noise.clone().unwrap_or(vec![0.0, 1.0, 2.0]))?;
            if noise.iter().any(|&v| !(v >= 0.0)) {
                bail!("noise levels must be >= 0");
            }
            Params::Linear1(Linear1Params {
                dims,
                noise_std: noise,
                sigma,
                losses: linear_losses(vec![LossKind::Mse])?,
                max_iterations: iterations,
                m: 100,
                pos_ratio: 0.9,
            })
        }
        Experiment::Linear2 => {
            let noise = nonempty(
                "noise",
                s.noise
                    .clone()
                    .unwrap_or(vec![1.0, 4.0, 7.0, 10.0, 13.0, 16.0, 19.0]),
            )?;
            for &k in &noise {
                positive("noise multiplier", k)?;
            }
            Params::Linear2(Linear2Params {
                noise_multipliers: noise,
                sigma,
                losses: linear_losses(vec![LossKind::Mse])?,
                max_iterations: iterations,
                m: 100,
                pos_ratio: 0.9,
            })
        }
        Experiment::Circles => Params::Circles(circles_params(s)?),
        Experiment::Heatmap => {
            let resolution = s.resolution.unwrap_or(60);
            if resolution == 0 {
                bail!("resolution must be positive");
            }
            Params::Heatmap(HeatmapParams {
                circles: circles_params(s)?,
                resolution,
                extent: positive("extent", s.extent.unwrap_or(2.5))?,
            })
        }
        Experiment::Closing => {
            let defaults = eqsep::geometry::ProbeConfig::default();
            let dims = nonempty("dims", s.dims.clone().unwrap_or(vec![2, 3]))?;
            if let Some(&d) = dims
                .iter()
                .find(|&&d| d == 0 || d > eqsep::geometry::MAX_PROBE_DIM)
            {
                bail!(
                    "closing dims must be in 1..={}, got {d}",
                    eqsep::geometry::MAX_PROBE_DIM
                );
            }
            let radii = s.radii.clone().unwrap_or(defaults.radii);
            if radii.len() < 2 || radii[0] <= 0.0 || radii.windows(2).any(|w| w[1] <= w[0]) {
                bail!("radii need at least two positive, strictly increasing values");
            }
            let samples = s.samples.unwrap_or(defaults.samples_per_box);
            if samples == 0 {
                bail!("samples must be positive");
            }
            Params::Closing(ClosingParams {
                dims,
                radii,
                samples_per_box: samples,
            })
        }
        Experiment::Vcdim => Params::Vcdim(VcdimParams {
            roots: 5,
            random_points: 6,
            eps: positive("eps", s.eps.unwrap_or(1e-6))?,
        }),
        Experiment::Lrt => {
            let (trials, samples) = (s.trials.unwrap_or(100), s.samples.unwrap_or(10_000));
            if trials == 0 || samples == 0 {
                bail!("trials and samples must be positive");
            }
            Params::Lrt(LrtParams { trials, samples })
        }
    };
    Ok(RunConfig {
        seeds,
        parallel: s.parallel.unwrap_or(false),
        params,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_file_keys_are_rejected() {
        let err = Settings::from_toml("experiment = \"xor\"\nlearning_rat = 0.1\n").unwrap_err();
        assert!(err.to_string().contains("learning_rat"), "{err}");
    }

    #[test]
    fn keys_foreign_to_the_experiment_are_rejected() {
        let s = Settings::from_toml("experiment = \"xor\"\ndims = [5]\n").unwrap();
        let err = resolve(&s).unwrap_err();
        assert!(err.to_string().contains("dims"), "{err}");
    }

    #[test]
    fn assignments_accept_bare_and_list_values() {
        assert_eq!(
            Settings::from_assignment("epochs=5").unwrap().epochs,
            Some(5)
        );
        assert_eq!(
            Settings::from_assignment("heads=es,hs").unwrap().heads,
            Some(vec![HeadKind::Es, HeadKind::Hs])
        );
        assert_eq!(
            Settings::from_assignment("hidden=bump").unwrap().hidden,
            Some(vec![HiddenKind::Bump])
        );
        assert_eq!(
            Settings::from_assignment("noise=0,1.5").unwrap().noise,
            Some(vec![0.0, 1.5])
        );
        assert!(Settings::from_assignment("nope=1").is_err());
        assert!(Settings::from_assignment("epochs").is_err());
    }

    #[test]
    fn seeds_default_and_base() {
        let cfg = RunConfig::default_for(Experiment::Linear1);
        assert_eq!(cfg.seeds, (0..20).collect::<Vec<u64>>());
        let s = Settings {
            experiment: Some(Experiment::Lrt),
            base_seed: Some(7),
            ..Default::default()
        };
        assert_eq!(resolve(&s).unwrap().seeds, vec![7]);
        let both = Settings {
            experiment: Some(Experiment::Lrt),
            seeds: Some(2),
            seed_list: Some(vec![1]),
            ..Default::default()
        };
        assert!(resolve(&both).is_err());
    }

    #[test]
    fn later_settings_win() {
        let a = Settings {
            epochs: Some(3),
            sigma: Some(1.0),
            ..Default::default()
        };
        let b = Settings {
            epochs: Some(9),
            ..Default::default()
        };
        let m = a.merge(b);
        assert_eq!((m.epochs, m.sigma), (Some(9), Some(1.0)));
    }

    #[test]
    fn resolved_config_round_trips_through_json() {
        for e in Experiment::value_variants() {
            let cfg = RunConfig::default_for(*e);
            let text = serde_json::to_string(&cfg).unwrap();
            let back: RunConfig = serde_json::from_str(&text).unwrap();
            assert_eq!(back, cfg);
        }
    }
}
