//! One function per experiment. Each returns long-format rows plus any
//! side artifacts; nothing here touches the filesystem.

use std::collections::BTreeMap;

use anyhow::{Context, Result};
use rayon::prelude::*;

use eqsep::data::{
    gen_circles_ad, gen_gaussians2d_split, gen_linear1_split, gen_logic, CirclesConfig, Gate,
    Gaussians2dConfig, LabeledDataset, Linear1Config,
};
use eqsep::geometry::{
    closing_probe, lrt_equivalence_check, roots_of_unity, shatter_search, shatter_search_margin,
    strict_es_witness_2d, Family, ProbeConfig, Verdict,
};
use eqsep::kernel::{default_gamma, fit_kernel_es};
use eqsep::linear::fit_linear_es;
use eqsep::metrics::{anomaly_aupr, heatmap_grid, normal_aupr, separation_report, Bounds, Grid};
use eqsep::model::Polarity;
use eqsep::network::{train, Activation, Architecture, Ensemble, Head, NetworkModel};
use eqsep::optim::OptimConfig;
use eqsep::rng::{seeded, uniform};
use eqsep::units::{BumpParams, LossKind};
use eqsep::Scorer;

use crate::config::{
    CirclesParams, ClosingParams, GateParams, HeadKind, HeatmapParams, HiddenKind, Linear1Params,
    Linear2Params, LrtParams, Params, RunConfig, VcdimParams,
};

/// One value in the long-format results table.
#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub condition: String,
    /// A seed, or a label such as `all` for rows that pool every seed.
    pub seed: String,
    pub metric: String,
    pub value: f64,
}

impl Row {
    fn new(condition: impl Into<String>, seed: u64, metric: &str, value: f64) -> Self {
        Self::labeled(condition, seed.to_string(), metric, value)
    }

    fn labeled(
        condition: impl Into<String>,
        seed: impl Into<String>,
        metric: &str,
        value: f64,
    ) -> Self {
        Self {
            condition: condition.into(),
            seed: seed.into(),
            metric: metric.to_string(),
            value,
        }
    }
}

/// Everything a run produces.
#[derive(Debug, Default)]
pub struct Outcome {
    pub rows: Vec<Row>,
    /// Trained networks per condition, for ensemble reload.
    pub models: Vec<(String, Vec<NetworkModel>)>,
    /// Score grids keyed by file stem.
    pub grids: Vec<(String, Grid)>,
    /// Structured text records, one per closing probe.
    pub probe_records: Vec<String>,
}

pub fn execute(cfg: &RunConfig) -> Result<Outcome> {
    match &cfg.params {
        Params::Xor(p) => gate_runs(cfg, p, &[Gate::Xor], &[Polarity::InsidePositive]),
        Params::Logic(p) => {
            let mut out = gate_runs(
                cfg,
                p,
                &[Gate::And, Gate::Or, Gate::Xor],
                &[Polarity::InsidePositive, Polarity::OutsidePositive],
            )?;
            out.rows.extend(gate_witnesses()?);
            Ok(out)
        }
        Params::Linear1(p) => linear1(cfg, p),
        Params::Linear2(p) => linear2(cfg, p),
        Params::Circles(p) => circles(cfg, p),
        Params::Heatmap(p) => heatmap(cfg, p),
        Params::Closing(p) => closing(cfg, p),
        Params::Vcdim(p) => vcdim(cfg, p),
        Params::Lrt(p) => lrt(cfg, p),
    }
}

/// Runs `f` for every seed, sequentially or on the rayon pool, and returns
/// the results in seed order either way.
fn per_seed<T, F>(cfg: &RunConfig, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(u64) -> Result<T> + Sync,
{
    let run = |&seed: &u64| f(seed).with_context(|| format!("seed {seed}"));
    if cfg.parallel {
        cfg.seeds.par_iter().map(run).collect()
    } else {
        cfg.seeds.iter().map(run).collect()
    }
}

fn rows_only(chunks: Vec<Vec<Row>>) -> Outcome {
    Outcome {
        rows: chunks.into_iter().flatten().collect(),
        ..Outcome::default()
    }
}

fn flag(b: bool) -> f64 {
    if b {
        1.0
    } else {
        0.0
    }
}

fn polarity_name(p: Polarity) -> &'static str {
    match p {
        Polarity::InsidePositive => "inside",
        Polarity::OutsidePositive => "outside",
    }
}

fn gate_runs(
    cfg: &RunConfig,
    p: &GateParams,
    gates: &[Gate],
    polarities: &[Polarity],
) -> Result<Outcome> {
    let bump = BumpParams::centered(p.sigma)?;
    let chunks = per_seed(cfg, |seed| {
        let mut rows = Vec::new();
        for &gate in gates {
            let data = gen_logic(gate);
            for &polarity in polarities {
                for &loss in &p.losses {
                    let opt = OptimConfig::bfgs(p.max_iterations, seed);
                    let (model, trace) = fit_linear_es(&data, bump, loss, polarity, &opt, None)?;
                    let wrong = model.misclassified(&data)?;
                    let cond = if polarities.len() == 1 {
                        format!("{}/{loss}", gate.name())
                    } else {
                        format!("{}/{}/{loss}", gate.name(), polarity_name(polarity))
                    };
                    rows.push(Row::new(
                        &cond,
                        seed,
                        "correct",
                        (data.len() - wrong) as f64,
                    ));
                    rows.push(Row::new(&cond, seed, "solved", flag(wrong == 0)));
                    rows.push(Row::new(&cond, seed, "final_loss", trace.final_loss()));
                    rows.push(Row::new(&cond, seed, "iterations", trace.iterations as f64));
                }
            }
        }
        Ok(rows)
    })?;
    Ok(rows_only(chunks))
}

/// Exact strict separators for each gate, independent of training.
fn gate_witnesses() -> Result<Vec<Row>> {
    let mut rows = Vec::new();
    for gate in [Gate::And, Gate::Or, Gate::Xor] {
        let data = gen_logic(gate);
        let pts: Vec<[f64; 2]> = data.rows().map(|r| [r[0], r[1]]).collect();
        let labels: Vec<bool> = data.labels().iter().map(|&l| l == 1).collect();
        let witness = strict_es_witness_2d(&pts, &labels)?;
        let cond = format!("{}/witness", gate.name());
        rows.push(Row::labeled(
            &cond,
            "exact",
            "feasible",
            flag(witness.is_some()),
        ));
        if let Some((_, _, polarity)) = witness {
            rows.push(Row::labeled(
                &cond,
                "exact",
                "outside_polarity",
                flag(polarity == Polarity::OutsidePositive),
            ));
        }
    }
    Ok(rows)
}

fn scores_of(scorer: &dyn Scorer, data: &LabeledDataset) -> Result<Vec<f64>> {
    Ok(data
        .rows()
        .map(|x| scorer.score(x))
        .collect::<eqsep::Result<Vec<f64>>>()?)
}

fn push_auprs(
    rows: &mut Vec<Row>,
    cond: &str,
    seed: u64,
    prefix: &str,
    scores: &[f64],
    data: &LabeledDataset,
) -> Result<()> {
    rows.push(Row::new(
        cond,
        seed,
        &format!("{prefix}normal_aupr"),
        normal_aupr(scores, data.labels())?,
    ));
    rows.push(Row::new(
        cond,
        seed,
        &format!("{prefix}anomaly_aupr"),
        anomaly_aupr(scores, data.labels())?,
    ));
    Ok(())
}

fn fmt_num(v: f64) -> String {
    format!("{v}")
}

/// In-sample AUPR is the primary score; a fresh draw from the same plane is
/// reported under `heldout_*`.
fn linear1(cfg: &RunConfig, p: &Linear1Params) -> Result<Outcome> {
    let bump = BumpParams::centered(p.sigma)?;
    let chunks = per_seed(cfg, |seed| {
        let mut rows = Vec::new();
        for &dim in &p.dims {
            for &noise in &p.noise_std {
                let data_cfg = Linear1Config {
                    dim,
                    noise_std: noise,
                    m: p.m,
                    pos_ratio: p.pos_ratio,
                };
                let (train_set, heldout) = gen_linear1_split(&data_cfg, seed)?;
                for &loss in &p.losses {
                    let opt = OptimConfig::bfgs(p.max_iterations, seed);
                    let (model, trace) = fit_linear_es(
                        &train_set,
                        bump,
                        loss,
                        Polarity::InsidePositive,
                        &opt,
                        None,
                    )?;
                    let cond = format!("dim={dim}/noise={}/{loss}", fmt_num(noise));
                    push_auprs(
                        &mut rows,
                        &cond,
                        seed,
                        "",
                        &scores_of(&model, &train_set)?,
                        &train_set,
                    )?;
                    push_auprs(
                        &mut rows,
                        &cond,
                        seed,
                        "heldout_",
                        &scores_of(&model, &heldout)?,
                        &heldout,
                    )?;
                    rows.push(Row::new(&cond, seed, "final_loss", trace.final_loss()));
                }
            }
        }
        Ok(rows)
    })?;
    Ok(rows_only(chunks))
}

fn linear2(cfg: &RunConfig, p: &Linear2Params) -> Result<Outcome> {
    let bump = BumpParams::centered(p.sigma)?;
    let chunks = per_seed(cfg, |seed| {
        let mut rows = Vec::new();
        for &k in &p.noise_multipliers {
            let data_cfg = Gaussians2dConfig {
                noise_multiplier: k,
                m: p.m,
                pos_ratio: p.pos_ratio,
            };
            let (train_set, test_set) = gen_gaussians2d_split(&data_cfg, seed)?;
            for &loss in &p.losses {
                let opt = OptimConfig::bfgs(p.max_iterations, seed);
                let (model, trace) =
                    fit_linear_es(&train_set, bump, loss, Polarity::InsidePositive, &opt, None)?;
                let cond = format!("nm={}/{loss}", fmt_num(k));
                push_auprs(
                    &mut rows,
                    &cond,
                    seed,
                    "",
                    &scores_of(&model, &test_set)?,
                    &test_set,
                )?;
                push_auprs(
                    &mut rows,
                    &cond,
                    seed,
                    "train_",
                    &scores_of(&model, &train_set)?,
                    &train_set,
                )?;
                rows.push(Row::new(&cond, seed, "final_loss", trace.final_loss()));
            }
        }
        Ok(rows)
    })?;
    Ok(rows_only(chunks))
}

/// Condition label of one network cell, e.g. `es-bump/ll`.
pub fn cell_name(head: HeadKind, hidden: HiddenKind, loss: LossKind) -> String {
    format!("{}-{}/{loss}", head.name(), hidden.name())
}

pub fn architecture(
    p: &CirclesParams,
    input_dim: usize,
    head: HeadKind,
    hidden: HiddenKind,
) -> Result<Architecture> {
    let act = match hidden {
        HiddenKind::Lrelu => Activation::leaky_relu(),
        HiddenKind::Bump => Activation::Bump {
            sigma: p.hidden_sigma,
            learnable: p.learnable_sigma,
        },
        HiddenKind::Rbf => Activation::rbf(),
    };
    let head = match head {
        HeadKind::Hs => Head::Halfspace,
        HeadKind::Es => Head::equality(),
        HeadKind::Rs => Head::rbf(),
    };
    Ok(Architecture::uniform(
        input_dim, p.depth, p.width, act, head,
    )?)
}

pub fn network_config(p: &CirclesParams, seed: u64) -> OptimConfig {
    OptimConfig {
        learning_rate: p.learning_rate,
        patience: p.patience,
        validation_fraction: p.validation_fraction,
        batch_size: Some(p.batch_size),
        split_seed: Some(p.data_seed),
        ..OptimConfig::adam(p.epochs, seed)
    }
}

struct CirclesRun {
    outcome: Outcome,
    /// Shallow machines per seed, kept for heatmaps.
    kernels: Vec<(u64, eqsep::kernel::KernelMachine)>,
}

fn circles_run(cfg: &RunConfig, p: &CirclesParams) -> Result<CirclesRun> {
    let (train_set, test_set) = gen_circles_ad(&CirclesConfig::default(), p.data_seed)?;
    let cells: Vec<(HeadKind, HiddenKind, LossKind)> = p
        .heads
        .iter()
        .flat_map(|&h| {
            p.hidden
                .iter()
                .flat_map(move |&a| p.losses.iter().map(move |&l| (h, a, l)))
        })
        .collect();
    let per = per_seed(cfg, |seed| {
        let mut rows = Vec::new();
        let mut kernel = None;
        if p.shallow {
            let gamma = default_gamma(&train_set)?;
            let bump = BumpParams::centered(p.kernel_sigma)?;
            let opt = OptimConfig::bfgs(p.kernel_iterations, seed);
            let (machine, trace) = fit_kernel_es(&train_set, gamma, bump, p.kernel_loss, &opt)?;
            let cond = format!("kernel-es/{}", p.kernel_loss);
            let scores = scores_of(&machine, &test_set)?;
            push_auprs(&mut rows, &cond, seed, "", &scores, &test_set)?;
            let sep = separation_report(&scores, None, test_set.labels())?;
            rows.push(Row::new(&cond, seed, "score_gap", sep.score_gap()));
            rows.push(Row::new(&cond, seed, "final_loss", trace.final_loss()));
            kernel = Some(machine);
        }
        let mut models = Vec::with_capacity(cells.len());
        for &(head, hidden, loss) in &cells {
            let arch = architecture(p, 2, head, hidden)?;
            let init = NetworkModel::init(arch, seed);
            let (model, report) = train(&init, &train_set, loss, &network_config(p, seed))?;
            let cond = cell_name(head, hidden, loss);
            let scores = model.scores(&test_set)?;
            push_auprs(&mut rows, &cond, seed, "", &scores, &test_set)?;
            let distances: Option<Vec<f64>> = test_set
                .rows()
                .map(|x| model.head_distance(x))
                .collect::<eqsep::Result<Option<Vec<f64>>>>()?;
            let sep = separation_report(&scores, distances.as_deref(), test_set.labels())?;
            rows.push(Row::new(&cond, seed, "score_gap", sep.score_gap()));
            if let Some(ratio) = sep.distance_ratio() {
                rows.push(Row::new(&cond, seed, "distance_ratio", ratio));
            }
            rows.push(Row::new(&cond, seed, "epochs", report.epochs_run as f64));
            rows.push(Row::new(
                &cond,
                seed,
                "stopped_early",
                flag(report.stopped_early),
            ));
            for (layer, sigma) in model.layer_sigmas().iter().enumerate() {
                if let (Some(s), true) = (sigma, p.learnable_sigma) {
                    rows.push(Row::new(
                        &cond,
                        seed,
                        &format!("sigma_layer{}", layer + 1),
                        *s,
                    ));
                }
            }
            models.push(model);
        }
        Ok((rows, kernel.map(|k| (seed, k)), models))
    })?;

    let mut rows = Vec::new();
    let mut kernels = Vec::new();
    let mut by_cell: Vec<Vec<NetworkModel>> = vec![Vec::new(); cells.len()];
    for (r, k, models) in per {
        rows.extend(r);
        kernels.extend(k);
        for (slot, m) in by_cell.iter_mut().zip(models) {
            slot.push(m);
        }
    }
    let mut model_sets = Vec::with_capacity(cells.len());
    for (&(head, hidden, loss), members) in cells.iter().zip(by_cell) {
        let cond = cell_name(head, hidden, loss);
        if p.ensemble {
            let ensemble = Ensemble::new(members.clone())?;
            let scores = scores_of(&ensemble, &test_set)?;
            let econd = format!("{cond}/ensemble");
            rows.push(Row::labeled(
                &econd,
                "all",
                "normal_aupr",
                normal_aupr(&scores, test_set.labels())?,
            ));
            rows.push(Row::labeled(
                &econd,
                "all",
                "anomaly_aupr",
                anomaly_aupr(&scores, test_set.labels())?,
            ));
        }
        model_sets.push((cond, members));
    }
    Ok(CirclesRun {
        outcome: Outcome {
            rows,
            models: model_sets,
            ..Outcome::default()
        },
        kernels,
    })
}

fn circles(cfg: &RunConfig, p: &CirclesParams) -> Result<Outcome> {
    Ok(circles_run(cfg, p)?.outcome)
}

/// Mean score over `n` evenly spaced points on a circle of radius `r`.
pub fn ring_mean(scorer: &dyn Scorer, r: f64, n: usize) -> Result<f64> {
    let mut total = 0.0;
    for k in 0..n {
        let th = 2.0 * std::f64::consts::PI * k as f64 / n as f64;
        total += scorer.score(&[r * th.cos(), r * th.sin()])?;
    }
    Ok(total / n as f64)
}

fn ring_rows(rows: &mut Vec<Row>, cond: &str, seed: &str, scorer: &dyn Scorer) -> Result<()> {
    for (metric, r) in [("ring_0.5", 0.5), ("ring_1", 1.0), ("ring_2", 2.0)] {
        rows.push(Row::labeled(cond, seed, metric, ring_mean(scorer, r, 360)?));
    }
    rows.push(Row::labeled(
        cond,
        seed,
        "center",
        scorer.score(&[0.0, 0.0])?,
    ));
    Ok(())
}

/// Trains the circles models, then samples every model (and each ensemble)
/// on a square grid. Rows hold ring-averaged scores.
fn heatmap(cfg: &RunConfig, p: &HeatmapParams) -> Result<Outcome> {
    let run = circles_run(cfg, &p.circles)?;
    let bounds = Bounds::square(p.extent);
    let n = p.resolution;
    let mut out = Outcome::default();
    for (seed, machine) in &run.kernels {
        let cond = format!("kernel-es/{}", p.circles.kernel_loss);
        out.grids.push((
            format!("{}_seed{seed}", cond.replace('/', "_")),
            heatmap_grid(machine, bounds, n, n)?,
        ));
        ring_rows(&mut out.rows, &cond, &seed.to_string(), machine)?;
    }
    for (cond, members) in &run.outcome.models {
        let stem = cond.replace('/', "_");
        for (model, seed) in members.iter().zip(&cfg.seeds) {
            out.grids.push((
                format!("{stem}_seed{seed}"),
                heatmap_grid(model, bounds, n, n)?,
            ));
            ring_rows(&mut out.rows, cond, &seed.to_string(), model)?;
        }
        if p.circles.ensemble {
            let ensemble = Ensemble::new(members.clone())?;
            out.grids.push((
                format!("{stem}_ensemble"),
                heatmap_grid(&ensemble, bounds, n, n)?,
            ));
            ring_rows(&mut out.rows, &format!("{cond}/ensemble"), "all", &ensemble)?;
        }
    }
    out.models = run.outcome.models;
    Ok(out)
}

/// The hypothesis counts probed in dimension `n`.
pub fn closing_cells(n: usize) -> Vec<(Family, usize)> {
    let mut cells = vec![(Family::Rbf, 1), (Family::Equality, n)];
    if n > 1 {
        cells.push((Family::Equality, n - 1));
    }
    cells.push((Family::Halfspace { simplex: true }, n + 1));
    cells.push((Family::Halfspace { simplex: false }, n));
    cells
}

fn closing(cfg: &RunConfig, p: &ClosingParams) -> Result<Outcome> {
    let probe = ProbeConfig {
        radii: p.radii.clone(),
        samples_per_box: p.samples_per_box,
    };
    let per = per_seed(cfg, |seed| {
        let mut rows = Vec::new();
        let mut records = Vec::new();
        for &n in &p.dims {
            for (family, count) in closing_cells(n) {
                let report = closing_probe(family, n, count, seed, &probe)?;
                let cond = format!("{family}/n={n}/count={count}");
                for (metric, v) in [
                    ("bounded", Verdict::Bounded),
                    ("unbounded", Verdict::Unbounded),
                    ("empty", Verdict::Empty),
                    ("inconclusive", Verdict::Inconclusive),
                ] {
                    rows.push(Row::new(&cond, seed, metric, flag(report.verdict == v)));
                }
                let last = *report.volumes.last().expect("at least two radii");
                rows.push(Row::new(&cond, seed, "volume_first", report.volumes[0]));
                rows.push(Row::new(&cond, seed, "volume_last", last));
                records.push(format!("seed={seed} {}", report.to_record()));
            }
        }
        Ok((rows, records))
    })?;
    let mut out = Outcome::default();
    for (rows, records) in per {
        out.rows.extend(rows);
        out.probe_records.extend(records);
    }
    Ok(out)
}

/// Uniform points in `[-1, 1]²`; duplicates are redrawn.
pub fn random_points(seed: u64, m: usize) -> Vec<[f64; 2]> {
    let mut rng = seeded(seed, 0);
    let mut pts: Vec<[f64; 2]> = Vec::with_capacity(m);
    while pts.len() < m {
        let p = [uniform(&mut rng, -1.0, 1.0), uniform(&mut rng, -1.0, 1.0)];
        if !pts.contains(&p) {
            pts.push(p);
        }
    }
    pts
}

fn vcdim(cfg: &RunConfig, p: &VcdimParams) -> Result<Outcome> {
    let mut rows = Vec::new();
    let roots = roots_of_unity(p.roots);
    let strict = shatter_search(&roots)?;
    let margin = shatter_search_margin(&roots, p.eps)?;
    for (cond, report) in [
        (format!("roots{}/strict", p.roots), &strict),
        (format!("roots{}/eps={}", p.roots, p.eps), &margin),
    ] {
        rows.push(Row::labeled(
            &cond,
            "exact",
            "shattered",
            flag(report.shattered),
        ));
        let feasible = report.feasible.iter().filter(|&&f| f).count();
        rows.push(Row::labeled(
            &cond,
            "exact",
            "feasible_labelings",
            feasible as f64,
        ));
    }
    let chunks = per_seed(cfg, |seed| {
        let report = shatter_search(&random_points(seed, p.random_points))?;
        let cond = format!("random{}/strict", p.random_points);
        let feasible = report.feasible.iter().filter(|&&f| f).count();
        Ok(vec![
            Row::new(&cond, seed, "shattered", flag(report.shattered)),
            Row::new(&cond, seed, "witness_found", flag(report.witness.is_some())),
            Row::new(&cond, seed, "feasible_labelings", feasible as f64),
        ])
    })?;
    rows.extend(chunks.into_iter().flatten());
    Ok(Outcome {
        rows,
        ..Outcome::default()
    })
}

fn lrt(cfg: &RunConfig, p: &LrtParams) -> Result<Outcome> {
    let chunks = per_seed(cfg, |seed| {
        let r = lrt_equivalence_check(seed, p.trials, p.samples)?;
        let cond = format!("trials={}/samples={}", p.trials, p.samples);
        Ok(vec![
            Row::new(&cond, seed, "agreements", r.agreements as f64),
            Row::new(&cond, seed, "disagreements", r.disagreements as f64),
            Row::new(&cond, seed, "skipped", r.skipped as f64),
            Row::new(&cond, seed, "passed", flag(r.passed())),
        ])
    })?;
    Ok(rows_only(chunks))
}

/// Mean and population standard deviation of one (condition, metric) group.
#[derive(Debug, Clone, PartialEq)]
pub struct Aggregate {
    pub condition: String,
    pub metric: String,
    pub n: usize,
    pub mean: f64,
    pub std: f64,
}

/// Groups rows by (condition, metric) in order of first appearance.
pub fn aggregate(rows: &[Row]) -> Vec<Aggregate> {
    let mut order: Vec<(String, String)> = Vec::new();
    let mut groups: BTreeMap<(String, String), Vec<f64>> = BTreeMap::new();
    for r in rows {
        let key = (r.condition.clone(), r.metric.clone());
        let slot = groups.entry(key.clone()).or_insert_with(|| {
            order.push(key);
            Vec::new()
        });
        slot.push(r.value);
    }
    order
        .into_iter()
        .map(|key| {
            let v = &groups[&key];
            let n = v.len();
            let mean = v.iter().sum::<f64>() / n as f64;
            let var = v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n as f64;
            Aggregate {
                condition: key.0,
                metric: key.1,
                n,
                mean,
                std: var.sqrt(),
            }
        })
        .collect()
}
