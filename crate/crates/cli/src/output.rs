//! Run directories: `results.csv`, `manifest.json` and side artifacts.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};

use crate::config::RunConfig;
use crate::experiments::{aggregate, execute, Aggregate, Outcome, Row};

pub const RESULTS_FILE: &str = "results.csv";
pub const MANIFEST_FILE: &str = "manifest.json";
pub const RESULTS_HEADER: [&str; 5] = ["experiment", "condition", "seed", "metric", "value"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub tool: String,
    pub version: String,
    pub config: RunConfig,
    /// Paths relative to the run directory.
    pub artifacts: Vec<String>,
}

/// Executes `cfg` and writes everything under `dir`.
pub fn run_to_dir(cfg: &RunConfig, dir: &Path) -> Result<Outcome> {
    let outcome = execute(cfg)?;
    write_run(cfg, &outcome, dir)?;
    Ok(outcome)
}

pub fn write_run(cfg: &RunConfig, outcome: &Outcome, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let experiment = cfg.experiment().name();
    write_results(&dir.join(RESULTS_FILE), experiment, &outcome.rows)?;
    let mut artifacts = vec![RESULTS_FILE.to_string()];

    if !outcome.models.is_empty() {
        fs::create_dir_all(dir.join("models"))?;
    }
    for (cond, models) in &outcome.models {
        let rel = format!("models/{}.json", cond.replace('/', "_"));
        eqsep::network::save_models(models, dir.join(&rel))?;
        artifacts.push(rel);
    }
    if !outcome.grids.is_empty() {
        fs::create_dir_all(dir.join("heatmaps"))?;
    }
    for (stem, grid) in &outcome.grids {
        let rel = format!("heatmaps/{stem}.csv");
        grid.write_csv(dir.join(&rel))?;
        artifacts.push(rel);
    }
    if !outcome.probe_records.is_empty() {
        let mut text = outcome.probe_records.join("\n");
        text.push('\n');
        fs::write(dir.join("probes.txt"), text)?;
        artifacts.push("probes.txt".into());
    }

    let manifest = Manifest {
        tool: "eqsep".into(),
        version: env!("CARGO_PKG_VERSION").into(),
        config: cfg.clone(),
        artifacts,
    };
    let text = serde_json::to_string_pretty(&manifest)? + "\n";
    fs::write(dir.join(MANIFEST_FILE), text)
        .with_context(|| format!("writing manifest in {}", dir.display()))?;
    Ok(())
}

pub fn write_results(path: &Path, experiment: &str, rows: &[Row]) -> Result<()> {
    let mut w =
        csv::Writer::from_path(path).with_context(|| format!("opening {}", path.display()))?;
    w.write_record(RESULTS_HEADER)?;
    for r in rows {
        // `{}` on f64 prints the shortest string that parses back exactly.
        w.write_record([
            experiment,
            &r.condition,
            &r.seed,
            &r.metric,
            &r.value.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_results(path: &Path) -> Result<Vec<Row>> {
    let mut r =
        csv::Reader::from_path(path).with_context(|| format!("opening {}", path.display()))?;
    let header: Vec<String> = r.headers()?.iter().map(str::to_string).collect();
    if header != RESULTS_HEADER {
        bail!("{}: unexpected header {header:?}", path.display());
    }
    let mut rows = Vec::new();
    for (i, rec) in r.records().enumerate() {
        let rec = rec.with_context(|| format!("{} row {}", path.display(), i + 2))?;
        let value: f64 = rec[4].parse().with_context(|| {
            format!("{} row {}: bad value {:?}", path.display(), i + 2, &rec[4])
        })?;
        rows.push(Row {
            condition: rec[1].to_string(),
            seed: rec[2].to_string(),
            metric: rec[3].to_string(),
            value,
        });
    }
    Ok(rows)
}

/// A run directory that was read back successfully.
#[derive(Debug, Clone)]
pub struct RunSummary {
    pub dir: PathBuf,
    pub experiment: String,
    pub seeds: usize,
    pub aggregates: Vec<Aggregate>,
}

/// Run directories found under `root`, plus the ones that could not be read.
#[derive(Debug, Default)]
pub struct Collected {
    pub runs: Vec<RunSummary>,
    pub problems: Vec<(PathBuf, String)>,
}

fn load_run(dir: &Path) -> Result<RunSummary> {
    let text = fs::read_to_string(dir.join(MANIFEST_FILE))?;
    let manifest: Manifest = serde_json::from_str(&text).context("corrupt manifest")?;
    let rows = read_results(&dir.join(RESULTS_FILE))?;
    Ok(RunSummary {
        dir: dir.to_path_buf(),
        experiment: manifest.config.experiment().name().to_string(),
        seeds: manifest.config.seeds.len(),
        aggregates: aggregate(&rows),
    })
}

fn walk(dir: &Path, out: &mut Collected) -> Result<()> {
    if dir.join(MANIFEST_FILE).is_file() {
        match load_run(dir) {
            Ok(run) => out.runs.push(run),
            Err(e) => out.problems.push((dir.to_path_buf(), format!("{e:#}"))),
        }
    }
    let mut subdirs: Vec<PathBuf> = fs::read_dir(dir)
        .with_context(|| format!("reading {}", dir.display()))?
        .filter_map(|e| e.ok())
        .map(|e| e.path())
        .filter(|p| p.is_dir())
        .collect();
    subdirs.sort();
    for sub in subdirs {
        walk(&sub, out)?;
    }
    Ok(())
}

/// Finds every run directory at or below `root`, in path order.
pub fn collect_runs(root: &Path) -> Result<Collected> {
    if !root.is_dir() {
        bail!("{} is not a directory", root.display());
    }
    let mut out = Collected::default();
    walk(root, &mut out)?;
    Ok(out)
}

fn pm(a: &Aggregate) -> String {
    format!("{:.2}±{:.2}", a.mean, a.std)
}

/// Aligned text table per run.
pub fn render_text(runs: &[RunSummary]) -> String {
    let mut out = String::new();
    for run in runs {
        out.push_str(&format!(
            "{} ({}, {} seed{})\n",
            run.experiment,
            run.dir.display(),
            run.seeds,
            if run.seeds == 1 { "" } else { "s" }
        ));
        let cw = run
            .aggregates
            .iter()
            .map(|a| a.condition.chars().count())
            .max()
            .unwrap_or(0)
            .max(9);
        let mw = run
            .aggregates
            .iter()
            .map(|a| a.metric.chars().count())
            .max()
            .unwrap_or(0)
            .max(6);
        let vw = run
            .aggregates
            .iter()
            .map(|a| pm(a).chars().count())
            .max()
            .unwrap_or(0)
            .max(8);
        out.push_str(&format!(
            "  {:<cw$}  {:<mw$}  {:>vw$}  {:>4}\n",
            "condition", "metric", "mean±std", "n"
        ));
        for a in &run.aggregates {
            out.push_str(&format!(
                "  {:<cw$}  {:<mw$}  {:>vw$}  {:>4}\n",
                a.condition,
                a.metric,
                pm(a),
                a.n
            ));
        }
        out.push('\n');
    }
    out
}

/// One CSV line per (run, condition, metric) at full precision.
pub fn render_csv(runs: &[RunSummary]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "experiment",
        "dir",
        "condition",
        "metric",
        "n",
        "mean",
        "std",
    ])?;
    for run in runs {
        let dir = run.dir.display().to_string();
        for a in &run.aggregates {
            w.write_record([
                run.experiment.as_str(),
                dir.as_str(),
                &a.condition,
                &a.metric,
                &a.n.to_string(),
                &a.mean.to_string(),
                &a.std.to_string(),
            ])?;
        }
    }
    Ok(String::from_utf8(w.into_inner()?)?)
}
