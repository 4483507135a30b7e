use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use eqsep::data::load_csv;
use eqsep::network::{load_models, save_models};
use eqsep::units::LossKind;
use eqsep_cli::config::{resolve, Experiment, HeadKind, HiddenKind, Settings};
use eqsep_cli::experiments::aggregate;
use eqsep_cli::output::{collect_runs, render_csv, render_text, run_to_dir, RunSummary};
use eqsep_cli::tools::{
    generate, score_dataset, train_models, write_datasets, write_scores, DatasetRequest, Generator,
};

#[derive(Parser)]
#[command(
    name = "eqsep",
    version,
    about = "Equality separator experiments and utilities"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment and write results.csv + manifest.json.
    Run(RunArgs),
    /// Summarize every run directory under a path.
    Report {
        dir: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Write a synthetic dataset as CSV.
    Dataset(DatasetArgs),
    /// Train or score saved networks.
    #[command(subcommand)]
    Model(ModelCommand),
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Csv,
}

#[derive(Args)]
struct RunArgs {
    experiment: Option<Experiment>,
    /// TOML file with any of the override keys; flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory (default: results/<experiment>).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Number of consecutive seeds starting at the base seed.
    #[arg(long)]
    seeds: Option<usize>,
    #[arg(long, value_delimiter = ',')]
    seed_list: Option<Vec<u64>>,
    #[arg(long, env = "EQSEP_SEED")]
    base_seed: Option<u64>,
    #[arg(long, value_delimiter = ',')]
    dims: Option<Vec<usize>>,
    #[arg(long, value_delimiter = ',')]
    noise: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',', value_enum)]
    heads: Option<Vec<HeadKind>>,
    #[arg(long, value_delimiter = ',', value_enum)]
    hidden: Option<Vec<HiddenKind>>,
    #[arg(long, value_delimiter = ',', value_parser = parse_loss)]
    loss: Option<Vec<LossKind>>,
    #[arg(long)]
    sigma: Option<f64>,
    /// Epochs for networks, iterations for BFGS fits.
    #[arg(long)]
    epochs: Option<usize>,
    /// Run seeds on all cores. Output is identical to a sequential run.
    #[arg(long)]
    parallel: bool,
    /// Any other override as key=value, e.g. --set batch_size=16.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    sets: Vec<String>,
}

fn parse_loss(s: &str) -> Result<LossKind, String> {
    s.parse().map_err(|e: eqsep::Error| e.to_string())
}

impl RunArgs {
    fn settings(&self) -> Result<Settings> {
        let mut s = match &self.config {
            Some(path) => Settings::from_file(path)?,
            None => Settings::default(),
        };
        for assign in &self.sets {
            s = s.merge(Settings::from_assignment(assign)?);
        }
        Ok(s.merge(Settings {
            experiment: self.experiment,
            out: self.out.clone(),
            base_seed: self.base_seed,
            seeds: self.seeds,
            seed_list: self.seed_list.clone(),
            parallel: self.parallel.then_some(true),
            dims: self.dims.clone(),
            noise: self.noise.clone(),
            heads: self.heads.clone(),
            hidden: self.hidden.clone(),
            loss: self.loss.clone(),
            sigma: self.sigma,
            epochs: self.epochs,
            ..Settings::default()
        }))
    }
}

#[derive(Args)]
struct DatasetArgs {
    #[arg(value_enum)]
    generator: Generator,
    /// Output CSV; split generators write <stem>_train.csv and <stem>_test.csv.
    #[arg(long)]
    out: PathBuf,
    #[arg(long, env = "EQSEP_SEED", default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 5)]
    dim: usize,
    #[arg(long, default_value_t = 1.0)]
    noise: f64,
    #[arg(long, default_value_t = 100)]
    m: usize,
    #[arg(long)]
    pos_ratio: Option<f64>,
}

#[derive(Subcommand)]
enum ModelCommand {
    /// Train one network per seed and save them as one model file.
    Train {
        #[arg(long)]
        data: PathBuf,
        #[arg(long, value_enum, default_value_t = HeadKind::Es)]
        head: HeadKind,
        #[arg(long, value_enum, default_value_t = HiddenKind::Bump)]
        hidden: HiddenKind,
        #[arg(long, value_parser = parse_loss, default_value = "ll")]
        loss: LossKind,
        #[arg(long, default_value_t = 1)]
        seeds: usize,
        #[arg(long, env = "EQSEP_SEED", default_value_t = 0)]
        base_seed: u64,
        #[arg(long)]
        epochs: Option<usize>,
        /// Network override as key=value (width, depth, batch_size, ...).
        #[arg(long = "set", value_name = "KEY=VALUE")]
        sets: Vec<String>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Score a dataset with the mean of the saved models.
    Score {
        #[arg(long)]
        models: PathBuf,
        #[arg(long)]
        data: PathBuf,
        /// Per-point scores as CSV.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn run(args: RunArgs) -> Result<()> {
    let settings = args.settings()?;
    let cfg = resolve(&settings)?;
    let dir = settings
        .out
        .clone()
        .unwrap_or_else(|| PathBuf::from("results").join(cfg.experiment().name()));
    let outcome = run_to_dir(&cfg, &dir)?;
    let summary = RunSummary {
        dir: dir.clone(),
        experiment: cfg.experiment().name().to_string(),
        seeds: cfg.seeds.len(),
        aggregates: aggregate(&outcome.rows),
    };
    print!("{}", render_text(&[summary]));
    Ok(())
}

fn report(dir: PathBuf, format: Format) -> Result<bool> {
    let found = collect_runs(&dir)?;
    for (path, problem) in &found.problems {
        eprintln!("skipping {}: {problem}", path.display());
    }
    if found.runs.is_empty() {
        eprintln!("no runs found under {}", dir.display());
        return Ok(false);
    }
    match format {
        Format::Text => print!("{}", render_text(&found.runs)),
        Format::Csv => print!("{}", render_csv(&found.runs)?),
    }
    Ok(true)
}

fn dataset(args: DatasetArgs) -> Result<()> {
    let sets = generate(&DatasetRequest {
        generator: args.generator,
        seed: args.seed,
        dim: args.dim,
        noise: args.noise,
        m: args.m,
        pos_ratio: args.pos_ratio,
    })?;
    for path in write_datasets(&args.out, &sets)? {
        println!("{}", path.display());
    }
    Ok(())
}

fn model(cmd: ModelCommand) -> Result<()> {
    match cmd {
        ModelCommand::Train {
            data,
            head,
            hidden,
            loss,
            seeds,
            base_seed,
            epochs,
            sets,
            out,
        } => {
            if seeds == 0 {
                bail!("--seeds must be positive");
            }
            let mut s = Settings {
                experiment: Some(Experiment::Circles),
                epochs,
                ..Settings::default()
            };
            for assign in &sets {
                s = s.merge(Settings::from_assignment(assign)?);
            }
            let cfg = resolve(&s)?;
            let eqsep_cli::config::Params::Circles(p) = cfg.params else {
                unreachable!("resolved as circles");
            };
            let train_set =
                load_csv(&data).with_context(|| format!("loading {}", data.display()))?;
            let seed_list: Vec<u64> = (base_seed..base_seed + seeds as u64).collect();
            let models = train_models(&train_set, &p, head, hidden, loss, &seed_list)?;
            save_models(&models, &out)?;
            println!("saved {} model(s) to {}", models.len(), out.display());
        }
        ModelCommand::Score { models, data, out } => {
            let members = load_models(&models)?;
            let set = load_csv(&data).with_context(|| format!("loading {}", data.display()))?;
            let (scores, summary) = score_dataset(members, &set)?;
            if let Some(path) = out {
                write_scores(&path, &scores, set.labels())?;
            }
            println!("{}", serde_json::to_string_pretty(&summary)?);
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(args) => run(args).map(|_| true),
        Command::Report { dir, format } => report(dir, format),
        Command::Dataset(args) => dataset(args).map(|_| true),
        Command::Model(cmd) => model(cmd).map(|_| true),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
