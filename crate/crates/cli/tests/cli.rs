use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use eqsep_cli::experiments::aggregate;
use eqsep_cli::output::{read_results, Manifest};

fn eqsep(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_eqsep"))
        .args(args)
        .current_dir(cwd)
        .env_remove("EQSEP_SEED")
        .output()
        .expect("binary runs")
}

fn ok(out: &Output) -> String {
    assert!(
        out.status.success(),
        "exit {:?}\nstdout:\n{}\nstderr:\n{}",
        out.status.code(),
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

#[test]
fn run_writes_results_and_manifest() {
    let tmp = tempfile::tempdir().unwrap();
    let stdout = ok(&eqsep(
        &["run", "xor", "--seeds", "3", "--out", "x"],
        tmp.path(),
    ));
    assert!(stdout.contains("XOR/mse"), "{stdout}");

    let text = fs::read_to_string(tmp.path().join("x/results.csv")).unwrap();
    assert!(text.starts_with("experiment,condition,seed,metric,value\n"));
    let manifest: Manifest =
        serde_json::from_str(&fs::read_to_string(tmp.path().join("x/manifest.json")).unwrap())
            .unwrap();
    assert_eq!(manifest.tool, "eqsep");
    assert_eq!(manifest.config.seeds, vec![0, 1, 2]);
    assert_eq!(manifest.artifacts, vec!["results.csv".to_string()]);
}

#[test]
fn default_output_directory_is_under_results() {
    let tmp = tempfile::tempdir().unwrap();
    ok(&eqsep(
        &["run", "lrt", "--set", "trials=3", "--set", "samples=100"],
        tmp.path(),
    ));
    assert!(tmp.path().join("results/lrt/results.csv").is_file());
}

#[test]
fn reruns_are_byte_identical_and_parallel_matches() {
    let tmp = tempfile::tempdir().unwrap();
    let args = ["run", "linear2", "--seeds", "4", "--noise", "1,7"];
    for (dir, extra) in [("a", None), ("b", None), ("c", Some("--parallel"))] {
        let mut full: Vec<&str> = args.to_vec();
        full.extend(["--out", dir]);
        full.extend(extra);
        ok(&eqsep(&full, tmp.path()));
    }
    let read = |d: &str| fs::read(tmp.path().join(d).join("results.csv")).unwrap();
    assert_eq!(read("a"), read("b"));
    assert_eq!(read("a"), read("c"));
}

#[test]
fn seed_env_var_sets_the_base_seed() {
    let tmp = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_eqsep"))
        .args(["run", "vcdim", "--seeds", "2", "--out", "v"])
        .current_dir(tmp.path())
        .env("EQSEP_SEED", "40")
        .output()
        .unwrap();
    ok(&out);
    let rows = read_results(&tmp.path().join("v/results.csv")).unwrap();
    let mut seeds: Vec<&str> = rows
        .iter()
        .map(|r| r.seed.as_str())
        .filter(|s| *s != "exact")
        .collect();
    seeds.dedup();
    assert_eq!(seeds, vec!["40", "41"]);
}

#[test]
fn config_file_is_read_and_flags_override_it() {
    let tmp = tempfile::tempdir().unwrap();
    fs::write(
        tmp.path().join("c.toml"),
        "experiment = \"linear1\"\nseeds = 2\ndims = [5]\nnoise = [0.0, 2.0]\n",
    )
    .unwrap();
    ok(&eqsep(
        &["run", "--config", "c.toml", "--noise", "1", "--out", "l"],
        tmp.path(),
    ));
    let rows = read_results(&tmp.path().join("l/results.csv")).unwrap();
    let conds: std::collections::BTreeSet<&str> =
        rows.iter().map(|r| r.condition.as_str()).collect();
    assert_eq!(
        conds.into_iter().collect::<Vec<_>>(),
        vec!["dim=5/noise=1/mse"]
    );
}

#[test]
fn bad_configs_are_rejected_with_a_message() {
    let tmp = tempfile::tempdir().unwrap();
    fs::write(
        tmp.path().join("typo.toml"),
        "experiment = \"xor\"\nsedes = 3\n",
    )
    .unwrap();
    let out = eqsep(&["run", "--config", "typo.toml"], tmp.path());
    assert!(!out.status.success());
    assert!(stderr(&out).contains("sedes"), "{}", stderr(&out));

    let out = eqsep(&["run", "xor", "--set", "resolution=10"], tmp.path());
    assert!(!out.status.success());
    assert!(stderr(&out).contains("resolution"), "{}", stderr(&out));

    let out = eqsep(
        &["run", "xor", "--seeds", "2", "--seed-list", "1,2"],
        tmp.path(),
    );
    assert!(!out.status.success());

    let out = eqsep(&["run"], tmp.path());
    assert!(!out.status.success());
    assert!(!tmp.path().join("results").exists());
}

#[test]
fn report_aggregates_match_rows() {
    let tmp = tempfile::tempdir().unwrap();
    ok(&eqsep(
        &[
            "run", "linear1", "--seeds", "3", "--dims", "5", "--out", "runs/l1",
        ],
        tmp.path(),
    ));
    ok(&eqsep(
        &["run", "xor", "--seeds", "1", "--out", "runs/x"],
        tmp.path(),
    ));

    let csv = ok(&eqsep(&["report", "runs", "--format", "csv"], tmp.path()));
    let mut reader = csv::Reader::from_reader(csv.as_bytes());
    let rows = read_results(&tmp.path().join("runs/l1/results.csv")).unwrap();
    let mut checked = 0;
    for rec in reader.records() {
        let rec = rec.unwrap();
        if &rec[0] != "linear1" {
            // One seed: every std is exactly zero.
            assert_eq!(&rec[6], "0", "{rec:?}");
            continue;
        }
        let vals: Vec<f64> = rows
            .iter()
            .filter(|r| r.condition == rec[2] && r.metric == rec[3])
            .map(|r| r.value)
            .collect();
        let mean = vals.iter().sum::<f64>() / vals.len() as f64;
        let var = vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / vals.len() as f64;
        assert_eq!(rec[4].parse::<usize>().unwrap(), vals.len());
        assert!((rec[5].parse::<f64>().unwrap() - mean).abs() <= 1e-12);
        assert!((rec[6].parse::<f64>().unwrap() - var.sqrt()).abs() <= 1e-12);
        checked += 1;
    }
    assert_eq!(checked, aggregate(&rows).len());

    let text = ok(&eqsep(&["report", "runs"], tmp.path()));
    assert!(text.contains("linear1 (runs/l1, 3 seeds)"), "{text}");
    assert!(text.contains("xor (runs/x, 1 seed)"), "{text}");
    assert!(text.contains("0.00±0.00"), "{text}");
}

#[test]
fn report_on_empty_tree_fails() {
    let tmp = tempfile::tempdir().unwrap();
    fs::create_dir(tmp.path().join("empty")).unwrap();
    let out = eqsep(&["report", "empty"], tmp.path());
    assert!(!out.status.success());
    assert!(stderr(&out).contains("no runs found"), "{}", stderr(&out));
}

#[test]
fn report_skips_corrupt_runs() {
    let tmp = tempfile::tempdir().unwrap();
    ok(&eqsep(
        &["run", "xor", "--seeds", "1", "--out", "runs/good"],
        tmp.path(),
    ));
    fs::create_dir_all(tmp.path().join("runs/bad")).unwrap();
    fs::write(tmp.path().join("runs/bad/manifest.json"), "{not json").unwrap();
    let out = eqsep(&["report", "runs"], tmp.path());
    let stdout = ok(&out);
    assert!(stdout.contains("runs/good"));
    assert!(stderr(&out).contains("runs/bad"), "{}", stderr(&out));
}

#[test]
fn dataset_train_and_score_round_trip() {
    let tmp = tempfile::tempdir().unwrap();
    let listed = ok(&eqsep(
        &["dataset", "circles", "--out", "d/circ.csv", "--seed", "3"],
        tmp.path(),
    ));
    assert_eq!(listed.lines().count(), 2);
    assert!(tmp.path().join("d/circ_train.csv").is_file());
    assert!(tmp.path().join("d/circ_test.csv").is_file());

    ok(&eqsep(
        &[
            "model",
            "train",
            "--data",
            "d/circ_train.csv",
            "--head",
            "es",
            "--hidden",
            "rbf",
            "--seeds",
            "2",
            "--epochs",
            "30",
            "--out",
            "m.json",
        ],
        tmp.path(),
    ));
    let out = ok(&eqsep(
        &[
            "model",
            "score",
            "--models",
            "m.json",
            "--data",
            "d/circ_test.csv",
            "--out",
            "s.csv",
        ],
        tmp.path(),
    ));
    let summary: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(summary["members"], 2);
    let aupr = summary["normal_aupr"].as_f64().unwrap();
    assert!((0.0..=1.0).contains(&aupr));

    let scores = fs::read_to_string(tmp.path().join("s.csv")).unwrap();
    assert_eq!(scores.lines().next(), Some("score,label"));
    assert_eq!(
        scores.lines().count() - 1,
        summary["points"].as_u64().unwrap() as usize
    );
}

#[test]
fn dataset_for_single_split_generators_writes_one_file() {
    let tmp = tempfile::tempdir().unwrap();
    ok(&eqsep(&["dataset", "xor", "--out", "xor.csv"], tmp.path()));
    let text = fs::read_to_string(tmp.path().join("xor.csv")).unwrap();
    assert_eq!(
        text.lines().filter(|l| !l.starts_with('#')).count(),
        5,
        "{text}"
    );
}

#[test]
fn training_on_one_class_fails() {
    let tmp = tempfile::tempdir().unwrap();
    fs::write(tmp.path().join("one.csv"), "x0,x1,label\n0,0,1\n1,1,1\n").unwrap();
    let out = eqsep(
        &["model", "train", "--data", "one.csv", "--out", "m.json"],
        tmp.path(),
    );
    assert!(!out.status.success());
    assert!(stderr(&out).contains("both"), "{}", stderr(&out));
}

#[test]
fn heatmap_run_writes_grids_and_models() {
    let tmp = tempfile::tempdir().unwrap();
    ok(&eqsep(
        &[
            "run",
            "heatmap",
            "--seeds",
            "1",
            "--epochs",
            "20",
            "--heads",
            "es",
            "--hidden",
            "bump",
            "--set",
            "resolution=8",
            "--out",
            "h",
        ],
        tmp.path(),
    ));
    let manifest: Manifest =
        serde_json::from_str(&fs::read_to_string(tmp.path().join("h/manifest.json")).unwrap())
            .unwrap();
    assert!(manifest
        .artifacts
        .iter()
        .any(|a| a.starts_with("heatmaps/")));
    assert!(manifest.artifacts.iter().any(|a| a.starts_with("models/")));
    for a in &manifest.artifacts {
        assert!(tmp.path().join("h").join(a).is_file(), "{a}");
    }
}
