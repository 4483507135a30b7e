//! Labeled datasets, synthetic generators and CSV I/O.
//!
//! Every generator is a pure function of its parameters and seed. Class
//! counts are exact: `⌊pos_ratio · m⌋` positives (computed with a 1e-9 slack
//! so that ratios such as 0.29 are not undercut by rounding) and the rest
//! negatives, positives listed first.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{check_dim, Error, Result};
use crate::rng::{normal, normal_vec, seeded, uniform};
use crate::vecops::dot;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    Train,
    Test,
}

/// Provenance of a dataset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Meta {
    pub generator: String,
    pub seed: u64,
    pub params: BTreeMap<String, Value>,
    pub role: Role,
}

impl Meta {
    pub fn new(generator: &str, seed: u64, role: Role) -> Self {
        Self {
            generator: generator.to_string(),
            seed,
            params: BTreeMap::new(),
            role,
        }
    }

    fn with(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.params.insert(key.to_string(), value.into());
        self
    }
}

/// Row-major point matrix with binary labels.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledDataset {
    dim: usize,
    points: Vec<f64>,
    labels: Vec<u8>,
    pub meta: Meta,
}

impl LabeledDataset {
    pub fn new(dim: usize, points: Vec<f64>, labels: Vec<u8>, meta: Meta) -> Result<Self> {
        if dim == 0 {
            return Err(Error::invalid("dataset dimension must be >= 1"));
        }
        if labels.is_empty() {
            return Err(Error::invalid("dataset needs at least one row"));
        }
        check_dim(labels.len() * dim, points.len())?;
        if let Some(bad) = labels.iter().find(|&&l| l > 1) {
            return Err(Error::invalid(format!("labels must be 0 or 1, got {bad}")));
        }
        Ok(Self {
            dim,
            points,
            labels,
            meta,
        })
    }

    pub fn from_rows(rows: &[Vec<f64>], labels: Vec<u8>, meta: Meta) -> Result<Self> {
        let dim = rows.first().map_or(0, Vec::len);
        if let Some(r) = rows.iter().find(|r| r.len() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: r.len(),
            });
        }
        check_dim(rows.len(), labels.len())?;
        Self::new(dim, rows.concat(), labels, meta)
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.points[i * self.dim..(i + 1) * self.dim]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> + '_ {
        self.points.chunks_exact(self.dim)
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn labels(&self) -> &[u8] {
        &self.labels
    }

    pub fn count_label(&self, label: u8) -> usize {
        self.labels.iter().filter(|&&l| l == label).count()
    }

    pub fn has_both_labels(&self) -> bool {
        self.count_label(0) > 0 && self.count_label(1) > 0
    }

    /// Rows at `idx`, in that order.
    pub fn subset(&self, idx: &[usize]) -> Self {
        let mut points = Vec::with_capacity(idx.len() * self.dim);
        for &i in idx {
            points.extend_from_slice(self.row(i));
        }
        Self {
            dim: self.dim,
            points,
            labels: idx.iter().map(|&i| self.labels[i]).collect(),
            meta: self.meta.clone(),
        }
    }

    /// Labels with 0 and 1 swapped.
    pub fn flipped(&self) -> Self {
        Self {
            labels: self.labels.iter().map(|l| 1 - l).collect(),
            ..self.clone()
        }
    }

    /// Population variance of all feature values pooled together.
    pub fn pooled_variance(&self) -> f64 {
        let n = self.points.len() as f64;
        let mean = self.points.iter().sum::<f64>() / n;
        self.points
            .iter()
            .map(|v| (v - mean) * (v - mean))
            .sum::<f64>()
            / n
    }
}

pub(crate) fn class_counts(m: usize, pos_ratio: f64) -> Result<(usize, usize)> {
    if !(0.0..=1.0).contains(&pos_ratio) {
        return Err(Error::invalid(format!(
            "pos_ratio must be in [0,1], got {pos_ratio}"
        )));
    }
    let pos = ((pos_ratio * m as f64) + 1e-9).floor() as usize;
    let pos = pos.min(m);
    Ok((pos, m - pos))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Gate {
    And,
    Or,
    Xor,
}

impl Gate {
    pub fn eval(self, a: bool, b: bool) -> bool {
        match self {
            Gate::And => a && b,
            Gate::Or => a || b,
            Gate::Xor => a ^ b,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Gate::And => "AND",
            Gate::Or => "OR",
            Gate::Xor => "XOR",
        }
    }
}

/// The four binary inputs labeled by `gate`.
pub fn gen_logic(gate: Gate) -> LabeledDataset {
    let corners = [(0.0, 0.0), (0.0, 1.0), (1.0, 0.0), (1.0, 1.0)];
    let mut points = Vec::with_capacity(8);
    let mut labels = Vec::with_capacity(4);
    for (a, b) in corners {
        points.extend([a, b]);
        labels.push(gate.eval(a == 1.0, b == 1.0) as u8);
    }
    let meta = Meta::new("logic", 0, Role::Train).with("gate", gate.name());
    LabeledDataset::new(2, points, labels, meta).expect("static logic table")
}

/// Points on a random hyperplane (label 1) against uniform clutter (label 0).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Linear1Config {
    pub dim: usize,
    pub noise_std: f64,
    pub m: usize,
    pub pos_ratio: f64,
}

impl Linear1Config {
    pub fn new(dim: usize, noise_std: f64) -> Self {
        Self {
            dim,
            noise_std,
            m: 100,
            pos_ratio: 0.9,
        }
    }
}

/// Half-width of the sampling cube for linear problem 1.
pub const LINEAR1_RANGE: f64 = 10.0;

/// Draws the hidden plane `(w, b)` for a linear-problem-1 seed.
///
/// `w ~ N(0, I)`, `b ~ N(0, 1)`, redrawn while `|w_n| ≤ 1e-6` so the last
/// coordinate can be solved for.
pub fn linear1_plane(dim: usize, seed: u64) -> (Vec<f64>, f64) {
    let mut rng = seeded(seed, 0);
    loop {
        let w = normal_vec(&mut rng, dim);
        let b = normal(&mut rng);
        if w[dim - 1].abs() > 1e-6 {
            return (w, b);
        }
    }
}

fn linear1_sample(cfg: &Linear1Config, seed: u64, role: Role) -> Result<LabeledDataset> {
    if cfg.dim < 2 {
        return Err(Error::invalid("linear problem 1 needs dim >= 2"));
    }
    if !(cfg.noise_std >= 0.0) {
        return Err(Error::invalid("noise_std must be >= 0"));
    }
    let (pos, neg) = class_counts(cfg.m, cfg.pos_ratio)?;
    let (w, b) = linear1_plane(cfg.dim, seed);
    let n = cfg.dim;
    let stream = match role {
        Role::Train => 1,
        Role::Test => 2,
    };
    let mut rng = seeded(seed, stream);
    let mut points = Vec::with_capacity(cfg.m * n);
    for _ in 0..pos {
        let head: Vec<f64> = (0..n - 1)
            .map(|_| uniform(&mut rng, -LINEAR1_RANGE, LINEAR1_RANGE))
            .collect();
        let last = (-b - dot(&w[..n - 1], &head)) / w[n - 1];
        points.extend(head);
        points.push(last);
    }
    for _ in 0..neg * n {
        points.push(uniform(&mut rng, -LINEAR1_RANGE, LINEAR1_RANGE));
    }
    // Labels are fixed before noise is added.
    if cfg.noise_std > 0.0 {
        for v in &mut points {
            *v += cfg.noise_std * normal(&mut rng);
        }
    }
    let mut labels = vec![1u8; pos];
    labels.resize(cfg.m, 0);
    let meta = Meta::new("linear1", seed, role)
        .with("dim", n)
        .with("noise_std", cfg.noise_std)
        .with("m", cfg.m)
        .with("pos_ratio", cfg.pos_ratio);
    LabeledDataset::new(n, points, labels, meta)
}

pub fn gen_linear1(cfg: &Linear1Config, seed: u64) -> Result<LabeledDataset> {
    linear1_sample(cfg, seed, Role::Train)
}

/// Train and test draws sharing the same hidden plane.
pub fn gen_linear1_split(
    cfg: &Linear1Config,
    seed: u64,
) -> Result<(LabeledDataset, LabeledDataset)> {
    Ok((
        linear1_sample(cfg, seed, Role::Train)?,
        linear1_sample(cfg, seed, Role::Test)?,
    ))
}

/// Two correlated 2-D Gaussians at `(1,1)` (label 1) and `(-1,-1)` (label 0).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Gaussians2dConfig {
    pub noise_multiplier: f64,
    pub m: usize,
    pub pos_ratio: f64,
}

impl Gaussians2dConfig {
    pub fn new(noise_multiplier: f64) -> Self {
        Self {
            noise_multiplier,
            m: 100,
            pos_ratio: 0.9,
        }
    }
}

/// Base covariance of each class before the noise multiplier.
pub const GAUSSIAN_COV: [[f64; 2]; 2] = [[0.2, 0.1], [0.1, 0.2]];

fn gaussians_sample(cfg: &Gaussians2dConfig, seed: u64, role: Role) -> Result<LabeledDataset> {
    let k = cfg.noise_multiplier;
    if !(k >= 0.0) || !k.is_finite() {
        return Err(Error::invalid(format!(
            "noise multiplier must be >= 0, got {k}"
        )));
    }
    let (pos, neg) = class_counts(cfg.m, cfg.pos_ratio)?;
    // Cholesky factor of k·Σ.
    let l11 = GAUSSIAN_COV[0][0].sqrt();
    let l21 = GAUSSIAN_COV[1][0] / l11;
    let l22 = (GAUSSIAN_COV[1][1] - l21 * l21).sqrt();
    let s = k.sqrt();
    let stream = match role {
        Role::Train => 1,
        Role::Test => 2,
    };
    let mut rng = seeded(seed, stream);
    let mut points = Vec::with_capacity(cfg.m * 2);
    for (count, mean) in [(pos, 1.0), (neg, -1.0)] {
        for _ in 0..count {
            let (z1, z2) = (normal(&mut rng), normal(&mut rng));
            points.push(mean + s * l11 * z1);
            points.push(mean + s * (l21 * z1 + l22 * z2));
        }
    }
    let mut labels = vec![1u8; pos];
    labels.resize(cfg.m, 0);
    let meta = Meta::new("gaussians2d", seed, role)
        .with("noise_multiplier", k)
        .with("m", cfg.m)
        .with("pos_ratio", cfg.pos_ratio);
    LabeledDataset::new(2, points, labels, meta)
}

pub fn gen_gaussians2d(cfg: &Gaussians2dConfig, seed: u64) -> Result<LabeledDataset> {
    gaussians_sample(cfg, seed, Role::Train)
}

pub fn gen_gaussians2d_split(
    cfg: &Gaussians2dConfig,
    seed: u64,
) -> Result<(LabeledDataset, LabeledDataset)> {
    Ok((
        gaussians_sample(cfg, seed, Role::Train)?,
        gaussians_sample(cfg, seed, Role::Test)?,
    ))
}

/// Concentric-circle anomaly detection data.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CirclesConfig {
    pub m: usize,
    pub pos_ratio: f64,
    pub normal_radius: f64,
    pub train_anomaly_radius: f64,
    pub test_anomaly_radius: f64,
}

impl Default for CirclesConfig {
    fn default() -> Self {
        Self {
            m: 100,
            pos_ratio: 0.75,
            normal_radius: 1.0,
            train_anomaly_radius: 2.0,
            test_anomaly_radius: 0.5,
        }
    }
}

/// Normals (label 1) on the unit circle in both splits; anomalies (label 0)
/// on radius 2 for training and radius 0.5 for testing.
pub fn gen_circles_ad(cfg: &CirclesConfig, seed: u64) -> Result<(LabeledDataset, LabeledDataset)> {
    let (pos, neg) = class_counts(cfg.m, cfg.pos_ratio)?;
    let mut out = Vec::with_capacity(2);
    for (role, stream, anomaly_r) in [
        (Role::Train, 1, cfg.train_anomaly_radius),
        (Role::Test, 2, cfg.test_anomaly_radius),
    ] {
        let mut rng = seeded(seed, stream);
        let mut points = Vec::with_capacity(cfg.m * 2);
        for (count, r) in [(pos, cfg.normal_radius), (neg, anomaly_r)] {
            for _ in 0..count {
                let theta = uniform(&mut rng, 0.0, 2.0 * PI);
                points.push(r * theta.cos());
                points.push(r * theta.sin());
            }
        }
        let mut labels = vec![1u8; pos];
        labels.resize(cfg.m, 0);
        let meta = Meta::new("circles", seed, role)
            .with("m", cfg.m)
            .with("pos_ratio", cfg.pos_ratio)
            .with("anomaly_radius", anomaly_r);
        out.push(LabeledDataset::new(2, points, labels, meta)?);
    }
    let test = out.pop().expect("two splits");
    let train = out.pop().expect("two splits");
    Ok((train, test))
}

/// Formats with 17 significant digits, which round-trips any finite f64.
pub fn format_f64(v: f64) -> String {
    format!("{v:.16e}")
}

fn meta_path(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".meta.json");
    PathBuf::from(s)
}

/// Writes `x1,…,xn,label` rows plus a `<path>.meta.json` sidecar.
pub fn save_csv(data: &LabeledDataset, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut w = csv::Writer::from_path(path).map_err(|e| csv_err(path, e))?;
    let mut header: Vec<String> = (1..=data.dim()).map(|i| format!("x{i}")).collect();
    header.push("label".into());
    w.write_record(&header).map_err(|e| csv_err(path, e))?;
    for (row, label) in data.rows().zip(data.labels()) {
        let mut rec: Vec<String> = row.iter().map(|v| format_f64(*v)).collect();
        rec.push(label.to_string());
        w.write_record(&rec).map_err(|e| csv_err(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))?;
    let meta = serde_json::to_string_pretty(&data.meta)?;
    fs::write(meta_path(path), meta + "\n").map_err(|e| Error::io(meta_path(path), e))
}

fn csv_err(path: &Path, e: csv::Error) -> Error {
    let line = e.position().map_or(0, |p| p.line() as usize);
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::io(path, io),
        other => Error::Parse {
            path: path.to_path_buf(),
            line,
            msg: format!("{other:?}"),
        },
    }
}

/// Reads a CSV written by [`save_csv`] (or any file with a header row and a
/// final `label` column). The meta sidecar is used when present.
pub fn load_csv(path: impl AsRef<Path>) -> Result<LabeledDataset> {
    let path = path.as_ref();
    let parse = |line: usize, msg: String| Error::Parse {
        path: path.to_path_buf(),
        line,
        msg,
    };
    let mut r = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_path(path)
        .map_err(|e| csv_err(path, e))?;
    let header = r.headers().map_err(|e| csv_err(path, e))?.clone();
    if header.is_empty() || (header.len() == 1 && header[0].is_empty()) {
        return Err(parse(1, "no data rows".into()));
    }
    if header.get(header.len() - 1).map(str::trim) != Some("label") {
        return Err(parse(1, "last column must be named \"label\"".into()));
    }
    let dim = header.len() - 1;
    if dim == 0 {
        return Err(parse(1, "no feature columns".into()));
    }
    let mut points = Vec::new();
    let mut labels = Vec::new();
    for rec in r.records() {
        let rec = rec.map_err(|e| csv_err(path, e))?;
        let line = rec.position().map_or(0, |p| p.line() as usize);
        if rec.len() != dim + 1 {
            return Err(parse(
                line,
                format!("expected {} fields, got {}", dim + 1, rec.len()),
            ));
        }
        for (j, field) in rec.iter().take(dim).enumerate() {
            let v: f64 = field
                .trim()
                .parse()
                .map_err(|_| parse(line, format!("column {}: not a number: {field:?}", j + 1)))?;
            points.push(v);
        }
        match rec[dim].trim() {
            "0" => labels.push(0),
            "1" => labels.push(1),
            other => return Err(parse(line, format!("label must be 0 or 1, got {other:?}"))),
        }
    }
    if labels.is_empty() {
        return Err(parse(1, "no data rows".into()));
    }
    let mp = meta_path(path);
    let meta = if mp.exists() {
        let text = fs::read_to_string(&mp).map_err(|e| Error::io(&mp, e))?;
        serde_json::from_str(&text)?
    } else {
        Meta::new("csv", 0, Role::Train).with("source", path.display().to_string())
    };
    LabeledDataset::new(dim, points, labels, meta)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn logic_tables() {
        let xor = gen_logic(Gate::Xor);
        assert_eq!(xor.labels(), &[0, 1, 1, 0]);
        assert_eq!(xor.row(1), &[0.0, 1.0]);
        let and = gen_logic(Gate::And);
        assert_eq!(and.count_label(1), 1);
        assert_eq!(
            and.row(and.labels().iter().position(|&l| l == 1).unwrap()),
            &[1.0, 1.0]
        );
        let or = gen_logic(Gate::Or);
        assert_eq!(or.count_label(0), 1);
        assert_eq!(or.row(0), &[0.0, 0.0]);
    }

    #[test]
    fn linear1_positives_on_plane() {
        let cfg = Linear1Config::new(7, 0.0);
        let d = gen_linear1(&cfg, 3).unwrap();
        let (w, b) = linear1_plane(7, 3);
        assert_eq!(d.count_label(1), 90);
        assert_eq!(d.len(), 100);
        for (row, &l) in d.rows().zip(d.labels()) {
            if l == 1 {
                let z = dot(&w, row) + b;
                assert!(z.abs() < 1e-9, "{z}");
            }
        }
    }

    #[test]
    fn linear1_split_shares_plane() {
        let cfg = Linear1Config::new(3, 0.0);
        let (tr, te) = gen_linear1_split(&cfg, 11).unwrap();
        assert_ne!(tr.points(), te.points());
        let (w, b) = linear1_plane(3, 11);
        for (row, &l) in te.rows().zip(te.labels()) {
            if l == 1 {
                assert!((dot(&w, row) + b).abs() < 1e-9);
            }
        }
        assert!(gen_linear1(&Linear1Config::new(1, 0.0), 0).is_err());
    }

    #[test]
    fn gaussians_degenerate_at_zero_noise() {
        let d = gen_gaussians2d(&Gaussians2dConfig::new(0.0), 5).unwrap();
        for (row, &l) in d.rows().zip(d.labels()) {
            let m = if l == 1 { 1.0 } else { -1.0 };
            assert_eq!(row, &[m, m]);
        }
    }

    #[test]
    fn gaussian_covariance_is_positive_definite() {
        // Closed-form eigenvalues of [[0.2,0.1],[0.1,0.2]] are 0.1 and 0.3.
        let [[a, b], [_, d]] = GAUSSIAN_COV;
        let tr = a + d;
        let det = a * d - b * b;
        let disc = (tr * tr / 4.0 - det).sqrt();
        for k in [0.5, 1.0, 19.0] {
            let (lo, hi) = (k * (tr / 2.0 - disc), k * (tr / 2.0 + disc));
            assert!((lo - 0.1 * k).abs() < 1e-12 && (hi - 0.3 * k).abs() < 1e-12);
            assert!(lo > 0.0);
        }
    }

    #[test]
    fn gaussians_sample_covariance() {
        let cfg = Gaussians2dConfig {
            noise_multiplier: 2.0,
            m: 200_000,
            pos_ratio: 1.0,
        };
        let d = gen_gaussians2d(&cfg, 1).unwrap();
        let n = d.len() as f64;
        let (mut sx, mut sy, mut sxx, mut syy, mut sxy) = (0.0, 0.0, 0.0, 0.0, 0.0);
        for r in d.rows() {
            sx += r[0];
            sy += r[1];
            sxx += r[0] * r[0];
            syy += r[1] * r[1];
            sxy += r[0] * r[1];
        }
        let (mx, my) = (sx / n, sy / n);
        assert!((mx - 1.0).abs() < 0.01 && (my - 1.0).abs() < 0.01);
        assert!((sxx / n - mx * mx - 0.4).abs() < 0.01);
        assert!((syy / n - my * my - 0.4).abs() < 0.01);
        assert!((sxy / n - mx * my - 0.2).abs() < 0.01);
    }

    #[test]
    fn circles_radii_and_counts() {
        let (tr, te) = gen_circles_ad(&CirclesConfig::default(), 0).unwrap();
        for (d, anomaly_r) in [(&tr, 2.0), (&te, 0.5)] {
            assert_eq!(d.count_label(1), 75);
            assert_eq!(d.count_label(0), 25);
            for (row, &l) in d.rows().zip(d.labels()) {
                let r = (row[0] * row[0] + row[1] * row[1]).sqrt();
                let want = if l == 1 { 1.0 } else { anomaly_r };
                assert!((r - want).abs() < 1e-12, "{r} vs {want}");
            }
        }
        assert_eq!(tr.meta.role, Role::Train);
        assert_eq!(te.meta.role, Role::Test);
    }

    #[test]
    fn generators_are_deterministic() {
        let a = gen_linear1(&Linear1Config::new(5, 1.0), 42).unwrap();
        let b = gen_linear1(&Linear1Config::new(5, 1.0), 42).unwrap();
        assert_eq!(a, b);
        let c = gen_linear1(&Linear1Config::new(5, 1.0), 43).unwrap();
        assert_ne!(a.points(), c.points());
        assert_eq!(
            gen_circles_ad(&CirclesConfig::default(), 7).unwrap(),
            gen_circles_ad(&CirclesConfig::default(), 7).unwrap()
        );
    }

    #[test]
    fn class_count_rounding() {
        assert_eq!(class_counts(100, 0.9).unwrap(), (90, 10));
        assert_eq!(class_counts(100, 0.29).unwrap(), (29, 71));
        assert_eq!(class_counts(7, 0.5).unwrap(), (3, 4));
        assert!(class_counts(10, 1.5).is_err());
    }

    #[test]
    fn csv_round_trip_and_errors() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("xor.csv");
        let xor = gen_logic(Gate::Xor);
        save_csv(&xor, &p).unwrap();
        let text = fs::read_to_string(&p).unwrap();
        assert_eq!(text.lines().count(), 5);
        assert!(text.starts_with("x1,x2,label\n"));
        assert_eq!(load_csv(&p).unwrap(), xor);

        let noisy = gen_linear1(&Linear1Config::new(4, 1.3), 2).unwrap();
        let q = dir.path().join("lin.csv");
        save_csv(&noisy, &q).unwrap();
        assert_eq!(load_csv(&q).unwrap(), noisy);

        let empty = dir.path().join("empty.csv");
        fs::write(&empty, "").unwrap();
        assert!(load_csv(&empty)
            .unwrap_err()
            .to_string()
            .contains("no data rows"));
        let header_only = dir.path().join("h.csv");
        fs::write(&header_only, "x1,label\n").unwrap();
        assert!(load_csv(&header_only)
            .unwrap_err()
            .to_string()
            .contains("no data rows"));

        let bad = dir.path().join("bad.csv");
        fs::write(&bad, "x1,x2,label\n0,1,1\n2,abc,0\n").unwrap();
        let err = load_csv(&bad).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }), "{err}");
        fs::write(&bad, "x1,x2,label\n0,1,1\n2,3\n").unwrap();
        assert!(matches!(
            load_csv(&bad).unwrap_err(),
            Error::Parse { line: 3, .. }
        ));
        fs::write(&bad, "x1,x2,label\n0,1,2\n").unwrap();
        assert!(matches!(
            load_csv(&bad).unwrap_err(),
            Error::Parse { line: 2, .. }
        ));
    }
}
