//! Numerical probes of separator geometry: closed decision regions formed by
//! intersecting hypotheses, shattering of small planar point sets, and the
//! collapse of parallel twin planes into one halfspace rule.

use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::model::{Hyperplane, MarginClassifier, Polarity, TwinPair};
use crate::rng::{normal_vec, seeded, uniform, SeededRng};
use crate::vecops::{dot, norm, sq_dist};

/// Largest dimension accepted by [`closing_probe`].
pub const MAX_PROBE_DIM: usize = 6;

/// Colinearity tolerance on 2×2 determinants.
pub const COLINEAR_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    /// `simplex` picks normals of a randomly rotated regular simplex instead
    /// of independent random directions.
    Halfspace {
        simplex: bool,
    },
    Equality,
    Rbf,
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Family::Halfspace { simplex: true } => f.write_str("halfspace-simplex"),
            Family::Halfspace { simplex: false } => f.write_str("halfspace"),
            Family::Equality => f.write_str("equality"),
            Family::Rbf => f.write_str("rbf"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Bounded,
    Unbounded,
    Empty,
    /// Neither within the noise band nor growing ten-fold.
    Inconclusive,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Bounded => "bounded",
            Verdict::Unbounded => "unbounded",
            Verdict::Empty => "empty",
            Verdict::Inconclusive => "inconclusive",
        })
    }
}

/// One hypothesis' positive region.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Constraint {
    /// `|wᵀx + b| ≤ eps`
    Slab { w: Vec<f64>, b: f64, eps: f64 },
    /// `wᵀx ≤ c`
    HalfSpace { w: Vec<f64>, c: f64 },
    /// `‖x − center‖² ≤ radius_sq`
    Ball { center: Vec<f64>, radius_sq: f64 },
}

impl Constraint {
    pub fn contains(&self, x: &[f64]) -> bool {
        match self {
            Constraint::Slab { w, b, eps } => (dot(w, x) + b).abs() <= *eps,
            Constraint::HalfSpace { w, c } => dot(w, x) <= *c,
            Constraint::Ball { center, radius_sq } => sq_dist(center, x) <= *radius_sq,
        }
    }

    fn dim(&self) -> usize {
        match self {
            Constraint::Slab { w, .. } | Constraint::HalfSpace { w, .. } => w.len(),
            Constraint::Ball { center, .. } => center.len(),
        }
    }
}

/// Intersection of positive regions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Region {
    dim: usize,
    constraints: Vec<Constraint>,
}

impl Region {
    pub fn new(dim: usize, constraints: Vec<Constraint>) -> Result<Self> {
        if constraints.is_empty() {
            return Err(Error::invalid("region needs at least one constraint"));
        }
        for c in &constraints {
            check_dim(dim, c.dim())?;
        }
        Ok(Self { dim, constraints })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        self.constraints.iter().all(|c| c.contains(x))
    }
}

fn unit(v: Vec<f64>) -> Vec<f64> {
    let n = norm(&v);
    v.into_iter().map(|x| x / n).collect()
}

fn random_unit(rng: &mut SeededRng, n: usize) -> Vec<f64> {
    loop {
        let v = normal_vec(rng, n);
        if norm(&v) > 1e-12 {
            return unit(v);
        }
    }
}

/// Orthonormal rows obtained by Gram-Schmidt on Gaussian draws.
fn random_rotation(rng: &mut SeededRng, n: usize) -> Vec<Vec<f64>> {
    let mut rows: Vec<Vec<f64>> = Vec::with_capacity(n);
    while rows.len() < n {
        let mut v = normal_vec(rng, n);
        for r in &rows {
            let p = dot(&v, r);
            v.iter_mut().zip(r).for_each(|(a, b)| *a -= p * b);
        }
        if norm(&v) > 1e-8 {
            rows.push(unit(v));
        }
    }
    rows
}

/// Unit vectors from the centroid of a regular n-simplex to its vertices.
///
/// They sum to zero and any `n` of them are linearly independent, so the
/// halfspaces `vᵢᵀx ≤ 1` intersect in a bounded simplex.
pub fn simplex_normals(n: usize) -> Vec<Vec<f64>> {
    // Centred standard basis of R^{n+1}, expressed in an orthonormal basis of
    // the sum-zero hyperplane.
    let k = n + 1;
    let centred: Vec<Vec<f64>> = (0..k)
        .map(|i| {
            (0..k)
                .map(|j| if i == j { 1.0 } else { 0.0 } - 1.0 / k as f64)
                .collect()
        })
        .collect();
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(n);
    for v in centred.iter().take(n) {
        let mut u = v.clone();
        for b in &basis {
            let p = dot(&u, b);
            u.iter_mut().zip(b).for_each(|(a, c)| *a -= p * c);
        }
        basis.push(unit(u));
    }
    centred
        .iter()
        .map(|v| unit(basis.iter().map(|b| dot(v, b)).collect()))
        .collect()
}

/// Draws the hypotheses whose positive regions are intersected by a probe.
///
/// - equality: unit normals, margin 1, every plane through a shared random
///   point `p ~ N(0, I)`;
/// - RBF: balls where `exp(−‖x − p‖²) ≥ 1/2`;
/// - halfspace: `vᵢᵀ(x − p) ≤ 1` with simplex or free random unit normals.
pub fn random_region(family: Family, n: usize, count: usize, seed: u64) -> Result<Region> {
    if n == 0 {
        return Err(Error::invalid("dimension must be >= 1"));
    }
    if count == 0 {
        return Err(Error::invalid("count must be >= 1"));
    }
    let mut rng = seeded(seed, 0);
    let p = normal_vec(&mut rng, n);
    let constraints = match family {
        Family::Equality => (0..count)
            .map(|_| {
                let w = random_unit(&mut rng, n);
                let b = -dot(&w, &p);
                Constraint::Slab { w, b, eps: 1.0 }
            })
            .collect(),
        Family::Rbf => (0..count)
            .map(|_| {
                let c: Vec<f64> = p
                    .iter()
                    .zip(normal_vec(&mut rng, n))
                    .map(|(a, d)| a + 0.5 * d)
                    .collect();
                Constraint::Ball {
                    center: c,
                    radius_sq: std::f64::consts::LN_2,
                }
            })
            .collect(),
        Family::Halfspace { simplex } => {
            let normals: Vec<Vec<f64>> = if simplex {
                if count > n + 1 {
                    return Err(Error::invalid(format!(
                        "a simplex in {n} dimensions has {} facets, asked for {count}",
                        n + 1
                    )));
                }
                let rot = random_rotation(&mut rng, n);
                simplex_normals(n)
                    .into_iter()
                    .take(count)
                    .map(|v| rot.iter().map(|r| dot(r, &v)).collect())
                    .collect()
            } else {
                (0..count).map(|_| random_unit(&mut rng, n)).collect()
            };
            normals
                .into_iter()
                .map(|w| {
                    let c = 1.0 + dot(&w, &p);
                    Constraint::HalfSpace { w, c }
                })
                .collect()
        }
    };
    Region::new(n, constraints)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClosingProbeReport {
    pub family: Family,
    pub dim: usize,
    pub count: usize,
    pub radii: Vec<f64>,
    pub volumes: Vec<f64>,
    pub std_errors: Vec<f64>,
    /// Region hits per shell; the first entry counts the innermost box.
    pub hits: Vec<u64>,
    pub verdict: Verdict,
}

impl ClosingProbeReport {
    /// One line per probe: family, n, count, verdict, then `R:volume±se`.
    pub fn to_record(&self) -> String {
        let vols: Vec<String> = self
            .radii
            .iter()
            .zip(&self.volumes)
            .zip(&self.std_errors)
            .map(|((r, v), s)| format!("{r}:{v:.6e}±{s:.3e}"))
            .collect();
        format!(
            "family={} n={} count={} verdict={} volumes={}",
            self.family,
            self.dim,
            self.count,
            self.verdict,
            vols.join(",")
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProbeConfig {
    pub radii: Vec<f64>,
    pub samples_per_box: usize,
}

impl Default for ProbeConfig {
    fn default() -> Self {
        Self {
            radii: vec![10.0, 20.0, 40.0, 80.0, 160.0],
            samples_per_box: 400_000,
        }
    }
}

fn sample_box(rng: &mut SeededRng, r: f64, x: &mut [f64]) {
    for v in x.iter_mut() {
        *v = uniform(rng, -r, r);
    }
}

/// Estimates the region's volume inside a ladder of boxes `[−R, R]ⁿ`.
///
/// The innermost box is sampled uniformly; every further box adds the
/// hit fraction of its shell (the box minus the previous box, sampled by
/// rejection) times the shell volume. This gives the same expectation as
/// sampling each box directly but keeps far shells informative.
pub fn probe_region(
    region: &Region,
    cfg: &ProbeConfig,
    seed: u64,
) -> Result<(Vec<f64>, Vec<f64>, Vec<u64>)> {
    if cfg.radii.len() < 2 {
        return Err(Error::invalid("radius ladder needs at least two radii"));
    }
    if cfg.radii[0] <= 0.0 || cfg.radii.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::invalid(
            "radii must be positive and strictly increasing",
        ));
    }
    if cfg.samples_per_box == 0 {
        return Err(Error::invalid("samples_per_box must be >= 1"));
    }
    let n = region.dim();
    let nf = cfg.samples_per_box as f64;
    let mut rng = seeded(seed, 1);
    let mut x = vec![0.0; n];
    let (mut vol, mut var) = (0.0, 0.0);
    let mut inner = 0.0f64;
    let (mut volumes, mut errors, mut hits) = (vec![], vec![], vec![]);
    for &r in &cfg.radii {
        let mut h = 0u64;
        for _ in 0..cfg.samples_per_box {
            loop {
                sample_box(&mut rng, r, &mut x);
                if x.iter().any(|v| v.abs() > inner) {
                    break;
                }
            }
            if region.contains(&x) {
                h += 1;
            }
        }
        let shell = (2.0 * r).powi(n as i32) - (2.0 * inner).powi(n as i32);
        let p = h as f64 / nf;
        vol += p * shell;
        var += shell * shell * p * (1.0 - p) / nf;
        volumes.push(vol);
        errors.push(var.sqrt());
        hits.push(h);
        inner = r;
    }
    Ok((volumes, errors, hits))
}

/// Classifies a volume ladder.
///
/// Empty without any hit. Bounded when no sample of the outermost shell
/// lands in the region, so the volume has stopped growing. Unbounded when
/// the volume grows more than ten-fold from the first to the last radius.
pub fn classify_volumes(volumes: &[f64], hits: &[u64]) -> Verdict {
    if hits.iter().all(|&h| h == 0) {
        return Verdict::Empty;
    }
    let k = volumes.len() - 1;
    if hits[k] == 0 {
        Verdict::Bounded
    } else if volumes[k] > 10.0 * volumes[0] {
        Verdict::Unbounded
    } else {
        Verdict::Inconclusive
    }
}

pub fn closing_probe_region(
    region: &Region,
    family: Family,
    cfg: &ProbeConfig,
    seed: u64,
) -> Result<ClosingProbeReport> {
    let (volumes, std_errors, hits) = probe_region(region, cfg, seed)?;
    let verdict = classify_volumes(&volumes, &hits);
    Ok(ClosingProbeReport {
        family,
        dim: region.dim(),
        count: region.constraints().len(),
        radii: cfg.radii.clone(),
        volumes,
        std_errors,
        hits,
        verdict,
    })
}

/// Probes the intersection of `count` random hypotheses of `family` in `n`
/// dimensions.
pub fn closing_probe(
    family: Family,
    n: usize,
    count: usize,
    seed: u64,
    cfg: &ProbeConfig,
) -> Result<ClosingProbeReport> {
    if n > MAX_PROBE_DIM {
        return Err(Error::invalid(format!(
            "dimension {n} exceeds {MAX_PROBE_DIM}: Monte-Carlo volumes are uninformative there"
        )));
    }
    let region = random_region(family, n, count, seed)?;
    closing_probe_region(&region, family, cfg, seed)
}

fn cross(o: [f64; 2], a: [f64; 2], b: [f64; 2]) -> f64 {
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
}

fn check_points(points: &[[f64; 2]], labels: &[bool]) -> Result<()> {
    check_dim(points.len(), labels.len())?;
    for (i, p) in points.iter().enumerate() {
        if p.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid(format!("point {i} is not finite")));
        }
        if points[..i].contains(p) {
            return Err(Error::invalid(format!(
                "point {i} duplicates an earlier point"
            )));
        }
    }
    Ok(())
}

/// A line containing exactly the points in `inside` (by index), if any.
fn line_through_exactly(points: &[[f64; 2]], inside: &[bool]) -> Option<([f64; 2], f64)> {
    let ins: Vec<[f64; 2]> = points
        .iter()
        .zip(inside)
        .filter(|(_, &s)| s)
        .map(|(p, _)| *p)
        .collect();
    let outs: Vec<[f64; 2]> = points
        .iter()
        .zip(inside)
        .filter(|(_, &s)| !s)
        .map(|(p, _)| *p)
        .collect();
    let from_dir = |a: [f64; 2], d: [f64; 2]| {
        let l = d[0].hypot(d[1]);
        let w = [-d[1] / l, d[0] / l];
        (w, -(w[0] * a[0] + w[1] * a[1]))
    };
    match ins.len() {
        0 => {
            // Vertical line right of every point.
            let xmax = points
                .iter()
                .map(|p| p[0])
                .fold(f64::NEG_INFINITY, f64::max);
            Some(([1.0, 0.0], -(xmax + 1.0)))
        }
        1 => {
            // m+1 candidate directions: each other point rules out at most one.
            let a = ins[0];
            let k = outs.len() + 1;
            (0..k)
                .map(|i| {
                    let th = std::f64::consts::PI * i as f64 / k as f64;
                    [th.cos(), th.sin()]
                })
                .map(|d| {
                    let clear = outs
                        .iter()
                        .map(|q| cross(a, [a[0] + d[0], a[1] + d[1]], *q).abs())
                        .fold(f64::INFINITY, f64::min);
                    (clear, d)
                })
                .max_by(|x, y| x.0.total_cmp(&y.0))
                .filter(|(clear, _)| *clear > COLINEAR_TOL)
                .map(|(_, d)| from_dir(a, d))
        }
        _ => {
            // Anchor on the farthest pair for conditioning.
            let (mut a, mut b, mut best) = (ins[0], ins[1], -1.0);
            for i in 0..ins.len() {
                for j in i + 1..ins.len() {
                    let d = sq_dist(&ins[i], &ins[j]);
                    if d > best {
                        (a, b, best) = (ins[i], ins[j], d);
                    }
                }
            }
            let l = best.sqrt();
            let on = |q: &[f64; 2]| cross(a, b, *q).abs() / l <= COLINEAR_TOL;
            if ins.iter().all(on) && !outs.iter().any(on) {
                Some(from_dir(a, [b[0] - a[0], b[1] - a[1]]))
            } else {
                None
            }
        }
    }
}

/// A separating line `(w, b, polarity)` with `‖w‖ = 1`, if the labeling is
/// realizable by a strict equality separator.
pub fn strict_es_witness_2d(
    points: &[[f64; 2]],
    labels: &[bool],
) -> Result<Option<([f64; 2], f64, Polarity)>> {
    check_points(points, labels)?;
    for pol in [Polarity::InsidePositive, Polarity::OutsidePositive] {
        let inside: Vec<bool> = labels
            .iter()
            .map(|&l| {
                if pol == Polarity::InsidePositive {
                    l
                } else {
                    !l
                }
            })
            .collect();
        if let Some((w, b)) = line_through_exactly(points, &inside) {
            return Ok(Some((w, b, pol)));
        }
    }
    Ok(None)
}

/// Whether some strict equality separator of either polarity realizes
/// `labels` on distinct planar `points`.
pub fn strict_es_feasible_2d(points: &[[f64; 2]], labels: &[bool]) -> Result<bool> {
    Ok(strict_es_witness_2d(points, labels)?.is_some())
}

/// A margin-`eps` classifier realizing `labels`, built from the strict
/// witness by scaling the normal until every outside point clears the margin.
/// The result is verified point by point.
pub fn margin_witness_2d(
    points: &[[f64; 2]],
    labels: &[bool],
    eps: f64,
) -> Result<Option<MarginClassifier>> {
    let Some((w, b, pol)) = strict_es_witness_2d(points, labels)? else {
        return Ok(None);
    };
    let inside = |l: bool| {
        if pol == Polarity::InsidePositive {
            l
        } else {
            !l
        }
    };
    let min_out = points
        .iter()
        .zip(labels)
        .filter(|(_, &l)| !inside(l))
        .map(|(p, _)| (w[0] * p[0] + w[1] * p[1] + b).abs())
        .fold(f64::INFINITY, f64::min);
    let scale = if min_out.is_finite() {
        2.0 * eps.max(1e-300) / min_out
    } else {
        1.0
    };
    let plane = Hyperplane::new(vec![w[0] * scale, w[1] * scale], b * scale)?;
    let clf = MarginClassifier::new(plane, eps, pol)?;
    for (p, &l) in points.iter().zip(labels) {
        if clf.decide(p)? != l {
            return Ok(None);
        }
    }
    Ok(Some(clf))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShatterReport {
    pub points: Vec<[f64; 2]>,
    /// Indexed by labeling bitmask: bit `i` is the label of point `i`.
    pub feasible: Vec<bool>,
    pub shattered: bool,
    pub witness: Option<Vec<bool>>,
}

/// Largest point set accepted by [`shatter_search`].
pub const MAX_SHATTER_POINTS: usize = 8;

fn labeling(mask: usize, m: usize) -> Vec<bool> {
    (0..m).map(|i| mask >> i & 1 == 1).collect()
}

fn shatter_with(
    points: &[[f64; 2]],
    feasible: impl Fn(&[bool]) -> Result<bool>,
) -> Result<ShatterReport> {
    let m = points.len();
    if m > MAX_SHATTER_POINTS {
        return Err(Error::invalid(format!(
            "at most {MAX_SHATTER_POINTS} points, got {m}"
        )));
    }
    check_points(points, &vec![false; m])?;
    let bits = (0..1usize << m)
        .map(|mask| feasible(&labeling(mask, m)))
        .collect::<Result<Vec<bool>>>()?;
    let witness = bits.iter().position(|&f| !f).map(|mask| labeling(mask, m));
    Ok(ShatterReport {
        points: points.to_vec(),
        shattered: witness.is_none(),
        feasible: bits,
        witness,
    })
}

/// Enumerates all `2^m` labelings with the strict separator.
pub fn shatter_search(points: &[[f64; 2]]) -> Result<ShatterReport> {
    shatter_with(points, |l| strict_es_feasible_2d(points, l))
}

/// Enumerates all labelings with margin-`eps` separators.
pub fn shatter_search_margin(points: &[[f64; 2]], eps: f64) -> Result<ShatterReport> {
    shatter_with(points, |l| Ok(margin_witness_2d(points, l, eps)?.is_some()))
}

/// `m` equally spaced points on the unit circle.
pub fn roots_of_unity(m: usize) -> Vec<[f64; 2]> {
    (0..m)
        .map(|k| {
            let th = 2.0 * std::f64::consts::PI * k as f64 / m as f64;
            [th.cos(), th.sin()]
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LrtReport {
    pub trials: usize,
    pub samples: usize,
    pub agreements: u64,
    pub disagreements: u64,
    /// Points within the tolerance band of the collapsed plane.
    pub skipped: u64,
}

impl LrtReport {
    pub fn passed(&self) -> bool {
        self.disagreements == 0
    }
}

/// Band around the collapsed plane where the two rules are not compared.
pub const LRT_BAND: f64 = 1e-9;

/// Compares the twin distance-ratio rule with its collapsed halfspace on
/// random parallel pairs (`t = 1`, distinct biases, dimension 1 to 6).
pub fn lrt_equivalence_check(seed: u64, trials: usize, samples: usize) -> Result<LrtReport> {
    let mut rng = seeded(seed, 0);
    let mut report = LrtReport {
        trials,
        samples,
        agreements: 0,
        disagreements: 0,
        skipped: 0,
    };
    for _ in 0..trials {
        let n = rng.random_range(1..=6usize);
        let w = normal_vec(&mut rng, n);
        let (b1, b2) = loop {
            let b1 = 3.0 * crate::rng::normal(&mut rng);
            let b2 = 3.0 * crate::rng::normal(&mut rng);
            if b1 != b2 {
                break (b1, b2);
            }
        };
        let pair = TwinPair::new(
            Hyperplane::new(w.clone(), b1)?,
            Hyperplane::new(w, b2)?,
            1.0,
        )?;
        let (plane, orient) = pair.parallel_hyperplane()?;
        for _ in 0..samples {
            let x: Vec<f64> = (0..n).map(|_| uniform(&mut rng, -10.0, 10.0)).collect();
            let z = plane.affine(&x)?;
            if z.abs() <= LRT_BAND {
                report.skipped += 1;
                continue;
            }
            if pair.decide(&x)? == (orient * z >= 0.0) {
                report.agreements += 1;
            } else {
                report.disagreements += 1;
            }
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> ProbeConfig {
        ProbeConfig {
            radii: vec![10.0, 20.0, 40.0, 80.0, 160.0],
            samples_per_box: 100_000,
        }
    }

    #[test]
    fn simplex_normals_are_regular() {
        for n in 1..=5 {
            let v = simplex_normals(n);
            assert_eq!(v.len(), n + 1);
            for i in 0..=n {
                assert!((norm(&v[i]) - 1.0).abs() < 1e-12);
                for j in 0..i {
                    assert!((dot(&v[i], &v[j]) + 1.0 / n as f64).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn explicit_triangle_and_wedge() {
        // Triangle (0,0),(1,0),(0,1): x ≥ 0, y ≥ 0, x + y ≤ 1; area 1/2.
        let tri = Region::new(
            2,
            vec![
                Constraint::HalfSpace {
                    w: vec![-1.0, 0.0],
                    c: 0.0,
                },
                Constraint::HalfSpace {
                    w: vec![0.0, -1.0],
                    c: 0.0,
                },
                Constraint::HalfSpace {
                    w: vec![1.0, 1.0],
                    c: 1.0,
                },
            ],
        )
        .unwrap();
        assert!(tri.contains(&[0.2, 0.2]) && !tri.contains(&[0.8, 0.8]));
        let fam = Family::Halfspace { simplex: true };
        let r = closing_probe_region(&tri, fam, &cfg(), 1).unwrap();
        assert_eq!(r.verdict, Verdict::Bounded, "{}", r.to_record());
        assert!((r.volumes[0] - 0.5).abs() < 4.0 * r.std_errors[0]);

        // Wedge: all three normals point into the lower half-plane.
        let wedge = Region::new(
            2,
            vec![
                Constraint::HalfSpace {
                    w: vec![-1.0, -1.0],
                    c: 0.0,
                },
                Constraint::HalfSpace {
                    w: vec![1.0, -1.0],
                    c: 0.0,
                },
                Constraint::HalfSpace {
                    w: vec![0.0, -1.0],
                    c: 1.0,
                },
            ],
        )
        .unwrap();
        assert!(wedge.contains(&[0.0, 100.0]));
        let r =
            closing_probe_region(&wedge, Family::Halfspace { simplex: false }, &cfg(), 1).unwrap();
        assert_eq!(r.verdict, Verdict::Unbounded, "{}", r.to_record());
    }

    #[test]
    fn probe_examples() {
        let r = closing_probe(Family::Rbf, 2, 1, 3, &cfg()).unwrap();
        assert_eq!(r.verdict, Verdict::Bounded);
        // Disc of radius √ln2.
        let area = std::f64::consts::PI * std::f64::consts::LN_2;
        assert!((r.volumes[0] - area).abs() < 4.0 * r.std_errors[0]);
        assert_eq!(
            closing_probe(Family::Equality, 2, 1, 3, &cfg())
                .unwrap()
                .verdict,
            Verdict::Unbounded
        );
        assert!(closing_probe(Family::Rbf, 7, 1, 0, &cfg()).is_err());
        assert!(closing_probe(Family::Rbf, 2, 0, 0, &cfg()).is_err());
        assert!(closing_probe(Family::Halfspace { simplex: true }, 2, 4, 0, &cfg()).is_err());
    }

    #[test]
    fn disjoint_balls_are_empty() {
        let r = Region::new(
            2,
            vec![
                Constraint::Ball {
                    center: vec![0.0, 0.0],
                    radius_sq: 1.0,
                },
                Constraint::Ball {
                    center: vec![5.0, 0.0],
                    radius_sq: 1.0,
                },
            ],
        )
        .unwrap();
        assert_eq!(
            closing_probe_region(&r, Family::Rbf, &cfg(), 0)
                .unwrap()
                .verdict,
            Verdict::Empty
        );
    }

    #[test]
    fn feasibility_examples() {
        let xor = [[0.0, 0.0], [0.0, 1.0], [1.0, 0.0], [1.0, 1.0]];
        assert!(strict_es_feasible_2d(&xor, &[false, true, true, false]).unwrap());
        assert!(shatter_search(&roots_of_unity(5)).unwrap().shattered);
        // Two non-colinear triples, each labeled as one class.
        let six = [
            [0.0, 0.0],
            [3.0, 0.2],
            [1.0, 2.0],
            [5.0, 1.0],
            [2.0, 4.5],
            [4.0, 3.0],
        ];
        let l = [true, false, true, false, true, false];
        assert!(!strict_es_feasible_2d(&six, &l).unwrap());
        assert!(strict_es_feasible_2d(&[[0.0, 0.0], [0.0, 0.0]], &[true, false]).is_err());
        let mut with_origin = xor.to_vec();
        with_origin.push([0.5, 0.5]);
        assert!(shatter_search(&with_origin).is_ok());
    }

    #[test]
    fn margin_shattering_of_pentagon() {
        let r = shatter_search_margin(&roots_of_unity(5), 1e-6).unwrap();
        assert!(r.shattered);
        assert_eq!(r.feasible.len(), 32);
    }

    #[test]
    fn lrt_small_run() {
        let r = lrt_equivalence_check(0, 10, 1000).unwrap();
        assert!(r.passed());
        assert_eq!(r.agreements + r.skipped, 10_000);
    }
}
