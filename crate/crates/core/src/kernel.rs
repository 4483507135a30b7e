//! Shallow equality separator over an RBF kernel expansion.
//!
//! `f(x) = Σᵢ αᵢ k(xᵢ, x) + b` with `k(u, v) = exp(−γ‖u − v‖²)`, scored as
//! `bump(f(x))`. The anchors `xᵢ` are the training points; only `α` and `b`
//! are learned.

use serde::{Deserialize, Serialize};

use crate::data::LabeledDataset;
use crate::error::{check_dim, Error, Result};
use crate::model::Polarity;
use crate::optim::{adam_minimize, bfgs_minimize, Method, OptimConfig, Trace};
use crate::rng::{normal_vec, seeded};
use crate::units::{bump, bump_grad, loss, loss_grad, BumpParams, LossKind};
use crate::vecops::sq_dist;
use crate::Scorer;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KernelMachine {
    dim: usize,
    anchors: Vec<f64>,
    pub alpha: Vec<f64>,
    pub b: f64,
    pub gamma: f64,
    pub bump: BumpParams,
    pub polarity: Polarity,
}

/// `1 / (n · Var(X))` with the variance pooled over all feature values.
pub fn default_gamma(data: &LabeledDataset) -> Result<f64> {
    let var = data.pooled_variance();
    if !(var > 0.0) {
        return Err(Error::Degenerate("all feature values are identical".into()));
    }
    Ok(1.0 / (data.dim() as f64 * var))
}

impl KernelMachine {
    pub fn new(
        anchors: &LabeledDataset,
        alpha: Vec<f64>,
        b: f64,
        gamma: f64,
        bump: BumpParams,
        polarity: Polarity,
    ) -> Result<Self> {
        check_dim(anchors.len(), alpha.len())?;
        if !(gamma > 0.0) || !gamma.is_finite() {
            return Err(Error::invalid(format!("gamma must be > 0, got {gamma}")));
        }
        Ok(Self {
            dim: anchors.dim(),
            anchors: anchors.points().to_vec(),
            alpha,
            b,
            gamma,
            bump,
            polarity,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn anchor(&self, i: usize) -> &[f64] {
        &self.anchors[i * self.dim..(i + 1) * self.dim]
    }

    pub fn n_anchors(&self) -> usize {
        self.alpha.len()
    }

    /// The kernel expansion `f(x)` before the bump.
    pub fn decision_function(&self, x: &[f64]) -> Result<f64> {
        check_dim(self.dim, x.len())?;
        let f: f64 = self
            .anchors
            .chunks_exact(self.dim)
            .zip(&self.alpha)
            .map(|(a, al)| al * (-self.gamma * sq_dist(a, x)).exp())
            .sum();
        Ok(f + self.b)
    }

    pub fn score(&self, x: &[f64]) -> Result<f64> {
        let s = bump(self.decision_function(x)?, self.bump);
        Ok(match self.polarity {
            Polarity::InsidePositive => s,
            Polarity::OutsidePositive => 1.0 - s,
        })
    }
}

pub fn kernel_score(machine: &KernelMachine, x: &[f64]) -> Result<f64> {
    machine.score(x)
}

impl Scorer for KernelMachine {
    fn input_dim(&self) -> usize {
        self.dim
    }

    fn score(&self, x: &[f64]) -> Result<f64> {
        KernelMachine::score(self, x)
    }
}

fn gram(data: &LabeledDataset, gamma: f64) -> Vec<f64> {
    let m = data.len();
    let mut k = vec![0.0; m * m];
    for i in 0..m {
        k[i * m + i] = 1.0;
        for j in 0..i {
            let v = (-gamma * sq_dist(data.row(i), data.row(j))).exp();
            k[i * m + j] = v;
            k[j * m + i] = v;
        }
    }
    k
}

fn objective(
    k: &[f64],
    targets: &[f64],
    bump_p: BumpParams,
    kind: LossKind,
    params: &[f64],
) -> (f64, Vec<f64>) {
    let m = targets.len();
    let (b, alpha) = params.split_last().expect("m + 1 parameters");
    let mut grad = vec![0.0; m + 1];
    let mut total = 0.0;
    for i in 0..m {
        let row = &k[i * m..(i + 1) * m];
        let z: f64 = row.iter().zip(alpha).map(|(a, b)| a * b).sum::<f64>() + b;
        let s = bump(z, bump_p);
        total += loss(kind, s, targets[i]);
        let dz = loss_grad(kind, s, targets[i]) * bump_grad(z, bump_p);
        for (g, kij) in grad.iter_mut().zip(row) {
            *g += dz * kij;
        }
        grad[m] += dz;
    }
    let mf = m as f64;
    for g in &mut grad {
        *g /= mf;
    }
    (total / mf, grad)
}

/// Fits `α` and `b` by minimizing the mean loss of `bump(f(xᵢ))` against the
/// labels (label 1 inside the margin).
///
/// `α` starts as a standard normal draw scaled by `1/m` and `b` at zero.
pub fn fit_kernel_es(
    data: &LabeledDataset,
    gamma: f64,
    bump_p: BumpParams,
    kind: LossKind,
    cfg: &OptimConfig,
) -> Result<(KernelMachine, Trace)> {
    fit_kernel_es_with_polarity(data, gamma, bump_p, kind, Polarity::InsidePositive, cfg)
}

pub fn fit_kernel_es_with_polarity(
    data: &LabeledDataset,
    gamma: f64,
    bump_p: BumpParams,
    kind: LossKind,
    polarity: Polarity,
    cfg: &OptimConfig,
) -> Result<(KernelMachine, Trace)> {
    if data.len() < 2 {
        return Err(Error::Degenerate(
            "kernel fit needs at least two points".into(),
        ));
    }
    if data.rows().all(|r| r == data.row(0)) {
        return Err(Error::Degenerate(
            "all training points are identical".into(),
        ));
    }
    if !(gamma > 0.0) || !gamma.is_finite() {
        return Err(Error::invalid(format!("gamma must be > 0, got {gamma}")));
    }
    let m = data.len();
    let k = gram(data, gamma);
    let targets: Vec<f64> = data
        .labels()
        .iter()
        .map(|&l| match polarity {
            Polarity::InsidePositive => l as f64,
            Polarity::OutsidePositive => 1.0 - l as f64,
        })
        .collect();
    let mut init: Vec<f64> = normal_vec(&mut seeded(cfg.seed, 0), m)
        .into_iter()
        .map(|v| v / m as f64)
        .collect();
    init.push(0.0);
    let f = |p: &[f64]| objective(&k, &targets, bump_p, kind, p);
    let (params, trace) = match cfg.method {
        Method::Bfgs => bfgs_minimize(f, &init, cfg)?,
        Method::Adam => adam_minimize(f, &init, cfg)?,
    };
    let (b, alpha) = params.split_last().expect("m + 1 parameters");
    let machine = KernelMachine::new(data, alpha.to_vec(), *b, gamma, bump_p, polarity)?;
    Ok((machine, trace))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{Meta, Role};

    fn toy() -> LabeledDataset {
        LabeledDataset::from_rows(
            &[vec![0.0, 0.0], vec![1.0, 0.5], vec![-0.5, 2.0]],
            vec![1, 0, 1],
            Meta::new("toy", 0, Role::Train),
        )
        .unwrap()
    }

    #[test]
    fn zero_alpha_peak_everywhere() {
        let bp = BumpParams::new(0.25, 1.0).unwrap();
        let m = KernelMachine::new(
            &toy(),
            vec![0.0; 3],
            0.25,
            1.0,
            bp,
            Polarity::InsidePositive,
        )
        .unwrap();
        for x in [[0.0, 0.0], [9.0, -4.0], [0.3, 0.3]] {
            assert_eq!(m.score(&x).unwrap(), 1.0);
        }
        assert!(m.score(&[1.0]).is_err());
    }

    #[test]
    fn objective_gradient_matches_finite_differences() {
        let d = toy();
        let k = gram(&d, 0.7);
        let t = [1.0, 0.0, 1.0];
        let bp = BumpParams::centered(1.3).unwrap();
        let p = [0.4, -0.9, 1.7, 0.2];
        for kind in [LossKind::Mse, LossKind::Logistic] {
            let (_, g) = objective(&k, &t, bp, kind, &p);
            for i in 0..4 {
                let h = 1e-6;
                let (mut a, mut b) = (p, p);
                a[i] += h;
                b[i] -= h;
                let fd = (objective(&k, &t, bp, kind, &a).0 - objective(&k, &t, bp, kind, &b).0)
                    / (2.0 * h);
                assert!((fd - g[i]).abs() < 1e-7 * (1.0 + fd.abs()), "{fd} {}", g[i]);
            }
        }
    }

    #[test]
    fn degenerate_inputs_rejected() {
        let bp = BumpParams::centered(10.0).unwrap();
        let cfg = OptimConfig::bfgs(10, 0);
        let one =
            LabeledDataset::from_rows(&[vec![1.0, 1.0]], vec![1], Meta::new("t", 0, Role::Train))
                .unwrap();
        assert!(matches!(
            fit_kernel_es(&one, 1.0, bp, LossKind::Mse, &cfg),
            Err(Error::Degenerate(_))
        ));
        let same = LabeledDataset::from_rows(
            &[vec![1.0, 1.0], vec![1.0, 1.0]],
            vec![1, 0],
            Meta::new("t", 0, Role::Train),
        )
        .unwrap();
        assert!(fit_kernel_es(&same, 1.0, bp, LossKind::Mse, &cfg).is_err());
        assert!(default_gamma(&same).is_err());
    }

    #[test]
    fn all_normal_labels_fit_inside_margin() {
        let mut d = toy();
        d = LabeledDataset::new(2, d.points().to_vec(), vec![1, 1, 1], d.meta.clone()).unwrap();
        let bp = BumpParams::centered(10.0).unwrap();
        let (_, trace) =
            fit_kernel_es(&d, 1.0, bp, LossKind::Mse, &OptimConfig::bfgs(500, 3)).unwrap();
        assert!(trace.final_loss() < 1e-3, "{}", trace.final_loss());
    }
}
