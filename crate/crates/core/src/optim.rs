//! Gradient-based optimizers and training control.
//!
//! Objectives are closures returning `(value, gradient)` at a parameter
//! vector. Both optimizers are deterministic: the same objective, initial
//! point and configuration always produce the same trace.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::vecops::{dot, inf_norm, norm};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Adam,
    Bfgs,
}

pub const ADAM_BETA1: f64 = 0.9;
pub const ADAM_BETA2: f64 = 0.999;
pub const ADAM_EPS: f64 = 1e-8;

/// BFGS stops once an accepted step is shorter than this.
pub const BFGS_STEP_TOL: f64 = 1e-10;
/// BFGS stops once the gradient's largest component is below this.
pub const BFGS_GRAD_TOL: f64 = 1e-8;
/// Armijo sufficient-decrease constant.
pub const ARMIJO_C1: f64 = 1e-4;
/// Halvings tried before a line search is declared stalled.
pub const MAX_HALVINGS: usize = 50;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimConfig {
    pub method: Method,
    pub learning_rate: f64,
    /// Adam steps or BFGS iterations for plain minimization; epochs when
    /// driving [`early_stop_train`].
    pub max_epochs: usize,
    /// Epochs without validation improvement before stopping; 0 disables.
    pub patience: usize,
    pub validation_fraction: f64,
    /// Mini-batch size for epoch-based training; `None` is full batch.
    pub batch_size: Option<usize>,
    pub seed: u64,
    /// Seed of the train/validation split; `None` reuses `seed`. Fixing it
    /// lets re-initialized models share one split of the same data.
    pub split_seed: Option<u64>,
}

impl OptimConfig {
    pub fn adam(max_epochs: usize, seed: u64) -> Self {
        Self {
            method: Method::Adam,
            learning_rate: 1e-3,
            max_epochs,
            patience: 0,
            validation_fraction: 0.0,
            batch_size: None,
            seed,
            split_seed: None,
        }
    }

    pub fn bfgs(max_iterations: usize, seed: u64) -> Self {
        Self {
            method: Method::Bfgs,
            max_epochs: max_iterations,
            ..Self::adam(max_iterations, seed)
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.learning_rate > 0.0) || !self.learning_rate.is_finite() {
            return Err(Error::Config(format!(
                "learning rate must be > 0, got {}",
                self.learning_rate
            )));
        }
        if self.max_epochs == 0 {
            return Err(Error::Config("max_epochs must be positive".into()));
        }
        if !(0.0..1.0).contains(&self.validation_fraction) {
            return Err(Error::Config(format!(
                "validation fraction must be in [0,1), got {}",
                self.validation_fraction
            )));
        }
        if self.batch_size == Some(0) {
            return Err(Error::Config("batch size must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Status {
    /// Gradient below tolerance.
    GradientTolerance,
    /// Accepted step below tolerance.
    StepTolerance,
    /// Iteration budget exhausted.
    MaxIterations,
    /// Line search could not find a decrease.
    Stalled,
}

/// Objective values along an optimization run.
#[derive(Debug, Clone, PartialEq)]
pub struct Trace {
    /// Objective at the initial point followed by one entry per step.
    pub losses: Vec<f64>,
    pub iterations: usize,
    pub status: Status,
}

impl Trace {
    pub fn final_loss(&self) -> f64 {
        *self
            .losses
            .last()
            .expect("trace always holds the initial loss")
    }
}

/// Adam state for a parameter vector of fixed length.
#[derive(Debug, Clone)]
pub struct Adam {
    lr: f64,
    m: Vec<f64>,
    v: Vec<f64>,
    t: i32,
}

impl Adam {
    pub fn new(n: usize, lr: f64) -> Self {
        Self {
            lr,
            m: vec![0.0; n],
            v: vec![0.0; n],
            t: 0,
        }
    }

    pub fn step(&mut self, params: &mut [f64], grad: &[f64]) {
        debug_assert_eq!(params.len(), grad.len());
        self.t += 1;
        let c1 = 1.0 - ADAM_BETA1.powi(self.t);
        let c2 = 1.0 - ADAM_BETA2.powi(self.t);
        for i in 0..params.len() {
            self.m[i] = ADAM_BETA1 * self.m[i] + (1.0 - ADAM_BETA1) * grad[i];
            self.v[i] = ADAM_BETA2 * self.v[i] + (1.0 - ADAM_BETA2) * grad[i] * grad[i];
            let m_hat = self.m[i] / c1;
            let v_hat = self.v[i] / c2;
            params[i] -= self.lr * m_hat / (v_hat.sqrt() + ADAM_EPS);
        }
    }
}

fn check_finite(value: f64, grad: &[f64], epoch: usize) -> Result<()> {
    if !value.is_finite() {
        return Err(Error::NonFinite {
            what: "loss",
            epoch,
        });
    }
    if grad.iter().any(|g| !g.is_finite()) {
        return Err(Error::NonFinite {
            what: "gradient",
            epoch,
        });
    }
    Ok(())
}

/// Runs `cfg.max_epochs` full-gradient Adam steps.
pub fn adam_minimize<F>(
    mut objective: F,
    init: &[f64],
    cfg: &OptimConfig,
) -> Result<(Vec<f64>, Trace)>
where
    F: FnMut(&[f64]) -> (f64, Vec<f64>),
{
    cfg.validate()?;
    let mut params = init.to_vec();
    let mut adam = Adam::new(params.len(), cfg.learning_rate);
    let (mut value, mut grad) = objective(&params);
    check_finite(value, &grad, 0)?;
    let mut losses = vec![value];
    for epoch in 1..=cfg.max_epochs {
        adam.step(&mut params, &grad);
        (value, grad) = objective(&params);
        check_finite(value, &grad, epoch)?;
        losses.push(value);
    }
    Ok((
        params,
        Trace {
            losses,
            iterations: cfg.max_epochs,
            status: Status::MaxIterations,
        },
    ))
}

/// BFGS with an Armijo backtracking line search.
///
/// The inverse Hessian starts at the identity and is rescaled by `sᵀy/yᵀy`
/// after the first accepted step. Updates with non-positive curvature are
/// skipped, and a non-descent direction resets the approximation.
pub fn bfgs_minimize<F>(
    mut objective: F,
    init: &[f64],
    cfg: &OptimConfig,
) -> Result<(Vec<f64>, Trace)>
where
    F: FnMut(&[f64]) -> (f64, Vec<f64>),
{
    cfg.validate()?;
    let n = init.len();
    let mut x = init.to_vec();
    let (mut fx, mut g) = objective(&x);
    check_finite(fx, &g, 0)?;
    let mut losses = vec![fx];
    let mut h = identity(n);
    let mut scaled = false;

    let mut status = Status::MaxIterations;
    let mut iterations = 0;
    for iter in 1..=cfg.max_epochs {
        if inf_norm(&g) < BFGS_GRAD_TOL {
            status = Status::GradientTolerance;
            break;
        }
        let mut p = mat_vec_neg(&h, &g);
        let mut slope = dot(&g, &p);
        if !(slope < 0.0) {
            h = identity(n);
            p = g.iter().map(|v| -v).collect();
            slope = dot(&g, &p);
        }

        let mut alpha = 1.0;
        let mut accepted = None;
        for _ in 0..=MAX_HALVINGS {
            let trial: Vec<f64> = x.iter().zip(&p).map(|(xi, pi)| xi + alpha * pi).collect();
            let (ft, gt) = objective(&trial);
            if ft.is_finite() && ft <= fx + ARMIJO_C1 * alpha * slope && ft < fx {
                check_finite(ft, &gt, iter)?;
                accepted = Some((trial, ft, gt));
                break;
            }
            alpha *= 0.5;
        }
        let Some((x_new, f_new, g_new)) = accepted else {
            status = Status::Stalled;
            break;
        };
        iterations = iter;

        let s: Vec<f64> = x_new.iter().zip(&x).map(|(a, b)| a - b).collect();
        let y: Vec<f64> = g_new.iter().zip(&g).map(|(a, b)| a - b).collect();
        x = x_new;
        fx = f_new;
        g = g_new;
        losses.push(fx);

        if norm(&s) < BFGS_STEP_TOL {
            status = Status::StepTolerance;
            break;
        }
        let sy = dot(&s, &y);
        if sy > 1e-12 * norm(&s) * norm(&y) {
            if !scaled {
                let scale = sy / dot(&y, &y);
                for i in 0..n {
                    h[i * n + i] = scale;
                }
                scaled = true;
            }
            bfgs_update(&mut h, &s, &y, sy);
        }
    }
    Ok((
        x,
        Trace {
            losses,
            iterations,
            status,
        },
    ))
}

fn identity(n: usize) -> Vec<f64> {
    let mut h = vec![0.0; n * n];
    for i in 0..n {
        h[i * n + i] = 1.0;
    }
    h
}

fn mat_vec_neg(h: &[f64], g: &[f64]) -> Vec<f64> {
    let n = g.len();
    (0..n).map(|i| -dot(&h[i * n..(i + 1) * n], g)).collect()
}

/// `H ← (I - ρ s yᵀ) H (I - ρ y sᵀ) + ρ s sᵀ` with `ρ = 1/(sᵀy)`.
fn bfgs_update(h: &mut [f64], s: &[f64], y: &[f64], sy: f64) {
    let n = s.len();
    let rho = 1.0 / sy;
    let hy: Vec<f64> = (0..n).map(|i| dot(&h[i * n..(i + 1) * n], y)).collect();
    let yhy = dot(y, &hy);
    let coef = (1.0 + rho * yhy) * rho;
    for i in 0..n {
        for j in 0..n {
            h[i * n + j] += coef * s[i] * s[j] - rho * (hy[i] * s[j] + s[i] * hy[j]);
        }
    }
}

/// A model that can be trained one epoch at a time.
pub trait EpochTrainer {
    fn parameters(&self) -> Vec<f64>;

    fn set_parameters(&mut self, params: &[f64]);

    /// Runs one pass over the training data and returns its mean loss.
    fn train_epoch(&mut self, epoch: usize) -> Result<f64>;

    /// Mean loss on held-out data, or `None` without a validation split.
    fn validation_loss(&self) -> Option<Result<f64>>;
}

#[derive(Debug, Clone, PartialEq)]
pub struct EarlyStopReport {
    pub train_losses: Vec<f64>,
    pub val_losses: Vec<f64>,
    /// 1-based epoch whose parameters were restored, if validation was tracked.
    pub best_epoch: Option<usize>,
    pub epochs_run: usize,
    pub stopped_early: bool,
}

impl EarlyStopReport {
    pub fn best_val_loss(&self) -> Option<f64> {
        self.best_epoch.map(|e| self.val_losses[e - 1])
    }
}

/// Trains epoch by epoch, monitoring validation loss.
///
/// Stops after `cfg.patience` consecutive epochs without strict improvement
/// and always restores the parameters from the best validation epoch.
pub fn early_stop_train<T: EpochTrainer>(
    trainer: &mut T,
    cfg: &OptimConfig,
) -> Result<EarlyStopReport> {
    cfg.validate()?;
    let mut report = EarlyStopReport {
        train_losses: Vec::new(),
        val_losses: Vec::new(),
        best_epoch: None,
        epochs_run: 0,
        stopped_early: false,
    };
    let mut best: Option<(f64, Vec<f64>)> = None;
    let mut stale = 0;
    for epoch in 1..=cfg.max_epochs {
        let train = trainer.train_epoch(epoch)?;
        if !train.is_finite() {
            return Err(Error::NonFinite {
                what: "training loss",
                epoch,
            });
        }
        report.train_losses.push(train);
        report.epochs_run = epoch;

        let val = match trainer.validation_loss() {
            Some(v) => v?,
            None if cfg.patience > 0 => {
                return Err(Error::Config(
                    "early stopping needs a non-empty validation split".into(),
                ))
            }
            None => continue,
        };
        if !val.is_finite() {
            return Err(Error::NonFinite {
                what: "validation loss",
                epoch,
            });
        }
        report.val_losses.push(val);
        if best.as_ref().map_or(true, |(b, _)| val < *b) {
            best = Some((val, trainer.parameters()));
            report.best_epoch = Some(epoch);
            stale = 0;
        } else {
            stale += 1;
            if cfg.patience > 0 && stale >= cfg.patience {
                report.stopped_early = true;
                break;
            }
        }
    }
    if let Some((_, params)) = best {
        trainer.set_parameters(&params);
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn sphere(p: &[f64]) -> (f64, Vec<f64>) {
        (dot(p, p), p.iter().map(|v| 2.0 * v).collect())
    }

    fn rosenbrock(p: &[f64]) -> (f64, Vec<f64>) {
        let (x, y) = (p[0], p[1]);
        let f = (1.0 - x).powi(2) + 100.0 * (y - x * x).powi(2);
        let gx = -2.0 * (1.0 - x) - 400.0 * x * (y - x * x);
        let gy = 200.0 * (y - x * x);
        (f, vec![gx, gy])
    }

    #[test]
    fn adam_converges_on_bowl() {
        let mut cfg = OptimConfig::adam(5000, 0);
        cfg.learning_rate = 1e-2;
        let (p, trace) = adam_minimize(sphere, &[1.0, 1.0], &cfg).unwrap();
        assert!(norm(&p) < 1e-3, "{p:?}");
        assert_eq!(trace.losses.len(), 5001);
    }

    #[test]
    fn adam_leaves_constant_objective_alone() {
        let cfg = OptimConfig::adam(100, 0);
        let init = [0.3, -2.0, 7.0];
        let (p, _) = adam_minimize(|_| (4.0, vec![0.0; 3]), &init, &cfg).unwrap();
        assert_eq!(p, init);
    }

    #[test]
    fn adam_is_deterministic() {
        let cfg = OptimConfig::adam(500, 9);
        let a = adam_minimize(rosenbrock, &[-1.2, 1.0], &cfg).unwrap();
        let b = adam_minimize(rosenbrock, &[-1.2, 1.0], &cfg).unwrap();
        assert_eq!(a.0, b.0);
        let bits = |t: &Trace| t.losses.iter().map(|v| v.to_bits()).collect::<Vec<_>>();
        assert_eq!(bits(&a.1), bits(&b.1));
    }

    #[test]
    fn adam_reports_non_finite_epoch() {
        let cfg = OptimConfig::adam(10, 0);
        let mut calls = 0;
        let err = adam_minimize(
            |p| {
                calls += 1;
                if calls > 3 {
                    (f64::NAN, vec![0.0; p.len()])
                } else {
                    sphere(p)
                }
            },
            &[1.0],
            &cfg,
        )
        .unwrap_err();
        assert!(matches!(err, Error::NonFinite { epoch: 3, .. }), "{err}");
    }

    #[test]
    fn bfgs_solves_rosenbrock() {
        let cfg = OptimConfig::bfgs(200, 0);
        let (p, trace) = bfgs_minimize(rosenbrock, &[-1.2, 1.0], &cfg).unwrap();
        assert_abs_diff_eq!(p[0], 1.0, epsilon = 1e-6);
        assert_abs_diff_eq!(p[1], 1.0, epsilon = 1e-6);
        assert!(trace.iterations <= 200);
        assert_ne!(trace.status, Status::Stalled);
        for w in trace.losses.windows(2) {
            assert!(w[1] <= w[0]);
        }
    }

    #[test]
    fn bfgs_identity_hessian_quadratic() {
        let c = [3.0, -1.0, 0.5];
        let f = |p: &[f64]| {
            let d: Vec<f64> = p.iter().zip(&c).map(|(a, b)| a - b).collect();
            (0.5 * dot(&d, &d), d)
        };
        let cfg = OptimConfig::bfgs(100, 0);
        let (p, trace) = bfgs_minimize(f, &[0.0; 3], &cfg).unwrap();
        assert!(trace.iterations <= 2, "{trace:?}");
        for (a, b) in p.iter().zip(&c) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-12);
        }
    }

    #[test]
    fn bfgs_flags_stall() {
        // Reports a descent gradient but the value never decreases.
        let cfg = OptimConfig::bfgs(10, 0);
        let (_, trace) = bfgs_minimize(|p| (1.0, vec![1.0; p.len()]), &[0.0, 0.0], &cfg).unwrap();
        assert_eq!(trace.status, Status::Stalled);
        assert_eq!(trace.losses, vec![1.0]);
    }

    struct Scripted {
        val: Vec<f64>,
        epoch: usize,
        params: Vec<f64>,
        has_val: bool,
    }

    impl EpochTrainer for Scripted {
        fn parameters(&self) -> Vec<f64> {
            self.params.clone()
        }

        fn set_parameters(&mut self, params: &[f64]) {
            self.params = params.to_vec();
        }

        fn train_epoch(&mut self, epoch: usize) -> Result<f64> {
            self.epoch = epoch;
            self.params = vec![epoch as f64];
            Ok(1.0)
        }

        fn validation_loss(&self) -> Option<Result<f64>> {
            self.has_val
                .then(|| Ok(self.val[(self.epoch - 1).min(self.val.len() - 1)]))
        }
    }

    fn scripted(val: Vec<f64>) -> Scripted {
        Scripted {
            val,
            epoch: 0,
            params: vec![0.0],
            has_val: true,
        }
    }

    fn es_cfg(max_epochs: usize, patience: usize) -> OptimConfig {
        OptimConfig {
            patience,
            validation_fraction: 0.1,
            ..OptimConfig::adam(max_epochs, 0)
        }
    }

    #[test]
    fn early_stop_runs_full_when_improving() {
        let mut t = scripted((0..50).map(|i| 10.0 - i as f64 * 0.1).collect());
        let r = early_stop_train(&mut t, &es_cfg(50, 10)).unwrap();
        assert_eq!(r.epochs_run, 50);
        assert!(!r.stopped_early);
        assert_eq!(t.params, vec![50.0]);
    }

    #[test]
    fn early_stop_on_plateau_restores_first_epoch() {
        let mut t = scripted(vec![2.0; 100]);
        let r = early_stop_train(&mut t, &es_cfg(100, 10)).unwrap();
        assert_eq!(r.epochs_run, 11);
        assert!(r.stopped_early);
        assert_eq!(r.best_epoch, Some(1));
        assert_eq!(t.params, vec![1.0]);
    }

    #[test]
    fn early_stop_restores_minimum() {
        let mut t = scripted(vec![5.0, 3.0, 1.0, 4.0, 2.0, 6.0, 7.0]);
        let r = early_stop_train(&mut t, &es_cfg(7, 3)).unwrap();
        assert_eq!(r.best_epoch, Some(3));
        assert_eq!(r.epochs_run, 6);
        let min = r.val_losses.iter().cloned().fold(f64::INFINITY, f64::min);
        assert_eq!(r.best_val_loss(), Some(min));
        assert_eq!(t.params, vec![3.0]);
    }

    #[test]
    fn early_stop_needs_validation() {
        let mut t = scripted(vec![1.0]);
        t.has_val = false;
        assert!(matches!(
            early_stop_train(&mut t, &es_cfg(5, 2)),
            Err(Error::Config(_))
        ));
        let r = early_stop_train(&mut t, &es_cfg(5, 0)).unwrap();
        assert_eq!(r.epochs_run, 5);
        assert_eq!(r.best_epoch, None);
    }
}
