//! Linear equality separators trained through a bump activation.
//!
//! The model scores a point by `bump(wᵀx + b)`: close to one near the
//! hyperplane, decaying away from it. Training minimizes the mean loss of
//! that score against labels where 1 means "on the plane".

use serde::{Deserialize, Serialize};

use crate::data::LabeledDataset;
use crate::error::{check_dim, Error, Result};
use crate::model::{Hyperplane, MarginClassifier, Polarity};
use crate::optim::{adam_minimize, bfgs_minimize, Method, OptimConfig, Trace};
use crate::rng::{normal_vec, seeded};
use crate::units::{bump, bump_grad, loss, loss_grad, BumpParams, LossKind};
use crate::vecops::dot;
use crate::Scorer;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearEs {
    pub w: Vec<f64>,
    pub b: f64,
    pub bump: BumpParams,
    pub polarity: Polarity,
}

impl LinearEs {
    pub fn from_params(params: &[f64], bump: BumpParams, polarity: Polarity) -> Self {
        let (b, w) = params.split_last().expect("at least one parameter");
        Self {
            w: w.to_vec(),
            b: *b,
            bump,
            polarity,
        }
    }

    pub fn dim(&self) -> usize {
        self.w.len()
    }

    pub fn affine(&self, x: &[f64]) -> Result<f64> {
        check_dim(self.dim(), x.len())?;
        Ok(dot(&self.w, x) + self.b)
    }

    /// Probability-like score of the positive class.
    pub fn score(&self, x: &[f64]) -> Result<f64> {
        let s = bump(self.affine(x)?, self.bump);
        Ok(match self.polarity {
            Polarity::InsidePositive => s,
            Polarity::OutsidePositive => 1.0 - s,
        })
    }

    /// Thresholds the score at one half.
    pub fn predict(&self, x: &[f64]) -> Result<bool> {
        Ok(self.score(x)? >= 0.5)
    }

    pub fn misclassified(&self, data: &LabeledDataset) -> Result<usize> {
        let mut wrong = 0;
        for (x, &l) in data.rows().zip(data.labels()) {
            if self.predict(x)? != (l == 1) {
                wrong += 1;
            }
        }
        Ok(wrong)
    }

    /// The hard equality separator this model induces at score 0.5.
    ///
    /// The bump is at least one half exactly where `|z − μ| ≤ σ√(2 ln 2)`.
    pub fn margin_classifier(&self) -> Result<MarginClassifier> {
        let plane = Hyperplane::new(self.w.clone(), self.b - self.bump.mu)?;
        MarginClassifier::new(plane, self.bump.half_width_at(0.5), self.polarity)
    }
}

impl Scorer for LinearEs {
    fn input_dim(&self) -> usize {
        self.dim()
    }

    fn score(&self, x: &[f64]) -> Result<f64> {
        LinearEs::score(self, x)
    }
}

/// Mean loss of `bump(wᵀx + b)` against `targets` and its gradient with
/// respect to the packed parameters `[w…, b]`.
pub fn linear_es_objective(
    data: &LabeledDataset,
    targets: &[f64],
    bump_p: BumpParams,
    kind: LossKind,
    params: &[f64],
) -> (f64, Vec<f64>) {
    let n = data.dim();
    let (b, w) = params.split_last().expect("n + 1 parameters");
    let m = data.len() as f64;
    let mut total = 0.0;
    let mut grad = vec![0.0; n + 1];
    for (x, &t) in data.rows().zip(targets) {
        let z = dot(w, x) + b;
        let s = bump(z, bump_p);
        total += loss(kind, s, t);
        let dz = loss_grad(kind, s, t) * bump_grad(z, bump_p);
        for (g, xi) in grad.iter_mut().zip(x) {
            *g += dz * xi;
        }
        grad[n] += dz;
    }
    for g in &mut grad {
        *g /= m;
    }
    (total / m, grad)
}

/// Fits a linear equality separator.
///
/// With [`Polarity::OutsidePositive`] the label-0 class is placed on the
/// plane instead. Parameters start from `init` or, if absent, from a
/// standard normal draw seeded by `cfg.seed`.
pub fn fit_linear_es(
    data: &LabeledDataset,
    bump_p: BumpParams,
    kind: LossKind,
    polarity: Polarity,
    cfg: &OptimConfig,
    init: Option<&[f64]>,
) -> Result<(LinearEs, Trace)> {
    let n = data.dim();
    let init = match init {
        Some(p) => {
            check_dim(n + 1, p.len())?;
            p.to_vec()
        }
        None => normal_vec(&mut seeded(cfg.seed, 0), n + 1),
    };
    let targets: Vec<f64> = data
        .labels()
        .iter()
        .map(|&l| match polarity {
            Polarity::InsidePositive => l as f64,
            Polarity::OutsidePositive => 1.0 - l as f64,
        })
        .collect();
    let objective = |p: &[f64]| linear_es_objective(data, &targets, bump_p, kind, p);
    let (params, trace) = match cfg.method {
        Method::Bfgs => bfgs_minimize(objective, &init, cfg)?,
        Method::Adam => adam_minimize(objective, &init, cfg)?,
    };
    if params.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite {
            what: "parameters",
            epoch: trace.iterations,
        });
    }
    Ok((LinearEs::from_params(&params, bump_p, polarity), trace))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{gen_logic, Gate};

    fn bp(s: f64) -> BumpParams {
        BumpParams::centered(s).unwrap()
    }

    #[test]
    fn objective_gradient_matches_finite_differences() {
        let data = gen_logic(Gate::Xor);
        let t: Vec<f64> = data.labels().iter().map(|&l| l as f64).collect();
        let p = [0.7, -1.3, 0.4];
        for kind in [LossKind::Mse, LossKind::Logistic] {
            let (_, g) = linear_es_objective(&data, &t, bp(1.5), kind, &p);
            for k in 0..3 {
                let h = 1e-6;
                let mut a = p;
                let mut b = p;
                a[k] += h;
                b[k] -= h;
                let fd = (linear_es_objective(&data, &t, bp(1.5), kind, &a).0
                    - linear_es_objective(&data, &t, bp(1.5), kind, &b).0)
                    / (2.0 * h);
                assert!(
                    (fd - g[k]).abs() < 1e-7 * (1.0 + fd.abs()),
                    "{kind} {k}: {fd} vs {}",
                    g[k]
                );
            }
        }
    }

    #[test]
    fn xor_witness_scores() {
        let m = LinearEs {
            w: vec![50.0, 50.0],
            b: -50.0,
            bump: bp(10.0),
            polarity: Polarity::InsidePositive,
        };
        assert_eq!(m.misclassified(&gen_logic(Gate::Xor)).unwrap(), 0);
        let clf = m.margin_classifier().unwrap();
        assert!(clf.decide(&[0.0, 1.0]).unwrap());
        assert!(!clf.decide(&[1.0, 1.0]).unwrap());
    }

    #[test]
    fn bfgs_finds_an_xor_solution_at_unit_width() {
        let data = gen_logic(Gate::Xor);
        for kind in [LossKind::Mse, LossKind::Logistic] {
            let solved = (0..20).find_map(|seed| {
                let cfg = OptimConfig::bfgs(1000, seed);
                let (m, _) =
                    fit_linear_es(&data, bp(1.0), kind, Polarity::InsidePositive, &cfg, None)
                        .unwrap();
                (m.misclassified(&data).unwrap() == 0).then_some(m)
            });
            let m = solved.unwrap_or_else(|| panic!("no seed solved XOR with {kind}"));
            let clf = m.margin_classifier().unwrap();
            for (x, &l) in data.rows().zip(data.labels()) {
                assert_eq!(clf.decide(x).unwrap(), l == 1);
            }
        }
    }
}
