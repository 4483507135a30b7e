//! Smooth activations and losses with analytic derivatives.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::vecops::sq_dist;

/// Centre and width of a Gaussian bump.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BumpParams {
    pub mu: f64,
    pub sigma: f64,
}

impl BumpParams {
    pub fn new(mu: f64, sigma: f64) -> Result<Self> {
        if !mu.is_finite() {
            return Err(Error::invalid("bump centre must be finite"));
        }
        if !(sigma > 0.0) || !sigma.is_finite() {
            return Err(Error::invalid(format!(
                "bump width must be > 0, got {sigma}"
            )));
        }
        Ok(Self { mu, sigma })
    }

    /// Zero-centred bump of width `sigma`.
    pub fn centered(sigma: f64) -> Result<Self> {
        Self::new(0.0, sigma)
    }

    /// Half-width of the region where the bump is at least `level`.
    ///
    /// Thresholding a bump at `level` is the same as an equality separator
    /// with margin `sigma * sqrt(-2 ln level)` around `mu`.
    pub fn half_width_at(&self, level: f64) -> f64 {
        self.sigma * (-2.0 * level.ln()).sqrt()
    }
}

/// `exp(-½((z-μ)/σ)²)`.
pub fn bump(z: f64, p: BumpParams) -> f64 {
    let u = (z - p.mu) / p.sigma;
    (-0.5 * u * u).exp()
}

/// `∂bump/∂z = -((z-μ)/σ²)·bump`.
pub fn bump_grad(z: f64, p: BumpParams) -> f64 {
    -(z - p.mu) / (p.sigma * p.sigma) * bump(z, p)
}

/// `∂bump/∂σ = ((z-μ)²/σ³)·bump`.
pub fn bump_grad_sigma(z: f64, p: BumpParams) -> f64 {
    let d = z - p.mu;
    d * d / (p.sigma * p.sigma * p.sigma) * bump(z, p)
}

/// `tanh(v/z²)`, equal to 1 at `z = 0`.
pub fn tanh_bump(z: f64, v: f64) -> f64 {
    if z == 0.0 {
        return 1.0;
    }
    (v / (z * z)).tanh()
}

/// `∂/∂z tanh(v/z²) = -2v/z³ · sech²(v/z²)`; zero at `z = 0`.
pub fn tanh_bump_grad(z: f64, v: f64) -> f64 {
    if z == 0.0 {
        return 0.0;
    }
    let a = v / (z * z);
    let t = a.tanh();
    -2.0 * v / (z * z * z) * (1.0 - t * t)
}

pub fn leaky_relu(z: f64, alpha: f64) -> f64 {
    if z >= 0.0 {
        z
    } else {
        alpha * z
    }
}

pub fn leaky_relu_grad(z: f64, alpha: f64) -> f64 {
    if z >= 0.0 {
        1.0
    } else {
        alpha
    }
}

pub fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

pub fn sigmoid_grad(z: f64) -> f64 {
    let s = sigmoid(z);
    s * (1.0 - s)
}

/// `exp(-γ‖x-c‖²)`.
pub fn rbf_unit(x: &[f64], center: &[f64], gamma: f64) -> f64 {
    (-gamma * sq_dist(x, center)).exp()
}

/// Gradient of [`rbf_unit`] with respect to `x`; the gradient with respect
/// to `center` is its negation.
pub fn rbf_unit_grad(x: &[f64], center: &[f64], gamma: f64) -> Vec<f64> {
    let r = rbf_unit(x, center, gamma);
    x.iter()
        .zip(center)
        .map(|(xi, ci)| -2.0 * gamma * (xi - ci) * r)
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LossKind {
    Mse,
    #[serde(alias = "ll")]
    Logistic,
}

impl std::str::FromStr for LossKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "mse" => Ok(LossKind::Mse),
            "ll" | "logistic" | "bce" => Ok(LossKind::Logistic),
            other => Err(Error::invalid(format!("unknown loss {other:?} (mse|ll)"))),
        }
    }
}

impl std::fmt::Display for LossKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            LossKind::Mse => "mse",
            LossKind::Logistic => "ll",
        })
    }
}

/// Predictions are clamped to `[LOG_CLAMP, 1 - LOG_CLAMP]` before the log loss.
pub const LOG_CLAMP: f64 = 1e-12;

pub fn loss(kind: LossKind, prediction: f64, label: f64) -> f64 {
    match kind {
        LossKind::Mse => (prediction - label) * (prediction - label),
        LossKind::Logistic => {
            let p = prediction.clamp(LOG_CLAMP, 1.0 - LOG_CLAMP);
            -label * p.ln() - (1.0 - label) * (1.0 - p).ln()
        }
    }
}

/// Derivative of [`loss`] with respect to the prediction.
///
/// Inside the clamp region the log-loss derivative is zero, matching the
/// clamped value.
pub fn loss_grad(kind: LossKind, prediction: f64, label: f64) -> f64 {
    match kind {
        LossKind::Mse => 2.0 * (prediction - label),
        LossKind::Logistic => {
            if !(LOG_CLAMP..=1.0 - LOG_CLAMP).contains(&prediction) {
                return 0.0;
            }
            -label / prediction + (1.0 - label) / (1.0 - prediction)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn bp(mu: f64, sigma: f64) -> BumpParams {
        BumpParams::new(mu, sigma).unwrap()
    }

    #[test]
    fn bump_examples() {
        let p = bp(0.3, 2.0);
        assert_eq!(bump(0.3, p), 1.0);
        assert_relative_eq!(bump(2.3, p), 0.606_530_659_712_633_4, epsilon = 1e-15);
        assert_eq!(bump_grad(0.3, p), 0.0);
        assert_relative_eq!(
            bump_grad(1.0, bp(0.0, 1.0)),
            -0.606_530_659_712_633_4,
            epsilon = 1e-15
        );
        assert!(bump_grad(1.0, p) < 0.0 && bump_grad(-1.0, p) > 0.0);
        assert!(BumpParams::new(0.0, 0.0).is_err());
        assert!(BumpParams::new(f64::NAN, 1.0).is_err());
    }

    #[test]
    fn bump_grad_matches_central_difference() {
        let p = bp(0.0, 1.0);
        let h = 1e-5;
        let fd = (bump(1.0 + h, p) - bump(1.0 - h, p)) / (2.0 * h);
        assert_relative_eq!(bump_grad(1.0, p), fd, max_relative = 1e-9);
    }

    #[test]
    fn tanh_bump_examples() {
        assert_eq!(tanh_bump(0.0, 1.0), 1.0);
        assert_relative_eq!(tanh_bump(1e-8, 1.0), 1.0);
        assert!(tanh_bump(1e8, 1.0) < 1e-15);
        assert_relative_eq!(
            tanh_bump(1.0, 1.0),
            0.761_594_155_955_764_9,
            epsilon = 1e-15
        );
    }

    #[test]
    fn simple_unit_examples() {
        assert_eq!(leaky_relu(-1.0, 0.01), -0.01);
        assert_eq!(leaky_relu(2.0, 0.01), 2.0);
        assert_eq!(sigmoid(0.0), 0.5);
        assert_eq!(rbf_unit(&[1.0, 2.0], &[1.0, 2.0], 3.0), 1.0);
        assert!(sigmoid(-800.0) >= 0.0 && sigmoid(800.0) <= 1.0);
    }

    #[test]
    fn loss_examples() {
        assert_eq!(loss(LossKind::Mse, 1.0, 1.0), 0.0);
        assert_relative_eq!(loss(LossKind::Logistic, 0.5, 1.0), std::f64::consts::LN_2);
        let ll = loss(LossKind::Logistic, 0.9, 0.0);
        let mse = loss(LossKind::Mse, 0.9, 0.0);
        assert_relative_eq!(ll, 10f64.ln(), epsilon = 1e-12);
        assert_relative_eq!(mse, 0.81, epsilon = 1e-12);
        assert!(ll > mse);
        assert!(loss(LossKind::Logistic, 0.0, 1.0).is_finite());
        assert!(loss(LossKind::Logistic, 1.0, 0.0).is_finite());
    }

    #[test]
    fn loss_kind_parses() {
        assert_eq!("MSE".parse::<LossKind>().unwrap(), LossKind::Mse);
        assert_eq!("ll".parse::<LossKind>().unwrap(), LossKind::Logistic);
        assert!("hinge".parse::<LossKind>().is_err());
    }

    proptest! {
        #[test]
        fn outputs_in_range(z in -50.0..50.0f64, mu in -5.0..5.0f64, sigma in 0.05..20.0f64) {
            let b = bump(z, bp(mu, sigma));
            prop_assert!((0.0..=1.0).contains(&b));
            let s = sigmoid(z / 10.0);
            prop_assert!(s > 0.0 && s < 1.0);
            let r = rbf_unit(&[z / 10.0], &[mu], sigma);
            prop_assert!((0.0..=1.0).contains(&r));
        }

        #[test]
        fn bump_is_symmetric(d in -30.0..30.0f64, mu in -5.0..5.0f64, sigma in 0.1..20.0f64) {
            let p = bp(mu, sigma);
            prop_assert!((bump(mu + d, p) - bump(mu - d, p)).abs() <= 1e-15);
        }

        #[test]
        fn bump_scale_equivariant(z in -10.0..10.0f64, mu in -5.0..5.0f64, sigma in 0.1..10.0f64, c in 0.1..10.0f64) {
            let a = bump(z, bp(mu, sigma));
            let b = bump(c * z, bp(c * mu, c * sigma));
            prop_assert!((a - b).abs() <= 1e-12);
        }
    }
}
