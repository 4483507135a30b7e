//! Linear decision rules.
//!
//! All rules are built on a [`Hyperplane`] `wᵀx + b`. A [`MarginClassifier`]
//! accepts points whose affine value falls inside `[-eps, eps]` (or, with
//! flipped polarity, outside it). `eps = 0` gives the strict separator that
//! only accepts points lying exactly on the plane.

use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::vecops::{dot, norm, sq_dist};
use crate::Scorer;

/// Affine function `x ↦ wᵀx + b` with non-zero normal.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Hyperplane {
    w: Vec<f64>,
    b: f64,
}

impl Hyperplane {
    pub fn new(w: Vec<f64>, b: f64) -> Result<Self> {
        if w.is_empty() {
            return Err(Error::invalid("hyperplane needs dimension >= 1"));
        }
        if w.iter().any(|v| !v.is_finite()) || !b.is_finite() {
            return Err(Error::invalid("hyperplane coefficients must be finite"));
        }
        if norm(&w) == 0.0 {
            return Err(Error::invalid("hyperplane normal must be non-zero"));
        }
        Ok(Self { w, b })
    }

    pub fn weights(&self) -> &[f64] {
        &self.w
    }

    pub fn bias(&self) -> f64 {
        self.b
    }

    pub fn dim(&self) -> usize {
        self.w.len()
    }

    /// Raw affine value `wᵀx + b`.
    pub fn affine(&self, x: &[f64]) -> Result<f64> {
        check_dim(self.dim(), x.len())?;
        Ok(dot(&self.w, x) + self.b)
    }

    /// `(wᵀx + b) / ‖w‖₂`; the sign tells which side `x` is on.
    pub fn signed_distance(&self, x: &[f64]) -> Result<f64> {
        Ok(self.affine(x)? / norm(&self.w))
    }

    /// Halfspace rule `𝟙(wᵀx + b ≥ 0)`.
    pub fn decide_halfspace(&self, x: &[f64]) -> Result<bool> {
        Ok(self.affine(x)? >= 0.0)
    }

    /// Multiplies `w` and `b` by `c`.
    pub fn scaled(&self, c: f64) -> Result<Self> {
        Self::new(self.w.iter().map(|v| v * c).collect(), self.b * c)
    }
}

pub fn signed_distance(plane: &Hyperplane, x: &[f64]) -> Result<f64> {
    plane.signed_distance(x)
}

pub fn decide_halfspace(plane: &Hyperplane, x: &[f64]) -> Result<bool> {
    plane.decide_halfspace(x)
}

/// Which side of the margin carries the positive label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Polarity {
    InsidePositive,
    OutsidePositive,
}

impl Polarity {
    pub fn flipped(self) -> Self {
        match self {
            Polarity::InsidePositive => Polarity::OutsidePositive,
            Polarity::OutsidePositive => Polarity::InsidePositive,
        }
    }
}

/// Equality separator: a hyperplane, a margin half-width and a polarity.
///
/// `eps` is measured in affine units (`|wᵀx + b| ≤ eps`); the Euclidean
/// half-width of the margin is `eps / ‖w‖₂`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MarginClassifier {
    plane: Hyperplane,
    eps: f64,
    polarity: Polarity,
}

impl MarginClassifier {
    pub fn new(plane: Hyperplane, eps: f64, polarity: Polarity) -> Result<Self> {
        if !(eps >= 0.0) || !eps.is_finite() {
            return Err(Error::invalid(format!(
                "margin must be finite and >= 0, got {eps}"
            )));
        }
        Ok(Self {
            plane,
            eps,
            polarity,
        })
    }

    pub fn strict(plane: Hyperplane, polarity: Polarity) -> Self {
        Self {
            plane,
            eps: 0.0,
            polarity,
        }
    }

    pub fn plane(&self) -> &Hyperplane {
        &self.plane
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn polarity(&self) -> Polarity {
        self.polarity
    }

    pub fn with_polarity(&self, polarity: Polarity) -> Self {
        Self {
            polarity,
            ..self.clone()
        }
    }

    /// Whether `x` lies in the closed margin `[-eps, eps]`.
    pub fn inside(&self, x: &[f64]) -> Result<bool> {
        let z = self.plane.affine(x)?;
        Ok(-self.eps <= z && z <= self.eps)
    }

    pub fn decide(&self, x: &[f64]) -> Result<bool> {
        let inside = self.inside(x)?;
        Ok(match self.polarity {
            Polarity::InsidePositive => inside,
            Polarity::OutsidePositive => !inside,
        })
    }
}

pub fn decide(clf: &MarginClassifier, x: &[f64]) -> Result<bool> {
    clf.decide(x)
}

impl Scorer for MarginClassifier {
    fn input_dim(&self) -> usize {
        self.plane.dim()
    }

    fn score(&self, x: &[f64]) -> Result<f64> {
        Ok(if self.decide(x)? { 1.0 } else { 0.0 })
    }
}

/// Point-centred separator `exp(-gamma ‖x - center‖²) ≥ threshold`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RbfSeparator {
    center: Vec<f64>,
    gamma: f64,
    threshold: f64,
}

impl RbfSeparator {
    pub fn new(center: Vec<f64>, gamma: f64, threshold: f64) -> Result<Self> {
        if center.is_empty() {
            return Err(Error::invalid("RBF center needs dimension >= 1"));
        }
        if !(gamma > 0.0) || !gamma.is_finite() {
            return Err(Error::invalid(format!("gamma must be > 0, got {gamma}")));
        }
        if !(threshold > 0.0 && threshold < 1.0) {
            return Err(Error::invalid(format!(
                "threshold must be in (0,1), got {threshold}"
            )));
        }
        Ok(Self {
            center,
            gamma,
            threshold,
        })
    }

    pub fn center(&self) -> &[f64] {
        &self.center
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn threshold(&self) -> f64 {
        self.threshold
    }

    pub fn dim(&self) -> usize {
        self.center.len()
    }

    pub fn score(&self, x: &[f64]) -> Result<f64> {
        check_dim(self.dim(), x.len())?;
        Ok((-self.gamma * sq_dist(x, &self.center)).exp())
    }

    pub fn decide(&self, x: &[f64]) -> Result<bool> {
        Ok(self.score(x)? >= self.threshold)
    }

    /// Radius of the accepted ball: `sqrt(-ln(threshold) / gamma)`.
    pub fn radius(&self) -> f64 {
        (-self.threshold.ln() / self.gamma).sqrt()
    }
}

pub fn rbf_score(sep: &RbfSeparator, x: &[f64]) -> Result<f64> {
    sep.score(x)
}

/// Two class hyperplanes compared by a distance ratio.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TwinPair {
    plane1: Hyperplane,
    plane2: Hyperplane,
    t: f64,
}

/// Tolerance for treating the two normals of a [`TwinPair`] as equal.
pub const PARALLEL_TOL: f64 = 1e-12;

impl TwinPair {
    pub fn new(plane1: Hyperplane, plane2: Hyperplane, t: f64) -> Result<Self> {
        check_dim(plane1.dim(), plane2.dim())?;
        if !(t > 0.0) || !t.is_finite() {
            return Err(Error::invalid(format!(
                "ratio threshold must be > 0, got {t}"
            )));
        }
        Ok(Self { plane1, plane2, t })
    }

    pub fn plane1(&self) -> &Hyperplane {
        &self.plane1
    }

    pub fn plane2(&self) -> &Hyperplane {
        &self.plane2
    }

    pub fn threshold(&self) -> f64 {
        self.t
    }

    /// `𝟙(ε₂/ε₁ ≥ t)` where `εᵢ` is the distance from `x` to plane `i`.
    ///
    /// A point on plane 1 (`ε₁ = 0`) has an infinite ratio and is assigned 1.
    pub fn decide(&self, x: &[f64]) -> Result<bool> {
        let e1 = self.plane1.signed_distance(x)?.abs();
        let e2 = self.plane2.signed_distance(x)?.abs();
        if e1 == 0.0 {
            return Ok(true);
        }
        Ok(e2 / e1 >= self.t)
    }

    /// Collapses a parallel pair with `t = 1` into a single halfspace rule.
    ///
    /// Returns the plane `(2w, b₁ + b₂)` and the orientation `sign(b₂ - b₁)`;
    /// the pair decides 1 exactly where `orientation · (2wᵀx + b₁ + b₂) ≥ 0`.
    pub fn parallel_hyperplane(&self) -> Result<(Hyperplane, f64)> {
        let w1 = self.plane1.weights();
        let w2 = self.plane2.weights();
        if w1.iter().zip(w2).any(|(a, b)| (a - b).abs() > PARALLEL_TOL) {
            return Err(Error::Constraint("twin normals are not equal".into()));
        }
        if self.t != 1.0 {
            return Err(Error::Constraint(format!(
                "ratio threshold must be 1, got {}",
                self.t
            )));
        }
        let (b1, b2) = (self.plane1.bias(), self.plane2.bias());
        if b1 == b2 {
            return Err(Error::Constraint(
                "equal biases: the two classes share a plane and no separating hyperplane exists"
                    .into(),
            ));
        }
        let plane = Hyperplane::new(w1.iter().map(|v| 2.0 * v).collect(), b1 + b2)?;
        Ok((plane, (b2 - b1).signum()))
    }
}

pub fn twin_lrt_decide(pair: &TwinPair, x: &[f64]) -> Result<bool> {
    pair.decide(x)
}

pub fn twin_parallel_hyperplane(pair: &TwinPair) -> Result<(Hyperplane, f64)> {
    pair.parallel_hyperplane()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn plane(w: &[f64], b: f64) -> Hyperplane {
        Hyperplane::new(w.to_vec(), b).unwrap()
    }

    #[test]
    fn signed_distance_examples() {
        assert_eq!(
            plane(&[1.0, 0.0], 0.0)
                .signed_distance(&[2.0, 0.0])
                .unwrap(),
            2.0
        );
        assert_eq!(
            plane(&[3.0, 4.0], 0.0)
                .signed_distance(&[0.0, 0.0])
                .unwrap(),
            0.0
        );
        assert_relative_eq!(
            plane(&[1.0, 1.0], -1.0)
                .signed_distance(&[1.0, 1.0])
                .unwrap(),
            std::f64::consts::FRAC_1_SQRT_2,
            epsilon = 1e-15
        );
    }

    #[test]
    fn rejects_bad_planes_and_dims() {
        assert!(Hyperplane::new(vec![0.0, 0.0], 1.0).is_err());
        assert!(Hyperplane::new(vec![], 1.0).is_err());
        let p = plane(&[1.0, 0.0], 0.0);
        assert!(matches!(
            p.signed_distance(&[1.0]),
            Err(Error::DimensionMismatch {
                expected: 2,
                got: 1
            })
        ));
        assert!(MarginClassifier::new(p, -0.1, Polarity::InsidePositive).is_err());
    }

    #[test]
    fn xor_witness() {
        let clf = MarginClassifier::strict(plane(&[1.0, 1.0], -1.0), Polarity::InsidePositive);
        assert!(clf.decide(&[0.0, 1.0]).unwrap());
        assert!(clf.decide(&[1.0, 0.0]).unwrap());
        assert!(!clf.decide(&[0.0, 0.0]).unwrap());
        assert!(!clf.decide(&[1.0, 1.0]).unwrap());
    }

    #[test]
    fn and_or_by_label_flipping() {
        let pts = [[0.0, 0.0], [0.0, 1.0], [1.0, 0.0], [1.0, 1.0]];
        // AND: a line through the lone positive (1,1) that misses the rest.
        let and = MarginClassifier::strict(plane(&[1.0, 1.0], -2.0), Polarity::InsidePositive);
        // OR: a line through the lone negative (0,0), outside positive.
        let or = MarginClassifier::strict(plane(&[1.0, 1.0], 0.0), Polarity::OutsidePositive);
        let and_truth = [false, false, false, true];
        let or_truth = [false, true, true, true];
        for (i, p) in pts.iter().enumerate() {
            assert_eq!(and.decide(p).unwrap(), and_truth[i], "AND at {p:?}");
            assert_eq!(or.decide(p).unwrap(), or_truth[i], "OR at {p:?}");
        }
    }

    #[test]
    fn margin_boundary_is_inclusive() {
        let clf =
            MarginClassifier::new(plane(&[1.0, 0.0], 0.0), 0.5, Polarity::InsidePositive).unwrap();
        assert!(clf.decide(&[0.5, 7.0]).unwrap());
        assert!(clf.decide(&[-0.5, -7.0]).unwrap());
        let out = clf.with_polarity(Polarity::OutsidePositive);
        assert!(!out.decide(&[0.3, 0.0]).unwrap());
    }

    #[test]
    fn halfspace_examples() {
        let p = plane(&[1.0, 0.0], 0.0);
        assert!(p.decide_halfspace(&[0.0, 0.0]).unwrap());
        assert!(!p.decide_halfspace(&[-1.0, 0.0]).unwrap());
        let q = plane(&[2.0, 0.0], 0.0);
        for x in [[-1.0, 3.0], [0.0, 0.0], [1e-300, -2.0], [5.0, 5.0]] {
            assert_eq!(
                p.decide_halfspace(&x).unwrap(),
                q.decide_halfspace(&x).unwrap()
            );
        }
    }

    #[test]
    fn rbf_examples() {
        let sep = RbfSeparator::new(vec![1.0, -1.0], 1.0, 0.5).unwrap();
        assert_eq!(sep.score(&[1.0, -1.0]).unwrap(), 1.0);
        assert_relative_eq!(
            sep.score(&[2.0, -1.0]).unwrap(),
            (-1.0f64).exp(),
            epsilon = 1e-15
        );
        let sharp = RbfSeparator::new(vec![0.0, 0.0], 1e6, 0.5).unwrap();
        assert!(sharp.score(&[0.1, 0.0]).unwrap() < 1e-300);
        assert!(RbfSeparator::new(vec![0.0], 0.0, 0.5).is_err());
        assert!(RbfSeparator::new(vec![0.0], 1.0, 1.0).is_err());
    }

    fn twin(w: &[f64], b1: f64, b2: f64, t: f64) -> TwinPair {
        TwinPair::new(plane(w, b1), plane(w, b2), t).unwrap()
    }

    #[test]
    fn twin_lrt_examples() {
        let pair = twin(&[1.0, 0.0], 1.0, -1.0, 1.0);
        assert!(!pair.decide(&[1.0, 0.0]).unwrap());
        assert!(pair.decide(&[-1.0, 0.0]).unwrap());
        assert!(pair.decide(&[0.0, 0.0]).unwrap());
    }

    #[test]
    fn twin_parallel_examples() {
        let (p, o) = twin(&[1.0, 0.0], 1.0, -1.0, 1.0)
            .parallel_hyperplane()
            .unwrap();
        assert_eq!(p.weights(), &[2.0, 0.0]);
        assert_eq!(p.bias(), 0.0);
        assert_eq!(o, -1.0);
        let (p, o) = twin(&[0.0, 1.0], -1.0, 1.0, 1.0)
            .parallel_hyperplane()
            .unwrap();
        assert_eq!(p.weights(), &[0.0, 2.0]);
        assert_eq!(p.bias(), 0.0);
        assert_eq!(o, 1.0);
        assert!(matches!(
            twin(&[0.0, 1.0], 0.5, 0.5, 1.0).parallel_hyperplane(),
            Err(Error::Constraint(_))
        ));
        assert!(twin(&[0.0, 1.0], 0.5, 1.5, 2.0)
            .parallel_hyperplane()
            .is_err());
        let skew = TwinPair::new(plane(&[1.0, 0.0], 0.0), plane(&[1.0, 0.1], 1.0), 1.0).unwrap();
        assert!(skew.parallel_hyperplane().is_err());
    }

    fn vec2() -> impl Strategy<Value = Vec<f64>> {
        prop::collection::vec(-5.0..5.0f64, 2)
    }

    proptest! {
        #[test]
        fn polarities_are_complements(w in vec2(), b in -3.0..3.0f64, eps in 0.0..2.0f64, x in vec2()) {
            prop_assume!(w.iter().any(|v| v.abs() > 1e-6));
            let clf = MarginClassifier::new(plane(&w, b), eps, Polarity::InsidePositive).unwrap();
            let flip = clf.with_polarity(Polarity::OutsidePositive);
            prop_assert_ne!(clf.decide(&x).unwrap(), flip.decide(&x).unwrap());
        }

        #[test]
        fn decide_is_scale_invariant(w in vec2(), b in -3.0..3.0f64, eps in 0.0..2.0f64,
                                     c in prop::sample::select(vec![0.25, 0.5, 2.0, 4.0, 8.0]), x in vec2()) {
            // Power-of-two factors keep the scaled comparisons exact.
            prop_assume!(w.iter().any(|v| v.abs() > 1e-6));
            let a = MarginClassifier::new(plane(&w, b), eps, Polarity::InsidePositive).unwrap();
            let s = MarginClassifier::new(plane(&w, b).scaled(c).unwrap(), eps * c, Polarity::InsidePositive).unwrap();
            prop_assert_eq!(a.decide(&x).unwrap(), s.decide(&x).unwrap());
        }

        #[test]
        fn parallel_twin_matches_lrt(w in vec2(), b1 in -3.0..3.0f64, b2 in -3.0..3.0f64, x in vec2()) {
            prop_assume!(w.iter().any(|v| v.abs() > 1e-3) && (b1 - b2).abs() > 1e-6);
            let pair = twin(&w, b1, b2, 1.0);
            let (p, o) = pair.parallel_hyperplane().unwrap();
            let z = p.affine(&x).unwrap();
            prop_assume!(z.abs() > 1e-9);
            prop_assert_eq!(pair.decide(&x).unwrap(), o * z >= 0.0);
        }
    }
}
