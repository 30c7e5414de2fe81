//! Check reports and replayable axiom instances.
//!
//! Every tested case is an [`Instance`]: the exact inputs of one axiom. An
//! instance evaluates both sides against a model, so a failure recorded in a
//! report can be replayed later and must reproduce the same violation.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::dist::{merge_first_two, permute, product_split, l1_distance, Permutation, ProbDist};
use crate::error::{Error, Result};
use crate::model::{ConvexModel, Point};
use crate::norm::TranslationQuad;
use crate::rational::{Rational, Weight};

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Value {
    Scalar(Rational),
    Point(Point),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    /// `lhs = rhs`
    Equal,
    /// `lhs ≤ rhs`
    AtMost,
}

/// Both evaluated sides of one instance.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Outcome {
    pub lhs: Value,
    pub rhs: Value,
    pub relation: Relation,
}

impl Outcome {
    fn eq(lhs: Value, rhs: Value) -> Self {
        Outcome { lhs, rhs, relation: Relation::Equal }
    }

    fn le(lhs: Rational, rhs: Rational) -> Self {
        Outcome { lhs: Value::Scalar(lhs), rhs: Value::Scalar(rhs), relation: Relation::AtMost }
    }

    pub fn holds(&self) -> bool {
        match self.relation {
            Relation::Equal => self.lhs == self.rhs,
            Relation::AtMost => match (&self.lhs, &self.rhs) {
                (Value::Scalar(a), Value::Scalar(b)) => a <= b,
                _ => false,
            },
        }
    }
}

/// The exact inputs of a single axiom or property check.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "axiom", rename_all = "snake_case")]
pub enum Instance {
    /// `cc_0(x, y) = y`
    Unit { x: Point, y: Point },
    /// `cc_λ(x, x) = x`
    Idempotency { lambda: Weight, x: Point },
    /// `cc_λ(x, y) = cc_{1−λ}(y, x)`
    Commutativity { lambda: Weight, x: Point, y: Point },
    /// `cc_λ(cc_μ(x, y), z) = cc_{λμ}(x, cc_ν(y, z))`
    Associativity { lambda: Weight, mu: Weight, nu: Weight, x: Point, y: Point, z: Point },
    /// `γ_μ(x_1, …, x_n) = γ_{μ∘σ}(x_{σ(1)}, …, x_{σ(n)})`
    GammaPermutation { mu: ProbDist, sigma: Permutation, points: Vec<Point> },
    /// With `x_1 = x_2`: `γ_μ(x_1, x_2, …) = γ_{μ̃}(x_1, x_3, …)`
    GammaMerge { mu: ProbDist, points: Vec<Point> },
    /// `γ_μ(x) = x_i` when `μ(i) = 1`
    GammaDirac { mu: ProbDist, points: Vec<Point> },
    /// `γ_ν(γ_μ(x), γ_{μ̃}(x̃)) = γ_η(x, x̃)`
    GammaComposition { nu: ProbDist, mu: ProbDist, mu_tilde: ProbDist, points: Vec<Point>, points_tilde: Vec<Point> },
    /// `d(γ_μ(x), γ_μ(y)) ≤ Σ μ(i) d(x_i, y_i)`
    MetricCompatibility { mu: ProbDist, points: Vec<Point>, others: Vec<Point> },
    /// `d(cc_λ(y, x), cc_λ(z, x)) ≤ λ d(y, z)`
    Contraction { lambda: Weight, x: Point, y: Point, z: Point },
    /// `d(γ_μ(x), γ_{μ̃}(x)) ≤ C ‖μ − μ̃‖₁`
    FirstMetricCondition { constant: Rational, mu: ProbDist, mu_tilde: ProbDist, points: Vec<Point> },
    /// `cc_λ(y, x) = cc_λ(z, x)`
    Propagation { lambda: Weight, x: Point, y: Point, z: Point },
    /// `d(x, cc_λ(y, x)) = λ d(x, y)`
    UniformOnLines { lambda: Weight, x: Point, y: Point },
    /// `d(x_ε, z_ε) ≤ ε d(x_1, y_1)`
    QuadNear { epsilon: Weight, quad: TranslationQuad },
    /// `ε d(x_ε, y_ε) = d(x_ε, z_ε)`
    QuadLine { epsilon: Weight, quad: TranslationQuad },
    /// `d(x_ε, y_ε) ≤ d(x_1, y_1)`
    QuadBound { epsilon: Weight, quad: TranslationQuad },
    /// `d(x_0, y_0) = d(x_1, y_1)`
    QuadEnds { quad: TranslationQuad },
    /// `d(x, y) = d(base, base + direction)` where `direction` came from
    /// embedding coordinates of `x − y`.
    Isometry { x: Point, y: Point, base: Point, direction: Vec<Rational> },
    /// `ẽ_{cc_λ(x,y)} = λ ẽ_x + (1 − λ) ẽ_y` over recorded quotient coordinates.
    AffineConsistency { lambda: Weight, x: usize, y: usize, value: usize, coords: [Vec<Rational>; 3] },
    /// `d(x, y) ≤ 2C` over sampled pairs.
    Diameter { constant: Rational, x: Point, y: Point },
}

fn vec_point(p: &Point) -> Result<&[Rational]> {
    p.as_vector().ok_or(Error::NoMetric)
}

fn add_vec(p: &[Rational], v: &[Rational]) -> Result<Point> {
    if p.len() != v.len() {
        return Err(Error::Dimension { expected: p.len(), found: v.len() });
    }
    Ok(Point::Vector(p.iter().zip(v).map(|(a, b)| a + b).collect()))
}

impl Instance {
    /// Short identifier used to group instances into reports.
    pub fn check_id(&self) -> &'static str {
        match self {
            Instance::Unit { .. } => "cs.1",
            Instance::Idempotency { .. } => "cs.2",
            Instance::Commutativity { .. } => "cs.3",
            Instance::Associativity { .. } => "cs.4",
            Instance::GammaPermutation { .. } => "gamma.1",
            Instance::GammaMerge { .. } => "gamma.2",
            Instance::GammaDirac { .. } => "gamma.3",
            Instance::MetricCompatibility { .. } => "gamma.4",
            Instance::GammaComposition { .. } => "gamma.5",
            Instance::Contraction { .. } => "contraction",
            Instance::FirstMetricCondition { .. } => "first_metric_condition",
            Instance::Propagation { .. } => "cancellation_propagation",
            Instance::UniformOnLines { .. } => "uniform_on_lines",
            Instance::QuadNear { .. } | Instance::QuadLine { .. } | Instance::QuadBound { .. } | Instance::QuadEnds { .. } => {
                "translation_invariance"
            }
            Instance::Isometry { .. } => "isometry",
            Instance::AffineConsistency { .. } => "affine_consistency",
            Instance::Diameter { .. } => "diameter",
        }
    }

    /// Evaluates both sides of the instance in `model`.
    pub fn evaluate(&self, model: &ConvexModel) -> Result<Outcome> {
        let pt = Value::Point;
        let d = |a: &Point, b: &Point| model.metric(a, b);
        Ok(match self {
            Instance::Unit { x, y } => Outcome::eq(pt(model.cc(&Weight::zero(), x, y)?), pt(y.clone())),
            Instance::Idempotency { lambda, x } => Outcome::eq(pt(model.cc(lambda, x, x)?), pt(x.clone())),
            Instance::Commutativity { lambda, x, y } => Outcome::eq(
                pt(model.cc(lambda, x, y)?),
                pt(model.cc(&lambda.complement(), y, x)?),
            ),
            Instance::Associativity { lambda, mu, nu, x, y, z } => {
                let lhs = model.cc(lambda, &model.cc(mu, x, y)?, z)?;
                let lm = Weight::new(lambda.value() * mu.value())?;
                let rhs = model.cc(&lm, x, &model.cc(nu, y, z)?)?;
                Outcome::eq(pt(lhs), pt(rhs))
            }
            Instance::GammaPermutation { mu, sigma, points } => {
                let lhs = model.gamma(mu, points)?;
                let rhs = model.gamma(&permute(mu, sigma)?, &sigma.reorder(points)?)?;
                Outcome::eq(pt(lhs), pt(rhs))
            }
            Instance::GammaMerge { mu, points } => {
                if points.len() < 2 || points[0] != points[1] {
                    return Err(Error::InvalidModel("merge instance needs x_1 = x_2".into()));
                }
                let lhs = model.gamma(mu, points)?;
                let mut rest = vec![points[0].clone()];
                rest.extend(points[2..].iter().cloned());
                let rhs = model.gamma(&merge_first_two(mu)?, &rest)?;
                Outcome::eq(pt(lhs), pt(rhs))
            }
            Instance::GammaDirac { mu, points } => {
                let i = mu
                    .dirac_index()
                    .ok_or_else(|| Error::InvalidModel("dirac instance needs a point mass".into()))?;
                Outcome::eq(pt(model.gamma(mu, points)?), pt(points[i].clone()))
            }
            Instance::GammaComposition { nu, mu, mu_tilde, points, points_tilde } => {
                let a = model.gamma(mu, points)?;
                let b = model.gamma(mu_tilde, points_tilde)?;
                let lhs = model.gamma(nu, &[a, b])?;
                let eta = product_split(nu, mu, mu_tilde)?;
                let all: Vec<Point> = points.iter().chain(points_tilde).cloned().collect();
                Outcome::eq(pt(lhs), pt(model.gamma(&eta, &all)?))
            }
            Instance::MetricCompatibility { mu, points, others } => {
                let lhs = d(&model.gamma(mu, points)?, &model.gamma(mu, others)?)?;
                let mut rhs = Rational::zero();
                for ((w, x), y) in mu.weights().iter().zip(points).zip(others) {
                    rhs += &(w.value() * d(x, y)?);
                }
                Outcome::le(lhs, rhs)
            }
            Instance::Contraction { lambda, x, y, z } => {
                let lhs = d(&model.cc(lambda, y, x)?, &model.cc(lambda, z, x)?)?;
                Outcome::le(lhs, lambda.value() * d(y, z)?)
            }
            Instance::FirstMetricCondition { constant, mu, mu_tilde, points } => {
                let lhs = d(&model.gamma(mu, points)?, &model.gamma(mu_tilde, points)?)?;
                Outcome::le(lhs, constant * l1_distance(mu, mu_tilde)?)
            }
            Instance::Propagation { lambda, x, y, z } => {
                Outcome::eq(pt(model.cc(lambda, y, x)?), pt(model.cc(lambda, z, x)?))
            }
            Instance::UniformOnLines { lambda, x, y } => {
                let lhs = d(x, &model.cc(lambda, y, x)?)?;
                Outcome::eq(Value::Scalar(lhs), Value::Scalar(lambda.value() * d(x, y)?))
            }
            Instance::QuadNear { epsilon, quad } => {
                let (xe, _, ze) = quad.intermediate(model, epsilon)?;
                Outcome::le(d(&xe, &ze)?, epsilon.value() * d(&quad.x1, &quad.y1)?)
            }
            Instance::QuadLine { epsilon, quad } => {
                let (xe, ye, ze) = quad.intermediate(model, epsilon)?;
                Outcome::eq(
                    Value::Scalar(epsilon.value() * d(&xe, &ye)?),
                    Value::Scalar(d(&xe, &ze)?),
                )
            }
            Instance::QuadBound { epsilon, quad } => {
                let (xe, ye, _) = quad.intermediate(model, epsilon)?;
                Outcome::le(d(&xe, &ye)?, d(&quad.x1, &quad.y1)?)
            }
            Instance::QuadEnds { quad } => Outcome::eq(
                Value::Scalar(d(&quad.x0, &quad.y0)?),
                Value::Scalar(d(&quad.x1, &quad.y1)?),
            ),
            Instance::Isometry { x, y, base, direction } => {
                let shifted = add_vec(vec_point(base)?, direction)?;
                Outcome::eq(Value::Scalar(d(x, y)?), Value::Scalar(d(base, &shifted)?))
            }
            Instance::AffineConsistency { lambda, coords, .. } => {
                let [cx, cy, cv] = coords;
                let l = lambda.value();
                let m = lambda.complement().into_value();
                let combo: Vec<Rational> = cx.iter().zip(cy).map(|(a, b)| l * a + &m * b).collect();
                Outcome::eq(
                    Value::Point(Point::Vector(cv.clone())),
                    Value::Point(Point::Vector(combo)),
                )
            }
            Instance::Diameter { constant, x, y } => {
                Outcome::le(d(x, y)?, Rational::from_integer(2) * constant)
            }
        })
    }
}

/// A violated instance together with both evaluated sides.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Failure {
    pub instance: Instance,
    #[serde(flatten)]
    pub outcome: Outcome,
}

impl Failure {
    /// Re-evaluates the instance; true if the violation reproduces exactly.
    pub fn replays(&self, model: &ConvexModel) -> bool {
        match self.instance.evaluate(model) {
            Ok(o) => !o.holds() && o == self.outcome,
            Err(_) => false,
        }
    }

    /// Smallest witness first, then lexicographic.
    fn sort_key(&self) -> (usize, String) {
        let s = serde_json::to_string(self).expect("failures serialize");
        (s.len(), s)
    }
}

/// Outcome of running one check over many instances.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckReport {
    pub check: String,
    pub instances: u64,
    /// Instances that could not be evaluated because a weight fell outside a
    /// table model's declared grid.
    pub skipped: u64,
    pub failures: Vec<Failure>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub stats: BTreeMap<String, Rational>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl CheckReport {
    pub fn new(check: impl Into<String>) -> Self {
        CheckReport {
            check: check.into(),
            instances: 0,
            skipped: 0,
            failures: Vec::new(),
            stats: BTreeMap::new(),
            notes: Vec::new(),
        }
    }

    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    /// Evaluates `instance` and records the result.
    pub fn run(&mut self, model: &ConvexModel, instance: Instance) -> Result<Option<Outcome>> {
        match instance.evaluate(model) {
            Ok(outcome) => {
                self.instances += 1;
                if !outcome.holds() {
                    self.failures.push(Failure { instance, outcome: outcome.clone() });
                }
                Ok(Some(outcome))
            }
            Err(Error::UnsupportedWeight(_)) => {
                self.skipped += 1;
                Ok(None)
            }
            Err(e) => Err(e),
        }
    }

    /// Keeps the larger of the existing and new value for `key`.
    pub fn record_max(&mut self, key: &str, value: Rational) {
        let entry = self.stats.entry(key.to_string()).or_insert_with(|| value.clone());
        if value > *entry {
            *entry = value;
        }
    }

    /// Combines two partial reports of the same check. Failure order is
    /// canonicalised, so merging is order-insensitive.
    pub fn merge(mut self, other: CheckReport) -> CheckReport {
        self.instances += other.instances;
        self.skipped += other.skipped;
        self.failures.extend(other.failures);
        for (k, v) in other.stats {
            self.record_max(&k, v);
        }
        for n in other.notes {
            if !self.notes.contains(&n) {
                self.notes.push(n);
            }
        }
        self.canonicalize();
        self
    }

    pub fn canonicalize(&mut self) {
        self.failures.sort_by_cached_key(Failure::sort_key);
        self.notes.sort();
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::MetricKind;

    #[test]
    fn outcome_relations() {
        let one = Value::Scalar(Rational::one());
        let two = Value::Scalar(Rational::from_integer(2));
        assert!(Outcome { lhs: one.clone(), rhs: two.clone(), relation: Relation::AtMost }.holds());
        assert!(!Outcome { lhs: two.clone(), rhs: one.clone(), relation: Relation::AtMost }.holds());
        assert!(!Outcome { lhs: one, rhs: two, relation: Relation::Equal }.holds());
    }

    #[test]
    fn metric_tightness_case() {
        // Q¹, μ = (1/2, 1/2), x = (0, 0), y = (2, 0): d(1, 0) = 1 ≤ 1.
        let m = ConvexModel::hull_of(&[&[0], &[2]], Some(MetricKind::L1)).unwrap();
        let inst = Instance::MetricCompatibility {
            mu: ProbDist::of(&[(1, 2), (1, 2)]).unwrap(),
            points: vec![Point::ints(&[0]), Point::ints(&[0])],
            others: vec![Point::ints(&[2]), Point::ints(&[0])],
        };
        let o = inst.evaluate(&m).unwrap();
        assert_eq!(o.lhs, Value::Scalar(Rational::one()));
        assert_eq!(o.rhs, Value::Scalar(Rational::one()));
        assert!(o.holds());
    }

    #[test]
    fn merge_is_order_insensitive() {
        let bad = |x: usize| Failure {
            instance: Instance::Unit { x: Point::Element(x), y: Point::Element(0) },
            outcome: Outcome::eq(Value::Point(Point::Element(x)), Value::Point(Point::Element(0))),
        };
        let mut a = CheckReport::new("cs.1");
        a.instances = 2;
        a.failures.push(bad(1));
        let mut b = CheckReport::new("cs.1");
        b.instances = 3;
        b.failures.push(bad(0));
        b.record_max("r", Rational::one());
        let ab = a.clone().merge(b.clone());
        let ba = b.merge(a);
        assert_eq!(ab.instances, 5);
        assert_eq!(ab.failures, ba.failures);
        assert_eq!(ab.stats, ba.stats);
    }

    #[test]
    fn report_json_uses_fraction_strings() {
        let mut r = CheckReport::new("x");
        r.record_max("max_ratio", Rational::new(5, 2));
        let json = serde_json::to_string(&r).unwrap();
        assert!(json.contains("\"max_ratio\":\"5/2\""), "{json}");
        let back: CheckReport = serde_json::from_str(&json).unwrap();
        assert_eq!(back, r);
    }
}
