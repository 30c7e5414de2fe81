//! Recovering a norm from a metric compatible with convex combinations.
//!
//! For a hull whose metric contracts convex combinations, the metric is
//! uniform on lines and translation invariant, so `N(v) := d(x, x + v)` does
//! not depend on the base point `x` and reproduces `d(x, y) = N(x − y)`.
//! The checks here test each step of that argument exactly.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::harness::check_first_metric_condition;
use crate::model::{ConvexModel, HullModel, Point};
use crate::rational::{Rational, Weight};
use crate::report::{CheckReport, Instance};
use crate::sampler::Sampler;
use crate::stone::{embed, hull_identification, identify, FiniteCarrier};

/// Four hull points with `y1 − x1 = y0 − x0`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TranslationQuad {
    pub x0: Point,
    pub x1: Point,
    pub y0: Point,
    pub y1: Point,
}

impl TranslationQuad {
    pub fn new(x0: Point, x1: Point, y0: Point, y1: Point) -> Result<Self> {
        let q = TranslationQuad { x0, x1, y0, y1 };
        q.validate()?;
        Ok(q)
    }

    pub fn validate(&self) -> Result<()> {
        let vs = [&self.x0, &self.x1, &self.y0, &self.y1].map(Point::as_vector);
        let [Some(x0), Some(x1), Some(y0), Some(y1)] = vs else {
            return Err(Error::InvalidQuad("quad points must be vectors".into()));
        };
        let dim = x0.len();
        if [x1, y0, y1].iter().any(|v| v.len() != dim) {
            return Err(Error::InvalidQuad("quad points differ in dimension".into()));
        }
        let ok = (0..dim).all(|i| &y1[i] - &x1[i] == &y0[i] - &x0[i]);
        if !ok {
            return Err(Error::InvalidQuad("y1 − x1 ≠ y0 − x0".into()));
        }
        Ok(())
    }

    /// `(x_ε, y_ε, z_ε)` with `x_ε = εx1 + (1−ε)x0`, `y_ε = εy1 + (1−ε)y0`
    /// and `z_ε = (1−ε)x_ε + εy_ε`.
    pub fn intermediate(&self, model: &ConvexModel, eps: &Weight) -> Result<(Point, Point, Point)> {
        let xe = model.cc(eps, &self.x1, &self.x0)?;
        let ye = model.cc(eps, &self.y1, &self.y0)?;
        let ze = model.cc(eps, &ye, &xe)?;
        Ok((xe, ye, ze))
    }
}

/// The ε values at which the parallelogram inequalities are checked.
pub fn default_epsilons() -> Vec<Weight> {
    vec![Weight::of(1, 2), Weight::of(1, 4), Weight::of(1, 8), Weight::of(1, 16)]
}

fn require_metric_hull(model: &ConvexModel) -> Result<&HullModel> {
    if !model.has_metric() {
        return Err(Error::NoMetric);
    }
    model
        .as_hull()
        .ok_or_else(|| Error::InvalidModel("norm recovery needs a hull model".into()))
}

/// `d(x, cc_λ(y, x)) = λ d(x, y)` on sampled pairs and every grid weight.
pub fn check_uniform_on_lines(model: &ConvexModel, sampler: &Sampler) -> Result<CheckReport> {
    require_metric_hull(model)?;
    let mut report = CheckReport::new("uniform_on_lines");
    let mut s = sampler.stream("uniform_on_lines");
    for _ in 0..sampler.budget {
        let x = s.point(model);
        let y = s.point(model);
        for lambda in &sampler.grid {
            report.run(model, Instance::UniformOnLines { lambda: lambda.clone(), x: x.clone(), y: y.clone() })?;
        }
    }
    report.canonicalize();
    Ok(report)
}

/// The parallelogram argument for one quad: at each ε the two intermediate
/// relations, then `d(x0, y0) = d(x1, y1)` directly.
pub fn check_translation_invariance(
    model: &ConvexModel,
    quad: &TranslationQuad,
    epsilons: &[Weight],
) -> Result<CheckReport> {
    quad.validate()?;
    require_metric_hull(model)?;
    let mut report = CheckReport::new("translation_invariance");
    for eps in epsilons {
        report.run(model, Instance::QuadNear { epsilon: eps.clone(), quad: quad.clone() })?;
        report.run(model, Instance::QuadLine { epsilon: eps.clone(), quad: quad.clone() })?;
        report.run(model, Instance::QuadBound { epsilon: eps.clone(), quad: quad.clone() })?;
    }
    report.run(model, Instance::QuadEnds { quad: quad.clone() })?;
    report.canonicalize();
    Ok(report)
}

/// `N(v)` read off the metric at one or more base points.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NormProbe {
    pub direction: Vec<Rational>,
    /// The rescaling `q > 0` actually probed; `N(v) = N(q·v) / q`.
    pub scale: Rational,
    pub bases: Vec<Point>,
    pub values: Vec<Rational>,
    pub value: Rational,
}

impl NormProbe {
    /// True when every base point gave the same value.
    pub fn well_defined(&self) -> bool {
        self.values.iter().all(|v| *v == self.values[0])
    }
}

fn shift(p: &[Rational], v: &[Rational], scale: &Rational) -> Vec<Rational> {
    p.iter().zip(v).map(|(a, b)| a + scale * b).collect()
}

/// Scales tried, in order, when a direction has no admissible base point.
fn scales() -> impl Iterator<Item = Rational> {
    (0..=16u32).map(|k| Rational::pow2(k).recip())
}

/// Recovers `N(v) = d(x, x + v)` using up to `max_bases` carrier points `x`
/// with `x + v` in the hull. When no such base exists, the direction is
/// shrunk by powers of two and the value rescaled.
pub fn recover_norm(
    model: &ConvexModel,
    candidates: &[Point],
    direction: &[Rational],
    max_bases: usize,
) -> Result<NormProbe> {
    let hull = require_metric_hull(model)?;
    if direction.len() != hull.dimension() {
        return Err(Error::Dimension { expected: hull.dimension(), found: direction.len() });
    }
    for scale in scales() {
        let mut bases = Vec::new();
        let mut values = Vec::new();
        for c in candidates {
            let Some(p) = c.as_vector() else { continue };
            let target = shift(p, direction, &scale);
            if !hull.contains(&target) {
                continue;
            }
            let d = model.metric(c, &Point::Vector(target))?;
            bases.push(c.clone());
            values.push(d / &scale);
            if bases.len() >= max_bases.max(1) {
                break;
            }
        }
        if !bases.is_empty() {
            let value = values[0].clone();
            return Ok(NormProbe { direction: direction.to_vec(), scale, bases, values, value });
        }
    }
    let shown: Vec<String> = direction.iter().map(ToString::to_string).collect();
    Err(Error::UnrepresentableDirection(format!("({})", shown.join(", "))))
}

/// Outcome of the embedding-plus-norm pipeline.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IsometryReport {
    pub carrier_size: usize,
    pub dimension: usize,
    pub pairs: usize,
    /// Quotient coordinates map back onto homogeneous hull coordinates.
    pub identification: CheckReport,
    pub isometry: CheckReport,
    /// Base-point independence of `N` on a subset of pairs.
    pub well_definedness: CheckReport,
    pub uniform_on_lines: CheckReport,
    pub translation_invariance: CheckReport,
}

impl IsometryReport {
    pub fn passed(&self) -> bool {
        [
            &self.identification,
            &self.isometry,
            &self.well_definedness,
            &self.uniform_on_lines,
            &self.translation_invariance,
        ]
        .iter()
        .all(|r| r.passed())
    }
}

/// Cap on exhaustively compared carrier pairs; above it pairs are sampled.
pub const MAX_ISOMETRY_PAIRS: usize = 4_096;
/// Pairs whose norm probe is cross-checked at several base points.
const PROBED_PAIRS: usize = 64;

/// Embeds a sampled carrier, maps quotient coordinates back to the hull via
/// the affine map fixed on the basis points, and checks `d(x, y) = N(x − y)`
/// with `N` recovered from coordinate differences.
pub fn verify_isometry(model: &ConvexModel, sampler: &Sampler, depth: usize) -> Result<IsometryReport> {
    // Non-injectivity is the more fundamental obstruction, so it is reported
    // before a missing metric.
    let emb = embed(model, sampler, depth)?;
    if !emb.report.injective_on_sample {
        return Err(Error::NotInjective(emb.report.collisions().len()));
    }
    let hull = require_metric_hull(model)?;
    let carrier = &emb.carrier;
    let points = carrier.points();
    let map = hull_identification(&emb.report, carrier)?;
    let dim = hull.dimension();

    let mut identification = CheckReport::new("identification");
    let images: Vec<Vec<Rational>> = emb.report.coordinates.iter().map(|c| identify(&map, c)).collect();
    for (p, img) in points.iter().zip(&images) {
        let mut expected = p.as_vector().expect("hull point").to_vec();
        expected.push(Rational::one());
        let coords = [img.clone(), expected.clone(), expected];
        // AffineConsistency at λ = 1 reduces to "image = expected".
        identification.run(
            model,
            Instance::AffineConsistency { lambda: Weight::one(), x: 0, y: 0, value: 0, coords },
        )?;
    }

    let pairs = isometry_pairs(carrier, sampler);
    let mut isometry = CheckReport::new("isometry");
    let mut well_definedness = CheckReport::new("norm_well_definedness");
    for (k, &(i, j)) in pairs.iter().enumerate() {
        let diff: Vec<Rational> = images[i].iter().zip(&images[j]).map(|(a, b)| a - b).collect();
        let direction = diff[..dim].to_vec();
        // y + (x − y) = x, so y is always an admissible base.
        isometry.run(
            model,
            Instance::Isometry { x: points[i].clone(), y: points[j].clone(), base: points[j].clone(), direction: direction.clone() },
        )?;
        if k < PROBED_PAIRS {
            // Compare d(b_0, b_0 + qv) with d(b_k, b_k + qv) for every other base.
            let probe = recover_norm(model, points, &direction, 4)?;
            let scaled: Vec<Rational> = direction.iter().map(|d| d * &probe.scale).collect();
            let first = &probe.bases[0];
            let first_end = Point::Vector(shift(first.as_vector().expect("hull point"), &scaled, &Rational::one()));
            for base in &probe.bases[1..] {
                well_definedness.run(
                    model,
                    Instance::Isometry {
                        x: first.clone(),
                        y: first_end.clone(),
                        base: base.clone(),
                        direction: scaled.clone(),
                    },
                )?;
            }
        }
    }
    isometry.canonicalize();
    well_definedness.canonicalize();

    let uniform_on_lines = check_uniform_on_lines(model, sampler)?;
    let translation_invariance = sampled_quads(model, carrier, sampler)?;

    Ok(IsometryReport {
        carrier_size: carrier.len(),
        dimension: emb.report.dimension,
        pairs: pairs.len(),
        identification,
        isometry,
        well_definedness,
        uniform_on_lines,
        translation_invariance,
    })
}

fn isometry_pairs(carrier: &FiniteCarrier, sampler: &Sampler) -> Vec<(usize, usize)> {
    let n = carrier.len();
    if n * (n + 1) / 2 <= MAX_ISOMETRY_PAIRS {
        return (0..n).flat_map(|i| (i..n).map(move |j| (i, j))).collect();
    }
    let mut s = sampler.stream("isometry_pairs");
    (0..MAX_ISOMETRY_PAIRS).map(|_| (s.index(n), s.index(n))).collect()
}

/// Parallelograms `x0, x1, y0, y1 = x1 + y0 − x0` built from carrier points
/// whose fourth corner stays in the hull.
pub fn sampled_quads(model: &ConvexModel, carrier: &FiniteCarrier, sampler: &Sampler) -> Result<CheckReport> {
    let hull = require_metric_hull(model)?;
    let pts = carrier.points();
    let mut s = sampler.stream("translation_quads");
    let mut report = CheckReport::new("translation_invariance");
    let mut found = 0;
    for _ in 0..sampler.budget * 4 {
        if found >= sampler.budget {
            break;
        }
        let (x0, x1, y0) = (&pts[s.index(pts.len())], &pts[s.index(pts.len())], &pts[s.index(pts.len())]);
        let (a, b, c) = (x0.as_vector().expect("hull"), x1.as_vector().expect("hull"), y0.as_vector().expect("hull"));
        let y1: Vec<Rational> = (0..a.len()).map(|i| &b[i] + &c[i] - &a[i]).collect();
        if !hull.contains(&y1) {
            continue;
        }
        found += 1;
        let quad = TranslationQuad::new(x0.clone(), x1.clone(), y0.clone(), Point::Vector(y1))?;
        report = report.merge(check_translation_invariance(model, &quad, &default_epsilons())?);
    }
    Ok(report)
}

/// `C₀`, the diameter, and the first metric condition at the chosen constant.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundednessReport {
    /// `max_g N(g − g_0)` over the generators.
    pub c0: Rational,
    /// The Lipschitz constant the bound was checked with: the claimed one if
    /// given, otherwise `c0`.
    pub constant: Rational,
    pub diameter: Rational,
    pub first_metric_condition: CheckReport,
    pub diameter_bound: CheckReport,
}

impl BoundednessReport {
    pub fn passed(&self) -> bool {
        self.first_metric_condition.passed() && self.diameter_bound.passed()
    }
}

/// Bounds the hull by `C₀ = max_g ‖g − g_0‖`, checks the first metric
/// condition at `claimed` (or `C₀`), and checks the sampled diameter against
/// `2C₀`.
pub fn boundedness_check(model: &ConvexModel, sampler: &Sampler, claimed: Option<&Rational>) -> Result<BoundednessReport> {
    let hull = require_metric_hull(model)?;
    let gens = model.generators();
    let base = hull.generators()[0].clone();
    let mut c0 = Rational::zero();
    for g in hull.generators() {
        let v: Vec<Rational> = g.iter().zip(&base).map(|(a, b)| a - b).collect();
        c0 = c0.max(recover_norm(model, &gens, &v, 1)?.value);
    }
    let constant = claimed.cloned().unwrap_or_else(|| c0.clone());
    let first_metric_condition = check_first_metric_condition(model, &constant, sampler)?;

    let mut diameter_bound = CheckReport::new("diameter");
    let mut diameter = Rational::zero();
    let mut s = sampler.stream("diameter");
    let mut pts = gens.clone();
    pts.extend(s.points(model, sampler.budget));
    for (i, x) in pts.iter().enumerate() {
        for y in &pts[i..] {
            diameter = diameter.max(model.metric(x, y)?);
            diameter_bound.run(model, Instance::Diameter { constant: c0.clone(), x: x.clone(), y: y.clone() })?;
        }
    }
    diameter_bound.canonicalize();
    Ok(BoundednessReport { c0, constant, diameter, first_metric_condition, diameter_bound })
}
