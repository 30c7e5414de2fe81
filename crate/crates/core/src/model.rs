//! Convex spaces given by a binary operation `cc_λ`, the concrete models we
//! ship, and the derived n-ary barycentric operation.
//!
//! Orientation: `cc_λ(x, y)` stands for `λx + (1 − λ)y`, so `cc_1(x, y) = x`
//! and `cc_0(x, y) = y`. Every check in the crate uses this convention.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::dist::{drop_last, ProbDist};
use crate::error::{Error, Result};
use crate::hull;
use crate::rational::{Rational, Weight};

/// A carrier element. Hull points are coordinate vectors; finite models use
/// an index into their carrier.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Point {
    Vector(Vec<Rational>),
    Element(usize),
}

impl Point {
    pub fn vector(coords: &[(i64, i64)]) -> Self {
        Point::Vector(coords.iter().map(|&(n, d)| Rational::new(n, d)).collect())
    }

    pub fn ints(coords: &[i64]) -> Self {
        Point::Vector(coords.iter().map(|&n| Rational::from_integer(n)).collect())
    }

    pub fn as_vector(&self) -> Option<&[Rational]> {
        match self {
            Point::Vector(v) => Some(v),
            Point::Element(_) => None,
        }
    }
}

impl fmt::Debug for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Point::Vector(v) => f.debug_list().entries(v.iter()).finish(),
            Point::Element(i) => write!(f, "#{i}"),
        }
    }
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MetricKind {
    L1,
    LInf,
    WeightedL1(Vec<Rational>),
}

impl MetricKind {
    fn distance(&self, x: &[Rational], y: &[Rational]) -> Rational {
        let diffs = x.iter().zip(y).map(|(a, b)| (a - b).abs());
        match self {
            MetricKind::L1 => diffs.sum(),
            MetricKind::LInf => diffs.fold(Rational::zero(), Rational::max),
            MetricKind::WeightedL1(w) => diffs.zip(w).map(|(d, wi)| d * wi).sum(),
        }
    }
}

/// The convex hull of finitely many rational generators in `Q^d`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HullModel {
    dimension: usize,
    generators: Vec<Vec<Rational>>,
}

impl HullModel {
    pub fn new(dimension: usize, generators: Vec<Vec<Rational>>) -> Result<Self> {
        if generators.is_empty() {
            return Err(Error::InvalidModel("hull needs at least one generator".into()));
        }
        if let Some(g) = generators.iter().find(|g| g.len() != dimension) {
            return Err(Error::Dimension { expected: dimension, found: g.len() });
        }
        Ok(HullModel { dimension, generators })
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn generators(&self) -> &[Vec<Rational>] {
        &self.generators
    }

    pub fn contains(&self, point: &[Rational]) -> bool {
        hull::contains(&self.generators, point)
    }

    /// Affine dimension of the generator set.
    pub fn affine_dimension(&self) -> usize {
        let base = &self.generators[0];
        let rows: Vec<Vec<Rational>> = self.generators[1..]
            .iter()
            .map(|g| g.iter().zip(base).map(|(a, b)| a - b).collect())
            .collect();
        crate::linalg::rank(rows)
    }
}

/// A finite meet-semilattice; `cc_λ` is the meet for every interior `λ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Semilattice {
    names: Vec<String>,
    meet: Vec<Vec<usize>>,
}

impl Semilattice {
    pub fn new(names: Vec<String>, meet: Vec<Vec<usize>>) -> Result<Self> {
        let n = names.len();
        if n == 0 {
            return Err(Error::InvalidModel("semilattice needs at least one element".into()));
        }
        if meet.len() != n || meet.iter().any(|row| row.len() != n) {
            return Err(Error::InvalidModel(format!("meet table must be {n}x{n}")));
        }
        if meet.iter().flatten().any(|&v| v >= n) {
            return Err(Error::InvalidModel("meet table references unknown element".into()));
        }
        for a in 0..n {
            if meet[a][a] != a {
                return Err(Error::InvalidModel(format!("meet is not idempotent at {}", names[a])));
            }
            for b in 0..n {
                if meet[a][b] != meet[b][a] {
                    return Err(Error::InvalidModel(format!(
                        "meet is not commutative at ({}, {})",
                        names[a], names[b]
                    )));
                }
                for c in 0..n {
                    if meet[meet[a][b]][c] != meet[a][meet[b][c]] {
                        return Err(Error::InvalidModel(format!(
                            "meet is not associative at ({}, {}, {})",
                            names[a], names[b], names[c]
                        )));
                    }
                }
            }
        }
        Ok(Semilattice { names, meet })
    }

    /// A chain `names[0] < names[1] < …`.
    pub fn chain(names: &[&str]) -> Self {
        let n = names.len();
        let meet = (0..n).map(|a| (0..n).map(|b| a.min(b)).collect()).collect();
        Semilattice::new(names.iter().map(|s| s.to_string()).collect(), meet).expect("chain is a semilattice")
    }

    /// A bottom element `names[0]` under pairwise incomparable atoms.
    pub fn antichain_with_bottom(names: &[&str]) -> Self {
        let n = names.len();
        let meet = (0..n)
            .map(|a| (0..n).map(|b| if a == b { a } else { 0 }).collect())
            .collect();
        Semilattice::new(names.iter().map(|s| s.to_string()).collect(), meet).expect("valid semilattice")
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn meet(&self, a: usize, b: usize) -> usize {
        self.meet[a][b]
    }
}

/// A finite carrier with `cc_λ` recorded explicitly for each declared weight.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TableModel {
    names: Vec<String>,
    values: BTreeMap<Weight, Vec<Vec<usize>>>,
}

impl TableModel {
    pub fn new(names: Vec<String>, values: BTreeMap<Weight, Vec<Vec<usize>>>) -> Result<Self> {
        let n = names.len();
        if n == 0 {
            return Err(Error::InvalidModel("table needs at least one element".into()));
        }
        if values.is_empty() {
            return Err(Error::InvalidModel("table declares no weights".into()));
        }
        for (w, rows) in &values {
            if rows.len() != n || rows.iter().any(|r| r.len() != n) {
                return Err(Error::InvalidModel(format!("cc table for weight {w} must be {n}x{n}")));
            }
            if rows.iter().flatten().any(|&v| v >= n) {
                return Err(Error::InvalidModel(format!("cc table for weight {w} leaves the carrier")));
            }
        }
        Ok(TableModel { names, values })
    }

    /// Records `model`'s operation over a finite carrier it is closed on.
    pub fn tabulate(model: &ConvexModel, grid: &[Weight]) -> Result<Self> {
        let carrier = model
            .finite_carrier()
            .ok_or_else(|| Error::InvalidModel("only finite models can be tabulated".into()))?;
        let n = carrier.len();
        let mut values = BTreeMap::new();
        for w in grid {
            let mut rows = vec![vec![0; n]; n];
            for (i, x) in carrier.iter().enumerate() {
                for (j, y) in carrier.iter().enumerate() {
                    match model.cc(w, x, y)? {
                        Point::Element(k) => rows[i][j] = k,
                        Point::Vector(_) => unreachable!("finite carriers use element points"),
                    }
                }
            }
            values.insert(w.clone(), rows);
        }
        TableModel::new(model.element_names().unwrap_or_default(), values)
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn grid(&self) -> Vec<Weight> {
        self.values.keys().cloned().collect()
    }

    pub fn values(&self) -> &BTreeMap<Weight, Vec<Vec<usize>>> {
        &self.values
    }

    /// Overwrites a single entry; used to build negative fixtures.
    pub fn set(&mut self, lambda: &Weight, x: usize, y: usize, value: usize) -> Result<()> {
        let n = self.names.len();
        if x >= n || y >= n || value >= n {
            return Err(Error::NotInCarrier(format!("{x}, {y} -> {value}")));
        }
        let rows = self
            .values
            .get_mut(lambda)
            .ok_or_else(|| Error::UnsupportedWeight(lambda.to_string()))?;
        rows[x][y] = value;
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ModelKind {
    Hull(HullModel),
    Semilattice(Semilattice),
    Table(TableModel),
}

/// A convex space together with an optional exact metric.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConvexModel {
    kind: ModelKind,
    metric: Option<MetricKind>,
}

impl ConvexModel {
    pub fn hull(hull: HullModel, metric: Option<MetricKind>) -> Result<Self> {
        if let Some(MetricKind::WeightedL1(w)) = &metric {
            if w.len() != hull.dimension() {
                return Err(Error::Dimension { expected: hull.dimension(), found: w.len() });
            }
            if w.iter().any(|wi| !wi.is_positive()) {
                return Err(Error::InvalidModel("metric weights must be strictly positive".into()));
            }
        }
        Ok(ConvexModel { kind: ModelKind::Hull(hull), metric })
    }

    pub fn semilattice(s: Semilattice) -> Self {
        ConvexModel { kind: ModelKind::Semilattice(s), metric: None }
    }

    pub fn table(t: TableModel) -> Self {
        ConvexModel { kind: ModelKind::Table(t), metric: None }
    }

    /// Hull of integer generators, for tests and fixtures.
    pub fn hull_of(generators: &[&[i64]], metric: Option<MetricKind>) -> Result<Self> {
        let gens: Vec<Vec<Rational>> = generators
            .iter()
            .map(|g| g.iter().map(|&c| Rational::from_integer(c)).collect())
            .collect();
        let dim = gens.first().map_or(0, Vec::len);
        ConvexModel::hull(HullModel::new(dim, gens)?, metric)
    }

    pub fn kind(&self) -> &ModelKind {
        &self.kind
    }

    pub fn metric_kind(&self) -> Option<&MetricKind> {
        self.metric.as_ref()
    }

    pub fn as_hull(&self) -> Option<&HullModel> {
        match &self.kind {
            ModelKind::Hull(h) => Some(h),
            _ => None,
        }
    }

    /// All carrier points, for finite models.
    pub fn finite_carrier(&self) -> Option<Vec<Point>> {
        let n = match &self.kind {
            ModelKind::Hull(_) => return None,
            ModelKind::Semilattice(s) => s.names.len(),
            ModelKind::Table(t) => t.names.len(),
        };
        Some((0..n).map(Point::Element).collect())
    }

    pub fn element_names(&self) -> Option<Vec<String>> {
        match &self.kind {
            ModelKind::Hull(_) => None,
            ModelKind::Semilattice(s) => Some(s.names.clone()),
            ModelKind::Table(t) => Some(t.names.clone()),
        }
    }

    /// Weights the model can evaluate; `None` means every weight in `[0, 1]`.
    pub fn declared_grid(&self) -> Option<Vec<Weight>> {
        match &self.kind {
            ModelKind::Table(t) => Some(t.grid()),
            _ => None,
        }
    }

    /// Generators for hulls, the whole carrier for finite models.
    pub fn generators(&self) -> Vec<Point> {
        match &self.kind {
            ModelKind::Hull(h) => h.generators.iter().cloned().map(Point::Vector).collect(),
            _ => self.finite_carrier().unwrap_or_default(),
        }
    }

    /// Checks that `p` is a well-formed point of this model.
    ///
    /// For hulls only the ambient dimension is checked here; full hull
    /// membership is [`HullModel::contains`].
    pub fn check_point(&self, p: &Point) -> Result<()> {
        match (&self.kind, p) {
            (ModelKind::Hull(h), Point::Vector(v)) => {
                if v.len() != h.dimension {
                    return Err(Error::Dimension { expected: h.dimension, found: v.len() });
                }
                Ok(())
            }
            (ModelKind::Semilattice(s), Point::Element(i)) if *i < s.names.len() => Ok(()),
            (ModelKind::Table(t), Point::Element(i)) if *i < t.names.len() => Ok(()),
            _ => Err(Error::NotInCarrier(format!("{p:?}"))),
        }
    }

    /// Human-readable label for a point.
    pub fn label(&self, p: &Point) -> String {
        match (self.element_names(), p) {
            (Some(names), Point::Element(i)) if *i < names.len() => names[*i].clone(),
            _ => format!("{p:?}"),
        }
    }

    /// The binary convex combination `cc_λ(x, y)`.
    pub fn cc(&self, lambda: &Weight, x: &Point, y: &Point) -> Result<Point> {
        self.check_point(x)?;
        self.check_point(y)?;
        match (&self.kind, x, y) {
            (ModelKind::Hull(_), Point::Vector(a), Point::Vector(b)) => {
                let l = lambda.value();
                let m = lambda.complement().into_value();
                Ok(Point::Vector(a.iter().zip(b).map(|(ai, bi)| l * ai + &m * bi).collect()))
            }
            (ModelKind::Semilattice(s), Point::Element(a), Point::Element(b)) => {
                if lambda.is_one() {
                    Ok(x.clone())
                } else if lambda.is_zero() {
                    Ok(y.clone())
                } else {
                    Ok(Point::Element(s.meet(*a, *b)))
                }
            }
            (ModelKind::Table(t), Point::Element(a), Point::Element(b)) => t
                .values
                .get(lambda)
                .map(|rows| Point::Element(rows[*a][*b]))
                .ok_or_else(|| Error::UnsupportedWeight(lambda.to_string())),
            _ => unreachable!("check_point rejects mismatched point kinds"),
        }
    }

    /// The n-ary barycentric operation `γ_μ`, built from `cc` by peeling off
    /// the last point: `x_n` if `μ(n) = 1`, otherwise
    /// `cc_{1−μ(n)}(γ_ν(x_1, …, x_{n−1}), x_n)` with `ν = μ|_{n−1} / (1 − μ(n))`.
    pub fn gamma(&self, mu: &ProbDist, points: &[Point]) -> Result<Point> {
        if mu.len() != points.len() {
            return Err(Error::Dimension { expected: mu.len(), found: points.len() });
        }
        for p in points {
            self.check_point(p)?;
        }
        self.gamma_unchecked(mu, points)
    }

    fn gamma_unchecked(&self, mu: &ProbDist, points: &[Point]) -> Result<Point> {
        let n = points.len();
        if mu.last().is_one() {
            return Ok(points[n - 1].clone());
        }
        // n ≥ 2 here: a length-1 distribution always has last weight 1.
        let (nu, last) = drop_last(mu)?;
        let head = self.gamma_unchecked(&nu, &points[..n - 1])?;
        self.cc(&last.complement(), &head, &points[n - 1])
    }

    pub fn has_metric(&self) -> bool {
        self.metric.is_some()
    }

    pub fn metric(&self, x: &Point, y: &Point) -> Result<Rational> {
        let m = self.metric.as_ref().ok_or(Error::NoMetric)?;
        self.check_point(x)?;
        self.check_point(y)?;
        match (x, y) {
            (Point::Vector(a), Point::Vector(b)) => Ok(m.distance(a, b)),
            _ => Err(Error::NoMetric),
        }
    }
}

/// The associativity weight `ν = λ(1 − μ) / (1 − λμ)`.
pub fn nu_assoc(lambda: &Weight, mu: &Weight) -> Result<Weight> {
    if lambda.is_one() && mu.is_one() {
        return Err(Error::DegenerateAssociativity);
    }
    let l = lambda.value();
    let m = mu.value();
    let num = l * (Rational::one() - m);
    let den = Rational::one() - l * m;
    Weight::new(num / den)
}
