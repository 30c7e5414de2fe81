//! Stone's embedding of a convex space into a rational vector space.
//!
//! Over a finite sample `S` of the carrier we form the free vector space with
//! basis `e_x` (`x ∈ S`), quotient by the span `U` of the relation vectors
//! `e_{cc_λ(x,y)} − λe_x − (1 − λ)e_y`, and read off the image `ẽ_x` of each
//! point. Points with equal images are collision classes; a collision means
//! `e_x − e_y ∈ U`, which only happens when cancellation fails somewhere.
//!
//! Injectivity here is injectivity *on the sample*. It does not certify that
//! the whole space is cancellative.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::harness::{cancellation_search_in, CancellationWitness};
use crate::linalg::{axpy, Echelon, SparseVec};
use crate::model::{ConvexModel, Point};
use crate::rational::{interior, Rational, Weight};
use crate::report::{CheckReport, Instance};
use crate::sampler::Sampler;

/// How a non-generator carrier point was produced: `cc_λ(points[x], points[y])`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub lambda: Weight,
    pub x: usize,
    pub y: usize,
}

/// A finite, duplicate-free sample of the carrier.
#[derive(Clone, Debug, Default)]
pub struct FiniteCarrier {
    points: Vec<Point>,
    index: HashMap<Point, usize>,
    provenance: Vec<Option<Provenance>>,
}

impl FiniteCarrier {
    pub fn from_points(points: impl IntoIterator<Item = Point>) -> Self {
        let mut c = FiniteCarrier::default();
        for p in points {
            c.insert(p, None);
        }
        c
    }

    fn insert(&mut self, p: Point, prov: Option<Provenance>) -> bool {
        if self.index.contains_key(&p) {
            return false;
        }
        self.index.insert(p.clone(), self.points.len());
        self.points.push(p);
        self.provenance.push(prov);
        true
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn position(&self, p: &Point) -> Option<usize> {
        self.index.get(p).copied()
    }

    pub fn provenance(&self, i: usize) -> Option<&Provenance> {
        self.provenance[i].as_ref()
    }

    /// Re-evaluates every provenance triple against `model`.
    pub fn check_provenance(&self, model: &ConvexModel) -> Result<bool> {
        for (i, prov) in self.provenance.iter().enumerate() {
            if let Some(p) = prov {
                if model.cc(&p.lambda, &self.points[p.x], &self.points[p.y])? != self.points[i] {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }
}

/// Closes `generators` under `cc` at the interior grid weights for `depth`
/// rounds. Each round combines every ordered pair present at its start.
pub fn generate_carrier(
    model: &ConvexModel,
    generators: &[Point],
    grid: &[Weight],
    depth: usize,
) -> Result<FiniteCarrier> {
    for g in generators {
        model.check_point(g)?;
    }
    let weights = interior(grid);
    let mut carrier = FiniteCarrier::from_points(generators.iter().cloned());
    for _ in 0..depth {
        let n = carrier.len();
        let mut grew = false;
        for i in 0..n {
            for j in 0..n {
                if i == j {
                    continue;
                }
                for l in &weights {
                    let v = model.cc(l, &carrier.points[i], &carrier.points[j])?;
                    grew |= carrier.insert(v, Some(Provenance { lambda: l.clone(), x: i, y: j }));
                }
            }
        }
        if !grew {
            break;
        }
    }
    Ok(carrier)
}

/// One relation vector `e_v − λe_x − (1 − λ)e_y` with `v = cc_λ(x, y)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RelationRow {
    pub lambda: Weight,
    pub x: usize,
    pub y: usize,
    pub value: usize,
    pub coefficients: SparseVec,
}

impl RelationRow {
    fn new(lambda: Weight, x: usize, y: usize, value: usize) -> Self {
        let mut coefficients = SparseVec::new();
        axpy(&mut coefficients, &Rational::one(), &SparseVec::from([(value, Rational::one())]));
        axpy(&mut coefficients, &-lambda.value(), &SparseVec::from([(x, Rational::one())]));
        axpy(
            &mut coefficients,
            &-lambda.complement().into_value(),
            &SparseVec::from([(y, Rational::one())]),
        );
        RelationRow { lambda, x, y, value, coefficients }
    }

    pub fn coefficient_sum(&self) -> Rational {
        self.coefficients.values().sum()
    }
}

/// The relation vectors spanning `U` over a finite carrier.
#[derive(Clone, Debug, Default)]
pub struct RelationSet {
    pub rows: Vec<RelationRow>,
    /// Triples whose `cc` value fell outside the carrier.
    pub escaped: usize,
}

/// One relation per `(x, y, λ)` over the carrier and the interior grid whose
/// value stays inside the carrier.
pub fn build_relations(carrier: &FiniteCarrier, model: &ConvexModel, grid: &[Weight]) -> Result<RelationSet> {
    let weights = interior(grid);
    let mut set = RelationSet::default();
    for x in 0..carrier.len() {
        for y in 0..carrier.len() {
            for l in &weights {
                let v = model.cc(l, &carrier.points[x], &carrier.points[y])?;
                match carrier.position(&v) {
                    Some(value) => set.rows.push(RelationRow::new(l.clone(), x, y, value)),
                    None => set.escaped += 1,
                }
            }
        }
    }
    Ok(set)
}

/// Images `ẽ_x` in the quotient, in coordinates of the complement basis.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EmbeddingReport {
    pub carrier_size: usize,
    pub relations: usize,
    pub escaped: usize,
    pub rank: usize,
    pub dimension: usize,
    /// Carrier indices whose `ẽ` form the complement basis.
    pub basis: Vec<usize>,
    pub coordinates: Vec<Vec<Rational>>,
    /// Partition of carrier indices by equal image.
    pub collision_classes: Vec<Vec<usize>>,
    pub injective_on_sample: bool,
}

impl EmbeddingReport {
    /// Classes with more than one member.
    pub fn collisions(&self) -> Vec<&Vec<usize>> {
        self.collision_classes.iter().filter(|c| c.len() > 1).collect()
    }
}

/// Row-reduces `U` and expresses every `ẽ_x` in the complement basis: the
/// lowest carrier indices that are not pivots of `U`'s echelon form.
pub fn quotient_coordinates(relations: &RelationSet, carrier: &FiniteCarrier) -> EmbeddingReport {
    let mut echelon = Echelon::new();
    for row in &relations.rows {
        echelon.insert(row.coefficients.clone());
    }
    let n = carrier.len();
    let basis: Vec<usize> = (0..n).filter(|&i| !echelon.is_pivot(i)).collect();
    let slot: BTreeMap<usize, usize> = basis.iter().enumerate().map(|(k, &i)| (i, k)).collect();

    let coordinates: Vec<Vec<Rational>> = (0..n)
        .map(|i| {
            let mut c = vec![Rational::zero(); basis.len()];
            match echelon.row(i) {
                // e_i ≡ e_i − r_i, which lives on free columns only.
                Some(row) => {
                    for (col, v) in row {
                        if *col != i {
                            c[slot[col]] = -v;
                        }
                    }
                }
                None => c[slot[&i]] = Rational::one(),
            }
            c
        })
        .collect();

    let mut classes: BTreeMap<&Vec<Rational>, Vec<usize>> = BTreeMap::new();
    for (i, c) in coordinates.iter().enumerate() {
        classes.entry(c).or_default().push(i);
    }
    let mut collision_classes: Vec<Vec<usize>> = classes.into_values().collect();
    collision_classes.sort();
    let injective_on_sample = collision_classes.iter().all(|c| c.len() == 1);

    EmbeddingReport {
        carrier_size: n,
        relations: relations.rows.len(),
        escaped: relations.escaped,
        rank: echelon.rank(),
        dimension: basis.len(),
        basis,
        coordinates,
        collision_classes,
        injective_on_sample,
    }
}

/// Result of checking an embedding against its model.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EmbeddingVerification {
    pub consistency: CheckReport,
    pub injective_on_sample: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<CancellationWitness>,
}

impl EmbeddingVerification {
    pub fn passed(&self) -> bool {
        self.consistency.passed() && self.injective_on_sample
    }
}

/// Checks `ẽ_{cc_λ(x,y)} = λẽ_x + (1 − λ)ẽ_y` for every in-carrier triple,
/// and when the map collapses points, searches the collision classes for a
/// cancellation witness.
pub fn verify_embedding(
    report: &EmbeddingReport,
    carrier: &FiniteCarrier,
    model: &ConvexModel,
    sampler: &Sampler,
) -> Result<EmbeddingVerification> {
    let relations = build_relations(carrier, model, &sampler.grid)?;
    verify_against(report, carrier, &relations, model, sampler)
}

fn verify_against(
    report: &EmbeddingReport,
    carrier: &FiniteCarrier,
    relations: &RelationSet,
    model: &ConvexModel,
    sampler: &Sampler,
) -> Result<EmbeddingVerification> {
    let mut consistency = CheckReport::new("affine_consistency");
    for row in &relations.rows {
        let coords = [
            report.coordinates[row.x].clone(),
            report.coordinates[row.y].clone(),
            report.coordinates[row.value].clone(),
        ];
        consistency.run(
            model,
            Instance::AffineConsistency { lambda: row.lambda.clone(), x: row.x, y: row.y, value: row.value, coords },
        )?;
    }
    consistency.canonicalize();

    let mut witness = None;
    if !report.injective_on_sample {
        for class in report.collisions() {
            let candidates: Vec<Point> = class.iter().map(|&i| carrier.points[i].clone()).collect();
            if let Some(w) = cancellation_search_in(model, sampler, Some(&candidates))? {
                witness = Some(w);
                break;
            }
        }
    }
    Ok(EmbeddingVerification { consistency, injective_on_sample: report.injective_on_sample, witness })
}

/// Carrier, relations, quotient and verification in one pass.
pub struct Embedding {
    pub carrier: FiniteCarrier,
    pub report: EmbeddingReport,
    pub verification: EmbeddingVerification,
}

pub fn embed(model: &ConvexModel, sampler: &Sampler, depth: usize) -> Result<Embedding> {
    let carrier = generate_carrier(model, &model.generators(), &sampler.grid, depth)?;
    let relations = build_relations(&carrier, model, &sampler.grid)?;
    let report = quotient_coordinates(&relations, &carrier);
    let verification = verify_against(&report, &carrier, &relations, model, sampler)?;
    Ok(Embedding { carrier, report, verification })
}

/// The linear map from quotient coordinates to homogeneous hull coordinates
/// `(p, 1)`, fixed by sending each basis point to itself.
pub fn hull_identification(report: &EmbeddingReport, carrier: &FiniteCarrier) -> Result<Vec<Vec<Rational>>> {
    report
        .basis
        .iter()
        .map(|&i| {
            let v = carrier.points[i].as_vector().ok_or(Error::NoMetric)?;
            let mut h = v.to_vec();
            h.push(Rational::one());
            Ok(h)
        })
        .collect()
}

/// Applies the identification map to a coordinate vector.
pub fn identify(map: &[Vec<Rational>], coords: &[Rational]) -> Vec<Rational> {
    let dim = map.first().map_or(0, Vec::len);
    let mut out = vec![Rational::zero(); dim];
    for (c, image) in coords.iter().zip(map) {
        if c.is_zero() {
            continue;
        }
        for (o, v) in out.iter_mut().zip(image) {
            *o += &(c * v);
        }
    }
    out
}
