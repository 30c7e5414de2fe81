#![allow(dead_code)]

use std::path::PathBuf;

use convexity::spec::{self, LoadedSpec};
use convexity::{Point, ProbDist, Rational};

pub const HULL_FIXTURES: &[&str] =
    &["unit-segment-l1", "triangle-l1", "triangle-linf", "square-l1", "square-linf", "segment-5"];
pub const SEMILATTICE_FIXTURES: &[&str] = &["twochain-semilattice", "antichain-bottom-semilattice"];
pub const ISOMETRY_FIXTURES: &[&str] = &["triangle-l1", "triangle-linf", "square-l1", "square-linf"];

pub fn fixture_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(format!("{name}.json"))
}

pub fn fixture(name: &str) -> LoadedSpec {
    let text = std::fs::read_to_string(fixture_path(name)).expect("fixture readable");
    spec::parse(&text).unwrap_or_else(|e| panic!("{name}: {e}"))
}

/// `Σ μ(i) p_i`, computed directly.
pub fn affine_oracle(mu: &ProbDist, points: &[Point]) -> Vec<Rational> {
    let dim = points[0].as_vector().expect("vector point").len();
    let mut acc = vec![Rational::zero(); dim];
    for (w, p) in mu.weights().iter().zip(points) {
        for (a, c) in acc.iter_mut().zip(p.as_vector().expect("vector point")) {
            *a += &(w.value() * c);
        }
    }
    acc
}

pub fn element(i: usize) -> Point {
    Point::Element(i)
}
