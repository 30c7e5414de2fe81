//! Deterministic, seeded sampling of weights, distributions and points.

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::dist::{enumerate_on_grid, Permutation, ProbDist};
use crate::model::{ConvexModel, Point};
use crate::rational::{Rational, Weight};

/// Seed, weight grid and per-check instance budget.
///
/// Every check derives its own stream from `(seed, check name)`, so adding a
/// check never perturbs the samples another check sees.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Sampler {
    pub seed: u64,
    pub grid: Vec<Weight>,
    pub budget: usize,
}

fn fnv1a(s: &str) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in s.bytes() {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

impl Sampler {
    pub fn new(seed: u64, mut grid: Vec<Weight>, budget: usize) -> Self {
        grid.sort();
        grid.dedup();
        Sampler { seed, grid, budget: budget.max(1) }
    }

    pub fn stream(&self, check: &str) -> Stream<'_> {
        Stream { sampler: self, rng: ChaCha8Rng::seed_from_u64(self.seed ^ fnv1a(check)) }
    }

    pub fn interior(&self) -> Vec<Weight> {
        crate::rational::interior(&self.grid)
    }
}

/// One check's random stream.
pub struct Stream<'a> {
    sampler: &'a Sampler,
    rng: ChaCha8Rng,
}

impl Stream<'_> {
    pub fn index(&mut self, n: usize) -> usize {
        self.rng.gen_range(0..n)
    }

    pub fn weight(&mut self) -> Weight {
        self.sampler.grid[self.index(self.sampler.grid.len())].clone()
    }

    pub fn interior_weight(&mut self) -> Option<Weight> {
        let inner = self.sampler.interior();
        if inner.is_empty() {
            return None;
        }
        Some(inner[self.index(inner.len())].clone())
    }

    /// A distribution of length `n` with all weights on the grid. Falls back
    /// to a Dirac mass when the grid admits no such distribution.
    pub fn dist_from(&mut self, pool: &[ProbDist], n: usize) -> ProbDist {
        if pool.is_empty() {
            let i = self.index(n);
            return ProbDist::dirac(n, i);
        }
        pool[self.index(pool.len())].clone()
    }

    pub fn permutation(&mut self, n: usize) -> Permutation {
        let mut images: Vec<usize> = (0..n).collect();
        images.shuffle(&mut self.rng);
        Permutation::new(images).expect("shuffle is a bijection")
    }

    /// A carrier point. Finite models draw uniformly from the carrier; hulls
    /// draw a generator half the time and otherwise a random grid-weighted
    /// barycentre of the generators.
    pub fn point(&mut self, model: &ConvexModel) -> Point {
        let gens = model.generators();
        let Some(h) = model.as_hull() else {
            return gens[self.index(gens.len())].clone();
        };
        if gens.len() == 1 || self.rng.gen_bool(0.5) {
            return gens[self.index(gens.len())].clone();
        }
        let raw: Vec<Rational> = (0..gens.len()).map(|_| self.weight().into_value()).collect();
        let total: Rational = raw.iter().sum();
        if total.is_zero() {
            return gens[self.index(gens.len())].clone();
        }
        let mut coords = vec![Rational::zero(); h.dimension()];
        for (w, g) in raw.iter().zip(h.generators()) {
            let c = w / &total;
            for (acc, gi) in coords.iter_mut().zip(g) {
                *acc += &(&c * gi);
            }
        }
        Point::Vector(coords)
    }

    pub fn points(&mut self, model: &ConvexModel, n: usize) -> Vec<Point> {
        (0..n).map(|_| self.point(model)).collect()
    }

    pub fn coin(&mut self) -> bool {
        self.rng.gen_bool(0.5)
    }
}

/// Grid distributions of every length `1..=max_len`, indexed by length.
pub fn grid_pools(grid: &[Weight], max_len: usize) -> Vec<Vec<ProbDist>> {
    (0..=max_len).map(|n| enumerate_on_grid(n, grid)).collect()
}
