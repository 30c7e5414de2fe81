//! Finite probability distributions over `{1, …, n}` and the index
//! combinatorics used by the barycentric axioms.

use std::fmt;

use serde::{Deserialize, Deserializer, Serialize};

use crate::error::{Error, Result};
use crate::rational::{Rational, Weight};

/// A probability distribution on `n ≥ 1` indexed outcomes, with exact weights
/// summing to one.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(transparent)]
pub struct ProbDist(Vec<Weight>);

impl ProbDist {
    pub fn new(weights: Vec<Weight>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::EmptyDistribution);
        }
        let total: Rational = weights.iter().map(Weight::value).sum();
        if !total.is_one() {
            return Err(Error::NotNormalized(total.to_string()));
        }
        Ok(ProbDist(weights))
    }

    /// Builds a distribution from raw rationals, validating both range and sum.
    pub fn from_rationals(values: Vec<Rational>) -> Result<Self> {
        let weights = values.into_iter().map(Weight::new).collect::<Result<Vec<_>>>()?;
        ProbDist::new(weights)
    }

    /// Convenience for literals: `ProbDist::of(&[(1, 2), (1, 2)])`.
    pub fn of(fracs: &[(i64, i64)]) -> Result<Self> {
        ProbDist::from_rationals(fracs.iter().map(|&(n, d)| Rational::new(n, d)).collect())
    }

    /// The binary distribution `(λ, 1 − λ)`.
    pub fn binary(lambda: &Weight) -> Self {
        ProbDist(vec![lambda.clone(), lambda.complement()])
    }

    /// Point mass at `index` (0-based) on `n` outcomes.
    pub fn dirac(n: usize, index: usize) -> Self {
        assert!(index < n, "dirac index out of range");
        let weights = (0..n)
            .map(|i| if i == index { Weight::one() } else { Weight::zero() })
            .collect();
        ProbDist(weights)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn weights(&self) -> &[Weight] {
        &self.0
    }

    pub fn get(&self, i: usize) -> &Weight {
        &self.0[i]
    }

    pub fn last(&self) -> &Weight {
        self.0.last().expect("distribution is non-empty")
    }

    /// Index of the outcome carrying all the mass, if any.
    pub fn dirac_index(&self) -> Option<usize> {
        self.0.iter().position(Weight::is_one)
    }
}

impl<'de> Deserialize<'de> for ProbDist {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let weights = Vec::<Weight>::deserialize(deserializer)?;
        ProbDist::new(weights).map_err(serde::de::Error::custom)
    }
}

impl fmt::Debug for ProbDist {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.0.iter()).finish()
    }
}

/// A bijection on `{0, …, n−1}`; `images[i]` is the image of `i`.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Serialize)]
#[serde(transparent)]
pub struct Permutation(Vec<usize>);

impl Permutation {
    pub fn new(images: Vec<usize>) -> Result<Self> {
        let mut seen = vec![false; images.len()];
        for &i in &images {
            if i >= images.len() || seen[i] {
                return Err(Error::InvalidPermutation(images));
            }
            seen[i] = true;
        }
        Ok(Permutation(images))
    }

    pub fn identity(n: usize) -> Self {
        Permutation((0..n).collect())
    }

    /// Exchanges positions `i` and `j`.
    pub fn transposition(n: usize, i: usize, j: usize) -> Self {
        let mut images: Vec<usize> = (0..n).collect();
        images.swap(i, j);
        Permutation(images)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn images(&self) -> &[usize] {
        &self.0
    }

    pub fn apply(&self, i: usize) -> usize {
        self.0[i]
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.0.len()];
        for (i, &j) in self.0.iter().enumerate() {
            inv[j] = i;
        }
        Permutation(inv)
    }

    /// Reorders `items` so that entry `i` of the result is `items[σ(i)]`.
    pub fn reorder<T: Clone>(&self, items: &[T]) -> Result<Vec<T>> {
        check_len(self.len(), items.len())?;
        Ok(self.0.iter().map(|&j| items[j].clone()).collect())
    }
}

impl<'de> Deserialize<'de> for Permutation {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let images = Vec::<usize>::deserialize(deserializer)?;
        Permutation::new(images).map_err(serde::de::Error::custom)
    }
}

fn check_len(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::Dimension { expected, found });
    }
    Ok(())
}

/// `Σ_i |μ(i) − μ̃(i)|`.
pub fn l1_distance(mu: &ProbDist, nu: &ProbDist) -> Result<Rational> {
    check_len(mu.len(), nu.len())?;
    Ok(mu
        .weights()
        .iter()
        .zip(nu.weights())
        .map(|(a, b)| (a.value() - b.value()).abs())
        .sum())
}

/// `μ ∘ σ`: entry `i` of the result is `μ(σ(i))`.
pub fn permute(mu: &ProbDist, sigma: &Permutation) -> Result<ProbDist> {
    Ok(ProbDist(sigma.reorder(mu.weights())?))
}

/// Collapses the first two outcomes: `(μ(1) + μ(2), μ(3), …, μ(n))`.
pub fn merge_first_two(mu: &ProbDist) -> Result<ProbDist> {
    if mu.len() < 2 {
        return Err(Error::Dimension { expected: 2, found: mu.len() });
    }
    let w = mu.weights();
    let head = Weight::new(w[0].value() + w[1].value())?;
    let mut out = Vec::with_capacity(w.len() - 1);
    out.push(head);
    out.extend(w[2..].iter().cloned());
    Ok(ProbDist(out))
}

/// The block distribution `η = (ν(1)μ, ν(2)μ̃)` on `n + m` outcomes.
pub fn product_split(nu: &ProbDist, mu: &ProbDist, mu_tilde: &ProbDist) -> Result<ProbDist> {
    check_len(2, nu.len())?;
    let scale = |factor: &Weight, d: &ProbDist| -> Vec<Weight> {
        d.weights()
            .iter()
            .map(|w| Weight::new(factor.value() * w.value()).expect("product of weights is a weight"))
            .collect()
    };
    let mut eta = scale(nu.get(0), mu);
    eta.extend(scale(nu.get(1), mu_tilde));
    Ok(ProbDist(eta))
}

/// Splits off the last outcome: returns `(ν, μ(n))` with
/// `ν(i) = μ(i) / (1 − μ(n))`.
pub fn drop_last(mu: &ProbDist) -> Result<(ProbDist, Weight)> {
    if mu.len() < 2 {
        return Err(Error::Dimension { expected: 2, found: mu.len() });
    }
    let last = mu.last().clone();
    if last.is_one() {
        return Err(Error::DegenerateDistribution);
    }
    let rest = last.complement();
    let nu = mu.weights()[..mu.len() - 1]
        .iter()
        .map(|w| Weight::new(w.value() / rest.value()))
        .collect::<Result<Vec<_>>>()?;
    Ok((ProbDist(nu), last))
}

/// Every distribution of length `n` whose weights all lie in `grid`.
///
/// Enumerated in lexicographic order of grid positions, so the output is
/// deterministic.
pub fn enumerate_on_grid(n: usize, grid: &[Weight]) -> Vec<ProbDist> {
    fn go(
        n: usize,
        grid: &[Weight],
        remaining: &Rational,
        prefix: &mut Vec<Weight>,
        out: &mut Vec<ProbDist>,
    ) {
        if prefix.len() + 1 == n {
            if let Ok(w) = Weight::new(remaining.clone()) {
                if grid.contains(&w) {
                    prefix.push(w);
                    out.push(ProbDist(prefix.clone()));
                    prefix.pop();
                }
            }
            return;
        }
        for w in grid {
            if w.value() > remaining {
                continue;
            }
            prefix.push(w.clone());
            go(n, grid, &(remaining - w.value()), prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if n == 0 {
        return out;
    }
    go(n, grid, &Rational::one(), &mut Vec::with_capacity(n), &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::dyadic_plus_thirds;

    fn d(fracs: &[(i64, i64)]) -> ProbDist {
        ProbDist::of(fracs).unwrap()
    }

    #[test]
    fn construction_rejects_bad_input() {
        assert_eq!(ProbDist::new(vec![]), Err(Error::EmptyDistribution));
        assert!(matches!(ProbDist::of(&[(1, 2), (1, 3)]), Err(Error::NotNormalized(_))));
        assert!(matches!(ProbDist::of(&[(3, 2), (-1, 2)]), Err(Error::WeightOutOfRange(_))));
        assert!(serde_json::from_str::<ProbDist>("[\"1/2\",\"1/4\"]").is_err());
        assert!(Permutation::new(vec![0, 0]).is_err());
        assert!(Permutation::new(vec![0, 2]).is_err());
    }

    #[test]
    fn l1_examples() {
        assert_eq!(l1_distance(&d(&[(1, 1), (0, 1)]), &d(&[(1, 1), (0, 1)])).unwrap(), Rational::zero());
        assert_eq!(
            l1_distance(&d(&[(1, 1), (0, 1)]), &d(&[(0, 1), (1, 1)])).unwrap(),
            Rational::from_integer(2)
        );
        assert_eq!(
            l1_distance(&d(&[(1, 2), (1, 4), (1, 4)]), &d(&[(1, 4), (1, 2), (1, 4)])).unwrap(),
            Rational::new(1, 2)
        );
        assert!(matches!(
            l1_distance(&d(&[(1, 1)]), &d(&[(1, 2), (1, 2)])),
            Err(Error::Dimension { .. })
        ));
    }

    #[test]
    fn permute_examples() {
        let mu = d(&[(1, 2), (1, 3), (1, 6)]);
        assert_eq!(permute(&mu, &Permutation::identity(3)).unwrap(), mu);
        assert_eq!(
            permute(&mu, &Permutation::transposition(3, 0, 1)).unwrap(),
            d(&[(1, 3), (1, 2), (1, 6)])
        );
        assert_eq!(
            permute(&d(&[(1, 1), (0, 1)]), &Permutation::transposition(2, 0, 1)).unwrap(),
            d(&[(0, 1), (1, 1)])
        );
        assert!(permute(&mu, &Permutation::identity(2)).is_err());
    }

    #[test]
    fn merge_examples() {
        assert_eq!(merge_first_two(&d(&[(1, 5), (3, 10), (1, 2)])).unwrap(), d(&[(1, 2), (1, 2)]));
        assert_eq!(merge_first_two(&d(&[(1, 1), (0, 1)])).unwrap(), d(&[(1, 1)]));
        assert_eq!(merge_first_two(&d(&[(1, 2), (1, 2)])).unwrap(), d(&[(1, 1)]));
        assert!(matches!(merge_first_two(&d(&[(1, 1)])), Err(Error::Dimension { .. })));
    }

    #[test]
    fn product_split_examples() {
        let half = d(&[(1, 2), (1, 2)]);
        let one = d(&[(1, 1)]);
        assert_eq!(product_split(&half, &one, &one).unwrap(), half);
        assert_eq!(
            product_split(&d(&[(1, 1), (0, 1)]), &d(&[(1, 3), (2, 3)]), &one).unwrap(),
            d(&[(1, 3), (2, 3), (0, 1)])
        );
        assert_eq!(
            product_split(&half, &half, &d(&[(1, 3), (2, 3)])).unwrap(),
            d(&[(1, 4), (1, 4), (1, 6), (1, 3)])
        );
    }

    #[test]
    fn drop_last_examples() {
        let (nu, last) = drop_last(&d(&[(1, 2), (1, 4), (1, 4)])).unwrap();
        assert_eq!(nu, d(&[(2, 3), (1, 3)]));
        assert_eq!(last, Weight::of(1, 4));
        let (nu, last) = drop_last(&d(&[(1, 2), (1, 2)])).unwrap();
        assert_eq!(nu, d(&[(1, 1)]));
        assert_eq!(last, Weight::of(1, 2));
        assert_eq!(drop_last(&d(&[(0, 1), (0, 1), (1, 1)])), Err(Error::DegenerateDistribution));
    }

    #[test]
    fn grid_enumeration_counts() {
        // On {0, 1/2, 1}: length-2 distributions are (0,1), (1/2,1/2), (1,0).
        let grid = vec![Weight::zero(), Weight::of(1, 2), Weight::one()];
        assert_eq!(enumerate_on_grid(2, &grid).len(), 3);
        // Length 3 adds the three Diracs and three half/half pairs.
        assert_eq!(enumerate_on_grid(3, &grid).len(), 6);
        let full = dyadic_plus_thirds(2);
        for n in 1..=4 {
            for mu in enumerate_on_grid(n, &full) {
                assert_eq!(mu.len(), n);
            }
        }
    }
}
