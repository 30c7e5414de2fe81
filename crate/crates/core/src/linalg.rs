//! Exact sparse row reduction over the rationals.

use std::collections::BTreeMap;

use crate::rational::Rational;

/// A sparse rational vector keyed by coordinate index. Zero entries are never
/// stored.
pub type SparseVec = BTreeMap<usize, Rational>;

/// Incrementally maintained reduced echelon basis of a subspace of `Q^n`.
///
/// Each basis row is normalised so its pivot (the *largest* index with a
/// nonzero entry) is 1, and every pivot column is zero in all other rows.
/// Pivoting from the right leaves the lowest indices free, so they form the
/// complement basis.
#[derive(Clone, Debug, Default)]
pub struct Echelon {
    rows: BTreeMap<usize, SparseVec>,
}

impl Echelon {
    pub fn new() -> Self {
        Echelon::default()
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn is_pivot(&self, col: usize) -> bool {
        self.rows.contains_key(&col)
    }

    /// The normalised basis row whose pivot is `col`.
    pub fn row(&self, col: usize) -> Option<&SparseVec> {
        self.rows.get(&col)
    }

    /// Reduces `v` against the basis; the result has no pivot-column entries.
    pub fn reduce(&self, mut v: SparseVec) -> SparseVec {
        let present: Vec<usize> = v.keys().filter(|c| self.rows.contains_key(c)).copied().collect();
        for col in present {
            let Some(coef) = v.get(&col).cloned() else { continue };
            axpy(&mut v, &(-coef), &self.rows[&col]);
        }
        v
    }

    /// Adds `v` to the spanning set. Returns true if the rank grew.
    pub fn insert(&mut self, v: SparseVec) -> bool {
        let mut r = self.reduce(v);
        let Some((&pivot, lead)) = r.iter().next_back() else {
            return false;
        };
        let inv = lead.recip();
        for val in r.values_mut() {
            *val = &*val * &inv;
        }
        for row in self.rows.values_mut() {
            if let Some(coef) = row.get(&pivot).cloned() {
                axpy(row, &(-coef), &r);
            }
        }
        self.rows.insert(pivot, r);
        true
    }

    pub fn contains(&self, v: SparseVec) -> bool {
        self.reduce(v).is_empty()
    }
}

/// `y ← y + a·x`, dropping entries that cancel to zero.
pub fn axpy(y: &mut SparseVec, a: &Rational, x: &SparseVec) {
    for (k, xv) in x {
        let delta = a * xv;
        match y.get_mut(k) {
            Some(yv) => {
                *yv += &delta;
                if yv.is_zero() {
                    y.remove(k);
                }
            }
            None => {
                if !delta.is_zero() {
                    y.insert(*k, delta);
                }
            }
        }
    }
}

pub fn sparse(dense: &[Rational]) -> SparseVec {
    dense
        .iter()
        .enumerate()
        .filter(|(_, v)| !v.is_zero())
        .map(|(i, v)| (i, v.clone()))
        .collect()
}

pub fn rank(rows: Vec<Vec<Rational>>) -> usize {
    let mut e = Echelon::new();
    for r in rows {
        e.insert(sparse(&r));
    }
    e.rank()
}
