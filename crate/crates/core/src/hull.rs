//! Exact convex-hull membership over the rationals.
//!
//! Decides whether `p ∈ conv{g_1, …, g_k}` by solving the phase-one linear
//! program `Σ λ_i g_i = p, Σ λ_i = 1, λ ≥ 0` with a dense rational simplex
//! tableau and Bland's anti-cycling rule.

use crate::rational::Rational;

/// Returns barycentric weights for `point` if it lies in the hull.
pub fn barycentric_weights(generators: &[Vec<Rational>], point: &[Rational]) -> Option<Vec<Rational>> {
    let k = generators.len();
    if k == 0 || generators.iter().any(|g| g.len() != point.len()) {
        return None;
    }
    let rows = point.len() + 1;
    // Columns: k structural, `rows` artificial, then the right-hand side.
    let cols = k + rows + 1;
    let rhs = cols - 1;
    let mut tab = vec![vec![Rational::zero(); cols]; rows];
    for (r, row) in tab.iter_mut().enumerate() {
        for (j, g) in generators.iter().enumerate() {
            row[j] = if r < point.len() { g[r].clone() } else { Rational::one() };
        }
        row[rhs] = if r < point.len() { point[r].clone() } else { Rational::one() };
        if row[rhs].is_negative() {
            for v in row.iter_mut() {
                *v = -&*v;
            }
        }
        row[k + r] = Rational::one();
    }
    let mut basis: Vec<usize> = (k..k + rows).collect();

    // Reduced costs of the phase-one objective (minimise Σ artificials).
    let mut cost = vec![Rational::zero(); cols];
    for row in &tab {
        for j in 0..cols {
            if j < k || j == rhs {
                cost[j] -= &row[j];
            }
        }
    }

    while let Some(enter) = (0..k + rows).find(|&j| cost[j].is_negative()) {
        let mut leave: Option<(usize, Rational)> = None;
        for (r, row) in tab.iter().enumerate() {
            if row[enter].is_positive() {
                let ratio = &row[rhs] / &row[enter];
                let better = match &leave {
                    None => true,
                    Some((lr, best)) => ratio < *best || (ratio == *best && basis[r] < basis[*lr]),
                };
                if better {
                    leave = Some((r, ratio));
                }
            }
        }
        // Phase one is bounded below by zero, so an entering column always has
        // a positive entry.
        let (pr, _) = leave.expect("phase-one objective is bounded");
        let pivot = tab[pr][enter].clone();
        for v in tab[pr].iter_mut() {
            *v = &*v / &pivot;
        }
        let pivot_row = tab[pr].clone();
        for (r, row) in tab.iter_mut().enumerate() {
            if r == pr || row[enter].is_zero() {
                continue;
            }
            let f = row[enter].clone();
            for (v, p) in row.iter_mut().zip(&pivot_row) {
                *v -= &(&f * p);
            }
        }
        let f = cost[enter].clone();
        for (v, p) in cost.iter_mut().zip(&pivot_row) {
            *v -= &(&f * p);
        }
        basis[pr] = enter;
    }

    if !cost[rhs].is_zero() {
        return None;
    }
    let mut weights = vec![Rational::zero(); k];
    for (r, &b) in basis.iter().enumerate() {
        if b < k {
            weights[b] = tab[r][rhs].clone();
        }
    }
    Some(weights)
}

pub fn contains(generators: &[Vec<Rational>], point: &[Rational]) -> bool {
    barycentric_weights(generators, point).is_some()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(xs: &[(i64, i64)]) -> Vec<Rational> {
        xs.iter().map(|&(n, d)| Rational::new(n, d)).collect()
    }

    fn triangle() -> Vec<Vec<Rational>> {
        vec![v(&[(0, 1), (0, 1)]), v(&[(1, 1), (0, 1)]), v(&[(0, 1), (1, 1)])]
    }

    #[test]
    fn triangle_membership() {
        let t = triangle();
        assert!(contains(&t, &v(&[(1, 3), (1, 3)])));
        assert!(contains(&t, &v(&[(1, 2), (1, 2)])));
        assert!(contains(&t, &v(&[(0, 1), (0, 1)])));
        assert!(!contains(&t, &v(&[(2, 3), (1, 2)])));
        assert!(!contains(&t, &v(&[(-1, 10), (0, 1)])));
    }

    #[test]
    fn weights_reproduce_point() {
        let t = triangle();
        let p = v(&[(1, 4), (1, 2)]);
        let w = barycentric_weights(&t, &p).unwrap();
        let total: Rational = w.iter().sum();
        assert!(total.is_one());
        for c in 0..2 {
            let s: Rational = w.iter().zip(&t).map(|(wi, g)| wi * &g[c]).sum();
            assert_eq!(s, p[c]);
        }
    }

    #[test]
    fn degenerate_generators() {
        // Repeated and collinear generators in Q².
        let g = vec![v(&[(0, 1), (0, 1)]), v(&[(2, 1), (2, 1)]), v(&[(1, 1), (1, 1)]), v(&[(0, 1), (0, 1)])];
        assert!(contains(&g, &v(&[(3, 2), (3, 2)])));
        assert!(!contains(&g, &v(&[(1, 1), (0, 1)])));
        assert!(!contains(&g, &v(&[(3, 1), (3, 1)])));
    }

    #[test]
    fn dimension_mismatch_is_not_contained() {
        assert!(!contains(&triangle(), &v(&[(0, 1)])));
        assert!(!contains(&[], &v(&[(0, 1)])));
    }
}
