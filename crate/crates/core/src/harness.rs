//! Seeded refutation checks for the convex-space and barycentric axioms, the
//! cancellation property, and the first metric condition.
//!
//! Finite models are checked exhaustively wherever the instance space is a
//! product of the carrier and the weight grid; hulls are sampled. A passing
//! report means "no counterexample within budget", never a proof.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{nu_assoc, ConvexModel, Point};
use crate::rational::{Rational, Weight};
use crate::report::{CheckReport, Instance};
use crate::sampler::{grid_pools, Sampler};
use crate::dist::{l1_distance, ProbDist};

/// Longest distribution used by the barycentric checks.
pub const MAX_GAMMA_LEN: usize = 5;
/// Longest second block in the composition axiom.
pub const MAX_BLOCK_LEN: usize = 3;
/// Longest distribution used by the metric checks.
pub const MAX_METRIC_LEN: usize = 4;

/// `cc_λ(x, y) = cc_λ(x, z)` with `y ≠ z` and `λ ∈ (0, 1)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CancellationWitness {
    pub x: Point,
    pub y: Point,
    pub z: Point,
    pub lambda: Weight,
}

impl CancellationWitness {
    /// Confirms the witness is a genuine cancellation failure in `model`.
    pub fn validate(&self, model: &ConvexModel) -> Result<()> {
        if self.y == self.z {
            return Err(Error::InvalidWitness("y and z coincide".into()));
        }
        if !self.lambda.is_interior() {
            return Err(Error::InvalidWitness(format!("weight {} is not in (0, 1)", self.lambda)));
        }
        let a = model.cc(&self.lambda, &self.x, &self.y)?;
        let b = model.cc(&self.lambda, &self.x, &self.z)?;
        if a != b {
            return Err(Error::InvalidWitness("cc values differ".into()));
        }
        Ok(())
    }
}

/// Triples of carrier points: all of them for finite models, `budget`
/// samples for hulls.
fn triples(model: &ConvexModel, sampler: &Sampler, check: &str) -> Vec<(Point, Point, Point)> {
    if let Some(c) = model.finite_carrier() {
        let mut out = Vec::with_capacity(c.len().pow(3));
        for x in &c {
            for y in &c {
                for z in &c {
                    out.push((x.clone(), y.clone(), z.clone()));
                }
            }
        }
        return out;
    }
    let mut s = sampler.stream(check);
    (0..sampler.budget)
        .map(|_| (s.point(model), s.point(model), s.point(model)))
        .collect()
}

/// Three distinct grid weights standing in for "ν arbitrary".
fn arbitrary_nus(sampler: &Sampler) -> Vec<Weight> {
    let mut pool = sampler.grid.clone();
    let mut s = sampler.stream("cs.4/arbitrary");
    let mut out = Vec::new();
    while out.len() < 3 && !pool.is_empty() {
        out.push(pool.remove(s.index(pool.len())));
    }
    out.sort();
    out
}

/// Unit, idempotency, commutativity and associativity of `cc`.
pub fn check_convex_space_axioms(model: &ConvexModel, sampler: &Sampler) -> Result<CheckReport> {
    let mut report = CheckReport::new("convex_space_axioms");
    let grid = &sampler.grid;
    let nus = arbitrary_nus(sampler);
    let finite = model.finite_carrier().is_some();

    for (x, y, z) in triples(model, sampler, "convex_space_axioms") {
        // Unit and idempotency only depend on one or two of the points.
        if !finite || z == x {
            report.run(model, Instance::Unit { x: x.clone(), y: y.clone() })?;
        }
        if !finite || (y == x && z == x) {
            for l in grid {
                report.run(model, Instance::Idempotency { lambda: l.clone(), x: x.clone() })?;
            }
        }
        if !finite || z == x {
            for l in grid {
                report.run(model, Instance::Commutativity { lambda: l.clone(), x: x.clone(), y: y.clone() })?;
            }
        }
        for l in grid {
            for m in grid {
                let nu_choices = match nu_assoc(l, m) {
                    Ok(nu) => vec![nu],
                    Err(Error::DegenerateAssociativity) => nus.clone(),
                    Err(e) => return Err(e),
                };
                for nu in nu_choices {
                    report.run(
                        model,
                        Instance::Associativity {
                            lambda: l.clone(),
                            mu: m.clone(),
                            nu,
                            x: x.clone(),
                            y: y.clone(),
                            z: z.clone(),
                        },
                    )?;
                }
            }
        }
    }
    report.canonicalize();
    Ok(report)
}

/// The algebraic barycentric axioms for the derived n-ary operation:
/// permutation invariance, merging of equal arguments, Dirac masses and
/// composition of blocks.
pub fn check_gamma_axioms(model: &ConvexModel, sampler: &Sampler) -> Result<CheckReport> {
    let mut report = CheckReport::new("gamma_axioms");
    let pools = grid_pools(&sampler.grid, MAX_GAMMA_LEN);
    let mut s = sampler.stream("gamma_axioms");

    for n in 1..=MAX_GAMMA_LEN {
        for k in 0..sampler.budget {
            let mu = s.dist_from(&pools[n], n);
            let sigma = s.permutation(n);
            let points = s.points(model, n);
            report.run(model, Instance::GammaPermutation { mu, sigma, points })?;

            if n >= 2 {
                let mu = s.dist_from(&pools[n], n);
                let mut points = s.points(model, n);
                points[1] = points[0].clone();
                report.run(model, Instance::GammaMerge { mu, points })?;
            }

            let mu = ProbDist::dirac(n, k % n);
            let points = s.points(model, n);
            report.run(model, Instance::GammaDirac { mu, points })?;

            let m = 1 + k % MAX_BLOCK_LEN;
            let nu = s.dist_from(&pools[2], 2);
            let mu = s.dist_from(&pools[n], n);
            let mu_tilde = s.dist_from(&pools[m], m);
            let points = s.points(model, n);
            let points_tilde = s.points(model, m);
            report.run(model, Instance::GammaComposition { nu, mu, mu_tilde, points, points_tilde })?;
        }
    }
    report.canonicalize();
    Ok(report)
}

/// Metric compatibility of `γ_μ` and its binary contraction form
/// `d(cc_λ(y, x), cc_λ(z, x)) ≤ λ d(y, z)`.
pub fn check_metric_axiom(model: &ConvexModel, sampler: &Sampler) -> Result<CheckReport> {
    if !model.has_metric() {
        return Err(Error::NoMetric);
    }
    let mut report = CheckReport::new("metric_axiom");
    let pools = grid_pools(&sampler.grid, MAX_METRIC_LEN);
    let mut s = sampler.stream("metric_axiom");
    for (n, pool) in pools.iter().enumerate().skip(1) {
        for _ in 0..sampler.budget {
            let mu = s.dist_from(pool, n);
            let points = s.points(model, n);
            let others = if s.coin() { s.points(model, n) } else { points.clone() };
            report.run(model, Instance::MetricCompatibility { mu, points, others })?;
        }
    }
    for (x, y, z) in triples(model, sampler, "contraction") {
        let lambda = s.weight();
        report.run(model, Instance::Contraction { lambda, x, y, z })?;
    }
    report.canonicalize();
    Ok(report)
}

/// `d(γ_μ(x), γ_{μ̃}(x)) ≤ C ‖μ − μ̃‖₁`.
///
/// Dirac pairs over the generator tuple are always tried first, since they
/// realise the diameter. The report's `max_ratio` stat is the largest
/// observed `d / ‖μ − μ̃‖₁`, a lower bound on the best constant.
pub fn check_first_metric_condition(model: &ConvexModel, constant: &Rational, sampler: &Sampler) -> Result<CheckReport> {
    if !model.has_metric() {
        return Err(Error::NoMetric);
    }
    let mut report = CheckReport::new("first_metric_condition");
    report.record_max("max_ratio", Rational::zero());
    let run = |report: &mut CheckReport, mu: ProbDist, mu_tilde: ProbDist, points: Vec<Point>| -> Result<()> {
        let l1 = l1_distance(&mu, &mu_tilde)?;
        let inst = Instance::FirstMetricCondition { constant: constant.clone(), mu, mu_tilde, points };
        if let Some(outcome) = report.run(model, inst)? {
            if let (false, crate::report::Value::Scalar(d)) = (l1.is_zero(), &outcome.lhs) {
                report.record_max("max_ratio", d / &l1);
            }
        }
        Ok(())
    };

    let gens = model.generators();
    if gens.len() <= MAX_GAMMA_LEN {
        let n = gens.len();
        for i in 0..n {
            for j in 0..n {
                run(&mut report, ProbDist::dirac(n, i), ProbDist::dirac(n, j), gens.clone())?;
            }
        }
    }
    let pools = grid_pools(&sampler.grid, MAX_METRIC_LEN);
    let mut s = sampler.stream("first_metric_condition");
    for (n, pool) in pools.iter().enumerate().skip(1) {
        for _ in 0..sampler.budget {
            let mu = s.dist_from(pool, n);
            let mu_tilde = if s.coin() { s.dist_from(pool, n) } else { mu.clone() };
            let points = s.points(model, n);
            run(&mut report, mu, mu_tilde, points)?;
        }
    }
    report.canonicalize();
    Ok(report)
}

/// Looks for `cc_λ(x, y) = cc_λ(x, z)` with `y ≠ z`, `λ` interior.
///
/// Finite models are scanned exhaustively in carrier order, then by weight
/// (`1/2` first, the rest ascending); the first hit is returned.
pub fn cancellation_search(model: &ConvexModel, sampler: &Sampler) -> Result<Option<CancellationWitness>> {
    cancellation_search_in(model, sampler, None)
}

/// Like [`cancellation_search`], but with `y` and `z` drawn from `candidates`
/// when given.
pub fn cancellation_search_in(
    model: &ConvexModel,
    sampler: &Sampler,
    candidates: Option<&[Point]>,
) -> Result<Option<CancellationWitness>> {
    // The midpoint first: it is the weight a reader expects a witness at.
    let mut weights = sampler.interior();
    weights.sort_by_key(|l| (*l != Weight::of(1, 2), l.clone()));
    let hit = |x: &Point, y: &Point, z: &Point, l: &Weight| -> Result<Option<CancellationWitness>> {
        match (model.cc(l, x, y), model.cc(l, x, z)) {
            (Ok(a), Ok(b)) if a == b => Ok(Some(CancellationWitness {
                x: x.clone(),
                y: y.clone(),
                z: z.clone(),
                lambda: l.clone(),
            })),
            (Err(Error::UnsupportedWeight(_)), _) | (_, Err(Error::UnsupportedWeight(_))) => Ok(None),
            (Err(e), _) | (_, Err(e)) => Err(e),
            _ => Ok(None),
        }
    };

    if let Some(carrier) = model.finite_carrier() {
        let ys: Vec<Point> = candidates.map_or_else(|| carrier.clone(), <[Point]>::to_vec);
        for x in &carrier {
            for (i, y) in ys.iter().enumerate() {
                for z in &ys[i + 1..] {
                    for l in &weights {
                        if let Some(w) = hit(x, y, z, l)? {
                            return Ok(Some(w));
                        }
                    }
                }
            }
        }
        return Ok(None);
    }

    let mut s = sampler.stream("cancellation_search");
    for _ in 0..sampler.budget {
        let x = s.point(model);
        let (y, z) = match candidates {
            Some(c) if c.len() >= 2 => {
                let i = s.index(c.len());
                let mut j = s.index(c.len() - 1);
                if j >= i {
                    j += 1;
                }
                (c[i].clone(), c[j].clone())
            }
            _ => (s.point(model), s.point(model)),
        };
        if y == z {
            continue;
        }
        for l in &weights {
            if let Some(w) = hit(&x, &y, &z, l)? {
                return Ok(Some(w));
            }
        }
    }
    Ok(None)
}

/// `[λ_1, …, λ_k]` with `λ_{n+1} = 2λ_n / (1 + λ_n)`.
pub fn lambda_sequence(lambda0: &Weight, k: usize) -> Result<Vec<Weight>> {
    if !lambda0.is_interior() {
        return Err(Error::DegenerateWeight(lambda0.to_string()));
    }
    let two = Rational::from_integer(2);
    let mut out = Vec::with_capacity(k);
    let mut cur = lambda0.value().clone();
    for _ in 0..k {
        cur = &two * &cur / (Rational::one() + &cur);
        out.push(Weight::new(cur.clone())?);
    }
    Ok(out)
}

/// Checks that a cancellation failure at one weight propagates to others.
///
/// The witness `cc_λ(x, y) = cc_λ(x, z)` is read, via commutativity, as
/// `cc_{λ'}(y, x) = cc_{λ'}(z, x)` with `λ' = 1 − λ`. The report covers `λ'`
/// itself, the upward sequence from `λ'`, and every interior grid weight
/// below `λ'`.
pub fn cancellation_propagation(
    model: &ConvexModel,
    witness: &CancellationWitness,
    steps: usize,
    sampler: &Sampler,
) -> Result<CheckReport> {
    witness.validate(model)?;
    let start = witness.lambda.complement();
    let mut weights = vec![start.clone()];
    weights.extend(lambda_sequence(&start, steps)?);
    weights.extend(sampler.interior().into_iter().filter(|l| *l < start));

    let mut report = CheckReport::new("cancellation_propagation");
    for lambda in weights {
        report.run(
            model,
            Instance::Propagation {
                lambda,
                x: witness.x.clone(),
                y: witness.y.clone(),
                z: witness.z.clone(),
            },
        )?;
    }
    report.canonicalize();
    Ok(report)
}
