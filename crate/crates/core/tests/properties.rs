mod common;

use common::affine_oracle;
use convexity::dist::enumerate_on_grid;
use convexity::report::Value;
use convexity::{
    build_relations, drop_last, dyadic_plus_thirds, l1_distance, permute, product_split, quotient_coordinates,
    recover_norm, ConvexModel, FiniteCarrier, Instance, MetricKind, Permutation, Point, ProbDist, Rational, Weight,
};
use proptest::prelude::*;

/// Weights on the grid of 48ths, which contains every dyadic up to 1/16
/// and every third.
fn weight() -> impl Strategy<Value = Weight> {
    (0..=48i64).prop_map(|k| Weight::of(k, 48))
}

fn interior_weight() -> impl Strategy<Value = Weight> {
    (1..48i64).prop_map(|k| Weight::of(k, 48))
}

fn dist(max_len: usize) -> impl Strategy<Value = ProbDist> {
    dist_sized(1..=max_len)
}

fn dist_sized(len: impl Into<prop::collection::SizeRange>) -> impl Strategy<Value = ProbDist> {
    prop::collection::vec(0..=12i64, len)
        .prop_filter("nonzero mass", |v| v.iter().any(|&x| x > 0))
        .prop_map(|raw| {
            let total: i64 = raw.iter().sum();
            ProbDist::from_rationals(raw.iter().map(|&x| Rational::new(x, total)).collect()).unwrap()
        })
}

fn coord() -> impl Strategy<Value = Rational> {
    (-24..=24i64, prop::sample::select(vec![1i64, 2, 3, 4, 6, 8])).prop_map(|(n, d)| Rational::new(n, d))
}

fn point2() -> impl Strategy<Value = Point> {
    prop::collection::vec(coord(), 2).prop_map(Point::Vector)
}

fn metric() -> impl Strategy<Value = MetricKind> {
    prop_oneof![
        Just(MetricKind::L1),
        Just(MetricKind::LInf),
        Just(MetricKind::WeightedL1(vec![Rational::new(1, 2), Rational::from_integer(3)])),
    ]
}

/// A square big enough to hold every generated point.
fn big_square(m: MetricKind) -> ConvexModel {
    ConvexModel::hull_of(&[&[-30, -30], &[30, -30], &[30, 30], &[-30, 30]], Some(m)).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn metrics_are_metrics(m in metric(), x in point2(), y in point2(), z in point2()) {
        let model = big_square(m);
        let d = |a: &Point, b: &Point| model.metric(a, b).unwrap();
        prop_assert!(d(&x, &x).is_zero());
        prop_assert_eq!(d(&x, &y), d(&y, &x));
        prop_assert!(d(&x, &z) <= &d(&x, &y) + &d(&y, &z));
        prop_assert_eq!(d(&x, &y).is_zero(), x == y);
    }

    #[test]
    fn l1_distance_is_a_metric((a, b, c) in (1..=4usize).prop_flat_map(|n| (dist_sized(n), dist_sized(n), dist_sized(n)))) {
        let d = |p: &ProbDist, q: &ProbDist| l1_distance(p, q).unwrap();
        prop_assert!(d(&a, &a).is_zero());
        prop_assert_eq!(d(&a, &b), d(&b, &a));
        prop_assert!(d(&a, &c) <= &d(&a, &b) + &d(&b, &c));
        prop_assert!(d(&a, &b) <= Rational::from_integer(2));
    }

    #[test]
    fn drop_last_reassembles(mu in dist(6)) {
        prop_assume!(mu.len() >= 2 && !mu.last().is_one());
        let (nu, t) = drop_last(&mu).unwrap();
        prop_assert_eq!(&t, mu.last());
        for i in 0..nu.len() {
            prop_assert_eq!(nu.get(i).value() * t.complement().value(), mu.get(i).value().clone());
        }
    }

    #[test]
    fn product_split_is_a_distribution(l in weight(), mu in dist(4), mu_tilde in dist(4)) {
        let nu = ProbDist::binary(&l);
        let eta = product_split(&nu, &mu, &mu_tilde).unwrap();
        prop_assert_eq!(eta.len(), mu.len() + mu_tilde.len());
        let total: Rational = eta.weights().iter().map(|w| w.value().clone()).sum();
        prop_assert!(total.is_one());
        let head: Rational = eta.weights()[..mu.len()].iter().map(|w| w.value().clone()).sum();
        prop_assert_eq!(&head, l.value());
    }

    #[test]
    fn permute_then_inverse(mu in dist(6), seed in any::<u64>()) {
        let n = mu.len();
        let mut images: Vec<usize> = (0..n).collect();
        let mut s = seed;
        for i in (1..n).rev() {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            images.swap(i, (s >> 33) as usize % (i + 1));
        }
        let sigma = Permutation::new(images).unwrap();
        let back = permute(&permute(&mu, &sigma).unwrap(), &sigma.inverse()).unwrap();
        prop_assert_eq!(back, mu);
    }

    #[test]
    fn gamma_is_the_affine_combination(mu in dist(5), pts in prop::collection::vec(point2(), 5)) {
        let model = big_square(MetricKind::L1);
        let points = &pts[..mu.len()];
        let got = model.gamma(&mu, points).unwrap();
        prop_assert_eq!(got, Point::Vector(affine_oracle(&mu, points)));
    }

    #[test]
    fn hull_axioms_hold_exactly(l in weight(), m in weight(), x in point2(), y in point2(), z in point2()) {
        let model = big_square(MetricKind::LInf);
        let instances = vec![
            Instance::Unit { x: x.clone(), y: y.clone() },
            Instance::Idempotency { lambda: l.clone(), x: x.clone() },
            Instance::Commutativity { lambda: l.clone(), x: x.clone(), y: y.clone() },
            Instance::Associativity {
                lambda: l.clone(),
                mu: m.clone(),
                nu: convexity::nu_assoc(&l, &m).unwrap_or_else(|_| Weight::of(1, 2)),
                x: x.clone(), y: y.clone(), z: z.clone(),
            },
            Instance::Contraction { lambda: l.clone(), x: x.clone(), y: y.clone(), z: z.clone() },
            Instance::UniformOnLines { lambda: l, x, y },
        ];
        for inst in instances {
            let o = inst.evaluate(&model).unwrap();
            prop_assert!(o.holds(), "{:?}: {:?}", inst, o);
        }
    }

    #[test]
    fn norm_is_absolutely_homogeneous(m in metric(), v in prop::collection::vec(coord(), 2), k in -3..=3i64) {
        let model = big_square(m);
        let origin = [Point::ints(&[0, 0])];
        let n = |w: &[Rational]| recover_norm(&model, &origin, w, 1).unwrap().value;
        let scaled: Vec<Rational> = v.iter().map(|c| c * &Rational::from_integer(k)).collect();
        prop_assert_eq!(n(&scaled), &n(&v) * &Rational::from_integer(k).abs());
        prop_assert_eq!(n(&v).is_zero(), v.iter().all(Rational::is_zero));
    }

    #[test]
    fn norm_does_not_depend_on_the_base(m in metric(), v in prop::collection::vec(coord(), 2), b in point2()) {
        let model = big_square(m);
        let at = |base: Point| recover_norm(&model, &[base], &v, 1).unwrap().value;
        prop_assert_eq!(at(Point::ints(&[0, 0])), at(b.clone()));
        let minus: Vec<Rational> = v.iter().map(|c| -c).collect();
        prop_assert_eq!(
            recover_norm(&model, &[b], &minus, 1).unwrap().value,
            at(Point::ints(&[0, 0]))
        );
    }

    #[test]
    fn relation_rows_sum_to_zero(l in interior_weight(), pts in prop::collection::vec(point2(), 2..5)) {
        let model = big_square(MetricKind::L1);
        let mut all = pts.clone();
        for x in &pts {
            for y in &pts {
                all.push(model.cc(&l, x, y).unwrap());
            }
        }
        let carrier = FiniteCarrier::from_points(all);
        let grid = vec![Weight::zero(), l, Weight::one()];
        let rel = build_relations(&carrier, &model, &grid).unwrap();
        prop_assert!(rel.rows.len() >= pts.len() * pts.len());
        for row in &rel.rows {
            prop_assert!(row.coefficient_sum().is_zero());
        }
        // Hull carriers always embed injectively.
        prop_assert!(quotient_coordinates(&rel, &carrier).injective_on_sample);
    }

    #[test]
    fn rationals_round_trip_as_text(n in any::<i32>(), d in 1..=i32::MAX) {
        let q = Rational::new(n as i64, d as i64);
        let text = q.to_string();
        prop_assert!(text.contains('/'));
        prop_assert_eq!(text.parse::<Rational>().unwrap(), q.clone());
        let json = serde_json::to_string(&q).unwrap();
        prop_assert_eq!(serde_json::from_str::<Rational>(&json).unwrap(), q);
    }
}

#[test]
fn grid_enumeration_is_complete_and_normalized() {
    let grid = dyadic_plus_thirds(2);
    for n in 1..=4 {
        let all = enumerate_on_grid(n, &grid);
        for mu in &all {
            let total: Rational = mu.weights().iter().map(|w| w.value().clone()).sum();
            assert!(total.is_one());
            assert!(mu.weights().iter().all(|w| grid.contains(w)));
        }
        let mut sorted = all.clone();
        sorted.dedup();
        assert_eq!(sorted.len(), all.len());
    }
    // (1), and for n = 2 one entry per grid weight.
    assert_eq!(enumerate_on_grid(1, &grid).len(), 1);
    assert_eq!(enumerate_on_grid(2, &grid).len(), grid.len());
}

#[test]
fn first_metric_condition_on_diracs_is_the_distance() {
    let model = ConvexModel::hull_of(&[&[0], &[3]], Some(MetricKind::L1)).unwrap();
    let points = vec![Point::ints(&[0]), Point::ints(&[3])];
    let inst = Instance::FirstMetricCondition {
        constant: Rational::new(3, 2),
        mu: ProbDist::dirac(2, 0),
        mu_tilde: ProbDist::dirac(2, 1),
        points,
    };
    let o = inst.evaluate(&model).unwrap();
    assert_eq!(o.lhs, Value::Scalar(Rational::from_integer(3)));
    assert_eq!(o.rhs, Value::Scalar(Rational::from_integer(3)));
    assert!(o.holds());
}
