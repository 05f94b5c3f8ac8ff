mod common;

use std::collections::BTreeSet;

use atsp_core::{
    clip_length, construct, diameter, dyadic_filtration, euler_parametrization, farthest_insertion_order, mst,
    square_sum, Ball, ConstructionParams, Point, PointSet, PolylineCurve,
};
use proptest::prelude::*;

fn planar(min: usize, max: usize) -> impl Strategy<Value = PointSet> {
    prop::collection::vec(prop::array::uniform2(-1.0f64..1.0), min..max)
        .prop_map(|rows| PointSet::from_rows(&rows).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn mst_matches_enumeration(k in planar(2, 7)) {
        let t = mst(&k).unwrap();
        let (len, edges) = common::brute_force_mst(&k);
        prop_assert_eq!(common::sorted_edges(&t), edges);
        prop_assert!((t.total_length() - len).abs() <= 1e-12 * len);
    }

    #[test]
    fn mst_sits_between_diameter_and_path_bound(k in planar(2, 80)) {
        let t = mst(&k).unwrap();
        let d = diameter(&k).unwrap();
        prop_assert!(t.is_connected());
        prop_assert_eq!(t.edges().len(), k.len() - 1);
        prop_assert!(d <= t.total_length() + 1e-12);
        prop_assert!(t.total_length() <= (k.len() - 1) as f64 * d + 1e-12);
    }

    #[test]
    fn tour_walks_every_edge_twice(k in planar(1, 60)) {
        let t = mst(&k).unwrap();
        let tour = euler_parametrization(&t).unwrap();
        prop_assert!((tour.curve.length() - 2.0 * t.total_length()).abs() <= 1e-12 * t.total_length().max(1.0));
        prop_assert_eq!(tour.sequence.first(), tour.sequence.last());
        let seen: BTreeSet<usize> = tour.sequence.iter().copied().collect();
        prop_assert_eq!(seen.len(), k.len());
    }

    #[test]
    fn clipped_length_is_at_most_total(k in planar(2, 30), c in prop::array::uniform2(-1.0f64..1.0), r in 0.01f64..3.0) {
        let curve = PolylineCurve::new(k);
        let q = Ball::new(Point::new(c.to_vec()).unwrap(), r).unwrap();
        let inside = clip_length(&curve, &q);
        prop_assert!(inside >= 0.0 && inside <= curve.length() + 1e-12);
        let big = Ball::new(Point::new(c.to_vec()).unwrap(), 10.0).unwrap();
        prop_assert!((clip_length(&curve, &big) - curve.length()).abs() <= 1e-12 * curve.length());
    }

    #[test]
    fn insertion_distances_never_grow(k in planar(2, 80)) {
        let o = farthest_insertion_order(&k).unwrap();
        let d: Vec<f64> = o.order.iter().skip(1).map(|&i| o.d[i]).collect();
        prop_assert!(d.windows(2).all(|w| w[1] <= w[0]));
    }

    #[test]
    fn construction_keeps_g_connected(k in planar(2, 60), a in 2.0f64..12.0) {
        let c = construct(&k, ConstructionParams { a, ..Default::default() }).unwrap();
        prop_assert!(c.g.is_connected());
        prop_assert!(c.g_length() >= mst(&k).unwrap().total_length() - 1e-9);
        prop_assert!(c.union_length <= c.g_length() + c.h_length() + 1e-9);
    }

    #[test]
    fn filtration_scales_linearly(k in planar(3, 20), lambda in 0.1f64..10.0) {
        let curve = PolylineCurve::new(k.clone());
        prop_assume!(curve.length() > 1e-6);
        let big = PolylineCurve::new(k.scaled(lambda));
        let s = square_sum(&dyadic_filtration(&curve, 5, 1).unwrap());
        let sl = square_sum(&dyadic_filtration(&big, 5, 1).unwrap());
        prop_assert!((sl - lambda * s).abs() <= 1e-9 * (lambda * s).max(1e-12));
    }
}
