use atsp_core::beta::{beta_points_with, LineSearch};
use atsp_core::{beta_oracle_2d, beta_points, Ball, Point, PointSet};
use proptest::prelude::*;

fn planar(max: usize) -> impl Strategy<Value = Vec<[f64; 2]>> {
    prop::collection::vec(prop::array::uniform2(-1.0f64..1.0), 2..max)
}

fn ball(c: [f64; 2], r: f64) -> Ball {
    Ball::new(Point::new(c.to_vec()).unwrap(), r).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn scale_invariant(rows in planar(12), lambda in 0.01f64..100.0, r in 0.5f64..3.0) {
        let k = PointSet::from_rows(&rows).unwrap();
        let b = beta_points(&k, &ball([0.0, 0.0], r)).unwrap().value;
        let bl = beta_points(&k.scaled(lambda), &ball([0.0, 0.0], lambda * r)).unwrap().value;
        prop_assert!((b - bl).abs() <= 1e-9 * b.max(1e-12), "{b} vs {bl}");
    }

    #[test]
    fn rigid_motion_invariant(rows in planar(12), angle in 0.0f64..6.3, shift in prop::array::uniform2(-5.0f64..5.0)) {
        let k = PointSet::from_rows(&rows).unwrap();
        let (c, s) = (angle.cos(), angle.sin());
        let moved = k.map(2, |p| vec![c * p[0] - s * p[1] + shift[0], s * p[0] + c * p[1] + shift[1]]).unwrap();
        // radius 5 keeps every point inside both balls
        let b = beta_points(&k, &ball([0.0, 0.0], 5.0)).unwrap().value;
        let bm = beta_points(&moved, &ball(shift, 5.0)).unwrap().value;
        prop_assert!((b - bm).abs() <= 1e-9, "{b} vs {bm}");
    }

    #[test]
    fn exact_sits_below_oracle_and_heuristic(rows in planar(12)) {
        let k = PointSet::from_rows(&rows).unwrap();
        let q = ball([0.0, 0.0], 2.0);
        let exact = beta_points(&k, &q).unwrap().value;
        let oracle = beta_oracle_2d(&k, &q, 720).unwrap().value;
        let heur = beta_points_with(&k, &q, LineSearch::CandidateAxesOnly).unwrap().value;
        prop_assert!(exact <= oracle + 1e-12);
        prop_assert!(exact <= heur + 1e-12);
        prop_assert!(heur <= 2.0 * exact + 1e-12);
    }

    #[test]
    fn monotone_in_the_set(rows in planar(12), keep in prop::collection::vec(any::<bool>(), 12)) {
        let k = PointSet::from_rows(&rows).unwrap();
        let sub: Vec<usize> = (0..k.len()).filter(|&i| keep[i]).collect();
        let q = ball([0.0, 0.0], 2.0);
        let whole = beta_points(&k, &q).unwrap().value;
        let part = beta_points(&k.select(&sub), &q).unwrap().value;
        prop_assert!(part <= whole + 1e-12);
    }

    #[test]
    fn witness_line_holds_the_set(rows in planar(12)) {
        let k = PointSet::from_rows(&rows).unwrap();
        let q = ball([0.0, 0.0], 2.0);
        let b = beta_points(&k, &q).unwrap();
        for p in k.iter() {
            let d = atsp_core::point_line_distance(p, &b.witness_line).unwrap();
            prop_assert!(d <= b.value * q.diam() / 2.0 + 1e-12);
        }
    }
}

#[test]
fn beta_is_bounded_by_one() {
    let k = PointSet::from_rows(&[[1.0, 0.0], [-1.0, 0.0], [0.0, 1.0], [0.0, -1.0]]).unwrap();
    let b = beta_points(&k, &ball([0.0, 0.0], 1.0)).unwrap().value;
    assert!(b > 0.0 && b <= 1.0);
}
