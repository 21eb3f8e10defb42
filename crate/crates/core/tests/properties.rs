use proptest::prelude::*;

use hullkit::fixtures;
use hullkit::hull::{hull_depth, in_hull, min_cut_exact, min_cut_sampled};
use hullkit::projection::{min_cut_2d, project};
use hullkit::surgery::{replace_subarc, ArcSpec, LoopPoint};
use hullkit::{cut_count, Link64, Plane64, Point64, Tolerance64};

fn trefoil() -> Link64 {
    fixtures::trefoil::<f64>(32).unwrap().link
}

fn point() -> impl Strategy<Value = Point64> {
    (-3.2..3.2f64, -3.2..3.2f64, -1.2..1.2f64).prop_map(|(x, y, z)| Point64::new(x, y, z))
}

fn unit() -> impl Strategy<Value = Point64> {
    (-1.0..1.0f64, -1.0..1.0f64, -1.0..1.0f64)
        .prop_filter_map("nonzero", |(x, y, z)| Point64::new(x, y, z).normalized())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn exact_minimum_is_a_lower_bound_for_every_plane(p in point(), n in unit()) {
        let k = trefoil();
        let tol = Tolerance64::for_link(&k);
        if let Ok(q) = min_cut_exact(p, &k, &tol) {
            let plane = Plane64::through(p, n).unwrap();
            prop_assert!(q.min_count <= cut_count(&k, &plane, &tol).total);
            prop_assert_eq!(q.min_count % 2, 0);
            prop_assert_eq!(cut_count(&k, &q.witness, &tol).total, q.min_count);
        }
    }

    #[test]
    fn sampled_never_below_exact(p in point(), seed in any::<u64>()) {
        let k = trefoil();
        let tol = Tolerance64::for_link(&k);
        if let (Ok(e), Ok(s)) = (min_cut_exact(p, &k, &tol), min_cut_sampled(p, &k, 200, seed, &tol)) {
            prop_assert!(e.min_count <= s.min_count);
        }
    }

    #[test]
    fn hulls_are_nested(p in point()) {
        let k = trefoil();
        let tol = Tolerance64::for_link(&k);
        if let Ok(d) = hull_depth(p, &k, &tol) {
            for n in 1..=3 {
                prop_assert_eq!(in_hull(p, &k, n, &tol).unwrap(), d >= n);
            }
        }
    }

    #[test]
    fn depth_survives_similarity(p in point(), s in 0.2..5.0f64, t in point()) {
        let k = trefoil();
        let tol = Tolerance64::for_link(&k);
        if let Ok(d) = hull_depth(p, &k, &tol) {
            let f = |v: Point64| v * s + t;
            let image = k.map_vertices(f);
            let d2 = hull_depth(f(p), &image, &Tolerance64::for_link(&image)).unwrap();
            prop_assert_eq!(d, d2);
        }
    }

    #[test]
    fn projection_never_loses_depth(p in point(), dir in unit()) {
        let k = trefoil();
        let tol = Tolerance64::for_link(&k);
        let pr = project(&k, dir, &tol).unwrap();
        if let (Ok(q3), Ok(q2)) = (min_cut_exact(p, &k, &tol), min_cut_2d(pr.projection.map(p), &pr.link, &tol)) {
            prop_assert!(q2.min_count >= q3.min_count);
        }
    }

    #[test]
    fn chords_never_add_cuts(
        e0 in 0usize..32, span in 1usize..31, a in 0.0..1.0f64, b in 0.0..1.0f64,
        p in point(), n in unit(),
    ) {
        let k = trefoil();
        let tol = Tolerance64::for_link(&k);
        let arc = ArcSpec {
            loop_index: 0,
            start: LoopPoint { edge: e0, param: a },
            end: LoopPoint { edge: (e0 + span) % 32, param: b },
        };
        if let Ok(lp) = replace_subarc(&k.loops()[0], &arc, &tol) {
            let chorded = Link64::single(lp);
            let plane = Plane64::through(p, n).unwrap();
            prop_assert!(cut_count(&chorded, &plane, &tol).total <= cut_count(&k, &plane, &tol).total);
            if let (Ok(before), Ok(after)) = (hull_depth(p, &k, &tol), hull_depth(p, &chorded, &tol)) {
                prop_assert!(after <= before);
            }
        }
    }
}
