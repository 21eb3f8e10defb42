//! Library results checked against independent, deliberately naive oracles.

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use hullkit::curvature::{bridge_superbridge, cone_angle, count_maxima, crofton_estimate};
use hullkit::fixtures;
use hullkit::hull::{extract_hull, hull_depth, min_cut_exact, ExtractOptions, GridSpec};
use hullkit::io;
use hullkit::projection::{
    min_cut_2d, project, projection_lemma_check, union_lemma_check, union_lemma_probe, LemmaOutcome, Point2,
    SampleSource,
};
use hullkit::sampling;
use hullkit::secants::{midsegment_depth_check, quadrisecants};
use hullkit::{cut_count, Link64, Plane64, Point64, PolyLoop, Tolerance64};

fn all_fixtures() -> Vec<(&'static str, Link64)> {
    vec![
        ("trefoil", fixtures::trefoil::<f64>(64).unwrap().link),
        ("circle", fixtures::circle::<f64>(64).unwrap().link),
        ("hopf", fixtures::hopf::<f64>(64).unwrap().link),
        ("unlink", fixtures::two_circle_unlink::<f64>(64).unwrap().link),
        ("composite", fixtures::composite_trefoils::<f64>(64, 3.0).unwrap().link),
    ]
}

fn normal(rng: &mut impl Rng) -> Point64 {
    loop {
        let v = Point64::new(
            StandardNormal.sample(rng),
            StandardNormal.sample(rng),
            StandardNormal.sample(rng),
        );
        if let Some(u) = v.normalized() {
            return u;
        }
    }
}

fn bbox_point(l: &Link64, rng: &mut impl Rng) -> Point64 {
    let (lo, hi) = l.bounding_box().unwrap();
    Point64::new(
        rng.random_range(lo.x..=hi.x),
        rng.random_range(lo.y..=hi.y),
        rng.random_range(lo.z..=hi.z),
    )
}

/// Crossings of a plane that misses every vertex: edges whose ends differ in sign.
fn naive_crossings(l: &Link64, n: Point64, d: f64) -> Option<usize> {
    let mut total = 0;
    for lp in l.loops() {
        let h: Vec<f64> = lp.vertices().iter().map(|&v| n.dot(v) - d).collect();
        if h.iter().any(|x| x.abs() < 1e-9) {
            return None;
        }
        total += (0..h.len()).filter(|&i| (h[i] > 0.0) != (h[(i + 1) % h.len()] > 0.0)).count();
    }
    Some(total)
}

#[test]
fn cut_count_matches_sign_changes_on_generic_planes() {
    let mut rng = sampling::rng(11);
    for (name, l) in all_fixtures() {
        let tol = Tolerance64::for_link(&l);
        let mut compared = 0;
        for _ in 0..20_000 {
            let n = normal(&mut rng);
            let d = n.dot(bbox_point(&l, &mut rng));
            if let Some(c) = naive_crossings(&l, n, d) {
                let plane = Plane64::new(n, d).unwrap();
                assert_eq!(cut_count(&l, &plane, &tol).total, c, "{name}");
                compared += 1;
            }
        }
        assert!(compared > 19_000);
    }
}

#[test]
fn exact_minimum_never_beaten_by_random_planes() {
    let mut rng = sampling::rng(12);
    for (name, l) in all_fixtures() {
        let tol = Tolerance64::for_link(&l);
        for _ in 0..8 {
            let p = bbox_point(&l, &mut rng);
            let Ok(q) = min_cut_exact(p, &l, &tol) else { continue };
            let mut best = usize::MAX;
            for _ in 0..20_000 {
                let n = normal(&mut rng);
                if let Some(c) = naive_crossings(&l, n, n.dot(p)) {
                    best = best.min(c);
                }
            }
            assert!(q.min_count <= best, "{name} at {p:?}: exact {} brute {best}", q.min_count);
            // the witness plane is generic, so the naive count applies to it
            let w = q.witness;
            assert_eq!(naive_crossings(&l, w.normal(), w.offset()), Some(q.min_count), "{name}");
        }
    }
}

/// `min_u max_v u.(v - p)` over a Fibonacci sphere, and the net's covering
/// radius bound.
fn support_slack(vs: &[Point64], p: Point64, n: usize) -> f64 {
    let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
    (0..n)
        .map(|i| {
            let z = 1.0 - 2.0 * (i as f64 + 0.5) / n as f64;
            let r = (1.0 - z * z).sqrt();
            let u = Point64::new(r * (golden * i as f64).cos(), r * (golden * i as f64).sin(), z);
            vs.iter().map(|&v| u.dot(v - p)).fold(f64::MIN, f64::max)
        })
        .fold(f64::MAX, f64::min)
}

#[test]
fn first_hull_of_a_knot_is_its_convex_hull() {
    let dirs = 20_000;
    // generous covering radius for the Fibonacci net
    let delta = 3.0 * (4.0 * std::f64::consts::PI / dirs as f64).sqrt();
    let mut rng = sampling::rng(13);
    for l in [
        fixtures::trefoil::<f64>(64).unwrap().link,
        fixtures::composite_trefoils::<f64>(32, 3.0).unwrap().link,
    ] {
        let tol = Tolerance64::for_link(&l);
        let vs: Vec<Point64> = l.vertices().collect();
        let (mut inside, mut outside) = (0, 0);
        for _ in 0..150 {
            let p = bbox_point(&l, &mut rng);
            let reach = vs.iter().map(|&v| v.distance(p)).fold(0.0, f64::max);
            let s = support_slack(&vs, p, dirs);
            if s < -1e-9 {
                assert_eq!(hull_depth(p, &l, &tol).unwrap(), 0, "{p:?} separated");
                outside += 1;
            } else if s > reach * delta {
                assert!(hull_depth(p, &l, &tol).unwrap() >= 1, "{p:?} inside");
                inside += 1;
            }
        }
        assert!(inside > 10 && outside > 10, "{inside} {outside}");
    }
}

#[test]
fn first_hull_of_the_circle_is_its_disk() {
    let c = fixtures::circle::<f64>(64).unwrap().link;
    let tol = Tolerance64::for_link(&c);
    let apothem = (std::f64::consts::PI / 64.0).cos();
    let mut rng = sampling::rng(14);
    for _ in 0..200 {
        let (x, y) = (rng.random_range(-1.2..1.2), rng.random_range(-1.2..1.2));
        let r = f64::hypot(x, y);
        let d = hull_depth(Point64::new(x, y, 0.0), &c, &tol).unwrap();
        if r < apothem - 1e-3 {
            assert_eq!(d, 1);
        } else if r > 1.0 + 1e-3 {
            assert_eq!(d, 0);
        }
        // off the plane nothing is in the hull
        assert_eq!(hull_depth(Point64::new(x, y, 0.01), &c, &tol).unwrap(), 0);
    }
}

fn cross2(o: Point2<f64>, a: Point2<f64>, b: Point2<f64>) -> f64 {
    (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x)
}

/// Andrew's monotone chain, counterclockwise.
fn hull_2d(mut pts: Vec<Point2<f64>>) -> Vec<Point2<f64>> {
    pts.sort_by(|a, b| a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y)));
    let mut h: Vec<Point2<f64>> = Vec::new();
    for pass in 0..2 {
        let start = h.len();
        for &p in &pts {
            while h.len() >= start + 2 && cross2(h[h.len() - 2], h[h.len() - 1], p) <= 0.0 {
                h.pop();
            }
            h.push(p);
        }
        h.pop();
        if pass == 0 {
            pts.reverse();
        }
    }
    h
}

#[test]
fn planar_first_hull_of_a_projection_is_its_convex_hull() {
    let k = fixtures::trefoil::<f64>(64).unwrap().link;
    let tol = Tolerance64::for_link(&k);
    let mut rng = sampling::rng(15);
    let pr = project(&k, normal(&mut rng), &tol).unwrap();
    let h = hull_2d(pr.link.loops.iter().flatten().copied().collect());
    let margin = |p: Point2<f64>| {
        (0..h.len())
            .map(|i| {
                let (a, b) = (h[i], h[(i + 1) % h.len()]);
                cross2(a, b, p) / a.distance(b)
            })
            .fold(f64::MAX, f64::min)
    };
    let (mut inside, mut outside) = (0, 0);
    for _ in 0..300 {
        let p = Point2::new(rng.random_range(-4.0..4.0), rng.random_range(-4.0..4.0));
        let m = margin(p);
        let Ok(q) = min_cut_2d(p, &pr.link, &tol) else { continue };
        if m > 1e-6 {
            assert!(q.depth() >= 1);
            inside += 1;
        } else if m < -1e-6 {
            assert_eq!(q.depth(), 0);
            outside += 1;
        }
    }
    assert!(inside > 20 && outside > 20);
}

#[test]
fn trefoil_projection_along_z() {
    let k = fixtures::trefoil::<f64>(64).unwrap().link;
    let tol = Tolerance64::for_link(&k);
    let z = Point64::new(0.0, 0.0, 1.0);
    let pr = project(&k, z, &tol).unwrap();
    let xs: Vec<f64> = pr.link.loops[0].iter().map(|p| p.x).collect();
    let ys: Vec<f64> = pr.link.loops[0].iter().map(|p| p.y).collect();
    let span = |v: &[f64]| v.iter().cloned().fold(f64::MIN, f64::max) - v.iter().cloned().fold(f64::MAX, f64::min);
    assert!(span(&xs) * span(&ys) > 1.0);
    let src = SampleSource { grid_resolution: 16, seed: 5 };
    let c = projection_lemma_check(&k, z, 2, 50, src, &tol).unwrap();
    assert_eq!(c.outcome, LemmaOutcome::Pass);
    assert_eq!(c.checked, 50);
    let h = fixtures::hopf::<f64>(32).unwrap().link;
    let c1 = projection_lemma_check(&h, z, 1, 30, src, &Tolerance64::for_link(&h)).unwrap();
    assert_eq!(c1.outcome, LemmaOutcome::Pass);
}

#[test]
fn unlink_first_hull_reaches_into_the_bitangent_triangles() {
    let l = fixtures::two_circle_unlink::<f64>(64).unwrap().link;
    let tol = Tolerance64::for_link(&l);
    let p = Point64::new(1.1, 0.97, 0.0);
    // outside both disks
    assert!(f64::hypot(p.x - 1.5, p.y) > 1.0 && f64::hypot(p.x + 1.5, p.y) > 1.0);
    assert_eq!(hull_depth(p, &l, &tol).unwrap(), 1);
    // on the symmetry axis a vertical line misses both circles
    assert_eq!(hull_depth(Point64::new(0.0, 0.5, 0.0), &l, &tol).unwrap(), 0);
}

#[test]
fn union_lemma_examples() {
    let h = fixtures::hopf::<f64>(64).unwrap().link;
    let tol = Tolerance64::for_link(&h);
    let a = Link64::single(h.loops()[0].clone());
    let b = Link64::single(h.loops()[1].clone());
    let probe = union_lemma_probe(
        &a,
        &b,
        1,
        1,
        Point64::new(0.0, 0.0, 0.0),
        Point64::new(1.0, 0.0, 0.0),
        15,
        &tol,
    )
    .unwrap();
    assert_eq!(probe.outcome, LemmaOutcome::Pass);
    assert_eq!(probe.checked, 15);

    let c = fixtures::circle::<f64>(32).unwrap().link;
    let far = c.map_vertices(|p| p + Point64::new(10.0, 0.0, 0.0));
    let t2 = Tolerance64::for_link(&c.union(&far));
    let r = union_lemma_check(&c, &far, 1, 1, 20, SampleSource::default(), &t2).unwrap();
    assert_eq!(r.outcome, LemmaOutcome::VacuousPass);
}

/// Local maxima of the height along each loop, for heights without ties.
fn naive_maxima(l: &Link64, u: Point64) -> usize {
    l.loops()
        .iter()
        .map(|lp| {
            let h: Vec<f64> = lp.vertices().iter().map(|&v| u.dot(v)).collect();
            let n = h.len();
            (0..n).filter(|&i| h[i] > h[(i + n - 1) % n] && h[i] > h[(i + 1) % n]).count()
        })
        .sum()
}

#[test]
fn bridge_number_against_a_direction_scan() {
    let k = fixtures::trefoil::<f64>(64).unwrap().link;
    let tol = Tolerance64::for_link(&k);
    let b = bridge_superbridge(&k, &tol).unwrap();
    let mut rng = sampling::rng(16);
    let (mut lo, mut hi) = (usize::MAX, 0);
    for _ in 0..20_000 {
        let u = normal(&mut rng);
        let m = naive_maxima(&k, u);
        lo = lo.min(m);
        hi = hi.max(m);
    }
    assert_eq!(lo, 2);
    assert_eq!(b.bridge, lo);
    assert!(hi <= b.superbridge);
    assert_eq!(count_maxima(&k, b.witness_max, &tol), b.superbridge);
}

#[test]
fn crofton_matches_cone_angle_at_trefoil_center() {
    let k = fixtures::trefoil::<f64>(64).unwrap().link;
    let tol = Tolerance64::for_link(&k);
    let o = Point64::zero();
    let exact = cone_angle(o, &k, &tol).unwrap().angle;
    let est = crofton_estimate(o, &k, 100_000, 3, &tol).unwrap().estimate;
    assert!((est - exact).abs() / exact < 0.02, "{est} vs {exact}");
    assert!(crofton_estimate(o, &k, 0, 3, &tol).is_err());
    let far = Point64::new(1e4 * tol.diameter(), 0.0, 0.0);
    assert!(cone_angle(far, &k, &tol).unwrap().angle <= 0.01);
}

#[test]
fn composite_has_a_non_alternating_quadrisecant_outside_the_second_hull() {
    let l = fixtures::composite_trefoils::<f64>(64, 3.0).unwrap().link;
    let tol = Tolerance64::for_link(&l);
    let r = quadrisecants(&l, &tol);
    let witness = r
        .quadrisecants
        .iter()
        .filter(|q| !q.alternating() && q.pattern.order == [1, 2, 3, 4])
        .find(|q| !midsegment_depth_check(q, &l, 9, &tol).unwrap().passed);
    let q = witness.expect("a non-alternating quadrisecant with an exterior mid-segment");
    // the mid-segment crosses the gap between the summands
    let (a, b) = q.midsegment();
    assert!(a.x < 3.0 && b.x > 5.0, "{a:?} {b:?}");
    for q in r.quadrisecants.iter().filter(|q| q.alternating()) {
        assert!(midsegment_depth_check(q, &l, 9, &tol).unwrap().passed);
    }
}

#[test]
fn trefoil_second_hull_mesh_exports() {
    let k = fixtures::trefoil::<f64>(64).unwrap().link;
    let tol = Tolerance64::for_link(&k);
    let h = extract_hull(&k, 2, GridSpec::covering(&k, 16).unwrap(), ExtractOptions::default(), &tol).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("h2.obj");
    let stats = io::export_mesh(&h.mesh, &path).unwrap();
    assert!(stats.faces > 0);
    let text = std::fs::read_to_string(&path).unwrap();
    let nv = text.lines().filter(|l| l.starts_with("v ")).count();
    assert_eq!(nv, stats.vertices);
    let mut nf = 0;
    for l in text.lines().filter(|l| l.starts_with("f ")) {
        nf += 1;
        for idx in l.split_whitespace().skip(1) {
            let i: usize = idx.parse().unwrap();
            assert!((1..=nv).contains(&i));
        }
    }
    assert_eq!(nf, stats.faces);
}

#[test]
fn knot_files_round_trip_through_disk() {
    let f = fixtures::trefoil::<f64>(64).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("trefoil.json");
    io::save_link(&f.link, Some(io::KnotMeta::from(&f.meta)), &path).unwrap();
    let (back, meta) = io::load_link(&path).unwrap();
    for (p, q) in back.vertices().zip(f.link.vertices()) {
        assert_eq!(p.to_array().map(f64::to_bits), q.to_array().map(f64::to_bits));
    }
    assert_eq!(meta.unwrap().name.as_deref(), Some("trefoil"));

    let flat = dir.path().join("square.txt");
    std::fs::write(&flat, "0 0 0\n1 0 0\n1 1 0\n0 1 0\n").unwrap();
    let (sq, _) = io::load_link(&flat).unwrap();
    assert_eq!(sq, Link64::single(PolyLoop::new(vec![
        Point64::new(0.0, 0.0, 0.0),
        Point64::new(1.0, 0.0, 0.0),
        Point64::new(1.0, 1.0, 0.0),
        Point64::new(0.0, 1.0, 0.0),
    ])));
}
