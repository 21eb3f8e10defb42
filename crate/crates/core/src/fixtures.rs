//! Generators for the standard test links.
//!
//! Every generator jitters its vertices by a seeded random offset of size
//! `1e-7 * diameter` so that symmetric configurations do not produce exact
//! ties in the plane arrangements. Plane curves are jittered inside their own
//! plane so they stay planar.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use rand_distr::{Distribution, UnitDisc};

use crate::geometry::{Point3, PolyLink, PolyLoop};
use crate::sampling;
use crate::scalar::Scalar;

pub const DEFAULT_SEED: u64 = 2003;
pub const PERTURBATION_REL: f64 = 1e-7;
/// Gap between the two summands of [`composite_trefoils`] by default.
pub const DEFAULT_SEPARATION: f64 = 2.0;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FixtureError {
    #[error("fixture needs at least 8 vertices per component, got {0}")]
    TooFewVertices(usize),
    #[error("separation must be positive and finite")]
    BadSeparation,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FixtureMeta {
    pub name: String,
    pub generator: String,
    pub seed: u64,
    pub vertices_per_component: usize,
    pub perturbation_rel: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Fixture<T> {
    pub link: PolyLink<T>,
    pub meta: FixtureMeta,
}

fn check(n: usize) -> Result<(), FixtureError> {
    if n < 8 {
        Err(FixtureError::TooFewVertices(n))
    } else {
        Ok(())
    }
}

fn finish<T: Scalar>(
    loops: Vec<(Vec<[f64; 3]>, Option<[[f64; 3]; 2]>)>,
    labels: Option<Vec<&str>>,
    name: &str,
    generator: String,
    n: usize,
    seed: u64,
) -> Fixture<T> {
    let raw = PolyLink::new(
        loops
            .iter()
            .map(|(l, _)| PolyLoop::new(l.iter().map(|&[x, y, z]| Point3::<f64>::new(x, y, z)).collect()))
            .collect(),
    );
    let radius = PERTURBATION_REL * raw.diameter();
    let mut rng = sampling::rng(seed);
    let jittered = PolyLink::new(
        raw.loops()
            .iter()
            .zip(&loops)
            .map(|(lp, (_, plane))| {
                PolyLoop::new(
                    lp.vertices()
                        .iter()
                        .map(|&p| match plane {
                            None => p + sampling::ball_point(&mut rng, radius),
                            Some([e1, e2]) => {
                                let [a, b]: [f64; 2] = UnitDisc.sample(&mut rng);
                                let (a, b) = (a * radius, b * radius);
                                p + Point3::new(
                                    a * e1[0] + b * e2[0],
                                    a * e1[1] + b * e2[1],
                                    a * e1[2] + b * e2[2],
                                )
                            }
                        })
                        .collect(),
                )
            })
            .collect(),
    );
    let mut link = jittered.cast::<T>();
    if let Some(l) = labels {
        link = link.with_labels(l.into_iter().map(String::from).collect());
    }
    Fixture {
        link,
        meta: FixtureMeta {
            name: name.to_string(),
            generator,
            seed,
            vertices_per_component: n,
            perturbation_rel: PERTURBATION_REL,
        },
    }
}

fn circle_points(n: usize, center: [f64; 3], radius: f64, plane: [[f64; 3]; 2]) -> Vec<[f64; 3]> {
    (0..n)
        .map(|k| {
            let t = std::f64::consts::TAU * k as f64 / n as f64;
            let (c, s) = (t.cos() * radius, t.sin() * radius);
            [
                center[0] + c * plane[0][0] + s * plane[1][0],
                center[1] + c * plane[0][1] + s * plane[1][1],
                center[2] + c * plane[0][2] + s * plane[1][2],
            ]
        })
        .collect()
}

const XY: [[f64; 3]; 2] = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0]];
const XZ: [[f64; 3]; 2] = [[1.0, 0.0, 0.0], [0.0, 0.0, 1.0]];

/// `((2 + cos 3t) cos 2t, (2 + cos 3t) sin 2t, sin 3t)` at `t = 2πk/n`.
fn trefoil_points(n: usize) -> Vec<[f64; 3]> {
    (0..n)
        .map(|k| {
            let t = std::f64::consts::TAU * k as f64 / n as f64;
            let r = 2.0 + (3.0 * t).cos();
            [r * (2.0 * t).cos(), r * (2.0 * t).sin(), (3.0 * t).sin()]
        })
        .collect()
}

/// Planar regular `n`-gon of radius 1 about the origin in the `xy`-plane.
pub fn circle<T: Scalar>(n: usize) -> Result<Fixture<T>, FixtureError> {
    circle_seeded(n, DEFAULT_SEED)
}

pub fn circle_seeded<T: Scalar>(n: usize, seed: u64) -> Result<Fixture<T>, FixtureError> {
    check(n)?;
    let pts = circle_points(n, [0.0; 3], 1.0, XY);
    Ok(finish(vec![(pts, Some(XY))], None, "circle", format!("circle(n={n})"), n, seed))
}

/// The (2,3) torus-knot trefoil sampled at `n` points.
pub fn trefoil<T: Scalar>(n: usize) -> Result<Fixture<T>, FixtureError> {
    trefoil_seeded(n, DEFAULT_SEED)
}

pub fn trefoil_seeded<T: Scalar>(n: usize, seed: u64) -> Result<Fixture<T>, FixtureError> {
    check(n)?;
    Ok(finish(
        vec![(trefoil_points(n), None)],
        None,
        "trefoil",
        format!("trefoil(n={n})"),
        n,
        seed,
    ))
}

/// Two round unit circles: `A` in the `xy`-plane about the origin, `B` in
/// the `xz`-plane about `(1, 0, 0)`. Their disks meet along `x ∈ [0, 1]`
/// on the `x`-axis.
pub fn hopf<T: Scalar>(n: usize) -> Result<Fixture<T>, FixtureError> {
    hopf_seeded(n, DEFAULT_SEED)
}

pub fn hopf_seeded<T: Scalar>(n: usize, seed: u64) -> Result<Fixture<T>, FixtureError> {
    check(n)?;
    let a = circle_points(n, [0.0; 3], 1.0, XY);
    let b = circle_points(n, [1.0, 0.0, 0.0], 1.0, XZ);
    Ok(finish(
        vec![(a, Some(XY)), (b, Some(XZ))],
        Some(vec!["A", "B"]),
        "hopf",
        format!("hopf(n={n})"),
        n,
        seed,
    ))
}

/// Centers of the two circles of [`two_circle_unlink`].
pub const UNLINK_CENTER_X: f64 = 1.5;

/// Two coplanar unit circles in the `xy`-plane centered at `(±1.5, 0, 0)`.
pub fn two_circle_unlink<T: Scalar>(n: usize) -> Result<Fixture<T>, FixtureError> {
    two_circle_unlink_seeded(n, DEFAULT_SEED)
}

pub fn two_circle_unlink_seeded<T: Scalar>(n: usize, seed: u64) -> Result<Fixture<T>, FixtureError> {
    check(n)?;
    let a = circle_points(n, [-UNLINK_CENTER_X, 0.0, 0.0], 1.0, XY);
    let b = circle_points(n, [UNLINK_CENTER_X, 0.0, 0.0], 1.0, XY);
    Ok(finish(
        vec![(a, Some(XY)), (b, Some(XY))],
        Some(vec!["A", "B"]),
        "two_circle_unlink",
        format!("two_circle_unlink(n={n})"),
        n,
        seed,
    ))
}

/// Height direction along which the trefoil of [`trefoil`] has exactly two
/// local maxima (a 2-bridge presentation).
pub fn trefoil_two_bridge_direction() -> [f64; 3] {
    let th: f64 = 1.3;
    [0.0, th.sin(), th.cos()]
}

/// Rotation taking the unit vector `u` to `+x`, as rows.
fn rotation_to_x(u: [f64; 3]) -> [[f64; 3]; 3] {
    let ux = Point3::<f64>::from_array(u);
    let e1 = ux / ux.norm();
    let e2 = e1.any_orthogonal();
    let e3 = e1.cross(e2);
    [e1.to_array(), e2.to_array(), e3.to_array()]
}

fn apply_rows(m: &[[f64; 3]; 3], p: [f64; 3]) -> [f64; 3] {
    let d = |r: &[f64; 3]| r[0] * p[0] + r[1] * p[1] + r[2] * p[2];
    [d(&m[0]), d(&m[1]), d(&m[2])]
}

/// Connected sum of a trefoil and its mirror image, each in a 2-bridge
/// position along `x`, placed `separation` apart along `x` and joined by two
/// straight strands parallel to `x`.
///
/// The height function `x` has three maxima; planes `x = c` through either
/// summand cut the curve at most four times.
pub fn composite_trefoils<T: Scalar>(n: usize, separation: f64) -> Result<Fixture<T>, FixtureError> {
    composite_trefoils_seeded(n, separation, DEFAULT_SEED)
}

pub fn composite_trefoils_seeded<T: Scalar>(
    n: usize,
    separation: f64,
    seed: u64,
) -> Result<Fixture<T>, FixtureError> {
    check(n)?;
    if !(separation.is_finite() && separation > 0.0) {
        return Err(FixtureError::BadSeparation);
    }
    let rot = rotation_to_x(trefoil_two_bridge_direction());
    let a: Vec<[f64; 3]> = trefoil_points(n + 1).into_iter().map(|p| apply_rows(&rot, p)).collect();
    let m = a
        .iter()
        .enumerate()
        .max_by(|x, y| x.1[0].partial_cmp(&y.1[0]).unwrap())
        .map(|(i, _)| i)
        .unwrap();
    let xmax = a[m][0];
    let shift = 2.0 * xmax + separation;
    let len = a.len();
    // open arc of A from m+1 around to m-1, dropping the cap vertex m
    let arc: Vec<[f64; 3]> = (1..len).map(|k| a[(m + k) % len]).collect();
    // B mirrors A through the plane x = shift / 2 and is walked backwards, so
    // both strands run parallel to x at the heights of the dropped cap's
    // neighbours.
    let b_arc: Vec<[f64; 3]> = arc
        .iter()
        .rev()
        .map(|&[x, y, z]| [shift - x, y, z])
        .collect();
    let mut pts = arc.clone();
    pts.extend(b_arc.iter().copied());
    Ok(finish(
        vec![(pts, None)],
        None,
        "composite_trefoils",
        format!("composite_trefoils(n={n}, separation={separation})"),
        n,
        seed,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{validate, Tolerance};

    #[test]
    fn fixtures_validate() {
        let all: Vec<Fixture<f64>> = vec![
            circle(64).unwrap(),
            trefoil(64).unwrap(),
            hopf(64).unwrap(),
            two_circle_unlink(64).unwrap(),
            composite_trefoils(64, DEFAULT_SEPARATION).unwrap(),
        ];
        for f in &all {
            let tol = Tolerance::for_link(&f.link);
            assert!(validate(&f.link, &tol).is_empty(), "{}", f.meta.name);
        }
    }

    #[test]
    fn too_small_is_rejected() {
        assert_eq!(
            trefoil::<f64>(7).unwrap_err(),
            FixtureError::TooFewVertices(7)
        );
    }

    #[test]
    fn circle_is_planar_regular_polygon() {
        let c = circle::<f64>(64).unwrap().link;
        let v = c.loops()[0].vertices();
        assert_eq!(v.len(), 64);
        for p in v {
            assert!((p.norm() - 1.0).abs() < 1e-6);
            assert_eq!(p.z, 0.0);
        }
    }

    #[test]
    fn hopf_layout() {
        let h = hopf::<f64>(64).unwrap().link;
        assert_eq!(h.labels().unwrap(), &["A".to_string(), "B".to_string()]);
        let b = &h.loops()[1];
        for p in b.vertices() {
            assert_eq!(p.y, 0.0);
            assert!(((p.x - 1.0).powi(2) + p.z * p.z).sqrt() - 1.0 < 1e-6);
        }
    }

    #[test]
    fn composite_summands_are_separated() {
        let k = composite_trefoils::<f64>(64, 2.0).unwrap().link;
        let xs: Vec<f64> = k.vertices().map(|p| p.x).collect();
        let half = xs.len() / 2;
        let a_max = xs[..half].iter().cloned().fold(f64::MIN, f64::max);
        let b_min = xs[half..].iter().cloned().fold(f64::MAX, f64::min);
        assert!(b_min - a_max > 1.9);
    }

    #[test]
    fn seeds_change_only_the_jitter() {
        let a = trefoil_seeded::<f64>(16, 1).unwrap().link;
        let b = trefoil_seeded::<f64>(16, 2).unwrap().link;
        assert_ne!(a, b);
        for (p, q) in a.vertices().zip(b.vertices()) {
            assert!(p.distance(q) < 1e-5);
        }
    }
}
