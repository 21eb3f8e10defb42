//! Total curvature, cone angles, and bridge/superbridge indices.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cut::{cut_total_with, profile_unit};
use crate::geometry::{Point3, PolyLink, PolyLoop, Tolerance};
use crate::hull::sweep::{for_each_face, witness_normal, Face, Frame, Score};
use crate::sampling;
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CurvatureError {
    #[error("apex lies on the link (distance {distance:e})")]
    DegenerateQuery { distance: f64 },
    #[error("apex is not finite")]
    NonFinite,
    #[error("sample count must be at least 1")]
    NoSamples,
    #[error("link has no vertices")]
    EmptyLink,
}

/// Sum of exterior angles, each in `[0, π]`.
pub fn total_curvature<T: Scalar>(lp: &PolyLoop<T>) -> T {
    let n = lp.len();
    (0..n)
        .map(|k| {
            let a = lp.vertex(k) - lp.vertex(k + n - 1);
            let b = lp.vertex(k + 1) - lp.vertex(k);
            a.angle_to(b)
        })
        .sum()
}

pub fn link_total_curvature<T: Scalar>(link: &PolyLink<T>) -> T {
    link.loops().iter().map(total_curvature).sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConeAngle<T> {
    pub apex: Point3<T>,
    pub angle: T,
}

fn check_apex<T: Scalar>(p: Point3<T>, link: &PolyLink<T>, tol: &Tolerance<T>) -> Result<(), CurvatureError> {
    if !p.is_finite() {
        return Err(CurvatureError::NonFinite);
    }
    if link.vertex_count() == 0 {
        return Err(CurvatureError::EmptyLink);
    }
    let distance = link.distance_to(p);
    if distance <= tol.eps_abs() {
        return Err(CurvatureError::DegenerateQuery {
            distance: distance.as_f64(),
        });
    }
    Ok(())
}

/// Length of the radial projection of the link onto the unit sphere at `p`.
pub fn cone_angle<T: Scalar>(p: Point3<T>, link: &PolyLink<T>, tol: &Tolerance<T>) -> Result<ConeAngle<T>, CurvatureError> {
    check_apex(p, link, tol)?;
    let angle = link.edges().map(|(a, b)| (a - p).angle_to(b - p)).sum();
    Ok(ConeAngle { apex: p, angle })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CroftonEstimate<T> {
    pub apex: Point3<T>,
    /// `π` times the mean cut count.
    pub estimate: T,
    pub mean_count: f64,
    /// Standard error of `estimate`.
    pub std_error: f64,
    pub n_samples: usize,
    pub seed: u64,
}

const BATCH: usize = 4096;

/// Monte Carlo cone angle: `π` times the mean cut count of uniformly random
/// planes through `p`. Batches use derived seeds, so the value does not
/// depend on the number of worker threads.
pub fn crofton_estimate<T: Scalar>(
    p: Point3<T>,
    link: &PolyLink<T>,
    n_samples: usize,
    seed: u64,
    tol: &Tolerance<T>,
) -> Result<CroftonEstimate<T>, CurvatureError> {
    if n_samples == 0 {
        return Err(CurvatureError::NoSamples);
    }
    check_apex(p, link, tol)?;
    let batches = n_samples.div_ceil(BATCH);
    let (sum, sum_sq) = (0..batches)
        .into_par_iter()
        .map(|b| {
            let mut rng = sampling::rng(sampling::derive_seed(seed, b as u64));
            let len = BATCH.min(n_samples - b * BATCH);
            let mut scratch = Vec::new();
            let (mut s, mut s2) = (0u64, 0u64);
            for _ in 0..len {
                let u: Point3<T> = sampling::unit_vector(&mut rng);
                let c = cut_total_with(link, u, u.dot(p), tol.eps_abs(), &mut scratch) as u64;
                s += c;
                s2 += c * c;
            }
            (s, s2)
        })
        .reduce(|| (0, 0), |a, b| (a.0 + b.0, a.1 + b.1));
    let n = n_samples as f64;
    let mean = sum as f64 / n;
    let var = (sum_sq as f64 / n - mean * mean).max(0.0);
    Ok(CroftonEstimate {
        apex: p,
        estimate: T::lit(std::f64::consts::PI * mean),
        mean_count: mean,
        std_error: std::f64::consts::PI * (var / n).sqrt(),
        n_samples,
        seed,
    })
}

/// Local maxima of the height `direction . x`, summed over loops. Heights
/// within `eps_abs` of their predecessor are merged into one plateau; a loop
/// that is a single plateau has none.
pub fn count_maxima<T: Scalar>(link: &PolyLink<T>, direction: Point3<T>, tol: &Tolerance<T>) -> usize {
    let eps = tol.eps_abs();
    link.loops()
        .iter()
        .map(|lp| {
            let h: Vec<T> = lp.vertices().iter().map(|&v| direction.dot(v)).collect();
            // start right after a strict change so plateaus never wrap
            let n = h.len();
            let Some(start) = (0..n).find(|&k| (h[(k + 1) % n] - h[k]).abs() > eps) else {
                return 0;
            };
            let mut level = h[(start + 1) % n];
            let mut prev_up = h[(start + 1) % n] > h[start];
            let mut maxima = 0;
            for k in 1..=n {
                let next = h[(start + 1 + k) % n];
                if (next - level).abs() <= eps {
                    continue;
                }
                let up = next > level;
                if prev_up && !up {
                    maxima += 1;
                }
                prev_up = up;
                level = next;
            }
            maxima
        })
        .sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BridgeResult<T> {
    /// Fewest local maxima of any generic height function.
    pub bridge: usize,
    /// Most local maxima of any generic height function.
    pub superbridge: usize,
    pub witness_min: Point3<T>,
    pub witness_max: Point3<T>,
    /// Largest plane cut count along `witness_max`.
    pub max_cut: usize,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BridgeError {
    #[error("link has no edges")]
    EmptyLink,
}

/// Exact bridge and superbridge indices of the embedding.
///
/// The sign pattern of the edge vectors against a direction `u` is constant
/// on the faces of the arrangement of circles `{u : (v_{k+1} - v_k) . u = 0}`,
/// and it determines the maxima. Of the faces with the most maxima, the one
/// whose sweep profile reaches the largest cut count is reported.
pub fn bridge_superbridge<T: Scalar>(link: &PolyLink<T>, tol: &Tolerance<T>) -> Result<BridgeResult<T>, BridgeError> {
    if link.vertex_count() < 2 {
        return Err(BridgeError::EmptyLink);
    }
    let frame = Frame::edges(link);
    let mut min: Option<Face<T>> = None;
    let mut top: Vec<Face<T>> = Vec::new();
    for_each_face(&frame, Score::Peaks, |f| {
        if min.is_none_or(|m| f.count < m.count) {
            min = Some(*f);
        }
        match top.first() {
            Some(t) if f.count < t.count => {}
            Some(t) if f.count == t.count => top.push(*f),
            _ => {
                top.clear();
                top.push(*f);
            }
        }
        false
    });
    let min = min.expect("nonempty arrangement");
    let (max_cut, witness_max) = top
        .par_iter()
        .map(|f| {
            let u = witness_normal(&frame, f);
            (profile_unit(link, u, tol.eps_abs()).max_count(), u)
        })
        .reduce_with(|a, b| if b.0 > a.0 { b } else { a })
        .expect("nonempty arrangement");
    Ok(BridgeResult {
        bridge: min.count,
        superbridge: top[0].count,
        witness_min: witness_normal(&frame, &min),
        witness_max,
        max_cut,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use std::f64::consts::PI;

    fn polygon(n: usize) -> PolyLink<f64> {
        PolyLink::single(PolyLoop::new(
            (0..n)
                .map(|k| {
                    let t = 2.0 * PI * k as f64 / n as f64;
                    Point3::new(t.cos(), t.sin(), 0.0)
                })
                .collect(),
        ))
    }

    #[test]
    fn regular_polygon_turns_once() {
        for n in [3, 5, 16, 64] {
            let l = polygon(n);
            assert!((link_total_curvature(&l) - 2.0 * PI).abs() < 1e-9);
        }
        let c = fixtures::circle::<f64>(64).unwrap().link;
        assert!((link_total_curvature(&c) - 2.0 * PI).abs() < 1e-9);
    }

    #[test]
    fn trefoil_curvature_exceeds_four_pi() {
        let t = fixtures::trefoil::<f64>(64).unwrap().link;
        let k = link_total_curvature(&t);
        assert!(k >= 4.0 * PI);
        // independent acos summation
        let v = t.loops()[0].vertices();
        let n = v.len();
        let direct: f64 = (0..n)
            .map(|i| {
                let a = v[i] - v[(i + n - 1) % n];
                let b = v[(i + 1) % n] - v[i];
                (a.dot(b) / (a.norm() * b.norm())).clamp(-1.0, 1.0).acos()
            })
            .sum();
        assert!((k - direct).abs() < 1e-9);
    }

    #[test]
    fn cone_angle_basics() {
        let l = polygon(32);
        let tol = Tolerance::for_link(&l);
        let c = cone_angle(Point3::zero(), &l, &tol).unwrap();
        assert!((c.angle - 2.0 * PI).abs() < 1e-9);
        let far = cone_angle(Point3::new(2e4, 0.0, 0.0), &l, &tol).unwrap();
        assert!(far.angle <= 0.01);
        assert!(matches!(
            cone_angle(Point3::new(1.0, 0.0, 0.0), &l, &tol),
            Err(CurvatureError::DegenerateQuery { .. })
        ));
    }

    #[test]
    fn crofton_matches_circle() {
        let l = fixtures::circle::<f64>(64).unwrap().link;
        let tol = Tolerance::for_link(&l);
        let e = crofton_estimate(Point3::new(0.0, 0.0, 1e-3), &l, 100_000, 5, &tol).unwrap();
        let exact = cone_angle(Point3::new(0.0, 0.0, 1e-3), &l, &tol).unwrap().angle;
        assert!((e.estimate - exact).abs() / exact < 0.02);
        assert_eq!(e, crofton_estimate(Point3::new(0.0, 0.0, 1e-3), &l, 100_000, 5, &tol).unwrap());
        assert!(matches!(
            crofton_estimate(Point3::zero(), &l, 0, 5, &tol),
            Err(CurvatureError::NoSamples)
        ));
    }

    #[test]
    fn convex_polygon_is_one_bridge() {
        let l = polygon(12);
        let tol = Tolerance::for_link(&l);
        let b = bridge_superbridge(&l, &tol).unwrap();
        assert_eq!((b.bridge, b.superbridge), (1, 1));
        assert_eq!(b.max_cut, 2);
    }

    #[test]
    fn trefoil_bridge_two() {
        let t = fixtures::trefoil::<f64>(64).unwrap().link;
        let tol = Tolerance::for_link(&t);
        let b = bridge_superbridge(&t, &tol).unwrap();
        assert_eq!(b.bridge, 2);
        assert_eq!(count_maxima(&t, b.witness_min, &tol), 2);
        assert_eq!(count_maxima(&t, b.witness_max, &tol), b.superbridge);
        assert_eq!(2 * b.superbridge, b.max_cut);
        let d = fixtures::trefoil_two_bridge_direction();
        assert_eq!(count_maxima(&t, Point3::from_array(d), &tol), 2);
        assert_eq!(count_maxima(&t, Point3::new(0.0, 0.0, 1.0), &tol), 3);
    }

    #[test]
    fn plateaus_merge() {
        let sq = PolyLink::single(PolyLoop::new(vec![
            Point3::new(0.0, 0.0, 0.0),
            Point3::new(1.0, 0.0, 0.0),
            Point3::new(1.0, 1.0, 0.0),
            Point3::new(0.0, 1.0, 0.0),
        ]));
        let tol = Tolerance::for_link(&sq);
        assert_eq!(count_maxima(&sq, Point3::new(0.0, 1.0, 0.0), &tol), 1);
        assert_eq!(count_maxima(&sq, Point3::new(0.0, 0.0, 1.0), &tol), 0);
    }
}
