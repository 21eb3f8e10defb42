//! Membership in the n-th hull.
//!
//! A point `p` lies in `h_n(K)` when every plane through `p` cuts `K` at
//! least `2n` times. [`min_cut_exact`] computes the minimum over all planes
//! through `p` by enumerating the faces of the great-circle arrangement of
//! the vertex directions; [`min_cut_candidates`] reaches the same faces from
//! their vertices and serves as an independent cross-check;
//! [`min_cut_sampled`] is a one-sided Monte Carlo filter.

mod extract;
pub(crate) mod sweep;

pub use extract::{
    extract_hull, hull_number, CellStatus, ExtractError, ExtractOptions, GridError, GridSpec,
    HullExtraction, HullMesh, HullNumber, Quad, RefinedCell, VoxelGrid,
};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cut::cut_total_with;
use crate::geometry::{Plane, Point3, PolyLink, Tolerance};
use crate::sampling;
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum HullError {
    #[error("query point lies on the link (distance {distance:e}); perturb it off the curve")]
    DegenerateQuery { distance: f64 },
    #[error("query point is not finite")]
    NonFinite,
    #[error("sample count must be at least 1")]
    NoSamples,
    #[error("link has no vertices")]
    EmptyLink,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Method {
    Exact,
    Sampled { n_samples: usize, seed: u64 },
}

/// Minimal cut count over planes through `point`, with a plane attaining it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HullQuery<T> {
    pub point: Point3<T>,
    pub min_count: usize,
    pub witness: Plane<T>,
    pub method: Method,
}

impl<T> HullQuery<T> {
    /// Largest `n` with the point in `h_n`.
    pub fn depth(&self) -> usize {
        self.min_count / 2
    }
}

fn check_query<T: Scalar>(p: Point3<T>, link: &PolyLink<T>, tol: &Tolerance<T>) -> Result<(), HullError> {
    if !p.is_finite() {
        return Err(HullError::NonFinite);
    }
    if link.vertex_count() == 0 {
        return Err(HullError::EmptyLink);
    }
    let distance = link.distance_to(p);
    if distance <= tol.eps_abs() {
        return Err(HullError::DegenerateQuery {
            distance: distance.as_f64(),
        });
    }
    Ok(())
}

/// Exact minimum over all planes through `p`.
pub fn min_cut_exact<T: Scalar>(
    p: Point3<T>,
    link: &PolyLink<T>,
    tol: &Tolerance<T>,
) -> Result<HullQuery<T>, HullError> {
    min_cut_exact_below(p, link, 0, tol)
}

/// Like [`min_cut_exact`] but may stop as soon as a plane with fewer than
/// `stop_below` intersections is found; the result is exact whenever it
/// reports `min_count >= stop_below`.
pub fn min_cut_exact_below<T: Scalar>(
    p: Point3<T>,
    link: &PolyLink<T>,
    stop_below: usize,
    tol: &Tolerance<T>,
) -> Result<HullQuery<T>, HullError> {
    check_query(p, link, tol)?;
    let found = sweep::sweep_min(&sweep::Frame::new(p, link), stop_below);
    Ok(HullQuery {
        point: p,
        min_count: found.count,
        witness: Plane::from_unit(found.normal, found.normal.dot(p)),
        method: Method::Exact,
    })
}

pub fn in_hull<T: Scalar>(p: Point3<T>, link: &PolyLink<T>, n: usize, tol: &Tolerance<T>) -> Result<bool, HullError> {
    Ok(min_cut_exact_below(p, link, 2 * n, tol)?.min_count >= 2 * n)
}

pub fn hull_depth<T: Scalar>(p: Point3<T>, link: &PolyLink<T>, tol: &Tolerance<T>) -> Result<usize, HullError> {
    Ok(min_cut_exact(p, link, tol)?.depth())
}

/// Exact minimal count at `p`, nudging `p` by a few `eps_abs` along a fixed
/// generic direction if it lies on the link. Only exact when at least
/// `stop_below`.
pub(crate) fn min_count_nudged<T: Scalar>(
    p: Point3<T>,
    link: &PolyLink<T>,
    stop_below: usize,
    tol: &Tolerance<T>,
) -> Result<usize, HullError> {
    let nudge = Point3::from_f64(0.5377, 0.3214, 0.7794);
    let nudge = nudge / nudge.norm();
    let mut q = p;
    for k in 1..=4 {
        match min_cut_exact_below(q, link, stop_below, tol) {
            Ok(r) => return Ok(r.min_count),
            Err(HullError::DegenerateQuery { .. }) if k < 4 => {
                q = p + nudge * (tol.eps_abs() * T::lit(4.0 * k as f64));
            }
            Err(e) => return Err(e),
        }
    }
    unreachable!("loop returns on its last iteration")
}

/// [`hull_depth`] for points that may land on the link, such as samples
/// along a secant: they are nudged off it first.
pub fn hull_depth_nudged<T: Scalar>(p: Point3<T>, link: &PolyLink<T>, tol: &Tolerance<T>) -> Result<usize, HullError> {
    Ok(min_count_nudged(p, link, 0, tol)? / 2)
}

/// Plane normals that land in every face of the vertex-direction arrangement
/// around `p`: for each non-parallel vertex pair, the arrangement vertex
/// `(v_i - p) x (v_j - p)` pushed into its four incident faces, plus the 26
/// lattice directions.
pub fn candidate_directions<T: Scalar>(
    p: Point3<T>,
    link: &PolyLink<T>,
    tol: &Tolerance<T>,
) -> Result<Vec<Point3<T>>, HullError> {
    check_query(p, link, tol)?;
    let w: Vec<Point3<T>> = link.vertices().map(|v| v - p).collect();
    let eps = T::lit(T::EPS_DIR);
    let par = T::lit(T::NORMAL_EPS);
    let mut out = Vec::with_capacity(2 * w.len() * w.len() + 26);
    for i in 0..w.len() {
        for j in (i + 1)..w.len() {
            let (wi, wj) = (w[i], w[j]);
            let c = wi.cross(wj);
            let scale = wi.norm() * wj.norm();
            if c.norm() <= par * scale {
                continue;
            }
            let u0 = c / c.norm();
            let (hi, hj) = (wi / wi.norm(), wj / wj.norm());
            // ti moves off C_i while staying on C_j, and vice versa
            let ti = (hi - hj * hi.dot(hj)).normalized();
            let tj = (hj - hi * hi.dot(hj)).normalized();
            let (Some(ti), Some(tj)) = (ti, tj) else {
                continue;
            };
            for (a, b) in [(1.0, 1.0), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0)] {
                let v = u0 + (ti * T::lit(a) + tj * T::lit(b)) * eps;
                out.push(v / v.norm());
            }
        }
    }
    out.extend(sampling::lattice_directions::<T>());
    Ok(out)
}

/// Minimum of the snapped cut count over [`candidate_directions`].
pub fn min_cut_candidates<T: Scalar>(
    p: Point3<T>,
    link: &PolyLink<T>,
    tol: &Tolerance<T>,
) -> Result<HullQuery<T>, HullError> {
    let dirs = candidate_directions(p, link, tol)?;
    Ok(min_over_normals(p, link, dirs.into_iter(), Method::Exact, tol))
}

fn min_over_normals<T: Scalar>(
    p: Point3<T>,
    link: &PolyLink<T>,
    normals: impl Iterator<Item = Point3<T>>,
    method: Method,
    tol: &Tolerance<T>,
) -> HullQuery<T> {
    let mut scratch = Vec::new();
    let mut best: Option<(usize, Point3<T>)> = None;
    for u in normals {
        let count = cut_total_with(link, u, u.dot(p), tol.eps_abs(), &mut scratch);
        if best.is_none_or(|(c, _)| count < c) {
            best = Some((count, u));
            if count == 0 {
                break;
            }
        }
    }
    let (min_count, u) = best.expect("at least one direction");
    HullQuery {
        point: p,
        min_count,
        witness: Plane::from_unit(u, u.dot(p)),
        method,
    }
}

/// Minimum over `n_samples` seeded uniform plane normals. Never below the
/// exact value.
pub fn min_cut_sampled<T: Scalar>(
    p: Point3<T>,
    link: &PolyLink<T>,
    n_samples: usize,
    seed: u64,
    tol: &Tolerance<T>,
) -> Result<HullQuery<T>, HullError> {
    if n_samples == 0 {
        return Err(HullError::NoSamples);
    }
    if !p.is_finite() {
        return Err(HullError::NonFinite);
    }
    if link.vertex_count() == 0 {
        return Err(HullError::EmptyLink);
    }
    let mut rng = sampling::rng(seed);
    let normals = (0..n_samples).map(move |_| sampling::unit_vector::<T, _>(&mut rng));
    Ok(min_over_normals(
        p,
        link,
        normals,
        Method::Sampled { n_samples, seed },
        tol,
    ))
}
