//! Orthogonal projections, the planar n-th hull, and checks relating hulls of
//! a link to hulls of its projections and components.

use rand::seq::index;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cut::count_signs;
use crate::geometry::{Point3, PolyLink, Sign, Tolerance};
use crate::hull::{extract_hull, hull_depth_nudged, ExtractError, ExtractOptions, GridSpec, HullError};
use crate::sampling;
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ProjectionError {
    #[error("projection direction is zero or not finite")]
    ZeroDirection,
    #[error("query point lies on the projected curve (distance {distance:e})")]
    DegenerateQuery { distance: f64 },
    #[error("projected link has no vertices")]
    EmptyLink,
    #[error(transparent)]
    Hull(#[from] HullError),
    #[error(transparent)]
    Extract(#[from] ExtractError),
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point2<T> {
    pub x: T,
    pub y: T,
}

impl<T: Scalar> Point2<T> {
    pub fn new(x: T, y: T) -> Self {
        Self { x, y }
    }

    fn sub(self, o: Self) -> Self {
        Self::new(self.x - o.x, self.y - o.y)
    }

    fn dot(self, o: Self) -> T {
        self.x * o.x + self.y * o.y
    }

    pub fn distance(self, o: Self) -> T {
        let d = self.sub(o);
        d.dot(d).sqrt()
    }
}

/// Closed planar polygons.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolyLink2<T> {
    pub loops: Vec<Vec<Point2<T>>>,
}

impl<T: Scalar> PolyLink2<T> {
    pub fn vertex_count(&self) -> usize {
        self.loops.iter().map(Vec::len).sum()
    }

    pub fn distance_to(&self, p: Point2<T>) -> T {
        let mut best = T::infinity();
        for lp in &self.loops {
            let n = lp.len();
            for k in 0..n {
                let (a, b) = (lp[k], lp[(k + 1) % n]);
                let e = b.sub(a);
                let len2 = e.dot(e);
                let t = if len2 > T::zero() {
                    (p.sub(a).dot(e) / len2).max(T::zero()).min(T::one())
                } else {
                    T::zero()
                };
                let q = Point2::new(a.x + e.x * t, a.y + e.y * t);
                best = best.min(q.distance(p));
            }
        }
        best
    }
}

/// Orthonormal frame `(e1, e2)` of the plane orthogonal to `direction`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Projection<T> {
    pub direction: Point3<T>,
    pub e1: Point3<T>,
    pub e2: Point3<T>,
}

impl<T: Scalar> Projection<T> {
    pub fn new(direction: Point3<T>) -> Result<Self, ProjectionError> {
        if !direction.is_finite() {
            return Err(ProjectionError::ZeroDirection);
        }
        let d = direction.normalized().ok_or(ProjectionError::ZeroDirection)?;
        let e1 = d.any_orthogonal();
        let e2 = d.cross(e1);
        Ok(Self { direction: d, e1, e2 })
    }

    pub fn map(&self, p: Point3<T>) -> Point2<T> {
        Point2::new(self.e1.dot(p), self.e2.dot(p))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Projected<T> {
    pub link: PolyLink2<T>,
    pub projection: Projection<T>,
    /// Per loop: the image is contained in a line.
    pub flat: Vec<bool>,
}

pub fn project<T: Scalar>(link: &PolyLink<T>, direction: Point3<T>, tol: &Tolerance<T>) -> Result<Projected<T>, ProjectionError> {
    let projection = Projection::new(direction)?;
    let loops: Vec<Vec<Point2<T>>> = link
        .loops()
        .iter()
        .map(|lp| lp.vertices().iter().map(|&p| projection.map(p)).collect())
        .collect();
    let flat = loops.iter().map(|lp| is_flat(lp, tol.eps_abs())).collect();
    Ok(Projected {
        link: PolyLink2 { loops },
        projection,
        flat,
    })
}

fn is_flat<T: Scalar>(pts: &[Point2<T>], eps: T) -> bool {
    let Some(&a) = pts.first() else { return true };
    let Some(&b) = pts.iter().max_by(|p, q| p.distance(a).partial_cmp(&q.distance(a)).expect("finite")) else {
        return true;
    };
    let len = a.distance(b);
    if len <= eps {
        return true;
    }
    let n = Point2::new(-(b.y - a.y) / len, (b.x - a.x) / len);
    pts.iter().all(|p| p.sub(a).dot(n).abs() <= eps)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HullQuery2<T> {
    pub point: Point2<T>,
    pub min_count: usize,
    /// Unit direction of a line through `point` attaining the minimum.
    pub witness_direction: Point2<T>,
}

impl<T> HullQuery2<T> {
    pub fn depth(&self) -> usize {
        self.min_count / 2
    }
}

/// Exact minimum over lines through `p` of the number of intersections.
///
/// The count only changes when the line passes through a vertex, so it is
/// evaluated once between each pair of consecutive vertex directions.
pub fn min_cut_2d<T: Scalar>(p: Point2<T>, link: &PolyLink2<T>, tol: &Tolerance<T>) -> Result<HullQuery2<T>, ProjectionError> {
    if link.vertex_count() == 0 {
        return Err(ProjectionError::EmptyLink);
    }
    let distance = link.distance_to(p);
    if distance <= tol.eps_abs() {
        return Err(ProjectionError::DegenerateQuery {
            distance: distance.as_f64(),
        });
    }
    let pi = T::PI();
    let mut angles: Vec<T> = link
        .loops
        .iter()
        .flatten()
        .map(|v| {
            let w = v.sub(p);
            let mut a = w.y.atan2(w.x);
            while a < T::zero() {
                a = a + pi;
            }
            while a >= pi {
                a = a - pi;
            }
            a
        })
        .collect();
    angles.sort_by(|a, b| a.partial_cmp(b).expect("finite angles"));
    let m = angles.len();
    let mut signs = Vec::new();
    let mut best: Option<(usize, Point2<T>)> = None;
    for k in 0..m {
        let (lo, hi) = if k + 1 < m {
            (angles[k], angles[k + 1])
        } else {
            (angles[k], angles[0] + pi)
        };
        if hi - lo <= T::lit(1e-15) {
            continue;
        }
        let phi = T::lit(0.5) * (lo + hi);
        let dir = Point2::new(phi.cos(), phi.sin());
        let normal = Point2::new(-dir.y, dir.x);
        let mut total = 0;
        for lp in &link.loops {
            signs.clear();
            signs.extend(
                lp.iter()
                    .map(|v| Sign::from_value(v.sub(p).dot(normal), tol.eps_abs()).as_i8()),
            );
            total += count_signs(&signs);
        }
        if best.is_none_or(|b| total < b.0) {
            best = Some((total, dir));
        }
    }
    let (min_count, witness_direction) = best.unwrap_or((2, Point2::new(T::one(), T::zero())));
    Ok(HullQuery2 {
        point: p,
        min_count,
        witness_direction,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LemmaOutcome {
    Pass,
    Fail,
    /// No sample points were available.
    VacuousPass,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LemmaCheck<T> {
    pub outcome: LemmaOutcome,
    pub checked: usize,
    pub failures: Vec<Point3<T>>,
}

impl<T> LemmaCheck<T> {
    /// Pass or vacuous pass.
    pub fn holds(&self) -> bool {
        self.outcome != LemmaOutcome::Fail
    }

    fn from_results(results: Vec<(Point3<T>, bool)>) -> Self {
        let checked = results.len();
        let failures: Vec<Point3<T>> = results.into_iter().filter(|r| !r.1).map(|r| r.0).collect();
        let outcome = if checked == 0 {
            LemmaOutcome::VacuousPass
        } else if failures.is_empty() {
            LemmaOutcome::Pass
        } else {
            LemmaOutcome::Fail
        };
        Self {
            outcome,
            checked,
            failures,
        }
    }
}

/// Where [`projection_lemma_check`] and [`union_lemma_check`] draw their
/// sample points from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SampleSource {
    /// Cells along the longest side of the sampling grid.
    pub grid_resolution: usize,
    pub seed: u64,
}

impl Default for SampleSource {
    fn default() -> Self {
        Self {
            grid_resolution: 16,
            seed: crate::fixtures::DEFAULT_SEED,
        }
    }
}

/// Centers of up to `k` seeded-random confirmed cells.
fn pick<T: Scalar>(cells: Vec<Point3<T>>, k: usize, seed: u64) -> Vec<Point3<T>> {
    if cells.len() <= k {
        return cells;
    }
    let mut rng = sampling::rng(seed);
    let mut idx = index::sample(&mut rng, cells.len(), k).into_vec();
    idx.sort_unstable();
    idx.into_iter().map(|i| cells[i]).collect()
}

fn confirmed_centers<T: Scalar>(
    link: &PolyLink<T>,
    n: usize,
    grid: GridSpec<T>,
    tol: &Tolerance<T>,
) -> Result<Vec<Point3<T>>, ProjectionError> {
    let opts = ExtractOptions {
        refine: false,
        ..Default::default()
    };
    let h = extract_hull(link, n, grid, opts, tol)?;
    Ok(h.grid.confirmed(n).map(|i| grid.center(grid.coords(i))).collect())
}

/// Samples points of exact depth `>= n` and checks that their projections
/// along `direction` have planar depth `>= n`.
pub fn projection_lemma_check<T: Scalar>(
    link: &PolyLink<T>,
    direction: Point3<T>,
    n: usize,
    k_samples: usize,
    source: SampleSource,
    tol: &Tolerance<T>,
) -> Result<LemmaCheck<T>, ProjectionError> {
    let proj = project(link, direction, tol)?;
    let grid = GridSpec::covering(link, source.grid_resolution).map_err(ExtractError::from)?;
    let pts = pick(confirmed_centers(link, n, grid, tol)?, k_samples, source.seed);
    // samples whose shadow lands on the projected curve are dropped
    let results: Vec<Option<(Point3<T>, bool)>> = pts
        .par_iter()
        .map(|&p| match min_cut_2d(proj.projection.map(p), &proj.link, tol) {
            Ok(q) => Ok(Some((p, q.depth() >= n))),
            Err(ProjectionError::DegenerateQuery { .. }) => Ok(None),
            Err(e) => Err(e),
        })
        .collect::<Result<_, ProjectionError>>()?;
    Ok(LemmaCheck::from_results(results.into_iter().flatten().collect()))
}

/// Samples points confirmed in both `h_m(a)` and `h_n(b)` on a common grid
/// and checks that they lie in `h_{m+n}(a ∪ b)`.
pub fn union_lemma_check<T: Scalar>(
    a: &PolyLink<T>,
    b: &PolyLink<T>,
    m: usize,
    n: usize,
    k_samples: usize,
    source: SampleSource,
    tol: &Tolerance<T>,
) -> Result<LemmaCheck<T>, ProjectionError> {
    let union = a.union(b);
    let grid = GridSpec::covering(&union, source.grid_resolution).map_err(ExtractError::from)?;
    let in_a = confirmed_centers(a, m, grid, tol)?;
    let in_b = confirmed_centers(b, n, grid, tol)?;
    let both: Vec<Point3<T>> = in_a.into_iter().filter(|p| in_b.contains(p)).collect();
    let pts = pick(both, k_samples, source.seed);
    let results = pts
        .par_iter()
        .map(|&p| Ok((p, hull_depth_nudged(p, &union, tol)? >= m + n)))
        .collect::<Result<Vec<_>, HullError>>()?;
    Ok(LemmaCheck::from_results(results))
}

/// Like [`union_lemma_check`], but for hull intersections too thin for a
/// voxel grid: probes `k_samples` interior points of the segment `p -> q`.
/// Points not in both `h_m(a)` and `h_n(b)` are skipped.
#[allow(clippy::too_many_arguments)]
pub fn union_lemma_probe<T: Scalar>(
    a: &PolyLink<T>,
    b: &PolyLink<T>,
    m: usize,
    n: usize,
    p: Point3<T>,
    q: Point3<T>,
    k_samples: usize,
    tol: &Tolerance<T>,
) -> Result<LemmaCheck<T>, ProjectionError> {
    let union = a.union(b);
    let results: Vec<Option<(Point3<T>, bool)>> = (0..k_samples)
        .into_par_iter()
        .map(|i| {
            let t = T::from_usize_lossy(i + 1) / T::from_usize_lossy(k_samples + 1);
            let x = p.lerp(q, t);
            if hull_depth_nudged(x, a, tol)? < m || hull_depth_nudged(x, b, tol)? < n {
                return Ok(None);
            }
            Ok(Some((x, hull_depth_nudged(x, &union, tol)? >= m + n)))
        })
        .collect::<Result<_, HullError>>()?;
    Ok(LemmaCheck::from_results(results.into_iter().flatten().collect()))
}
