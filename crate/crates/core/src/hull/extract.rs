//! Voxel approximation of `h_n` with exact confirmation at cell centers.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{min_count_nudged, HullError};
use crate::cut::{profile_unit, DirectionProfile};
use crate::geometry::{Point3, PolyLink, Tolerance};
use crate::sampling;
use crate::scalar::Scalar;

/// Cubic cells of side `spacing`; cell `(i, j, k)` has its center at
/// `origin + (i + 1/2, j + 1/2, k + 1/2) * spacing`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec<T> {
    pub origin: Point3<T>,
    pub spacing: T,
    pub dims: [usize; 3],
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GridError {
    #[error("grid spacing must be positive and finite")]
    BadSpacing,
    #[error("grid dimensions must be positive")]
    EmptyDims,
    #[error("grid does not cover the link's bounding box")]
    NotCovering,
    #[error("link has no vertices")]
    EmptyLink,
}

impl<T: Scalar> GridSpec<T> {
    pub fn new(origin: Point3<T>, spacing: T, dims: [usize; 3]) -> Result<Self, GridError> {
        if !(spacing.is_finite() && spacing > T::zero()) || !origin.is_finite() {
            return Err(GridError::BadSpacing);
        }
        if dims.contains(&0) {
            return Err(GridError::EmptyDims);
        }
        Ok(Self { origin, spacing, dims })
    }

    /// Cubic cells with `resolution` cells along the longest side of the
    /// bounding box, centered on it. Shorter sides get proportionally fewer
    /// cells, so a planar link gets a single layer whose centers lie in the
    /// mid-plane of its box.
    pub fn covering(link: &PolyLink<T>, resolution: usize) -> Result<Self, GridError> {
        let (lo, hi) = link.bounding_box().ok_or(GridError::EmptyLink)?;
        if resolution == 0 {
            return Err(GridError::EmptyDims);
        }
        let ext = hi - lo;
        let longest = ext.x.max(ext.y).max(ext.z);
        if !(longest > T::zero()) {
            return Err(GridError::BadSpacing);
        }
        let spacing = longest * T::lit(1.0 + 1e-6) / T::from_usize_lossy(resolution);
        let mid = (lo + hi) * T::lit(0.5);
        let mut dims = [0usize; 3];
        let mut origin = [T::zero(); 3];
        for a in 0..3 {
            let cells = (ext[a] / spacing).ceil().to_usize().unwrap_or(1).clamp(1, resolution);
            dims[a] = cells;
            origin[a] = mid[a] - spacing * T::from_usize_lossy(cells) * T::lit(0.5);
        }
        Self::new(Point3::from_array(origin), spacing, dims)
    }

    pub fn len(&self) -> usize {
        self.dims[0] * self.dims[1] * self.dims[2]
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn index(&self, c: [usize; 3]) -> usize {
        (c[2] * self.dims[1] + c[1]) * self.dims[0] + c[0]
    }

    pub fn coords(&self, index: usize) -> [usize; 3] {
        let x = index % self.dims[0];
        let y = (index / self.dims[0]) % self.dims[1];
        let z = index / (self.dims[0] * self.dims[1]);
        [x, y, z]
    }

    pub fn center(&self, c: [usize; 3]) -> Point3<T> {
        let h = T::lit(0.5);
        let f = |a: usize| T::from_usize_lossy(c[a]) + h;
        self.origin + Point3::new(f(0), f(1), f(2)) * self.spacing
    }

    pub fn upper_corner(&self) -> Point3<T> {
        let d = |a: usize| T::from_usize_lossy(self.dims[a]);
        self.origin + Point3::new(d(0), d(1), d(2)) * self.spacing
    }

    pub fn covers(&self, link: &PolyLink<T>) -> bool {
        let Some((lo, hi)) = link.bounding_box() else {
            return true;
        };
        let top = self.upper_corner();
        (0..3).all(|a| self.origin[a] <= lo[a] && hi[a] <= top[a])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CellStatus {
    /// Depth computed by the exact oracle.
    ConfirmedExact,
    /// Only the pre-filter ran; depth is its upper bound.
    PrefilterOnly,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VoxelGrid<T> {
    pub spec: GridSpec<T>,
    pub depth: Vec<usize>,
    pub status: Vec<CellStatus>,
}

impl<T: Scalar> VoxelGrid<T> {
    /// Cells confirmed to lie in `h_n`.
    pub fn confirmed(&self, n: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.depth.len())
            .filter(move |&i| self.status[i] == CellStatus::ConfirmedExact && self.depth[i] >= n)
    }

    pub fn is_selected(&self, index: usize, n: usize) -> bool {
        self.status[index] == CellStatus::ConfirmedExact && self.depth[index] >= n
    }

    /// Face-connected components of the cells confirmed at level `n`.
    pub fn components(&self, n: usize) -> Vec<Vec<usize>> {
        let dims = self.spec.dims;
        let mut seen = vec![false; self.depth.len()];
        let mut out = Vec::new();
        for start in self.confirmed(n) {
            if seen[start] {
                continue;
            }
            seen[start] = true;
            let mut comp = vec![start];
            let mut k = 0;
            while k < comp.len() {
                let c = self.spec.coords(comp[k]);
                k += 1;
                for axis in 0..3 {
                    for up in [false, true] {
                        let mut d = c;
                        if up {
                            if d[axis] + 1 >= dims[axis] {
                                continue;
                            }
                            d[axis] += 1;
                        } else {
                            if d[axis] == 0 {
                                continue;
                            }
                            d[axis] -= 1;
                        }
                        let j = self.spec.index(d);
                        if !seen[j] && self.is_selected(j, n) {
                            seen[j] = true;
                            comp.push(j);
                        }
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }
}

/// One boundary square of the selected voxel set, corners counterclockwise
/// seen from outside.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Quad<T> {
    pub corners: [Point3<T>; 4],
    /// Outward axis: `(axis, +1 | -1)`.
    pub axis: usize,
    pub sign: i8,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HullMesh<T> {
    pub level: usize,
    pub faces: Vec<Quad<T>>,
}

/// A cell split into octants after the first pass.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RefinedCell<T> {
    pub parent: usize,
    pub octant: u8,
    pub center: Point3<T>,
    pub depth: usize,
    pub status: CellStatus,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExtractOptions {
    /// Number of pre-filter directions.
    pub directions: usize,
    /// Maximum number of exact oracle calls; `None` for no limit.
    pub budget: Option<usize>,
    /// Split boundary cells into octants once and confirm those.
    pub refine: bool,
}

impl Default for ExtractOptions {
    fn default() -> Self {
        Self {
            directions: 512,
            budget: None,
            refine: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HullExtraction<T> {
    pub level: usize,
    pub grid: VoxelGrid<T>,
    pub mesh: HullMesh<T>,
    pub refined: Vec<RefinedCell<T>>,
    /// Set when the budget ran out before every surviving cell was confirmed.
    pub partial: bool,
    pub exact_calls: usize,
}

impl<T: Scalar> HullExtraction<T> {
    pub fn confirmed_count(&self) -> usize {
        self.grid.confirmed(self.level).count()
            + self
                .refined
                .iter()
                .filter(|r| r.status == CellStatus::ConfirmedExact && r.depth >= self.level)
                .count()
    }

    /// Largest exact depth seen among all confirmed cells and subcells.
    pub fn max_confirmed_depth(&self) -> usize {
        let cells = (0..self.grid.depth.len())
            .filter(|&i| self.grid.status[i] == CellStatus::ConfirmedExact)
            .map(|i| self.grid.depth[i]);
        let subs = self
            .refined
            .iter()
            .filter(|r| r.status == CellStatus::ConfirmedExact)
            .map(|r| r.depth);
        cells.chain(subs).max().unwrap_or(0)
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExtractError {
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error(transparent)]
    Hull(#[from] HullError),
    #[error("level must be at least 1")]
    ZeroLevel,
}

struct Prefilter<T> {
    profiles: Vec<DirectionProfile<T>>,
}

impl<T: Scalar> Prefilter<T> {
    fn new(link: &PolyLink<T>, directions: usize, tol: &Tolerance<T>) -> Self {
        let profiles = sampling::hemisphere_directions::<T>(directions)
            .into_par_iter()
            .map(|d| profile_unit(link, d, tol.eps_abs()))
            .collect();
        Self { profiles }
    }

    /// Upper bound on the minimal cut count at `p`, stopping early once it
    /// falls below `floor`.
    fn bound(&self, p: Point3<T>, floor: usize) -> usize {
        let mut best = usize::MAX;
        for prof in &self.profiles {
            if let Some(c) = prof.count_at(prof.direction.dot(p)) {
                best = best.min(c);
                if best < floor {
                    break;
                }
            }
        }
        best
    }
}

/// Voxelizes `h_n(link)`.
///
/// Every cell center is bounded by the pre-filter; centers whose bound
/// reaches `2n` are run through the exact oracle. A cell's depth is exact
/// when its status is [`CellStatus::ConfirmedExact`] and otherwise the
/// pre-filter's upper bound.
pub fn extract_hull<T: Scalar>(
    link: &PolyLink<T>,
    n: usize,
    grid: GridSpec<T>,
    options: ExtractOptions,
    tol: &Tolerance<T>,
) -> Result<HullExtraction<T>, ExtractError> {
    if n == 0 {
        return Err(ExtractError::ZeroLevel);
    }
    if !grid.covers(link) {
        return Err(GridError::NotCovering.into());
    }
    let pre = Prefilter::new(link, options.directions, tol);
    let cells = grid.len();
    let bounds: Vec<usize> = (0..cells)
        .into_par_iter()
        .map(|i| pre.bound(grid.center(grid.coords(i)), 0))
        .collect();

    let mut survivors: Vec<usize> = (0..cells).filter(|&i| bounds[i] >= 2 * n).collect();
    let mut partial = false;
    if let Some(b) = options.budget {
        if survivors.len() > b {
            survivors.truncate(b);
            partial = true;
        }
    }
    let exact: Vec<(usize, usize)> = survivors
        .par_iter()
        .map(|&i| min_count_nudged(grid.center(grid.coords(i)), link, 0, tol).map(|c| (i, c)))
        .collect::<Result<_, _>>()?;
    let mut exact_calls = exact.len();

    let mut depth: Vec<usize> = bounds.iter().map(|&b| b / 2).collect();
    let mut status = vec![CellStatus::PrefilterOnly; cells];
    for &(i, c) in &exact {
        depth[i] = c / 2;
        status[i] = CellStatus::ConfirmedExact;
    }
    let voxels = VoxelGrid {
        spec: grid,
        depth,
        status,
    };

    let mut refined = Vec::new();
    if options.refine && !partial {
        let boundary = boundary_cells(&voxels, n);
        let remaining = options.budget.map(|b| b.saturating_sub(exact_calls));
        let jobs: Vec<(usize, u8)> = boundary
            .iter()
            .flat_map(|&c| (0..8u8).map(move |o| (c, o)))
            .collect();
        let results: Vec<RefinedCell<T>> = jobs
            .par_iter()
            .enumerate()
            .map(|(k, &(parent, octant))| {
                let center = octant_center(&grid, parent, octant);
                let bound = pre.bound(center, 2 * n);
                let allowed = remaining.is_none_or(|r| k < r);
                if bound < 2 * n || !allowed {
                    return Ok(RefinedCell {
                        parent,
                        octant,
                        center,
                        depth: bound.min(usize::MAX - 1) / 2,
                        status: CellStatus::PrefilterOnly,
                    });
                }
                let c = min_count_nudged(center, link, 0, tol)?;
                Ok(RefinedCell {
                    parent,
                    octant,
                    center,
                    depth: c / 2,
                    status: CellStatus::ConfirmedExact,
                })
            })
            .collect::<Result<_, HullError>>()?;
        exact_calls += results
            .iter()
            .filter(|r| r.status == CellStatus::ConfirmedExact)
            .count();
        partial = remaining.is_some_and(|r| jobs.len() > r);
        refined = results;
    }

    let mesh = build_mesh(&voxels, n);
    Ok(HullExtraction {
        level: n,
        grid: voxels,
        mesh,
        refined,
        partial,
        exact_calls,
    })
}

fn octant_center<T: Scalar>(grid: &GridSpec<T>, parent: usize, octant: u8) -> Point3<T> {
    let c = grid.center(grid.coords(parent));
    let q = grid.spacing * T::lit(0.25);
    let s = |bit: u8| if octant & bit != 0 { q } else { -q };
    c + Point3::new(s(1), s(2), s(4))
}

fn neighbours(spec: &GridSpec<impl Scalar>, c: [usize; 3]) -> impl Iterator<Item = Option<[usize; 3]>> + '_ {
    (0..3).flat_map(move |a| {
        [-1i64, 1].into_iter().map(move |d| {
            let v = c[a] as i64 + d;
            if v < 0 || v >= spec.dims[a] as i64 {
                None
            } else {
                let mut m = c;
                m[a] = v as usize;
                Some(m)
            }
        })
    })
}

/// Cells whose selection at level `n` differs from a face neighbour's.
fn boundary_cells<T: Scalar>(v: &VoxelGrid<T>, n: usize) -> Vec<usize> {
    let spec = &v.spec;
    (0..spec.len())
        .filter(|&i| {
            let own = v.is_selected(i, n);
            neighbours(spec, spec.coords(i)).any(|m| match m {
                Some(m) => v.is_selected(spec.index(m), n) != own,
                None => own,
            })
        })
        .collect()
}

fn build_mesh<T: Scalar>(v: &VoxelGrid<T>, n: usize) -> HullMesh<T> {
    let spec = &v.spec;
    let mut faces = Vec::new();
    for i in 0..spec.len() {
        if !v.is_selected(i, n) {
            continue;
        }
        let c = spec.coords(i);
        for (k, m) in neighbours(spec, c).enumerate() {
            let open = m.is_none_or(|m| !v.is_selected(spec.index(m), n));
            if !open {
                continue;
            }
            let axis = k / 2;
            let sign: i8 = if k % 2 == 0 { -1 } else { 1 };
            faces.push(cell_face(spec, c, axis, sign));
        }
    }
    HullMesh { level: n, faces }
}

fn cell_face<T: Scalar>(spec: &GridSpec<T>, c: [usize; 3], axis: usize, sign: i8) -> Quad<T> {
    let corner = |d: [usize; 3]| {
        let f = |a: usize| T::from_usize_lossy(c[a] + d[a]);
        spec.origin + Point3::new(f(0), f(1), f(2)) * spec.spacing
    };
    let (u, w) = ((axis + 1) % 3, (axis + 2) % 3);
    let mut base = [0usize; 3];
    base[axis] = usize::from(sign > 0);
    let step = |a: usize, b: usize| {
        let mut d = base;
        d[u] += a;
        d[w] += b;
        d
    };
    let ring = [step(0, 0), step(1, 0), step(1, 1), step(0, 1)];
    let mut corners = ring.map(corner);
    if sign < 0 {
        corners.reverse();
    }
    Quad { corners, axis, sign }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HullNumber<T> {
    /// Largest confirmed depth on the grid (a lower bound for the true value).
    pub value: usize,
    /// A point of depth `value`, when `value > 0`.
    pub witness: Option<Point3<T>>,
    pub exact_calls: usize,
}

/// Largest `n` such that some cell center (or octant center of a cell whose
/// pre-filter bound allows it) is confirmed in `h_n`.
pub fn hull_number<T: Scalar>(
    link: &PolyLink<T>,
    grid: GridSpec<T>,
    tol: &Tolerance<T>,
) -> Result<HullNumber<T>, ExtractError> {
    if !grid.covers(link) {
        return Err(GridError::NotCovering.into());
    }
    let pre = Prefilter::new(link, 512, tol);
    let mut candidates: Vec<(usize, Point3<T>)> = (0..grid.len())
        .into_par_iter()
        .flat_map_iter(|i| {
            let c = grid.center(grid.coords(i));
            std::iter::once(c).chain((0..8).map(move |o| octant_center(&grid, i, o)))
        })
        .map(|p| (pre.bound(p, 2), p))
        .filter(|&(b, _)| b >= 2)
        .collect();
    candidates.sort_by(|a, b| b.0.cmp(&a.0));
    let top = candidates.first().map_or(0, |c| c.0 / 2);
    let mut exact_calls = 0;
    for n in (1..=top).rev() {
        let pool: Vec<Point3<T>> = candidates
            .iter()
            .take_while(|c| c.0 >= 2 * n)
            .map(|c| c.1)
            .collect();
        // batches keep the search short when an early candidate succeeds
        for chunk in pool.chunks(64) {
            let hits: Vec<Option<Point3<T>>> = chunk
                .par_iter()
                .map(|&p| Ok(min_count_nudged(p, link, 2 * n, tol)?.ge(&(2 * n)).then_some(p)))
                .collect::<Result<_, HullError>>()?;
            exact_calls += chunk.len();
            if let Some(p) = hits.into_iter().flatten().next() {
                return Ok(HullNumber {
                    value: n,
                    witness: Some(p),
                    exact_calls,
                });
            }
        }
    }
    Ok(HullNumber {
        value: 0,
        witness: None,
        exact_calls,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use std::collections::HashMap;

    #[test]
    fn covering_grid_flattens_planar_links() {
        let c = fixtures::circle::<f64>(64).unwrap().link;
        let g = GridSpec::covering(&c, 32).unwrap();
        assert_eq!(g.dims, [32, 32, 1]);
        assert!(g.covers(&c));
        let t = fixtures::trefoil::<f64>(64).unwrap().link;
        let g = GridSpec::covering(&t, 32).unwrap();
        assert_eq!(g.dims.iter().max(), Some(&32));
        assert!(g.dims[2] < 16);
        assert!(g.covers(&t));
    }

    #[test]
    fn index_round_trip() {
        let g = GridSpec::new(Point3::<f64>::zero(), 1.0, [3, 4, 5]).unwrap();
        for i in 0..g.len() {
            assert_eq!(g.index(g.coords(i)), i);
        }
        assert!(GridSpec::new(Point3::<f64>::zero(), 0.0, [1, 1, 1]).is_err());
    }

    #[test]
    fn mesh_is_closed() {
        let link = fixtures::trefoil::<f64>(48).unwrap().link;
        let tol = Tolerance::for_link(&link);
        let g = GridSpec::covering(&link, 12).unwrap();
        let h = extract_hull(&link, 1, g, ExtractOptions::default(), &tol).unwrap();
        assert!(!h.mesh.faces.is_empty());
        let key = |p: Point3<f64>| [p.x, p.y, p.z].map(|v| (v * 1e6).round() as i64);
        let mut edges: HashMap<([i64; 3], [i64; 3]), i32> = HashMap::new();
        for q in &h.mesh.faces {
            for k in 0..4 {
                let (a, b) = (key(q.corners[k]), key(q.corners[(k + 1) % 4]));
                // oriented edges of a closed surface cancel pairwise
                *edges.entry((a, b)).or_default() += 1;
                *edges.entry((b, a)).or_default() -= 1;
            }
        }
        assert!(edges.values().all(|&v| v == 0));
    }

    #[test]
    fn zero_level_rejected() {
        let link = fixtures::circle::<f64>(16).unwrap().link;
        let tol = Tolerance::for_link(&link);
        let g = GridSpec::covering(&link, 4).unwrap();
        assert!(matches!(
            extract_hull(&link, 0, g, ExtractOptions::default(), &tol),
            Err(ExtractError::ZeroLevel)
        ));
        let small = GridSpec::new(Point3::zero(), 0.1, [2, 2, 2]).unwrap();
        assert!(matches!(
            extract_hull(&link, 1, small, ExtractOptions::default(), &tol),
            Err(ExtractError::Grid(GridError::NotCovering))
        ));
    }

    #[test]
    fn budget_marks_partial() {
        let link = fixtures::trefoil::<f64>(32).unwrap().link;
        let tol = Tolerance::for_link(&link);
        let g = GridSpec::covering(&link, 10).unwrap();
        let opts = ExtractOptions {
            budget: Some(3),
            ..Default::default()
        };
        let h = extract_hull(&link, 1, g, opts, &tol).unwrap();
        assert!(h.partial);
        assert_eq!(h.exact_calls, 3);
    }
}
