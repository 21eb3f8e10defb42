//! Counting the intersections of a polygonal link with a plane.
//!
//! The count is the number of connected components of the preimage of
//! `K ∩ P` in the domain circle. A maximal run of vertices lying in the
//! plane (together with the in-plane edges joining them) is one component;
//! it is upward or downward when the arcs before and after it lie on
//! different sides of the plane, and glancing (counted twice) when they lie
//! on the same side. A loop lying entirely in the plane counts twice.
//!
//! Polygons never meet a plane in infinitely many components, so runs of
//! in-plane edges take the place of the infinite-count case for curves.

use serde::{Deserialize, Serialize};

use crate::geometry::{Plane, Point3, PolyLink, PolyLoop, Sign, Tolerance};
use crate::scalar::Scalar;

/// Where along a loop a cut component starts or ends.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "at", rename_all = "snake_case")]
pub enum Locus<T> {
    Vertex { index: usize },
    Edge { index: usize, param: T },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CutKind {
    TransverseEdge,
    UpwardVertexRun,
    DownwardVertexRun,
    GlancingVertexRun,
    WholeLoopInPlane,
}

impl CutKind {
    /// How many intersections the component stands for.
    pub fn contribution(self) -> usize {
        match self {
            CutKind::GlancingVertexRun | CutKind::WholeLoopInPlane => 2,
            _ => 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CutComponent<T> {
    pub loop_index: usize,
    pub start: Locus<T>,
    pub end: Locus<T>,
    pub kind: CutKind,
    /// For transverse edges: whether the loop passes from below to above.
    /// Vertex runs carry their direction in `kind`.
    pub upward: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CutCount {
    pub total: usize,
    pub per_loop: Vec<usize>,
    pub up: usize,
    pub down: usize,
    /// Set when some loop lies entirely in the plane.
    pub degenerate: bool,
}

/// Tally of one loop from its snapped sign sequence (-1, 0, +1).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub(crate) struct LoopTally {
    pub total: usize,
    pub up: usize,
    pub down: usize,
    pub whole: bool,
}

pub(crate) fn tally_signs(signs: &[i8]) -> LoopTally {
    let n = signs.len();
    let Some(start) = signs.iter().position(|&s| s != 0) else {
        return LoopTally {
            total: 2,
            up: 1,
            down: 1,
            whole: n > 0,
        };
    };
    let mut t = LoopTally::default();
    let mut prev = signs[start];
    let mut in_run = false;
    for step in 1..=n {
        let s = signs[(start + step) % n];
        if s == 0 {
            in_run = true;
            continue;
        }
        if in_run {
            in_run = false;
            if s == prev {
                t.up += 1;
                t.down += 1;
                t.total += 2;
            } else {
                if prev < 0 {
                    t.up += 1;
                } else {
                    t.down += 1;
                }
                t.total += 1;
            }
        } else if s != prev {
            if prev < 0 {
                t.up += 1;
            } else {
                t.down += 1;
            }
            t.total += 1;
        }
        prev = s;
    }
    t
}

/// Total only; for sign sequences that contain no zeros this is the number of
/// sign changes around the cycle.
#[inline]
pub(crate) fn count_signs(signs: &[i8]) -> usize {
    tally_signs(signs).total
}

fn loop_signs<T: Scalar>(lp: &PolyLoop<T>, plane: &Plane<T>, tol: &Tolerance<T>) -> (Vec<i8>, Vec<T>) {
    let heights: Vec<T> = lp.vertices().iter().map(|&p| plane.signed_distance(p)).collect();
    let signs = heights
        .iter()
        .map(|&h| Sign::from_value(h, tol.eps_abs()).as_i8())
        .collect();
    (signs, heights)
}

/// The components of `loop ∩ plane`, in loop order.
pub fn cut_components<T: Scalar>(
    lp: &PolyLoop<T>,
    plane: &Plane<T>,
    tol: &Tolerance<T>,
) -> Vec<CutComponent<T>> {
    components_indexed(0, lp, plane, tol)
}

fn components_indexed<T: Scalar>(
    loop_index: usize,
    lp: &PolyLoop<T>,
    plane: &Plane<T>,
    tol: &Tolerance<T>,
) -> Vec<CutComponent<T>> {
    let n = lp.len();
    let (signs, heights) = loop_signs(lp, plane, tol);
    let Some(start) = signs.iter().position(|&s| s != 0) else {
        if n == 0 {
            return Vec::new();
        }
        return vec![CutComponent {
            loop_index,
            start: Locus::Vertex { index: 0 },
            end: Locus::Vertex { index: n - 1 },
            kind: CutKind::WholeLoopInPlane,
            upward: true,
        }];
    };
    let mut out = Vec::new();
    let mut prev = signs[start];
    let mut run_start: Option<usize> = None;
    for step in 1..=n {
        let j = (start + step) % n;
        let s = signs[j];
        if s == 0 {
            run_start.get_or_insert(j);
            continue;
        }
        let i = (j + n - 1) % n;
        if let Some(first) = run_start.take() {
            let kind = if s == prev {
                CutKind::GlancingVertexRun
            } else if prev < 0 {
                CutKind::UpwardVertexRun
            } else {
                CutKind::DownwardVertexRun
            };
            out.push(CutComponent {
                loop_index,
                start: Locus::Vertex { index: first },
                end: Locus::Vertex { index: i },
                kind,
                upward: prev < 0,
            });
        } else if s != prev {
            let param = heights[i] / (heights[i] - heights[j]);
            let locus = Locus::Edge { index: i, param };
            out.push(CutComponent {
                loop_index,
                start: locus,
                end: locus,
                kind: CutKind::TransverseEdge,
                upward: prev < 0,
            });
        }
        prev = s;
    }
    out
}

/// Components for every loop of a link.
pub fn link_components<T: Scalar>(
    link: &PolyLink<T>,
    plane: &Plane<T>,
    tol: &Tolerance<T>,
) -> Vec<CutComponent<T>> {
    link.loops()
        .iter()
        .enumerate()
        .flat_map(|(i, lp)| components_indexed(i, lp, plane, tol))
        .collect()
}

pub fn cut_count<T: Scalar>(link: &PolyLink<T>, plane: &Plane<T>, tol: &Tolerance<T>) -> CutCount {
    let mut signs = Vec::new();
    let mut out = CutCount {
        total: 0,
        per_loop: Vec::with_capacity(link.loops().len()),
        up: 0,
        down: 0,
        degenerate: false,
    };
    for lp in link.loops() {
        signs.clear();
        signs.extend(
            lp.vertices()
                .iter()
                .map(|&p| Sign::from_value(plane.signed_distance(p), tol.eps_abs()).as_i8()),
        );
        let t = tally_signs(&signs);
        out.total += t.total;
        out.up += t.up;
        out.down += t.down;
        out.degenerate |= t.whole;
        out.per_loop.push(t.total);
    }
    out
}

/// Total count only, with a caller-owned scratch buffer.
pub(crate) fn cut_total_with<T: Scalar>(
    link: &PolyLink<T>,
    normal: Point3<T>,
    offset: T,
    eps_abs: T,
    scratch: &mut Vec<i8>,
) -> usize {
    let mut total = 0;
    for lp in link.loops() {
        scratch.clear();
        scratch.extend(
            lp.vertices()
                .iter()
                .map(|&p| Sign::from_value(normal.dot(p) - offset, eps_abs).as_i8()),
        );
        total += count_signs(scratch);
    }
    total
}

/// Intersection counts of the planes `{x : direction . x = c}` as a
/// piecewise constant function of `c`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DirectionProfile<T> {
    pub direction: Point3<T>,
    /// Sorted distinct vertex heights (heights within `eps_abs` merged).
    pub breakpoints: Vec<T>,
    /// `counts[k]` holds on the open interval `(breakpoints[k], breakpoints[k + 1])`.
    pub counts: Vec<usize>,
    eps_abs: T,
}

impl<T: Scalar> DirectionProfile<T> {
    /// Count at a generic offset, or `None` when the offset is within the
    /// snapping band of a breakpoint.
    pub fn count_at(&self, offset: T) -> Option<usize> {
        let bp = &self.breakpoints;
        let k = bp.partition_point(|&b| b < offset);
        if k < bp.len() && (bp[k] - offset).abs() <= self.eps_abs {
            return None;
        }
        if k > 0 && (offset - bp[k - 1]).abs() <= self.eps_abs {
            return None;
        }
        if k == 0 || k == bp.len() {
            return Some(0);
        }
        Some(self.counts[k - 1])
    }

    pub fn max_count(&self) -> usize {
        self.counts.iter().copied().max().unwrap_or(0)
    }

    /// `(midpoint, count)` for every bounded open interval.
    pub fn intervals(&self) -> impl Iterator<Item = (T, T, usize)> + '_ {
        self.breakpoints
            .windows(2)
            .zip(&self.counts)
            .map(|(w, &c)| (w[0], w[1], c))
    }

    pub fn min_height(&self) -> Option<T> {
        self.breakpoints.first().copied()
    }

    pub fn max_height(&self) -> Option<T> {
        self.breakpoints.last().copied()
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ProfileError {
    #[error("sweep direction is zero or not finite")]
    ZeroDirection,
}

pub fn sweep_profile<T: Scalar>(
    link: &PolyLink<T>,
    direction: Point3<T>,
    tol: &Tolerance<T>,
) -> Result<DirectionProfile<T>, ProfileError> {
    let dir = direction.normalized().ok_or(ProfileError::ZeroDirection)?;
    Ok(profile_unit(link, dir, tol.eps_abs()))
}

pub(crate) fn profile_unit<T: Scalar>(link: &PolyLink<T>, dir: Point3<T>, eps_abs: T) -> DirectionProfile<T> {
    let heights: Vec<T> = link.vertices().map(|p| dir.dot(p)).collect();
    let mut order: Vec<usize> = (0..heights.len()).collect();
    order.sort_by(|&a, &b| heights[a].partial_cmp(&heights[b]).expect("finite heights"));

    let mut cluster = vec![0usize; heights.len()];
    let mut breakpoints = Vec::new();
    let mut last = T::neg_infinity();
    for &v in &order {
        let h = heights[v];
        if breakpoints.is_empty() || h - last > eps_abs {
            breakpoints.push(h);
        }
        last = h;
        cluster[v] = breakpoints.len() - 1;
    }

    let intervals = breakpoints.len().saturating_sub(1);
    let mut diff = vec![0isize; breakpoints.len() + 1];
    let mut base = 0;
    for lp in link.loops() {
        let n = lp.len();
        for i in 0..n {
            let (a, b) = (cluster[base + i], cluster[base + (i + 1) % n]);
            let (lo, hi) = if a < b { (a, b) } else { (b, a) };
            if lo != hi {
                diff[lo] += 1;
                diff[hi] -= 1;
            }
        }
        base += n;
    }
    let mut counts = Vec::with_capacity(intervals);
    let mut acc = 0isize;
    for d in diff.iter().take(intervals) {
        acc += d;
        counts.push(acc as usize);
    }
    DirectionProfile {
        direction: dir,
        breakpoints,
        counts,
        eps_abs,
    }
}
