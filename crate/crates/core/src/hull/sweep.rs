//! Exact minimum cut count over all planes through a point.
//!
//! For planes through `p` with normal `u`, the sign of vertex `v_i` is the
//! sign of `(v_i - p) . u`, so the sign pattern (and hence the count) is
//! constant on each open face of the arrangement of great circles
//! `C_i = {u : (v_i - p) . u = 0}`. Every face has at least one boundary arc
//! on some circle, so sweeping each circle once and evaluating the two faces
//! on either side of every arc visits every face.
//!
//! Along `C_i` the other signs change only where `C_i` meets another circle,
//! and flipping one sign changes the count only on the two edges at that
//! vertex, so each circle costs `O(N log N)` and a query `O(N^2 log N)`.
//!
//! The same sweep over the circles dual to the edge vectors enumerates the
//! generic height functions, with the number of local maxima as the score.

use crate::geometry::{Point3, PolyLink};
use crate::scalar::Scalar;

/// Vertex offsets from the query point plus the cyclic neighbour structure.
pub(crate) struct Frame<T> {
    w: Vec<Point3<T>>,
    norm: Vec<T>,
    next: Vec<usize>,
    prev: Vec<usize>,
}

impl<T: Scalar> Frame<T> {
    pub(crate) fn new(p: Point3<T>, link: &PolyLink<T>) -> Self {
        let n = link.vertex_count();
        let mut w = Vec::with_capacity(n);
        let mut next = Vec::with_capacity(n);
        let mut prev = Vec::with_capacity(n);
        let mut base = 0;
        for lp in link.loops() {
            let m = lp.len();
            for k in 0..m {
                w.push(lp.vertices()[k] - p);
                next.push(base + (k + 1) % m);
                prev.push(base + (k + m - 1) % m);
            }
            base += m;
        }
        let norm = w.iter().map(|v| v.norm()).collect();
        Self { w, norm, next, prev }
    }

    /// Edge vectors `v_{k+1} - v_k` in place of vertex offsets, so that sign
    /// `+` on edge `k` means the height rises along it.
    pub(crate) fn edges(link: &PolyLink<T>) -> Self {
        let mut f = Self::new(Point3::zero(), link);
        let mut base = 0;
        for lp in link.loops() {
            let m = lp.len();
            for k in 0..m {
                f.w[base + k] = lp.vertex(k + 1) - lp.vertex(k);
            }
            base += m;
        }
        f.norm = f.w.iter().map(|v| v.norm()).collect();
        f
    }
}

/// Which function of the sign pattern is evaluated on each face.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Score {
    /// Sign changes between cyclic neighbours: the plane cut count when the
    /// frame holds vertex offsets.
    Changes,
    /// `+` followed by `-`: local maxima of the height function when the
    /// frame holds edge vectors.
    Peaks,
}

impl Score {
    #[inline]
    fn pair(self, a: i8, b: i8) -> usize {
        match self {
            Score::Changes => (a != b) as usize,
            Score::Peaks => (a > 0 && b < 0) as usize,
        }
    }
}

/// An open face, given as the side `sigma` of circle `circle` along the arc
/// of angles `(lo, hi)`.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Face<T> {
    pub count: usize,
    circle: usize,
    lo: T,
    hi: T,
    sigma: i8,
}

/// Best face found: its count and a unit normal strictly inside it.
#[derive(Debug, Clone, Copy)]
pub(crate) struct FaceMin<T> {
    pub count: usize,
    pub normal: Point3<T>,
}

/// Angular gap below which two crossings are treated as simultaneous.
const ANGLE_MERGE: f64 = 1e-13;

/// Minimum over all arrangement faces; returns early once a face with count
/// below `stop_below` is seen (pass 0 to always search everything).
pub(crate) fn sweep_min<T: Scalar>(frame: &Frame<T>, stop_below: usize) -> FaceMin<T> {
    let mut best: Option<Face<T>> = None;
    for_each_face(frame, Score::Changes, |f| {
        if best.is_none_or(|b| f.count < b.count) {
            best = Some(*f);
        }
        f.count < stop_below
    });
    let best = best.expect("at least one vertex");
    FaceMin {
        count: best.count,
        normal: witness_normal(frame, &best),
    }
}

/// Calls `visit` on both sides of every arc of every circle (faces are
/// visited several times). Stops when `visit` returns true.
pub(crate) fn for_each_face<T: Scalar>(frame: &Frame<T>, score: Score, mut visit: impl FnMut(&Face<T>) -> bool) {
    let n = frame.w.len();
    let pi = T::PI();
    let half = T::lit(0.5);
    let par = T::lit(T::NORMAL_EPS);
    let merge = T::lit(ANGLE_MERGE);

    let mut crossings: Vec<(T, usize)> = Vec::with_capacity(n);
    let mut tie = vec![0i8; n];
    let mut sp = vec![0i8; n];
    let mut sm = vec![0i8; n];
    let (mut a, mut b) = (vec![T::zero(); n], vec![T::zero(); n]);

    for i in 0..n {
        let wi = frame.w[i];
        let wh = wi / frame.norm[i];
        let e1 = wh.any_orthogonal();
        let e2 = wh.cross(e1);

        crossings.clear();
        for j in 0..n {
            tie[j] = 0;
            if j == i {
                continue;
            }
            let wj = frame.w[j];
            a[j] = wj.dot(e1);
            b[j] = wj.dot(e2);
            let r = a[j].hypot(b[j]);
            if r <= par * frame.norm[j] {
                tie[j] = if wj.dot(wh) > T::zero() { 1 } else { -1 };
                continue;
            }
            let mut c = b[j].atan2(a[j]) + pi * half;
            while c >= pi {
                c = c - pi;
            }
            while c < T::zero() {
                c = c + pi;
            }
            crossings.push((c, j));
        }
        crossings.sort_by(|x, y| x.0.partial_cmp(&y.0).expect("finite angles"));

        let (theta0, lo0, hi0) = match (crossings.first(), crossings.last()) {
            (Some(&(first, _)), Some(&(last, _))) => {
                let lo = last - pi;
                (half * (lo + first), lo, first)
            }
            _ => (half * pi, T::zero(), pi),
        };
        let (c0, s0) = (theta0.cos(), theta0.sin());
        for j in 0..n {
            let s = if j == i {
                0
            } else if tie[j] != 0 {
                tie[j]
            } else if a[j] * c0 + b[j] * s0 > T::zero() {
                1
            } else {
                -1
            };
            sp[j] = s;
            sm[j] = s;
        }
        sp[i] = 1;
        sm[i] = -1;
        for j in 0..n {
            if tie[j] != 0 {
                sm[j] = -tie[j];
            }
        }
        let mut cp = 0usize;
        let mut cm = 0usize;
        for k in 0..n {
            let nk = frame.next[k];
            cp += score.pair(sp[k], sp[nk]);
            cm += score.pair(sm[k], sm[nk]);
        }

        let mut emit = |cp: usize, cm: usize, lo: T, hi: T| {
            for (count, sigma) in [(cp, 1i8), (cm, -1i8)] {
                let face = Face {
                    count,
                    circle: i,
                    lo,
                    hi,
                    sigma,
                };
                if visit(&face) {
                    return true;
                }
            }
            false
        };
        if emit(cp, cm, lo0, hi0) {
            return;
        }

        let m = crossings.len();
        let mut k = 0;
        while k < m {
            let angle = crossings[k].0;
            let mut end = k;
            while end < m && crossings[end].0 - angle <= merge {
                let j = crossings[end].1;
                let (pj, nj) = (frame.prev[j], frame.next[j]);
                let local = |s: &[i8]| score.pair(s[pj], s[j]) + score.pair(s[j], s[nj]);
                let (before_p, before_m) = (local(&sp), local(&sm));
                sp[j] = -sp[j];
                sm[j] = -sm[j];
                cp = cp + local(&sp) - before_p;
                cm = cm + local(&sm) - before_m;
                end += 1;
            }
            if end < m {
                let hi = crossings[end].0;
                if emit(cp, cm, crossings[end - 1].0, hi) {
                    return;
                }
            }
            k = end;
        }
    }
}

pub(crate) fn witness_normal<T: Scalar>(frame: &Frame<T>, best: &Face<T>) -> Point3<T> {
    let i = best.circle;
    let wh = frame.w[i] / frame.norm[i];
    let e1 = wh.any_orthogonal();
    let e2 = wh.cross(e1);
    let theta = T::lit(0.5) * (best.lo + best.hi);
    let u = e1 * theta.cos() + e2 * theta.sin();
    // tilt off C_i by less than the angular clearance of every other vertex
    let mut clearance = T::lit(1e-3);
    let par = T::lit(T::NORMAL_EPS);
    for (j, &wj) in frame.w.iter().enumerate() {
        if j == i {
            continue;
        }
        let r = wj.dot(e1).hypot(wj.dot(e2));
        if r <= par * frame.norm[j] {
            continue;
        }
        clearance = clearance.min(T::lit(0.25) * wj.dot(u).abs() / frame.norm[j]);
    }
    let tilt = if best.sigma > 0 { clearance } else { -clearance };
    let v = u + wh * tilt;
    v / v.norm()
}
