//! Chord replacement and clipping to a half-space.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{Halfspace, Point3, PolyLink, PolyLoop, Sign, Tolerance};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SurgeryError {
    #[error("arc endpoints coincide")]
    CoincidentEndpoints,
    #[error("arc covers (nearly) the whole loop")]
    WholeLoop,
    #[error("arc refers to edge {edge} of a loop with {len} edges")]
    BadEdge { edge: usize, len: usize },
    #[error("edge parameter {0} outside [0, 1]")]
    BadParam(f64),
    #[error("loop index {0} out of range")]
    BadLoop(usize),
    #[error("every vertex lies outside the half-space")]
    AllOutside,
    #[error("{0} arcs lie outside the half-space; clipping needs at most one")]
    SeveralOutside(usize),
}

/// A point on a loop: edge `edge` at parameter `param` from its start.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LoopPoint<T> {
    pub edge: usize,
    pub param: T,
}

/// The subarc from `start` to `end` following the stored vertex order.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ArcSpec<T> {
    pub loop_index: usize,
    pub start: LoopPoint<T>,
    pub end: LoopPoint<T>,
}

fn check_point<T: Scalar>(lp: &PolyLoop<T>, q: LoopPoint<T>) -> Result<(), SurgeryError> {
    if q.edge >= lp.len() {
        return Err(SurgeryError::BadEdge {
            edge: q.edge,
            len: lp.len(),
        });
    }
    if !(q.param >= T::zero() && q.param <= T::one()) {
        return Err(SurgeryError::BadParam(q.param.as_f64()));
    }
    Ok(())
}

fn push_merged<T: Scalar>(out: &mut Vec<Point3<T>>, p: Point3<T>, eps: T) {
    if out.last().is_none_or(|&q| q.distance(p) > eps) {
        out.push(p);
    }
}

/// Replaces the arc by the straight chord between its endpoints.
///
/// The result keeps the complementary arc, from the arc's end forward to its
/// start, and closes it with the chord. Points within `eps_abs` of their
/// neighbours are merged.
pub fn replace_subarc<T: Scalar>(lp: &PolyLoop<T>, arc: &ArcSpec<T>, tol: &Tolerance<T>) -> Result<PolyLoop<T>, SurgeryError> {
    check_point(lp, arc.start)?;
    check_point(lp, arc.end)?;
    let n = lp.len();
    let eps = tol.eps_abs();
    let ps = lp.point_at(arc.start.edge, arc.start.param);
    let pe = lp.point_at(arc.end.edge, arc.end.param);
    if ps.distance(pe) <= eps {
        return Err(SurgeryError::CoincidentEndpoints);
    }
    // vertices strictly after the end point up to the start edge's start
    let same_edge_forward = arc.start.edge == arc.end.edge && arc.start.param <= arc.end.param;
    let first = (arc.end.edge + 1) % n;
    let count = if same_edge_forward {
        n
    } else {
        (arc.start.edge + n - arc.end.edge) % n
    };
    let mut out = Vec::with_capacity(count + 2);
    push_merged(&mut out, pe, eps);
    for k in 0..count {
        push_merged(&mut out, lp.vertex(first + k), eps);
    }
    push_merged(&mut out, ps, eps);
    while out.len() > 1 && out[0].distance(out[out.len() - 1]) <= eps {
        out.pop();
    }
    if out.len() < 3 {
        return Err(SurgeryError::WholeLoop);
    }
    Ok(PolyLoop::new(out))
}

/// [`replace_subarc`] applied to one loop of a link.
pub fn replace_subarc_in<T: Scalar>(link: &PolyLink<T>, arc: &ArcSpec<T>, tol: &Tolerance<T>) -> Result<PolyLink<T>, SurgeryError> {
    let lp = link.loops().get(arc.loop_index).ok_or(SurgeryError::BadLoop(arc.loop_index))?;
    let new = replace_subarc(lp, arc, tol)?;
    let loops = link
        .loops()
        .iter()
        .enumerate()
        .map(|(i, l)| if i == arc.loop_index { new.clone() } else { l.clone() })
        .collect();
    let out = PolyLink::new(loops);
    Ok(match link.labels() {
        Some(l) => out.with_labels(l.to_vec()),
        None => out,
    })
}

/// Maximal arcs of vertices strictly outside `h`, each running between the
/// two crossings of the boundary plane. Vertices on the plane count as
/// inside.
pub fn outside_arcs<T: Scalar>(
    lp: &PolyLoop<T>,
    h: &Halfspace<T>,
    tol: &Tolerance<T>,
) -> Result<Vec<ArcSpec<T>>, SurgeryError> {
    outside_arcs_of(0, lp, h, tol)
}

fn outside_arcs_of<T: Scalar>(
    loop_index: usize,
    lp: &PolyLoop<T>,
    h: &Halfspace<T>,
    tol: &Tolerance<T>,
) -> Result<Vec<ArcSpec<T>>, SurgeryError> {
    let n = lp.len();
    let out: Vec<bool> = lp
        .vertices()
        .iter()
        .map(|&p| h.classify(p, tol) == Sign::Below)
        .collect();
    if out.iter().all(|&o| o) {
        return Err(SurgeryError::AllOutside);
    }
    let Some(anchor) = (0..n).find(|&k| !out[k]) else {
        return Ok(Vec::new());
    };
    let crossing = |e: usize| {
        let (a, b) = lp.edge(e);
        let (da, db) = (h.depth(a), h.depth(b));
        // an inside vertex snapped onto the plane may have a tiny negative
        // depth; clamping puts the crossing on that vertex
        let t = if da == db { T::zero() } else { da / (da - db) };
        t.max(T::zero()).min(T::one())
    };
    let mut arcs = Vec::new();
    let mut k = 1;
    while k <= n {
        let v = (anchor + k) % n;
        if out[v] {
            let start_edge = (v + n - 1) % n;
            let mut last = v;
            while out[(last + 1) % n] {
                last = (last + 1) % n;
                k += 1;
            }
            arcs.push(ArcSpec {
                loop_index,
                start: LoopPoint {
                    edge: start_edge,
                    param: crossing(start_edge),
                },
                end: LoopPoint {
                    edge: last,
                    param: crossing(last),
                },
            });
        }
        k += 1;
    }
    arcs.sort_by_key(|a| a.start.edge);
    Ok(arcs)
}

/// At most one outside arc. Whether that arc is unknotted is not checked.
pub fn singly_outside<T: Scalar>(lp: &PolyLoop<T>, h: &Halfspace<T>, tol: &Tolerance<T>) -> Result<bool, SurgeryError> {
    Ok(outside_arcs(lp, h, tol)?.len() <= 1)
}

/// Replaces the single outside arc, if any, by the segment joining its
/// crossings of the boundary plane.
pub fn clip_to_halfspace<T: Scalar>(lp: &PolyLoop<T>, h: &Halfspace<T>, tol: &Tolerance<T>) -> Result<PolyLoop<T>, SurgeryError> {
    let arcs = outside_arcs(lp, h, tol)?;
    match arcs.as_slice() {
        [] => Ok(lp.clone()),
        [arc] => replace_subarc(lp, arc, tol),
        _ => Err(SurgeryError::SeveralOutside(arcs.len())),
    }
}
