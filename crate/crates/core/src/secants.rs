//! Quadrisecant lines of polygonal links.
//!
//! A line with Plücker coordinates `(d, m)`, `m = p x d`, meets another line
//! `(d', m')` iff the side product `d . m' + d' . m` vanishes. The lines
//! meeting four given lines therefore satisfy four linear equations in the
//! six coordinates plus the quadratic relation `d . m = 0`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{Point3, PolyLink, Tolerance};
use crate::hull::{hull_depth_nudged, HullError};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SecantError {
    #[error("line has zero or non-finite direction")]
    BadLine,
    #[error("quadrisecant has fewer than 4 hits")]
    TooFewHits,
    #[error(transparent)]
    Hull(#[from] HullError),
}

/// Oriented line through `point` with unit `direction`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Line<T> {
    point: Point3<T>,
    direction: Point3<T>,
}

impl<T: Scalar> Line<T> {
    pub fn new(point: Point3<T>, direction: Point3<T>) -> Result<Self, SecantError> {
        if !point.is_finite() {
            return Err(SecantError::BadLine);
        }
        let d = direction.normalized().ok_or(SecantError::BadLine)?;
        Ok(Self { point, direction: d })
    }

    pub fn through(a: Point3<T>, b: Point3<T>) -> Result<Self, SecantError> {
        Self::new(a, b - a)
    }

    /// From Plücker coordinates; `None` for lines at infinity.
    pub fn from_pluecker(d: Point3<T>, m: Point3<T>) -> Option<Self> {
        let n2 = d.norm_squared();
        if !(n2 > T::zero()) || !n2.is_finite() {
            return None;
        }
        let point = d.cross(m) / n2;
        Some(Self {
            point,
            direction: d / n2.sqrt(),
        })
    }

    pub fn point(&self) -> Point3<T> {
        self.point
    }

    pub fn direction(&self) -> Point3<T> {
        self.direction
    }

    pub fn moment(&self) -> Point3<T> {
        self.point.cross(self.direction)
    }

    pub fn pluecker(&self) -> [T; 6] {
        let (d, m) = (self.direction, self.moment());
        [d.x, d.y, d.z, m.x, m.y, m.z]
    }

    /// Zero iff the lines are coplanar (meet or are parallel).
    pub fn side_product(&self, other: &Self) -> T {
        self.direction.dot(other.moment()) + other.direction.dot(self.moment())
    }

    pub fn at(&self, t: T) -> Point3<T> {
        self.point + self.direction * t
    }

    pub fn param_of(&self, p: Point3<T>) -> T {
        (p - self.point).dot(self.direction)
    }

    pub fn distance_to(&self, p: Point3<T>) -> T {
        (p - self.point).cross(self.direction).norm()
    }

    /// Point nearest the origin, direction with its first nonzero component
    /// positive.
    pub fn canonical(&self) -> Self {
        let d = self.direction;
        let flip = if d.x.abs() > T::lit(1e-12) {
            d.x < T::zero()
        } else if d.y.abs() > T::lit(1e-12) {
            d.y < T::zero()
        } else {
            d.z < T::zero()
        };
        let d = if flip { -d } else { d };
        Self {
            point: self.point - d * self.point.dot(d),
            direction: d,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Transversals<T> {
    pub lines: Vec<Line<T>>,
    /// Infinitely many transversals (e.g. concurrent or coplanar inputs).
    pub degenerate: bool,
    /// Discriminant of the reduced quadratic (negative: no real solution).
    pub discriminant: f64,
}

/// Relative pivot size below which a row counts as dependent.
const RANK_EPS: f64 = 1e-10;

/// Null space of a 4x6 system with unit rows; returns its basis when it is
/// exactly two dimensional.
fn null_space_2<T: Scalar>(rows: &[[T; 6]; 4]) -> Option<[[T; 6]; 2]> {
    let mut a = *rows;
    let mut cols = [0usize, 1, 2, 3, 4, 5];
    let eps = T::lit(RANK_EPS);
    for r in 0..4 {
        let (mut br, mut bc, mut bv) = (r, r, T::zero());
        for (i, row) in a.iter().enumerate().skip(r) {
            for (j, &v) in row.iter().enumerate().skip(r) {
                if v.abs() > bv {
                    (br, bc, bv) = (i, j, v.abs());
                }
            }
        }
        if bv <= eps {
            return None;
        }
        a.swap(r, br);
        for row in a.iter_mut() {
            row.swap(r, bc);
        }
        cols.swap(r, bc);
        let inv = T::one() / a[r][r];
        for v in a[r].iter_mut() {
            *v = *v * inv;
        }
        for i in 0..4 {
            if i != r {
                let f = a[i][r];
                if f != T::zero() {
                    for j in 0..6 {
                        a[i][j] = a[i][j] - f * a[r][j];
                    }
                }
            }
        }
    }
    let mut out = [[T::zero(); 6]; 2];
    for (k, free) in [4usize, 5].into_iter().enumerate() {
        let mut x = [T::zero(); 6];
        x[cols[free]] = T::one();
        for r in 0..4 {
            x[cols[r]] = -a[r][free];
        }
        let n = x.iter().map(|&v| v * v).sum::<T>().sqrt();
        out[k] = x.map(|v| v / n);
    }
    Some(out)
}

fn omega<T: Scalar>(x: &[T; 6], y: &[T; 6]) -> T {
    x[0] * y[3] + x[1] * y[4] + x[2] * y[5] + y[0] * x[3] + y[1] * x[4] + y[2] * x[5]
}

fn row_of<T: Scalar>(l: &Line<T>) -> [T; 6] {
    let (d, m) = (l.direction, l.moment());
    let r = [m.x, m.y, m.z, d.x, d.y, d.z];
    let n = r.iter().map(|&v| v * v).sum::<T>().sqrt();
    r.map(|v| v / n)
}

/// All lines meeting four given lines.
pub fn transversals_of_four_lines<T: Scalar>(lines: [&Line<T>; 4]) -> Transversals<T> {
    let rows = lines.map(row_of);
    solve_rows(&rows)
}

fn solve_rows<T: Scalar>(rows: &[[T; 6]; 4]) -> Transversals<T> {
    let Some([x, y]) = null_space_2(rows) else {
        return Transversals {
            lines: Vec::new(),
            degenerate: true,
            discriminant: f64::NAN,
        };
    };
    let (a, b, c) = (omega(&x, &x), omega(&x, &y), omega(&y, &y));
    let small = T::lit(1e-12);
    if a.abs() <= small && b.abs() <= small && c.abs() <= small {
        return Transversals {
            lines: Vec::new(),
            degenerate: true,
            discriminant: 0.0,
        };
    }
    let disc = b * b - a * c;
    let mut lines = Vec::new();
    if disc >= -small * small {
        let sq = disc.max(T::zero()).sqrt();
        let signs: &[T] = if sq <= small * small { &[T::one()] } else { &[T::one(), -T::one()] };
        for &s in signs {
            let (ca, cb) = if a.abs() >= c.abs() {
                ((-b + s * sq) / a, T::one())
            } else {
                (T::one(), (-b + s * sq) / c)
            };
            let v: [T; 6] = std::array::from_fn(|k| ca * x[k] + cb * y[k]);
            let d = Point3::new(v[0], v[1], v[2]);
            let m = Point3::new(v[3], v[4], v[5]);
            if let Some(l) = Line::from_pluecker(d, m) {
                lines.push(l);
            }
        }
    }
    Transversals {
        lines,
        degenerate: false,
        discriminant: disc.as_f64(),
    }
}

/// Interiority margin for edge hits.
pub const EPS_PARAM: f64 = 1e-7;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SecantHit<T> {
    pub loop_index: usize,
    pub edge_index: usize,
    pub edge_param: T,
    /// Arclength from the loop's first vertex.
    pub knot_param: T,
    pub line_param: T,
    pub point: Point3<T>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PatternNote {
    /// Hits lie on more than one component; see the component word.
    MultiComponent,
    /// Two hits share a knot position within tolerance.
    KnotParamTie,
    MoreThanFourHits,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrderPattern {
    /// Line positions (1-based) in knot order, rotated to start at 1.
    pub order: Vec<u8>,
    /// Component labels in line order, e.g. `ABAB`.
    pub component_word: String,
    pub alternating: bool,
    pub note: Option<PatternNote>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Quadrisecant<T> {
    pub line: Line<T>,
    /// Sorted by `line_param`; more than 4 when the line meets more edges.
    pub hits: Vec<SecantHit<T>>,
    pub pattern: OrderPattern,
}

impl<T: Scalar> Quadrisecant<T> {
    /// Segment between the second and third hits in line order.
    pub fn midsegment(&self) -> (Point3<T>, Point3<T>) {
        (self.hits[1].point, self.hits[2].point)
    }

    pub fn alternating(&self) -> bool {
        self.pattern.alternating
    }

    /// Largest distance from hits 2 and 3 to the line through hits 1 and 4.
    pub fn collinearity_residual(&self) -> T {
        let (a, b) = (self.hits[0].point, self.hits[self.hits.len() - 1].point);
        let Ok(l) = Line::through(a, b) else {
            return T::infinity();
        };
        self.hits[1..self.hits.len() - 1]
            .iter()
            .map(|h| l.distance_to(h.point))
            .fold(T::zero(), T::max)
    }
}

/// Pattern of hits sorted by line position.
pub fn classify_order<T: Scalar>(
    hits: &[SecantHit<T>],
    labels: &dyn Fn(usize) -> String,
    tol: &Tolerance<T>,
) -> Result<OrderPattern, SecantError> {
    if hits.len() < 4 {
        return Err(SecantError::TooFewHits);
    }
    let component_word: String = hits.iter().map(|h| labels(h.loop_index)).collect();
    let single = hits.iter().all(|h| h.loop_index == hits[0].loop_index);
    let mut by_knot: Vec<usize> = (0..hits.len()).collect();
    by_knot.sort_by(|&i, &j| {
        (hits[i].loop_index, hits[i].knot_param)
            .partial_cmp(&(hits[j].loop_index, hits[j].knot_param))
            .expect("finite params")
    });
    let tie = by_knot.windows(2).any(|w| {
        let (a, b) = (&hits[w[0]], &hits[w[1]]);
        a.loop_index == b.loop_index && (a.knot_param - b.knot_param).abs() <= tol.eps_abs()
    });
    let start = by_knot.iter().position(|&i| i == 0).expect("position 1 present");
    let order: Vec<u8> = (0..by_knot.len())
        .map(|k| (by_knot[(start + k) % by_knot.len()] + 1) as u8)
        .collect();
    let (alternating, note) = if !single {
        (false, Some(PatternNote::MultiComponent))
    } else if tie {
        (false, Some(PatternNote::KnotParamTie))
    } else if hits.len() > 4 {
        (false, Some(PatternNote::MoreThanFourHits))
    } else {
        (matches!(order.as_slice(), [1, 3, 2, 4] | [1, 4, 2, 3]), None)
    };
    Ok(OrderPattern {
        order,
        component_word,
        alternating,
        note,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UnstableReason {
    /// A hit lies within the interiority margin of an edge endpoint.
    VertexGrazing,
    /// Two hits coincide along the line.
    CoincidentHits,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UnstableSecant<T> {
    pub line: Line<T>,
    /// Global edge indices of the quadruple.
    pub edges: [usize; 4],
    pub reason: UnstableReason,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SecantDiagnostics {
    pub quadruples: u64,
    /// Quadruples whose transversal family is infinite.
    pub degenerate: u64,
    /// Quadruples without a real transversal.
    pub no_real: u64,
    /// Candidate lines missing at least one segment.
    pub missed: u64,
    /// Candidate lines through a vertex shared by two edges of the quadruple.
    pub through_vertex: u64,
    /// Accepted lines merged into an existing record.
    pub merged: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadrisecantReport<T> {
    pub quadrisecants: Vec<Quadrisecant<T>>,
    pub unstable: Vec<UnstableSecant<T>>,
    pub diagnostics: SecantDiagnostics,
}

struct EdgeInfo<T> {
    loop_index: usize,
    local: usize,
    start_vertex: usize,
    end_vertex: usize,
    a: Point3<T>,
    b: Point3<T>,
    row: [T; 6],
    knot_start: T,
    lo: Point3<T>,
    hi: Point3<T>,
}

enum HitTest<T> {
    Inside(T),
    /// Near the start (`false`) or end (`true`) vertex.
    Grazing(bool),
    Miss,
}

/// Parameter along `a -> b` of its meeting point with `line`.
fn edge_hit<T: Scalar>(line: &Line<T>, a: Point3<T>, b: Point3<T>, dist_tol: T) -> HitTest<T> {
    let e = b - a;
    let d = line.direction;
    let w = a - line.point;
    let (ee, ed, dd) = (e.dot(e), e.dot(d), T::one());
    let denom = ee * dd - ed * ed;
    if denom <= T::lit(1e-14) * ee {
        return HitTest::Miss;
    }
    let s = (ed * w.dot(d) - dd * w.dot(e)) / denom;
    let gap = line.distance_to(a + e * s);
    if gap > dist_tol {
        return HitTest::Miss;
    }
    let margin = T::lit(EPS_PARAM);
    if s > margin && s < T::one() - margin {
        HitTest::Inside(s)
    } else if s >= -margin && s <= T::one() + margin {
        HitTest::Grazing(s > T::lit(0.5))
    } else {
        HitTest::Miss
    }
}

enum Candidate<T> {
    Found(Line<T>, [(usize, T); 4]),
    Unstable(UnstableSecant<T>),
}

/// Enumerates the quadrisecants whose four hits are interior to distinct
/// edges.
///
/// Every 4-subset of edges is solved in coordinates centered on the link's
/// centroid. Lines found from several subsets (lines meeting five or more
/// edges) are merged into one record carrying all their hits.
pub fn quadrisecants<T: Scalar>(link: &PolyLink<T>, tol: &Tolerance<T>) -> QuadrisecantReport<T> {
    let c = link.centroid();
    let diam = tol.diameter();
    let mut edges = Vec::new();
    let mut base = 0;
    for (li, lp) in link.loops().iter().enumerate() {
        let cum = lp.cumulative_lengths();
        let m = lp.len();
        for k in 0..m {
            let (a, b) = lp.edge(k);
            let (a0, b0) = (a - c, b - c);
            let Ok(l) = Line::through(a0, b0) else { continue };
            edges.push(EdgeInfo {
                loop_index: li,
                local: k,
                start_vertex: base + k,
                end_vertex: base + (k + 1) % m,
                a,
                b,
                row: row_of(&l),
                knot_start: cum[k],
                lo: a0.component_min(b0),
                hi: a0.component_max(b0),
            });
        }
        base += m;
    }
    let ne = edges.len();
    let dist_tol = T::lit(1e-9) * diam;
    let slack = T::lit(1e-9) * diam;

    let per_first: Vec<(Vec<Candidate<T>>, SecantDiagnostics)> = (0..ne)
        .into_par_iter()
        .map(|i| {
            let mut out = Vec::new();
            let mut diag = SecantDiagnostics::default();
            for j in (i + 1)..ne {
                for k in (j + 1)..ne {
                    for l in (k + 1)..ne {
                        diag.quadruples += 1;
                        let quad = [i, j, k, l];
                        let rows = quad.map(|q| edges[q].row);
                        let t = solve_rows(&rows);
                        if t.degenerate {
                            diag.degenerate += 1;
                            continue;
                        }
                        if t.lines.is_empty() {
                            diag.no_real += 1;
                            continue;
                        }
                        for line in t.lines {
                            if !quad.iter().all(|&q| box_reachable(&line, &edges[q], slack)) {
                                diag.missed += 1;
                                continue;
                            }
                            let mut params = [(0usize, T::zero()); 4];
                            let mut grazed: Vec<usize> = Vec::new();
                            let mut missed = false;
                            for (slot, &q) in quad.iter().enumerate() {
                                let e = &edges[q];
                                match edge_hit(&line, e.a - c, e.b - c, dist_tol) {
                                    HitTest::Inside(s) => params[slot] = (q, s),
                                    HitTest::Grazing(end) => grazed.push(if end { e.end_vertex } else { e.start_vertex }),
                                    HitTest::Miss => missed = true,
                                }
                            }
                            let grazing = !grazed.is_empty();
                            grazed.sort_unstable();
                            let shared = grazed.windows(2).any(|w| w[0] == w[1]);
                            let world = Line {
                                point: line.point + c,
                                direction: line.direction,
                            };
                            if missed {
                                diag.missed += 1;
                            } else if shared {
                                // two edges meeting at one vertex: a single hit there
                                diag.through_vertex += 1;
                            } else if grazing {
                                out.push(Candidate::Unstable(UnstableSecant {
                                    line: world.canonical(),
                                    edges: quad,
                                    reason: UnstableReason::VertexGrazing,
                                }));
                            } else {
                                out.push(Candidate::Found(world, params));
                            }
                        }
                    }
                }
            }
            (out, diag)
        })
        .collect();

    let mut diagnostics = SecantDiagnostics::default();
    let mut found: Vec<(Line<T>, Vec<(usize, T)>)> = Vec::new();
    let mut unstable = Vec::new();
    for (cands, d) in per_first {
        diagnostics.quadruples += d.quadruples;
        diagnostics.degenerate += d.degenerate;
        diagnostics.no_real += d.no_real;
        diagnostics.missed += d.missed;
        diagnostics.through_vertex += d.through_vertex;
        for cand in cands {
            match cand {
                Candidate::Unstable(u) => {
                    if !unstable.iter().any(|v: &UnstableSecant<T>| same_line(&v.line, &u.line, diam)) {
                        unstable.push(u);
                    }
                }
                Candidate::Found(line, params) => {
                    let canon = line.canonical();
                    if let Some(slot) = found.iter_mut().find(|(l, _)| same_line(l, &canon, diam)) {
                        diagnostics.merged += 1;
                        for p in params {
                            if !slot.1.iter().any(|q| q.0 == p.0) {
                                slot.1.push(p);
                            }
                        }
                    } else {
                        found.push((canon, params.to_vec()));
                    }
                }
            }
        }
    }

    let labels = |i: usize| link.label(i);
    let mut quadrisecants = Vec::new();
    for (line, params) in found {
        let mut hits: Vec<SecantHit<T>> = params
            .iter()
            .map(|&(q, s)| {
                let e = &edges[q];
                let point = e.a + (e.b - e.a) * s;
                SecantHit {
                    loop_index: e.loop_index,
                    edge_index: e.local,
                    edge_param: s,
                    knot_param: e.knot_start + (e.b - e.a).norm() * s,
                    line_param: line.param_of(point),
                    point,
                }
            })
            .collect();
        hits.sort_by(|a, b| a.line_param.partial_cmp(&b.line_param).expect("finite"));
        let coincident = hits
            .windows(2)
            .any(|w| (w[1].line_param - w[0].line_param).abs() <= tol.eps_abs());
        if coincident {
            let mut ids = [0usize; 4];
            for (slot, p) in ids.iter_mut().zip(&params) {
                *slot = p.0;
            }
            unstable.push(UnstableSecant {
                line,
                edges: ids,
                reason: UnstableReason::CoincidentHits,
            });
            continue;
        }
        let pattern = classify_order(&hits, &labels, tol).expect("four hits");
        quadrisecants.push(Quadrisecant { line, hits, pattern });
    }
    QuadrisecantReport {
        quadrisecants,
        unstable,
        diagnostics,
    }
}

/// Cheap rejection: the line must pass within `slack` of the edge's box.
fn box_reachable<T: Scalar>(line: &Line<T>, e: &EdgeInfo<T>, slack: T) -> bool {
    let mid = (e.lo + e.hi) * T::lit(0.5);
    let half = (e.hi - e.lo) * T::lit(0.5);
    let r = half.norm() + slack;
    line.distance_to(mid) <= r
}

fn same_line<T: Scalar>(a: &Line<T>, b: &Line<T>, diam: T) -> bool {
    let tol = T::lit(1e-7);
    (a.direction - b.direction).norm() <= tol && (a.point - b.point).norm() <= tol * diam
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MidsegmentCheck<T> {
    pub passed: bool,
    /// Sample points with their exact depths.
    pub samples: Vec<(Point3<T>, usize)>,
}

/// Checks that `k_samples` evenly spaced interior points of the mid-segment
/// have depth at least 2.
pub fn midsegment_depth_check<T: Scalar>(
    q: &Quadrisecant<T>,
    link: &PolyLink<T>,
    k_samples: usize,
    tol: &Tolerance<T>,
) -> Result<MidsegmentCheck<T>, SecantError> {
    let (a, b) = q.midsegment();
    let samples: Vec<(Point3<T>, usize)> = (0..k_samples)
        .into_par_iter()
        .map(|i| {
            let t = T::from_usize_lossy(i + 1) / T::from_usize_lossy(k_samples + 1);
            let p = a.lerp(b, t);
            Ok((p, hull_depth_nudged(p, link, tol)?))
        })
        .collect::<Result<_, HullError>>()?;
    Ok(MidsegmentCheck {
        passed: samples.iter().all(|s| s.1 >= 2),
        samples,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::geometry::PolyLoop;
    use crate::sampling;

    fn tol1() -> Tolerance<f64> {
        Tolerance::new(1e-9, 1.0).unwrap()
    }

    #[test]
    fn concurrent_lines_are_degenerate() {
        let ls: Vec<Line<f64>> = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0], [1.0, 1.0, 1.0]]
            .iter()
            .map(|&d| Line::new(Point3::zero(), Point3::from_array(d)).unwrap())
            .collect();
        let t = transversals_of_four_lines([&ls[0], &ls[1], &ls[2], &ls[3]]);
        assert!(t.degenerate);
    }

    #[test]
    fn random_lines_residuals() {
        let mut rng = sampling::rng(21);
        let mut solved = 0;
        let mut empty = 0;
        for _ in 0..200 {
            let ls: Vec<Line<f64>> = (0..4)
                .map(|_| {
                    let p = sampling::ball_point(&mut rng, 1.0);
                    Line::new(p, sampling::unit_vector(&mut rng)).unwrap()
                })
                .collect();
            let t = transversals_of_four_lines([&ls[0], &ls[1], &ls[2], &ls[3]]);
            assert!(!t.degenerate);
            if t.lines.is_empty() {
                assert!(t.discriminant < 0.0);
                empty += 1;
            }
            for l in &t.lines {
                solved += 1;
                for m in &ls {
                    assert!(l.side_product(m).abs() < 1e-9);
                }
            }
        }
        assert!(solved > 0 && empty > 0);
    }

    #[test]
    fn pluecker_relation_holds() {
        let l = Line::<f64>::new(Point3::new(1.0, 2.0, 3.0), Point3::new(0.3, -0.2, 0.9)).unwrap();
        let p = l.pluecker();
        assert!((p[0] * p[3] + p[1] * p[4] + p[2] * p[5]).abs() < 1e-12);
        let back = Line::from_pluecker(l.direction(), l.moment()).unwrap();
        assert!(back.distance_to(l.point()) < 1e-12);
    }

    fn hit(line_pos: usize, knot: f64, loop_index: usize) -> SecantHit<f64> {
        SecantHit {
            loop_index,
            edge_index: 0,
            edge_param: 0.5,
            knot_param: knot,
            line_param: line_pos as f64,
            point: Point3::new(line_pos as f64, 0.0, 0.0),
        }
    }

    #[test]
    fn order_classification() {
        let lab = |i: usize| crate::geometry::default_label(i);
        // knot order visits line positions 1, 3, 2, 4
        let h = [hit(1, 0.0, 0), hit(2, 2.0, 0), hit(3, 1.0, 0), hit(4, 3.0, 0)];
        let p = classify_order(&h, &lab, &tol1()).unwrap();
        assert_eq!(p.order, vec![1, 3, 2, 4]);
        assert!(p.alternating);
        let h = [hit(1, 0.0, 0), hit(2, 1.0, 0), hit(3, 2.0, 0), hit(4, 3.0, 0)];
        let p = classify_order(&h, &lab, &tol1()).unwrap();
        assert!(!p.alternating);
        assert_eq!(p.component_word, "AAAA");
        let h = [hit(1, 0.0, 0), hit(2, 0.0, 1), hit(3, 1.0, 0), hit(4, 1.0, 1)];
        let p = classify_order(&h, &lab, &tol1()).unwrap();
        assert_eq!(p.component_word, "ABAB");
        assert_eq!(p.note, Some(PatternNote::MultiComponent));
        assert!(!p.alternating);
    }

    #[test]
    fn reversal_conjugates_order() {
        let lab = |i: usize| crate::geometry::default_label(i);
        let fwd = [hit(1, 0.0, 0), hit(2, 2.0, 0), hit(3, 1.0, 0), hit(4, 3.0, 0)];
        let rev: Vec<_> = fwd.iter().map(|h| SecantHit { knot_param: 10.0 - h.knot_param, ..*h }).collect();
        let a = classify_order(&fwd, &lab, &tol1()).unwrap();
        let b = classify_order(&rev, &lab, &tol1()).unwrap();
        assert_eq!(a.alternating, b.alternating);
        let mut back = b.order.clone();
        back[1..].reverse();
        assert_eq!(back, a.order);
    }

    #[test]
    fn convex_polygon_has_none() {
        let l = PolyLink::single(PolyLoop::new(
            (0..12)
                .map(|k| {
                    let t = std::f64::consts::TAU * k as f64 / 12.0;
                    Point3::new(t.cos(), t.sin(), 0.0)
                })
                .collect(),
        ));
        let tol = Tolerance::for_link(&l);
        assert!(quadrisecants(&l, &tol).quadrisecants.is_empty());
    }

    #[test]
    fn small_trefoil_has_alternating() {
        let k = fixtures::trefoil::<f64>(24).unwrap().link;
        let tol = Tolerance::for_link(&k);
        let r = quadrisecants(&k, &tol);
        assert!(r.quadrisecants.iter().any(|q| q.alternating()));
        for q in &r.quadrisecants {
            assert!(q.collinearity_residual() <= 1e-9 * tol.diameter());
        }
    }
}
