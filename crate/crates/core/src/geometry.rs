//! Points, planes, half-spaces, affine maps, polygonal links and the
//! shared tolerance policy.
//!
//! All predicates are tolerance based: a signed distance whose magnitude is
//! at most `eps_abs` is snapped to zero. `eps_abs` is derived from the
//! bounding-box diameter of the link under study, so every module that is
//! handed the same [`Tolerance`] agrees on which vertices lie in a plane.

use std::ops::{Add, AddAssign, Div, Index, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    #[error("non-finite coordinate")]
    NonFinite,
    #[error("normal vector is too short to normalize (|n| = {0})")]
    ZeroNormal(f64),
    #[error("relative tolerance must be positive and finite, got {0}")]
    InvalidTolerance(f64),
    #[error("affine map has non-finite entries")]
    NonFiniteMap,
    #[error("affine map is singular (det = {0})")]
    SingularMap(f64),
}

/// A point or free vector in 3-space.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point3<T> {
    pub x: T,
    pub y: T,
    pub z: T,
}

impl<T: Scalar> Point3<T> {
    #[inline]
    pub fn new(x: T, y: T, z: T) -> Self {
        Self { x, y, z }
    }

    #[inline]
    pub fn zero() -> Self {
        Self::new(T::zero(), T::zero(), T::zero())
    }

    pub fn from_f64(x: f64, y: f64, z: f64) -> Self {
        Self::new(T::lit(x), T::lit(y), T::lit(z))
    }

    pub fn from_array(a: [T; 3]) -> Self {
        Self::new(a[0], a[1], a[2])
    }

    pub fn to_array(self) -> [T; 3] {
        [self.x, self.y, self.z]
    }

    #[inline]
    pub fn dot(self, other: Self) -> T {
        self.x * other.x + self.y * other.y + self.z * other.z
    }

    #[inline]
    pub fn cross(self, other: Self) -> Self {
        Self::new(
            self.y * other.z - self.z * other.y,
            self.z * other.x - self.x * other.z,
            self.x * other.y - self.y * other.x,
        )
    }

    #[inline]
    pub fn norm_squared(self) -> T {
        self.dot(self)
    }

    #[inline]
    pub fn norm(self) -> T {
        self.norm_squared().sqrt()
    }

    /// Unit vector in the same direction, or `None` when `|self|` is below
    /// the scalar's normalization threshold.
    pub fn normalized(self) -> Option<Self> {
        let n = self.norm();
        if n.is_finite() && n > T::lit(T::NORMAL_EPS) {
            Some(self / n)
        } else {
            None
        }
    }

    pub fn distance(self, other: Self) -> T {
        (self - other).norm()
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    pub fn lerp(self, other: Self, t: T) -> Self {
        self + (other - self) * t
    }

    pub fn midpoint(self, other: Self) -> Self {
        self.lerp(other, T::lit(0.5))
    }

    /// Angle between two vectors in `[0, pi]`, computed with `atan2` so that
    /// nearly parallel and nearly antiparallel inputs keep their precision.
    pub fn angle_to(self, other: Self) -> T {
        self.cross(other).norm().atan2(self.dot(other))
    }

    /// Some unit vector orthogonal to `self` (which must be nonzero).
    pub fn any_orthogonal(self) -> Self {
        let (ax, ay, az) = (self.x.abs(), self.y.abs(), self.z.abs());
        let axis = if ax <= ay && ax <= az {
            Self::new(T::one(), T::zero(), T::zero())
        } else if ay <= az {
            Self::new(T::zero(), T::one(), T::zero())
        } else {
            Self::new(T::zero(), T::zero(), T::one())
        };
        let v = self.cross(axis);
        v / v.norm()
    }

    pub fn component_min(self, other: Self) -> Self {
        Self::new(self.x.min(other.x), self.y.min(other.y), self.z.min(other.z))
    }

    pub fn component_max(self, other: Self) -> Self {
        Self::new(self.x.max(other.x), self.y.max(other.y), self.z.max(other.z))
    }

    pub fn cast<U: Scalar>(self) -> Point3<U> {
        Point3::new(
            U::lit(self.x.as_f64()),
            U::lit(self.y.as_f64()),
            U::lit(self.z.as_f64()),
        )
    }
}

impl<T: Scalar> Add for Point3<T> {
    type Output = Self;
    #[inline]
    fn add(self, o: Self) -> Self {
        Self::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl<T: Scalar> AddAssign for Point3<T> {
    #[inline]
    fn add_assign(&mut self, o: Self) {
        *self = *self + o;
    }
}

impl<T: Scalar> Sub for Point3<T> {
    type Output = Self;
    #[inline]
    fn sub(self, o: Self) -> Self {
        Self::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl<T: Scalar> Neg for Point3<T> {
    type Output = Self;
    #[inline]
    fn neg(self) -> Self {
        Self::new(-self.x, -self.y, -self.z)
    }
}

impl<T: Scalar> Mul<T> for Point3<T> {
    type Output = Self;
    #[inline]
    fn mul(self, s: T) -> Self {
        Self::new(self.x * s, self.y * s, self.z * s)
    }
}

impl<T: Scalar> Div<T> for Point3<T> {
    type Output = Self;
    #[inline]
    fn div(self, s: T) -> Self {
        Self::new(self.x / s, self.y / s, self.z / s)
    }
}

impl<T> Index<usize> for Point3<T> {
    type Output = T;
    fn index(&self, i: usize) -> &T {
        match i {
            0 => &self.x,
            1 => &self.y,
            2 => &self.z,
            _ => panic!("Point3 index {i} out of range"),
        }
    }
}

/// Position of a point relative to an oriented plane, after snapping.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sign {
    Below,
    On,
    Above,
}

impl Sign {
    pub fn from_value<T: Scalar>(value: T, eps_abs: T) -> Self {
        if value.abs() <= eps_abs {
            Sign::On
        } else if value > T::zero() {
            Sign::Above
        } else {
            Sign::Below
        }
    }

    pub fn flipped(self) -> Self {
        match self {
            Sign::Below => Sign::Above,
            Sign::On => Sign::On,
            Sign::Above => Sign::Below,
        }
    }

    pub fn as_i8(self) -> i8 {
        match self {
            Sign::Below => -1,
            Sign::On => 0,
            Sign::Above => 1,
        }
    }
}

/// Oriented plane `{x : normal . x = offset}` with a unit normal.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Plane<T> {
    normal: Point3<T>,
    offset: T,
}

impl<T: Scalar> Plane<T> {
    /// Builds a plane from any nonzero normal; normal and offset are both
    /// rescaled so the stored normal has unit length.
    pub fn new(normal: Point3<T>, offset: T) -> Result<Self, GeometryError> {
        if !normal.is_finite() || !offset.is_finite() {
            return Err(GeometryError::NonFinite);
        }
        let len = normal.norm();
        if len < T::lit(T::NORMAL_EPS) {
            return Err(GeometryError::ZeroNormal(len.as_f64()));
        }
        Ok(Self {
            normal: normal / len,
            offset: offset / len,
        })
    }

    /// The plane through `point` with the given normal.
    pub fn through(point: Point3<T>, normal: Point3<T>) -> Result<Self, GeometryError> {
        let unit = Self::new(normal, T::zero())?.normal;
        if !point.is_finite() {
            return Err(GeometryError::NonFinite);
        }
        Ok(Self {
            normal: unit,
            offset: unit.dot(point),
        })
    }

    /// Only for normals already known to be unit length.
    pub(crate) fn from_unit(normal: Point3<T>, offset: T) -> Self {
        Self { normal, offset }
    }

    pub fn normal(&self) -> Point3<T> {
        self.normal
    }

    pub fn offset(&self) -> T {
        self.offset
    }

    #[inline]
    pub fn signed_distance(&self, p: Point3<T>) -> T {
        self.normal.dot(p) - self.offset
    }

    pub fn flipped(&self) -> Self {
        Self {
            normal: -self.normal,
            offset: -self.offset,
        }
    }
}

/// Which side of its boundary plane an open half-space occupies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Above,
    Below,
}

/// Open half-space bounded by `plane`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Halfspace<T> {
    pub plane: Plane<T>,
    pub side: Side,
}

impl<T: Scalar> Halfspace<T> {
    pub fn new(plane: Plane<T>, side: Side) -> Self {
        Self { plane, side }
    }

    /// Signed distance measured positive into the half-space.
    pub fn depth(&self, p: Point3<T>) -> T {
        let d = self.plane.signed_distance(p);
        match self.side {
            Side::Above => d,
            Side::Below => -d,
        }
    }

    /// Snapped position: `Above` means inside, `On` the boundary, `Below`
    /// strictly outside the closure.
    pub fn classify(&self, p: Point3<T>, tol: &Tolerance<T>) -> Sign {
        Sign::from_value(self.depth(p), tol.eps_abs())
    }
}

/// The snapping policy: `eps_abs = eps_rel * diameter`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerance<T> {
    eps_rel: T,
    eps_abs: T,
}

impl<T: Scalar> Tolerance<T> {
    /// Tolerance for a scene of the given bounding-box diameter.
    pub fn new(eps_rel: T, diameter: T) -> Result<Self, GeometryError> {
        if !(eps_rel.is_finite() && eps_rel > T::zero()) {
            return Err(GeometryError::InvalidTolerance(eps_rel.as_f64()));
        }
        if !diameter.is_finite() {
            return Err(GeometryError::NonFinite);
        }
        let scale = if diameter > T::zero() { diameter } else { T::one() };
        Ok(Self {
            eps_rel,
            eps_abs: eps_rel * scale,
        })
    }

    /// Default relative tolerance scaled to `link`.
    pub fn for_link(link: &PolyLink<T>) -> Self {
        Self::with_rel(link, T::lit(T::DEFAULT_EPS_REL)).expect("default tolerance is valid")
    }

    pub fn with_rel(link: &PolyLink<T>, eps_rel: T) -> Result<Self, GeometryError> {
        Self::new(eps_rel, link.diameter())
    }

    pub fn eps_rel(&self) -> T {
        self.eps_rel
    }

    pub fn eps_abs(&self) -> T {
        self.eps_abs
    }

    /// Diameter this tolerance was scaled to.
    pub fn diameter(&self) -> T {
        self.eps_abs / self.eps_rel
    }
}

/// `x -> linear * x + translation`, with `linear` stored row-major.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AffineMap<T> {
    pub linear: [[T; 3]; 3],
    pub translation: Point3<T>,
}

impl<T: Scalar> AffineMap<T> {
    pub fn new(linear: [[T; 3]; 3], translation: Point3<T>) -> Result<Self, GeometryError> {
        let finite = linear.iter().flatten().all(|v| v.is_finite()) && translation.is_finite();
        if !finite {
            return Err(GeometryError::NonFiniteMap);
        }
        Ok(Self {
            linear,
            translation,
        })
    }

    pub fn identity() -> Self {
        let (o, z) = (T::one(), T::zero());
        Self {
            linear: [[o, z, z], [z, o, z], [z, z, o]],
            translation: Point3::zero(),
        }
    }

    pub fn scaling(s: T) -> Self {
        let z = T::zero();
        Self {
            linear: [[s, z, z], [z, s, z], [z, z, s]],
            translation: Point3::zero(),
        }
    }

    pub fn translation(t: Point3<T>) -> Self {
        Self {
            translation: t,
            ..Self::identity()
        }
    }

    pub fn apply(&self, p: Point3<T>) -> Point3<T> {
        let m = &self.linear;
        Point3::new(
            m[0][0] * p.x + m[0][1] * p.y + m[0][2] * p.z,
            m[1][0] * p.x + m[1][1] * p.y + m[1][2] * p.z,
            m[2][0] * p.x + m[2][1] * p.y + m[2][2] * p.z,
        ) + self.translation
    }

    pub fn determinant(&self) -> T {
        let m = &self.linear;
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
            - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    }

    /// Whether `|det|` clears the normalization threshold relative to the
    /// cube of the largest entry.
    pub fn is_invertible(&self) -> bool {
        let scale = self
            .linear
            .iter()
            .flatten()
            .fold(T::zero(), |acc, v| acc.max(v.abs()));
        scale > T::zero()
            && self.determinant().abs() > T::lit(T::NORMAL_EPS) * scale * scale * scale
    }

    pub fn inverse(&self) -> Result<Self, GeometryError> {
        if !self.is_invertible() {
            return Err(GeometryError::SingularMap(self.determinant().as_f64()));
        }
        let m = &self.linear;
        let det = self.determinant();
        let cof = |r0: usize, r1: usize, c0: usize, c1: usize| {
            m[r0][c0] * m[r1][c1] - m[r0][c1] * m[r1][c0]
        };
        let inv = [
            [cof(1, 2, 1, 2) / det, -cof(0, 2, 1, 2) / det, cof(0, 1, 1, 2) / det],
            [-cof(1, 2, 0, 2) / det, cof(0, 2, 0, 2) / det, -cof(0, 1, 0, 2) / det],
            [cof(1, 2, 0, 1) / det, -cof(0, 2, 0, 1) / det, cof(0, 1, 0, 1) / det],
        ];
        let linear_only = Self {
            linear: inv,
            translation: Point3::zero(),
        };
        let t = -linear_only.apply(self.translation);
        Ok(Self {
            linear: inv,
            translation: t,
        })
    }

    /// `self` after `first`.
    pub fn compose(&self, first: &Self) -> Self {
        let a = &self.linear;
        let b = &first.linear;
        let mut linear = [[T::zero(); 3]; 3];
        for (i, row) in linear.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                *cell = a[i][0] * b[0][j] + a[i][1] * b[1][j] + a[i][2] * b[2][j];
            }
        }
        let translation = self.apply(first.translation);
        Self {
            linear,
            translation,
        }
    }
}

/// Closed polygon; the last vertex connects back to the first.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolyLoop<T> {
    vertices: Vec<Point3<T>>,
}

impl<T: Scalar> PolyLoop<T> {
    /// Wraps a vertex list without checking it; run [`validate`] on the
    /// containing link before relying on the loop invariants.
    pub fn new(vertices: Vec<Point3<T>>) -> Self {
        Self { vertices }
    }

    pub fn vertices(&self) -> &[Point3<T>] {
        &self.vertices
    }

    pub fn into_vertices(self) -> Vec<Point3<T>> {
        self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// Vertex `i` taken cyclically.
    #[inline]
    pub fn vertex(&self, i: usize) -> Point3<T> {
        self.vertices[i % self.vertices.len()]
    }

    /// Edge `i` runs from vertex `i` to vertex `i + 1` (cyclically).
    pub fn edge(&self, i: usize) -> (Point3<T>, Point3<T>) {
        (self.vertex(i), self.vertex(i + 1))
    }

    pub fn edges(&self) -> impl Iterator<Item = (Point3<T>, Point3<T>)> + '_ {
        (0..self.vertices.len()).map(move |i| self.edge(i))
    }

    pub fn length(&self) -> T {
        self.edges().map(|(a, b)| a.distance(b)).sum()
    }

    /// Arclength from vertex 0 to the start of each edge, plus the total
    /// length as the final entry.
    pub fn cumulative_lengths(&self) -> Vec<T> {
        let mut out = Vec::with_capacity(self.len() + 1);
        let mut acc = T::zero();
        out.push(acc);
        for (a, b) in self.edges() {
            acc = acc + a.distance(b);
            out.push(acc);
        }
        out
    }

    pub fn reversed(&self) -> Self {
        let mut v = self.vertices.clone();
        v.reverse();
        Self::new(v)
    }

    /// Same cycle starting at vertex `shift`.
    pub fn rotated(&self, shift: usize) -> Self {
        let mut v = self.vertices.clone();
        if !v.is_empty() {
            let k = shift % v.len();
            v.rotate_left(k);
        }
        Self::new(v)
    }

    pub fn point_at(&self, edge: usize, param: T) -> Point3<T> {
        let (a, b) = self.edge(edge);
        a.lerp(b, param)
    }
}

/// One or more closed loops, optionally labelled.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolyLink<T> {
    loops: Vec<PolyLoop<T>>,
    labels: Option<Vec<String>>,
}

impl<T: Scalar> PolyLink<T> {
    pub fn new(loops: Vec<PolyLoop<T>>) -> Self {
        Self {
            loops,
            labels: None,
        }
    }

    pub fn single(lp: PolyLoop<T>) -> Self {
        Self::new(vec![lp])
    }

    /// Attaches labels; ignored unless there is exactly one per loop.
    pub fn with_labels(mut self, labels: Vec<String>) -> Self {
        if labels.len() == self.loops.len() {
            self.labels = Some(labels);
        }
        self
    }

    pub fn loops(&self) -> &[PolyLoop<T>] {
        &self.loops
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    /// Label of loop `i`, falling back to `A`, `B`, ... by position.
    pub fn label(&self, i: usize) -> String {
        match &self.labels {
            Some(l) => l[i].clone(),
            None => default_label(i),
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.loops.iter().map(PolyLoop::len).sum()
    }

    pub fn vertices(&self) -> impl Iterator<Item = Point3<T>> + '_ {
        self.loops.iter().flat_map(|l| l.vertices().iter().copied())
    }

    pub fn edges(&self) -> impl Iterator<Item = (Point3<T>, Point3<T>)> + '_ {
        self.loops.iter().flat_map(PolyLoop::edges)
    }

    /// Axis-aligned bounding box, `None` for a link without vertices.
    pub fn bounding_box(&self) -> Option<(Point3<T>, Point3<T>)> {
        let mut it = self.vertices();
        let first = it.next()?;
        Some(it.fold((first, first), |(lo, hi), p| {
            (lo.component_min(p), hi.component_max(p))
        }))
    }

    /// Length of the bounding-box diagonal.
    pub fn diameter(&self) -> T {
        self.bounding_box()
            .map(|(lo, hi)| (hi - lo).norm())
            .unwrap_or_else(T::zero)
    }

    pub fn centroid(&self) -> Point3<T> {
        let n = self.vertex_count().max(1);
        let sum = self.vertices().fold(Point3::zero(), |a, p| a + p);
        sum / T::from_usize_lossy(n)
    }

    /// Euclidean distance from `p` to the nearest point of the link.
    pub fn distance_to(&self, p: Point3<T>) -> T {
        self.edges()
            .map(|(a, b)| point_segment_distance(p, a, b))
            .fold(T::infinity(), T::min)
    }

    /// Points closer to the link than `eps_abs` count as lying on it.
    pub fn touches(&self, p: Point3<T>, tol: &Tolerance<T>) -> bool {
        self.distance_to(p) <= tol.eps_abs()
    }

    pub fn map_vertices(&self, mut f: impl FnMut(Point3<T>) -> Point3<T>) -> Self {
        Self {
            loops: self
                .loops
                .iter()
                .map(|l| PolyLoop::new(l.vertices().iter().map(|&p| f(p)).collect()))
                .collect(),
            labels: self.labels.clone(),
        }
    }

    /// Union of two links, keeping loop order `self` then `other`.
    pub fn union(&self, other: &Self) -> Self {
        let mut loops = self.loops.clone();
        loops.extend(other.loops.iter().cloned());
        let labels = match (&self.labels, &other.labels) {
            (Some(a), Some(b)) => {
                let mut l = a.clone();
                l.extend(b.iter().cloned());
                Some(l)
            }
            _ => None,
        };
        Self { loops, labels }
    }

    pub fn cast<U: Scalar>(&self) -> PolyLink<U> {
        PolyLink {
            loops: self
                .loops
                .iter()
                .map(|l| PolyLoop::new(l.vertices().iter().map(|p| p.cast()).collect()))
                .collect(),
            labels: self.labels.clone(),
        }
    }
}

pub(crate) fn default_label(i: usize) -> String {
    let mut s = String::new();
    let mut k = i;
    loop {
        s.insert(0, (b'A' + (k % 26) as u8) as char);
        if k < 26 {
            break;
        }
        k = k / 26 - 1;
    }
    s
}

pub fn point_segment_distance<T: Scalar>(p: Point3<T>, a: Point3<T>, b: Point3<T>) -> T {
    let ab = b - a;
    let len2 = ab.norm_squared();
    let t = if len2 > T::zero() {
        ((p - a).dot(ab) / len2).max(T::zero()).min(T::one())
    } else {
        T::zero()
    };
    p.distance(a + ab * t)
}

/// Snapped side of `p` relative to `plane`.
pub fn classify_point<T: Scalar>(
    p: Point3<T>,
    plane: &Plane<T>,
    tol: &Tolerance<T>,
) -> Result<Sign, GeometryError> {
    if !p.is_finite() {
        return Err(GeometryError::NonFinite);
    }
    Ok(Sign::from_value(plane.signed_distance(p), tol.eps_abs()))
}

pub fn affine_apply<T: Scalar>(map: &AffineMap<T>, link: &PolyLink<T>) -> PolyLink<T> {
    link.map_vertices(|p| map.apply(p))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    EmptyLink,
    TooFewVertices { loop_index: usize, count: usize },
    CoincidentVertices { loop_index: usize, vertex: usize },
    NonFinite { loop_index: usize, vertex: usize },
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Violation::EmptyLink => write!(f, "link has no loops"),
            Violation::TooFewVertices { loop_index, count } => {
                write!(f, "loop {loop_index} has {count} vertices (need at least 3)")
            }
            Violation::CoincidentVertices { loop_index, vertex } => write!(
                f,
                "loop {loop_index}: vertex {vertex} coincides with its successor"
            ),
            Violation::NonFinite { loop_index, vertex } => {
                write!(f, "loop {loop_index}: vertex {vertex} is not finite")
            }
        }
    }
}

/// Lists every structural problem of `link`; an empty list means valid.
pub fn validate<T: Scalar>(link: &PolyLink<T>, tol: &Tolerance<T>) -> Vec<Violation> {
    let mut out = Vec::new();
    if link.loops().is_empty() {
        out.push(Violation::EmptyLink);
    }
    for (li, lp) in link.loops().iter().enumerate() {
        let n = lp.len();
        if n < 3 {
            out.push(Violation::TooFewVertices {
                loop_index: li,
                count: n,
            });
        }
        for (vi, p) in lp.vertices().iter().enumerate() {
            if !p.is_finite() {
                out.push(Violation::NonFinite {
                    loop_index: li,
                    vertex: vi,
                });
            }
        }
        if n >= 2 {
            for vi in 0..n {
                let (a, b) = lp.edge(vi);
                if a.is_finite() && b.is_finite() && a.distance(b) <= tol.eps_abs() {
                    out.push(Violation::CoincidentVertices {
                        loop_index: li,
                        vertex: vi,
                    });
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_square() -> PolyLink<f64> {
        PolyLink::single(PolyLoop::new(vec![
            Point3::new(0.0, 0.0, 0.0),
            Point3::new(1.0, 0.0, 0.0),
            Point3::new(1.0, 1.0, 0.0),
            Point3::new(0.0, 1.0, 0.0),
        ]))
    }

    fn z0() -> Plane<f64> {
        Plane::new(Point3::new(0.0, 0.0, 1.0), 0.0).unwrap()
    }

    #[test]
    fn classify_basic_cases() {
        let tol = Tolerance::new(1e-9, 1.0).unwrap();
        let plane = z0();
        assert_eq!(
            classify_point(Point3::new(0.0, 0.0, 1.0), &plane, &tol).unwrap(),
            Sign::Above
        );
        assert_eq!(
            classify_point(Point3::new(0.0, 0.0, 0.0), &plane, &tol).unwrap(),
            Sign::On
        );
        assert_eq!(
            classify_point(Point3::new(0.0, 0.0, -5e-13), &plane, &tol).unwrap(),
            Sign::On
        );
        assert_eq!(
            classify_point(Point3::new(f64::NAN, 0.0, 0.0), &plane, &tol),
            Err(GeometryError::NonFinite)
        );
    }

    #[test]
    fn plane_normalizes_and_rejects_zero_normal() {
        let p = Plane::new(Point3::new(0.0, 0.0, 2.0), 4.0).unwrap();
        assert_eq!(p.normal(), Point3::new(0.0, 0.0, 1.0));
        assert_eq!(p.offset(), 2.0);
        assert!(matches!(
            Plane::new(Point3::new(0.0, 1e-13, 0.0), 0.0),
            Err(GeometryError::ZeroNormal(_))
        ));
    }

    #[test]
    fn affine_examples() {
        let sq = unit_square();
        assert_eq!(affine_apply(&AffineMap::identity(), &sq), sq);

        let doubled = affine_apply(&AffineMap::scaling(2.0), &sq);
        let v = doubled.loops()[0].vertices();
        assert_eq!(v[2], Point3::new(2.0, 2.0, 0.0));
        assert!((v[0].distance(v[1]) - 2.0).abs() < 1e-15);

        let shear = AffineMap::new(
            [[1.0, 0.0, 1.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]],
            Point3::zero(),
        )
        .unwrap();
        assert_eq!(affine_apply(&shear, &sq), sq);
    }

    #[test]
    fn affine_inverse_round_trip() {
        let m = AffineMap::new(
            [[2.0, 0.3, -1.0], [0.1, 1.5, 0.2], [0.0, -0.7, 0.9]],
            Point3::new(1.0, -2.0, 0.5),
        )
        .unwrap();
        let inv = m.inverse().unwrap();
        let p = Point3::new(0.3, -0.4, 2.2);
        assert!(inv.apply(m.apply(p)).distance(p) < 1e-12);
        let singular = AffineMap::new([[1.0, 2.0, 3.0], [2.0, 4.0, 6.0], [0.0, 0.0, 1.0]], Point3::zero())
            .unwrap();
        assert!(!singular.is_invertible());
        assert!(singular.inverse().is_err());
    }

    #[test]
    fn validation_reports_violations() {
        let tol = Tolerance::new(1e-9, 1.0).unwrap();
        let short = PolyLink::single(PolyLoop::new(vec![
            Point3::new(0.0, 0.0, 0.0),
            Point3::new(1.0, 0.0, 0.0),
        ]));
        assert_eq!(
            validate(&short, &tol),
            vec![Violation::TooFewVertices {
                loop_index: 0,
                count: 2
            }]
        );

        let repeated = PolyLink::single(PolyLoop::new(vec![
            Point3::new(0.0, 0.0, 0.0),
            Point3::new(1.0, 0.0, 0.0),
            Point3::new(1.0, 0.0, 0.0),
            Point3::new(0.0, 1.0, 0.0),
        ]));
        assert_eq!(
            validate(&repeated, &tol),
            vec![Violation::CoincidentVertices {
                loop_index: 0,
                vertex: 1
            }]
        );
        assert!(validate(&unit_square(), &tol).is_empty());
        assert_eq!(validate(&PolyLink::<f64>::new(vec![]), &tol), vec![Violation::EmptyLink]);
    }

    #[test]
    fn labels_default_to_letters() {
        assert_eq!(default_label(0), "A");
        assert_eq!(default_label(1), "B");
        assert_eq!(default_label(26), "AA");
    }

    #[test]
    fn single_precision_kernel() {
        let p: Plane<f32> = Plane::through(Point3::new(0.0, 0.0, 1.0), Point3::new(0.0, 0.0, 3.0)).unwrap();
        let tol = Tolerance::<f32>::new(1e-5, 1.0).unwrap();
        assert_eq!(
            classify_point(Point3::new(0.0f32, 0.0, 1.000_001), &p, &tol).unwrap(),
            Sign::On
        );
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn pt() -> impl Strategy<Value = Point3<f64>> {
            (-10.0..10.0f64, -10.0..10.0f64, -10.0..10.0f64).prop_map(|(x, y, z)| Point3::new(x, y, z))
        }

        proptest! {
            #[test]
            fn flip_swaps_sides(p in pt(), n in pt(), off in -5.0..5.0f64) {
                prop_assume!(n.norm() > 1e-3);
                let plane = Plane::new(n, off).unwrap();
                let tol = Tolerance::new(1e-9, 10.0).unwrap();
                let a = classify_point(p, &plane, &tol).unwrap();
                let b = classify_point(p, &plane.flipped(), &tol).unwrap();
                prop_assert_eq!(a.flipped(), b);
            }

            #[test]
            fn snapping_is_monotone(h in -1e-6..1e-6f64, small in 1e-12..1e-8f64, factor in 1.0..100.0f64) {
                let plane = z0();
                let p = Point3::new(0.0, 0.0, h);
                let tight = Tolerance::new(small, 1.0).unwrap();
                let loose = Tolerance::new(small * factor, 1.0).unwrap();
                if classify_point(p, &plane, &tight).unwrap() == Sign::On {
                    prop_assert_eq!(classify_point(p, &plane, &loose).unwrap(), Sign::On);
                }
            }

            #[test]
            fn affine_inverse_restores_vertices(
                rows in proptest::collection::vec(-3.0..3.0f64, 9),
                t in pt(),
            ) {
                let m = [[rows[0], rows[1], rows[2]], [rows[3], rows[4], rows[5]], [rows[6], rows[7], rows[8]]];
                let map = AffineMap::new(m, t).unwrap();
                prop_assume!(map.determinant().abs() > 0.1);
                let sq = unit_square();
                let back = affine_apply(&map.inverse().unwrap(), &affine_apply(&map, &sq));
                for (a, b) in back.vertices().zip(sq.vertices()) {
                    prop_assert!(a.distance(b) < 1e-9 * sq.diameter());
                }
            }
        }
    }
}
