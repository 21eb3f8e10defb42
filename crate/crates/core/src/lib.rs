//! n-th hulls of polygonal space curves and links.
//!
//! A point lies in the n-th hull of a curve when every plane through it
//! meets the curve at least 2n times. The crate computes that depth exactly,
//! voxelizes hulls, and measures the related invariants: total curvature,
//! cone angles, bridge numbers and quadrisecants.
//!
//! Everything geometric is generic over [`Scalar`] (`f32` or `f64`). The
//! aliases below fix the scalar for the common cases.

pub mod curvature;
pub mod cut;
pub mod fixtures;
pub mod geometry;
pub mod hull;
pub mod io;
pub mod projection;
pub mod sampling;
pub mod scalar;
pub mod secants;
pub mod suites;
pub mod surgery;

pub use curvature::{bridge_superbridge, cone_angle, crofton_estimate, link_total_curvature, total_curvature};
pub use cut::{cut_count, sweep_profile, CutCount, DirectionProfile};
pub use geometry::{AffineMap, Halfspace, Plane, Point3, PolyLink, PolyLoop, Side, Sign, Tolerance};
pub use hull::{extract_hull, hull_depth, hull_number, in_hull, min_cut_exact, min_cut_sampled, HullQuery};
pub use scalar::Scalar;
pub use secants::quadrisecants;

pub type Point64 = Point3<f64>;
pub type Loop64 = PolyLoop<f64>;
pub type Link64 = PolyLink<f64>;
pub type Plane64 = Plane<f64>;
pub type Tolerance64 = Tolerance<f64>;

pub type Point32 = Point3<f32>;
pub type Loop32 = PolyLoop<f32>;
pub type Link32 = PolyLink<f32>;
pub type Plane32 = Plane<f32>;
pub type Tolerance32 = Tolerance<f32>;
