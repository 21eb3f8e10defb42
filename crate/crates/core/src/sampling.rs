//! Seeded random directions and low-discrepancy direction sets.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, UnitBall, UnitSphere};

use crate::geometry::Point3;
use crate::scalar::Scalar;

pub type SeededRng = ChaCha8Rng;

pub fn rng(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Seed for batch `index` of a run seeded with `seed` (splitmix64 step).
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed ^ index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Uniform direction on the unit sphere.
pub fn unit_vector<T: Scalar, R: Rng + ?Sized>(rng: &mut R) -> Point3<T> {
    let [x, y, z]: [f64; 3] = UnitSphere.sample(rng);
    Point3::from_f64(x, y, z)
}

/// Uniform point in the ball of the given radius.
pub fn ball_point<T: Scalar, R: Rng + ?Sized>(rng: &mut R, radius: f64) -> Point3<T> {
    let [x, y, z]: [f64; 3] = UnitBall.sample(rng);
    Point3::from_f64(x * radius, y * radius, z * radius)
}

/// Uniform point in an axis-aligned box.
pub fn box_point<T: Scalar, R: Rng + ?Sized>(rng: &mut R, lo: Point3<T>, hi: Point3<T>) -> Point3<T> {
    let mut c = |a: T, b: T| {
        let u: f64 = rng.random();
        a + (b - a) * T::lit(u)
    };
    Point3::new(c(lo.x, hi.x), c(lo.y, hi.y), c(lo.z, hi.z))
}

/// `count` Fibonacci-spiral directions covering the upper hemisphere.
///
/// A plane normal and its negative describe the same plane, so half the
/// sphere suffices.
pub fn hemisphere_directions<T: Scalar>(count: usize) -> Vec<Point3<T>> {
    let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
    (0..count)
        .map(|i| {
            let z = 1.0 - (i as f64 + 0.5) / count as f64;
            let r = (1.0 - z * z).max(0.0).sqrt();
            let phi = golden * i as f64;
            Point3::from_f64(r * phi.cos(), r * phi.sin(), z)
        })
        .collect()
}

/// The 26 nonzero directions of the `{-1, 0, 1}` lattice, normalized.
pub fn lattice_directions<T: Scalar>() -> Vec<Point3<T>> {
    let mut out = Vec::with_capacity(26);
    for x in -1i32..=1 {
        for y in -1i32..=1 {
            for z in -1i32..=1 {
                if x == 0 && y == 0 && z == 0 {
                    continue;
                }
                let v = Point3::from_f64(x as f64, y as f64, z as f64);
                out.push(v / v.norm());
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn directions_are_unit() {
        for d in hemisphere_directions::<f64>(512) {
            assert!((d.norm() - 1.0).abs() < 1e-12);
            assert!(d.z > 0.0);
        }
        assert_eq!(lattice_directions::<f64>().len(), 26);
    }

    #[test]
    fn seeded_vectors_repeat() {
        let a: Point3<f64> = unit_vector(&mut rng(3));
        let b: Point3<f64> = unit_vector(&mut rng(3));
        assert_eq!(a, b);
        assert_ne!(derive_seed(1, 0), derive_seed(1, 1));
    }
}
