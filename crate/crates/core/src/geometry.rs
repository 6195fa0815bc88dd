//! Plane geometry and mass-point primitives.

use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A location in the Euclidean plane.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(from = "[f64; 2]", into = "[f64; 2]")]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const ORIGIN: Point = Point { x: 0.0, y: 0.0 };

    #[inline]
    pub const fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    /// Like [`Point::new`] but rejects NaN and infinite coordinates.
    pub fn try_new(x: f64, y: f64) -> Result<Self> {
        let p = Point { x, y };
        if p.is_finite() {
            Ok(p)
        } else {
            Err(Error::NonFinite(format!("point ({x}, {y})")))
        }
    }

    #[inline]
    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    #[inline]
    pub fn dot(self, other: Point) -> f64 {
        self.x * other.x + self.y * other.y
    }

    #[inline]
    pub fn cross(self, other: Point) -> f64 {
        self.x * other.y - self.y * other.x
    }

    #[inline]
    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    #[inline]
    pub fn norm_sq(self) -> f64 {
        self.dot(self)
    }

    /// Rotation by `angle` radians about the origin.
    pub fn rotated(self, angle: f64) -> Point {
        let (s, c) = angle.sin_cos();
        Point::new(c * self.x - s * self.y, s * self.x + c * self.y)
    }

    /// `self + t * (other - self)`.
    #[inline]
    pub fn lerp(self, other: Point, t: f64) -> Point {
        self + (other - self) * t
    }

    pub fn midpoint(self, other: Point) -> Point {
        Point::new(0.5 * (self.x + other.x), 0.5 * (self.y + other.y))
    }

    /// Largest absolute coordinate difference.
    pub fn max_abs_diff(self, other: Point) -> f64 {
        (self.x - other.x).abs().max((self.y - other.y).abs())
    }
}

impl From<[f64; 2]> for Point {
    fn from([x, y]: [f64; 2]) -> Self {
        Point { x, y }
    }
}

impl From<Point> for [f64; 2] {
    fn from(p: Point) -> Self {
        [p.x, p.y]
    }
}

impl Add for Point {
    type Output = Point;
    #[inline]
    fn add(self, rhs: Point) -> Point {
        Point::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl AddAssign for Point {
    #[inline]
    fn add_assign(&mut self, rhs: Point) {
        self.x += rhs.x;
        self.y += rhs.y;
    }
}

impl Sub for Point {
    type Output = Point;
    #[inline]
    fn sub(self, rhs: Point) -> Point {
        Point::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl Mul<f64> for Point {
    type Output = Point;
    #[inline]
    fn mul(self, k: f64) -> Point {
        Point::new(self.x * k, self.y * k)
    }
}

impl Neg for Point {
    type Output = Point;
    #[inline]
    fn neg(self) -> Point {
        Point::new(-self.x, -self.y)
    }
}

/// A point carrying a positive mass (a flow weight).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MassPoint {
    pub position: Point,
    mass: f64,
}

impl MassPoint {
    pub fn new(position: Point, mass: f64) -> Result<Self> {
        if !(mass > 0.0 && mass.is_finite()) {
            return Err(Error::Domain(format!("mass must be positive and finite, got {mass}")));
        }
        if !position.is_finite() {
            return Err(Error::NonFinite(format!("mass point at {position:?}")));
        }
        Ok(MassPoint { position, mass })
    }

    /// Mass point with unit mass.
    pub fn unit(position: Point) -> Self {
        MassPoint { position, mass: 1.0 }
    }

    #[inline]
    pub fn mass(&self) -> f64 {
        self.mass
    }
}

/// Centre of mass `(Σ mᵢ pᵢ) / (Σ mᵢ)`.
///
/// The weighted sum and the total mass are accumulated separately and divided
/// once at the end.
pub fn centroid(points: &[MassPoint]) -> Result<Point> {
    if points.is_empty() {
        return Err(Error::Domain("centroid of an empty set of mass points".into()));
    }
    Ok(weighted_mean(points.iter().map(|m| (m.position, m.mass))))
}

/// Unchecked weighted mean over `(point, weight)` pairs. Callers guarantee a
/// nonempty iterator with a positive total weight.
pub(crate) fn weighted_mean(items: impl IntoIterator<Item = (Point, f64)>) -> Point {
    let mut sx = 0.0;
    let mut sy = 0.0;
    let mut total = 0.0;
    for (p, w) in items {
        sx += w * p.x;
        sy += w * p.y;
        total += w;
    }
    Point::new(sx / total, sy / total)
}

/// Squared Euclidean distance `|ab|²`.
#[inline]
pub fn sq_dist(a: Point, b: Point) -> f64 {
    let dx = a.x - b.x;
    let dy = a.y - b.y;
    dx * dx + dy * dy
}

/// Interior angle at `vertex` between the rays towards `a` and `b`, in `[0, π]`.
///
/// Uses `atan2(|cross|, dot)`, which stays accurate near 0 and π where
/// `acos` of a normalised dot product loses half its digits.
pub fn angle_at(vertex: Point, a: Point, b: Point) -> Result<f64> {
    let u = a - vertex;
    let v = b - vertex;
    if u.norm_sq() == 0.0 || v.norm_sq() == 0.0 {
        return Err(Error::DegenerateAngle);
    }
    Ok(u.cross(v).abs().atan2(u.dot(v)))
}

/// Axis-aligned bounding box of a nonempty point set, as `(min, max)`.
pub fn bounding_box(points: impl IntoIterator<Item = Point>) -> Option<(Point, Point)> {
    let mut it = points.into_iter();
    let first = it.next()?;
    Some(it.fold((first, first), |(lo, hi), p| {
        (
            Point::new(lo.x.min(p.x), lo.y.min(p.y)),
            Point::new(hi.x.max(p.x), hi.y.max(p.y)),
        )
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn mp(x: f64, y: f64, m: f64) -> MassPoint {
        MassPoint::new(Point::new(x, y), m).unwrap()
    }

    #[test]
    fn centroid_examples() {
        assert_eq!(centroid(&[mp(0.0, 0.0, 1.0), mp(2.0, 4.0, 1.0)]).unwrap(), Point::new(1.0, 2.0));
        assert_eq!(centroid(&[mp(3.0, 7.0, 5.0)]).unwrap(), Point::new(3.0, 7.0));
        let c = centroid(&[mp(0.0, 0.0, 1.0), mp(2.0, 4.0, 1.0), mp(9.0, 2.0, 2.0)]).unwrap();
        assert!(c.max_abs_diff(Point::new(5.0, 2.0)) < 1e-12);
    }

    #[test]
    fn centroid_rejects_empty() {
        assert!(matches!(centroid(&[]), Err(Error::Domain(_))));
    }

    #[test]
    fn mass_must_be_positive() {
        assert!(MassPoint::new(Point::ORIGIN, 0.0).is_err());
        assert!(MassPoint::new(Point::ORIGIN, -1.0).is_err());
        assert!(MassPoint::new(Point::ORIGIN, f64::NAN).is_err());
        assert!(MassPoint::new(Point::new(f64::INFINITY, 0.0), 1.0).is_err());
    }

    #[test]
    fn sq_dist_examples() {
        assert_eq!(sq_dist(Point::new(5.0, 2.0), Point::new(9.0, 2.0)), 16.0);
        assert_eq!(sq_dist(Point::new(3.0, 3.0), Point::new(3.0, 3.0)), 0.0);
        assert_eq!(sq_dist(Point::new(0.0, 0.0), Point::new(3.0, 4.0)), 25.0);
    }

    #[test]
    fn angle_examples() {
        let o = Point::ORIGIN;
        let a = angle_at(o, Point::new(1.0, 0.0), Point::new(0.0, 1.0)).unwrap();
        assert!((a - FRAC_PI_2).abs() < 1e-15);
        assert_eq!(angle_at(o, Point::new(1.0, 0.0), Point::new(2.0, 0.0)).unwrap(), 0.0);
        // Reference value π − atan(1e-12) (to double precision π − 1e-12).
        let near_pi = angle_at(o, Point::new(1.0, 0.0), Point::new(-1.0, 1e-12)).unwrap();
        assert!((near_pi - PI).abs() < 1e-6);
        assert!((near_pi - (PI - 1e-12)).abs() < 1e-15);
    }

    #[test]
    fn angle_rejects_degenerate_rays() {
        let o = Point::ORIGIN;
        assert!(matches!(angle_at(o, o, Point::new(1.0, 0.0)), Err(Error::DegenerateAngle)));
        assert!(matches!(angle_at(o, Point::new(1.0, 0.0), o), Err(Error::DegenerateAngle)));
    }
}
