//! Planar and spatial primitives used by the decision engine.
//!
//! Everything in this module is a pure function of its inputs; there is no
//! shared state and all operations are safe to call concurrently. Angles are
//! radians throughout — degrees exist only in human-facing reports.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Tolerance for accepting a law-of-cosines argument slightly outside
/// [-1, 1]. Anything further out is invalid geometry, not float noise.
pub const COSINE_CLAMP_TOLERANCE: f64 = 1e-12;

/// Tolerance on the squared norm of a direction vector for it to count as a
/// unit vector.
pub const UNIT_NORM_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    /// Side lengths cannot form a triangle (within tolerance).
    #[error("side lengths ({x}, {y}, {z}) do not form a triangle")]
    DegenerateTriangle { x: f64, y: f64, z: f64 },
    /// Arc-drop query outside the quarter-arc domain 0 <= D <= R, R > 0.
    #[error("arc drop undefined for radius {radius}, horizontal distance {distance}")]
    OutOfDomain { radius: f64, distance: f64 },
    /// A direction vector with (near-)zero length.
    #[error("direction vector has zero length")]
    ZeroDirection,
}

// ── Points and vectors ─────────────────────────────────────────────────────

/// A point on the ground plane, meters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

/// A point in ground coordinates with height, meters. `z` is height above
/// the ground plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Point3 {
    pub fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    pub fn ground(self) -> Point2 {
        Point2::new(self.x, self.y)
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }
}

/// A displacement on the ground plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Vec2 {
    pub x: f64,
    pub y: f64,
}

impl Vec2 {
    pub fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn dot(self, other: Vec2) -> f64 {
        self.x * other.x + self.y * other.y
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    /// The left-hand normal: `direction` rotated 90 degrees counterclockwise.
    pub fn left_normal(self) -> Vec2 {
        Vec2::new(-self.y, self.x)
    }

    pub fn scale(self, k: f64) -> Vec2 {
        Vec2::new(self.x * k, self.y * k)
    }
}

/// A velocity or displacement in three dimensions, m or m/s per component.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Vec3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Vec3 {
    pub fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    pub fn norm(self) -> f64 {
        (self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }

    pub fn horizontal_norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }
}

impl std::ops::Sub for Point2 {
    type Output = Vec2;
    fn sub(self, rhs: Point2) -> Vec2 {
        Vec2::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl std::ops::Add<Vec2> for Point2 {
    type Output = Point2;
    fn add(self, rhs: Vec2) -> Point2 {
        Point2::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl std::ops::Sub for Point3 {
    type Output = Vec3;
    fn sub(self, rhs: Point3) -> Vec3 {
        Vec3::new(self.x - rhs.x, self.y - rhs.y, self.z - rhs.z)
    }
}

impl std::ops::Add<Vec3> for Point3 {
    type Output = Point3;
    fn add(self, rhs: Vec3) -> Point3 {
        Point3::new(self.x + rhs.x, self.y + rhs.y, self.z + rhs.z)
    }
}

impl std::ops::Mul<f64> for Vec3 {
    type Output = Vec3;
    fn mul(self, k: f64) -> Vec3 {
        Vec3::new(self.x * k, self.y * k, self.z * k)
    }
}

/// Euclidean distance between two ground-plane points.
pub fn distance(p: Point2, q: Point2) -> f64 {
    (q.x - p.x).hypot(q.y - p.y)
}

// ── Triangles ──────────────────────────────────────────────────────────────

/// The three side lengths of a triangle, labeled for an angle query:
/// `x` is the side opposite the queried angle, `y` and `z` are the two
/// sides adjacent to it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TriangleSides {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl TriangleSides {
    pub fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }
}

/// The angle between sides `y` and `z` (opposite side `x`), in [0, pi].
///
/// Degenerate flat triangles (one side equal to the sum of the others) are
/// allowed and map to 0 or pi; side sets that violate the triangle
/// inequality beyond [`COSINE_CLAMP_TOLERANCE`] are rejected.
pub fn angle_at_vertex(sides: TriangleSides) -> Result<f64, GeometryError> {
    let TriangleSides { x, y, z } = sides;
    let degenerate = GeometryError::DegenerateTriangle { x, y, z };
    if !(x > 0.0 && y > 0.0 && z > 0.0) || !(x.is_finite() && y.is_finite() && z.is_finite()) {
        return Err(degenerate);
    }
    let cos = (y * y + z * z - x * x) / (2.0 * y * z);
    if !cos.is_finite() || cos.abs() > 1.0 + COSINE_CLAMP_TOLERANCE {
        return Err(degenerate);
    }
    Ok(cos.clamp(-1.0, 1.0).acos())
}

// ── Circular arc drop ──────────────────────────────────────────────────────

/// A circular-arc flight model: radius `radius`, horizontal run `distance`,
/// and the vertical drop `drop` those imply.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ArcGeometry {
    pub radius: f64,
    pub distance: f64,
    pub drop: f64,
}

impl ArcGeometry {
    /// Builds the arc model for `radius` and `distance`, solving for the drop.
    pub fn new(radius: f64, distance: f64) -> Result<Self, GeometryError> {
        Ok(Self {
            radius,
            distance,
            drop: arc_drop(radius, distance)?,
        })
    }
}

/// Vertical drop of a circular arc of radius `radius` over horizontal
/// distance `distance`: `radius - sqrt(radius^2 - distance^2)`.
///
/// Satisfies `radius^2 = distance^2 + (radius - drop)^2` to within
/// `1e-12 * radius^2`.
pub fn arc_drop(radius: f64, distance: f64) -> Result<f64, GeometryError> {
    let in_domain = radius > 0.0 && (0.0..=radius).contains(&distance);
    if !in_domain {
        return Err(GeometryError::OutOfDomain { radius, distance });
    }
    Ok(radius - (radius * radius - distance * distance).sqrt())
}

// ── Oriented lines ─────────────────────────────────────────────────────────

/// A line with a direction, splitting the plane into a positive (left of
/// `direction`) and negative (right) side.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OrientedLine2 {
    origin: Point2,
    direction: Vec2,
}

impl OrientedLine2 {
    /// Builds a line through `origin` along `direction` (normalized here).
    pub fn new(origin: Point2, direction: Vec2) -> Result<Self, GeometryError> {
        let n = direction.norm();
        if !n.is_finite() || n < 1e-12 {
            return Err(GeometryError::ZeroDirection);
        }
        let direction = if (n - 1.0).abs() * (n + 1.0) <= UNIT_NORM_TOLERANCE {
            direction
        } else {
            direction.scale(1.0 / n)
        };
        Ok(Self { origin, direction })
    }

    pub fn origin(&self) -> Point2 {
        self.origin
    }

    pub fn direction(&self) -> Vec2 {
        self.direction
    }

    /// Same line, opposite direction. Flips the sign of every signed distance.
    pub fn reversed(&self) -> Self {
        Self {
            origin: self.origin,
            direction: self.direction.scale(-1.0),
        }
    }

    /// Perpendicular distance of `p` from the line, positive on the left of
    /// `direction`, negative on the right, zero on the line.
    pub fn signed_distance(&self, p: Point2) -> f64 {
        (p - self.origin).dot(self.direction.left_normal())
    }
}

/// Free-function form of [`OrientedLine2::signed_distance`].
pub fn signed_distance(line: &OrientedLine2, p: Point2) -> f64 {
    line.signed_distance(p)
}

// ── Stadium (capsule) regions ──────────────────────────────────────────────

/// The set of points within `radius` of the segment [`focus_a`, `focus_b`]:
/// two semicircles joined by parallel lines. A plain circle is the special
/// case `focus_a == focus_b`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StadiumShape {
    pub focus_a: Point2,
    pub focus_b: Point2,
    pub radius: f64,
}

impl StadiumShape {
    pub fn new(focus_a: Point2, focus_b: Point2, radius: f64) -> Self {
        Self {
            focus_a,
            focus_b,
            radius,
        }
    }

    /// Minimum distance from `p` to the focal segment.
    pub fn distance_to_spine(&self, p: Point2) -> f64 {
        let ab = self.focus_b - self.focus_a;
        let len2 = ab.dot(ab);
        if len2 == 0.0 {
            return distance(p, self.focus_a);
        }
        let t = (p - self.focus_a).dot(ab) / len2;
        if t <= 0.0 {
            distance(p, self.focus_a)
        } else if t >= 1.0 {
            distance(p, self.focus_b)
        } else {
            distance(p, self.focus_a + ab.scale(t))
        }
    }

    /// Closed containment test: boundary points count as inside.
    pub fn contains(&self, p: Point2) -> bool {
        self.distance_to_spine(p) <= self.radius
    }
}

/// Free-function form of [`StadiumShape::contains`].
pub fn stadium_contains(ring: &StadiumShape, p: Point2) -> bool {
    ring.contains(p)
}
