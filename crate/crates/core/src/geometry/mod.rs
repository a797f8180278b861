//! Planar kernel: environments with holes, incidence predicates, visibility
//! polygons and the decomposition of the unseen region into shadows.

mod env;
pub(crate) mod region;
mod shadow;
mod visibility;

use std::ops::{Add, Mul, Sub};

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use env::{Environment, EnvironmentLoadError, RawEnvironment, Segment};
pub use region::{sample_uniform, Region};
pub use shadow::{shadow_set, Shadow, ShadowSet};
pub use visibility::{visibility_polygon, VisPolygon};

/// A point (or vector) in the plane. Serialized as `[x, y]`.
#[derive(Clone, Copy, Debug, PartialEq, Default, Serialize, Deserialize)]
#[serde(from = "[f64; 2]", into = "[f64; 2]")]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn dot(self, o: Point) -> f64 {
        self.x * o.x + self.y * o.y
    }

    pub fn cross(self, o: Point) -> f64 {
        self.x * o.y - self.y * o.x
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn dist(self, o: Point) -> f64 {
        (self - o).norm()
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    /// Linear interpolation; `t = 0` and `t = 1` return the endpoints exactly.
    pub fn lerp(self, o: Point, t: f64) -> Point {
        if t <= 0.0 {
            self
        } else if t >= 1.0 {
            o
        } else {
            Point::new(self.x + (o.x - self.x) * t, self.y + (o.y - self.y) * t)
        }
    }

    /// Lexicographic (x, then y) total order.
    pub fn lex_cmp(&self, o: &Point) -> std::cmp::Ordering {
        self.x.total_cmp(&o.x).then(self.y.total_cmp(&o.y))
    }
}

impl From<[f64; 2]> for Point {
    fn from(a: [f64; 2]) -> Self {
        Point::new(a[0], a[1])
    }
}

impl From<Point> for [f64; 2] {
    fn from(p: Point) -> Self {
        [p.x, p.y]
    }
}

impl Add for Point {
    type Output = Point;
    fn add(self, o: Point) -> Point {
        Point::new(self.x + o.x, self.y + o.y)
    }
}

impl Sub for Point {
    type Output = Point;
    fn sub(self, o: Point) -> Point {
        Point::new(self.x - o.x, self.y - o.y)
    }
}

impl Mul<f64> for Point {
    type Output = Point;
    fn mul(self, s: f64) -> Point {
        Point::new(self.x * s, self.y * s)
    }
}

/// Twice the signed area of a closed ring (positive when counter-clockwise).
pub fn signed_area2(ring: &[Point]) -> f64 {
    let n = ring.len();
    let mut s = 0.0;
    for i in 0..n {
        s += ring[i].cross(ring[(i + 1) % n]);
    }
    s
}

/// Distance from `p` to the closed segment `ab`.
pub fn point_segment_distance(p: Point, a: Point, b: Point) -> f64 {
    let ab = b - a;
    let len2 = ab.dot(ab);
    if len2 == 0.0 {
        return p.dist(a);
    }
    let t = ((p - a).dot(ab) / len2).clamp(0.0, 1.0);
    p.dist(a + ab * t)
}

/// Parity test against a set of closed rings (even-odd rule); boundary
/// points are classified arbitrarily.
pub(crate) fn ring_parity(rings: impl IntoIterator<Item = impl AsRef<[Point]>>, p: Point) -> bool {
    let mut inside = false;
    for ring in rings {
        let ring = ring.as_ref();
        let n = ring.len();
        let mut j = n - 1;
        for i in 0..n {
            let (a, b) = (ring[i], ring[j]);
            if (a.y > p.y) != (b.y > p.y) {
                let x = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
                if p.x < x {
                    inside = !inside;
                }
            }
            j = i;
        }
    }
    inside
}

/// Errors raised by environment validation and geometric queries.
/// Rings are numbered with the outer boundary as ring 0 and hole `k` as ring `k + 1`.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    #[error("ring {ring} has fewer than 3 vertices")]
    TooFewVertices { ring: usize },
    #[error("ring {ring} vertex {vertex} has a non-finite coordinate")]
    NonFinite { ring: usize, vertex: usize },
    #[error("ring {ring}: edge {edge_a} intersects edge {edge_b}")]
    SelfIntersecting { ring: usize, edge_a: usize, edge_b: usize },
    #[error("hole {hole} is not strictly inside the outer boundary (vertex {vertex})")]
    HoleOutsideOuter { hole: usize, vertex: usize },
    #[error("holes {hole_a} and {hole_b} overlap")]
    OverlappingHoles { hole_a: usize, hole_b: usize },
    #[error("ring {ring} vertex {vertex} is within epsilon of ring {other_ring} feature {other}")]
    DegenerateEdge { ring: usize, vertex: usize, other_ring: usize, other: usize },
    #[error("viewpoint ({x}, {y}) lies outside the environment")]
    ViewpointOutside { x: f64, y: f64 },
    #[error("point {index} lies outside the environment")]
    PointOutside { index: usize },
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lerp_endpoints_exact() {
        let a = Point::new(0.1, 0.7);
        let b = Point::new(3.3, -1.9);
        assert_eq!(a.lerp(b, 0.0), a);
        assert_eq!(a.lerp(b, 1.0), b);
    }

    #[test]
    fn point_serializes_as_pair() {
        let p = Point::new(1.5, -2.0);
        assert_eq!(serde_json::to_string(&p).unwrap(), "[1.5,-2.0]");
        let q: Point = serde_json::from_str("[3, 4]").unwrap();
        assert_eq!(q, Point::new(3.0, 4.0));
    }

    #[test]
    fn segment_distance() {
        let d = point_segment_distance(Point::new(0.5, 1.0), Point::new(0.0, 0.0), Point::new(1.0, 0.0));
        assert!((d - 1.0).abs() < 1e-15);
        let d = point_segment_distance(Point::new(2.0, 0.0), Point::new(0.0, 0.0), Point::new(1.0, 0.0));
        assert!((d - 1.0).abs() < 1e-15);
    }
}
