use serde::{Deserialize, Serialize};

use super::{point_segment_distance, ring_parity, signed_area2, GeometryError, Point};

/// Relative default tolerance, scaled by the bounding-box diagonal.
const DEFAULT_RELATIVE_EPSILON: f64 = 1e-9;

/// Unvalidated environment as it appears on disk:
/// `{"outer": [[x,y],...], "holes": [[[x,y],...],...], "epsilon": optional}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RawEnvironment {
    pub outer: Vec<Point>,
    #[serde(default)]
    pub holes: Vec<Vec<Point>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
}

/// A boundary edge of the environment.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Segment {
    pub a: Point,
    pub b: Point,
    /// 0 for the outer boundary, `k + 1` for hole `k`.
    pub ring: usize,
    /// Index of the edge's first vertex within its ring.
    pub index: usize,
}

/// Validated free space: a simple outer polygon (counter-clockwise) with
/// pairwise-disjoint simple holes (clockwise) strictly inside it.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(try_from = "RawEnvironment", into = "RawEnvironment")]
pub struct Environment {
    outer: Vec<Point>,
    holes: Vec<Vec<Point>>,
    epsilon: f64,
    edges: Vec<Segment>,
    min: Point,
    max: Point,
    area: f64,
}

impl TryFrom<RawEnvironment> for Environment {
    type Error = GeometryError;
    fn try_from(raw: RawEnvironment) -> Result<Self, GeometryError> {
        Environment::validate(raw)
    }
}

impl From<Environment> for RawEnvironment {
    fn from(env: Environment) -> Self {
        RawEnvironment { outer: env.outer, holes: env.holes, epsilon: Some(env.epsilon) }
    }
}

fn orient(a: Point, b: Point, c: Point) -> f64 {
    (b - a).cross(c - a)
}

fn on_segment(p: Point, a: Point, b: Point) -> bool {
    p.x >= a.x.min(b.x) && p.x <= a.x.max(b.x) && p.y >= a.y.min(b.y) && p.y <= a.y.max(b.y)
}

/// Closed-segment intersection with exact orientation signs.
fn segments_intersect(a: Point, b: Point, c: Point, d: Point) -> bool {
    let d1 = orient(c, d, a);
    let d2 = orient(c, d, b);
    let d3 = orient(a, b, c);
    let d4 = orient(a, b, d);
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0)) && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0)) {
        return true;
    }
    (d1 == 0.0 && on_segment(a, c, d))
        || (d2 == 0.0 && on_segment(b, c, d))
        || (d3 == 0.0 && on_segment(c, a, b))
        || (d4 == 0.0 && on_segment(d, a, b))
}

fn ring_edges(ring: &[Point]) -> impl Iterator<Item = (usize, Point, Point)> + '_ {
    let n = ring.len();
    (0..n).map(move |i| (i, ring[i], ring[(i + 1) % n]))
}

impl Environment {
    /// Validates raw vertex lists and normalizes orientation (outer CCW, holes CW).
    pub fn validate(raw: RawEnvironment) -> Result<Self, GeometryError> {
        let RawEnvironment { mut outer, mut holes, epsilon } = raw;
        let rings_ref: Vec<&Vec<Point>> = std::iter::once(&outer).chain(holes.iter()).collect();
        for (r, ring) in rings_ref.iter().enumerate() {
            if ring.len() < 3 {
                return Err(GeometryError::TooFewVertices { ring: r });
            }
            if let Some(v) = ring.iter().position(|p| !p.is_finite()) {
                return Err(GeometryError::NonFinite { ring: r, vertex: v });
            }
        }

        let (mut min, mut max) = (outer[0], outer[0]);
        for p in &outer {
            min = Point::new(min.x.min(p.x), min.y.min(p.y));
            max = Point::new(max.x.max(p.x), max.y.max(p.y));
        }
        let epsilon = epsilon.unwrap_or(DEFAULT_RELATIVE_EPSILON * min.dist(max));

        if signed_area2(&outer) < 0.0 {
            outer.reverse();
        }
        for h in holes.iter_mut() {
            if signed_area2(h) > 0.0 {
                h.reverse();
            }
        }

        // Simplicity of each ring.
        for (r, ring) in std::iter::once(&outer).chain(holes.iter()).enumerate() {
            let n = ring.len();
            for (i, a, b) in ring_edges(ring) {
                for (j, c, d) in ring_edges(ring).skip(i + 1) {
                    let adjacent = j == i + 1 || (i == 0 && j == n - 1);
                    if !adjacent && segments_intersect(a, b, c, d) {
                        return Err(GeometryError::SelfIntersecting { ring: r, edge_a: i, edge_b: j });
                    }
                }
            }
        }

        let outer_rings = [&outer];
        for (h, hole) in holes.iter().enumerate() {
            for (i, a, b) in ring_edges(hole) {
                if ring_edges(&outer).any(|(_, c, d)| segments_intersect(a, b, c, d)) {
                    return Err(GeometryError::HoleOutsideOuter { hole: h, vertex: i });
                }
                if !ring_parity(outer_rings, a) {
                    return Err(GeometryError::HoleOutsideOuter { hole: h, vertex: i });
                }
            }
        }
        for (ha, hole_a) in holes.iter().enumerate() {
            for (hb, hole_b) in holes.iter().enumerate().skip(ha + 1) {
                let crossing = ring_edges(hole_a)
                    .any(|(_, a, b)| ring_edges(hole_b).any(|(_, c, d)| segments_intersect(a, b, c, d)));
                if crossing || ring_parity([hole_b], hole_a[0]) || ring_parity([hole_a], hole_b[0]) {
                    return Err(GeometryError::OverlappingHoles { hole_a: ha, hole_b: hb });
                }
            }
        }

        let rings: Vec<&Vec<Point>> = std::iter::once(&outer).chain(holes.iter()).collect();
        for (r, ring) in rings.iter().enumerate() {
            let n = ring.len();
            for (v, &p) in ring.iter().enumerate() {
                for (r2, ring2) in rings.iter().enumerate() {
                    let n2 = ring2.len();
                    for (j, c, d) in ring_edges(ring2) {
                        let incident = r2 == r && (j == v || (j + 1) % n2 == v);
                        if incident {
                            if j == v && c.dist(d) <= epsilon {
                                return Err(GeometryError::DegenerateEdge {
                                    ring: r,
                                    vertex: v,
                                    other_ring: r,
                                    other: (v + 1) % n,
                                });
                            }
                            continue;
                        }
                        if point_segment_distance(p, c, d) <= epsilon {
                            return Err(GeometryError::DegenerateEdge { ring: r, vertex: v, other_ring: r2, other: j });
                        }
                    }
                }
            }
        }

        let mut edges = Vec::new();
        for (r, ring) in rings.iter().enumerate() {
            for (i, a, b) in ring_edges(ring) {
                edges.push(Segment { a, b, ring: r, index: i });
            }
        }
        let area = 0.5 * (signed_area2(&outer) + holes.iter().map(|h| signed_area2(h)).sum::<f64>());

        Ok(Environment { outer, holes, epsilon, edges, min, max, area })
    }

    pub fn from_json(s: &str) -> Result<Self, EnvironmentLoadError> {
        let raw: RawEnvironment = serde_json::from_str(s)?;
        Ok(Environment::validate(raw)?)
    }

    pub fn outer(&self) -> &[Point] {
        &self.outer
    }

    pub fn holes(&self) -> &[Vec<Point>] {
        &self.holes
    }

    pub fn rings(&self) -> impl Iterator<Item = &[Point]> {
        std::iter::once(self.outer.as_slice()).chain(self.holes.iter().map(|h| h.as_slice()))
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn edges(&self) -> &[Segment] {
        &self.edges
    }

    pub fn area(&self) -> f64 {
        self.area
    }

    pub fn bounds(&self) -> (Point, Point) {
        (self.min, self.max)
    }

    pub fn diameter(&self) -> f64 {
        self.min.dist(self.max)
    }

    /// Smallest region area treated as geometrically meaningful. Overlay output
    /// below this is rounding noise.
    pub fn area_tolerance(&self) -> f64 {
        1e-7 * self.area
    }

    pub fn distance_to_boundary(&self, p: Point) -> f64 {
        self.edges.iter().map(|e| point_segment_distance(p, e.a, e.b)).fold(f64::INFINITY, f64::min)
    }

    /// Closed-set membership: boundary points within epsilon count as inside.
    pub fn contains_point(&self, p: Point) -> bool {
        if self.edges.iter().any(|e| point_segment_distance(p, e.a, e.b) <= self.epsilon) {
            return true;
        }
        ring_parity(self.rings(), p)
    }

    /// True iff the closed segment `ab` lies in the environment. Grazing a
    /// vertex or sliding along an edge counts as contained.
    pub fn contains_segment(&self, a: Point, b: Point) -> bool {
        if !self.contains_point(a) || !self.contains_point(b) {
            return false;
        }
        let ab = b - a;
        let len = ab.norm();
        if len <= self.epsilon {
            return true;
        }
        let eps = self.epsilon;
        let mut cuts: Vec<f64> = Vec::new();
        for e in &self.edges {
            let sc = ab.cross(e.a - a) / len;
            let sd = ab.cross(e.b - a) / len;
            let cd = e.b - e.a;
            let elen = cd.norm();
            let sa = cd.cross(a - e.a) / elen;
            let sb = cd.cross(b - e.a) / elen;
            let strictly_split = |u: f64, v: f64| (u > eps && v < -eps) || (u < -eps && v > eps);
            if strictly_split(sc, sd) && strictly_split(sa, sb) {
                return false;
            }
            for p in [e.a, e.b] {
                if point_segment_distance(p, a, b) <= eps {
                    cuts.push((p - a).dot(ab) / (len * len));
                }
            }
            // Near-crossings that escape the strict test still cut the segment.
            if !strictly_split(sc, sd) && (sc * sd < 0.0) && (sa * sb < 0.0) {
                let t = sa / (sa - sb);
                cuts.push(t);
            }
        }
        cuts.push(0.0);
        cuts.push(1.0);
        cuts.retain(|t| (0.0..=1.0).contains(t));
        cuts.sort_by(f64::total_cmp);
        let min_gap = eps / len;
        cuts.windows(2)
            .filter(|w| w[1] - w[0] > min_gap)
            .all(|w| self.contains_point(a.lerp(b, 0.5 * (w[0] + w[1]))))
    }

    /// Outer boundary and holes in the nested-contour layout used by the overlay engine.
    pub(crate) fn overlay_shape(&self) -> Vec<Vec<[f64; 2]>> {
        self.rings().map(|r| r.iter().map(|&p| p.into()).collect()).collect()
    }
}

#[derive(Debug, thiserror::Error)]
pub enum EnvironmentLoadError {
    #[error("malformed environment JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("invalid environment: {0}")]
    Geometry(#[from] GeometryError),
}
