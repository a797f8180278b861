use serde::{Deserialize, Serialize};

use super::{Environment, GeometryError, Point, Region};

/// Visibility polygon `V(q)`: star-shaped about `viewpoint`, counter-clockwise.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VisPolygon {
    pub viewpoint: Point,
    pub boundary: Vec<Point>,
}

impl VisPolygon {
    pub fn contains(&self, p: Point) -> bool {
        super::ring_parity([&self.boundary], p)
    }

    pub fn region(&self) -> Region {
        Region::simple(self.boundary.clone())
    }

    pub fn area(&self) -> f64 {
        0.5 * super::signed_area2(&self.boundary)
    }

    pub fn distance_to_boundary(&self, p: Point) -> f64 {
        let n = self.boundary.len();
        (0..n)
            .map(|i| super::point_segment_distance(p, self.boundary[i], self.boundary[(i + 1) % n]))
            .fold(f64::INFINITY, f64::min)
    }
}

/// A ray from the viewpoint through one or more collinear environment vertices.
struct Ray {
    dir: Point,
    angle: f64,
}

/// Computes `V(q)` by an angular sweep over the environment's vertices.
///
/// For every distinct vertex direction, the nearest boundary hit is found
/// separately for rays infinitesimally clockwise ("right") and
/// counter-clockwise ("left") of it; emitting right-then-left hits in angular
/// order traces the boundary. Between consecutive directions the visible
/// boundary follows a single edge, so no other points are needed.
pub fn visibility_polygon(env: &Environment, q: Point) -> Result<VisPolygon, GeometryError> {
    if !env.contains_point(q) {
        return Err(GeometryError::ViewpointOutside { x: q.x, y: q.y });
    }
    let eye = nudge_inside(env, q);
    let eps = env.epsilon();

    let mut rays: Vec<Ray> = env
        .rings()
        .flat_map(|r| r.iter())
        .filter(|&&v| v.dist(eye) > eps)
        .map(|&v| {
            let d = v - eye;
            Ray { dir: d * (1.0 / d.norm()), angle: d.y.atan2(d.x) }
        })
        .collect();
    rays.sort_by(|a, b| a.angle.total_cmp(&b.angle));
    // Collapse collinear directions (same ray through several vertices).
    let mut groups: Vec<Ray> = Vec::with_capacity(rays.len());
    for r in rays {
        match groups.last() {
            Some(g) if g.dir.cross(r.dir).abs() <= 1e-13 && g.dir.dot(r.dir) > 0.0 => {}
            _ => groups.push(r),
        }
    }
    if groups.len() > 1 {
        let (f, l) = (&groups[0], &groups[groups.len() - 1]);
        if f.dir.cross(l.dir).abs() <= 1e-13 && f.dir.dot(l.dir) > 0.0 {
            groups.pop();
        }
    }

    let mut boundary: Vec<Point> = Vec::with_capacity(2 * groups.len());
    for g in &groups {
        let (right, left) = ray_hits(env, eye, g.dir, eps);
        for t in [right, left] {
            if !t.is_finite() {
                continue;
            }
            let p = eye + g.dir * t;
            if boundary.last().map_or(true, |last: &Point| last.dist(p) > eps) {
                boundary.push(p);
            }
        }
    }
    while boundary.len() > 1 && boundary[0].dist(boundary[boundary.len() - 1]) <= eps {
        boundary.pop();
    }
    remove_collinear(&mut boundary, eps);
    Ok(VisPolygon { viewpoint: q, boundary })
}

/// Nearest blocking distances along `dir` just to the right and just to the
/// left of the ray.
fn ray_hits(env: &Environment, eye: Point, dir: Point, eps: f64) -> (f64, f64) {
    let mut right = f64::INFINITY;
    let mut left = f64::INFINITY;
    for e in env.edges() {
        let (ca, cb) = (e.a - eye, e.b - eye);
        let (sa, sb) = (dir.cross(ca), dir.cross(cb));
        let (ta, tb) = (dir.dot(ca), dir.dot(cb));
        let side = |s: f64| {
            if s > eps {
                1
            } else if s < -eps {
                -1
            } else {
                0
            }
        };
        match (side(sa), side(sb)) {
            (1, -1) | (-1, 1) => {
                let t = ta + (tb - ta) * sa / (sa - sb);
                if t > -eps {
                    let t = t.max(0.0);
                    right = right.min(t);
                    left = left.min(t);
                }
            }
            (0, s) | (s, 0) if s != 0 => {
                let t = if side(sa) == 0 { ta } else { tb };
                if t > -eps {
                    let t = t.max(0.0);
                    if s > 0 {
                        left = left.min(t);
                    } else {
                        right = right.min(t);
                    }
                }
            }
            _ => {}
        }
    }
    (right, left)
}

/// Viewpoints on (or within epsilon of) the boundary are moved a tiny
/// distance into the interior so that incident edges do not block every ray.
fn nudge_inside(env: &Environment, q: Point) -> Point {
    let eps = env.epsilon();
    if env.distance_to_boundary(q) > 4.0 * eps {
        return q;
    }
    for scale in [16.0, 64.0, 256.0, 1024.0] {
        let r = scale * eps;
        for k in 0..32 {
            let a = std::f64::consts::TAU * (k as f64 + 0.5) / 32.0;
            let p = q + Point::new(a.cos(), a.sin()) * r;
            if env.distance_to_boundary(p) > 4.0 * eps && super::ring_parity(env.rings(), p) {
                return p;
            }
        }
    }
    q
}

fn remove_collinear(ring: &mut Vec<Point>, eps: f64) {
    let mut changed = true;
    while changed && ring.len() > 3 {
        changed = false;
        let n = ring.len();
        for i in 0..n {
            let (a, b, c) = (ring[(i + n - 1) % n], ring[i], ring[(i + 1) % n]);
            let ac = c - a;
            let len = ac.norm();
            if len > 0.0 && (ac.cross(b - a) / len).abs() <= 0.1 * eps && (b - a).dot(c - b) >= 0.0 {
                ring.remove(i);
                changed = true;
                break;
            }
        }
    }
}
