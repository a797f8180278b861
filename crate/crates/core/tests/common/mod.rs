#![allow(dead_code)]

use pursuit_core::geometry::{Environment, Point};
use rand::Rng;

/// Shipped environments with at least one reflex vertex.
pub const NON_CONVEX: &[&str] = &["l_shaped", "corridors", "web_hall", "two_holes"];

pub fn random_point<R: Rng>(env: &Environment, rng: &mut R) -> Point {
    let (lo, hi) = env.bounds();
    loop {
        let p = Point::new(rng.random_range(lo.x..hi.x), rng.random_range(lo.y..hi.y));
        if env.contains_point(p) && env.distance_to_boundary(p) > 1e-6 {
            return p;
        }
    }
}

/// A random point joinable to `from` by a segment in the free space.
pub fn random_reachable<R: Rng>(env: &Environment, from: Point, rng: &mut R) -> Point {
    loop {
        let q = random_point(env, rng);
        if env.contains_segment(from, q) {
            return q;
        }
    }
}
