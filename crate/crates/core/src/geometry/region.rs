use i_overlay::core::fill_rule::FillRule;
use i_overlay::core::overlay_rule::OverlayRule;
use i_overlay::float::single::SingleFloatOverlay;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{ring_parity, signed_area2, Point};

/// A polygon with holes: one counter-clockwise outer ring and clockwise holes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Region {
    pub outer: Vec<Point>,
    #[serde(default)]
    pub holes: Vec<Vec<Point>>,
}

/// Axis-aligned bounding box `(min, max)`.
pub type Bounds = (Point, Point);

impl Region {
    pub fn simple(outer: Vec<Point>) -> Self {
        Region { outer, holes: Vec::new() }
    }

    pub fn rings(&self) -> impl Iterator<Item = &[Point]> {
        std::iter::once(self.outer.as_slice()).chain(self.holes.iter().map(|h| h.as_slice()))
    }

    pub fn area(&self) -> f64 {
        0.5 * (signed_area2(&self.outer).abs() - self.holes.iter().map(|h| signed_area2(h).abs()).sum::<f64>())
    }

    pub fn bounds(&self) -> Bounds {
        let mut min = Point::new(f64::INFINITY, f64::INFINITY);
        let mut max = Point::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
        for p in &self.outer {
            min = Point::new(min.x.min(p.x), min.y.min(p.y));
            max = Point::new(max.x.max(p.x), max.y.max(p.y));
        }
        (min, max)
    }

    /// Even-odd membership; boundary points are classified arbitrarily.
    pub fn contains(&self, p: Point) -> bool {
        ring_parity(self.rings(), p)
    }

    /// Lexicographically smallest vertex of the outer ring.
    pub fn min_vertex(&self) -> Point {
        *self.outer.iter().min_by(|a, b| a.lex_cmp(b)).expect("region has vertices")
    }

    pub(crate) fn to_shape(&self) -> Vec<Vec<[f64; 2]>> {
        self.rings().map(|r| r.iter().map(|&p| p.into()).collect()).collect()
    }

    pub(crate) fn from_shape(shape: Vec<Vec<[f64; 2]>>) -> Option<Region> {
        let mut rings = shape.into_iter().map(|r| r.into_iter().map(Point::from).collect::<Vec<_>>());
        let mut outer = rings.next()?;
        if outer.len() < 3 {
            return None;
        }
        if signed_area2(&outer) < 0.0 {
            outer.reverse();
        }
        let holes = rings
            .filter(|h| h.len() >= 3)
            .map(|mut h| {
                if signed_area2(&h) > 0.0 {
                    h.reverse();
                }
                h
            })
            .collect();
        Some(Region { outer, holes })
    }

    /// Area of `self ∩ other`.
    pub fn intersection_area(&self, other: &Region) -> f64 {
        if !bounds_overlap(self.bounds(), other.bounds()) {
            return 0.0;
        }
        intersection(self, other).iter().map(Region::area).sum()
    }

    /// Ear-clipping triangulation of the region.
    pub fn triangulate(&self) -> Vec<[Point; 3]> {
        let mut data: Vec<[f64; 2]> = Vec::new();
        let mut hole_idx: Vec<u32> = Vec::new();
        for (k, ring) in self.rings().enumerate() {
            if k > 0 {
                hole_idx.push(data.len() as u32);
            }
            data.extend(ring.iter().map(|&p| <[f64; 2]>::from(p)));
        }
        let mut tris: Vec<u32> = Vec::new();
        earcut::Earcut::new().earcut(data.iter().copied(), &hole_idx, &mut tris);
        tris.chunks_exact(3)
            .map(|t| [t[0], t[1], t[2]].map(|i| Point::from(data[i as usize])))
            .collect()
    }
}

pub(crate) fn bounds_overlap(a: Bounds, b: Bounds) -> bool {
    a.0.x <= b.1.x && b.0.x <= a.1.x && a.0.y <= b.1.y && b.0.y <= a.1.y
}

fn shapes_to_regions(shapes: Vec<Vec<Vec<[f64; 2]>>>) -> Vec<Region> {
    shapes.into_iter().filter_map(Region::from_shape).collect()
}

/// `subject \ ⋃ clips`, split into connected pieces.
pub(crate) fn difference(subject: &[Vec<[f64; 2]>], clips: &[Vec<[f64; 2]>]) -> Vec<Region> {
    if clips.is_empty() {
        let shape = subject.to_vec();
        return Region::from_shape(shape).into_iter().collect();
    }
    shapes_to_regions(subject.overlay(&clips, OverlayRule::Difference, FillRule::NonZero))
}

pub(crate) fn intersection(a: &Region, b: &Region) -> Vec<Region> {
    shapes_to_regions(a.to_shape().overlay(&b.to_shape(), OverlayRule::Intersect, FillRule::NonZero))
}

/// Uniform point in a triangle.
fn sample_triangle<R: Rng + ?Sized>(t: &[Point; 3], rng: &mut R) -> Point {
    let (mut u, mut v): (f64, f64) = (rng.random(), rng.random());
    if u + v > 1.0 {
        u = 1.0 - u;
        v = 1.0 - v;
    }
    t[0] + (t[1] - t[0]) * u + (t[2] - t[0]) * v
}

/// Uniform sample from the union of disjoint regions: triangulate, pick a
/// triangle with probability proportional to area, then sample inside it.
pub fn sample_uniform<R: Rng + ?Sized>(regions: &[Region], rng: &mut R) -> Option<Point> {
    let tris: Vec<[Point; 3]> = regions.iter().flat_map(Region::triangulate).collect();
    let weights: Vec<f64> = tris.iter().map(|t| 0.5 * (t[1] - t[0]).cross(t[2] - t[0]).abs()).collect();
    let total: f64 = weights.iter().sum();
    if !(total > 0.0) {
        return None;
    }
    let mut pick = rng.random::<f64>() * total;
    for (t, w) in tris.iter().zip(&weights) {
        if pick < *w {
            return Some(sample_triangle(t, rng));
        }
        pick -= w;
    }
    tris.last().map(|t| sample_triangle(t, rng))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    fn sq(x0: f64, y0: f64, s: f64) -> Vec<Point> {
        vec![Point::new(x0, y0), Point::new(x0 + s, y0), Point::new(x0 + s, y0 + s), Point::new(x0, y0 + s)]
    }

    #[test]
    fn region_area_with_hole() {
        let mut hole = sq(0.25, 0.25, 0.5);
        hole.reverse();
        let r = Region { outer: sq(0.0, 0.0, 1.0), holes: vec![hole] };
        assert!((r.area() - 0.75).abs() < 1e-12);
        assert!(!r.contains(Point::new(0.5, 0.5)));
        assert!(r.contains(Point::new(0.1, 0.5)));
        let tri_area: f64 = r.triangulate().iter().map(|t| 0.5 * (t[1] - t[0]).cross(t[2] - t[0]).abs()).sum();
        assert!((tri_area - 0.75).abs() < 1e-12);
    }

    #[test]
    fn overlap_areas() {
        let a = Region::simple(sq(0.0, 0.0, 1.0));
        let b = Region::simple(sq(0.5, 0.5, 1.0));
        assert!((a.intersection_area(&b) - 0.25).abs() < 1e-9);
        let c = Region::simple(sq(2.0, 2.0, 1.0));
        assert_eq!(a.intersection_area(&c), 0.0);
    }

    #[test]
    fn difference_splits_components() {
        let subject = vec![sq(0.0, 0.0, 3.0).into_iter().map(<[f64; 2]>::from).collect::<Vec<_>>()];
        let bar: Vec<[f64; 2]> = vec![[1.0, -1.0], [2.0, -1.0], [2.0, 4.0], [1.0, 4.0]];
        let pieces = difference(&subject, &[bar]);
        assert_eq!(pieces.len(), 2);
        for p in &pieces {
            assert!((p.area() - 3.0).abs() < 1e-9);
        }
    }

    #[test]
    fn uniform_sampling_stays_inside() {
        let mut hole = sq(0.25, 0.25, 0.5);
        hole.reverse();
        let r = Region { outer: sq(0.0, 0.0, 1.0), holes: vec![hole] };
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for _ in 0..500 {
            let p = sample_uniform(std::slice::from_ref(&r), &mut rng).unwrap();
            assert!(r.contains(p));
        }
    }
}
