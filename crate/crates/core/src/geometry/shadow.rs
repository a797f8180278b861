use serde::{Deserialize, Serialize};

use super::region::difference;
use super::{visibility_polygon, Environment, GeometryError, Point, Region, VisPolygon};

/// One connected component of the unseen region.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Shadow {
    pub id: usize,
    pub region: Region,
}

/// The shadows of a point set, in canonical order (by the lexicographically
/// smallest vertex of each region).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShadowSet {
    pub shadows: Vec<Shadow>,
    pub source_points: Vec<Point>,
}

impl ShadowSet {
    pub fn len(&self) -> usize {
        self.shadows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.shadows.is_empty()
    }

    pub fn total_area(&self) -> f64 {
        self.shadows.iter().map(|s| s.region.area()).sum()
    }

    /// Index of the shadow containing `p`, if any.
    pub fn locate(&self, p: Point) -> Option<usize> {
        self.shadows.iter().position(|s| s.region.contains(p))
    }

    /// Builds the shadow set of precomputed visibility polygons.
    ///
    /// Each polygon is pushed outward along its own rays by a tiny distance
    /// before subtraction. Rays through reflex vertices keep their line, while
    /// edges lying on walls move into the obstacle, so rounding cannot leave a
    /// zero-width strip along a wall that would glue separate shadows together.
    pub fn from_visibility(env: &Environment, polys: &[&VisPolygon]) -> ShadowSet {
        let push = 1e-7 * env.diameter();
        let clips: Vec<Vec<[f64; 2]>> = polys
            .iter()
            .map(|v| {
                let q = v.viewpoint;
                v.boundary
                    .iter()
                    .map(|&p| {
                        let r = p.dist(q);
                        if r > 0.0 { p + (p - q) * (push / r) } else { p }
                    })
                    .map(Into::into)
                    .collect()
            })
            .collect();
        let min_area = env.area_tolerance();
        let mut regions: Vec<Region> =
            difference(&env.overlay_shape(), &clips).into_iter().filter(|r| r.area() > min_area).collect();
        regions.sort_by(|a, b| {
            a.min_vertex().lex_cmp(&b.min_vertex()).then(a.area().total_cmp(&b.area()))
        });
        ShadowSet {
            shadows: regions.into_iter().enumerate().map(|(id, region)| Shadow { id, region }).collect(),
            source_points: polys.iter().map(|v| v.viewpoint).collect(),
        }
    }
}

/// Connected components of `F \ ⋃ V(p)`. An empty point list yields `F` itself.
pub fn shadow_set(env: &Environment, points: &[Point]) -> Result<ShadowSet, GeometryError> {
    if let Some(index) = points.iter().position(|&p| !env.contains_point(p)) {
        return Err(GeometryError::PointOutside { index });
    }
    let polys = points.iter().map(|&p| visibility_polygon(env, p)).collect::<Result<Vec<_>, _>>()?;
    let refs: Vec<&VisPolygon> = polys.iter().collect();
    Ok(ShadowSet::from_visibility(env, &refs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::RawEnvironment;

    fn env(outer: &[[f64; 2]], holes: &[&[[f64; 2]]]) -> Environment {
        Environment::validate(RawEnvironment {
            outer: outer.iter().map(|&p| p.into()).collect(),
            holes: holes.iter().map(|h| h.iter().map(|&p| p.into()).collect()).collect(),
            epsilon: None,
        })
        .unwrap()
    }

    #[test]
    fn convex_has_no_shadows() {
        let e = env(&[[0., 0.], [3., 0.], [3., 2.], [0., 2.]], &[]);
        assert!(shadow_set(&e, &[Point::new(1.0, 1.0)]).unwrap().is_empty());
    }

    #[test]
    fn empty_point_list_is_whole_environment() {
        let e = env(&[[0., 0.], [3., 0.], [3., 2.], [0., 2.]], &[]);
        let s = shadow_set(&e, &[]).unwrap();
        assert_eq!(s.len(), 1);
        assert!((s.total_area() - 6.0).abs() < 1e-9);
    }

    #[test]
    fn l_room_one_shadow() {
        let e = env(&[[0., 0.], [2., 0.], [2., 1.], [1., 1.], [1., 2.], [0., 2.]], &[]);
        let s = shadow_set(&e, &[Point::new(1.8, 0.5)]).unwrap();
        assert_eq!(s.len(), 1);
        assert!(s.locate(Point::new(0.5, 1.9)).is_some());
    }

    #[test]
    fn point_outside_rejected() {
        let e = env(&[[0., 0.], [2., 0.], [2., 1.], [1., 1.], [1., 2.], [0., 2.]], &[]);
        assert_eq!(
            shadow_set(&e, &[Point::new(0.5, 0.5), Point::new(1.5, 1.5)]).unwrap_err(),
            GeometryError::PointOutside { index: 1 }
        );
    }

    #[test]
    fn canonical_order_is_deterministic() {
        let e = env(&[[0., 0.], [10., 0.], [10., 10.], [0., 10.]], &[&[[4., 4.], [6., 4.], [6., 6.], [4., 6.]]]);
        let pts = [Point::new(1.0, 5.0)];
        let a = shadow_set(&e, &pts).unwrap();
        let b = shadow_set(&e, &pts).unwrap();
        assert_eq!(a, b);
        for w in a.shadows.windows(2) {
            assert!(w[0].region.min_vertex().lex_cmp(&w[1].region.min_vertex()).is_le());
        }
    }
}
