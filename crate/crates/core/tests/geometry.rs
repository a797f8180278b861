mod common;

use common::random_point;
use pursuit_core::fixtures;
use pursuit_core::geometry::{shadow_set, visibility_polygon, Environment, Point, VisPolygon};
use pursuit_core::oracle::Grid;
use std::collections::HashMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Probe cells where the polygon and the segment test disagree, skipping
/// probes within epsilon of the polygon boundary.
fn visibility_disagreements(env: &Environment, grid: &Grid, q: Point) -> usize {
    let v = visibility_polygon(env, q).unwrap();
    grid.inside_cells()
        .map(|i| grid.center(i))
        .filter(|&p| v.distance_to_boundary(p) > env.epsilon())
        .filter(|&p| v.contains(p) != env.contains_segment(q, p))
        .count()
}

#[test]
fn visibility_matches_segment_probes() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for name in fixtures::names() {
        let env = fixtures::load(name).unwrap();
        let grid = Grid::new(&env, 100);
        for _ in 0..8 {
            let q = random_point(&env, &mut rng);
            assert_eq!(visibility_disagreements(&env, &grid, q), 0, "{name} at {q:?}");
        }
    }
}

#[test]
fn convex_room_sees_everything() {
    let env = fixtures::load("convex").unwrap();
    let v = visibility_polygon(&env, Point::new(3.0, 2.0)).unwrap();
    assert!((v.area() - env.area()).abs() < 1e-9);
    assert!(shadow_set(&env, &[Point::new(3.0, 2.0)]).unwrap().is_empty());
}

#[test]
fn deep_in_one_leg_leaves_one_shadow() {
    let env = fixtures::load("l_shaped").unwrap();
    let s = shadow_set(&env, &[Point::new(8.0, 2.0)]).unwrap();
    assert_eq!(s.len(), 1);
    assert!(s.locate(Point::new(2.0, 9.0)).is_some());
}

/// Shadows and visibility polygons partition the grid, and grid components
/// of unseen cells line up one-to-one with shadows.
fn check_partition(env: &Environment, grid: &Grid, team: &[Point]) {
    let polys: Vec<VisPolygon> = team.iter().map(|&p| visibility_polygon(env, p).unwrap()).collect();
    let shadows = shadow_set(env, team).unwrap();
    let eps = env.epsilon();
    let near_edge = |p: Point| polys.iter().any(|v| v.distance_to_boundary(p) <= 1e3 * eps);
    for i in grid.inside_cells() {
        let p = grid.center(i);
        if near_edge(p) {
            continue;
        }
        let seen = polys.iter().any(|v| v.contains(p));
        let shaded = shadows.locate(p).is_some();
        assert!(seen != shaded, "cell at {p:?}: seen {seen}, in shadow {shaded}");
    }

    let refs: Vec<&VisPolygon> = polys.iter().collect();
    let unseen = grid.unseen(&refs);
    let walls: Vec<_> = polys
        .iter()
        .map(|v| grid.walls((0..v.boundary.len()).map(|k| (v.boundary[k], v.boundary[(k + 1) % v.boundary.len()]))))
        .collect();
    let wall_refs: Vec<_> = walls.iter().collect();
    let (comp, _) = grid.components_within(&unseen, &wall_refs);
    // Where a shadow is thinner than a cell, its cells can fall apart on the
    // grid; such stray cells must sit right next to a visibility edge.
    let thin = |i: usize| polys.iter().any(|v| v.distance_to_boundary(grid.center(i)) < 1.5 * grid.cell_size());
    let mut cells: Vec<HashMap<u32, Vec<usize>>> = vec![HashMap::new(); shadows.len()];
    for i in (0..grid.len()).filter(|&i| unseen[i]) {
        if let Some(s) = shadows.locate(grid.center(i)) {
            cells[s].entry(comp[i]).or_default().push(i);
        }
    }
    let mut ids = Vec::new();
    for (s, c) in cells.iter().enumerate() {
        let Some((&main, _)) = c.iter().max_by_key(|(_, v)| v.len()) else { continue };
        for (_, stray) in c.iter().filter(|&(&id, _)| id != main) {
            assert!(stray.iter().all(|&i| thin(i)), "shadow {s} spans several grid components; team {team:?}");
        }
        ids.push(main);
    }
    let before = ids.len();
    ids.sort();
    ids.dedup();
    assert_eq!(ids.len(), before, "two shadows share a grid component");
}

#[test]
fn shadows_partition_unseen_cells() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for name in fixtures::names() {
        let env = fixtures::load(name).unwrap();
        let grid = Grid::new(&env, 200);
        for n in 1..=3 {
            for _ in 0..10 {
                let team: Vec<Point> = (0..n).map(|_| random_point(&env, &mut rng)).collect();
                check_partition(&env, &grid, &team);
            }
        }
    }
}
