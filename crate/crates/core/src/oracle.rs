//! Brute-force contamination tracking on a regular grid.
//!
//! Shares no code with the shadow-event machinery: visibility polygons are
//! rasterized onto cell centers and contamination spreads by flood fill
//! through unseen cells, one small time step at a time.

use serde::{Deserialize, Serialize};

use crate::geometry::{visibility_polygon, Environment, GeometryError, Point, VisPolygon};

/// Square cells over the environment's bounding box; only cells whose center
/// lies in the interior of the free space take part.
#[derive(Clone, Debug)]
pub struct Grid {
    origin: Point,
    cell: f64,
    cols: usize,
    rows: usize,
    inside: Vec<bool>,
    /// Per cell, bit k set when the link to back neighbor k (left, up-left,
    /// up, up-right) crosses an environment edge.
    cut: Vec<u8>,
}

impl Grid {
    /// `resolution` cells along the longer side of the bounding box.
    pub fn new(env: &Environment, resolution: usize) -> Grid {
        let (min, max) = env.bounds();
        let cell = (max.x - min.x).max(max.y - min.y) / resolution.max(1) as f64;
        let cols = (((max.x - min.x) / cell).ceil() as usize).max(1);
        let rows = (((max.y - min.y) / cell).ceil() as usize).max(1);
        let mut g = Grid { origin: min, cell, cols, rows, inside: Vec::new(), cut: Vec::new() };
        let eps = env.epsilon();
        g.inside = (0..cols * rows)
            .map(|i| {
                let c = g.center(i);
                env.contains_point(c) && env.distance_to_boundary(c) > eps
            })
            .collect();
        let walls = g.walls(env.edges().iter().map(|e| (e.a, e.b)));
        g.cut = (0..g.len())
            .map(|i| {
                let mut bits = 0u8;
                for (k, j) in g.back_neighbors(i).into_iter().enumerate() {
                    if let Some(j) = j.filter(|&j| g.inside[i] && g.inside[j]) {
                        if g.blocked(i, j, &[&walls]) {
                            bits |= 1 << k;
                        }
                    }
                }
                bits
            })
            .collect();
        g
    }

    /// Left, up-left, up and up-right neighbors, in row-major scan order.
    fn back_neighbors(&self, i: usize) -> [Option<usize>; 4] {
        let (r, c, cols) = (i / self.cols, i % self.cols, self.cols);
        [
            (c > 0).then(|| i - 1),
            (r > 0 && c > 0).then(|| i - cols - 1),
            (r > 0).then(|| i - cols),
            (r > 0 && c + 1 < cols).then(|| i - cols + 1),
        ]
    }

    pub fn len(&self) -> usize {
        self.cols * self.rows
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn cell_size(&self) -> f64 {
        self.cell
    }

    pub fn center(&self, i: usize) -> Point {
        let (r, c) = (i / self.cols, i % self.cols);
        Point::new(self.origin.x + (c as f64 + 0.5) * self.cell, self.origin.y + (r as f64 + 0.5) * self.cell)
    }

    pub fn is_inside(&self, i: usize) -> bool {
        self.inside[i]
    }

    pub fn inside_cells(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len()).filter(|&i| self.inside[i])
    }

    /// Marks every cell whose center lies in `poly`, by scanlines.
    pub fn rasterize(&self, poly: &VisPolygon, out: &mut [bool]) {
        let b = &poly.boundary;
        let n = b.len();
        let mut xs: Vec<f64> = Vec::new();
        for r in 0..self.rows {
            let y = self.origin.y + (r as f64 + 0.5) * self.cell;
            xs.clear();
            for k in 0..n {
                let (p, q) = (b[k], b[(k + 1) % n]);
                if (p.y <= y) != (q.y <= y) {
                    xs.push(p.x + (y - p.y) / (q.y - p.y) * (q.x - p.x));
                }
            }
            xs.sort_by(f64::total_cmp);
            for pair in xs.chunks_exact(2) {
                let c0 = ((pair[0] - self.origin.x) / self.cell - 0.5).ceil().max(0.0) as usize;
                let c1 = ((pair[1] - self.origin.x) / self.cell - 0.5).floor();
                if c1 < 0.0 {
                    continue;
                }
                let c1 = (c1 as usize).min(self.cols - 1);
                for c in c0..=c1 {
                    out[r * self.cols + c] = true;
                }
            }
        }
    }

    /// Inside cells seen by none of `polys`.
    pub fn unseen(&self, polys: &[&VisPolygon]) -> Vec<bool> {
        let mut seen = vec![false; self.len()];
        for p in polys {
            self.rasterize(p, &mut seen);
        }
        seen.iter().zip(&self.inside).map(|(&s, &i)| i && !s).collect()
    }

    /// 8-connected components of `mask`, never linked across an environment
    /// edge: a component id per cell (`u32::MAX` outside the mask) and the size of each component. Ids follow the
    /// row-major order of each component's first cell.
    pub fn components(&self, mask: &[bool]) -> (Vec<u32>, Vec<usize>) {
        self.components_within(mask, &[])
    }

    /// Like [`Grid::components`], except that two neighboring cells are not
    /// joined when the segment between their centers crosses one of `walls`.
    pub fn components_within(&self, mask: &[bool], walls: &[&Walls]) -> (Vec<u32>, Vec<usize>) {
        fn find(parent: &mut [u32], mut x: u32) -> u32 {
            while parent[x as usize] != x {
                let p = parent[parent[x as usize] as usize];
                parent[x as usize] = p;
                x = p;
            }
            x
        }
        let (rows, cols) = (self.rows, self.cols);
        let mut walled = vec![false; self.len()];
        for w in walls {
            for &i in &w.cells {
                walled[i as usize] = true;
            }
        }
        let mut id = vec![u32::MAX; self.len()];
        let mut parent: Vec<u32> = Vec::new();
        for r in 0..rows {
            for c in 0..cols {
                let i = r * cols + c;
                if !mask[i] {
                    continue;
                }
                let mut label = u32::MAX;
                for (k, j) in self.back_neighbors(i).into_iter().enumerate() {
                    let Some(j) = j else { continue };
                    let l = id[j];
                    if l == u32::MAX
                        || self.cut[i] & (1 << k) != 0
                        || ((walled[i] || walled[j]) && self.blocked(i, j, walls))
                    {
                        continue;
                    }
                    if label == u32::MAX {
                        label = l;
                    } else {
                        let (a, b) = (find(&mut parent, label), find(&mut parent, l));
                        if a != b {
                            parent[a.max(b) as usize] = a.min(b);
                        }
                    }
                }
                if label == u32::MAX {
                    label = parent.len() as u32;
                    parent.push(label);
                }
                id[i] = label;
            }
        }
        let mut compact = vec![u32::MAX; parent.len()];
        let mut sizes = Vec::new();
        for l in id.iter_mut().filter(|l| **l != u32::MAX) {
            let root = find(&mut parent, *l) as usize;
            if compact[root] == u32::MAX {
                compact[root] = sizes.len() as u32;
                sizes.push(0);
            }
            *l = compact[root];
            sizes[*l as usize] += 1;
        }
        (id, sizes)
    }

    fn blocked(&self, i: usize, j: usize, walls: &[&Walls]) -> bool {
        let (a, b) = (self.center(i), self.center(j));
        walls.iter().any(|w| w.at(i).iter().chain(w.at(j)).any(|&(c, d)| crosses(a, b, c, d)))
    }

    /// Indexes `segments` by the cells their closed extent touches.
    pub fn walls(&self, segments: impl IntoIterator<Item = (Point, Point)>) -> Walls {
        let segs: Vec<(Point, Point)> = segments.into_iter().collect();
        let mut hits: Vec<(u32, u32)> = Vec::new();
        let slack = 1e-9 * self.cell;
        let col = |x: f64| ((x - self.origin.x) / self.cell).floor().clamp(0.0, (self.cols - 1) as f64) as usize;
        let row = |y: f64| ((y - self.origin.y) / self.cell).floor().clamp(0.0, (self.rows - 1) as f64) as usize;
        for (k, &(p, q)) in segs.iter().enumerate() {
            let (lo, hi) = if p.x <= q.x { (p, q) } else { (q, p) };
            for c in col(lo.x - slack)..=col(hi.x + slack) {
                let x0 = (self.origin.x + c as f64 * self.cell).max(lo.x);
                let x1 = (self.origin.x + (c + 1) as f64 * self.cell).min(hi.x);
                let y_at = |x: f64| if hi.x > lo.x { lo.y + (x - lo.x) / (hi.x - lo.x) * (hi.y - lo.y) } else { lo.y };
                let (ya, yb) = if hi.x > lo.x { (y_at(x0), y_at(x1)) } else { (lo.y, hi.y) };
                for r in row(ya.min(yb) - slack)..=row(ya.max(yb) + slack) {
                    hits.push(((r * self.cols + c) as u32, k as u32));
                }
            }
        }
        hits.sort_unstable();
        hits.dedup();
        let mut start = vec![0u32; self.len() + 1];
        for &(cell, _) in &hits {
            start[cell as usize + 1] += 1;
        }
        for i in 0..self.len() {
            start[i + 1] += start[i];
        }
        let mut cells: Vec<u32> = hits.iter().map(|&(c, _)| c).collect();
        cells.dedup();
        Walls { start, cells, segs: hits.iter().map(|&(_, k)| segs[k as usize]).collect() }
    }
}

/// Segments bucketed by grid cell.
#[derive(Clone, Debug, Default)]
pub struct Walls {
    start: Vec<u32>,
    /// Cells touched by at least one segment.
    cells: Vec<u32>,
    segs: Vec<(Point, Point)>,
}

impl Walls {
    fn at(&self, i: usize) -> &[(Point, Point)] {
        match (self.start.get(i), self.start.get(i + 1)) {
            (Some(&a), Some(&b)) => &self.segs[a as usize..b as usize],
            _ => &[],
        }
    }
}

/// Proper crossing of segments `ab` and `cd`.
fn crosses(a: Point, b: Point, c: Point, d: Point) -> bool {
    let orient = |p: Point, q: Point, r: Point| (q.x - p.x) * (r.y - p.y) - (q.y - p.y) * (r.x - p.x);
    let (d1, d2) = (orient(c, d, a), orient(c, d, b));
    let (d3, d4) = (orient(a, b, c), orient(a, b, d));
    d1 * d2 < 0.0 && d3 * d4 < 0.0
}

/// Resolution and time stepping of the contamination simulation.
#[derive(Clone, Copy, Debug)]
pub struct OracleConfig {
    pub resolution: usize,
    /// Largest pursuer displacement per time step, in cells.
    pub max_step_cells: f64,
    pub min_steps: usize,
    /// How many times a step whose unseen components do not overlap well is halved.
    pub max_refine_depth: u32,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig { resolution: 200, max_step_cells: 2.0, min_steps: 8, max_refine_depth: 6 }
    }
}

/// Grid contamination simulator for straight-line joint motions.
pub struct ContaminationOracle<'a> {
    env: &'a Environment,
    grid: Grid,
    cfg: OracleConfig,
}

/// Cells seen from one pursuer and the edges of its visibility polygon.
struct Raster {
    seen: Vec<bool>,
    walls: Walls,
}

/// Unseen cells at one instant with their 8-connected components.
struct Snapshot {
    unseen: Vec<bool>,
    comp: Vec<u32>,
    sizes: Vec<usize>,
}

/// Contamination state of one team (all pursuers, or all but one).
struct Track {
    exclude: Option<usize>,
    contaminated: Vec<bool>,
    snap: Snapshot,
}

impl<'a> ContaminationOracle<'a> {
    pub fn new(env: &'a Environment, cfg: OracleConfig) -> Self {
        ContaminationOracle { env, grid: Grid::new(env, cfg.resolution), cfg }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    /// One visibility raster per pursuer.
    fn rasters(&self, points: &[Point]) -> Result<Vec<Raster>, GeometryError> {
        points
            .iter()
            .map(|&p| {
                let poly = visibility_polygon(self.env, p)?;
                let mut seen = vec![false; self.grid.len()];
                self.grid.rasterize(&poly, &mut seen);
                let b = &poly.boundary;
                // Edges along the boundary are already handled by the grid.
                let eps = self.env.epsilon();
                let edges = (0..b.len()).map(|k| (b[k], b[(k + 1) % b.len()]));
                let walls = self.grid.walls(edges.filter(|&(p, q)| self.env.distance_to_boundary(p.lerp(q, 0.5)) > eps));
                Ok(Raster { seen, walls })
            })
            .collect()
    }

    fn snapshot(&self, rasters: &[Raster], exclude: Option<usize>) -> Snapshot {
        let mut unseen = self.grid.inside.clone();
        let mut walls = Vec::with_capacity(rasters.len());
        for (j, r) in rasters.iter().enumerate() {
            if Some(j) != exclude {
                walls.push(&r.walls);
                for (u, &seen) in unseen.iter_mut().zip(&r.seen) {
                    *u &= !seen;
                }
            }
        }
        let (comp, sizes) = self.grid.components_within(&unseen, &walls);
        Snapshot { unseen, comp, sizes }
    }

    /// Unseen cells of the team at `points`.
    pub fn unseen_at(&self, points: &[Point], exclude: Option<usize>) -> Result<Vec<bool>, GeometryError> {
        Ok(self.snapshot(&self.rasters(points)?, exclude).unseen)
    }

    /// Moves `contaminated` along the motion `from → to` for the team without
    /// `exclude`. The input mask must be a subset of the unseen cells at `from`.
    pub fn run_motion(
        &self,
        from: &[Point],
        to: &[Point],
        exclude: Option<usize>,
        contaminated: Vec<bool>,
    ) -> Result<Vec<bool>, GeometryError> {
        let snap = self.snapshot(&self.rasters(from)?, exclude);
        let mut tracks = vec![Track { exclude, contaminated, snap }];
        self.advance(from, to, &mut tracks)?;
        Ok(tracks.pop().map(|t| t.contaminated).unwrap_or_default())
    }

    fn advance(&self, from: &[Point], to: &[Point], tracks: &mut [Track]) -> Result<(), GeometryError> {
        let dist = from.iter().zip(to).map(|(a, b)| a.dist(*b)).fold(0.0, f64::max);
        let steps = ((dist / (self.cfg.max_step_cells * self.grid.cell)).ceil() as usize).max(self.cfg.min_steps);
        let at = |t: f64| -> Vec<Point> { from.iter().zip(to).map(|(&a, &b)| a.lerp(b, t)).collect() };
        for k in 1..=steps {
            let (t0, t1) = ((k - 1) as f64 / steps as f64, k as f64 / steps as f64);
            self.step(&at, t0, t1, tracks, 0)?;
        }
        Ok(())
    }

    fn step(
        &self,
        at: &dyn Fn(f64) -> Vec<Point>,
        t0: f64,
        t1: f64,
        tracks: &mut [Track],
        depth: u32,
    ) -> Result<(), GeometryError> {
        let rasters = self.rasters(&at(t1))?;
        let next: Vec<Snapshot> = tracks.iter().map(|tr| self.snapshot(&rasters, tr.exclude)).collect();
        if depth < self.cfg.max_refine_depth && tracks.iter().zip(&next).any(|(tr, n)| !continuous(&tr.snap, n)) {
            let tm = 0.5 * (t0 + t1);
            self.step(at, t0, tm, tracks, depth + 1)?;
            return self.step(at, tm, t1, tracks, depth + 1);
        }
        for (tr, snap) in tracks.iter_mut().zip(next) {
            // A component is contaminated iff it holds a contaminated cell.
            let mut hit = vec![false; snap.sizes.len()];
            for (i, &c) in tr.contaminated.iter().enumerate() {
                if c && snap.unseen[i] {
                    hit[snap.comp[i] as usize] = true;
                }
            }
            tr.contaminated = snap.comp.iter().map(|&c| c != u32::MAX && hit[c as usize]).collect();
            tr.snap = snap;
        }
        Ok(())
    }
}

/// Unseen components at consecutive instants overlap substantially, so a
/// component cannot have slipped past its own extent in one step.
fn continuous(prev: &Snapshot, next: &Snapshot) -> bool {
    const SMALL: usize = 6;
    let (np, nn) = (prev.sizes.len(), next.sizes.len());
    let mut overlap = vec![0usize; np * nn];
    for i in 0..prev.unseen.len() {
        if prev.unseen[i] && next.unseen[i] {
            overlap[prev.comp[i] as usize * nn + next.comp[i] as usize] += 1;
        }
    }
    for a in 0..np {
        let row = &overlap[a * nn..(a + 1) * nn];
        if prev.sizes[a] > SMALL && row.iter().all(|&o| o == 0) {
            return false;
        }
        for (b, &o) in row.iter().enumerate() {
            let m = prev.sizes[a].min(next.sizes[b]);
            if o > 0 && m > SMALL && 2 * o < m {
                return false;
            }
        }
    }
    (0..nn).all(|b| next.sizes[b] <= SMALL || (0..np).any(|a| overlap[a * nn + b] > 0))
}

/// Outcome of re-simulating one team along a whole path.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TeamVerdict {
    /// Removed pursuer, or `None` for the full team.
    pub excluded: Option<usize>,
    pub passed: bool,
    pub residual_cells: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub full_team: TeamVerdict,
    pub exclusions: Vec<TeamVerdict>,
    pub grid_resolution: usize,
}

impl CheckReport {
    /// Every single-pursuer exclusion clears the environment.
    pub fn passed(&self) -> bool {
        self.exclusions.iter().all(|v| v.passed)
    }

    pub fn first_failure(&self) -> Option<usize> {
        self.exclusions.iter().find(|v| !v.passed).and_then(|v| v.excluded)
    }
}

/// Simulates the full team and every leave-one-out team along `waypoints`,
/// starting with every unseen cell contaminated.
pub fn check_path(env: &Environment, waypoints: &[Vec<Point>], cfg: OracleConfig) -> Result<CheckReport, GeometryError> {
    let oracle = ContaminationOracle::new(env, cfg);
    let n = waypoints.first().map_or(0, Vec::len);
    let teams: Vec<Option<usize>> = std::iter::once(None).chain((0..n).map(Some)).collect();
    let mut tracks: Vec<Track> = Vec::with_capacity(teams.len());
    if let Some(start) = waypoints.first() {
        let rasters = oracle.rasters(start)?;
        for &exclude in &teams {
            let snap = oracle.snapshot(&rasters, exclude);
            tracks.push(Track { exclude, contaminated: snap.unseen.clone(), snap });
        }
    }
    // A team with nothing contaminated stays clear, so it is not simulated further.
    let mut done: Vec<Track> = Vec::new();
    for w in waypoints.windows(2) {
        let (clear, active): (Vec<Track>, Vec<Track>) =
            tracks.into_iter().partition(|t| !t.contaminated.contains(&true));
        done.extend(clear);
        tracks = active;
        if tracks.is_empty() {
            break;
        }
        oracle.advance(&w[0], &w[1], &mut tracks)?;
    }
    tracks.extend(done);
    tracks.sort_by_key(|t| t.exclude.map_or(0, |i| i + 1));
    let mut verdicts = tracks.iter().map(|t| {
        let residual = t.contaminated.iter().filter(|&&c| c).count();
        TeamVerdict { excluded: t.exclude, passed: residual == 0, residual_cells: residual }
    });
    let full_team = verdicts.next().unwrap_or(TeamVerdict { excluded: None, passed: true, residual_cells: 0 });
    Ok(CheckReport { full_team, exclusions: verdicts.collect(), grid_resolution: cfg.resolution })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::RawEnvironment;

    fn env(outer: &[[f64; 2]]) -> Environment {
        Environment::validate(RawEnvironment {
            outer: outer.iter().map(|&p| p.into()).collect(),
            holes: vec![],
            epsilon: None,
        })
        .unwrap()
    }

    fn l_room() -> Environment {
        env(&[[0., 0.], [2., 0.], [2., 1.], [1., 1.], [1., 2.], [0., 2.]])
    }

    fn p(x: f64, y: f64) -> Point {
        Point::new(x, y)
    }

    #[test]
    fn raster_matches_point_membership() {
        let e = l_room();
        let g = Grid::new(&e, 60);
        let v = visibility_polygon(&e, p(1.8, 0.5)).unwrap();
        let mut mask = vec![false; g.len()];
        g.rasterize(&v, &mut mask);
        for i in g.inside_cells() {
            let c = g.center(i);
            if v.distance_to_boundary(c) > 1e-9 {
                assert_eq!(mask[i], v.contains(c), "cell {i} at {c:?}");
            }
        }
    }

    #[test]
    fn components_of_mask() {
        let e = env(&[[0., 0.], [4., 0.], [4., 1.], [0., 1.]]);
        let g = Grid::new(&e, 4);
        assert_eq!((g.cols, g.rows), (4, 1));
        let mask = vec![true, false, true, true];
        let (_, sizes) = g.components(&mask);
        assert_eq!(sizes, vec![1, 2]);
    }

    #[test]
    fn walls_split_components() {
        let e = env(&[[0., 0.], [4., 0.], [4., 4.], [0., 4.]]);
        let g = Grid::new(&e, 8);
        let mask = vec![true; g.len()];
        assert_eq!(g.components(&mask).1, vec![64]);
        // A wall strictly between cell rows, thinner than any cell.
        let w = g.walls([(p(-1.0, 2.01), p(5.0, 1.99))]);
        let (comp, sizes) = g.components_within(&mask, &[&w]);
        assert_eq!(sizes, vec![32, 32]);
        assert_ne!(comp[0], comp[g.len() - 1]);
    }

    #[test]
    fn convex_single_waypoint_passes() {
        let e = env(&[[0., 0.], [3., 0.], [3., 2.], [0., 2.]]);
        let r = check_path(&e, &[vec![p(1.0, 1.0), p(2.0, 1.0)]], OracleConfig::default()).unwrap();
        assert!(r.passed() && r.full_team.passed);
        assert_eq!(r.exclusions.len(), 2);
    }

    #[test]
    fn one_pursuer_sweep_fails_only_without_it() {
        // Pursuer 0 sweeps the corner, pursuer 1 stays in leg A.
        let e = l_room();
        let path = vec![vec![p(1.8, 0.5), p(1.9, 0.5)], vec![p(0.5, 0.5), p(1.9, 0.5)]];
        let r = check_path(&e, &path, OracleConfig { resolution: 80, ..Default::default() }).unwrap();
        assert!(r.full_team.passed);
        assert!(!r.exclusions[0].passed);
        assert!(r.exclusions[1].passed);
        assert_eq!(r.first_failure(), Some(0));
    }

    #[test]
    fn both_sweeping_is_robust() {
        let e = l_room();
        let path = vec![vec![p(1.8, 0.5), p(1.9, 0.3)], vec![p(0.5, 0.5), p(0.3, 0.3)]];
        let r = check_path(&e, &path, OracleConfig { resolution: 80, ..Default::default() }).unwrap();
        assert!(r.passed(), "{r:?}");
    }
}
