//! Sparse webs, their visibility graph, the DFS walk over it, and the joint
//! configuration streams drawn from the walk (RCS) or the web (WS).

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::geometry::region::intersection;
use crate::geometry::{sample_uniform, shadow_set, visibility_polygon, Environment, GeometryError, Point, VisPolygon};
use crate::oracle::Grid;
use crate::rspeg::Jpc;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SamplingError {
    #[error("coverage did not complete after {0} initial points")]
    CoverageStall(usize),
    #[error("visibility graph of the web is disconnected")]
    DisconnectedWeb,
    #[error("need at least 2 pursuers, got {0}")]
    TooFewPursuers(usize),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

/// Web points: `initial` covers the environment by visibility, `intersections`
/// connect overlapping pairs of initial points.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Web {
    pub initial: Vec<Point>,
    pub intersections: Vec<Point>,
}

impl Web {
    /// Initial points followed by intersection points.
    pub fn points(&self) -> Vec<Point> {
        self.initial.iter().chain(&self.intersections).copied().collect()
    }

    pub fn len(&self) -> usize {
        self.initial.len() + self.intersections.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Clone, Copy, Debug)]
pub struct WebConfig {
    /// Cells along the longer side of the coverage grid.
    pub coverage_grid: usize,
    /// Bound on initial points before giving up.
    pub max_initial: usize,
    /// Skip a pair whose overlap already holds an intersection point.
    pub sparse: bool,
}

impl Default for WebConfig {
    fn default() -> Self {
        WebConfig { coverage_grid: 200, max_initial: 10_000, sparse: true }
    }
}

/// Builds a sparse web with the default configuration.
pub fn build_sparse_web(env: &Environment, seed: u64) -> Result<Web, SamplingError> {
    build_web(env, seed, &WebConfig::default())
}

/// Initial points are drawn uniformly from the part of the environment no
/// earlier point sees; once nothing of measurable area is left, any coverage
/// grid cell still unseen contributes its center.
pub fn build_web(env: &Environment, seed: u64, cfg: &WebConfig) -> Result<Web, SamplingError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let grid = Grid::new(env, cfg.coverage_grid);
    let mut initial: Vec<Point> = Vec::new();
    let mut polys: Vec<VisPolygon> = Vec::new();
    loop {
        if initial.len() >= cfg.max_initial {
            return Err(SamplingError::CoverageStall(initial.len()));
        }
        let unseen = shadow_set(env, &initial)?;
        let regions: Vec<_> = unseen.shadows.into_iter().map(|s| s.region).collect();
        let next = match sample_uniform(&regions, &mut rng) {
            Some(p) if env.contains_point(p) => Some(p),
            _ => {
                let refs: Vec<&VisPolygon> = polys.iter().collect();
                let mask = grid.unseen(&refs);
                mask.iter().position(|&u| u).map(|i| grid.center(i))
            }
        };
        let Some(p) = next else { break };
        polys.push(visibility_polygon(env, p)?);
        initial.push(p);
    }

    let tol = env.area_tolerance();
    let regions: Vec<_> = polys.iter().map(VisPolygon::region).collect();
    let mut intersections: Vec<Point> = Vec::new();
    for i in 0..initial.len() {
        for j in i + 1..initial.len() {
            let overlap: Vec<_> = intersection(&regions[i], &regions[j]).into_iter().filter(|r| r.area() > tol).collect();
            if overlap.is_empty() {
                continue;
            }
            if cfg.sparse && intersections.iter().any(|&q| polys[i].contains(q) && polys[j].contains(q)) {
                continue;
            }
            if let Some(q) = sample_uniform(&overlap, &mut rng).filter(|&q| env.contains_point(q)) {
                intersections.push(q);
            }
        }
    }
    Ok(Web { initial, intersections })
}

/// Undirected graph on web points, by adjacency lists sorted by index.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VisGraph {
    pub adjacency: Vec<Vec<usize>>,
}

impl VisGraph {
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Self {
        let mut adjacency = vec![Vec::new(); n];
        for &(a, b) in edges {
            if a != b && !adjacency[a].contains(&b) {
                adjacency[a].push(b);
                adjacency[b].push(a);
            }
        }
        for adj in &mut adjacency {
            adj.sort_unstable();
        }
        VisGraph { adjacency }
    }

    pub fn len(&self) -> usize {
        self.adjacency.len()
    }

    pub fn is_empty(&self) -> bool {
        self.adjacency.is_empty()
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn is_connected(&self) -> bool {
        if self.adjacency.is_empty() {
            return true;
        }
        let mut seen = vec![false; self.len()];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(v) = stack.pop() {
            for &u in &self.adjacency[v] {
                if !seen[u] {
                    seen[u] = true;
                    stack.push(u);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }
}

/// Pairs of web points joined by a segment inside the environment.
pub fn build_visibility_graph(env: &Environment, web: &Web) -> Result<VisGraph, SamplingError> {
    let pts = web.points();
    let mut edges = Vec::new();
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            if env.contains_segment(pts[i], pts[j]) {
                edges.push((i, j));
            }
        }
    }
    let g = VisGraph::from_edges(pts.len(), &edges);
    if !g.is_connected() {
        return Err(SamplingError::DisconnectedWeb);
    }
    Ok(g)
}

/// Vertices of a depth-first traversal, recorded on discovery and again on
/// every return to a parent, except the last return to the root.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WalkD {
    pub indices: Vec<usize>,
}

impl WalkD {
    pub fn d(&self) -> usize {
        self.indices.len()
    }
}

/// Depth-first walk from `root`, visiting neighbors in index order.
pub fn dfs_walk(h: &VisGraph, root: usize) -> WalkD {
    let mut seen = vec![false; h.len()];
    let mut walk = vec![root];
    let mut stack: Vec<(usize, usize)> = vec![(root, 0)];
    seen[root] = true;
    while let Some(top) = stack.last_mut() {
        let (v, next) = *top;
        if let Some(&u) = h.adjacency[v][next..].iter().find(|&&u| !seen[u]) {
            top.1 = h.adjacency[v].iter().position(|&x| x == u).expect("neighbor") + 1;
            seen[u] = true;
            walk.push(u);
            stack.push((u, 0));
        } else {
            stack.pop();
            if let Some(&(parent, _)) = stack.last() {
                walk.push(parent);
            }
        }
    }
    if walk.len() > 1 {
        walk.pop();
    }
    WalkD { indices: walk }
}

/// Spacing between neighboring robots along the walk.
pub fn rcs_spacing(d: usize, n: usize) -> usize {
    d.div_ceil(n)
}

/// Number of advances after the initial sample; the stream has one more sample.
pub fn rcs_advances(d: usize, n: usize) -> usize {
    (2 * d).div_ceil(n)
}

/// Walk positions of sample `k`: robot `i` sits at `(i·s + k) mod d`.
pub fn rcs_indices(d: usize, n: usize, k: usize) -> Vec<usize> {
    let s = rcs_spacing(d, n);
    (0..n).map(|i| (i * s + k) % d).collect()
}

/// The full RCS stream over one walk.
pub fn rcs_stream(points: &[Point], walk: &WalkD, n: usize) -> Vec<Jpc> {
    let d = walk.d();
    (0..=rcs_advances(d, n))
        .map(|k| Jpc(rcs_indices(d, n, k).into_iter().map(|j| points[walk.indices[j]]).collect()))
        .collect()
}

/// `len` samples of `n` points drawn independently and uniformly from the web.
pub fn ws_stream<R: Rng + ?Sized>(points: &[Point], n: usize, len: usize, rng: &mut R) -> Vec<Jpc> {
    (0..len).map(|_| Jpc((0..n).map(|_| points[rng.random_range(0..points.len())]).collect())).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum SamplerKind {
    #[default]
    Rcs,
    Ws,
}

impl std::str::FromStr for SamplerKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "rcs" => Ok(SamplerKind::Rcs),
            "ws" => Ok(SamplerKind::Ws),
            other => Err(format!("unknown sampler {other:?} (expected rcs or ws)")),
        }
    }
}

impl std::fmt::Display for SamplerKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            SamplerKind::Rcs => "rcs",
            SamplerKind::Ws => "ws",
        })
    }
}

/// One web with its walk, as produced for a given seed.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WebWalk {
    pub seed: u64,
    pub web: Web,
    pub graph: VisGraph,
    pub walk: WalkD,
}

/// Builds the web for `seed` and walks its visibility graph from a random root.
pub fn build_web_walk(env: &Environment, seed: u64, cfg: &WebConfig) -> Result<WebWalk, SamplingError> {
    let web = build_web(env, seed, cfg)?;
    let graph = build_visibility_graph(env, &web)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15);
    let root = rng.random_range(0..web.len());
    let walk = dfs_walk(&graph, root);
    Ok(WebWalk { seed, web, graph, walk })
}

/// Endless stream of joint configurations. When one web's stream is used up,
/// a new web is built with the next seed.
pub struct JpcSampler<'a> {
    env: &'a Environment,
    kind: SamplerKind,
    n: usize,
    seed: u64,
    cfg: WebConfig,
    stream_index: u64,
    pending: std::collections::VecDeque<Jpc>,
    webs_built: usize,
    current: Option<WebWalk>,
}

impl<'a> JpcSampler<'a> {
    pub fn new(env: &'a Environment, kind: SamplerKind, n: usize, seed: u64, cfg: WebConfig) -> Result<Self, SamplingError> {
        if n < 2 {
            return Err(SamplingError::TooFewPursuers(n));
        }
        Ok(JpcSampler {
            env,
            kind,
            n,
            seed,
            cfg,
            stream_index: 0,
            pending: Default::default(),
            webs_built: 0,
            current: None,
        })
    }

    pub fn webs_built(&self) -> usize {
        self.webs_built
    }

    /// The web and walk currently being sampled from.
    pub fn current(&self) -> Option<&WebWalk> {
        self.current.as_ref()
    }

    fn refill(&mut self) -> Result<(), SamplingError> {
        loop {
            let seed = self.seed.wrapping_add(self.stream_index);
            self.stream_index += 1;
            let ww = match build_web_walk(self.env, seed, &self.cfg) {
                Ok(ww) => ww,
                Err(SamplingError::DisconnectedWeb) => {
                    log::warn!("web for seed {seed} is disconnected; rebuilding");
                    continue;
                }
                Err(e) => return Err(e),
            };
            self.webs_built += 1;
            let pts = ww.web.points();
            let samples = match self.kind {
                SamplerKind::Rcs => rcs_stream(&pts, &ww.walk, self.n),
                SamplerKind::Ws => {
                    let mut rng = ChaCha8Rng::seed_from_u64(seed);
                    ws_stream(&pts, self.n, 1 + rcs_advances(ww.walk.d(), self.n), &mut rng)
                }
            };
            self.pending.extend(samples);
            self.current = Some(ww);
            return Ok(());
        }
    }

    pub fn next_jpc(&mut self) -> Result<Jpc, SamplingError> {
        if self.pending.is_empty() {
            self.refill()?;
        }
        Ok(self.pending.pop_front().expect("refill yields samples"))
    }
}
