//! Rooted roadmap over joint pursuer configurations whose vertices carry
//! antichains of failure shadow labels.

use std::collections::VecDeque;
use std::sync::Arc;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::geometry::{visibility_polygon, Environment, GeometryError, Point, ShadowSet, VisPolygon};
use crate::oracle::{check_path, CheckReport, OracleConfig};
use crate::shadows::{leave_one_out_relations, InfluenceOptions, InfluenceRelation, ShadowError, ShadowLabel};

pub type VertexId = usize;
pub type EdgeId = usize;
pub type LabelId = usize;

/// Joint pursuer configuration: one position per pursuer.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Jpc(pub Vec<Point>);

impl Jpc {
    pub fn new(positions: Vec<Point>) -> Self {
        Jpc(positions)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn positions(&self) -> &[Point] {
        &self.0
    }

    /// Needs at least two pursuers, all inside the environment.
    pub fn validate(&self, env: &Environment) -> Result<(), RspegError> {
        if self.0.len() < 2 {
            return Err(RspegError::InvalidJpc(format!("need at least 2 pursuers, got {}", self.0.len())));
        }
        if let Some(i) = self.0.iter().position(|&p| !p.is_finite() || !env.contains_point(p)) {
            return Err(RspegError::InvalidJpc(format!("pursuer {i} at {:?} is outside the environment", self.0[i])));
        }
        Ok(())
    }

    /// Every pursuer's straight segment to `other` stays in the free space.
    pub fn joinable(&self, other: &Jpc, env: &Environment) -> bool {
        self.0.iter().zip(&other.0).all(|(&a, &b)| env.contains_segment(a, b))
    }
}

/// Predecessor of a label along the path that produced it.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub vertex: VertexId,
    pub label: LabelId,
}

/// Contamination state for each single-pursuer failure: entry `i` is the
/// shadow label over the shadows of the team without pursuer `i`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FailureShadowLabel {
    pub sublabels: Vec<ShadowLabel>,
    pub provenance: Option<Provenance>,
}

impl FailureShadowLabel {
    pub fn is_all_clear(&self) -> bool {
        self.sublabels.iter().all(ShadowLabel::is_all_clear)
    }

    /// Componentwise dominance-or-equality with at least one entry differing.
    pub fn dominates(&self, other: &FailureShadowLabel) -> bool {
        self.sublabels.len() == other.sublabels.len()
            && self.sublabels != other.sublabels
            && self.sublabels.iter().zip(&other.sublabels).all(|(a, b)| a.len() == b.len() && a.is_covered_by(b))
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum RspegError {
    #[error("invalid joint configuration: {0}")]
    InvalidJpc(String),
    #[error("label {label} at vertex {vertex} is not all clear")]
    NotAllClear { vertex: VertexId, label: LabelId },
    #[error("provenance chain from label {0} does not reach the root")]
    BrokenProvenance(LabelId),
    #[error("no label {0}")]
    UnknownLabel(LabelId),
    #[error("deadline passed")]
    Timeout,
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Shadow(ShadowError),
}

impl From<ShadowError> for RspegError {
    fn from(e: ShadowError) -> Self {
        match e {
            ShadowError::Timeout => RspegError::Timeout,
            ShadowError::Geometry(g) => RspegError::Geometry(g),
            other => RspegError::Shadow(other),
        }
    }
}

/// How influence relations are obtained during propagation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RelationMode {
    /// Built once per edge and reused.
    Cached,
    /// Rebuilt from scratch every time a label crosses an edge.
    Naive,
}

#[derive(Clone, Debug)]
pub struct Vertex {
    pub jpc: Jpc,
    /// Shadows of the team without pursuer `i`, for each `i`.
    pub shadows: Vec<ShadowSet>,
    labels: Vec<LabelId>,
}

impl Vertex {
    /// Ids of the labels currently stored here.
    pub fn labels(&self) -> &[LabelId] {
        &self.labels
    }
}

#[derive(Clone, Debug)]
pub struct Edge {
    pub from: VertexId,
    pub to: VertexId,
    relations: Option<Vec<InfluenceRelation>>,
}

impl Edge {
    /// Cached relations, one per excluded pursuer (absent in naive mode).
    pub fn relations(&self) -> Option<&[InfluenceRelation]> {
        self.relations.as_deref()
    }
}

#[derive(Clone, Debug)]
struct StoredLabel {
    vertex: VertexId,
    label: FailureShadowLabel,
    alive: bool,
}

/// Running totals over the life of the graph.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphCounters {
    pub labels_created: usize,
    pub labels_pruned: usize,
    pub relations_computed: usize,
    pub propagations: usize,
    pub ambiguous_edges: usize,
}

/// What one `add_sample` call changed.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct AddReport {
    pub vertex: VertexId,
    pub new_edges: Vec<EdgeId>,
    pub skipped_ambiguous: usize,
    pub labels_added: usize,
    pub labels_pruned: usize,
    /// First all-clear label reached, if any.
    pub all_clear: Option<(VertexId, LabelId)>,
}

/// Waypoints from the root to a vertex holding an all-clear label.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Solution {
    pub waypoints: Vec<Jpc>,
}

impl Solution {
    pub fn paths(&self) -> Vec<Vec<Point>> {
        self.waypoints.iter().map(|j| j.0.clone()).collect()
    }
}

pub struct Rspeg {
    env: Arc<Environment>,
    n: usize,
    mode: RelationMode,
    influence: InfluenceOptions,
    root: VertexId,
    vertices: Vec<Vertex>,
    edges: Vec<Edge>,
    out_edges: Vec<Vec<EdgeId>>,
    labels: Vec<StoredLabel>,
    counters: GraphCounters,
}

fn leave_one_out_shadows(env: &Environment, jpc: &Jpc) -> Result<Vec<ShadowSet>, GeometryError> {
    let polys: Vec<VisPolygon> = jpc.0.iter().map(|&p| visibility_polygon(env, p)).collect::<Result<_, _>>()?;
    Ok((0..polys.len())
        .map(|i| {
            let refs: Vec<&VisPolygon> = polys.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, p)| p).collect();
            ShadowSet::from_visibility(env, &refs)
        })
        .collect())
}

impl Rspeg {
    /// Graph with a single root vertex whose one label has every shadow contaminated.
    pub fn new(env: Arc<Environment>, root: Jpc, mode: RelationMode) -> Result<Rspeg, RspegError> {
        root.validate(&env)?;
        let shadows = leave_one_out_shadows(&env, &root)?;
        let sublabels = shadows.iter().map(|s| ShadowLabel::all_contaminated(s.len())).collect();
        let n = root.len();
        let mut g = Rspeg {
            env,
            n,
            mode,
            influence: InfluenceOptions::default(),
            root: 0,
            vertices: vec![Vertex { jpc: root, shadows, labels: vec![0] }],
            edges: Vec::new(),
            out_edges: vec![Vec::new()],
            labels: vec![StoredLabel { vertex: 0, label: FailureShadowLabel { sublabels, provenance: None }, alive: true }],
            counters: GraphCounters::default(),
        };
        g.counters.labels_created = 1;
        Ok(g)
    }

    pub fn env(&self) -> &Arc<Environment> {
        &self.env
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn mode(&self) -> RelationMode {
        self.mode
    }

    pub fn root(&self) -> VertexId {
        self.root
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn counters(&self) -> &GraphCounters {
        &self.counters
    }

    pub fn set_deadline(&mut self, deadline: Option<Instant>) {
        self.influence.deadline = deadline;
    }

    pub fn set_influence_options(&mut self, opts: InfluenceOptions) {
        self.influence = opts;
    }

    pub fn label(&self, id: LabelId) -> Option<&FailureShadowLabel> {
        self.labels.get(id).map(|s| &s.label)
    }

    /// Labels currently stored at vertex `v`.
    pub fn labels_at(&self, v: VertexId) -> impl Iterator<Item = (LabelId, &FailureShadowLabel)> + '_ {
        self.vertices[v].labels.iter().map(move |&id| (id, &self.labels[id].label))
    }

    pub fn live_label_count(&self) -> usize {
        self.vertices.iter().map(|v| v.labels.len()).sum()
    }

    /// Some stored all-clear label, searching vertices in insertion order.
    pub fn find_all_clear(&self) -> Option<(VertexId, LabelId)> {
        (0..self.vertices.len())
            .find_map(|v| self.labels_at(v).find(|(_, l)| l.is_all_clear()).map(|(id, _)| (v, id)))
    }

    fn relations_for(&mut self, from: VertexId, to: VertexId) -> Result<Vec<InfluenceRelation>, ShadowError> {
        let (a, b) = (&self.vertices[from].jpc, &self.vertices[to].jpc);
        let rel = leave_one_out_relations(&self.env, &a.0, &b.0, &self.influence)?;
        self.counters.relations_computed += rel.len();
        debug_assert!(rel.iter().enumerate().all(|(i, r)| r.rows() == self.vertices[from].shadows[i].len()
            && r.cols() == self.vertices[to].shadows[i].len()));
        Ok(rel)
    }

    /// Adds `w` as a vertex, joins it to every vertex reachable by straight
    /// segments (both directions), and propagates labels to a fixpoint.
    pub fn add_sample(&mut self, w: Jpc) -> Result<AddReport, RspegError> {
        w.validate(&self.env)?;
        if w.len() != self.n {
            return Err(RspegError::InvalidJpc(format!("expected {} pursuers, got {}", self.n, w.len())));
        }
        let shadows = leave_one_out_shadows(&self.env, &w)?;
        let wid = self.vertices.len();
        self.vertices.push(Vertex { jpc: w, shadows, labels: Vec::new() });
        self.out_edges.push(Vec::new());
        let mut report = AddReport { vertex: wid, ..Default::default() };

        for u in 0..wid {
            if !self.vertices[wid].jpc.joinable(&self.vertices[u].jpc, &self.env) {
                continue;
            }
            for (from, to) in [(wid, u), (u, wid)] {
                match self.relations_for(from, to) {
                    Ok(rel) => {
                        let id = self.edges.len();
                        let relations = (self.mode == RelationMode::Cached).then_some(rel);
                        self.edges.push(Edge { from, to, relations });
                        self.out_edges[from].push(id);
                        report.new_edges.push(id);
                    }
                    Err(ShadowError::AmbiguousCorrespondence { t }) => {
                        log::debug!("skipping edge {from} -> {to}: ambiguous correspondence near t = {t}");
                        report.skipped_ambiguous += 1;
                        self.counters.ambiguous_edges += 1;
                    }
                    Err(e) => return Err(e.into()),
                }
            }
        }

        let mut work: VecDeque<(EdgeId, LabelId)> = VecDeque::new();
        for &e in &report.new_edges {
            let from = self.edges[e].from;
            work.extend(self.vertices[from].labels.iter().map(|&l| (e, l)));
        }
        self.run_worklist(work, &mut report)?;
        Ok(report)
    }

    fn run_worklist(&mut self, mut work: VecDeque<(EdgeId, LabelId)>, report: &mut AddReport) -> Result<(), RspegError> {
        while let Some((e, lid)) = work.pop_front() {
            if !self.labels[lid].alive {
                continue;
            }
            let (from, to) = (self.edges[e].from, self.edges[e].to);
            let naive;
            let relations: &[InfluenceRelation] = match &self.edges[e].relations {
                Some(r) => r,
                None => {
                    naive = self.relations_for(from, to)?;
                    &naive
                }
            };
            let sublabels = self.labels[lid]
                .label
                .sublabels
                .iter()
                .zip(relations)
                .map(|(l, r)| r.propagate(l))
                .collect::<Result<Vec<_>, _>>()?;
            self.counters.propagations += 1;
            let candidate = FailureShadowLabel { sublabels, provenance: Some(Provenance { vertex: from, label: lid }) };
            if let Some(new_id) = self.insert_label(to, candidate, report) {
                if report.all_clear.is_none() && self.labels[new_id].label.is_all_clear() {
                    report.all_clear = Some((to, new_id));
                }
                work.extend(self.out_edges[to].iter().map(|&e2| (e2, new_id)));
            }
        }
        Ok(())
    }

    /// Keeps the vertex's labels an antichain. Returns the new label's id if it
    /// was stored.
    fn insert_label(&mut self, v: VertexId, label: FailureShadowLabel, report: &mut AddReport) -> Option<LabelId> {
        let blocked = self.vertices[v].labels.iter().any(|&id| {
            let old = &self.labels[id].label;
            old.sublabels == label.sublabels || old.dominates(&label)
        });
        if blocked {
            return None;
        }
        let mut kept = Vec::with_capacity(self.vertices[v].labels.len() + 1);
        for &id in &self.vertices[v].labels {
            if label.dominates(&self.labels[id].label) {
                self.labels[id].alive = false;
                report.labels_pruned += 1;
                self.counters.labels_pruned += 1;
            } else {
                kept.push(id);
            }
        }
        let id = self.labels.len();
        self.labels.push(StoredLabel { vertex: v, label, alive: true });
        kept.push(id);
        self.vertices[v].labels = kept;
        report.labels_added += 1;
        self.counters.labels_created += 1;
        Some(id)
    }

    /// Follows provenance from an all-clear label back to the root.
    pub fn extract_solution(&self, vertex: VertexId, label: LabelId) -> Result<Solution, RspegError> {
        let stored = self.labels.get(label).ok_or(RspegError::UnknownLabel(label))?;
        if stored.vertex != vertex {
            return Err(RspegError::UnknownLabel(label));
        }
        if !stored.label.is_all_clear() {
            return Err(RspegError::NotAllClear { vertex, label });
        }
        let mut chain = vec![vertex];
        let mut cur = stored;
        while let Some(p) = cur.label.provenance {
            let prev = self.labels.get(p.label).ok_or(RspegError::BrokenProvenance(label))?;
            if prev.vertex != p.vertex || chain.len() > self.labels.len() {
                return Err(RspegError::BrokenProvenance(label));
            }
            chain.push(p.vertex);
            cur = prev;
        }
        if *chain.last().expect("nonempty") != self.root {
            return Err(RspegError::BrokenProvenance(label));
        }
        chain.reverse();
        Ok(Solution { waypoints: chain.into_iter().map(|v| self.vertices[v].jpc.clone()).collect() })
    }

    /// Recomputes every vertex's antichain from the root label alone,
    /// ignoring stored state. Each inner list is sorted.
    pub fn recompute_antichains(&self) -> Result<Vec<Vec<Vec<ShadowLabel>>>, RspegError> {
        let mut sets: Vec<Vec<Vec<ShadowLabel>>> = vec![Vec::new(); self.vertices.len()];
        let root_label = self.labels[0].label.sublabels.clone();
        sets[self.root].push(root_label.clone());
        let mut work: VecDeque<(VertexId, Vec<ShadowLabel>)> = VecDeque::from([(self.root, root_label)]);
        let covered = |a: &[ShadowLabel], b: &[ShadowLabel]| a.iter().zip(b).all(|(x, y)| x.is_covered_by(y));
        while let Some((v, lab)) = work.pop_front() {
            if !sets[v].contains(&lab) {
                continue;
            }
            for &e in &self.out_edges[v] {
                let edge = &self.edges[e];
                let fresh;
                let rel: &[InfluenceRelation] = match &edge.relations {
                    Some(r) => r,
                    None => {
                        let (a, b) = (&self.vertices[edge.from].jpc, &self.vertices[edge.to].jpc);
                        fresh = leave_one_out_relations(&self.env, &a.0, &b.0, &self.influence)?;
                        &fresh
                    }
                };
                let out: Vec<ShadowLabel> =
                    lab.iter().zip(rel).map(|(l, r)| r.propagate(l)).collect::<Result<_, _>>()?;
                let target = &mut sets[edge.to];
                if target.iter().any(|old| covered(old, &out)) {
                    continue;
                }
                target.retain(|old| !covered(&out, old));
                target.push(out.clone());
                work.push_back((edge.to, out));
            }
        }
        for s in &mut sets {
            s.sort();
        }
        Ok(sets)
    }

    /// Stored antichains in the same shape as [`Rspeg::recompute_antichains`].
    pub fn stored_antichains(&self) -> Vec<Vec<Vec<ShadowLabel>>> {
        (0..self.vertices.len())
            .map(|v| {
                let mut s: Vec<Vec<ShadowLabel>> = self.labels_at(v).map(|(_, l)| l.sublabels.clone()).collect();
                s.sort();
                s
            })
            .collect()
    }

    /// No stored label at any vertex dominates another stored there.
    pub fn is_antichain(&self) -> bool {
        (0..self.vertices.len()).all(|v| {
            let ls: Vec<&FailureShadowLabel> = self.labels_at(v).map(|(_, l)| l).collect();
            ls.iter().enumerate().all(|(i, a)| {
                ls.iter().enumerate().all(|(j, b)| i == j || (!a.dominates(b) && a.sublabels != b.sublabels))
            })
        })
    }

    pub fn snapshot(&self) -> GraphSnapshot {
        GraphSnapshot {
            n: self.n,
            root: self.root,
            mode: self.mode,
            vertices: self
                .vertices
                .iter()
                .enumerate()
                .map(|(id, v)| VertexSnapshot {
                    id,
                    jpc: v.jpc.clone(),
                    shadow_counts: v.shadows.iter().map(ShadowSet::len).collect(),
                    labels: self.labels_at(id).map(|(lid, l)| LabelSnapshot { id: lid, label: l.clone() }).collect(),
                })
                .collect(),
            edges: self
                .edges
                .iter()
                .enumerate()
                .map(|(id, e)| EdgeSnapshot { id, from: e.from, to: e.to, relations: e.relations.clone() })
                .collect(),
            counters: self.counters.clone(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LabelSnapshot {
    pub id: LabelId,
    #[serde(flatten)]
    pub label: FailureShadowLabel,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VertexSnapshot {
    pub id: VertexId,
    pub jpc: Jpc,
    pub shadow_counts: Vec<usize>,
    pub labels: Vec<LabelSnapshot>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EdgeSnapshot {
    pub id: EdgeId,
    pub from: VertexId,
    pub to: VertexId,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub relations: Option<Vec<InfluenceRelation>>,
}

/// Serializable view of the whole graph.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GraphSnapshot {
    pub n: usize,
    pub root: VertexId,
    pub mode: RelationMode,
    pub vertices: Vec<VertexSnapshot>,
    pub edges: Vec<EdgeSnapshot>,
    pub counters: GraphCounters,
}

/// Grid re-simulation of `sol` for the full team and every single-pursuer exclusion.
pub fn check_solution(env: &Environment, sol: &Solution) -> Result<CheckReport, GeometryError> {
    check_solution_with(env, sol, OracleConfig::default())
}

pub fn check_solution_with(env: &Environment, sol: &Solution, cfg: OracleConfig) -> Result<CheckReport, GeometryError> {
    check_path(env, &sol.paths(), cfg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::RawEnvironment;

    fn env(outer: &[[f64; 2]]) -> Arc<Environment> {
        Arc::new(
            Environment::validate(RawEnvironment {
                outer: outer.iter().map(|&p| p.into()).collect(),
                holes: vec![],
                epsilon: None,
            })
            .unwrap(),
        )
    }

    fn l_room() -> Arc<Environment> {
        env(&[[0., 0.], [2., 0.], [2., 1.], [1., 1.], [1., 2.], [0., 2.]])
    }

    fn jpc(pts: &[[f64; 2]]) -> Jpc {
        Jpc(pts.iter().map(|&p| p.into()).collect())
    }

    #[test]
    fn convex_root_is_already_clear() {
        let e = env(&[[0., 0.], [3., 0.], [3., 2.], [0., 2.]]);
        let g = Rspeg::new(e.clone(), jpc(&[[1., 1.], [2., 1.]]), RelationMode::Cached).unwrap();
        let (v, l) = g.find_all_clear().unwrap();
        assert_eq!(g.label(l).unwrap().sublabels.iter().map(ShadowLabel::len).collect::<Vec<_>>(), vec![0, 0]);
        let sol = g.extract_solution(v, l).unwrap();
        assert_eq!(sol.waypoints.len(), 1);
        assert!(check_solution(&e, &sol).unwrap().passed());
    }

    #[test]
    fn single_pursuer_rejected() {
        let e = l_room();
        assert!(matches!(Rspeg::new(e, jpc(&[[0.5, 0.5]]), RelationMode::Cached), Err(RspegError::InvalidJpc(_))));
    }

    #[test]
    fn l_room_root_labels() {
        let e = l_room();
        let g = Rspeg::new(e, jpc(&[[1.8, 0.5], [1.7, 0.3]]), RelationMode::Cached).unwrap();
        let root = g.label(0).unwrap();
        assert_eq!(root.sublabels.iter().map(|l| l.to_string()).collect::<Vec<_>>(), vec!["1", "1"]);
        assert!(g.find_all_clear().is_none());
    }

    #[test]
    fn l_room_two_vertex_solution() {
        let e = l_room();
        let mut g = Rspeg::new(e.clone(), jpc(&[[1.8, 0.5], [1.7, 0.3]]), RelationMode::Cached).unwrap();
        let report = g.add_sample(jpc(&[[0.5, 0.5], [0.3, 0.6]])).unwrap();
        assert_eq!(report.new_edges.len(), 2);
        let (v, l) = report.all_clear.expect("all clear");
        let sol = g.extract_solution(v, l).unwrap();
        assert_eq!(sol.waypoints.len(), 2);
        assert!(check_solution(&e, &sol).unwrap().passed());
        assert_eq!(g.stored_antichains(), g.recompute_antichains().unwrap());
        assert!(g.is_antichain());
    }

    #[test]
    fn duplicate_sample_changes_nothing_else() {
        let e = l_room();
        let root = jpc(&[[1.8, 0.5], [1.7, 0.3]]);
        let mut g = Rspeg::new(e, root.clone(), RelationMode::Cached).unwrap();
        let before = g.stored_antichains();
        let report = g.add_sample(root).unwrap();
        assert_eq!(report.labels_pruned, 0);
        let after = g.stored_antichains();
        assert_eq!(after[0], before[0]);
        assert_eq!(after[1], before[0]);
        for e in g.edges() {
            for (i, r) in e.relations().unwrap().iter().enumerate() {
                assert_eq!(*r, InfluenceRelation::identity(g.vertices()[0].shadows[i].len()));
            }
        }
    }

    #[test]
    fn naive_mode_matches_cached() {
        let e = l_room();
        let samples = [
            jpc(&[[0.5, 1.5], [1.5, 0.5]]),
            jpc(&[[0.5, 0.5], [0.3, 0.6]]),
            jpc(&[[0.2, 1.9], [1.9, 0.2]]),
        ];
        let mut gs = [RelationMode::Cached, RelationMode::Naive]
            .map(|m| Rspeg::new(e.clone(), jpc(&[[1.8, 0.5], [1.7, 0.3]]), m).unwrap());
        for s in samples {
            let r0 = gs[0].add_sample(s.clone()).unwrap();
            let r1 = gs[1].add_sample(s).unwrap();
            assert_eq!(r0, r1);
        }
        assert_eq!(gs[0].stored_antichains(), gs[1].stored_antichains());
        assert!(gs[1].counters().relations_computed > gs[0].counters().relations_computed);
        assert_eq!(gs[1].stored_antichains(), gs[1].recompute_antichains().unwrap());
    }

    #[test]
    fn extract_rejects_contaminated_label() {
        let e = l_room();
        let g = Rspeg::new(e, jpc(&[[1.8, 0.5], [1.7, 0.3]]), RelationMode::Cached).unwrap();
        assert_eq!(g.extract_solution(0, 0).unwrap_err(), RspegError::NotAllClear { vertex: 0, label: 0 });
        assert_eq!(g.extract_solution(0, 9).unwrap_err(), RspegError::UnknownLabel(9));
    }

    #[test]
    fn failure_label_dominance_is_pareto() {
        let f = |a: &str, b: &str| FailureShadowLabel { sublabels: vec![a.parse().unwrap(), b.parse().unwrap()], provenance: None };
        assert!(f("01", "1").dominates(&f("11", "1")));
        assert!(!f("01", "1").dominates(&f("01", "1")));
        assert!(!f("01", "1").dominates(&f("10", "1")));
        assert!(f("00", "0").dominates(&f("01", "1")));
    }

    #[test]
    fn snapshot_round_trip() {
        let e = l_room();
        let mut g = Rspeg::new(e, jpc(&[[1.8, 0.5], [1.7, 0.3]]), RelationMode::Cached).unwrap();
        g.add_sample(jpc(&[[0.5, 0.5], [0.3, 0.6]])).unwrap();
        let snap = g.snapshot();
        let text = serde_json::to_string(&snap).unwrap();
        assert_eq!(serde_json::from_str::<GraphSnapshot>(&text).unwrap(), snap);
        assert!(text.contains("\"sublabels\":[\"0\",\"0\"]"));
    }
}
