use serde::{Deserialize, Serialize};

use crate::geometry::{Environment, ShadowSet};

use super::{InfluenceRelation, ShadowError};

/// What happened to shadows between two nearby instants of a motion.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ShadowEvent {
    Appeared { next: usize },
    Persisted { prev: usize, next: usize },
    Merged { prev: Vec<usize>, next: usize },
    Split { prev: usize, next: Vec<usize> },
    Disappeared { prev: usize },
    /// Merge and split inside one step; resolved through the overlap graph.
    Compound { prev: Vec<usize>, next: Vec<usize> },
}

impl ShadowEvent {
    pub fn is_persist(&self) -> bool {
        matches!(self, ShadowEvent::Persisted { .. })
    }
}

/// Region overlap areas between two shadow sets.
pub(crate) struct Overlaps {
    pub areas: Vec<Vec<f64>>,
    pub prev_areas: Vec<f64>,
    pub next_areas: Vec<f64>,
    pub tolerance: f64,
}

impl Overlaps {
    pub fn compute(env: &Environment, prev: &ShadowSet, next: &ShadowSet) -> Overlaps {
        let areas = prev
            .shadows
            .iter()
            .map(|a| next.shadows.iter().map(|b| a.region.intersection_area(&b.region)).collect())
            .collect();
        Overlaps {
            areas,
            prev_areas: prev.shadows.iter().map(|s| s.region.area()).collect(),
            next_areas: next.shadows.iter().map(|s| s.region.area()).collect(),
            tolerance: env.area_tolerance(),
        }
    }

    pub fn linked(&self, a: usize, b: usize) -> bool {
        self.areas[a][b] >= self.tolerance
    }

    /// A shadow whose only overlaps are positive but below tolerance cannot be
    /// told apart from an appearance or disappearance.
    pub fn ambiguous(&self) -> bool {
        let floor = 0.1 * self.tolerance;
        let np = self.prev_areas.len();
        let nn = self.next_areas.len();
        let prev_amb = (0..np).any(|a| {
            let best = (0..nn).map(|b| self.areas[a][b]).fold(0.0, f64::max);
            best >= floor && best < self.tolerance
        });
        let next_amb = (0..nn).any(|b| {
            let best = (0..np).map(|a| self.areas[a][b]).fold(0.0, f64::max);
            best >= floor && best < self.tolerance
        });
        prev_amb || next_amb
    }

    /// Smallest ratio of overlap to the smaller of the two linked shadows.
    pub fn min_link_ratio(&self) -> f64 {
        let mut ratio: f64 = 1.0;
        for (a, row) in self.areas.iter().enumerate() {
            for (b, &area) in row.iter().enumerate() {
                if area >= self.tolerance {
                    ratio = ratio.min(area / self.prev_areas[a].min(self.next_areas[b]));
                }
            }
        }
        ratio
    }

    /// Connected components of the bipartite overlap graph as (prev, next) index lists.
    pub fn components(&self) -> Vec<(Vec<usize>, Vec<usize>)> {
        let np = self.prev_areas.len();
        let nn = self.next_areas.len();
        let mut parent: Vec<usize> = (0..np + nn).collect();
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        for a in 0..np {
            for b in 0..nn {
                if self.linked(a, b) {
                    let (ra, rb) = (find(&mut parent, a), find(&mut parent, np + b));
                    if ra != rb {
                        parent[ra.max(rb)] = ra.min(rb);
                    }
                }
            }
        }
        let mut comps: Vec<(usize, Vec<usize>, Vec<usize>)> = Vec::new();
        for x in 0..np + nn {
            let r = find(&mut parent, x);
            let idx = match comps.iter().position(|c| c.0 == r) {
                Some(i) => i,
                None => {
                    comps.push((r, Vec::new(), Vec::new()));
                    comps.len() - 1
                }
            };
            if x < np {
                comps[idx].1.push(x);
            } else {
                comps[idx].2.push(x - np);
            }
        }
        comps.into_iter().map(|(_, p, n)| (p, n)).collect()
    }

    pub fn events(&self) -> Vec<ShadowEvent> {
        let mut events: Vec<ShadowEvent> = self
            .components()
            .into_iter()
            .map(|(p, n)| match (p.len(), n.len()) {
                (1, 0) => ShadowEvent::Disappeared { prev: p[0] },
                (0, 1) => ShadowEvent::Appeared { next: n[0] },
                (1, 1) => ShadowEvent::Persisted { prev: p[0], next: n[0] },
                (_, 1) => ShadowEvent::Merged { prev: p, next: n[0] },
                (1, _) => ShadowEvent::Split { prev: p[0], next: n },
                _ => ShadowEvent::Compound { prev: p, next: n },
            })
            .collect();
        events.sort_by_key(|e| match e {
            ShadowEvent::Appeared { next } => (0, *next),
            ShadowEvent::Persisted { next, .. } | ShadowEvent::Merged { next, .. } => (0, *next),
            ShadowEvent::Split { next, .. } | ShadowEvent::Compound { next, .. } => (0, next[0]),
            ShadowEvent::Disappeared { prev } => (1, *prev),
        });
        events
    }

    /// Step relation: every source shadow reaches every destination shadow of
    /// its overlap component.
    pub fn relation(&self) -> InfluenceRelation {
        let mut r = InfluenceRelation::empty(self.prev_areas.len(), self.next_areas.len());
        for (p, n) in self.components() {
            for &a in &p {
                for &b in &n {
                    r.set(a, b, true);
                }
            }
        }
        r
    }
}

/// Tags every shadow of `next` as appeared, persisted, merged or split
/// relative to `prev`, and every vanished shadow of `prev` as disappeared.
/// Correspondence is by positive overlap area.
pub fn classify_events(env: &Environment, prev: &ShadowSet, next: &ShadowSet) -> Result<Vec<ShadowEvent>, ShadowError> {
    let ov = Overlaps::compute(env, prev, next);
    if ov.ambiguous() {
        return Err(ShadowError::AmbiguousCorrespondence { t: f64::NAN });
    }
    Ok(ov.events())
}
