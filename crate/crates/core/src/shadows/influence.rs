use std::collections::HashMap;
use std::rc::Rc;
use std::time::Instant;

use crate::geometry::{visibility_polygon, Environment, Point, ShadowSet, VisPolygon};

use super::events::{Overlaps, ShadowEvent};
use super::{InfluenceRelation, ShadowError};

/// Knobs for tracing shadows along a straight-line joint motion.
#[derive(Clone, Copy, Debug)]
pub struct InfluenceOptions {
    /// Uniform steps before any bisection.
    pub initial_steps: usize,
    /// Smallest parameter interval that is still bisected.
    pub min_step: f64,
    /// Linked shadows must share at least this fraction of the smaller one's
    /// area, otherwise the step is considered too coarse.
    pub min_overlap_ratio: f64,
    pub deadline: Option<Instant>,
}

impl Default for InfluenceOptions {
    fn default() -> Self {
        InfluenceOptions { initial_steps: 32, min_step: 1e-6, min_overlap_ratio: 0.5, deadline: None }
    }
}

/// Straight-line joint motion with a cache of visibility polygons per instant.
pub struct Motion<'a> {
    env: &'a Environment,
    from: &'a [Point],
    to: &'a [Point],
    polys: HashMap<u64, Rc<Vec<VisPolygon>>>,
    pub(crate) coincident_events: usize,
}

impl<'a> Motion<'a> {
    pub fn new(env: &'a Environment, from: &'a [Point], to: &'a [Point]) -> Result<Self, ShadowError> {
        if from.len() != to.len() {
            return Err(ShadowError::LengthMismatch { expected: from.len(), found: to.len() });
        }
        if let Some(pursuer) = (0..from.len()).find(|&j| !env.contains_segment(from[j], to[j])) {
            return Err(ShadowError::InfeasibleEdge { pursuer });
        }
        Ok(Motion { env, from, to, polys: HashMap::new(), coincident_events: 0 })
    }

    pub fn len(&self) -> usize {
        self.from.len()
    }

    pub fn is_empty(&self) -> bool {
        self.from.is_empty()
    }

    pub fn positions_at(&self, t: f64) -> Vec<Point> {
        self.from.iter().zip(self.to).map(|(&a, &b)| a.lerp(b, t)).collect()
    }

    fn polys_at(&mut self, t: f64) -> Result<Rc<Vec<VisPolygon>>, ShadowError> {
        if let Some(p) = self.polys.get(&t.to_bits()) {
            return Ok(p.clone());
        }
        let polys = self
            .positions_at(t)
            .into_iter()
            .map(|p| visibility_polygon(self.env, p))
            .collect::<Result<Vec<_>, _>>()?;
        let polys = Rc::new(polys);
        self.polys.insert(t.to_bits(), polys.clone());
        Ok(polys)
    }

    /// Shadows at parameter `t` of every pursuer except `exclude`.
    pub fn shadows_at(&mut self, t: f64, exclude: Option<usize>) -> Result<ShadowSet, ShadowError> {
        let polys = self.polys_at(t)?;
        let refs: Vec<&VisPolygon> =
            polys.iter().enumerate().filter(|&(j, _)| Some(j) != exclude).map(|(_, p)| p).collect();
        Ok(ShadowSet::from_visibility(self.env, &refs))
    }

    /// Influence relation of the motion for the team without `exclude`.
    pub fn relation(&mut self, exclude: Option<usize>, opts: &InfluenceOptions) -> Result<InfluenceRelation, ShadowError> {
        let steps = opts.initial_steps.max(1);
        let mut prev = self.shadows_at(0.0, exclude)?;
        let mut total = InfluenceRelation::identity(prev.len());
        for k in 1..=steps {
            check_deadline(opts)?;
            let (t0, t1) = ((k - 1) as f64 / steps as f64, k as f64 / steps as f64);
            let next = self.shadows_at(t1, exclude)?;
            let step = self.refine(exclude, t0, &prev, t1, &next, opts)?;
            total = total.compose(&step)?;
            prev = next;
        }
        Ok(total)
    }

    fn refine(
        &mut self,
        exclude: Option<usize>,
        t0: f64,
        s0: &ShadowSet,
        t1: f64,
        s1: &ShadowSet,
        opts: &InfluenceOptions,
    ) -> Result<InfluenceRelation, ShadowError> {
        let ov = Overlaps::compute(self.env, s0, s1);
        let ambiguous = ov.ambiguous();
        let events = ov.events();
        // A compound event is a merge and a split at once.
        let changes: usize = events
            .iter()
            .map(|e| match e {
                ShadowEvent::Persisted { .. } => 0,
                ShadowEvent::Compound { .. } => 2,
                _ => 1,
            })
            .sum();
        let simple = !ambiguous
            && s0.len().abs_diff(s1.len()) <= 1
            && changes <= 1
            && ov.min_link_ratio() >= opts.min_overlap_ratio;
        let tm = 0.5 * (t0 + t1);
        let mut sm = None;
        if simple {
            let merged: Vec<usize> = events
                .iter()
                .filter_map(|e| match e {
                    ShadowEvent::Merged { prev, .. } => Some(prev.clone()),
                    _ => None,
                })
                .flatten()
                .collect();
            if merged.is_empty() || t1 - t0 <= opts.min_step {
                return Ok(ov.relation());
            }
            // A source that shrinks into the merge may instead be vanishing
            // at the same instant; only a finer step can tell the two apart.
            let mid = self.shadows_at(tm, exclude)?;
            let half = Overlaps::compute(self.env, s0, &mid);
            let growing = |a: usize| {
                half.events().iter().any(|e| {
                    matches!(e, ShadowEvent::Persisted { prev, next }
                        if *prev == a && half.next_areas[*next] >= half.prev_areas[a] - half.tolerance)
                })
            };
            if merged.iter().all(|&a| growing(a)) {
                return Ok(ov.relation());
            }
            sm = Some(mid);
        }
        if t1 - t0 <= opts.min_step {
            if ambiguous {
                return Err(ShadowError::AmbiguousCorrespondence { t: t0 });
            }
            if changes > 1 {
                self.coincident_events += 1;
                log::debug!("coincident shadow events near t = {t0}: {events:?}");
            }
            return Ok(ov.relation());
        }
        check_deadline(opts)?;
        let sm = match sm {
            Some(sm) => sm,
            None => self.shadows_at(tm, exclude)?,
        };
        let first = self.refine(exclude, t0, s0, tm, &sm, opts)?;
        let second = self.refine(exclude, tm, &sm, t1, s1, opts)?;
        first.compose(&second)
    }
}

fn check_deadline(opts: &InfluenceOptions) -> Result<(), ShadowError> {
    match opts.deadline {
        Some(d) if Instant::now() >= d => Err(ShadowError::Timeout),
        _ => Ok(()),
    }
}

/// Which source shadows can leak into which destination shadows while all
/// points move linearly and simultaneously from `from` to `to`.
pub fn influence_relation(env: &Environment, from: &[Point], to: &[Point]) -> Result<InfluenceRelation, ShadowError> {
    Motion::new(env, from, to)?.relation(None, &InfluenceOptions::default())
}

/// One relation per excluded pursuer, sharing visibility work across them.
pub fn leave_one_out_relations(
    env: &Environment,
    from: &[Point],
    to: &[Point],
    opts: &InfluenceOptions,
) -> Result<Vec<InfluenceRelation>, ShadowError> {
    let mut motion = Motion::new(env, from, to)?;
    (0..from.len()).map(|i| motion.relation(Some(i), opts)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{shadow_set, RawEnvironment};
    use crate::shadows::ShadowLabel;

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

    #[test]
    fn zero_length_motion_is_identity() {
        let e = l_room();
        let p = [Point::new(1.8, 0.5)];
        let r = influence_relation(&e, &p, &p).unwrap();
        assert_eq!(r, InfluenceRelation::identity(shadow_set(&e, &p).unwrap().len()));
    }

    #[test]
    fn convex_motion_is_empty() {
        let e = env(&[[0., 0.], [3., 0.], [3., 2.], [0., 2.]]);
        let r = influence_relation(&e, &[Point::new(0.5, 0.5)], &[Point::new(2.5, 1.5)]).unwrap();
        assert_eq!((r.rows(), r.cols()), (0, 0));
    }

    #[test]
    fn sweeping_the_corner_clears_the_far_leg() {
        let e = l_room();
        let from = [Point::new(1.8, 0.5)];
        let to = [Point::new(0.5, 0.5)];
        let r = influence_relation(&e, &from, &to).unwrap();
        assert_eq!(r.rows(), 1);
        let out = r.propagate(&ShadowLabel::all_contaminated(1)).unwrap();
        assert!(out.is_all_clear(), "{r:?}");
    }

    #[test]
    fn infeasible_edge_rejected() {
        let e = l_room();
        let bad = influence_relation(&e, &[Point::new(1.8, 0.8)], &[Point::new(0.8, 1.8)]);
        assert_eq!(bad.unwrap_err(), ShadowError::InfeasibleEdge { pursuer: 0 });
    }

    #[test]
    fn expired_deadline_times_out() {
        let e = l_room();
        let opts = InfluenceOptions { deadline: Some(Instant::now()), ..Default::default() };
        let r = leave_one_out_relations(&e, &[Point::new(1.8, 0.5), Point::new(0.5, 0.5)], &[Point::new(0.5, 0.5); 2], &opts);
        assert_eq!(r.unwrap_err(), ShadowError::Timeout);
    }
}
