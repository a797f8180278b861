mod common;

use std::sync::Arc;

use proptest::prelude::*;
use pursuit_core::fixtures;
use pursuit_core::geometry::Point;
use pursuit_core::planner::{plan, PlanConfig};
use pursuit_core::rspeg::*;
use pursuit_core::sampling::{JpcSampler, SamplerKind, WebConfig};
use pursuit_core::shadows::{leave_one_out_relations, InfluenceOptions, ShadowLabel};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn grow(name: &str, mode: RelationMode, seed: u64, samples: usize) -> Rspeg {
    let env = Arc::new(fixtures::load(name).unwrap());
    let mut s = JpcSampler::new(&env, SamplerKind::Rcs, 3, seed, WebConfig::default()).unwrap();
    let mut g = Rspeg::new(env.clone(), s.next_jpc().unwrap(), mode).unwrap();
    for _ in 0..samples {
        g.add_sample(s.next_jpc().unwrap()).unwrap();
    }
    g
}

fn random_label<R: Rng>(len: usize, rng: &mut R) -> ShadowLabel {
    let bits: Vec<bool> = (0..len).map(|_| rng.random_bool(0.5)).collect();
    ShadowLabel::from_bits(&bits)
}

#[test]
fn cached_relations_match_recomputation() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut probes = 0;
    for name in ["l_shaped", "two_holes"] {
        let g = grow(name, RelationMode::Cached, 1, 12);
        let env = g.env().clone();
        for e in g.edges().iter().step_by(3) {
            let (a, b) = (&g.vertices()[e.from], &g.vertices()[e.to]);
            let fresh = leave_one_out_relations(&env, a.jpc.positions(), b.jpc.positions(), &InfluenceOptions::default())
                .unwrap();
            let cached = e.relations().unwrap();
            for _ in 0..3 {
                for (i, (c, f)) in cached.iter().zip(&fresh).enumerate() {
                    let l = random_label(a.shadows[i].len(), &mut rng);
                    assert_eq!(c.propagate(&l).unwrap(), f.propagate(&l).unwrap());
                    probes += 1;
                }
            }
        }
    }
    assert!(probes >= 100, "{probes}");
}

#[test]
fn antichain_after_every_sample() {
    for (k, name) in ["l_shaped", "web_hall", "two_holes"].into_iter().enumerate() {
        let env = Arc::new(fixtures::load(name).unwrap());
        let mut s = JpcSampler::new(&env, SamplerKind::Ws, 3, k as u64, WebConfig::default()).unwrap();
        let mut g = Rspeg::new(env.clone(), s.next_jpc().unwrap(), RelationMode::Cached).unwrap();
        for _ in 0..25 {
            g.add_sample(s.next_jpc().unwrap()).unwrap();
            assert!(g.is_antichain(), "{name}");
        }
        assert_eq!(g.stored_antichains(), g.recompute_antichains().unwrap(), "{name}");
    }
}

#[test]
fn modes_reach_the_same_fixpoint() {
    let cached = grow("web_hall", RelationMode::Cached, 2, 10);
    let naive = grow("web_hall", RelationMode::Naive, 2, 10);
    assert_eq!(cached.stored_antichains(), naive.stored_antichains());
    assert_eq!(cached.edges().len(), naive.edges().len());
    assert!(naive.counters().relations_computed > cached.counters().relations_computed);
}

#[test]
fn planning_is_deterministic_with_and_without_cache() {
    let env = Arc::new(fixtures::load("two_holes").unwrap());
    let run = |caching| {
        let cfg = PlanConfig { seed: 6, caching, ..PlanConfig::new(3) };
        plan(env.clone(), &cfg).unwrap()
    };
    let (a, b, c) = (run(true), run(true), run(false));
    assert!(a.solution.is_some());
    assert_eq!(a.solution, b.solution);
    assert_eq!(a.solution, c.solution);
    assert_eq!(a.stats.samples, c.stats.samples);
}

#[test]
fn sweep_by_one_pursuer_is_not_robust() {
    let env = fixtures::load("l_shaped").unwrap();
    // Pursuer 0 never leaves the end of one leg; only pursuer 1 reaches the
    // corner from which the other leg is visible.
    let jpc = |a: (f64, f64), b: (f64, f64)| Jpc::new(vec![Point::new(a.0, a.1), Point::new(b.0, b.1)]);
    let sol = Solution { waypoints: vec![jpc((9.0, 2.0), (9.0, 2.0)), jpc((9.0, 2.0), (2.0, 2.0))] };
    let r = check_solution(&env, &sol).unwrap();
    assert!(r.full_team.passed);
    assert!(r.exclusions[0].passed);
    assert!(!r.exclusions[1].passed);
    assert_eq!(r.first_failure(), Some(1));
}

fn label_strategy(n: usize, len: usize) -> impl Strategy<Value = FailureShadowLabel> {
    prop::collection::vec(prop::collection::vec(any::<bool>(), len), n).prop_map(|subs| FailureShadowLabel {
        sublabels: subs.iter().map(|b| ShadowLabel::from_bits(b)).collect(),
        provenance: None,
    })
}

proptest! {
    #[test]
    fn dominance_is_a_strict_partial_order(
        a in label_strategy(3, 4),
        b in label_strategy(3, 4),
        c in label_strategy(3, 4),
    ) {
        prop_assert!(!a.dominates(&a));
        prop_assert!(!(a.dominates(&b) && b.dominates(&a)));
        if a.dominates(&b) && b.dominates(&c) {
            prop_assert!(a.dominates(&c));
        }
    }
}
