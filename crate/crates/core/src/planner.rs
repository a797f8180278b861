//! End-to-end planning: draw samples, grow the graph, stop at the first
//! all-clear label, and validate the extracted solution on the grid.

use std::sync::Arc;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::geometry::Environment;
use crate::oracle::{CheckReport, OracleConfig};
use crate::rspeg::{check_solution_with, Jpc, RelationMode, Rspeg, RspegError, Solution};
use crate::sampling::{JpcSampler, SamplerKind, SamplingError, WebConfig};

#[derive(Clone, Debug)]
pub struct PlanConfig {
    pub n: usize,
    pub sampler: SamplerKind,
    pub seed: u64,
    pub timeout: Duration,
    pub caching: bool,
    pub coverage_grid: usize,
    /// Start here instead of at the sampler's first output.
    pub root: Option<Jpc>,
    pub check: OracleConfig,
}

impl PlanConfig {
    pub fn new(n: usize) -> Self {
        PlanConfig {
            n,
            sampler: SamplerKind::Rcs,
            seed: 0,
            timeout: Duration::from_secs(600),
            caching: true,
            coverage_grid: 200,
            root: None,
            check: OracleConfig::default(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Outcome {
    Solution,
    Timeout,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct PlanStats {
    /// Wall-clock time until a solution was found or the run gave up.
    pub elapsed_secs: f64,
    /// Time spent validating the solution on the grid.
    pub check_secs: f64,
    pub vertices: usize,
    pub edges: usize,
    pub labels_stored: usize,
    pub labels_pruned: usize,
    pub relations_computed: usize,
    pub propagations: usize,
    pub samples: usize,
    pub ambiguous_edges: usize,
    pub webs_built: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlanResult {
    pub outcome: Outcome,
    pub solution: Option<Solution>,
    pub check: Option<CheckReport>,
    pub stats: PlanStats,
}

#[derive(Debug, thiserror::Error)]
pub enum PlanError {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Sampling(#[from] SamplingError),
    #[error(transparent)]
    Graph(RspegError),
    /// An extracted solution failed grid validation. Never expected; signals a bug.
    #[error("extracted solution failed validation (exclusion {excluded:?})")]
    Unsound { excluded: Option<usize>, solution: Box<Solution>, report: Box<CheckReport> },
}

impl From<RspegError> for PlanError {
    fn from(e: RspegError) -> Self {
        PlanError::Graph(e)
    }
}

/// Plans and validates a 1-failure robust strategy.
pub fn plan(env: Arc<Environment>, cfg: &PlanConfig) -> Result<PlanResult, PlanError> {
    plan_with_graph(env, cfg).map(|(r, _)| r)
}

/// Like [`plan`], also returning the final graph.
pub fn plan_with_graph(env: Arc<Environment>, cfg: &PlanConfig) -> Result<(PlanResult, Rspeg), PlanError> {
    if cfg.n < 2 {
        return Err(PlanError::InvalidConfig(format!("n must be at least 2, got {}", cfg.n)));
    }
    if cfg.timeout.is_zero() {
        return Err(PlanError::InvalidConfig("timeout must be positive".into()));
    }
    let start = Instant::now();
    let deadline = start + cfg.timeout;
    let web_cfg = WebConfig { coverage_grid: cfg.coverage_grid, ..Default::default() };
    let mut sampler = JpcSampler::new(&env, cfg.sampler, cfg.n, cfg.seed, web_cfg)?;
    let mut samples = 0;
    let root = match &cfg.root {
        Some(r) => r.clone(),
        None => {
            samples += 1;
            sampler.next_jpc()?
        }
    };
    let mode = if cfg.caching { RelationMode::Cached } else { RelationMode::Naive };
    let mut graph = Rspeg::new(env.clone(), root, mode)?;
    graph.set_deadline(Some(deadline));

    let mut found = graph.find_all_clear();
    while found.is_none() {
        if Instant::now() >= deadline {
            break;
        }
        let w = sampler.next_jpc()?;
        samples += 1;
        match graph.add_sample(w) {
            Ok(report) => found = report.all_clear,
            Err(RspegError::Timeout) => break,
            Err(e) => return Err(e.into()),
        }
    }
    let elapsed = start.elapsed();

    let c = graph.counters();
    let mut stats = PlanStats {
        elapsed_secs: elapsed.as_secs_f64(),
        check_secs: 0.0,
        vertices: graph.vertices().len(),
        edges: graph.edges().len(),
        labels_stored: graph.live_label_count(),
        labels_pruned: c.labels_pruned,
        relations_computed: c.relations_computed,
        propagations: c.propagations,
        samples,
        ambiguous_edges: c.ambiguous_edges,
        webs_built: sampler.webs_built(),
    };
    let Some((v, l)) = found else {
        return Ok((PlanResult { outcome: Outcome::Timeout, solution: None, check: None, stats }, graph));
    };
    let solution = graph.extract_solution(v, l)?;
    let check_start = Instant::now();
    let report = check_solution_with(&env, &solution, cfg.check).map_err(RspegError::from)?;
    stats.check_secs = check_start.elapsed().as_secs_f64();
    if !report.passed() || !report.full_team.passed {
        let excluded = report.first_failure();
        return Err(PlanError::Unsound { excluded, solution: Box::new(solution), report: Box::new(report) });
    }
    Ok((PlanResult { outcome: Outcome::Solution, solution: Some(solution), check: Some(report), stats }, graph))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn convex_solves_at_root() {
        let env = Arc::new(fixtures::load("convex").unwrap());
        for sampler in [SamplerKind::Rcs, SamplerKind::Ws] {
            let cfg = PlanConfig { sampler, ..PlanConfig::new(2) };
            let r = plan(env.clone(), &cfg).unwrap();
            assert_eq!(r.outcome, Outcome::Solution);
            assert_eq!(r.solution.unwrap().waypoints.len(), 1);
            assert_eq!((r.stats.vertices, r.stats.edges), (1, 0));
        }
    }

    #[test]
    fn l_shaped_solves_quickly() {
        let env = Arc::new(fixtures::load("l_shaped").unwrap());
        let cfg = PlanConfig { seed: 7, ..PlanConfig::new(2) };
        let r = plan(env, &cfg).unwrap();
        assert_eq!(r.outcome, Outcome::Solution);
        assert!(r.stats.samples <= 25, "{:?}", r.stats);
        assert!(r.check.unwrap().passed());
    }

    #[test]
    fn rejects_bad_config() {
        let env = Arc::new(fixtures::load("convex").unwrap());
        assert!(matches!(plan(env.clone(), &PlanConfig::new(1)), Err(PlanError::InvalidConfig(_))));
        let cfg = PlanConfig { timeout: Duration::ZERO, ..PlanConfig::new(2) };
        assert!(matches!(plan(env, &cfg), Err(PlanError::InvalidConfig(_))));
    }

    #[test]
    fn tiny_timeout_reports_timeout() {
        let env = Arc::new(fixtures::load("corridors").unwrap());
        let cfg = PlanConfig { timeout: Duration::from_millis(1), ..PlanConfig::new(3) };
        let r = plan(env, &cfg).unwrap();
        assert_eq!(r.outcome, Outcome::Timeout);
        assert!(r.solution.is_none());
    }
}
