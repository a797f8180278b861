//! Seeded benchmark trials summarized per (environment, sampler, n) cell.

use std::io::Write;
use std::path::PathBuf;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::{Arc, Mutex};
use std::time::Duration;

use clap::Args;
use pursuit_core::geometry::Environment;
use pursuit_core::planner::{plan, Outcome, PlanConfig};
use pursuit_core::sampling::SamplerKind;
use serde::Serialize;

use crate::{load_env, Failure, Sampler};

pub const HEADER: [&str; 11] = [
    "env",
    "sampler",
    "n",
    "trials",
    "success_rate",
    "time_mean_s",
    "time_std_s",
    "vertices_mean",
    "vertices_std",
    "edges_mean",
    "edges_std",
];

pub const NOTE: &str = "# time statistics cover all trials; timed-out and failed trials count at the timeout. \
vertex and edge statistics cover all trials except failed ones, which have no graph.";

#[derive(Args)]
pub struct BenchArgs {
    /// Environment files; repeat for several.
    #[arg(long, required = true)]
    env: Vec<PathBuf>,
    #[arg(long, required = true)]
    n: Vec<usize>,
    #[arg(long, value_enum, default_values = ["rcs"])]
    sampler: Vec<Sampler>,
    #[arg(long, default_value_t = 50)]
    trials: u64,
    /// Per-trial wall-clock budget in seconds.
    #[arg(long, default_value_t = 600.0)]
    timeout: f64,
    /// Trial i of every cell uses seed + i.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    no_cache: bool,
    #[arg(long, default_value_t = 200)]
    coverage_grid: usize,
    /// Summary CSV; standard output if absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Per-trial JSON-lines log.
    #[arg(long)]
    log: Option<PathBuf>,
    #[arg(long, default_value_t = 1)]
    workers: usize,
}

struct Cell {
    env: Arc<Environment>,
    name: String,
    sampler: SamplerKind,
    n: usize,
}

#[derive(Serialize)]
struct TrialRecord {
    env: String,
    sampler: SamplerKind,
    n: usize,
    seed: u64,
    caching: bool,
    outcome: &'static str,
    elapsed_secs: f64,
    vertices: Option<usize>,
    edges: Option<usize>,
    samples: Option<usize>,
    error: Option<String>,
}

fn trial(cell: &Cell, seed: u64, args: &BenchArgs) -> TrialRecord {
    let cfg = PlanConfig {
        sampler: cell.sampler,
        seed,
        timeout: Duration::from_secs_f64(args.timeout),
        caching: !args.no_cache,
        coverage_grid: args.coverage_grid,
        ..PlanConfig::new(cell.n)
    };
    let mut rec = TrialRecord {
        env: cell.name.clone(),
        sampler: cell.sampler,
        n: cell.n,
        seed,
        caching: cfg.caching,
        outcome: "error",
        elapsed_secs: args.timeout,
        vertices: None,
        edges: None,
        samples: None,
        error: None,
    };
    match plan(cell.env.clone(), &cfg) {
        Ok(r) => {
            rec.outcome = match r.outcome {
                Outcome::Solution => "solution",
                Outcome::Timeout => "timeout",
            };
            if r.outcome == Outcome::Solution {
                rec.elapsed_secs = r.stats.elapsed_secs;
            }
            rec.vertices = Some(r.stats.vertices);
            rec.edges = Some(r.stats.edges);
            rec.samples = Some(r.stats.samples);
        }
        Err(e) => rec.error = Some(e.to_string()),
    }
    rec
}

fn mean_std(xs: &[f64]) -> (f64, f64) {
    if xs.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let m = xs.iter().sum::<f64>() / xs.len() as f64;
    if xs.len() < 2 {
        return (m, 0.0);
    }
    let var = xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (xs.len() - 1) as f64;
    (m, var.sqrt())
}

fn summary(cell: &Cell, recs: &[TrialRecord]) -> Vec<String> {
    let ok = recs.iter().filter(|r| r.outcome == "solution").count();
    let times: Vec<f64> = recs.iter().map(|r| r.elapsed_secs).collect();
    let verts: Vec<f64> = recs.iter().filter_map(|r| r.vertices).map(|v| v as f64).collect();
    let edges: Vec<f64> = recs.iter().filter_map(|r| r.edges).map(|v| v as f64).collect();
    let (tm, ts) = mean_std(&times);
    let (vm, vs) = mean_std(&verts);
    let (em, es) = mean_std(&edges);
    vec![
        cell.name.clone(),
        format!("{:?}", cell.sampler).to_lowercase(),
        cell.n.to_string(),
        recs.len().to_string(),
        format!("{:.4}", ok as f64 / recs.len() as f64),
        format!("{tm:.4}"),
        format!("{ts:.4}"),
        format!("{vm:.2}"),
        format!("{vs:.2}"),
        format!("{em:.2}"),
        format!("{es:.2}"),
    ]
}

pub fn run(args: BenchArgs) -> Result<u8, Failure> {
    if args.trials == 0 {
        return Err(Failure::input("trials must be at least 1"));
    }
    if !(args.timeout > 0.0 && args.timeout.is_finite()) {
        return Err(Failure::input(format!("timeout must be positive, got {}", args.timeout)));
    }
    if let Some(&n) = args.n.iter().find(|&&n| n < 2) {
        return Err(Failure::input(format!("n must be at least 2, got {n}")));
    }
    let mut cells = Vec::new();
    for path in &args.env {
        let env = Arc::new(load_env(path)?);
        let name = path.file_stem().map_or_else(|| path.display().to_string(), |s| s.to_string_lossy().into_owned());
        for &s in &args.sampler {
            for &n in &args.n {
                cells.push(Cell { env: env.clone(), name: name.clone(), sampler: s.into(), n });
            }
        }
    }

    let jobs: Vec<(usize, u64)> =
        (0..cells.len()).flat_map(|c| (0..args.trials).map(move |i| (c, i))).collect();
    let results: Mutex<Vec<Option<TrialRecord>>> = Mutex::new((0..jobs.len()).map(|_| None).collect());
    let next = AtomicUsize::new(0);
    std::thread::scope(|scope| {
        for _ in 0..args.workers.max(1) {
            scope.spawn(|| loop {
                let k = next.fetch_add(1, Ordering::Relaxed);
                let Some(&(c, i)) = jobs.get(k) else { break };
                let rec = trial(&cells[c], args.seed + i, &args);
                results.lock().unwrap()[k] = Some(rec);
            });
        }
    });
    let results: Vec<TrialRecord> = results.into_inner().unwrap().into_iter().map(Option::unwrap).collect();

    if let Some(path) = &args.log {
        let mut text = String::new();
        for r in &results {
            text.push_str(&serde_json::to_string(r).expect("plain data serializes"));
            text.push('\n');
        }
        crate::write(path, &text)?;
    }

    let mut out: Vec<u8> = Vec::new();
    writeln!(out, "{NOTE}").unwrap();
    {
        let mut w = csv::Writer::from_writer(&mut out);
        w.write_record(HEADER).unwrap();
        for (c, cell) in cells.iter().enumerate() {
            let t = args.trials as usize;
            w.write_record(summary(cell, &results[c * t..(c + 1) * t])).unwrap();
        }
        w.flush().unwrap();
    }
    let text = String::from_utf8(out).expect("CSV is UTF-8");
    match &args.out {
        Some(p) => crate::write(p, &text)?,
        None => print!("{text}"),
    }
    Ok(0)
}
