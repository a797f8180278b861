mod bench;
mod svg;

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;
use std::time::Duration;

use clap::{Args, Parser, Subcommand};
use pursuit_core::geometry::{Environment, Point};
use pursuit_core::oracle::CheckReport;
use pursuit_core::planner::{plan_with_graph, Outcome, PlanConfig, PlanError, PlanStats};
use pursuit_core::rspeg::{check_solution, Jpc, Solution};
use pursuit_core::sampling::{build_web_walk, rcs_spacing, SamplerKind, WebConfig};
use serde::{Deserialize, Serialize};

#[derive(Parser)]
#[command(name = "pursuit", version, about = "Plan and check pursuit strategies that survive the loss of any one pursuer")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Plan a strategy and write it as JSON and SVG.
    Solve(SolveArgs),
    /// Run repeated seeded trials and summarize them as CSV.
    Bench(bench::BenchArgs),
    /// Re-check a solution file on the grid.
    Validate(ValidateArgs),
    /// Dump the web and walk built for one seed.
    Web(WebArgs),
}

#[derive(Args)]
struct SolveArgs {
    #[arg(long)]
    env: PathBuf,
    #[arg(long)]
    n: usize,
    #[arg(long, value_enum, default_value = "rcs")]
    sampler: Sampler,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Wall-clock budget in seconds.
    #[arg(long, default_value_t = 600.0)]
    timeout: f64,
    /// Recompute shadow influence on every propagation.
    #[arg(long)]
    no_cache: bool,
    #[arg(long)]
    dump_graph: Option<PathBuf>,
    #[arg(long, default_value = "solution.json")]
    out: PathBuf,
    #[arg(long, default_value = "solution.svg")]
    svg: PathBuf,
    /// Also draw the points of the first web.
    #[arg(long)]
    web_points: bool,
    #[arg(long, default_value_t = 200)]
    coverage_grid: usize,
}

#[derive(Args)]
struct ValidateArgs {
    #[arg(long)]
    env: PathBuf,
    #[arg(long)]
    solution: PathBuf,
}

#[derive(Args)]
struct WebArgs {
    #[arg(long)]
    env: PathBuf,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Team size used to report the sample spacing along the walk.
    #[arg(long, default_value_t = 3)]
    n: usize,
    #[arg(long, default_value_t = 200)]
    coverage_grid: usize,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    svg: Option<PathBuf>,
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum Sampler {
    Rcs,
    Ws,
}

impl From<Sampler> for SamplerKind {
    fn from(s: Sampler) -> Self {
        match s {
            Sampler::Rcs => SamplerKind::Rcs,
            Sampler::Ws => SamplerKind::Ws,
        }
    }
}

/// Contents of `solution.json`.
#[derive(Serialize, Deserialize)]
struct SolutionFile {
    env: String,
    n: usize,
    sampler: SamplerKind,
    seed: u64,
    caching: bool,
    outcome: Outcome,
    waypoints: Vec<Jpc>,
    stats: PlanStats,
    check: Option<CheckReport>,
}

/// What `validate` needs from a solution file; other fields are ignored.
#[derive(Deserialize)]
struct Waypoints {
    waypoints: Vec<Jpc>,
}

#[derive(Serialize)]
struct WebDump {
    seed: u64,
    initial: Vec<Point>,
    intersections: Vec<Point>,
    adjacency: Vec<Vec<usize>>,
    walk: Vec<usize>,
    d: usize,
    n: usize,
    spacing: usize,
}

struct Failure {
    code: u8,
    kind: &'static str,
    message: String,
}

impl Failure {
    fn input(message: impl Into<String>) -> Self {
        Failure { code: 1, kind: "input", message: message.into() }
    }

    fn internal(message: impl Into<String>) -> Self {
        Failure { code: 3, kind: "internal", message: message.into() }
    }
}

fn load_env(path: &Path) -> Result<Environment, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
    Environment::from_json(&text).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

fn write(path: &Path, contents: &str) -> Result<(), Failure> {
    std::fs::write(path, contents).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("plain data serializes")
}

fn solve(args: SolveArgs) -> Result<u8, Failure> {
    let env = Arc::new(load_env(&args.env)?);
    if !(args.timeout > 0.0 && args.timeout.is_finite()) {
        return Err(Failure::input(format!("timeout must be positive, got {}", args.timeout)));
    }
    let cfg = PlanConfig {
        sampler: args.sampler.into(),
        seed: args.seed,
        timeout: Duration::from_secs_f64(args.timeout),
        caching: !args.no_cache,
        coverage_grid: args.coverage_grid,
        ..PlanConfig::new(args.n)
    };
    let (result, graph) = match plan_with_graph(env.clone(), &cfg) {
        Ok(r) => r,
        Err(PlanError::InvalidConfig(m)) => return Err(Failure::input(m)),
        Err(e @ PlanError::Sampling(_)) => return Err(Failure::input(e.to_string())),
        Err(PlanError::Unsound { excluded, .. }) => {
            return Err(Failure {
                code: 3,
                kind: "robustness",
                message: format!("extracted solution failed validation for exclusion {excluded:?}"),
            })
        }
        Err(e) => return Err(Failure::internal(e.to_string())),
    };
    if let Some(path) = &args.dump_graph {
        write(path, &to_json(&graph.snapshot()))?;
    }
    let waypoints = result.solution.as_ref().map(|s| s.waypoints.clone()).unwrap_or_default();
    let file = SolutionFile {
        env: args.env.display().to_string(),
        n: args.n,
        sampler: cfg.sampler,
        seed: cfg.seed,
        caching: cfg.caching,
        outcome: result.outcome,
        waypoints,
        stats: result.stats.clone(),
        check: result.check.clone(),
    };
    write(&args.out, &to_json(&file))?;
    let web = if args.web_points {
        let cfg = WebConfig { coverage_grid: args.coverage_grid, ..Default::default() };
        Some(build_web_walk(&env, args.seed, &cfg).map_err(|e| Failure::internal(e.to_string()))?.web.points())
    } else {
        None
    };
    let paths = result.solution.as_ref().map(Solution::paths).unwrap_or_default();
    write(&args.svg, &svg::render(&env, &paths, web.as_deref()))?;
    match result.outcome {
        Outcome::Solution => {
            println!("solution with {} waypoints in {:.3}s", file.waypoints.len(), result.stats.elapsed_secs);
            Ok(0)
        }
        Outcome::Timeout => {
            println!("timeout after {:.3}s", result.stats.elapsed_secs);
            Ok(2)
        }
    }
}

fn validate(args: ValidateArgs) -> Result<u8, Failure> {
    let env = load_env(&args.env)?;
    let path = &args.solution;
    let text = std::fs::read_to_string(path).map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
    let file: Waypoints =
        serde_json::from_str(&text).map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
    let sol = Solution { waypoints: file.waypoints };
    let report = check_solution(&env, &sol).map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
    println!("{}", serde_json::to_string(&report).expect("plain data serializes"));
    match report.first_failure() {
        None => Ok(0),
        Some(i) => Err(Failure {
            code: 3,
            kind: "robustness",
            message: format!("team without pursuer {i} leaves contaminated cells"),
        }),
    }
}

fn web(args: WebArgs) -> Result<u8, Failure> {
    let env = load_env(&args.env)?;
    if args.n == 0 {
        return Err(Failure::input("n must be positive"));
    }
    let cfg = WebConfig { coverage_grid: args.coverage_grid, ..Default::default() };
    let ww = build_web_walk(&env, args.seed, &cfg).map_err(|e| Failure::input(e.to_string()))?;
    let d = ww.walk.d();
    let dump = WebDump {
        seed: ww.seed,
        initial: ww.web.initial.clone(),
        intersections: ww.web.intersections.clone(),
        adjacency: ww.graph.adjacency.clone(),
        walk: ww.walk.indices.clone(),
        d,
        n: args.n,
        spacing: rcs_spacing(d, args.n),
    };
    let json = to_json(&dump);
    match &args.out {
        Some(p) => write(p, &json)?,
        None => println!("{json}"),
    }
    if let Some(p) = &args.svg {
        write(p, &svg::render(&env, &[], Some(&ww.web.points())))?;
    }
    Ok(0)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => {
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            eprint!("{e}");
            return ExitCode::from(1);
        }
    };
    let result = match cli.command {
        Command::Solve(a) => solve(a),
        Command::Bench(a) => bench::run(a),
        Command::Validate(a) => validate(a),
        Command::Web(a) => web(a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            let line = serde_json::json!({ "error": f.kind, "message": f.message });
            eprintln!("{line}");
            ExitCode::from(f.code)
        }
    }
}
