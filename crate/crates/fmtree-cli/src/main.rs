use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use fmtree::environments::{
    bug_trap_2d, cost_field_demo, random_clutter, recursive_maze, BugTrapSpec, ClutterSpec,
    CostFieldKind, MazeSpec,
};
use fmtree::harness::{run_sweep, run_trial, write_aggregates_csv, write_records_csv, AlgorithmId, SweepConfig};
use fmtree::oracle::{grid_dijkstra, Connectivity, GridSpec};
use fmtree::planners::{PlannerConfig, Variant};
use fmtree::problem::ProblemDef;
use fmtree::rng::Seed;
use std::fs;
use std::path::{Path, PathBuf};

#[derive(Parser)]
#[command(name = "fmtree", about = "Sampling-based optimal motion planning in the unit cube", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one planner on a problem and write the result as JSON.
    Plan(PlanArgs),
    /// Generate benchmark worlds.
    Env {
        #[command(subcommand)]
        command: EnvCommand,
    },
    /// Run a benchmark sweep from a config file and emit CSV.
    Bench(BenchArgs),
    /// Brute-force reference oracles.
    Oracle {
        #[command(subcommand)]
        command: OracleCommand,
    },
}

#[derive(Args)]
struct PlanArgs {
    /// Problem JSON file.
    #[arg(long)]
    problem: PathBuf,
    #[arg(long, value_enum)]
    algo: Algo,
    /// Free-space samples (graph planners) or iterations (rrt).
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Radius excess over the optimality threshold.
    #[arg(long)]
    eta: Option<f64>,
    /// Radius multiplier (scales k0 by RM^d for k-nearest variants).
    #[arg(long)]
    rm: Option<f64>,
    /// k-nearest coefficient (defaults to 2^d e/d).
    #[arg(long)]
    k0: Option<f64>,
    /// Exact connection radius, bypassing the formula.
    #[arg(long)]
    radius: Option<f64>,
    /// Goal-region samples appended to the sample set.
    #[arg(long, default_value_t = 1)]
    goal_samples: usize,
    /// Post-process the path with shortcut smoothing.
    #[arg(long)]
    smooth: bool,
    /// Output JSON path (stdout if omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Algo {
    Fmt,
    FmtKnn,
    Prm,
    PrmKnn,
    Rrt,
    Oracle,
}

impl From<Algo> for AlgorithmId {
    fn from(a: Algo) -> Self {
        match a {
            Algo::Fmt => AlgorithmId::Fmt,
            Algo::FmtKnn => AlgorithmId::FmtKnn,
            Algo::Prm => AlgorithmId::Prm,
            Algo::PrmKnn => AlgorithmId::PrmKnn,
            Algo::Rrt => AlgorithmId::Rrt,
            Algo::Oracle => AlgorithmId::Oracle,
        }
    }
}

#[derive(Subcommand)]
enum EnvCommand {
    /// Write a problem JSON for one of the built-in worlds.
    Gen(EnvGenArgs),
}

#[derive(Args)]
struct EnvGenArgs {
    #[arg(long, value_enum)]
    kind: EnvKind,
    #[arg(long, default_value_t = 2)]
    dim: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Maze wall / divider thickness.
    #[arg(long, default_value_t = 0.1)]
    wall_thickness: f64,
    /// Maze divider-opening size as a fraction of the corridor width.
    #[arg(long, default_value_t = 0.2)]
    corridor_fraction: f64,
    /// Clutter obstacle count.
    #[arg(long, default_value_t = 40)]
    count: usize,
    /// Clutter target coverage fraction.
    #[arg(long, default_value_t = 0.25)]
    coverage: f64,
    /// Cost-field demo variant.
    #[arg(long, value_enum, default_value_t = FieldKind::High)]
    field: FieldKind,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum EnvKind {
    Maze,
    Bugtrap,
    Clutter,
    Costfield,
}

#[derive(Clone, Copy, ValueEnum)]
enum FieldKind {
    /// 2x block: cutting through wins.
    High,
    /// 4x block: going around wins.
    Higher,
    Radial,
}

#[derive(Args)]
struct BenchArgs {
    /// Sweep config JSON.
    #[arg(long)]
    config: PathBuf,
    #[arg(long, default_value = "results")]
    out_dir: PathBuf,
}

#[derive(Subcommand)]
enum OracleCommand {
    /// Shortest-path cost over a rasterized world.
    Grid {
        #[arg(long)]
        problem: PathBuf,
        #[arg(long, default_value_t = 256)]
        res: usize,
        #[arg(long, value_enum, default_value_t = Conn::Diagonal)]
        connectivity: Conn,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Conn {
    Axis,
    Diagonal,
}

fn load_problem(path: &Path) -> Result<ProblemDef> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("reading problem file {}", path.display()))?;
    ProblemDef::from_json(&text).with_context(|| format!("parsing {}", path.display()))
}

fn write_output(out: &Option<PathBuf>, text: &str) -> Result<()> {
    match out {
        Some(path) => {
            if let Some(dir) = path.parent() {
                fs::create_dir_all(dir)?;
            }
            fs::write(path, text).with_context(|| format!("writing {}", path.display()))?;
        }
        None => println!("{text}"),
    }
    Ok(())
}

fn cmd_plan(args: PlanArgs) -> Result<()> {
    let problem = load_problem(&args.problem)?;
    let config = PlannerConfig {
        variant: match args.algo {
            Algo::FmtKnn | Algo::PrmKnn => Variant::Knn,
            _ => Variant::Radial,
        },
        eta: args.eta.unwrap_or(0.0),
        radius_multiplier: args.rm.unwrap_or(1.0),
        k0: args.k0,
        radius_override: args.radius,
        goal_samples: args.goal_samples,
        ..Default::default()
    };
    let record = run_trial(
        args.algo.into(),
        &problem,
        args.problem.to_string_lossy().as_ref(),
        args.n,
        args.seed,
        &config,
        args.smooth,
    )?;
    // re-run to capture the path itself for the JSON payload
    let detail = detailed_result(&problem, &args, &config)?;
    let json = serde_json::json!({
        "algorithm": record.algorithm.as_str(),
        "n": record.n,
        "seed": record.seed,
        "success": record.success,
        "cost": record.success.then_some(record.cost),
        "path": detail,
        "stats": {
            "iterations": record.iterations,
            "collision_checks": record.collision_checks,
            "cost_evaluations": record.cost_evals,
            "time_ms": record.time_ms,
        },
        "smoothed": record.smoothed,
    });
    write_output(&args.out, &serde_json::to_string_pretty(&json)?)
}

fn detailed_result(
    problem: &ProblemDef,
    args: &PlanArgs,
    config: &PlannerConfig,
) -> Result<serde_json::Value> {
    use fmtree::planners::{disk_graph_shortest_path_with, fmt_plan, prm_star_plan, rrt_star_plan};
    use fmtree::sampling::build_sample_set;
    let result = match args.algo {
        Algo::Rrt => rrt_star_plan(problem, config, Seed::new(args.seed), args.n)?,
        _ => {
            let (samples, _) =
                build_sample_set(problem, args.n, config.goal_samples, Seed::new(args.seed))?;
            match args.algo {
                Algo::Fmt | Algo::FmtKnn => fmt_plan(problem, &samples, config)?,
                Algo::Prm | Algo::PrmKnn => prm_star_plan(problem, &samples, config)?,
                Algo::Oracle => {
                    let r = if samples.n() >= 2 {
                        config.resolve_radius(samples.n(), &problem.world, &problem.cost)?
                    } else {
                        f64::MIN_POSITIVE
                    };
                    disk_graph_shortest_path_with(problem, &samples, r, true, config)?
                }
                Algo::Rrt => unreachable!(),
            }
        }
    };
    let path = if args.smooth && result.success && result.path.len() >= 2 {
        fmtree::smoothing::adaptive_shortcut(
            &result.path,
            &problem.world,
            &problem.cost,
            &fmtree::smoothing::SmoothParams {
                seed: Seed::new(args.seed),
                ..Default::default()
            },
        )?
        .path
    } else {
        result.path
    };
    Ok(serde_json::to_value(path)?)
}

fn cmd_env(args: EnvGenArgs) -> Result<()> {
    let problem = match args.kind {
        EnvKind::Maze => recursive_maze(&MazeSpec {
            dim: args.dim,
            wall_thickness: args.wall_thickness,
            corridor_fraction: args.corridor_fraction,
        })?,
        EnvKind::Bugtrap => bug_trap_2d(&BugTrapSpec::default())?,
        EnvKind::Clutter => random_clutter(
            &ClutterSpec::new(args.dim, args.count, args.coverage),
            Seed::new(args.seed),
        )?,
        EnvKind::Costfield => cost_field_demo(match args.field {
            FieldKind::High => CostFieldKind::HighCostBlock,
            FieldKind::Higher => CostFieldKind::HigherCostBlock,
            FieldKind::Radial => CostFieldKind::Radial,
        }),
    };
    write_output(&args.out, &problem.to_json_pretty()?)
}

/// Exit code 2 for config problems, 1 for execution failures.
fn cmd_bench(args: BenchArgs) -> Result<i32> {
    let text = match fs::read_to_string(&args.config) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("config error: {e}");
            return Ok(2);
        }
    };
    let mut config: SweepConfig = match serde_json::from_str(&text) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("config error: {e}");
            return Ok(2);
        }
    };
    let base = args.config.parent().unwrap_or(Path::new("."));
    if let Err(e) = config.resolve_problem(base) {
        eprintln!("config error: {e}");
        return Ok(2);
    }
    if let Err(e) = config.validate() {
        eprintln!("config error: {e}");
        return Ok(2);
    }

    let (records, aggregates) = run_sweep(&config)?;
    fs::create_dir_all(&args.out_dir)?;
    let records_path = args.out_dir.join(format!("{}_records.csv", config.problem_id));
    let aggregates_path = args.out_dir.join(format!("{}_aggregates.csv", config.problem_id));
    write_records_csv(&records, fs::File::create(&records_path)?)?;
    write_aggregates_csv(&aggregates, fs::File::create(&aggregates_path)?)?;
    eprintln!(
        "{} trials -> {} and {}",
        records.len(),
        records_path.display(),
        aggregates_path.display()
    );
    Ok(0)
}

fn cmd_oracle(command: OracleCommand) -> Result<()> {
    match command {
        OracleCommand::Grid {
            problem,
            res,
            connectivity,
        } => {
            let p = load_problem(&problem)?;
            let spec = GridSpec {
                resolution: res,
                connectivity: match connectivity {
                    Conn::Axis => Connectivity::AxisNeighbors,
                    Conn::Diagonal => Connectivity::FullDiagonal,
                },
            };
            match grid_dijkstra(&p, &spec)? {
                Some(cost) => println!("{cost}"),
                None => bail!("infeasible at this resolution"),
            }
        }
    }
    Ok(())
}

fn main() {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("error")).init();
    let cli = Cli::parse();
    let code = match cli.command {
        Command::Plan(args) => cmd_plan(args).map(|_| 0),
        Command::Env { command } => match command {
            EnvCommand::Gen(args) => cmd_env(args).map(|_| 0),
        },
        Command::Bench(args) => cmd_bench(args),
        Command::Oracle { command } => cmd_oracle(command).map(|_| 0),
    };
    match code {
        Ok(code) => std::process::exit(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            std::process::exit(1);
        }
    }
}
