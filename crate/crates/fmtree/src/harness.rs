//! Batch experiment driver: grouped trials per sample count, success rates,
//! cost/time/counter aggregates, and tidy CSV output.
//!
//! Trials are pure functions of (algorithm, problem, n, seed): per-trial
//! seeds derive as `seed_base + trial_index`, and all sampling-based planners
//! in a cell regenerate the identical sample set from that seed, so paired
//! comparisons and any level of concurrency produce bit-identical records
//! (wall time aside). Plots are left to other tools; the CSV carries one row
//! per trial plus one aggregate file.

use crate::error::{Error, Result};
use crate::planners::{
    disk_graph_shortest_path_with, fmt_plan, prm_star_plan, rrt_star_plan, PlanResult,
    PlannerConfig, Variant,
};
use crate::problem::ProblemDef;
use crate::rng::Seed;
use crate::sampling::build_sample_set;
use crate::smoothing::{adaptive_shortcut, SmoothParams};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AlgorithmId {
    Fmt,
    FmtKnn,
    Prm,
    PrmKnn,
    Rrt,
    /// Exact Dijkstra over the collision-pruned disk graph.
    Oracle,
}

impl AlgorithmId {
    pub fn as_str(&self) -> &'static str {
        match self {
            AlgorithmId::Fmt => "fmt",
            AlgorithmId::FmtKnn => "fmt-knn",
            AlgorithmId::Prm => "prm",
            AlgorithmId::PrmKnn => "prm-knn",
            AlgorithmId::Rrt => "rrt",
            AlgorithmId::Oracle => "oracle",
        }
    }
}

impl std::str::FromStr for AlgorithmId {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fmt" => Ok(AlgorithmId::Fmt),
            "fmt-knn" => Ok(AlgorithmId::FmtKnn),
            "prm" => Ok(AlgorithmId::Prm),
            "prm-knn" => Ok(AlgorithmId::PrmKnn),
            "rrt" => Ok(AlgorithmId::Rrt),
            "oracle" => Ok(AlgorithmId::Oracle),
            other => Err(Error::InvalidSpec(format!("unknown algorithm '{other}'"))),
        }
    }
}

/// One planner execution. `n` counts free-space samples for the graph
/// planners but iterations for RRT*, mirroring how such results are usually
/// reported; `cost` is finite iff `success`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub algorithm: AlgorithmId,
    pub problem: String,
    pub n: usize,
    pub seed: u64,
    pub success: bool,
    pub cost: f64,
    pub time_ms: f64,
    pub collision_checks: u64,
    pub cost_evals: u64,
    pub iterations: u64,
    pub smoothed: bool,
}

/// Run one trial. Wall time covers the planner call only (and smoothing when
/// enabled), not problem loading or serialization.
pub fn run_trial(
    algorithm: AlgorithmId,
    problem: &ProblemDef,
    problem_id: &str,
    n: usize,
    seed: u64,
    config: &PlannerConfig,
    smooth: bool,
) -> Result<TrialRecord> {
    let mut config = config.clone();
    config.variant = match algorithm {
        AlgorithmId::FmtKnn | AlgorithmId::PrmKnn => Variant::Knn,
        _ => config.variant,
    };
    if let Some(spec) = &problem.sampling {
        config.density_multiplier = spec.radius_multiplier(problem.dim());
    }

    let mut result: PlanResult = match algorithm {
        AlgorithmId::Rrt => rrt_star_plan(problem, &config, Seed::new(seed), n)?,
        _ => {
            let (samples, _) = build_sample_set(problem, n, config.goal_samples, Seed::new(seed))?;
            match algorithm {
                AlgorithmId::Fmt | AlgorithmId::FmtKnn => fmt_plan(problem, &samples, &config)?,
                AlgorithmId::Prm | AlgorithmId::PrmKnn => prm_star_plan(problem, &samples, &config)?,
                AlgorithmId::Oracle => {
                    let r = if samples.n() >= 2 {
                        config.resolve_radius(samples.n(), &problem.world, &problem.cost)?
                    } else {
                        f64::MIN_POSITIVE
                    };
                    disk_graph_shortest_path_with(problem, &samples, r, true, &config)?
                }
                AlgorithmId::Rrt => unreachable!(),
            }
        }
    };

    let mut smoothed = false;
    if smooth && result.success && result.path.len() >= 2 {
        let started = std::time::Instant::now();
        let out = adaptive_shortcut(
            &result.path,
            &problem.world,
            &problem.cost,
            &SmoothParams {
                seed: Seed::new(seed),
                // keep post-processing a small fraction of the planning work
                max_checks: Some((result.stats.collision_checks * 18 / 100).max(64)),
                ..Default::default()
            },
        )?;
        result.stats.wall_time_ms += started.elapsed().as_secs_f64() * 1e3;
        result.stats.smoothing_collision_checks = out.collision_checks;
        result.cost = out.cost;
        result.path = out.path;
        smoothed = true;
    }

    Ok(TrialRecord {
        algorithm,
        problem: problem_id.to_string(),
        n,
        seed,
        success: result.success,
        cost: result.cost,
        time_ms: result.stats.wall_time_ms,
        collision_checks: result.stats.collision_checks + result.stats.smoothing_collision_checks,
        cost_evals: result.stats.cost_evaluations,
        iterations: result.stats.iterations,
        smoothed,
    })
}

/// One algorithm column of a sweep.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AlgoSpec {
    pub algo: AlgorithmId,
    #[serde(default)]
    pub config: PlannerConfig,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepConfig {
    /// Identifier written into every record.
    pub problem_id: String,
    /// Inline problem, or a path to one via `problem_file`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub problem: Option<ProblemDef>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub problem_file: Option<String>,
    pub algorithms: Vec<AlgoSpec>,
    pub sample_counts: Vec<usize>,
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default)]
    pub seed_base: u64,
    #[serde(default)]
    pub smooth: bool,
}

fn default_trials() -> usize {
    50
}

impl SweepConfig {
    pub fn for_problem(problem_id: impl Into<String>, problem: ProblemDef) -> Self {
        SweepConfig {
            problem_id: problem_id.into(),
            problem: Some(problem),
            problem_file: None,
            algorithms: Vec::new(),
            sample_counts: Vec::new(),
            trials: default_trials(),
            seed_base: 0,
            smooth: false,
        }
    }

    /// Load `problem_file` (relative to `base`) into `problem` if needed.
    pub fn resolve_problem(&mut self, base: &std::path::Path) -> Result<()> {
        match (&self.problem, &self.problem_file) {
            (Some(_), None) => Ok(()),
            (None, Some(file)) => {
                let path = base.join(file);
                let text = std::fs::read_to_string(&path)?;
                self.problem = Some(ProblemDef::from_json(&text)?);
                Ok(())
            }
            (Some(_), Some(_)) => Err(Error::InvalidSpec(
                "give either an inline problem or a problem_file, not both".into(),
            )),
            (None, None) => Err(Error::InvalidSpec(
                "sweep config needs a problem or a problem_file".into(),
            )),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let problem = self.problem.as_ref().ok_or_else(|| {
            Error::InvalidSpec("sweep problem not resolved; call resolve_problem".into())
        })?;
        problem.validate()?;
        if self.algorithms.is_empty() || self.sample_counts.is_empty() || self.trials == 0 {
            return Err(Error::InvalidSpec(
                "sweep needs at least one algorithm, sample count, and trial".into(),
            ));
        }
        Ok(())
    }
}

/// Success rate and moments per (algorithm, n) cell. `sem_*` fields are 0
/// with `sem_defined = false` when fewer than two successes exist. Cells
/// under 50% success are flagged the way cost-vs-n plots usually omit them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregateRow {
    pub algorithm: AlgorithmId,
    pub n: usize,
    pub trials: usize,
    pub successes: usize,
    pub success_rate: f64,
    pub mean_cost: f64,
    pub sem_cost: f64,
    pub mean_time_ms: f64,
    pub sem_time_ms: f64,
    pub mean_collision_checks: f64,
    pub mean_cost_evals: f64,
    pub sem_defined: bool,
    pub below_half_success: bool,
}

/// Execute every (algorithm, n, trial) cell. With the `parallel` feature the
/// trials fan out across threads; records come back sorted by
/// (algorithm, n, seed) either way.
pub fn run_sweep(config: &SweepConfig) -> Result<(Vec<TrialRecord>, Vec<AggregateRow>)> {
    config.validate()?;
    let problem = config.problem.as_ref().expect("validated above");
    let mut cells = Vec::new();
    for spec in &config.algorithms {
        for &n in &config.sample_counts {
            for trial in 0..config.trials {
                cells.push((spec.clone(), n, config.seed_base + trial as u64));
            }
        }
    }

    let run = |(spec, n, seed): &(AlgoSpec, usize, u64)| -> Result<TrialRecord> {
        run_trial(
            spec.algo,
            problem,
            &config.problem_id,
            *n,
            *seed,
            &spec.config,
            config.smooth,
        )
    };

    #[cfg(feature = "parallel")]
    let mut records = {
        use rayon::prelude::*;
        cells.par_iter().map(run).collect::<Result<Vec<_>>>()?
    };
    #[cfg(not(feature = "parallel"))]
    let mut records = cells.iter().map(run).collect::<Result<Vec<_>>>()?;

    records.sort_by(|a, b| {
        a.algorithm
            .as_str()
            .cmp(b.algorithm.as_str())
            .then(a.n.cmp(&b.n))
            .then(a.seed.cmp(&b.seed))
    });
    let aggregates = aggregate(&records)?;
    Ok((records, aggregates))
}

fn mean_sem(values: &[f64]) -> (f64, f64, bool) {
    match values.len() {
        0 => (f64::NAN, 0.0, false),
        1 => (values[0], 0.0, false),
        n => {
            let mean = values.iter().sum::<f64>() / n as f64;
            let var =
                values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n as f64 - 1.0);
            (mean, (var / n as f64).sqrt(), true)
        }
    }
}

/// Group records into summary rows, ordered by (algorithm, n). Aggregates
/// are recomputable from the raw records; nothing here holds hidden state.
pub fn aggregate(records: &[TrialRecord]) -> Result<Vec<AggregateRow>> {
    if records.is_empty() {
        return Err(Error::InvalidSpec("nothing to aggregate".into()));
    }
    let mut groups: Vec<(AlgorithmId, usize)> = records
        .iter()
        .map(|r| (r.algorithm, r.n))
        .collect();
    groups.sort_by(|a, b| a.0.as_str().cmp(b.0.as_str()).then(a.1.cmp(&b.1)));
    groups.dedup();

    let mut rows = Vec::with_capacity(groups.len());
    for (algo, n) in groups {
        let cell: Vec<&TrialRecord> = records
            .iter()
            .filter(|r| r.algorithm == algo && r.n == n)
            .collect();
        let successes: Vec<&&TrialRecord> = cell.iter().filter(|r| r.success).collect();
        let costs: Vec<f64> = successes.iter().map(|r| r.cost).collect();
        let times: Vec<f64> = cell.iter().map(|r| r.time_ms).collect();
        let (mean_cost, sem_cost, cost_sem_defined) = mean_sem(&costs);
        let (mean_time, sem_time, _) = mean_sem(&times);
        let rate = successes.len() as f64 / cell.len() as f64;
        rows.push(AggregateRow {
            algorithm: algo,
            n,
            trials: cell.len(),
            successes: successes.len(),
            success_rate: rate,
            mean_cost,
            sem_cost,
            mean_time_ms: mean_time,
            sem_time_ms: sem_time,
            mean_collision_checks: cell.iter().map(|r| r.collision_checks as f64).sum::<f64>()
                / cell.len() as f64,
            mean_cost_evals: cell.iter().map(|r| r.cost_evals as f64).sum::<f64>()
                / cell.len() as f64,
            sem_defined: cost_sem_defined,
            below_half_success: rate < 0.5,
        });
    }
    Ok(rows)
}

/// CSV with the column order:
/// `algorithm,problem,n,seed,success,cost,time_ms,collision_checks,cost_evals,iterations,smoothed`.
pub fn write_records_csv<W: std::io::Write>(records: &[TrialRecord], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in records {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_records_csv<R: std::io::Read>(input: R) -> Result<Vec<TrialRecord>> {
    let mut reader = csv::Reader::from_reader(input);
    let mut out = Vec::new();
    for row in reader.deserialize() {
        out.push(row?);
    }
    Ok(out)
}

pub fn write_aggregates_csv<W: std::io::Write>(rows: &[AggregateRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::costs::CostModel;
    use crate::geometry::{GoalRegion, Point, World};

    fn toy_problem() -> ProblemDef {
        ProblemDef::new(
            World::new(2, vec![]).unwrap(),
            Point(vec![0.2, 0.2]),
            GoalRegion::Ball {
                center: Point(vec![0.8, 0.8]),
                xi: 0.08,
            },
            CostModel::Euclidean,
        )
        .unwrap()
    }

    fn toy_sweep() -> SweepConfig {
        let mut sweep = SweepConfig::for_problem("toy", toy_problem());
        sweep.algorithms = vec![AlgoSpec {
            algo: AlgorithmId::Fmt,
            config: PlannerConfig::default(),
        }];
        sweep.sample_counts = vec![150];
        sweep.trials = 5;
        sweep.seed_base = 10;
        sweep
    }

    #[test]
    fn trials_are_deterministic_up_to_wall_time() {
        let p = toy_problem();
        let cfg = PlannerConfig::default();
        let a = run_trial(AlgorithmId::Fmt, &p, "toy", 200, 3, &cfg, false).unwrap();
        let b = run_trial(AlgorithmId::Fmt, &p, "toy", 200, 3, &cfg, false).unwrap();
        assert_eq!(a.cost, b.cost);
        assert_eq!(a.collision_checks, b.collision_checks);
        assert_eq!(a.iterations, b.iterations);
    }

    #[test]
    fn n_zero_without_goal_at_start_fails() {
        let p = toy_problem();
        let cfg = PlannerConfig::default();
        let r = run_trial(AlgorithmId::Fmt, &p, "toy", 0, 3, &cfg, false).unwrap();
        assert!(!r.success);
        assert!(r.cost.is_infinite());
    }

    #[test]
    fn paired_fmt_prm_invariants() {
        let p = toy_problem();
        let cfg = PlannerConfig::default();
        for seed in 0..10 {
            let fmt = run_trial(AlgorithmId::Fmt, &p, "toy", 300, seed, &cfg, false).unwrap();
            let prm = run_trial(AlgorithmId::Prm, &p, "toy", 300, seed, &cfg, false).unwrap();
            assert!(fmt.success && prm.success);
            assert!(prm.cost <= fmt.cost + 1e-12);
            assert!(fmt.collision_checks <= prm.collision_checks);
        }
    }

    #[test]
    fn sweep_shapes_and_aggregate() {
        let (records, aggregates) = run_sweep(&toy_sweep()).unwrap();
        assert_eq!(records.len(), 5);
        assert_eq!(aggregates.len(), 1);
        let row = &aggregates[0];
        assert_eq!(row.trials, 5);
        assert!(row.success_rate > 0.0);
        // aggregates recompute from raw records
        let again = aggregate(&records).unwrap();
        assert_eq!(again, aggregates);
    }

    #[test]
    fn sweep_is_concurrency_invariant() {
        let (a, _) = run_sweep(&toy_sweep()).unwrap();
        let (b, _) = run_sweep(&toy_sweep()).unwrap();
        let strip = |records: &[TrialRecord]| -> Vec<(u64, u64, f64)> {
            records
                .iter()
                .map(|r| (r.seed, r.collision_checks, r.cost))
                .collect()
        };
        assert_eq!(strip(&a), strip(&b));
    }

    #[test]
    fn csv_round_trip() {
        let (records, _) = run_sweep(&toy_sweep()).unwrap();
        let mut buf = Vec::new();
        write_records_csv(&records, &mut buf).unwrap();
        let header = String::from_utf8_lossy(&buf);
        assert!(header.starts_with(
            "algorithm,problem,n,seed,success,cost,time_ms,collision_checks,cost_evals,iterations,smoothed"
        ));
        let parsed = read_records_csv(&buf[..]).unwrap();
        assert_eq!(parsed, records);
    }

    #[test]
    fn aggregate_reference_values() {
        let base = TrialRecord {
            algorithm: AlgorithmId::Fmt,
            problem: "toy".into(),
            n: 10,
            seed: 0,
            success: true,
            cost: 1.0,
            time_ms: 1.0,
            collision_checks: 1,
            cost_evals: 1,
            iterations: 1,
            smoothed: false,
        };
        // {1,2,3}: mean 2, sem 1/sqrt(3)
        let records: Vec<TrialRecord> = [1.0, 2.0, 3.0]
            .iter()
            .enumerate()
            .map(|(i, &c)| TrialRecord {
                seed: i as u64,
                cost: c,
                ..base.clone()
            })
            .collect();
        let rows = aggregate(&records).unwrap();
        assert!((rows[0].mean_cost - 2.0).abs() < 1e-12);
        assert!((rows[0].sem_cost - 0.57735).abs() < 1e-5);
        // single record: sem flagged undefined, emitted as zero
        let rows = aggregate(&records[..1]).unwrap();
        assert_eq!(rows[0].sem_cost, 0.0);
        assert!(!rows[0].sem_defined);
        // two equal costs: sem 0 but defined
        let rows = aggregate(
            &[records[1].clone(), TrialRecord { seed: 9, ..records[1].clone() }],
        )
        .unwrap();
        assert_eq!(rows[0].sem_cost, 0.0);
        assert!(rows[0].sem_defined);
        // all failures leave the cost column empty (NaN) with rate 0
        let failed: Vec<TrialRecord> = records
            .iter()
            .map(|r| TrialRecord {
                success: false,
                cost: f64::INFINITY,
                ..r.clone()
            })
            .collect();
        let rows = aggregate(&failed).unwrap();
        assert_eq!(rows[0].success_rate, 0.0);
        assert!(rows[0].mean_cost.is_nan());
    }
}
