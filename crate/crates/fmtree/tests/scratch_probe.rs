//! Temporary calibration probe (deleted before release).

use fmtree::environments::*;
use fmtree::harness::*;
use fmtree::oracle::*;
use fmtree::planners::*;
use fmtree::problem::ProblemDef;
use fmtree::rng::Seed;
use fmtree::sampling::build_sample_set;

#[test]
#[ignore]
fn probe_maze_constants() {
    for dim in [2usize, 3] {
        let spec = MazeSpec::with_dim(dim);
        let p = recursive_maze(&spec).unwrap();
        let res = if dim == 2 { 256 } else { 64 };
        let grid = grid_dijkstra(&p, &GridSpec::diagonal(res)).unwrap();
        println!(
            "maze d={dim}: grid={:?} lb={:.5} mu={:.4} obstacles={}",
            grid,
            recursion_lower_bound(&spec),
            p.world.mu_free(),
            p.world.obstacles().len()
        );
    }
    for dim in [4usize, 5, 6, 7] {
        let spec = MazeSpec::with_dim(dim);
        let p = recursive_maze(&spec).unwrap();
        println!(
            "maze d={dim}: lb={:.5} mu={:.4} obstacles={}",
            recursion_lower_bound(&spec),
            p.world.mu_free(),
            p.world.obstacles().len()
        );
    }
}

#[test]
#[ignore]
fn probe_maze_3d_success() {
    let p = recursive_maze(&MazeSpec::with_dim(3)).unwrap();
    let cfg = PlannerConfig::default();
    for n in [250usize, 500, 1000, 2000, 4000] {
        let mut ok_fmt = 0;
        let mut ok_prm = 0;
        let mut cost_fmt = 0.0;
        let mut cost_prm = 0.0;
        let trials = 20;
        for seed in 0..trials {
            let f = run_trial(AlgorithmId::Fmt, &p, "maze3", n, seed, &cfg, false).unwrap();
            let g = run_trial(AlgorithmId::Prm, &p, "maze3", n, seed, &cfg, false).unwrap();
            if f.success {
                ok_fmt += 1;
                cost_fmt += f.cost;
            }
            if g.success {
                ok_prm += 1;
                cost_prm += g.cost;
            }
        }
        println!(
            "maze3 n={n}: fmt {}/{} mean {:.4} | prm {}/{} mean {:.4}",
            ok_fmt,
            trials,
            cost_fmt / ok_fmt.max(1) as f64,
            ok_prm,
            trials,
            cost_prm / ok_prm.max(1) as f64
        );
    }
}

#[test]
#[ignore]
fn probe_maze_5d_success() {
    let spec = MazeSpec::with_dim(5);
    let p = recursive_maze(&spec).unwrap();
    let lb = recursion_lower_bound(&spec);
    let cfg = PlannerConfig::default();
    for n in [4000usize, 8000, 16000, 32000] {
        let mut ok = 0;
        let mut cost = 0.0;
        let trials = 10;
        let t0 = std::time::Instant::now();
        for seed in 0..trials {
            let f = run_trial(AlgorithmId::Fmt, &p, "maze5", n, seed, &cfg, false).unwrap();
            if f.success {
                ok += 1;
                cost += f.cost;
            }
        }
        println!(
            "maze5 n={n}: fmt {}/{} mean {:.4} (lb {:.4}) [{:?}]",
            ok,
            trials,
            cost / ok.max(1) as f64,
            lb,
            t0.elapsed()
        );
    }
}

#[test]
#[ignore]
fn probe_maze_5d_smoothing() {
    let spec = MazeSpec::with_dim(5);
    let p = recursive_maze(&spec).unwrap();
    let lb = recursion_lower_bound(&spec);
    let cfg = PlannerConfig::default();
    let n = 4000;
    let mut raw = Vec::new();
    let mut smoothed = Vec::new();
    let mut ratios = Vec::new();
    for seed in 0..10 {
        let f = run_trial(AlgorithmId::Fmt, &p, "maze5", n, seed, &cfg, false).unwrap();
        let s = run_trial(AlgorithmId::Fmt, &p, "maze5", n, seed, &cfg, true).unwrap();
        if s.success {
            raw.push(f.cost);
            smoothed.push(s.cost);
            let extra = s.collision_checks as f64 / f.collision_checks as f64 - 1.0;
            ratios.push(extra);
        }
    }
    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len().max(1) as f64;
    println!(
        "maze5 smoothing n={n}: raw {:.4} smoothed {:.4} lb {:.4} ratio {:.4} extra-checks {:.3}",
        mean(&raw),
        mean(&smoothed),
        lb,
        mean(&smoothed) / lb,
        mean(&ratios)
    );
}

#[test]
#[ignore]
fn probe_cost_fields() {
    let block = cost_field_block();
    for kind in [CostFieldKind::HighCostBlock, CostFieldKind::HigherCostBlock] {
        let p = cost_field_demo(kind);
        let winner = block_field_winner(&p, &block, 1000).unwrap();
        let mut through = 0;
        let mut ok = 0;
        let mut occs: Vec<f64> = Vec::new();
        let trials = 20;
        for seed in 0..trials {
            let (samples, _) = build_sample_set(&p, 2000, 1, Seed::new(seed)).unwrap();
            let f = fmt_plan(&p, &samples, &PlannerConfig::default()).unwrap();
            if f.success {
                ok += 1;
                let occ = path_block_occupancy(&f.path, &block);
                if classify_block_path(&f.path, &block) == Winner::Through {
                    through += 1;
                }
                occs.push(occ);
            }
        }
        occs.sort_by(f64::total_cmp);
        println!(
            "{kind:?}: oracle={winner:?} fmt through {through}/{ok} occ range {:.3}..{:.3}",
            occs.first().unwrap_or(&f64::NAN),
            occs.last().unwrap_or(&f64::NAN)
        );
    }
}

#[test]
#[ignore]
fn probe_convergence_trend() {
    let p = ProblemDef::from_json(
        r#"{"dim":2,"obstacles":[],"x_init":[0.5,0.5],
            "goal":{"kind":"ball","center":[1.0,1.0],"xi":0.1}}"#,
    )
    .unwrap();
    let cstar = std::f64::consts::SQRT_2 / 2.0 - 0.1;
    let cfg = PlannerConfig::default();
    for n in [100usize, 400, 1600, 6400] {
        let mut exceed = 0;
        let mut costs = Vec::new();
        for seed in 0..50 {
            let (samples, _) = build_sample_set(&p, n, 1, Seed::new(seed)).unwrap();
            let f = fmt_plan(&p, &samples, &cfg).unwrap();
            let c = if f.success { f.cost } else { f64::INFINITY };
            if c > 1.05 * cstar {
                exceed += 1;
            }
            costs.push(c);
        }
        costs.sort_by(f64::total_cmp);
        println!(
            "n={n}: exceed {exceed}/50 median {:.5} (1.03c* = {:.5})",
            costs[25],
            1.03 * cstar
        );
    }
}

#[test]
#[ignore]
fn probe_knn_vs_radial_5d() {
    let p = ProblemDef::from_json(
        r#"{"dim":5,"obstacles":[],"x_init":[0.5,0.5,0.5,0.5,0.5],
            "goal":{"kind":"ball","center":[0.9,0.9,0.9,0.9,0.9],"xi":0.12}}"#,
    )
    .unwrap();
    let n = 4000;
    let radial = PlannerConfig {
        eta: std::f64::consts::E.powf(0.2) - 1.0,
        ..Default::default()
    };
    let knn = PlannerConfig::knn();
    let mut rc = Vec::new();
    let mut kc = Vec::new();
    let t0 = std::time::Instant::now();
    for seed in 0..10 {
        let (samples, _) = build_sample_set(&p, n, 1, Seed::new(seed)).unwrap();
        let a = fmt_plan(&p, &samples, &radial).unwrap();
        let b = fmt_plan(&p, &samples, &knn).unwrap();
        if a.success {
            rc.push(a.cost);
        }
        if b.success {
            kc.push(b.cost);
        }
    }
    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len().max(1) as f64;
    println!(
        "5d n={n}: radial {}/{} mean {:.4} | knn {}/{} mean {:.4} [{:?}]",
        rc.len(),
        10,
        mean(&rc),
        kc.len(),
        10,
        mean(&kc),
        t0.elapsed()
    );
}

#[test]
#[ignore]
fn probe_checks_scaling() {
    let p = ProblemDef::from_json(
        r#"{"dim":2,"obstacles":[],"x_init":[0.5,0.5],
            "goal":{"kind":"ball","center":[1.0,1.0],"xi":0.1}}"#,
    )
    .unwrap();
    let cfg = PlannerConfig::default();
    for n in [500usize, 1000, 2000, 4000, 8000] {
        let mut checks = Vec::new();
        let mut nears = Vec::new();
        for seed in 0..10 {
            let (samples, _) = build_sample_set(&p, n, 1, Seed::new(seed)).unwrap();
            let f = fmt_plan(&p, &samples, &cfg).unwrap();
            assert!(f.success);
            checks.push(f.stats.collision_checks as f64);
            nears.push(f.stats.near_computations as f64);
        }
        let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
        println!("n={n}: checks {:.1} nears {:.1}", mean(&checks), mean(&nears));
    }
}

#[test]
#[ignore]
fn probe_paired_dominance() {
    let cfg = PlannerConfig::default();
    let problems = vec![
        ("bugtrap", bug_trap_2d(&BugTrapSpec::default()).unwrap()),
        ("maze2", recursive_maze(&MazeSpec::with_dim(2)).unwrap()),
        (
            "clutter",
            random_clutter(&ClutterSpec::new(2, 40, 0.25), Seed::new(202)).unwrap(),
        ),
    ];
    for (name, p) in &problems {
        for n in [1000usize, 2000, 4000] {
            let mut ratios = Vec::new();
            let mut worst_cost_ratio: f64 = 0.0;
            let mut fails = 0;
            for seed in 0..10 {
                let f = run_trial(AlgorithmId::Fmt, p, name, n, seed, &cfg, false).unwrap();
                let g = run_trial(AlgorithmId::Prm, p, name, n, seed, &cfg, false).unwrap();
                if f.success && g.success {
                    ratios.push(f.collision_checks as f64 / g.collision_checks as f64);
                    worst_cost_ratio = worst_cost_ratio.max(f.cost / g.cost);
                } else {
                    fails += 1;
                }
            }
            ratios.sort_by(f64::total_cmp);
            println!(
                "{name} n={n}: fails {fails} median check ratio {:.3} worst cost ratio {:.4}",
                ratios.get(ratios.len() / 2).copied().unwrap_or(f64::NAN),
                worst_cost_ratio
            );
        }
    }
}
