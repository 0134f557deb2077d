use fmtree::environments::*;
use fmtree::planners::*;
use fmtree::rng::Seed;
use fmtree::sampling::build_sample_set;
use fmtree::smoothing::*;

#[test]
#[ignore]
fn probe_param_sweep() {
    let heavy = SmoothParams { max_rounds: 300, stall_rounds: 30, seed: Seed::new(0), ..Default::default() };
    for (t, cf) in [(0.10, 0.2), (0.10, 0.3), (0.12, 0.3), (0.10, 0.4), (0.14, 0.35)] {
        let spec = MazeSpec { dim: 5, wall_thickness: t, corridor_fraction: cf };
        let p = match recursive_maze(&spec) { Ok(p) => p, Err(e) => { println!("t={t} cf={cf}: {e}"); continue; } };
        // d=7 feasibility with the same params
        let spec7 = MazeSpec { dim: 7, wall_thickness: t, corridor_fraction: cf };
        let ok7 = recursive_maze(&spec7).is_ok();
        let lb = recursion_lower_bound(&spec);
        let mut ratios = Vec::new();
        let mut extra = Vec::new();
        let mut heavy_ratios = Vec::new();
        for seed in 0..6u64 {
            let (samples, _) = build_sample_set(&p, 4000, 1, Seed::new(seed)).unwrap();
            let f = fmt_plan(&p, &samples, &PlannerConfig::default()).unwrap();
            if !f.success { continue; }
            let s = adaptive_shortcut(&f.path, &p.world, &p.cost, &SmoothParams { seed: Seed::new(seed), ..Default::default() }).unwrap();
            let hs = adaptive_shortcut(&f.path, &p.world, &p.cost, &heavy).unwrap();
            ratios.push(s.cost / lb);
            heavy_ratios.push(hs.cost / lb);
            extra.push(s.collision_checks as f64 / f.stats.collision_checks as f64);
        }
        let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len().max(1) as f64;
        println!(
            "t={t} cf={cf}: lb {lb:.3} default-ratio {:.4} heavy-ratio {:.4} extra {:.3} successes {}/6 d7ok {ok7}",
            mean(&ratios), mean(&heavy_ratios), mean(&extra), ratios.len()
        );
    }
}

#[test]
#[ignore]
fn probe_true_plateau() {
    let spec = MazeSpec::with_dim(5);
    let p = recursive_maze(&spec).unwrap();
    let lb = recursion_lower_bound(&spec);
    let huge = SmoothParams { max_rounds: 2000, stall_rounds: 150, seed: Seed::new(0), ..Default::default() };
    for seed in [2u64, 3] {
        let (samples, _) = build_sample_set(&p, 4000, 1, Seed::new(seed)).unwrap();
        let f = fmt_plan(&p, &samples, &PlannerConfig::default()).unwrap();
        if !f.success { continue; }
        let s = adaptive_shortcut(&f.path, &p.world, &p.cost, &huge).unwrap();
        println!("plateau seed {seed}: raw {:.3} -> {:.4} lb {lb:.4} ratio {:.4} checks {} (planner {})",
                 f.cost, s.cost, s.cost / lb, s.collision_checks, f.stats.collision_checks);
    }
}

#[test]
#[ignore]
fn probe_knn_maze5() {
    let spec = MazeSpec::with_dim(5);
    let p = recursive_maze(&spec).unwrap();
    let lb = recursion_lower_bound(&spec);
    let cfg = PlannerConfig::knn();
    for n in [2000usize, 4000] {
        let mut oks = 0;
        for seed in 0..6u64 {
            let (samples, _) = build_sample_set(&p, n, 1, Seed::new(seed)).unwrap();
            let f = fmt_plan(&p, &samples, &cfg).unwrap();
            if !f.success { continue; }
            oks += 1;
            let s = adaptive_shortcut(&f.path, &p.world, &p.cost,
                &SmoothParams { seed: Seed::new(seed),
                    max_checks: Some((f.stats.collision_checks * 18 / 100).max(64)),
                    ..Default::default() }).unwrap();
            println!(
                "knn n={n} seed {seed}: raw {:.3} smoothed {:.4} ratio {:.4} checks {} / planner {} = {:.3}",
                f.cost, s.cost, s.cost / lb, s.collision_checks, f.stats.collision_checks,
                s.collision_checks as f64 / f.stats.collision_checks as f64
            );
        }
        println!("knn n={n}: {oks}/6 success");
    }
}
