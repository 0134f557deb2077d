//! Sample-set generation: uniform and lower-bounded non-uniform densities,
//! with reproducible seeding and explicit goal-region samples.
//!
//! Planners receive a finished [`SampleSet`]; index 0 is always the start
//! configuration. Goal samples are appended by [`build_sample_set`] (not by
//! the raw samplers) so success-rate statistics stay interpretable: the
//! appended samples are flagged and counted in `n`.

use crate::error::{Error, Result};
use crate::geometry::{Aabb, GoalRegion, Point, World};
use crate::problem::ProblemDef;
use crate::rng::{streams, Seed};
use rand::Rng;
use rand_chacha::ChaCha12Rng;
use serde::{Deserialize, Serialize};

/// Indexed sample list. `points[0]` is the start; `n()` counts everything
/// else, including appended goal samples.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleSet {
    pub points: Vec<Point>,
    pub seed: Seed,
    /// Indices of samples drawn explicitly from the goal region.
    pub goal_appended: Vec<u32>,
}

impl SampleSet {
    pub fn n(&self) -> usize {
        self.points.len() - 1
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        false // always holds at least the start
    }
}

/// A sampling density over free space, bounded below by `ell`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum DensitySpec {
    Uniform,
    /// `uniform_weight` of the mass is uniform over free space; the rest is
    /// uniform over `focus` (intersected with free space).
    Mixture {
        /// Declared lower bound on the density over free space.
        ell: f64,
        uniform_weight: f64,
        focus: Aabb,
        /// Optional declared envelope (upper bound on the density). When
        /// present it drives rejection, and a sample exceeding it is an
        /// error in the spec.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        envelope: Option<f64>,
    },
}

impl DensitySpec {
    pub fn validate(&self) -> Result<()> {
        match self {
            DensitySpec::Uniform => Ok(()),
            DensitySpec::Mixture {
                ell,
                uniform_weight,
                envelope,
                ..
            } => {
                if !(0.0 < *ell && *ell <= 1.0) {
                    return Err(Error::InvalidSpec("density lower bound ell must be in (0,1]".into()));
                }
                if !(0.0..=1.0).contains(uniform_weight) || *uniform_weight == 0.0 {
                    return Err(Error::InvalidSpec(
                        "mixture uniform weight must be in (0,1]".into(),
                    ));
                }
                if let Some(env) = envelope {
                    if *env < *ell {
                        return Err(Error::InvalidSpec("envelope below lower bound".into()));
                    }
                }
                Ok(())
            }
        }
    }

    /// Lower bound `ell`; 1 for the uniform density.
    pub fn ell(&self) -> f64 {
        match self {
            DensitySpec::Uniform => 1.0,
            DensitySpec::Mixture { ell, .. } => *ell,
        }
    }

    /// The `(1/ell)^(1/d)` factor the planner must apply to its radius.
    pub fn radius_multiplier(&self, d: usize) -> f64 {
        (1.0 / self.ell()).powf(1.0 / d as f64)
    }
}

fn draw_free_point(rng: &mut ChaCha12Rng, world: &World, accepted: &mut u64, attempts: &mut u64) -> Result<Point> {
    let d = world.dim();
    let mut x = vec![0.0f64; d];
    loop {
        for c in x.iter_mut() {
            *c = rng.random::<f64>();
        }
        *attempts += 1;
        if world.point_free(&x) {
            *accepted += 1;
            return Ok(Point(x));
        }
        // degenerate-world guard
        if *attempts >= 100_000 && (*accepted as f64) < 1e-4 * *attempts as f64 {
            return Err(Error::DegenerateWorld(1e-4));
        }
    }
}

/// `n` i.i.d. uniform samples on free space by rejection from the unit cube.
/// Deterministic given the seed; index 0 is `x_init`.
pub fn sample_free(n: usize, world: &World, x_init: &Point, seed: Seed) -> Result<SampleSet> {
    if world.mu_free() <= 0.0 {
        return Err(Error::DegenerateWorld(0.0));
    }
    let seed = seed.with_stream(streams::SAMPLE_FREE);
    let mut rng = seed.rng();
    let mut points = Vec::with_capacity(n + 1);
    points.push(x_init.clone());
    let (mut accepted, mut attempts) = (0u64, 0u64);
    for _ in 0..n {
        points.push(draw_free_point(&mut rng, world, &mut accepted, &mut attempts)?);
    }
    Ok(SampleSet {
        points,
        seed,
        goal_appended: Vec::new(),
    })
}

/// `n` i.i.d. samples from the density. Returns the sample set and the
/// radius multiplier `(1/ell)^{1/d}` the planner must apply.
pub fn sample_density(
    n: usize,
    spec: &DensitySpec,
    world: &World,
    x_init: &Point,
    seed: Seed,
) -> Result<(SampleSet, f64)> {
    spec.validate()?;
    let d = world.dim();
    match spec {
        DensitySpec::Uniform => {
            let set = sample_free(n, world, x_init, seed)?;
            Ok((set, 1.0))
        }
        DensitySpec::Mixture {
            ell,
            uniform_weight,
            focus,
            envelope,
        } => {
            let mu = world.mu_free();
            let phi_outside = uniform_weight / mu;
            if phi_outside + 1e-12 < *ell {
                return Err(Error::InvalidSpec(format!(
                    "declared ell {ell} exceeds the density's true floor {phi_outside}"
                )));
            }
            // measure of focus ∩ free, estimated once with a pinned seed so
            // the density itself does not depend on the caller's seed
            let mu_focus = {
                let mut mrng = Seed::new(0).with_stream(streams::MEASURE).rng();
                let trials = 200_000;
                let mut hits = 0u64;
                let mut x = vec![0.0f64; d];
                for _ in 0..trials {
                    for (i, c) in x.iter_mut().enumerate() {
                        *c = focus.min[i] + mrng.random::<f64>() * (focus.max[i] - focus.min[i]);
                    }
                    if world.point_free(&x) {
                        hits += 1;
                    }
                }
                focus.volume() * hits as f64 / trials as f64
            };
            if mu_focus <= 0.0 {
                return Err(Error::InvalidSpec("mixture focus region has no free volume".into()));
            }
            let phi = |x: &[f64]| -> f64 {
                let mut v = uniform_weight / mu;
                if focus.contains(x) {
                    v += (1.0 - uniform_weight) / mu_focus;
                }
                v
            };
            let env = envelope.unwrap_or(phi_outside + (1.0 - uniform_weight) / mu_focus);

            let seed = seed.with_stream(streams::DENSITY);
            let mut rng = seed.rng();
            let mut points = Vec::with_capacity(n + 1);
            points.push(x_init.clone());
            let (mut accepted, mut attempts) = (0u64, 0u64);
            while points.len() < n + 1 {
                let x = draw_free_point(&mut rng, world, &mut accepted, &mut attempts)?;
                let density = phi(&x);
                if density > env * (1.0 + 1e-9) {
                    return Err(Error::InvalidSpec(format!(
                        "density {density} exceeds declared envelope {env}"
                    )));
                }
                if rng.random::<f64>() * env < density {
                    points.push(x);
                }
            }
            let set = SampleSet {
                points,
                seed,
                goal_appended: Vec::new(),
            };
            Ok((set, spec.radius_multiplier(d)))
        }
    }
}

/// Append `g` samples drawn uniformly from `goal ∩ free` and flag them.
pub fn append_goal_samples(
    set: &mut SampleSet,
    world: &World,
    goal: &GoalRegion,
    g: usize,
    seed: Seed,
) -> Result<()> {
    if g == 0 {
        return Ok(());
    }
    let mut rng = seed.with_stream(streams::GOAL_SAMPLES).rng();
    let bb = goal.bounding_box();
    let d = world.dim();
    let mut x = vec![0.0f64; d];
    for _ in 0..g {
        let mut attempts = 0u64;
        loop {
            for (i, c) in x.iter_mut().enumerate() {
                *c = bb.min[i] + rng.random::<f64>() * (bb.max[i] - bb.min[i]);
            }
            attempts += 1;
            if goal.contains(&x) && world.point_free(&x) {
                set.goal_appended.push(set.points.len() as u32);
                set.points.push(Point(x.clone()));
                break;
            }
            if attempts > 1_000_000 {
                return Err(Error::DegenerateWorld(1e-6));
            }
        }
    }
    Ok(())
}

/// Build the sample set a planner runs on: `n - g` density samples plus `g`
/// goal samples, sharing one base seed. This is the set FMT* and PRM* must
/// share for paired comparisons.
pub fn build_sample_set(
    problem: &ProblemDef,
    n: usize,
    goal_samples: usize,
    seed: Seed,
) -> Result<(SampleSet, f64)> {
    let g = goal_samples.min(n);
    let free_n = n - g;
    let (mut set, multiplier) = match &problem.sampling {
        Some(spec) => sample_density(free_n, spec, &problem.world, &problem.x_init, seed)?,
        None => (
            sample_free(free_n, &problem.world, &problem.x_init, seed)?,
            1.0,
        ),
    };
    append_goal_samples(&mut set, &problem.world, &problem.goal, g, seed)?;
    Ok((set, multiplier))
}
