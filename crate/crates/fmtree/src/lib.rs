//! Sampling-based optimal motion planning in the unit cube `[0,1]^d`.
//!
//! The centerpiece is a fast-marching tree planner ([`planners::fmt_plan`])
//! that grows a tree of paths outward in cost-to-arrive order over a disk
//! graph (or k-nearest graph) of samples, checking collisions lazily. It
//! ships together with the baselines it is usually measured against
//! (PRM*, RRT*, and an exact disk-graph Dijkstra oracle), deterministic
//! benchmark world generators, a shortcut smoother, and a batch sweep
//! harness that emits tidy CSV.
//!
//! Everything is seeded and reproducible: the same problem, sample count,
//! and seed always yield the same plan.

pub mod costs;
pub mod environments;
pub mod error;
pub mod geometry;
pub mod harness;
pub mod neighbors;
pub mod oracle;
pub mod planners;
pub mod problem;
pub mod rng;
pub mod sampling;
pub mod smoothing;

pub use error::{Error, Result};
pub use geometry::{Aabb, GoalRegion, Point, World};
pub use problem::ProblemDef;
