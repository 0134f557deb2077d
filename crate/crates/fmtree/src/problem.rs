//! One planning query: world + start + goal + cost model, with the JSON
//! schema shared by the CLI, the generators, and the browser demo.

use crate::costs::CostModel;
use crate::error::{Error, Result};
use crate::geometry::{Aabb, GoalRegion, Point, World};
use crate::sampling::DensitySpec;
use serde::{Deserialize, Serialize};

/// A planning problem. Construct with [`ProblemDef::new`] (which validates
/// and caches the free-space measure) or parse from JSON.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(try_from = "ProblemJson", into = "ProblemJson")]
pub struct ProblemDef {
    pub world: World,
    pub x_init: Point,
    pub goal: GoalRegion,
    pub cost: CostModel,
    pub sampling: Option<DensitySpec>,
    pub provenance: Option<serde_json::Value>,
}

impl ProblemDef {
    pub fn new(
        world: World,
        x_init: Point,
        goal: GoalRegion,
        cost: CostModel,
    ) -> Result<Self> {
        let p = ProblemDef {
            world,
            x_init,
            goal,
            cost,
            sampling: None,
            provenance: None,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let d = self.world.dim();
        if self.x_init.dim() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: self.x_init.dim(),
            });
        }
        if !self.x_init.is_finite() || !self.world.point_free(&self.x_init) {
            return Err(Error::InvalidSpec("x_init must lie in free space".into()));
        }
        self.goal.validate(d)?;
        self.cost.validate(d)?;
        if let Some(spec) = &self.sampling {
            spec.validate()?;
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.world.dim()
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn to_json_pretty(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// Wire format. `dim`/`obstacles` are flattened into the top level; the
/// cached measure is recomputed on load rather than trusted from the file.
#[derive(Serialize, Deserialize)]
struct ProblemJson {
    dim: usize,
    obstacles: Vec<Aabb>,
    x_init: Point,
    goal: GoalRegion,
    #[serde(default = "default_cost")]
    cost: CostModel,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    sampling: Option<DensitySpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    provenance: Option<serde_json::Value>,
}

fn default_cost() -> CostModel {
    CostModel::Euclidean
}

impl TryFrom<ProblemJson> for ProblemDef {
    type Error = Error;

    fn try_from(j: ProblemJson) -> Result<Self> {
        let world = World::new(j.dim, j.obstacles)?;
        let p = ProblemDef {
            world,
            x_init: j.x_init,
            goal: j.goal,
            cost: j.cost,
            sampling: j.sampling,
            provenance: j.provenance,
        };
        p.validate()?;
        Ok(p)
    }
}

impl From<ProblemDef> for ProblemJson {
    fn from(p: ProblemDef) -> Self {
        ProblemJson {
            dim: p.world.dim(),
            obstacles: p.world.obstacles().to_vec(),
            x_init: p.x_init,
            goal: p.goal,
            cost: p.cost,
            sampling: p.sampling,
            provenance: p.provenance,
        }
    }
}
