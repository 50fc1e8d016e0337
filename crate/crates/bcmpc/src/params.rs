//! Aggregated, file-loadable configuration.
//!
//! Every tunable of the planner, plant, cost model, and simulation loop in
//! one serializable bundle. Field names carry explicit units so parameter
//! files cannot silently mix knots with meters per second.

use serde::{Deserialize, Serialize};

use crate::cost::{ObjectiveWeights, ObstacleRegions};
use crate::primitives::GuidanceConfig;
use crate::tree::TreeConfig;
use crate::vessel::PlantConfig;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct Params {
    pub tree: TreeConfig,
    pub plant: PlantConfig,
    pub weights: ObjectiveWeights,
    pub regions: ObstacleRegions,
    pub guidance: GuidanceConfig,
    /// Distance mapping to an alignment term of 1.
    pub align_normalization_m: f64,
    /// Replanning period of the receding-horizon loop.
    pub planner_period_s: f64,
    /// Delivery period of moving-obstacle estimates.
    pub radar_period_s: f64,
    /// Cell size of the static occupancy grid.
    pub grid_resolution_m: f64,
}

impl Default for Params {
    fn default() -> Self {
        Self {
            tree: TreeConfig::default(),
            plant: PlantConfig::default(),
            weights: ObjectiveWeights::default(),
            regions: ObstacleRegions::default(),
            guidance: GuidanceConfig::default(),
            align_normalization_m: 100.0,
            planner_period_s: 5.0,
            radar_period_s: 2.5,
            grid_resolution_m: 5.0,
        }
    }
}

impl Params {
    /// Parses a JSON parameter document. Missing sections fall back to the
    /// defaults; unknown fields are rejected by value errors only when they
    /// collide with known names.
    pub fn from_json(json: &str) -> Result<Params, String> {
        serde_json::from_str(json).map_err(|e| format!("invalid parameter file: {e}"))
    }

    pub fn load(path: &std::path::Path) -> Result<Params, String> {
        let json = std::fs::read_to_string(path)
            .map_err(|e| format!("cannot read parameter file {}: {e}", path.display()))?;
        Params::from_json(&json)
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("parameters serialize")
    }

    /// All constraint violations across the bundled configurations; empty
    /// exactly when the parameters are usable.
    pub fn validate(&self) -> Vec<String> {
        let mut violations = self.tree.violations();
        violations.extend(self.weights.violations());
        violations.extend(self.regions.violations());
        for (name, value) in [
            ("plant.sog_time_constant_s", self.plant.sog_time_constant_s),
            (
                "plant.course_time_constant_s",
                self.plant.course_time_constant_s,
            ),
            (
                "plant.course_rate_time_constant_s",
                self.plant.course_rate_time_constant_s,
            ),
            (
                "plant.max_course_rate_rads",
                self.plant.max_course_rate_rads,
            ),
            ("plant.plant_step_s", self.plant.plant_step_s),
            ("guidance.lookahead_m", self.guidance.lookahead_m),
            ("align_normalization_m", self.align_normalization_m),
            ("planner_period_s", self.planner_period_s),
            ("radar_period_s", self.radar_period_s),
            ("grid_resolution_m", self.grid_resolution_m),
        ] {
            if !(value > 0.0) {
                violations.push(format!("{name} must be strictly positive, got {value}"));
            }
        }
        violations
    }
}
