//! Short-term collision avoidance planning for autonomous surface vehicles.
//!
//! The planner searches a finite tree of candidate velocity trajectories built
//! from speed and course acceleration primitives, scores each candidate against
//! a desired trajectory, moving obstacles with COLREGs-aware penalty regions and
//! a static occupancy grid, and selects the cheapest one as the new reference
//! for the vessel controllers. A closed-loop simulator and four built-in
//! scenarios exercise the whole pipeline.
//!
//! Conventions: positions are north/east meters in a local level frame, courses
//! are radians clockwise from north, wrapped to (-pi, pi] at API boundaries.

// Validation negates comparisons (`!(x > 0.0)`) so that NaN values fail them.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod angle;
pub mod cost;
pub mod params;
pub mod path;
pub mod piecewise;
pub mod planner;
pub mod primitives;
pub mod sim;
pub mod tree;
pub mod vessel;
pub mod world;

pub use cost::{
    CostBreakdown, CostContext, ObjectiveWeights, ObstacleRegions, PlannerMemory, Selection,
};
pub use params::Params;
pub use path::{DesiredTrajectory, Waypoint};
pub use planner::{PlanResult, Planner, PlannerError};
pub use primitives::{GuidanceConfig, PrimitiveConfig, VelocityTrajectory};
pub use sim::{
    builtin_scenario, builtin_scenarios, metrics, run_closed_loop, Metrics, MovingObstacle, RunLog,
    Scenario, SimError,
};
pub use tree::{CandidateTrajectory, PoseSample, TreeConfig};
pub use vessel::{AccelerationLimits, PlantConfig, VesselState};
pub use world::{rasterize_and_pad, GridBounds, ObstacleEstimate, OccupancyGrid, StaticObstacle};
