//! Objective terms and candidate selection.
//!
//! Each candidate trajectory is scored as a weighted sum of five terms:
//! alignment with the desired trajectory, proximity to moving obstacles
//! (graded through nested collision/safety/margin regions with a COLREGs
//! expansion on the obstacle's starboard side), accumulated static-obstacle
//! grid cost, and two binary transitional terms that penalize candidates
//! deviating from the previously selected desired velocities. The candidate
//! with the smallest total wins; ties fall back to the smaller transitional
//! sum and then to the lower candidate index.

use serde::{Deserialize, Serialize};

use crate::angle;
use crate::path::DesiredTrajectory;
use crate::primitives::VelocityTrajectory;
use crate::tree::{CandidateTrajectory, PoseSample};
use crate::world::{ObstacleEstimate, OccupancyGrid};

/// Weights of the objective terms; all strictly positive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ObjectiveWeights {
    pub align: f64,
    pub avoid_moving: f64,
    pub avoid_static: f64,
    pub tran_sog: f64,
    pub tran_course: f64,
}

impl Default for ObjectiveWeights {
    fn default() -> Self {
        Self {
            align: 1.5,
            avoid_moving: 6000.0,
            avoid_static: 30.0,
            tran_sog: 2100.0,
            tran_course: 1050.0,
        }
    }
}

impl ObjectiveWeights {
    pub fn violations(&self) -> Vec<String> {
        let mut violations = Vec::new();
        for (name, value) in [
            ("align", self.align),
            ("avoid_moving", self.avoid_moving),
            ("avoid_static", self.avoid_static),
            ("tran_sog", self.tran_sog),
            ("tran_course", self.tran_course),
        ] {
            if !(value > 0.0) {
                violations.push(format!(
                    "weight {name} must be strictly positive, got {value}"
                ));
            }
        }
        violations
    }
}

/// Nested cost regions around a moving obstacle.
///
/// In the obstacle frame (x ahead along its course, y to its starboard) each
/// region level i ∈ {0: collision, 1: safety, 2: margin} is bounded by four
/// quadrant segments sharing the level's semi-axes: `fore_semi_axes_m[i]`
/// ahead, `aft_port_semi_axes_m[i]` aft and to port, and the aft/port value
/// plus `colregs_expansion_m` to starboard. The aft-port quadrant is
/// circular; the other three are elliptical. The starboard expansion makes
/// passing on the obstacle's starboard side expensive, which steers
/// solutions toward rule-compliant passings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ObstacleRegions {
    /// Semi-axes ahead of the obstacle (collision, safety, margin).
    pub fore_semi_axes_m: [f64; 3],
    /// Semi-axes aft of and to port of the obstacle (collision, safety, margin).
    pub aft_port_semi_axes_m: [f64; 3],
    /// Extra extent added to the starboard semi-axes.
    pub colregs_expansion_m: f64,
    /// Cost value on the safety-region boundary, in (0, 1).
    pub safety_boundary_value: f64,
    /// Obstacles slower than this are treated as direction-less: the regions
    /// collapse to concentric circles with the aft/port radii.
    pub stationary_sog_mps: f64,
}

impl Default for ObstacleRegions {
    fn default() -> Self {
        Self {
            fore_semi_axes_m: [50.0, 150.0, 250.0],
            aft_port_semi_axes_m: [25.0, 75.0, 125.0],
            colregs_expansion_m: 100.0,
            safety_boundary_value: 0.5,
            stationary_sog_mps: 0.5,
        }
    }
}

impl ObstacleRegions {
    pub fn starboard_semi_axis_m(&self, level: usize) -> f64 {
        self.aft_port_semi_axes_m[level] + self.colregs_expansion_m
    }

    /// Regions of a direction-less obstacle: concentric circles with the
    /// aft/port radii.
    pub fn concentric(&self) -> ObstacleRegions {
        ObstacleRegions {
            fore_semi_axes_m: self.aft_port_semi_axes_m,
            colregs_expansion_m: 0.0,
            ..*self
        }
    }

    pub fn violations(&self) -> Vec<String> {
        let mut violations = Vec::new();
        for (name, axes) in [
            ("fore", &self.fore_semi_axes_m),
            ("aft/port", &self.aft_port_semi_axes_m),
        ] {
            if !(axes[0] > 0.0) {
                violations.push(format!("{name} collision semi-axis must be positive"));
            }
            if !(axes[0] < axes[1] && axes[1] < axes[2]) {
                violations.push(format!(
                    "{name} semi-axes must be strictly increasing, got {axes:?}"
                ));
            }
        }
        if !(self.colregs_expansion_m >= 0.0) {
            violations.push(format!(
                "colregs expansion must be non-negative, got {}",
                self.colregs_expansion_m
            ));
        }
        if !(self.safety_boundary_value > 0.0 && self.safety_boundary_value < 1.0) {
            violations.push(format!(
                "safety boundary value must lie in (0, 1), got {}",
                self.safety_boundary_value
            ));
        }
        if !(self.stationary_sog_mps >= 0.0) {
            violations.push(format!(
                "stationary speed threshold must be non-negative, got {}",
                self.stationary_sog_mps
            ));
        }
        violations
    }

    /// Semi-axes (along x, along y) of the quadrant containing `(x, y)`.
    fn quadrant_semi_axes(&self, x: f64, y: f64, level: usize) -> (f64, f64) {
        let along_x = if x >= 0.0 {
            self.fore_semi_axes_m[level]
        } else {
            self.aft_port_semi_axes_m[level]
        };
        let along_y = if y >= 0.0 {
            self.starboard_semi_axis_m(level)
        } else {
            self.aft_port_semi_axes_m[level]
        };
        (along_x, along_y)
    }

    /// Radial scale of `(x, y)` against region level `level`: < 1 inside the
    /// region, 1 on its boundary, > 1 outside.
    fn radial_scale(&self, x: f64, y: f64, level: usize) -> f64 {
        let (along_x, along_y) = self.quadrant_semi_axes(x, y, level);
        ((x / along_x).powi(2) + (y / along_y).powi(2)).sqrt()
    }
}

/// Ownship position in an obstacle's frame: (ahead along the obstacle
/// course, to the obstacle's starboard).
pub fn obstacle_frame(
    ownship_north_m: f64,
    ownship_east_m: f64,
    obstacle: &ObstacleEstimate,
) -> (f64, f64) {
    let dn = ownship_north_m - obstacle.north_m;
    let de = ownship_east_m - obstacle.east_m;
    let (sin, cos) = obstacle.course_rad.sin_cos();
    (dn * cos + de * sin, -dn * sin + de * cos)
}

/// Innermost region level containing the point, if any
/// (0: collision, 1: safety, 2: margin).
pub fn region_level(rel_pos: (f64, f64), regions: &ObstacleRegions) -> Option<usize> {
    (0..3).find(|&level| regions.radial_scale(rel_pos.0, rel_pos.1, level) <= 1.0)
}

/// Cost of standing at `rel_pos` in the obstacle frame: 1 anywhere in the
/// collision region, falling linearly along the ray from the center to the
/// safety boundary value at the safety boundary and to 0 at the margin
/// boundary, 0 beyond.
pub fn region_cost(rel_pos: (f64, f64), regions: &ObstacleRegions) -> f64 {
    let (x, y) = rel_pos;
    let sigma0 = regions.radial_scale(x, y, 0);
    if sigma0 <= 1.0 {
        return 1.0;
    }
    let r = x.hypot(y);
    let v_s = regions.safety_boundary_value;
    let sigma1 = regions.radial_scale(x, y, 1);
    if sigma1 <= 1.0 {
        let collision_r = r / sigma0;
        let safety_r = r / sigma1;
        return 1.0 + (v_s - 1.0) * (r - collision_r) / (safety_r - collision_r);
    }
    let sigma2 = regions.radial_scale(x, y, 2);
    if sigma2 <= 1.0 {
        let safety_r = r / sigma1;
        let margin_r = r / sigma2;
        return v_s * (margin_r - r) / (margin_r - safety_r);
    }
    0.0
}

/// Region geometry for an obstacle, accounting for the direction-less
/// collapse below the stationary speed threshold.
pub fn effective_regions(
    obstacle: &ObstacleEstimate,
    regions: &ObstacleRegions,
) -> ObstacleRegions {
    if obstacle.sog_mps < regions.stationary_sog_mps {
        regions.concentric()
    } else {
        *regions
    }
}

/// Normalized time-average distance between the predicted poses and the
/// desired trajectory; 0 exactly when the candidate tracks it.
pub fn align(pose: &[PoseSample], desired: &DesiredTrajectory, normalization_m: f64) -> f64 {
    assert!(
        normalization_m > 0.0,
        "normalization distance must be positive"
    );
    let offset = |sample: &PoseSample| {
        let (dn, de) = desired.position(sample.time_s);
        let dn = sample.north_m - dn;
        let de = sample.east_m - de;
        dn.hypot(de) / normalization_m
    };
    match pose {
        [] => 0.0,
        [only] => offset(only),
        _ => {
            let mut integral = 0.0;
            for pair in pose.windows(2) {
                let dt = pair[1].time_s - pair[0].time_s;
                integral += 0.5 * dt * (offset(&pair[0]) + offset(&pair[1]));
            }
            integral / (pose[pose.len() - 1].time_s - pose[0].time_s)
        }
    }
}

/// Worst region cost over all pose samples and all obstacle predictions.
pub fn avoid_moving(
    pose: &[PoseSample],
    obstacles: &[ObstacleEstimate],
    regions: &ObstacleRegions,
) -> f64 {
    let mut worst = 0.0_f64;
    for obstacle in obstacles {
        let effective = effective_regions(obstacle, regions);
        for sample in pose {
            let predicted = obstacle.predict(sample.time_s);
            let rel = obstacle_frame(sample.north_m, sample.east_m, &predicted);
            worst = worst.max(region_cost(rel, &effective));
        }
    }
    worst
}

/// Time integral of the occupancy value along the pose trajectory
/// (trapezoidal over the pose samples).
pub fn avoid_static(pose: &[PoseSample], grid: &OccupancyGrid) -> f64 {
    let mut integral = 0.0;
    for pair in pose.windows(2) {
        let dt = pair[1].time_s - pair[0].time_s;
        let v0 = grid.query(pair[0].north_m, pair[0].east_m);
        let v1 = grid.query(pair[1].north_m, pair[1].east_m);
        integral += 0.5 * dt * (v0 + v1);
    }
    integral
}

/// Desired velocity trajectory selected at the previous planning iteration,
/// kept to score how much each new candidate departs from it.
#[derive(Debug, Clone)]
pub struct PlannerMemory {
    pub previous_desired: VelocityTrajectory,
    /// First-level maneuver duration at that selection; deviations are
    /// integrated over a window of this length.
    pub first_step_time_s: f64,
}

const TRANSITIONAL_STEPS: usize = 250;

/// Binary (speed, course) transitional costs per candidate.
///
/// Each candidate's desired speed and wrapped course are compared with the
/// previously selected trajectory over one first-level window; a candidate
/// pays 1 on a channel exactly when its deviation integral strictly exceeds
/// the smallest integral in the set, so the closest candidates ride free.
/// Without memory (first iteration) every cost is 0. The previous
/// trajectory holds its final value past its own horizon.
pub fn transitional_costs(
    candidates: &[CandidateTrajectory],
    memory: Option<&PlannerMemory>,
) -> Vec<(f64, f64)> {
    let Some(memory) = memory else {
        return vec![(0.0, 0.0); candidates.len()];
    };
    if candidates.is_empty() {
        return Vec::new();
    }
    let dt = memory.first_step_time_s / TRANSITIONAL_STEPS as f64;
    let deviations: Vec<(f64, f64)> = candidates
        .iter()
        .map(|candidate| {
            let t0 = candidate.desired.start_time();
            let mut sog_dev = 0.0;
            let mut course_dev = 0.0;
            for k in 0..=TRANSITIONAL_STEPS {
                let t = t0 + k as f64 * dt;
                let weight = if k == 0 || k == TRANSITIONAL_STEPS {
                    0.5
                } else {
                    1.0
                };
                sog_dev +=
                    weight * (candidate.desired.sog(t) - memory.previous_desired.sog(t)).abs();
                course_dev += weight
                    * angle::diff(
                        candidate.desired.course(t),
                        memory.previous_desired.course(t),
                    )
                    .abs();
            }
            (sog_dev * dt, course_dev * dt)
        })
        .collect();
    let min_sog = deviations.iter().map(|d| d.0).fold(f64::INFINITY, f64::min);
    let min_course = deviations.iter().map(|d| d.1).fold(f64::INFINITY, f64::min);
    deviations
        .iter()
        .map(|&(sog, course)| {
            (
                if sog > min_sog { 1.0 } else { 0.0 },
                if course > min_course { 1.0 } else { 0.0 },
            )
        })
        .collect()
}

/// Everything the objective needs besides the candidate itself.
#[derive(Clone, Copy)]
pub struct CostContext<'a> {
    pub weights: &'a ObjectiveWeights,
    pub regions: &'a ObstacleRegions,
    pub desired: &'a DesiredTrajectory,
    pub grid: Option<&'a OccupancyGrid>,
    pub obstacles: &'a [ObstacleEstimate],
    pub memory: Option<&'a PlannerMemory>,
    /// Distance that maps to an alignment term of 1.
    pub align_normalization_m: f64,
}

/// Raw term values of one scored candidate plus the weighted total.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CostBreakdown {
    pub align: f64,
    pub avoid_moving: f64,
    pub avoid_static: f64,
    pub tran_sog: f64,
    pub tran_course: f64,
    pub total: f64,
}

fn score(candidate: &CandidateTrajectory, ctx: &CostContext, tran: (f64, f64)) -> CostBreakdown {
    let align = align(&candidate.pose, ctx.desired, ctx.align_normalization_m);
    let avoid_moving = avoid_moving(&candidate.pose, ctx.obstacles, ctx.regions);
    let avoid_static = ctx
        .grid
        .map_or(0.0, |grid| self::avoid_static(&candidate.pose, grid));
    let w = ctx.weights;
    CostBreakdown {
        align,
        avoid_moving,
        avoid_static,
        tran_sog: tran.0,
        tran_course: tran.1,
        total: w.align * align
            + w.avoid_moving * avoid_moving
            + w.avoid_static * avoid_static
            + w.tran_sog * tran.0
            + w.tran_course * tran.1,
    }
}

/// Objective value of one candidate evaluated on its own. With no peers the
/// transitional deviations are trivially minimal, so those terms are 0.
pub fn objective(candidate: &CandidateTrajectory, ctx: &CostContext) -> f64 {
    score(candidate, ctx, (0.0, 0.0)).total
}

/// Winning candidate index and its per-term breakdown.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Selection {
    pub index: usize,
    pub breakdown: CostBreakdown,
}

/// Scores every candidate and returns the objective minimizer. Ties go to
/// the smaller transitional sum, then to the lower index.
pub fn select(candidates: &[CandidateTrajectory], ctx: &CostContext) -> Result<Selection, String> {
    if candidates.is_empty() {
        return Err("cannot select from an empty candidate set".to_string());
    }
    let trans = transitional_costs(candidates, ctx.memory);
    let mut best: Option<Selection> = None;
    for (index, candidate) in candidates.iter().enumerate() {
        let breakdown = score(candidate, ctx, trans[index]);
        let better = match &best {
            None => true,
            Some(current) => {
                breakdown.total < current.breakdown.total
                    || (breakdown.total == current.breakdown.total
                        && breakdown.tran_sog + breakdown.tran_course
                            < current.breakdown.tran_sog + current.breakdown.tran_course)
            }
        };
        if better {
            best = Some(Selection { index, breakdown });
        }
    }
    Ok(best.expect("candidate set is nonempty"))
}
