//! Receding-horizon planning step: build the candidate tree, score every
//! candidate, select the cheapest, and remember the selection so the next
//! iteration can start open-loop from it and charge transitional costs
//! against it.

use std::fmt;
use std::time::Instant;

use crate::cost::{self, CostBreakdown, CostContext, PlannerMemory};
use crate::params::Params;
use crate::path::DesiredTrajectory;
use crate::primitives::VelocityTrajectory;
use crate::tree::{build_tree, PoseSample};
use crate::vessel::VesselState;
use crate::world::{ObstacleEstimate, OccupancyGrid};

#[derive(Debug)]
pub enum PlannerError {
    /// Configuration violates its constraints; the messages list them.
    InvalidConfig(Vec<String>),
    /// Candidate scoring or selection failed.
    Selection(String),
}

impl fmt::Display for PlannerError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PlannerError::InvalidConfig(violations) => {
                write!(
                    f,
                    "invalid planner configuration: {}",
                    violations.join("; ")
                )
            }
            PlannerError::Selection(message) => write!(f, "selection failed: {message}"),
        }
    }
}

impl std::error::Error for PlannerError {}

/// One planning iteration's outcome.
#[derive(Debug, Clone)]
pub struct PlanResult {
    /// Selected desired velocity trajectory, the new controller reference.
    pub desired: VelocityTrajectory,
    /// Feedback-corrected expectation of what the vessel will fly.
    pub corrected: VelocityTrajectory,
    /// Predicted pose samples of the selected candidate.
    pub pose: Vec<PoseSample>,
    /// Index of the winner in deterministic tree order.
    pub index: usize,
    /// Maneuver index chosen at each tree level.
    pub leaf_path: Vec<usize>,
    pub breakdown: CostBreakdown,
    pub candidate_count: usize,
    pub wall_time_s: f64,
}

/// Stateful planner: owns the configuration and the previous selection.
#[derive(Debug, Clone)]
pub struct Planner {
    params: Params,
    memory: Option<PlannerMemory>,
}

impl Planner {
    pub fn new(params: Params) -> Result<Planner, PlannerError> {
        let violations = params.validate();
        if !violations.is_empty() {
            return Err(PlannerError::InvalidConfig(violations));
        }
        Ok(Planner {
            params,
            memory: None,
        })
    }

    pub fn params(&self) -> &Params {
        &self.params
    }

    /// Desired velocity trajectory selected by the previous iteration.
    pub fn previous_desired(&self) -> Option<&VelocityTrajectory> {
        self.memory.as_ref().map(|m| &m.previous_desired)
    }

    /// Forgets the previous selection, as after a long planning gap.
    pub fn reset(&mut self) {
        self.memory = None;
    }

    /// Runs one planning iteration from the current vessel state.
    ///
    /// The candidate tree starts open-loop from the previously selected
    /// desired velocities (from the measured velocities on the first
    /// iteration), so the reference handed to the controllers stays
    /// continuous across iterations.
    pub fn plan(
        &mut self,
        state: &VesselState,
        desired_traj: &DesiredTrajectory,
        grid: Option<&OccupancyGrid>,
        obstacles: &[ObstacleEstimate],
    ) -> Result<PlanResult, PlannerError> {
        let started = Instant::now();
        let current_desired = match &self.memory {
            Some(memory) => memory.previous_desired.clone(),
            None => VelocityTrajectory::constant(
                state.time_s,
                state.time_s + self.params.tree.horizon_s(),
                state.sog_mps,
                state.course_rad,
            ),
        };
        let mut candidates = build_tree(
            state,
            &current_desired,
            &self.params.tree,
            &self.params.plant,
            desired_traj,
            &self.params.guidance,
        );
        let ctx = CostContext {
            weights: &self.params.weights,
            regions: &self.params.regions,
            desired: desired_traj,
            grid,
            obstacles,
            memory: self.memory.as_ref(),
            align_normalization_m: self.params.align_normalization_m,
        };
        let selection = cost::select(&candidates, &ctx).map_err(PlannerError::Selection)?;
        let candidate_count = candidates.len();
        let winner = candidates.swap_remove(selection.index);
        self.memory = Some(PlannerMemory {
            previous_desired: winner.desired.clone(),
            first_step_time_s: self.params.tree.step_times_s[0],
        });
        Ok(PlanResult {
            desired: winner.desired,
            corrected: winner.corrected,
            pose: winner.pose,
            index: selection.index,
            leaf_path: winner.leaf_path,
            breakdown: selection.breakdown,
            candidate_count,
            wall_time_s: started.elapsed().as_secs_f64(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tree::TreeConfig;

    fn cruising_state() -> VesselState {
        VesselState {
            north_m: 0.0,
            east_m: 0.0,
            sog_mps: 5.0,
            course_rad: 0.0,
            course_rate_rads: 0.0,
            time_s: 0.0,
        }
    }

    fn northbound(duration_s: f64) -> DesiredTrajectory {
        DesiredTrajectory::straight(0.0, 0.0, 0.0, 5.0, 0.0, duration_s)
    }

    #[test]
    fn invalid_parameters_are_rejected_at_construction() {
        let mut params = Params::default();
        params.tree.ramp_time_s = -1.0;
        assert!(matches!(
            Planner::new(params),
            Err(PlannerError::InvalidConfig(_))
        ));
    }

    #[test]
    fn plan_reports_the_full_candidate_set() {
        let mut planner = Planner::new(Params::default()).unwrap();
        let result = planner
            .plan(&cruising_state(), &northbound(600.0), None, &[])
            .unwrap();
        assert_eq!(result.candidate_count, 225);
        assert_eq!(result.leaf_path.len(), 3);
        assert!(result.index < 225);
        assert!(result.wall_time_s > 0.0);
        assert!((result.desired.horizon() - 80.0).abs() < 1e-9);
    }

    #[test]
    fn empty_world_on_trajectory_keeps_the_reference() {
        let mut planner = Planner::new(Params::default()).unwrap();
        let result = planner
            .plan(&cruising_state(), &northbound(600.0), None, &[])
            .unwrap();
        // The predicted pose only tracks the line to machine precision, so
        // the alignment term carries float dust rather than an exact zero.
        assert!(result.breakdown.total < 1e-9);
        assert!((result.desired.sog(40.0) - 5.0).abs() < 1e-9);
        assert!(result.desired.course_wrapped(40.0).abs() < 1e-9);
    }

    #[test]
    fn successive_plans_reference_the_previous_selection() {
        let mut planner = Planner::new(Params::default()).unwrap();
        let first = planner
            .plan(&cruising_state(), &northbound(600.0), None, &[])
            .unwrap();
        assert!(planner.previous_desired().is_some());

        let mut state = cruising_state();
        state.time_s = 5.0;
        state.north_m = 25.0;
        let second = planner.plan(&state, &northbound(600.0), None, &[]).unwrap();
        // The new root continues the previous desired velocities, so the
        // reference is continuous across the switch instant.
        assert!((second.desired.sog(5.0) - first.desired.sog(5.0)).abs() < 1e-9);
        assert!((second.desired.course(5.0) - first.desired.course(5.0)).abs() < 1e-9);
        assert_eq!(second.breakdown.tran_sog, 0.0);
        assert_eq!(second.breakdown.tran_course, 0.0);
    }

    #[test]
    fn reset_forgets_the_previous_selection() {
        let mut planner = Planner::new(Params::default()).unwrap();
        planner
            .plan(&cruising_state(), &northbound(600.0), None, &[])
            .unwrap();
        planner.reset();
        assert!(planner.previous_desired().is_none());
    }

    #[test]
    fn trivial_tree_returns_the_keep_velocity_candidate() {
        let params = Params {
            tree: TreeConfig {
                step_times_s: vec![20.0],
                n_sog: vec![1],
                n_course: vec![1],
                ..TreeConfig::default()
            },
            ..Params::default()
        };
        let mut planner = Planner::new(params).unwrap();
        let result = planner
            .plan(&cruising_state(), &northbound(600.0), None, &[])
            .unwrap();
        assert_eq!(result.candidate_count, 1);
        assert_eq!(result.index, 0);
        assert_eq!(result.leaf_path, vec![0]);
    }
}
