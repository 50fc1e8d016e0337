//! The trajectory prediction tree: repeated maneuver generation from each
//! node's end state, giving a Cartesian-product search space of candidate
//! velocity trajectories over the planning horizon.

use serde::{Deserialize, Serialize};

use crate::angle;
use crate::path::DesiredTrajectory;
use crate::primitives::{
    apply_guidance, course_profile, guidance_acceleration, integrate_course, integrate_speed,
    sample_accelerations, speed_profile, GuidanceConfig, PrimitiveConfig, ProfileKind,
    VelocityTrajectory,
};
use crate::vessel::{feedback_correct, AccelerationLimits, PlantConfig, VesselState};

/// Tree shape: per-level step times and sample counts, with maneuver timing
/// shared across levels.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TreeConfig {
    pub step_times_s: Vec<f64>,
    pub n_sog: Vec<usize>,
    pub n_course: Vec<usize>,
    pub ramp_time_s: f64,
    pub sog_maneuver_time_s: f64,
    pub course_maneuver_time_s: f64,
    /// Pose sampling step for predicted trajectories.
    pub sample_step_s: f64,
}

impl Default for TreeConfig {
    fn default() -> Self {
        TreeConfig {
            step_times_s: vec![20.0, 30.0, 30.0],
            n_sog: vec![5, 1, 1],
            n_course: vec![5, 3, 3],
            ramp_time_s: 1.0,
            sog_maneuver_time_s: 5.0,
            course_maneuver_time_s: 5.0,
            sample_step_s: 0.5,
        }
    }
}

impl TreeConfig {
    pub fn depth(&self) -> usize {
        self.step_times_s.len()
    }

    /// Planning horizon: the sum of all step times.
    pub fn horizon_s(&self) -> f64 {
        self.step_times_s.iter().sum()
    }

    /// Total number of candidates the tree will produce.
    pub fn candidate_count(&self) -> usize {
        self.n_sog
            .iter()
            .zip(&self.n_course)
            .map(|(u, c)| u * c)
            .product()
    }

    /// Primitive configuration for one level (0-based).
    pub fn level(&self, i: usize) -> PrimitiveConfig {
        PrimitiveConfig {
            step_time_s: self.step_times_s[i],
            ramp_time_s: self.ramp_time_s,
            sog_maneuver_time_s: self.sog_maneuver_time_s,
            course_maneuver_time_s: self.course_maneuver_time_s,
            n_sog: self.n_sog[i],
            n_course: self.n_course[i],
        }
    }

    pub fn violations(&self) -> Vec<String> {
        let mut v = Vec::new();
        if self.step_times_s.is_empty() {
            v.push("step_times_s must have at least one level".into());
            return v;
        }
        if self.n_sog.len() != self.depth() || self.n_course.len() != self.depth() {
            v.push(format!(
                "per-level lists must all have length {} (got n_sog: {}, n_course: {})",
                self.depth(),
                self.n_sog.len(),
                self.n_course.len()
            ));
            return v;
        }
        if self.sample_step_s <= 0.0 {
            v.push("sample_step_s must be > 0".into());
        }
        for i in 0..self.depth() {
            for msg in self.level(i).violations() {
                v.push(format!("level {}: {msg}", i + 1));
            }
        }
        v
    }
}

/// A tree node: where the vessel is predicted to be when the next maneuver
/// starts, and the velocity it starts from.
#[derive(Debug, Clone, Copy)]
pub struct ManeuverNode {
    pub time_s: f64,
    /// (north, east, course) at the node time.
    pub pose: (f64, f64, f64),
    /// Velocity the maneuver limits are evaluated at: (sog, course, rate).
    /// Actual vessel velocity at the root, desired elsewhere.
    pub velocity: (f64, f64, f64),
    /// Desired velocity the maneuver trajectories start from.
    pub desired: (f64, f64, f64),
}

/// One maneuver out of a node: the acceleration amplitudes and the desired
/// velocity sub-trajectory they integrate to.
#[derive(Debug, Clone)]
pub struct Maneuver {
    pub sog_accel: f64,
    pub course_accel: f64,
    pub trajectory: VelocityTrajectory,
}

/// One root-to-leaf path through the tree.
#[derive(Debug, Clone)]
pub struct CandidateTrajectory {
    /// Desired velocities over the full horizon (concatenated sub-trajectories).
    pub desired: VelocityTrajectory,
    /// Feedback-corrected velocities.
    pub corrected: VelocityTrajectory,
    /// Predicted pose trajectory, sampled at the sample step.
    pub pose: Vec<PoseSample>,
    /// Maneuver index chosen at each level.
    pub leaf_path: Vec<usize>,
}

/// One sample of a predicted pose trajectory; heading equals course.
#[derive(Debug, Clone, Copy)]
pub struct PoseSample {
    pub time_s: f64,
    pub north_m: f64,
    pub east_m: f64,
    pub course_rad: f64,
}

/// All maneuvers out of `node`: the Cartesian product of sampled speed and
/// course accelerations, optionally shifted toward a guidance pair.
/// Enumeration order is speed-major: index = i_sog * n_course + i_course.
pub fn generate_maneuvers(
    node: &ManeuverNode,
    cfg: &PrimitiveConfig,
    limits: &AccelerationLimits,
    guidance: Option<(f64, f64)>,
    sample_step_s: f64,
) -> Vec<Maneuver> {
    let sog_samples = sample_accelerations(limits, cfg.n_sog, ProfileKind::Sog);
    let course_samples = sample_accelerations(limits, cfg.n_course, ProfileKind::Course);
    let mut pairs = Vec::with_capacity(sog_samples.len() * course_samples.len());
    for &au in &sog_samples {
        for &ac in &course_samples {
            pairs.push((au, ac));
        }
    }
    if let Some(g) = guidance {
        pairs = apply_guidance(pairs, g, limits);
    }

    let (u0, chi0, r0) = node.desired;
    pairs
        .into_iter()
        .map(|(au, ac)| {
            let sog =
                integrate_speed(u0, &speed_profile(au, cfg), cfg.step_time_s).shifted(node.time_s);
            let course = integrate_course(
                chi0,
                r0,
                &course_profile(ac, cfg),
                cfg.ramp_time_s,
                cfg.step_time_s,
            )
            .shifted(node.time_s);
            Maneuver {
                sog_accel: au,
                course_accel: ac,
                trajectory: VelocityTrajectory::from_components(sog, course, sample_step_s),
            }
        })
        .collect()
}

/// Integrates the planar kinematics p_dot = (U cos chi, U sin chi) with
/// classic fixed-step 4th-order Runge-Kutta and returns samples every
/// `sample_step_s` (plus the exact endpoint).
pub fn predict_pose(
    velocity: &VelocityTrajectory,
    initial_north_m: f64,
    initial_east_m: f64,
    sample_step_s: f64,
) -> Vec<PoseSample> {
    assert!(sample_step_s > 0.0);
    let t0 = velocity.start_time();
    let t_end = velocity.end_time();
    let vel = |t: f64| {
        let u = velocity.sog(t);
        let chi = velocity.course(t);
        (u * chi.cos(), u * chi.sin())
    };

    let mut out = Vec::with_capacity(((t_end - t0) / sample_step_s) as usize + 2);
    let (mut n, mut e) = (initial_north_m, initial_east_m);
    let mut t = t0;
    out.push(PoseSample {
        time_s: t,
        north_m: n,
        east_m: e,
        course_rad: angle::wrap(velocity.course(t)),
    });
    while t < t_end - 1e-9 {
        let h = sample_step_s.min(t_end - t);
        let (k1n, k1e) = vel(t);
        let (k2n, k2e) = vel(t + 0.5 * h);
        let (k4n, k4e) = vel(t + h);
        // The derivative is position-independent, so k2 == k3.
        n += h / 6.0 * (k1n + 4.0 * k2n + k4n);
        e += h / 6.0 * (k1e + 4.0 * k2e + k4e);
        t += h;
        out.push(PoseSample {
            time_s: t,
            north_m: n,
            east_m: e,
            course_rad: angle::wrap(velocity.course(t)),
        });
    }
    out
}

/// Builds the full prediction tree and returns every root-to-leaf candidate.
///
/// The root continues the currently tracked desired velocity (open-loop
/// continuity); the first level gets the guidance shift; deeper levels
/// re-evaluate acceleration limits at their node's velocity. Feedback
/// correction is applied once per candidate, from the root over the whole
/// horizon.
pub fn build_tree(
    state: &VesselState,
    current_desired: &VelocityTrajectory,
    cfg: &TreeConfig,
    plant: &PlantConfig,
    desired_traj: &DesiredTrajectory,
    guidance_cfg: &GuidanceConfig,
) -> Vec<CandidateTrajectory> {
    let t0 = state.time_s;
    let root = ManeuverNode {
        time_s: t0,
        pose: (state.north_m, state.east_m, state.course_rad),
        velocity: (state.sog_mps, state.course_rad, state.course_rate_rads),
        desired: (
            current_desired.sog(t0),
            current_desired.course(t0),
            current_desired.course_rate(t0),
        ),
    };

    struct PartialPath {
        node: ManeuverNode,
        trajectory: Option<VelocityTrajectory>,
        path: Vec<usize>,
    }

    let mut frontier = vec![PartialPath {
        node: root,
        trajectory: None,
        path: Vec::new(),
    }];

    for level in 0..cfg.depth() {
        let prim = cfg.level(level);
        let mut next = Vec::with_capacity(frontier.len() * prim.n_sog * prim.n_course);
        for partial in &frontier {
            let limits = plant.limits.at_sog(partial.node.velocity.0.max(0.0));
            let guidance = (level == 0)
                .then(|| guidance_acceleration(state, desired_traj, &prim, guidance_cfg, &limits));
            let maneuvers =
                generate_maneuvers(&partial.node, &prim, &limits, guidance, cfg.sample_step_s);
            for (idx, m) in maneuvers.into_iter().enumerate() {
                let t_end = partial.node.time_s + prim.step_time_s;
                let endpoint = (
                    m.trajectory.sog(t_end),
                    m.trajectory.course(t_end),
                    m.trajectory.course_rate(t_end),
                );
                let pose_steps = predict_pose(
                    &m.trajectory,
                    partial.node.pose.0,
                    partial.node.pose.1,
                    cfg.sample_step_s,
                );
                let last = pose_steps.last().unwrap();
                let node = ManeuverNode {
                    time_s: t_end,
                    pose: (last.north_m, last.east_m, last.course_rad),
                    velocity: endpoint,
                    desired: endpoint,
                };
                let trajectory = match &partial.trajectory {
                    None => m.trajectory.clone(),
                    Some(prefix) => prefix.clone().append(m.trajectory.clone()),
                };
                let mut path = partial.path.clone();
                path.push(idx);
                next.push(PartialPath {
                    node,
                    trajectory: Some(trajectory),
                    path,
                });
            }
        }
        frontier = next;
    }

    frontier
        .into_iter()
        .map(|p| {
            let desired = p.trajectory.expect("depth >= 1");
            let corrected = feedback_correct(&desired, state, plant);
            let pose = predict_pose(&corrected, state.north_m, state.east_m, cfg.sample_step_s);
            CandidateTrajectory {
                desired,
                corrected,
                pose,
                leaf_path: p.path,
            }
        })
        .collect()
}
