//! Vessel state, speed-dependent acceleration envelope, feedback correction,
//! and the simulated plant (vessel + speed/course controller) used in closed loop.

use serde::{Deserialize, Serialize};

use crate::angle;
use crate::primitives::VelocityTrajectory;

/// Kinematic vessel state in a local north/east frame.
///
/// Course is the direction of travel, radians clockwise from north, wrapped to
/// (-pi, pi]. Course and heading are treated as equal (no sideslip).
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct VesselState {
    pub north_m: f64,
    pub east_m: f64,
    /// Speed over ground, >= 0.
    pub sog_mps: f64,
    pub course_rad: f64,
    pub course_rate_rads: f64,
    pub time_s: f64,
}

/// Feasible acceleration box at one operating point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AccelerationLimits {
    pub sog_accel_max: f64,
    /// Negative.
    pub sog_accel_min: f64,
    pub course_accel_max: f64,
    /// Negative.
    pub course_accel_min: f64,
}

/// One affine-in-speed limit: `base + per_mps * sog`, kept away from zero by
/// `floor` (a positive magnitude) so the feasible box never collapses.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct AffineLimit {
    pub base: f64,
    pub per_mps: f64,
    pub floor: f64,
}

impl AffineLimit {
    /// Evaluates as an upper (positive) limit.
    fn upper(&self, sog: f64) -> f64 {
        (self.base + self.per_mps * sog).max(self.floor)
    }

    /// Evaluates as a lower (negative) limit.
    fn lower(&self, sog: f64) -> f64 {
        (self.base + self.per_mps * sog).min(-self.floor)
    }
}

/// Affine-in-speed model for all four acceleration limits.
///
/// The defaults are plausible values for a small, agile surface vessel; they
/// are tuning knobs, not measurements.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct LimitModel {
    pub sog_accel_max: AffineLimit,
    pub sog_accel_min: AffineLimit,
    pub course_accel_max: AffineLimit,
    pub course_accel_min: AffineLimit,
}

impl Default for LimitModel {
    fn default() -> Self {
        LimitModel {
            sog_accel_max: AffineLimit {
                base: 1.0,
                per_mps: -0.05,
                floor: 0.2,
            },
            sog_accel_min: AffineLimit {
                base: -1.5,
                per_mps: 0.05,
                floor: 0.2,
            },
            course_accel_max: AffineLimit {
                base: 0.15,
                per_mps: -0.005,
                floor: 0.03,
            },
            course_accel_min: AffineLimit {
                base: -0.15,
                per_mps: 0.005,
                floor: 0.03,
            },
        }
    }
}

impl LimitModel {
    /// Acceleration box at a given speed over ground.
    pub fn at_sog(&self, sog: f64) -> AccelerationLimits {
        AccelerationLimits {
            sog_accel_max: self.sog_accel_max.upper(sog),
            sog_accel_min: self.sog_accel_min.lower(sog),
            course_accel_max: self.course_accel_max.upper(sog),
            course_accel_min: self.course_accel_min.lower(sog),
        }
    }
}

/// Simulated plant and error-model parameters.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct PlantConfig {
    /// First-order speed response time constant, also used by the
    /// feedback-correction error model.
    pub sog_time_constant_s: f64,
    /// Course-loop time constant (course error to rate command), also used by
    /// the feedback-correction error model.
    pub course_time_constant_s: f64,
    /// Inner rate-loop time constant of the simulated plant.
    pub course_rate_time_constant_s: f64,
    pub max_course_rate_rads: f64,
    pub limits: LimitModel,
    pub plant_step_s: f64,
}

impl Default for PlantConfig {
    fn default() -> Self {
        PlantConfig {
            sog_time_constant_s: 5.0,
            course_time_constant_s: 5.0,
            course_rate_time_constant_s: 1.0,
            max_course_rate_rads: 0.4,
            limits: LimitModel::default(),
            plant_step_s: 0.1,
        }
    }
}

/// Acceleration limits at the vessel's current speed.
pub fn acceleration_limits(state: &VesselState, config: &PlantConfig) -> AccelerationLimits {
    config.limits.at_sog(state.sog_mps)
}

/// Applies the error model to a desired velocity trajectory: the current
/// speed and (wrapped) course errors decay exponentially with the configured
/// time constants on top of the desired values.
pub fn feedback_correct(
    desired: &VelocityTrajectory,
    state: &VesselState,
    config: &PlantConfig,
) -> VelocityTrajectory {
    let t0 = desired.start_time();
    debug_assert!(
        (state.time_s - t0).abs() < 1e-6,
        "state time {} must match trajectory start {}",
        state.time_s,
        t0
    );
    let sog_error = state.sog_mps - desired.sog(t0);
    let course_error = angle::diff(state.course_rad, desired.course(t0));
    desired.with_error_decay(
        sog_error,
        course_error,
        config.sog_time_constant_s,
        config.course_time_constant_s,
    )
}

/// Advances the simulated plant by one step of `dt <= plant_step_s`.
///
/// Speed follows an exact discrete first-order response toward `desired_sog`,
/// saturated by the acceleration envelope and clamped at zero. Course runs a
/// cascaded loop: the wrapped course error commands a rate (saturated at the
/// rate limit), and the rate follows a first-order response saturated by the
/// course acceleration envelope.
pub fn step_plant(
    state: &VesselState,
    desired_sog: f64,
    desired_course: f64,
    config: &PlantConfig,
    dt: f64,
) -> VesselState {
    debug_assert!(dt > 0.0 && dt <= config.plant_step_s + 1e-12);
    let limits = config.limits.at_sog(state.sog_mps);

    let sog_gain = 1.0 - (-dt / config.sog_time_constant_s).exp();
    let dsog = ((desired_sog - state.sog_mps) * sog_gain)
        .clamp(limits.sog_accel_min * dt, limits.sog_accel_max * dt);
    let sog = (state.sog_mps + dsog).max(0.0);

    let course_error = angle::diff(desired_course, state.course_rad);
    let rate_cmd = (course_error / config.course_time_constant_s)
        .clamp(-config.max_course_rate_rads, config.max_course_rate_rads);
    let rate_gain = 1.0 - (-dt / config.course_rate_time_constant_s).exp();
    let drate = ((rate_cmd - state.course_rate_rads) * rate_gain)
        .clamp(limits.course_accel_min * dt, limits.course_accel_max * dt);
    let rate = (state.course_rate_rads + drate)
        .clamp(-config.max_course_rate_rads, config.max_course_rate_rads);

    let course = angle::wrap(state.course_rad + rate * dt);
    VesselState {
        north_m: state.north_m + sog * course.cos() * dt,
        east_m: state.east_m + sog * course.sin() * dt,
        sog_mps: sog,
        course_rad: course,
        course_rate_rads: rate,
        time_s: state.time_s + dt,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::primitives::VelocityTrajectory;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn state_at(sog: f64, course: f64) -> VesselState {
        VesselState {
            north_m: 0.0,
            east_m: 0.0,
            sog_mps: sog,
            course_rad: course,
            course_rate_rads: 0.0,
            time_s: 0.0,
        }
    }

    #[test]
    fn limits_follow_the_affine_model() {
        let model = LimitModel {
            sog_accel_max: AffineLimit {
                base: 2.0,
                per_mps: -0.1,
                floor: 0.1,
            },
            ..LimitModel::default()
        };
        assert!((model.at_sog(5.0).sog_accel_max - 1.5).abs() < 1e-12);
        assert!((model.at_sog(0.0).sog_accel_max - 2.0).abs() < 1e-12);
    }

    #[test]
    fn limits_clamp_to_the_floor_at_high_speed() {
        let model = LimitModel::default();
        let l = model.at_sog(100.0);
        assert_eq!(l.sog_accel_max, model.sog_accel_max.floor);
        assert!(l.sog_accel_max > 0.0);
        assert!(l.sog_accel_min < 0.0);
    }

    #[test]
    fn limits_keep_their_signs_over_the_speed_range() {
        let model = LimitModel::default();
        for k in 0..=200 {
            let l = model.at_sog(k as f64 * 0.5);
            assert!(l.sog_accel_min < 0.0 && l.sog_accel_max > 0.0);
            assert!(l.course_accel_min < 0.0 && l.course_accel_max > 0.0);
        }
    }

    #[test]
    fn feedback_correct_is_identity_without_error() {
        let desired = VelocityTrajectory::constant(0.0, 30.0, 4.0, 0.7);
        let corrected = feedback_correct(&desired, &state_at(4.0, 0.7), &PlantConfig::default());
        for k in 0..=60 {
            let t = k as f64 * 0.5;
            assert!((corrected.sog(t) - desired.sog(t)).abs() < 1e-12);
            assert!((corrected.course(t) - desired.course(t)).abs() < 1e-12);
        }
    }

    #[test]
    fn feedback_correction_decays_by_e_per_time_constant() {
        let desired = VelocityTrajectory::constant(0.0, 30.0, 4.0, 0.0);
        let cfg = PlantConfig::default(); // tau = 5 s
        let corrected = feedback_correct(&desired, &state_at(5.0, 0.0), &cfg);
        let diff = corrected.sog(5.0) - desired.sog(5.0);
        assert!((diff - (-1.0_f64).exp()).abs() < 1e-12, "got {diff}");
        // The decay envelope holds pointwise.
        for k in 0..=100 {
            let t = k as f64 * 0.3;
            let want = (-t / cfg.sog_time_constant_s).exp();
            assert!((corrected.sog(t) - desired.sog(t) - want).abs() < 1e-12);
        }
    }

    #[test]
    fn course_error_wraps_before_decaying() {
        // Raw difference is -6 rad; the short way around is +0.283 rad.
        let desired = VelocityTrajectory::constant(0.0, 30.0, 4.0, 3.0);
        let cfg = PlantConfig::default();
        let corrected = feedback_correct(&desired, &state_at(4.0, -3.0), &cfg);
        let wrapped = 2.0 * PI - 6.0;
        assert!((corrected.course(0.0) - (3.0 + wrapped)).abs() < 1e-12);

        // Matches an explicit simulation of the error ODE err' = -err/tau.
        let mut err = wrapped;
        let dt = 1e-4;
        let mut t = 0.0;
        while t < 10.0 - dt / 2.0 {
            err += -err / cfg.course_time_constant_s * dt;
            t += dt;
        }
        assert!((corrected.course(10.0) - desired.course(10.0) - err).abs() < 1e-4);

        // No jump anywhere: consecutive samples stay close.
        let mut prev = corrected.course(0.0);
        for k in 1..=300 {
            let c = corrected.course(k as f64 * 0.1);
            assert!((c - prev).abs() < 0.05, "jump at sample {k}");
            prev = c;
        }
    }

    #[test]
    fn plant_holds_an_equilibrium() {
        let cfg = PlantConfig::default();
        let s0 = state_at(3.0, 1.0);
        let s1 = step_plant(&s0, 3.0, 1.0, &cfg, 0.1);
        assert!((s1.sog_mps - 3.0).abs() < 1e-12);
        assert!((s1.course_rad - 1.0).abs() < 1e-12);
        assert!((s1.time_s - 0.1).abs() < 1e-12);
    }

    #[test]
    fn plant_speed_step_is_the_exact_discrete_response() {
        let cfg = PlantConfig {
            sog_time_constant_s: 5.0,
            ..PlantConfig::default()
        };
        let s1 = step_plant(&state_at(0.0, 0.0), 5.0, 0.0, &cfg, 0.1);
        let want = 5.0 * (1.0 - (-0.02_f64).exp());
        assert!((s1.sog_mps - want).abs() < 1e-12, "got {}", s1.sog_mps);
    }

    #[test]
    fn plant_saturates_speed_acceleration() {
        let cfg = PlantConfig::default();
        let s0 = state_at(0.0, 0.0);
        let s1 = step_plant(&s0, 500.0, 0.0, &cfg, 0.1);
        let max = cfg.limits.at_sog(0.0).sog_accel_max;
        assert!((s1.sog_mps - max * 0.1).abs() < 1e-12);
    }

    #[test]
    fn plant_rate_stays_within_the_rate_limit() {
        let cfg = PlantConfig::default();
        let mut s = state_at(5.0, 0.0);
        for _ in 0..200 {
            s = step_plant(&s, 5.0, PI, &cfg, 0.1);
            assert!(s.course_rate_rads.abs() <= cfg.max_course_rate_rads + 1e-12);
        }
    }

    #[test]
    fn plant_converges_to_constant_references() {
        let cfg = PlantConfig::default();
        let mut s = state_at(4.0, 0.0);
        let horizon = 10.0 * cfg.sog_time_constant_s.max(cfg.course_time_constant_s);
        let steps = (horizon / 0.1) as usize;
        for _ in 0..steps {
            s = step_plant(&s, 5.0, 0.3, &cfg, 0.1);
        }
        assert!(
            (s.sog_mps - 5.0).abs() < 0.01,
            "sog err {}",
            s.sog_mps - 5.0
        );
        assert!((s.course_rad - 0.3).abs() < 0.01);
    }

    proptest! {
        #[test]
        fn plant_invariants_hold_for_any_commands(
            sog0 in 0.0..12.0f64,
            course0 in -3.1..3.1f64,
            cmds in proptest::collection::vec((-1.0..15.0f64, -10.0..10.0f64), 1..80),
        ) {
            let cfg = PlantConfig::default();
            let mut s = state_at(sog0, course0);
            for (du, dc) in cmds {
                s = step_plant(&s, du, dc, &cfg, 0.1);
                prop_assert!(s.sog_mps >= 0.0);
                prop_assert!(s.course_rad > -PI && s.course_rad <= PI);
                prop_assert!(s.course_rate_rads.abs() <= cfg.max_course_rate_rads + 1e-12);
            }
        }
    }
}
