//! Acceleration motion primitives and their analytic integration into desired
//! velocity trajectories, plus acceleration sampling and the guidance shift.
//!
//! A speed maneuver is a single acceleration trapezoid; a course maneuver is a
//! positive trapezoid followed by its mirrored negative so the turn rate
//! returns to zero and the course settles on a new constant value.

use serde::{Deserialize, Serialize};

use crate::angle;
use crate::path::DesiredTrajectory;
use crate::piecewise::Piecewise;
use crate::vessel::{AccelerationLimits, VesselState};

/// Timing and sampling parameters for one tree level's maneuvers.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct PrimitiveConfig {
    /// Step time T: the span covered by one maneuver sub-trajectory.
    pub step_time_s: f64,
    /// Ramp time of the acceleration trapezoids.
    pub ramp_time_s: f64,
    /// Duration of a speed maneuver.
    pub sog_maneuver_time_s: f64,
    /// Duration of a course maneuver.
    pub course_maneuver_time_s: f64,
    /// Number of speed acceleration samples.
    pub n_sog: usize,
    /// Number of course acceleration samples.
    pub n_course: usize,
}

impl PrimitiveConfig {
    /// Constraint violations, empty when the config is usable.
    pub fn violations(&self) -> Vec<String> {
        let mut v = Vec::new();
        let ramp_max = (self.sog_maneuver_time_s / 2.0).min(self.course_maneuver_time_s / 4.0);
        if !(self.ramp_time_s > 0.0 && self.ramp_time_s <= ramp_max) {
            v.push(format!(
                "ramp_time_s = {} must lie in (0, {ramp_max}] (half the speed maneuver, quarter of the course maneuver)",
                self.ramp_time_s
            ));
        }
        if !(self.sog_maneuver_time_s > 0.0 && self.sog_maneuver_time_s <= self.step_time_s) {
            v.push(format!(
                "sog_maneuver_time_s = {} must lie in (0, step_time_s = {}]",
                self.sog_maneuver_time_s, self.step_time_s
            ));
        }
        if !(self.course_maneuver_time_s > 0.0 && self.course_maneuver_time_s <= self.step_time_s) {
            v.push(format!(
                "course_maneuver_time_s = {} must lie in (0, step_time_s = {}]",
                self.course_maneuver_time_s, self.step_time_s
            ));
        }
        if self.n_sog < 1 {
            v.push("n_sog must be >= 1".into());
        }
        if self.n_course < 1 {
            v.push("n_course must be >= 1".into());
        }
        v
    }
}

/// Which velocity component a profile accelerates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProfileKind {
    Sog,
    Course,
}

/// Piecewise-linear acceleration profile on [0, maneuver time], identically
/// zero afterwards.
#[derive(Debug, Clone)]
pub struct AccelProfile {
    pub kind: ProfileKind,
    pub amplitude: f64,
    /// (time, acceleration) corners; connected linearly.
    pub breakpoints: Vec<(f64, f64)>,
}

impl AccelProfile {
    pub fn maneuver_time(&self) -> f64 {
        self.breakpoints.last().unwrap().0
    }

    /// Acceleration at `t`; zero outside [0, maneuver time].
    pub fn eval(&self, t: f64) -> f64 {
        if t < 0.0 || t > self.maneuver_time() {
            return 0.0;
        }
        for w in self.breakpoints.windows(2) {
            let ((t0, v0), (t1, v1)) = (w[0], w[1]);
            if t <= t1 {
                if t1 == t0 {
                    return v1;
                }
                return v0 + (v1 - v0) * (t - t0) / (t1 - t0);
            }
        }
        0.0
    }

    /// Exact piecewise-linear representation on [0, horizon].
    pub fn as_piecewise(&self, horizon: f64) -> Piecewise {
        let p = Piecewise::linear_through(&self.breakpoints);
        if horizon > self.maneuver_time() {
            p.append(&Piecewise::constant(self.maneuver_time(), horizon, 0.0))
        } else {
            p
        }
    }
}

/// `n` amplitudes linearly spaced over the feasible range of the given axis,
/// endpoints included. The sample nearest zero is snapped to exactly zero so a
/// keep-current-velocity maneuver always exists; `n = 1` yields just that.
///
/// Panics if `n == 0`.
pub fn sample_accelerations(limits: &AccelerationLimits, n: usize, kind: ProfileKind) -> Vec<f64> {
    assert!(n >= 1, "need at least one acceleration sample");
    let (lo, hi) = match kind {
        ProfileKind::Sog => (limits.sog_accel_min, limits.sog_accel_max),
        ProfileKind::Course => (limits.course_accel_min, limits.course_accel_max),
    };
    if n == 1 {
        return vec![0.0];
    }
    let mut samples: Vec<f64> = (0..n)
        .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
        .collect();
    if !samples.contains(&0.0) {
        let nearest = samples
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.abs().partial_cmp(&b.1.abs()).unwrap())
            .map(|(i, _)| i)
            .unwrap();
        samples[nearest] = 0.0;
    }
    samples
}

/// Speed acceleration trapezoid: ramp to `amplitude` over the ramp time, hold,
/// ramp back to zero at the maneuver time.
pub fn speed_profile(amplitude: f64, cfg: &PrimitiveConfig) -> AccelProfile {
    let tr = cfg.ramp_time_s;
    let tu = cfg.sog_maneuver_time_s;
    AccelProfile {
        kind: ProfileKind::Sog,
        amplitude,
        breakpoints: dedup_times(vec![
            (0.0, 0.0),
            (tr, amplitude),
            (tu - tr, amplitude),
            (tu, 0.0),
        ]),
    }
}

/// Course acceleration double trapezoid: a positive trapezoid on the first
/// half mirrored by a negative one on the second half, so the induced turn
/// rate rises and falls back to zero while the integral of rate (the course
/// change) accumulates.
pub fn course_profile(amplitude: f64, cfg: &PrimitiveConfig) -> AccelProfile {
    let tr = cfg.ramp_time_s;
    let tc = cfg.course_maneuver_time_s;
    let half = tc / 2.0;
    AccelProfile {
        kind: ProfileKind::Course,
        amplitude,
        breakpoints: dedup_times(vec![
            (0.0, 0.0),
            (tr, amplitude),
            (half - tr, amplitude),
            (half, 0.0),
            (half + tr, -amplitude),
            (tc - tr, -amplitude),
            (tc, 0.0),
        ]),
    }
}

/// Drops exactly coincident corners (triangle degenerations).
fn dedup_times(mut points: Vec<(f64, f64)>) -> Vec<(f64, f64)> {
    points.dedup_by(|a, b| a.0 == b.0 && a.1 == b.1);
    points
}

/// Integrates a speed profile from `initial_sog`: exact piecewise quadratic,
/// clamped at zero from below, constant after the maneuver ends. Local time,
/// spanning [0, horizon].
pub fn integrate_speed(initial_sog: f64, profile: &AccelProfile, horizon: f64) -> Piecewise {
    debug_assert!(horizon >= profile.maneuver_time());
    profile
        .as_piecewise(horizon)
        .integral(initial_sog)
        .clamp_min_zero()
}

/// Integrates a course profile from `initial_course` (unwrapped). A nonzero
/// initial turn rate is blended out linearly over the ramp time so the rate
/// trajectory stays continuous. Local time, spanning [0, horizon].
pub fn integrate_course(
    initial_course: f64,
    initial_rate: f64,
    profile: &AccelProfile,
    ramp_time_s: f64,
    horizon: f64,
) -> Piecewise {
    debug_assert!(horizon >= profile.maneuver_time());
    let mut rate = profile.as_piecewise(horizon).integral(0.0);
    if initial_rate != 0.0 {
        let decay = Piecewise::linear_through(&[(0.0, initial_rate), (ramp_time_s, 0.0)]);
        rate = rate.add(&decay);
    }
    rate.integral(initial_course)
}

/// Net course change produced by a unit-amplitude course maneuver.
pub fn unit_course_change(cfg: &PrimitiveConfig) -> f64 {
    let profile = course_profile(1.0, cfg);
    let tc = cfg.course_maneuver_time_s;
    integrate_course(0.0, 0.0, &profile, cfg.ramp_time_s, tc).eval(tc)
}

/// Line-of-sight guidance parameters.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct GuidanceConfig {
    /// Lookahead distance along the desired trajectory; converted to a
    /// lookahead duration at the current desired speed.
    pub lookahead_m: f64,
}

impl Default for GuidanceConfig {
    fn default() -> Self {
        GuidanceConfig { lookahead_m: 100.0 }
    }
}

/// Acceleration pair steering the vessel back onto the desired trajectory.
///
/// A line-of-sight target is placed on the desired trajectory one lookahead
/// duration ahead of now; the speed term closes the speed gap over one speed
/// maneuver and the course term is sized so one course maneuver's net change
/// reaches the bearing to the target. Both components are clamped to the
/// acceleration box.
pub fn guidance_acceleration(
    state: &VesselState,
    desired: &DesiredTrajectory,
    prim: &PrimitiveConfig,
    cfg: &GuidanceConfig,
    limits: &AccelerationLimits,
) -> (f64, f64) {
    let speed_ref = desired.speed(state.time_s);
    let lookahead_s = cfg.lookahead_m / speed_ref.max(0.5);
    let (tn, te) = desired.position(state.time_s + lookahead_s);
    let (dn, de) = (tn - state.north_m, te - state.east_m);
    let bearing = if dn.hypot(de) < 1e-6 {
        desired.course(state.time_s)
    } else {
        de.atan2(dn)
    };

    let sog_accel = ((speed_ref - state.sog_mps) / prim.sog_maneuver_time_s)
        .clamp(limits.sog_accel_min, limits.sog_accel_max);
    let course_accel = (angle::diff(bearing, state.course_rad) / unit_course_change(prim))
        .clamp(limits.course_accel_min, limits.course_accel_max);
    (sog_accel, course_accel)
}

/// Replaces the sample pair nearest the guidance pair with the guidance pair,
/// provided the guidance pair lies inside the acceleration box. Distances are
/// measured after normalizing each axis by its limit span, since the two axes
/// have different units.
pub fn apply_guidance(
    mut samples: Vec<(f64, f64)>,
    guidance: (f64, f64),
    limits: &AccelerationLimits,
) -> Vec<(f64, f64)> {
    assert!(!samples.is_empty());
    let (gu, gc) = guidance;
    let inside = gu >= limits.sog_accel_min
        && gu <= limits.sog_accel_max
        && gc >= limits.course_accel_min
        && gc <= limits.course_accel_max;
    if !inside {
        return samples;
    }
    let su = limits.sog_accel_max - limits.sog_accel_min;
    let sc = limits.course_accel_max - limits.course_accel_min;
    let nearest = samples
        .iter()
        .enumerate()
        .map(|(i, &(u, c))| {
            let d = ((u - gu) / su).powi(2) + ((c - gc) / sc).powi(2);
            (i, d)
        })
        .min_by(|a, b| a.1.partial_cmp(&b.1).unwrap())
        .map(|(i, _)| i)
        .unwrap();
    samples[nearest] = guidance;
    samples
}

/// Exponential decay of an initial velocity error on top of a desired
/// trajectory (the feedback-correction error model).
#[derive(Debug, Clone, Copy)]
struct ErrorDecay {
    t0: f64,
    sog_error: f64,
    course_error: f64,
    sog_tau: f64,
    course_tau: f64,
}

/// Desired (or feedback-corrected) speed and course over one planning horizon.
///
/// Both components are exact piecewise polynomials; course is kept unwrapped
/// internally so it can be integrated and differentiated freely. Evaluation
/// outside the span holds the boundary values.
#[derive(Debug, Clone)]
pub struct VelocityTrajectory {
    sog: Piecewise,
    course: Piecewise,
    /// Hint for discretized evaluation (pose sampling).
    pub sample_step_s: f64,
    correction: Option<ErrorDecay>,
}

impl VelocityTrajectory {
    pub(crate) fn from_components(sog: Piecewise, course: Piecewise, sample_step_s: f64) -> Self {
        debug_assert!((sog.start() - course.start()).abs() < 1e-9);
        debug_assert!((sog.end() - course.end()).abs() < 1e-9);
        VelocityTrajectory {
            sog,
            course,
            sample_step_s,
            correction: None,
        }
    }

    /// Constant speed and course over [start, end].
    pub fn constant(start_s: f64, end_s: f64, sog_mps: f64, course_rad: f64) -> Self {
        VelocityTrajectory::from_components(
            Piecewise::constant(start_s, end_s, sog_mps),
            Piecewise::constant(start_s, end_s, course_rad),
            0.5,
        )
    }

    pub fn start_time(&self) -> f64 {
        self.sog.start()
    }

    pub fn end_time(&self) -> f64 {
        self.sog.end()
    }

    pub fn horizon(&self) -> f64 {
        self.end_time() - self.start_time()
    }

    /// Speed at `t` (desired, plus any error decay).
    pub fn sog(&self, t: f64) -> f64 {
        let mut u = self.sog.eval(t);
        if let Some(c) = &self.correction {
            u += c.sog_error * (-(t - c.t0) / c.sog_tau).exp();
        }
        u
    }

    /// Course at `t`, unwrapped.
    pub fn course(&self, t: f64) -> f64 {
        let mut chi = self.course.eval(t);
        if let Some(c) = &self.correction {
            chi += c.course_error * (-(t - c.t0) / c.course_tau).exp();
        }
        chi
    }

    /// Course at `t`, wrapped to (-pi, pi].
    pub fn course_wrapped(&self, t: f64) -> f64 {
        angle::wrap(self.course(t))
    }

    /// Turn rate at `t`.
    pub fn course_rate(&self, t: f64) -> f64 {
        let mut r = self.course.deriv(t);
        if let Some(c) = &self.correction {
            r += -c.course_error / c.course_tau * (-(t - c.t0) / c.course_tau).exp();
        }
        r
    }

    /// Attaches the error-decay correction anchored at the trajectory start.
    pub(crate) fn with_error_decay(
        &self,
        sog_error: f64,
        course_error: f64,
        sog_tau: f64,
        course_tau: f64,
    ) -> Self {
        debug_assert!(self.correction.is_none(), "already corrected");
        let mut out = self.clone();
        out.correction = Some(ErrorDecay {
            t0: self.start_time(),
            sog_error,
            course_error,
            sog_tau,
            course_tau,
        });
        out
    }

    /// Concatenates a later sub-trajectory; spans must abut and neither part
    /// may carry a correction.
    pub(crate) fn append(self, other: VelocityTrajectory) -> Self {
        debug_assert!(self.correction.is_none() && other.correction.is_none());
        VelocityTrajectory {
            sog: self.sog.append(&other.sog),
            course: self.course.append(&other.course),
            sample_step_s: self.sample_step_s,
            correction: None,
        }
    }
}
