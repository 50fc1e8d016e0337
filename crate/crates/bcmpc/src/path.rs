//! The desired trajectory the vessel is nominally following: time-stamped
//! waypoints with a desired speed, queried as position/speed/course of time.

use serde::{Deserialize, Serialize};

/// One time-stamped point of the desired trajectory.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct Waypoint {
    pub time_s: f64,
    pub north_m: f64,
    pub east_m: f64,
    pub sog_mps: f64,
}

/// Piecewise-linear desired trajectory p_d(t).
///
/// Positions interpolate linearly in time between waypoints. Before the first
/// waypoint the position holds; after the last one it extrapolates along the
/// final segment so planning horizons that outlive the waypoint list still see
/// a sensible reference. Speed is piecewise constant per segment.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(transparent)]
pub struct DesiredTrajectory {
    waypoints: Vec<Waypoint>,
}

impl DesiredTrajectory {
    /// Panics unless there are at least two waypoints with strictly
    /// increasing times; scenario validation reports these as config errors
    /// before construction.
    pub fn new(waypoints: Vec<Waypoint>) -> Self {
        assert!(waypoints.len() >= 2, "need at least two waypoints");
        assert!(
            waypoints.windows(2).all(|w| w[1].time_s > w[0].time_s),
            "waypoint times must be strictly increasing"
        );
        DesiredTrajectory { waypoints }
    }

    /// Straight-line trajectory from a point along a course at constant speed.
    pub fn straight(
        north_m: f64,
        east_m: f64,
        course_rad: f64,
        sog_mps: f64,
        start_time_s: f64,
        duration_s: f64,
    ) -> Self {
        assert!(duration_s > 0.0 && sog_mps >= 0.0);
        let dist = sog_mps * duration_s;
        DesiredTrajectory::new(vec![
            Waypoint {
                time_s: start_time_s,
                north_m,
                east_m,
                sog_mps,
            },
            Waypoint {
                time_s: start_time_s + duration_s,
                north_m: north_m + dist * course_rad.cos(),
                east_m: east_m + dist * course_rad.sin(),
                sog_mps,
            },
        ])
    }

    pub fn waypoints(&self) -> &[Waypoint] {
        &self.waypoints
    }

    fn segment_index(&self, t: f64) -> usize {
        let n = self.waypoints.len();
        if t <= self.waypoints[0].time_s {
            return 0;
        }
        for i in 0..n - 1 {
            if t < self.waypoints[i + 1].time_s {
                return i;
            }
        }
        n - 2
    }

    /// Desired position at time `t` (north, east).
    pub fn position(&self, t: f64) -> (f64, f64) {
        if t <= self.waypoints[0].time_s {
            let w = &self.waypoints[0];
            return (w.north_m, w.east_m);
        }
        let i = self.segment_index(t);
        let (a, b) = (&self.waypoints[i], &self.waypoints[i + 1]);
        // Fraction > 1 extrapolates past the last waypoint.
        let f = (t - a.time_s) / (b.time_s - a.time_s);
        (
            a.north_m + f * (b.north_m - a.north_m),
            a.east_m + f * (b.east_m - a.east_m),
        )
    }

    /// Desired speed at time `t`.
    pub fn speed(&self, t: f64) -> f64 {
        let i = self.segment_index(t);
        if t >= self.waypoints[self.waypoints.len() - 1].time_s {
            return self.waypoints[self.waypoints.len() - 1].sog_mps;
        }
        self.waypoints[i].sog_mps
    }

    /// Direction of travel of the active segment, radians clockwise from north.
    pub fn course(&self, t: f64) -> f64 {
        let i = self.segment_index(t);
        let (a, b) = (&self.waypoints[i], &self.waypoints[i + 1]);
        (b.east_m - a.east_m).atan2(b.north_m - a.north_m)
    }

    pub fn start_time(&self) -> f64 {
        self.waypoints[0].time_s
    }

    pub fn end_time(&self) -> f64 {
        self.waypoints[self.waypoints.len() - 1].time_s
    }

    /// Geometric distance from a point to the waypoint polyline, ignoring time.
    pub fn cross_track(&self, north_m: f64, east_m: f64) -> f64 {
        let mut best = f64::INFINITY;
        for w in self.waypoints.windows(2) {
            let d = point_segment_distance(
                north_m,
                east_m,
                (w[0].north_m, w[0].east_m),
                (w[1].north_m, w[1].east_m),
            );
            best = best.min(d);
        }
        best
    }
}

/// Distance from point `(pn, pe)` to segment `a`-`b`.
pub(crate) fn point_segment_distance(pn: f64, pe: f64, a: (f64, f64), b: (f64, f64)) -> f64 {
    let (dn, de) = (b.0 - a.0, b.1 - a.1);
    let len2 = dn * dn + de * de;
    let t = if len2 == 0.0 {
        0.0
    } else {
        (((pn - a.0) * dn + (pe - a.1) * de) / len2).clamp(0.0, 1.0)
    };
    let (cn, ce) = (a.0 + t * dn, a.1 + t * de);
    ((pn - cn).powi(2) + (pe - ce).powi(2)).sqrt()
}
