//! SVG rendering of a completed run: desired route, ownship track with a
//! marker each minute, static obstacles with their padding bands, and
//! straight-line moving-obstacle tracks.

use std::fmt::Write;

use bcmpc::sim::{RunLog, Scenario};

/// Pixel budget for the longer world axis, excluding margins.
const CANVAS_PX: f64 = 760.0;
const MARGIN_PX: f64 = 50.0;
const MARKER_PERIOD_S: f64 = 60.0;

/// World-to-pixel mapping: east grows right, north grows up.
struct Frame {
    north_max: f64,
    east_min: f64,
    scale: f64,
    width_px: f64,
    height_px: f64,
}

impl Frame {
    fn fit(points: &[(f64, f64)]) -> Frame {
        let mut north = (f64::INFINITY, f64::NEG_INFINITY);
        let mut east = (f64::INFINITY, f64::NEG_INFINITY);
        for &(n, e) in points {
            north = (north.0.min(n), north.1.max(n));
            east = (east.0.min(e), east.1.max(e));
        }
        let span = (north.1 - north.0).max(east.1 - east.0).max(1.0);
        let scale = CANVAS_PX / span;
        Frame {
            north_max: north.1,
            east_min: east.0,
            scale,
            width_px: (east.1 - east.0) * scale + 2.0 * MARGIN_PX,
            height_px: (north.1 - north.0) * scale + 2.0 * MARGIN_PX,
        }
    }

    fn map(&self, north: f64, east: f64) -> (f64, f64) {
        (
            (east - self.east_min) * self.scale + MARGIN_PX,
            (self.north_max - north) * self.scale + MARGIN_PX,
        )
    }

    fn points_attr(&self, points: impl Iterator<Item = (f64, f64)>) -> String {
        let mut out = String::new();
        for (n, e) in points {
            let (x, y) = self.map(n, e);
            let _ = write!(out, "{x:.1},{y:.1} ");
        }
        out.trim_end().to_string()
    }
}

/// Renders the scenario geometry and the flown track as a standalone SVG
/// document.
pub fn render(scenario: &Scenario, log: &RunLog) -> String {
    let frame = Frame::fit(&bounding_points(scenario, log));
    let mut svg = String::new();
    let _ = writeln!(
        svg,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 {:.0} {:.0}\" \
         font-family=\"sans-serif\">",
        frame.width_px, frame.height_px
    );
    let _ = writeln!(
        svg,
        "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n\
         <text x=\"{MARGIN_PX}\" y=\"24\" font-size=\"15\" fill=\"#333\">{}</text>",
        scenario.name
    );

    // A round-joined stroke of twice the padding width is exactly the
    // polygon dilated by the padding distance; the solid polygon then covers
    // the inward half.
    for obstacle in &scenario.static_obstacles {
        let points = frame.points_attr(obstacle.vertices_m.iter().copied());
        let band = 2.0 * obstacle.padding_m * frame.scale;
        let _ = writeln!(
            svg,
            "<polygon points=\"{points}\" fill=\"#dce6f2\" stroke=\"#dce6f2\" \
             stroke-width=\"{band:.1}\" stroke-linejoin=\"round\"/>"
        );
        let _ = writeln!(
            svg,
            "<polygon points=\"{points}\" fill=\"#8aa0bd\" stroke=\"#5b7290\"/>"
        );
    }

    let route = frame.points_attr(scenario.waypoints.iter().map(|w| (w.north_m, w.east_m)));
    let _ = writeln!(
        svg,
        "<polyline points=\"{route}\" fill=\"none\" stroke=\"#999\" \
         stroke-dasharray=\"7 5\" stroke-width=\"1.5\"/>"
    );

    for obstacle in &scenario.moving_obstacles {
        let start = obstacle.truth_at(0.0);
        let end = obstacle.truth_at(scenario.duration_s);
        let track = frame.points_attr(
            [(start.north_m, start.east_m), (end.north_m, end.east_m)]
                .iter()
                .copied(),
        );
        let _ = writeln!(
            svg,
            "<polyline points=\"{track}\" fill=\"none\" stroke=\"#b0544f\" \
             stroke-dasharray=\"4 4\" stroke-width=\"1.5\"/>"
        );
        let mut t = 0.0;
        while t <= scenario.duration_s + 1e-9 {
            let at = obstacle.truth_at(t);
            marker(&mut svg, &frame, at.north_m, at.east_m, t, "#b0544f");
            t += MARKER_PERIOD_S;
        }
    }

    let stride = (log.rows.len() / 1500).max(1);
    let track = frame.points_attr(
        log.rows
            .iter()
            .step_by(stride)
            .chain(log.rows.last())
            .map(|row| (row.north_m, row.east_m)),
    );
    let _ = writeln!(
        svg,
        "<polyline points=\"{track}\" fill=\"none\" stroke=\"#2c5d8f\" \
         stroke-width=\"1.8\"/>"
    );
    let mut next_marker = 0.0;
    for row in &log.rows {
        if row.time_s >= next_marker - 1e-9 {
            marker(
                &mut svg,
                &frame,
                row.north_m,
                row.east_m,
                row.time_s,
                "#2c5d8f",
            );
            next_marker += MARKER_PERIOD_S;
        }
    }

    scale_bar(&mut svg, &frame);
    svg.push_str("</svg>\n");
    svg
}

/// Everything the viewport must contain: route, flown track, obstacle
/// tracks, and static polygons grown by their padding.
fn bounding_points(scenario: &Scenario, log: &RunLog) -> Vec<(f64, f64)> {
    let mut points: Vec<(f64, f64)> = scenario
        .waypoints
        .iter()
        .map(|w| (w.north_m, w.east_m))
        .collect();
    points.extend(log.rows.iter().map(|row| (row.north_m, row.east_m)));
    for obstacle in &scenario.static_obstacles {
        for &(n, e) in &obstacle.vertices_m {
            for (dn, de) in [(-1.0, 0.0), (1.0, 0.0), (0.0, -1.0), (0.0, 1.0)] {
                points.push((n + dn * obstacle.padding_m, e + de * obstacle.padding_m));
            }
        }
    }
    for obstacle in &scenario.moving_obstacles {
        for t in [0.0, scenario.duration_s] {
            let at = obstacle.truth_at(t);
            points.push((at.north_m, at.east_m));
        }
    }
    points
}

/// Three crossing strokes forming an asterisk, plus the time label.
fn marker(svg: &mut String, frame: &Frame, north: f64, east: f64, time_s: f64, color: &str) {
    let (x, y) = frame.map(north, east);
    let r = 5.0;
    for angle_deg in [0.0_f64, 60.0, 120.0] {
        let (dy, dx) = angle_deg.to_radians().sin_cos();
        let _ = writeln!(
            svg,
            "<line x1=\"{:.1}\" y1=\"{:.1}\" x2=\"{:.1}\" y2=\"{:.1}\" \
             stroke=\"{color}\" stroke-width=\"1.2\"/>",
            x - r * dx,
            y - r * dy,
            x + r * dx,
            y + r * dy
        );
    }
    let _ = writeln!(
        svg,
        "<text x=\"{:.1}\" y=\"{:.1}\" font-size=\"10\" fill=\"#555\">{:.0} s</text>",
        x + 7.0,
        y - 4.0,
        time_s
    );
}

fn scale_bar(svg: &mut String, frame: &Frame) {
    let bar_m = 200.0;
    let x0 = MARGIN_PX;
    let y = frame.height_px - 18.0;
    let x1 = x0 + bar_m * frame.scale;
    let _ = writeln!(
        svg,
        "<line x1=\"{x0:.1}\" y1=\"{y:.1}\" x2=\"{x1:.1}\" y2=\"{y:.1}\" \
         stroke=\"#333\" stroke-width=\"2\"/>\n\
         <text x=\"{x0:.1}\" y=\"{:.1}\" font-size=\"11\" fill=\"#333\">{bar_m:.0} m</text>",
        y - 6.0
    );
}
