//! Static-obstacle occupancy grids and moving-obstacle estimates.
//!
//! Static obstacles are simple polygons rasterized into an occupancy grid
//! whose cells hold values in `[0, 100]`: 100 inside a polygon, decaying
//! linearly to 0 across a padding band around it, and 0 elsewhere. Moving
//! obstacles are position/velocity estimates that extrapolate along a
//! constant-velocity track; Gaussian noise injection emulates the output of
//! a radar tracker.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::path::point_segment_distance;

/// Cell value of fully occupied space.
pub const MAX_CELL_VALUE: f64 = 100.0;

/// A polygonal static obstacle with a surrounding cost gradient.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StaticObstacle {
    /// Boundary vertices as (north, east) pairs in meters, in boundary order.
    pub vertices_m: Vec<(f64, f64)>,
    /// Width of the linear cost gradient around the polygon.
    pub padding_m: f64,
}

impl StaticObstacle {
    pub fn new(vertices_m: Vec<(f64, f64)>, padding_m: f64) -> Self {
        Self {
            vertices_m,
            padding_m,
        }
    }

    /// Enclosed area from the shoelace formula.
    pub fn area_m2(&self) -> f64 {
        let v = &self.vertices_m;
        let mut twice_area = 0.0;
        for i in 0..v.len() {
            let (n0, e0) = v[i];
            let (n1, e1) = v[(i + 1) % v.len()];
            twice_area += n0 * e1 - n1 * e0;
        }
        twice_area.abs() / 2.0
    }

    /// True when the polygon cannot bound any area.
    pub fn is_degenerate(&self) -> bool {
        self.vertices_m.len() < 3 || self.area_m2() < 1e-9
    }

    /// Even-odd containment test; boundary points count as inside.
    pub fn contains(&self, north_m: f64, east_m: f64) -> bool {
        if self.boundary_distance_m(north_m, east_m) < 1e-12 {
            return true;
        }
        let v = &self.vertices_m;
        let mut inside = false;
        let mut j = v.len() - 1;
        for i in 0..v.len() {
            let (ni, ei) = v[i];
            let (nj, ej) = v[j];
            if (ei > east_m) != (ej > east_m) {
                let crossing_north = ni + (east_m - ei) / (ej - ei) * (nj - ni);
                if north_m < crossing_north {
                    inside = !inside;
                }
            }
            j = i;
        }
        inside
    }

    /// Distance to the polygon boundary (zero on the boundary itself).
    pub fn boundary_distance_m(&self, north_m: f64, east_m: f64) -> f64 {
        let v = &self.vertices_m;
        let mut best = f64::INFINITY;
        for i in 0..v.len() {
            let a = v[i];
            let b = v[(i + 1) % v.len()];
            best = best.min(point_segment_distance(north_m, east_m, a, b));
        }
        best
    }

    /// Distance to the occupied set: zero anywhere inside the polygon.
    pub fn distance_m(&self, north_m: f64, east_m: f64) -> f64 {
        if self.contains(north_m, east_m) {
            0.0
        } else {
            self.boundary_distance_m(north_m, east_m)
        }
    }
}

/// Axis-aligned area covered by an occupancy grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridBounds {
    pub north_min_m: f64,
    pub north_max_m: f64,
    pub east_min_m: f64,
    pub east_max_m: f64,
}

impl GridBounds {
    pub fn new(north_min_m: f64, north_max_m: f64, east_min_m: f64, east_max_m: f64) -> Self {
        Self {
            north_min_m,
            north_max_m,
            east_min_m,
            east_max_m,
        }
    }

    /// Smallest bounds containing every obstacle plus its padding, grown by
    /// `margin_m` on all sides. `None` when there are no obstacles.
    pub fn covering(obstacles: &[StaticObstacle], margin_m: f64) -> Option<Self> {
        let mut bounds: Option<GridBounds> = None;
        for obstacle in obstacles {
            let reach = obstacle.padding_m + margin_m;
            for &(north, east) in &obstacle.vertices_m {
                match &mut bounds {
                    None => {
                        bounds = Some(GridBounds::new(
                            north - reach,
                            north + reach,
                            east - reach,
                            east + reach,
                        ));
                    }
                    Some(b) => {
                        b.north_min_m = b.north_min_m.min(north - reach);
                        b.north_max_m = b.north_max_m.max(north + reach);
                        b.east_min_m = b.east_min_m.min(east - reach);
                        b.east_max_m = b.east_max_m.max(east + reach);
                    }
                }
            }
        }
        bounds
    }

    /// Grows the bounds to contain the given point.
    pub fn include(&mut self, north_m: f64, east_m: f64) {
        self.north_min_m = self.north_min_m.min(north_m);
        self.north_max_m = self.north_max_m.max(north_m);
        self.east_min_m = self.east_min_m.min(east_m);
        self.east_max_m = self.east_max_m.max(east_m);
    }
}

/// Grid metadata written alongside image exports.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridHeader {
    pub origin_north_m: f64,
    pub origin_east_m: f64,
    pub resolution_m: f64,
    pub rows: usize,
    pub cols: usize,
}

/// Row-major occupancy raster over a north/east area.
///
/// The origin is the south-west corner; row indices increase northward and
/// column indices increase eastward. Cell `(row, col)` is centered at
/// `origin + (row + 0.5, col + 0.5) * resolution`. The grid is immutable
/// after construction.
#[derive(Debug, Clone, PartialEq)]
pub struct OccupancyGrid {
    origin_north_m: f64,
    origin_east_m: f64,
    resolution_m: f64,
    rows: usize,
    cols: usize,
    values: Vec<f64>,
}

impl OccupancyGrid {
    pub fn new(
        origin_north_m: f64,
        origin_east_m: f64,
        resolution_m: f64,
        rows: usize,
        cols: usize,
        values: Vec<f64>,
    ) -> Result<Self, String> {
        if !(resolution_m > 0.0) {
            return Err(format!(
                "grid resolution must be positive, got {resolution_m}"
            ));
        }
        if rows == 0 || cols == 0 {
            return Err(format!(
                "grid dimensions must be nonzero, got {rows}x{cols}"
            ));
        }
        if values.len() != rows * cols {
            return Err(format!(
                "grid value count {} does not match {rows}x{cols}",
                values.len()
            ));
        }
        if let Some(bad) = values.iter().find(|v| !(0.0..=MAX_CELL_VALUE).contains(*v)) {
            return Err(format!("grid value {bad} outside [0, {MAX_CELL_VALUE}]"));
        }
        Ok(Self {
            origin_north_m,
            origin_east_m,
            resolution_m,
            rows,
            cols,
            values,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn resolution_m(&self) -> f64 {
        self.resolution_m
    }

    /// South-west corner as (north, east).
    pub fn origin(&self) -> (f64, f64) {
        (self.origin_north_m, self.origin_east_m)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn value(&self, row: usize, col: usize) -> f64 {
        self.values[row * self.cols + col]
    }

    /// Center of cell `(row, col)` as (north, east).
    pub fn cell_center(&self, row: usize, col: usize) -> (f64, f64) {
        (
            self.origin_north_m + (row as f64 + 0.5) * self.resolution_m,
            self.origin_east_m + (col as f64 + 0.5) * self.resolution_m,
        )
    }

    /// Value of the cell nearest the query position; 0 outside the grid.
    pub fn query(&self, north_m: f64, east_m: f64) -> f64 {
        let row = ((north_m - self.origin_north_m) / self.resolution_m).floor();
        let col = ((east_m - self.origin_east_m) / self.resolution_m).floor();
        if row < 0.0 || col < 0.0 || row >= self.rows as f64 || col >= self.cols as f64 {
            return 0.0;
        }
        self.value(row as usize, col as usize)
    }

    pub fn header(&self) -> GridHeader {
        GridHeader {
            origin_north_m: self.origin_north_m,
            origin_east_m: self.origin_east_m,
            resolution_m: self.resolution_m,
            rows: self.rows,
            cols: self.cols,
        }
    }

    /// ASCII PGM image of the grid, northernmost row first.
    pub fn pgm_string(&self) -> String {
        let mut out = format!(
            "P2\n{} {}\n{}\n",
            self.cols, self.rows, MAX_CELL_VALUE as u32
        );
        for row in (0..self.rows).rev() {
            let line: Vec<String> = (0..self.cols)
                .map(|col| format!("{}", self.value(row, col).round() as u32))
                .collect();
            out.push_str(&line.join(" "));
            out.push('\n');
        }
        out
    }
}

/// Rasterizes polygons into a padded occupancy grid.
///
/// Cells whose center lies inside any polygon read 100; cells whose center
/// lies within an obstacle's padding distance read `100 * (1 - d / padding)`
/// for boundary distance `d`, taking the maximum over obstacles; all other
/// cells read 0.
pub fn rasterize_and_pad(
    obstacles: &[StaticObstacle],
    resolution_m: f64,
    bounds: GridBounds,
) -> Result<OccupancyGrid, String> {
    if !(resolution_m > 0.0) {
        return Err(format!(
            "grid resolution must be positive, got {resolution_m}"
        ));
    }
    if bounds.north_max_m <= bounds.north_min_m || bounds.east_max_m <= bounds.east_min_m {
        return Err("grid bounds must span a nonzero area".to_string());
    }
    for (i, obstacle) in obstacles.iter().enumerate() {
        if obstacle.is_degenerate() {
            return Err(format!("obstacle {i} is a degenerate polygon"));
        }
        if obstacle.padding_m < 0.0 {
            return Err(format!("obstacle {i} has negative padding"));
        }
    }

    let rows = ((bounds.north_max_m - bounds.north_min_m) / resolution_m).ceil() as usize;
    let cols = ((bounds.east_max_m - bounds.east_min_m) / resolution_m).ceil() as usize;
    let rows = rows.max(1);
    let cols = cols.max(1);

    let mut values = vec![0.0; rows * cols];
    for row in 0..rows {
        let north = bounds.north_min_m + (row as f64 + 0.5) * resolution_m;
        for col in 0..cols {
            let east = bounds.east_min_m + (col as f64 + 0.5) * resolution_m;
            let cell = &mut values[row * cols + col];
            for obstacle in obstacles {
                if obstacle.contains(north, east) {
                    *cell = MAX_CELL_VALUE;
                    break;
                }
                if obstacle.padding_m > 0.0 {
                    let dist = obstacle.boundary_distance_m(north, east);
                    if dist < obstacle.padding_m {
                        let padded = MAX_CELL_VALUE * (1.0 - dist / obstacle.padding_m);
                        *cell = cell.max(padded);
                    }
                }
            }
        }
    }

    OccupancyGrid::new(
        bounds.north_min_m,
        bounds.east_min_m,
        resolution_m,
        rows,
        cols,
        values,
    )
}

/// Tracked state of one moving obstacle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ObstacleEstimate {
    pub id: u32,
    /// Time the estimate refers to.
    pub time_s: f64,
    pub north_m: f64,
    pub east_m: f64,
    pub vel_north_mps: f64,
    pub vel_east_mps: f64,
    /// Speed over ground, `‖velocity‖`.
    pub sog_mps: f64,
    /// Course over ground, clockwise from north; 0 when at rest.
    pub course_rad: f64,
}

impl ObstacleEstimate {
    pub fn new(
        id: u32,
        time_s: f64,
        north_m: f64,
        east_m: f64,
        vel_north_mps: f64,
        vel_east_mps: f64,
    ) -> Self {
        let sog_mps = vel_north_mps.hypot(vel_east_mps);
        let course_rad = if sog_mps > 0.0 {
            vel_east_mps.atan2(vel_north_mps)
        } else {
            0.0
        };
        Self {
            id,
            time_s,
            north_m,
            east_m,
            vel_north_mps,
            vel_east_mps,
            sog_mps,
            course_rad,
        }
    }

    /// Constant-velocity extrapolation of the estimate to a later time.
    pub fn predict(&self, time_s: f64) -> ObstacleEstimate {
        let dt = time_s - self.time_s;
        ObstacleEstimate {
            time_s,
            north_m: self.north_m + self.vel_north_mps * dt,
            east_m: self.east_m + self.vel_east_mps * dt,
            ..*self
        }
    }
}

/// Perturbs an estimate with independent zero-mean Gaussian noise per axis
/// on position and velocity. Deterministic for a fixed seed; zero standard
/// deviations return the truth unchanged.
pub fn inject_noise(
    truth: &ObstacleEstimate,
    sigma_pos_m: f64,
    sigma_vel_mps: f64,
    seed: u64,
) -> ObstacleEstimate {
    assert!(
        sigma_pos_m >= 0.0 && sigma_vel_mps >= 0.0,
        "noise standard deviations must be non-negative"
    );
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pos = Normal::new(0.0, sigma_pos_m).expect("validated std dev");
    let vel = Normal::new(0.0, sigma_vel_mps).expect("validated std dev");
    ObstacleEstimate::new(
        truth.id,
        truth.time_s,
        truth.north_m + pos.sample(&mut rng),
        truth.east_m + pos.sample(&mut rng),
        truth.vel_north_mps + vel.sample(&mut rng),
        truth.vel_east_mps + vel.sample(&mut rng),
    )
}
