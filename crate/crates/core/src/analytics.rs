//! Post-hoc game analysis over match logs: bowling speed, strike rate,
//! strike power, and fielding coverage.
//!
//! Speeds are meters per second everywhere in this module; km/h conversion
//! belongs to the presentation layer.

use crate::geometry::Point2;
use crate::positioning::Track;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Resampling rate for coverage grids, Hz.
pub const COVERAGE_RESAMPLE_HZ: f64 = 10.0;
/// Window after bat contact over which off-bat speed is averaged, seconds.
pub const STRIKE_POWER_WINDOW: f64 = 0.05;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AnalyticsError {
    #[error("need at least {needed} samples in the window, got {got}")]
    InsufficientSamples { needed: usize, got: usize },
    #[error("strike rate is undefined with no balls faced")]
    NoBallsFaced,
}

/// Runs and balls faced for one batter.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BattingRecord {
    pub player_id: String,
    pub runs: u32,
    pub balls_faced: u32,
}

/// Occupancy-seconds over a square grid of cells covering one track.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverageGrid {
    pub cell_size: f64,
    /// Ground position of the (0, 0) cell corner.
    pub origin: Point2,
    pub nx: usize,
    pub ny: usize,
    /// Row-major occupancy seconds, `ny` rows of `nx` cells.
    pub cells: Vec<f64>,
}

impl CoverageGrid {
    pub fn occupancy(&self, ix: usize, iy: usize) -> f64 {
        self.cells[iy * self.nx + ix]
    }

    pub fn total_occupancy(&self) -> f64 {
        self.cells.iter().sum()
    }

    /// Cells with nonzero occupancy as `(ix, iy, seconds)`.
    pub fn occupied_cells(&self) -> Vec<(usize, usize, f64)> {
        let mut out = Vec::new();
        for iy in 0..self.ny {
            for ix in 0..self.nx {
                let v = self.occupancy(ix, iy);
                if v > 0.0 {
                    out.push((ix, iy, v));
                }
            }
        }
        out
    }
}

/// Mean speed over the window: total 3D path length of consecutive samples
/// divided by the time they cover.
pub fn ball_speed(track: &Track, window: (f64, f64)) -> Result<f64, AnalyticsError> {
    let samples: Vec<_> = track
        .samples()
        .iter()
        .filter(|s| s.t >= window.0 && s.t <= window.1)
        .collect();
    if samples.len() < 2 {
        return Err(AnalyticsError::InsufficientSamples {
            needed: 2,
            got: samples.len(),
        });
    }
    let path: f64 = samples
        .windows(2)
        .map(|w| (w[1].pos - w[0].pos).norm())
        .sum();
    let duration = samples.last().unwrap().t - samples[0].t;
    Ok(path / duration)
}

/// Runs per hundred balls.
pub fn strike_rate(rec: &BattingRecord) -> Result<f64, AnalyticsError> {
    if rec.balls_faced == 0 {
        return Err(AnalyticsError::NoBallsFaced);
    }
    Ok(rec.runs as f64 / rec.balls_faced as f64 * 100.0)
}

/// Off-bat speed: mean ball speed over the 50 ms after bat contact.
pub fn strike_power(track: &Track, bat_contact_t: f64) -> Result<f64, AnalyticsError> {
    ball_speed(track, (bat_contact_t, bat_contact_t + STRIKE_POWER_WINDOW))
}

/// Distance covered and a coverage grid for one player track.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlayerCoverage {
    pub sensor_id: String,
    pub distance_covered: f64,
    pub grid: CoverageGrid,
}

/// Per-player movement analysis: total path length plus occupancy time per
/// grid cell, from a fixed 10 Hz resampling of each track.
///
/// `cell_size` must be within [0.5, 10] meters.
pub fn fielder_coverage(tracks: &[Track], cell_size: f64) -> Vec<PlayerCoverage> {
    assert!(
        (0.5..=10.0).contains(&cell_size),
        "cell_size {cell_size} out of range [0.5, 10]"
    );
    tracks
        .iter()
        .map(|track| {
            let samples = track.samples();
            // fold from +0.0: an empty Sum would start at -0.0.
            let distance_covered: f64 = samples
                .windows(2)
                .map(|w| (w[1].pos - w[0].pos).norm())
                .fold(0.0, |acc, d| acc + d);

            let grid = if samples.is_empty() {
                CoverageGrid {
                    cell_size,
                    origin: Point2::new(0.0, 0.0),
                    nx: 0,
                    ny: 0,
                    cells: Vec::new(),
                }
            } else {
                let min_x = samples.iter().map(|s| s.pos.x).fold(f64::INFINITY, f64::min);
                let max_x = samples
                    .iter()
                    .map(|s| s.pos.x)
                    .fold(f64::NEG_INFINITY, f64::max);
                let min_y = samples.iter().map(|s| s.pos.y).fold(f64::INFINITY, f64::min);
                let max_y = samples
                    .iter()
                    .map(|s| s.pos.y)
                    .fold(f64::NEG_INFINITY, f64::max);
                let origin = Point2::new(
                    (min_x / cell_size).floor() * cell_size,
                    (min_y / cell_size).floor() * cell_size,
                );
                let nx = ((max_x - origin.x) / cell_size).floor() as usize + 1;
                let ny = ((max_y - origin.y) / cell_size).floor() as usize + 1;
                let mut cells = vec![0.0f64; nx * ny];

                let t0 = samples[0].t;
                let t1 = samples[samples.len() - 1].t;
                let dt = 1.0 / COVERAGE_RESAMPLE_HZ;
                let mut k = 0u64;
                loop {
                    let t = t0 + k as f64 * dt;
                    if t > t1 {
                        break;
                    }
                    let pos = track.position_at(t).expect("t within span");
                    let ix = (((pos.x - origin.x) / cell_size).floor() as usize).min(nx - 1);
                    let iy = (((pos.y - origin.y) / cell_size).floor() as usize).min(ny - 1);
                    cells[iy * nx + ix] += dt;
                    k += 1;
                }
                CoverageGrid {
                    cell_size,
                    origin,
                    nx,
                    ny,
                    cells,
                }
            };

            PlayerCoverage {
                sensor_id: track.sensor_id().to_string(),
                distance_covered,
                grid,
            }
        })
        .collect()
}
