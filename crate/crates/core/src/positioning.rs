//! Range-based positioning and per-sensor sample tracks.
//!
//! Access points report ranges to a sensor; [`trilaterate`] inverts them
//! into ground-plane coordinates by damped Gauss-Newton least squares on
//! the range residuals. The solve is deterministic: it starts from the
//! anchor centroid, sorts ranges by access-point id before accumulating,
//! halves any step that fails to reduce the cost, converges when the step
//! norm falls below 1e-9 m, and gives up (with an error, never a silent
//! bad fix) after 100 iterations.

use crate::geometry::{distance, Point2, Point3};
use crate::ground::GroundLayout;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Iteration cap for the Gauss-Newton solve.
pub const MAX_ITERATIONS: usize = 100;
/// Convergence threshold on the step norm, meters.
pub const STEP_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PositioningError {
    #[error("need at least 3 ranges, got {0}")]
    InsufficientAnchors(usize),
    #[error("access point `{0}` is not in the layout")]
    UnknownAccessPoint(String),
    #[error("access point `{0}` appears twice in the range set")]
    DuplicateAccessPoint(String),
    #[error("range to `{id}` must be a positive distance, got {range}")]
    InvalidRange { id: String, range: f64 },
    #[error("access points are collinear; the fix is not unique")]
    DegenerateGeometry,
    #[error("no convergence after {MAX_ITERATIONS} iterations (residual {residual})")]
    NoConvergence { residual: f64 },
    #[error("sample at t={t} is not later than the track end t={last}")]
    OutOfOrder { t: f64, last: f64 },
    #[error("sample for sensor `{sample}` cannot join track for `{track}`")]
    MismatchedSensor { sample: String, track: String },
    #[error("t={t} is outside the track span [{first}, {last}]")]
    OutOfRange { t: f64, first: f64, last: f64 },
    #[error("sample rejected: {0}")]
    InvalidSample(String),
}

/// What a sensor is attached to. Fixed per sensor id for the life of a log.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SensorKind {
    Ball,
    BowlerFoot,
    Player,
}

/// One timestamped position reading from a named sensor. Player and foot
/// sensors are planar and carry `z = 0`; only the ball is tracked in 3D.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SensorSample {
    pub t: f64,
    pub sensor_id: String,
    pub kind: SensorKind,
    pub pos: Point3,
}

impl SensorSample {
    pub fn new(t: f64, sensor_id: impl Into<String>, kind: SensorKind, pos: Point3) -> Self {
        Self {
            t,
            sensor_id: sensor_id.into(),
            kind,
            pos,
        }
    }

    /// Sensors never report a time before the epoch, a non-finite
    /// coordinate, or an underground ball.
    pub fn validate(&self) -> Result<(), PositioningError> {
        if !self.t.is_finite() || self.t < 0.0 {
            return Err(PositioningError::InvalidSample(format!(
                "timestamp {} is invalid",
                self.t
            )));
        }
        if !self.pos.is_finite() {
            return Err(PositioningError::InvalidSample(
                "position is not finite".to_string(),
            ));
        }
        if self.pos.z < 0.0 {
            return Err(PositioningError::InvalidSample(format!(
                "height {} is below ground",
                self.pos.z
            )));
        }
        Ok(())
    }
}

/// One instant's range measurements from a sensor to several access points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RangeSet {
    pub t: f64,
    pub sensor_id: String,
    /// `(access_point_id, measured range in meters)`.
    pub ranges: Vec<(String, f64)>,
}

/// Least-squares position fix from a range set: the point minimizing the
/// sum of squared range residuals, plus the RMS residual at the solution.
///
/// Shuffling `rs.ranges` changes nothing: ranges are sorted by access-point
/// id before any arithmetic, so the returned fix is bit-identical under
/// permutation.
pub fn trilaterate(
    layout: &GroundLayout,
    rs: &RangeSet,
) -> Result<(Point2, f64), PositioningError> {
    if rs.ranges.len() < 3 {
        return Err(PositioningError::InsufficientAnchors(rs.ranges.len()));
    }
    let mut entries: Vec<(Point2, f64)> = Vec::with_capacity(rs.ranges.len());
    let mut sorted = rs.ranges.clone();
    sorted.sort_by(|a, b| a.0.cmp(&b.0));
    for (idx, (id, range)) in sorted.iter().enumerate() {
        if idx > 0 && sorted[idx - 1].0 == *id {
            return Err(PositioningError::DuplicateAccessPoint(id.clone()));
        }
        let anchor = layout
            .access_point(id)
            .ok_or_else(|| PositioningError::UnknownAccessPoint(id.clone()))?;
        if !range.is_finite() || *range <= 0.0 {
            return Err(PositioningError::InvalidRange {
                id: id.clone(),
                range: *range,
            });
        }
        entries.push((anchor, *range));
    }
    if max_doubled_area(&entries) <= 1e-9 {
        return Err(PositioningError::DegenerateGeometry);
    }

    let n = entries.len() as f64;
    let mut p = Point2::new(
        entries.iter().map(|(a, _)| a.x).sum::<f64>() / n,
        entries.iter().map(|(a, _)| a.y).sum::<f64>() / n,
    );
    let mut cost = range_cost(p, &entries);

    for _ in 0..MAX_ITERATIONS {
        // Normal equations of the linearized residuals at p.
        let mut jtj = [[0.0f64; 2]; 2];
        let mut jtr = [0.0f64; 2];
        for (anchor, range) in &entries {
            let dx = p.x - anchor.x;
            let dy = p.y - anchor.y;
            let d = dx.hypot(dy).max(1e-15);
            let r = d - range;
            let (jx, jy) = (dx / d, dy / d);
            jtj[0][0] += jx * jx;
            jtj[0][1] += jx * jy;
            jtj[1][0] += jy * jx;
            jtj[1][1] += jy * jy;
            jtr[0] += jx * r;
            jtr[1] += jy * r;
        }
        let det = jtj[0][0] * jtj[1][1] - jtj[0][1] * jtj[1][0];
        if det.abs() < 1e-30 {
            return Err(PositioningError::DegenerateGeometry);
        }
        let mut step_x = (jtj[1][1] * jtr[0] - jtj[0][1] * jtr[1]) / det;
        let mut step_y = (-jtj[1][0] * jtr[0] + jtj[0][0] * jtr[1]) / det;

        // Damping: halve the step until the cost stops increasing.
        let mut candidate = Point2::new(p.x - step_x, p.y - step_y);
        let mut candidate_cost = range_cost(candidate, &entries);
        let mut halvings = 0;
        while candidate_cost > cost && halvings < 30 {
            step_x /= 2.0;
            step_y /= 2.0;
            candidate = Point2::new(p.x - step_x, p.y - step_y);
            candidate_cost = range_cost(candidate, &entries);
            halvings += 1;
        }
        p = candidate;
        cost = candidate_cost;
        if step_x.hypot(step_y) < STEP_TOLERANCE {
            return Ok((p, (cost / n).sqrt()));
        }
    }
    Err(PositioningError::NoConvergence {
        residual: (cost / n).sqrt(),
    })
}

fn range_cost(p: Point2, entries: &[(Point2, f64)]) -> f64 {
    entries
        .iter()
        .map(|(anchor, range)| {
            let r = distance(p, *anchor) - range;
            r * r
        })
        .sum()
}

fn max_doubled_area(entries: &[(Point2, f64)]) -> f64 {
    let mut max = 0.0f64;
    for i in 0..entries.len() {
        for j in (i + 1)..entries.len() {
            for k in (j + 1)..entries.len() {
                let u = entries[j].0 - entries[i].0;
                let v = entries[k].0 - entries[i].0;
                max = max.max((u.x * v.y - u.y * v.x).abs());
            }
        }
    }
    max
}

// ── Tracks ─────────────────────────────────────────────────────────────────

/// A time-ordered sequence of samples from one sensor, strictly increasing
/// in `t`. Single-writer: the ingestion stage appends; readers interpolate
/// on an immutable snapshot.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Track {
    sensor_id: String,
    samples: Vec<SensorSample>,
}

impl Track {
    pub fn new(sensor_id: impl Into<String>) -> Self {
        Self {
            sensor_id: sensor_id.into(),
            samples: Vec::new(),
        }
    }

    pub fn sensor_id(&self) -> &str {
        &self.sensor_id
    }

    pub fn samples(&self) -> &[SensorSample] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Appends `s` iff its timestamp strictly exceeds the current track end.
    /// Out-of-order samples are rejected, never reordered; the pipeline
    /// dead-letters them. A sensor's kind never changes mid-track.
    pub fn ingest(&mut self, s: SensorSample) -> Result<(), PositioningError> {
        if s.sensor_id != self.sensor_id {
            return Err(PositioningError::MismatchedSensor {
                sample: s.sensor_id,
                track: self.sensor_id.clone(),
            });
        }
        s.validate()?;
        if let Some(last) = self.samples.last() {
            if s.t <= last.t {
                return Err(PositioningError::OutOfOrder {
                    t: s.t,
                    last: last.t,
                });
            }
            if s.kind != last.kind {
                return Err(PositioningError::InvalidSample(format!(
                    "sensor `{}` changed kind from {:?} to {:?}",
                    s.sensor_id, last.kind, s.kind
                )));
            }
        }
        self.samples.push(s);
        Ok(())
    }

    /// Position at `t` by linear interpolation between the bracketing
    /// samples. Exact at sample timestamps; never extrapolates.
    pub fn position_at(&self, t: f64) -> Result<Point3, PositioningError> {
        let (first, last) = match (self.samples.first(), self.samples.last()) {
            (Some(f), Some(l)) => (f.t, l.t),
            _ => {
                return Err(PositioningError::OutOfRange {
                    t,
                    first: f64::NAN,
                    last: f64::NAN,
                })
            }
        };
        if t < first || t > last {
            return Err(PositioningError::OutOfRange { t, first, last });
        }
        let idx = self.samples.partition_point(|s| s.t < t);
        let hi = &self.samples[idx.min(self.samples.len() - 1)];
        if hi.t == t {
            return Ok(hi.pos);
        }
        let lo = &self.samples[idx - 1];
        let alpha = (t - lo.t) / (hi.t - lo.t);
        Ok(Point3::new(
            lo.pos.x + alpha * (hi.pos.x - lo.pos.x),
            lo.pos.y + alpha * (hi.pos.y - lo.pos.y),
            lo.pos.z + alpha * (hi.pos.z - lo.pos.z),
        ))
    }
}
