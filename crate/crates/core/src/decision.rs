//! The three umpiring decisions: front-foot no-ball, fielding-restriction
//! compliance, and LBW trajectory projection.
//!
//! Each decision carries its numeric evidence in the event so that the
//! verdict can be re-derived from the stored measurements alone. All
//! operations are pure; deliveries can be decided concurrently.
//!
//! The no-ball check works entirely from side lengths, the way the crease
//! sensors would: distances from the bowler's foot to the two fixed crease
//! sensors, then the law of cosines for the angle at the on-crease sensor.
//! With sensor B placed one crease offset directly behind sensor A, that
//! angle exceeds a right angle exactly when the foot is past the crease.
//! Near the line itself the side-length route is float-fuzzy at the
//! 1e-7 m scale, which is orders below any physical sensor accuracy; the
//! tie at exactly 90 degrees goes to the bowler.

use crate::geometry::{
    angle_at_vertex, arc_drop, distance, GeometryError, Point2, TriangleSides, Vec2,
};
use crate::ground::{CreaseFrame, End, GroundLayout, StumpZone};
use crate::positioning::{SensorKind, SensorSample, Track};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::f64::consts::FRAC_PI_2;
use thiserror::Error;

/// Minimum horizontal spread of samples for a trajectory fit, meters.
pub const MIN_FIT_SPREAD: f64 = 0.05;
/// A foot closer than this to a crease sensor is a degenerate triangle.
pub const ANCHOR_COINCIDENCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DecisionError {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("need at least {needed} samples, got {got}")]
    InsufficientSamples { needed: usize, got: usize },
    #[error("horizontal spread {spread} m is below {MIN_FIT_SPREAD} m; fit is ill-conditioned")]
    IllConditioned { spread: f64 },
    #[error("trajectory never reaches the stump plane")]
    NeverReaches,
    #[error("expected a {expected:?} sample, got {got:?}")]
    WrongSensorKind { expected: SensorKind, got: SensorKind },
    #[error("missing input: {0}")]
    MissingInput(&'static str),
}

// ── Decision events ────────────────────────────────────────────────────────

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DecisionKind {
    NoBall,
    FieldingViolation,
    LbwProjection,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NoBallVerdict {
    Legal,
    NoBall,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FieldingVerdict {
    Compliant,
    Violation,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LbwVerdict {
    Hitting,
    Missing,
}

/// Side lengths and angle of the no-ball sensor triangle. `theta` is absent
/// when the quick-reject shortcut already settled the verdict.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NoBallMeasurements {
    /// |B - foot|: foot to the behind-crease sensor.
    pub x: f64,
    /// |A - foot|: foot to the on-crease sensor.
    pub y: f64,
    /// |A - B|: the fixed sensor baseline.
    pub z: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theta: Option<f64>,
    pub quick_rejected: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldingMeasurements {
    pub count_inside: usize,
    pub count_outside: usize,
    pub rule_active: bool,
    /// Per-player outside-the-ring flags, keyed by sensor id.
    pub outside_by_player: BTreeMap<String, bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LbwMeasurements {
    /// Horizontal arc length from the fit origin to the stump plane.
    pub s_star: f64,
    pub intercept_y: f64,
    pub intercept_z: f64,
    pub coeff_a: f64,
    pub coeff_b: f64,
    pub coeff_c: f64,
    pub lateral_p: f64,
    pub lateral_q: f64,
    pub rms_residual: f64,
    pub n_samples: usize,
    pub window_start: f64,
    pub window_end: f64,
    /// The projected height went below ground before the plane.
    pub second_bounce: bool,
    /// Circular-arc drop over the remaining run, from the osculating radius
    /// at the window end. Reported as a cross-check only; the verdict uses
    /// the parabola.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub arc_drop_check: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DecisionBody {
    NoBall {
        verdict: NoBallVerdict,
        measurements: NoBallMeasurements,
    },
    FieldingViolation {
        verdict: FieldingVerdict,
        measurements: FieldingMeasurements,
    },
    LbwProjection {
        verdict: LbwVerdict,
        measurements: LbwMeasurements,
    },
}

impl DecisionBody {
    pub fn kind(&self) -> DecisionKind {
        match self {
            DecisionBody::NoBall { .. } => DecisionKind::NoBall,
            DecisionBody::FieldingViolation { .. } => DecisionKind::FieldingViolation,
            DecisionBody::LbwProjection { .. } => DecisionKind::LbwProjection,
        }
    }
}

/// One umpiring verdict with its supporting measurements.
///
/// `sinks_notified` is presentation-tier bookkeeping filled by the pipeline
/// and is not part of the serialized record.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecisionEvent {
    pub t: f64,
    #[serde(flatten)]
    pub body: DecisionBody,
    #[serde(skip)]
    pub sinks_notified: Vec<String>,
}

impl DecisionEvent {
    pub fn new(t: f64, body: DecisionBody) -> Self {
        Self {
            t,
            body,
            sinks_notified: Vec::new(),
        }
    }

    pub fn kind(&self) -> DecisionKind {
        self.body.kind()
    }
}

// ── No-ball ────────────────────────────────────────────────────────────────

/// The shortcut check: when the foot-to-B side is shorter than the fixed
/// baseline, the delivery cannot be a no-ball and the angle is never
/// computed. True means "immediately legal". The converse does not hold: a
/// legal foot far to the side also fails the shortcut and falls through to
/// the full angle check.
pub fn quick_reject(sides: TriangleSides) -> bool {
    sides.x < sides.z
}

/// Front-foot no-ball decision from the crease sensor triangle.
///
/// Verdict is `no_ball` iff the angle at the on-crease sensor strictly
/// exceeds 90 degrees; a foot exactly on the line is legal.
pub fn detect_no_ball(
    frame: &CreaseFrame,
    foot: &SensorSample,
) -> Result<DecisionEvent, DecisionError> {
    if foot.kind != SensorKind::BowlerFoot {
        return Err(DecisionError::WrongSensorKind {
            expected: SensorKind::BowlerFoot,
            got: foot.kind,
        });
    }
    let s = foot.pos.ground();
    let x = distance(frame.anchor_b, s);
    let y = distance(frame.anchor_a, s);
    let z = distance(frame.anchor_a, frame.anchor_b);
    if x < ANCHOR_COINCIDENCE || y < ANCHOR_COINCIDENCE {
        return Err(GeometryError::DegenerateTriangle { x, y, z }.into());
    }
    let sides = TriangleSides::new(x, y, z);

    let (verdict, theta, quick_rejected) = if quick_reject(sides) {
        (NoBallVerdict::Legal, None, true)
    } else {
        let theta = angle_at_vertex(sides)?;
        let verdict = if theta > FRAC_PI_2 {
            NoBallVerdict::NoBall
        } else {
            NoBallVerdict::Legal
        };
        (verdict, Some(theta), false)
    };

    Ok(DecisionEvent::new(
        foot.t,
        DecisionBody::NoBall {
            verdict,
            measurements: NoBallMeasurements {
                x,
                y,
                z,
                theta,
                quick_rejected,
            },
        },
    ))
}

// ── Fielding restriction ───────────────────────────────────────────────────

/// Which overs the restriction applies to and how many fielders may stand
/// outside the ring while it does.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldingRule {
    /// Inclusive over range.
    pub active_overs: (u32, u32),
    pub max_outside: u32,
}

impl Default for FieldingRule {
    fn default() -> Self {
        Self {
            active_overs: (1, 15),
            max_outside: 2,
        }
    }
}

impl FieldingRule {
    pub fn is_active(&self, over: u32) -> bool {
        over >= self.active_overs.0 && over <= self.active_overs.1
    }
}

/// Counts fielders outside the ring at instant `t`. Outside the active
/// overs the count is still reported but the verdict is always compliant.
pub fn check_fielding(
    layout: &GroundLayout,
    rule: &FieldingRule,
    players: &[SensorSample],
    over: u32,
    t: f64,
) -> DecisionEvent {
    let mut outside_by_player = BTreeMap::new();
    let mut count_outside = 0usize;
    for p in players {
        let outside = !layout.ring.contains(p.pos.ground());
        if outside {
            count_outside += 1;
        }
        outside_by_player.insert(p.sensor_id.clone(), outside);
    }
    let count_inside = players.len() - count_outside;
    let rule_active = rule.is_active(over);
    let verdict = if rule_active && count_outside > rule.max_outside as usize {
        FieldingVerdict::Violation
    } else {
        FieldingVerdict::Compliant
    };
    DecisionEvent::new(
        t,
        DecisionBody::FieldingViolation {
            verdict,
            measurements: FieldingMeasurements {
                count_inside,
                count_outside,
                rule_active,
                outside_by_player,
            },
        },
    )
}

// ── Trajectory fitting ─────────────────────────────────────────────────────

/// A fitted ball-flight model over one bounce-free window: height is a
/// parabola in the horizontal arc length `s` along the flight plane,
/// cross-plane drift is a line in `s`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryFit {
    /// Horizontal point the arc length is measured from.
    pub plane_origin: Point2,
    /// Unit horizontal direction of the flight plane.
    pub plane_dir: Vec2,
    /// `(a, b, c)` of `z(s) = a + b s + c s^2`.
    pub coefficients: (f64, f64, f64),
    /// `(p, q)` of `lateral(s) = p + q s`.
    pub lateral: (f64, f64),
    /// Timestamps of the first and last fitted samples.
    pub window: (f64, f64),
    pub n_samples: usize,
    /// Pooled RMS of height and lateral residuals, meters.
    pub rms_residual: f64,
    /// Arc length of the last fitted sample.
    pub s_end: f64,
}

impl TrajectoryFit {
    pub fn height_at(&self, s: f64) -> f64 {
        let (a, b, c) = self.coefficients;
        a + b * s + c * s * s
    }

    pub fn lateral_at(&self, s: f64) -> f64 {
        let (p, q) = self.lateral;
        p + q * s
    }
}

/// Ordinary least squares on the samples of `track` with timestamps inside
/// `window` (inclusive). The flight plane direction is the principal
/// horizontal direction of the windowed samples, oriented along the motion;
/// the solve itself goes through Householder QR.
pub fn fit_trajectory(
    track: &Track,
    window: (f64, f64),
) -> Result<TrajectoryFit, DecisionError> {
    let samples: Vec<&SensorSample> = track
        .samples()
        .iter()
        .filter(|s| s.t >= window.0 && s.t <= window.1)
        .collect();
    let n = samples.len();
    if n < 3 {
        return Err(DecisionError::InsufficientSamples { needed: 3, got: n });
    }

    // Principal horizontal direction from the 2D scatter.
    let mean_x = samples.iter().map(|s| s.pos.x).sum::<f64>() / n as f64;
    let mean_y = samples.iter().map(|s| s.pos.y).sum::<f64>() / n as f64;
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for s in &samples {
        let dx = s.pos.x - mean_x;
        let dy = s.pos.y - mean_y;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    let angle = 0.5 * (2.0 * sxy).atan2(sxx - syy);
    let mut dir = Vec2::new(angle.cos(), angle.sin());
    let first = samples[0].pos.ground();
    let last = samples[n - 1].pos.ground();
    if dir.dot(last - first) < 0.0 {
        dir = dir.scale(-1.0);
    }
    let origin = first;

    let normal = dir.left_normal();
    let mut s_coords = Vec::with_capacity(n);
    let mut heights = Vec::with_capacity(n);
    let mut laterals = Vec::with_capacity(n);
    for sample in &samples {
        let rel = sample.pos.ground() - origin;
        s_coords.push(rel.dot(dir));
        laterals.push(rel.dot(normal));
        heights.push(sample.pos.z);
    }

    let s_min = s_coords.iter().cloned().fold(f64::INFINITY, f64::min);
    let s_max = s_coords.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let spread = s_max - s_min;
    if spread < MIN_FIT_SPREAD {
        return Err(DecisionError::IllConditioned { spread });
    }

    let quad = qr_polyfit(&s_coords, &heights, 2)
        .ok_or(DecisionError::IllConditioned { spread })?;
    let lin = qr_polyfit(&s_coords, &laterals, 1)
        .ok_or(DecisionError::IllConditioned { spread })?;

    let mut sq = 0.0;
    for i in 0..n {
        let rz = heights[i] - (quad[0] + quad[1] * s_coords[i] + quad[2] * s_coords[i] * s_coords[i]);
        let rl = laterals[i] - (lin[0] + lin[1] * s_coords[i]);
        sq += rz * rz + rl * rl;
    }
    let rms_residual = (sq / (2.0 * n as f64)).sqrt();

    Ok(TrajectoryFit {
        plane_origin: origin,
        plane_dir: dir,
        coefficients: (quad[0], quad[1], quad[2]),
        lateral: (lin[0], lin[1]),
        window: (samples[0].t, samples[n - 1].t),
        n_samples: n,
        rms_residual,
        s_end: s_coords[n - 1],
    })
}

/// Least-squares polynomial fit of `values` on `s` via Householder QR.
/// Returns the `degree + 1` coefficients, constant term first.
fn qr_polyfit(s: &[f64], values: &[f64], degree: usize) -> Option<Vec<f64>> {
    let n = s.len();
    let m = degree + 1;
    if n < m {
        return None;
    }
    // Row-major n x m Vandermonde.
    let mut a = vec![0.0f64; n * m];
    for (i, &si) in s.iter().enumerate() {
        let mut pow = 1.0;
        for j in 0..m {
            a[i * m + j] = pow;
            pow *= si;
        }
    }
    let mut y = values.to_vec();

    let mut v = vec![0.0f64; n];
    for k in 0..m {
        let mut norm2 = 0.0;
        for i in k..n {
            norm2 += a[i * m + k] * a[i * m + k];
        }
        let norm = norm2.sqrt();
        if norm == 0.0 {
            return None;
        }
        let alpha = if a[k * m + k] >= 0.0 { -norm } else { norm };
        for i in k..n {
            v[i] = a[i * m + k];
        }
        v[k] -= alpha;
        let vtv: f64 = v[k..n].iter().map(|x| x * x).sum();
        if vtv <= f64::MIN_POSITIVE {
            continue;
        }
        for j in k..m {
            let dot: f64 = (k..n).map(|i| v[i] * a[i * m + j]).sum();
            let f = 2.0 * dot / vtv;
            for i in k..n {
                a[i * m + j] -= f * v[i];
            }
        }
        let dot: f64 = (k..n).map(|i| v[i] * y[i]).sum();
        let f = 2.0 * dot / vtv;
        for i in k..n {
            y[i] -= f * v[i];
        }
    }

    let mut x = vec![0.0f64; m];
    for k in (0..m).rev() {
        let mut acc = y[k];
        for j in (k + 1)..m {
            acc -= a[k * m + j] * x[j];
        }
        let diag = a[k * m + k];
        if diag.abs() < 1e-300 {
            return None;
        }
        x[k] = acc / diag;
    }
    Some(x)
}

// ── Bounce splitting ───────────────────────────────────────────────────────

/// Splits a ball track into maximal bounce-free windows, in time order.
///
/// A bounce is a local height minimum below `2 * ball_radius` where the
/// central-difference vertical velocity flips from negative to positive.
/// The bounce sample itself belongs to neither window.
pub fn bounce_split(
    track: &Track,
    ball_radius: f64,
) -> Result<Vec<(f64, f64)>, DecisionError> {
    let samples = track.samples();
    let n = samples.len();
    if n < 4 {
        return Err(DecisionError::InsufficientSamples { needed: 4, got: n });
    }
    let vz = |i: usize| -> f64 {
        (samples[i + 1].pos.z - samples[i - 1].pos.z) / (samples[i + 1].t - samples[i - 1].t)
    };

    let mut splits: Vec<usize> = Vec::new();
    let mut i = 2;
    while i <= n - 3 {
        let z = samples[i].pos.z;
        if z <= samples[i - 1].pos.z
            && z <= samples[i + 1].pos.z
            && z < 2.0 * ball_radius
            && vz(i - 1) < 0.0
            && vz(i + 1) > 0.0
        {
            splits.push(i);
            i += 2;
        } else {
            i += 1;
        }
    }

    let mut windows = Vec::with_capacity(splits.len() + 1);
    let mut start = 0usize;
    for &split in &splits {
        windows.push((samples[start].t, samples[split - 1].t));
        start = split + 1;
    }
    windows.push((samples[start].t, samples[n - 1].t));
    Ok(windows)
}

// ── Stump projection ───────────────────────────────────────────────────────

/// Extends a fitted flight to the stump plane and decides hitting/missing.
///
/// The plane must lie ahead of the fit origin along the flight direction;
/// a path moving away from the plane never reaches it. (Sensor noise can
/// put the last fitted sample a few millimeters past the plane, so the
/// intercept may fall fractionally inside the window; the fitted curve is
/// simply read there.) A projected height below ground means the ball
/// would have pitched again first and is scored as missing with the
/// `second_bounce` flag set.
pub fn project_to_stumps(
    fit: &TrajectoryFit,
    zone: &StumpZone,
) -> Result<DecisionEvent, DecisionError> {
    let to_plane = zone.plane_x - fit.plane_origin.x;
    if fit.plane_dir.x.abs() < 1e-12 {
        return Err(DecisionError::NeverReaches);
    }
    let s_star = to_plane / fit.plane_dir.x;
    if !s_star.is_finite() || s_star <= 0.0 {
        return Err(DecisionError::NeverReaches);
    }

    let z_star = fit.height_at(s_star);
    let lateral = fit.lateral_at(s_star);
    // Lateral offset is measured along the left normal of the flight
    // direction; convert to a ground y coordinate at the plane.
    let normal = fit.plane_dir.left_normal();
    let intercept_y = fit.plane_origin.y + s_star * fit.plane_dir.y + lateral * normal.y;

    let second_bounce = z_star < 0.0;
    let in_line = (intercept_y - zone.center_y).abs() <= zone.half_width;
    let verdict = if in_line && z_star >= 0.0 && z_star <= zone.top_z {
        LbwVerdict::Hitting
    } else {
        LbwVerdict::Missing
    };

    let (_, b, c) = fit.coefficients;
    let arc_drop_check = if c < 0.0 {
        let slope = b + 2.0 * c * fit.s_end;
        let radius = (1.0 + slope * slope).powf(1.5) / (2.0 * c.abs());
        arc_drop(radius, s_star - fit.s_end).ok()
    } else {
        None
    };

    Ok(DecisionEvent::new(
        fit.window.1,
        DecisionBody::LbwProjection {
            verdict,
            measurements: LbwMeasurements {
                s_star,
                intercept_y,
                intercept_z: z_star,
                coeff_a: fit.coefficients.0,
                coeff_b: fit.coefficients.1,
                coeff_c: fit.coefficients.2,
                lateral_p: fit.lateral.0,
                lateral_q: fit.lateral.1,
                rms_residual: fit.rms_residual,
                n_samples: fit.n_samples,
                window_start: fit.window.0,
                window_end: fit.window.1,
                second_bounce,
                arc_drop_check,
            },
        },
    ))
}

// ── Whole-delivery orchestration ───────────────────────────────────────────

/// The records of one delivery, extracted from a match log: the bowler-foot
/// sample, the ball track, the player samples, and the over context.
#[derive(Debug, Clone, PartialEq)]
pub struct DeliverySlice {
    pub delivery_id: Option<String>,
    pub over: u32,
    pub foot: Option<SensorSample>,
    pub ball: Track,
    pub players: Vec<SensorSample>,
    /// Bat/pad contact instant; the LBW fit only uses samples up to it.
    pub contact_t: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecisionFailure {
    pub kind: DecisionKind,
    pub error: DecisionError,
}

/// Everything one delivery produced: events in timestamp order plus any
/// per-decision failures. A failure in one decision never suppresses the
/// others.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct DeliveryOutcome {
    pub events: Vec<DecisionEvent>,
    pub failures: Vec<DecisionFailure>,
}

impl DeliveryOutcome {
    fn push(&mut self, kind: DecisionKind, result: Result<DecisionEvent, DecisionError>) {
        match result {
            Ok(ev) => self.events.push(ev),
            Err(error) => self.failures.push(DecisionFailure { kind, error }),
        }
    }
}

/// Runs all three decisions over one delivery slice.
///
/// The bowling end is inferred from the ball's direction of travel (the
/// south end when the ball moves toward +x), defaulting to south when there
/// is no ball track.
pub fn decide_delivery(
    layout: &GroundLayout,
    rule: &FieldingRule,
    slice: &DeliverySlice,
) -> DeliveryOutcome {
    let mut out = DeliveryOutcome::default();

    let bowling_end = infer_bowling_end(&slice.ball);
    let frame = layout.crease_frame(bowling_end);

    match &slice.foot {
        Some(foot) => out.push(DecisionKind::NoBall, detect_no_ball(&frame, foot)),
        None => out.push(
            DecisionKind::NoBall,
            Err(DecisionError::MissingInput("no bowler_foot sample")),
        ),
    }

    // Fielding snapshot at the delivery instant: the foot landing, or the
    // earliest player/ball sample when the foot is missing.
    let field_t = slice
        .foot
        .as_ref()
        .map(|f| f.t)
        .or_else(|| slice.players.iter().map(|p| p.t).min_by(f64::total_cmp))
        .or_else(|| slice.ball.samples().first().map(|s| s.t));
    match field_t {
        Some(t) => {
            let at_instant: Vec<SensorSample> = slice
                .players
                .iter()
                .filter(|p| p.kind == SensorKind::Player && p.t == t)
                .cloned()
                .collect();
            out.events
                .push(check_fielding(layout, rule, &at_instant, slice.over, t));
        }
        None => out.push(
            DecisionKind::FieldingViolation,
            Err(DecisionError::MissingInput("no sample fixes the delivery instant")),
        ),
    }

    out.push(DecisionKind::LbwProjection, lbw_projection(layout, slice, bowling_end));

    out.events.sort_by(|a, b| {
        a.t.total_cmp(&b.t).then_with(|| a.kind().cmp(&b.kind()))
    });
    out
}

fn infer_bowling_end(ball: &Track) -> End {
    let samples = ball.samples();
    match (samples.first(), samples.last()) {
        (Some(first), Some(last)) if last.pos.x < first.pos.x => End::North,
        _ => End::South,
    }
}

fn lbw_projection(
    layout: &GroundLayout,
    slice: &DeliverySlice,
    bowling_end: End,
) -> Result<DecisionEvent, DecisionError> {
    let track = match slice.contact_t {
        Some(tc) => {
            let mut truncated = Track::new(slice.ball.sensor_id());
            for s in slice.ball.samples().iter().filter(|s| s.t <= tc) {
                truncated.ingest(s.clone()).expect("in-order subset");
            }
            truncated
        }
        None => slice.ball.clone(),
    };
    let windows = bounce_split(&track, layout.ball_radius)?;
    let last = *windows.last().expect("split always yields a window");
    let fit = fit_trajectory(&track, last)?;
    let zone = layout.stump_zone(bowling_end.opposite());
    project_to_stumps(&fit, &zone)
}
