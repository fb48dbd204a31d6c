//! Scripted delivery simulator: the data-generation tier.
//!
//! Produces ground-truth motion as closed-form piecewise ballistic segments
//! plus the sensor sample log a ground instrumented at `sample_hz` would
//! have recorded, with optional seeded Gaussian noise. The truth side is
//! what acceptance tests compare decisions against.
//!
//! The truth model is drag-free on purpose: the projection model fitted by
//! the decision engine is a parabola, and giving the simulator the same
//! model class keeps fit error separable from model error. Bounces are
//! instantaneous: vertical speed scales by `-restitution` and an optional
//! lateral kick emulates spin at the first bounce.

use crate::config::{self, ParseError};
use crate::geometry::{Point2, Point3, Vec3};
use crate::ground::{End, GroundLayout};
use crate::positioning::{SensorKind, SensorSample};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Gravitational acceleration, m/s^2.
pub const GRAVITY: f64 = 9.81;
/// Post-bounce vertical speeds below this are treated as the ball coming
/// to ground-level rest.
pub const REST_VERTICAL_SPEED: f64 = 0.5;
/// Hard wall-clock cap on simulated time, seconds.
pub const TIME_CAP: f64 = 30.0;

/// Sensor id the simulated ball reports under.
pub const BALL_SENSOR_ID: &str = "ball";
/// Sensor id of the bowler's front-foot sensor.
pub const FOOT_SENSOR_ID: &str = "foot.bowler";

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("invalid scenario: {field}: {reason}")]
    InvalidSpec { field: String, reason: String },
}

fn invalid(field: &str, reason: impl Into<String>) -> SimError {
    SimError::InvalidSpec {
        field: field.to_string(),
        reason: reason.into(),
    }
}

// ── Scenario specs ─────────────────────────────────────────────────────────

/// One scripted delivery.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeliverySpec {
    pub release_pos: Point3,
    pub release_vel: Vec3,
    /// Ratio of post- to pre-bounce vertical speed, in (0, 1].
    pub restitution: f64,
    /// Optional bat or pad contact: at `t` the ball's velocity becomes the
    /// given vector and the flight continues (deflection).
    pub bat_contact: Option<BatContact>,
    /// Where the bowler's front foot lands at the delivery stride.
    pub foot_landing: Point2,
    /// Optional lateral velocity change applied at the first bounce, m/s.
    pub spin_deviation: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BatContact {
    pub t: f64,
    pub new_vel: Vec3,
}

impl DeliverySpec {
    pub fn validate(&self) -> Result<(), SimError> {
        if !self.release_pos.is_finite() || self.release_pos.z <= 0.0 {
            return Err(invalid("release_pos", "must be finite with z > 0"));
        }
        if !self.release_vel.is_finite() || self.release_vel.norm() <= 1.0 {
            return Err(invalid("release_vel", "speed must exceed 1 m/s"));
        }
        if !self.restitution.is_finite() || self.restitution <= 0.0 || self.restitution > 1.0 {
            return Err(invalid("restitution", "must be in (0, 1]"));
        }
        if !self.foot_landing.is_finite() {
            return Err(invalid("foot_landing", "must be finite"));
        }
        if let Some(spin) = self.spin_deviation {
            if !spin.is_finite() {
                return Err(invalid("spin_deviation", "must be finite"));
            }
        }
        if let Some(c) = &self.bat_contact {
            if !c.t.is_finite() || c.t <= 0.0 {
                return Err(invalid("bat_contact", "contact time must be positive"));
            }
            if !c.new_vel.is_finite() {
                return Err(invalid("bat_contact", "contact velocity must be finite"));
            }
        }
        Ok(())
    }
}

/// Static fielder placements for one delivery.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldingSpec {
    /// `(player_id, position)`; a full side posts nine fielders plus the
    /// bowler and keeper, but any count is accepted.
    pub placements: Vec<(String, Point2)>,
    pub over_number: u32,
}

impl FieldingSpec {
    pub fn validate(&self) -> Result<(), SimError> {
        for i in 0..self.placements.len() {
            for j in (i + 1)..self.placements.len() {
                if self.placements[i].0 == self.placements[j].0 {
                    return Err(invalid(
                        "placements",
                        format!("duplicate player id `{}`", self.placements[i].0),
                    ));
                }
            }
        }
        if self.over_number == 0 {
            return Err(invalid("over", "over numbers start at 1"));
        }
        for (id, p) in &self.placements {
            if !p.is_finite() {
                return Err(invalid("placements", format!("`{id}` is not finite")));
            }
        }
        Ok(())
    }
}

// ── Ground truth ───────────────────────────────────────────────────────────

/// One drag-free ballistic arc: from `t0` the ball moves with constant
/// horizontal velocity while `z(t) = z0 + vz (t - t0) - g/2 (t - t0)^2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FlightSegment {
    pub t0: f64,
    pub t1: f64,
    pub pos0: Point3,
    pub vel0: Vec3,
}

impl FlightSegment {
    pub fn position_at(&self, t: f64) -> Point3 {
        let dt = t - self.t0;
        Point3::new(
            self.pos0.x + self.vel0.x * dt,
            self.pos0.y + self.vel0.y * dt,
            self.pos0.z + self.vel0.z * dt - 0.5 * GRAVITY * dt * dt,
        )
    }

    pub fn velocity_at(&self, t: f64) -> Vec3 {
        Vec3::new(self.vel0.x, self.vel0.y, self.vel0.z - GRAVITY * (t - self.t0))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BounceEvent {
    pub t: f64,
    pub pos: Point3,
    pub pre_vz: f64,
    pub post_vz: f64,
}

/// Where the extrapolated final pre-contact arc meets the stump plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlaneIntercept {
    pub t: f64,
    pub pos: Point3,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EndReason {
    /// Ball reached the striker's stump plane.
    StumpPlane,
    /// Post-bounce vertical speed fell below [`REST_VERTICAL_SPEED`].
    GroundRest,
    /// Ball crossed the field boundary.
    Boundary,
    /// Simulation hit [`TIME_CAP`].
    TimeCap,
}

/// Closed-form record of everything the simulated ball actually did.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioTruth {
    pub segments: Vec<FlightSegment>,
    pub bounces: Vec<BounceEvent>,
    /// Stump-plane crossing of the extrapolated last pre-contact arc; `None`
    /// when that arc never moves toward the plane.
    pub stump_intercept: Option<PlaneIntercept>,
    /// The end whose stumps the delivery travels toward.
    pub target_end: End,
    /// Applied bat/pad contact, if the ball was still in flight at its time.
    pub contact: Option<(f64, Point3)>,
    pub foot_landing: Point2,
    pub end_t: f64,
    pub end_reason: EndReason,
}

impl ScenarioTruth {
    /// Exact ball position at `t`, if the ball was in flight.
    pub fn position_at(&self, t: f64) -> Option<Point3> {
        self.segments
            .iter()
            .find(|s| t >= s.t0 && t <= s.t1)
            .map(|s| s.position_at(t))
    }

    /// Mean speed (arc length over duration) between `t0` and `t1`,
    /// integrated segment-by-segment with Simpson's rule.
    pub fn mean_speed(&self, t0: f64, t1: f64) -> f64 {
        if t1 <= t0 {
            return 0.0;
        }
        let mut arc = 0.0;
        for seg in &self.segments {
            let a = seg.t0.max(t0);
            let b = seg.t1.min(t1);
            if b <= a {
                continue;
            }
            let n = 2000;
            let h = (b - a) / n as f64;
            let speed = |t: f64| seg.velocity_at(t).norm();
            let mut sum = speed(a) + speed(b);
            for k in 1..n {
                let w = if k % 2 == 1 { 4.0 } else { 2.0 };
                sum += w * speed(a + k as f64 * h);
            }
            arc += sum * h / 3.0;
        }
        arc / (t1 - t0)
    }

    /// Truth verdict for the LBW question: would the extrapolated arc pass
    /// within the given stump zone at a playable height?
    pub fn would_hit_stumps(&self, zone: &crate::ground::StumpZone) -> bool {
        match &self.stump_intercept {
            Some(hit) => {
                (hit.pos.y - zone.center_y).abs() <= zone.half_width
                    && hit.pos.z >= 0.0
                    && hit.pos.z <= zone.top_z
            }
            None => false,
        }
    }
}

// ── Delivery simulation ────────────────────────────────────────────────────

/// Simulates one delivery: piecewise projectile motion with instantaneous
/// bounces, sampled at `sample_hz` with optional per-axis Gaussian noise
/// drawn from a generator seeded with `seed`. Emits the ball samples plus
/// one bowler-foot sample at the delivery stride instant (t = 0).
///
/// Ball samples stop at the stump-plane crossing, ground-level rest, the
/// field boundary, or the time cap; a bat contact redirects the flight and
/// sampling continues. With `noise_sigma = 0` the output is independent of
/// `seed`; with the same `(spec, sample_hz, seed, noise_sigma)` the output
/// is identical run to run.
pub fn simulate_delivery(
    layout: &GroundLayout,
    spec: &DeliverySpec,
    sample_hz: f64,
    seed: u64,
    noise_sigma: f64,
) -> Result<(ScenarioTruth, Vec<SensorSample>), SimError> {
    spec.validate()?;
    if !(10.0..=1000.0).contains(&sample_hz) {
        return Err(invalid("sample_hz", "must be within [10, 1000] Hz"));
    }
    if !noise_sigma.is_finite() || noise_sigma < 0.0 {
        return Err(invalid("noise_sigma", "must be a non-negative length"));
    }

    let truth = integrate_truth(layout, spec);
    let mut samples = sample_truth(&truth, sample_hz, seed, noise_sigma, spec);
    samples.sort_by(|a, b| {
        a.t.total_cmp(&b.t)
            .then_with(|| a.sensor_id.cmp(&b.sensor_id))
    });
    Ok((truth, samples))
}

fn integrate_truth(layout: &GroundLayout, spec: &DeliverySpec) -> ScenarioTruth {
    let target_end = if spec.release_vel.x >= 0.0 {
        End::North
    } else {
        End::South
    };
    let plane_x = layout.stump_line_x(target_end);
    let ball_r = layout.ball_radius;

    let mut segments: Vec<FlightSegment> = Vec::new();
    let mut bounces: Vec<BounceEvent> = Vec::new();
    let mut contact_applied: Option<(f64, Point3)> = None;
    let mut pre_contact_segment: Option<FlightSegment> = None;

    let mut t = 0.0;
    let mut pos = spec.release_pos;
    let mut vel = spec.release_vel;
    let mut pending_contact = spec.bat_contact;
    let mut spin_pending = spec.spin_deviation;
    let (end_t, end_reason) = loop {
        #[derive(Clone, Copy, PartialEq)]
        enum Event {
            Plane,
            Bounce,
            Contact,
            Boundary,
            Cap,
        }
        let mut best: (f64, Event) = (TIME_CAP - t, Event::Cap);
        let mut consider = |dt: f64, ev: Event| {
            if dt > 1e-12 && dt < best.0 {
                best = (dt, ev);
            }
        };

        // Stump-plane crossing is only an end condition before any contact.
        if contact_applied.is_none() {
            let to_plane = plane_x - pos.x;
            if to_plane * vel.x > 0.0 {
                consider(to_plane / vel.x, Event::Plane);
            }
        }
        // Bounce: z falls to the ball radius.
        if pos.z > ball_r || vel.z > 0.0 {
            let disc = vel.z * vel.z + 2.0 * GRAVITY * (pos.z - ball_r);
            if disc >= 0.0 {
                consider((vel.z + disc.sqrt()) / GRAVITY, Event::Bounce);
            }
        }
        if let Some(c) = &pending_contact {
            consider(c.t - t, Event::Contact);
        }
        // Boundary exit of the horizontal path.
        let a = vel.x * vel.x + vel.y * vel.y;
        let b = 2.0 * (pos.x * vel.x + pos.y * vel.y);
        let c = pos.x * pos.x + pos.y * pos.y - layout.boundary_radius * layout.boundary_radius;
        if c < 0.0 && a > 0.0 {
            let disc = b * b - 4.0 * a * c;
            if disc > 0.0 {
                consider((-b + disc.sqrt()) / (2.0 * a), Event::Boundary);
            }
        }

        let (dt, event) = best;
        let seg = FlightSegment {
            t0: t,
            t1: t + dt,
            pos0: pos,
            vel0: vel,
        };
        segments.push(seg);
        let new_pos = seg.position_at(seg.t1);
        let new_vel = seg.velocity_at(seg.t1);
        t = seg.t1;
        pos = new_pos;
        vel = new_vel;

        match event {
            Event::Plane => break (t, EndReason::StumpPlane),
            Event::Cap => break (t, EndReason::TimeCap),
            Event::Boundary => break (t, EndReason::Boundary),
            Event::Contact => {
                pre_contact_segment = Some(seg);
                contact_applied = Some((t, pos));
                vel = pending_contact.take().map(|c| c.new_vel).unwrap_or(vel);
            }
            Event::Bounce => {
                let pre_vz = vel.z;
                pos.z = ball_r;
                vel.z = -spec.restitution * pre_vz;
                if let Some(spin) = spin_pending.take() {
                    vel.y += spin;
                }
                bounces.push(BounceEvent {
                    t,
                    pos,
                    pre_vz,
                    post_vz: vel.z,
                });
                if vel.z < REST_VERTICAL_SPEED {
                    break (t, EndReason::GroundRest);
                }
            }
        }
    };

    // The LBW-relevant arc: the one in flight just before contact, or the
    // final arc of an uncontacted delivery.
    let lbw_segment = pre_contact_segment.or_else(|| segments.last().copied());
    let stump_intercept = lbw_segment.and_then(|seg| {
        let to_plane = plane_x - seg.pos0.x;
        if to_plane * seg.vel0.x <= 0.0 {
            return None;
        }
        let dt = to_plane / seg.vel0.x;
        Some(PlaneIntercept {
            t: seg.t0 + dt,
            pos: seg.position_at(seg.t0 + dt),
        })
    });

    ScenarioTruth {
        segments,
        bounces,
        stump_intercept,
        target_end,
        contact: contact_applied,
        foot_landing: spec.foot_landing,
        end_t,
        end_reason,
    }
}

fn sample_truth(
    truth: &ScenarioTruth,
    sample_hz: f64,
    seed: u64,
    noise_sigma: f64,
    spec: &DeliverySpec,
) -> Vec<SensorSample> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let normal = (noise_sigma > 0.0).then(|| Normal::new(0.0, noise_sigma).expect("finite sigma"));
    let draw = |rng: &mut ChaCha8Rng| normal.map(|n| n.sample(rng)).unwrap_or(0.0);

    let mut samples = Vec::new();
    let mut seg_idx = 0;
    let mut k: u64 = 0;
    loop {
        let t = k as f64 / sample_hz;
        let within = match truth.end_reason {
            EndReason::StumpPlane => t < truth.end_t,
            _ => t <= truth.end_t + 1e-12,
        };
        if !within {
            break;
        }
        while seg_idx + 1 < truth.segments.len() && t > truth.segments[seg_idx].t1 {
            seg_idx += 1;
        }
        let pos = truth.segments[seg_idx].position_at(t);
        let noisy = Point3::new(
            pos.x + draw(&mut rng),
            pos.y + draw(&mut rng),
            (pos.z + draw(&mut rng)).max(0.0),
        );
        samples.push(SensorSample::new(
            t,
            BALL_SENSOR_ID,
            SensorKind::Ball,
            noisy,
        ));
        k += 1;
    }

    let foot = Point3::new(
        spec.foot_landing.x + draw(&mut rng),
        spec.foot_landing.y + draw(&mut rng),
        0.0,
    );
    samples.push(SensorSample::new(
        0.0,
        FOOT_SENSOR_ID,
        SensorKind::BowlerFoot,
        foot,
    ));
    samples
}

/// One static player sample per placement at time `t`, z = 0, no noise.
pub fn simulate_fielding(
    _layout: &GroundLayout,
    spec: &FieldingSpec,
    t: f64,
) -> Result<Vec<SensorSample>, SimError> {
    spec.validate()?;
    Ok(spec
        .placements
        .iter()
        .map(|(id, p)| {
            SensorSample::new(
                t,
                format!("player.{id}"),
                SensorKind::Player,
                Point3::new(p.x, p.y, 0.0),
            )
        })
        .collect())
}

// ── Scenario configuration ─────────────────────────────────────────────────

/// Parses a scenario document (same grammar family as the layout config).
///
/// `release_pos` and `release_vel` are required; everything else defaults:
/// restitution 0.7, foot landing (-8.9, 0), over 1, no spin, no contact, no
/// fielders.
pub fn scenario_from_config(config_text: &str) -> Result<(DeliverySpec, FieldingSpec), SimError> {
    let entries = config::parse_document(config_text)?;
    let mut release_pos: Option<Point3> = None;
    let mut release_vel: Option<Vec3> = None;
    let mut delivery = DeliverySpec {
        release_pos: Point3::new(0.0, 0.0, 0.0),
        release_vel: Vec3::new(0.0, 0.0, 0.0),
        restitution: 0.7,
        bat_contact: None,
        foot_landing: Point2::new(-8.9, 0.0),
        spin_deviation: None,
    };
    let mut fielding = FieldingSpec {
        placements: Vec::new(),
        over_number: 1,
    };

    for entry in &entries {
        match entry.key.as_str() {
            "release_pos" => {
                let t = entry.tuple(3)?;
                release_pos = Some(Point3::new(t[0], t[1], t[2]));
            }
            "release_vel" => {
                let t = entry.tuple(3)?;
                release_vel = Some(Vec3::new(t[0], t[1], t[2]));
            }
            "restitution" => delivery.restitution = entry.number()?,
            "spin_deviation" => delivery.spin_deviation = Some(entry.number()?),
            "foot_landing" => {
                let t = entry.tuple(2)?;
                delivery.foot_landing = Point2::new(t[0], t[1]);
            }
            "bat_contact" => {
                let t = entry.tuple(4)?;
                delivery.bat_contact = Some(BatContact {
                    t: t[0],
                    new_vel: Vec3::new(t[1], t[2], t[3]),
                });
            }
            "over" => {
                let v = entry.number()?;
                if v.fract() != 0.0 || v < 0.0 || v > u32::MAX as f64 {
                    return Err(invalid("over", "must be a positive integer"));
                }
                fielding.over_number = v as u32;
            }
            key => match key.strip_prefix("fielder.") {
                Some(id) if !id.is_empty() => {
                    let t = entry.tuple(2)?;
                    fielding
                        .placements
                        .push((id.to_string(), Point2::new(t[0], t[1])));
                }
                _ => {
                    return Err(ParseError::new(
                        entry.line,
                        format!("unknown scenario key `{key}`"),
                    )
                    .into())
                }
            },
        }
    }

    delivery.release_pos =
        release_pos.ok_or_else(|| invalid("release_pos", "required key is missing"))?;
    delivery.release_vel =
        release_vel.ok_or_else(|| invalid("release_vel", "required key is missing"))?;
    fielding.placements.sort_by(|a, b| a.0.cmp(&b.0));
    delivery.validate()?;
    fielding.validate()?;
    Ok((delivery, fielding))
}

/// Canonical document form; parsing it back reproduces both specs exactly.
pub fn scenario_to_config(delivery: &DeliverySpec, fielding: &FieldingSpec) -> String {
    let num = config::format_number;
    let mut out = String::new();
    out.push_str(&format!(
        "release_pos = {},{},{}\n",
        num(delivery.release_pos.x),
        num(delivery.release_pos.y),
        num(delivery.release_pos.z)
    ));
    out.push_str(&format!(
        "release_vel = {},{},{}\n",
        num(delivery.release_vel.x),
        num(delivery.release_vel.y),
        num(delivery.release_vel.z)
    ));
    out.push_str(&format!("restitution = {}\n", num(delivery.restitution)));
    out.push_str(&format!(
        "foot_landing = {},{}\n",
        num(delivery.foot_landing.x),
        num(delivery.foot_landing.y)
    ));
    if let Some(spin) = delivery.spin_deviation {
        out.push_str(&format!("spin_deviation = {}\n", num(spin)));
    }
    if let Some(c) = &delivery.bat_contact {
        out.push_str(&format!(
            "bat_contact = {},{},{},{}\n",
            num(c.t),
            num(c.new_vel.x),
            num(c.new_vel.y),
            num(c.new_vel.z)
        ));
    }
    out.push_str(&format!("over = {}\n", fielding.over_number));
    let mut placements = fielding.placements.clone();
    placements.sort_by(|a, b| a.0.cmp(&b.0));
    for (id, p) in placements {
        out.push_str(&format!("fielder.{id} = {},{}\n", num(p.x), num(p.y)));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ground::default_layout;

    fn full_toss_spec() -> DeliverySpec {
        // Fast and flat: reaches the stump plane at 0.23 m without pitching.
        DeliverySpec {
            release_pos: Point3::new(-9.2, 0.0, 1.9),
            release_vel: Vec3::new(36.0, 0.0, -0.5),
            restitution: 0.7,
            bat_contact: None,
            foot_landing: Point2::new(-8.9, 0.05),
            spin_deviation: None,
        }
    }

    fn bouncing_spec() -> DeliverySpec {
        DeliverySpec {
            release_pos: Point3::new(-9.2, 0.1, 2.0),
            release_vel: Vec3::new(32.0, -0.3, -3.0),
            restitution: 0.7,
            bat_contact: None,
            foot_landing: Point2::new(-8.9, 0.05),
            spin_deviation: None,
        }
    }

    #[test]
    fn full_toss_samples_follow_the_closed_form() {
        let layout = default_layout();
        let spec = full_toss_spec();
        let (truth, samples) = simulate_delivery(&layout, &spec, 100.0, 0, 0.0).unwrap();
        assert_eq!(truth.end_reason, EndReason::StumpPlane);
        assert!(truth.bounces.is_empty(), "full toss must not bounce");
        for s in samples.iter().filter(|s| s.kind == SensorKind::Ball) {
            let dt = s.t;
            let expect = Point3::new(
                spec.release_pos.x + spec.release_vel.x * dt,
                spec.release_pos.y + spec.release_vel.y * dt,
                spec.release_pos.z + spec.release_vel.z * dt - 0.5 * GRAVITY * dt * dt,
            );
            assert!((s.pos.x - expect.x).abs() < 1e-9);
            assert!((s.pos.y - expect.y).abs() < 1e-9);
            assert!((s.pos.z - expect.z).abs() < 1e-9);
        }
    }

    #[test]
    fn identical_inputs_give_identical_logs() {
        let layout = default_layout();
        let spec = bouncing_spec();
        let (_, a) = simulate_delivery(&layout, &spec, 100.0, 42, 0.005).unwrap();
        let (_, b) = simulate_delivery(&layout, &spec, 100.0, 42, 0.005).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn zero_velocity_is_rejected_by_field() {
        let layout = default_layout();
        let mut spec = full_toss_spec();
        spec.release_vel = Vec3::new(0.0, 0.0, 0.0);
        match simulate_delivery(&layout, &spec, 100.0, 0, 0.0).unwrap_err() {
            SimError::InvalidSpec { field, .. } => assert_eq!(field, "release_vel"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn out_of_range_sample_rate_is_rejected() {
        let layout = default_layout();
        assert!(simulate_delivery(&layout, &full_toss_spec(), 5.0, 0, 0.0).is_err());
        assert!(simulate_delivery(&layout, &full_toss_spec(), 2000.0, 0, 0.0).is_err());
    }

    #[test]
    fn horizontal_velocity_is_constant_between_bounces() {
        let layout = default_layout();
        let (_, samples) = simulate_delivery(&layout, &bouncing_spec(), 100.0, 0, 0.0).unwrap();
        let ball: Vec<&SensorSample> = samples
            .iter()
            .filter(|s| s.kind == SensorKind::Ball)
            .collect();
        let (truth, _) = simulate_delivery(&layout, &bouncing_spec(), 100.0, 0, 0.0).unwrap();
        let bounce_t = truth.bounces.first().map(|b| b.t).unwrap_or(f64::MAX);
        for w in ball.windows(2) {
            // Skip the pair straddling the bounce.
            if w[0].t < bounce_t && w[1].t > bounce_t {
                continue;
            }
            let dt = w[1].t - w[0].t;
            let vx = (w[1].pos.x - w[0].pos.x) / dt;
            let vy = (w[1].pos.y - w[0].pos.y) / dt;
            assert!((vx - 32.0).abs() < 1e-9, "vx {vx}");
            assert!((vy - -0.3).abs() < 1e-9, "vy {vy}");
        }
    }

    #[test]
    fn bounce_scales_vertical_speed_by_restitution() {
        let layout = default_layout();
        let (truth, _) = simulate_delivery(&layout, &bouncing_spec(), 100.0, 0, 0.0).unwrap();
        assert_eq!(truth.bounces.len(), 1);
        let b = &truth.bounces[0];
        assert!((b.post_vz - 0.7 * b.pre_vz.abs()).abs() < 1e-9);
    }

    #[test]
    fn spin_kick_applies_at_first_bounce() {
        let layout = default_layout();
        let mut spec = bouncing_spec();
        spec.spin_deviation = Some(1.5);
        let (truth, _) = simulate_delivery(&layout, &spec, 100.0, 0, 0.0).unwrap();
        let post = truth
            .segments
            .iter()
            .find(|s| s.t0 >= truth.bounces[0].t - 1e-12)
            .unwrap();
        assert!((post.vel0.y - (-0.3 + 1.5)).abs() < 1e-9);
    }

    #[test]
    fn noise_statistics_match_sigma() {
        let layout = default_layout();
        let sigma = 0.005;
        let mut residuals_per_axis: [Vec<f64>; 3] = [Vec::new(), Vec::new(), Vec::new()];
        let mut seed = 0u64;
        while residuals_per_axis[0].len() < 10_000 {
            let (truth, samples) =
                simulate_delivery(&layout, &bouncing_spec(), 100.0, seed, sigma).unwrap();
            for s in samples.iter().filter(|s| s.kind == SensorKind::Ball) {
                let p = truth.position_at(s.t).unwrap();
                // Stay away from the ground so the z >= 0 clamp is inert.
                if p.z < 0.1 {
                    continue;
                }
                residuals_per_axis[0].push(s.pos.x - p.x);
                residuals_per_axis[1].push(s.pos.y - p.y);
                residuals_per_axis[2].push(s.pos.z - p.z);
            }
            seed += 1;
        }
        for axis in &residuals_per_axis {
            let n = axis.len() as f64;
            let mean = axis.iter().sum::<f64>() / n;
            let var = axis.iter().map(|r| (r - mean).powi(2)).sum::<f64>() / n;
            let sd = var.sqrt();
            assert!(
                (0.9 * sigma..=1.1 * sigma).contains(&sd),
                "axis sd {sd} vs sigma {sigma}"
            );
        }
    }

    #[test]
    fn seeds_matter_only_with_noise() {
        let layout = default_layout();
        let spec = bouncing_spec();
        let (_, a) = simulate_delivery(&layout, &spec, 100.0, 1, 0.005).unwrap();
        let (_, b) = simulate_delivery(&layout, &spec, 100.0, 2, 0.005).unwrap();
        assert_ne!(a, b);
        let (_, c) = simulate_delivery(&layout, &spec, 100.0, 1, 0.0).unwrap();
        let (_, d) = simulate_delivery(&layout, &spec, 100.0, 2, 0.0).unwrap();
        assert_eq!(c, d);
    }

    #[test]
    fn bat_contact_redirects_the_flight() {
        let layout = default_layout();
        let mut spec = full_toss_spec();
        spec.bat_contact = Some(BatContact {
            t: 0.3,
            new_vel: Vec3::new(-5.0, 20.0, 8.0),
        });
        let (truth, samples) = simulate_delivery(&layout, &spec, 100.0, 0, 0.0).unwrap();
        let (contact_t, contact_pos) = truth.contact.unwrap();
        assert!((contact_t - 0.3).abs() < 1e-12);
        // The pre-contact intercept is still reported for the LBW question.
        let intercept = truth.stump_intercept.unwrap();
        assert!(intercept.t > 0.3);
        assert!((intercept.pos.x - layout.stump_line_x(End::North)).abs() < 1e-9);
        // Post-contact samples move along the new velocity.
        let after: Vec<&SensorSample> = samples
            .iter()
            .filter(|s| s.kind == SensorKind::Ball && s.t > 0.3)
            .collect();
        assert!(after.len() >= 2);
        let dt = after[1].t - after[0].t;
        assert!(((after[1].pos.y - after[0].pos.y) / dt - 20.0).abs() < 1e-9);
        assert!(contact_pos.x < layout.stump_line_x(End::North));
    }

    #[test]
    fn foot_sample_lands_at_the_stride_instant() {
        let layout = default_layout();
        let (_, samples) = simulate_delivery(&layout, &full_toss_spec(), 100.0, 0, 0.0).unwrap();
        let foot: Vec<&SensorSample> = samples
            .iter()
            .filter(|s| s.kind == SensorKind::BowlerFoot)
            .collect();
        assert_eq!(foot.len(), 1);
        assert_eq!(foot[0].t, 0.0);
        assert_eq!(foot[0].pos.z, 0.0);
        assert_eq!(foot[0].pos.ground(), Point2::new(-8.9, 0.05));
    }

    #[test]
    fn fielding_snapshot_passes_placements_through() {
        let layout = default_layout();
        let spec = FieldingSpec {
            placements: (1..=9)
                .map(|i| (format!("{i}"), Point2::new(i as f64 * 3.0, -i as f64)))
                .collect(),
            over_number: 3,
        };
        let samples = simulate_fielding(&layout, &spec, 0.0).unwrap();
        assert_eq!(samples.len(), 9);
        for (s, (id, p)) in samples.iter().zip(&spec.placements) {
            assert_eq!(s.sensor_id, format!("player.{id}"));
            assert_eq!(s.pos.ground(), *p);
            assert_eq!(s.pos.z, 0.0);
            assert_eq!(s.kind, SensorKind::Player);
        }
    }

    #[test]
    fn duplicate_player_ids_are_rejected() {
        let layout = default_layout();
        let spec = FieldingSpec {
            placements: vec![
                ("a".into(), Point2::new(0.0, 0.0)),
                ("a".into(), Point2::new(1.0, 1.0)),
            ],
            over_number: 1,
        };
        assert!(simulate_fielding(&layout, &spec, 0.0).is_err());
    }

    #[test]
    fn empty_placements_give_an_empty_snapshot() {
        let layout = default_layout();
        let spec = FieldingSpec {
            placements: vec![],
            over_number: 1,
        };
        assert!(simulate_fielding(&layout, &spec, 0.0).unwrap().is_empty());
    }

    #[test]
    fn minimal_scenario_fills_documented_defaults() {
        let (delivery, fielding) =
            scenario_from_config("release_pos = -9.2,0,2.0\nrelease_vel = 31,0,-2\n").unwrap();
        assert_eq!(delivery.restitution, 0.7);
        assert_eq!(delivery.foot_landing, Point2::new(-8.9, 0.0));
        assert_eq!(delivery.bat_contact, None);
        assert_eq!(delivery.spin_deviation, None);
        assert_eq!(fielding.over_number, 1);
        assert!(fielding.placements.is_empty());
    }

    #[test]
    fn out_of_range_restitution_is_rejected() {
        let doc = "release_pos = -9.2,0,2.0\nrelease_vel = 31,0,-2\nrestitution = 1.5\n";
        match scenario_from_config(doc).unwrap_err() {
            SimError::InvalidSpec { field, .. } => assert_eq!(field, "restitution"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn scenario_round_trip_is_exact() {
        let doc = "release_pos = -9.21,0.07,2.03\nrelease_vel = 33.5,-0.4,-2.2\n\
                   restitution = 0.64\nspin_deviation = 0.8\nbat_contact = 0.61,-4,18,6\n\
                   foot_landing = -8.87,0.11\nover = 7\nfielder.mid_on = 20,8\nfielder.slip = 11.4,-2\n";
        let (delivery, fielding) = scenario_from_config(doc).unwrap();
        let (d2, f2) = scenario_from_config(&scenario_to_config(&delivery, &fielding)).unwrap();
        assert_eq!(delivery, d2);
        assert_eq!(fielding, f2);
    }

    #[test]
    fn missing_release_keys_are_named() {
        match scenario_from_config("restitution = 0.7\n").unwrap_err() {
            SimError::InvalidSpec { field, .. } => assert_eq!(field, "release_pos"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn truth_mean_speed_matches_uniform_motion() {
        let layout = default_layout();
        let mut spec = full_toss_spec();
        // Shallow fast delivery: speed is dominated by the constant vx.
        spec.release_vel = Vec3::new(20.0, 0.0, 0.0);
        spec.release_pos = Point3::new(-9.2, 0.0, 8.0);
        let (truth, _) = simulate_delivery(&layout, &spec, 100.0, 0, 0.0).unwrap();
        let speed = truth.mean_speed(0.0, 0.2);
        assert!((speed - 20.0).abs() < 0.05, "speed {speed}");
    }
}
