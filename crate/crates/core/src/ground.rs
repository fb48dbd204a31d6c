//! Dimensional model of the instrumented ground.
//!
//! One coordinate frame for everything: origin at the pitch center,
//! +x toward the striker's end for a delivery bowled from the south end,
//! +y to that bowler's left, +z up. The two stump lines sit at
//! `x = ±pitch_length / 2`; the popping creases sit `popping_crease_offset`
//! in front of each stump line, toward the pitch center.
//!
//! All physical constants live here and are overridable through the layout
//! configuration document; nothing else in the crate hard-codes a dimension.

use crate::config::{self, ParseError};
use crate::geometry::{distance, OrientedLine2, Point2, StadiumShape, Vec2};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LayoutError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    /// A structurally valid document producing a physically invalid layout.
    #[error("invalid layout: {field}: {reason}")]
    InvalidLayout { field: String, reason: String },
}

fn invalid(field: &str, reason: impl Into<String>) -> LayoutError {
    LayoutError::InvalidLayout {
        field: field.to_string(),
        reason: reason.into(),
    }
}

/// The two ends of the pitch, named by the sign of their stump-line x
/// coordinate. An `End` value always denotes the bowling end: the end whose
/// popping crease the bowler's front foot is checked against.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum End {
    /// Stump line at `x = +pitch_length / 2`.
    North,
    /// Stump line at `x = -pitch_length / 2`.
    South,
}

impl End {
    pub fn opposite(self) -> End {
        match self {
            End::North => End::South,
            End::South => End::North,
        }
    }

    fn sign(self) -> f64 {
        match self {
            End::North => 1.0,
            End::South => -1.0,
        }
    }
}

// ── Layout ─────────────────────────────────────────────────────────────────

/// Creases, stumps, fielding ring, boundary, and access-point placement.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroundLayout {
    /// Stump line to stump line, meters.
    pub pitch_length: f64,
    /// Popping crease in front of each stump line, meters.
    pub popping_crease_offset: f64,
    /// Overall width of the three stumps, meters.
    pub stump_zone_width: f64,
    /// Height of the stumps, meters.
    pub stump_zone_height: f64,
    /// Ball radius, meters (tracking is center-of-ball).
    pub ball_radius: f64,
    /// The fielding-restriction ring.
    pub ring: StadiumShape,
    /// Playing-field boundary radius from the pitch center, meters.
    pub boundary_radius: f64,
    /// Ranging anchors: `(id, position)`, sorted by id.
    pub access_points: Vec<(String, Point2)>,
}

impl Default for GroundLayout {
    fn default() -> Self {
        default_layout()
    }
}

/// The documented defaults: 20.12 m pitch, 1.22 m crease offset, 0.2286 m
/// stump width, 0.711 m stump height, 0.036 m ball radius, 27.43 m ring
/// about the stump-line centers, 70 m boundary, and four access points on
/// the corners of a 140 m square.
pub fn default_layout() -> GroundLayout {
    let half_pitch = 20.12 / 2.0;
    GroundLayout {
        pitch_length: 20.12,
        popping_crease_offset: 1.22,
        stump_zone_width: 0.2286,
        stump_zone_height: 0.711,
        ball_radius: 0.036,
        ring: StadiumShape::new(
            Point2::new(-half_pitch, 0.0),
            Point2::new(half_pitch, 0.0),
            27.43,
        ),
        boundary_radius: 70.0,
        access_points: vec![
            ("ne".to_string(), Point2::new(70.0, 70.0)),
            ("nw".to_string(), Point2::new(70.0, -70.0)),
            ("se".to_string(), Point2::new(-70.0, 70.0)),
            ("sw".to_string(), Point2::new(-70.0, -70.0)),
        ],
    }
}

impl GroundLayout {
    /// Checks every layout invariant, naming the first violated field.
    pub fn validate(&self) -> Result<(), LayoutError> {
        let lengths = [
            ("pitch_length", self.pitch_length),
            ("popping_crease_offset", self.popping_crease_offset),
            ("stump_zone_width", self.stump_zone_width),
            ("stump_zone_height", self.stump_zone_height),
            ("ball_radius", self.ball_radius),
            ("ring_radius", self.ring.radius),
            ("boundary_radius", self.boundary_radius),
        ];
        for (field, v) in lengths {
            if !(v.is_finite() && v > 0.0) {
                return Err(invalid(field, format!("must be a positive length, got {v}")));
            }
        }
        if self.popping_crease_offset >= self.pitch_length / 2.0 {
            return Err(invalid(
                "popping_crease_offset",
                "must be less than half the pitch length",
            ));
        }
        if !self.ring.focus_a.is_finite() || !self.ring.focus_b.is_finite() {
            return Err(invalid("ring", "foci must be finite"));
        }
        if self.access_points.len() < 3 {
            return Err(invalid("access_points", "need at least 3 access points"));
        }
        for (id, p) in &self.access_points {
            if !p.is_finite() {
                return Err(invalid("access_points", format!("`{id}` is not finite")));
            }
        }
        for i in 0..self.access_points.len() {
            for j in (i + 1)..self.access_points.len() {
                let (ida, a) = &self.access_points[i];
                let (idb, b) = &self.access_points[j];
                if distance(*a, *b) <= 1.0 {
                    return Err(invalid(
                        "access_points",
                        format!("`{ida}` and `{idb}` are within 1 m of each other"),
                    ));
                }
            }
        }
        if max_triple_area(&self.access_points) <= 1e-6 {
            return Err(invalid("access_points", "access points are collinear"));
        }
        Ok(())
    }

    /// x coordinate of an end's stump line.
    pub fn stump_line_x(&self, end: End) -> f64 {
        end.sign() * self.pitch_length / 2.0
    }

    /// x coordinate of an end's popping crease (toward the pitch center).
    pub fn popping_crease_x(&self, end: End) -> f64 {
        end.sign() * (self.pitch_length / 2.0 - self.popping_crease_offset)
    }

    /// The fixed sensor frame used for no-ball detection at the given
    /// bowling end. Anchor A sits on the popping crease at the pitch
    /// centerline; anchor B sits one crease offset directly behind it, on
    /// the stump line. The crease line is oriented so the striker's side is
    /// the positive side.
    pub fn crease_frame(&self, end: End) -> CreaseFrame {
        let anchor_a = Point2::new(self.popping_crease_x(end), 0.0);
        let anchor_b = Point2::new(self.stump_line_x(end), 0.0);
        // Direction (0, sign) puts the pitch-center side of the crease on
        // the left, i.e. at positive signed distance.
        let crease_line = OrientedLine2::new(anchor_a, Vec2::new(0.0, end.sign()))
            .expect("unit axis direction");
        CreaseFrame {
            crease_line,
            anchor_a,
            anchor_b,
        }
    }

    /// The stump-plane target at the given end, widened once by the ball
    /// radius so that "any part of the ball would hit" holds for
    /// center-of-ball tracks.
    pub fn stump_zone(&self, end: End) -> StumpZone {
        StumpZone {
            plane_x: self.stump_line_x(end),
            center_y: 0.0,
            half_width: self.stump_zone_width / 2.0 + self.ball_radius,
            top_z: self.stump_zone_height + self.ball_radius,
        }
    }

    pub fn access_point(&self, id: &str) -> Option<Point2> {
        self.access_points
            .iter()
            .find(|(apid, _)| apid == id)
            .map(|(_, p)| *p)
    }

    /// Canonical configuration-document form; reloading it reproduces the
    /// layout exactly, field for field.
    pub fn to_config(&self) -> String {
        let mut out = String::new();
        let num = config::format_number;
        out.push_str(&format!("pitch_length = {}\n", num(self.pitch_length)));
        out.push_str(&format!(
            "popping_crease_offset = {}\n",
            num(self.popping_crease_offset)
        ));
        out.push_str(&format!(
            "stump_zone_width = {}\n",
            num(self.stump_zone_width)
        ));
        out.push_str(&format!(
            "stump_zone_height = {}\n",
            num(self.stump_zone_height)
        ));
        out.push_str(&format!("ball_radius = {}\n", num(self.ball_radius)));
        out.push_str(&format!("ring_radius = {}\n", num(self.ring.radius)));
        out.push_str(&format!(
            "ring_focus_a = {},{}\n",
            num(self.ring.focus_a.x),
            num(self.ring.focus_a.y)
        ));
        out.push_str(&format!(
            "ring_focus_b = {},{}\n",
            num(self.ring.focus_b.x),
            num(self.ring.focus_b.y)
        ));
        out.push_str(&format!(
            "boundary_radius = {}\n",
            num(self.boundary_radius)
        ));
        let mut aps = self.access_points.clone();
        aps.sort_by(|a, b| a.0.cmp(&b.0));
        for (id, p) in aps {
            out.push_str(&format!("ap.{id} = {},{}\n", num(p.x), num(p.y)));
        }
        out
    }

    /// SHA-256 of the canonical configuration form, hex-encoded. Stored in
    /// log headers so replays can detect a layout mismatch.
    pub fn layout_hash(&self) -> String {
        let digest = Sha256::digest(self.to_config().as_bytes());
        hex::encode(digest)
    }
}

fn max_triple_area(points: &[(String, Point2)]) -> f64 {
    let mut max = 0.0f64;
    for i in 0..points.len() {
        for j in (i + 1)..points.len() {
            for k in (j + 1)..points.len() {
                let u = points[j].1 - points[i].1;
                let v = points[k].1 - points[i].1;
                max = max.max((u.x * v.y - u.y * v.x).abs() / 2.0);
            }
        }
    }
    max
}

/// Parses a layout configuration document. Unspecified fields take the
/// documented defaults; specifying any `ap.<id>` key replaces the default
/// access-point set entirely.
pub fn load_layout(config_text: &str) -> Result<GroundLayout, LayoutError> {
    let entries = config::parse_document(config_text)?;
    let mut layout = default_layout();
    let mut aps: Vec<(String, Point2)> = Vec::new();

    for entry in &entries {
        match entry.key.as_str() {
            "pitch_length" => layout.pitch_length = entry.number()?,
            "popping_crease_offset" => layout.popping_crease_offset = entry.number()?,
            "stump_zone_width" => layout.stump_zone_width = entry.number()?,
            "stump_zone_height" => layout.stump_zone_height = entry.number()?,
            "ball_radius" => layout.ball_radius = entry.number()?,
            "ring_radius" => layout.ring.radius = entry.number()?,
            "ring_focus_a" => {
                let t = entry.tuple(2)?;
                layout.ring.focus_a = Point2::new(t[0], t[1]);
            }
            "ring_focus_b" => {
                let t = entry.tuple(2)?;
                layout.ring.focus_b = Point2::new(t[0], t[1]);
            }
            "boundary_radius" => layout.boundary_radius = entry.number()?,
            key => match key.strip_prefix("ap.") {
                Some(id) if !id.is_empty() => {
                    let t = entry.tuple(2)?;
                    aps.push((id.to_string(), Point2::new(t[0], t[1])));
                }
                _ => {
                    return Err(ParseError::new(
                        entry.line,
                        format!("unknown layout key `{key}`"),
                    )
                    .into())
                }
            },
        }
    }

    if !aps.is_empty() {
        aps.sort_by(|a, b| a.0.cmp(&b.0));
        layout.access_points = aps;
    }
    layout.validate()?;
    Ok(layout)
}

// ── Derived frames ─────────────────────────────────────────────────────────

/// The no-ball sensor frame at one bowling end: the popping crease as an
/// oriented line plus the two fixed sensors A (on the crease) and B
/// (behind it, on the perpendicular through A).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CreaseFrame {
    pub crease_line: OrientedLine2,
    pub anchor_a: Point2,
    pub anchor_b: Point2,
}

/// The projection target for LBW: the stump plane with margins applied
/// once, here.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StumpZone {
    /// Along-pitch coordinate of the stump line.
    pub plane_x: f64,
    pub center_y: f64,
    /// Half stump width plus ball radius.
    pub half_width: f64,
    /// Stump height plus ball radius.
    pub top_z: f64,
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn defaults_carry_documented_constants() {
        let layout = default_layout();
        assert_eq!(layout.popping_crease_offset, 1.22);
        assert_eq!(layout.pitch_length, 20.12);
        assert_eq!(layout.ring.radius, 27.43);
        assert_eq!(layout.stump_zone_width, 0.2286);
    }

    #[test]
    fn defaults_pass_all_invariants() {
        default_layout().validate().unwrap();
    }

    #[test]
    fn default_ring_contains_pitch_center() {
        assert!(default_layout().ring.contains(Point2::new(0.0, 0.0)));
    }

    #[test]
    fn empty_document_is_the_default_layout() {
        assert_eq!(load_layout("").unwrap(), default_layout());
    }

    #[test]
    fn single_override_changes_only_that_field() {
        let loaded = load_layout("ring_radius = 30.0\n").unwrap();
        let mut expected = default_layout();
        expected.ring.radius = 30.0;
        assert_eq!(loaded, expected);
    }

    #[test]
    fn negative_pitch_length_is_rejected_by_field_name() {
        match load_layout("pitch_length = -5\n").unwrap_err() {
            LayoutError::InvalidLayout { field, .. } => assert_eq!(field, "pitch_length"),
            other => panic!("expected InvalidLayout, got {other:?}"),
        }
    }

    #[test]
    fn unknown_key_is_a_parse_error_with_line() {
        match load_layout("pich_length = 20\n").unwrap_err() {
            LayoutError::Parse(e) => assert_eq!(e.line, 1),
            other => panic!("expected ParseError, got {other:?}"),
        }
    }

    #[test]
    fn collinear_access_points_are_rejected() {
        let doc = "ap.a = 0,0\nap.b = 10,0\nap.c = 20,0\n";
        assert!(matches!(
            load_layout(doc).unwrap_err(),
            LayoutError::InvalidLayout { .. }
        ));
    }

    #[test]
    fn close_access_points_are_rejected() {
        let doc = "ap.a = 0,0\nap.b = 0.5,0\nap.c = 0,10\n";
        assert!(load_layout(doc).is_err());
    }

    #[test]
    fn crease_anchors_are_one_offset_apart() {
        let layout = default_layout();
        let frame = layout.crease_frame(End::North);
        assert!((distance(frame.anchor_a, frame.anchor_b) - 1.22).abs() < 1e-12);
    }

    #[test]
    fn anchor_b_sits_behind_the_crease() {
        let layout = default_layout();
        for end in [End::North, End::South] {
            let frame = layout.crease_frame(end);
            let sd = frame.crease_line.signed_distance(frame.anchor_b);
            assert!((sd - -1.22).abs() < 1e-12, "end {end:?}: {sd}");
        }
    }

    #[test]
    fn crease_frame_invariants_hold_for_both_ends() {
        let layout = default_layout();
        for end in [End::North, End::South] {
            let frame = layout.crease_frame(end);
            assert!(frame.crease_line.signed_distance(frame.anchor_a).abs() < 1e-9);
            assert!(frame.crease_line.signed_distance(frame.anchor_b) < 0.0);
            assert!(distance(frame.anchor_a, frame.anchor_b) > 0.1);
        }
    }

    #[test]
    fn frames_map_onto_each_other_under_half_turn() {
        let layout = default_layout();
        let north = layout.crease_frame(End::North);
        let south = layout.crease_frame(End::South);
        let rot = |p: Point2| Point2::new(-p.x, -p.y);
        assert!(distance(rot(north.anchor_a), south.anchor_a) < 1e-9);
        assert!(distance(rot(north.anchor_b), south.anchor_b) < 1e-9);
        let d_north = north.crease_line.direction();
        let d_south = south.crease_line.direction();
        assert!((d_north.x + d_south.x).abs() < 1e-12);
        assert!((d_north.y + d_south.y).abs() < 1e-12);
    }

    #[test]
    fn stump_zone_applies_ball_margin_once() {
        let layout = default_layout();
        let zone = layout.stump_zone(End::North);
        assert!((zone.half_width - (0.2286 / 2.0 + 0.036)).abs() < 1e-12);
        assert!((zone.top_z - (0.711 + 0.036)).abs() < 1e-12);
        assert_eq!(zone.plane_x, 10.06);
        assert_eq!(layout.stump_zone(End::South).plane_x, -10.06);
    }

    #[test]
    fn config_round_trip_is_exact() {
        let layout = load_layout("ring_radius = 29.5\nball_radius = 0.0355\n").unwrap();
        let reloaded = load_layout(&layout.to_config()).unwrap();
        assert_eq!(layout, reloaded);
    }

    #[test]
    fn layout_hash_tracks_content() {
        let a = default_layout();
        let b = load_layout("ring_radius = 30.0\n").unwrap();
        assert_ne!(a.layout_hash(), b.layout_hash());
        assert_eq!(a.layout_hash(), default_layout().layout_hash());
    }

    fn arb_override() -> impl Strategy<Value = String> {
        (
            18.0..24.0f64,
            0.6..2.0f64,
            0.15..0.4f64,
            0.5..0.9f64,
            0.02..0.05f64,
            20.0..40.0f64,
            55.0..90.0f64,
        )
            .prop_map(|(pitch, crease, sw, sh, br, ring, boundary)| {
                format!(
                    "pitch_length = {pitch}\npopping_crease_offset = {crease}\n\
                     stump_zone_width = {sw}\nstump_zone_height = {sh}\n\
                     ball_radius = {br}\nring_radius = {ring}\nboundary_radius = {boundary}\n"
                )
            })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1_000))]

        #[test]
        fn loaded_layouts_satisfy_invariants(doc in arb_override()) {
            let layout = load_layout(&doc).unwrap();
            layout.validate().unwrap();
        }

        #[test]
        fn serialize_reload_is_identity(doc in arb_override()) {
            let layout = load_layout(&doc).unwrap();
            prop_assert_eq!(load_layout(&layout.to_config()).unwrap(), layout);
        }
    }
}
