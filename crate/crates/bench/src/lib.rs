//! Shared input builders for the benchmarks.

use aware_core::geometry::{Point2, Point3, Vec3};
use aware_core::ground::{default_layout, GroundLayout};
use aware_core::pipeline::{delivery_records, Record};
use aware_core::positioning::{SensorKind, SensorSample, Track};
use aware_core::sim::{simulate_delivery, DeliverySpec};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

/// A representative good-length delivery with mild noise.
pub fn noisy_delivery(seed: u64) -> (GroundLayout, Vec<SensorSample>) {
    let layout = default_layout();
    let spec = DeliverySpec {
        release_pos: Point3::new(-9.2, 0.05, 2.0),
        release_vel: Vec3::new(32.0, -0.1, -3.0),
        restitution: 0.7,
        bat_contact: None,
        foot_landing: Point2::new(-8.9, 0.05),
        spin_deviation: None,
    };
    let (_, samples) = simulate_delivery(&layout, &spec, 100.0, seed, 0.005).expect("valid spec");
    (layout, samples)
}

/// The delivery above as marker-wrapped pipeline records.
pub fn delivery_record_stream(seed: u64) -> (GroundLayout, Vec<Record>) {
    let (layout, samples) = noisy_delivery(seed);
    let records = delivery_records("d1", 3, samples, None);
    (layout, records)
}

/// The ball samples of the delivery as a track.
pub fn ball_track(seed: u64) -> (GroundLayout, Track) {
    let (layout, samples) = noisy_delivery(seed);
    let mut track = Track::new("ball");
    for s in samples.into_iter().filter(|s| s.kind == SensorKind::Ball) {
        track.ingest(s).expect("in order");
    }
    (layout, track)
}

/// A minute of 15-sensor traffic at 100 Hz (90,000 samples), the
/// throughput acceptance workload.
pub fn minute_of_traffic() -> (GroundLayout, Vec<Record>) {
    let layout = default_layout();
    let mut rng = ChaCha8Rng::seed_from_u64(1010);
    let steps = 6000usize;
    let mut records = Vec::with_capacity(15 * steps);
    let mut players: Vec<Point2> = (0..13)
        .map(|i| Point2::new(-40.0 + 6.0 * i as f64, rng.random_range(-40.0..40.0)))
        .collect();
    for k in 0..steps {
        let t = k as f64 / 100.0;
        let phase = (t % 4.0) / 4.0;
        let z = layout.ball_radius + 1.9 * (std::f64::consts::PI * phase).sin().abs();
        records.push(Record::Sample(SensorSample::new(
            t,
            "ball",
            SensorKind::Ball,
            Point3::new(-9.0 + 0.3 * t, 0.1 * (0.5 * t).sin(), z),
        )));
        records.push(Record::Sample(SensorSample::new(
            t,
            "foot.bowler",
            SensorKind::BowlerFoot,
            Point3::new(-8.9, 0.05, 0.0),
        )));
        for (i, pos) in players.iter_mut().enumerate() {
            pos.x += rng.random_range(-0.02..0.02);
            pos.y += rng.random_range(-0.02..0.02);
            records.push(Record::Sample(SensorSample::new(
                t,
                format!("player.{i:02}"),
                SensorKind::Player,
                Point3::new(pos.x, pos.y, 0.0),
            )));
        }
    }
    (layout, records)
}
