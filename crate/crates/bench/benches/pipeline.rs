use aware_bench::{ball_track, delivery_record_stream, minute_of_traffic};
use aware_core::decision::{bounce_split, detect_no_ball, fit_trajectory, FieldingRule};
use aware_core::geometry::{distance, Point2, Point3};
use aware_core::ground::{default_layout, End};
use aware_core::pipeline::{run_pipeline, LogHeader, MatchLogWriter};
use aware_core::positioning::{trilaterate, RangeSet, SensorKind, SensorSample};
use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;

fn bench_trilaterate(c: &mut Criterion) {
    let layout = default_layout();
    let truth = Point2::new(12.5, -20.0);
    let rs = RangeSet {
        t: 0.0,
        sensor_id: "ball".into(),
        ranges: layout
            .access_points
            .iter()
            .map(|(id, ap)| (id.clone(), distance(truth, *ap)))
            .collect(),
    };
    c.bench_function("trilaterate_4_anchors", |b| {
        b.iter(|| trilaterate(black_box(&layout), black_box(&rs)).unwrap())
    });
}

fn bench_no_ball(c: &mut Criterion) {
    let layout = default_layout();
    let frame = layout.crease_frame(End::South);
    let foot = SensorSample::new(
        0.0,
        "foot.bowler",
        SensorKind::BowlerFoot,
        Point3::new(frame.anchor_a.x + 0.02, 0.2, 0.0),
    );
    c.bench_function("detect_no_ball", |b| {
        b.iter(|| detect_no_ball(black_box(&frame), black_box(&foot)).unwrap())
    });
}

fn bench_fit(c: &mut Criterion) {
    let (layout, track) = ball_track(3);
    let windows = bounce_split(&track, layout.ball_radius).unwrap();
    let window = *windows.last().unwrap();
    c.bench_function("fit_post_bounce_window", |b| {
        b.iter(|| fit_trajectory(black_box(&track), black_box(window)).unwrap())
    });
}

fn bench_delivery_pipeline(c: &mut Criterion) {
    let (layout, records) = delivery_record_stream(3);
    c.bench_function("pipeline_one_delivery", |b| {
        b.iter(|| {
            let mut writer = MatchLogWriter::new(
                Vec::with_capacity(16 * 1024),
                &LogHeader::new(layout.layout_hash(), 100.0),
            )
            .unwrap();
            run_pipeline(
                black_box(&layout),
                FieldingRule::default(),
                records.iter().cloned(),
                Vec::new(),
                &mut writer,
            )
            .unwrap()
        })
    });
}

fn bench_minute_throughput(c: &mut Criterion) {
    let (layout, records) = minute_of_traffic();
    let mut group = c.benchmark_group("throughput");
    group.sample_size(10);
    group.bench_function("minute_90k_samples", |b| {
        b.iter(|| {
            let mut writer = MatchLogWriter::new(
                Vec::with_capacity(16 << 20),
                &LogHeader::new(layout.layout_hash(), 100.0),
            )
            .unwrap();
            run_pipeline(
                black_box(&layout),
                FieldingRule::default(),
                records.iter().cloned(),
                Vec::new(),
                &mut writer,
            )
            .unwrap()
        })
    });
    group.finish();
}

criterion_group!(
    benches,
    bench_trilaterate,
    bench_no_ball,
    bench_fit,
    bench_delivery_pipeline,
    bench_minute_throughput
);
criterion_main!(benches);
