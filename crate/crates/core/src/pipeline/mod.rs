//! The four-tier backbone: gather (a record source), communicate (ordered
//! intake with dead-lettering), process (the decision engine, one delivery
//! at a time), and present (sinks), with every accepted record and every
//! decision appended to the match log.
//!
//! Processing is per delivery: records buffer between delivery markers (or
//! form one implicit delivery when a log has no markers), decisions are
//! computed when the delivery closes, and the whole batch goes to the log
//! in canonical order. Pushing records one at a time and pushing them all
//! at once produce identical logs.

pub mod log;
mod replay;
pub mod sink;

pub use self::log::{
    read_log, read_log_from, record_to_line, sort_canonical, Annotation, AnnotationBody,
    LogError, LogHeader, MatchLogWriter, Record, FORMAT_VERSION,
};
pub use self::replay::{replay, Divergence, ReplayReport};
pub use self::sink::{ReportFileSink, ScoreboardSink, Sink, SinkKind, UmpireAlertSink};

use crate::decision::{decide_delivery, DecisionKind, DeliverySlice, FieldingRule};
use crate::ground::GroundLayout;
use crate::positioning::{SensorKind, SensorSample, Track};
use serde::Serialize;
use std::collections::BTreeMap;
use std::io::Write;

/// A record the pipeline refused, with the reason.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DeadLetter {
    pub t: f64,
    pub sensor_id: String,
    pub reason: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct DecisionCounts {
    pub no_ball: u64,
    pub fielding_violation: u64,
    pub lbw_projection: u64,
}

impl DecisionCounts {
    fn bump(&mut self, kind: DecisionKind) {
        match kind {
            DecisionKind::NoBall => self.no_ball += 1,
            DecisionKind::FieldingViolation => self.fielding_violation += 1,
            DecisionKind::LbwProjection => self.lbw_projection += 1,
        }
    }

    pub fn total(&self) -> u64 {
        self.no_ball + self.fielding_violation + self.lbw_projection
    }
}

/// A decision that could not be made for one delivery.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FailureNote {
    pub delivery_id: Option<String>,
    pub kind: DecisionKind,
    pub message: String,
}

/// What one pipeline run did.
#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct PipelineSummary {
    pub deliveries: u64,
    pub samples: u64,
    pub annotations: u64,
    /// Decision records found in the source; the pipeline recomputes
    /// decisions and drops stored ones.
    pub input_decisions_skipped: u64,
    pub decisions: DecisionCounts,
    pub dead_letters: Vec<DeadLetter>,
    pub failures: Vec<FailureNote>,
    pub sink_errors: Vec<String>,
    pub records_appended: u64,
}

impl PipelineSummary {
    /// Tabular one-line-per-quantity rendering for terminals.
    pub fn render_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("deliveries         {}\n", self.deliveries));
        out.push_str(&format!("samples            {}\n", self.samples));
        out.push_str(&format!("annotations        {}\n", self.annotations));
        out.push_str(&format!(
            "decisions          {} (no_ball {}, fielding_violation {}, lbw_projection {})\n",
            self.decisions.total(),
            self.decisions.no_ball,
            self.decisions.fielding_violation,
            self.decisions.lbw_projection
        ));
        out.push_str(&format!("dead letters       {}\n", self.dead_letters.len()));
        for d in &self.dead_letters {
            out.push_str(&format!("  t={} {}: {}\n", d.t, d.sensor_id, d.reason));
        }
        out.push_str(&format!("decision failures  {}\n", self.failures.len()));
        for f in &self.failures {
            out.push_str(&format!(
                "  {} {:?}: {}\n",
                f.delivery_id.as_deref().unwrap_or("-"),
                f.kind,
                f.message
            ));
        }
        if self.input_decisions_skipped > 0 {
            out.push_str(&format!(
                "stored decisions   {} (dropped, recomputed)\n",
                self.input_decisions_skipped
            ));
        }
        for e in &self.sink_errors {
            out.push_str(&format!("sink error         {e}\n"));
        }
        out.push_str(&format!("records appended   {}\n", self.records_appended));
        out
    }
}

/// Builds the decision-engine input from one delivery's canonical-sorted
/// records. The ball track is the lexicographically first ball-kind sensor;
/// the foot is the first bowler-foot sample.
pub(crate) fn build_slice(
    records: &[Record],
    delivery_id: Option<String>,
    over: u32,
    contact_t: Option<f64>,
) -> DeliverySlice {
    let mut ball_id: Option<&str> = None;
    for r in records {
        if let Record::Sample(s) = r {
            if s.kind == SensorKind::Ball
                && ball_id.map(|b| s.sensor_id.as_str() < b).unwrap_or(true)
            {
                ball_id = Some(&s.sensor_id);
            }
        }
    }
    let mut ball = Track::new(ball_id.unwrap_or("ball"));
    let mut foot: Option<SensorSample> = None;
    let mut players: Vec<SensorSample> = Vec::new();
    for r in records {
        let s = match r {
            Record::Sample(s) => s,
            _ => continue,
        };
        match s.kind {
            SensorKind::Ball => {
                if Some(s.sensor_id.as_str()) == ball_id {
                    ball.ingest(s.clone()).expect("intake enforces order");
                }
            }
            SensorKind::BowlerFoot => {
                if foot.is_none() {
                    foot = Some(s.clone());
                }
            }
            SensorKind::Player => players.push(s.clone()),
        }
    }
    DeliverySlice {
        delivery_id,
        over,
        foot,
        ball,
        players,
        contact_t,
    }
}

struct DeliveryBuffer {
    id: Option<String>,
    over: u32,
    contact_t: Option<f64>,
    records: Vec<Record>,
}

impl DeliveryBuffer {
    fn new() -> Self {
        Self {
            id: None,
            over: 1,
            contact_t: None,
            records: Vec::new(),
        }
    }
}

/// Streaming pipeline: push records as they arrive, then [`finish`].
///
/// [`finish`]: Pipeline::finish
pub struct Pipeline<'a, W: Write> {
    layout: &'a GroundLayout,
    rule: FieldingRule,
    sinks: Vec<&'a mut dyn Sink>,
    writer: &'a mut MatchLogWriter<W>,
    buffer: DeliveryBuffer,
    last_global_t: Option<f64>,
    sensor_last_t: BTreeMap<String, (f64, SensorKind)>,
    summary: PipelineSummary,
}

impl<'a, W: Write> Pipeline<'a, W> {
    pub fn new(
        layout: &'a GroundLayout,
        rule: FieldingRule,
        sinks: Vec<&'a mut dyn Sink>,
        writer: &'a mut MatchLogWriter<W>,
    ) -> Self {
        Self {
            layout,
            rule,
            sinks,
            writer,
            buffer: DeliveryBuffer::new(),
            last_global_t: None,
            sensor_last_t: BTreeMap::new(),
            summary: PipelineSummary::default(),
        }
    }

    pub fn push(&mut self, record: Record) -> Result<(), LogError> {
        // Communicate tier: stored decisions are recomputed, stale
        // timestamps are dead-lettered, samples must be physically valid.
        if let Record::Decision(_) = record {
            self.summary.input_decisions_skipped += 1;
            return Ok(());
        }
        let t = record.t();
        if let Some(last) = self.last_global_t {
            if t < last {
                self.dead_letter(&record, format!("timestamp {t} regressed below {last}"));
                return Ok(());
            }
        }
        if let Record::Sample(s) = &record {
            if let Err(e) = s.validate() {
                self.dead_letter(&record, e.to_string());
                return Ok(());
            }
            if let Some(&(last, kind)) = self.sensor_last_t.get(&s.sensor_id) {
                if s.t <= last {
                    self.dead_letter(
                        &record,
                        format!("not later than the sensor's previous sample at t={last}"),
                    );
                    return Ok(());
                }
                if s.kind != kind {
                    self.dead_letter(
                        &record,
                        format!("sensor changed kind from {kind:?} to {:?}", s.kind),
                    );
                    return Ok(());
                }
            }
            self.sensor_last_t.insert(s.sensor_id.clone(), (s.t, s.kind));
        }
        self.last_global_t = Some(t);

        match &record {
            Record::Annotation(a) => match &a.body {
                AnnotationBody::DeliveryStart { delivery_id, over } => {
                    if !self.buffer.records.is_empty() {
                        self.close_delivery()?;
                    }
                    self.buffer.id = Some(delivery_id.clone());
                    self.buffer.over = *over;
                    self.buffer.records.push(record);
                }
                AnnotationBody::BatContact => {
                    self.buffer.contact_t = Some(a.t);
                    self.buffer.records.push(record);
                }
                AnnotationBody::DeliveryEnd { .. } => {
                    self.buffer.records.push(record);
                    self.close_delivery()?;
                }
            },
            _ => self.buffer.records.push(record),
        }
        Ok(())
    }

    /// Closes any open delivery and returns the run summary.
    pub fn finish(mut self) -> Result<PipelineSummary, LogError> {
        if !self.buffer.records.is_empty() {
            self.close_delivery()?;
        }
        Ok(self.summary)
    }

    fn dead_letter(&mut self, record: &Record, reason: String) {
        let sensor_id = match record {
            Record::Sample(s) => s.sensor_id.clone(),
            Record::Annotation(_) => "<annotation>".to_string(),
            Record::Decision(_) => "<decision>".to_string(),
        };
        self.summary.dead_letters.push(DeadLetter {
            t: record.t(),
            sensor_id,
            reason,
        });
    }

    fn close_delivery(&mut self) -> Result<(), LogError> {
        let buffer = std::mem::replace(&mut self.buffer, DeliveryBuffer::new());
        let mut records = buffer.records;
        sort_canonical(&mut records);

        let slice = build_slice(&records, buffer.id.clone(), buffer.over, buffer.contact_t);
        let mut outcome = decide_delivery(self.layout, &self.rule, &slice);

        let sink_ids: Vec<String> = self.sinks.iter().map(|s| s.id().to_string()).collect();
        for event in &mut outcome.events {
            event.sinks_notified = sink_ids.clone();
            for sink in &mut self.sinks {
                if let Err(e) = sink.notify(event) {
                    self.summary.sink_errors.push(format!("{}: {e}", sink.id()));
                }
            }
            self.summary.decisions.bump(event.kind());
        }
        for failure in outcome.failures {
            self.summary.failures.push(FailureNote {
                delivery_id: buffer.id.clone(),
                kind: failure.kind,
                message: failure.error.to_string(),
            });
        }

        records.extend(outcome.events.into_iter().map(Record::Decision));
        sort_canonical(&mut records);
        for record in &records {
            match record {
                Record::Sample(_) => self.summary.samples += 1,
                Record::Annotation(_) => self.summary.annotations += 1,
                Record::Decision(_) => {}
            }
            self.writer.append(record)?;
            self.summary.records_appended += 1;
        }
        self.summary.deliveries += 1;
        Ok(())
    }
}

/// Batch form of the pipeline: drains `source` through [`Pipeline`].
pub fn run_pipeline<'a, W: Write>(
    layout: &'a GroundLayout,
    rule: FieldingRule,
    source: impl IntoIterator<Item = Record>,
    sinks: Vec<&'a mut dyn Sink>,
    writer: &'a mut MatchLogWriter<W>,
) -> Result<PipelineSummary, LogError> {
    let mut pipeline = Pipeline::new(layout, rule, sinks, writer);
    for record in source {
        pipeline.push(record)?;
    }
    pipeline.finish()
}

/// Wraps one delivery's samples in start/contact/end markers and returns
/// the records in canonical order, ready for a log or a pipeline.
pub fn delivery_records(
    delivery_id: &str,
    over: u32,
    samples: Vec<SensorSample>,
    contact_t: Option<f64>,
) -> Vec<Record> {
    let t0 = samples.iter().map(|s| s.t).fold(f64::INFINITY, f64::min);
    let t1 = samples.iter().map(|s| s.t).fold(f64::NEG_INFINITY, f64::max);
    let (t0, t1) = if samples.is_empty() { (0.0, 0.0) } else { (t0, t1) };
    let mut records: Vec<Record> = Vec::with_capacity(samples.len() + 3);
    records.push(Record::Annotation(Annotation {
        t: t0,
        body: AnnotationBody::DeliveryStart {
            delivery_id: delivery_id.to_string(),
            over,
        },
    }));
    records.extend(samples.into_iter().map(Record::Sample));
    if let Some(tc) = contact_t {
        records.push(Record::Annotation(Annotation {
            t: tc,
            body: AnnotationBody::BatContact,
        }));
    }
    records.push(Record::Annotation(Annotation {
        t: t1,
        body: AnnotationBody::DeliveryEnd {
            delivery_id: delivery_id.to_string(),
        },
    }));
    sort_canonical(&mut records);
    records
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decision::{DecisionBody, FieldingRule};
    use crate::geometry::{Point2, Point3, Vec3};
    use crate::ground::default_layout;
    use crate::sim::{simulate_delivery, simulate_fielding, DeliverySpec, FieldingSpec};

    fn test_delivery_records(seed: u64, noise: f64) -> Vec<Record> {
        let layout = default_layout();
        let spec = DeliverySpec {
            release_pos: Point3::new(-9.2, 0.05, 2.0),
            release_vel: Vec3::new(32.0, -0.1, -3.0),
            restitution: 0.7,
            bat_contact: None,
            foot_landing: Point2::new(-8.9, 0.05),
            spin_deviation: None,
        };
        let fielding = FieldingSpec {
            placements: (1..=9)
                .map(|i| (format!("{i}"), Point2::new(i as f64 * 4.0 - 20.0, i as f64 * 3.0 - 15.0)))
                .collect(),
            over_number: 3,
        };
        let (_, mut samples) = simulate_delivery(&layout, &spec, 100.0, seed, noise).unwrap();
        samples.extend(simulate_fielding(&layout, &fielding, 0.0).unwrap());
        delivery_records("d1", 3, samples, None)
    }

    fn run_to_buffer(records: Vec<Record>) -> (PipelineSummary, Vec<u8>) {
        let layout = default_layout();
        let mut writer =
            MatchLogWriter::new(Vec::new(), &LogHeader::new(layout.layout_hash(), 100.0)).unwrap();
        let summary = run_pipeline(
            &layout,
            FieldingRule::default(),
            records,
            Vec::new(),
            &mut writer,
        )
        .unwrap();
        (summary, writer.into_inner())
    }

    #[test]
    fn one_delivery_yields_three_decisions_and_no_dead_letters() {
        let (summary, _) = run_to_buffer(test_delivery_records(0, 0.0));
        assert_eq!(summary.deliveries, 1);
        assert_eq!(summary.decisions.total(), 3);
        assert!(summary.dead_letters.is_empty());
        assert!(summary.failures.is_empty());
    }

    #[test]
    fn pipeline_matches_direct_decision_call() {
        let layout = default_layout();
        let records = test_delivery_records(1, 0.005);
        let (_, log_bytes) = run_to_buffer(records.clone());

        let mut canonical = records.clone();
        sort_canonical(&mut canonical);
        let slice = build_slice(&canonical, Some("d1".into()), 3, None);
        let direct = decide_delivery(&layout, &FieldingRule::default(), &slice);

        let (_, stored) = read_log_from(
            std::io::BufReader::new(&log_bytes[..]),
            "buffer",
        )
        .unwrap();
        let stored_events: Vec<String> = stored
            .iter()
            .filter_map(|r| match r {
                Record::Decision(d) => Some(serde_json::to_string(d).unwrap()),
                _ => None,
            })
            .collect();
        let direct_events: Vec<String> = direct
            .events
            .iter()
            .map(|d| serde_json::to_string(d).unwrap())
            .collect();
        assert_eq!(stored_events, direct_events);
    }

    #[test]
    fn out_of_order_sample_is_dead_lettered_without_hurting_others() {
        let mut records = test_delivery_records(0, 0.0);
        // Duplicate an early ball sample later in the stream with a stale
        // timestamp.
        let stale = records
            .iter()
            .find_map(|r| match r {
                Record::Sample(s) if s.kind == crate::positioning::SensorKind::Ball => {
                    Some(Record::Sample(s.clone()))
                }
                _ => None,
            })
            .unwrap();
        let end = records.pop().unwrap();
        records.push(stale);
        records.push(end);
        let (summary, _) = run_to_buffer(records);
        assert_eq!(summary.dead_letters.len(), 1);
        assert_eq!(summary.decisions.total(), 3);
    }

    #[test]
    fn empty_source_appends_nothing() {
        let (summary, bytes) = run_to_buffer(Vec::new());
        assert_eq!(summary, PipelineSummary::default());
        let text = String::from_utf8(bytes).unwrap();
        assert_eq!(text.lines().count(), 1, "only the header line");
    }

    #[test]
    fn one_at_a_time_equals_all_at_once() {
        let layout = default_layout();
        let records = test_delivery_records(2, 0.005);

        let mut w1 =
            MatchLogWriter::new(Vec::new(), &LogHeader::new(layout.layout_hash(), 100.0)).unwrap();
        let mut p = Pipeline::new(&layout, FieldingRule::default(), Vec::new(), &mut w1);
        for r in records.clone() {
            p.push(r).unwrap();
        }
        let s1 = p.finish().unwrap();
        let b1 = w1.into_inner();

        let mut w2 =
            MatchLogWriter::new(Vec::new(), &LogHeader::new(layout.layout_hash(), 100.0)).unwrap();
        let s2 = run_pipeline(
            &layout,
            FieldingRule::default(),
            records,
            Vec::new(),
            &mut w2,
        )
        .unwrap();
        let b2 = w2.into_inner();

        assert_eq!(b1, b2);
        assert_eq!(s1, s2);
    }

    #[test]
    fn sinks_see_every_decision_once_in_order() {
        let layout = default_layout();
        let mut scoreboard = ScoreboardSink::new();
        let mut alerts = UmpireAlertSink::new(Vec::new());
        let mut writer =
            MatchLogWriter::new(Vec::new(), &LogHeader::new(layout.layout_hash(), 100.0)).unwrap();
        let summary = run_pipeline(
            &layout,
            FieldingRule::default(),
            test_delivery_records(3, 0.0),
            vec![&mut scoreboard, &mut alerts],
            &mut writer,
        )
        .unwrap();
        assert_eq!(summary.decisions.total(), 3);
        let tally_total: u64 = scoreboard.tallies().values().sum();
        assert_eq!(tally_total, 3);

        let (_, stored) = read_log_from(
            std::io::BufReader::new(&writer.into_inner()[..]),
            "buffer",
        )
        .unwrap();
        let mut decision_ts = Vec::new();
        for r in stored {
            if let Record::Decision(d) = r {
                assert_eq!(d.sinks_notified, Vec::<String>::new(), "wire drops sink list");
                decision_ts.push(d.t);
            }
        }
        assert!(decision_ts.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn sinks_get_a_thousand_events_exactly_once_each() {
        struct CountingSink {
            seen: Vec<(f64, crate::decision::DecisionKind)>,
        }
        impl Sink for CountingSink {
            fn id(&self) -> &str {
                "counter"
            }
            fn kind(&self) -> SinkKind {
                SinkKind::Scoreboard
            }
            fn notify(&mut self, event: &crate::decision::DecisionEvent) -> std::io::Result<()> {
                self.seen.push((event.t, event.kind()));
                Ok(())
            }
        }

        // 334 cheap synthetic deliveries, 3 decisions each: 1002 events.
        let layout = default_layout();
        let deliveries = 334usize;
        let mut records = Vec::new();
        for k in 0..deliveries {
            let t0 = k as f64;
            let mut samples = Vec::new();
            for j in 0..6 {
                let t = t0 + j as f64 * 0.01;
                let s = j as f64 * 0.3;
                samples.push(SensorSample::new(
                    t,
                    "ball",
                    SensorKind::Ball,
                    Point3::new(-5.0 + s, 0.0, 1.0 + 0.1 * s - 0.02 * s * s),
                ));
            }
            samples.push(SensorSample::new(
                t0,
                "foot.bowler",
                SensorKind::BowlerFoot,
                Point3::new(-8.9, 0.1, 0.0),
            ));
            records.extend(delivery_records(&format!("d{k}"), 3, samples, None));
        }

        let mut counter = CountingSink { seen: Vec::new() };
        let mut writer =
            MatchLogWriter::new(Vec::new(), &LogHeader::new(layout.layout_hash(), 100.0)).unwrap();
        let summary = run_pipeline(
            &layout,
            FieldingRule::default(),
            records,
            vec![&mut counter],
            &mut writer,
        )
        .unwrap();

        assert_eq!(summary.deliveries as usize, deliveries);
        assert_eq!(summary.decisions.total() as usize, 3 * deliveries);
        assert_eq!(counter.seen.len(), 3 * deliveries);
        assert!(
            counter.seen.windows(2).all(|w| w[0].0 <= w[1].0),
            "events must arrive in timestamp order"
        );
        let mut unique = counter.seen.clone();
        unique.sort_by(|a, b| a.0.total_cmp(&b.0).then_with(|| a.1.cmp(&b.1)));
        unique.dedup_by(|a, b| a.0 == b.0 && a.1 == b.1);
        assert_eq!(unique.len(), 3 * deliveries, "no duplicate deliveries");
    }

    #[test]
    fn log_with_no_markers_is_one_implicit_delivery() {
        let records: Vec<Record> = test_delivery_records(0, 0.0)
            .into_iter()
            .filter(|r| matches!(r, Record::Sample(_)))
            .collect();
        let (summary, _) = run_to_buffer(records);
        assert_eq!(summary.deliveries, 1);
        assert_eq!(summary.decisions.total(), 3);
    }

    #[test]
    fn stored_decisions_are_dropped_and_recomputed() {
        let records = test_delivery_records(0, 0.0);
        let (_, bytes) = run_to_buffer(records);
        let (_, first_pass) =
            read_log_from(std::io::BufReader::new(&bytes[..]), "buffer").unwrap();

        let (summary, bytes2) = run_to_buffer(first_pass.clone());
        assert_eq!(summary.input_decisions_skipped, 3);
        assert_eq!(summary.decisions.total(), 3);
        let (_, second_pass) =
            read_log_from(std::io::BufReader::new(&bytes2[..]), "buffer").unwrap();
        assert_eq!(first_pass, second_pass);
    }

    #[test]
    fn delivery_decisions_verdicts_look_sane() {
        let (_, bytes) = run_to_buffer(test_delivery_records(0, 0.0));
        let (_, records) =
            read_log_from(std::io::BufReader::new(&bytes[..]), "buffer").unwrap();
        let mut kinds = Vec::new();
        for r in &records {
            if let Record::Decision(d) = r {
                kinds.push(d.kind());
                if let DecisionBody::NoBall { verdict, .. } = &d.body {
                    // Foot lands 6 cm behind the default crease.
                    assert_eq!(*verdict, crate::decision::NoBallVerdict::Legal);
                }
            }
        }
        assert_eq!(kinds.len(), 3);
    }
}
