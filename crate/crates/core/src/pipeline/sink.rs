//! Presentation-tier sinks. Every registered sink receives every decision
//! event exactly once, in timestamp order.

use crate::decision::{DecisionBody, DecisionEvent, FieldingVerdict, LbwVerdict, NoBallVerdict};
use serde::Serialize;
use std::collections::BTreeMap;
use std::io::{self, Write};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SinkKind {
    UmpireAlert,
    Scoreboard,
    ReportFile,
}

pub trait Sink {
    fn id(&self) -> &str;
    fn kind(&self) -> SinkKind;
    fn notify(&mut self, event: &DecisionEvent) -> io::Result<()>;
}

pub fn verdict_label(body: &DecisionBody) -> &'static str {
    match body {
        DecisionBody::NoBall { verdict, .. } => match verdict {
            NoBallVerdict::Legal => "legal",
            NoBallVerdict::NoBall => "no_ball",
        },
        DecisionBody::FieldingViolation { verdict, .. } => match verdict {
            FieldingVerdict::Compliant => "compliant",
            FieldingVerdict::Violation => "violation",
        },
        DecisionBody::LbwProjection { verdict, .. } => match verdict {
            LbwVerdict::Hitting => "hitting",
            LbwVerdict::Missing => "missing",
        },
    }
}

fn kind_label(body: &DecisionBody) -> &'static str {
    match body {
        DecisionBody::NoBall { .. } => "no_ball",
        DecisionBody::FieldingViolation { .. } => "fielding_violation",
        DecisionBody::LbwProjection { .. } => "lbw_projection",
    }
}

/// Human-facing alert stream for the standing umpire. One line per event;
/// angles are degrees here and nowhere else.
pub struct UmpireAlertSink<W: Write> {
    out: W,
}

impl<W: Write> UmpireAlertSink<W> {
    pub fn new(out: W) -> Self {
        Self { out }
    }
}

impl<W: Write> Sink for UmpireAlertSink<W> {
    fn id(&self) -> &str {
        "umpire"
    }

    fn kind(&self) -> SinkKind {
        SinkKind::UmpireAlert
    }

    fn notify(&mut self, event: &DecisionEvent) -> io::Result<()> {
        let detail = match &event.body {
            DecisionBody::NoBall { measurements, .. } => match measurements.theta {
                Some(theta) => format!("theta {:.1} deg", theta.to_degrees()),
                None => "quick reject".to_string(),
            },
            DecisionBody::FieldingViolation { measurements, .. } => {
                format!("{} outside the ring", measurements.count_outside)
            }
            DecisionBody::LbwProjection { measurements, .. } => format!(
                "intercept y {:.3} m, z {:.3} m",
                measurements.intercept_y, measurements.intercept_z
            ),
        };
        writeln!(
            self.out,
            "[t={:>8.3}] {}: {} ({})",
            event.t,
            kind_label(&event.body),
            verdict_label(&event.body),
            detail
        )
    }
}

/// Running verdict tallies, keyed `kind/verdict`.
#[derive(Default)]
pub struct ScoreboardSink {
    tallies: BTreeMap<String, u64>,
}

impl ScoreboardSink {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn tallies(&self) -> &BTreeMap<String, u64> {
        &self.tallies
    }
}

impl Sink for ScoreboardSink {
    fn id(&self) -> &str {
        "scoreboard"
    }

    fn kind(&self) -> SinkKind {
        SinkKind::Scoreboard
    }

    fn notify(&mut self, event: &DecisionEvent) -> io::Result<()> {
        let key = format!("{}/{}", kind_label(&event.body), verdict_label(&event.body));
        *self.tallies.entry(key).or_insert(0) += 1;
        Ok(())
    }
}

/// Machine-readable decision stream: one NDJSON record per event.
pub struct ReportFileSink<W: Write> {
    id: String,
    out: W,
}

impl<W: Write> ReportFileSink<W> {
    pub fn new(id: impl Into<String>, out: W) -> Self {
        Self { id: id.into(), out }
    }
}

impl<W: Write> Sink for ReportFileSink<W> {
    fn id(&self) -> &str {
        &self.id
    }

    fn kind(&self) -> SinkKind {
        SinkKind::ReportFile
    }

    fn notify(&mut self, event: &DecisionEvent) -> io::Result<()> {
        let line = serde_json::to_string(event).expect("event serialization is infallible");
        self.out.write_all(line.as_bytes())?;
        self.out.write_all(b"\n")?;
        self.out.flush()
    }
}
