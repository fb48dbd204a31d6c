//! The match-log wire format: newline-delimited JSON, UTF-8, one record per
//! line, a header line first.
//!
//! Floats serialize in their shortest round-trip form, so a parsed record
//! re-serializes to the identical bytes and logs diff cleanly. The header
//! pins the format version, the layout hash, and the nominal sample rate;
//! everything after it is a sample, a decision, or an annotation, with
//! non-decreasing timestamps. Appends are write-then-flush per record: a
//! reader in another process sees every record the writer has accepted, and
//! a log truncated at any line boundary is a valid prefix.

use crate::decision::DecisionEvent;
use crate::positioning::{SensorKind, SensorSample};
use serde::{Deserialize, Serialize};
use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;
use thiserror::Error;

/// Format tag every log header must carry.
pub const FORMAT_VERSION: &str = "aware-ground/1";

#[derive(Debug, Error)]
pub enum LogError {
    #[error("i/o failure: {0}")]
    Io(#[from] io::Error),
    #[error("record at t={t} is earlier than the log end t={last}")]
    OutOfOrder { t: f64, last: f64 },
    #[error("{path}:{line} (byte {byte_offset}): corrupt record: {message}")]
    CorruptRecord {
        path: String,
        line: usize,
        byte_offset: u64,
        message: String,
    },
    #[error("unsupported log format `{found}` (expected `{FORMAT_VERSION}`)")]
    VersionMismatch { found: String },
    #[error("log was recorded against layout {found}, not the provided layout {expected}")]
    LayoutMismatch { expected: String, found: String },
    #[error("log has records but no header line")]
    MissingHeader,
}

/// First line of every log.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogHeader {
    pub format: String,
    pub layout_hash: String,
    pub sample_hz: f64,
}

impl LogHeader {
    pub fn new(layout_hash: impl Into<String>, sample_hz: f64) -> Self {
        Self {
            format: FORMAT_VERSION.to_string(),
            layout_hash: layout_hash.into(),
            sample_hz,
        }
    }
}

// ── Records ────────────────────────────────────────────────────────────────

/// Delivery markers and in-flight events interleaved with the samples.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Annotation {
    pub t: f64,
    #[serde(flatten)]
    pub body: AnnotationBody,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "annotation", rename_all = "snake_case")]
pub enum AnnotationBody {
    DeliveryStart { delivery_id: String, over: u32 },
    BatContact,
    DeliveryEnd { delivery_id: String },
}

/// One log line.
#[derive(Debug, Clone, PartialEq)]
pub enum Record {
    Sample(SensorSample),
    Decision(DecisionEvent),
    Annotation(Annotation),
}

impl Record {
    pub fn t(&self) -> f64 {
        match self {
            Record::Sample(s) => s.t,
            Record::Decision(d) => d.t,
            Record::Annotation(a) => a.t,
        }
    }

    /// Rank used to order records sharing a timestamp: markers open, then
    /// samples, then contact annotations, then decisions, then markers
    /// close.
    pub fn class_rank(&self) -> u8 {
        match self {
            Record::Annotation(a) => match a.body {
                AnnotationBody::DeliveryStart { .. } => 0,
                AnnotationBody::BatContact => 2,
                AnnotationBody::DeliveryEnd { .. } => 4,
            },
            Record::Sample(_) => 1,
            Record::Decision(_) => 3,
        }
    }

    fn tie_kind(&self) -> u8 {
        match self {
            Record::Decision(d) => d.kind() as u8,
            _ => 0,
        }
    }

    fn tie_id(&self) -> &str {
        match self {
            Record::Sample(s) => &s.sensor_id,
            _ => "",
        }
    }
}

/// Total, deterministic record order: timestamp, then record class, then
/// decision kind, then sensor id. Matches the order the decision engine
/// emits events in, so logs and recomputations line up.
pub fn sort_canonical(records: &mut [Record]) {
    records.sort_by(|a, b| {
        a.t()
            .total_cmp(&b.t())
            .then_with(|| a.class_rank().cmp(&b.class_rank()))
            .then_with(|| a.tie_kind().cmp(&b.tie_kind()))
            .then_with(|| a.tie_id().cmp(b.tie_id()))
    });
}

// Wire mirror of a sample: {"t","id","kind","x","y","z"}.
#[derive(Serialize, Deserialize)]
struct SampleWire {
    t: f64,
    id: String,
    kind: SensorKind,
    x: f64,
    y: f64,
    z: f64,
}

impl From<&SensorSample> for SampleWire {
    fn from(s: &SensorSample) -> Self {
        SampleWire {
            t: s.t,
            id: s.sensor_id.clone(),
            kind: s.kind,
            x: s.pos.x,
            y: s.pos.y,
            z: s.pos.z,
        }
    }
}

impl From<SampleWire> for SensorSample {
    fn from(w: SampleWire) -> Self {
        SensorSample::new(w.t, w.id, w.kind, crate::geometry::Point3::new(w.x, w.y, w.z))
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum LineWire {
    Sample(SampleWire),
    Annotation(Annotation),
    Decision(DecisionEvent),
    Header(LogHeader),
}

/// Serializes one record to its single-line JSON form (no newline).
pub fn record_to_line(record: &Record) -> String {
    match record {
        Record::Sample(s) => serde_json::to_string(&SampleWire::from(s)),
        Record::Decision(d) => serde_json::to_string(d),
        Record::Annotation(a) => serde_json::to_string(a),
    }
    .expect("record serialization is infallible")
}

// ── Writer ─────────────────────────────────────────────────────────────────

/// Append-only log writer. The header goes out on construction; every
/// append enforces non-decreasing timestamps and flushes before returning.
pub struct MatchLogWriter<W: Write> {
    out: W,
    last_t: Option<f64>,
    records_written: u64,
}

impl MatchLogWriter<BufWriter<File>> {
    pub fn create(path: &Path, header: &LogHeader) -> Result<Self, LogError> {
        let file = File::create(path)?;
        Self::new(BufWriter::new(file), header)
    }
}

impl<W: Write> MatchLogWriter<W> {
    pub fn new(mut out: W, header: &LogHeader) -> Result<Self, LogError> {
        let line = serde_json::to_string(header).expect("header serialization is infallible");
        out.write_all(line.as_bytes())?;
        out.write_all(b"\n")?;
        out.flush()?;
        Ok(Self {
            out,
            last_t: None,
            records_written: 0,
        })
    }

    pub fn append(&mut self, record: &Record) -> Result<(), LogError> {
        let t = record.t();
        if let Some(last) = self.last_t {
            if t < last {
                return Err(LogError::OutOfOrder { t, last });
            }
        }
        let line = record_to_line(record);
        self.out.write_all(line.as_bytes())?;
        self.out.write_all(b"\n")?;
        self.out.flush()?;
        self.last_t = Some(t);
        self.records_written += 1;
        Ok(())
    }

    pub fn records_written(&self) -> u64 {
        self.records_written
    }

    pub fn into_inner(self) -> W {
        self.out
    }
}

// ── Reader ─────────────────────────────────────────────────────────────────

/// Parses a whole log file. An empty file is an empty log; any non-empty
/// file must start with a header of the supported version. Corrupt lines
/// report their line number and byte offset.
pub fn read_log(path: &Path) -> Result<(Option<LogHeader>, Vec<Record>), LogError> {
    let file = File::open(path)?;
    read_log_from(BufReader::new(file), &path.display().to_string())
}

/// Parses a log from any reader; `origin` labels errors.
pub fn read_log_from<R: Read>(
    reader: BufReader<R>,
    origin: &str,
) -> Result<(Option<LogHeader>, Vec<Record>), LogError> {
    let mut header: Option<LogHeader> = None;
    let mut records = Vec::new();
    let mut byte_offset: u64 = 0;
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        let line_no = idx + 1;
        let corrupt = |message: String| LogError::CorruptRecord {
            path: origin.to_string(),
            line: line_no,
            byte_offset,
            message,
        };
        if line.trim().is_empty() {
            byte_offset += line.len() as u64 + 1;
            continue;
        }
        let parsed: LineWire =
            serde_json::from_str(&line).map_err(|e| corrupt(e.to_string()))?;
        match parsed {
            LineWire::Header(h) => {
                if h.format != FORMAT_VERSION {
                    return Err(LogError::VersionMismatch { found: h.format });
                }
                if header.is_some() {
                    return Err(corrupt("second header line".to_string()));
                }
                if !records.is_empty() {
                    return Err(corrupt("header after records".to_string()));
                }
                header = Some(h);
            }
            LineWire::Sample(s) => {
                if header.is_none() {
                    return Err(LogError::MissingHeader);
                }
                records.push(Record::Sample(s.into()));
            }
            LineWire::Decision(d) => {
                if header.is_none() {
                    return Err(LogError::MissingHeader);
                }
                records.push(Record::Decision(d));
            }
            LineWire::Annotation(a) => {
                if header.is_none() {
                    return Err(LogError::MissingHeader);
                }
                records.push(Record::Annotation(a));
            }
        }
        byte_offset += line.len() as u64 + 1;
    }
    Ok((header, records))
}
