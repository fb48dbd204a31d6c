//! `aware-ground`: simulate deliveries, decide them, verify logs, and run
//! analytics, all over the NDJSON match-log format.
//!
//! Exit codes: 0 success, 1 usage error, 2 data error (unreadable, corrupt,
//! or mismatched inputs), 3 decision-engine error (a decision failed or a
//! replay diverged). Diagnostics go to standard error; with `--out -` the
//! standard output carries nothing but NDJSON records.

use aware_core::analytics::{ball_speed, fielder_coverage, strike_power};
use aware_core::decision::{bounce_split, FieldingRule};
use aware_core::ground::{default_layout, load_layout, GroundLayout};
use aware_core::pipeline::{
    delivery_records, read_log, replay, run_pipeline, AnnotationBody, LogError, LogHeader,
    MatchLogWriter, Record, ReportFileSink, ScoreboardSink, Sink, UmpireAlertSink,
};
use aware_core::positioning::{SensorKind, Track};
use aware_core::sim::{scenario_from_config, simulate_delivery, simulate_fielding};
use clap::error::ErrorKind as ClapErrorKind;
use clap::{Args, Parser, Subcommand};
use std::collections::BTreeMap;
use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "aware-ground",
    version,
    about = "Ground sensing simulator, umpiring decision engine, and match-log tools"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct RuleArgs {
    /// Fielders allowed outside the ring during the restricted overs.
    #[arg(long, default_value_t = 2)]
    rule_max_outside: u32,
    /// Inclusive over range the restriction applies to, as `a-b`.
    #[arg(long, default_value = "1-15")]
    rule_overs: String,
}

impl RuleArgs {
    fn parse_rule(&self) -> Result<FieldingRule, CliError> {
        let (a, b) = self
            .rule_overs
            .split_once('-')
            .ok_or_else(|| CliError::Usage(format!("--rule-overs expects `a-b`, got `{}`", self.rule_overs)))?;
        let lo: u32 = a
            .trim()
            .parse()
            .map_err(|_| CliError::Usage(format!("--rule-overs: `{a}` is not an over number")))?;
        let hi: u32 = b
            .trim()
            .parse()
            .map_err(|_| CliError::Usage(format!("--rule-overs: `{b}` is not an over number")))?;
        if lo == 0 || hi < lo {
            return Err(CliError::Usage(format!(
                "--rule-overs: `{}` is not a non-empty over range",
                self.rule_overs
            )));
        }
        Ok(FieldingRule {
            active_overs: (lo, hi),
            max_outside: self.rule_max_outside,
        })
    }
}

#[derive(Subcommand)]
enum Command {
    /// Simulate a scripted delivery into a match log.
    Simulate {
        /// Scenario configuration document.
        #[arg(long)]
        scenario: PathBuf,
        /// Ground layout configuration; defaults to the standard ground.
        #[arg(long)]
        layout: Option<PathBuf>,
        /// Noise generator seed.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Per-axis sensor noise sigma, meters.
        #[arg(long, default_value_t = 0.0)]
        noise: f64,
        /// Output log path, or `-` for standard output.
        #[arg(long, default_value = "-")]
        out: String,
    },
    /// Run the decision pipeline over an existing sample log.
    Decide {
        /// Input match log.
        #[arg(long)]
        log: PathBuf,
        #[arg(long)]
        layout: Option<PathBuf>,
        /// Output log (input records plus decisions), or `-`.
        #[arg(long, default_value = "-")]
        out: String,
        /// Also write the run summary as NDJSON to this path.
        #[arg(long)]
        report: Option<PathBuf>,
        #[command(flatten)]
        rule: RuleArgs,
    },
    /// Verify a log's stored decisions and re-emit it.
    Replay {
        #[arg(long)]
        log: PathBuf,
        #[arg(long)]
        layout: Option<PathBuf>,
        /// Where to re-emit the log, or `-`.
        #[arg(long, default_value = "-")]
        out: String,
        #[command(flatten)]
        rule: RuleArgs,
    },
    /// Compute analytics reports from a log.
    Analyze {
        #[arg(long)]
        log: PathBuf,
        #[arg(long)]
        layout: Option<PathBuf>,
        /// Report output (NDJSON), or `-`.
        #[arg(long, default_value = "-")]
        out: String,
        /// Coverage grid cell size, meters.
        #[arg(long, default_value_t = 2.0)]
        cell_size: f64,
    },
}

enum CliError {
    Usage(String),
    Data(String),
    Engine(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Data(_) => 2,
            CliError::Engine(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Data(m) | CliError::Engine(m) => m,
        }
    }
}

impl From<LogError> for CliError {
    fn from(e: LogError) -> Self {
        CliError::Data(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // Help and version requests are successes; anything else is a
            // usage error and must exit 1.
            return match e.kind() {
                ClapErrorKind::DisplayHelp | ClapErrorKind::DisplayVersion => {
                    print!("{e}");
                    ExitCode::SUCCESS
                }
                _ => {
                    eprint!("{e}");
                    ExitCode::from(1)
                }
            };
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.code())
        }
    }
}

fn run(command: Command) -> Result<(), CliError> {
    match command {
        Command::Simulate {
            scenario,
            layout,
            seed,
            noise,
            out,
        } => cmd_simulate(&scenario, layout.as_deref(), seed, noise, &out),
        Command::Decide {
            log,
            layout,
            out,
            report,
            rule,
        } => cmd_decide(&log, layout.as_deref(), &out, report.as_deref(), &rule.parse_rule()?),
        Command::Replay {
            log,
            layout,
            out,
            rule,
        } => cmd_replay(&log, layout.as_deref(), &out, &rule.parse_rule()?),
        Command::Analyze {
            log,
            layout,
            out,
            cell_size,
        } => cmd_analyze(&log, layout.as_deref(), &out, cell_size),
    }
}

fn read_log_arg(path: &Path) -> Result<(Option<LogHeader>, Vec<Record>), CliError> {
    read_log(path).map_err(|e| match e {
        LogError::Io(io) => CliError::Data(format!("cannot read {}: {io}", path.display())),
        other => CliError::Data(other.to_string()),
    })
}

fn load_layout_arg(path: Option<&Path>) -> Result<GroundLayout, CliError> {
    match path {
        None => Ok(default_layout()),
        Some(p) => {
            let text = fs::read_to_string(p)
                .map_err(|e| CliError::Data(format!("cannot read layout {}: {e}", p.display())))?;
            load_layout(&text).map_err(|e| CliError::Data(format!("{}: {e}", p.display())))
        }
    }
}

enum OutTarget {
    Stdout,
    File(PathBuf),
}

impl OutTarget {
    fn parse(out: &str) -> OutTarget {
        if out == "-" {
            OutTarget::Stdout
        } else {
            OutTarget::File(PathBuf::from(out))
        }
    }

    fn writer(&self) -> Result<Box<dyn Write>, CliError> {
        match self {
            OutTarget::Stdout => Ok(Box::new(BufWriter::new(io::stdout()))),
            OutTarget::File(p) => {
                let file = fs::File::create(p).map_err(|e| {
                    CliError::Data(format!("cannot create {}: {e}", p.display()))
                })?;
                Ok(Box::new(BufWriter::new(file)))
            }
        }
    }

    /// Where human-readable summaries go: stdout stays clean when it
    /// carries the data itself.
    fn summary_out(&self, text: &str) {
        match self {
            OutTarget::Stdout => eprint!("{text}"),
            OutTarget::File(_) => print!("{text}"),
        }
    }
}

fn cmd_simulate(
    scenario_path: &Path,
    layout_path: Option<&Path>,
    seed: u64,
    noise: f64,
    out: &str,
) -> Result<(), CliError> {
    let layout = load_layout_arg(layout_path)?;
    let text = fs::read_to_string(scenario_path).map_err(|e| {
        CliError::Data(format!("cannot read scenario {}: {e}", scenario_path.display()))
    })?;
    let (delivery, fielding) = scenario_from_config(&text)
        .map_err(|e| CliError::Data(format!("{}: {e}", scenario_path.display())))?;

    let (_, mut samples) = simulate_delivery(&layout, &delivery, 100.0, seed, noise)
        .map_err(|e| CliError::Data(e.to_string()))?;
    samples.extend(
        simulate_fielding(&layout, &fielding, 0.0).map_err(|e| CliError::Data(e.to_string()))?,
    );
    let records = delivery_records(
        "d1",
        fielding.over_number,
        samples,
        delivery.bat_contact.map(|c| c.t),
    );

    let target = OutTarget::parse(out);
    let header = LogHeader::new(layout.layout_hash(), 100.0);
    let mut writer = MatchLogWriter::new(target.writer()?, &header)?;
    for record in &records {
        writer.append(record)?;
    }
    eprintln!(
        "simulated delivery d1: {} records (seed {seed}, noise {noise})",
        writer.records_written()
    );
    Ok(())
}

fn cmd_decide(
    log_path: &Path,
    layout_path: Option<&Path>,
    out: &str,
    report: Option<&Path>,
    rule: &FieldingRule,
) -> Result<(), CliError> {
    let layout = load_layout_arg(layout_path)?;
    let (header, records) = read_log_arg(log_path)?;
    if let Some(h) = &header {
        let expected = layout.layout_hash();
        if h.layout_hash != expected {
            return Err(LogError::LayoutMismatch {
                expected,
                found: h.layout_hash.clone(),
            }
            .into());
        }
    }
    let sample_hz = header.as_ref().map(|h| h.sample_hz).unwrap_or(100.0);

    let target = OutTarget::parse(out);
    let mut writer = MatchLogWriter::new(
        target.writer()?,
        &LogHeader::new(layout.layout_hash(), sample_hz),
    )?;

    let stderr = io::stderr();
    let mut umpire = UmpireAlertSink::new(stderr.lock());
    let mut scoreboard = ScoreboardSink::new();
    let mut report_sink = match report {
        Some(p) => {
            let file = fs::File::create(p)
                .map_err(|e| CliError::Data(format!("cannot create {}: {e}", p.display())))?;
            Some(ReportFileSink::new("report", BufWriter::new(file)))
        }
        None => None,
    };
    let mut sinks: Vec<&mut dyn Sink> = vec![&mut umpire, &mut scoreboard];
    if let Some(r) = report_sink.as_mut() {
        sinks.push(r);
    }

    let summary = run_pipeline(&layout, *rule, records, sinks, &mut writer)?;

    let mut text = summary.render_text();
    if !scoreboard.tallies().is_empty() {
        text.push_str("scoreboard\n");
        for (key, count) in scoreboard.tallies() {
            text.push_str(&format!("  {key:<32} {count}\n"));
        }
    }
    target.summary_out(&text);

    if summary.failures.is_empty() {
        Ok(())
    } else {
        Err(CliError::Engine(format!(
            "{} decision(s) could not be made",
            summary.failures.len()
        )))
    }
}

fn cmd_replay(
    log_path: &Path,
    layout_path: Option<&Path>,
    out: &str,
    rule: &FieldingRule,
) -> Result<(), CliError> {
    let layout = load_layout_arg(layout_path)?;
    let report = replay(log_path, &layout, rule).map_err(|e| match e {
        LogError::Io(io) => CliError::Data(format!("cannot read {}: {io}", log_path.display())),
        other => CliError::Data(other.to_string()),
    })?;

    // Re-emit the stored log byte for byte.
    let raw = fs::read(log_path)
        .map_err(|e| CliError::Data(format!("cannot read {}: {e}", log_path.display())))?;
    let target = OutTarget::parse(out);
    let mut w = target.writer()?;
    w.write_all(&raw)
        .and_then(|()| w.flush())
        .map_err(|e| CliError::Data(format!("cannot write {out}: {e}")))?;

    eprintln!(
        "replayed {} records / {} deliveries: {} stored decisions, {} divergences",
        report.records.len(),
        report.deliveries,
        report.stored_decisions,
        report.divergences.len()
    );
    for d in &report.divergences {
        eprintln!(
            "divergence in {}: {}",
            d.delivery_id.as_deref().unwrap_or("-"),
            d.detail
        );
    }
    if report.divergences.is_empty() {
        Ok(())
    } else {
        Err(CliError::Engine(format!(
            "{} divergence(s) between stored and recomputed decisions",
            report.divergences.len()
        )))
    }
}

fn cmd_analyze(
    log_path: &Path,
    layout_path: Option<&Path>,
    out: &str,
    cell_size: f64,
) -> Result<(), CliError> {
    if !(0.5..=10.0).contains(&cell_size) {
        return Err(CliError::Usage(format!(
            "--cell-size {cell_size} must be within [0.5, 10]"
        )));
    }
    let layout = load_layout_arg(layout_path)?;
    let (_, records) = read_log_arg(log_path)?;

    // Group ball samples by delivery; player tracks span the whole log.
    struct DeliveryData {
        id: String,
        ball: Track,
        contact_t: Option<f64>,
    }
    let mut deliveries: Vec<DeliveryData> = Vec::new();
    let mut current: Option<DeliveryData> = None;
    let mut players: BTreeMap<String, Track> = BTreeMap::new();
    for record in &records {
        match record {
            Record::Annotation(a) => match &a.body {
                AnnotationBody::DeliveryStart { delivery_id, .. } => {
                    if let Some(d) = current.take() {
                        deliveries.push(d);
                    }
                    current = Some(DeliveryData {
                        id: delivery_id.clone(),
                        ball: Track::new("ball"),
                        contact_t: None,
                    });
                }
                AnnotationBody::BatContact => {
                    if let Some(d) = current.as_mut() {
                        d.contact_t = Some(a.t);
                    }
                }
                AnnotationBody::DeliveryEnd { .. } => {
                    if let Some(d) = current.take() {
                        deliveries.push(d);
                    }
                }
            },
            Record::Sample(s) => match s.kind {
                SensorKind::Ball => {
                    let d = current.get_or_insert_with(|| DeliveryData {
                        id: "implicit".to_string(),
                        ball: Track::new(s.sensor_id.clone()),
                        contact_t: None,
                    });
                    if d.ball.is_empty() && d.ball.sensor_id() != s.sensor_id {
                        d.ball = Track::new(s.sensor_id.clone());
                    }
                    if s.sensor_id == d.ball.sensor_id() {
                        let _ = d.ball.ingest(s.clone());
                    }
                }
                SensorKind::Player => {
                    let track = players
                        .entry(s.sensor_id.clone())
                        .or_insert_with(|| Track::new(s.sensor_id.clone()));
                    let _ = track.ingest(s.clone());
                }
                SensorKind::BowlerFoot => {}
            },
            Record::Decision(_) => {}
        }
    }
    if let Some(d) = current.take() {
        deliveries.push(d);
    }

    let target = OutTarget::parse(out);
    let mut w = target.writer()?;
    let mut lines = Vec::new();
    let mut summary = String::new();

    for d in &deliveries {
        if d.ball.len() < 4 {
            continue;
        }
        let windows = bounce_split(&d.ball, layout.ball_radius)
            .map_err(|e| CliError::Engine(format!("delivery {}: {e}", d.id)))?;
        let (w0, w1) = windows[0];
        if let Ok(speed) = ball_speed(&d.ball, (w0, w1)) {
            lines.push(serde_json::json!({
                "report": "bowling_speed",
                "delivery_id": d.id,
                "window": [w0, w1],
                "mps": speed,
                "kmh": speed * 3.6,
            }));
            summary.push_str(&format!(
                "delivery {:<10} bowling speed {:6.2} m/s ({:6.1} km/h)\n",
                d.id,
                speed,
                speed * 3.6
            ));
        }
        if let Some(tc) = d.contact_t {
            if let Ok(power) = strike_power(&d.ball, tc) {
                lines.push(serde_json::json!({
                    "report": "strike_power",
                    "delivery_id": d.id,
                    "bat_contact_t": tc,
                    "mps": power,
                    "kmh": power * 3.6,
                }));
                summary.push_str(&format!(
                    "delivery {:<10} strike power  {:6.2} m/s ({:6.1} km/h)\n",
                    d.id,
                    power,
                    power * 3.6
                ));
            }
        }
    }

    let tracks: Vec<Track> = players.into_values().collect();
    if !tracks.is_empty() {
        for coverage in fielder_coverage(&tracks, cell_size) {
            let cells: Vec<_> = coverage
                .grid
                .occupied_cells()
                .into_iter()
                .map(|(ix, iy, secs)| serde_json::json!([ix, iy, secs]))
                .collect();
            lines.push(serde_json::json!({
                "report": "fielder_coverage",
                "sensor_id": coverage.sensor_id,
                "distance_m": coverage.distance_covered,
                "cell_size": coverage.grid.cell_size,
                "grid_origin": [coverage.grid.origin.x, coverage.grid.origin.y],
                "occupied_cells": cells,
            }));
            summary.push_str(&format!(
                "player {:<12} distance {:8.2} m over {} cells\n",
                coverage.sensor_id,
                coverage.distance_covered,
                coverage.grid.occupied_cells().len()
            ));
        }
    }

    for line in &lines {
        let text = serde_json::to_string(line)
            .map_err(|e| CliError::Data(format!("cannot serialize report: {e}")))?;
        w.write_all(text.as_bytes())
            .and_then(|()| w.write_all(b"\n"))
            .map_err(|e| CliError::Data(format!("cannot write {out}: {e}")))?;
    }
    w.flush()
        .map_err(|e| CliError::Data(format!("cannot write {out}: {e}")))?;
    target.summary_out(&summary);
    Ok(())
}
