//! Deterministic sensing simulator, umpiring decision engine, and match-log
//! pipeline for an instrumented cricket ground.
//!
//! Position sensors in the ball, the players' shoes, and the ground report
//! through ranging access points at 100 Hz; this crate turns those streams
//! into umpiring decisions (front-foot no-balls, fielding-restriction
//! checks, LBW stump projections) and game analytics, with every sample and
//! verdict captured in an append-only, bit-replayable NDJSON log.
//!
//! Modules follow the data path:
//!
//! - [`geometry`]: planar/spatial primitives and the angle, arc, and
//!   signed-distance predicates the decisions are built from.
//! - [`ground`]: the dimensional model of the ground and its sensor frames.
//! - [`positioning`]: range trilateration and per-sensor tracks.
//! - [`sim`]: the scripted delivery simulator producing ground truth plus
//!   the sensor log a real ground would have recorded.
//! - [`decision`]: the three umpiring decisions.
//! - [`analytics`]: bowling speed, strike rate/power, fielding coverage.
//! - [`pipeline`]: wire format, match-log persistence, the four-stage
//!   processing pipeline, replay verification, and presentation sinks.

pub mod analytics;
pub mod config;
pub mod decision;
pub mod geometry;
pub mod ground;
pub mod pipeline;
pub mod positioning;
pub mod sim;

pub use decision::{
    DecisionBody, DecisionEvent, DecisionKind, DeliveryOutcome, DeliverySlice, FieldingRule,
    FieldingVerdict, LbwVerdict, NoBallVerdict, TrajectoryFit,
};
pub use geometry::{Point2, Point3, StadiumShape, Vec2, Vec3};
pub use ground::{default_layout, load_layout, End, GroundLayout, StumpZone};
pub use pipeline::{
    replay, run_pipeline, LogHeader, MatchLogWriter, Pipeline, PipelineSummary, Record,
};
pub use positioning::{RangeSet, SensorKind, SensorSample, Track};
pub use sim::{
    scenario_from_config, scenario_to_config, simulate_delivery, simulate_fielding, DeliverySpec,
    FieldingSpec, ScenarioTruth,
};
