//! Deterministic replay: read a log back, feed the stored samples through
//! the decision engine exactly as live ingestion did, and verify the
//! recomputed decisions against the stored ones field for field.

use super::log::{read_log, Annotation, AnnotationBody, LogError, LogHeader, Record};
use super::{build_slice, sort_canonical};
use crate::decision::{decide_delivery, DecisionEvent, FieldingRule};
use crate::ground::GroundLayout;
use std::path::Path;

/// One stored decision the replay could not reproduce.
#[derive(Debug, Clone, PartialEq)]
pub struct Divergence {
    pub delivery_id: Option<String>,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReplayReport {
    pub header: Option<LogHeader>,
    pub records: Vec<Record>,
    pub deliveries: usize,
    pub stored_decisions: usize,
    pub recomputed: Vec<DecisionEvent>,
    pub divergences: Vec<Divergence>,
}

struct DeliveryGroup {
    id: Option<String>,
    over: u32,
    contact_t: Option<f64>,
    records: Vec<Record>,
    stored: Vec<DecisionEvent>,
}

impl DeliveryGroup {
    fn new() -> Self {
        Self {
            id: None,
            over: 1,
            contact_t: None,
            records: Vec::new(),
            stored: Vec::new(),
        }
    }

    fn is_empty(&self) -> bool {
        self.records.is_empty() && self.stored.is_empty()
    }
}

// Same delivery boundaries as the live pipeline: explicit markers when
// present, otherwise one implicit delivery.
fn split_deliveries(records: &[Record]) -> Vec<DeliveryGroup> {
    let mut groups: Vec<DeliveryGroup> = Vec::new();
    let mut current = DeliveryGroup::new();
    for record in records {
        match record {
            Record::Decision(d) => current.stored.push(d.clone()),
            Record::Annotation(Annotation { t, body }) => match body {
                AnnotationBody::DeliveryStart { delivery_id, over } => {
                    if !current.is_empty() {
                        groups.push(std::mem::replace(&mut current, DeliveryGroup::new()));
                    }
                    current.id = Some(delivery_id.clone());
                    current.over = *over;
                    current.records.push(record.clone());
                }
                AnnotationBody::BatContact => {
                    current.contact_t = Some(*t);
                    current.records.push(record.clone());
                }
                AnnotationBody::DeliveryEnd { .. } => {
                    current.records.push(record.clone());
                    groups.push(std::mem::replace(&mut current, DeliveryGroup::new()));
                }
            },
            Record::Sample(_) => current.records.push(record.clone()),
        }
    }
    if !current.is_empty() {
        groups.push(current);
    }
    groups
}

/// Replays the log at `path`, recomputing every delivery's decisions with
/// the given layout and rule. Decisions stored in the log must match the
/// recomputed ones exactly; each mismatch becomes a [`Divergence`].
///
/// The layout must be the one the log was recorded against (checked via
/// the header hash).
pub fn replay(
    path: &Path,
    layout: &GroundLayout,
    rule: &FieldingRule,
) -> Result<ReplayReport, LogError> {
    let (header, records) = read_log(path)?;
    if let Some(h) = &header {
        let expected = layout.layout_hash();
        if h.layout_hash != expected {
            return Err(LogError::LayoutMismatch {
                expected,
                found: h.layout_hash.clone(),
            });
        }
    }

    let groups = split_deliveries(&records);
    let mut recomputed = Vec::new();
    let mut divergences = Vec::new();
    let mut stored_decisions = 0;

    for group in &groups {
        let mut group_records = group.records.clone();
        sort_canonical(&mut group_records);
        let slice = build_slice(&group_records, group.id.clone(), group.over, group.contact_t);
        let outcome = decide_delivery(layout, rule, &slice);

        stored_decisions += group.stored.len();
        if !group.stored.is_empty() {
            let stored_wire: Vec<String> = group
                .stored
                .iter()
                .map(|d| serde_json::to_string(d).expect("serializable"))
                .collect();
            let recomputed_wire: Vec<String> = outcome
                .events
                .iter()
                .map(|d| serde_json::to_string(d).expect("serializable"))
                .collect();
            if stored_wire.len() != recomputed_wire.len() {
                divergences.push(Divergence {
                    delivery_id: group.id.clone(),
                    detail: format!(
                        "stored {} decisions, recomputed {}",
                        stored_wire.len(),
                        recomputed_wire.len()
                    ),
                });
            } else {
                for (i, (s, r)) in stored_wire.iter().zip(&recomputed_wire).enumerate() {
                    if s != r {
                        divergences.push(Divergence {
                            delivery_id: group.id.clone(),
                            detail: format!("decision {i}: stored {s} recomputed {r}"),
                        });
                    }
                }
            }
        }
        recomputed.extend(outcome.events);
    }

    Ok(ReplayReport {
        header,
        records,
        deliveries: groups.len(),
        stored_decisions,
        recomputed,
        divergences,
    })
}
