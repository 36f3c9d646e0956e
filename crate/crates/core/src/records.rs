//! JSON Lines record shapes written to `events.jsonl`: one snapshot record,
//! one characterization record and one recommendation record per cycle.
//! Floating-point fields are rounded to 6 decimal places on output.

use serde::{Serialize, Serializer};

use crate::characterization::CharacterizationReport;
use crate::fsf::Coord;
use crate::prediction::Recommendation;
use crate::representation::RepresentationSnapshot;
use crate::sim::ActionKind;

/// f64 rounded to 6 decimal places when serialized.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct F6(pub f64);

impl Serialize for F6 {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_f64((self.0 * 1e6).round() / 1e6)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SnapshotRecord {
    pub cycle: u64,
    pub agents: Vec<AgentRecord>,
    pub links: Vec<LinkRecord>,
    pub retired: Vec<u64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct AgentRecord {
    pub id: u64,
    pub selector: String,
    pub state: &'static str,
    pub i1: F6,
    pub i2: F6,
    pub born: u64,
}

#[derive(Debug, Clone, Serialize)]
pub struct LinkRecord {
    pub a: u64,
    pub b: u64,
    pub value: F6,
    pub kind: &'static str,
}

impl From<&RepresentationSnapshot> for SnapshotRecord {
    fn from(snapshot: &RepresentationSnapshot) -> Self {
        Self {
            cycle: snapshot.cycle,
            agents: snapshot
                .agents
                .iter()
                .map(|a| AgentRecord {
                    id: a.id,
                    selector: a.selector.to_string(),
                    state: a.state.label(),
                    i1: F6(a.i1),
                    i2: F6(a.i2),
                    born: a.born_cycle,
                })
                .collect(),
            links: snapshot
                .links
                .iter()
                .map(|l| LinkRecord {
                    a: l.a,
                    b: l.b,
                    value: F6(l.value),
                    kind: l.kind.label(),
                })
                .collect(),
            retired: snapshot.retired.clone(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CharacterizationRecord {
    pub cycle: u64,
    pub active: Vec<u64>,
    pub passive: Vec<u64>,
    pub stable: Vec<u64>,
    pub facts: Vec<FactRecord>,
}

#[derive(Debug, Clone, Serialize)]
pub struct FactRecord {
    pub tag: &'static str,
    pub agents: Vec<u64>,
    pub evidence: String,
}

impl From<&CharacterizationReport> for CharacterizationRecord {
    fn from(report: &CharacterizationReport) -> Self {
        Self {
            cycle: report.cycle,
            active: report.groups.active.clone(),
            passive: report.groups.passive.clone(),
            stable: report.groups.stable.clone(),
            facts: report
                .facts
                .iter()
                .map(|f| FactRecord {
                    tag: f.tag.label(),
                    agents: f.agents.clone(),
                    evidence: f.evidence.clone(),
                })
                .collect(),
        }
    }
}

/// Present every cycle; the body is null for runs without the deciding
/// policy (and for replays).
#[derive(Debug, Clone, Serialize)]
pub struct RecommendationRecord {
    pub cycle: u64,
    pub recommendation: Option<RecommendationBody>,
}

#[derive(Debug, Clone, Serialize)]
pub struct RecommendationBody {
    pub template: &'static str,
    pub actions: Vec<ActionRecord>,
    pub confidence: F6,
    pub support: Vec<SupportRecord>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ActionRecord {
    #[serde(rename = "brigadeId")]
    pub brigade_id: u64,
    pub kind: &'static str,
    pub target: Option<Coord>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SupportRecord {
    #[serde(rename = "caseId")]
    pub case_id: u64,
    pub similarity: F6,
    pub weight: F6,
}

impl RecommendationRecord {
    pub fn new(cycle: u64, recommendation: Option<&Recommendation>) -> Self {
        Self {
            cycle,
            recommendation: recommendation.map(|rec| RecommendationBody {
                template: rec.template.label(),
                actions: rec
                    .actions
                    .iter()
                    .map(|a| match a.kind {
                        ActionKind::Dispatch(target) => ActionRecord {
                            brigade_id: a.brigade_id,
                            kind: "dispatch",
                            target: Some(target),
                        },
                        ActionKind::Hold => ActionRecord {
                            brigade_id: a.brigade_id,
                            kind: "hold",
                            target: None,
                        },
                    })
                    .collect(),
                confidence: F6(rec.confidence),
                support: rec
                    .support
                    .iter()
                    .map(|s| SupportRecord {
                        case_id: s.case_id,
                        similarity: F6(s.similarity),
                        weight: F6(s.weight),
                    })
                    .collect(),
            }),
        }
    }
}
