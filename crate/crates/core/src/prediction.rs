//! Third kernel layer: case-based evaluation of the current situation.
//!
//! A cycle is condensed into a 12-feature signature, matched against a
//! persisted case base by similarity-weighted retrieval, and the best
//! case's action template is expanded into concrete brigade dispatches.
//! Observed outcomes feed back into the case weights.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::characterization::Groups;
use crate::fsf::{Coord, SelectorType};
use crate::representation::{AgentView, AutomatonState, LinkKind, RepresentationSnapshot};
use crate::sim::{Action, ActionKind};

pub const SIGNATURE_LEN: usize = 12;
pub const CASEBASE_VERSION: u32 = 1;

/// Learning and retrieval parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct PredictionConfig {
    /// Cases retrieved per decision.
    pub k: usize,
    /// Learning rate for weight updates.
    pub alpha: f64,
    /// Cycles between a decision and its outcome measurement.
    pub horizon: u64,
}

impl Default for PredictionConfig {
    fn default() -> Self {
        Self {
            k: 3,
            alpha: 0.1,
            horizon: 10,
        }
    }
}

/// Fixed-length situation summary; every feature is normalized to [0, 1].
///
/// Features: group sizes (active, passive, stable), fire and brigade agent
/// counts (all divided by 1 + live agents), mean i1/i2 over fires and over
/// brigades (mapped by (x+1)/2, 0.5 when the class is empty), opposition
/// and alliance link counts (divided by 1 + links), and the count of agents
/// in the strong state (divided by 1 + live agents).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Signature(pub [f64; SIGNATURE_LEN]);

impl Signature {
    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }
}

pub fn compute_signature(snapshot: &RepresentationSnapshot, groups: &Groups) -> Signature {
    let live = snapshot.agents.len();
    let agent_denom = (1 + live) as f64;

    let fires: Vec<&AgentView> = snapshot.agents_of_type(SelectorType::Fire).collect();
    let brigades: Vec<&AgentView> = snapshot.agents_of_type(SelectorType::FireBrigade).collect();

    let mean_mapped = |views: &[&AgentView], pick: fn(&AgentView) -> f64| -> f64 {
        if views.is_empty() {
            return 0.5;
        }
        let mean = views.iter().map(|v| pick(v)).sum::<f64>() / views.len() as f64;
        (mean + 1.0) / 2.0
    };

    let links = snapshot.links.len();
    let link_denom = (1 + links) as f64;
    let oppositions = snapshot
        .links
        .iter()
        .filter(|l| l.kind == LinkKind::Opposition)
        .count();
    let alliances = links - oppositions;
    let strong = snapshot
        .agents
        .iter()
        .filter(|a| a.state == AutomatonState::Strong)
        .count();

    Signature([
        groups.active.len() as f64 / agent_denom,
        groups.passive.len() as f64 / agent_denom,
        groups.stable.len() as f64 / agent_denom,
        fires.len() as f64 / agent_denom,
        brigades.len() as f64 / agent_denom,
        mean_mapped(&fires, |a| a.i1),
        mean_mapped(&fires, |a| a.i2),
        mean_mapped(&brigades, |a| a.i1),
        mean_mapped(&brigades, |a| a.i2),
        oppositions as f64 / link_denom,
        alliances as f64 / link_denom,
        strong as f64 / agent_denom,
    ])
}

/// Normalized L1 similarity: `1 - (Σ|a_i - b_i|) / 12`. Symmetric, 1 only
/// for identical signatures.
pub fn similarity(a: &Signature, b: &Signature) -> f64 {
    let l1: f64 = a
        .0
        .iter()
        .zip(b.0.iter())
        .map(|(x, y)| (x - y).abs())
        .sum();
    1.0 - l1 / SIGNATURE_LEN as f64
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ActionTemplate {
    AttackStrongest,
    AttackNearest,
    Regroup,
    Hold,
}

impl ActionTemplate {
    pub fn label(self) -> &'static str {
        match self {
            ActionTemplate::AttackStrongest => "ATTACK_STRONGEST",
            ActionTemplate::AttackNearest => "ATTACK_NEAREST",
            ActionTemplate::Regroup => "REGROUP",
            ActionTemplate::Hold => "HOLD",
        }
    }
}

/// One stored past situation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Case {
    pub id: u64,
    pub signature: Signature,
    pub consequences: Vec<String>,
    pub template: ActionTemplate,
    /// Learned usefulness, always within [0, 1].
    pub weight: f64,
}

#[derive(Debug, Error)]
pub enum CaseBaseError {
    #[error("unsupported case base version {0}")]
    Version(u32),
    #[error("case {id} has a signature of length {len}, expected 12")]
    SignatureLength { id: u64, len: usize },
    #[error("invalid case base: {0}")]
    Format(String),
    #[error("case base I/O: {0}")]
    Io(#[from] std::io::Error),
}

/// Persisted collection of cases (the scenario base).
#[derive(Debug, Clone, Default, PartialEq)]
pub struct CaseBase {
    cases: Vec<Case>,
    next_id: u64,
}

#[derive(Serialize, Deserialize)]
struct CaseBaseFile {
    version: u32,
    #[serde(rename = "nextId")]
    next_id: u64,
    cases: Vec<CaseFileEntry>,
}

#[derive(Serialize, Deserialize)]
struct CaseFileEntry {
    id: u64,
    signature: Vec<f64>,
    consequences: Vec<String>,
    template: ActionTemplate,
    weight: f64,
}

impl CaseBase {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(
        &mut self,
        signature: Signature,
        consequences: Vec<String>,
        template: ActionTemplate,
        weight: f64,
    ) -> u64 {
        let id = self.next_id;
        self.next_id += 1;
        self.cases.push(Case {
            id,
            signature,
            consequences,
            template,
            weight: weight.clamp(0.0, 1.0),
        });
        id
    }

    pub fn cases(&self) -> &[Case] {
        &self.cases
    }

    pub fn len(&self) -> usize {
        self.cases.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cases.is_empty()
    }

    /// Top-k cases by `similarity * weight`, descending, ties broken by
    /// lower case id. A full scan over the base; an empty base yields an
    /// empty ranking.
    pub fn retrieve(&self, signature: &Signature, k: usize) -> Vec<ScoredCase> {
        debug_assert!(k >= 1);
        let mut scored: Vec<ScoredCase> = self
            .cases
            .iter()
            .map(|case| ScoredCase {
                case_id: case.id,
                similarity: similarity(signature, &case.signature),
                weight: case.weight,
                template: case.template,
            })
            .collect();
        scored.sort_by(|x, y| {
            y.score()
                .total_cmp(&x.score())
                .then_with(|| x.case_id.cmp(&y.case_id))
        });
        scored.truncate(k);
        scored
    }

    /// Nudge the weight of every supporting case toward the outcome:
    /// `weight += alpha * (score - 0.5)`, clamped to [0, 1]. Returns the
    /// number of cases updated.
    pub fn apply_outcome(&mut self, case_ids: &[u64], score: f64, alpha: f64) -> u64 {
        let mut updated = 0;
        for case in &mut self.cases {
            if case_ids.contains(&case.id) {
                case.weight = update_weight(case.weight, score, alpha);
                updated += 1;
            }
        }
        updated
    }

    pub fn load(path: &Path) -> Result<Self, CaseBaseError> {
        let text = fs::read_to_string(path)?;
        let file: CaseBaseFile =
            serde_json::from_str(&text).map_err(|e| CaseBaseError::Format(e.to_string()))?;
        if file.version != CASEBASE_VERSION {
            return Err(CaseBaseError::Version(file.version));
        }
        let mut cases = Vec::with_capacity(file.cases.len());
        for entry in file.cases {
            if entry.signature.len() != SIGNATURE_LEN {
                return Err(CaseBaseError::SignatureLength {
                    id: entry.id,
                    len: entry.signature.len(),
                });
            }
            let mut signature = [0.0; SIGNATURE_LEN];
            signature.copy_from_slice(&entry.signature);
            cases.push(Case {
                id: entry.id,
                signature: Signature(signature),
                consequences: entry.consequences,
                template: entry.template,
                weight: entry.weight,
            });
        }
        Ok(Self {
            cases,
            next_id: file.next_id,
        })
    }

    /// Atomic save: write a sibling temp file, then rename over the target.
    pub fn save(&self, path: &Path) -> Result<(), CaseBaseError> {
        let file = CaseBaseFile {
            version: CASEBASE_VERSION,
            next_id: self.next_id,
            cases: self
                .cases
                .iter()
                .map(|c| CaseFileEntry {
                    id: c.id,
                    signature: c.signature.0.to_vec(),
                    consequences: c.consequences.clone(),
                    template: c.template,
                    weight: c.weight,
                })
                .collect(),
        };
        let text = serde_json::to_string_pretty(&file).expect("case base serializes");
        let tmp = path.with_extension("json.tmp");
        fs::write(&tmp, text.as_bytes())?;
        fs::rename(&tmp, path)?;
        Ok(())
    }
}

/// One retrieved case with its match score against the query signature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScoredCase {
    pub case_id: u64,
    pub similarity: f64,
    pub weight: f64,
    pub template: ActionTemplate,
}

impl ScoredCase {
    pub fn score(&self) -> f64 {
        self.similarity * self.weight
    }
}

/// The decision handed to the actors: an effective template, its expansion
/// into brigade dispatches, and the retrieval evidence behind it.
#[derive(Debug, Clone, PartialEq)]
pub struct Recommendation {
    pub template: ActionTemplate,
    pub actions: Vec<Action>,
    pub support: Vec<ScoredCase>,
    /// Best `similarity * weight` over the support; 0 with empty support.
    pub confidence: f64,
}

/// Expand the top-ranked case's template against the current snapshot.
/// Empty support, or a template with no valid target, degenerates to HOLD.
pub fn recommend(ranked: &[ScoredCase], snapshot: &RepresentationSnapshot) -> Recommendation {
    let Some(top) = ranked.first() else {
        return Recommendation {
            template: ActionTemplate::Hold,
            actions: Vec::new(),
            support: Vec::new(),
            confidence: 0.0,
        };
    };
    let actions = expand_template(top.template, snapshot);
    let template = if actions.is_empty() {
        ActionTemplate::Hold
    } else {
        top.template
    };
    Recommendation {
        template,
        actions,
        support: ranked.to_vec(),
        confidence: top.score(),
    }
}

fn expand_template(template: ActionTemplate, snapshot: &RepresentationSnapshot) -> Vec<Action> {
    match template {
        ActionTemplate::Hold => Vec::new(),
        ActionTemplate::AttackStrongest => {
            let Some(target) = strongest_fire(snapshot) else {
                return Vec::new();
            };
            brigades(snapshot)
                .map(|b| Action {
                    brigade_id: b.selector.id,
                    kind: ActionKind::Dispatch(target),
                })
                .collect()
        }
        ActionTemplate::AttackNearest => nearest_fire_actions(snapshot),
        ActionTemplate::Regroup => {
            let positions: Vec<Coord> = brigades(snapshot).map(|b| b.location).collect();
            if positions.is_empty() {
                return Vec::new();
            }
            let n = positions.len() as i64;
            let centroid = Coord::new(
                (positions.iter().map(|p| p.x as i64).sum::<i64>() / n) as i32,
                (positions.iter().map(|p| p.y as i64).sum::<i64>() / n) as i32,
            );
            brigades(snapshot)
                .map(|b| Action {
                    brigade_id: b.selector.id,
                    kind: ActionKind::Dispatch(centroid),
                })
                .collect()
        }
    }
}

/// Each live brigade dispatched to its Chebyshev-nearest live fire, ties
/// broken by lower fire agent id. Also the baseline policy.
pub fn nearest_fire_actions(snapshot: &RepresentationSnapshot) -> Vec<Action> {
    let fires: Vec<&AgentView> = snapshot.agents_of_type(SelectorType::Fire).collect();
    if fires.is_empty() {
        return Vec::new();
    }
    brigades(snapshot)
        .map(|b| {
            let nearest = fires
                .iter()
                .min_by_key(|f| (b.location.chebyshev(f.location), f.id))
                .expect("fires is non-empty");
            Action {
                brigade_id: b.selector.id,
                kind: ActionKind::Dispatch(nearest.location),
            }
        })
        .collect()
}

fn brigades(snapshot: &RepresentationSnapshot) -> impl Iterator<Item = &AgentView> {
    snapshot.agents_of_type(SelectorType::FireBrigade)
}

/// Live fire with the highest i1, ties broken by lowest agent id.
fn strongest_fire(snapshot: &RepresentationSnapshot) -> Option<Coord> {
    let mut best: Option<&AgentView> = None;
    for fire in snapshot.agents_of_type(SelectorType::Fire) {
        match best {
            None => best = Some(fire),
            Some(current) if fire.i1 > current.i1 => best = Some(fire),
            Some(_) => {}
        }
    }
    best.map(|f| f.location)
}

/// Score an executed decision from total fieriness before and `horizon`
/// cycles after: `clamp01(0.5 + (before - after) / (2 * max(1, before)))`.
/// Reduction scores above 0.5, worsening below, no change exactly 0.5.
pub fn outcome_score(before: u64, after: u64) -> f64 {
    let b = before as f64;
    (0.5 + (b - after as f64) / (2.0 * b.max(1.0))).clamp(0.0, 1.0)
}

pub fn update_weight(weight: f64, score: f64, alpha: f64) -> f64 {
    debug_assert!((0.0..=1.0).contains(&score));
    (weight + alpha * (score - 0.5)).clamp(0.0, 1.0)
}
