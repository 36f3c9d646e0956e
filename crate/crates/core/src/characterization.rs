//! Second kernel layer: per-cycle partition of live agents into Active,
//! Passive and Stable groups from indicator deltas, plus salient-fact
//! interpretation. Stateless; pure functions over immutable snapshots.

use std::collections::HashSet;

use thiserror::Error;

use crate::fsf::SelectorType;
use crate::representation::{AgentId, LinkKind, RepresentationSnapshot};

pub const DEFAULT_EPS: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GroupKind {
    Active,
    Passive,
    Stable,
}

/// The three groups; together they partition the live agents of the
/// classified snapshot. Ids are sorted ascending.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Groups {
    pub active: Vec<AgentId>,
    pub passive: Vec<AgentId>,
    pub stable: Vec<AgentId>,
}

impl Groups {
    pub fn len(&self) -> usize {
        self.active.len() + self.passive.len() + self.stable.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum FactTag {
    NewIncident,
    Engagement,
    FireExtinguishing,
    BrigadeInDifficulty,
    IsolatedOrSilent,
}

impl FactTag {
    pub fn label(self) -> &'static str {
        match self {
            FactTag::NewIncident => "NEW_INCIDENT",
            FactTag::Engagement => "ENGAGEMENT",
            FactTag::FireExtinguishing => "FIRE_EXTINGUISHING",
            FactTag::BrigadeInDifficulty => "BRIGADE_IN_DIFFICULTY",
            FactTag::IsolatedOrSilent => "ISOLATED_OR_SILENT",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SalientFact {
    pub tag: FactTag,
    pub agents: Vec<AgentId>,
    pub evidence: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CharacterizationReport {
    pub cycle: u64,
    pub groups: Groups,
    pub facts: Vec<SalientFact>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CharacterizationError {
    #[error("snapshots are not consecutive: cycle {prev} followed by {cur}")]
    SnapshotGap { prev: u64, cur: u64 },
}

/// Partition the live agents of `cur` by how their indicators moved since
/// `prev`: Active when at least one indicator increased (newborns count as
/// Active), Stable when neither changed beyond `eps`, Passive otherwise.
/// `prev = None` stands for an empty previous situation.
pub fn classify(
    prev: Option<&RepresentationSnapshot>,
    cur: &RepresentationSnapshot,
    eps: f64,
) -> Result<Groups, CharacterizationError> {
    debug_assert!(eps > 0.0);
    if let Some(prev) = prev {
        if prev.cycle + 1 != cur.cycle {
            return Err(CharacterizationError::SnapshotGap {
                prev: prev.cycle,
                cur: cur.cycle,
            });
        }
    }
    let mut groups = Groups::default();
    for agent in &cur.agents {
        match prev.and_then(|p| p.agent(agent.id)) {
            None => groups.active.push(agent.id),
            Some(before) => {
                let d1 = agent.i1 - before.i1;
                let d2 = agent.i2 - before.i2;
                if d1 > eps || d2 > eps {
                    groups.active.push(agent.id);
                } else if d1.abs() <= eps && d2.abs() <= eps {
                    groups.stable.push(agent.id);
                } else {
                    groups.passive.push(agent.id);
                }
            }
        }
    }
    Ok(groups)
}

/// Read salient facts out of the groups: new incidents and engagements from
/// the Active group, weakening fires and struggling brigades from the
/// Passive group, silence from the Stable group. Deterministically ordered
/// by tag, then by agent ids.
pub fn interpret(groups: &Groups, cur: &RepresentationSnapshot) -> Vec<SalientFact> {
    let active: HashSet<AgentId> = groups.active.iter().copied().collect();
    let mut facts = Vec::new();

    for &id in &groups.active {
        let agent = cur.agent(id).expect("group member is live");
        if agent.born_cycle == cur.cycle {
            facts.push(SalientFact {
                tag: FactTag::NewIncident,
                agents: vec![id],
                evidence: format!("{} first observed at cycle {}", agent.selector, cur.cycle),
            });
        }
    }

    for link in &cur.links {
        if link.kind != LinkKind::Opposition {
            continue;
        }
        if !(active.contains(&link.a) && active.contains(&link.b)) {
            continue;
        }
        let a = cur.agent(link.a).expect("link endpoint is live");
        let b = cur.agent(link.b).expect("link endpoint is live");
        let types = (a.selector.selector_type, b.selector.selector_type);
        let is_engagement = matches!(
            types,
            (SelectorType::Fire, SelectorType::FireBrigade)
                | (SelectorType::FireBrigade, SelectorType::Fire)
        );
        if is_engagement {
            facts.push(SalientFact {
                tag: FactTag::Engagement,
                agents: vec![link.a, link.b],
                evidence: format!(
                    "{} engaged with {} (proximity {:.2})",
                    a.selector, b.selector, link.value
                ),
            });
        }
    }

    for &id in &groups.passive {
        let agent = cur.agent(id).expect("group member is live");
        match agent.selector.selector_type {
            SelectorType::Fire => facts.push(SalientFact {
                tag: FactTag::FireExtinguishing,
                agents: vec![id],
                evidence: format!("{} losing intensity (i1 {:.2})", agent.selector, agent.i1),
            }),
            SelectorType::FireBrigade => facts.push(SalientFact {
                tag: FactTag::BrigadeInDifficulty,
                agents: vec![id],
                evidence: format!(
                    "{} weakening (i1 {:.2}, i2 {:.2})",
                    agent.selector, agent.i1, agent.i2
                ),
            }),
            _ => {}
        }
    }

    for &id in &groups.stable {
        let agent = cur.agent(id).expect("group member is live");
        facts.push(SalientFact {
            tag: FactTag::IsolatedOrSilent,
            agents: vec![id],
            evidence: format!("{} unchanged", agent.selector),
        });
    }

    facts.sort_by(|x, y| x.tag.cmp(&y.tag).then_with(|| x.agents.cmp(&y.agents)));
    facts
}
