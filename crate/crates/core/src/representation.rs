//! Upper kernel layer: one factual agent per fact stream.
//!
//! Each cycle the layer runs a fixed pipeline: ingest the cycle's features,
//! rebuild the alliance/opposition link graph from the latest feature of
//! every live agent, refresh the two dynamics indicators, step every
//! agent's four-state automaton, then emit an immutable snapshot. Two runs
//! over the same feature stream produce identical snapshot sequences.

use std::collections::{BTreeMap, HashMap, VecDeque};

use thiserror::Error;

use crate::fsf::{Coord, Fsf, Selector, SelectorType};
use crate::proximity::{proximity, PolarityTable, ProximityConfig};

pub type AgentId = u64;

/// Newest features kept per agent; older ones are evicted.
pub const HISTORY_CAP: usize = 32;

/// Intensity lost per cycle without a fresh feature.
const STALENESS_DECAY: f64 = 0.1;

/// Cycles a decline guard must hold before its transition fires.
const DECLINE_CYCLES: u64 = 2;

/// Lifecycle automaton of a factual agent. Transitions run only along
/// emergent → developing → strong → declining, declining → strong, and
/// declining → retired.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum AutomatonState {
    Emergent,
    Developing,
    Strong,
    Declining,
}

impl AutomatonState {
    pub fn label(self) -> &'static str {
        match self {
            AutomatonState::Emergent => "emergent",
            AutomatonState::Developing => "developing",
            AutomatonState::Strong => "strong",
            AutomatonState::Declining => "declining",
        }
    }
}

/// Guard thresholds for the automaton.
#[derive(Debug, Clone, PartialEq)]
pub struct AutomatonConfig {
    /// emergent → developing when i1 reaches this.
    pub emerge_i1: f64,
    /// developing → strong (and declining → strong) need i1 at or above this...
    pub strong_i1: f64,
    /// ...together with |i2| at or above this.
    pub strong_i2: f64,
    /// strong → declining when i1 stays below this for two consecutive cycles.
    pub decline_i1: f64,
    /// declining → retired when i1 stays below this for two consecutive cycles.
    pub retire_i1: f64,
}

impl Default for AutomatonConfig {
    fn default() -> Self {
        Self {
            emerge_i1: 0.2,
            strong_i1: 0.5,
            strong_i2: 0.2,
            decline_i1: 0.3,
            retire_i1: 0.05,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct RepresentationConfig {
    pub proximity: ProximityConfig,
    pub polarity: PolarityTable,
    pub automaton: AutomatonConfig,
}

/// Stateful entity managing one fact stream.
#[derive(Debug, Clone, PartialEq)]
pub struct FactualAgent {
    pub id: AgentId,
    pub selector: Selector,
    history: VecDeque<Fsf>,
    pub state: AutomatonState,
    pub i1: f64,
    pub i2: f64,
    pub last_fsf_cycle: u64,
    pub born_cycle: u64,
    below_since: Option<u64>,
}

impl FactualAgent {
    fn new(id: AgentId, fsf: Fsf, cycle: u64) -> Self {
        let selector = fsf.selector();
        let mut history = VecDeque::with_capacity(8);
        history.push_back(fsf);
        Self {
            id,
            selector,
            history,
            state: AutomatonState::Emergent,
            i1: 0.0,
            i2: 0.0,
            last_fsf_cycle: cycle,
            born_cycle: cycle,
            below_since: None,
        }
    }

    fn push_fsf(&mut self, fsf: Fsf, cycle: u64) {
        debug_assert_eq!(fsf.selector(), self.selector);
        if self.history.len() == HISTORY_CAP {
            self.history.pop_front();
        }
        self.history.push_back(fsf);
        self.last_fsf_cycle = cycle;
    }

    /// Most recent feature; only this one feeds the link graph.
    pub fn latest(&self) -> &Fsf {
        self.history.back().expect("agent always holds one feature")
    }

    pub fn history(&self) -> impl Iterator<Item = &Fsf> {
        self.history.iter()
    }

    pub fn history_len(&self) -> usize {
        self.history.len()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LinkKind {
    Alliance,
    Opposition,
}

impl LinkKind {
    pub fn label(self) -> &'static str {
        match self {
            LinkKind::Alliance => "alliance",
            LinkKind::Opposition => "opposition",
        }
    }
}

/// Signed proximity edge between two live agents, stored only when its
/// magnitude exceeds the link threshold. Always `a < b`.
#[derive(Debug, Clone, PartialEq)]
pub struct Link {
    pub a: AgentId,
    pub b: AgentId,
    pub value: f64,
    pub kind: LinkKind,
}

impl Link {
    pub fn touches(&self, id: AgentId) -> bool {
        self.a == id || self.b == id
    }
}

/// Immutable per-agent view carried by a snapshot.
#[derive(Debug, Clone, PartialEq)]
pub struct AgentView {
    pub id: AgentId,
    pub selector: Selector,
    pub state: AutomatonState,
    pub i1: f64,
    pub i2: f64,
    pub born_cycle: u64,
    /// Location of the latest feature; used for action expansion.
    pub location: Coord,
}

/// Immutable copy of the layer at the end of one cycle. Agents are sorted
/// by id, links by `(a, b)`; every link endpoint is live in the same
/// snapshot.
#[derive(Debug, Clone, PartialEq)]
pub struct RepresentationSnapshot {
    pub cycle: u64,
    pub agents: Vec<AgentView>,
    pub links: Vec<Link>,
    pub retired: Vec<AgentId>,
}

impl RepresentationSnapshot {
    pub fn agent(&self, id: AgentId) -> Option<&AgentView> {
        self.agents
            .binary_search_by_key(&id, |a| a.id)
            .ok()
            .map(|i| &self.agents[i])
    }

    pub fn agents_of_type(
        &self,
        selector_type: SelectorType,
    ) -> impl Iterator<Item = &AgentView> {
        self.agents
            .iter()
            .filter(move |a| a.selector.selector_type == selector_type)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IngestError {
    #[error("stale observation: time {time} is older than cycle {cycle} minus the temporal horizon")]
    StaleObservation { time: u64, cycle: u64 },
}

/// The representation layer itself. Single-threaded: all mutation happens
/// inside the per-cycle pipeline of one driver.
#[derive(Debug, Clone)]
pub struct RepresentationLayer {
    cfg: RepresentationConfig,
    agents: BTreeMap<AgentId, FactualAgent>,
    by_selector: HashMap<Selector, AgentId>,
    links: Vec<Link>,
    next_id: AgentId,
    retired_this_cycle: Vec<AgentId>,
    stale_dropped: u64,
}

impl RepresentationLayer {
    pub fn new(cfg: RepresentationConfig) -> Self {
        Self {
            cfg,
            agents: BTreeMap::new(),
            by_selector: HashMap::new(),
            links: Vec::new(),
            next_id: 0,
            retired_this_cycle: Vec::new(),
            stale_dropped: 0,
        }
    }

    /// Full pipeline for one cycle: ingest (stale features dropped and
    /// counted), rebuild links, update indicators, step automata, snapshot.
    pub fn run_cycle(
        &mut self,
        fsfs: impl IntoIterator<Item = Fsf>,
        cycle: u64,
    ) -> RepresentationSnapshot {
        for fsf in fsfs {
            let _ = self.ingest_fsf(fsf, cycle);
        }
        self.rebuild_links();
        self.update_indicators(cycle);
        self.step_automata(cycle);
        self.snapshot(cycle)
    }

    /// Route a feature to its agent, creating one in the emergent state on
    /// first contact. Features older than `cycle - tMax` are dropped.
    pub fn ingest_fsf(&mut self, fsf: Fsf, cycle: u64) -> Result<AgentId, IngestError> {
        debug_assert!(fsf.time() <= cycle, "feature from the future");
        if fsf.time() + self.cfg.proximity.t_max < cycle {
            self.stale_dropped += 1;
            return Err(IngestError::StaleObservation {
                time: fsf.time(),
                cycle,
            });
        }
        let selector = fsf.selector();
        if let Some(&id) = self.by_selector.get(&selector) {
            let agent = self.agents.get_mut(&id).expect("index and map agree");
            agent.push_fsf(fsf, cycle);
            return Ok(id);
        }
        let id = self.next_id;
        self.next_id += 1;
        self.agents.insert(id, FactualAgent::new(id, fsf, cycle));
        self.by_selector.insert(selector, id);
        Ok(id)
    }

    /// Recompute the link graph over every unordered pair of live agents,
    /// in ascending `(a, b)` id order, from their latest features.
    pub fn rebuild_links(&mut self) {
        self.links.clear();
        let ids: Vec<AgentId> = self.agents.keys().copied().collect();
        let threshold = self.cfg.proximity.link_threshold;
        for (i, &a) in ids.iter().enumerate() {
            for &b in &ids[i + 1..] {
                let value = proximity(
                    self.agents[&a].latest(),
                    self.agents[&b].latest(),
                    &self.cfg.polarity,
                    &self.cfg.proximity,
                );
                if value > threshold {
                    self.links.push(Link {
                        a,
                        b,
                        value,
                        kind: LinkKind::Alliance,
                    });
                } else if value < -threshold {
                    self.links.push(Link {
                        a,
                        b,
                        value,
                        kind: LinkKind::Opposition,
                    });
                }
            }
        }
    }

    /// Refresh both indicators of every live agent. i1 is the type-specific
    /// intensity of a fresh feature, or decays by 0.1 per silent cycle
    /// (and may go negative); i2 is always the clamped sum of incident
    /// link values.
    pub fn update_indicators(&mut self, cycle: u64) {
        let mut incident: HashMap<AgentId, (f64, u32)> = HashMap::new();
        for link in &self.links {
            let opposition = u32::from(link.kind == LinkKind::Opposition);
            for id in [link.a, link.b] {
                let entry = incident.entry(id).or_insert((0.0, 0));
                entry.0 += link.value;
                entry.1 += opposition;
            }
        }
        for agent in self.agents.values_mut() {
            let (link_sum, opposition_count) =
                incident.get(&agent.id).copied().unwrap_or((0.0, 0));
            if agent.last_fsf_cycle == cycle {
                agent.i1 = raw_intensity(agent.latest(), opposition_count);
            } else {
                agent.i1 = (agent.i1 - STALENESS_DECAY).clamp(-1.0, 1.0);
            }
            agent.i2 = link_sum.clamp(-1.0, 1.0);
        }
    }

    /// Step every automaton in ascending id order, at most one transition
    /// per agent. Retiring agents leave the live set and are reported in
    /// the snapshot's `retired` list.
    pub fn step_automata(&mut self, cycle: u64) {
        let ids: Vec<AgentId> = self.agents.keys().copied().collect();
        for id in ids {
            let agent = self.agents.get_mut(&id).expect("live id");
            if step_automaton(agent, cycle, &self.cfg.automaton) {
                let agent = self.agents.remove(&id).expect("live id");
                self.by_selector.remove(&agent.selector);
                self.retired_this_cycle.push(id);
            }
        }
    }

    /// Immutable copy of the cycle's end state. Clears the retired list.
    pub fn snapshot(&mut self, cycle: u64) -> RepresentationSnapshot {
        let agents: Vec<AgentView> = self
            .agents
            .values()
            .map(|a| AgentView {
                id: a.id,
                selector: a.selector,
                state: a.state,
                i1: a.i1,
                i2: a.i2,
                born_cycle: a.born_cycle,
                location: a.latest().location(),
            })
            .collect();
        let links: Vec<Link> = self
            .links
            .iter()
            .filter(|l| self.agents.contains_key(&l.a) && self.agents.contains_key(&l.b))
            .cloned()
            .collect();
        RepresentationSnapshot {
            cycle,
            agents,
            links,
            retired: std::mem::take(&mut self.retired_this_cycle),
        }
    }

    pub fn agent_by_selector(&self, selector: Selector) -> Option<&FactualAgent> {
        self.by_selector
            .get(&selector)
            .and_then(|id| self.agents.get(id))
    }

    pub fn agent(&self, id: AgentId) -> Option<&FactualAgent> {
        self.agents.get(&id)
    }

    pub fn links(&self) -> &[Link] {
        &self.links
    }

    pub fn live_count(&self) -> usize {
        self.agents.len()
    }

    /// Stale features dropped since construction.
    pub fn stale_dropped(&self) -> u64 {
        self.stale_dropped
    }
}

/// Type-specific intensity of a fresh feature, clamped to `[0, 1]`.
/// Types without an extraction rule score zero.
fn raw_intensity(latest: &Fsf, opposition_count: u32) -> f64 {
    match latest.selector().selector_type {
        SelectorType::Fire => {
            let fieriness = latest.int_value("fieriness").unwrap_or(0) as f64;
            let burning = latest.int_value("burningNeighbours").unwrap_or(0) as f64;
            let in_danger = latest.int_value("inDangerNeighbours").unwrap_or(0) as f64;
            ((fieriness + 0.2 * burning + 0.1 * in_danger) / 3.0).clamp(0.0, 1.0)
        }
        SelectorType::FireBrigade => {
            (0.3 + 0.2 * opposition_count as f64).clamp(0.0, 1.0)
        }
        _ => 0.0,
    }
}

/// Evaluate this cycle's guards; returns true when the agent retires.
fn step_automaton(agent: &mut FactualAgent, cycle: u64, cfg: &AutomatonConfig) -> bool {
    match agent.state {
        AutomatonState::Emergent => {
            if agent.i1 >= cfg.emerge_i1 {
                agent.state = AutomatonState::Developing;
                agent.below_since = None;
            }
            false
        }
        AutomatonState::Developing => {
            if agent.i1 >= cfg.strong_i1 && agent.i2.abs() >= cfg.strong_i2 {
                agent.state = AutomatonState::Strong;
                agent.below_since = None;
            }
            false
        }
        AutomatonState::Strong => {
            if agent.i1 < cfg.decline_i1 {
                match agent.below_since {
                    Some(since) if cycle >= since + DECLINE_CYCLES - 1 => {
                        agent.state = AutomatonState::Declining;
                        agent.below_since = None;
                    }
                    Some(_) => {}
                    None => agent.below_since = Some(cycle),
                }
            } else {
                agent.below_since = None;
            }
            false
        }
        AutomatonState::Declining => {
            if agent.i1 >= cfg.strong_i1 && agent.i2.abs() >= cfg.strong_i2 {
                agent.state = AutomatonState::Strong;
                agent.below_since = None;
                false
            } else if agent.i1 < cfg.retire_i1 {
                match agent.below_since {
                    Some(since) if cycle >= since + DECLINE_CYCLES - 1 => true,
                    Some(_) => false,
                    None => {
                        agent.below_since = Some(cycle);
                        false
                    }
                }
            } else {
                agent.below_since = None;
                false
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fsf::{QualifierValue, Value};

    fn fire_fsf(id: u64, x: i32, y: i32, time: u64, fieriness: i64, danger: i64, burning: i64) -> Fsf {
        Fsf::new(
            Selector::new(SelectorType::Fire, id),
            vec![
                QualifierValue::new("fieriness", Value::Integer(fieriness)),
                QualifierValue::new("inDangerNeighbours", Value::Integer(danger)),
                QualifierValue::new("burningNeighbours", Value::Integer(burning)),
                QualifierValue::new("localisation", Value::Coordinate(Coord::new(x, y))),
                QualifierValue::new("time", Value::Integer(time as i64)),
            ],
        )
        .unwrap()
    }

    fn brigade_fsf(id: u64, x: i32, y: i32, time: u64) -> Fsf {
        Fsf::new(
            Selector::new(SelectorType::FireBrigade, id),
            vec![
                QualifierValue::new("localisation", Value::Coordinate(Coord::new(x, y))),
                QualifierValue::new("time", Value::Integer(time as i64)),
            ],
        )
        .unwrap()
    }

    fn layer() -> RepresentationLayer {
        RepresentationLayer::new(RepresentationConfig::default())
    }

    #[test]
    fn first_feature_creates_an_emergent_agent() {
        let mut layer = layer();
        let id = layer
            .ingest_fsf(fire_fsf(14, 20, 25, 7, 1, 3, 2), 7)
            .unwrap();
        let agent = layer.agent(id).unwrap();
        assert_eq!(agent.state, AutomatonState::Emergent);
        assert_eq!(agent.i1, 0.0);
        assert_eq!(agent.i2, 0.0);
        assert_eq!(agent.born_cycle, 7);
    }

    #[test]
    fn second_feature_routes_to_the_same_agent() {
        let mut layer = layer();
        let first = layer
            .ingest_fsf(fire_fsf(14, 20, 25, 7, 1, 3, 2), 7)
            .unwrap();
        let second = layer
            .ingest_fsf(fire_fsf(14, 20, 25, 8, 1, 3, 2), 8)
            .unwrap();
        assert_eq!(first, second);
        assert_eq!(layer.agent(first).unwrap().history_len(), 2);
        assert_eq!(layer.live_count(), 1);
    }

    #[test]
    fn stale_feature_is_dropped_and_counted() {
        let mut layer = layer();
        let err = layer.ingest_fsf(fire_fsf(14, 20, 25, 1, 1, 3, 2), 20);
        assert_eq!(
            err,
            Err(IngestError::StaleObservation { time: 1, cycle: 20 })
        );
        assert_eq!(layer.stale_dropped(), 1);
        assert_eq!(layer.live_count(), 0);
    }

    #[test]
    fn history_is_capped_with_oldest_evicted() {
        let mut layer = layer();
        let mut id = 0;
        for t in 0..40u64 {
            id = layer.ingest_fsf(brigade_fsf(0, 0, 0, t), t).unwrap();
        }
        let agent = layer.agent(id).unwrap();
        assert_eq!(agent.history_len(), HISTORY_CAP);
        assert_eq!(agent.history().next().unwrap().time(), 8);
        assert_eq!(agent.latest().time(), 39);
    }

    #[test]
    fn opposition_link_between_fire_and_brigade() {
        let mut layer = layer();
        layer.ingest_fsf(fire_fsf(14, 20, 25, 7, 1, 3, 2), 7).unwrap();
        layer.ingest_fsf(brigade_fsf(1, 22, 25, 7), 7).unwrap();
        layer.rebuild_links();
        assert_eq!(layer.links().len(), 1);
        let link = &layer.links()[0];
        assert_eq!(link.kind, LinkKind::Opposition);
        assert!((link.value + 0.8).abs() < 1e-9);
    }

    #[test]
    fn alliance_link_between_adjacent_fires() {
        let mut layer = layer();
        layer.ingest_fsf(fire_fsf(1, 5, 5, 3, 1, 0, 0), 3).unwrap();
        layer.ingest_fsf(fire_fsf(2, 6, 5, 3, 1, 0, 0), 3).unwrap();
        layer.rebuild_links();
        assert_eq!(layer.links().len(), 1);
        let link = &layer.links()[0];
        assert_eq!(link.kind, LinkKind::Alliance);
        assert!((link.value - 0.9).abs() < 1e-9);
    }

    #[test]
    fn single_agent_has_no_links() {
        let mut layer = layer();
        layer.ingest_fsf(fire_fsf(1, 5, 5, 3, 1, 0, 0), 3).unwrap();
        layer.rebuild_links();
        assert!(layer.links().is_empty());
    }

    #[test]
    fn fresh_fire_intensity_matches_the_extraction_rule() {
        let mut layer = layer();
        let id = layer
            .ingest_fsf(fire_fsf(14, 20, 25, 7, 1, 3, 2), 7)
            .unwrap();
        layer.rebuild_links();
        layer.update_indicators(7);
        let agent = layer.agent(id).unwrap();
        let expected = (1.0 + 0.2 * 2.0 + 0.1 * 3.0) / 3.0;
        assert!((agent.i1 - expected).abs() < 1e-9);
        assert_eq!(agent.i2, 0.0); // no incident links
    }

    #[test]
    fn silent_agent_decays_and_may_go_negative() {
        let mut layer = layer();
        let id = layer.ingest_fsf(brigade_fsf(0, 0, 0, 0), 0).unwrap();
        layer.rebuild_links();
        layer.update_indicators(0);
        assert!((layer.agent(id).unwrap().i1 - 0.3).abs() < 1e-9);
        for cycle in 1..=4 {
            layer.rebuild_links();
            layer.update_indicators(cycle);
        }
        let i1 = layer.agent(id).unwrap().i1;
        assert!((i1 - (0.3 - 0.4)).abs() < 1e-9);
        assert!(i1 < 0.0);
    }

    #[test]
    fn decay_from_low_positive_crosses_zero() {
        let mut agent = FactualAgent::new(0, brigade_fsf(0, 0, 0, 0), 0);
        agent.i1 = 0.05;
        let mut layer = layer();
        layer.agents.insert(0, agent);
        layer.update_indicators(1); // no feature at cycle 1
        assert!((layer.agent(0).unwrap().i1 + 0.05).abs() < 1e-9);
    }

    #[test]
    fn developing_agent_with_strong_indicators_becomes_strong() {
        let mut agent = FactualAgent::new(0, fire_fsf(1, 0, 0, 0, 1, 3, 2), 0);
        agent.state = AutomatonState::Developing;
        agent.i1 = 0.5667;
        agent.i2 = -0.8;
        assert!(!step_automaton(&mut agent, 1, &AutomatonConfig::default()));
        assert_eq!(agent.state, AutomatonState::Strong);
    }

    #[test]
    fn emergent_agent_below_threshold_stays_put() {
        let mut agent = FactualAgent::new(0, fire_fsf(1, 0, 0, 0, 1, 3, 2), 0);
        agent.i1 = 0.1;
        assert!(!step_automaton(&mut agent, 1, &AutomatonConfig::default()));
        assert_eq!(agent.state, AutomatonState::Emergent);
    }

    #[test]
    fn strong_agent_declines_after_two_weak_cycles() {
        let cfg = AutomatonConfig::default();
        let mut agent = FactualAgent::new(0, fire_fsf(1, 0, 0, 0, 1, 3, 2), 0);
        agent.state = AutomatonState::Strong;
        agent.i1 = 0.1;
        assert!(!step_automaton(&mut agent, 5, &cfg));
        assert_eq!(agent.state, AutomatonState::Strong);
        assert!(!step_automaton(&mut agent, 6, &cfg));
        assert_eq!(agent.state, AutomatonState::Declining);
    }

    #[test]
    fn recovery_interrupts_the_decline_count() {
        let cfg = AutomatonConfig::default();
        let mut agent = FactualAgent::new(0, fire_fsf(1, 0, 0, 0, 1, 3, 2), 0);
        agent.state = AutomatonState::Strong;
        agent.i1 = 0.1;
        assert!(!step_automaton(&mut agent, 5, &cfg));
        agent.i1 = 0.6;
        assert!(!step_automaton(&mut agent, 6, &cfg));
        agent.i1 = 0.1;
        assert!(!step_automaton(&mut agent, 7, &cfg));
        assert_eq!(agent.state, AutomatonState::Strong);
    }

    #[test]
    fn declining_agent_retires_after_two_faint_cycles() {
        let cfg = AutomatonConfig::default();
        let mut layer = layer();
        let id = layer.ingest_fsf(fire_fsf(1, 0, 0, 0, 1, 3, 2), 0).unwrap();
        layer.agents.get_mut(&id).unwrap().state = AutomatonState::Declining;
        layer.agents.get_mut(&id).unwrap().i1 = 0.01;
        let _ = cfg;
        layer.step_automata(3);
        assert_eq!(layer.live_count(), 1);
        layer.step_automata(4);
        assert_eq!(layer.live_count(), 0);
        let snap = layer.snapshot(4);
        assert_eq!(snap.retired, vec![id]);
    }

    #[test]
    fn declining_agent_can_return_to_strong() {
        let cfg = AutomatonConfig::default();
        let mut agent = FactualAgent::new(0, fire_fsf(1, 0, 0, 0, 1, 3, 2), 0);
        agent.state = AutomatonState::Declining;
        agent.i1 = 0.7;
        agent.i2 = 0.5;
        assert!(!step_automaton(&mut agent, 3, &cfg));
        assert_eq!(agent.state, AutomatonState::Strong);
    }

    #[test]
    fn pipeline_is_deterministic_over_the_same_stream() {
        let stream: Vec<(u64, Vec<Fsf>)> = (0..10)
            .map(|t| {
                (
                    t,
                    vec![
                        fire_fsf(3, 8, 8, t, 1, 2, 1),
                        brigade_fsf(0, 8 + t as i32 % 3, 6, t),
                    ],
                )
            })
            .collect();
        let mut a = layer();
        let mut b = layer();
        for (cycle, fsfs) in &stream {
            let snap_a = a.run_cycle(fsfs.clone(), *cycle);
            let snap_b = b.run_cycle(fsfs.clone(), *cycle);
            assert_eq!(snap_a, snap_b);
        }
    }

    #[test]
    fn snapshot_of_empty_layer_is_empty() {
        let mut layer = layer();
        let snap = layer.run_cycle(Vec::new(), 0);
        assert!(snap.agents.is_empty());
        assert!(snap.links.is_empty());
        assert!(snap.retired.is_empty());
    }

    #[test]
    fn indicators_stay_bounded_under_random_streams() {
        let mut rng = crate::rng::SplitMix64::new(5);
        let mut layer = layer();
        for cycle in 0..200u64 {
            let mut fsfs = Vec::new();
            for _ in 0..rng.next_below(4) {
                let id = rng.next_below(6);
                let x = rng.next_below(20) as i32;
                let y = rng.next_below(20) as i32;
                if rng.next_below(2) == 0 {
                    fsfs.push(fire_fsf(
                        id,
                        x,
                        y,
                        cycle,
                        rng.next_below(10) as i64,
                        rng.next_below(9) as i64,
                        rng.next_below(9) as i64,
                    ));
                } else {
                    fsfs.push(brigade_fsf(id, x, y, cycle));
                }
            }
            // Duplicate selectors within one batch route to one agent.
            let snap = layer.run_cycle(fsfs, cycle);
            for agent in &snap.agents {
                assert!((-1.0..=1.0).contains(&agent.i1), "i1 out of range");
                assert!((-1.0..=1.0).contains(&agent.i2), "i2 out of range");
            }
            for link in &snap.links {
                assert!(snap.agent(link.a).is_some() && snap.agent(link.b).is_some());
            }
        }
    }
}
