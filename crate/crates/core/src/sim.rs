//! Deterministic miniature rescue environment: a grid city whose buildings
//! ignite, burn and spread fire, watched and doused by brigade agents.
//!
//! One step advances the world by exactly one cycle in a fixed sub-step
//! order: apply actions, move brigades, extinguish, progress fire phases,
//! spread, then increment the cycle and apply scheduled ignitions. Every
//! random draw comes from the world's own splitmix64 stream in a fixed
//! schedule, so identical scenarios and seeds replay byte-identically.
//!
//! Observation is partial: only ignited or burning buildings within the
//! view radius of some brigade are reported, as one feature per object and
//! cycle. Fire identity is the building's index in the row-major
//! enumeration of building cells, stable for the whole run.

use std::collections::HashMap;

use thiserror::Error;

use crate::fsf::{Coord, Fsf, QualifierValue, Selector, SelectorType, Value};
use crate::rng::SplitMix64;
use crate::scenario::{Ignition, Scenario};

/// Fire-model constants; scenario files may override any of them.
#[derive(Debug, Clone, PartialEq)]
pub struct SimParams {
    /// Ignition probability per burning-source/intact-target pair per cycle.
    pub spread_p: f64,
    /// Full cycles a building stays ignited before burning.
    pub ignite_age: u64,
    /// Full cycles a building burns before burning out.
    pub burn_age: u64,
    /// Chebyshev radius within which a brigade perceives fires.
    pub view_radius: u32,
    /// Extinguish work on a freshly ignited building.
    pub heat_ignited: u32,
    /// Extinguish work once burning.
    pub heat_burning: u32,
}

impl Default for SimParams {
    fn default() -> Self {
        Self {
            spread_p: 0.15,
            ignite_age: 2,
            burn_age: 5,
            view_radius: 5,
            heat_ignited: 3,
            heat_burning: 5,
        }
    }
}

impl SimParams {
    fn with_overrides(overrides: &crate::scenario::Overrides) -> Self {
        let mut params = Self::default();
        if let Some(v) = overrides.spread_p {
            params.spread_p = v;
        }
        if let Some(v) = overrides.ignite_age {
            params.ignite_age = v;
        }
        if let Some(v) = overrides.burn_age {
            params.burn_age = v;
        }
        if let Some(v) = overrides.view_radius {
            params.view_radius = v;
        }
        if let Some(v) = overrides.heat_ignited {
            params.heat_ignited = v;
        }
        if let Some(v) = overrides.heat_burning {
            params.heat_burning = v;
        }
        params
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CellKind {
    Empty,
    Road,
    Building,
}

/// Phase ladder: Intact → Ignited → Burning → BurnedOut, with Ignited and
/// Burning also able to end in Extinguished. BurnedOut and Extinguished
/// are terminal.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FirePhase {
    Intact,
    Ignited,
    Burning,
    BurnedOut,
    Extinguished,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BuildingFireState {
    pub phase: FirePhase,
    /// Full cycles spent in the current phase.
    pub phase_age: u64,
    /// Remaining extinguish work; 0 once out.
    pub heat: u32,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BuildingSite {
    pub pos: Coord,
    pub fire: BuildingFireState,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Brigade {
    pub id: u64,
    pub pos: Coord,
    pub target: Option<Coord>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ActionKind {
    Dispatch(Coord),
    Hold,
}

/// A single instruction for one brigade.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Action {
    pub brigade_id: u64,
    pub kind: ActionKind,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Metrics {
    pub intact: u32,
    pub ignited: u32,
    pub burning: u32,
    pub burned_out: u32,
    pub extinguished: u32,
    /// Sum of fieriness over ignited (1) and burning (2) buildings.
    pub fieriness_total: u64,
}

impl Metrics {
    pub fn building_total(&self) -> u32 {
        self.intact + self.ignited + self.burning + self.burned_out + self.extinguished
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SimError {
    #[error("action references unknown brigade {0}")]
    UnknownBrigade(u64),
}

/// Brigade movement scan order: N, NE, E, SE, S, SW, W, NW with y growing
/// downward. Also the first candidate wins distance ties.
const MOVE_SCAN: [(i32, i32); 8] = [
    (0, -1),
    (1, -1),
    (1, 0),
    (1, 1),
    (0, 1),
    (-1, 1),
    (-1, 0),
    (-1, -1),
];

#[derive(Debug, Clone)]
pub struct World {
    width: i32,
    height: i32,
    cells: Vec<CellKind>,
    buildings: Vec<BuildingSite>,
    building_index: HashMap<Coord, usize>,
    brigades: Vec<Brigade>,
    cycle: u64,
    rng: SplitMix64,
    params: SimParams,
    pending_ignitions: Vec<Ignition>,
}

impl World {
    pub fn from_scenario(scenario: &Scenario, seed: u64) -> Result<Self, crate::scenario::ScenarioError> {
        scenario.validate()?;
        let width = scenario.width;
        let height = scenario.height;
        let mut cells = Vec::with_capacity((width * height) as usize);
        let mut buildings = Vec::new();
        let mut building_index = HashMap::new();
        for (y, row) in scenario.rows.iter().enumerate() {
            for (x, ch) in row.chars().enumerate() {
                let kind = match ch {
                    'R' => CellKind::Road,
                    'B' => CellKind::Building,
                    _ => CellKind::Empty,
                };
                if kind == CellKind::Building {
                    let pos = Coord::new(x as i32, y as i32);
                    building_index.insert(pos, buildings.len());
                    buildings.push(BuildingSite {
                        pos,
                        fire: BuildingFireState {
                            phase: FirePhase::Intact,
                            phase_age: 0,
                            heat: 0,
                        },
                    });
                }
                cells.push(kind);
            }
        }
        let mut brigades: Vec<Brigade> = scenario
            .brigades
            .iter()
            .map(|b| Brigade {
                id: b.id,
                pos: Coord::new(b.x, b.y),
                target: None,
            })
            .collect();
        brigades.sort_by_key(|b| b.id);
        let mut world = Self {
            width,
            height,
            cells,
            buildings,
            building_index,
            brigades,
            cycle: 0,
            rng: SplitMix64::new(seed),
            params: SimParams::with_overrides(&scenario.overrides),
            pending_ignitions: scenario.ignitions.clone(),
        };
        world.apply_scheduled_ignitions();
        Ok(world)
    }

    pub fn cycle(&self) -> u64 {
        self.cycle
    }

    pub fn params(&self) -> &SimParams {
        &self.params
    }

    pub fn brigades(&self) -> &[Brigade] {
        &self.brigades
    }

    pub fn buildings(&self) -> &[BuildingSite] {
        &self.buildings
    }

    pub fn cell(&self, pos: Coord) -> Option<CellKind> {
        self.in_bounds(pos)
            .then(|| self.cells[(pos.y * self.width + pos.x) as usize])
    }

    fn in_bounds(&self, pos: Coord) -> bool {
        (0..self.width).contains(&pos.x) && (0..self.height).contains(&pos.y)
    }

    /// Advance one cycle under the given actions.
    pub fn step(&mut self, actions: &[Action]) -> Result<(), SimError> {
        // (1) apply actions
        for action in actions {
            let brigade = self
                .brigades
                .iter_mut()
                .find(|b| b.id == action.brigade_id)
                .ok_or(SimError::UnknownBrigade(action.brigade_id))?;
            brigade.target = match action.kind {
                ActionKind::Dispatch(target) => {
                    debug_assert!(
                        (0..self.width).contains(&target.x)
                            && (0..self.height).contains(&target.y),
                        "dispatch target out of bounds"
                    );
                    Some(target)
                }
                ActionKind::Hold => None,
            };
        }

        // (2) move brigades one step, only when it strictly improves the
        // Chebyshev distance to the target; buildings are impassable.
        for i in 0..self.brigades.len() {
            let (pos, target) = {
                let b = &self.brigades[i];
                match b.target {
                    Some(t) if t != b.pos => (b.pos, t),
                    _ => continue,
                }
            };
            let current = pos.chebyshev(target);
            let mut best: Option<(u32, Coord)> = None;
            for (dx, dy) in MOVE_SCAN {
                let candidate = Coord::new(pos.x + dx, pos.y + dy);
                if !self.in_bounds(candidate) {
                    continue;
                }
                if self.cell(candidate) == Some(CellKind::Building) {
                    continue;
                }
                let d = candidate.chebyshev(target);
                if best.is_none_or(|(bd, _)| d < bd) {
                    best = Some((d, candidate));
                }
            }
            if let Some((d, next)) = best {
                if d < current {
                    self.brigades[i].pos = next;
                }
            }
        }

        // (3) extinguish: every brigade adjacent (Chebyshev <= 1) to a
        // live fire hits the lowest-(y, x) qualifying building for 1 heat.
        for i in 0..self.brigades.len() {
            let pos = self.brigades[i].pos;
            let target = self
                .buildings
                .iter()
                .position(|site| {
                    matches!(site.fire.phase, FirePhase::Ignited | FirePhase::Burning)
                        && site.pos.chebyshev(pos) <= 1
                });
            if let Some(index) = target {
                let fire = &mut self.buildings[index].fire;
                fire.heat = fire.heat.saturating_sub(1);
                if fire.heat == 0 {
                    fire.phase = FirePhase::Extinguished;
                    fire.phase_age = 0;
                }
            }
        }

        // (4) fire progression: transition when the phase age at the start
        // of this sub-step has reached the threshold, otherwise age.
        for site in &mut self.buildings {
            match site.fire.phase {
                FirePhase::Ignited => {
                    if site.fire.phase_age >= self.params.ignite_age {
                        site.fire.phase = FirePhase::Burning;
                        site.fire.phase_age = 0;
                        site.fire.heat = self.params.heat_burning;
                    } else {
                        site.fire.phase_age += 1;
                    }
                }
                FirePhase::Burning => {
                    if site.fire.phase_age >= self.params.burn_age {
                        site.fire.phase = FirePhase::BurnedOut;
                        site.fire.phase_age = 0;
                        site.fire.heat = 0;
                    } else {
                        site.fire.phase_age += 1;
                    }
                }
                _ => {}
            }
        }

        // (5) spread: burning sources in row-major order, intact targets
        // within Chebyshev 1 in row-major order, one draw per live pair.
        for source in 0..self.buildings.len() {
            if self.buildings[source].fire.phase != FirePhase::Burning {
                continue;
            }
            let origin = self.buildings[source].pos;
            for (dy, dx) in neighbour_offsets() {
                let pos = Coord::new(origin.x + dx, origin.y + dy);
                let Some(&target) = self.building_index.get(&pos) else {
                    continue;
                };
                if self.buildings[target].fire.phase != FirePhase::Intact {
                    continue;
                }
                if self.rng.next_f64() < self.params.spread_p {
                    self.ignite(target);
                }
            }
        }

        // (6) advance the clock; scheduled ignitions land on the new cycle.
        self.cycle += 1;
        self.apply_scheduled_ignitions();
        Ok(())
    }

    fn ignite(&mut self, index: usize) {
        let fire = &mut self.buildings[index].fire;
        if fire.phase == FirePhase::Intact {
            fire.phase = FirePhase::Ignited;
            fire.phase_age = 0;
            fire.heat = self.params.heat_ignited;
        }
    }

    fn apply_scheduled_ignitions(&mut self) {
        let cycle = self.cycle;
        let due: Vec<Coord> = self
            .pending_ignitions
            .iter()
            .filter(|i| i.cycle == cycle)
            .map(|i| Coord::new(i.x, i.y))
            .collect();
        self.pending_ignitions.retain(|i| i.cycle != cycle);
        for pos in due {
            if let Some(&index) = self.building_index.get(&pos) {
                self.ignite(index);
            }
        }
    }

    /// The cycle's observations: one feature per ignited or burning
    /// building within view of some brigade (ascending building index),
    /// then one self feature per brigade (ascending id). No brigades, no
    /// observers, no features.
    pub fn perceive(&self) -> Vec<Fsf> {
        let mut fsfs = Vec::new();
        if self.brigades.is_empty() {
            return fsfs;
        }
        for (index, site) in self.buildings.iter().enumerate() {
            let fieriness = match site.fire.phase {
                FirePhase::Ignited => 1,
                FirePhase::Burning => 2,
                _ => continue,
            };
            let visible = self
                .brigades
                .iter()
                .any(|b| b.pos.chebyshev(site.pos) <= self.params.view_radius);
            if !visible {
                continue;
            }
            let mut in_danger = 0i64;
            let mut burning = 0i64;
            for (dy, dx) in neighbour_offsets() {
                let pos = Coord::new(site.pos.x + dx, site.pos.y + dy);
                if let Some(&n) = self.building_index.get(&pos) {
                    match self.buildings[n].fire.phase {
                        FirePhase::Intact => in_danger += 1,
                        FirePhase::Ignited | FirePhase::Burning => burning += 1,
                        _ => {}
                    }
                }
            }
            let fsf = Fsf::new(
                Selector::new(SelectorType::Fire, index as u64),
                vec![
                    QualifierValue::new("fieriness", Value::Integer(fieriness)),
                    QualifierValue::new("inDangerNeighbours", Value::Integer(in_danger)),
                    QualifierValue::new("burningNeighbours", Value::Integer(burning)),
                    QualifierValue::new("localisation", Value::Coordinate(site.pos)),
                    QualifierValue::new("time", Value::Integer(self.cycle as i64)),
                ],
            )
            .expect("perceived fire feature is valid");
            fsfs.push(fsf);
        }
        for brigade in &self.brigades {
            let fsf = Fsf::new(
                Selector::new(SelectorType::FireBrigade, brigade.id),
                vec![
                    QualifierValue::new("localisation", Value::Coordinate(brigade.pos)),
                    QualifierValue::new("time", Value::Integer(self.cycle as i64)),
                ],
            )
            .expect("brigade feature is valid");
            fsfs.push(fsf);
        }
        fsfs
    }

    pub fn metrics(&self) -> Metrics {
        let mut m = Metrics::default();
        for site in &self.buildings {
            match site.fire.phase {
                FirePhase::Intact => m.intact += 1,
                FirePhase::Ignited => {
                    m.ignited += 1;
                    m.fieriness_total += 1;
                }
                FirePhase::Burning => {
                    m.burning += 1;
                    m.fieriness_total += 2;
                }
                FirePhase::BurnedOut => m.burned_out += 1,
                FirePhase::Extinguished => m.extinguished += 1,
            }
        }
        m
    }
}

/// Chebyshev-1 neighbourhood in row-major `(dy, dx)` order, center excluded.
fn neighbour_offsets() -> impl Iterator<Item = (i32, i32)> {
    (-1..=1)
        .flat_map(|dy| (-1..=1).map(move |dx| (dy, dx)))
        .filter(|&(dy, dx)| !(dy == 0 && dx == 0))
}
