//! Scenario files: the JSON description of a miniature city, its scheduled
//! ignitions, its brigades, and optional fire-model overrides.
//!
//! ```json
//! {
//!   "width": 20, "height": 20,
//!   "rows": ["....BBB...", ...],          // '.'=empty 'R'=road 'B'=building
//!   "ignitions": [{"x": 9, "y": 9, "cycle": 0}],
//!   "brigades": [{"id": 0, "x": 3, "y": 9}],
//!   "overrides": {"spreadP": 0.15, "igniteAge": 2, "burnAge": 5,
//!                  "viewRadius": 5, "heatIgnited": 3, "heatBurning": 5}
//! }
//! ```

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Scenario {
    pub width: i32,
    pub height: i32,
    pub rows: Vec<String>,
    #[serde(default)]
    pub ignitions: Vec<Ignition>,
    #[serde(default)]
    pub brigades: Vec<BrigadeSpec>,
    #[serde(default)]
    pub overrides: Overrides,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct Ignition {
    pub x: i32,
    pub y: i32,
    #[serde(default)]
    pub cycle: u64,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct BrigadeSpec {
    pub id: u64,
    pub x: i32,
    pub y: i32,
}

/// Fire-model overrides; unset fields keep the defaults.
#[derive(Debug, Clone, Copy, Default, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Overrides {
    pub spread_p: Option<f64>,
    pub ignite_age: Option<u64>,
    pub burn_age: Option<u64>,
    pub view_radius: Option<u32>,
    pub heat_ignited: Option<u32>,
    pub heat_burning: Option<u32>,
}

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("cannot read scenario: {0}")]
    Io(#[from] std::io::Error),
    #[error("invalid scenario JSON: {0}")]
    Json(String),
    #[error("scenario declares {expected} rows but provides {found}")]
    RowCount { expected: i32, found: usize },
    #[error("row {row} has length {found}, expected {expected}")]
    RowLength {
        row: usize,
        expected: i32,
        found: usize,
    },
    #[error("row {row} column {col}: unknown cell character `{ch}`")]
    BadCell { row: usize, col: usize, ch: char },
    #[error("ignition at {x}|{y} does not target a building")]
    IgnitionNotBuilding { x: i32, y: i32 },
    #[error("brigade {id} at {x}|{y} is out of bounds or on a building")]
    BadBrigadePosition { id: u64, x: i32, y: i32 },
    #[error("duplicate brigade id {0}")]
    DuplicateBrigadeId(u64),
    #[error("{0}")]
    Invalid(String),
}

impl Scenario {
    pub fn load(path: &Path) -> Result<Self, ScenarioError> {
        let text = fs::read_to_string(path)?;
        Self::from_json(&text)
    }

    pub fn from_json(text: &str) -> Result<Self, ScenarioError> {
        let scenario: Scenario =
            serde_json::from_str(text).map_err(|e| ScenarioError::Json(e.to_string()))?;
        scenario.validate()?;
        Ok(scenario)
    }

    pub fn validate(&self) -> Result<(), ScenarioError> {
        if self.width <= 0 || self.height <= 0 {
            return Err(ScenarioError::Invalid(
                "width and height must be positive".into(),
            ));
        }
        if self.rows.len() != self.height as usize {
            return Err(ScenarioError::RowCount {
                expected: self.height,
                found: self.rows.len(),
            });
        }
        for (y, row) in self.rows.iter().enumerate() {
            if row.len() != self.width as usize {
                return Err(ScenarioError::RowLength {
                    row: y,
                    expected: self.width,
                    found: row.len(),
                });
            }
            for (x, ch) in row.chars().enumerate() {
                if !matches!(ch, '.' | 'R' | 'B') {
                    return Err(ScenarioError::BadCell { row: y, col: x, ch });
                }
            }
        }
        for ignition in &self.ignitions {
            if !self.is_building(ignition.x, ignition.y) {
                return Err(ScenarioError::IgnitionNotBuilding {
                    x: ignition.x,
                    y: ignition.y,
                });
            }
        }
        let mut seen = Vec::new();
        for brigade in &self.brigades {
            if seen.contains(&brigade.id) {
                return Err(ScenarioError::DuplicateBrigadeId(brigade.id));
            }
            seen.push(brigade.id);
            let in_bounds = (0..self.width).contains(&brigade.x)
                && (0..self.height).contains(&brigade.y);
            if !in_bounds || self.is_building(brigade.x, brigade.y) {
                return Err(ScenarioError::BadBrigadePosition {
                    id: brigade.id,
                    x: brigade.x,
                    y: brigade.y,
                });
            }
        }
        if let Some(p) = self.overrides.spread_p {
            if !(0.0..=1.0).contains(&p) {
                return Err(ScenarioError::Invalid(
                    "overrides.spreadP must be in [0, 1]".into(),
                ));
            }
        }
        Ok(())
    }

    fn is_building(&self, x: i32, y: i32) -> bool {
        if !(0..self.width).contains(&x) || !(0..self.height).contains(&y) {
            return false;
        }
        self.rows[y as usize].as_bytes()[x as usize] == b'B'
    }
}
