//! Signed spatio-temporal proximity between two features.
//!
//! The measure combines three aspects: a semantic polarity looked up from a
//! symmetric table over selector types, a spatial ramp over the Chebyshev
//! distance between the two locations, and a temporal ramp over the cycle
//! difference. The result lives in `[-1, 1]`; positive scores read as
//! alliance, negative as opposition, and anything at or beyond a horizon is
//! exactly zero.

use crate::fsf::{Fsf, SelectorType};

/// Symmetric polarity table over selector types, entries in `{-1, 0, +1}`.
/// Missing pairs are neutral.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolarityTable {
    entries: [[i8; 4]; 4],
}

impl PolarityTable {
    /// Table with every pair neutral.
    pub fn neutral() -> Self {
        Self {
            entries: [[0; 4]; 4],
        }
    }

    /// The fire-rescue table: brigades oppose fires; fires reinforce each
    /// other; brigades cluster with each other; everything else is neutral.
    pub fn fire_rescue() -> Self {
        let mut table = Self::neutral();
        table.set(SelectorType::Fire, SelectorType::FireBrigade, -1);
        table.set(SelectorType::Fire, SelectorType::Fire, 1);
        table.set(SelectorType::FireBrigade, SelectorType::FireBrigade, 1);
        table
    }

    /// Set both orientations of a pair. `polarity` must be -1, 0 or +1.
    pub fn set(&mut self, a: SelectorType, b: SelectorType, polarity: i8) {
        assert!(
            (-1..=1).contains(&polarity),
            "polarity must be -1, 0 or +1"
        );
        self.entries[a.index()][b.index()] = polarity;
        self.entries[b.index()][a.index()] = polarity;
    }

    /// Symmetric lookup; 0 for pairs never set.
    pub fn polarity(&self, a: SelectorType, b: SelectorType) -> i8 {
        self.entries[a.index()][b.index()]
    }
}

impl Default for PolarityTable {
    fn default() -> Self {
        Self::fire_rescue()
    }
}

/// Horizons and the neutrality threshold for the proximity measure.
#[derive(Debug, Clone, PartialEq)]
pub struct ProximityConfig {
    /// Spatial horizon in cells; proximity is zero at or beyond it.
    pub d_max: u32,
    /// Temporal horizon in cycles; proximity is zero at or beyond it.
    pub t_max: u64,
    /// Scores with magnitude at or below this are treated as neutral and
    /// produce no link.
    pub link_threshold: f64,
}

impl Default for ProximityConfig {
    fn default() -> Self {
        Self {
            d_max: 10,
            t_max: 5,
            link_threshold: 0.1,
        }
    }
}

impl ProximityConfig {
    pub fn validate(&self) -> Result<(), String> {
        if self.d_max == 0 {
            return Err("proximity.dMax must be positive".into());
        }
        if self.t_max == 0 {
            return Err("proximity.tMax must be positive".into());
        }
        if !(0.0..1.0).contains(&self.link_threshold) {
            return Err("proximity.linkThreshold must be in [0, 1)".into());
        }
        Ok(())
    }
}

/// Signed proximity of two features:
/// `polarity * max(0, 1 - chebyshev/dMax) * max(0, 1 - |Δt|/tMax)`.
///
/// Symmetric, bounded by 1 in magnitude, and exactly zero whenever the
/// polarity is neutral or either horizon is reached.
pub fn proximity(a: &Fsf, b: &Fsf, table: &PolarityTable, cfg: &ProximityConfig) -> f64 {
    let polarity = table.polarity(a.selector().selector_type, b.selector().selector_type);
    if polarity == 0 {
        return 0.0;
    }
    let distance = a.location().chebyshev(b.location());
    let spatial = (1.0 - distance as f64 / cfg.d_max as f64).max(0.0);
    let dt = a.time().abs_diff(b.time());
    let temporal = (1.0 - dt as f64 / cfg.t_max as f64).max(0.0);
    polarity as f64 * spatial * temporal
}
