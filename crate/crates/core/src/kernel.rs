//! The per-cycle kernel pipeline: representation followed by
//! characterization, fed one batch of features per cycle.

use crate::characterization::{classify, interpret, CharacterizationError, CharacterizationReport};
use crate::config::KernelConfig;
use crate::fsf::Fsf;
use crate::representation::{RepresentationLayer, RepresentationSnapshot};

/// Owns the representation layer and the previous snapshot needed for
/// classification. One kernel instance serves one sequential run.
#[derive(Debug, Clone)]
pub struct Kernel {
    layer: RepresentationLayer,
    prev: Option<RepresentationSnapshot>,
    eps: f64,
}

impl Kernel {
    pub fn new(cfg: &KernelConfig) -> Self {
        Self {
            layer: RepresentationLayer::new(cfg.representation.clone()),
            prev: None,
            eps: cfg.eps,
        }
    }

    /// Run one full cycle: ingest, link, indicate, step automata, snapshot,
    /// classify against the previous snapshot, interpret.
    pub fn cycle(
        &mut self,
        fsfs: Vec<Fsf>,
        cycle: u64,
    ) -> Result<(RepresentationSnapshot, CharacterizationReport), CharacterizationError> {
        let snapshot = self.layer.run_cycle(fsfs, cycle);
        let groups = classify(self.prev.as_ref(), &snapshot, self.eps)?;
        let facts = interpret(&groups, &snapshot);
        let report = CharacterizationReport {
            cycle,
            groups,
            facts,
        };
        self.prev = Some(snapshot.clone());
        Ok((snapshot, report))
    }

    pub fn stale_dropped(&self) -> u64 {
        self.layer.stale_dropped()
    }

    pub fn last_snapshot(&self) -> Option<&RepresentationSnapshot> {
        self.prev.as_ref()
    }
}
