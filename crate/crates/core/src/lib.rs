//! microdss — a desk-scale decision-support kernel for evolving crisis
//! situations, closed in a loop with a deterministic miniature fire-disaster
//! simulator.
//!
//! The kernel ingests a stream of factual semantic features (one formatted
//! observation per perceived object and cycle), maintains one stateful
//! factual agent per fact stream, links agents into alliances and
//! oppositions by a signed spatio-temporal proximity measure, partitions
//! them each cycle into Active / Passive / Stable groups, and evaluates the
//! situation against a persisted case base to recommend brigade actions.
//!
//! Everything is deterministic: a scenario file, a seed and a configuration
//! fully determine every output byte.

pub mod characterization;
pub mod config;
pub mod fsf;
pub mod kernel;
pub mod prediction;
pub mod proximity;
pub mod records;
pub mod representation;
pub mod rng;
pub mod runner;
pub mod scenario;
pub mod sim;

pub use config::KernelConfig;
pub use fsf::{Coord, Fsf, Selector, SelectorType};
pub use kernel::Kernel;
pub use proximity::{PolarityTable, ProximityConfig};
pub use representation::RepresentationSnapshot;
pub use runner::{Policy, RunConfig, RunDriver, RunReport};
pub use sim::World;
