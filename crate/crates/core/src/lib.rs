//! Round-based simulator for heterogeneous wireless sensor networks.
//!
//! Nodes of three energy classes are scattered over a rectangular field and
//! report to a single base station. The [`protocol::FuzzyProtocol`] partitions
//! the alive nodes with k-means, elects one head per cluster with a Mamdani
//! rule base over centrality, residual battery and distance to the base
//! station, and lets far heads forward through a relay head chosen by a
//! second rule base. LEACH and E-DEEC are provided as baselines.
//!
//! ```
//! use wsn_fuzzy::sim::{simulate, SimConfig};
//!
//! let cfg = SimConfig { rounds: 20, ..SimConfig::default() };
//! let run = simulate(&cfg).unwrap();
//! assert_eq!(run.metrics.len(), 20);
//! ```

pub mod config;
pub mod fuzzy;
pub mod geometry;
pub mod ledger;
pub mod network;
pub mod protocol;
pub mod radio;
pub mod report;
pub mod rules;
pub mod sim;

pub use config::{load_config, parse_config, ConfigError};
pub use geometry::Point2D;
pub use network::{Network, NodeClass, NodeId};
pub use protocol::ProtocolKind;
pub use radio::RadioParams;
pub use sim::{compare, simulate, RunSummary, SimConfig};
