//! Deterministic round-based simulator for clustered wireless sensor
//! networks.
//!
//! Two protocols share one engine: LEACH, with rotating probabilistic
//! cluster-head election, and an energy-aware variant that
//!
//! * puts redundant low-energy nodes to sleep each round, always leaving an
//!   awake partner nearby, and
//! * elects heads with probabilities that depend on the equal-area ring
//!   around the base station a node falls in.
//!
//! Runs are fully determined by `(config, protocol, seed)`.
//!
//! ```
//! use wsnsim::{run_simulation, ProtocolKind, SimulationConfig};
//!
//! let config = SimulationConfig { rounds: 20, ..SimulationConfig::default() };
//! let result = run_simulation(&config, &config.policy_for(ProtocolKind::Proposed), 7).unwrap();
//! assert_eq!(result.records.len(), 20);
//! ```

pub mod config;
pub mod coverage;
pub mod deployment;
pub mod error;
pub mod experiment;
pub mod metrics;
pub mod protocol;
pub mod radio;

pub use config::{load_config, MaxSleep, SimulationConfig};
pub use coverage::{
    coverage_probability, max_sleep_count, required_density, CoveragePlan, Rounding,
};
pub use deployment::{
    build_probe_grid, deploy_uniform, distance, neighbors, FieldConfig, Node, NodeState, Point,
    ProbeGrid,
};
pub use error::{Error, Result};
pub use metrics::{
    energy_variance, lifetime_summary, measure_coverage, RoundRecord, SimulationResult,
};
pub use protocol::{
    elect_cluster_heads, form_clusters, nte_score, run_simulation, select_sleepers,
    ClusterAssignment, Membership, ProtocolKind, ProtocolPolicy, RoundReport, SegmentMap,
    Simulation,
};
pub use radio::{aggregation_energy, rx_energy, tx_energy, RadioParams};
