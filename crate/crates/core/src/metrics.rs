//! Per-round measurements and whole-run lifetime summaries.

use crate::deployment::{distance, Node, ProbeGrid};
use crate::error::{Error, Result};
use crate::protocol::ProtocolKind;

/// Snapshot of the network at the end of one round.
#[derive(Debug, Clone, PartialEq)]
pub struct RoundRecord {
    /// 1-based round number.
    pub round: u64,
    pub alive: usize,
    pub sleeping: usize,
    pub heads: usize,
    pub direct_to_bs: usize,
    pub residual_energy_total: f64,
    pub dissipated_this_round: f64,
    pub dissipated_cumulative: f64,
    pub energy_variance: f64,
    /// Fraction of probe points sensed during the round.
    pub coverage: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulationResult {
    pub records: Vec<RoundRecord>,
    /// First Node Dies.
    pub fnd_round: Option<u64>,
    /// Half of the Nodes Alive: first round with fewer than ceil(N/2) alive.
    pub hna_round: Option<u64>,
    pub seed: u64,
    pub protocol: ProtocolKind,
    pub n_deployed: usize,
}

impl SimulationResult {
    pub fn new(records: Vec<RoundRecord>, n_deployed: usize, seed: u64, protocol: ProtocolKind) -> Self {
        let (fnd_round, hna_round) = lifetime_summary(&records, n_deployed);
        Self {
            records,
            fnd_round,
            hna_round,
            seed,
            protocol,
            n_deployed,
        }
    }

    pub fn mean_coverage(&self) -> f64 {
        mean(self.records.iter().map(|r| r.coverage))
    }

    pub fn final_dissipation(&self) -> f64 {
        self.records.last().map_or(0.0, |r| r.dissipated_cumulative)
    }
}

pub(crate) fn mean(values: impl Iterator<Item = f64>) -> f64 {
    let (sum, n) = values.fold((0.0, 0usize), |(s, n), v| (s + v, n + 1));
    if n == 0 {
        0.0
    } else {
        sum / n as f64
    }
}

/// Fraction of grid points within `sensing_range` of at least one awake node.
pub fn measure_coverage(nodes: &[Node], grid: &ProbeGrid, sensing_range: f64) -> f64 {
    if grid.is_empty() {
        return 0.0;
    }
    let sensing: Vec<_> = nodes.iter().filter(|n| n.is_awake()).collect();
    let covered = grid
        .points
        .iter()
        .filter(|&&p| sensing.iter().any(|n| distance(n.position, p) <= sensing_range))
        .count();
    covered as f64 / grid.len() as f64
}

/// Population variance of residual energy over every deployed node; dead
/// nodes count as 0 J.
pub fn energy_variance(nodes: &[Node]) -> Result<f64> {
    if nodes.is_empty() {
        return Err(Error::Domain("energy variance of an empty network".into()));
    }
    // Shift by the first value so identical energies give exactly zero.
    let n = nodes.len() as f64;
    let shift = nodes[0].energy;
    let mean = nodes.iter().map(|node| node.energy - shift).sum::<f64>() / n;
    Ok(nodes
        .iter()
        .map(|node| (node.energy - shift - mean).powi(2))
        .sum::<f64>()
        / n)
}

/// `(fnd, hna)` round numbers, each `None` if never reached.
pub fn lifetime_summary(records: &[RoundRecord], n_deployed: usize) -> (Option<u64>, Option<u64>) {
    let half = n_deployed.div_ceil(2);
    let fnd = records.iter().find(|r| r.alive < n_deployed).map(|r| r.round);
    let hna = records.iter().find(|r| r.alive < half).map(|r| r.round);
    (fnd, hna)
}
