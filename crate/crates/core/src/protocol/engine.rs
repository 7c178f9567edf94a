//! The round loop.
//!
//! Each round runs a set-up phase (wake sleepers, choose new sleepers for the
//! proposed protocol, elect heads, form clusters) followed by
//! `frames_per_round` steady-state frames in which members report to their
//! head, heads fuse and forward to the base station, and head-less nodes
//! report directly. Control traffic during set-up is free.

use std::collections::BTreeMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::cluster::{form_clusters_with, ClusterAssignment, Membership};
use super::election::{elect_cluster_heads, refresh_eligibility};
use super::segments::{assign_segments, SegmentMap};
use super::sleep::select_sleepers_with;
use super::{ProtocolKind, ProtocolPolicy};
use crate::config::SimulationConfig;
use crate::deployment::{build_probe_grid, deploy_uniform, distance, FieldConfig, Node, NodeState};
use crate::error::{Error, Result};
use crate::metrics::{energy_variance, RoundRecord, SimulationResult};
use crate::radio::{aggregation_energy, aggregation_signals, rx_energy, tx_energy, RadioParams};

/// Everything that happened in one round.
#[derive(Debug, Clone, PartialEq)]
pub struct RoundReport {
    pub record: RoundRecord,
    pub sleepers: Vec<usize>,
    pub heads: Vec<usize>,
    pub assignment: ClusterAssignment,
}

/// A single seeded run. Node positions are fixed, so pairwise distances and
/// each node's probe footprint are computed once up front.
#[derive(Debug, Clone)]
pub struct Simulation {
    field: FieldConfig,
    radio: RadioParams,
    policy: ProtocolPolicy,
    energy_drain: bool,
    nodes: Vec<Node>,
    dist: Vec<f64>,
    bs_dist: Vec<f64>,
    probe_count: usize,
    footprints: Vec<Vec<u32>>,
    rng: ChaCha8Rng,
    completed: u64,
    dissipated: f64,
}

/// Protocol randomness uses its own ChaCha stream so it never shifts the
/// deployment drawn from the same seed.
const PROTOCOL_STREAM: u64 = 1;

impl Simulation {
    /// Deploys `config.n_nodes` nodes from `seed` and prepares round 1.
    pub fn new(config: &SimulationConfig, policy: &ProtocolPolicy, seed: u64) -> Result<Self> {
        config.validate()?;
        let nodes = deploy_uniform(&config.field, config.n_nodes, config.initial_energy, seed)?;
        Self::with_nodes(config, policy, nodes, seed)
    }

    /// Runs on an explicit node layout. Node ids must equal their index.
    pub fn with_nodes(
        config: &SimulationConfig,
        policy: &ProtocolPolicy,
        mut nodes: Vec<Node>,
        seed: u64,
    ) -> Result<Self> {
        config.field.validate()?;
        config.radio.validate()?;
        policy.validate()?;
        if nodes.is_empty() {
            return Err(Error::EmptyDeployment);
        }
        if let Some(bad) = nodes.iter().enumerate().find(|(i, n)| n.id != *i) {
            return Err(Error::Geometry(format!("node at index {} has id {}", bad.0, bad.1.id)));
        }
        if let Some(out) = nodes.iter().find(|n| !config.field.contains(n.position)) {
            return Err(Error::Geometry(format!("node {} lies outside the field", out.id)));
        }
        let segments = SegmentMap::for_field(&config.field, policy.segments())?;
        assign_segments(&mut nodes, &segments)?;

        let n = nodes.len();
        let mut dist = vec![0.0; n * n];
        for i in 0..n {
            for j in (i + 1)..n {
                let d = distance(nodes[i].position, nodes[j].position);
                dist[i * n + j] = d;
                dist[j * n + i] = d;
            }
        }
        let bs = config.field.bs_position;
        let bs_dist = nodes.iter().map(|node| distance(node.position, bs)).collect();

        let grid = build_probe_grid(&config.field, config.grid_spacing)?;
        let range = config.field.sensing_range;
        let footprints = nodes
            .iter()
            .map(|node| {
                grid.points
                    .iter()
                    .enumerate()
                    .filter(|(_, &p)| distance(node.position, p) <= range)
                    .map(|(k, _)| k as u32)
                    .collect()
            })
            .collect();

        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(PROTOCOL_STREAM);

        Ok(Self {
            field: config.field.clone(),
            radio: config.radio.clone(),
            policy: policy.clone(),
            energy_drain: config.energy_drain,
            nodes,
            dist,
            bs_dist,
            probe_count: grid.len(),
            footprints,
            rng,
            completed: 0,
            dissipated: 0.0,
        })
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn policy(&self) -> &ProtocolPolicy {
        &self.policy
    }

    pub fn rounds_completed(&self) -> u64 {
        self.completed
    }

    pub fn is_finished(&self) -> bool {
        self.nodes.iter().all(|n| !n.is_alive())
    }

    pub fn dissipated_cumulative(&self) -> f64 {
        self.dissipated
    }

    fn d(&self, a: usize, b: usize) -> f64 {
        self.dist[a * self.nodes.len() + b]
    }

    /// Executes one round and returns what happened.
    pub fn run_round(&mut self) -> Result<RoundReport> {
        if self.is_finished() {
            return Err(Error::SimulationComplete);
        }
        // Zero-based round index for the election threshold.
        let r = self.completed;

        for node in self.nodes.iter_mut().filter(|n| n.state == NodeState::Sleeping) {
            node.state = NodeState::Active;
        }
        refresh_eligibility(&mut self.nodes, &self.policy, r);

        let sleepers = match self.policy.kind {
            ProtocolKind::Leach => Vec::new(),
            ProtocolKind::Proposed => self.choose_sleepers()?,
        };
        for &id in &sleepers {
            self.nodes[id].state = NodeState::Sleeping;
        }

        let heads = elect_cluster_heads(&mut self.nodes, &self.policy, r, &mut self.rng)?;
        let awake: Vec<Node> = self.nodes.iter().filter(|n| n.is_awake()).cloned().collect();
        let assignment = form_clusters_with(&awake, &heads, |a, b| self.d(a, b));
        let coverage = self.coverage();

        let dissipated = self.steady_state(&assignment)?;
        self.dissipated += dissipated;

        for node in self.nodes.iter_mut().filter(|n| n.is_alive() && n.energy <= 0.0) {
            node.energy = 0.0;
            node.state = NodeState::Dead;
        }
        self.completed += 1;

        let record = RoundRecord {
            round: self.completed,
            alive: self.nodes.iter().filter(|n| n.is_alive()).count(),
            sleeping: self.nodes.iter().filter(|n| n.state == NodeState::Sleeping).count(),
            heads: assignment.heads.len(),
            direct_to_bs: assignment.direct_to_bs(),
            residual_energy_total: self.nodes.iter().map(|n| n.energy).sum(),
            dissipated_this_round: dissipated,
            dissipated_cumulative: self.dissipated,
            energy_variance: energy_variance(&self.nodes)?,
            coverage,
        };
        Ok(RoundReport {
            record,
            sleepers,
            heads,
            assignment,
        })
    }

    fn choose_sleepers(&self) -> Result<Vec<usize>> {
        let alive: Vec<Node> = self.nodes.iter().filter(|n| n.is_alive()).cloned().collect();
        let ids: Vec<usize> = alive.iter().map(|n| n.id).collect();
        select_sleepers_with(
            &alive,
            self.policy.d_max,
            self.policy.max_sleep,
            self.field.radio_range,
            |a, b| self.d(ids[a], ids[b]),
        )
    }

    fn coverage(&self) -> f64 {
        let mut covered = vec![false; self.probe_count];
        for node in self.nodes.iter().filter(|n| n.is_awake()) {
            for &k in &self.footprints[node.id] {
                covered[k as usize] = true;
            }
        }
        covered.iter().filter(|&&c| c).count() as f64 / self.probe_count as f64
    }

    /// Charges every awake node for its steady-state traffic and returns the
    /// energy actually drawn.
    fn steady_state(&mut self, assignment: &ClusterAssignment) -> Result<f64> {
        let bits = self.radio.packet_bits;
        let mut member_counts: BTreeMap<usize, usize> =
            assignment.heads.iter().map(|&h| (h, 0)).collect();
        for m in assignment.membership.values() {
            if let Membership::Head(h) = m {
                *member_counts.get_mut(h).expect("member of an elected head") += 1;
            }
        }

        // Per-node cost of one frame.
        let mut frame_cost: Vec<(usize, f64)> = Vec::with_capacity(assignment.membership.len() + member_counts.len());
        for (&id, m) in &assignment.membership {
            let d = match *m {
                Membership::Head(h) => self.d(id, h),
                Membership::DirectToBs => self.bs_dist[id],
            };
            frame_cost.push((id, tx_energy(&self.radio, bits, d)?));
        }
        for (&h, &members) in &member_counts {
            let cost = members as f64 * rx_energy(&self.radio, bits)
                + aggregation_energy(&self.radio, bits, aggregation_signals(members))
                + tx_energy(&self.radio, bits, self.bs_dist[h])?;
            frame_cost.push((h, cost));
        }

        if !self.energy_drain {
            return Ok(0.0);
        }
        let mut spent = 0.0;
        for _ in 0..self.policy.frames_per_round {
            for &(id, cost) in &frame_cost {
                let node = &mut self.nodes[id];
                let draw = cost.min(node.energy);
                node.energy -= draw;
                spent += draw;
            }
        }
        Ok(spent)
    }
}

/// Runs until `config.rounds` rounds have executed or every node is dead.
pub fn run_simulation(
    config: &SimulationConfig,
    policy: &ProtocolPolicy,
    seed: u64,
) -> Result<SimulationResult> {
    let mut sim = Simulation::new(config, policy, seed)?;
    let mut records = Vec::new();
    while sim.rounds_completed() < config.rounds && !sim.is_finished() {
        records.push(sim.run_round()?.record);
    }
    Ok(SimulationResult::new(records, config.n_nodes, seed, policy.kind))
}
