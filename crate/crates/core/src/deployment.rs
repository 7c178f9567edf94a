//! Node placement, field geometry, neighbor discovery and the coverage probe
//! lattice.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Initial battery charge of every node, in joules.
pub const DEFAULT_INITIAL_ENERGY_J: f64 = 0.1;

/// Probe lattice spacing that yields 21 x 21 = 441 points over a 100 m field.
pub const DEFAULT_GRID_SPACING_M: f64 = 5.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }
}

impl From<(f64, f64)> for Point {
    fn from((x, y): (f64, f64)) -> Self {
        Self { x, y }
    }
}

/// Euclidean distance in meters.
pub fn distance(a: Point, b: Point) -> f64 {
    (a.x - b.x).hypot(a.y - b.y)
}

/// Rectangular sensor field with a fixed base station.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldConfig {
    pub x_min: f64,
    pub y_min: f64,
    pub x_max: f64,
    pub y_max: f64,
    pub bs_position: Point,
    pub sensing_range: f64,
    pub radio_range: f64,
}

impl Default for FieldConfig {
    fn default() -> Self {
        Self {
            x_min: 0.0,
            y_min: 0.0,
            x_max: 100.0,
            y_max: 100.0,
            bs_position: Point::new(50.0, 50.0),
            sensing_range: 10.0,
            radio_range: 10.0,
        }
    }
}

impl FieldConfig {
    pub fn validate(&self) -> Result<()> {
        let finite = [
            self.x_min,
            self.y_min,
            self.x_max,
            self.y_max,
            self.bs_position.x,
            self.bs_position.y,
            self.sensing_range,
            self.radio_range,
        ]
        .iter()
        .all(|v| v.is_finite());
        if !finite {
            return Err(Error::config("field", "coordinates and ranges must be finite"));
        }
        if self.x_max <= self.x_min {
            return Err(Error::config("field_x_max", "must exceed field_x_min"));
        }
        if self.y_max <= self.y_min {
            return Err(Error::config("field_y_max", "must exceed field_y_min"));
        }
        if self.sensing_range <= 0.0 {
            return Err(Error::config("sensing_range_m", "must be positive"));
        }
        if self.radio_range <= 0.0 {
            return Err(Error::config("radio_range_m", "must be positive"));
        }
        if !self.contains(self.bs_position) {
            return Err(Error::config("bs_x", "base station must lie inside the field"));
        }
        Ok(())
    }

    pub fn contains(&self, p: Point) -> bool {
        (self.x_min..=self.x_max).contains(&p.x) && (self.y_min..=self.y_max).contains(&p.y)
    }

    pub fn width(&self) -> f64 {
        self.x_max - self.x_min
    }

    pub fn height(&self) -> f64 {
        self.y_max - self.y_min
    }

    pub fn area(&self) -> f64 {
        self.width() * self.height()
    }

    pub fn corners(&self) -> [Point; 4] {
        [
            Point::new(self.x_min, self.y_min),
            Point::new(self.x_max, self.y_min),
            Point::new(self.x_min, self.y_max),
            Point::new(self.x_max, self.y_max),
        ]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NodeState {
    Active,
    Sleeping,
    Dead,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Node {
    pub id: usize,
    pub position: Point,
    /// Residual energy in joules.
    pub energy: f64,
    pub state: NodeState,
    /// Whether the node may still be elected cluster head in its current epoch.
    pub ch_eligible: bool,
    pub rounds_as_ch: u32,
    /// 1-based distance ring around the base station.
    pub segment: usize,
}

impl Node {
    pub fn new(id: usize, position: Point, energy: f64) -> Self {
        Self {
            id,
            position,
            energy,
            state: NodeState::Active,
            ch_eligible: true,
            rounds_as_ch: 0,
            segment: 1,
        }
    }

    pub fn is_alive(&self) -> bool {
        self.state != NodeState::Dead
    }

    pub fn is_awake(&self) -> bool {
        self.state == NodeState::Active
    }
}

/// Places `n` nodes uniformly at random over the field.
pub fn deploy_uniform(
    field: &FieldConfig,
    n: usize,
    initial_energy: f64,
    seed: u64,
) -> Result<Vec<Node>> {
    if n == 0 {
        return Err(Error::EmptyDeployment);
    }
    field.validate()?;
    if !(initial_energy.is_finite() && initial_energy > 0.0) {
        return Err(Error::config("initial_energy_j", "must be positive"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok((0..n)
        .map(|id| {
            let x = rng.random_range(field.x_min..=field.x_max);
            let y = rng.random_range(field.y_min..=field.y_max);
            Node::new(id, Point::new(x, y), initial_energy)
        })
        .collect())
}

/// Alive nodes other than `node` within `range`, with their distances, in id
/// order. Sleeping nodes count as neighbors.
pub fn neighbors(node: &Node, all: &[Node], range: f64) -> Vec<(usize, f64)> {
    let mut out: Vec<(usize, f64)> = all
        .iter()
        .filter(|other| other.id != node.id && other.is_alive())
        .filter_map(|other| {
            let d = distance(node.position, other.position);
            (d <= range).then_some((other.id, d))
        })
        .collect();
    out.sort_by_key(|&(id, _)| id);
    out
}

/// Regular lattice of coverage probe points, row-major from the lower-left
/// corner.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbeGrid {
    pub points: Vec<Point>,
    pub spacing: f64,
}

impl ProbeGrid {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

fn lattice_steps(extent: f64, spacing: f64) -> Option<usize> {
    let steps = (extent / spacing).round();
    let err = (steps * spacing - extent).abs();
    (steps >= 1.0 && err <= 1e-9 * extent.max(1.0)).then_some(steps as usize)
}

pub fn build_probe_grid(field: &FieldConfig, spacing: f64) -> Result<ProbeGrid> {
    if !(spacing.is_finite() && spacing > 0.0) {
        return Err(Error::config("grid_spacing_m", "must be positive"));
    }
    let (Some(nx), Some(ny)) = (
        lattice_steps(field.width(), spacing),
        lattice_steps(field.height(), spacing),
    ) else {
        return Err(Error::config(
            "grid_spacing_m",
            format!("{spacing} does not divide the field extents"),
        ));
    };
    let mut points = Vec::with_capacity((nx + 1) * (ny + 1));
    for j in 0..=ny {
        // Pin the last row/column to the exact field edge.
        let y = if j == ny { field.y_max } else { field.y_min + j as f64 * spacing };
        for i in 0..=nx {
            let x = if i == nx { field.x_max } else { field.x_min + i as f64 * spacing };
            points.push(Point::new(x, y));
        }
    }
    Ok(ProbeGrid { points, spacing })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn field() -> FieldConfig {
        FieldConfig::default()
    }

    #[test]
    fn deploys_inside_field() {
        let nodes = deploy_uniform(&field(), 150, DEFAULT_INITIAL_ENERGY_J, 42).unwrap();
        assert_eq!(nodes.len(), 150);
        assert!(nodes.iter().all(|n| field().contains(n.position)));
        let ids: Vec<_> = nodes.iter().map(|n| n.id).collect();
        assert_eq!(ids, (0..150).collect::<Vec<_>>());
    }

    #[test]
    fn deployment_is_deterministic() {
        let a = deploy_uniform(&field(), 150, 0.1, 42).unwrap();
        let b = deploy_uniform(&field(), 150, 0.1, 42).unwrap();
        assert_eq!(a, b);
        let c = deploy_uniform(&field(), 150, 0.1, 43).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn single_node_starts_full_and_active() {
        let nodes = deploy_uniform(&field(), 1, DEFAULT_INITIAL_ENERGY_J, 7).unwrap();
        assert_eq!(nodes.len(), 1);
        assert_eq!(nodes[0].energy, 0.1);
        assert_eq!(nodes[0].state, NodeState::Active);
        assert!(nodes[0].ch_eligible);
    }

    #[test]
    fn empty_deployment_is_rejected() {
        assert!(matches!(
            deploy_uniform(&field(), 0, 0.1, 1),
            Err(Error::EmptyDeployment)
        ));
    }

    #[test]
    fn invalid_field_is_rejected() {
        let mut f = field();
        f.bs_position = Point::new(150.0, 50.0);
        assert!(f.validate().is_err());
        let mut f = field();
        f.x_max = 0.0;
        assert!(f.validate().is_err());
        let mut f = field();
        f.sensing_range = 0.0;
        assert!(f.validate().is_err());
    }

    #[test]
    fn distance_examples() {
        assert_eq!(distance(Point::new(0.0, 0.0), Point::new(3.0, 4.0)), 5.0);
        assert_eq!(distance(Point::new(50.0, 50.0), Point::new(50.0, 50.0)), 0.0);
        let diag = distance(Point::new(0.0, 0.0), Point::new(100.0, 100.0));
        assert!((diag - 20000f64.sqrt()).abs() < 1e-12);
        assert!((diag - 141.421_356_237).abs() < 1e-9);
    }

    #[test]
    fn neighbors_within_range_only() {
        let all = vec![
            Node::new(0, Point::new(0.0, 0.0), 0.1),
            Node::new(1, Point::new(5.0, 0.0), 0.1),
            Node::new(2, Point::new(20.0, 0.0), 0.1),
        ];
        assert_eq!(neighbors(&all[0], &all, 10.0), vec![(1, 5.0)]);
        assert!(neighbors(&all[0], &all[..1], 10.0).is_empty());
    }

    #[test]
    fn co_located_nodes_see_each_other() {
        let all: Vec<_> = (0..3).map(|i| Node::new(i, Point::new(7.0, 7.0), 0.1)).collect();
        for n in &all {
            let nb = neighbors(n, &all, 10.0);
            let expected: Vec<_> = (0..3).filter(|&i| i != n.id).map(|i| (i, 0.0)).collect();
            assert_eq!(nb, expected);
        }
    }

    #[test]
    fn neighbors_skip_dead_but_keep_sleeping() {
        let mut all: Vec<_> = (0..3)
            .map(|i| Node::new(i, Point::new(i as f64, 0.0), 0.1))
            .collect();
        all[1].state = NodeState::Dead;
        all[2].state = NodeState::Sleeping;
        assert_eq!(neighbors(&all[0], &all, 10.0), vec![(2, 2.0)]);
    }

    #[test]
    fn probe_grid_has_441_points() {
        let g = build_probe_grid(&field(), DEFAULT_GRID_SPACING_M).unwrap();
        assert_eq!(g.len(), 441);
        let min = g.points.iter().map(|p| p.x.min(p.y)).fold(f64::INFINITY, f64::min);
        let max = g.points.iter().map(|p| p.x.max(p.y)).fold(f64::NEG_INFINITY, f64::max);
        assert_eq!((min, max), (0.0, 100.0));
    }

    #[test]
    fn probe_grid_degenerate_and_invalid() {
        let g = build_probe_grid(&field(), 100.0).unwrap();
        assert_eq!(g.len(), 4);
        for c in field().corners() {
            assert!(g.points.contains(&c));
        }
        assert!(matches!(
            build_probe_grid(&field(), 3.0),
            Err(Error::Config { ref key, .. }) if key == "grid_spacing_m"
        ));
        assert!(build_probe_grid(&field(), 0.0).is_err());
    }

    fn point() -> impl Strategy<Value = Point> {
        (-200.0..200.0f64, -200.0..200.0f64).prop_map(|(x, y)| Point::new(x, y))
    }

    proptest! {
        #[test]
        fn distance_is_a_metric(a in point(), b in point(), c in point()) {
            prop_assert_eq!(distance(a, b), distance(b, a));
            prop_assert_eq!(distance(a, a), 0.0);
            prop_assert!(distance(a, c) <= distance(a, b) + distance(b, c) + 1e-9);
            if a != b {
                prop_assert!(distance(a, b) > 0.0);
            }
        }

        #[test]
        fn neighbor_sets_respect_range(seed in any::<u64>(), range in 1.0..40.0f64, dead in 0usize..30) {
            let mut all = deploy_uniform(&FieldConfig::default(), 30, 0.1, seed).unwrap();
            all[dead].state = NodeState::Dead;
            for node in &all {
                for (id, d) in neighbors(node, &all, range) {
                    prop_assert_ne!(id, node.id);
                    prop_assert!(all[id].is_alive());
                    prop_assert!(d <= range);
                }
            }
        }
    }
}
