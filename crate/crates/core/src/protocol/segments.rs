use crate::deployment::{distance, FieldConfig, Node, Point};
use crate::error::{Error, Result};

/// Concentric equal-area rings around the base station.
#[derive(Debug, Clone, PartialEq)]
pub struct SegmentMap {
    pub bs_position: Point,
    pub outer_radius: f64,
    pub k: usize,
    /// Outer radius of each ring, innermost first.
    pub ring_radii: Vec<f64>,
}

impl SegmentMap {
    pub fn new(bs_position: Point, outer_radius: f64, k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::config("segments", "must be at least 1"));
        }
        if !(outer_radius.is_finite() && outer_radius > 0.0) {
            return Err(Error::Geometry(format!(
                "segment outer radius must be positive, got {outer_radius}"
            )));
        }
        // Equal areas: pi r_j^2 = (j / k) pi R^2.
        let mut ring_radii: Vec<f64> = (1..=k)
            .map(|j| outer_radius * (j as f64 / k as f64).sqrt())
            .collect();
        ring_radii[k - 1] = outer_radius;
        Ok(Self {
            bs_position,
            outer_radius,
            k,
            ring_radii,
        })
    }

    /// Rings sized so the outermost one reaches the field corner farthest
    /// from the base station.
    pub fn for_field(field: &FieldConfig, k: usize) -> Result<Self> {
        let outer = field
            .corners()
            .iter()
            .map(|&c| distance(field.bs_position, c))
            .fold(0.0, f64::max);
        Self::new(field.bs_position, outer, k)
    }

    /// 1-based ring containing `p`; ring boundaries belong to the inner ring.
    pub fn segment_of(&self, p: Point) -> Result<usize> {
        let d = distance(self.bs_position, p);
        self.ring_radii
            .iter()
            .position(|&r| d <= r)
            .map(|i| i + 1)
            .ok_or_else(|| {
                Error::Geometry(format!(
                    "point ({}, {}) lies {d} m from the base station, beyond the outer ring {}",
                    p.x, p.y, self.outer_radius
                ))
            })
    }
}

pub fn assign_segments(nodes: &mut [Node], map: &SegmentMap) -> Result<()> {
    for node in nodes.iter_mut() {
        node.segment = map.segment_of(node.position)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table_map() -> SegmentMap {
        SegmentMap::for_field(&FieldConfig::default(), 10).unwrap()
    }

    #[test]
    fn rings_have_equal_area() {
        let m = table_map();
        assert!((m.outer_radius - 50.0 * 2f64.sqrt()).abs() < 1e-12);
        assert_eq!(m.ring_radii.len(), 10);
        assert_eq!(*m.ring_radii.last().unwrap(), m.outer_radius);
        let mut prev = 0.0;
        for (j, &r) in m.ring_radii.iter().enumerate() {
            assert!(r > prev);
            let expected = m.outer_radius * ((j + 1) as f64 / 10.0).sqrt();
            assert!((r - expected).abs() < 1e-9);
            let area = std::f64::consts::PI * (r * r - prev * prev);
            let share = std::f64::consts::PI * m.outer_radius.powi(2) / 10.0;
            assert!((area - share).abs() < 1e-9 * share);
            prev = r;
        }
    }

    #[test]
    fn segment_examples() {
        let m = table_map();
        assert_eq!(m.segment_of(Point::new(50.0, 50.0)).unwrap(), 1);
        assert_eq!(m.segment_of(Point::new(0.0, 0.0)).unwrap(), 10);
        let r1 = m.ring_radii[0];
        assert!((r1 - 22.360_679_774_997_898).abs() < 1e-9);
        assert_eq!(m.segment_of(Point::new(50.0 + r1, 50.0)).unwrap(), 1);
        assert_eq!(m.segment_of(Point::new(50.0 + r1 + 1e-9, 50.0)).unwrap(), 2);
    }

    #[test]
    fn outside_outer_ring_is_an_error() {
        let m = SegmentMap::new(Point::new(0.0, 0.0), 10.0, 4).unwrap();
        assert!(matches!(m.segment_of(Point::new(11.0, 0.0)), Err(Error::Geometry(_))));
        let mut nodes = vec![Node::new(0, Point::new(11.0, 0.0), 0.1)];
        assert!(assign_segments(&mut nodes, &m).is_err());
    }

    #[test]
    fn assigns_every_deployed_node() {
        let field = FieldConfig::default();
        let mut nodes = crate::deployment::deploy_uniform(&field, 150, 0.1, 3).unwrap();
        assign_segments(&mut nodes, &table_map()).unwrap();
        assert!(nodes.iter().all(|n| (1..=10).contains(&n.segment)));
    }
}
