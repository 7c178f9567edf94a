use std::collections::BTreeMap;

use crate::deployment::{distance, Node};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Membership {
    Head(usize),
    /// No head was elected; the node reports straight to the base station.
    DirectToBs,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ClusterAssignment {
    /// Head ids, ascending.
    pub heads: Vec<usize>,
    /// Every awake non-head node, keyed by id.
    pub membership: BTreeMap<usize, Membership>,
}

impl ClusterAssignment {
    pub fn members_of(&self, head: usize) -> impl Iterator<Item = usize> + '_ {
        self.membership
            .iter()
            .filter(move |(_, m)| **m == Membership::Head(head))
            .map(|(&id, _)| id)
    }

    pub fn direct_to_bs(&self) -> usize {
        self.membership
            .values()
            .filter(|m| **m == Membership::DirectToBs)
            .count()
    }
}

/// Each awake non-head joins its nearest head; ties go to the lower head id.
pub fn form_clusters(awake: &[Node], heads: &[usize]) -> ClusterAssignment {
    let index: BTreeMap<usize, usize> = awake.iter().enumerate().map(|(i, n)| (n.id, i)).collect();
    form_clusters_with(awake, heads, |a, b| {
        distance(awake[index[&a]].position, awake[index[&b]].position)
    })
}

/// Same as [`form_clusters`] with distances supplied by node id.
pub(crate) fn form_clusters_with<D>(awake: &[Node], heads: &[usize], dist: D) -> ClusterAssignment
where
    D: Fn(usize, usize) -> f64,
{
    let mut heads = heads.to_vec();
    heads.sort_unstable();
    heads.dedup();
    let membership = awake
        .iter()
        .filter(|n| heads.binary_search(&n.id).is_err())
        .map(|n| {
            let mut best: Option<(f64, usize)> = None;
            for &h in &heads {
                let d = dist(n.id, h);
                if best.is_none_or(|(bd, _)| d < bd) {
                    best = Some((d, h));
                }
            }
            let m = best.map_or(Membership::DirectToBs, |(_, h)| Membership::Head(h));
            (n.id, m)
        })
        .collect();
    ClusterAssignment { heads, membership }
}
