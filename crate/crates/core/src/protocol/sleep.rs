//! Sleep-candidate selection.
//!
//! Two alive nodes closer than `d_max` form a pair and the weaker one (lower
//! residual energy) becomes a sleep candidate. Candidates are ranked by the
//! redundancy score `N / (E² · AVE)` and admitted greedily up to `max_sleep`,
//! as long as every sleeper keeps at least one awake partner within `d_max`.

use std::cmp::Ordering;

use crate::deployment::{distance, Node};
use crate::error::{Error, Result};

/// Floor applied to the mean neighbor distance so co-located nodes score
/// finitely.
const MIN_AVG_DISTANCE_M: f64 = 1e-6;

/// Redundancy score: grows with neighbor count, shrinks with residual energy
/// and mean neighbor distance.
pub fn nte_score(energy: f64, neighbor_count: usize, avg_neighbor_distance: f64) -> Result<f64> {
    if neighbor_count == 0 {
        return Err(Error::Domain("sleep score needs at least one neighbor".into()));
    }
    if !(energy.is_finite() && energy > 0.0) {
        return Err(Error::Domain(format!("sleep score needs positive energy, got {energy}")));
    }
    let ave = avg_neighbor_distance.max(MIN_AVG_DISTANCE_M);
    Ok(neighbor_count as f64 / (energy * energy * ave))
}

/// Ids of the nodes to put to sleep this round, ascending. `nodes` are the
/// alive, awake nodes of the network.
pub fn select_sleepers(nodes: &[Node], d_max: f64, max_sleep: u64, radio_range: f64) -> Vec<usize> {
    select_sleepers_with(nodes, d_max, max_sleep, radio_range, |a, b| {
        distance(nodes[a].position, nodes[b].position)
    })
    .expect("candidates always have a neighbor")
}

/// Same as [`select_sleepers`] with distances supplied by index into `nodes`.
pub(crate) fn select_sleepers_with<D>(
    nodes: &[Node],
    d_max: f64,
    max_sleep: u64,
    radio_range: f64,
    dist: D,
) -> Result<Vec<usize>>
where
    D: Fn(usize, usize) -> f64,
{
    let n = nodes.len();
    if max_sleep == 0 || n < 2 {
        return Ok(Vec::new());
    }

    // partners[i]: indices closer than d_max.
    let mut partners: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut candidate = vec![false; n];
    let mut nte_stats = vec![(0usize, 0.0f64); n];
    for i in 0..n {
        for j in (i + 1)..n {
            let d = dist(i, j);
            if d <= radio_range {
                nte_stats[i].0 += 1;
                nte_stats[i].1 += d;
                nte_stats[j].0 += 1;
                nte_stats[j].1 += d;
            }
            if d < d_max {
                partners[i].push(j);
                partners[j].push(i);
                let (a, b) = (&nodes[i], &nodes[j]);
                let weaker = match a.energy.partial_cmp(&b.energy) {
                    Some(Ordering::Less) => i,
                    Some(Ordering::Greater) => j,
                    _ if a.id > b.id => i,
                    _ => j,
                };
                candidate[weaker] = true;
            }
        }
    }

    let mut ranked = Vec::new();
    for i in (0..n).filter(|&i| candidate[i]) {
        let (count, total) = nte_stats[i];
        if count == 0 {
            // Only when radio_range < d_max.
            return Err(Error::NotACandidate(nodes[i].id));
        }
        ranked.push((nte_score(nodes[i].energy, count, total / count as f64)?, i));
    }
    ranked.sort_by(|(sa, ia), (sb, ib)| {
        sb.partial_cmp(sa)
            .unwrap_or(Ordering::Equal)
            .then(nodes[*ia].id.cmp(&nodes[*ib].id))
    });

    let mut asleep = vec![false; n];
    let mut admitted = 0u64;
    let has_guardian = |s: usize, asleep: &[bool], excluding: usize| {
        partners[s].iter().any(|&g| g != excluding && !asleep[g])
    };
    for &(_, c) in &ranked {
        if admitted == max_sleep {
            break;
        }
        if !has_guardian(c, &asleep, c) {
            continue;
        }
        // c may be the last awake partner of an earlier sleeper.
        let orphans = partners[c]
            .iter()
            .any(|&s| asleep[s] && !has_guardian(s, &asleep, c));
        if orphans {
            continue;
        }
        asleep[c] = true;
        admitted += 1;
    }

    let mut ids: Vec<usize> = (0..n).filter(|&i| asleep[i]).map(|i| nodes[i].id).collect();
    ids.sort_unstable();
    Ok(ids)
}
