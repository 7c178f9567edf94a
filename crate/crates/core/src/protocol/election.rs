use rand::Rng;

use super::ProtocolPolicy;
use crate::deployment::Node;
use crate::error::{Error, Result};

/// Rounds in one rotation epoch for election probability `p`.
pub fn epoch_length(p: f64) -> u64 {
    ((1.0 / p).round() as u64).max(1)
}

/// Rotating election threshold: `p / (1 - p * (r mod E))` for an eligible
/// node, where `E = round(1/p)` and `r` is the zero-based round index. The
/// last round of an epoch forces every still-eligible node in. Values above 1
/// (possible when `1/p` is not an integer) are capped at 1.
pub fn leach_ch_probability(p: f64, round: u64, eligible: bool) -> Result<f64> {
    if !(p > 0.0 && p <= 1.0) {
        return Err(Error::Domain(format!("election probability must lie in (0, 1], got {p}")));
    }
    if !eligible {
        return Ok(0.0);
    }
    let phase = (round % epoch_length(p)) as f64;
    let denom = 1.0 - p * phase;
    if denom <= 0.0 {
        return Err(Error::InternalInvariant(format!(
            "election denominator {denom} for p = {p} at round {round}"
        )));
    }
    Ok((p / denom).min(1.0))
}

/// Makes alive nodes eligible again at the start of their epoch. Epochs are
/// tracked per node probability so segments with different probabilities
/// rotate independently.
pub fn refresh_eligibility(nodes: &mut [Node], policy: &ProtocolPolicy, round: u64) {
    for node in nodes.iter_mut().filter(|n| n.is_alive()) {
        let epoch = epoch_length(policy.ch_probability(node.segment));
        if round.is_multiple_of(epoch) {
            node.ch_eligible = true;
        }
    }
}

/// Independent Bernoulli draws for every awake node, in id order. Elected
/// nodes lose eligibility for the rest of their epoch. Returns the elected
/// ids in ascending order.
pub fn elect_cluster_heads<R: Rng + ?Sized>(
    nodes: &mut [Node],
    policy: &ProtocolPolicy,
    round: u64,
    rng: &mut R,
) -> Result<Vec<usize>> {
    let mut heads = Vec::new();
    for node in nodes.iter_mut().filter(|n| n.is_awake()) {
        let threshold =
            leach_ch_probability(policy.ch_probability(node.segment), round, node.ch_eligible)?;
        let draw: f64 = rng.random();
        if draw < threshold {
            node.ch_eligible = false;
            node.rounds_as_ch += 1;
            heads.push(node.id);
        }
    }
    heads.sort_unstable();
    Ok(heads)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::deployment::{NodeState, Point};
    use crate::protocol::ProtocolKind;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn threshold_examples() {
        assert!((leach_ch_probability(0.1, 0, true).unwrap() - 0.1).abs() < 1e-15);
        assert!((leach_ch_probability(0.1, 20, true).unwrap() - 0.1).abs() < 1e-15);
        assert_eq!(leach_ch_probability(0.1, 3, false).unwrap(), 0.0);
        // 0.1 / (1 - 0.9)
        assert!((leach_ch_probability(0.1, 9, true).unwrap() - 1.0).abs() < 1e-12);
        assert!((leach_ch_probability(0.1, 19, true).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn threshold_rises_through_epoch() {
        let mut prev = 0.0;
        for r in 0..10 {
            let t = leach_ch_probability(0.1, r, true).unwrap();
            assert!(t > prev);
            let expected = 0.1 / (1.0 - 0.1 * r as f64);
            assert!((t - expected.min(1.0)).abs() < 1e-12);
            prev = t;
        }
    }

    #[test]
    fn non_integer_inverse_is_capped() {
        // round(1/0.55) = 2; second round of the epoch is 0.55/0.45 > 1.
        assert_eq!(epoch_length(0.55), 2);
        assert_eq!(leach_ch_probability(0.55, 1, true).unwrap(), 1.0);
        assert_eq!(epoch_length(0.95), 1);
        assert_eq!(leach_ch_probability(0.95, 7, true).unwrap(), 0.95);
        assert!(leach_ch_probability(0.0, 0, true).is_err());
    }

    #[test]
    fn no_epoch_overflows_denominator() {
        for i in 1..=1000 {
            let p = i as f64 / 1000.0;
            for r in 0..epoch_length(p) {
                leach_ch_probability(p, r, true).unwrap();
            }
        }
    }

    fn nodes(n: usize) -> Vec<Node> {
        (0..n).map(|i| Node::new(i, Point::new(i as f64, 0.0), 0.1)).collect()
    }

    #[test]
    fn certain_probability_elects_everyone() {
        let policy = ProtocolPolicy {
            segment_probs: vec![1.0],
            ..Default::default()
        };
        let mut ns = nodes(20);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let heads = elect_cluster_heads(&mut ns, &policy, 0, &mut rng).unwrap();
        assert_eq!(heads, (0..20).collect::<Vec<_>>());
        assert!(ns.iter().all(|n| !n.ch_eligible && n.rounds_as_ch == 1));
    }

    #[test]
    fn ineligible_and_sleeping_nodes_are_never_elected() {
        let policy = ProtocolPolicy {
            segment_probs: vec![1.0],
            ..Default::default()
        };
        let mut ns = nodes(4);
        ns[1].ch_eligible = false;
        ns[2].state = NodeState::Sleeping;
        ns[3].state = NodeState::Dead;
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let heads = elect_cluster_heads(&mut ns, &policy, 0, &mut rng).unwrap();
        assert_eq!(heads, vec![0]);
    }

    #[test]
    fn election_frequency_matches_probability() {
        // Bernoulli oracle: with the epoch phase pinned to 0 the threshold is
        // exactly p, so the hit rate over 10,000 fresh nodes estimates p.
        let policy = ProtocolPolicy::default().with_kind(ProtocolKind::Leach);
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        let trials = 10_000;
        let mut hits = 0;
        for _ in 0..trials {
            let mut ns = nodes(1);
            hits += elect_cluster_heads(&mut ns, &policy, 0, &mut rng).unwrap().len();
        }
        let freq = hits as f64 / trials as f64;
        assert!((freq - 0.1).abs() < 0.01, "{freq}");
    }

    #[test]
    fn eligibility_resets_per_segment_epoch() {
        let policy = ProtocolPolicy {
            segment_probs: vec![0.1, 0.5],
            ..Default::default()
        };
        let mut ns = nodes(2);
        ns[1].segment = 2;
        for n in ns.iter_mut() {
            n.ch_eligible = false;
        }
        refresh_eligibility(&mut ns, &policy, 2);
        assert!(!ns[0].ch_eligible);
        assert!(ns[1].ch_eligible);
        refresh_eligibility(&mut ns, &policy, 10);
        assert!(ns[0].ch_eligible);
    }
}
