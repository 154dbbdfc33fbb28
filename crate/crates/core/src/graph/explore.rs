use alloc::vec;
use alloc::vec::Vec;

use super::FeedbackGraph;
use crate::{Error, Result};

/// Largest graph accepted by [`independence_number_bruteforce`].
pub const BRUTEFORCE_LIMIT: usize = 20;

/// Greedy independence set over `candidates`, visited in ascending gap order
/// (ties by node index). An arm is kept unless an earlier pick already
/// observes it; each pick blocks its whole out-neighbourhood.
///
/// `gaps` is indexed by node and only read at candidate positions.
pub fn greedy_exploration_set(g: &FeedbackGraph, candidates: &[usize], gaps: &[f64]) -> Vec<usize> {
    let mut order = candidates.to_vec();
    order.sort_by(|&a, &b| gaps[a].total_cmp(&gaps[b]).then(a.cmp(&b)));
    order.dedup();
    exploration_set_in_order(g, &order)
}

/// Same greedy rule with a caller-supplied visiting order.
pub fn exploration_set_in_order(g: &FeedbackGraph, order: &[usize]) -> Vec<usize> {
    let mut blocked = vec![false; g.node_count()];
    let mut picked = Vec::new();
    for &a in order {
        if blocked[a] {
            continue;
        }
        picked.push(a);
        for v in g.out_neighbors(a) {
            blocked[v] = true;
        }
    }
    picked
}

/// Exact independence number by enumerating every node subset. Self-loops are
/// ignored and an edge in either direction counts as adjacency.
pub fn independence_number_bruteforce(g: &FeedbackGraph) -> Result<usize> {
    let n = g.node_count();
    if n > BRUTEFORCE_LIMIT {
        return Err(Error::TooLarge { nodes: n, limit: BRUTEFORCE_LIMIT });
    }
    let nbr: Vec<u32> = (0..n)
        .map(|u| {
            (0..n)
                .filter(|&v| v != u && (g.has_edge(u, v) || g.has_edge(v, u)))
                .fold(0u32, |m, v| m | (1 << v))
        })
        .collect();
    // independent[mask] is derived from mask minus its lowest node
    let mut independent = vec![false; 1usize << n];
    independent[0] = true;
    let mut best = 0;
    for mask in 1usize..(1 << n) {
        let low = mask.trailing_zeros() as usize;
        let rest = mask & (mask - 1);
        let ok = independent[rest] && (nbr[low] as usize & rest) == 0;
        independent[mask] = ok;
        if ok {
            best = best.max(mask.count_ones() as usize);
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{gen_random, gen_star};
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn star_with_best_leaf_keeps_all_leaves() {
        let g = gen_star(6).unwrap();
        // centre gap 0.1, leaf 1 best, other leaves 1.0
        let gaps = [0.1, 0.0, 1.0, 1.0, 1.0, 1.0];
        let s = greedy_exploration_set(&g, &[0, 1, 2, 3, 4, 5], &gaps);
        assert_eq!(s, vec![1, 2, 3, 4, 5]);
    }

    #[test]
    fn identity_keeps_everything_and_complete_keeps_argmin() {
        let id = FeedbackGraph::identity(5).unwrap();
        let gaps = [0.3, 0.0, 0.9, 0.2, 0.5];
        let mut s = greedy_exploration_set(&id, &[0, 2, 3, 4], &gaps);
        s.sort();
        assert_eq!(s, vec![0, 2, 3, 4]);

        let k = FeedbackGraph::complete(5).unwrap();
        assert_eq!(greedy_exploration_set(&k, &[0, 2, 3, 4], &gaps), vec![3]);
    }

    #[test]
    fn ties_break_by_index() {
        let k = FeedbackGraph::complete(3).unwrap();
        assert_eq!(greedy_exploration_set(&k, &[2, 1, 0], &[0.5, 0.5, 0.5]), vec![0]);
    }

    #[test]
    fn bruteforce_small_cases() {
        assert_eq!(independence_number_bruteforce(&FeedbackGraph::complete(5).unwrap()).unwrap(), 1);
        assert_eq!(independence_number_bruteforce(&gen_star(6).unwrap()).unwrap(), 5);
        assert_eq!(independence_number_bruteforce(&FeedbackGraph::identity(1).unwrap()).unwrap(), 1);
        // directed path 0 -> 1 -> 2: {0, 2} independent
        let g = FeedbackGraph::from_directed_edges(3, [(0, 1), (1, 2)]).unwrap();
        assert_eq!(independence_number_bruteforce(&g).unwrap(), 2);
        assert!(independence_number_bruteforce(&FeedbackGraph::identity(21).unwrap()).is_err());
    }

    proptest! {
        #[test]
        fn greedy_set_is_independent_and_dominating(
            seed in any::<u64>(),
            n in 1usize..=12,
            density in 0.0f64..0.6,
            mask in any::<u16>(),
            raw_gaps in proptest::collection::vec(0.0f64..2.0, 12),
        ) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let g = gen_random(n, density, &mut rng).unwrap();
            let mut candidates: Vec<usize> = (0..n).filter(|&a| mask & (1 << a) != 0).collect();
            if candidates.is_empty() {
                candidates.push(0);
            }
            let gaps = &raw_gaps[..n];
            let s = greedy_exploration_set(&g, &candidates, gaps);

            for &a in &s {
                for &b in &s {
                    prop_assert!(a == b || !g.has_edge(a, b));
                }
            }
            for &c in &candidates {
                if !s.contains(&c) {
                    prop_assert!(s.iter().any(|&a| g.has_edge(a, c) && gaps[a] <= gaps[c]));
                }
            }
            prop_assert!(s.len() <= independence_number_bruteforce(&g).unwrap());
            let first = candidates.iter().copied().min_by(|&a, &b| gaps[a].total_cmp(&gaps[b]).then(a.cmp(&b))).unwrap();
            prop_assert_eq!(s[0], first);
        }
    }
}
