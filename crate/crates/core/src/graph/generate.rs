use rand::Rng;

use super::FeedbackGraph;
use crate::{Error, Result};

/// `c` disjoint cliques over contiguous blocks whose sizes differ by at most one.
/// The first `n % c` blocks get the extra node.
pub fn gen_clique_group(n: usize, c: usize) -> Result<FeedbackGraph> {
    if c == 0 || c > n {
        return Err(Error::InvalidParameter("clique count must be in 1..=n"));
    }
    let mut g = FeedbackGraph::identity(n)?;
    let (base, extra) = (n / c, n % c);
    let mut start = 0;
    for block in 0..c {
        let len = base + usize::from(block < extra);
        for u in start..start + len {
            for v in u + 1..start + len {
                g.add_undirected(u, v);
            }
        }
        start += len;
    }
    Ok(g)
}

/// Star with centre 0 and leaves `1..n`.
pub fn gen_star(n: usize) -> Result<FeedbackGraph> {
    if n < 2 {
        return Err(Error::InvalidParameter("star graph needs at least two nodes"));
    }
    let mut g = FeedbackGraph::identity(n)?;
    for leaf in 1..n {
        g.add_undirected(0, leaf);
    }
    Ok(g)
}

/// Random undirected graph: starting from the identity, draw uniform node
/// pairs (repeats and `u == v` included) and join them until the draw count
/// reaches `density * n^2`.
pub fn gen_random<R: Rng + ?Sized>(n: usize, density: f64, rng: &mut R) -> Result<FeedbackGraph> {
    if !(density.is_finite() && density >= 0.0) {
        return Err(Error::InvalidParameter("dense factor must be finite and non-negative"));
    }
    let mut g = FeedbackGraph::identity(n)?;
    let budget = density * (n * n) as f64;
    let mut draws = 0usize;
    while (draws as f64) < budget {
        let u = rng.random_range(0..n);
        let v = rng.random_range(0..n);
        g.add_undirected(u, v);
        draws += 1;
    }
    Ok(g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::independence_number_bruteforce;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn clique_group_blocks() {
        let g = gen_clique_group(4, 2).unwrap();
        assert!(g.has_edge(0, 1) && g.has_edge(2, 3));
        assert!(!g.has_edge(1, 2) && !g.has_edge(0, 3));
        assert_eq!(independence_number_bruteforce(&g).unwrap(), 2);

        // 7 nodes, 3 cliques: blocks {0,1,2}, {3,4}, {5,6}
        let g = gen_clique_group(7, 3).unwrap();
        assert!(g.has_edge(0, 2) && !g.has_edge(2, 3) && g.has_edge(3, 4) && !g.has_edge(4, 5));

        let g = gen_clique_group(6, 6).unwrap();
        assert_eq!(g, FeedbackGraph::identity(6).unwrap());
        assert!(gen_clique_group(3, 4).is_err());
        assert!(gen_clique_group(3, 0).is_err());
    }

    #[test]
    fn clique_group_independence_number_matches_clique_count() {
        for n in 1..=20 {
            for c in 1..=n {
                let g = gen_clique_group(n, c).unwrap();
                assert_eq!(independence_number_bruteforce(&g).unwrap(), c, "n={n} c={c}");
            }
        }
    }

    #[test]
    fn star_shapes() {
        let g = gen_star(6).unwrap();
        assert_eq!(g.edges().count(), 10);
        assert_eq!(independence_number_bruteforce(&g).unwrap(), 5);
        assert_eq!(independence_number_bruteforce(&gen_star(2).unwrap()).unwrap(), 1);
        assert_eq!(independence_number_bruteforce(&gen_star(10).unwrap()).unwrap(), 9);
        assert!(gen_star(1).is_err());
    }

    #[test]
    fn random_zero_density_is_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        assert_eq!(gen_random(7, 0.0, &mut rng).unwrap(), FeedbackGraph::identity(7).unwrap());
    }

    #[test]
    fn random_draw_count_follows_budget() {
        // 0.2 * 25 = 5 draws; replay the same stream by hand.
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let g = gen_random(5, 0.2, &mut rng).unwrap();

        let mut replay = ChaCha8Rng::seed_from_u64(11);
        let mut expected = FeedbackGraph::identity(5).unwrap();
        for _ in 0..5 {
            let u = replay.random_range(0..5);
            let v = replay.random_range(0..5);
            expected.add_undirected(u, v);
        }
        assert_eq!(g, expected);
        // both streams must sit at the same position afterwards
        assert_eq!(rng.random::<u64>(), replay.random::<u64>());
    }

    #[test]
    fn random_dense_factor_saturates() {
        for seed in 0..20 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let g = gen_random(5, 10.0, &mut rng).unwrap();
            assert_eq!(g, FeedbackGraph::complete(5).unwrap(), "seed {seed}");
        }
    }

    #[test]
    fn random_is_seeded_and_symmetric() {
        let a = gen_random(12, 0.3, &mut ChaCha8Rng::seed_from_u64(5)).unwrap();
        let b = gen_random(12, 0.3, &mut ChaCha8Rng::seed_from_u64(5)).unwrap();
        assert_eq!(a, b);
        assert!(a.is_symmetric());
        assert!((0..12).all(|v| a.has_edge(v, v)));
    }
}
