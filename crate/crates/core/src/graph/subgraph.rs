use alloc::collections::VecDeque;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::Rng;

use super::{FeedbackGraph, GraphKind, GraphSource};
use crate::{Error, Result};

/// Undirected simple graph with dense 0-based node ids.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UndirectedEdgeList {
    pub node_count: usize,
    /// Normalized `(min, max)` pairs, sorted and unique.
    pub edges: Vec<(usize, usize)>,
}

impl UndirectedEdgeList {
    /// Relabels arbitrary ids to `0..k` in ascending id order, then drops
    /// orientation, duplicates and self-edges. Ids that only appear in
    /// self-edges still become nodes.
    pub fn from_raw_pairs(pairs: impl IntoIterator<Item = (u64, u64)>) -> Result<Self> {
        let pairs: Vec<(u64, u64)> = pairs.into_iter().collect();
        if pairs.is_empty() {
            return Err(Error::EmptyGraph);
        }
        let mut ids: Vec<u64> = pairs.iter().flat_map(|&(u, v)| [u, v]).collect();
        ids.sort_unstable();
        ids.dedup();
        let index = |id: u64| ids.binary_search(&id).expect("id collected above");
        let mut edges: Vec<(usize, usize)> = pairs
            .iter()
            .map(|&(u, v)| (index(u), index(v)))
            .filter(|(u, v)| u != v)
            .map(|(u, v)| (u.min(v), u.max(v)))
            .collect();
        edges.sort_unstable();
        edges.dedup();
        Ok(Self { node_count: ids.len(), edges })
    }

    /// Sorted neighbour lists.
    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.node_count];
        for &(u, v) in &self.edges {
            adj[u].push(v);
            adj[v].push(u);
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        adj
    }

    /// Size of the component containing each node.
    pub fn component_sizes(&self) -> Vec<usize> {
        let mut uf = UnionFind::new(self.node_count);
        for &(u, v) in &self.edges {
            uf.union(u, v);
        }
        (0..self.node_count).map(|v| uf.size_of(v)).collect()
    }
}

/// Disjoint sets with path halving and union by size.
#[derive(Debug, Clone)]
pub struct UnionFind {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        Self { parent: (0..n).collect(), size: vec![1; n] }
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Returns false if `a` and `b` were already joined.
    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (mut ra, mut rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        if self.size[ra] < self.size[rb] {
            core::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb] = ra;
        self.size[ra] += self.size[rb];
        true
    }

    pub fn size_of(&mut self, x: usize) -> usize {
        let r = self.find(x);
        self.size[r]
    }
}

/// Carves a connected induced subgraph with exactly `size` nodes.
///
/// The start node is uniform over nodes whose component has at least `size`
/// nodes; the set then grows breadth-first with each node's unvisited
/// neighbours taken in shuffled order. Node 0 of the result is the start node.
pub fn sample_connected_subgraph<R: Rng + ?Sized>(
    e: &UndirectedEdgeList,
    size: usize,
    rng: &mut R,
) -> Result<FeedbackGraph> {
    if size == 0 {
        return Err(Error::InvalidParameter("subgraph size must be positive"));
    }
    let sizes = e.component_sizes();
    let eligible: Vec<usize> = (0..e.node_count).filter(|&v| sizes[v] >= size).collect();
    if eligible.is_empty() {
        return Err(Error::NoLargeComponent { required: size, largest: sizes.iter().copied().max().unwrap_or(0) });
    }
    let adj = e.adjacency();
    let start = eligible[rng.random_range(0..eligible.len())];

    let mut visited = vec![false; e.node_count];
    let mut chosen = vec![start];
    let mut queue = VecDeque::from([start]);
    visited[start] = true;
    'grow: while chosen.len() < size {
        let u = queue.pop_front().expect("component is large enough");
        let mut next: Vec<usize> = adj[u].iter().copied().filter(|&v| !visited[v]).collect();
        next.shuffle(rng);
        for v in next {
            visited[v] = true;
            chosen.push(v);
            queue.push_back(v);
            if chosen.len() == size {
                break 'grow;
            }
        }
    }

    let mut g = FeedbackGraph::identity(size)?;
    for i in 0..size {
        for j in i + 1..size {
            if adj[chosen[i]].binary_search(&chosen[j]).is_ok() {
                g.add_undirected(i, j);
            }
        }
    }
    Ok(g)
}

/// Pre-samples `pool_size` connected subgraphs; the returned source draws one
/// uniformly each round.
pub fn build_pool<R: Rng + ?Sized>(
    e: &UndirectedEdgeList,
    pool_size: usize,
    subgraph_size: usize,
    rng: &mut R,
) -> Result<GraphSource> {
    if pool_size == 0 {
        return Err(Error::InvalidParameter("pool size must be positive"));
    }
    let pool = (0..pool_size)
        .map(|_| sample_connected_subgraph(e, subgraph_size, rng))
        .collect::<Result<Vec<_>>>()?;
    Ok(GraphSource::new(GraphKind::Pool(Arc::new(pool)), true))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::gen_random;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn connected(g: &FeedbackGraph) -> bool {
        let n = g.node_count();
        let mut seen = vec![false; n];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(u) = stack.pop() {
            for v in g.out_neighbors(u) {
                if !seen[v] {
                    seen[v] = true;
                    stack.push(v);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    fn edge_list_of(g: &FeedbackGraph) -> UndirectedEdgeList {
        UndirectedEdgeList::from_raw_pairs(g.edges().map(|(u, v)| (u as u64, v as u64))).unwrap()
    }

    #[test]
    fn relabel_and_dedup() {
        let e = UndirectedEdgeList::from_raw_pairs([(0, 1), (1, 2)]).unwrap();
        assert_eq!((e.node_count, e.edges.len()), (3, 2));
        let e = UndirectedEdgeList::from_raw_pairs([(2, 1), (1, 2)]).unwrap();
        assert_eq!((e.node_count, e.edges.clone()), (2, vec![(0, 1)]));
        let e = UndirectedEdgeList::from_raw_pairs([(5, 9)]).unwrap();
        assert_eq!((e.node_count, e.edges.clone()), (2, vec![(0, 1)]));
        assert_eq!(UndirectedEdgeList::from_raw_pairs([]), Err(Error::EmptyGraph));
    }

    #[test]
    fn union_find_sizes() {
        let mut uf = UnionFind::new(5);
        assert!(uf.union(0, 1));
        assert!(uf.union(3, 4));
        assert!(!uf.union(1, 0));
        assert_eq!(uf.size_of(1), 2);
        assert_eq!(uf.size_of(2), 1);
        assert!(uf.union(1, 4));
        assert_eq!(uf.size_of(3), 4);
        assert_eq!(uf.find(0), uf.find(3));
    }

    #[test]
    fn path_pairs_are_edges() {
        let e = UndirectedEdgeList::from_raw_pairs([(0, 1), (1, 2), (2, 3)]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..20 {
            let g = sample_connected_subgraph(&e, 2, &mut rng).unwrap();
            assert!(g.has_edge(0, 1));
        }
    }

    #[test]
    fn forced_into_large_component() {
        // component A: 0-1-2, component B: a 10-cycle on 10..19
        let mut pairs = vec![(0, 1), (1, 2)];
        pairs.extend((0..10).map(|i| (10 + i, 10 + (i + 1) % 10)));
        let e = UndirectedEdgeList::from_raw_pairs(pairs).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..30 {
            let g = sample_connected_subgraph(&e, 5, &mut rng).unwrap();
            assert_eq!(g.node_count(), 5);
            assert!(connected(&g));
            // induced subgraph of a cycle path: 4 edges
            assert_eq!(g.edges().count() / 2, 4);
        }
        assert_eq!(
            sample_connected_subgraph(&e, 11, &mut rng),
            Err(Error::NoLargeComponent { required: 11, largest: 10 })
        );
    }

    #[test]
    fn samples_from_random_graph_are_connected() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let base = gen_random(20, 0.15, &mut rng).unwrap();
        let e = edge_list_of(&base);
        for _ in 0..100 {
            let g = sample_connected_subgraph(&e, 4, &mut rng).unwrap();
            assert_eq!(g.node_count(), 4);
            assert!(connected(&g));
        }
    }

    #[test]
    fn pools_are_seeded() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let e = edge_list_of(&gen_random(30, 0.1, &mut rng).unwrap());
        let a = build_pool(&e, 5, 6, &mut ChaCha8Rng::seed_from_u64(7)).unwrap();
        let b = build_pool(&e, 5, 6, &mut ChaCha8Rng::seed_from_u64(7)).unwrap();
        match (a.kind, b.kind) {
            (GraphKind::Pool(a), GraphKind::Pool(b)) => {
                assert_eq!(a, b);
                assert_eq!(a.len(), 5);
            }
            _ => unreachable!(),
        }
        assert!(a.resample_each_round);

        let single = build_pool(&e, 1, 6, &mut rng).unwrap();
        let first = single.generate(6, &mut rng).unwrap();
        for _ in 0..5 {
            assert_eq!(single.generate(6, &mut rng).unwrap(), first);
        }
    }
}
