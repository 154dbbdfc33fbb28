//! Feedback graphs over the action set.
//!
//! An edge `(u, v)` means that playing `u` reveals the reward of `v`. Every
//! node carries a self-loop, so the played arm is always observed.

mod explore;
mod generate;
mod subgraph;

use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;

use crate::{Error, Result};

pub use explore::{exploration_set_in_order, greedy_exploration_set, independence_number_bruteforce};
pub use generate::{gen_clique_group, gen_random, gen_star};
pub use subgraph::{build_pool, sample_connected_subgraph, UndirectedEdgeList, UnionFind};

/// Dense directed adjacency over `n` nodes with mandatory self-loops.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FeedbackGraph {
    n: usize,
    adj: Vec<bool>,
}

impl FeedbackGraph {
    /// Self-loops only.
    pub fn identity(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter("graph needs at least one node"));
        }
        let mut adj = vec![false; n * n];
        for a in 0..n {
            adj[a * n + a] = true;
        }
        Ok(Self { n, adj })
    }

    pub fn complete(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter("graph needs at least one node"));
        }
        Ok(Self { n, adj: vec![true; n * n] })
    }

    /// Builds a graph from a row-major `n * n` adjacency matrix. The diagonal
    /// is forced to `true`.
    pub fn from_adjacency(n: usize, mut adj: Vec<bool>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter("graph needs at least one node"));
        }
        if adj.len() != n * n {
            return Err(Error::DimensionMismatch { expected: n * n, actual: adj.len() });
        }
        for a in 0..n {
            adj[a * n + a] = true;
        }
        Ok(Self { n, adj })
    }

    /// Directed edges `(u, v)`; self-loops are added for every node.
    pub fn from_directed_edges(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut g = Self::identity(n)?;
        for (u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::InvalidParameter("edge endpoint out of range"));
            }
            g.adj[u * n + v] = true;
        }
        Ok(g)
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj[u * self.n + v]
    }

    pub(crate) fn add_undirected(&mut self, u: usize, v: usize) {
        self.adj[u * self.n + v] = true;
        self.adj[v * self.n + u] = true;
    }

    /// Nodes whose rewards are revealed when `a` is played. Always contains `a`.
    pub fn out_neighbors(&self, a: usize) -> impl Iterator<Item = usize> + '_ {
        let row = &self.adj[a * self.n..(a + 1) * self.n];
        row.iter().enumerate().filter(|(_, &e)| e).map(|(v, _)| v)
    }

    /// Nodes that reveal `a` when played. Always contains `a`.
    pub fn in_neighbors(&self, a: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.n).filter(move |&v| self.adj[v * self.n + a])
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.n).all(|u| (u + 1..self.n).all(|v| self.has_edge(u, v) == self.has_edge(v, u)))
    }

    /// Directed edges excluding self-loops, in row-major order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n).flat_map(move |u| (0..self.n).filter(move |&v| v != u && self.has_edge(u, v)).map(move |v| (u, v)))
    }
}

/// Where each round's feedback graph comes from.
#[derive(Debug, Clone)]
pub enum GraphKind {
    Complete,
    /// Disjoint cliques over contiguous blocks of nodes.
    CliqueGroup { cliques: usize },
    /// Node 0 joined to every other node.
    Star,
    /// Random undirected graph with the given dense factor.
    Random { density: f64 },
    /// Uniform draws from a fixed collection of graphs.
    Pool(Arc<Vec<FeedbackGraph>>),
}

#[derive(Debug, Clone)]
pub struct GraphSource {
    pub kind: GraphKind,
    pub resample_each_round: bool,
}

impl GraphSource {
    pub fn new(kind: GraphKind, resample_each_round: bool) -> Self {
        Self { kind, resample_each_round }
    }

    /// Short label used in output file names.
    pub fn label(&self) -> &'static str {
        match self.kind {
            GraphKind::Complete => "complete",
            GraphKind::CliqueGroup { .. } => "clique_group",
            GraphKind::Star => "Ktree",
            GraphKind::Random { .. } => "random",
            GraphKind::Pool(_) => "pool",
        }
    }

    /// Checks that this source can emit graphs over `n` nodes.
    pub fn validate(&self, n: usize) -> Result<()> {
        if n == 0 {
            return Err(Error::InvalidParameter("graph needs at least one node"));
        }
        match &self.kind {
            GraphKind::Complete => Ok(()),
            GraphKind::CliqueGroup { cliques } => {
                if *cliques == 0 || *cliques > n {
                    Err(Error::InvalidParameter("clique count must be in 1..=n"))
                } else {
                    Ok(())
                }
            }
            GraphKind::Star => {
                if n < 2 {
                    Err(Error::InvalidParameter("star graph needs at least two nodes"))
                } else {
                    Ok(())
                }
            }
            GraphKind::Random { density } => {
                if density.is_finite() && *density >= 0.0 {
                    Ok(())
                } else {
                    Err(Error::InvalidParameter("dense factor must be finite and non-negative"))
                }
            }
            GraphKind::Pool(pool) => {
                if pool.is_empty() {
                    return Err(Error::InvalidParameter("graph pool is empty"));
                }
                match pool.iter().find(|g| g.node_count() != n) {
                    Some(g) => Err(Error::PoolSizeMismatch { expected: n, actual: g.node_count() }),
                    None => Ok(()),
                }
            }
        }
    }

    /// Produces one graph over `n` nodes. Pool sources clone the drawn member.
    pub fn generate<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> Result<FeedbackGraph> {
        self.validate(n)?;
        match &self.kind {
            GraphKind::Complete => FeedbackGraph::complete(n),
            GraphKind::CliqueGroup { cliques } => gen_clique_group(n, *cliques),
            GraphKind::Star => gen_star(n),
            GraphKind::Random { density } => gen_random(n, *density, rng),
            GraphKind::Pool(pool) => Ok(pool[rng.random_range(0..pool.len())].clone()),
        }
    }
}
