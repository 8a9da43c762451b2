//! Undirected simple graphs and the structural statistics used by the
//! epidemic and immunization code.

mod algo;
mod generate;
mod io;
mod stats;

pub use algo::{bfs_distances, connected_components, giant_component, k_shell, mean_pairwise_distance};
pub use generate::generate_ba;
pub use io::{load_edge_list, read_edge_list_file, write_edge_list};
pub use stats::{degree_stats, DegreeClass, DegreeDistribution, DegreeStats};

use crate::error::{Error, Result};

pub type NodeId = usize;

/// Immutable undirected simple graph.
///
/// Neighbor lists are sorted and free of self-loops and duplicates, and
/// `v ∈ neighbors(u)` iff `u ∈ neighbors(v)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Network {
    adjacency: Vec<Vec<NodeId>>,
    edge_count: usize,
}

impl Network {
    /// Builds a network on `node_count` nodes from an arbitrary edge list.
    ///
    /// Edges are symmetrized, self-loops dropped and duplicates removed.
    pub fn from_edges<I>(node_count: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (NodeId, NodeId)>,
    {
        let mut adjacency = vec![Vec::new(); node_count];
        for (u, v) in edges {
            if u >= node_count || v >= node_count {
                return Err(Error::InvalidParameter(format!(
                    "edge ({u}, {v}) references a node outside 0..{node_count}"
                )));
            }
            if u == v {
                continue;
            }
            adjacency[u].push(v);
            adjacency[v].push(u);
        }
        let mut edge_count = 0;
        for list in &mut adjacency {
            list.sort_unstable();
            list.dedup();
            edge_count += list.len();
        }
        Ok(Network {
            adjacency,
            edge_count: edge_count / 2,
        })
    }

    /// Assumes sorted, symmetric, loop-free and duplicate-free lists.
    pub(crate) fn from_adjacency_unchecked(adjacency: Vec<Vec<NodeId>>) -> Self {
        let edge_count = adjacency.iter().map(Vec::len).sum::<usize>() / 2;
        debug_assert!(adjacency
            .iter()
            .enumerate()
            .all(|(u, list)| list.windows(2).all(|w| w[0] < w[1]) && !list.contains(&u)));
        Network {
            adjacency,
            edge_count,
        }
    }

    pub fn node_count(&self) -> usize {
        self.adjacency.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn neighbors(&self, u: NodeId) -> &[NodeId] {
        &self.adjacency[u]
    }

    pub fn degree(&self, u: NodeId) -> usize {
        self.adjacency[u].len()
    }

    pub fn degrees(&self) -> impl Iterator<Item = usize> + '_ {
        self.adjacency.iter().map(Vec::len)
    }

    pub fn max_degree(&self) -> usize {
        self.degrees().max().unwrap_or(0)
    }

    pub fn has_edge(&self, u: NodeId, v: NodeId) -> bool {
        self.adjacency[u].binary_search(&v).is_ok()
    }

    /// Each undirected edge once, smaller endpoint first, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (NodeId, NodeId)> + '_ {
        self.adjacency
            .iter()
            .enumerate()
            .flat_map(|(u, list)| list.iter().filter(move |&&v| v > u).map(move |&v| (u, v)))
    }

    pub fn is_connected(&self) -> bool {
        self.node_count() > 0 && connected_components(self).len() == 1
    }

    /// Induced subgraph on `nodes` (any order); new ids follow the order of
    /// `nodes` after sorting.
    pub fn induced_subgraph(&self, nodes: &[NodeId]) -> Network {
        let mut keep: Vec<NodeId> = nodes.to_vec();
        keep.sort_unstable();
        keep.dedup();
        let mut remap = vec![usize::MAX; self.node_count()];
        for (new, &old) in keep.iter().enumerate() {
            remap[old] = new;
        }
        let adjacency = keep
            .iter()
            .map(|&old| {
                self.adjacency[old]
                    .iter()
                    .filter_map(|&w| (remap[w] != usize::MAX).then_some(remap[w]))
                    .collect()
            })
            .collect();
        Network::from_adjacency_unchecked(adjacency)
    }
}
