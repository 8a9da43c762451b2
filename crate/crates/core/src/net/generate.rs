use rand::Rng;

use super::{Network, NodeId};
use crate::error::{Error, Result};

/// Barabási–Albert preferential attachment.
///
/// Starts from a clique on `m + 1` nodes; every later node links to `m`
/// distinct existing nodes drawn with probability proportional to their
/// current degree. Targets are sampled from the list of edge endpoints and
/// duplicates are rejected. The result has `C(m+1, 2) + (n - m - 1) m` edges.
pub fn generate_ba<R: Rng + ?Sized>(n: usize, m: usize, rng: &mut R) -> Result<Network> {
    if m < 1 || n <= m {
        return Err(Error::InvalidParameter(format!(
            "BA generator needs n > m >= 1 (got n={n}, m={m})"
        )));
    }
    let seed = m + 1;
    let edge_total = seed * (seed - 1) / 2 + (n - seed) * m;
    let mut endpoints: Vec<NodeId> = Vec::with_capacity(2 * edge_total);
    let mut adjacency: Vec<Vec<NodeId>> = vec![Vec::new(); n];

    for u in 0..seed {
        for v in (u + 1)..seed {
            adjacency[u].push(v);
            adjacency[v].push(u);
            endpoints.push(u);
            endpoints.push(v);
        }
    }

    let mut targets: Vec<NodeId> = Vec::with_capacity(m);
    for new in seed..n {
        targets.clear();
        while targets.len() < m {
            let candidate = endpoints[rng.gen_range(0..endpoints.len())];
            if !targets.contains(&candidate) {
                targets.push(candidate);
            }
        }
        for &t in &targets {
            adjacency[new].push(t);
            adjacency[t].push(new);
            endpoints.push(new);
            endpoints.push(t);
        }
    }

    for list in &mut adjacency {
        list.sort_unstable();
    }
    Ok(Network::from_adjacency_unchecked(adjacency))
}
