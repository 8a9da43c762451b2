use std::collections::VecDeque;

use super::{Network, NodeId};
use crate::error::{Error, Result};

/// Connected components, each sorted, ordered by their smallest node id.
pub fn connected_components(net: &Network) -> Vec<Vec<NodeId>> {
    let n = net.node_count();
    let mut seen = vec![false; n];
    let mut components = Vec::new();
    let mut queue = VecDeque::new();
    for start in 0..n {
        if seen[start] {
            continue;
        }
        seen[start] = true;
        queue.push_back(start);
        let mut members = Vec::new();
        while let Some(u) = queue.pop_front() {
            members.push(u);
            for &w in net.neighbors(u) {
                if !seen[w] {
                    seen[w] = true;
                    queue.push_back(w);
                }
            }
        }
        members.sort_unstable();
        components.push(members);
    }
    components
}

/// Induced subgraph on the largest connected component.
///
/// Ties between equally large components go to the one holding the smallest
/// node id. Relative node order is preserved by the remap.
pub fn giant_component(net: &Network) -> Network {
    let components = connected_components(net);
    let mut best: Option<&Vec<NodeId>> = None;
    for c in &components {
        if best.map_or(true, |b| c.len() > b.len()) {
            best = Some(c);
        }
    }
    match best {
        Some(nodes) if nodes.len() < net.node_count() => net.induced_subgraph(nodes),
        _ => net.clone(),
    }
}

/// Core number of every node (bucket peeling, O(N + E)).
///
/// A node's shell is the largest `s` such that it belongs to the subgraph in
/// which every node has degree at least `s`. Isolated nodes get 0.
pub fn k_shell(net: &Network) -> Vec<usize> {
    let n = net.node_count();
    let mut degree: Vec<usize> = net.degrees().collect();
    let max_deg = degree.iter().copied().max().unwrap_or(0);

    // bin[d] = start index of degree-d nodes in `order`
    let mut bin = vec![0usize; max_deg + 2];
    for &d in &degree {
        bin[d + 1] += 1;
    }
    for d in 1..bin.len() {
        bin[d] += bin[d - 1];
    }
    let mut pos = vec![0usize; n];
    let mut order = vec![0usize; n];
    {
        let mut next = bin.clone();
        for u in 0..n {
            pos[u] = next[degree[u]];
            order[pos[u]] = u;
            next[degree[u]] += 1;
        }
    }

    for i in 0..n {
        let u = order[i];
        for &w in net.neighbors(u) {
            if degree[w] > degree[u] {
                let dw = degree[w];
                let first = order[bin[dw]];
                if first != w {
                    let pw = pos[w];
                    let pf = bin[dw];
                    order.swap(pw, pf);
                    pos[w] = pf;
                    pos[first] = pw;
                }
                bin[dw] += 1;
                degree[w] -= 1;
            }
        }
    }
    degree
}

/// Hop distances from `source`; `usize::MAX` marks unreachable nodes.
pub fn bfs_distances(net: &Network, source: NodeId) -> Vec<usize> {
    let mut dist = vec![usize::MAX; net.node_count()];
    let mut queue = VecDeque::new();
    dist[source] = 0;
    queue.push_back(source);
    while let Some(u) = queue.pop_front() {
        let next = dist[u] + 1;
        for &w in net.neighbors(u) {
            if dist[w] == usize::MAX {
                dist[w] = next;
                queue.push_back(w);
            }
        }
    }
    dist
}

/// Mean shortest-path length in `net` over all unordered pairs of `nodes`.
pub fn mean_pairwise_distance(net: &Network, nodes: &[NodeId]) -> Result<f64> {
    let mut members = nodes.to_vec();
    members.sort_unstable();
    members.dedup();
    if members.len() < 2 {
        return Err(Error::UndefinedStatistic(format!(
            "mean pairwise distance needs at least 2 nodes, got {}",
            members.len()
        )));
    }
    let mut total: u64 = 0;
    for (i, &u) in members.iter().enumerate() {
        let dist = bfs_distances(net, u);
        for &w in &members[i + 1..] {
            if dist[w] == usize::MAX {
                return Err(Error::UndefinedStatistic(format!(
                    "nodes {u} and {w} are disconnected"
                )));
            }
            total += dist[w] as u64;
        }
    }
    let pairs = (members.len() * (members.len() - 1) / 2) as f64;
    Ok(total as f64 / pairs)
}
