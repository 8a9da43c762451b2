//! SNAP-style edge lists: one `src dst` integer pair per line, `#` comments.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use super::Network;
use crate::error::{Error, Result};

/// Parses an edge list into a raw (possibly disconnected) network.
///
/// Directed pairs are symmetrized, self-loops and duplicates are dropped, and
/// node ids are remapped to `0..N` in increasing order of the original id.
/// Nodes that only appear in self-loops survive as isolated nodes.
pub fn load_edge_list<R: BufRead>(source: R) -> Result<Network> {
    let mut pairs = Vec::new();
    for (idx, line) in source.lines().enumerate() {
        let line = line?;
        let lineno = idx + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let mut ids = [0i64; 2];
        let mut count = 0;
        for token in trimmed.split_whitespace() {
            let id: i64 = token.parse().map_err(|_| Error::Parse {
                line: lineno,
                message: format!("non-integer token {token:?}"),
            })?;
            if count < 2 {
                ids[count] = id;
            }
            count += 1;
        }
        if count != 2 {
            return Err(Error::Parse {
                line: lineno,
                message: format!("expected 2 node ids, found {count}"),
            });
        }
        pairs.push((ids[0], ids[1]));
    }

    let mut remap: BTreeMap<i64, usize> = BTreeMap::new();
    for &(u, v) in &pairs {
        remap.insert(u, 0);
        remap.insert(v, 0);
    }
    for (dense, slot) in remap.values_mut().enumerate() {
        *slot = dense;
    }
    let net = Network::from_edges(
        remap.len(),
        pairs.iter().map(|(u, v)| (remap[u], remap[v])),
    )?;
    if net.edge_count() == 0 {
        return Err(Error::EmptyEdgeSet);
    }
    Ok(net)
}

pub fn read_edge_list_file(path: impl AsRef<Path>) -> Result<Network> {
    let file = File::open(path)?;
    load_edge_list(BufReader::new(file))
}

/// Writes each undirected edge once, smaller id first.
pub fn write_edge_list<W: Write>(net: &Network, mut out: W) -> Result<()> {
    writeln!(out, "# nodes: {} edges: {}", net.node_count(), net.edge_count())?;
    for (u, v) in net.edges() {
        writeln!(out, "{u} {v}")?;
    }
    out.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn load(text: &str) -> Result<Network> {
        load_edge_list(text.as_bytes())
    }

    #[test]
    fn triangle() {
        let net = load("0 1\n1 2\n2 0").unwrap();
        assert_eq!(net.node_count(), 3);
        assert!(net.degrees().all(|k| k == 2));
    }

    #[test]
    fn cleaning_rules() {
        let net = load("0 1\n1 0\n2 2\n0 1").unwrap();
        assert_eq!(net.node_count(), 3);
        assert_eq!(net.edge_count(), 1);
        assert!(net.has_edge(0, 1));
        assert_eq!(net.degree(2), 0);
    }

    #[test]
    fn comments_and_sparse_ids() {
        let net = load("# header\n# another\n30 10\n\n10 20\n").unwrap();
        assert_eq!(net.node_count(), 3);
        // 10 -> 0, 20 -> 1, 30 -> 2
        assert_eq!(net.edges().collect::<Vec<_>>(), vec![(0, 1), (0, 2)]);
    }

    #[test]
    fn parse_error_reports_line() {
        match load("0 1\n# c\n1 x\n") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(load("0 1 2\n"), Err(Error::Parse { line: 1, .. })));
    }

    #[test]
    fn empty_edge_set() {
        assert!(matches!(load("# nothing\n"), Err(Error::EmptyEdgeSet)));
        assert!(matches!(load("3 3\n"), Err(Error::EmptyEdgeSet)));
    }

    #[test]
    fn write_then_read() {
        let net = load("0 1\n1 2\n2 3\n3 0\n0 2\n").unwrap();
        let mut buf = Vec::new();
        write_edge_list(&net, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.lines().skip(1).all(|l| {
            let mut it = l.split(' ').map(|t| t.parse::<usize>().unwrap());
            it.next().unwrap() < it.next().unwrap()
        }));
        assert_eq!(load(&text).unwrap(), net);
    }
}
