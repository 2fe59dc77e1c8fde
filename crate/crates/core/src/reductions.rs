//! Independent sets, cliques and the oracle-driven maximum clique search.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Subset enumeration is refused above this many nodes.
pub const MAX_ENUM_NODES: usize = 24;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("self-loop on node {0}")]
    SelfLoop(usize),
    #[error("duplicate edge {{{0}, {1}}}")]
    DuplicateEdge(usize, usize),
    #[error("node id {id} out of range for n = {n}")]
    IdOutOfRange { id: usize, n: usize },
    #[error("{n} nodes exceed the enumeration limit of {max}")]
    InstanceTooLarge { n: usize, max: usize },
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

/// A simple undirected graph on `[0, n)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawGraph", into = "RawGraph")]
pub struct UndirectedGraph {
    n: usize,
    /// Normalized `(min, max)` pairs, sorted.
    edges: Vec<(usize, usize)>,
    adj: Vec<Vec<usize>>,
}

#[derive(Serialize, Deserialize)]
struct RawGraph {
    n: usize,
    edges: Vec<[usize; 2]>,
}

impl TryFrom<RawGraph> for UndirectedGraph {
    type Error = GraphError;
    fn try_from(raw: RawGraph) -> Result<Self, GraphError> {
        UndirectedGraph::new(raw.n, raw.edges.iter().map(|e| (e[0], e[1])))
    }
}

impl From<UndirectedGraph> for RawGraph {
    fn from(g: UndirectedGraph) -> Self {
        RawGraph {
            n: g.n,
            edges: g.edges.iter().map(|&(a, b)| [a, b]).collect(),
        }
    }
}

impl UndirectedGraph {
    pub fn new(
        n: usize,
        edges: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self, GraphError> {
        let mut norm = Vec::new();
        for (a, b) in edges {
            for id in [a, b] {
                if id >= n {
                    return Err(GraphError::IdOutOfRange { id, n });
                }
            }
            if a == b {
                return Err(GraphError::SelfLoop(a));
            }
            norm.push((a.min(b), a.max(b)));
        }
        norm.sort_unstable();
        if let Some(w) = norm.windows(2).find(|w| w[0] == w[1]) {
            return Err(GraphError::DuplicateEdge(w[0].0, w[0].1));
        }
        let mut adj = vec![Vec::new(); n];
        for &(a, b) in &norm {
            adj[a].push(b);
            adj[b].push(a);
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        Ok(Self {
            n,
            edges: norm,
            adj,
        })
    }

    /// Parses `n` on the first line, then one `u v` pair per line. `#` starts a comment.
    pub fn parse_text(text: &str) -> Result<Self, GraphError> {
        let mut n = None;
        let mut edges = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap().trim();
            if line.is_empty() {
                continue;
            }
            let err = |msg: String| GraphError::Parse { line: i + 1, msg };
            let nums = line
                .split_whitespace()
                .map(|t| t.parse::<usize>().map_err(|e| err(format!("`{t}`: {e}"))))
                .collect::<Result<Vec<_>, _>>()?;
            match (n, nums.as_slice()) {
                (None, &[count]) => n = Some(count),
                (Some(_), &[a, b]) => edges.push((a, b)),
                (None, _) => return Err(err("expected the node count".into())),
                (Some(_), _) => return Err(err("expected `u v`".into())),
            }
        }
        let n = n.ok_or(GraphError::Parse {
            line: 0,
            msg: "empty input".into(),
        })?;
        Self::new(n, edges)
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("{}\n", self.n);
        for &(a, b) in &self.edges {
            let _ = writeln!(out, "{a} {b}");
        }
        out
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        a != b && self.adj[a].binary_search(&b).is_ok()
    }

    /// The subgraph induced by `keep` (ascending), relabelled to `[0, keep.len())`.
    pub fn induced(&self, keep: &[usize]) -> UndirectedGraph {
        let mut pos = vec![usize::MAX; self.n];
        for (i, &v) in keep.iter().enumerate() {
            pos[v] = i;
        }
        let edges = self
            .edges
            .iter()
            .filter(|&&(a, b)| pos[a] != usize::MAX && pos[b] != usize::MAX)
            .map(|&(a, b)| (pos[a], pos[b]));
        UndirectedGraph::new(keep.len(), edges).expect("induced subgraph of a simple graph")
    }

    fn masks(&self) -> Result<Vec<u32>, GraphError> {
        if self.n > MAX_ENUM_NODES {
            return Err(GraphError::InstanceTooLarge {
                n: self.n,
                max: MAX_ENUM_NODES,
            });
        }
        Ok(self
            .adj
            .iter()
            .map(|list| list.iter().fold(0u32, |m, &b| m | (1 << b)))
            .collect())
    }
}

pub fn complement(g: &UndirectedGraph) -> UndirectedGraph {
    let n = g.node_count();
    let edges = (0..n)
        .flat_map(|a| (a + 1..n).map(move |b| (a, b)))
        .filter(|&(a, b)| !g.has_edge(a, b));
    UndirectedGraph::new(n, edges).expect("complement of a simple graph")
}

fn bits(mut m: u32) -> Vec<usize> {
    let mut out = Vec::new();
    while m != 0 {
        out.push(m.trailing_zeros() as usize);
        m &= m - 1;
    }
    out
}

/// Maximum independent set size and every maximum set, in lexicographic order.
pub fn brute_force_max_independent_sets(
    g: &UndirectedGraph,
) -> Result<(usize, Vec<Vec<usize>>), GraphError> {
    let adj = g.masks()?;
    let n = g.node_count();
    let mut best = 0;
    let mut found: Vec<u32> = Vec::new();

    // Branch on the lowest undecided node: take it (dropping its neighbors) or skip it.
    fn go(
        adj: &[u32],
        v: usize,
        n: usize,
        chosen: u32,
        banned: u32,
        best: &mut usize,
        found: &mut Vec<u32>,
    ) {
        let size = chosen.count_ones() as usize;
        let mut v = v;
        while v < n && banned & (1 << v) != 0 {
            v += 1;
        }
        if v == n {
            if size > *best {
                *best = size;
                found.clear();
            }
            if size == *best {
                found.push(chosen);
            }
            return;
        }
        let open = (v..n).filter(|&u| banned & (1 << u) == 0).count();
        if size + open < *best {
            return;
        }
        go(
            adj,
            v + 1,
            n,
            chosen | 1 << v,
            banned | adj[v] | 1 << v,
            best,
            found,
        );
        go(adj, v + 1, n, chosen, banned | 1 << v, best, found);
    }

    go(&adj, 0, n, 0, 0, &mut best, &mut found);
    // A skipped node that is not blocked can be added back, so non-maximal
    // sets may reach the leaves; keep only those of the best size.
    let mut sets: Vec<Vec<usize>> = found
        .into_iter()
        .filter(|m| m.count_ones() as usize == best)
        .map(bits)
        .collect();
    sets.sort();
    sets.dedup();
    Ok((best, sets))
}

/// Whether some maximum independent set of `g` contains `v0`.
pub fn maxinset_vertex(g: &UndirectedGraph, v0: usize) -> Result<bool, GraphError> {
    if v0 >= g.node_count() {
        return Err(GraphError::IdOutOfRange {
            id: v0,
            n: g.node_count(),
        });
    }
    let (_, sets) = brute_force_max_independent_sets(g)?;
    Ok(sets.iter().any(|s| s.contains(&v0)))
}

/// Whether some maximum clique of `g` contains `v0`.
pub fn maxclique_vertex(g: &UndirectedGraph, v0: usize) -> Result<bool, GraphError> {
    maxinset_vertex(&complement(g), v0)
}

pub fn brute_force_max_clique_size(g: &UndirectedGraph) -> Result<usize, GraphError> {
    Ok(brute_force_max_independent_sets(&complement(g))?.0)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CliqueSearch {
    /// Original node ids, ascending.
    pub clique: Vec<usize>,
    pub oracle_calls: usize,
    pub levels: usize,
}

/// Finds a maximum clique using only a `maxclique-vertex` decision oracle.
///
/// At each level the oracle is asked about the current nodes in ascending
/// order. The first node that lies in no maximum clique is removed. If every
/// node lies in one, the lowest node of less than full degree is removed
/// instead: one of its non-neighbors keeps a maximum clique alive. A
/// complete graph is returned as is.
pub fn maxclique_via_oracle<F>(g: &UndirectedGraph, mut oracle: F) -> CliqueSearch
where
    F: FnMut(&UndirectedGraph, usize) -> bool,
{
    let mut alive: Vec<usize> = (0..g.node_count()).collect();
    let mut calls = 0;
    let mut levels = 0;
    loop {
        let sub = g.induced(&alive);
        let m = alive.len();
        if (0..m).all(|v| sub.degree(v) + 1 == m) {
            return CliqueSearch {
                clique: alive,
                oracle_calls: calls,
                levels,
            };
        }
        levels += 1;
        let mut drop = None;
        for v in 0..m {
            calls += 1;
            if !oracle(&sub, v) {
                drop = Some(v);
                break;
            }
        }
        let drop = drop.unwrap_or_else(|| (0..m).find(|&v| sub.degree(v) + 1 < m).unwrap());
        alive.remove(drop);
    }
}

/// [`maxclique_via_oracle`] with the brute-force oracle.
pub fn maxclique_brute_oracle(g: &UndirectedGraph) -> Result<CliqueSearch, GraphError> {
    g.masks()?;
    Ok(maxclique_via_oracle(g, |sub, v| {
        maxclique_vertex(sub, v).expect("subgraph within guard")
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path3() -> UndirectedGraph {
        UndirectedGraph::new(3, [(0, 1), (1, 2)]).unwrap()
    }

    fn k(n: usize) -> UndirectedGraph {
        UndirectedGraph::new(n, (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b)))).unwrap()
    }

    #[test]
    fn construction_errors() {
        assert_eq!(
            UndirectedGraph::new(2, [(1, 1)]),
            Err(GraphError::SelfLoop(1))
        );
        assert_eq!(
            UndirectedGraph::new(2, [(0, 1), (1, 0)]),
            Err(GraphError::DuplicateEdge(0, 1))
        );
        assert!(UndirectedGraph::new(2, [(0, 2)]).is_err());
    }

    #[test]
    fn text_format() {
        let g = UndirectedGraph::parse_text("# path\n3\n0 1\n1 2 # tail\n\n").unwrap();
        assert_eq!(g, path3());
        assert_eq!(g.to_text(), "3\n0 1\n1 2\n");
        assert!(UndirectedGraph::parse_text("3\n0 1 2\n").is_err());
        assert!(UndirectedGraph::parse_text("").is_err());
    }

    #[test]
    fn independent_sets() {
        assert_eq!(
            brute_force_max_independent_sets(&k(3)).unwrap(),
            (1, vec![vec![0], vec![1], vec![2]])
        );
        assert_eq!(
            brute_force_max_independent_sets(&path3()).unwrap(),
            (2, vec![vec![0, 2]])
        );
        let empty = UndirectedGraph::new(4, []).unwrap();
        assert_eq!(
            brute_force_max_independent_sets(&empty).unwrap(),
            (4, vec![vec![0, 1, 2, 3]])
        );
        let big = UndirectedGraph::new(25, []).unwrap();
        assert!(matches!(
            brute_force_max_independent_sets(&big),
            Err(GraphError::InstanceTooLarge { .. })
        ));
    }

    #[test]
    fn maxinset_vertex_on_path() {
        assert!(!maxinset_vertex(&path3(), 1).unwrap());
        assert!(maxinset_vertex(&path3(), 0).unwrap());
        assert!((0..3).all(|v| maxinset_vertex(&k(3), v).unwrap()));
    }

    #[test]
    fn complements() {
        assert_eq!(complement(&k(3)).edges().len(), 0);
        assert_eq!(complement(&UndirectedGraph::new(3, []).unwrap()), k(3));
        assert_eq!(complement(&path3()).edges(), &[(0, 2)]);
    }

    #[test]
    fn clique_search() {
        assert_eq!(
            maxclique_brute_oracle(&k(4)).unwrap().clique,
            vec![0, 1, 2, 3]
        );
        assert_eq!(maxclique_brute_oracle(&path3()).unwrap().clique.len(), 2);
        // triangle 0-1-2 plus a separate edge 3-4
        let g = UndirectedGraph::new(5, [(0, 1), (0, 2), (1, 2), (3, 4)]).unwrap();
        assert_eq!(maxclique_brute_oracle(&g).unwrap().clique, vec![0, 1, 2]);
    }

    #[test]
    fn serde_roundtrip() {
        let g = path3();
        let text = serde_json::to_string(&g).unwrap();
        assert_eq!(text, r#"{"n":3,"edges":[[0,1],[1,2]]}"#);
        assert_eq!(serde_json::from_str::<UndirectedGraph>(&text).unwrap(), g);
        assert!(serde_json::from_str::<UndirectedGraph>(r#"{"n":1,"edges":[[0,0]]}"#).is_err());
    }
}
