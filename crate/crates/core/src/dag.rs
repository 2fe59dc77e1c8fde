//! Immutable computational DAGs.
//!
//! Nodes are dense integer ids in `[0, n)`. Edges are kept sorted
//! lexicographically, which also fixes a stable edge index used by the
//! PRBP engine for its marked-edge sets. Every query iterates in ascending id
//! order so that all derived artifacts are reproducible byte for byte.

use std::collections::VecDeque;
use std::fmt::Write as _;

use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Node identifier, dense in `[0, n)`.
pub type NodeId = usize;

/// A directed edge `(u, v)`: the output of `u` feeds `v`.
pub type Edge = (NodeId, NodeId);

/// Construction caps the node count here; solvers and partitions are desk-scale.
pub const MAX_NODES: usize = 1 << 22;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DagError {
    #[error("directed cycle through the nodes of edge ({0}, {1})")]
    CycleDetected(NodeId, NodeId),
    #[error("duplicate edge ({0}, {1})")]
    DuplicateEdge(NodeId, NodeId),
    #[error("self-loop on node {0}")]
    SelfLoop(NodeId),
    #[error("node {0} has no incident edge")]
    IsolatedNode(NodeId),
    #[error("node id {id} out of range for n = {n}")]
    IdOutOfRange { id: NodeId, n: usize },
    #[error("node count {0} exceeds the supported maximum of {MAX_NODES}")]
    TooLarge(usize),
    #[error("expected {expected} labels, found {found}")]
    LabelCount { expected: usize, found: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComputationDag {
    n: usize,
    edges: Vec<Edge>,
    preds: Vec<Vec<NodeId>>,
    succs: Vec<Vec<NodeId>>,
    labels: Option<Vec<String>>,
    topo: Vec<NodeId>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DagStats {
    pub n: usize,
    pub edge_count: usize,
    pub max_in_degree: usize,
    pub max_out_degree: usize,
    pub source_count: usize,
    pub sink_count: usize,
    pub trivial_cost: usize,
}

impl ComputationDag {
    /// Validates and builds a DAG from an edge list.
    pub fn new(n: usize, edges: impl IntoIterator<Item = Edge>) -> Result<Self, DagError> {
        if n > MAX_NODES {
            return Err(DagError::TooLarge(n));
        }
        let mut edges: Vec<Edge> = edges.into_iter().collect();
        for &(u, v) in &edges {
            for id in [u, v] {
                if id >= n {
                    return Err(DagError::IdOutOfRange { id, n });
                }
            }
            if u == v {
                return Err(DagError::SelfLoop(u));
            }
        }
        edges.sort_unstable();
        if let Some(w) = edges.windows(2).find(|w| w[0] == w[1]) {
            return Err(DagError::DuplicateEdge(w[0].0, w[0].1));
        }

        let mut preds = vec![Vec::new(); n];
        let mut succs = vec![Vec::new(); n];
        for &(u, v) in &edges {
            succs[u].push(v);
            preds[v].push(u);
        }
        for p in &mut preds {
            p.sort_unstable();
        }
        if let Some(v) = (0..n).find(|&v| preds[v].is_empty() && succs[v].is_empty()) {
            return Err(DagError::IsolatedNode(v));
        }

        // Kahn's algorithm with a min-queue keeps the order deterministic.
        let mut indeg: Vec<usize> = preds.iter().map(Vec::len).collect();
        let mut ready: std::collections::BinaryHeap<std::cmp::Reverse<NodeId>> = (0..n)
            .filter(|&v| indeg[v] == 0)
            .map(std::cmp::Reverse)
            .collect();
        let mut topo = Vec::with_capacity(n);
        while let Some(std::cmp::Reverse(u)) = ready.pop() {
            topo.push(u);
            for &v in &succs[u] {
                indeg[v] -= 1;
                if indeg[v] == 0 {
                    ready.push(std::cmp::Reverse(v));
                }
            }
        }
        if topo.len() < n {
            // Peel off unprocessed nodes that cannot reach back; what remains lies on cycles.
            let mut alive: Vec<bool> = indeg.iter().map(|&d| d > 0).collect();
            loop {
                let dead: Vec<NodeId> = (0..n)
                    .filter(|&v| alive[v] && !succs[v].iter().any(|&w| alive[w]))
                    .collect();
                if dead.is_empty() {
                    break;
                }
                for v in dead {
                    alive[v] = false;
                }
            }
            let (u, v) = edges
                .iter()
                .copied()
                .find(|&(u, v)| alive[u] && alive[v])
                .expect("unprocessed nodes contain a cycle");
            return Err(DagError::CycleDetected(u, v));
        }

        Ok(Self {
            n,
            edges,
            preds,
            succs,
            labels: None,
            topo,
        })
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self, DagError> {
        if labels.len() != self.n {
            return Err(DagError::LabelCount {
                expected: self.n,
                found: labels.len(),
            });
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// All edges, sorted lexicographically. The position in this slice is the edge index.
    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn in_neighbors(&self, v: NodeId) -> &[NodeId] {
        &self.preds[v]
    }

    pub fn out_neighbors(&self, v: NodeId) -> &[NodeId] {
        &self.succs[v]
    }

    pub fn in_degree(&self, v: NodeId) -> usize {
        self.preds[v].len()
    }

    pub fn out_degree(&self, v: NodeId) -> usize {
        self.succs[v].len()
    }

    pub fn is_source(&self, v: NodeId) -> bool {
        self.preds[v].is_empty()
    }

    pub fn is_sink(&self, v: NodeId) -> bool {
        self.succs[v].is_empty()
    }

    pub fn sources(&self) -> impl Iterator<Item = NodeId> + '_ {
        (0..self.n).filter(|&v| self.is_source(v))
    }

    pub fn sinks(&self) -> impl Iterator<Item = NodeId> + '_ {
        (0..self.n).filter(|&v| self.is_sink(v))
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn label(&self, v: NodeId) -> String {
        match &self.labels {
            Some(l) => l[v].clone(),
            None => v.to_string(),
        }
    }

    /// Index of edge `(u, v)` in [`Self::edges`], if present.
    pub fn edge_index(&self, u: NodeId, v: NodeId) -> Option<usize> {
        self.edges.binary_search(&(u, v)).ok()
    }

    pub fn has_edge(&self, u: NodeId, v: NodeId) -> bool {
        self.edge_index(u, v).is_some()
    }

    pub fn max_in_degree(&self) -> usize {
        self.preds.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn max_out_degree(&self) -> usize {
        self.succs.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn trivial_cost(&self) -> usize {
        self.sources().count() + self.sinks().count()
    }

    pub fn stats(&self) -> DagStats {
        let source_count = self.sources().count();
        let sink_count = self.sinks().count();
        DagStats {
            n: self.n,
            edge_count: self.edges.len(),
            max_in_degree: self.max_in_degree(),
            max_out_degree: self.max_out_degree(),
            source_count,
            sink_count,
            trivial_cost: source_count + sink_count,
        }
    }

    /// A topological order; ties are broken by smallest id.
    pub fn topological_order(&self) -> &[NodeId] {
        &self.topo
    }

    /// True iff some source-to-target path avoids every blocked node.
    pub fn reachable_avoiding(&self, targets: &FixedBitSet, blocked: &FixedBitSet) -> bool {
        let mut seen = FixedBitSet::with_capacity(self.n);
        let mut queue: VecDeque<NodeId> =
            self.sources().filter(|&s| !blocked.contains(s)).collect();
        for &s in &queue {
            seen.insert(s);
        }
        while let Some(u) = queue.pop_front() {
            if targets.contains(u) {
                return true;
            }
            for &v in &self.succs[u] {
                if !blocked.contains(v) && !seen.contains(v) {
                    seen.insert(v);
                    queue.push_back(v);
                }
            }
        }
        false
    }

    /// Node set helper sized for this DAG.
    pub fn node_set(&self, nodes: impl IntoIterator<Item = NodeId>) -> FixedBitSet {
        let mut set = FixedBitSet::with_capacity(self.n);
        set.extend(nodes);
        set
    }

    /// Graphviz rendering: one node line with its label, one `u -> v;` line per edge.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph G {\n");
        for v in 0..self.n {
            let label = self.label(v).replace('\\', "\\\\").replace('"', "\\\"");
            let _ = writeln!(out, "  {v} [label=\"{label}\"];");
        }
        for &(u, v) in &self.edges {
            let _ = writeln!(out, "  {u} -> {v};");
        }
        out.push_str("}\n");
        out
    }

    pub fn to_file(&self) -> DagFile {
        DagFile {
            n: self.n,
            edges: self.edges.iter().map(|&(u, v)| [u, v]).collect(),
            labels: self.labels.clone(),
            meta: None,
        }
    }
}

/// On-disk interchange form of a DAG.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DagFile {
    pub n: usize,
    pub edges: Vec<[NodeId; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<String>>,
    /// Free-form generator metadata; ignored when building.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub meta: Option<serde_json::Value>,
}

impl DagFile {
    pub fn build(&self) -> Result<ComputationDag, DagError> {
        let dag = ComputationDag::new(self.n, self.edges.iter().map(|e| (e[0], e[1])))?;
        match &self.labels {
            Some(labels) => dag.with_labels(labels.clone()),
            None => Ok(dag),
        }
    }
}
