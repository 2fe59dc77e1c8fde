//! Partition-based lower bounds.
//!
//! Node partitions (S-partitions and S-dominator partitions) and edge
//! partitions, their validity checks, extraction from PRBP schedules, exact
//! minimum class counts on tiny DAGs, and the resulting cost bounds.

mod bounds;
mod extract;
mod flow;
mod search;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dag::{ComputationDag, NodeId};
use crate::game::MoveFailure;

pub use bounds::{
    analytic_bound, lower_bound, spart_counting_bound, AnalyticBound, AnalyticFamily,
    SpartCertificate,
};
pub use extract::{edge_partition_from_schedule, node_partition_from_schedule};
pub use flow::{
    edge_starts, is_dominator, is_edge_dominator, min_dominator, min_dominator_size, MinDominator,
};
pub use search::{min_classes_brute_force, DEFAULT_GROUND_LIMIT};

pub type Edge = (NodeId, NodeId);

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NodePartition {
    pub classes: Vec<Vec<NodeId>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct EdgePartition {
    pub classes: Vec<Vec<Edge>>,
}

/// Either kind of partition; serialized as a bare array of classes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Partition {
    Nodes(NodePartition),
    Edges(EdgePartition),
}

impl Partition {
    pub fn class_count(&self) -> usize {
        match self {
            Partition::Nodes(p) => p.classes.len(),
            Partition::Edges(p) => p.classes.len(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PartitionKind {
    SPartition,
    SEdgePartition,
    SDominatorPartition,
}

impl PartitionKind {
    pub fn is_edge(self) -> bool {
        self == PartitionKind::SEdgePartition
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Condition {
    Ordering,
    DominatorSize,
    TerminalSize,
}

/// Evidence for a failed condition.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Witness {
    /// Edges that violate the ordering: one edge for node partitions, a
    /// consecutive pair for edge partitions.
    Edges(Vec<Edge>),
    /// More than S vertex-disjoint source paths into the class, so no
    /// dominator of size S exists.
    DisjointPaths(Vec<Vec<NodeId>>),
    /// The (edge-)terminal set, larger than S.
    Terminal(Vec<NodeId>),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartitionVerdict {
    pub valid: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub failed_condition: Option<Condition>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub failing_class: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
    /// A minimum dominator for each class checked so far.
    pub dominators: Vec<Vec<NodeId>>,
}

impl PartitionVerdict {
    fn fail(
        class: Option<usize>,
        cond: Condition,
        witness: Witness,
        dominators: Vec<Vec<NodeId>>,
    ) -> Self {
        Self {
            valid: false,
            failed_condition: Some(cond),
            failing_class: class,
            witness: Some(witness),
            dominators,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PartitionError {
    #[error("{0}")]
    Shape(String),
    #[error("{kind:?} needs a {expected} partition")]
    WrongGround {
        kind: PartitionKind,
        expected: &'static str,
    },
    #[error("ground set has {size} elements, above the enumeration limit of {limit}")]
    InstanceTooLarge { size: usize, limit: usize },
    #[error("schedule is not a PRBP schedule")]
    NotPrbp,
    #[error("schedules using the clear rule can mark an edge twice")]
    ClearUnsupported,
    #[error("invalid schedule: {}", .0.reason)]
    InvalidSchedule(MoveFailure),
}

/// Class index of every node; errors unless each node appears exactly once.
/// Empty classes are allowed.
pub(crate) fn node_classes(
    dag: &ComputationDag,
    p: &NodePartition,
) -> Result<Vec<usize>, PartitionError> {
    let n = dag.node_count();
    let mut class = vec![usize::MAX; n];
    for (i, c) in p.classes.iter().enumerate() {
        for &v in c {
            if v >= n {
                return Err(PartitionError::Shape(format!("node {v} out of range")));
            }
            if class[v] != usize::MAX {
                return Err(PartitionError::Shape(format!("node {v} appears twice")));
            }
            class[v] = i;
        }
    }
    match class.iter().position(|&c| c == usize::MAX) {
        Some(v) => Err(PartitionError::Shape(format!("node {v} is in no class"))),
        None => Ok(class),
    }
}

/// Class index of every edge, by edge index.
pub(crate) fn edge_classes(
    dag: &ComputationDag,
    p: &EdgePartition,
) -> Result<Vec<usize>, PartitionError> {
    let m = dag.edge_count();
    let mut class = vec![usize::MAX; m];
    for (i, c) in p.classes.iter().enumerate() {
        for &(u, v) in c {
            let Some(e) = dag.edge_index(u, v) else {
                return Err(PartitionError::Shape(format!("({u}, {v}) is not an edge")));
            };
            if class[e] != usize::MAX {
                return Err(PartitionError::Shape(format!(
                    "edge ({u}, {v}) appears twice"
                )));
            }
            class[e] = i;
        }
    }
    match class.iter().position(|&c| c == usize::MAX) {
        Some(e) => {
            let (u, v) = dag.edges()[e];
            Err(PartitionError::Shape(format!(
                "edge ({u}, {v}) is in no class"
            )))
        }
        None => Ok(class),
    }
}

/// Terminal set of a node class: members with no out-neighbor in the class.
pub fn terminal_set(dag: &ComputationDag, class: &[NodeId]) -> Vec<NodeId> {
    let set = dag.node_set(class.iter().copied());
    let mut out: Vec<NodeId> = class
        .iter()
        .copied()
        .filter(|&v| !dag.out_neighbors(v).iter().any(|&w| set.contains(w)))
        .collect();
    out.sort_unstable();
    out.dedup();
    out
}

/// Nodes with an in-edge in `edges` but no out-edge in `edges`.
pub fn edge_terminal_set(edges: &[Edge]) -> Vec<NodeId> {
    let mut heads: Vec<NodeId> = edges.iter().map(|&(_, v)| v).collect();
    heads.sort_unstable();
    heads.dedup();
    let tails = edge_starts(edges);
    heads.retain(|v| tails.binary_search(v).is_err());
    heads
}

/// Checks the ordering, dominator and (unless `kind` is
/// `SDominatorPartition`) terminal conditions, in that order, stopping at
/// the first failure.
pub fn validate_partition(
    dag: &ComputationDag,
    partition: &Partition,
    s: usize,
    kind: PartitionKind,
) -> Result<PartitionVerdict, PartitionError> {
    match (partition, kind.is_edge()) {
        (Partition::Nodes(p), false) => validate_nodes(dag, p, s, kind),
        (Partition::Edges(p), true) => validate_edges(dag, p, s),
        (_, edge) => Err(PartitionError::WrongGround {
            kind,
            expected: if edge { "edge" } else { "node" },
        }),
    }
}

fn validate_nodes(
    dag: &ComputationDag,
    p: &NodePartition,
    s: usize,
    kind: PartitionKind,
) -> Result<PartitionVerdict, PartitionError> {
    let class = node_classes(dag, p)?;
    if let Some(&(u, v)) = dag.edges().iter().find(|&&(u, v)| class[u] > class[v]) {
        let w = Witness::Edges(vec![(u, v)]);
        return Ok(PartitionVerdict::fail(
            Some(class[u]),
            Condition::Ordering,
            w,
            Vec::new(),
        ));
    }
    let mut dominators = Vec::new();
    for (i, c) in p.classes.iter().enumerate() {
        let cut = min_dominator(dag, c);
        if cut.dominator.len() > s {
            let w = Witness::DisjointPaths(cut.paths);
            return Ok(PartitionVerdict::fail(
                Some(i),
                Condition::DominatorSize,
                w,
                dominators,
            ));
        }
        dominators.push(cut.dominator);
    }
    if kind == PartitionKind::SPartition {
        for (i, c) in p.classes.iter().enumerate() {
            let term = terminal_set(dag, c);
            if term.len() > s {
                let w = Witness::Terminal(term);
                return Ok(PartitionVerdict::fail(
                    Some(i),
                    Condition::TerminalSize,
                    w,
                    dominators,
                ));
            }
        }
    }
    Ok(PartitionVerdict {
        valid: true,
        failed_condition: None,
        failing_class: None,
        witness: None,
        dominators,
    })
}

fn validate_edges(
    dag: &ComputationDag,
    p: &EdgePartition,
    s: usize,
) -> Result<PartitionVerdict, PartitionError> {
    let class = edge_classes(dag, p)?;
    for (e, &(u, v)) in dag.edges().iter().enumerate() {
        for &w in dag.out_neighbors(v) {
            let f = dag.edge_index(v, w).unwrap();
            if class[f] < class[e] {
                let wit = Witness::Edges(vec![(u, v), (v, w)]);
                return Ok(PartitionVerdict::fail(
                    Some(class[f]),
                    Condition::Ordering,
                    wit,
                    Vec::new(),
                ));
            }
        }
    }
    let mut dominators = Vec::new();
    for (i, c) in p.classes.iter().enumerate() {
        let cut = min_dominator(dag, &edge_starts(c));
        if cut.dominator.len() > s {
            let w = Witness::DisjointPaths(cut.paths);
            return Ok(PartitionVerdict::fail(
                Some(i),
                Condition::DominatorSize,
                w,
                dominators,
            ));
        }
        dominators.push(cut.dominator);
    }
    for (i, c) in p.classes.iter().enumerate() {
        let term = edge_terminal_set(c);
        if term.len() > s {
            let w = Witness::Terminal(term);
            return Ok(PartitionVerdict::fail(
                Some(i),
                Condition::TerminalSize,
                w,
                dominators,
            ));
        }
    }
    Ok(PartitionVerdict {
        valid: true,
        failed_condition: None,
        failing_class: None,
        witness: None,
        dominators,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::gen_spart_counterexample;

    fn chain() -> ComputationDag {
        ComputationDag::new(3, [(0, 1), (1, 2)]).unwrap()
    }

    #[test]
    fn terminal_sets() {
        assert_eq!(terminal_set(&chain(), &[0, 1, 2]), vec![2]);
        let dag = ComputationDag::new(3, [(0, 1), (0, 2)]).unwrap();
        assert_eq!(terminal_set(&dag, &[1, 2]), vec![1, 2]);
        // v1 -> v2 -> v3 <- v4 with (v2, v3) left out.
        assert_eq!(edge_terminal_set(&[(1, 2), (4, 3)]), vec![2, 3]);
        assert_eq!(edge_terminal_set(&[(0, 1), (1, 2)]), vec![2]);
        assert!(edge_terminal_set(&[]).is_empty());
    }

    #[test]
    fn spart_single_class_fails_on_dominator() {
        let dag = gen_spart_counterexample(3).unwrap();
        let p = Partition::Nodes(NodePartition {
            classes: vec![(0..dag.node_count()).collect()],
        });
        let v = validate_partition(&dag, &p, 6, PartitionKind::SPartition).unwrap();
        assert!(!v.valid);
        assert_eq!(v.failed_condition, Some(Condition::DominatorSize));
        assert_eq!(v.failing_class, Some(0));
        let Some(Witness::DisjointPaths(paths)) = v.witness else {
            panic!("expected paths");
        };
        assert_eq!(paths.len(), 7);
    }

    #[test]
    fn one_class_per_node_is_valid() {
        let dag = ComputationDag::new(4, [(0, 2), (1, 2), (2, 3), (1, 3)]).unwrap();
        let classes = dag.topological_order().iter().map(|&v| vec![v]).collect();
        let p = Partition::Nodes(NodePartition { classes });
        let s = dag.max_in_degree() + 1;
        assert!(
            validate_partition(&dag, &p, s, PartitionKind::SPartition)
                .unwrap()
                .valid
        );
    }

    #[test]
    fn edge_ordering_violation() {
        let p = Partition::Edges(EdgePartition {
            classes: vec![vec![(1, 2)], vec![(0, 1)]],
        });
        let v = validate_partition(&chain(), &p, 5, PartitionKind::SEdgePartition).unwrap();
        assert_eq!(v.failed_condition, Some(Condition::Ordering));
        assert_eq!(v.witness, Some(Witness::Edges(vec![(0, 1), (1, 2)])));
    }

    #[test]
    fn shape_errors() {
        let bad = Partition::Nodes(NodePartition {
            classes: vec![vec![0, 1], vec![1, 2]],
        });
        assert!(matches!(
            validate_partition(&chain(), &bad, 2, PartitionKind::SPartition),
            Err(PartitionError::Shape(_))
        ));
        let nodes = Partition::Nodes(NodePartition {
            classes: vec![vec![0, 1, 2]],
        });
        assert!(matches!(
            validate_partition(&chain(), &nodes, 2, PartitionKind::SEdgePartition),
            Err(PartitionError::WrongGround { .. })
        ));
    }

    #[test]
    fn serde_shapes() {
        let p: Partition = serde_json::from_str("[[0,1],[2]]").unwrap();
        assert!(matches!(p, Partition::Nodes(_)));
        let p: Partition = serde_json::from_str("[[[0,1]],[[1,2]]]").unwrap();
        assert!(matches!(p, Partition::Edges(_)));
        assert_eq!(serde_json::to_string(&p).unwrap(), "[[[0,1]],[[1,2]]]");
    }
}
