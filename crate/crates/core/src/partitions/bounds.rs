//! Cost bounds derived from partitions.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{min_dominator_size, PartitionError};
use crate::dag::{ComputationDag, NodeId};

/// `r * (min_k - 1)`: the I/O lower bound implied by a minimum class count
/// at S = 2r, for edge partitions and dominator partitions alike.
pub fn lower_bound(r: usize, min_k: usize) -> usize {
    r * min_k.saturating_sub(1)
}

/// A counting proof that every S-partition of a fan-out/fan-in DAG needs
/// many classes.
///
/// The DAG has one sink fed by groups of nodes, each group hanging off its
/// own source. Picking one node per group gives `groups.len()` disjoint
/// source paths. If that exceeds S, the class of the sink misses some group
/// entirely. Every node of that group then has its only out-neighbor
/// outside its class, so it is terminal, and the group needs at least
/// ceil(|group| / S) classes of its own.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpartCertificate {
    pub s: usize,
    pub sink: NodeId,
    pub groups: Vec<Vec<NodeId>>,
    /// Minimum dominator of one representative per group.
    pub transversal_dominator: usize,
    /// Proven lower bound on the class count of any S-partition.
    pub bound: usize,
}

/// Builds the counting certificate, or explains why the DAG does not have
/// the required shape or S is too large for the argument.
pub fn spart_counting_bound(
    dag: &ComputationDag,
    s: usize,
) -> Result<SpartCertificate, PartitionError> {
    let shape = |msg: &str| Err(PartitionError::Shape(msg.into()));
    if s == 0 {
        return shape("S must be positive");
    }
    let sinks: Vec<NodeId> = dag.sinks().collect();
    let &[sink] = sinks.as_slice() else {
        return shape("expected exactly one sink");
    };
    let mut groups: BTreeMap<NodeId, Vec<NodeId>> = BTreeMap::new();
    for &w in dag.in_neighbors(sink) {
        let ins = dag.in_neighbors(w);
        let (&[u], &[out]) = (ins, dag.out_neighbors(w)) else {
            return shape("every sink predecessor needs one in- and one out-neighbor");
        };
        if !dag.is_source(u) || out != sink {
            return shape("every sink predecessor must hang off a source");
        }
        groups.entry(u).or_default().push(w);
    }
    if groups.len() + dag.in_degree(sink) + 1 != dag.node_count() {
        return shape("unexpected extra nodes");
    }
    let groups: Vec<Vec<NodeId>> = groups.into_values().collect();
    let reps: Vec<NodeId> = groups.iter().map(|g| g[0]).collect();
    let transversal_dominator = min_dominator_size(dag, &reps);
    if transversal_dominator <= s {
        return Err(PartitionError::Shape(format!(
            "{} groups admit a dominator of size {s}; the counting argument needs more",
            groups.len()
        )));
    }
    let smallest = groups.iter().map(Vec::len).min().unwrap_or(0);
    Ok(SpartCertificate {
        s,
        sink,
        groups,
        transversal_dominator,
        bound: smallest.div_ceil(s) + 1,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum AnalyticFamily {
    Fft {
        m: usize,
    },
    #[serde(rename = "matmul")]
    MatMul {
        m1: usize,
        m2: usize,
        m3: usize,
    },
    Attention {
        m: usize,
        d: usize,
    },
}

/// Leading-order term of a known asymptotic bound, with constant 1. Not a
/// certified lower bound.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalyticBound {
    #[serde(flatten)]
    pub family: AnalyticFamily,
    pub r: usize,
    pub expression: String,
    pub value: f64,
    pub asymptotic: bool,
}

/// Evaluates `m log m / log r`, `m1 m2 m3 / sqrt(r)` or
/// `min(m^2 d / sqrt(r), m^2 d^2 / r)`, logarithms base 2.
pub fn analytic_bound(family: AnalyticFamily, r: usize) -> Result<AnalyticBound, PartitionError> {
    if r < 2 {
        return Err(PartitionError::Shape("r must be at least 2".into()));
    }
    let rf = r as f64;
    let (expression, value) = match family {
        AnalyticFamily::Fft { m } => {
            if m < 2 {
                return Err(PartitionError::Shape("m must be at least 2".into()));
            }
            let m = m as f64;
            ("m*log2(m)/log2(r)", m * m.log2() / rf.log2())
        }
        AnalyticFamily::MatMul { m1, m2, m3 } => {
            ("m1*m2*m3/sqrt(r)", (m1 * m2 * m3) as f64 / rf.sqrt())
        }
        AnalyticFamily::Attention { m, d } => {
            let (m, d) = (m as f64, d as f64);
            let a = m * m * d / rf.sqrt();
            let b = m * m * d * d / rf;
            ("min(m^2*d/sqrt(r), m^2*d^2/r)", a.min(b))
        }
    };
    Ok(AnalyticBound {
        family,
        r,
        expression: expression.into(),
        value,
        asymptotic: true,
    })
}
