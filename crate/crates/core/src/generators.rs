//! Constructors for the DAG families used throughout the crate.
//!
//! Every family has a closed form for its node and edge counts
//! ([`GeneratorSpec::expected_counts`]) which the tests compare against the
//! constructed graph.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dag::{ComputationDag, DagError, Edge, NodeId};
use crate::reductions::UndirectedGraph;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GeneratorError {
    #[error("parameter out of range: {0}")]
    ParamOutOfRange(String),
    #[error("{0} is not a power of two")]
    NotPowerOfTwo(usize),
    #[error("input graph is not simple: {0}")]
    NotSimpleGraph(String),
    #[error(transparent)]
    Dag(#[from] DagError),
}

fn require(cond: bool, what: &str) -> Result<(), GeneratorError> {
    if cond {
        Ok(())
    } else {
        Err(GeneratorError::ParamOutOfRange(what.to_string()))
    }
}

fn labelled(
    n: usize,
    edges: Vec<Edge>,
    labels: Vec<String>,
) -> Result<ComputationDag, GeneratorError> {
    debug_assert_eq!(labels.len(), n);
    Ok(ComputationDag::new(n, edges)?.with_labels(labels)?)
}

/// A DAG family together with its parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum GeneratorSpec {
    Figure1 { with_endpoints: bool },
    Figure1Chain { copies: usize },
    MatVec { m: usize },
    Zipper { d: usize, chain_len: usize },
    KaryTree { k: usize, d: usize },
    PebbleCollector { d: usize, chain_len: usize },
    SPartCounterexample { h: usize },
    Fft { m: usize },
    MatMul { m1: usize, m2: usize, m3: usize },
    Attention { m: usize, d: usize },
}

impl GeneratorSpec {
    pub fn build(&self) -> Result<ComputationDag, GeneratorError> {
        match *self {
            GeneratorSpec::Figure1 { with_endpoints } => gen_figure1(with_endpoints),
            GeneratorSpec::Figure1Chain { copies } => gen_figure1_chain(copies),
            GeneratorSpec::MatVec { m } => gen_matvec(m),
            GeneratorSpec::Zipper { d, chain_len } => gen_zipper(d, chain_len),
            GeneratorSpec::KaryTree { k, d } => gen_kary_tree(k, d),
            GeneratorSpec::PebbleCollector { d, chain_len } => gen_pebble_collector(d, chain_len),
            GeneratorSpec::SPartCounterexample { h } => gen_spart_counterexample(h),
            GeneratorSpec::Fft { m } => gen_fft(m),
            GeneratorSpec::MatMul { m1, m2, m3 } => gen_matmul(m1, m2, m3),
            GeneratorSpec::Attention { m, d } => gen_attention(m, d),
        }
    }

    /// Node and edge counts predicted by the family's closed form.
    pub fn expected_counts(&self) -> (usize, usize) {
        match *self {
            GeneratorSpec::Figure1 {
                with_endpoints: true,
            } => (10, 14),
            GeneratorSpec::Figure1 {
                with_endpoints: false,
            } => (8, 10),
            GeneratorSpec::Figure1Chain { copies: g } => (6 * g + 4, 10 * g + 4),
            GeneratorSpec::MatVec { m } => (2 * m * m + 2 * m, 3 * m * m),
            GeneratorSpec::Zipper { d, chain_len: l } => (2 * d + l, l * d + l - 1),
            GeneratorSpec::KaryTree { k, d } => {
                let n = (k.pow(d as u32 + 1) - 1) / (k - 1);
                (n, n - 1)
            }
            GeneratorSpec::PebbleCollector { d, chain_len: l } => (d + l, 2 * l - 1),
            GeneratorSpec::SPartCounterexample { h } => (7 * h + 8, 14 * h),
            GeneratorSpec::Fft { m } => {
                let lg = m.trailing_zeros() as usize;
                (m * (lg + 1), 2 * m * lg)
            }
            GeneratorSpec::MatMul { m1, m2, m3 } => {
                (m1 * m2 + m2 * m3 + m1 * m2 * m3 + m1 * m3, 3 * m1 * m2 * m3)
            }
            GeneratorSpec::Attention { m, d } => {
                (2 * m * d + m * m * d + 2 * m * m, 3 * m * m * d + m * m)
            }
        }
    }
}

/// The small example DAG on which PRBP beats RBP at `r = 4`.
///
/// Ids: u0=0, u1=1, u2=2, w1..w4=3..6, v1=7, v2=8, v0=9. Without the
/// endpoints u0 and v0 (and their edges), ids shift down by one:
/// u1=0, u2=1, w1..w4=2..5, v1=6, v2=7.
pub fn gen_figure1(with_endpoints: bool) -> Result<ComputationDag, GeneratorError> {
    let names = ["u0", "u1", "u2", "w1", "w2", "w3", "w4", "v1", "v2", "v0"];
    let dag = gen_figure1_chain(1)?;
    if with_endpoints {
        return Ok(dag.with_labels(names.iter().map(|s| s.to_string()).collect())?);
    }
    let edges = dag
        .edges()
        .iter()
        .filter(|&&(u, v)| u != 0 && v != 9)
        .map(|&(u, v)| (u - 1, v - 1))
        .collect();
    labelled(
        8,
        edges,
        names[1..9].iter().map(|s| s.to_string()).collect(),
    )
}

/// `g` copies of the example gadget in series.
///
/// Node u0 is 0, the entry pair of copy `i` is `(1 + 6i, 2 + 6i)`, its inner
/// nodes w1..w4 are `3 + 6i ..= 6 + 6i`, and the exit pair doubles as the entry
/// pair of copy `i + 1`. The final sink v0 is `6g + 3`.
pub fn gen_figure1_chain(copies: usize) -> Result<ComputationDag, GeneratorError> {
    require(copies >= 1, "copies >= 1")?;
    let g = copies;
    let n = 6 * g + 4;
    let v0 = n - 1;
    let mut edges = vec![(0, 1), (0, 2)];
    let mut labels = vec!["u0".to_string(), "a0".into(), "b0".into()];
    for i in 0..g {
        let (a, b) = (1 + 6 * i, 2 + 6 * i);
        let w = [3 + 6 * i, 4 + 6 * i, 5 + 6 * i, 6 + 6 * i];
        let (a2, b2) = (7 + 6 * i, 8 + 6 * i);
        edges.extend([
            (a, w[0]),
            (a, w[1]),
            (a, w[3]),
            (w[0], w[2]),
            (w[1], w[2]),
            (w[2], w[3]),
            (w[3], a2),
            (w[3], b2),
            (b, a2),
            (b, b2),
        ]);
        labels.extend((1..=4).map(|j| format!("w{j}_{i}")));
        labels.extend([format!("a{}", i + 1), format!("b{}", i + 1)]);
    }
    edges.extend([(v0 - 2, v0), (v0 - 1, v0)]);
    labels.push("v0".into());
    labelled(n, edges, labels)
}

/// Matrix-vector product `y = A x` for an `m x m` matrix.
///
/// Ids: `x_i = i`, `A_{j,i} = m + jm + i`, product `p_{j,i} = m + m² + jm + i`,
/// `y_j = m + 2m² + j`.
pub fn gen_matvec(m: usize) -> Result<ComputationDag, GeneratorError> {
    require(m >= 1, "m >= 1")?;
    let a = |j: usize, i: usize| m + j * m + i;
    let p = |j: usize, i: usize| m + m * m + j * m + i;
    let y = |j: usize| m + 2 * m * m + j;
    let n = 2 * m * m + 2 * m;
    let mut edges = Vec::with_capacity(3 * m * m);
    let mut labels = vec![String::new(); n];
    for (i, label) in labels.iter_mut().take(m).enumerate() {
        *label = format!("x{i}");
    }
    for j in 0..m {
        labels[y(j)] = format!("y{j}");
        for i in 0..m {
            edges.extend([(i, p(j, i)), (a(j, i), p(j, i)), (p(j, i), y(j))]);
            labels[a(j, i)] = format!("A{j},{i}");
            labels[p(j, i)] = format!("p{j},{i}");
        }
    }
    labelled(n, edges, labels)
}

/// Two groups of `d` sources feeding an alternating chain.
///
/// Group `c` holds ids `cd .. (c+1)d`; chain node `i` is `2d + i` and reads all
/// of group `i mod 2`. A chain of length 1 would leave a group isolated, so at
/// least 2 chain nodes are required.
pub fn gen_zipper(d: usize, chain_len: usize) -> Result<ComputationDag, GeneratorError> {
    require(d >= 1, "d >= 1")?;
    require(chain_len >= 2, "chain_len >= 2")?;
    let n = 2 * d + chain_len;
    let mut edges = Vec::new();
    let mut labels: Vec<String> = (0..2 * d)
        .map(|s| format!("{}{}", if s < d { "s" } else { "t" }, s % d))
        .collect();
    for i in 0..chain_len {
        let c = 2 * d + i;
        if i > 0 {
            edges.push((c - 1, c));
        }
        let group = i % 2;
        edges.extend((0..d).map(|s| (group * d + s, c)));
        labels.push(format!("c{i}"));
    }
    labelled(n, edges, labels)
}

/// Complete `k`-ary in-tree of depth `d`; leaves are the sources.
///
/// The root is 0 and the children of node `i` are `ki + 1 ..= ki + k`.
pub fn gen_kary_tree(k: usize, d: usize) -> Result<ComputationDag, GeneratorError> {
    require(k >= 2, "k >= 2")?;
    require(d >= 1, "d >= 1")?;
    let n = k
        .checked_pow(d as u32 + 1)
        .filter(|&p| p < crate::dag::MAX_NODES * k)
        .map(|p| (p - 1) / (k - 1))
        .ok_or_else(|| GeneratorError::ParamOutOfRange("tree too large".into()))?;
    let edges = (1..n).map(|c| (c, (c - 1) / k)).collect();
    labelled(n, edges, (0..n).map(|v| format!("t{v}")).collect())
}

/// `d` sources and a chain whose node `i` (1-based) reads source `(i-1) mod d`.
///
/// Sources are `0..d` and chain node `i` is `d + i - 1`. A chain shorter than
/// `d` would leave a source isolated.
pub fn gen_pebble_collector(d: usize, chain_len: usize) -> Result<ComputationDag, GeneratorError> {
    require(d >= 1, "d >= 1")?;
    require(chain_len >= d, "chain_len >= d")?;
    let n = d + chain_len;
    let mut edges = Vec::new();
    for i in 1..=chain_len {
        let c = d + i - 1;
        if i > 1 {
            edges.push((c - 1, c));
        }
        edges.push(((i - 1) % d, c));
    }
    let labels = (0..d)
        .map(|s| format!("s{}", s + 1))
        .chain((1..=chain_len).map(|i| format!("c{i}")))
        .collect();
    labelled(n, edges, labels)
}

/// Seven sources, each fanning out to its own group of `h` nodes, all
/// groups merging into one sink.
///
/// Ids: `u_i = i` for `i < 7`, member `j` of group `i` is `7 + ih + j`, sink `7 + 7h`.
pub fn gen_spart_counterexample(h: usize) -> Result<ComputationDag, GeneratorError> {
    require(h >= 1, "h >= 1")?;
    let n = 7 * h + 8;
    let sink = n - 1;
    let mut edges = Vec::with_capacity(14 * h);
    let mut labels: Vec<String> = (1..=7).map(|i| format!("u{i}")).collect();
    for i in 0..7 {
        for j in 0..h {
            let x = 7 + i * h + j;
            edges.extend([(i, x), (x, sink)]);
            labels.push(format!("H{}_{j}", i + 1));
        }
    }
    labels.push("v".into());
    labelled(n, edges, labels)
}

/// The `m`-point FFT butterfly.
///
/// Node `(l, i)` has id `lm + i`. Level `l` node `j` reads level `l-1` nodes
/// `j` and `j xor 2^(l-1)`.
pub fn gen_fft(m: usize) -> Result<ComputationDag, GeneratorError> {
    if m < 2 || !m.is_power_of_two() {
        return Err(GeneratorError::NotPowerOfTwo(m));
    }
    let levels = m.trailing_zeros() as usize;
    let n = m * (levels + 1);
    let mut edges = Vec::with_capacity(2 * m * levels);
    for l in 1..=levels {
        let half = 1 << (l - 1);
        for j in 0..m {
            edges.push(((l - 1) * m + j, l * m + j));
            edges.push(((l - 1) * m + (j ^ half), l * m + j));
        }
    }
    let labels = (0..n).map(|v| format!("f{},{}", v / m, v % m)).collect();
    labelled(n, edges, labels)
}

struct MatMulIds {
    m1: usize,
    m2: usize,
    m3: usize,
}

impl MatMulIds {
    fn a(&self, i: usize, k: usize) -> NodeId {
        i * self.m2 + k
    }
    fn b(&self, k: usize, j: usize) -> NodeId {
        self.m1 * self.m2 + k * self.m3 + j
    }
    fn p(&self, i: usize, k: usize, j: usize) -> NodeId {
        self.m1 * self.m2 + self.m2 * self.m3 + (i * self.m3 + j) * self.m2 + k
    }
    fn c(&self, i: usize, j: usize) -> NodeId {
        self.m1 * self.m2 + self.m2 * self.m3 + self.m1 * self.m2 * self.m3 + i * self.m3 + j
    }
    fn n(&self) -> usize {
        self.c(self.m1 - 1, self.m3 - 1) + 1
    }

    fn build(&self, a: &str, b: &str) -> (Vec<Edge>, Vec<String>) {
        let mut edges = Vec::new();
        let mut labels = vec![String::new(); self.n()];
        for i in 0..self.m1 {
            for j in 0..self.m3 {
                labels[self.c(i, j)] = format!("C{i},{j}");
                for k in 0..self.m2 {
                    let p = self.p(i, k, j);
                    edges.extend([(self.a(i, k), p), (self.b(k, j), p), (p, self.c(i, j))]);
                    labels[p] = format!("P{i},{k},{j}");
                    labels[self.a(i, k)] = format!("{a}{i},{k}");
                    labels[self.b(k, j)] = format!("{b}{k},{j}");
                }
            }
        }
        (edges, labels)
    }
}

/// Standard `C = AB` with `A` of size `m1 x m2` and `B` of size `m2 x m3`.
///
/// Entries of both inputs are sources, each product `A_{ik} B_{kj}` is an
/// in-degree-2 node with one out-edge, and `C_{ij}` sums `m2` products.
/// Ids: A row-major first, then B row-major, then products grouped by output
/// `(i, j)` in row-major order, then C row-major.
pub fn gen_matmul(m1: usize, m2: usize, m3: usize) -> Result<ComputationDag, GeneratorError> {
    require(m1 >= 1 && m2 >= 1 && m3 >= 1, "m1, m2, m3 >= 1")?;
    let ids = MatMulIds { m1, m2, m3 };
    let (edges, labels) = ids.build("A", "B");
    labelled(ids.n(), edges, labels)
}

/// The `Q K^T` part of attention for `m` tokens and head dimension `d`,
/// followed by one exponentiation sink per score.
///
/// The first part has the layout of [`gen_matmul`]`(m, d, m)`; the sink of
/// score `(i, j)` follows at `2md + m²d + m² + im + j`.
pub fn gen_attention(m: usize, d: usize) -> Result<ComputationDag, GeneratorError> {
    require(m >= 1 && d >= 1, "m, d >= 1")?;
    let ids = MatMulIds {
        m1: m,
        m2: d,
        m3: m,
    };
    let (mut edges, mut labels) = ids.build("Q", "K");
    let base = ids.n();
    for i in 0..m {
        for j in 0..m {
            let s = ids.c(i, j);
            labels[s] = format!("S{i},{j}");
            edges.push((s, base + i * m + j));
            labels.push(format!("E{i},{j}"));
        }
    }
    labelled(base + m * m, edges, labels)
}

/// Which of the two collector gadgets of a `G0` node.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Side {
    H1,
    H2,
}

/// One collector gadget of the reduction.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GadgetMeta {
    pub side: Side,
    pub g0_node: usize,
    /// The `r - 2` group members in slot order:
    /// `b` merged, `3 n0` anchors, `n0` cross slots (indexed by `G0` node), 3 Z slots.
    pub members: Vec<NodeId>,
    /// Chain nodes in order; the last one is the gadget's sink.
    pub chain: Vec<NodeId>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReductionMeta {
    pub n0: usize,
    pub e0: usize,
    pub v0: usize,
    pub b: usize,
    pub r: usize,
    pub group_size: usize,
    pub l0: usize,
    pub l: usize,
    /// `H1(x)` at index `2x`, `H2(x)` at `2x + 1`.
    pub gadgets: Vec<GadgetMeta>,
    pub z1: Vec<NodeId>,
    pub z2: Vec<NodeId>,
    pub w: NodeId,
}

impl ReductionMeta {
    pub fn gadget(&self, side: Side, x: usize) -> &GadgetMeta {
        &self.gadgets[2 * x + usize::from(side == Side::H2)]
    }

    /// First chain position of the middle part.
    pub fn middle_start(&self) -> usize {
        self.group_size + self.l0
    }
}

/// The non-trivial cost budget the long chain parts must dominate.
pub fn reduction_overhead(n0: usize, e0: usize, b: usize) -> usize {
    let r = b + 4 * n0 + 5;
    n0 * b + 2 * e0 + 6 + r - 1
}

/// Whether `l0 / (2(r-2)) - (r-1) > n0 b + 2|E0| + 6`, in exact integer arithmetic.
pub fn chain_part_is_long_enough(l0: usize, n0: usize, e0: usize, b: usize) -> bool {
    let g = b + 4 * n0 + 3;
    l0 > 2 * g * reduction_overhead(n0, e0, b)
}

/// Builds the hardness construction for `maxinset-vertex(g0, v0)`.
///
/// Per node `x` of `g0` there are two collector gadgets `H1(x)`, `H2(x)`
/// whose groups have `r - 2 = b + 4 n0 + 3` members and whose chains have
/// length `l = (r-2) + l0 + n0 + l0`. The first `b` members of `H1(x)` and
/// `H2(x)` are shared. Middle chain node `y` of `H1(x)` (position
/// `(r-2) + l0 + y`) takes the place of cross slot `x` in `H2(y)` whenever
/// `y` is a neighbor of `x` or `y = x`. The sink `w` reads the Z slots of
/// `H1(v0)` and `H2(v0)`.
pub fn gen_maxinset_reduction(
    g0: &UndirectedGraph,
    v0: usize,
    b: usize,
) -> Result<(ComputationDag, ReductionMeta), GeneratorError> {
    let n0 = g0.node_count();
    require(n0 >= 1, "G0 has at least one node")?;
    require(v0 < n0, "v0 is a node of G0")?;
    require(b > 3, "b > 3")?;
    let e0 = g0.edges().len();
    let r = b + 4 * n0 + 5;
    let g = r - 2;
    assert!(r > b + 7, "r = b + 4 n0 + 5 exceeds b + 7 for n0 >= 1");
    let l0 = 2 * g * reduction_overhead(n0, e0, b) + 1;
    let l = g + l0 + n0 + l0;
    let anchors = 3 * n0;
    let cross = b + anchors;
    let zs = cross + n0;

    let mut next: NodeId = 0;
    let mut fresh = |count: usize| {
        let ids: Vec<NodeId> = (next..next + count).collect();
        next += count;
        ids
    };

    let mut gadgets = Vec::with_capacity(2 * n0);
    for x in 0..n0 {
        let merged = fresh(b);
        for side in [Side::H1, Side::H2] {
            let mut members = merged.clone();
            members.extend(fresh(g - b));
            let chain = fresh(l);
            gadgets.push(GadgetMeta {
                side,
                g0_node: x,
                members,
                chain,
            });
        }
    }
    // Cross wiring: replace placeholder sources by H1 middle chain nodes.
    let mut replaced = Vec::new();
    for x in 0..n0 {
        for y in 0..n0 {
            if x == y || g0.has_edge(x, y) {
                let mid = gadgets[2 * x].chain[g + l0 + y];
                let slot = &mut gadgets[2 * y + 1].members[cross + x];
                replaced.push(*slot);
                *slot = mid;
            }
        }
    }
    let w = fresh(1)[0];
    let total = next;

    // Compact ids so the replaced placeholders do not leave holes.
    replaced.sort_unstable();
    let remap = |v: NodeId| v - replaced.partition_point(|&p| p < v);
    for gm in &mut gadgets {
        for v in gm.members.iter_mut().chain(gm.chain.iter_mut()) {
            *v = remap(*v);
        }
    }
    let w = remap(w);
    let n = total - replaced.len();

    let mut edges = Vec::new();
    for gm in &gadgets {
        for (i, &c) in gm.chain.iter().enumerate() {
            if i > 0 {
                edges.push((gm.chain[i - 1], c));
            }
            edges.push((gm.members[i % g], c));
        }
    }
    let z1 = gadgets[2 * v0].members[zs..].to_vec();
    let z2 = gadgets[2 * v0 + 1].members[zs..].to_vec();
    edges.extend(z1.iter().chain(&z2).map(|&z| (z, w)));
    let dag = ComputationDag::new(n, edges)?;
    let meta = ReductionMeta {
        n0,
        e0,
        v0,
        b,
        r,
        group_size: g,
        l0,
        l,
        gadgets,
        z1,
        z2,
        w,
    };
    Ok((dag, meta))
}

/// [`gen_maxinset_reduction`] from a raw edge list.
pub fn gen_maxinset_reduction_from_edges(
    n0: usize,
    edges: &[(usize, usize)],
    v0: usize,
    b: usize,
) -> Result<(ComputationDag, ReductionMeta), GeneratorError> {
    let g0 = UndirectedGraph::new(n0, edges.iter().copied())
        .map_err(|e| GeneratorError::NotSimpleGraph(e.to_string()))?;
    gen_maxinset_reduction(&g0, v0, b)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check_counts(spec: GeneratorSpec) -> ComputationDag {
        let dag = spec.build().unwrap();
        assert_eq!(
            (dag.node_count(), dag.edge_count()),
            spec.expected_counts(),
            "{spec:?}"
        );
        dag
    }

    #[test]
    fn closed_form_counts() {
        use GeneratorSpec::*;
        for spec in [
            Figure1 {
                with_endpoints: true,
            },
            Figure1 {
                with_endpoints: false,
            },
        ] {
            check_counts(spec);
        }
        for g in 1..=5 {
            check_counts(Figure1Chain { copies: g });
        }
        for m in 1..=5 {
            check_counts(MatVec { m });
        }
        for d in 1..=4 {
            for l in 2..=7 {
                check_counts(Zipper { d, chain_len: l });
            }
            for l in d..=9 {
                check_counts(PebbleCollector { d, chain_len: l });
            }
        }
        for (k, d) in [(2, 1), (2, 3), (2, 5), (3, 2), (3, 3), (4, 2)] {
            check_counts(KaryTree { k, d });
        }
        for h in 1..=4 {
            check_counts(SPartCounterexample { h });
        }
        for m in [2, 4, 8, 16] {
            check_counts(Fft { m });
        }
        for (a, b, c) in [(1, 1, 1), (2, 3, 2), (3, 1, 2), (2, 2, 1)] {
            check_counts(MatMul {
                m1: a,
                m2: b,
                m3: c,
            });
        }
        for (m, d) in [(1, 1), (2, 2), (3, 2), (2, 5)] {
            check_counts(Attention { m, d });
        }
    }

    #[test]
    fn figure1_shape() {
        let dag = gen_figure1(true).unwrap();
        assert_eq!(dag.sources().collect::<Vec<_>>(), vec![0]);
        assert_eq!(dag.sinks().collect::<Vec<_>>(), vec![9]);
        assert_eq!(dag.trivial_cost(), 2);
        assert_eq!(dag.max_in_degree(), 2);
        assert_eq!(dag.label(0), "u0");
        assert_eq!(dag.label(9), "v0");
        let inner = gen_figure1(false).unwrap();
        let names =
            |it: &mut dyn Iterator<Item = NodeId>| it.map(|v| inner.label(v)).collect::<Vec<_>>();
        assert_eq!(names(&mut inner.sources()), vec!["u1", "u2"]);
        assert_eq!(names(&mut inner.sinks()), vec!["v1", "v2"]);
    }

    #[test]
    fn chain_base_case_matches_figure1() {
        let a = gen_figure1_chain(1).unwrap();
        let b = gen_figure1(true).unwrap();
        assert_eq!(a.edges(), b.edges());
        let c = gen_figure1_chain(3).unwrap();
        assert_eq!(c.node_count(), 22);
        assert_eq!(c.sources().collect::<Vec<_>>(), vec![0]);
        assert_eq!(c.sinks().collect::<Vec<_>>(), vec![21]);
    }

    #[test]
    fn matvec_shape() {
        let dag = gen_matvec(3).unwrap();
        let st = dag.stats();
        assert_eq!(
            (st.source_count, st.sink_count, st.trivial_cost),
            (12, 3, 15)
        );
        let internal = (0..dag.node_count())
            .filter(|&v| !dag.is_source(v) && !dag.is_sink(v))
            .collect::<Vec<_>>();
        assert_eq!(internal.len(), 9);
        assert!(internal.iter().all(|&v| dag.in_degree(v) == 2));
        assert!(dag.sinks().all(|v| dag.in_degree(v) == 3));
        assert_eq!(gen_matvec(2).unwrap().max_in_degree(), 2);
    }

    #[test]
    fn zipper_and_collector_wiring() {
        let z = gen_zipper(3, 4).unwrap();
        assert_eq!(z.max_in_degree(), 4);
        assert_eq!(z.in_neighbors(6), &[0, 1, 2]);
        assert_eq!(z.in_neighbors(7), &[3, 4, 5, 6]);
        assert!(gen_zipper(1, 1).is_err());
        let c = gen_pebble_collector(3, 6).unwrap();
        assert!((0..3).all(|s| c.out_degree(s) == 2));
        assert!(gen_pebble_collector(3, 2).is_err());
    }

    #[test]
    fn kary_tree_shape() {
        let t = gen_kary_tree(2, 3).unwrap();
        assert_eq!(t.sources().count(), 8);
        assert_eq!(t.trivial_cost(), 9);
        let t = gen_kary_tree(3, 2).unwrap();
        assert_eq!((t.node_count(), t.sources().count()), (13, 9));
        assert!(gen_kary_tree(1, 2).is_err());
    }

    #[test]
    fn spart_shape() {
        let dag = gen_spart_counterexample(3).unwrap();
        assert_eq!(dag.node_count(), 29);
        assert_eq!(dag.trivial_cost(), 8);
        assert_eq!(dag.sources().count(), 7);
    }

    #[test]
    fn fft_shape() {
        assert!(matches!(gen_fft(6), Err(GeneratorError::NotPowerOfTwo(6))));
        let f2 = gen_fft(2).unwrap();
        assert_eq!(f2.edges(), &[(0, 2), (0, 3), (1, 2), (1, 3)]);
        let f4 = gen_fft(4).unwrap();
        assert!((4..12).all(|v| f4.in_degree(v) == 2));
    }

    #[test]
    fn fft_halves_are_smaller_ffts() {
        for m in [4usize, 8, 16] {
            let big = gen_fft(m).unwrap();
            let half = gen_fft(m / 2).unwrap();
            let levels = m.trailing_zeros() as usize;
            let h = m / 2;
            // (level, index) of the big graph restricted to the lower levels
            // maps onto copy `index / h` at (level, index mod h).
            let mut copies = [Vec::new(), Vec::new()];
            for &(u, v) in big.edges() {
                let (lu, iu, lv, iv) = (u / m, u % m, v / m, v % m);
                if lv >= levels {
                    continue;
                }
                assert_eq!(iu / h, iv / h, "edge crosses halves below the top level");
                copies[iu / h].push((lu * h + iu % h, lv * h + iv % h));
            }
            for mut c in copies {
                c.sort_unstable();
                assert_eq!(c, half.edges());
            }
        }
    }

    #[test]
    fn matmul_reduces_to_matvec() {
        let mm = gen_matmul(2, 2, 1).unwrap();
        let mv = gen_matvec(2).unwrap();
        // matmul A_{i,k} -> matvec A_{i,k}; B_{k,0} -> x_k; P_{i,k,0} -> p_{i,k}; C_{i,0} -> y_i
        let map = |v: NodeId| -> NodeId {
            match v {
                0..=3 => 2 + v,
                4..=5 => v - 4,
                6..=9 => 6 + (v - 6),
                _ => 10 + (v - 10),
            }
        };
        let mut mapped: Vec<Edge> = mm.edges().iter().map(|&(u, v)| (map(u), map(v))).collect();
        mapped.sort_unstable();
        assert_eq!(mapped, mv.edges());
    }

    #[test]
    fn matmul_and_attention_shape() {
        let mm = gen_matmul(2, 3, 2).unwrap();
        assert!(mm.sinks().all(|c| mm.in_degree(c) == 3));
        assert_eq!(mm.sinks().count(), 4);
        let at = gen_attention(2, 2).unwrap();
        let st = at.stats();
        assert_eq!((st.source_count, st.sink_count), (8, 4));
        // internal trees: each product has a single out-edge into one root
        let roots: Vec<NodeId> = (16..20).collect();
        let mut seen = std::collections::HashSet::new();
        for &rt in &roots {
            assert_eq!(at.out_degree(rt), 1);
            for &p in at.in_neighbors(rt) {
                assert_eq!(at.out_degree(p), 1);
                assert!(seen.insert(p));
            }
        }
    }

    #[test]
    fn reduction_single_edge() {
        let g0 = UndirectedGraph::new(2, [(0, 1)]).unwrap();
        let (dag, meta) = gen_maxinset_reduction(&g0, 0, 4).unwrap();
        assert_eq!((meta.r, meta.group_size, meta.l0), (17, 15, 961));
        assert_eq!(meta.l, 2 * meta.l0 + meta.n0 + (meta.r - 2));
        assert!(chain_part_is_long_enough(meta.l0, 2, 1, 4));
        assert!(!chain_part_is_long_enough(meta.l0 - 1, 2, 1, 4));
        assert_eq!(dag.in_degree(meta.w), 6);
        assert!(dag.is_sink(meta.w));
        // merged members are shared, everything else is private
        for x in 0..2 {
            let h1 = meta.gadget(Side::H1, x);
            let h2 = meta.gadget(Side::H2, x);
            assert_eq!(h1.members[..4], h2.members[..4]);
            assert!(h1.members[4..].iter().all(|m| !h2.members.contains(m)));
        }
        // cross slot x of H2(y) is middle node y of H1(x)
        let mid = meta.middle_start();
        for (x, y) in [(0, 1), (1, 0), (0, 0), (1, 1)] {
            let slot = meta.gadget(Side::H2, y).members[4 + 6 + x];
            assert_eq!(slot, meta.gadget(Side::H1, x).chain[mid + y]);
        }
    }

    #[test]
    fn reduction_single_node() {
        let g0 = UndirectedGraph::new(1, []).unwrap();
        let (dag, meta) = gen_maxinset_reduction(&g0, 0, 4).unwrap();
        assert_eq!((meta.r, meta.group_size), (13, 11));
        assert_eq!(dag.in_degree(meta.w), 6);
        assert!(gen_maxinset_reduction(&g0, 0, 3).is_err());
        assert!(gen_maxinset_reduction(&g0, 1, 4).is_err());
        assert!(matches!(
            gen_maxinset_reduction_from_edges(2, &[(0, 1), (1, 0)], 0, 4),
            Err(GeneratorError::NotSimpleGraph(_))
        ));
    }

    #[test]
    fn spec_serde() {
        let spec = GeneratorSpec::KaryTree { k: 2, d: 3 };
        let text = serde_json::to_string(&spec).unwrap();
        assert_eq!(text, r#"{"family":"kary_tree","k":2,"d":3}"#);
        assert_eq!(serde_json::from_str::<GeneratorSpec>(&text).unwrap(), spec);
    }
}
