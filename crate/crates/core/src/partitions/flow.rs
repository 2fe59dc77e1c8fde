//! Minimum dominators as minimum vertex cuts.
//!
//! Every node `v` is split into `v_in -> v_out` with capacity 1. A super
//! source feeds every DAG source, every target feeds a super sink, and DAG
//! edges get unbounded capacity. A minimum `s`-`t` cut then only uses split
//! arcs, and the cut nodes form a minimum dominator. The flow decomposes
//! into vertex-disjoint source-to-target paths, which certify minimality.

use std::collections::VecDeque;

use crate::dag::{ComputationDag, NodeId};

/// A minimum dominator and as many vertex-disjoint source-to-target paths.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MinDominator {
    pub dominator: Vec<NodeId>,
    pub paths: Vec<Vec<NodeId>>,
}

struct Arc {
    to: usize,
    cap: usize,
    /// Capacity before any flow; zero for reverse arcs.
    orig: usize,
    rev: usize,
}

struct Network {
    adj: Vec<Vec<Arc>>,
}

impl Network {
    fn new(size: usize) -> Self {
        Self {
            adj: (0..size).map(|_| Vec::new()).collect(),
        }
    }

    fn add(&mut self, a: usize, b: usize, cap: usize) {
        let (ra, rb) = (self.adj[b].len(), self.adj[a].len());
        self.adj[a].push(Arc {
            to: b,
            cap,
            orig: cap,
            rev: ra,
        });
        self.adj[b].push(Arc {
            to: a,
            cap: 0,
            orig: 0,
            rev: rb,
        });
    }

    /// BFS tree from `s` in the residual graph: parent as (node, arc index).
    fn bfs(&self, s: usize) -> Vec<Option<(usize, usize)>> {
        let mut parent = vec![None; self.adj.len()];
        parent[s] = Some((s, usize::MAX));
        let mut queue = VecDeque::from([s]);
        while let Some(a) = queue.pop_front() {
            for (i, arc) in self.adj[a].iter().enumerate() {
                if arc.cap > 0 && parent[arc.to].is_none() {
                    parent[arc.to] = Some((a, i));
                    queue.push_back(arc.to);
                }
            }
        }
        parent
    }
}

/// Minimum dominator of `targets`, with a matching set of disjoint paths.
pub fn min_dominator(dag: &ComputationDag, targets: &[NodeId]) -> MinDominator {
    let n = dag.node_count();
    let (s, t) = (2 * n, 2 * n + 1);
    let inf = n + 1;
    let mut net = Network::new(2 * n + 2);
    for v in 0..n {
        net.add(v, n + v, 1);
    }
    for &(u, v) in dag.edges() {
        net.add(n + u, v, inf);
    }
    for v in dag.sources() {
        net.add(s, v, inf);
    }
    let mut is_target = vec![false; n];
    for &v in targets {
        if !is_target[v] {
            is_target[v] = true;
            net.add(n + v, t, inf);
        }
    }
    // Every augmenting path crosses a unit split arc, so at most n rounds.
    loop {
        let parent = net.bfs(s);
        if parent[t].is_none() {
            break;
        }
        let mut at = t;
        while at != s {
            let (prev, i) = parent[at].unwrap();
            let rev = net.adj[prev][i].rev;
            net.adj[prev][i].cap -= 1;
            net.adj[at][rev].cap += 1;
            at = prev;
        }
    }
    let reach = net.bfs(s);
    let dominator = (0..n)
        .filter(|&v| reach[v].is_some() && reach[n + v].is_none())
        .collect();
    MinDominator {
        dominator,
        paths: decompose(&mut net, dag, s, t),
    }
}

/// Splits the flow into paths, consuming it.
fn decompose(net: &mut Network, dag: &ComputationDag, s: usize, t: usize) -> Vec<Vec<NodeId>> {
    let n = dag.node_count();
    let flow_arc = |net: &Network, a: usize| {
        net.adj[a]
            .iter()
            .position(|arc| arc.orig > 0 && arc.cap < arc.orig)
    };
    let mut paths = Vec::new();
    while let Some(first) = flow_arc(net, s) {
        let mut path = Vec::new();
        let (mut at, mut i) = (s, first);
        loop {
            net.adj[at][i].cap += 1;
            let to = net.adj[at][i].to;
            if to == t {
                break;
            }
            if to < n {
                path.push(to);
            }
            at = to;
            i = flow_arc(net, at).expect("flow is conserved");
        }
        paths.push(path);
    }
    paths
}

pub fn min_dominator_size(dag: &ComputationDag, targets: &[NodeId]) -> usize {
    min_dominator(dag, targets).dominator.len()
}

/// True iff every source-to-`targets` path meets `dominator`.
pub fn is_dominator(dag: &ComputationDag, dominator: &[NodeId], targets: &[NodeId]) -> bool {
    let blocked = dag.node_set(dominator.iter().copied());
    !dag.reachable_avoiding(&dag.node_set(targets.iter().copied()), &blocked)
}

/// Tails of the given edges.
pub fn edge_starts(edges: &[(NodeId, NodeId)]) -> Vec<NodeId> {
    let mut starts: Vec<NodeId> = edges.iter().map(|&(u, _)| u).collect();
    starts.sort_unstable();
    starts.dedup();
    starts
}

/// True iff every source path containing an edge of `edges` meets `dominator`.
pub fn is_edge_dominator(
    dag: &ComputationDag,
    dominator: &[NodeId],
    edges: &[(NodeId, NodeId)],
) -> bool {
    is_dominator(dag, dominator, &edge_starts(edges))
}
