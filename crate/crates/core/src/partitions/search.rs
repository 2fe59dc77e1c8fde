//! Exact minimum class counts by enumeration.

use super::{min_dominator_size, PartitionError, PartitionKind};
use crate::dag::{ComputationDag, NodeId};

/// Largest ground set enumerated without `force`.
pub const DEFAULT_GROUND_LIMIT: usize = 9;

/// Minimum number of classes of a valid partition of the given kind.
///
/// Tries k = 1, 2, ... and enumerates class assignments in topological order,
/// so the ordering condition is built in. Dominator sizes only grow as a
/// class grows, which prunes early; terminal membership is counted as soon
/// as it can no longer change. Refuses ground sets above
/// [`DEFAULT_GROUND_LIMIT`] unless `force` is set.
pub fn min_classes_brute_force(
    dag: &ComputationDag,
    s: usize,
    kind: PartitionKind,
    force: bool,
) -> Result<usize, PartitionError> {
    if s == 0 {
        return Err(PartitionError::Shape("S must be positive".into()));
    }
    let ground = Ground::new(dag, kind);
    let size = ground.targets.len();
    if size > DEFAULT_GROUND_LIMIT && !force {
        return Err(PartitionError::InstanceTooLarge {
            size,
            limit: DEFAULT_GROUND_LIMIT,
        });
    }
    // Singleton classes in topological order are always valid for S >= 1.
    for k in 1..size.max(1) {
        if Search::new(dag, &ground, s, k).run(0) {
            return Ok(k);
        }
    }
    Ok(size.max(1))
}

/// Terminal membership of one node, decided once every relevant element
/// has a class.
struct Check {
    /// Positions whose class puts the node into that class's terminal set.
    ins: Vec<usize>,
    /// Positions whose class takes it out again.
    outs: Vec<usize>,
}

/// Elements in a topological order, with what each one depends on.
struct Ground {
    /// Node each element adds to its class's dominator targets.
    targets: Vec<NodeId>,
    /// Earlier positions whose class must not exceed this one's.
    deps: Vec<Vec<usize>>,
    /// Terminal checks that become final after each position.
    checks: Vec<Vec<Check>>,
    terminal: bool,
}

impl Ground {
    fn new(dag: &ComputationDag, kind: PartitionKind) -> Self {
        let n = dag.node_count();
        let topo = dag.topological_order();
        let mut rank = vec![0; n];
        for (i, &v) in topo.iter().enumerate() {
            rank[v] = i;
        }
        let mut checks: Vec<Vec<Check>> = Vec::new();
        if kind.is_edge() {
            let mut order: Vec<usize> = (0..dag.edge_count()).collect();
            order.sort_by_key(|&e| {
                let (u, v) = dag.edges()[e];
                (rank[u], rank[v])
            });
            let mut pos = vec![0; order.len()];
            for (p, &e) in order.iter().enumerate() {
                pos[e] = p;
            }
            let edge_pos = |u, w| pos[dag.edge_index(u, w).unwrap()];
            let targets = order.iter().map(|&e| dag.edges()[e].0).collect();
            let deps = order
                .iter()
                .map(|&e| {
                    let u = dag.edges()[e].0;
                    dag.in_neighbors(u)
                        .iter()
                        .map(|&a| edge_pos(a, u))
                        .collect()
                })
                .collect();
            checks.resize_with(order.len(), Vec::new);
            for v in 0..n {
                let ins: Vec<usize> = dag
                    .in_neighbors(v)
                    .iter()
                    .map(|&a| edge_pos(a, v))
                    .collect();
                if ins.is_empty() {
                    continue;
                }
                let outs: Vec<usize> = dag
                    .out_neighbors(v)
                    .iter()
                    .map(|&w| edge_pos(v, w))
                    .collect();
                let last = ins.iter().chain(&outs).copied().max().unwrap();
                checks[last].push(Check { ins, outs });
            }
            Self {
                targets,
                deps,
                checks,
                terminal: true,
            }
        } else {
            let targets: Vec<NodeId> = topo.to_vec();
            let deps = targets
                .iter()
                .map(|&v| dag.in_neighbors(v).iter().map(|&u| rank[u]).collect())
                .collect();
            checks.resize_with(n, Vec::new);
            for &v in topo {
                let outs: Vec<usize> = dag.out_neighbors(v).iter().map(|&w| rank[w]).collect();
                let last = outs.iter().copied().max().unwrap_or(rank[v]).max(rank[v]);
                checks[last].push(Check {
                    ins: vec![rank[v]],
                    outs,
                });
            }
            Self {
                targets,
                deps,
                checks,
                terminal: kind == PartitionKind::SPartition,
            }
        }
    }
}

struct Search<'a> {
    dag: &'a ComputationDag,
    ground: &'a Ground,
    s: usize,
    k: usize,
    class: Vec<usize>,
    /// Dominator targets per class, kept sorted and deduplicated.
    members: Vec<Vec<NodeId>>,
    terminals: Vec<usize>,
}

impl<'a> Search<'a> {
    fn new(dag: &'a ComputationDag, ground: &'a Ground, s: usize, k: usize) -> Self {
        Self {
            dag,
            ground,
            s,
            k,
            class: vec![0; ground.targets.len()],
            members: vec![Vec::new(); k],
            terminals: vec![0; k],
        }
    }

    fn run(&mut self, at: usize) -> bool {
        if at == self.ground.targets.len() {
            return true;
        }
        let lo = self.ground.deps[at]
            .iter()
            .map(|&d| self.class[d])
            .max()
            .unwrap_or(0);
        let target = self.ground.targets[at];
        for c in lo..self.k {
            self.class[at] = c;
            let inserted = match self.members[c].binary_search(&target) {
                Ok(_) => None,
                Err(i) => {
                    self.members[c].insert(i, target);
                    Some(i)
                }
            };
            if inserted.is_none() || min_dominator_size(self.dag, &self.members[c]) <= self.s {
                let added = self.settle(at);
                if added.iter().all(|&c| self.terminals[c] <= self.s) && self.run(at + 1) {
                    return true;
                }
                for c in added {
                    self.terminals[c] -= 1;
                }
            }
            if let Some(i) = inserted {
                self.members[c].remove(i);
            }
        }
        false
    }

    /// Counts the terminal memberships decided at `at`; returns the classes
    /// whose counts grew.
    fn settle(&mut self, at: usize) -> Vec<usize> {
        let mut added = Vec::new();
        if !self.ground.terminal {
            return added;
        }
        for check in &self.ground.checks[at] {
            let mut classes: Vec<usize> = check.ins.iter().map(|&p| self.class[p]).collect();
            classes.sort_unstable();
            classes.dedup();
            for c in classes {
                if !check.outs.iter().any(|&p| self.class[p] == c) {
                    self.terminals[c] += 1;
                    added.push(c);
                }
            }
        }
        added
    }
}
