#![allow(dead_code)]

use prbp::ComputationDag;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random DAG on `2..=max_n` nodes with no isolated node, edges oriented
/// from lower to higher id.
pub fn random_dag(rng: &mut ChaCha8Rng, max_n: usize) -> ComputationDag {
    let n = rng.gen_range(2..=max_n);
    let p = rng.gen_range(0.2..0.6);
    let mut edges = Vec::new();
    for v in 1..n {
        for u in 0..v {
            if rng.gen_bool(p) {
                edges.push((u, v));
            }
        }
    }
    for v in 0..n {
        if edges.iter().any(|&(a, b)| a == v || b == v) {
            continue;
        }
        let w = (v + rng.gen_range(1..n)) % n;
        edges.push((v.min(w), v.max(w)));
    }
    edges.sort_unstable();
    edges.dedup();
    ComputationDag::new(n, edges).unwrap()
}

/// Random DAG whose in-degrees stay below `max_in`.
pub fn random_dag_bounded(rng: &mut ChaCha8Rng, max_n: usize, max_in: usize) -> ComputationDag {
    loop {
        let dag = random_dag(rng, max_n);
        if dag.max_in_degree() <= max_in {
            return dag;
        }
    }
}
