//! Hand-built pebbling strategies for the generator families.
//!
//! Every constructor replays its moves through the engine while building,
//! so an illegal move is a bug and panics immediately.

use serde::{Deserialize, Serialize};

use crate::dag::{ComputationDag, NodeId};
use crate::game::{
    validate_schedule, CostReport, Game, GameConfig, GameKind, GameState, Move, Pebble, PrbpState,
    Schedule,
};
use crate::generators::{
    gen_figure1, gen_figure1_chain, gen_kary_tree, gen_matvec, gen_pebble_collector, gen_zipper,
    GeneratorError,
};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NamedSchedule {
    pub name: String,
    pub claimed_cost: usize,
    pub claim_source: String,
    #[serde(flatten)]
    pub schedule: Schedule,
}

impl NamedSchedule {
    pub fn report(&self, dag: &ComputationDag) -> CostReport {
        validate_schedule(dag, &self.schedule.config, &self.schedule.moves)
    }

    /// Valid, terminal and exactly at the claimed cost.
    pub fn holds(&self, dag: &ComputationDag) -> bool {
        let rep = self.report(dag);
        rep.is_complete() && rep.io_cost == self.claimed_cost
    }
}

struct Builder<'a> {
    game: Game<'a>,
    state: GameState,
    moves: Vec<Move>,
}

impl<'a> Builder<'a> {
    fn new(dag: &'a ComputationDag, config: &'a GameConfig) -> Self {
        let game = Game::new(dag, config);
        Self {
            state: game.initial_state(),
            game,
            moves: Vec::new(),
        }
    }

    fn push(&mut self, mv: Move) {
        if let Err(e) = self.game.apply_in_place(&mut self.state, mv) {
            panic!(
                "strategy emitted an illegal move at step {}: {mv}: {e}",
                self.moves.len()
            );
        }
        self.moves.push(mv);
    }

    fn load(&mut self, v: NodeId) {
        self.push(Move::Load { v });
    }

    fn save(&mut self, v: NodeId) {
        self.push(Move::Save { v });
    }

    fn delete(&mut self, v: NodeId) {
        self.push(Move::Delete { v });
    }

    fn compute(&mut self, v: NodeId) {
        self.push(Move::Compute { v });
    }

    fn pc(&mut self, u: NodeId, v: NodeId) {
        self.push(Move::PartialCompute { u, v });
    }

    fn prbp(&self) -> &PrbpState {
        self.state.as_prbp().expect("PRBP builder")
    }

    fn io(&self) -> usize {
        self.moves.iter().filter(|m| m.is_io()).count()
    }

    fn finish(self, name: String, claimed_cost: usize, claim_source: &str) -> NamedSchedule {
        NamedSchedule {
            name,
            claimed_cost,
            claim_source: claim_source.to_string(),
            schedule: Schedule::new(self.game.config.clone(), self.moves),
        }
    }
}

/// Generic topological sweep for PRBP with any `r >= 2`.
///
/// Non-source nodes are processed in topological order. Each unmarked
/// in-edge is aggregated after loading its source if needed. When fast memory
/// is full, a light red value is dropped for free if possible, otherwise a
/// dark red one is saved first. A finished node is immediately pushed into
/// successors that are already red or fit in a free slot, and anything whose
/// out-edges are all marked is dropped at once. Sinks are saved when done.
pub fn streaming_prbp(dag: &ComputationDag, r: usize) -> NamedSchedule {
    assert!(r >= 2, "PRBP needs at least 2 red pebbles");
    let config = GameConfig::prbp(r);
    let mut b = Builder::new(dag, &config);

    fn make_room(b: &mut Builder, keep: [NodeId; 2]) {
        while b.state.red_count() >= b.game.config.capacity {
            let st = b.prbp();
            let reds =
                (0..st.pebbles.len()).filter(|&x| st.pebbles[x].is_red() && !keep.contains(&x));
            let light = reds
                .clone()
                .find(|&x| st.pebbles[x] == Pebble::BlueLightRed);
            match light {
                Some(x) => b.delete(x),
                None => {
                    let x = reds.min().expect("a red pebble outside the protected pair");
                    b.save(x);
                    b.delete(x);
                }
            }
        }
    }

    fn drop_if_dead(b: &mut Builder, x: NodeId) {
        let dag = b.game.dag;
        let st = b.prbp();
        if st.pebbles[x].is_red() && !dag.is_sink(x) && st.all_out_edges_marked(dag, x) {
            b.delete(x);
        }
    }

    for &v in dag.topological_order() {
        if dag.is_source(v) {
            continue;
        }
        for &u in dag.in_neighbors(v) {
            let e = dag.edge_index(u, v).unwrap();
            if b.prbp().marked.contains(e) {
                continue;
            }
            if !b.prbp().pebbles[u].is_red() {
                make_room(&mut b, [u, v]);
                b.load(u);
            }
            match b.prbp().pebbles[v] {
                Pebble::None => make_room(&mut b, [u, v]),
                Pebble::Blue => {
                    make_room(&mut b, [u, v]);
                    b.load(v);
                }
                _ => {}
            }
            b.pc(u, v);
            drop_if_dead(&mut b, u);
        }
        if dag.is_sink(v) {
            if b.prbp().pebbles[v] == Pebble::DarkRed {
                b.save(v);
            }
            if b.prbp().pebbles[v].is_red() {
                b.delete(v);
            }
            continue;
        }
        if !b.prbp().pebbles[v].is_red() {
            continue;
        }
        for &w in dag.out_neighbors(v) {
            let st = b.prbp();
            let ready = match st.pebbles[w] {
                Pebble::None => st.red_count() < r,
                p => p.is_red(),
            };
            if ready {
                b.pc(v, w);
            }
        }
        drop_if_dead(&mut b, v);
    }
    let cost = b.io();
    b.finish(format!("streaming-r{r}"), cost, "construction count")
}

fn fig1_ids(name: &str) -> NodeId {
    ["u0", "u1", "u2", "w1", "w2", "w3", "w4", "v1", "v2", "v0"]
        .iter()
        .position(|&s| s == name)
        .unwrap()
}

/// The hand-written strategies on the small example DAG at `r = 4`:
/// 3 I/O steps in RBP and 2 in PRBP.
pub fn figure1_golden(kind: GameKind) -> NamedSchedule {
    let dag = gen_figure1(true).expect("fixed DAG");
    let config = GameConfig::new(kind, 4);
    let mut b = Builder::new(&dag, &config);
    let id = fig1_ids;
    match kind {
        GameKind::Rbp => {
            let steps: &[(&str, &str)] = &[
                ("load", "u0"),
                ("compute", "u1"),
                ("delete", "u0"),
                ("compute", "w1"),
                ("compute", "w2"),
                ("compute", "w3"),
                ("delete", "w1"),
                ("delete", "w2"),
                ("compute", "w4"),
                ("delete", "w3"),
                ("delete", "u1"),
                ("load", "u0"),
                ("compute", "u2"),
                ("delete", "u0"),
                ("compute", "v1"),
                ("compute", "v2"),
                ("delete", "w4"),
                ("delete", "u2"),
                ("compute", "v0"),
                ("save", "v0"),
            ];
            for &(op, v) in steps {
                let v = id(v);
                match op {
                    "load" => b.load(v),
                    "compute" => b.compute(v),
                    "delete" => b.delete(v),
                    _ => b.save(v),
                }
            }
            b.finish("figure1-rbp".into(), 3, "hand-written sequence")
        }
        GameKind::Prbp => {
            b.load(0);
            b.pc(0, 1);
            b.pc(0, 2);
            b.delete(0);
            gadget_prbp(&mut b, 1, 2, [3, 4, 5, 6], 7, 8);
            b.pc(7, 9);
            b.pc(8, 9);
            b.save(9);
            b.finish("figure1-prbp".into(), 2, "hand-written sequence")
        }
    }
}

/// One copy of the example gadget with entry pair `(a, bb)` red and complete.
/// Leaves the exit pair red and complete and everything else unpebbled.
fn gadget_prbp(b: &mut Builder, a: NodeId, bb: NodeId, w: [NodeId; 4], a2: NodeId, b2: NodeId) {
    let [w1, w2, w3, w4] = w;
    b.pc(a, w1);
    b.pc(w1, w3);
    b.delete(w1);
    b.pc(a, w2);
    b.pc(w2, w3);
    b.delete(w2);
    b.pc(a, w4);
    b.pc(w3, w4);
    b.delete(a);
    b.delete(w3);
    b.pc(w4, a2);
    b.pc(w4, b2);
    b.pc(bb, a2);
    b.pc(bb, b2);
    b.delete(w4);
    b.delete(bb);
}

/// PRBP on `g` chained gadgets at `r = 4`, at the trivial cost 2.
pub fn chain_golden(copies: usize) -> Result<NamedSchedule, GeneratorError> {
    let dag = gen_figure1_chain(copies)?;
    let config = GameConfig::prbp(4);
    let mut b = Builder::new(&dag, &config);
    b.load(0);
    b.pc(0, 1);
    b.pc(0, 2);
    b.delete(0);
    for i in 0..copies {
        let o = 6 * i;
        gadget_prbp(
            &mut b,
            1 + o,
            2 + o,
            [3 + o, 4 + o, 5 + o, 6 + o],
            7 + o,
            8 + o,
        );
    }
    let v0 = 6 * copies + 3;
    b.pc(v0 - 2, v0);
    b.pc(v0 - 1, v0);
    b.save(v0);
    Ok(b.finish(format!("chain{copies}-prbp"), 2, "trivial cost"))
}

/// Column sweep for `y = A x` keeping all `m` partial outputs resident,
/// at `r = m + 3` and the trivial cost `m² + 2m`.
pub fn matvec_prbp(m: usize) -> Result<NamedSchedule, GeneratorError> {
    let dag = gen_matvec(m)?;
    let config = GameConfig::prbp(m + 3);
    let mut b = Builder::new(&dag, &config);
    let a = |j: usize, i: usize| m + j * m + i;
    let p = |j: usize, i: usize| m + m * m + j * m + i;
    let y = |j: usize| m + 2 * m * m + j;
    for i in 0..m {
        b.load(i);
        for j in 0..m {
            b.load(a(j, i));
            b.pc(i, p(j, i));
            b.pc(a(j, i), p(j, i));
            b.delete(a(j, i));
            b.pc(p(j, i), y(j));
            b.delete(p(j, i));
        }
        b.delete(i);
    }
    for j in 0..m {
        b.save(y(j));
    }
    Ok(b.finish(format!("matvec{m}-prbp"), m * m + 2 * m, "trivial cost"))
}

/// Closed-form I/O cost of [`tree_golden`].
///
/// RBP: `k^d + 2k^(d-1) - 1`. PRBP: `k^d + 2k^(d-k) - 1` for `d >= k`, and the
/// trivial `k^d + 1` for shallower trees, which fit in `k + 1` pebbles.
pub fn tree_cost_formula(k: usize, d: usize, kind: GameKind) -> usize {
    let kd = k.pow(d as u32);
    match kind {
        GameKind::Rbp => kd + 2 * k.pow(d as u32 - 1) - 1,
        GameKind::Prbp if d >= k => kd + 2 * k.pow((d - k) as u32) - 1,
        GameKind::Prbp => kd + 1,
    }
}

/// Subtree-by-subtree strategy on the complete `k`-ary tree at `r = k + 1`.
///
/// RBP: all but the last child subtree of a node of height at least 2 are
/// pebbled, saved and dropped; after the last one they are loaded back.
/// PRBP: a node of height `h <= k` is accumulated in place while its child
/// subtrees are pebbled; above height `k` the partial value is saved after
/// each child but the last and loaded back before the next.
pub fn tree_golden(k: usize, d: usize, kind: GameKind) -> Result<NamedSchedule, GeneratorError> {
    let dag = gen_kary_tree(k, d)?;
    let config = GameConfig::new(kind, k + 1);
    let mut b = Builder::new(&dag, &config);
    fn rbp(b: &mut Builder, v: NodeId, h: usize, k: usize) {
        let kids: Vec<NodeId> = ((k * v + 1)..=(k * v + k)).collect();
        if h == 0 {
            b.load(v);
            return;
        }
        if h == 1 {
            for &c in &kids {
                b.load(c);
            }
        } else {
            for &c in &kids[..k - 1] {
                rbp(b, c, h - 1, k);
                b.save(c);
                b.delete(c);
            }
            rbp(b, kids[k - 1], h - 1, k);
            for &c in &kids[..k - 1] {
                b.load(c);
            }
        }
        b.compute(v);
        for &c in &kids {
            b.delete(c);
        }
    }

    fn prbp(b: &mut Builder, v: NodeId, h: usize, k: usize) {
        if h == 0 {
            b.load(v);
            return;
        }
        let kids: Vec<NodeId> = ((k * v + 1)..=(k * v + k)).collect();
        for (i, &c) in kids.iter().enumerate() {
            let spill = h > k;
            if spill && i > 0 {
                prbp(b, c, h - 1, k);
                b.load(v);
            } else {
                prbp(b, c, h - 1, k);
            }
            b.pc(c, v);
            b.delete(c);
            if spill && i + 1 < k {
                b.save(v);
                b.delete(v);
            }
        }
    }

    match kind {
        GameKind::Rbp => rbp(&mut b, 0, d, k),
        GameKind::Prbp => prbp(&mut b, 0, d, k),
    }
    b.save(0);
    Ok(b.finish(
        format!("tree{k}-{d}-{kind}"),
        tree_cost_formula(k, d, kind),
        "closed form",
    ))
}

/// Closed-form I/O cost of [`zipper_prbp`]: `2d + 1 + 2(ceil(L/2) - 1)`.
pub fn zipper_prbp_cost(d: usize, chain_len: usize) -> usize {
    2 * d + 1 + 2 * (chain_len.div_ceil(2) - 1)
}

/// Zipper strategy at `r = d + 2`.
///
/// With the first source group loaded, the first chain node is finished and
/// every later node reading that group gets its partial value computed,
/// saved and dropped. Then the second group is loaded and the chain is
/// walked, loading each staged partial value back when its turn comes.
pub fn zipper_prbp(d: usize, chain_len: usize) -> Result<NamedSchedule, GeneratorError> {
    let dag = gen_zipper(d, chain_len)?;
    let config = GameConfig::prbp(d + 2);
    let mut b = Builder::new(&dag, &config);
    let c = |i: usize| 2 * d + i;
    for s in 0..d {
        b.load(s);
    }
    for s in 0..d {
        b.pc(s, c(0));
    }
    for i in (2..chain_len).step_by(2) {
        for s in 0..d {
            b.pc(s, c(i));
        }
        b.save(c(i));
        b.delete(c(i));
    }
    for s in 0..d {
        b.delete(s);
    }
    for t in d..2 * d {
        b.load(t);
    }
    for i in 1..chain_len {
        if i % 2 == 1 {
            for t in d..2 * d {
                b.pc(t, c(i));
            }
        } else {
            b.load(c(i));
        }
        b.pc(c(i - 1), c(i));
        b.delete(c(i - 1));
    }
    b.save(c(chain_len - 1));
    Ok(b.finish(
        format!("zipper{d}-{chain_len}-prbp"),
        zipper_prbp_cost(d, chain_len),
        "construction count",
    ))
}

/// RBP on the zipper at `r = d + 2`, reloading a whole source group for
/// every chain node: `2d + 1 + d(L - 2)`.
pub fn zipper_rbp(d: usize, chain_len: usize) -> Result<NamedSchedule, GeneratorError> {
    let dag = gen_zipper(d, chain_len)?;
    let config = GameConfig::rbp(d + 2);
    let mut b = Builder::new(&dag, &config);
    let c = |i: usize| 2 * d + i;
    let group = |i: usize| (i % 2) * d..(i % 2) * d + d;
    for i in 0..chain_len {
        for s in group(i) {
            b.load(s);
        }
        b.compute(c(i));
        if i > 0 {
            b.delete(c(i - 1));
        }
        for s in group(i) {
            b.delete(s);
        }
    }
    b.save(c(chain_len - 1));
    Ok(b.finish(
        format!("zipper{d}-{chain_len}-rbp"),
        2 * d + 1 + d * (chain_len - 2),
        "construction count",
    ))
}

/// Pebble collector with all `d` sources resident, at `r = d + 2` and the
/// trivial cost `d + 1`.
pub fn collector_full(d: usize, chain_len: usize) -> Result<NamedSchedule, GeneratorError> {
    let dag = gen_pebble_collector(d, chain_len)?;
    let config = GameConfig::prbp(d + 2);
    let mut b = Builder::new(&dag, &config);
    for s in 0..d {
        b.load(s);
    }
    for i in 1..=chain_len {
        let v = d + i - 1;
        let s = (i - 1) % d;
        b.pc(s, v);
        if i > 1 {
            b.pc(v - 1, v);
            b.delete(v - 1);
        }
        if i + d > chain_len {
            // last use of this source
            b.delete(s);
        }
    }
    b.save(d + chain_len - 1);
    Ok(b.finish(format!("collector{d}-{chain_len}"), d + 1, "trivial cost"))
}
