//! A* over pebbling states.
//!
//! I/O moves cost 1, everything else is free. Two state spaces are
//! searched with the same driver:
//!
//! * the plain games (no variant flags) use a packed bit encoding and a
//!   reduced move set, described on [`Packed`];
//! * any variant flag falls back to [`Generic`], which tries every legal
//!   move through the engine.

use std::cmp::Reverse;
use std::collections::BinaryHeap;
use std::hash::Hash;
use std::time::Instant;

use indexmap::map::Entry;
use indexmap::IndexMap;

use super::{SolveBudget, SolveError, SolveResult, SolveStatus};
use crate::dag::{ComputationDag, NodeId};
use crate::game::{
    validate_schedule, Game, GameConfig, GameKind, GameState, Move, Pebble, Schedule,
};

/// One search edge: an optional free delete to make room, then a move.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(super) struct Step {
    victim: Option<NodeId>,
    mv: Move,
}

pub(super) trait Space {
    type State: Clone + Eq + Hash;

    fn initial(&self) -> (Self::State, Vec<Move>);
    /// Pushes `(step, successor, cost)` triples.
    fn successors(&self, s: &Self::State, out: &mut Vec<(Step, Self::State, usize)>);
    /// Applies a step and returns every move it stands for.
    fn replay(&self, s: &mut Self::State, step: Step) -> Vec<Move>;
    fn is_goal(&self, s: &Self::State) -> bool;
    /// Lower bound on the remaining I/O cost; must be consistent.
    fn heuristic(&self, s: &Self::State) -> usize;
    fn progress(&self, s: &Self::State) -> usize;
}

struct Meta {
    parent: u32,
    step: Option<Step>,
    g: usize,
}

enum Outcome {
    Found(usize, Vec<Step>),
    Exhausted { pruned: bool },
    Budget,
}

fn astar<S: Space>(space: &S, budget: &SolveBudget, expanded: &mut usize) -> Outcome {
    let start = Instant::now();
    let deadline = budget.deadline();
    let bound = budget.upper_bound_seed;
    let (init, _) = space.initial();
    let mut table: IndexMap<S::State, Meta> = IndexMap::new();
    let mut heap = BinaryHeap::new();
    let h0 = space.heuristic(&init);
    let p0 = space.progress(&init);
    table.insert(
        init,
        Meta {
            parent: u32::MAX,
            step: None,
            g: 0,
        },
    );
    // Lowest f first, then most progress, then earliest discovery.
    heap.push((Reverse(h0), p0, Reverse(0usize), 0usize));
    let mut succ = Vec::new();
    let mut pruned = false;

    while let Some((Reverse(f), _, Reverse(idx), g)) = heap.pop() {
        let (state, meta) = table.get_index(idx).unwrap();
        if meta.g < g {
            continue;
        }
        let _ = f;
        if space.is_goal(state) {
            let mut steps = Vec::new();
            let mut at = idx;
            while let Some(step) = table[at].step {
                steps.push(step);
                at = table[at].parent as usize;
            }
            steps.reverse();
            return Outcome::Found(g, steps);
        }
        *expanded += 1;
        if (*expanded).is_multiple_of(1024) {
            if let Some(limit) = deadline {
                if start.elapsed() > limit {
                    return Outcome::Budget;
                }
            }
        }
        succ.clear();
        let state = state.clone();
        space.successors(&state, &mut succ);
        for (step, next, cost) in succ.drain(..) {
            let g2 = g + cost;
            let h = space.heuristic(&next);
            if bound.is_some_and(|b| g2 + h > b) {
                pruned = true;
                continue;
            }
            let p = space.progress(&next);
            let meta = Meta {
                parent: idx as u32,
                step: Some(step),
                g: g2,
            };
            let at = match table.entry(next) {
                Entry::Occupied(mut e) => {
                    if e.get().g <= g2 {
                        continue;
                    }
                    e.insert(meta);
                    e.index()
                }
                Entry::Vacant(e) => {
                    let at = e.index();
                    e.insert(meta);
                    at
                }
            };
            heap.push((Reverse(g2 + h), p, Reverse(at), g2));
        }
        if table.len() > budget.max_states {
            return Outcome::Budget;
        }
    }
    Outcome::Exhausted { pruned }
}

fn run<S: Space>(
    space: &S,
    dag: &ComputationDag,
    config: &GameConfig,
    budget: &SolveBudget,
) -> SolveResult {
    let mut expanded = 0;
    match astar(space, budget, &mut expanded) {
        Outcome::Found(cost, steps) => {
            let (mut state, mut moves) = space.initial();
            for step in steps {
                moves.extend(space.replay(&mut state, step));
            }
            let report = validate_schedule(dag, config, &moves);
            assert!(
                report.is_complete() && report.io_cost == cost,
                "solver witness does not replay: {report:?}"
            );
            SolveResult {
                status: SolveStatus::Optimal,
                opt_cost: Some(cost),
                witness: Some(Schedule::new(config.clone(), moves)),
                states_expanded: expanded,
            }
        }
        Outcome::Exhausted { pruned: true } | Outcome::Budget => {
            SolveResult::without_solution(SolveStatus::BudgetExhausted, expanded)
        }
        Outcome::Exhausted { pruned: false } => {
            SolveResult::without_solution(SolveStatus::Infeasible, expanded)
        }
    }
}

/// Least I/O cost over all valid terminal one-shot schedules.
///
/// The clear rule is not supported. When the capacity cannot admit any
/// pebbling the result is `Infeasible` without searching.
pub fn solve_opt(
    dag: &ComputationDag,
    config: &GameConfig,
    budget: &SolveBudget,
) -> Result<SolveResult, SolveError> {
    config.validate()?;
    if config.allow_clear {
        return Err(SolveError::ClearUnsupported);
    }
    if !config.capacity_admits(dag) {
        return Ok(SolveResult::without_solution(SolveStatus::Infeasible, 0));
    }
    if config.sliding || config.no_deletion {
        Ok(run(&Generic::new(dag, config), dag, config, budget))
    } else {
        Ok(run(&Packed::new(dag, config), dag, config, budget))
    }
}

/// Packed state: red bits, then blue bits, then marked edges (PRBP) or
/// computed nodes (RBP).
///
/// Reductions, each of which keeps at least one optimal schedule reachable:
///
/// * Dead values are dropped as soon as they appear. A red node whose
///   out-edges are all marked (PRBP) or whose successors are all computed
///   (RBP) is never read again, so holding it only costs a slot. A finished
///   sink without a blue pebble is saved first: it must be saved exactly
///   once anyway and nothing can change it meanwhile.
/// * Deletes happen only when a move needs a slot, and only of values that
///   have a blue copy. Postponing a delete until the slot is needed never
///   invalidates a schedule, and dropping an unsaved live value makes the
///   instance unsolvable in the one-shot game.
/// * No redundant saves or loads, and loads only of nodes that still have
///   unmarked edges (PRBP) or uncomputed successors (RBP).
pub(super) struct Packed<'a> {
    dag: &'a ComputationDag,
    kind: GameKind,
    r: usize,
    n: usize,
    words: usize,
    in_edges: Vec<Vec<usize>>,
    out_edges: Vec<Vec<usize>>,
}

type Bits = Box<[u64]>;

#[inline]
fn get(b: &[u64], i: usize) -> bool {
    b[i >> 6] >> (i & 63) & 1 == 1
}

#[inline]
fn set(b: &mut [u64], i: usize, on: bool) {
    if on {
        b[i >> 6] |= 1 << (i & 63);
    } else {
        b[i >> 6] &= !(1 << (i & 63));
    }
}

impl<'a> Packed<'a> {
    fn new(dag: &'a ComputationDag, config: &GameConfig) -> Self {
        let n = dag.node_count();
        let m = dag.edge_count();
        let third = match config.kind {
            GameKind::Prbp => m,
            GameKind::Rbp => n,
        };
        let mut in_edges = vec![Vec::new(); n];
        let mut out_edges = vec![Vec::new(); n];
        for (e, &(u, v)) in dag.edges().iter().enumerate() {
            out_edges[u].push(e);
            in_edges[v].push(e);
        }
        Self {
            dag,
            kind: config.kind,
            r: config.capacity,
            n,
            words: (2 * n + third).div_ceil(64),
            in_edges,
            out_edges,
        }
    }

    fn red(&self, s: &[u64], v: NodeId) -> bool {
        get(s, v)
    }

    fn blue(&self, s: &[u64], v: NodeId) -> bool {
        get(s, self.n + v)
    }

    fn third(&self, s: &[u64], i: usize) -> bool {
        get(s, 2 * self.n + i)
    }

    fn red_count(&self, s: &[u64]) -> usize {
        (0..self.n).filter(|&v| self.red(s, v)).count()
    }

    /// PRBP: all in-edges marked. RBP: source or computed.
    fn complete(&self, s: &[u64], v: NodeId) -> bool {
        match self.kind {
            GameKind::Prbp => self.in_edges[v].iter().all(|&e| self.third(s, e)),
            GameKind::Rbp => self.dag.is_source(v) || self.third(s, v),
        }
    }

    /// Whether `v` will be read or written again.
    fn pending(&self, s: &[u64], v: NodeId) -> bool {
        match self.kind {
            GameKind::Prbp => {
                !self.complete(s, v) || self.out_edges[v].iter().any(|&e| !self.third(s, e))
            }
            GameKind::Rbp => self.dag.out_neighbors(v).iter().any(|&w| !self.third(s, w)),
        }
    }

    /// Saves finished sinks and drops dead values; returns the moves made.
    fn close(&self, s: &mut [u64], out: &mut Vec<Move>) -> usize {
        let mut cost = 0;
        for v in 0..self.n {
            if !self.red(s, v) || !self.complete(s, v) || self.pending(s, v) {
                continue;
            }
            if self.dag.is_sink(v) && !self.blue(s, v) {
                set(s, self.n + v, true);
                out.push(Move::Save { v });
                cost += 1;
            }
            set(s, v, false);
            out.push(Move::Delete { v });
        }
        cost
    }

    /// Applies `step` including the free closure; returns its I/O cost.
    fn apply(&self, s: &mut [u64], step: Step, out: &mut Vec<Move>) -> usize {
        if let Some(x) = step.victim {
            set(s, x, false);
            out.push(Move::Delete { v: x });
        }
        out.push(step.mv);
        let mut cost = 0;
        match step.mv {
            Move::Load { v } => {
                set(s, v, true);
                cost += 1;
            }
            Move::Save { v } => {
                set(s, self.n + v, true);
                cost += 1;
            }
            Move::Compute { v } => {
                set(s, v, true);
                set(s, 2 * self.n + v, true);
            }
            Move::PartialCompute { u, v } => {
                let e = self.dag.edge_index(u, v).unwrap();
                set(s, v, true);
                set(s, self.n + v, false);
                set(s, 2 * self.n + e, true);
            }
            other => unreachable!("not generated: {other}"),
        }
        cost + self.close(s, out)
    }

    /// Every way to make one free slot, avoiding `keep`.
    fn slots(&self, s: &[u64], keep: &[NodeId]) -> Vec<Option<NodeId>> {
        if self.red_count(s) < self.r {
            return vec![None];
        }
        (0..self.n)
            .filter(|&x| self.red(s, x) && self.blue(s, x) && !keep.contains(&x))
            .map(Some)
            .collect()
    }

    fn push(&self, s: &Bits, victim: Option<NodeId>, mv: Move, out: &mut Vec<(Step, Bits, usize)>) {
        let mut next = s.clone();
        let step = Step { victim, mv };
        let mut sink = Vec::new();
        let cost = self.apply(&mut next, step, &mut sink);
        out.push((step, next, cost));
    }
}

impl Space for Packed<'_> {
    type State = Bits;

    fn initial(&self) -> (Bits, Vec<Move>) {
        let mut s = vec![0u64; self.words].into_boxed_slice();
        for v in self.dag.sources() {
            set(&mut s, self.n + v, true);
        }
        (s, Vec::new())
    }

    fn successors(&self, s: &Bits, out: &mut Vec<(Step, Bits, usize)>) {
        let dag = self.dag;
        match self.kind {
            GameKind::Prbp => {
                for (e, &(u, v)) in dag.edges().iter().enumerate() {
                    if self.third(s, e) || !self.red(s, u) || !self.complete(s, u) {
                        continue;
                    }
                    if self.red(s, v) {
                        self.push(s, None, Move::PartialCompute { u, v }, out);
                    } else if !self.blue(s, v) {
                        for victim in self.slots(s, &[u]) {
                            self.push(s, victim, Move::PartialCompute { u, v }, out);
                        }
                    }
                }
            }
            GameKind::Rbp => {
                for v in 0..self.n {
                    if dag.is_source(v) || self.third(s, v) {
                        continue;
                    }
                    let ins = dag.in_neighbors(v);
                    if ins.iter().all(|&u| self.red(s, u)) {
                        for victim in self.slots(s, ins) {
                            self.push(s, victim, Move::Compute { v }, out);
                        }
                    }
                }
            }
        }
        for v in 0..self.n {
            let (red, blue) = (self.red(s, v), self.blue(s, v));
            if blue && !red && self.pending(s, v) {
                for victim in self.slots(s, &[]) {
                    self.push(s, victim, Move::Load { v }, out);
                }
            }
            if red && !blue && self.pending(s, v) {
                self.push(s, None, Move::Save { v }, out);
            }
        }
    }

    fn replay(&self, s: &mut Bits, step: Step) -> Vec<Move> {
        let mut out = Vec::new();
        self.apply(s, step, &mut out);
        out
    }

    fn is_goal(&self, s: &Bits) -> bool {
        let sinks = self.dag.sinks().all(|v| self.blue(s, v));
        sinks
            && match self.kind {
                GameKind::Prbp => (0..self.dag.edge_count()).all(|e| self.third(s, e)),
                GameKind::Rbp => true,
            }
    }

    /// Blue-only nodes with work left must each be loaded once, and every
    /// sink without a blue pebble must be saved once.
    fn heuristic(&self, s: &Bits) -> usize {
        (0..self.n)
            .filter(|&v| {
                let (red, blue) = (self.red(s, v), self.blue(s, v));
                (blue && !red && self.pending(s, v)) || (!blue && self.dag.is_sink(v))
            })
            .count()
    }

    fn progress(&self, s: &Bits) -> usize {
        let third = match self.kind {
            GameKind::Prbp => self.dag.edge_count(),
            GameKind::Rbp => self.n,
        };
        (0..third).filter(|&i| self.third(s, i)).count()
    }
}

/// Every legal non-redundant move, checked by the engine. Used for the
/// sliding and no-deletion variants.
pub(super) struct Generic<'a> {
    game: Game<'a>,
}

impl<'a> Generic<'a> {
    fn new(dag: &'a ComputationDag, config: &'a GameConfig) -> Self {
        Self {
            game: Game::new(dag, config),
        }
    }

    fn candidates(&self, s: &GameState) -> Vec<Move> {
        let dag = self.game.dag;
        let cfg = self.game.config;
        let mut moves = Vec::new();
        for v in 0..dag.node_count() {
            if !s.is_red(v) {
                moves.push(Move::Load { v });
            }
            let redundant_save = cfg.kind == GameKind::Rbp && s.is_blue(v);
            if !redundant_save {
                moves.push(Move::Save { v });
            }
            moves.push(Move::Delete { v });
            if cfg.kind == GameKind::Rbp {
                moves.push(Move::Compute { v });
            }
        }
        for &(u, v) in dag.edges() {
            match cfg.kind {
                GameKind::Prbp => moves.push(Move::PartialCompute { u, v }),
                GameKind::Rbp if cfg.sliding => moves.push(Move::Slide { u, v }),
                GameKind::Rbp => {}
            }
        }
        moves
    }

    fn pending(&self, s: &GameState, v: NodeId) -> bool {
        let dag = self.game.dag;
        match s {
            GameState::Rbp(st) => dag
                .out_neighbors(v)
                .iter()
                .any(|&w| !st.computed.contains(w)),
            GameState::Prbp(st) => {
                !st.all_in_edges_marked(dag, v) || !st.all_out_edges_marked(dag, v)
            }
        }
    }
}

impl Space for Generic<'_> {
    type State = GameState;

    fn initial(&self) -> (GameState, Vec<Move>) {
        (self.game.initial_state(), Vec::new())
    }

    fn successors(&self, s: &GameState, out: &mut Vec<(Step, GameState, usize)>) {
        for mv in self.candidates(s) {
            if let Ok(next) = self.game.apply_move(s, mv) {
                out.push((Step { victim: None, mv }, next, usize::from(mv.is_io())));
            }
        }
    }

    fn replay(&self, s: &mut GameState, step: Step) -> Vec<Move> {
        self.game
            .apply_in_place(s, step.mv)
            .expect("replayed move is legal");
        vec![step.mv]
    }

    fn is_goal(&self, s: &GameState) -> bool {
        self.game.is_terminal(s)
    }

    fn heuristic(&self, s: &GameState) -> usize {
        let dag = self.game.dag;
        (0..dag.node_count())
            .filter(|&v| {
                let (red, blue) = (s.is_red(v), s.is_blue(v));
                (blue && !red && self.pending(s, v)) || (!blue && dag.is_sink(v))
            })
            .count()
    }

    fn progress(&self, s: &GameState) -> usize {
        match s {
            GameState::Rbp(st) => st.computed.count_ones(..),
            GameState::Prbp(st) => {
                st.marked.count_ones(..) + st.pebbles.iter().filter(|&&p| p == Pebble::Blue).count()
            }
        }
    }
}
