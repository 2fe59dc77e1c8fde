//! Move validation and schedule replay for both games.

use num_rational::Rational64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::config::{ser_ratio, ComputeCostSplit, GameConfig, GameKind};
use super::moves::Move;
use super::state::{GameState, Pebble, PrbpState, RbpState};
use crate::dag::ComputationDag;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MoveError {
    #[error("{0}")]
    RuleViolation(String),
    #[error("fast memory capacity {0} exceeded")]
    CapacityExceeded(usize),
}

fn violation<T>(reason: impl Into<String>) -> Result<T, MoveError> {
    Err(MoveError::RuleViolation(reason.into()))
}

/// Where and why a replay stopped.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MoveFailure {
    /// Index of the rejected move; `None` when the configuration itself is invalid.
    pub index: Option<usize>,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CostReport {
    pub io_cost: usize,
    #[serde(
        serialize_with = "ser_ratio",
        deserialize_with = "super::config::de_ratio"
    )]
    pub compute_cost: Rational64,
    pub peak_red: usize,
    pub valid: bool,
    pub terminal: bool,
    pub first_error: Option<MoveFailure>,
}

impl CostReport {
    /// Valid and terminal: a complete pebbling.
    pub fn is_complete(&self) -> bool {
        self.valid && self.terminal
    }
}

/// A DAG paired with the rules of one game.
#[derive(Debug, Clone, Copy)]
pub struct Game<'a> {
    pub dag: &'a ComputationDag,
    pub config: &'a GameConfig,
}

impl<'a> Game<'a> {
    pub fn new(dag: &'a ComputationDag, config: &'a GameConfig) -> Self {
        Self { dag, config }
    }

    pub fn initial_state(&self) -> GameState {
        match self.config.kind {
            GameKind::Rbp => GameState::Rbp(RbpState::initial(self.dag)),
            GameKind::Prbp => GameState::Prbp(PrbpState::initial(self.dag)),
        }
    }

    /// Returns the successor state, leaving `state` untouched.
    pub fn apply_move(&self, state: &GameState, mv: Move) -> Result<GameState, MoveError> {
        let mut next = state.clone();
        self.apply_in_place(&mut next, mv)?;
        Ok(next)
    }

    /// Applies `mv` to `state`. On error the state is unchanged.
    pub fn apply_in_place(&self, state: &mut GameState, mv: Move) -> Result<(), MoveError> {
        self.check_nodes(mv)?;
        match state {
            GameState::Rbp(s) => self.apply_rbp(s, mv),
            GameState::Prbp(s) => self.apply_prbp(s, mv),
        }
    }

    fn check_nodes(&self, mv: Move) -> Result<(), MoveError> {
        let n = self.dag.node_count();
        let bad = match mv {
            Move::Slide { u, v } | Move::PartialCompute { u, v } => u >= n || v >= n,
            other => other.target() >= n,
        };
        if bad {
            return violation(format!("{mv}: node out of range (n = {n})"));
        }
        Ok(())
    }

    fn apply_rbp(&self, s: &mut RbpState, mv: Move) -> Result<(), MoveError> {
        let dag = self.dag;
        let cfg = self.config;
        let r = cfg.capacity;
        match mv {
            Move::Save { v } => {
                if !s.red.contains(v) {
                    return violation(format!("save {v}: node has no red pebble"));
                }
                s.blue.insert(v);
                if cfg.no_deletion {
                    s.red.set(v, false);
                }
            }
            Move::Load { v } => {
                if !s.blue.contains(v) {
                    return violation(format!("load {v}: node has no blue pebble"));
                }
                if !s.red.contains(v) {
                    if s.red_count() >= r {
                        return Err(MoveError::CapacityExceeded(r));
                    }
                    s.red.insert(v);
                }
            }
            Move::Compute { v } | Move::Slide { v, .. } => {
                let from = match mv {
                    Move::Slide { u, .. } => Some(u),
                    _ => None,
                };
                if from.is_some() && !cfg.sliding {
                    return violation(format!("{mv}: sliding pebbles are disabled"));
                }
                if dag.is_source(v) {
                    return violation(format!("{mv}: source nodes cannot be computed"));
                }
                if s.computed.contains(v) {
                    return violation(format!("{mv}: node already computed (one-shot)"));
                }
                if s.red.contains(v) {
                    return violation(format!("{mv}: node already has a red pebble"));
                }
                if let Some(&u) = dag.in_neighbors(v).iter().find(|&&u| !s.red.contains(u)) {
                    return violation(format!("{mv}: input {u} has no red pebble"));
                }
                match from {
                    Some(u) => {
                        if !dag.has_edge(u, v) {
                            return violation(format!("{mv}: {u} is not an input of {v}"));
                        }
                        s.red.set(u, false);
                    }
                    None => {
                        if s.red_count() >= r {
                            return Err(MoveError::CapacityExceeded(r));
                        }
                    }
                }
                s.red.insert(v);
                s.computed.insert(v);
            }
            Move::Delete { v } => {
                if cfg.no_deletion {
                    return violation(format!("delete {v}: deletion is disabled"));
                }
                if !s.red.contains(v) {
                    return violation(format!("delete {v}: node has no red pebble"));
                }
                s.red.set(v, false);
            }
            Move::PartialCompute { .. } | Move::Clear { .. } => {
                return violation(format!("{mv}: not an RBP move"));
            }
        }
        Ok(())
    }

    fn apply_prbp(&self, s: &mut PrbpState, mv: Move) -> Result<(), MoveError> {
        let dag = self.dag;
        let cfg = self.config;
        let r = cfg.capacity;
        match mv {
            Move::Save { v } => {
                if s.pebbles[v] != Pebble::DarkRed {
                    return violation(format!("save {v}: node has no dark red pebble"));
                }
                s.pebbles[v] = Pebble::BlueLightRed;
            }
            Move::Load { v } => match s.pebbles[v] {
                Pebble::Blue => {
                    if s.red_count() >= r {
                        return Err(MoveError::CapacityExceeded(r));
                    }
                    s.pebbles[v] = Pebble::BlueLightRed;
                }
                // Redundant but harmless; it still costs one I/O.
                Pebble::BlueLightRed => {}
                _ => return violation(format!("load {v}: node has no blue pebble")),
            },
            Move::PartialCompute { u, v } => {
                let Some(e) = dag.edge_index(u, v) else {
                    return violation(format!("{mv}: edge not in the DAG"));
                };
                if s.marked.contains(e) {
                    return violation(format!("{mv}: edge already marked (one-shot)"));
                }
                if !s.all_in_edges_marked(dag, u) {
                    return violation(format!("{mv}: {u} is not fully computed"));
                }
                if !s.pebbles[u].is_red() {
                    return violation(format!("{mv}: {u} has no red pebble"));
                }
                match s.pebbles[v] {
                    Pebble::Blue => {
                        return violation(format!(
                            "{mv}: {v} has only a blue pebble; load it first"
                        ))
                    }
                    Pebble::None => {
                        if s.red_count() >= r {
                            return Err(MoveError::CapacityExceeded(r));
                        }
                    }
                    Pebble::BlueLightRed | Pebble::DarkRed => {}
                }
                s.pebbles[v] = Pebble::DarkRed;
                s.marked.insert(e);
            }
            Move::Delete { v } => match s.pebbles[v] {
                Pebble::BlueLightRed => s.pebbles[v] = Pebble::Blue,
                Pebble::DarkRed => {
                    if cfg.no_deletion {
                        return violation(format!(
                            "delete {v}: dark red pebbles may only leave through a save"
                        ));
                    }
                    if !s.all_out_edges_marked(dag, v) {
                        return violation(format!(
                            "delete {v}: dark red pebble with unmarked out-edges"
                        ));
                    }
                    // Only matters for sinks: a partial value may not be thrown away.
                    if !s.all_in_edges_marked(dag, v) {
                        return violation(format!(
                            "delete {v}: dark red pebble on a partially computed node"
                        ));
                    }
                    s.pebbles[v] = Pebble::None;
                }
                _ => return violation(format!("delete {v}: node has no red pebble")),
            },
            Move::Clear { v } => {
                if !cfg.allow_clear {
                    return violation(format!("clear {v}: the clear rule is disabled"));
                }
                if dag.is_source(v) || dag.is_sink(v) {
                    return violation(format!("clear {v}: sources and sinks cannot be cleared"));
                }
                if !s.all_in_edges_marked(dag, v) {
                    return violation(format!("clear {v}: in-edges not all marked"));
                }
                s.pebbles[v] = Pebble::None;
                for &u in dag.in_neighbors(v) {
                    s.marked.set(dag.edge_index(u, v).unwrap(), false);
                }
            }
            Move::Compute { .. } | Move::Slide { .. } => {
                return violation(format!("{mv}: not a PRBP move"));
            }
        }
        Ok(())
    }

    pub fn is_terminal(&self, state: &GameState) -> bool {
        let sinks_blue = self.dag.sinks().all(|v| state.is_blue(v));
        match state {
            GameState::Rbp(_) => sinks_blue,
            GameState::Prbp(s) => sinks_blue && s.marked.count_ones(..) == self.dag.edge_count(),
        }
    }

    fn step_compute_cost(&self, mv: Move) -> Rational64 {
        let eps = self.config.compute_cost;
        match mv {
            Move::Compute { .. } | Move::Slide { .. } => eps,
            Move::PartialCompute { v, .. } => match self.config.prbp_compute_cost_split {
                ComputeCostSplit::PerEdge => eps,
                ComputeCostSplit::PerEdgeScaledByIndegree => {
                    eps / Rational64::from_integer(self.dag.in_degree(v) as i64)
                }
            },
            _ => Rational64::from_integer(0),
        }
    }

    /// Replays `moves` from the initial state. Failures are reported, never thrown.
    pub fn validate(&self, moves: &[Move]) -> CostReport {
        let mut report = CostReport {
            io_cost: 0,
            compute_cost: Rational64::from_integer(0),
            peak_red: 0,
            valid: true,
            terminal: false,
            first_error: None,
        };
        if let Err(e) = self.config.validate() {
            report.valid = false;
            report.first_error = Some(MoveFailure {
                index: None,
                reason: e.to_string(),
            });
            return report;
        }
        let mut state = self.initial_state();
        for (i, &mv) in moves.iter().enumerate() {
            if let Err(e) = self.apply_in_place(&mut state, mv) {
                report.valid = false;
                report.first_error = Some(MoveFailure {
                    index: Some(i),
                    reason: format!("{mv}: {e}"),
                });
                return report;
            }
            if mv.is_io() {
                report.io_cost += 1;
            }
            report.compute_cost += self.step_compute_cost(mv);
            report.peak_red = report.peak_red.max(state.red_count());
        }
        report.terminal = self.is_terminal(&state);
        report
    }

    /// Replays `moves` and returns every intermediate state, starting with the initial one.
    pub fn trace(&self, moves: &[Move]) -> Result<Vec<GameState>, (usize, MoveError)> {
        let mut states = vec![self.initial_state()];
        for (i, &mv) in moves.iter().enumerate() {
            let next = self
                .apply_move(states.last().unwrap(), mv)
                .map_err(|e| (i, e))?;
            states.push(next);
        }
        Ok(states)
    }
}

/// Convenience wrapper around [`Game::validate`].
pub fn validate_schedule(dag: &ComputationDag, config: &GameConfig, moves: &[Move]) -> CostReport {
    Game::new(dag, config).validate(moves)
}
