//! Rewriting an RBP pebbling as a PRBP pebbling of the same I/O cost.

use thiserror::Error;

use super::config::{GameConfig, GameKind};
use super::engine::{validate_schedule, MoveFailure};
use super::moves::{Move, Schedule};
use super::state::{Pebble, PrbpState};
use crate::dag::{ComputationDag, NodeId};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TranslateError {
    #[error("input is not an RBP schedule")]
    NotRbp,
    #[error("sliding moves have no PRBP counterpart")]
    SlidingUnsupported,
    #[error("input schedule is invalid: {}", .0.reason)]
    InvalidSource(MoveFailure),
    #[error("translated schedule was rejected: {}", .0.reason)]
    OutputRejected(MoveFailure),
}

/// Translates a valid one-shot RBP schedule move by move.
///
/// Each compute becomes one partial compute per in-edge, in ascending order
/// of the in-neighbor. Deleting a computed but unsaved value is postponed
/// until all of its out-edges are marked. A save of a node that is already
/// blue has no PRBP equivalent and is emitted as a redundant load, so the
/// I/O count is preserved exactly.
pub fn translate_rbp_to_prbp(
    dag: &ComputationDag,
    schedule: &Schedule,
) -> Result<Schedule, TranslateError> {
    let src = &schedule.config;
    if src.kind != GameKind::Rbp {
        return Err(TranslateError::NotRbp);
    }
    if src.sliding {
        return Err(TranslateError::SlidingUnsupported);
    }
    let report = validate_schedule(dag, src, &schedule.moves);
    if let Some(f) = report.first_error {
        return Err(TranslateError::InvalidSource(f));
    }

    let config = GameConfig {
        kind: GameKind::Prbp,
        sliding: false,
        ..src.clone()
    };
    // Shadow the PRBP pebbles to know which rule each RBP move maps to.
    let mut st = PrbpState::initial(dag);
    let mut pending: Vec<NodeId> = Vec::new();
    let mut out = Vec::with_capacity(schedule.moves.len() * 2);

    for &mv in &schedule.moves {
        match mv {
            Move::Load { v } => {
                if st.pebbles[v] == Pebble::Blue {
                    st.pebbles[v] = Pebble::BlueLightRed;
                }
                out.push(mv);
            }
            Move::Save { v } => {
                if st.pebbles[v] == Pebble::DarkRed {
                    st.pebbles[v] = Pebble::BlueLightRed;
                    out.push(mv);
                } else {
                    out.push(Move::Load { v });
                }
                if config.no_deletion {
                    st.pebbles[v] = Pebble::Blue;
                    out.push(Move::Delete { v });
                }
            }
            Move::Compute { v } => {
                for &u in dag.in_neighbors(v) {
                    st.marked.insert(dag.edge_index(u, v).unwrap());
                    out.push(Move::PartialCompute { u, v });
                }
                st.pebbles[v] = Pebble::DarkRed;
                pending.retain(|&w| {
                    if st.all_out_edges_marked(dag, w) {
                        st.pebbles[w] = Pebble::None;
                        out.push(Move::Delete { v: w });
                        false
                    } else {
                        true
                    }
                });
            }
            Move::Delete { v } => match st.pebbles[v] {
                Pebble::BlueLightRed => {
                    st.pebbles[v] = Pebble::Blue;
                    out.push(mv);
                }
                Pebble::DarkRed if st.all_out_edges_marked(dag, v) => {
                    st.pebbles[v] = Pebble::None;
                    out.push(mv);
                }
                _ => pending.push(v),
            },
            Move::Slide { .. } => return Err(TranslateError::SlidingUnsupported),
            Move::PartialCompute { .. } | Move::Clear { .. } => return Err(TranslateError::NotRbp),
        }
    }

    let translated = Schedule::new(config, out);
    let check = validate_schedule(dag, &translated.config, &translated.moves);
    if let Some(f) = check.first_error {
        return Err(TranslateError::OutputRejected(f));
    }
    Ok(translated)
}
