use std::collections::hash_map::Entry;
use std::collections::{HashMap, VecDeque};

use super::{SolveError, SolveResult, SolveStatus};
use crate::dag::ComputationDag;
use crate::game::{Game, GameConfig, GameKind, GameState, Move, Schedule};

/// Exhaustive optimum by uniform-cost search over every move the engine
/// accepts.
///
/// No pruning, no heuristic and no move filtering, so it shares no
/// reasoning with [`super::solve_opt`]. Only usable on a handful of nodes.
/// Returns `BudgetExhausted` if no schedule of cost at most `cost_cap`
/// exists but a costlier one might.
pub fn brute_force_opt(
    dag: &ComputationDag,
    config: &GameConfig,
    cost_cap: usize,
) -> Result<SolveResult, SolveError> {
    config.validate()?;
    let game = Game::new(dag, config);
    let moves = all_moves(dag, config.kind);
    // State -> (distance, parent index, move), indexed by discovery order.
    let mut states: Vec<GameState> = vec![game.initial_state()];
    let mut info: Vec<(usize, usize, Option<Move>)> = vec![(0, usize::MAX, None)];
    let mut index: HashMap<GameState, usize> = HashMap::default();
    index.insert(states[0].clone(), 0);
    let mut done = vec![false];
    // 0-1 BFS: free moves go to the front, I/O moves to the back.
    let mut queue = VecDeque::from([0usize]);
    let mut expanded = 0;
    while let Some(at) = queue.pop_front() {
        if done[at] {
            continue;
        }
        done[at] = true;
        let dist = info[at].0;
        if dist > cost_cap {
            return Ok(SolveResult::without_solution(
                SolveStatus::BudgetExhausted,
                expanded,
            ));
        }
        if game.is_terminal(&states[at]) {
            let mut path = Vec::new();
            let mut i = at;
            while let (_, parent, Some(mv)) = info[i] {
                path.push(mv);
                i = parent;
            }
            path.reverse();
            return Ok(SolveResult {
                status: SolveStatus::Optimal,
                opt_cost: Some(dist),
                witness: Some(Schedule::new(config.clone(), path)),
                states_expanded: expanded,
            });
        }
        expanded += 1;
        // Failed moves leave the scratch state untouched, so it only needs
        // a fresh copy after a success.
        let mut scratch = states[at].clone();
        for &mv in &moves {
            if game.apply_in_place(&mut scratch, mv).is_err() {
                continue;
            }
            let next = std::mem::replace(&mut scratch, states[at].clone());
            let cost = usize::from(mv.is_io());
            let d = dist + cost;
            let j = match index.entry(next) {
                Entry::Occupied(e) => {
                    let j = *e.get();
                    if done[j] || info[j].0 <= d {
                        continue;
                    }
                    info[j] = (d, at, Some(mv));
                    j
                }
                Entry::Vacant(e) => {
                    let j = states.len();
                    states.push(e.key().clone());
                    e.insert(j);
                    info.push((d, at, Some(mv)));
                    done.push(false);
                    j
                }
            };
            if cost == 0 {
                queue.push_front(j);
            } else {
                queue.push_back(j);
            }
        }
    }
    Ok(SolveResult::without_solution(
        SolveStatus::Infeasible,
        expanded,
    ))
}

fn all_moves(dag: &ComputationDag, kind: GameKind) -> Vec<Move> {
    let mut moves = Vec::new();
    for v in 0..dag.node_count() {
        moves.extend([
            Move::Save { v },
            Move::Load { v },
            Move::Delete { v },
            Move::Clear { v },
        ]);
        if kind == GameKind::Rbp {
            moves.push(Move::Compute { v });
        }
    }
    for &(u, v) in dag.edges() {
        moves.push(match kind {
            GameKind::Rbp => Move::Slide { u, v },
            GameKind::Prbp => Move::PartialCompute { u, v },
        });
    }
    moves
}
