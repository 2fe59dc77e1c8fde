//! Exact optimal I/O cost on small DAGs.
//!
//! [`solve_opt`] runs an A* search over game states; [`brute_force_opt`] is
//! an independent, much slower oracle used to cross-check it.

mod brute;
mod search;

use std::time::Duration;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dag::ComputationDag;
use crate::game::{ConfigError, GameConfig, GameKind, Schedule};

pub use brute::brute_force_opt;
pub use search::solve_opt;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolveBudget {
    /// Maximum number of distinct states kept by the search.
    pub max_states: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_seconds: Option<f64>,
    /// A known achievable cost; states whose lower bound exceeds it are dropped.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub upper_bound_seed: Option<usize>,
}

impl Default for SolveBudget {
    fn default() -> Self {
        Self {
            max_states: 2_000_000,
            max_seconds: None,
            upper_bound_seed: None,
        }
    }
}

impl SolveBudget {
    pub fn states(max_states: usize) -> Self {
        Self {
            max_states,
            ..Self::default()
        }
    }

    pub(crate) fn deadline(&self) -> Option<Duration> {
        self.max_seconds.map(Duration::from_secs_f64)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolveStatus {
    Optimal,
    BudgetExhausted,
    Infeasible,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolveResult {
    pub status: SolveStatus,
    pub opt_cost: Option<usize>,
    pub witness: Option<Schedule>,
    pub states_expanded: usize,
}

impl SolveResult {
    pub(crate) fn without_solution(status: SolveStatus, states_expanded: usize) -> Self {
        Self {
            status,
            opt_cost: None,
            witness: None,
            states_expanded,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SolveError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("optimal solving with the clear rule is not supported")]
    ClearUnsupported,
    #[error("r = {r} is below Δ_in + 1 = {need}; no RBP pebbling exists")]
    InfeasibleRbp { r: usize, need: usize },
}

/// Optima of both games on one DAG.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModelComparison {
    pub r: usize,
    pub rbp: SolveResult,
    pub prbp: SolveResult,
    pub opt_rbp: Option<usize>,
    pub opt_prbp: Option<usize>,
    /// Set only when both searches finished.
    pub strict: Option<bool>,
}

/// Solves both games at capacity `r`.
pub fn compare_models(
    dag: &ComputationDag,
    r: usize,
    budget: &SolveBudget,
) -> Result<ModelComparison, SolveError> {
    let rbp_cfg = GameConfig::rbp(r);
    if !rbp_cfg.capacity_admits(dag) {
        return Err(SolveError::InfeasibleRbp {
            r,
            need: dag.max_in_degree() + 1,
        });
    }
    let rbp = solve_opt(dag, &rbp_cfg, budget)?;
    let prbp = solve_opt(dag, &GameConfig::new(GameKind::Prbp, r), budget)?;
    let (opt_rbp, opt_prbp) = (rbp.opt_cost, prbp.opt_cost);
    let strict = match (opt_rbp, opt_prbp) {
        (Some(a), Some(b)) => Some(b < a),
        _ => None,
    };
    Ok(ModelComparison {
        r,
        rbp,
        prbp,
        opt_rbp,
        opt_prbp,
        strict,
    })
}
