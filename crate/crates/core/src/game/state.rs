use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize};

use crate::dag::{ComputationDag, NodeId};

/// The four pebble configurations a PRBP node can be in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub enum Pebble {
    #[default]
    None,
    Blue,
    /// Up-to-date in both memories.
    BlueLightRed,
    /// Updated in fast memory only.
    DarkRed,
}

impl Pebble {
    pub fn is_red(self) -> bool {
        matches!(self, Pebble::BlueLightRed | Pebble::DarkRed)
    }

    pub fn is_blue(self) -> bool {
        matches!(self, Pebble::Blue | Pebble::BlueLightRed)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RbpState {
    pub red: FixedBitSet,
    pub blue: FixedBitSet,
    /// One-shot bookkeeping: nodes computed at least once.
    pub computed: FixedBitSet,
}

impl RbpState {
    pub fn initial(dag: &ComputationDag) -> Self {
        let n = dag.node_count();
        let mut blue = FixedBitSet::with_capacity(n);
        blue.extend(dag.sources());
        Self {
            red: FixedBitSet::with_capacity(n),
            blue,
            computed: FixedBitSet::with_capacity(n),
        }
    }

    pub fn red_count(&self) -> usize {
        self.red.count_ones(..)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PrbpState {
    pub pebbles: Vec<Pebble>,
    /// Indexed by the DAG's edge index.
    pub marked: FixedBitSet,
}

impl PrbpState {
    pub fn initial(dag: &ComputationDag) -> Self {
        let mut pebbles = vec![Pebble::None; dag.node_count()];
        for s in dag.sources() {
            pebbles[s] = Pebble::Blue;
        }
        Self {
            pebbles,
            marked: FixedBitSet::with_capacity(dag.edge_count()),
        }
    }

    pub fn red_count(&self) -> usize {
        self.pebbles.iter().filter(|p| p.is_red()).count()
    }

    pub fn all_in_edges_marked(&self, dag: &ComputationDag, v: NodeId) -> bool {
        dag.in_neighbors(v)
            .iter()
            .all(|&u| self.marked.contains(dag.edge_index(u, v).unwrap()))
    }

    pub fn all_out_edges_marked(&self, dag: &ComputationDag, v: NodeId) -> bool {
        dag.out_neighbors(v)
            .iter()
            .all(|&w| self.marked.contains(dag.edge_index(v, w).unwrap()))
    }
}

/// A full game configuration of either game.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum GameState {
    Rbp(RbpState),
    Prbp(PrbpState),
}

impl GameState {
    pub fn red_count(&self) -> usize {
        match self {
            GameState::Rbp(s) => s.red_count(),
            GameState::Prbp(s) => s.red_count(),
        }
    }

    pub fn is_red(&self, v: NodeId) -> bool {
        match self {
            GameState::Rbp(s) => s.red.contains(v),
            GameState::Prbp(s) => s.pebbles[v].is_red(),
        }
    }

    pub fn is_blue(&self, v: NodeId) -> bool {
        match self {
            GameState::Rbp(s) => s.blue.contains(v),
            GameState::Prbp(s) => s.pebbles[v].is_blue(),
        }
    }

    pub fn as_rbp(&self) -> Option<&RbpState> {
        match self {
            GameState::Rbp(s) => Some(s),
            GameState::Prbp(_) => None,
        }
    }

    pub fn as_prbp(&self) -> Option<&PrbpState> {
        match self {
            GameState::Prbp(s) => Some(s),
            GameState::Rbp(_) => None,
        }
    }
}
