use std::fmt;

use serde::{Deserialize, Serialize};

use super::config::GameConfig;
use crate::dag::NodeId;

/// A single rule application.
///
/// Serialized as a flat record tagged by `op`, e.g. `{"op":"pcompute","u":1,"v":4}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "lowercase")]
pub enum Move {
    Save {
        v: NodeId,
    },
    Load {
        v: NodeId,
    },
    /// RBP compute of `v` from all its inputs.
    Compute {
        v: NodeId,
    },
    /// RBP sliding compute: the red pebble moves from input `u` to `v`.
    Slide {
        u: NodeId,
        v: NodeId,
    },
    /// PRBP partial compute along edge `(u, v)`.
    #[serde(rename = "pcompute")]
    PartialCompute {
        u: NodeId,
        v: NodeId,
    },
    Delete {
        v: NodeId,
    },
    /// PRBP re-computation rule: drop all pebbles of `v` and unmark its in-edges.
    Clear {
        v: NodeId,
    },
}

impl Move {
    pub fn is_io(&self) -> bool {
        matches!(self, Move::Save { .. } | Move::Load { .. })
    }

    pub fn is_compute(&self) -> bool {
        matches!(
            self,
            Move::Compute { .. } | Move::Slide { .. } | Move::PartialCompute { .. }
        )
    }

    /// The node whose pebbles the move changes.
    pub fn target(&self) -> NodeId {
        match *self {
            Move::Save { v }
            | Move::Load { v }
            | Move::Compute { v }
            | Move::Slide { v, .. }
            | Move::PartialCompute { v, .. }
            | Move::Delete { v }
            | Move::Clear { v } => v,
        }
    }
}

impl fmt::Display for Move {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Move::Save { v } => write!(f, "save {v}"),
            Move::Load { v } => write!(f, "load {v}"),
            Move::Compute { v } => write!(f, "compute {v}"),
            Move::Slide { u, v } => write!(f, "slide {u}->{v}"),
            Move::PartialCompute { u, v } => write!(f, "pcompute ({u},{v})"),
            Move::Delete { v } => write!(f, "delete {v}"),
            Move::Clear { v } => write!(f, "clear {v}"),
        }
    }
}

/// A move sequence together with the rules it is meant to be replayed under.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Schedule {
    pub config: GameConfig,
    pub moves: Vec<Move>,
}

impl Schedule {
    pub fn new(config: GameConfig, moves: Vec<Move>) -> Self {
        Self { config, moves }
    }

    /// Number of save and load moves.
    pub fn io_count(&self) -> usize {
        self.moves.iter().filter(|m| m.is_io()).count()
    }
}

/// Accepts either a bare move array or an object carrying a `moves` field.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum ScheduleFile {
    Bare(Vec<Move>),
    Wrapped {
        moves: Vec<Move>,
        #[serde(default)]
        config: Option<GameConfig>,
    },
}

impl ScheduleFile {
    pub fn into_parts(self) -> (Vec<Move>, Option<GameConfig>) {
        match self {
            ScheduleFile::Bare(moves) => (moves, None),
            ScheduleFile::Wrapped { moves, config } => (moves, config),
        }
    }
}
