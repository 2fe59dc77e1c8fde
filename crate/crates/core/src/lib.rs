//! Red-blue pebbling with and without partial computations.
//!
//! The crate models computations as DAGs ([`dag`]), replays pebbling
//! schedules under either game ([`game`]), builds the standard gadget
//! families ([`generators`]) with hand-made strategies ([`strategies`]),
//! computes exact optima on small instances ([`solver`]) and evaluates
//! partition-based lower bounds ([`partitions`]). [`reductions`] holds the
//! graph-theoretic side of the hardness construction.

pub mod dag;
pub mod game;
pub mod generators;
pub mod partitions;
pub mod reductions;
pub mod solver;
pub mod strategies;

pub use dag::{ComputationDag, DagError, DagFile, DagStats, NodeId};
pub use game::{validate_schedule, CostReport, GameConfig, GameKind, Move, Schedule};
