//! Rules, states and schedule replay for RBP and PRBP.

mod config;
mod engine;
mod moves;
mod state;
mod translate;

pub use config::{parse_ratio, ComputeCostSplit, ConfigError, GameConfig, GameKind};
pub use engine::{validate_schedule, CostReport, Game, MoveError, MoveFailure};
pub use moves::{Move, Schedule, ScheduleFile};
pub use state::{GameState, Pebble, PrbpState, RbpState};
pub use translate::{translate_rbp_to_prbp, TranslateError};
