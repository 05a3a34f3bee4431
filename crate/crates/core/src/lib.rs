//! Active learning of Mealy machines with timers.

pub mod constraints;
pub mod dbm;
pub mod dot;
pub mod equiv;
pub mod error;
pub mod gmmt;
pub mod io;
pub mod learner;
pub mod mmt;
pub mod models;
pub mod obs_tree;
pub mod random;
pub mod scalar;
pub mod symbolic;
pub mod teacher;
pub mod timed;
pub mod zones;

pub use error::{LearnError, ModelError, TreeError};
pub use mmt::{Action, InputId, Mmt, MmtBuilder, OutputId, Run, StateId, Step, TimerId, Update};
pub use scalar::Scalar;
pub use symbolic::{SymbolicAction, SymbolicWord};

/// Exact rational time.
pub type Time = num_rational::Ratio<i64>;
/// A configuration with rational timer values.
pub type RationalConfiguration = timed::Configuration<Time>;
/// A timed run with rational delays.
pub type RationalTimedRun = timed::TimedRun<Time>;
/// A timed word over actions with rational delays.
pub type RationalTimedWord = timed::TimedWord<Time, Action>;
/// A difference bound matrix over integer bounds, as used by zones.
pub type IntDbm = dbm::Dbm<i64>;
