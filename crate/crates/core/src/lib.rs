//! Intelligent Coordinates (IC) search.
//!
//! IC modifies the exploration stage of simulated annealing so that each
//! coordinate of the search space is controlled by a learning agent. Each
//! agent keeps a decayed payoff table over its own moves and reshapes its
//! share of the exploration distribution with a Boltzmann policy over that
//! table. The agents learn from private utilities (team game, Wonderful Life,
//! Aristocrat, or an economic marginal-contribution clamp) built on top of the
//! world utility.
//!
//! The crate ships two problems: bin-packing with a soft objective, and a
//! music-format choice game played over ring and small-worlds networks.
//! [`harness`] runs seeded replicate experiments and writes CSV summaries.

pub mod binpack;
pub mod error;
pub mod formats;
pub mod harness;
pub mod learner;
pub mod model;
pub mod search;

pub use error::{Error, Result};
pub use learner::{MoveDistribution, PayoffTable};
pub use model::{
    factoredness_check, private_utility, signed_objective, world_utility, ClampKind, JointState, Problem, Sense,
    UtilityChoice,
};
pub use search::{Algorithm, AlgorithmConfig, SearchState, StepOutcome};
