//! Time-varying communication graphs, doubly stochastic weights, and
//! consensus diagnostics.

pub mod diagnostics;
pub mod graph;
pub mod schedule;
pub mod weights;

pub use diagnostics::{
    consensus_product_deviation, deviation_profile, verify_assumption1, Assumption1Report,
    ConsensusConstants,
};
pub use graph::Edge;
pub use schedule::{NetworkSchedule, ScheduleSpec};
pub use weights::{metropolis_weights, WeightMatrix};
