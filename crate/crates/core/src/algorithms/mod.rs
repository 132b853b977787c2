//! The distributed round loops and their theoretical bounds.

pub mod bounds;
pub mod config;
pub mod run;

pub use bounds::{theorem_bounds, BoundConstants, Feedback};
pub use config::{Algorithm, AlgorithmConfig, BanditSchedule};
pub use run::{run_banodcmd, run_odcmd, run_subgradient_baseline};
