//! Regret evaluation, the offline comparator and experiment sweeps.

pub mod comparator;
pub mod record;
pub mod regret;
pub mod sweep;

pub use comparator::{solve_comparator, Comparator};
pub use record::{RoundDiagnostics, RunRecord};
pub use regret::{average_regret, disagreement_curve, RegretReport};
pub use sweep::{expand_cells, run_cell, sweep, Cell, CellResult, RealizedConstants};
