//! Mirror maps, feasible sets, regularizers and the composite prox step.

pub mod mirror;
pub mod numeric;
pub mod prox;
pub mod regularizer;
pub mod set;

pub use mirror::{MirrorKind, MirrorMap};
pub use numeric::prox_numeric;
pub use prox::{prox, prox_approx, prox_exact, ApproxProx, CompositeStep, ErrorModel};
pub use regularizer::Regularizer;
pub use set::{ConstraintSet, SetKind};
