//! Loss streams, value and gradient oracles, and the regression data
//! generator.

pub mod bounds;
pub mod io;
pub mod oracle;
pub mod stream;

pub use bounds::lipschitz_bounds;
pub use io::{read_stream, write_stream};
pub use oracle::{Feasibility, TwoPointOracle};
pub use stream::{generate_regression_stream, Datum, GroundTruth, LossKind, LossStream};
