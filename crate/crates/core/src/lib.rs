pub mod algorithms;
pub mod error;
pub mod experiment;
pub mod geometry;
pub mod harness;
pub mod linalg;
pub mod network;
pub mod problems;
pub mod rng;

pub use error::{Error, Result};
