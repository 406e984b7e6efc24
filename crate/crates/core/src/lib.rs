//! Numerical toolkit for catalytic entanglement transformations.

pub mod capacity;
pub mod catalysim;
pub mod channels;
pub mod cli;
pub mod convertibility;
pub mod error;
pub mod linalg;
pub mod measures;
pub mod nodedist;
pub mod noniid;

pub use error::{Error, Result};
