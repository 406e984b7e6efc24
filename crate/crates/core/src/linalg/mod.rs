//! Dense complex linear algebra over small Hilbert spaces.

pub mod density;
pub mod eig;
pub mod matrix;
pub mod random;

pub use density::{
    partial_transpose, trace_distance, trace_norm, DensityMatrix, ProbDist, SchmidtVector,
};
pub use eig::{hermitian_eig, hermitian_eigvals, HermitianEig};
pub use matrix::{pauli, ComplexMatrix};
pub use random::{haar_unitary, seeded_rng};
