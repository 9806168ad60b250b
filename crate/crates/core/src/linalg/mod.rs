//! Small dense linear algebra over real and complex scalars.
//!
//! Matrices here are at most a few hundred rows; everything is row-major and
//! allocation-per-call.

mod eigen;
mod lu;
mod matrix;

pub use eigen::{eigenpairs, EigenPair};
pub use lu::{solve, ComplexLu};
pub use matrix::{CMatrix, Matrix, RMatrix};
