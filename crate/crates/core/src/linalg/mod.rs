//! Dense complex matrices and vectors in interleaved (AoS) and split-plane
//! (SoA) layouts. All buffers are row-major and 64-byte aligned; AoS is the
//! construction layout and SoA is produced by explicit conversion.

pub mod aligned;
pub mod interchange;
mod matrix;
mod solve;

pub use aligned::{AlignedVec, ALIGN};
pub(crate) use matrix::exact_sqrt;
pub use matrix::{unvec, vec, MatrixAoS, MatrixSoA, VectorAoS, VectorSoA};
pub use solve::solve;

pub use num_complex::Complex64;

/// The element type of every matrix and vector.
pub type ComplexScalar = Complex64;
