//! Lindblad master-equation propagation at small, fixed system sizes.
//!
//! The vectorized Lindbladian is assembled by Kronecker products, turned
//! into a propagator `P = exp(ℒΔt)` once, and applied every step as a dense
//! complex matvec in one of three kernels: interleaved (AoS), split-plane
//! (SoA), and hand-written AVX2 on interleaved data. A Roofline model and a
//! timing harness place the kernel on the cache hierarchy.
//!
//! Features: `parallel` (rayon batch trajectories and generator checks),
//! `simd` (the AVX2 kernel), `fast-math` (reassociated kernel reductions).

pub mod bench;
pub mod error;
pub mod expm;
mod kv;
pub mod linalg;
pub mod lindblad;
pub mod model_file;
pub mod propagate;
pub mod random;
pub mod roofline;
pub mod validate;

pub use error::{Error, Result};
pub use expm::{expm, Propagator};
pub use linalg::{unvec, vec, Complex64, MatrixAoS, MatrixSoA, VectorAoS, VectorSoA};
pub use lindblad::{
    apply_rhs, build_lindbladian, transmon_model, LindbladModel, Lindbladian, TransmonParams,
};
pub use propagate::{evolve, grape_chain, ChainTimings, KernelVariant};
pub use validate::{check_generator, check_state, ValidationReport};

/// Name of the optimization profile this crate was built under
/// (`baseline`, `opt`, `native`, `native-fast`, `debug`, ...).
pub fn build_profile() -> &'static str {
    env!("LINDBLAD_BUILD_PROFILE")
}

/// Whether kernel reductions are reassociated in this build.
pub const FAST_MATH: bool = cfg!(feature = "fast-math");
