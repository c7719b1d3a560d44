//! Physical-invariant checks on density matrices and generators.

#[cfg(feature = "parallel")]
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{vec, MatrixAoS};
use crate::lindblad::Lindbladian;
use crate::propagate::step_aos;
use crate::random::{random_density, rng};

/// Tolerance for state checks.
pub const DEFAULT_TOL: f64 = 1e-8;
/// Tolerance for the generator trace-annihilation check.
pub const GENERATOR_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ValidationReport {
    /// `|Tr ρ - 1|`
    pub trace_error: f64,
    /// `max |ρ_ij - conj(ρ_ji)|`
    pub hermiticity_error: f64,
    /// Smallest real part on the diagonal.
    pub min_diagonal: f64,
    pub tol: f64,
    pub passed: bool,
}

/// Trace, Hermiticity, and diagonal positivity of `rho`. Positivity is the
/// literal diagonal check, not positive semidefiniteness.
pub fn check_state(rho: &MatrixAoS, tol: f64) -> Result<ValidationReport> {
    if !rho.is_square() {
        return Err(Error::NotSquare {
            rows: rho.rows(),
            cols: rho.cols(),
        });
    }
    let d = rho.rows();
    let trace_error = (rho.trace() - 1.0).norm();
    let hermiticity_error = rho.hermiticity_error();
    let min_diagonal = (0..d).map(|i| rho[(i, i)].re).fold(f64::INFINITY, f64::min);
    // NaN anywhere makes every comparison false, so the report fails.
    let passed = trace_error <= tol && hermiticity_error <= tol && min_diagonal >= -tol;
    Ok(ValidationReport {
        trace_error,
        hermiticity_error,
        min_diagonal,
        tol,
        passed,
    })
}

/// `|Tr unvec(ℒ vec(ρ))|` for one random density matrix.
fn generator_trace_defect(l: &Lindbladian, seed: u64) -> f64 {
    let d = l.dim();
    let rho = random_density(&mut rng(seed), d);
    let image = step_aos(l.matrix(), &vec(&rho).expect("square")).expect("conformable");
    let s = image.as_slice();
    (0..d)
        .map(|i| s[i * d + i])
        .sum::<num_complex::Complex64>()
        .norm()
}

/// Checks that `ℒ` annihilates the trace on `trials` random density
/// matrices. Trial `k` uses seed `seed + k`, so the outcome does not depend
/// on how trials are scheduled.
pub fn check_generator(l: &Lindbladian, trials: usize, tol: f64, seed: u64) -> bool {
    #[cfg(feature = "parallel")]
    {
        (0..trials as u64)
            .into_par_iter()
            .all(|k| generator_trace_defect(l, seed.wrapping_add(k)) <= tol)
    }
    #[cfg(not(feature = "parallel"))]
    {
        check_generator_sequential(l, trials, tol, seed)
    }
}

pub fn check_generator_sequential(l: &Lindbladian, trials: usize, tol: f64, seed: u64) -> bool {
    (0..trials as u64).all(|k| generator_trace_defect(l, seed.wrapping_add(k)) <= tol)
}
