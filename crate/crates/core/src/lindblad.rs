//! Vectorized Lindbladian assembly.
//!
//! With row-major vectorization, `vec(A ρ B) = (A ⊗ Bᵀ) vec(ρ)`, so the master
//! equation
//!
//! ```text
//! dρ/dt = -i[H, ρ] + Σ_k ( L_k ρ L_k† - ½{L_k† L_k, ρ} )
//! ```
//!
//! becomes `d vec(ρ)/dt = ℒ vec(ρ)` with
//!
//! ```text
//! ℒ = -i(H ⊗ I - I ⊗ Hᵀ) + Σ_k [ L_k ⊗ L_k* - ½ (L_k†L_k ⊗ I) - ½ (I ⊗ (L_k†L_k)ᵀ) ]
//! ```
//!
//! Collapse operators carry their rates: `L_k = √γ_k · operator`.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::MatrixAoS;

/// Relative tolerance for the Hermiticity check on the Hamiltonian.
pub const HERMITIAN_TOL: f64 = 1e-12;

const I: Complex64 = Complex64::new(0.0, 1.0);
const HALF: Complex64 = Complex64::new(0.5, 0.0);

/// Hamiltonian plus collapse operators at dimension `d`.
#[derive(Clone, Debug)]
pub struct LindbladModel {
    dim: usize,
    hamiltonian: MatrixAoS,
    collapse_ops: Vec<MatrixAoS>,
}

impl LindbladModel {
    pub fn new(hamiltonian: MatrixAoS, collapse_ops: Vec<MatrixAoS>) -> Result<Self> {
        if !hamiltonian.is_square() {
            return Err(Error::NotSquare {
                rows: hamiltonian.rows(),
                cols: hamiltonian.cols(),
            });
        }
        let dim = hamiltonian.rows();
        if !hamiltonian.is_finite() {
            return Err(Error::NonFinite("hamiltonian"));
        }
        let scale = hamiltonian.max_abs();
        let herm = hamiltonian.hermiticity_error();
        let rel = if scale > 0.0 { herm / scale } else { herm };
        if rel > HERMITIAN_TOL {
            return Err(Error::NonHermitian(rel));
        }
        for op in &collapse_ops {
            if op.rows() != dim || op.cols() != dim {
                return Err(Error::shape(
                    format!("{dim}x{dim} collapse operator"),
                    op.shape_str(),
                ));
            }
            if !op.is_finite() {
                return Err(Error::NonFinite("collapse operator"));
            }
        }
        Ok(Self {
            dim,
            hamiltonian,
            collapse_ops,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn hamiltonian(&self) -> &MatrixAoS {
        &self.hamiltonian
    }

    pub fn collapse_ops(&self) -> &[MatrixAoS] {
        &self.collapse_ops
    }

    /// Same dissipators, different Hamiltonian.
    pub fn with_hamiltonian(&self, hamiltonian: MatrixAoS) -> Result<Self> {
        if hamiltonian.rows() != self.dim || hamiltonian.cols() != self.dim {
            return Err(Error::shape(
                format!("{0}x{0} hamiltonian", self.dim),
                hamiltonian.shape_str(),
            ));
        }
        Self::new(hamiltonian, self.collapse_ops.clone())
    }
}

/// The d²×d² superoperator acting on row-major `vec(ρ)`.
#[derive(Clone, Debug)]
pub struct Lindbladian {
    dim: usize,
    matrix: MatrixAoS,
}

impl Lindbladian {
    /// Wraps an arbitrary d²×d² matrix, e.g. a perturbed generator in tests.
    pub fn from_matrix(matrix: MatrixAoS) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::NotSquare {
                rows: matrix.rows(),
                cols: matrix.cols(),
            });
        }
        let dim = crate::linalg::exact_sqrt(matrix.rows())
            .ok_or(Error::NotPerfectSquare(matrix.rows()))?;
        Ok(Self { dim, matrix })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self) -> &MatrixAoS {
        &self.matrix
    }

    pub fn into_matrix(self) -> MatrixAoS {
        self.matrix
    }
}

pub fn build_lindbladian(model: &LindbladModel) -> Lindbladian {
    let d = model.dim;
    let id = MatrixAoS::identity(d);
    let h = &model.hamiltonian;

    let coherent = h
        .kron(&id)
        .sub(&id.kron(&h.transpose()))
        .expect("conformable");
    let mut l = coherent.scale(-I);

    for op in &model.collapse_ops {
        let ldl = op.dagger().matmul(op).expect("square");
        l.add_scaled_assign(Complex64::new(1.0, 0.0), &op.kron(&op.conj()))
            .expect("conformable");
        l.add_scaled_assign(-HALF, &ldl.kron(&id))
            .expect("conformable");
        l.add_scaled_assign(-HALF, &id.kron(&ldl.transpose()))
            .expect("conformable");
    }
    Lindbladian { dim: d, matrix: l }
}

/// Right-hand side of the master equation evaluated directly with matrix
/// products. Independent of the Kronecker assembly in [`build_lindbladian`].
pub fn apply_rhs(model: &LindbladModel, rho: &MatrixAoS) -> Result<MatrixAoS> {
    let d = model.dim;
    if rho.rows() != d || rho.cols() != d {
        return Err(Error::shape(
            format!("{d}x{d} density matrix"),
            rho.shape_str(),
        ));
    }
    let h = &model.hamiltonian;
    let commutator = h.matmul(rho)?.sub(&rho.matmul(h)?)?;
    let mut out = commutator.scale(-I);
    for op in &model.collapse_ops {
        let op_dag = op.dagger();
        let ldl = op_dag.matmul(op)?;
        let jump = op.matmul(rho)?.matmul(&op_dag)?;
        let anti = ldl.matmul(rho)?.add(&rho.matmul(&ldl)?)?;
        out.add_scaled_assign(Complex64::new(1.0, 0.0), &jump)?;
        out.add_scaled_assign(-HALF, &anti)?;
    }
    Ok(out)
}

/// Truncated lowering operator: `a|n⟩ = √n |n-1⟩`.
pub fn lowering_operator(d: usize) -> MatrixAoS {
    let mut a = MatrixAoS::zeros(d, d);
    for n in 1..d {
        a[(n - 1, n)] = Complex64::new((n as f64).sqrt(), 0.0);
    }
    a
}

/// Parameters of the three-level transmon preset.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TransmonParams {
    /// Energy relaxation time (s). `f64::INFINITY` disables decay.
    pub t1: f64,
    /// Pure dephasing time (s). `f64::INFINITY` disables dephasing.
    pub tphi: f64,
    /// Anharmonicity (rad/s).
    pub anharmonicity: f64,
    /// Drive amplitude (rad/s).
    pub drive_amp: f64,
}

impl Default for TransmonParams {
    // Placeholder values of typical magnitude; not fitted to any device.
    fn default() -> Self {
        use std::f64::consts::TAU;
        Self {
            t1: 50e-6,
            tphi: 70e-6,
            anharmonicity: -TAU * 200e6,
            drive_amp: TAU * 20e6,
        }
    }
}

pub const TRANSMON_DIM: usize = 3;

/// Three-level transmon: `H = Ω (a + a†)/2 + (α/2) a†a†aa`, decay `√(1/T1) a`,
/// dephasing `√(1/(2 Tφ)) a†a`.
pub fn transmon_model(p: TransmonParams) -> Result<LindbladModel> {
    let positive = |name: &str, v: f64| {
        if v > 0.0 {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!(
                "{name} must be positive, got {v}"
            )))
        }
    };
    positive("t1", p.t1)?;
    positive("tphi", p.tphi)?;
    if !p.anharmonicity.is_finite() || !p.drive_amp.is_finite() {
        return Err(Error::InvalidParameter(
            "anharmonicity and drive_amp must be finite".into(),
        ));
    }

    let a = lowering_operator(TRANSMON_DIM);
    let ad = a.dagger();
    let number = ad.matmul(&a)?;
    let x = a.add(&ad)?;
    let kerr = MatrixAoS::diag(
        &(0..TRANSMON_DIM)
            .map(|n| Complex64::new((n * n.saturating_sub(1)) as f64, 0.0))
            .collect::<Vec<_>>(),
    );
    let mut h = x.scale(Complex64::new(p.drive_amp / 2.0, 0.0));
    h.add_scaled_assign(Complex64::new(p.anharmonicity / 2.0, 0.0), &kerr)?;

    let mut ops = Vec::new();
    if p.t1.is_finite() {
        ops.push(a.scale(Complex64::new((1.0 / p.t1).sqrt(), 0.0)));
    }
    if p.tphi.is_finite() {
        ops.push(number.scale(Complex64::new((1.0 / (2.0 * p.tphi)).sqrt(), 0.0)));
    }
    LindbladModel::new(h, ops)
}

/// Drive quadrature `Ω (a + a†)/2` used as the control Hamiltonian of the
/// transmon preset.
pub fn transmon_control(drive_amp: f64) -> MatrixAoS {
    let a = lowering_operator(TRANSMON_DIM);
    a.add(&a.dagger())
        .expect("square")
        .scale(Complex64::new(drive_amp / 2.0, 0.0))
}
