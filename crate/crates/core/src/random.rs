//! Seeded generators for test inputs, benchmark operands, and random models.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::linalg::{MatrixAoS, VectorAoS};
use crate::lindblad::LindbladModel;

pub type SeededRng = ChaCha8Rng;

pub fn rng(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Both components uniform in [-1, 1].
pub fn random_complex<R: Rng + ?Sized>(r: &mut R) -> Complex64 {
    Complex64::new(r.random_range(-1.0..=1.0), r.random_range(-1.0..=1.0))
}

pub fn random_matrix<R: Rng + ?Sized>(r: &mut R, rows: usize, cols: usize) -> MatrixAoS {
    MatrixAoS::from_fn(rows, cols, |_, _| random_complex(r))
}

pub fn random_vector<R: Rng + ?Sized>(r: &mut R, len: usize) -> VectorAoS {
    VectorAoS::from_fn(len, |_| random_complex(r))
}

/// `(A + A†) / 2` for a random `A`; exactly Hermitian.
pub fn random_hermitian<R: Rng + ?Sized>(r: &mut R, n: usize) -> MatrixAoS {
    let a = random_matrix(r, n, n);
    MatrixAoS::from_fn(n, n, |i, j| {
        if i == j {
            Complex64::new(a[(i, i)].re, 0.0)
        } else if i < j {
            (a[(i, j)] + a[(j, i)].conj()) * 0.5
        } else {
            (a[(j, i)] + a[(i, j)].conj()).conj() * 0.5
        }
    })
}

/// Random density matrix `A A† / Tr(A A†)`: Hermitian, positive, unit trace.
pub fn random_density<R: Rng + ?Sized>(r: &mut R, d: usize) -> MatrixAoS {
    let a = random_matrix(r, d, d);
    let aa = a.matmul(&a.dagger()).expect("square");
    let tr = aa.trace().re;
    let mut rho = aa.scale(Complex64::new(1.0 / tr, 0.0));
    // Clean rounding so the result is exactly Hermitian with real diagonal.
    for i in 0..d {
        rho[(i, i)].im = 0.0;
        for j in i + 1..d {
            rho[(j, i)] = rho[(i, j)].conj();
        }
    }
    rho
}

/// Random Hermitian Hamiltonian plus `n_ops` random collapse operators.
pub fn random_model<R: Rng + ?Sized>(r: &mut R, d: usize, n_ops: usize) -> LindbladModel {
    let h = random_hermitian(r, d);
    let ops = (0..n_ops)
        .map(|_| random_matrix(r, d, d).scale(Complex64::new(0.5, 0.0)))
        .collect();
    LindbladModel::new(h, ops).expect("random model is valid by construction")
}
