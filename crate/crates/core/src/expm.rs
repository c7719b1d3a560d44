//! Matrix exponential by the [13/13] Padé approximant with scaling and
//! squaring (Higham 2005, fixed order 13).

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{solve, MatrixAoS, MatrixSoA};
use crate::lindblad::Lindbladian;

/// Largest one-norm for which r13 meets double-precision backward error.
pub const THETA_13: f64 = 5.371920351148152;

/// Upper bound on squarings; more signals an unreasonable ‖ℒ·Δt‖.
pub const MAX_SQUARINGS: u32 = 64;

/// Coefficients b_0..b_13 of the degree-13 Padé numerator.
const PADE13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];

/// Precomputed `P = exp(A·Δt)`, materialized in both layouts so hot loops
/// never pay for conversion.
#[derive(Clone, Debug)]
pub struct Propagator {
    step: f64,
    matrix_aos: MatrixAoS,
    matrix_soa: MatrixSoA,
}

impl Propagator {
    /// Wraps an already computed propagator matrix.
    pub fn from_matrix(matrix: MatrixAoS, step: f64) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::NotSquare {
                rows: matrix.rows(),
                cols: matrix.cols(),
            });
        }
        let matrix_soa = matrix.to_soa();
        Ok(Self {
            step,
            matrix_aos: matrix,
            matrix_soa,
        })
    }

    /// Time step Δt.
    pub fn step(&self) -> f64 {
        self.step
    }

    /// Side length of the (square) propagator matrix, d² for a state of dimension d.
    pub fn size(&self) -> usize {
        self.matrix_aos.rows()
    }

    pub fn matrix_aos(&self) -> &MatrixAoS {
        &self.matrix_aos
    }

    pub fn matrix_soa(&self) -> &MatrixSoA {
        &self.matrix_soa
    }
}

/// `exp(a·dt)` as a [`Propagator`].
pub fn expm(a: &MatrixAoS, dt: f64) -> Result<Propagator> {
    if !a.is_square() {
        return Err(Error::NotSquare {
            rows: a.rows(),
            cols: a.cols(),
        });
    }
    if !dt.is_finite() {
        return Err(Error::NonFinite("time step"));
    }
    if !a.is_finite() {
        return Err(Error::NonFinite("matrix exponential input"));
    }
    let m = a.scale(Complex64::new(dt, 0.0));
    Propagator::from_matrix(expm_matrix(&m)?, dt)
}

/// Propagator of a Lindbladian over one step `dt`.
pub fn propagator(l: &Lindbladian, dt: f64) -> Result<Propagator> {
    expm(l.matrix(), dt)
}

/// Number of squarings needed to bring `norm` under [`THETA_13`].
pub fn squarings_for(norm: f64) -> u32 {
    if norm <= THETA_13 {
        0
    } else {
        let s = (norm / THETA_13).log2().ceil();
        if s >= u32::MAX as f64 {
            u32::MAX
        } else {
            s as u32
        }
    }
}

/// `exp(m)` for a square matrix.
pub fn expm_matrix(m: &MatrixAoS) -> Result<MatrixAoS> {
    if !m.is_finite() {
        return Err(Error::NonFinite("matrix exponential input"));
    }
    let s = squarings_for(m.one_norm());
    if s > MAX_SQUARINGS {
        return Err(Error::TooManySquarings(s));
    }
    let scaled = if s == 0 {
        m.clone()
    } else {
        m.scale(Complex64::new((-(s as f64)).exp2(), 0.0))
    };
    let mut r = pade13_eval(&scaled)?;
    for _ in 0..s {
        r = r.matmul(&r)?;
    }
    Ok(r)
}

/// `r13(m) = q13(m)⁻¹ p13(m)`, evaluated with the even/odd split:
/// six matrix products and one solve.
pub fn pade13_eval(m: &MatrixAoS) -> Result<MatrixAoS> {
    if !m.is_square() {
        return Err(Error::NotSquare {
            rows: m.rows(),
            cols: m.cols(),
        });
    }
    let norm = m.one_norm();
    if norm > THETA_13 {
        return Err(Error::InvalidParameter(format!(
            "Padé [13/13] needs one-norm <= {THETA_13}, got {norm}"
        )));
    }
    let n = m.rows();
    let b = |k: usize| Complex64::new(PADE13[k], 0.0);
    let id = MatrixAoS::identity(n);

    let a2 = m.matmul(m)?;
    let a4 = a2.matmul(&a2)?;
    let a6 = a4.matmul(&a2)?;

    let combo = |c6: usize, c4: usize, c2: usize, c0: Option<usize>| -> Result<MatrixAoS> {
        let mut acc = a6.scale(b(c6));
        acc.add_scaled_assign(b(c4), &a4)?;
        acc.add_scaled_assign(b(c2), &a2)?;
        if let Some(c0) = c0 {
            acc.add_scaled_assign(b(c0), &id)?;
        }
        Ok(acc)
    };

    // U = m [A6 (b13 A6 + b11 A4 + b9 A2) + b7 A6 + b5 A4 + b3 A2 + b1 I]
    let mut u_inner = a6.matmul(&combo(13, 11, 9, None)?)?;
    u_inner.add_scaled_assign(Complex64::new(1.0, 0.0), &combo(7, 5, 3, Some(1))?)?;
    let u = m.matmul(&u_inner)?;

    // V = A6 (b12 A6 + b10 A4 + b8 A2) + b6 A6 + b4 A4 + b2 A2 + b0 I
    let mut v = a6.matmul(&combo(12, 10, 8, None)?)?;
    v.add_scaled_assign(Complex64::new(1.0, 0.0), &combo(6, 4, 2, Some(0))?)?;

    let numerator = v.add(&u)?;
    let denominator = v.sub(&u)?;
    solve(&denominator, &numerator)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{random_matrix, rng};

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn zero_gives_identity() {
        let p = expm(&MatrixAoS::zeros(4, 4), 0.3).unwrap();
        assert!(p.matrix_aos().rel_error(&MatrixAoS::identity(4)) <= 1e-15);
        assert_eq!(
            pade13_eval(&MatrixAoS::zeros(3, 3)).unwrap(),
            MatrixAoS::identity(3)
        );
    }

    #[test]
    fn diagonal_case() {
        let lambdas = [c(-3.0), c(0.5), Complex64::new(-0.2, 1.7), c(7.0)];
        let p = expm(&MatrixAoS::diag(&lambdas), 1.0).unwrap();
        let expected = MatrixAoS::diag(&lambdas.map(|z| z.exp()));
        assert!(p.matrix_aos().rel_error(&expected) < 1e-13);

        let pade = pade13_eval(&MatrixAoS::diag(&[c(0.1); 3])).unwrap();
        for i in 0..3 {
            assert!((pade[(i, i)] - c(0.1f64.exp())).norm() < 1e-15);
        }
    }

    #[test]
    fn nilpotent_case() {
        let n = MatrixAoS::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]);
        let p = expm(&n, 1.0).unwrap();
        let expected = MatrixAoS::from_real_rows(&[&[1.0, 1.0], &[0.0, 1.0]]);
        assert!(p.matrix_aos().rel_error(&expected) <= 1e-15);
    }

    #[test]
    fn both_layouts_hold_the_same_values() {
        let mut r = rng(41);
        let p = expm(&random_matrix(&mut r, 9, 9), 0.2).unwrap();
        assert_eq!(p.matrix_soa().to_aos(), *p.matrix_aos());
        assert_eq!(p.size(), 9);
        assert_eq!(p.step(), 0.2);
    }

    #[test]
    fn squaring_count() {
        assert_eq!(squarings_for(0.0), 0);
        assert_eq!(squarings_for(THETA_13), 0);
        assert_eq!(squarings_for(THETA_13 * 1.5), 1);
        assert_eq!(squarings_for(THETA_13 * 4.0), 2);
        assert_eq!(squarings_for(THETA_13 * 4.01), 3);
    }

    #[test]
    fn error_paths() {
        assert!(matches!(
            expm(&MatrixAoS::zeros(2, 3), 1.0),
            Err(Error::NotSquare { .. })
        ));
        assert!(matches!(
            expm(&MatrixAoS::identity(2), f64::NAN),
            Err(Error::NonFinite(_))
        ));
        let mut bad = MatrixAoS::identity(2);
        bad[(0, 1)] = c(f64::INFINITY);
        assert!(matches!(expm(&bad, 1.0), Err(Error::NonFinite(_))));
        assert!(matches!(
            expm(&MatrixAoS::identity(2), 1e30),
            Err(Error::TooManySquarings(_))
        ));
        assert!(matches!(
            pade13_eval(&MatrixAoS::identity(2).scale(c(6.0))),
            Err(Error::InvalidParameter(_))
        ));
    }

    #[test]
    fn large_norm_uses_squaring() {
        // exp(diag(-40, 20)) needs several squarings.
        let p = expm(&MatrixAoS::diag(&[c(-40.0), c(20.0)]), 1.0).unwrap();
        let expected = MatrixAoS::diag(&[c((-40.0f64).exp()), c(20.0f64.exp())]);
        assert!(p.matrix_aos().rel_error(&expected) < 1e-13);
    }
}
