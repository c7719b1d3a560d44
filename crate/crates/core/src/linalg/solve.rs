use num_complex::Complex64;

use super::matrix::MatrixAoS;
use crate::error::{Error, Result};

/// Solves `a * x = b` for `x` by Gaussian elimination with partial pivoting.
pub fn solve(a: &MatrixAoS, b: &MatrixAoS) -> Result<MatrixAoS> {
    let n = a.rows();
    if !a.is_square() {
        return Err(Error::NotSquare {
            rows: a.rows(),
            cols: a.cols(),
        });
    }
    if b.rows() != n {
        return Err(Error::shape(format!("{n} rows"), b.shape_str()));
    }
    let m = b.cols();
    let mut lu = a.clone();
    let mut x = b.clone();

    for col in 0..n {
        let (pivot_row, pivot_mag) =
            (col..n)
                .map(|r| (r, lu[(r, col)].norm()))
                .fold(
                    (col, -1.0),
                    |best, cur| if cur.1 > best.1 { cur } else { best },
                );
        if pivot_mag <= 0.0 || !pivot_mag.is_finite() {
            return Err(Error::Singular(col));
        }
        if pivot_row != col {
            swap_rows(&mut lu, pivot_row, col);
            swap_rows(&mut x, pivot_row, col);
        }
        let pivot = lu[(col, col)];
        for r in col + 1..n {
            let factor = lu[(r, col)] / pivot;
            if factor == Complex64::new(0.0, 0.0) {
                continue;
            }
            lu[(r, col)] = Complex64::new(0.0, 0.0);
            for c in col + 1..n {
                let u = lu[(col, c)];
                lu[(r, c)] -= factor * u;
            }
            for c in 0..m {
                let u = x[(col, c)];
                x[(r, c)] -= factor * u;
            }
        }
    }

    for col in (0..n).rev() {
        let pivot = lu[(col, col)];
        for c in 0..m {
            let mut acc = x[(col, c)];
            for k in col + 1..n {
                acc -= lu[(col, k)] * x[(k, c)];
            }
            x[(col, c)] = acc / pivot;
        }
    }
    Ok(x)
}

fn swap_rows(m: &mut MatrixAoS, r1: usize, r2: usize) {
    let cols = m.cols();
    let data = m.as_mut_slice();
    for c in 0..cols {
        data.swap(r1 * cols + c, r2 * cols + c);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{random_matrix, rng};

    #[test]
    fn solves_random_system() {
        let mut r = rng(11);
        let a = random_matrix(&mut r, 7, 7);
        let x = random_matrix(&mut r, 7, 3);
        let b = a.matmul(&x).unwrap();
        let got = solve(&a, &b).unwrap();
        assert!(got.rel_error(&x) < 1e-12);
    }

    #[test]
    fn needs_pivoting() {
        // Zero in the leading position.
        let a = MatrixAoS::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]);
        let b = MatrixAoS::from_real_rows(&[&[2.0], &[3.0]]);
        let x = solve(&a, &b).unwrap();
        assert_eq!(x, MatrixAoS::from_real_rows(&[&[3.0], &[2.0]]));
    }

    #[test]
    fn singular_is_an_error() {
        let a = MatrixAoS::from_real_rows(&[&[1.0, 2.0], &[2.0, 4.0]]);
        let b = MatrixAoS::identity(2);
        assert!(matches!(solve(&a, &b), Err(Error::Singular(1))));
    }
}
