//! Brute-force reference implementations shared by the integration tests.
//! Everything here works on plain `Vec<Vec<Complex64>>` so that it shares
//! no code with the library under test.
#![allow(dead_code)]

use lindblad_core::{Complex64, MatrixAoS};

pub type Dense = Vec<Vec<Complex64>>;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn dense(m: &MatrixAoS) -> Dense {
    (0..m.rows())
        .map(|i| (0..m.cols()).map(|j| m[(i, j)]).collect())
        .collect()
}

pub fn from_dense(a: &Dense) -> MatrixAoS {
    MatrixAoS::from_fn(a.len(), a[0].len(), |i, j| a[i][j])
}

pub fn zeros(r: usize, cols: usize) -> Dense {
    vec![vec![c(0.0, 0.0); cols]; r]
}

pub fn eye(n: usize) -> Dense {
    let mut m = zeros(n, n);
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = c(1.0, 0.0);
    }
    m
}

pub fn mul(a: &Dense, b: &Dense) -> Dense {
    let mut out = zeros(a.len(), b[0].len());
    for i in 0..a.len() {
        for j in 0..b[0].len() {
            for k in 0..b.len() {
                out[i][j] += a[i][k] * b[k][j];
            }
        }
    }
    out
}

pub fn add(a: &Dense, b: &Dense, s: Complex64) -> Dense {
    a.iter()
        .zip(b)
        .map(|(ra, rb)| ra.iter().zip(rb).map(|(x, y)| x + s * y).collect())
        .collect()
}

pub fn scale(a: &Dense, s: Complex64) -> Dense {
    a.iter()
        .map(|r| r.iter().map(|x| x * s).collect())
        .collect()
}

pub fn dag(a: &Dense) -> Dense {
    (0..a[0].len())
        .map(|j| (0..a.len()).map(|i| a[i][j].conj()).collect())
        .collect()
}

/// Kronecker product straight from the definition, four nested loops.
pub fn kron(a: &Dense, b: &Dense) -> Dense {
    let (ar, ac, br, bc) = (a.len(), a[0].len(), b.len(), b[0].len());
    let mut out = zeros(ar * br, ac * bc);
    for i in 0..ar {
        for j in 0..ac {
            for k in 0..br {
                for l in 0..bc {
                    out[i * br + k][j * bc + l] = a[i][j] * b[k][l];
                }
            }
        }
    }
    out
}

pub fn max_abs(a: &Dense) -> f64 {
    a.iter().flatten().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Max-norm of the difference over max-norm of the reference.
pub fn rel(got: &Dense, want: &Dense) -> f64 {
    let diff = add(got, want, c(-1.0, 0.0));
    let scale = max_abs(want);
    if scale == 0.0 {
        max_abs(&diff)
    } else {
        max_abs(&diff) / scale
    }
}

/// Right-hand side of the master equation, term by term:
/// `-i[H, ρ] + Σ_k (L ρ L† - ½ L†L ρ - ½ ρ L†L)`.
pub fn master_rhs(h: &Dense, ops: &[Dense], rho: &Dense) -> Dense {
    let minus_i = c(0.0, -1.0);
    let comm = add(&mul(h, rho), &mul(rho, h), c(-1.0, 0.0));
    let mut out = scale(&comm, minus_i);
    for l in ops {
        let ld = dag(l);
        let ldl = mul(&ld, l);
        out = add(&out, &mul(&mul(l, rho), &ld), c(1.0, 0.0));
        out = add(&out, &mul(&ldl, rho), c(-0.5, 0.0));
        out = add(&out, &mul(rho, &ldl), c(-0.5, 0.0));
    }
    out
}

/// `exp(m)` by a 30-term Taylor series on `m / 2^s`, squared back `s` times,
/// with `s` chosen so the scaled norm is at most 1/2.
pub fn taylor_expm(m: &Dense) -> Dense {
    let norm = (0..m[0].len())
        .map(|j| m.iter().map(|r| r[j].norm()).sum::<f64>())
        .fold(0.0, f64::max);
    let mut s = 0;
    while norm / f64::powi(2.0, s) > 0.5 {
        s += 1;
    }
    let a = scale(m, c(f64::powi(2.0, -s), 0.0));
    let n = m.len();
    let mut term = eye(n);
    let mut sum = eye(n);
    for k in 1..=30 {
        term = scale(&mul(&term, &a), c(1.0 / k as f64, 0.0));
        sum = add(&sum, &term, c(1.0, 0.0));
    }
    for _ in 0..s {
        sum = mul(&sum, &sum);
    }
    sum
}
