//! Matvec kernels `out = P v` on interleaved and split-plane data.
//!
//! Strict builds accumulate each row in ascending column order. With the
//! `fast-math` feature the inner products are reassociated into 4-wide lane
//! accumulators with FMA contraction. Stable Rust has no flag that lets the
//! optimizer reorder a float reduction by itself, so the lanes are spelled
//! out with portable vectors (AVX when the target has it, SSE2 pairs otherwise).

use num_complex::Complex64;

/// Row length of a qutrit Liouvillian (d = 3, d^2 = 9).
const QUTRIT_ROW: usize = 9;

#[cfg(feature = "fast-math")]
use wide::f64x4;

/// Complex products handled per unrolled step of the reassociated reductions:
/// two independent 4-wide accumulator sets keep the FMA pipes busy.
#[cfg(feature = "fast-math")]
const LANES: usize = 8;

#[cfg(feature = "fast-math")]
#[inline(always)]
fn fmadd(a: f64, b: f64, c: f64) -> f64 {
    if cfg!(target_feature = "fma") {
        a.mul_add(b, c)
    } else {
        a * b + c
    }
}

#[cfg(feature = "fast-math")]
#[inline(always)]
fn ld(s: &[f64]) -> f64x4 {
    f64x4::new([s[0], s[1], s[2], s[3]])
}

/// `out[i] = Σ_j p[i*n + j] * v[j]` with `n = v.len()`.
#[inline]
pub(crate) fn matvec_aos(p: &[Complex64], v: &[Complex64], out: &mut [Complex64]) {
    let n = v.len();
    if n == 0 {
        out.fill(Complex64::new(0.0, 0.0));
        return;
    }
    debug_assert_eq!(p.len(), n * out.len());
    // Qutrit-sized rows get a copy with the length known at compile time.
    if n == QUTRIT_ROW {
        aos_rows(p, v, out, QUTRIT_ROW);
    } else {
        aos_rows(p, v, out, n);
    }
}

#[inline(always)]
fn aos_rows(p: &[Complex64], v: &[Complex64], out: &mut [Complex64], n: usize) {
    let v = &v[..n];
    for (row, o) in p.chunks_exact(n).zip(out.iter_mut()) {
        *o = dot_aos(&row[..n], v);
    }
}

#[cfg(not(feature = "fast-math"))]
#[inline(always)]
fn dot_aos(row: &[Complex64], v: &[Complex64]) -> Complex64 {
    let (mut re, mut im) = (0.0, 0.0);
    for (a, x) in row.iter().zip(v) {
        re += a.re * x.re - a.im * x.im;
        im += a.re * x.im + a.im * x.re;
    }
    Complex64::new(re, im)
}

#[cfg(feature = "fast-math")]
#[inline(always)]
fn dot_aos(row: &[Complex64], v: &[Complex64]) -> Complex64 {
    // Each vector holds two interleaved complexes. `x_re`/`x_im` duplicate the
    // real and imaginary parts of x so that one FMA covers both halves of `a`.
    let flat = |c: &[Complex64]| {
        // SAFETY: Complex64 is repr(C) { re, im } of f64.
        unsafe { std::slice::from_raw_parts(c.as_ptr() as *const f64, 2 * c.len()) }
    };
    let (a, x) = (flat(row), flat(v));
    let dup = |x: &[f64]| {
        (
            f64x4::new([x[0], x[0], x[2], x[2]]),
            f64x4::new([x[1], x[1], x[3], x[3]]),
        )
    };
    let (mut by_re, mut by_im) = ([f64x4::ZERO; 2], [f64x4::ZERO; 2]);
    let a_chunks = a.chunks_exact(2 * LANES);
    let x_chunks = x.chunks_exact(2 * LANES);
    for (ac, xc) in a_chunks.zip(x_chunks) {
        for h in 0..2 {
            for q in 0..2 {
                let off = 8 * q + 4 * h;
                let (xr, xi) = dup(&xc[off..off + 4]);
                let av = ld(&ac[off..off + 4]);
                by_re[h] = av.mul_add(xr, by_re[h]);
                by_im[h] = av.mul_add(xi, by_im[h]);
            }
        }
    }
    // by_re lanes: [ar xr, ai xr, ...]; by_im lanes: [ar xi, ai xi, ...].
    let r = (by_re[0] + by_re[1]).to_array();
    let i = (by_im[0] + by_im[1]).to_array();
    let done = v.len() - v.len() % LANES;
    let (mut t_re, mut t_im) = (0.0, 0.0);
    for (a, x) in row[done..].iter().zip(&v[done..]) {
        t_re = fmadd(a.re, x.re, t_re);
        t_re = fmadd(-a.im, x.im, t_re);
        t_im = fmadd(a.re, x.im, t_im);
        t_im = fmadd(a.im, x.re, t_im);
    }
    let re = (r[0] + r[2]) - (i[1] + i[3]) + t_re;
    let im = (r[1] + r[3]) + (i[0] + i[2]) + t_im;
    Complex64::new(re, im)
}

/// Split-plane matvec:
/// `out_re[i] = Σ (P_re v_re - P_im v_im)`, `out_im[i] = Σ (P_re v_im + P_im v_re)`.
#[inline]
pub(crate) fn matvec_soa(
    p_re: &[f64],
    p_im: &[f64],
    v_re: &[f64],
    v_im: &[f64],
    out_re: &mut [f64],
    out_im: &mut [f64],
) {
    let n = v_re.len();
    if n == 0 {
        out_re.fill(0.0);
        out_im.fill(0.0);
        return;
    }
    debug_assert_eq!(p_re.len(), n * out_re.len());
    let v = (v_re, v_im);
    if n == QUTRIT_ROW {
        soa_rows(p_re, p_im, v, out_re, out_im, QUTRIT_ROW);
    } else {
        soa_rows(p_re, p_im, v, out_re, out_im, n);
    }
}

#[inline(always)]
fn soa_rows(
    p_re: &[f64],
    p_im: &[f64],
    v: (&[f64], &[f64]),
    out_re: &mut [f64],
    out_im: &mut [f64],
    n: usize,
) {
    let (v_re, v_im) = (&v.0[..n], &v.1[..n]);
    let rows = p_re.chunks_exact(n).zip(p_im.chunks_exact(n));
    for ((row_re, row_im), (o_re, o_im)) in rows.zip(out_re.iter_mut().zip(out_im.iter_mut())) {
        let (re, im) = dot_soa(&row_re[..n], &row_im[..n], v_re, v_im);
        *o_re = re;
        *o_im = im;
    }
}

#[cfg(not(feature = "fast-math"))]
#[inline(always)]
fn dot_soa(a_re: &[f64], a_im: &[f64], x_re: &[f64], x_im: &[f64]) -> (f64, f64) {
    let n = x_re.len();
    let (a_re, a_im, x_im) = (&a_re[..n], &a_im[..n], &x_im[..n]);
    let (mut re, mut im) = (0.0, 0.0);
    for j in 0..n {
        re += a_re[j] * x_re[j] - a_im[j] * x_im[j];
        im += a_re[j] * x_im[j] + a_im[j] * x_re[j];
    }
    (re, im)
}

#[cfg(feature = "fast-math")]
#[inline(always)]
fn dot_soa(a_re: &[f64], a_im: &[f64], x_re: &[f64], x_im: &[f64]) -> (f64, f64) {
    let n = x_re.len();
    let (a_re, a_im, x_im) = (&a_re[..n], &a_im[..n], &x_im[..n]);
    let z = [f64x4::ZERO; 2];
    let (mut rr, mut ii, mut ri, mut ir) = (z, z, z, z);
    let done = n - n % LANES;
    for j in (0..done).step_by(LANES) {
        for h in 0..2 {
            let s = j + 4 * h..j + 4 * h + 4;
            let (ar, ai) = (ld(&a_re[s.clone()]), ld(&a_im[s.clone()]));
            let (xr, xi) = (ld(&x_re[s.clone()]), ld(&x_im[s]));
            rr[h] = ar.mul_add(xr, rr[h]);
            ii[h] = ai.mul_add(xi, ii[h]);
            ri[h] = ar.mul_add(xi, ri[h]);
            ir[h] = ai.mul_add(xr, ir[h]);
        }
    }
    // Fold vertically first so each row pays for only two horizontal sums.
    // The tail runs on its own chain so it overlaps the horizontal sums.
    let (mut t_re, mut t_im) = (0.0, 0.0);
    for j in done..n {
        t_re = fmadd(a_re[j], x_re[j], t_re);
        t_re = fmadd(-a_im[j], x_im[j], t_re);
        t_im = fmadd(a_re[j], x_im[j], t_im);
        t_im = fmadd(a_im[j], x_re[j], t_im);
    }
    let re = ((rr[0] + rr[1]) - (ii[0] + ii[1])).reduce_add() + t_re;
    let im = ((ri[0] + ri[1]) + (ir[0] + ir[1])).reduce_add() + t_im;
    (re, im)
}
