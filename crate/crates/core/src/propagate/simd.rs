//! Hand-written AVX2/FMA matvec on interleaved complex data.
//!
//! Each 256-bit register holds two complex numbers `[re0, im0, re1, im1]`.
//! A complex product needs the real parts of `P` duplicated, the imaginary
//! parts duplicated and `v` swapped within each pair, followed by an
//! alternating subtract/add FMA. The shuffles are the cost of the layout.

use num_complex::Complex64;

/// Whether the running CPU (and this build) supports the SIMD kernel.
pub fn available() -> bool {
    imp::available()
}

/// `out = P v`.
///
/// # Safety
/// [`available`] must have returned true.
#[inline]
pub(crate) unsafe fn matvec(p: &[Complex64], v: &[Complex64], out: &mut [Complex64]) {
    imp::matvec(p, v, out)
}

#[cfg(all(feature = "simd", target_arch = "x86_64"))]
mod imp {
    use num_complex::Complex64;
    use std::arch::x86_64::*;

    pub fn available() -> bool {
        is_x86_feature_detected!("avx2") && is_x86_feature_detected!("fma")
    }

    #[inline]
    pub unsafe fn matvec(p: &[Complex64], v: &[Complex64], out: &mut [Complex64]) {
        debug_assert!(available(), "AVX2/FMA kernel called on an unsupported CPU");
        let n = v.len();
        if n == 0 {
            out.fill(Complex64::new(0.0, 0.0));
            return;
        }
        assert_eq!(p.len(), n * out.len());
        // SAFETY: the caller guarantees AVX2/FMA; slice lengths checked above.
        unsafe { matvec_avx2(p, v, out) }
    }

    #[target_feature(enable = "avx2,fma")]
    unsafe fn matvec_avx2(p: &[Complex64], v: &[Complex64], out: &mut [Complex64]) {
        let n = v.len();
        let pairs = n / 2;
        let vp = v.as_ptr() as *const f64;
        for (i, o) in out.iter_mut().enumerate() {
            let row = p.as_ptr().add(i * n) as *const f64;
            let mut acc = _mm256_setzero_pd();
            for k in 0..pairs {
                let pv = _mm256_loadu_pd(row.add(4 * k));
                let xv = _mm256_loadu_pd(vp.add(4 * k));
                let p_re = _mm256_permute_pd::<0b0000>(pv);
                let p_im = _mm256_permute_pd::<0b1111>(pv);
                let x_swap = _mm256_permute_pd::<0b0101>(xv);
                let cross = _mm256_mul_pd(p_im, x_swap);
                // even lanes: re*re - im*im, odd lanes: re*im + im*re
                let prod = _mm256_fmaddsub_pd(p_re, xv, cross);
                acc = _mm256_add_pd(acc, prod);
            }
            let lo = _mm256_castpd256_pd128(acc);
            let hi = _mm256_extractf128_pd::<1>(acc);
            let sum = _mm_add_pd(lo, hi);
            let mut re = _mm_cvtsd_f64(sum);
            let mut im = _mm_cvtsd_f64(_mm_unpackhi_pd(sum, sum));
            if n % 2 == 1 {
                let a = *p.get_unchecked(i * n + n - 1);
                let x = *v.get_unchecked(n - 1);
                re += a.re * x.re - a.im * x.im;
                im += a.re * x.im + a.im * x.re;
            }
            *o = Complex64::new(re, im);
        }
    }
}

#[cfg(not(all(feature = "simd", target_arch = "x86_64")))]
mod imp {
    use num_complex::Complex64;

    pub fn available() -> bool {
        false
    }

    pub unsafe fn matvec(_p: &[Complex64], _v: &[Complex64], _out: &mut [Complex64]) {
        unreachable!("SIMD kernel is not compiled into this build")
    }
}
