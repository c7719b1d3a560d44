use std::ops::{Index, IndexMut};

use num_complex::Complex64;

use super::aligned::AlignedVec;
use crate::error::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Dense complex matrix, row-major, interleaved `(re, im)` pairs.
#[derive(Clone, Debug, PartialEq)]
pub struct MatrixAoS {
    rows: usize,
    cols: usize,
    data: AlignedVec<Complex64>,
}

/// Dense complex matrix, row-major, with separate real and imaginary planes.
#[derive(Clone, Debug, PartialEq)]
pub struct MatrixSoA {
    rows: usize,
    cols: usize,
    re: AlignedVec<f64>,
    im: AlignedVec<f64>,
}

/// Column vector with interleaved storage.
#[derive(Clone, Debug, PartialEq)]
pub struct VectorAoS {
    data: AlignedVec<Complex64>,
}

/// Column vector with split-plane storage.
#[derive(Clone, Debug, PartialEq)]
pub struct VectorSoA {
    re: AlignedVec<f64>,
    im: AlignedVec<f64>,
}

impl MatrixAoS {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: AlignedVec::zeros(rows * cols),
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        Self {
            rows,
            cols,
            data: AlignedVec::from_fn(rows * cols, |k| f(k / cols.max(1), k % cols.max(1))),
        }
    }

    /// Builds a matrix from row-major elements.
    pub fn from_row_major(rows: usize, cols: usize, data: &[Complex64]) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::shape(
                format!("{} elements", rows * cols),
                format!("{} elements", data.len()),
            ));
        }
        Ok(Self {
            rows,
            cols,
            data: AlignedVec::from_slice(data),
        })
    }

    /// Convenience constructor from real-valued rows; panics on ragged input.
    pub fn from_real_rows(rows: &[&[f64]]) -> Self {
        let n_cols = rows.first().map_or(0, |r| r.len());
        assert!(rows.iter().all(|r| r.len() == n_cols), "ragged rows");
        Self::from_fn(rows.len(), n_cols, |i, j| Complex64::new(rows[i][j], 0.0))
    }

    pub fn diag(values: &[Complex64]) -> Self {
        let mut m = Self::zeros(values.len(), values.len());
        for (i, &v) in values.iter().enumerate() {
            m[(i, i)] = v;
        }
        m
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn shape_str(&self) -> String {
        format!("{}x{}", self.rows, self.cols)
    }

    #[inline]
    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    #[inline]
    pub fn as_mut_slice(&mut self) -> &mut [Complex64] {
        &mut self.data
    }

    pub fn row(&self, i: usize) -> &[Complex64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn is_finite(&self) -> bool {
        self.data
            .iter()
            .all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// Reinterprets a square matrix as its row-major vectorization without copying.
    pub fn into_vec(self) -> Result<VectorAoS> {
        if !self.is_square() {
            return Err(Error::NotSquare {
                rows: self.rows,
                cols: self.cols,
            });
        }
        Ok(VectorAoS { data: self.data })
    }

    pub fn kron(&self, b: &MatrixAoS) -> MatrixAoS {
        let (ar, ac, br, bc) = (self.rows, self.cols, b.rows, b.cols);
        let mut out = MatrixAoS::zeros(ar * br, ac * bc);
        let out_cols = ac * bc;
        for i in 0..ar {
            for j in 0..ac {
                let aij = self[(i, j)];
                if aij == ZERO {
                    continue;
                }
                for k in 0..br {
                    let dst = &mut out.data[(i * br + k) * out_cols + j * bc..][..bc];
                    for (o, &bkl) in dst.iter_mut().zip(b.row(k)) {
                        *o = aij * bkl;
                    }
                }
            }
        }
        out
    }

    pub fn matmul(&self, b: &MatrixAoS) -> Result<MatrixAoS> {
        if self.cols != b.rows {
            return Err(Error::shape(
                format!("{} rows on the right operand", self.cols),
                b.shape_str(),
            ));
        }
        let mut out = MatrixAoS::zeros(self.rows, b.cols);
        let n = b.cols;
        // i-k-j order keeps the inner loop contiguous in both `b` and `out`.
        for i in 0..self.rows {
            let out_row = &mut out.data[i * n..(i + 1) * n];
            for (k, &aik) in self.row(i).iter().enumerate() {
                if aik == ZERO {
                    continue;
                }
                for (o, &bkj) in out_row.iter_mut().zip(b.row(k)) {
                    *o += aik * bkj;
                }
            }
        }
        Ok(out)
    }

    /// Conjugate transpose.
    pub fn dagger(&self) -> MatrixAoS {
        MatrixAoS::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> MatrixAoS {
        MatrixAoS::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    /// Element-wise complex conjugate.
    pub fn conj(&self) -> MatrixAoS {
        MatrixAoS {
            rows: self.rows,
            cols: self.cols,
            data: AlignedVec::from_fn(self.data.len(), |k| self.data[k].conj()),
        }
    }

    /// Maximum absolute column sum.
    pub fn one_norm(&self) -> f64 {
        let mut sums = vec![0.0f64; self.cols];
        for i in 0..self.rows {
            for (s, z) in sums.iter_mut().zip(self.row(i)) {
                *s += z.norm();
            }
        }
        sums.into_iter().fold(0.0, f64::max)
    }

    /// Largest element modulus.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// `max|self - reference| / max|reference|`; the absolute difference when
    /// the reference is zero.
    pub fn rel_error(&self, reference: &MatrixAoS) -> f64 {
        assert_eq!(
            (self.rows, self.cols),
            (reference.rows, reference.cols),
            "rel_error shape mismatch"
        );
        max_rel_diff(&self.data, &reference.data)
    }

    pub fn scale(&self, c: Complex64) -> MatrixAoS {
        self.map(|z| z * c)
    }

    pub fn map(&self, mut f: impl FnMut(Complex64) -> Complex64) -> MatrixAoS {
        MatrixAoS {
            rows: self.rows,
            cols: self.cols,
            data: AlignedVec::from_fn(self.data.len(), |k| f(self.data[k])),
        }
    }

    pub fn add(&self, other: &MatrixAoS) -> Result<MatrixAoS> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &MatrixAoS) -> Result<MatrixAoS> {
        self.zip_with(other, |a, b| a - b)
    }

    /// `self += c * other`.
    pub fn add_scaled_assign(&mut self, c: Complex64, other: &MatrixAoS) -> Result<()> {
        self.check_same_shape(other)?;
        for (a, &b) in self.data.iter_mut().zip(other.data.iter()) {
            *a += c * b;
        }
        Ok(())
    }

    fn zip_with(
        &self,
        other: &MatrixAoS,
        f: impl Fn(Complex64, Complex64) -> Complex64,
    ) -> Result<MatrixAoS> {
        self.check_same_shape(other)?;
        Ok(MatrixAoS {
            rows: self.rows,
            cols: self.cols,
            data: AlignedVec::from_fn(self.data.len(), |k| f(self.data[k], other.data[k])),
        })
    }

    fn check_same_shape(&self, other: &MatrixAoS) -> Result<()> {
        if (self.rows, self.cols) != (other.rows, other.cols) {
            return Err(Error::shape(self.shape_str(), other.shape_str()));
        }
        Ok(())
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    /// Largest `|a_ij - conj(a_ji)|`; requires a square matrix.
    pub fn hermiticity_error(&self) -> f64 {
        debug_assert!(self.is_square());
        let n = self.rows;
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in i..n {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn to_soa(&self) -> MatrixSoA {
        MatrixSoA {
            rows: self.rows,
            cols: self.cols,
            re: AlignedVec::from_fn(self.data.len(), |k| self.data[k].re),
            im: AlignedVec::from_fn(self.data.len(), |k| self.data[k].im),
        }
    }

    pub fn from_soa(a: &MatrixSoA) -> MatrixAoS {
        a.to_aos()
    }
}

impl Index<(usize, usize)> for MatrixAoS {
    type Output = Complex64;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for MatrixAoS {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl MatrixSoA {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            re: AlignedVec::zeros(rows * cols),
            im: AlignedVec::zeros(rows * cols),
        }
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn re(&self) -> &[f64] {
        &self.re
    }

    #[inline]
    pub fn im(&self) -> &[f64] {
        &self.im
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        let k = i * self.cols + j;
        Complex64::new(self.re[k], self.im[k])
    }

    pub fn to_aos(&self) -> MatrixAoS {
        MatrixAoS {
            rows: self.rows,
            cols: self.cols,
            data: AlignedVec::from_fn(self.re.len(), |k| Complex64::new(self.re[k], self.im[k])),
        }
    }
}

impl VectorAoS {
    pub fn zeros(len: usize) -> Self {
        Self {
            data: AlignedVec::zeros(len),
        }
    }

    pub fn from_slice(data: &[Complex64]) -> Self {
        Self {
            data: AlignedVec::from_slice(data),
        }
    }

    pub fn from_fn(len: usize, f: impl FnMut(usize) -> Complex64) -> Self {
        Self {
            data: AlignedVec::from_fn(len, f),
        }
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.data.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    #[inline]
    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    #[inline]
    pub fn as_mut_slice(&mut self) -> &mut [Complex64] {
        &mut self.data
    }

    pub fn sum(&self) -> Complex64 {
        self.data.iter().sum()
    }

    pub fn rel_error(&self, reference: &VectorAoS) -> f64 {
        assert_eq!(self.len(), reference.len(), "rel_error length mismatch");
        max_rel_diff(&self.data, &reference.data)
    }

    pub fn to_soa(&self) -> VectorSoA {
        VectorSoA {
            re: AlignedVec::from_fn(self.len(), |k| self.data[k].re),
            im: AlignedVec::from_fn(self.len(), |k| self.data[k].im),
        }
    }

    /// Reinterprets a length-d² vector as the d×d matrix it vectorizes.
    pub fn into_matrix(self) -> Result<MatrixAoS> {
        let d = exact_sqrt(self.len()).ok_or(Error::NotPerfectSquare(self.len()))?;
        Ok(MatrixAoS {
            rows: d,
            cols: d,
            data: self.data,
        })
    }
}

impl VectorSoA {
    pub fn zeros(len: usize) -> Self {
        Self {
            re: AlignedVec::zeros(len),
            im: AlignedVec::zeros(len),
        }
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.re.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.re.is_empty()
    }

    #[inline]
    pub fn re(&self) -> &[f64] {
        &self.re
    }

    #[inline]
    pub fn im(&self) -> &[f64] {
        &self.im
    }

    /// Both planes, mutably.
    #[inline]
    pub fn planes_mut(&mut self) -> (&mut [f64], &mut [f64]) {
        (&mut self.re, &mut self.im)
    }

    pub fn to_aos(&self) -> VectorAoS {
        VectorAoS::from_fn(self.len(), |k| Complex64::new(self.re[k], self.im[k]))
    }
}

/// Row-major vectorization: element `[i, j]` lands in slot `i*d + j`.
pub fn vec(rho: &MatrixAoS) -> Result<VectorAoS> {
    rho.clone().into_vec()
}

/// Inverse of [`vec`].
pub fn unvec(v: &VectorAoS) -> Result<MatrixAoS> {
    v.clone().into_matrix()
}

pub(crate) fn exact_sqrt(n: usize) -> Option<usize> {
    let r = (n as f64).sqrt().round() as usize;
    (r.checked_mul(r) == Some(n)).then_some(r)
}

fn max_rel_diff(a: &[Complex64], reference: &[Complex64]) -> f64 {
    let diff = a
        .iter()
        .zip(reference)
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max);
    let scale = reference.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if scale > 0.0 {
        diff / scale
    } else {
        diff
    }
}
