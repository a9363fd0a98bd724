//! Dense complex kernels for small Hermitian positive-definite matrices.
//!
//! Everything here is sized for array dimensions of a few tens at most: plain
//! row-major storage, an unpivoted Cholesky factorization, and triangular solves.
//! A [`HermitianPd`] is immutable once built and carries its lower factor `L`
//! with `L L† = A`; every inverse-weighted quantity (`x† A⁻¹ y`, `A⁻¹ b`,
//! `log det A`) goes through that factor.

use std::ops::{Index, IndexMut};

use num_complex::Complex;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Dense complex column vector.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexVector<T> {
    data: Vec<Complex<T>>,
}

impl<T: Real> ComplexVector<T> {
    pub fn new(data: Vec<Complex<T>>) -> Result<Self> {
        if data.is_empty() {
            return Err(Error::InvalidData(
                "vector must have at least one entry".into(),
            ));
        }
        if !data.iter().all(|c| c.re.is_finite() && c.im.is_finite()) {
            return Err(Error::InvalidData("vector entries must be finite".into()));
        }
        Ok(Self { data })
    }

    pub fn zeros(dim: usize) -> Self {
        assert!(dim >= 1, "vector dimension must be positive");
        Self {
            data: vec![Complex::new(T::zero(), T::zero()); dim],
        }
    }

    pub fn from_fn(dim: usize, f: impl FnMut(usize) -> Complex<T>) -> Self {
        assert!(dim >= 1, "vector dimension must be positive");
        Self {
            data: (0..dim).map(f).collect(),
        }
    }

    /// Real-valued vector promoted to complex.
    pub fn from_real(values: &[T]) -> Result<Self> {
        Self::new(values.iter().map(|&x| Complex::new(x, T::zero())).collect())
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.data.len()
    }

    #[inline]
    pub fn as_slice(&self) -> &[Complex<T>] {
        &self.data
    }

    #[inline]
    pub fn as_mut_slice(&mut self) -> &mut [Complex<T>] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<Complex<T>> {
        self.data
    }

    /// Inner product `self† other`.
    pub fn dot(&self, other: &Self) -> Complex<T> {
        debug_assert_eq!(self.dim(), other.dim());
        inner(&self.data, &other.data)
    }

    pub fn norm_sqr(&self) -> T {
        self.data.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn scaled(&self, c: Complex<T>) -> Self {
        Self {
            data: self.data.iter().map(|&x| x * c).collect(),
        }
    }

    /// `self += c · x`
    pub fn axpy(&mut self, c: Complex<T>, x: &Self) {
        debug_assert_eq!(self.dim(), x.dim());
        for (a, &b) in self.data.iter_mut().zip(&x.data) {
            *a += c * b;
        }
    }
}

impl<T> Index<usize> for ComplexVector<T> {
    type Output = Complex<T>;
    #[inline]
    fn index(&self, i: usize) -> &Complex<T> {
        &self.data[i]
    }
}

impl<T> IndexMut<usize> for ComplexVector<T> {
    #[inline]
    fn index_mut(&mut self, i: usize) -> &mut Complex<T> {
        &mut self.data[i]
    }
}

#[inline]
fn inner<T: Real>(x: &[Complex<T>], y: &[Complex<T>]) -> Complex<T> {
    let mut acc = Complex::new(T::zero(), T::zero());
    for (a, b) in x.iter().zip(y) {
        acc += a.conj() * b;
    }
    acc
}

/// Dense complex matrix in row-major order.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<Complex<T>>,
}

impl<T: Real> ComplexMatrix<T> {
    pub fn new(rows: usize, cols: usize, data: Vec<Complex<T>>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidData("matrix must be at least 1x1".into()));
        }
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                expected: rows * cols,
                found: data.len(),
            });
        }
        if !data.iter().all(|c| c.re.is_finite() && c.im.is_finite()) {
            return Err(Error::InvalidData("matrix entries must be finite".into()));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows >= 1 && cols >= 1, "matrix dimensions must be positive");
        Self {
            rows,
            cols,
            data: vec![Complex::new(T::zero(), T::zero()); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| {
            if i == j {
                Complex::new(T::one(), T::zero())
            } else {
                Complex::new(T::zero(), T::zero())
            }
        })
    }

    pub fn from_fn(
        rows: usize,
        cols: usize,
        mut f: impl FnMut(usize, usize) -> Complex<T>,
    ) -> Self {
        assert!(rows >= 1 && cols >= 1, "matrix dimensions must be positive");
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    /// Real diagonal matrix.
    pub fn from_diag(diag: &[T]) -> Self {
        let n = diag.len();
        Self::from_fn(n, n, |i, j| {
            if i == j {
                Complex::new(diag[i], T::zero())
            } else {
                Complex::new(T::zero(), T::zero())
            }
        })
    }

    /// Stacks equally sized vectors as the columns of a matrix.
    pub fn from_columns(columns: &[ComplexVector<T>]) -> Result<Self> {
        let first = columns
            .first()
            .ok_or_else(|| Error::InvalidData("need at least one column".into()))?;
        let rows = first.dim();
        for c in columns {
            if c.dim() != rows {
                return Err(Error::DimensionMismatch {
                    expected: rows,
                    found: c.dim(),
                });
            }
        }
        Ok(Self::from_fn(rows, columns.len(), |i, j| columns[j][i]))
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
    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    #[inline]
    pub fn as_slice(&self) -> &[Complex<T>] {
        &self.data
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[Complex<T>] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> ComplexVector<T> {
        ComplexVector {
            data: (0..self.rows).map(|i| self[(i, j)]).collect(),
        }
    }

    pub fn columns(&self) -> Vec<ComplexVector<T>> {
        (0..self.cols).map(|j| self.column(j)).collect()
    }

    pub fn set_column(&mut self, j: usize, v: &ComplexVector<T>) {
        assert_eq!(v.dim(), self.rows);
        for i in 0..self.rows {
            self[(i, j)] = v[i];
        }
    }

    pub fn conj_transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn scaled(&self, s: T) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&c| c * s).collect(),
        }
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                found: other.rows,
            });
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                for j in 0..other.cols {
                    out.data[i * other.cols + j] += a * other[(k, j)];
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, x: &ComplexVector<T>) -> Result<ComplexVector<T>> {
        if self.cols != x.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                found: x.dim(),
            });
        }
        Ok(ComplexVector::from_fn(self.rows, |i| {
            let mut acc = Complex::new(T::zero(), T::zero());
            for (a, b) in self.row(i).iter().zip(x.as_slice()) {
                acc += a * b;
            }
            acc
        }))
    }

    /// Gram matrix `A A†`. Only the lower triangle is computed; the upper is its
    /// mirror, so the result is exactly Hermitian.
    pub fn gram(&self) -> Self {
        let n = self.rows;
        let mut out = Self::zeros(n, n);
        for i in 0..n {
            for j in 0..=i {
                let mut acc = Complex::new(T::zero(), T::zero());
                for (a, b) in self.row(i).iter().zip(self.row(j)) {
                    acc += a * b.conj();
                }
                if i == j {
                    acc.im = T::zero();
                }
                out.data[i * n + j] = acc;
                out.data[j * n + i] = acc.conj();
            }
        }
        out
    }

    /// `self += w · x x†` (Hermitian rank-one update, exact symmetry kept).
    pub fn add_outer(&mut self, x: &[Complex<T>], w: T) {
        let n = self.rows;
        debug_assert!(self.is_square() && x.len() == n);
        for i in 0..n {
            let xi = x[i] * w;
            for j in 0..i {
                let v = xi * x[j].conj();
                self.data[i * n + j] += v;
                self.data[j * n + i] += v.conj();
            }
            self.data[i * n + i].re += w * x[i].norm_sqr();
        }
    }

    pub fn add_assign(&mut self, other: &Self) {
        assert!(self.rows == other.rows && self.cols == other.cols);
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += b;
        }
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::DimensionMismatch {
                expected: self.rows * self.cols,
                found: other.rows * other.cols,
            });
        }
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a - b)
                .collect(),
        })
    }

    pub fn frobenius_norm(&self) -> T {
        self.data.iter().map(|c| c.norm_sqr()).sum::<T>().sqrt()
    }

    /// `‖A − A†‖_F / ‖A‖_F` (zero for the zero matrix).
    pub fn hermitian_asymmetry(&self) -> T {
        if !self.is_square() {
            return T::infinity();
        }
        let n = self.rows;
        let mut diff = T::zero();
        for i in 0..n {
            for j in 0..n {
                diff += (self[(i, j)] - self[(j, i)].conj()).norm_sqr();
            }
        }
        let norm = self.frobenius_norm();
        if norm == T::zero() {
            T::zero()
        } else {
            diff.sqrt() / norm
        }
    }
}

impl<T> Index<(usize, usize)> for ComplexMatrix<T> {
    type Output = Complex<T>;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &Complex<T> {
        &self.data[i * self.cols + j]
    }
}

impl<T> IndexMut<(usize, usize)> for ComplexMatrix<T> {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex<T> {
        &mut self.data[i * self.cols + j]
    }
}

/// Hermitian positive-definite matrix together with its Cholesky factor.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianPd<T> {
    matrix: ComplexMatrix<T>,
    chol: ComplexMatrix<T>,
}

/// Factors a Hermitian matrix as `L L†`. See [`HermitianPd::new`].
pub fn cholesky<T: Real>(a: &ComplexMatrix<T>) -> Result<HermitianPd<T>> {
    HermitianPd::new(a.clone())
}

impl<T: Real> HermitianPd<T> {
    /// Factors `a`. No pivoting and no regularization: a non-positive or
    /// non-finite pivot is reported as [`Error::NotPositiveDefinite`].
    pub fn new(a: ComplexMatrix<T>) -> Result<Self> {
        if !a.is_square() {
            return Err(Error::DimensionMismatch {
                expected: a.rows,
                found: a.cols,
            });
        }
        let asym = a.hermitian_asymmetry();
        if !(asym <= T::lit(T::HERMITIAN_TOL)) {
            return Err(Error::NotHermitian {
                asymmetry: asym.to_f64().unwrap_or(f64::NAN),
            });
        }
        let chol = factor_lower(&a)?;
        Ok(Self { matrix: a, chol })
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.matrix.rows
    }

    #[inline]
    pub fn matrix(&self) -> &ComplexMatrix<T> {
        &self.matrix
    }

    /// Lower-triangular factor `L`.
    #[inline]
    pub fn factor(&self) -> &ComplexMatrix<T> {
        &self.chol
    }

    /// `‖L L† − A‖_F / ‖A‖_F`
    pub fn reconstruction_error(&self) -> T {
        let llh = self
            .chol
            .matmul(&self.chol.conj_transpose())
            .expect("square factor");
        let diff = llh.sub(&self.matrix).expect("same shape");
        diff.frobenius_norm() / self.matrix.frobenius_norm()
    }

    /// `log det A = 2 Σ log L_jj`
    pub fn logdet(&self) -> T {
        let n = self.dim();
        let two = T::lit(2.0);
        (0..n).map(|j| self.chol[(j, j)].re.ln()).sum::<T>() * two
    }

    fn check_dim(&self, x: &ComplexVector<T>) -> Result<()> {
        if x.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: x.dim(),
            });
        }
        Ok(())
    }

    /// Forward substitution: returns `L⁻¹ b`.
    pub fn whiten(&self, b: &ComplexVector<T>) -> Result<ComplexVector<T>> {
        self.check_dim(b)?;
        let mut y = b.clone();
        self.whiten_in_place(y.as_mut_slice());
        Ok(y)
    }

    /// In-place `y ← L⁻¹ y`; the caller guarantees `y.len() == dim`.
    pub fn whiten_in_place(&self, y: &mut [Complex<T>]) {
        let n = self.dim();
        debug_assert_eq!(y.len(), n);
        for i in 0..n {
            let row = self.chol.row(i);
            let mut acc = y[i];
            for k in 0..i {
                acc -= row[k] * y[k];
            }
            y[i] = acc / row[i].re;
        }
    }

    /// Solves `A x = b` with a forward and a backward triangular sweep.
    pub fn solve(&self, b: &ComplexVector<T>) -> Result<ComplexVector<T>> {
        let mut x = self.whiten(b)?;
        let n = self.dim();
        let y = x.as_mut_slice();
        for i in (0..n).rev() {
            let mut acc = y[i];
            for k in i + 1..n {
                acc -= self.chol[(k, i)].conj() * y[k];
            }
            y[i] = acc / self.chol[(i, i)].re;
        }
        Ok(x)
    }

    /// `x† A⁻¹ y`, evaluated as `(L⁻¹x)† (L⁻¹y)`. With `x == y` the result is
    /// real with an exactly zero imaginary part.
    pub fn quad_form(&self, x: &ComplexVector<T>, y: &ComplexVector<T>) -> Result<Complex<T>> {
        let wx = self.whiten(x)?;
        let wy = self.whiten(y)?;
        Ok(wx.dot(&wy))
    }

    /// `x† A⁻¹ x`
    pub fn inv_norm_sqr(&self, x: &ComplexVector<T>) -> Result<T> {
        Ok(self.whiten(x)?.norm_sqr())
    }

    /// `log det(A + x x†) = log det A + log(1 + x† A⁻¹ x)`.
    pub fn rank_one_logdet_update(&self, x: &ComplexVector<T>) -> Result<T> {
        let q = self.inv_norm_sqr(x)?;
        Ok(self.logdet() + q.ln_1p())
    }

    /// Replaces `A` by `A + x x†`, updating the factor in `O(n²)` with the
    /// plane-rotation scheme.
    pub fn rank_one_update(&mut self, x: &ComplexVector<T>) -> Result<()> {
        self.check_dim(x)?;
        self.matrix.add_outer(x.as_slice(), T::one());
        let mut w = x.as_slice().to_vec();
        let n = self.dim();
        for k in 0..n {
            let lkk = self.chol[(k, k)].re;
            let r = (lkk * lkk + w[k].norm_sqr()).sqrt();
            let c = r / lkk;
            let s = w[k] / lkk;
            self.chol[(k, k)] = Complex::new(r, T::zero());
            for i in k + 1..n {
                let lik = (self.chol[(i, k)] + s.conj() * w[i]) / c;
                w[i] = w[i] * c - s * lik;
                self.chol[(i, k)] = lik;
            }
        }
        Ok(())
    }

    /// Draws `L u` with `u` standard circular complex normal (real and
    /// imaginary parts independent with variance 1/2), i.e. a draw from `CN(0, A)`.
    pub fn sample_cn<R: Rng + ?Sized>(&self, rng: &mut R) -> ComplexVector<T>
    where
        StandardNormal: Distribution<T>,
    {
        let n = self.dim();
        let s = T::FRAC_1_SQRT_2();
        let u: Vec<Complex<T>> = (0..n)
            .map(|_| {
                let re: T = StandardNormal.sample(rng);
                let im: T = StandardNormal.sample(rng);
                Complex::new(re * s, im * s)
            })
            .collect();
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            let row = self.chol.row(i);
            let mut acc = Complex::new(T::zero(), T::zero());
            for k in 0..=i {
                acc += row[k] * u[k];
            }
            out.push(acc);
        }
        ComplexVector { data: out }
    }
}

fn factor_lower<T: Real>(a: &ComplexMatrix<T>) -> Result<ComplexMatrix<T>> {
    let n = a.rows;
    let mut l = ComplexMatrix::zeros(n, n);
    for j in 0..n {
        let mut d = a[(j, j)].re;
        for k in 0..j {
            d -= l[(j, k)].norm_sqr();
        }
        if !(d > T::zero()) || !d.is_finite() {
            return Err(Error::NotPositiveDefinite { pivot: j });
        }
        let ljj = d.sqrt();
        l[(j, j)] = Complex::new(ljj, T::zero());
        for i in j + 1..n {
            let mut acc = a[(i, j)];
            for k in 0..j {
                acc -= l[(i, k)] * l[(j, k)].conj();
            }
            l[(i, j)] = acc / ljj;
        }
    }
    Ok(l)
}
