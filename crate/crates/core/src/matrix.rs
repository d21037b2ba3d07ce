//! Dense complex matrices for the small operator spaces used here: atomic
//! operators (dim 2 and 3) and their vectorized superoperators (dim 4 and 9).

use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use num_complex::Complex;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Square complex matrix stored row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMatrix<T> {
    dim: usize,
    data: Vec<Complex<T>>,
}

impl<T: Real> ComplexMatrix<T> {
    pub fn zeros(dim: usize) -> Self {
        assert!(dim >= 1, "matrix dimension must be at least 1");
        Self {
            dim,
            data: vec![Complex::zero(); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = Complex::one();
        }
        m
    }

    /// Builds a matrix from row-major entries.
    pub fn from_vec(dim: usize, data: Vec<Complex<T>>) -> Result<Self> {
        if dim == 0 || data.len() != dim * dim {
            return Err(Error::EntryCount {
                expected: dim * dim,
                got: data.len(),
            });
        }
        Ok(Self { dim, data })
    }

    /// Builds a matrix from a list of rows; every row must have `rows.len()` entries.
    pub fn from_rows(rows: &[Vec<Complex<T>>]) -> Result<Self> {
        let dim = rows.len();
        let data: Vec<_> = rows.iter().flatten().copied().collect();
        if rows.iter().any(|r| r.len() != dim) {
            return Err(Error::EntryCount {
                expected: dim * dim,
                got: data.len(),
            });
        }
        Self::from_vec(dim, data)
    }

    pub fn from_real_rows(rows: &[Vec<T>]) -> Result<Self> {
        let rows: Vec<Vec<Complex<T>>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| Complex::new(x, T::zero())).collect())
            .collect();
        Self::from_rows(&rows)
    }

    /// `|i⟩⟨j|` in dimension `dim`.
    pub fn unit(dim: usize, i: usize, j: usize) -> Self {
        let mut m = Self::zeros(dim);
        m[(i, j)] = Complex::one();
        m
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
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

    fn check_dim(&self, other: &Self) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                left: self.dim,
                right: other.dim,
            });
        }
        Ok(())
    }

    /// Matrix product `self · other`.
    pub fn matmul(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        Ok(self.mul_unchecked(other))
    }

    fn mul_unchecked(&self, other: &Self) -> Self {
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] = out.data[i * n + j] + a * other.data[k * n + j];
                }
            }
        }
        out
    }

    /// Matrix–vector product.
    pub fn apply(&self, v: &[Complex<T>]) -> Result<Vec<Complex<T>>> {
        if v.len() != self.dim {
            return Err(Error::DimensionMismatch {
                left: self.dim,
                right: v.len(),
            });
        }
        let n = self.dim;
        Ok((0..n)
            .map(|i| {
                self.data[i * n..(i + 1) * n]
                    .iter()
                    .zip(v)
                    .fold(Complex::zero(), |acc, (&a, &x)| acc + a * x)
            })
            .collect())
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out.data[j * n + i] = self.data[i * n + j].conj();
            }
        }
        out
    }

    pub fn transpose(&self) -> Self {
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out.data[j * n + i] = self.data[i * n + j];
            }
        }
        out
    }

    /// `[A, B] = AB − BA`.
    pub fn commutator(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        Ok(&self.mul_unchecked(other) - &other.mul_unchecked(self))
    }

    /// `{A, B} = AB + BA`.
    pub fn anticommutator(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        Ok(&self.mul_unchecked(other) + &other.mul_unchecked(self))
    }

    /// Kronecker product `self ⊗ other`.
    pub fn kron(&self, other: &Self) -> Self {
        let (n, p) = (self.dim, other.dim);
        let d = n * p;
        let mut out = Self::zeros(d);
        for i in 0..n {
            for j in 0..n {
                let a = self.data[i * n + j];
                if a.is_zero() {
                    continue;
                }
                for k in 0..p {
                    for l in 0..p {
                        out.data[(i * p + k) * d + j * p + l] = a * other.data[k * p + l];
                    }
                }
            }
        }
        out
    }

    pub fn trace(&self) -> Complex<T> {
        (0..self.dim).fold(Complex::zero(), |acc, i| acc + self[(i, i)])
    }

    pub fn scale(&self, s: Complex<T>) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|&x| x * s).collect(),
        }
    }

    pub fn scale_real(&self, s: T) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|&x| x * s).collect(),
        }
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> T {
        self.data.iter().fold(T::zero(), |m, z| m.max(z.norm()))
    }

    /// Induced 1-norm (maximum absolute column sum).
    pub fn one_norm(&self) -> T {
        let n = self.dim;
        (0..n)
            .map(|j| (0..n).fold(T::zero(), |s, i| s + self.data[i * n + j].norm()))
            .fold(T::zero(), T::max)
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// `max |A − A†|` over entries.
    pub fn hermiticity_residual(&self) -> T {
        let n = self.dim;
        let mut r = T::zero();
        for i in 0..n {
            for j in i..n {
                r = r.max((self.data[i * n + j] - self.data[j * n + i].conj()).norm());
            }
        }
        r
    }

    /// True iff every entry of `A − A†` has modulus at most `tol`.
    pub fn is_hermitian(&self, tol: T) -> bool {
        self.hermiticity_residual() <= tol
    }

    /// Matrix exponential by scaling and squaring around a truncated Taylor
    /// series.  The scaled argument has 1-norm at most 1/2, where 20 terms
    /// bound the truncation error well below double-precision round-off.
    pub fn expm(&self) -> Result<Self> {
        if !self.is_finite() {
            return Err(Error::NonFinite("expm argument"));
        }
        let n = self.dim;
        let norm = self.one_norm();
        let half = T::lit(0.5);
        let mut squarings = 0i32;
        if norm > half {
            squarings = (norm / half).log2().ceil().to_i32().unwrap_or(0).max(0);
        }
        let scaled = self.scale_real(T::lit(2.0).powi(-squarings));

        let mut sum = Self::identity(n);
        let mut term = Self::identity(n);
        for k in 1..=30 {
            term = term.mul_unchecked(&scaled).scale_real(T::one() / T::count(k));
            sum = &sum + &term;
            if term.max_abs() <= T::epsilon() * sum.max_abs() * T::lit(1e-2) {
                break;
            }
        }
        for _ in 0..squarings {
            sum = sum.mul_unchecked(&sum);
        }
        Ok(sum)
    }

    /// Eigenvalues of a Hermitian matrix in ascending order.
    ///
    /// Uses cyclic Jacobi rotations on the real symmetric embedding
    /// `[[Re, −Im], [Im, Re]]`, whose spectrum is that of the input with every
    /// eigenvalue doubled.
    pub fn hermitian_eigenvalues(&self) -> Vec<T> {
        let n = self.dim;
        let m = 2 * n;
        let mut a = vec![T::zero(); m * m];
        for i in 0..n {
            for j in 0..n {
                // symmetrize so small anti-Hermitian noise does not break Jacobi
                let z = (self.data[i * n + j] + self.data[j * n + i].conj()) * T::lit(0.5);
                a[i * m + j] = z.re;
                a[(i + n) * m + j + n] = z.re;
                a[i * m + j + n] = -z.im;
                a[(i + n) * m + j] = z.im;
            }
        }
        jacobi_symmetric(&mut a, m);
        let mut diag: Vec<T> = (0..m).map(|i| a[i * m + i]).collect();
        diag.sort_by(|x, y| x.partial_cmp(y).unwrap_or(std::cmp::Ordering::Equal));
        diag.into_iter().step_by(2).collect()
    }

    pub fn min_hermitian_eigenvalue(&self) -> T {
        self.hermitian_eigenvalues()[0]
    }
}

/// In-place cyclic Jacobi diagonalization of a real symmetric `m × m` matrix.
fn jacobi_symmetric<T: Real>(a: &mut [T], m: usize) {
    let off = |a: &[T]| {
        let mut s = T::zero();
        for i in 0..m {
            for j in 0..m {
                if i != j {
                    s = s + a[i * m + j] * a[i * m + j];
                }
            }
        }
        s
    };
    let scale = a.iter().fold(T::zero(), |s, &x| s + x * x);
    if scale == T::zero() {
        return;
    }
    let tol = scale * T::epsilon() * T::epsilon();
    for _sweep in 0..100 {
        if off(a) <= tol {
            return;
        }
        for p in 0..m {
            for q in (p + 1)..m {
                let apq = a[p * m + q];
                if apq == T::zero() {
                    continue;
                }
                let app = a[p * m + p];
                let aqq = a[q * m + q];
                let theta = (aqq - app) / (T::lit(2.0) * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + T::one()).sqrt());
                let c = T::one() / (t * t + T::one()).sqrt();
                let s = t * c;
                for k in 0..m {
                    let akp = a[k * m + p];
                    let akq = a[k * m + q];
                    a[k * m + p] = c * akp - s * akq;
                    a[k * m + q] = s * akp + c * akq;
                }
                for k in 0..m {
                    let apk = a[p * m + k];
                    let aqk = a[q * m + k];
                    a[p * m + k] = c * apk - s * aqk;
                    a[q * m + k] = s * apk + c * aqk;
                }
            }
        }
    }
}

impl<T> Index<(usize, usize)> for ComplexMatrix<T> {
    type Output = Complex<T>;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &Complex<T> {
        &self.data[i * self.dim + j]
    }
}

impl<T> IndexMut<(usize, usize)> for ComplexMatrix<T> {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex<T> {
        &mut self.data[i * self.dim + j]
    }
}

impl<T: Real> Add for &ComplexMatrix<T> {
    type Output = ComplexMatrix<T>;

    fn add(self, rhs: Self) -> ComplexMatrix<T> {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch in matrix sum");
        ComplexMatrix {
            dim: self.dim,
            data: self.data.iter().zip(&rhs.data).map(|(&a, &b)| a + b).collect(),
        }
    }
}

impl<T: Real> Sub for &ComplexMatrix<T> {
    type Output = ComplexMatrix<T>;

    fn sub(self, rhs: Self) -> ComplexMatrix<T> {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch in matrix difference");
        ComplexMatrix {
            dim: self.dim,
            data: self.data.iter().zip(&rhs.data).map(|(&a, &b)| a - b).collect(),
        }
    }
}

impl<T: Real> Mul for &ComplexMatrix<T> {
    type Output = ComplexMatrix<T>;

    /// Panics on dimension mismatch; use [`ComplexMatrix::matmul`] for a checked product.
    fn mul(self, rhs: Self) -> ComplexMatrix<T> {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch in matrix product");
        self.mul_unchecked(rhs)
    }
}

impl<T: Real> Neg for &ComplexMatrix<T> {
    type Output = ComplexMatrix<T>;

    fn neg(self) -> ComplexMatrix<T> {
        self.scale_real(-T::one())
    }
}

/// Pauli and ladder operators in the `{|g⟩, |e⟩}` basis.
pub mod pauli {
    use super::*;

    pub fn sigma_x<T: Real>() -> ComplexMatrix<T> {
        ComplexMatrix::from_real_rows(&[vec![T::zero(), T::one()], vec![T::one(), T::zero()]])
            .unwrap()
    }

    pub fn sigma_y<T: Real>() -> ComplexMatrix<T> {
        let i = Complex::new(T::zero(), T::one());
        ComplexMatrix::from_rows(&[vec![Complex::zero(), -i], vec![i, Complex::zero()]]).unwrap()
    }

    pub fn sigma_z<T: Real>() -> ComplexMatrix<T> {
        ComplexMatrix::from_real_rows(&[vec![-T::one(), T::zero()], vec![T::zero(), T::one()]])
            .unwrap()
    }

    /// Raising operator `|e⟩⟨g|`.
    pub fn sigma_plus<T: Real>() -> ComplexMatrix<T> {
        ComplexMatrix::unit(2, 1, 0)
    }

    /// Lowering operator `|g⟩⟨e|`.
    pub fn sigma_minus<T: Real>() -> ComplexMatrix<T> {
        ComplexMatrix::unit(2, 0, 1)
    }
}
