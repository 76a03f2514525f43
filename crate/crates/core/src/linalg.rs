//! Dense complex matrices for small Hilbert spaces.
//!
//! Everything here is sized for dimension ≤ 16: storage is a row-major
//! `Vec<C64>`, products are naive triple loops, and the Hermitian eigenvalue
//! routine is cyclic Jacobi on the real symmetric embedding.

use crate::{Error, Result};
use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Add, Index, IndexMut, Mul, Sub};
#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;

pub use num_complex::Complex64 as C64;

/// Largest dimension accepted by [`matrix_exp`] and the eigenvalue routine.
pub const MAX_DIM: usize = 16;

/// Taylor order used after scaling to `‖A‖₁ ≤ 1/2`; the truncation error
/// `0.5¹⁹/19!` is far below double precision.
const TAYLOR_ORDER: usize = 18;

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![C64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim, dim);
        for i in 0..dim {
            m[(i, i)] = C64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidArgument("matrix dimensions must be positive"));
        }
        if data.len() != rows * cols {
            return Err(Error::BadShape {
                len: data.len(),
                expected: rows * cols,
            });
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Self { rows, cols, data }
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let n = diag.len();
        Self::from_fn(n, n, |r, c| {
            if r == c {
                C64::new(diag[r], 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        })
    }

    /// Rank-one projector `|k⟩⟨k|` in dimension `dim`.
    pub fn basis_projector(dim: usize, k: usize) -> Self {
        let mut m = Self::zeros(dim, dim);
        m[(k, k)] = C64::new(1.0, 0.0);
        m
    }

    /// Outer product `|a⟩⟨b|`.
    pub fn outer(a: &[C64], b: &[C64]) -> Self {
        Self::from_fn(a.len(), b.len(), |r, c| a[r] * b[c].conj())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    /// Square dimension, or an error for rectangular matrices.
    pub fn dim(&self) -> Result<usize> {
        if self.is_square() {
            Ok(self.rows)
        } else {
            Err(Error::NotSquare {
                rows: self.rows,
                cols: self.cols,
            })
        }
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self[(c, r)].conj())
    }

    pub fn scale(&self, s: C64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    pub fn scale_real(&self, s: f64) -> Self {
        self.scale(C64::new(s, 0.0))
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn diagonal_real(&self) -> Vec<f64> {
        (0..self.rows.min(self.cols))
            .map(|i| self[(i, i)].re)
            .collect()
    }

    /// Maximum entrywise modulus of `self − other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// `max |M − M†|` entrywise.
    pub fn hermitian_deviation(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let mut worst = 0.0f64;
        for r in 0..self.rows {
            for c in r..self.cols {
                worst = worst.max((self[(r, c)] - self[(c, r)].conj()).norm());
            }
        }
        worst
    }

    /// Induced 1-norm (maximum absolute column sum).
    pub fn norm_one(&self) -> f64 {
        (0..self.cols)
            .map(|c| (0..self.rows).map(|r| self[(r, c)].norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// `U · self · U†`.
    pub fn conjugate_by(&self, u: &Self) -> Self {
        &(u * self) * &u.adjoint()
    }

    pub fn commutator(&self, other: &Self) -> Self {
        &(self * other) - &(other * self)
    }

    /// Matrix-vector product.
    pub fn apply(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|r| (0..self.cols).map(|c| self[(r, c)] * v[c]).sum())
            .collect()
    }

    /// Eigenvalues of a Hermitian matrix in ascending order.
    ///
    /// The `n × n` Hermitian `H = A + iB` is embedded as the real symmetric
    /// `[[A, −B], [B, A]]`, whose spectrum is that of `H` with every value
    /// doubled; cyclic Jacobi then diagonalizes the embedding.
    pub fn hermitian_eigenvalues(&self) -> Result<Vec<f64>> {
        let n = self.dim()?;
        if n > MAX_DIM {
            return Err(Error::UnsupportedDimension(n));
        }
        let dev = self.hermitian_deviation();
        if dev > 1e-9 {
            return Err(Error::NotHermitian(dev));
        }
        let m = 2 * n;
        let mut a = vec![0.0f64; m * m];
        for r in 0..n {
            for c in 0..n {
                let z = self[(r, c)];
                a[r * m + c] = z.re;
                a[(r + n) * m + (c + n)] = z.re;
                a[r * m + (c + n)] = -z.im;
                a[(r + n) * m + c] = z.im;
            }
        }
        jacobi_symmetric(&mut a, m);
        let mut eig: Vec<f64> = (0..m).map(|i| a[i * m + i]).collect();
        eig.sort_by(|x, y| x.partial_cmp(y).unwrap_or(core::cmp::Ordering::Equal));
        // Each eigenvalue appears twice in the embedding.
        Ok(eig.into_iter().step_by(2).collect())
    }
}

fn jacobi_symmetric(a: &mut [f64], m: usize) {
    for _sweep in 0..100 {
        let off: f64 = (0..m)
            .flat_map(|r| (0..m).filter(move |&c| c != r).map(move |c| (r, c)))
            .map(|(r, c)| a[r * m + c] * a[r * m + c])
            .sum();
        if off < 1e-30 {
            return;
        }
        for p in 0..m {
            for q in (p + 1)..m {
                let apq = a[p * m + q];
                if apq.abs() < 1e-300 {
                    continue;
                }
                let app = a[p * m + p];
                let aqq = a[q * m + q];
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
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

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;

    fn index(&self, (r, c): (usize, usize)) -> &C64 {
        &self.data[r * self.cols + c]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut C64 {
        &mut self.data[r * self.cols + c]
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.cols, rhs.rows, "matrix product shape mismatch");
        let mut out = ComplexMatrix::zeros(self.rows, rhs.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self.data[r * self.cols + k];
                if a.re == 0.0 && a.im == 0.0 {
                    continue;
                }
                let row = &rhs.data[k * rhs.cols..(k + 1) * rhs.cols];
                let dst = &mut out.data[r * rhs.cols..(r + 1) * rhs.cols];
                for (d, b) in dst.iter_mut().zip(row) {
                    *d += a * b;
                }
            }
        }
        out
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }
}

/// Kronecker product `a ⊗ b` with the row-major block convention: entry
/// `(i·rows(b) + k, j·cols(b) + l)` is `a[i][j]·b[k][l]`.
pub fn tensor(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    ComplexMatrix::from_fn(a.rows * b.rows, a.cols * b.cols, |r, c| {
        a[(r / b.rows, c / b.cols)] * b[(r % b.rows, c % b.cols)]
    })
}

/// `exp(scale · m)` by scaling and squaring around a fixed-order Taylor
/// polynomial.
pub fn matrix_exp(m: &ComplexMatrix, scale: C64) -> Result<ComplexMatrix> {
    let n = m.dim()?;
    if n > MAX_DIM {
        return Err(Error::UnsupportedDimension(n));
    }
    let a = m.scale(scale);
    let norm = a.norm_one();
    if !norm.is_finite() {
        return Err(Error::InvalidArgument(
            "matrix exponential of a non-finite matrix",
        ));
    }
    let squarings = if norm > 0.5 {
        (norm / 0.5).log2().ceil() as i32
    } else {
        0
    };
    let a = a.scale_real(0.5f64.powi(squarings));

    // Horner: I + A(I + A/2(I + A/3(...)))
    let id = ComplexMatrix::identity(n);
    let mut acc = id.clone();
    for k in (1..=TAYLOR_ORDER).rev() {
        acc = &id + &(&a * &acc).scale_real(1.0 / k as f64);
    }
    for _ in 0..squarings {
        acc = &acc * &acc;
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn exp_of_zero_is_identity() {
        let z = ComplexMatrix::zeros(4, 4);
        let e = matrix_exp(&z, c(3.0, -7.0)).unwrap();
        assert_eq!(e.max_abs_diff(&ComplexMatrix::identity(4)), 0.0);
    }

    #[test]
    fn exp_of_diagonal_is_entrywise() {
        let sz = ComplexMatrix::from_real_diagonal(&[1.0, 0.0, -1.0]);
        let e = matrix_exp(&sz, c(0.0, -core::f64::consts::PI)).unwrap();
        let expected = ComplexMatrix::from_real_diagonal(&[-1.0, 1.0, -1.0]);
        assert!(e.max_abs_diff(&expected) < 1e-13);
    }

    #[test]
    fn exp_rejects_rectangular() {
        let m = ComplexMatrix::zeros(2, 3);
        assert_eq!(
            matrix_exp(&m, c(1.0, 0.0)),
            Err(Error::NotSquare { rows: 2, cols: 3 })
        );
    }

    #[test]
    fn exp_handles_large_phases() {
        // 2π × 4.3 GHz × 15 µs, the scale of a lab-frame NV Hamiltonian.
        let phase = 2.0 * core::f64::consts::PI * 4.3e9 * 15e-6;
        let m = ComplexMatrix::from_real_diagonal(&[1.0, 0.0]);
        let e = matrix_exp(&m, c(0.0, -phase)).unwrap();
        assert_abs_diff_eq!(e[(0, 0)].norm(), 1.0, epsilon = 1e-9);
        let expected = C64::from_polar(1.0, -phase);
        assert!((e[(0, 0)] - expected).norm() < 1e-8);
    }

    #[test]
    fn tensor_of_identities() {
        let i6 = tensor(&ComplexMatrix::identity(2), &ComplexMatrix::identity(3));
        assert_eq!(i6, ComplexMatrix::identity(6));
    }

    #[test]
    fn tensor_block_layout() {
        let upper = ComplexMatrix::from_real_diagonal(&[1.0, 0.0]);
        let p = tensor(&upper, &ComplexMatrix::identity(3));
        assert_eq!(p.diagonal_real(), vec![1.0, 1.0, 1.0, 0.0, 0.0, 0.0]);

        let swap = ComplexMatrix::from_fn(
            2,
            2,
            |r, c_| if r != c_ { c(1.0, 0.0) } else { c(0.0, 0.0) },
        );
        let x = tensor(&swap, &ComplexMatrix::identity(3));
        let mut ket4 = vec![c(0.0, 0.0); 6];
        ket4[3] = c(1.0, 0.0);
        let out = x.apply(&ket4);
        assert_eq!(out[0], c(1.0, 0.0));
        assert_eq!(out.iter().filter(|z| z.norm() > 0.0).count(), 1);
    }

    #[test]
    fn from_vec_checks_length() {
        assert_eq!(
            ComplexMatrix::from_vec(2, 2, vec![c(0.0, 0.0); 3]),
            Err(Error::BadShape {
                len: 3,
                expected: 4
            })
        );
    }

    #[test]
    fn eigenvalues_of_complex_hermitian() {
        // σy has eigenvalues ±1.
        let sy = ComplexMatrix::from_vec(
            2,
            2,
            vec![c(0.0, 0.0), c(0.0, -1.0), c(0.0, 1.0), c(0.0, 0.0)],
        )
        .unwrap();
        let ev = sy.hermitian_eigenvalues().unwrap();
        assert_abs_diff_eq!(ev[0], -1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(ev[1], 1.0, epsilon = 1e-12);
    }
}
