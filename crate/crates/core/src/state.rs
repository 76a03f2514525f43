//! Density matrices, unitaries, and the two primitive operations on them.

use crate::linalg::{ComplexMatrix, C64};
use crate::{Error, Result};
use alloc::vec::Vec;
#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;

pub const HERMITIAN_TOL: f64 = 1e-12;
pub const TRACE_TOL: f64 = 1e-10;
pub const EIGEN_FLOOR: f64 = -1e-10;
pub const UNITARY_TOL: f64 = 1e-10;

/// Trace-one, Hermitian, positive-semidefinite state ρ.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
}

impl DensityMatrix {
    /// Validates Hermiticity, unit trace and the eigenvalue floor.
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        matrix.dim()?;
        let dev = matrix.hermitian_deviation();
        if dev > HERMITIAN_TOL {
            return Err(Error::NotHermitian(dev));
        }
        let tr = matrix.trace();
        if (tr.re - 1.0).abs() > TRACE_TOL || tr.im.abs() > TRACE_TOL {
            return Err(Error::InvalidState("trace differs from 1"));
        }
        let min_eig = matrix
            .hermitian_eigenvalues()?
            .first()
            .copied()
            .unwrap_or(0.0);
        if min_eig < EIGEN_FLOOR {
            return Err(Error::InvalidState("negative eigenvalue"));
        }
        Ok(Self { matrix })
    }

    /// For matrices produced by trace- and positivity-preserving maps from a
    /// valid state; skips the eigenvalue check.
    pub(crate) fn from_channel_output(matrix: ComplexMatrix) -> Self {
        debug_assert!(matrix.hermitian_deviation() < 1e-9);
        Self { matrix }
    }

    /// Normalizes a positive operator by its trace.
    pub(crate) fn normalized(matrix: ComplexMatrix) -> Self {
        let tr = matrix.trace().re;
        Self::from_channel_output(matrix.scale_real(1.0 / tr))
    }

    /// Pure state `|ψ⟩⟨ψ|`; `psi` is normalized here.
    pub fn pure(psi: &[C64]) -> Result<Self> {
        let norm: f64 = psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if psi.is_empty() || norm == 0.0 || !norm.is_finite() {
            return Err(Error::InvalidState("pure state needs a non-zero vector"));
        }
        let v: Vec<C64> = psi.iter().map(|z| z / norm).collect();
        Ok(Self {
            matrix: ComplexMatrix::outer(&v, &v),
        })
    }

    /// `|k⟩⟨k|`.
    pub fn basis(dim: usize, k: usize) -> Result<Self> {
        if k >= dim {
            return Err(Error::InvalidArgument("basis index out of range"));
        }
        Ok(Self {
            matrix: ComplexMatrix::basis_projector(dim, k),
        })
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self {
            matrix: ComplexMatrix::identity(dim).scale_real(1.0 / dim as f64),
        }
    }

    /// Diagonal state from a probability vector.
    pub fn from_populations(pops: &[f64]) -> Result<Self> {
        if pops.iter().any(|&p| !(p >= 0.0)) {
            return Err(Error::InvalidState("populations must be non-negative"));
        }
        let total: f64 = pops.iter().sum();
        if (total - 1.0).abs() > TRACE_TOL {
            return Err(Error::InvalidState("populations must sum to 1"));
        }
        Ok(Self {
            matrix: ComplexMatrix::from_real_diagonal(pops),
        })
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace().re
    }

    pub fn populations(&self) -> Vec<f64> {
        self.matrix.diagonal_real()
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.matrix
            .hermitian_eigenvalues()
            .ok()
            .and_then(|e| e.first().copied())
            .unwrap_or(f64::NAN)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct UnitaryOp {
    matrix: ComplexMatrix,
}

impl UnitaryOp {
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        let dim = matrix.dim()?;
        let dev = (&matrix.adjoint() * &matrix).max_abs_diff(&ComplexMatrix::identity(dim));
        if dev > UNITARY_TOL {
            return Err(Error::NotUnitary(dev));
        }
        Ok(Self { matrix })
    }

    /// For matrices that are unitary by construction (closed forms, exponentials
    /// of anti-Hermitian generators).
    pub(crate) fn from_trusted(matrix: ComplexMatrix) -> Self {
        Self { matrix }
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            matrix: ComplexMatrix::identity(dim),
        }
    }

    /// `exp(−i·h·t)` for Hermitian `h`.
    pub fn from_hamiltonian(h: &ComplexMatrix, t: f64) -> Result<Self> {
        let dev = h.hermitian_deviation();
        if dev > 1e-9 * h.norm_one().max(1.0) {
            return Err(Error::NotHermitian(dev));
        }
        crate::matrix_exp(h, C64::new(0.0, -t)).map(Self::from_trusted)
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    /// `self · other`, i.e. `other` acts first.
    pub fn then_after(&self, other: &UnitaryOp) -> UnitaryOp {
        Self::from_trusted(&self.matrix * &other.matrix)
    }

    pub fn adjoint(&self) -> UnitaryOp {
        Self::from_trusted(self.matrix.adjoint())
    }

    pub fn unitarity_deviation(&self) -> f64 {
        (&self.matrix.adjoint() * &self.matrix).max_abs_diff(&ComplexMatrix::identity(self.dim()))
    }
}

/// `U ρ U†`.
pub fn evolve(rho: &DensityMatrix, u: &UnitaryOp) -> Result<DensityMatrix> {
    if rho.dim() != u.dim() {
        return Err(Error::DimensionMismatch {
            expected: rho.dim(),
            found: u.dim(),
        });
    }
    Ok(DensityMatrix::from_channel_output(
        rho.matrix.conjugate_by(&u.matrix),
    ))
}

/// `Tr(ρ·O)` for Hermitian `O`.
pub fn expectation(rho: &DensityMatrix, observable: &ComplexMatrix) -> Result<f64> {
    let dim = observable.dim()?;
    if dim != rho.dim() {
        return Err(Error::DimensionMismatch {
            expected: rho.dim(),
            found: dim,
        });
    }
    let dev = observable.hermitian_deviation();
    if dev > 1e-10 {
        return Err(Error::NotHermitian(dev));
    }
    let mut acc = C64::new(0.0, 0.0);
    for r in 0..dim {
        for c in 0..dim {
            acc += rho.matrix[(r, c)] * observable[(c, r)];
        }
    }
    if acc.im.abs() > 1e-10 {
        return Err(Error::NotHermitian(acc.im.abs()));
    }
    Ok(acc.re)
}
