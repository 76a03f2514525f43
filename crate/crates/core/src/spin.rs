//! Spin-1 and spin-1/2 operators and the closed-form rotations about x.

use crate::linalg::{matrix_exp, ComplexMatrix, C64};
use crate::state::UnitaryOp;
use crate::{Error, Result};
use alloc::vec;
use core::f64::consts::FRAC_1_SQRT_2;
#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;

/// Spin-1 operators in the basis `(|+1⟩, |0⟩, |−1⟩)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpinOps {
    pub sx: ComplexMatrix,
    pub sz: ComplexMatrix,
    /// `Sz²`, the quadrupolar `Iz²` term.
    pub iz_sq: ComplexMatrix,
}

impl SpinOps {
    /// `Sy = −i[Sz, Sx]`.
    pub fn sy(&self) -> ComplexMatrix {
        self.sz.commutator(&self.sx).scale(C64::new(0.0, -1.0))
    }
}

fn re(x: f64) -> C64 {
    C64::new(x, 0.0)
}

pub fn spin1_operators() -> SpinOps {
    let h = re(FRAC_1_SQRT_2);
    let z = re(0.0);
    let sx = ComplexMatrix::from_vec(3, 3, vec![z, h, z, h, z, h, z, h, z]).expect("3x3");
    let sz = ComplexMatrix::from_real_diagonal(&[1.0, 0.0, -1.0]);
    let iz_sq = &sz * &sz;
    SpinOps { sx, sz, iz_sq }
}

/// Spin-1/2 `Sx = σx/2`, basis `(|↑⟩, |↓⟩)`.
pub fn spin_half_sx() -> ComplexMatrix {
    ComplexMatrix::from_vec(2, 2, vec![re(0.0), re(0.5), re(0.5), re(0.0)]).expect("2x2")
}

/// `e^{−iθSx}` for spin 1, from the closed form.
pub fn rotation_unitary(theta: f64) -> UnitaryOp {
    let (s, c) = theta.sin_cos();
    let corner = re((1.0 + c) / 2.0);
    let anti = re((c - 1.0) / 2.0);
    let edge = C64::new(0.0, -s * FRAC_1_SQRT_2);
    let m = ComplexMatrix::from_vec(
        3,
        3,
        vec![corner, edge, anti, edge, re(c), edge, anti, edge, corner],
    )
    .expect("3x3");
    UnitaryOp::from_trusted(m)
}

/// `e^{−iθσx/2}`.
pub fn qubit_rotation(theta: f64) -> UnitaryOp {
    let (s, c) = (theta / 2.0).sin_cos();
    let off = C64::new(0.0, -s);
    let m = ComplexMatrix::from_vec(2, 2, vec![re(c), off, off, re(c)]).expect("2x2");
    UnitaryOp::from_trusted(m)
}

/// The x-rotation generator for a spin whose multiplicity is `dim`.
pub fn sx_for_dim(dim: usize) -> Result<ComplexMatrix> {
    match dim {
        2 => Ok(spin_half_sx()),
        3 => Ok(spin1_operators().sx),
        d => Err(Error::UnsupportedDimension(d)),
    }
}

/// `e^{−iθSx}` for spin-1/2 (`dim = 2`) or spin-1 (`dim = 3`).
pub fn rotation_for_dim(dim: usize, theta: f64) -> Result<UnitaryOp> {
    match dim {
        2 => Ok(qubit_rotation(theta)),
        3 => Ok(rotation_unitary(theta)),
        d => Err(Error::UnsupportedDimension(d)),
    }
}

/// Same rotation via the generic exponential; the closed forms are checked
/// against this.
pub fn rotation_by_exponential(dim: usize, theta: f64) -> Result<UnitaryOp> {
    let sx = sx_for_dim(dim)?;
    matrix_exp(&sx, C64::new(0.0, -theta)).map(UnitaryOp::from_trusted)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use core::f64::consts::PI;

    #[test]
    fn sx_entries() {
        let ops = spin1_operators();
        assert_abs_diff_eq!(ops.sx[(0, 1)].re, 1.0 / 2f64.sqrt(), epsilon = 1e-15);
        assert_eq!(ops.sx[(0, 2)], re(0.0));
        assert_eq!(ops.sx.hermitian_deviation(), 0.0);
    }

    #[test]
    fn sz_eigenvector() {
        let ops = spin1_operators();
        let v = ops.sz.apply(&[re(1.0), re(0.0), re(0.0)]);
        assert_eq!(v, vec![re(1.0), re(0.0), re(0.0)]);
        assert_eq!(ops.iz_sq.diagonal_real(), vec![1.0, 0.0, 1.0]);
    }

    #[test]
    fn commutation_relations_close() {
        let ops = spin1_operators();
        let sy = ops.sy();
        assert!(sy.hermitian_deviation() < 1e-15);
        // [Sx, Sy] = i Sz
        let lhs = ops.sx.commutator(&sy);
        assert!(lhs.max_abs_diff(&ops.sz.scale(C64::new(0.0, 1.0))) < 1e-12);
        // Casimir: Sx² + Sy² + Sz² = 2·I
        let cas = &(&(&ops.sx * &ops.sx) + &(&sy * &sy)) + &(&ops.sz * &ops.sz);
        assert!(cas.max_abs_diff(&ComplexMatrix::identity(3).scale_real(2.0)) < 1e-12);
    }

    #[test]
    fn rotation_by_pi() {
        let u = rotation_unitary(PI);
        let expected = ComplexMatrix::from_vec(
            3,
            3,
            vec![
                re(0.0),
                re(0.0),
                re(-1.0),
                re(0.0),
                re(-1.0),
                re(0.0),
                re(-1.0),
                re(0.0),
                re(0.0),
            ],
        )
        .unwrap();
        assert!(u.matrix().max_abs_diff(&expected) < 1e-15);
    }

    #[test]
    fn rotation_at_zero_is_identity() {
        assert_eq!(rotation_unitary(0.0).matrix(), &ComplexMatrix::identity(3));
        assert_eq!(qubit_rotation(0.0).matrix(), &ComplexMatrix::identity(2));
    }

    #[test]
    fn rotation_at_headline_angle() {
        let theta = 0.416 * PI;
        let u = rotation_unitary(theta);
        let expected = ((1.0 + theta.cos()) / 2.0).powi(2);
        assert_abs_diff_eq!(u.matrix()[(0, 0)].norm_sqr(), expected, epsilon = 1e-15);
        assert_abs_diff_eq!(u.matrix()[(0, 0)].norm_sqr(), 0.3974, epsilon = 1e-4);
        assert_abs_diff_eq!(u.matrix()[(2, 0)].norm_sqr(), 0.1366, epsilon = 1e-4);
    }

    #[test]
    fn closed_forms_match_exponential() {
        for k in 0..40 {
            let theta = -3.0 + 0.17 * k as f64;
            for dim in [2, 3] {
                let a = rotation_for_dim(dim, theta).unwrap();
                let b = rotation_by_exponential(dim, theta).unwrap();
                assert!(
                    a.matrix().max_abs_diff(b.matrix()) < 1e-12,
                    "dim {dim} θ {theta}"
                );
            }
        }
    }

    #[test]
    fn unsupported_dimension() {
        assert_eq!(sx_for_dim(4).unwrap_err(), Error::UnsupportedDimension(4));
    }
}
