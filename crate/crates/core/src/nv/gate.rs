use super::model::{NuclearLevel, NvModel};
use crate::linalg::{tensor, ComplexMatrix, C64};
use crate::state::{DensityMatrix, UnitaryOp};
use crate::sum::MatrixAccumulator;
use crate::{Error, Result};
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;

/// A convex mixture of unitaries, `ρ ↦ Σ wₖ Uₖ ρ Uₖ†`, with `Σ wₖ = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct Channel {
    branches: Vec<(f64, UnitaryOp)>,
}

impl Channel {
    pub fn new(branches: Vec<(f64, UnitaryOp)>) -> Result<Self> {
        let first = branches
            .first()
            .ok_or(Error::InvalidArgument("channel needs at least one branch"))?;
        let dim = first.1.dim();
        let mut total = 0.0;
        for (w, u) in &branches {
            if !(*w >= 0.0) {
                return Err(Error::InvalidArgument(
                    "branch weights must be non-negative",
                ));
            }
            if u.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: u.dim(),
                });
            }
            total += w;
        }
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidArgument("branch weights must sum to 1"));
        }
        Ok(Self { branches })
    }

    pub fn unitary(u: UnitaryOp) -> Self {
        Self {
            branches: vec![(1.0, u)],
        }
    }

    pub fn dim(&self) -> usize {
        self.branches[0].1.dim()
    }

    pub fn branches(&self) -> &[(f64, UnitaryOp)] {
        &self.branches
    }

    pub fn apply(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        if rho.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: rho.dim(),
            });
        }
        Ok(DensityMatrix::from_channel_output(
            self.apply_matrix(rho.matrix()),
        ))
    }

    pub(crate) fn apply_matrix(&self, rho: &ComplexMatrix) -> ComplexMatrix {
        if let [(_, u)] = self.branches.as_slice() {
            return rho.conjugate_by(u.matrix());
        }
        let mut acc = MatrixAccumulator::new(rho.rows(), rho.cols());
        for (w, u) in &self.branches {
            if *w > 0.0 {
                acc.add_scaled(&rho.conjugate_by(u.matrix()), *w);
            }
        }
        acc.finish()
    }

    /// Kraus operators `√wₖ Uₖ`.
    pub fn kraus_operators(&self) -> Vec<ComplexMatrix> {
        self.branches
            .iter()
            .map(|(w, u)| u.matrix().scale_real(w.sqrt()))
            .collect()
    }
}

fn sigma_x() -> ComplexMatrix {
    let mut x = ComplexMatrix::zeros(2, 2);
    x[(0, 1)] = C64::new(1.0, 0.0);
    x[(1, 0)] = C64::new(1.0, 0.0);
    x
}

/// Ideal selective flip: `σx` on the electron for every nuclear level except
/// `protected`, identity on `|·⟩e|protected⟩n`.
pub fn selective_flip_unitary(protected: NuclearLevel) -> UnitaryOp {
    let mut unprotected = ComplexMatrix::identity(3);
    let k = protected.index();
    unprotected[(k, k)] = C64::new(0.0, 0.0);
    let kept = ComplexMatrix::basis_projector(3, k);
    let m = &tensor(&sigma_x(), &unprotected) + &tensor(&ComplexMatrix::identity(2), &kept);
    UnitaryOp::from_trusted(m)
}

/// Controlled gate protecting one nuclear level: with probability `p` the
/// ancilla of every unprotected level is flipped, otherwise nothing happens.
/// The protected subspace is left exactly untouched.
pub fn controlled_gate(protected: NuclearLevel, p: f64) -> Result<Channel> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::FractionOutOfRange {
            name: "flip probability",
            value: p,
        });
    }
    Channel::new(vec![
        (1.0 - p, UnitaryOp::identity(6)),
        (p, selective_flip_unitary(protected)),
    ])
}

/// Square MW pulse on the electron line of `target`, in the frame rotating
/// at that line, with every level of `|1⟩e` shifted by `delta0`.
///
/// Each nuclear level `m` only couples `|1,m⟩ ↔ |0,m⟩`, so the propagator is
/// assembled from closed-form 2×2 blocks for
/// `H_m = 2π[[Δ_m, Ω/2], [Ω/2, 0]]`, `Δ_m = A(m − m_target) + δ₀`.
pub(crate) fn mw_pulse(
    model: &NvModel,
    target: NuclearLevel,
    rabi: f64,
    duration: f64,
    delta0: f64,
) -> Result<UnitaryOp> {
    if !(duration >= 0.0 && duration.is_finite() && rabi.is_finite() && delta0.is_finite()) {
        return Err(Error::InvalidArgument(
            "pulse parameters must be finite, duration non-negative",
        ));
    }
    let mut u = ComplexMatrix::zeros(6, 6);
    for n in NuclearLevel::ALL {
        let detuning = model.a_hf * (n.m() - target.m()) + delta0;
        let block = two_level_propagator(detuning, rabi, duration);
        let (one, zero) = (n.index(), 3 + n.index());
        u[(one, one)] = block[0];
        u[(one, zero)] = block[1];
        u[(zero, one)] = block[2];
        u[(zero, zero)] = block[3];
    }
    Ok(UnitaryOp::from_trusted(u))
}

/// `exp(−i·2π[[Δ, Ω/2], [Ω/2, 0]]·t)`, row-major.
fn two_level_propagator(detuning: f64, rabi: f64, t: f64) -> [C64; 4] {
    let global = C64::from_polar(1.0, -PI * detuning * t);
    let g = detuning.hypot(rabi);
    if g == 0.0 {
        return [
            C64::new(1.0, 0.0),
            C64::new(0.0, 0.0),
            C64::new(0.0, 0.0),
            C64::new(1.0, 0.0),
        ];
    }
    let (s, c) = (PI * g * t).sin_cos();
    let (nz, nx) = (detuning / g, rabi / g);
    let diag_plus = C64::new(c, -s * nz);
    let diag_minus = C64::new(c, s * nz);
    let off = C64::new(0.0, -s * nx);
    [
        global * diag_plus,
        global * off,
        global * off,
        global * diag_minus,
    ]
}

/// Finite-duration realization of the controlled gate: one selective MW
/// π-pulse per unprotected line. With probability `1 − p` the pulses fail
/// and the system only evolves freely for the same time.
pub(crate) fn finite_controlled_gate(
    model: &NvModel,
    protected: NuclearLevel,
    p: f64,
    pi_duration: f64,
    delta0: f64,
) -> Result<Channel> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::FractionOutOfRange {
            name: "flip probability",
            value: p,
        });
    }
    let rabi = 0.5 / pi_duration;
    let mut pulsed = UnitaryOp::identity(6);
    let mut idle = UnitaryOp::identity(6);
    for n in NuclearLevel::ALL {
        if n != protected {
            pulsed = mw_pulse(model, n, rabi, pi_duration, delta0)?.then_after(&pulsed);
            idle = mw_pulse(model, n, 0.0, pi_duration, delta0)?.then_after(&idle);
        }
    }
    Channel::new(vec![(1.0 - p, idle), (p, pulsed)])
}
