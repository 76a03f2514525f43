//! Leggett-Garg protocol engine and NV-center three-level simulator.
//!
//! The crate is `no_std` and only needs `alloc`. It covers:
//!
//! * [`linalg`], [`state`], [`spin`]: dense complex linear algebra for Hilbert
//!   spaces of dimension at most 16, density matrices, unitaries and spin
//!   operators.
//! * [`measurement`] and [`protocol`]: Lüders / von Neumann measurement
//!   updates, temporal correlators, `K3` and `Kn` strings, macrorealist bounds
//!   and the violation-maximizing angle search.
//! * [`nv`]: the six-level electron ⊗ ¹⁴N model, controlled gates with
//!   ancilla postselection, population tables and their assembly into the
//!   `K3` function, plus synthetic ODMR and repeated-gate experiments.
//! * [`noise`]: quasi-static Gaussian dephasing, imperfect polarization,
//!   free-induction-decay synthesis and fitting.
//!
//! Basis conventions are global: the qutrit is ordered `(|+1⟩, |0⟩, |−1⟩)`
//! and the six-level system `|1⟩ … |6⟩` is `|1⟩e|+1⟩n, |1⟩e|0⟩n, |1⟩e|−1⟩n,
//! |0⟩e|+1⟩n, |0⟩e|0⟩n, |0⟩e|−1⟩n`. Frequencies are stored in Hz and
//! Hamiltonians carry the explicit `2π`.

#![no_std]
#![deny(unsafe_code)]
// `!(x >= 0.0)` is how NaN gets rejected along with negatives.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

mod error;
pub mod linalg;
pub mod measurement;
pub mod noise;
pub mod nv;
pub mod protocol;
pub mod spin;
pub mod state;
mod sum;

pub use error::{Error, Result};
pub use linalg::{matrix_exp, tensor, ComplexMatrix, C64};
pub use measurement::{
    measure, standard_qubit_scheme, standard_qutrit_scheme, Dichotomic, MeasurementBranch,
    MeasurementScheme, UpdateRule,
};
pub use protocol::{
    analytic_correlators, classical_extrema, find_max_k3, k3_protocol, kn_string, CorrelatorSet,
    K3Maximum, LgString,
};
pub use spin::{rotation_unitary, spin1_operators, SpinOps};
pub use state::{evolve, expectation, DensityMatrix, UnitaryOp};
