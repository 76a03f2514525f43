//! Imperfection channels: quasi-static Gaussian electron dephasing,
//! imperfect polarization, free-induction-decay synthesis and fitting.

mod dephasing;
mod fit;
mod imperfection;
mod sampling;

pub use dephasing::{
    dephasing_evolution, electron_noise_operator, fid_curve, imperfect_initial_state,
};
pub use fit::{fit_gaussian_decay, solve_linear, DecayFit};
pub use imperfection::{Averaging, ImperfectionModel};
pub use sampling::{add_readout_noise, gauss_hermite, sample_detunings, DetuningSample};
