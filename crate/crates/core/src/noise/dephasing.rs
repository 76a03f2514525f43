use super::imperfection::ImperfectionModel;
use super::sampling::{sample_detunings, DetuningSample};
use crate::linalg::{matrix_exp, tensor, ComplexMatrix, C64};
use crate::state::{expectation, DensityMatrix};
use crate::sum::MatrixAccumulator;
use crate::{Error, Result};
use alloc::vec::Vec;
use core::f64::consts::PI;

/// The electron operator that δ₀ couples to: `diag(1, 0)` on `(|1⟩e, |0⟩e)`,
/// tensored with `I₃` for the six-level system.
pub fn electron_noise_operator(dim: usize) -> Result<ComplexMatrix> {
    let e = ComplexMatrix::from_real_diagonal(&[1.0, 0.0]);
    match dim {
        2 => Ok(e),
        6 => Ok(tensor(&e, &ComplexMatrix::identity(3))),
        d => Err(Error::UnsupportedDimension(d)),
    }
}

/// `(pol_e|0⟩⟨0| + (1−pol_e)|1⟩⟨1|)e ⊗ (pol_n|+1⟩⟨+1| + (1−pol_n)/2 (|0⟩⟨0| + |−1⟩⟨−1|))n`.
pub fn imperfect_initial_state(model: &ImperfectionModel) -> Result<DensityMatrix> {
    model.validate()?;
    let electron = [1.0 - model.pol_e, model.pol_e];
    let rest = (1.0 - model.pol_n) / 2.0;
    let nuclear = [model.pol_n, rest, rest];
    let pops: Vec<f64> = electron
        .iter()
        .flat_map(|e| nuclear.iter().map(move |n| e * n))
        .collect();
    Ok(DensityMatrix::from_channel_output(
        ComplexMatrix::from_real_diagonal(&pops),
    ))
}

/// `Σ w · U(δ₀) ρ U(δ₀)†` with `U(δ₀) = exp(−i(H_static + 2π δ₀ N)·t)` and `N`
/// the electron noise operator.
pub fn dephasing_evolution(
    rho: &DensityMatrix,
    h_static: &ComplexMatrix,
    duration: f64,
    samples: &[DetuningSample],
) -> Result<DensityMatrix> {
    let dim = h_static.dim()?;
    if dim != rho.dim() {
        return Err(Error::DimensionMismatch {
            expected: rho.dim(),
            found: dim,
        });
    }
    if !(duration >= 0.0) {
        return Err(Error::InvalidArgument("duration must be non-negative"));
    }
    if samples.is_empty() {
        return Err(Error::InvalidArgument("no detuning samples"));
    }
    let noise = electron_noise_operator(dim)?;
    let mut acc = MatrixAccumulator::new(dim, dim);
    for s in samples {
        let h = h_static + &noise.scale_real(2.0 * PI * s.delta0);
        let u = matrix_exp(&h, C64::new(0.0, -duration))?;
        acc.add_scaled(&rho.matrix().conjugate_by(&u), s.weight);
    }
    Ok(DensityMatrix::from_channel_output(acc.finish()))
}

/// Ramsey signal `P0(t)` of the electron: ideal π/2 pulse, free evolution
/// with reference detuning `delta_ref` (Hz) plus the dephasing ensemble,
/// closing π/2 pulse, readout of `|0⟩e`.
pub fn fid_curve(
    model: &ImperfectionModel,
    t_grid: &[f64],
    delta_ref: f64,
) -> Result<Vec<(f64, f64)>> {
    if t_grid.iter().any(|&t| !(t >= 0.0)) {
        return Err(Error::InvalidArgument("FID times must be non-negative"));
    }
    let samples = sample_detunings(model)?;
    let half = C64::new(0.5, 0.0);
    // (|1⟩e + |0⟩e)/√2 after the opening pulse; the closing pulse maps it
    // back onto |0⟩e, so P0 is the overlap with that same state.
    let plus = ComplexMatrix::from_fn(2, 2, |_, _| half);
    let rho = DensityMatrix::from_channel_output(plus.clone());
    let h_static = electron_noise_operator(2)?.scale_real(2.0 * PI * delta_ref);
    t_grid
        .iter()
        .map(|&t| {
            let out = dephasing_evolution(&rho, &h_static, t, &samples)?;
            Ok((t, expectation(&out, &plus)?))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::noise::Averaging;
    use approx::assert_abs_diff_eq;

    #[test]
    fn perfect_polarization_is_level_four() {
        let rho = imperfect_initial_state(&ImperfectionModel::ideal()).unwrap();
        assert_eq!(rho.populations(), alloc::vec![0.0, 0.0, 0.0, 1.0, 0.0, 0.0]);
    }

    #[test]
    fn nominal_polarization_products() {
        let rho = imperfect_initial_state(&ImperfectionModel::nominal()).unwrap();
        let p = rho.populations();
        assert_abs_diff_eq!(p[3], 0.931, epsilon = 1e-15);
        assert_abs_diff_eq!(p[0], 0.049, epsilon = 1e-15);
        assert_abs_diff_eq!(p.iter().sum::<f64>(), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn no_noise_is_plain_unitary_evolution() {
        let m = ImperfectionModel::ideal();
        let samples = sample_detunings(&m).unwrap();
        let rho = DensityMatrix::pure(&[C64::new(1.0, 0.0), C64::new(0.0, 1.0)]).unwrap();
        let h = ComplexMatrix::from_real_diagonal(&[3.0, -1.0]);
        let out = dephasing_evolution(&rho, &h, 0.7, &samples).unwrap();
        let u = matrix_exp(&h, C64::new(0.0, -0.7)).unwrap();
        assert!(out.matrix().max_abs_diff(&rho.matrix().conjugate_by(&u)) < 1e-15);
    }

    #[test]
    fn electron_coherence_decays_as_gaussian() {
        let model = ImperfectionModel {
            n_samples: 41,
            ..ImperfectionModel::nominal()
        };
        let t2 = model.t2_star.unwrap();
        let samples = sample_detunings(&model).unwrap();
        let rho = DensityMatrix::pure(&[C64::new(1.0, 0.0), C64::new(1.0, 0.0)]).unwrap();
        let h = ComplexMatrix::zeros(2, 2);
        for t in [0.0, 0.5 * t2, t2, 1.7 * t2] {
            let out = dephasing_evolution(&rho, &h, t, &samples).unwrap();
            let coherence = 2.0 * out.matrix()[(0, 1)].norm();
            assert_abs_diff_eq!(coherence, (-(t / t2).powi(2)).exp(), epsilon = 1e-9);
            assert_abs_diff_eq!(out.trace(), 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn nuclear_coherence_in_zero_manifold_is_untouched() {
        let model = ImperfectionModel {
            averaging: Averaging::MonteCarlo,
            n_samples: 50,
            ..ImperfectionModel::nominal()
        };
        let samples = sample_detunings(&model).unwrap();
        // (|0⟩e|+1⟩n + |0⟩e|0⟩n)/√2 = levels 4 and 5.
        let mut psi = alloc::vec![C64::new(0.0, 0.0); 6];
        psi[3] = C64::new(1.0, 0.0);
        psi[4] = C64::new(1.0, 0.0);
        let rho = DensityMatrix::pure(&psi).unwrap();
        let out = dephasing_evolution(&rho, &ComplexMatrix::zeros(6, 6), 100e-6, &samples).unwrap();
        assert!(out.matrix().max_abs_diff(rho.matrix()) < 1e-15);
    }

    #[test]
    fn fid_starts_at_one_and_decays_to_one_over_e() {
        let model = ImperfectionModel {
            n_samples: 41,
            ..ImperfectionModel::nominal()
        };
        let t2 = model.t2_star.unwrap();
        let pts = fid_curve(&model, &[0.0, t2], 0.0).unwrap();
        assert_abs_diff_eq!(pts[0].1, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(2.0 * pts[1].1 - 1.0, (-1.0f64).exp(), epsilon = 1e-9);
    }

    #[test]
    fn rejects_negative_duration() {
        let rho = DensityMatrix::maximally_mixed(2);
        let samples = [DetuningSample {
            delta0: 0.0,
            weight: 1.0,
        }];
        let err = dephasing_evolution(&rho, &ComplexMatrix::zeros(2, 2), -1.0, &samples);
        assert!(err.is_err());
    }
}
