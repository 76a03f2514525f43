//! Calibration experiments: ODMR of the hyperfine-split electron line and the
//! repeated-gate decay that pins the flip probability `p`.

use super::gate::{controlled_gate, mw_pulse, selective_flip_unitary};
use super::model::{ElectronLevel, NuclearLevel, NvModel};
use crate::linalg::{tensor, ComplexMatrix};
use crate::state::DensityMatrix;
use crate::{Error, Result};
use alloc::vec::Vec;
#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct OdmrConfig {
    pub model: NvModel,
    /// Nuclear populations of `(|+1⟩, |0⟩, |−1⟩)` before the sweep.
    pub nuclear_populations: [f64; 3],
    /// Level protected by the optional controlled gate.
    pub protected: NuclearLevel,
    /// Length of the probing MW π-pulse, s.
    pub mw_pi_duration: f64,
}

impl Default for OdmrConfig {
    fn default() -> Self {
        let model = NvModel::default();
        Self {
            model,
            nuclear_populations: [1.0 / 3.0; 3],
            protected: NuclearLevel::Plus,
            mw_pi_duration: model.synchronized_pi_duration(crate::nv::DEFAULT_SYNC_ORDER),
        }
    }
}

/// `P(|0⟩e)` after a MW π-pulse at each frequency. The ancilla starts in
/// `|0⟩e`; when `cg_flip_prob` is given, the controlled gate with that `p`
/// acts first.
pub fn odmr_spectrum(
    config: &OdmrConfig,
    cg_flip_prob: Option<f64>,
    freqs: &[f64],
) -> Result<Vec<(f64, f64)>> {
    config.model.validate()?;
    if !(config.mw_pi_duration > 0.0 && config.mw_pi_duration.is_finite()) {
        return Err(Error::InvalidArgument("mw_pi_duration must be positive"));
    }
    let nuclear = DensityMatrix::from_populations(&config.nuclear_populations)?;
    let electron = ComplexMatrix::basis_projector(2, 1);
    let mut rho = tensor(&electron, nuclear.matrix());
    if let Some(p) = cg_flip_prob {
        rho = controlled_gate(config.protected, p)?.apply_matrix(&rho);
    }
    let rabi = 0.5 / config.mw_pi_duration;
    // Reference the sweep to the |+1⟩n line so every detuning is explicit.
    let reference = config.model.electron_line(NuclearLevel::Plus);
    freqs
        .iter()
        .map(|&f| {
            if !f.is_finite() {
                return Err(Error::InvalidArgument("frequencies must be finite"));
            }
            let u = mw_pulse(
                &config.model,
                NuclearLevel::Plus,
                rabi,
                config.mw_pi_duration,
                reference - f,
            )?;
            let out = rho.conjugate_by(u.matrix());
            Ok((f, zero_manifold_population(&out)))
        })
        .collect()
}

fn zero_manifold_population(m: &ComplexMatrix) -> f64 {
    NuclearLevel::ALL
        .iter()
        .map(|&n| {
            let k = super::model::level_index(ElectronLevel::Zero, n) - 1;
            m[(k, k)].re
        })
        .sum()
}

/// `P₀(k)` for `k = 1…k_max` repeated controlled gates acting on an
/// unprotected level: the probability that every one of the `k` gates
/// flipped the ancilla, read out as `|0⟩e` after undoing the ideal flips.
/// Follows the all-flip branch of the gate mixture, so `P₀(k) = pᵏ`.
pub fn repeated_cg(k_max: usize, p: f64) -> Result<Vec<(usize, f64)>> {
    if k_max == 0 {
        return Err(Error::InvalidArgument("k_max must be at least 1"));
    }
    let protected = NuclearLevel::Plus;
    let channel = controlled_gate(protected, p)?;
    let flip = selective_flip_unitary(protected);
    let (weight, branch) = channel
        .branches()
        .iter()
        .find(|(_, u)| u == &flip)
        .map(|(w, u)| (*w, u.clone()))
        .expect("controlled gate contains the ideal flip");
    let start = super::model::level_index(ElectronLevel::Zero, NuclearLevel::Zero) - 1;
    let mut sigma = ComplexMatrix::basis_projector(6, start);
    let mut undo = ComplexMatrix::identity(6);
    let mut out = Vec::with_capacity(k_max);
    for k in 1..=k_max {
        sigma = sigma.conjugate_by(branch.matrix()).scale_real(weight);
        undo = &flip.adjoint().matrix().clone() * &undo;
        out.push((k, zero_manifold_population(&sigma.conjugate_by(&undo))));
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FlipFit {
    pub p_hat: f64,
    pub p_uncertainty: f64,
    /// Fitted `ln P₀(0)`; zero for a perfect exponential.
    pub log_intercept: f64,
}

/// Least-squares fit of `ln P₀(k) = a + k·ln p`.
pub fn fit_flip_probability(points: &[(usize, f64)]) -> Result<FlipFit> {
    if points.len() < 3 {
        return Err(Error::DegenerateFit("need at least three points"));
    }
    if points.iter().any(|&(_, y)| !(y > 0.0 && y.is_finite())) {
        return Err(Error::DegenerateFit(
            "P0 must be positive to take its logarithm",
        ));
    }
    let n = points.len() as f64;
    let xs: Vec<f64> = points.iter().map(|&(k, _)| k as f64).collect();
    let ys: Vec<f64> = points.iter().map(|&(_, y)| y.ln()).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::DegenerateFit("all k are equal"));
    }
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rss: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - intercept - slope * x).powi(2))
        .sum();
    let slope_sd = (rss / (n - 2.0) / sxx).sqrt();
    let p_hat = slope.exp();
    Ok(FlipFit {
        p_hat,
        p_uncertainty: p_hat * slope_sd,
        log_intercept: intercept,
    })
}
