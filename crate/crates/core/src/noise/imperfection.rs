use crate::{Error, Result};
use core::f64::consts::{PI, SQRT_2};

/// How the dephasing ensemble average is taken.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum Averaging {
    MonteCarlo,
    #[default]
    GaussHermite,
}

/// Experimental imperfections: electron `T2*`, initial polarizations and the
/// controlled-gate flip probability.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ImperfectionModel {
    /// Electron dephasing time in seconds; `None` disables dephasing.
    pub t2_star: Option<f64>,
    /// Electron polarization into `|0⟩e`.
    pub pol_e: f64,
    /// Nuclear polarization into `|+1⟩n`.
    pub pol_n: f64,
    pub flip_prob_p: f64,
    pub n_samples: usize,
    pub seed: u64,
    pub averaging: Averaging,
}

impl ImperfectionModel {
    pub const NOMINAL_T2_STAR: f64 = 62e-6;

    /// No dephasing, perfect initialization, perfect gates.
    pub fn ideal() -> Self {
        Self {
            t2_star: None,
            pol_e: 1.0,
            pol_n: 1.0,
            flip_prob_p: 1.0,
            n_samples: 1,
            seed: 0,
            averaging: Averaging::GaussHermite,
        }
    }

    /// `T2* = 62 µs`, polarizations 95 % / 98 %, `p = 0.995`, 21-node
    /// Gauss-Hermite averaging.
    pub fn nominal() -> Self {
        Self {
            t2_star: Some(Self::NOMINAL_T2_STAR),
            pol_e: 0.95,
            pol_n: 0.98,
            flip_prob_p: 0.995,
            n_samples: 21,
            seed: 0,
            averaging: Averaging::GaussHermite,
        }
    }

    /// Gaussian detuning width `σ = 1/(√2·π·T2*)` in Hz.
    pub fn sigma_detuning(&self) -> f64 {
        match self.t2_star {
            Some(t) => 1.0 / (SQRT_2 * PI * t),
            None => 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, value) in [
            ("pol_e", self.pol_e),
            ("pol_n", self.pol_n),
            ("flip_prob_p", self.flip_prob_p),
        ] {
            if !(0.0..=1.0).contains(&value) {
                return Err(Error::FractionOutOfRange { name, value });
            }
        }
        if self.n_samples == 0 {
            return Err(Error::InvalidArgument("n_samples must be at least 1"));
        }
        if let Some(t) = self.t2_star {
            if !(t > 0.0 && t.is_finite()) {
                return Err(Error::InvalidArgument(
                    "t2_star must be positive and finite",
                ));
            }
        }
        Ok(())
    }
}

impl Default for ImperfectionModel {
    fn default() -> Self {
        Self::nominal()
    }
}
