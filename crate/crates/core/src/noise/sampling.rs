use super::imperfection::{Averaging, ImperfectionModel};
use crate::{Error, Result};
use alloc::vec::Vec;
use core::f64::consts::{PI, SQRT_2};
#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;
use rand_chacha::ChaCha8Rng;
use rand_core::SeedableRng;
use rand_distr::{Distribution, StandardNormal};

/// One quasi-static detuning δ₀ (Hz) and its ensemble weight.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DetuningSample {
    pub delta0: f64,
    pub weight: f64,
}

/// Physicists' Gauss-Hermite rule: nodes `xᵢ` and weights `wᵢ` with
/// `Σ wᵢ f(xᵢ) ≈ ∫ e^{−x²} f(x) dx`. Newton iteration on the normalized
/// Hermite recurrence.
pub fn gauss_hermite(n: usize) -> Result<Vec<(f64, f64)>> {
    if n == 0 {
        return Err(Error::InvalidArgument("quadrature needs at least one node"));
    }
    const PIM4: f64 = 0.751_125_544_464_942_5; // π^(−1/4)
    let nf = n as f64;
    let mut x = alloc::vec![0.0f64; n];
    let mut w = alloc::vec![0.0f64; n];
    let mut z = 0.0f64;
    for i in 0..n.div_ceil(2) {
        z = match i {
            0 => (2.0 * nf + 1.0).sqrt() - 1.85575 * (2.0 * nf + 1.0).powf(-0.16667),
            1 => z - 1.14 * nf.powf(0.426) / z,
            2 => 1.86 * z - 0.86 * x[0],
            3 => 1.91 * z - 0.91 * x[1],
            _ => 2.0 * z - x[i - 2],
        };
        let mut pp = 0.0;
        let mut converged = false;
        for _ in 0..100 {
            let mut p1 = PIM4;
            let mut p2 = 0.0;
            for j in 0..n {
                let p3 = p2;
                p2 = p1;
                let jf = j as f64;
                p1 = z * (2.0 / (jf + 1.0)).sqrt() * p2 - (jf / (jf + 1.0)).sqrt() * p3;
            }
            pp = (2.0 * nf).sqrt() * p2;
            let z1 = z;
            z = z1 - p1 / pp;
            if (z - z1).abs() <= 1e-15 * z.abs().max(1.0) {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(Error::NonConvergence { iterations: 100 });
        }
        x[i] = z;
        x[n - 1 - i] = -z;
        w[i] = 2.0 / (pp * pp);
        w[n - 1 - i] = w[i];
    }
    Ok(x.into_iter().zip(w).collect())
}

/// Detuning ensemble for the model's averaging mode. Monte Carlo draws are
/// i.i.d. `N(0, σ²)` from a ChaCha8 stream seeded by `model.seed`;
/// Gauss-Hermite nodes are mapped to `N(0, σ²)` with weights summing to 1.
pub fn sample_detunings(model: &ImperfectionModel) -> Result<Vec<DetuningSample>> {
    model.validate()?;
    let sigma = model.sigma_detuning();
    let n = model.n_samples;
    Ok(match model.averaging {
        Averaging::MonteCarlo => {
            let mut rng = ChaCha8Rng::seed_from_u64(model.seed);
            let weight = 1.0 / n as f64;
            (0..n)
                .map(|_| {
                    let z: f64 = StandardNormal.sample(&mut rng);
                    DetuningSample {
                        delta0: sigma * z,
                        weight,
                    }
                })
                .collect()
        }
        Averaging::GaussHermite => gauss_hermite(n)?
            .into_iter()
            .map(|(x, w)| DetuningSample {
                delta0: SQRT_2 * sigma * x,
                weight: w / PI.sqrt(),
            })
            .collect(),
    })
}

/// Adds i.i.d. `N(0, sigma²)` readout noise, seeded.
pub fn add_readout_noise(values: &mut [f64], sigma: f64, seed: u64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for v in values {
        let z: f64 = StandardNormal.sample(&mut rng);
        *v += sigma * z;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn hermite_rule_integrates_polynomials() {
        for n in [1usize, 2, 5, 21, 41, 80] {
            let rule = gauss_hermite(n).unwrap();
            let w: f64 = rule.iter().map(|(_, w)| w).sum();
            assert_abs_diff_eq!(w, PI.sqrt(), epsilon = 1e-12);
            if n >= 2 {
                let m2: f64 = rule.iter().map(|(x, w)| w * x * x).sum();
                assert_abs_diff_eq!(m2, PI.sqrt() / 2.0, epsilon = 1e-12);
            }
            if n >= 3 {
                let m4: f64 = rule.iter().map(|(x, w)| w * x.powi(4)).sum();
                assert_abs_diff_eq!(m4, 3.0 * PI.sqrt() / 4.0, epsilon = 1e-11);
            }
        }
    }

    #[test]
    fn hermite_rule_characteristic_function() {
        // ∫ e^{−x²} cos(x) dx = √π e^{−1/4}
        let rule = gauss_hermite(20).unwrap();
        let v: f64 = rule.iter().map(|(x, w)| w * x.cos()).sum();
        assert_abs_diff_eq!(v, PI.sqrt() * (-0.25f64).exp(), epsilon = 1e-14);
    }

    #[test]
    fn zero_width_gives_zero_detunings() {
        for averaging in [Averaging::MonteCarlo, Averaging::GaussHermite] {
            let m = ImperfectionModel {
                t2_star: None,
                n_samples: 9,
                averaging,
                ..ImperfectionModel::nominal()
            };
            let s = sample_detunings(&m).unwrap();
            assert_eq!(s.len(), 9);
            assert!(s.iter().all(|d| d.delta0 == 0.0));
        }
    }

    #[test]
    fn quadrature_second_moment() {
        let m = ImperfectionModel::nominal();
        let s = sample_detunings(&m).unwrap();
        let sigma = m.sigma_detuning();
        let w: f64 = s.iter().map(|d| d.weight).sum();
        assert_abs_diff_eq!(w, 1.0, epsilon = 1e-12);
        let var: f64 = s.iter().map(|d| d.weight * d.delta0 * d.delta0).sum();
        assert!((var / (sigma * sigma) - 1.0).abs() < 1e-10);
    }

    #[test]
    fn monte_carlo_is_seeded() {
        let m = ImperfectionModel {
            averaging: Averaging::MonteCarlo,
            n_samples: 100,
            seed: 7,
            ..ImperfectionModel::nominal()
        };
        assert_eq!(sample_detunings(&m).unwrap(), sample_detunings(&m).unwrap());
        let other = ImperfectionModel { seed: 8, ..m };
        assert_ne!(
            sample_detunings(&m).unwrap(),
            sample_detunings(&other).unwrap()
        );
    }

    #[test]
    fn monte_carlo_variance_within_statistical_bounds() {
        let n = 20_000;
        let m = ImperfectionModel {
            averaging: Averaging::MonteCarlo,
            n_samples: n,
            seed: 2024,
            ..ImperfectionModel::nominal()
        };
        let sigma2 = m.sigma_detuning().powi(2);
        let s = sample_detunings(&m).unwrap();
        let var: f64 = s.iter().map(|d| d.delta0 * d.delta0).sum::<f64>() / n as f64;
        // Var of the sample second moment is 2σ⁴/n.
        let sd = (2.0 / n as f64).sqrt() * sigma2;
        assert!((var - sigma2).abs() < 5.0 * sd);
    }
}
