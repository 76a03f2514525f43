//! Temporal correlators, Leggett-Garg strings and the ideal (noise-free)
//! three-time protocol.
//!
//! The system starts in the `+1` basis state, so the first measurement is
//! the initialization and `Q(t₁) = +1`. Successive measurement times are
//! separated by the same rotation `e^{−iθSx}`.

use crate::measurement::{measure, Dichotomic, MeasurementScheme};
use crate::spin::rotation_for_dim;
use crate::state::{evolve, expectation, DensityMatrix, UnitaryOp};
use crate::{Error, Result};
use alloc::vec::Vec;
use core::f64::consts::PI;
#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;

/// `⟨Q₂⟩`, `⟨Q₂Q₃⟩`, `⟨Q₃⟩` and `K₃ = ⟨Q₂⟩ + ⟨Q₂Q₃⟩ − ⟨Q₃⟩`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CorrelatorSet {
    pub q2_mean: f64,
    pub q2q3_mean: f64,
    pub q3_mean: f64,
    pub k3: f64,
}

impl CorrelatorSet {
    pub fn from_terms(q2_mean: f64, q2q3_mean: f64, q3_mean: f64) -> Self {
        Self {
            q2_mean,
            q2q3_mean,
            q3_mean,
            k3: q2_mean + q2q3_mean - q3_mean,
        }
    }

    /// `|k3 − (q2 + q2q3 − q3)|`; zero for values built by [`Self::from_terms`].
    pub fn sum_residual(&self) -> f64 {
        (self.k3 - (self.q2_mean + self.q2q3_mean - self.q3_mean)).abs()
    }
}

/// How `⟨Q₃⟩` is obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Q3Path {
    /// No measurement at `t₂`.
    #[default]
    Unmeasured,
    /// Measure at `t₂` and discard the result; probes invasiveness.
    MeasuredIgnored,
}

fn initial_state(dim: usize) -> DensityMatrix {
    DensityMatrix::basis(dim, 0).expect("dim >= 1")
}

/// `Σ_b v_b · p_b · ⟨Q⟩` after evolving each branch of a measurement on `rho`
/// through `later`. With `weight_outcome = false` the outcome value is
/// dropped, giving the marginal `⟨Q⟩` of the disturbed state.
fn branch_correlator(
    rho: &DensityMatrix,
    later: &UnitaryOp,
    scheme: &MeasurementScheme,
    weight_outcome: bool,
) -> Result<f64> {
    let q = scheme.observable();
    let mut acc = 0.0;
    for b in measure(rho, scheme)? {
        let Some(post) = b.post_state else { continue };
        let v = if weight_outcome {
            b.outcome.value()
        } else {
            1.0
        };
        acc += v * b.probability * expectation(&evolve(&post, later)?, &q)?;
    }
    Ok(acc)
}

/// Density-matrix evaluation of the three-time protocol.
pub fn k3_protocol(theta: f64, scheme: &MeasurementScheme) -> Result<CorrelatorSet> {
    k3_protocol_with(theta, scheme, Q3Path::Unmeasured)
}

pub fn k3_protocol_with(
    theta: f64,
    scheme: &MeasurementScheme,
    q3_path: Q3Path,
) -> Result<CorrelatorSet> {
    if !theta.is_finite() {
        return Err(Error::InvalidArgument("theta must be finite"));
    }
    let dim = scheme.dim();
    let u = rotation_for_dim(dim, theta)?;
    let q = scheme.observable();
    let rho2 = evolve(&initial_state(dim), &u)?;

    let q2 = expectation(&rho2, &q)?;
    let q2q3 = branch_correlator(&rho2, &u, scheme, true)?;
    let q3 = match q3_path {
        Q3Path::Unmeasured => expectation(&evolve(&rho2, &u)?, &q)?,
        Q3Path::MeasuredIgnored => branch_correlator(&rho2, &u, scheme, false)?,
    };
    Ok(CorrelatorSet::from_terms(q2, q2q3, q3))
}

/// Closed-form three-level correlators for the von Neumann update.
pub fn analytic_correlators(theta: f64) -> CorrelatorSet {
    let c1 = theta.cos();
    let c2 = (2.0 * theta).cos();
    let c4 = (4.0 * theta).cos();
    CorrelatorSet::from_terms(
        0.25 + c1 - 0.25 * c2,
        1.0 / 16.0 + c1 - c4 / 16.0,
        0.25 + c2 - 0.25 * c4,
    )
}

/// `Kₙ = Σᵢ ⟨Q(tᵢ₊₁)Q(tᵢ)⟩ − ⟨Q(tₙ)Q(t₁)⟩`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct LgString {
    pub n: usize,
    /// `⟨Q(tᵢ₊₁)Q(tᵢ)⟩` for `i = 1 … n−1`.
    pub adjacent: Vec<f64>,
    /// `⟨Q(tₙ)Q(t₁)⟩`, entering with a minus sign.
    pub closing: f64,
    pub value: f64,
}

/// Two-time correlator `⟨Q(tⱼ)Q(tᵢ)⟩` from a run that measures only at
/// `tᵢ` and `tⱼ`.
fn two_time_correlator(
    scheme: &MeasurementScheme,
    u: &UnitaryOp,
    i: usize,
    j: usize,
) -> Result<f64> {
    debug_assert!(1 <= i && i < j);
    let mut rho = initial_state(scheme.dim());
    for _ in 1..i {
        rho = evolve(&rho, u)?;
    }
    let mut gap = UnitaryOp::identity(scheme.dim());
    for _ in i..j {
        gap = u.then_after(&gap);
    }
    branch_correlator(&rho, &gap, scheme, true)
}

/// `Kₙ` with equal spacing θ between consecutive measurements. Each
/// correlator comes from its own two-measurement run, with branch
/// enumeration over the outcomes at the earlier time.
pub fn kn_string(n: usize, theta: f64, scheme: &MeasurementScheme) -> Result<LgString> {
    if n < 3 {
        return Err(Error::StringTooShort(n));
    }
    if !theta.is_finite() {
        return Err(Error::InvalidArgument("theta must be finite"));
    }
    let u = rotation_for_dim(scheme.dim(), theta)?;
    let adjacent = (1..n)
        .map(|i| two_time_correlator(scheme, &u, i, i + 1))
        .collect::<Result<Vec<_>>>()?;
    let closing = two_time_correlator(scheme, &u, 1, n)?;
    let value = adjacent.iter().sum::<f64>() - closing;
    Ok(LgString {
        n,
        adjacent,
        closing,
        value,
    })
}

/// Exact extrema of `Kₙ` over all `2ⁿ` deterministic assignments `q(tᵢ) = ±1`.
pub fn classical_extrema(n: usize) -> Result<(f64, f64)> {
    if !(3..=12).contains(&n) {
        return Err(Error::EnumerationRange(n));
    }
    let mut lo = i32::MAX;
    let mut hi = i32::MIN;
    for mask in 0u32..(1 << n) {
        let q = |i: usize| if mask >> i & 1 == 1 { -1i32 } else { 1 };
        let k: i32 = (0..n - 1).map(|i| q(i + 1) * q(i)).sum::<i32>() - q(n - 1) * q(0);
        lo = lo.min(k);
        hi = hi.max(k);
    }
    Ok((lo as f64, hi as f64))
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct K3Maximum {
    pub theta: f64,
    pub k3: f64,
}

const GOLDEN_TOL: f64 = 1e-8;

/// Grid search over `θ ∈ [0, π]` (`grid_points` intervals), then
/// golden-section refinement around the best grid point. Ties on the grid go
/// to the smallest θ.
pub fn find_max_k3(scheme: &MeasurementScheme, grid_points: usize) -> Result<K3Maximum> {
    if grid_points < 100 {
        return Err(Error::InvalidArgument("grid_points must be at least 100"));
    }
    let k3 = |theta: f64| k3_protocol(theta, scheme).map(|c| c.k3);
    let step = PI / grid_points as f64;

    let mut best = K3Maximum {
        theta: 0.0,
        k3: k3(0.0)?,
    };
    for i in 1..=grid_points {
        let theta = i as f64 * step;
        let v = k3(theta)?;
        if v > best.k3 {
            best = K3Maximum { theta, k3: v };
        }
    }

    let mut a = (best.theta - step).max(0.0);
    let mut b = (best.theta + step).min(PI);
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = b - inv_phi * (b - a);
    let mut x2 = a + inv_phi * (b - a);
    let mut f1 = k3(x1)?;
    let mut f2 = k3(x2)?;
    while b - a > GOLDEN_TOL {
        if f1 >= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = k3(x1)?;
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = k3(x2)?;
        }
    }
    let theta = 0.5 * (a + b);
    let v = k3(theta)?;
    if v > best.k3 {
        best = K3Maximum { theta, k3: v };
    }
    Ok(best)
}

/// `K₃` over a list of angles.
pub fn k3_curve(scheme: &MeasurementScheme, thetas: &[f64]) -> Result<Vec<(f64, CorrelatorSet)>> {
    thetas
        .iter()
        .map(|&t| k3_protocol(t, scheme).map(|c| (t, c)))
        .collect()
}

/// Probability that the initial state yields `+1`; the protocol assumes 1.
pub fn initial_plus_probability(scheme: &MeasurementScheme) -> Result<f64> {
    let branches = measure(&initial_state(scheme.dim()), scheme)?;
    Ok(branches
        .iter()
        .find(|b| b.outcome == Dichotomic::Plus)
        .map(|b| b.probability)
        .unwrap_or(0.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measurement::{standard_qubit_scheme, standard_qutrit_scheme, UpdateRule};
    use approx::assert_abs_diff_eq;

    const HEADLINE: f64 = 0.416 * PI;

    #[test]
    fn no_evolution_gives_unit_correlators() {
        for rule in [UpdateRule::Luders, UpdateRule::VonNeumann] {
            let c = k3_protocol(0.0, &standard_qutrit_scheme(rule)).unwrap();
            assert_eq!(
                (c.q2_mean, c.q2q3_mean, c.q3_mean, c.k3),
                (1.0, 1.0, 1.0, 1.0)
            );
        }
        let a = analytic_correlators(0.0);
        assert_eq!(
            (a.q2_mean, a.q2q3_mean, a.q3_mean, a.k3),
            (1.0, 1.0, 1.0, 1.0)
        );
    }

    #[test]
    fn headline_von_neumann_values() {
        let c = k3_protocol(HEADLINE, &standard_qutrit_scheme(UpdateRule::VonNeumann)).unwrap();
        assert_abs_diff_eq!(c.q2_mean, 0.7268, epsilon = 1e-4);
        assert_abs_diff_eq!(c.q2q3_mean, 0.2925, epsilon = 1e-4);
        assert_abs_diff_eq!(c.q3_mean, -0.7371, epsilon = 1e-4);
        assert_abs_diff_eq!(c.k3, 1.756, epsilon = 1e-3);
        assert_abs_diff_eq!(c.k3, 1.7564736606111426, epsilon = 1e-12);
    }

    #[test]
    fn analytic_quarter_turn() {
        assert_abs_diff_eq!(analytic_correlators(PI / 2.0).q2_mean, 0.5, epsilon = 1e-15);
        let c = k3_protocol(PI / 2.0, &standard_qutrit_scheme(UpdateRule::VonNeumann)).unwrap();
        assert_abs_diff_eq!(c.q2_mean, 0.5, epsilon = 1e-14);
    }

    #[test]
    fn nim_variant_differs_only_in_q3() {
        let s = standard_qutrit_scheme(UpdateRule::VonNeumann);
        let a = k3_protocol(HEADLINE, &s).unwrap();
        let b = k3_protocol_with(HEADLINE, &s, Q3Path::MeasuredIgnored).unwrap();
        assert_eq!(a.q2_mean, b.q2_mean);
        assert_eq!(a.q2q3_mean, b.q2q3_mean);
        assert!((a.q3_mean - b.q3_mean).abs() > 1e-3);
    }

    #[test]
    fn k3_rejects_non_finite_theta() {
        let s = standard_qutrit_scheme(UpdateRule::VonNeumann);
        assert!(k3_protocol(f64::NAN, &s).is_err());
    }

    #[test]
    fn kn_three_matches_k3() {
        for rule in [UpdateRule::Luders, UpdateRule::VonNeumann] {
            let s = standard_qutrit_scheme(rule);
            for k in 0..20 {
                let theta = 0.157 * k as f64;
                let kn = kn_string(3, theta, &s).unwrap();
                let k3 = k3_protocol(theta, &s).unwrap();
                assert_abs_diff_eq!(kn.value, k3.k3, epsilon = 1e-12);
                assert_abs_diff_eq!(kn.adjacent[0], k3.q2_mean, epsilon = 1e-12);
                assert_abs_diff_eq!(kn.closing, k3.q3_mean, epsilon = 1e-12);
            }
        }
        let s = standard_qutrit_scheme(UpdateRule::Luders);
        assert_abs_diff_eq!(kn_string(3, 0.0, &s).unwrap().value, 1.0, epsilon = 1e-15);
    }

    #[test]
    fn kn_value_is_sum_of_terms() {
        let s = standard_qutrit_scheme(UpdateRule::VonNeumann);
        let k = kn_string(6, 0.3, &s).unwrap();
        assert_eq!(k.adjacent.len(), 5);
        let sum: f64 = k.adjacent.iter().sum::<f64>() - k.closing;
        assert!((k.value - sum).abs() < 1e-12);
    }

    #[test]
    fn kn_rejects_short_strings() {
        let s = standard_qutrit_scheme(UpdateRule::VonNeumann);
        assert_eq!(kn_string(2, 0.1, &s).unwrap_err(), Error::StringTooShort(2));
    }

    #[test]
    fn qubit_k4_peaks_at_two_root_two() {
        // Qubit correlators are cos(kθ), so K4(θ) = 3cosθ − cos3θ; the grid
        // oracle of that closed form peaks at 2√2 when θ = π/4.
        let s = standard_qubit_scheme(UpdateRule::Luders);
        let grid: Vec<f64> = (0..=2000).map(|i| PI * i as f64 / 2000.0).collect();
        let oracle = |t: f64| 3.0 * t.cos() - (3.0 * t).cos();
        let (best_t, best_v) = grid
            .iter()
            .map(|&t| (t, oracle(t)))
            .fold((0.0, f64::MIN), |a, b| if b.1 > a.1 { b } else { a });
        assert_abs_diff_eq!(best_v, 2.0 * 2f64.sqrt(), epsilon = 1e-9);
        let k4 = kn_string(4, best_t, &s).unwrap();
        assert_abs_diff_eq!(k4.value, best_v, epsilon = 1e-12);
        let (_, classical_max) = classical_extrema(4).unwrap();
        assert!(k4.value > classical_max);
    }

    #[test]
    fn classical_extrema_small_cases() {
        assert_eq!(classical_extrema(3).unwrap(), (-3.0, 1.0));
        assert_eq!(classical_extrema(4).unwrap(), (-2.0, 2.0));
        assert_eq!(classical_extrema(5).unwrap(), (-5.0, 3.0));
        assert_eq!(
            classical_extrema(2).unwrap_err(),
            Error::EnumerationRange(2)
        );
        assert_eq!(
            classical_extrema(13).unwrap_err(),
            Error::EnumerationRange(13)
        );
    }

    #[test]
    fn search_finds_three_level_maximum() {
        let m = find_max_k3(&standard_qutrit_scheme(UpdateRule::VonNeumann), 10_000).unwrap();
        assert!(
            m.theta > 0.41 * PI && m.theta < 0.42 * PI,
            "θ* = {}π",
            m.theta / PI
        );
        assert_abs_diff_eq!(m.k3, 1.756, epsilon = 1e-3);
        assert_abs_diff_eq!(analytic_correlators(m.theta).k3, m.k3, epsilon = 1e-10);
        // Stationary point of the analytic form: derivative changes sign.
        let h = 1e-5;
        let k = |t| analytic_correlators(t).k3;
        assert!(k(m.theta - h) < m.k3 && k(m.theta + h) < m.k3);
        assert!((k(m.theta + h) - k(m.theta)) * (k(m.theta) - k(m.theta - h)) < 0.0);
    }

    #[test]
    fn search_finds_qubit_luders_bound() {
        let m = find_max_k3(&standard_qubit_scheme(UpdateRule::Luders), 10_000).unwrap();
        assert_abs_diff_eq!(m.k3, 1.5, epsilon = 1e-9);
        assert_abs_diff_eq!(m.theta, PI / 3.0, epsilon = 1e-6);
    }

    #[test]
    fn search_rejects_coarse_grid() {
        let s = standard_qutrit_scheme(UpdateRule::VonNeumann);
        assert!(find_max_k3(&s, 99).is_err());
    }

    #[test]
    fn initialization_is_plus() {
        let s = standard_qutrit_scheme(UpdateRule::VonNeumann);
        assert_eq!(initial_plus_probability(&s).unwrap(), 1.0);
    }
}
