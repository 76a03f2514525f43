//! Least-squares fit of a Gaussian-damped Ramsey signal
//! `A·exp(−(t/T2*)²)·cos(2πδt + φ) + C`.
//!
//! Starting values come from a grid over `(T2*, δ)` where the remaining
//! parameters enter linearly; Levenberg-Marquardt then refines all of them.
//! A non-oscillating `(A, T2*, C)` model is always fitted as well and wins
//! unless the oscillation lowers the AIC.

use crate::{Error, Result};
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;

const MAX_ITERATIONS: usize = 500;

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DecayFit {
    pub t2_star: f64,
    /// One-sigma uncertainty of `t2_star` from the Jacobian at the optimum.
    pub t2_star_uncertainty: f64,
    pub amplitude: f64,
    pub detuning: f64,
    pub phase: f64,
    pub offset: f64,
    pub rss: f64,
    pub iterations: usize,
}

/// Dense solve of `a·x = b` (`a` row-major `n × n`) by Gaussian elimination
/// with partial pivoting. `None` if the matrix is numerically singular.
pub fn solve_linear(a: &[f64], b: &[f64]) -> Option<Vec<f64>> {
    let n = b.len();
    debug_assert_eq!(a.len(), n * n);
    let mut m = a.to_vec();
    let mut x = b.to_vec();
    let scale = m.iter().fold(0.0f64, |s, v| s.max(v.abs()));
    if scale == 0.0 {
        return None;
    }
    for col in 0..n {
        let pivot =
            (col..n).max_by(|&i, &j| m[i * n + col].abs().total_cmp(&m[j * n + col].abs()))?;
        if m[pivot * n + col].abs() <= 1e-14 * scale {
            return None;
        }
        if pivot != col {
            for k in 0..n {
                m.swap(col * n + k, pivot * n + k);
            }
            x.swap(col, pivot);
        }
        for row in (col + 1)..n {
            let f = m[row * n + col] / m[col * n + col];
            for k in col..n {
                m[row * n + k] -= f * m[col * n + k];
            }
            x[row] -= f * x[col];
        }
    }
    for col in (0..n).rev() {
        let tail: f64 = ((col + 1)..n).map(|k| m[col * n + k] * x[k]).sum();
        x[col] = (x[col] - tail) / m[col * n + col];
    }
    Some(x)
}

#[derive(Clone, Copy)]
enum Shape {
    /// `[A, T, δ, φ, C]`
    Oscillating,
    /// `[A, T, C]`
    Decay,
}

impl Shape {
    fn n_params(self) -> usize {
        match self {
            Shape::Oscillating => 5,
            Shape::Decay => 3,
        }
    }

    fn eval(self, p: &[f64], t: f64, grad: Option<&mut [f64]>) -> f64 {
        let (a, tau) = (p[0], p[1]);
        let env = (-(t / tau).powi(2)).exp();
        let denv_dtau = env * 2.0 * t * t / tau.powi(3);
        match self {
            Shape::Oscillating => {
                let psi = 2.0 * PI * p[2] * t + p[3];
                let (s, c) = psi.sin_cos();
                if let Some(g) = grad {
                    g[0] = env * c;
                    g[1] = a * denv_dtau * c;
                    g[2] = -a * env * s * 2.0 * PI * t;
                    g[3] = -a * env * s;
                    g[4] = 1.0;
                }
                a * env * c + p[4]
            }
            Shape::Decay => {
                if let Some(g) = grad {
                    g[0] = env;
                    g[1] = a * denv_dtau;
                    g[2] = 1.0;
                }
                a * env + p[2]
            }
        }
    }
}

fn rss(shape: Shape, p: &[f64], pts: &[(f64, f64)]) -> f64 {
    pts.iter()
        .map(|&(t, y)| (y - shape.eval(p, t, None)).powi(2))
        .sum()
}

/// `JᵀJ` and `Jᵀr` at `p`.
fn normal_equations(shape: Shape, p: &[f64], pts: &[(f64, f64)]) -> (Vec<f64>, Vec<f64>) {
    let n = shape.n_params();
    let mut jtj = vec![0.0; n * n];
    let mut jtr = vec![0.0; n];
    let mut g = vec![0.0; n];
    for &(t, y) in pts {
        let r = y - shape.eval(p, t, Some(&mut g));
        for i in 0..n {
            jtr[i] += g[i] * r;
            for k in 0..n {
                jtj[i * n + k] += g[i] * g[k];
            }
        }
    }
    (jtj, jtr)
}

/// Linear least squares for `[E cos, E sin, 1]` (or `[E, 1]` at δ = 0) at
/// fixed `(T, δ)`; returns `(A, φ, C, rss)`.
fn linear_stage(pts: &[(f64, f64)], tau: f64, delta: f64) -> Option<(f64, f64, f64, f64)> {
    let basis = |t: f64| -> [f64; 3] {
        let env = (-(t / tau).powi(2)).exp();
        let (s, c) = (2.0 * PI * delta * t).sin_cos();
        [env * c, env * s, 1.0]
    };
    let cols: &[usize] = if delta == 0.0 { &[0, 2] } else { &[0, 1, 2] };
    let n = cols.len();
    let mut ata = vec![0.0; n * n];
    let mut aty = vec![0.0; n];
    for &(t, y) in pts {
        let b = basis(t);
        for (i, &ci) in cols.iter().enumerate() {
            aty[i] += b[ci] * y;
            for (k, &ck) in cols.iter().enumerate() {
                ata[i * n + k] += b[ci] * b[ck];
            }
        }
    }
    let x = solve_linear(&ata, &aty)?;
    let (a, b, c) = if delta == 0.0 {
        (x[0], 0.0, x[1])
    } else {
        (x[0], x[1], x[2])
    };
    let amp = (a * a + b * b).sqrt();
    let phase = (-b).atan2(a);
    let resid: f64 = pts
        .iter()
        .map(|&(t, y)| {
            let v = basis(t);
            (y - a * v[0] - b * v[1] - c).powi(2)
        })
        .sum();
    Some((amp, phase, c, resid))
}

pub fn fit_gaussian_decay(points: &[(f64, f64)]) -> Result<DecayFit> {
    if points.len() < 5 {
        return Err(Error::InvalidArgument("decay fit needs at least 5 points"));
    }
    if points.iter().any(|(t, y)| !t.is_finite() || !y.is_finite()) {
        return Err(Error::InvalidArgument("decay fit input must be finite"));
    }
    let mut pts = points.to_vec();
    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    let t_min = pts[0].0;
    let span = pts[pts.len() - 1].0 - t_min;
    if !(span > 0.0) {
        return Err(Error::InvalidArgument(
            "decay fit needs a positive time span",
        ));
    }
    let mean = pts.iter().map(|p| p.1).sum::<f64>() / pts.len() as f64;
    let spread = pts.iter().map(|p| (p.1 - mean).abs()).fold(0.0, f64::max);
    if spread < 1e-12 {
        return Err(Error::DegenerateFit("signal is constant"));
    }

    let min_dt = pts
        .windows(2)
        .map(|w| w[1].0 - w[0].0)
        .filter(|d| *d > 0.0)
        .fold(f64::INFINITY, f64::min);
    let nyquist = 0.5 / min_dt;
    let df = 1.0 / (8.0 * span);
    let n_freq = ((nyquist / df) as usize).min(4000);

    // Best grid points overall and with δ = 0.
    let mut best: Option<[f64; 6]> = None;
    let mut best_flat: Option<[f64; 6]> = None;
    for it in 0..48 {
        let tau = span * 0.05 * 200f64.powf(it as f64 / 47.0);
        for k in 0..=n_freq {
            let delta = k as f64 * df;
            if let Some((a, phi, c, r)) = linear_stage(&pts, tau, delta) {
                let cand = [a, tau, delta, phi, c, r];
                if best.is_none_or(|s| r < s[5]) {
                    best = Some(cand);
                }
                if k == 0 && best_flat.is_none_or(|s| r < s[5]) {
                    best_flat = Some(cand);
                }
            }
        }
    }
    let flat = best_flat.ok_or(Error::DegenerateFit("no usable starting point"))?;
    let decay = refine(
        Shape::Decay,
        vec![flat[0] * flat[3].cos(), flat[1], flat[4]],
        &pts,
        span,
    );
    let osc = match best {
        Some(b) if b[2] > 0.0 => Some(refine(
            Shape::Oscillating,
            vec![b[0], b[1], b[2], b[3], b[4]],
            &pts,
            span,
        )),
        _ => None,
    };
    let exact = 1e-24 * pts.iter().map(|q| q.1 * q.1).sum::<f64>();
    let n = pts.len() as f64;
    match (decay, osc) {
        (Ok(d), Some(Ok(o))) => {
            // Prefer the smaller model when it already fits exactly or the
            // extra oscillation parameters do not pay for themselves (AIC).
            let aic = |rss: f64, k: f64| n * rss.max(f64::MIN_POSITIVE).ln() + 2.0 * k;
            if d.rss <= exact || aic(d.rss, 3.0) <= aic(o.rss, 5.0) {
                Ok(d)
            } else {
                Ok(o)
            }
        }
        (Ok(d), None | Some(Err(_))) => Ok(d),
        (Err(_), Some(Ok(o))) => Ok(o),
        (Err(e), None) => Err(e),
        (Err(_), Some(Err(e))) => Err(e),
    }
}

/// Levenberg-Marquardt from `p`, then uncertainty and sanity checks.
fn refine(shape: Shape, mut p: Vec<f64>, pts: &[(f64, f64)], span: f64) -> Result<DecayFit> {
    let n = shape.n_params();
    let mut lambda = 1e-3;
    let mut cur = rss(shape, &p, pts);
    // Residuals at rounding level: nothing left to improve.
    let exact = 1e-28 * pts.iter().map(|q| q.1 * q.1).sum::<f64>();
    let mut converged = false;
    let mut iterations = 0;
    while iterations < MAX_ITERATIONS {
        iterations += 1;
        let (jtj, jtr) = normal_equations(shape, &p, pts);
        let floor = 1e-12 * (0..n).map(|i| jtj[i * n + i]).fold(0.0, f64::max);
        let mut damped = jtj.clone();
        for i in 0..n {
            damped[i * n + i] += lambda * jtj[i * n + i].max(floor).max(1e-300);
        }
        let Some(step) = solve_linear(&damped, &jtr) else {
            lambda *= 10.0;
            if lambda > 1e12 {
                break;
            }
            continue;
        };
        let trial: Vec<f64> = p.iter().zip(&step).map(|(a, b)| a + b).collect();
        let trial_rss = rss(shape, &trial, pts);
        if trial_rss.is_finite() && trial_rss <= cur {
            let small_step = step
                .iter()
                .zip(&p)
                .all(|(s, v)| s.abs() <= 1e-10 * (v.abs() + 1e-12));
            let small_gain = cur - trial_rss <= 1e-14 * cur.max(1e-300);
            p = trial;
            cur = trial_rss;
            lambda = (lambda / 10.0).max(1e-12);
            if small_step || small_gain || cur <= exact {
                converged = true;
                break;
            }
        } else {
            lambda *= 10.0;
            if lambda > 1e12 {
                // No descent direction left: treat as converged at a minimum.
                converged = true;
                break;
            }
        }
    }
    if !converged {
        return Err(Error::NonConvergence { iterations });
    }
    p[1] = p[1].abs();

    let dof = pts.len().saturating_sub(n).max(1) as f64;
    let s2 = cur / dof;
    let (jtj, _) = normal_equations(shape, &p, pts);
    let mut unit = vec![0.0; n];
    unit[1] = 1.0;
    let col = solve_linear(&jtj, &unit).ok_or(Error::DegenerateFit("singular Jacobian"))?;
    let var_tau = col[1] * s2;
    unit[1] = 0.0;
    unit[0] = 1.0;
    let col_a = solve_linear(&jtj, &unit).ok_or(Error::DegenerateFit("singular Jacobian"))?;
    let sd_amp = (col_a[0] * s2).max(0.0).sqrt();

    let tau = p[1];
    let sd_tau = var_tau.max(0.0).sqrt();
    if !tau.is_finite() || !sd_tau.is_finite() || tau > 100.0 * span {
        return Err(Error::DegenerateFit("decay time is unbounded"));
    }
    if p[0].abs() <= 3.0 * sd_amp {
        return Err(Error::DegenerateFit(
            "amplitude is indistinguishable from zero",
        ));
    }

    let (amplitude, detuning, phase, offset) = match shape {
        Shape::Oscillating => (p[0], p[2], p[3], p[4]),
        Shape::Decay => (p[0], 0.0, 0.0, p[2]),
    };
    Ok(DecayFit {
        t2_star: tau,
        t2_star_uncertainty: sd_tau,
        amplitude,
        detuning,
        phase,
        offset,
        rss: cur,
        iterations,
    })
}
