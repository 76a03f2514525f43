use crate::linalg::{tensor, ComplexMatrix};
use crate::spin::spin1_operators;
use crate::{Error, Result};
use core::f64::consts::{PI, SQRT_2};
#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum ElectronLevel {
    /// `m_s = +1`, the flipped ancilla.
    One,
    /// `m_s = 0`, the unflipped ancilla.
    Zero,
}

impl ElectronLevel {
    fn index(self) -> usize {
        match self {
            ElectronLevel::One => 0,
            ElectronLevel::Zero => 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum NuclearLevel {
    Plus,
    Zero,
    Minus,
}

impl NuclearLevel {
    pub const ALL: [NuclearLevel; 3] =
        [NuclearLevel::Plus, NuclearLevel::Zero, NuclearLevel::Minus];

    /// `m_I`.
    pub fn m(self) -> f64 {
        match self {
            NuclearLevel::Plus => 1.0,
            NuclearLevel::Zero => 0.0,
            NuclearLevel::Minus => -1.0,
        }
    }

    /// Position in the qutrit basis `(|+1⟩, |0⟩, |−1⟩)`.
    pub fn index(self) -> usize {
        match self {
            NuclearLevel::Plus => 0,
            NuclearLevel::Zero => 1,
            NuclearLevel::Minus => 2,
        }
    }

    /// Dichotomic value attached to this level: `+1, +1, −1`.
    pub fn q(self) -> f64 {
        match self {
            NuclearLevel::Minus => -1.0,
            _ => 1.0,
        }
    }
}

/// One-based label `|1⟩ … |6⟩` of `|e⟩|n⟩`.
pub fn level_index(e: ElectronLevel, n: NuclearLevel) -> usize {
    3 * e.index() + n.index() + 1
}

/// Hamiltonian constants in Hz, field in gauss.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct NvModel {
    pub d_zfs: f64,
    pub q_quad: f64,
    pub a_hf: f64,
    pub b_field: f64,
    /// Electron gyromagnetic ratio, Hz/G.
    pub gamma_e: f64,
    /// ¹⁴N gyromagnetic ratio, Hz/G.
    pub gamma_n: f64,
}

impl Default for NvModel {
    fn default() -> Self {
        Self {
            d_zfs: 2.87e9,
            q_quad: -4.95e6,
            a_hf: -2.16e6,
            b_field: 512.0,
            gamma_e: 2.8025e6,
            gamma_n: 307.7,
        }
    }
}

impl NvModel {
    pub fn omega_e(&self) -> f64 {
        self.gamma_e * self.b_field
    }

    pub fn omega_n(&self) -> f64 {
        self.gamma_n * self.b_field
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [self.d_zfs, self.q_quad, self.a_hf, self.b_field]
            .iter()
            .all(|v| v.is_finite());
        if !finite {
            return Err(Error::InvalidArgument("NV constants must be finite"));
        }
        if !(self.omega_e() > 0.0 && self.omega_n() > 0.0) {
            return Err(Error::InvalidArgument(
                "Zeeman frequencies must be positive",
            ));
        }
        if self.a_hf == 0.0 {
            return Err(Error::InvalidArgument(
                "hyperfine coupling must be non-zero",
            ));
        }
        Ok(())
    }

    /// Energy of `|e⟩|n⟩` in Hz (diagonal of `H_NV / 2π`).
    pub fn level_energy(&self, e: ElectronLevel, n: NuclearLevel) -> f64 {
        let sz = match e {
            ElectronLevel::One => 1.0,
            ElectronLevel::Zero => 0.0,
        };
        let m = n.m();
        self.d_zfs * sz * sz
            + self.omega_e() * sz
            + self.q_quad * m * m
            + self.omega_n() * m
            + self.a_hf * m * sz
    }

    /// `|0⟩e|n⟩ → |1⟩e|n⟩` transition frequency.
    pub fn electron_line(&self, n: NuclearLevel) -> f64 {
        self.level_energy(ElectronLevel::One, n) - self.level_energy(ElectronLevel::Zero, n)
    }

    /// Signed nuclear transition frequencies in the `|0⟩e` manifold:
    /// `(E₄ − E₅, E₅ − E₆)`.
    pub fn nuclear_transitions(&self) -> (f64, f64) {
        let e = |n| self.level_energy(ElectronLevel::Zero, n);
        (
            e(NuclearLevel::Plus) - e(NuclearLevel::Zero),
            e(NuclearLevel::Zero) - e(NuclearLevel::Minus),
        )
    }

    /// π-pulse length of a square selective MW pulse with Rabi frequency
    /// `Ω = |A|/√(4k² − 1)`: the neighbouring hyperfine line, detuned by `|A|`,
    /// then completes exactly `k` off-resonant cycles and is left unflipped.
    /// The line detuned by `2|A|` is only approximately refocused, with
    /// leakage falling roughly as `1/k²`.
    pub fn synchronized_pi_duration(&self, k: u32) -> f64 {
        let k = f64::from(k.max(1));
        (4.0 * k * k - 1.0).sqrt() / (2.0 * self.a_hf.abs())
    }
}

/// `2π(D Sz² + ωe Sz + Q Iz² + ωn Iz + A Iz Sz)` on the six-level space, with
/// the electron restricted to `{|1⟩e, |0⟩e}` so `Sz = diag(1, 0)`.
pub fn build_nv_hamiltonian(model: &NvModel) -> ComplexMatrix {
    let ops = spin1_operators();
    let sz_e = ComplexMatrix::from_real_diagonal(&[1.0, 0.0]);
    let i2 = ComplexMatrix::identity(2);
    let i3 = ComplexMatrix::identity(3);
    let terms = [
        tensor(&(&sz_e * &sz_e), &i3).scale_real(model.d_zfs),
        tensor(&sz_e, &i3).scale_real(model.omega_e()),
        tensor(&i2, &ops.iz_sq).scale_real(model.q_quad),
        tensor(&i2, &ops.sz).scale_real(model.omega_n()),
        tensor(&sz_e, &ops.sz).scale_real(model.a_hf),
    ];
    terms
        .iter()
        .fold(ComplexMatrix::zeros(6, 6), |acc, t| &acc + t)
        .scale_real(2.0 * PI)
}

/// Drive parameters for one rotation angle.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PulseParams {
    /// Nuclear Rabi frequency, Hz.
    pub f_rabi: f64,
    /// RF tones `(ω45, ω56)`, Hz (absolute values).
    pub rf_freqs: (f64, f64),
    /// MW frequency of the `|+1⟩n` electron line, Hz.
    pub mw_freq: f64,
    /// Selective MW π-pulse length, s.
    pub cg_duration: f64,
    /// Length of one `U(θ)`, s.
    pub u_duration: f64,
}

impl PulseParams {
    pub fn for_theta(model: &NvModel, theta: f64, f_rabi: f64, cg_duration: f64) -> Result<Self> {
        if !(f_rabi > 0.0 && f_rabi.is_finite()) {
            return Err(Error::InvalidArgument("f_rabi must be positive"));
        }
        if !(cg_duration > 0.0 && cg_duration.is_finite()) {
            return Err(Error::InvalidArgument("cg_duration must be positive"));
        }
        if !(theta >= 0.0 && theta.is_finite()) {
            return Err(Error::InvalidArgument(
                "theta must be finite and non-negative",
            ));
        }
        let (w45, w56) = model.nuclear_transitions();
        Ok(Self {
            f_rabi,
            rf_freqs: (w45.abs(), w56.abs()),
            mw_freq: model.electron_line(NuclearLevel::Plus),
            cg_duration,
            u_duration: theta / (SQRT_2 * PI * f_rabi),
        })
    }

    /// `θ = √2·π·f_rabi·t`.
    pub fn theta(&self) -> f64 {
        SQRT_2 * PI * self.f_rabi * self.u_duration
    }

    pub fn mw_rabi(&self) -> f64 {
        0.5 / self.cg_duration
    }
}
