//! Ideal-negative-result measurement (INRM) runs: prepare, rotate, apply one
//! of four controlled-gate variants, rotate again, read all six populations.
//! Keeping only the unflipped ancilla (`|0⟩e`, levels 4–6) postselects on the
//! measured level *not* being the protected one.

use super::gate::{controlled_gate, finite_controlled_gate, Channel};
use super::model::{NuclearLevel, NvModel, PulseParams};
use crate::linalg::{tensor, ComplexMatrix, C64};
use crate::noise::{imperfect_initial_state, sample_detunings, DetuningSample, ImperfectionModel};
use crate::protocol::CorrelatorSet;
use crate::spin::{rotation_unitary, spin1_operators};
use crate::state::UnitaryOp;
use crate::sum::{compensated_sum, NeumaierSum};
use crate::{Error, Result};
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

/// Postselected weights `Σ_{j≤3} (P₄ʲ + P₅ʲ + P₆ʲ)` above this are treated as
/// a broken gate rather than an imperfect one (the ideal sum is 1; with no
/// flips at all it is 3).
pub const MAX_POSTSELECTED_SUM: f64 = 1.25;

const EMPTY_WEIGHT: f64 = 1e-15;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum CgVariant {
    /// Variants 1–3: flip the ancilla unless the nuclear spin is in this level.
    Protect(NuclearLevel),
    /// Variant 4: no gate.
    NoGate,
}

impl CgVariant {
    pub const ALL: [CgVariant; 4] = [
        CgVariant::Protect(NuclearLevel::Plus),
        CgVariant::Protect(NuclearLevel::Zero),
        CgVariant::Protect(NuclearLevel::Minus),
        CgVariant::NoGate,
    ];

    /// One-based variant number.
    pub fn number(self) -> usize {
        match self {
            CgVariant::Protect(n) => n.index() + 1,
            CgVariant::NoGate => 4,
        }
    }

    pub fn from_number(j: usize) -> Result<Self> {
        match j {
            1..=4 => Ok(Self::ALL[j - 1]),
            _ => Err(Error::InvalidArgument("variant must be 1, 2, 3 or 4")),
        }
    }
}

/// Pulse-level settings for the finite-duration drive.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FiniteDrive {
    pub model: NvModel,
    /// Nuclear Rabi frequency, Hz.
    pub f_rabi: f64,
    /// Selective MW π-pulse length, s.
    pub cg_pi_duration: f64,
}

/// Synchronization order of the default selective pulse (π-pulse ≈ 3.7 μs).
pub const DEFAULT_SYNC_ORDER: u32 = 8;

impl Default for FiniteDrive {
    fn default() -> Self {
        let model = NvModel::default();
        Self {
            model,
            f_rabi: 2e4,
            cg_pi_duration: model.synchronized_pi_duration(DEFAULT_SYNC_ORDER),
        }
    }
}

impl FiniteDrive {
    pub fn pulse_params(&self, theta: f64) -> Result<PulseParams> {
        PulseParams::for_theta(&self.model, theta, self.f_rabi, self.cg_pi_duration)
    }

    /// RF rotation at `δ₀ = 0` in the frame co-rotating with both nuclear
    /// tones and the electron. In `|1⟩e` the nuclear lines are shifted by
    /// `A·m`; the drive is resonant only in `|0⟩e`.
    fn rf_unitary(&self, theta: f64) -> Result<RfPropagator> {
        let params = self.pulse_params(theta)?;
        let ops = spin1_operators();
        let pe1 = ComplexMatrix::basis_projector(2, 0);
        let drive = tensor(&ComplexMatrix::identity(2), &ops.sx)
            .scale_real(self.f_rabi / core::f64::consts::SQRT_2);
        let hyperfine = tensor(&pe1, &ops.sz).scale_real(self.model.a_hf);
        let h = (&drive + &hyperfine).scale_real(2.0 * PI);
        Ok(RfPropagator {
            base: UnitaryOp::from_hamiltonian(&h, params.u_duration)?,
            duration: params.u_duration,
        })
    }
}

/// The detuning term `2πδ₀·(|1⟩e⟨1| ⊗ I)` commutes with the RF Hamiltonian,
/// so each ensemble member only multiplies the `|1⟩e` rows by a phase.
struct RfPropagator {
    base: UnitaryOp,
    duration: f64,
}

impl RfPropagator {
    fn at(&self, delta0: f64) -> ComplexMatrix {
        let phase = C64::from_polar(1.0, -2.0 * PI * delta0 * self.duration);
        let mut m = self.base.matrix().clone();
        for r in 0..3 {
            for c in 0..6 {
                m[(r, c)] *= phase;
            }
        }
        m
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum DriveMode {
    /// Ideal rotations and gates, no time elapses; quasi-static detuning has
    /// nothing to act on.
    #[default]
    Instantaneous,
    /// Square pulses of finite length evolved under the detuning ensemble.
    FiniteDuration(FiniteDrive),
}

impl DriveMode {
    /// Finite-duration drive with the default pulse settings.
    pub fn finite() -> Self {
        DriveMode::FiniteDuration(FiniteDrive::default())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InrmExperimentSpec {
    pub theta: f64,
    pub variant: CgVariant,
    pub imperfections: ImperfectionModel,
    pub drive: DriveMode,
}

/// `P_i^j`: population of level `i` (1–6) after variant `j` (1–4).
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PopulationTable {
    columns: [[f64; 6]; 4],
}

impl PopulationTable {
    pub fn from_columns(columns: [[f64; 6]; 4]) -> Result<Self> {
        for col in &columns {
            if col.iter().any(|&p| !(-1e-12..=1.0 + 1e-12).contains(&p)) {
                return Err(Error::InvalidState("populations must lie in [0, 1]"));
            }
        }
        Ok(Self { columns })
    }

    /// Panics unless `1 ≤ level ≤ 6` and `1 ≤ variant ≤ 4`.
    pub fn get(&self, level: usize, variant: usize) -> f64 {
        self.columns[variant - 1][level - 1]
    }

    pub fn column(&self, variant: CgVariant) -> &[f64; 6] {
        &self.columns[variant.number() - 1]
    }

    pub fn columns(&self) -> &[[f64; 6]; 4] {
        &self.columns
    }

    /// `P₄ʲ + P₅ʲ + P₆ʲ`.
    pub fn postselected_weight(&self, variant: CgVariant) -> f64 {
        compensated_sum(self.column(variant)[3..].iter().copied())
    }
}

fn validate_theta(theta: f64) -> Result<()> {
    if theta.is_finite() && theta >= 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidArgument(
            "theta must be finite and non-negative",
        ))
    }
}

fn populations6(m: &ComplexMatrix) -> [f64; 6] {
    let mut out = [0.0; 6];
    for (k, o) in out.iter_mut().enumerate() {
        *o = m[(k, k)].re;
    }
    out
}

/// All four variants for one detuning sample of the finite drive.
fn finite_columns(
    rho0: &ComplexMatrix,
    rf: &RfPropagator,
    p: f64,
    drive: &FiniteDrive,
    delta0: f64,
) -> Result<[[f64; 6]; 4]> {
    let u = rf.at(delta0);
    let after_first = rho0.conjugate_by(&u);
    let mut out = [[0.0; 6]; 4];
    for (col, variant) in out.iter_mut().zip(CgVariant::ALL) {
        let gated = match variant {
            CgVariant::Protect(n) => {
                finite_controlled_gate(&drive.model, n, p, drive.cg_pi_duration, delta0)?
                    .apply_matrix(&after_first)
            }
            CgVariant::NoGate => after_first.clone(),
        };
        *col = populations6(&gated.conjugate_by(&u));
    }
    Ok(out)
}

fn ensemble(imperfections: &ImperfectionModel) -> Result<Vec<DetuningSample>> {
    if imperfections.t2_star.is_none() {
        return Ok(vec![DetuningSample {
            delta0: 0.0,
            weight: 1.0,
        }]);
    }
    sample_detunings(imperfections)
}

/// Populations of all six levels for every variant. The four variants share
/// the preparation and first rotation of each ensemble member.
pub fn population_table(
    theta: f64,
    imperfections: &ImperfectionModel,
    drive: &DriveMode,
) -> Result<PopulationTable> {
    validate_theta(theta)?;
    let rho0 = imperfect_initial_state(imperfections)?.into_matrix();
    let p = imperfections.flip_prob_p;
    let columns = match drive {
        DriveMode::Instantaneous => {
            let u = tensor(
                &ComplexMatrix::identity(2),
                rotation_unitary(theta).matrix(),
            );
            let after_first = rho0.conjugate_by(&u);
            let mut out = [[0.0; 6]; 4];
            for (col, variant) in out.iter_mut().zip(CgVariant::ALL) {
                let gated = match variant {
                    CgVariant::Protect(n) => controlled_gate(n, p)?.apply_matrix(&after_first),
                    CgVariant::NoGate => after_first.clone(),
                };
                *col = populations6(&gated.conjugate_by(&u));
            }
            out
        }
        DriveMode::FiniteDuration(fd) => {
            fd.model.validate()?;
            let samples = ensemble(imperfections)?;
            let rf = fd.rf_unitary(theta)?;
            let mut acc = [[NeumaierSum::default(); 6]; 4];
            for s in &samples {
                let cols = finite_columns(&rho0, &rf, p, fd, s.delta0)?;
                for (a, c) in acc.iter_mut().zip(cols.iter()) {
                    for (ai, ci) in a.iter_mut().zip(c) {
                        ai.add(s.weight * ci);
                    }
                }
            }
            acc.map(|col| col.map(|s| s.value()))
        }
    };
    PopulationTable::from_columns(columns)
}

/// The six populations for one variant.
pub fn run_inrm_experiment(spec: &InrmExperimentSpec) -> Result<[f64; 6]> {
    validate_theta(spec.theta)?;
    spec.imperfections.validate()?;
    let rho0 = imperfect_initial_state(&spec.imperfections)?.into_matrix();
    let p = spec.imperfections.flip_prob_p;
    match &spec.drive {
        DriveMode::Instantaneous => {
            let u = tensor(
                &ComplexMatrix::identity(2),
                rotation_unitary(spec.theta).matrix(),
            );
            let channel = match spec.variant {
                CgVariant::Protect(n) => controlled_gate(n, p)?,
                CgVariant::NoGate => Channel::unitary(UnitaryOp::identity(6)),
            };
            let mid = channel.apply_matrix(&rho0.conjugate_by(&u));
            Ok(populations6(&mid.conjugate_by(&u)))
        }
        DriveMode::FiniteDuration(_) => {
            let table = population_table(spec.theta, &spec.imperfections, &spec.drive)?;
            Ok(*table.column(spec.variant))
        }
    }
}

/// Correlators from the postselected `|0⟩e` populations, using the raw joint
/// probabilities `P₄…P₆` without renormalizing each variant.
///
/// `⟨Q₂⟩ = Σ_{j≤3} qⱼ Σₖ P_{3+k}ʲ`, `⟨Q₂Q₃⟩ = Σ_{j≤3} qⱼ Σₖ qₖ P_{3+k}ʲ`,
/// `⟨Q₃⟩ = Σₖ qₖ P_{3+k}⁴`, with `q = (+1, +1, −1)`.
pub fn assemble_lg(table: &PopulationTable) -> Result<CorrelatorSet> {
    if table.postselected_weight(CgVariant::NoGate) < EMPTY_WEIGHT {
        return Err(Error::EmptyPostselection(
            "variant 4 has no |0⟩e population",
        ));
    }
    let gated = &CgVariant::ALL[..3];
    if gated
        .iter()
        .all(|&v| table.postselected_weight(v) < EMPTY_WEIGHT)
    {
        return Err(Error::EmptyPostselection(
            "variants 1-3 have no |0⟩e population",
        ));
    }
    let q = NuclearLevel::ALL.map(NuclearLevel::q);
    let mut q2 = NeumaierSum::default();
    let mut q2q3 = NeumaierSum::default();
    for (qj, &v) in q.iter().zip(gated) {
        for (qk, pk) in q.iter().zip(&table.column(v)[3..]) {
            q2.add(qj * pk);
            q2q3.add(qj * qk * pk);
        }
    }
    let mut q3 = NeumaierSum::default();
    for (qk, pk) in q.iter().zip(&table.column(CgVariant::NoGate)[3..]) {
        q3.add(qk * pk);
    }
    Ok(CorrelatorSet::from_terms(
        q2.value(),
        q2q3.value(),
        q3.value(),
    ))
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct LgRunReport {
    pub theta: f64,
    pub table: PopulationTable,
    pub correlators: CorrelatorSet,
    /// `P₄ʲ + P₅ʲ + P₆ʲ` for `j = 1…4`.
    pub postselected_weights: [f64; 4],
    /// Each variant's `|0⟩e` populations divided by its own weight. Reported
    /// for inspection only; the correlators never use them.
    pub renormalized: [[f64; 3]; 4],
}

/// Full table plus correlators for one θ.
pub fn lg_run(
    theta: f64,
    imperfections: &ImperfectionModel,
    drive: &DriveMode,
) -> Result<LgRunReport> {
    let table = population_table(theta, imperfections, drive)?;
    let postselected_weights = CgVariant::ALL.map(|v| table.postselected_weight(v));
    let weight_sum: f64 = postselected_weights[..3].iter().sum();
    if weight_sum > MAX_POSTSELECTED_SUM {
        return Err(Error::DegeneratePostselection { weight_sum });
    }
    let correlators = assemble_lg(&table)?;
    let mut renormalized = [[0.0; 3]; 4];
    for ((r, v), w) in renormalized
        .iter_mut()
        .zip(CgVariant::ALL)
        .zip(postselected_weights)
    {
        if w > EMPTY_WEIGHT {
            for (ri, pi) in r.iter_mut().zip(&table.column(v)[3..]) {
                *ri = pi / w;
            }
        }
    }
    Ok(LgRunReport {
        theta,
        table,
        correlators,
        postselected_weights,
        renormalized,
    })
}
