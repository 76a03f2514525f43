//! Projective measurements with a dichotomic outcome and the two update
//! rules that distinguish the Lüders bound from the three-level maximum.
//!
//! A scheme groups rank-one (or higher-rank) projectors into the outcomes
//! `+1` and `−1`. With [`UpdateRule::Luders`] an outcome collapses onto its
//! summed projector `Π± ρ Π±`, keeping coherence inside a degenerate
//! outcome. With [`UpdateRule::VonNeumann`] each projector acts separately,
//! `Σ Πₗ ρ Πₗ`, which destroys that coherence.

use crate::linalg::ComplexMatrix;
use crate::state::DensityMatrix;
use crate::{Error, Result};
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

/// Branches below this probability carry no post-measurement state.
pub const ZERO_PROBABILITY: f64 = 1e-14;

const PROJECTOR_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Dichotomic {
    Plus,
    Minus,
}

impl Dichotomic {
    pub const BOTH: [Dichotomic; 2] = [Dichotomic::Plus, Dichotomic::Minus];

    pub fn value(self) -> f64 {
        match self {
            Dichotomic::Plus => 1.0,
            Dichotomic::Minus => -1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum UpdateRule {
    Luders,
    VonNeumann,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LabeledProjector {
    pub label: String,
    pub projector: ComplexMatrix,
    pub outcome: Dichotomic,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementScheme {
    projectors: Vec<LabeledProjector>,
    update_rule: UpdateRule,
    dim: usize,
}

impl MeasurementScheme {
    /// Checks that the projectors are Hermitian, idempotent, mutually
    /// orthogonal and resolve the identity.
    pub fn new(projectors: Vec<LabeledProjector>, update_rule: UpdateRule) -> Result<Self> {
        let first = projectors
            .first()
            .ok_or(Error::InvalidScheme("no projectors"))?;
        let dim = first.projector.dim()?;
        let mut total = ComplexMatrix::zeros(dim, dim);
        for (i, p) in projectors.iter().enumerate() {
            let m = &p.projector;
            if m.dim()? != dim {
                return Err(Error::InvalidScheme("projector dimensions differ"));
            }
            if m.hermitian_deviation() > PROJECTOR_TOL {
                return Err(Error::InvalidScheme("projector is not Hermitian"));
            }
            if (m * m).max_abs_diff(m) > PROJECTOR_TOL {
                return Err(Error::InvalidScheme("projector is not idempotent"));
            }
            for q in &projectors[i + 1..] {
                if (m * &q.projector).max_abs_diff(&ComplexMatrix::zeros(dim, dim)) > PROJECTOR_TOL
                {
                    return Err(Error::InvalidScheme("projectors are not orthogonal"));
                }
            }
            total = &total + m;
        }
        if total.max_abs_diff(&ComplexMatrix::identity(dim)) > PROJECTOR_TOL {
            return Err(Error::InvalidScheme(
                "projectors do not sum to the identity",
            ));
        }
        Ok(Self {
            projectors,
            update_rule,
            dim,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn update_rule(&self) -> UpdateRule {
        self.update_rule
    }

    pub fn projectors(&self) -> &[LabeledProjector] {
        &self.projectors
    }

    pub fn with_rule(&self, update_rule: UpdateRule) -> Self {
        Self {
            update_rule,
            ..self.clone()
        }
    }

    /// Summed projector onto one dichotomic outcome.
    pub fn outcome_projector(&self, outcome: Dichotomic) -> ComplexMatrix {
        self.projectors
            .iter()
            .filter(|p| p.outcome == outcome)
            .fold(ComplexMatrix::zeros(self.dim, self.dim), |acc, p| {
                &acc + &p.projector
            })
    }

    /// The dichotomic observable `Q = Π₊ − Π₋`.
    pub fn observable(&self) -> ComplexMatrix {
        &self.outcome_projector(Dichotomic::Plus) - &self.outcome_projector(Dichotomic::Minus)
    }

    /// Unnormalized post-measurement operator for one outcome; its trace is
    /// the outcome probability.
    pub fn apply_outcome(&self, rho: &ComplexMatrix, outcome: Dichotomic) -> ComplexMatrix {
        match self.update_rule {
            UpdateRule::Luders => {
                let p = self.outcome_projector(outcome);
                &(&p * rho) * &p
            }
            UpdateRule::VonNeumann => self
                .projectors
                .iter()
                .filter(|p| p.outcome == outcome)
                .fold(ComplexMatrix::zeros(self.dim, self.dim), |acc, p| {
                    &acc + &(&(&p.projector * rho) * &p.projector)
                }),
        }
    }
}

fn rank_one_scheme(labels: &[(&str, Dichotomic)], rule: UpdateRule) -> MeasurementScheme {
    let dim = labels.len();
    let projectors = labels
        .iter()
        .enumerate()
        .map(|(k, (label, outcome))| LabeledProjector {
            label: label.to_string(),
            projector: ComplexMatrix::basis_projector(dim, k),
            outcome: *outcome,
        })
        .collect();
    MeasurementScheme::new(projectors, rule).expect("computational-basis projectors are valid")
}

/// `Π1, Π0, Π−1` on the qutrit, with `q = (+1, +1, −1)`.
pub fn standard_qutrit_scheme(rule: UpdateRule) -> MeasurementScheme {
    rank_one_scheme(
        &[
            ("+1", Dichotomic::Plus),
            ("0", Dichotomic::Plus),
            ("-1", Dichotomic::Minus),
        ],
        rule,
    )
}

/// Two-level analogue: `|↑⟩ → +1`, `|↓⟩ → −1`.
pub fn standard_qubit_scheme(rule: UpdateRule) -> MeasurementScheme {
    rank_one_scheme(
        &[("up", Dichotomic::Plus), ("down", Dichotomic::Minus)],
        rule,
    )
}

#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementBranch {
    pub outcome: Dichotomic,
    pub probability: f64,
    /// `None` when the branch has (numerically) zero probability.
    pub post_state: Option<DensityMatrix>,
}

/// One branch per dichotomic outcome, `+1` first.
pub fn measure(rho: &DensityMatrix, scheme: &MeasurementScheme) -> Result<Vec<MeasurementBranch>> {
    if rho.dim() != scheme.dim() {
        return Err(Error::DimensionMismatch {
            expected: scheme.dim(),
            found: rho.dim(),
        });
    }
    let mut out = vec![];
    for outcome in Dichotomic::BOTH {
        let unnormalized = scheme.apply_outcome(rho.matrix(), outcome);
        let probability = unnormalized.trace().re.max(0.0);
        let post_state =
            (probability > ZERO_PROBABILITY).then(|| DensityMatrix::normalized(unnormalized));
        out.push(MeasurementBranch {
            outcome,
            probability,
            post_state,
        });
    }
    Ok(out)
}
