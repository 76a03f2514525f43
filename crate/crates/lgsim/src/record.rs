//! The serialized result of one command: what was asked, what came out, and
//! how to reproduce it.

use crate::error::CliError;
use lgsim_core::noise::{DecayFit, ImperfectionModel};
use lgsim_core::nv::{DriveMode, FlipFit, NuclearLevel, NvModel, PopulationTable};
use lgsim_core::{CorrelatorSet, K3Maximum, LgString};
use serde::{Deserialize, Serialize};
use std::io::Write;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRecord {
    pub command: String,
    pub inputs: Inputs,
    pub outputs: Outputs,
    pub provenance: Provenance,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub seed: u64,
    pub version: String,
    /// Seconds since the Unix epoch; absent for seeded runs so their output
    /// is byte-identical.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timestamp: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum SchemeName {
    #[value(alias = "von-neumann", alias = "vonneumann")]
    Neumann,
    #[value(alias = "lueders")]
    Luders,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Inputs {
    Ideal {
        theta: String,
        scheme: SchemeName,
        dim: usize,
        n: usize,
        sweep: bool,
        grid: usize,
    },
    Nv {
        theta: String,
        imperfections: ImperfectionModel,
        drive: DriveMode,
    },
    Odmr {
        model: NvModel,
        flip_prob_p: Option<f64>,
        protected: NuclearLevel,
        nuclear_populations: [f64; 3],
        mw_pi_duration: f64,
        freq_start: f64,
        freq_stop: f64,
        points: usize,
    },
    CgRepeat {
        flip_prob_p: f64,
        k_max: usize,
        readout_noise: f64,
    },
    Fid {
        imperfections: ImperfectionModel,
        delta_ref: f64,
        span: f64,
        points: usize,
        readout_noise: f64,
    },
    Reproduce {
        imperfections: ImperfectionModel,
        drive: DriveMode,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub luders_bound: f64,
    pub reference_simulated_k3: f64,
    pub reference_measured_k3: f64,
    pub reference_measured_sigma: f64,
    pub exceeds_luders_bound: bool,
    pub exceeds_measured_k3: bool,
}

impl Comparison {
    pub fn for_k3(k3: f64) -> Self {
        Self {
            luders_bound: 1.5,
            reference_simulated_k3: 1.632,
            reference_measured_k3: 1.625,
            reference_measured_sigma: 0.022,
            exceeds_luders_bound: k3 > 1.5,
            exceeds_measured_k3: k3 > 1.625,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReproducedValue {
    pub quantity: String,
    pub reproduced: f64,
    /// Published value, where one exists.
    pub reference: Option<f64>,
    pub note: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[allow(clippy::large_enum_variant)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Outputs {
    Ideal {
        theta: String,
        correlators: CorrelatorSet,
        string: LgString,
        maximum: Option<K3Maximum>,
    },
    Nv {
        correlators: CorrelatorSet,
        table: PopulationTable,
        postselected_weights: [f64; 4],
        renormalized: [[f64; 3]; 4],
        comparison: Comparison,
    },
    Odmr {
        curve: Vec<(f64, f64)>,
        /// Line centres, Hz, where `P0` departs furthest from the
        /// off-resonant baseline.
        resonances: Vec<f64>,
        spacings: Vec<f64>,
    },
    CgRepeat {
        curve: Vec<(usize, f64)>,
        fit: FlipFit,
    },
    Fid {
        curve: Vec<(f64, f64)>,
        fit: DecayFit,
    },
    Reproduce {
        values: Vec<ReproducedValue>,
    },
}

impl ResultRecord {
    pub fn write(&self, format: Format, out: &mut dyn Write) -> Result<(), CliError> {
        let io = |source| CliError::Io {
            context: "writing output".into(),
            source,
        };
        match format {
            Format::Json => {
                serde_json::to_writer_pretty(&mut *out, self).map_err(|e| io(e.into()))?;
                writeln!(out).map_err(io)
            }
            Format::Csv => self.write_csv(out),
        }
    }

    fn write_csv(&self, out: &mut dyn Write) -> Result<(), CliError> {
        let mut w = csv::Writer::from_writer(out);
        let result = match &self.outputs {
            Outputs::Ideal {
                theta,
                correlators: c,
                string,
                maximum,
            } => {
                let (tmax, kmax) = maximum
                    .map(|m| (crate::units::format_theta(m.theta), m.k3.to_string()))
                    .unwrap_or_default();
                w.write_record([
                    "theta",
                    "q2",
                    "q2q3",
                    "q3",
                    "k3",
                    "n",
                    "kn",
                    "theta_max",
                    "k3_max",
                ])
                .and_then(|_| {
                    w.write_record([
                        theta.clone(),
                        c.q2_mean.to_string(),
                        c.q2q3_mean.to_string(),
                        c.q3_mean.to_string(),
                        c.k3.to_string(),
                        string.n.to_string(),
                        string.value.to_string(),
                        tmax,
                        kmax,
                    ])
                })
            }
            Outputs::Nv { table, .. } => w
                .write_record(["variant", "level", "population"])
                .and_then(|_| {
                    for variant in 1..=4 {
                        for level in 1..=6 {
                            w.write_record([
                                variant.to_string(),
                                level.to_string(),
                                table.get(level, variant).to_string(),
                            ])?;
                        }
                    }
                    Ok(())
                }),
            Outputs::Odmr { curve, .. } => write_pairs(&mut w, ["frequency_hz", "p0"], curve),
            Outputs::CgRepeat { curve, .. } => write_pairs(&mut w, ["k", "p0"], curve),
            Outputs::Fid { curve, .. } => write_pairs(&mut w, ["t_s", "p0"], curve),
            Outputs::Reproduce { values } => w
                .write_record(["quantity", "reproduced", "reference", "note"])
                .and_then(|_| {
                    for v in values {
                        w.write_record([
                            v.quantity.clone(),
                            v.reproduced.to_string(),
                            v.reference.map(|r| r.to_string()).unwrap_or_default(),
                            v.note.clone(),
                        ])?;
                    }
                    Ok(())
                }),
        };
        result
            .and_then(|_| w.flush().map_err(Into::into))
            .map_err(|e| CliError::Io {
                context: "writing CSV".into(),
                source: std::io::Error::other(e),
            })
    }
}

fn write_pairs<W: Write, A: ToString, B: ToString>(
    w: &mut csv::Writer<W>,
    header: [&str; 2],
    rows: &[(A, B)],
) -> csv::Result<()> {
    w.write_record(header)?;
    for (a, b) in rows {
        w.write_record([a.to_string(), b.to_string()])?;
    }
    Ok(())
}
