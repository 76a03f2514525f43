//! Six-level NV-center model of the experiment: electron ancilla
//! `{|1⟩e, |0⟩e}` ⊗ ¹⁴N spin-1, controlled gates with postselection on the
//! unflipped ancilla, and the population tables `P_i^j` they produce.

mod characterize;
mod gate;
mod inrm;
mod model;

pub use characterize::{fit_flip_probability, odmr_spectrum, repeated_cg, FlipFit, OdmrConfig};
pub use gate::{controlled_gate, selective_flip_unitary, Channel};
pub use inrm::{
    assemble_lg, lg_run, population_table, run_inrm_experiment, CgVariant, DriveMode, FiniteDrive,
    InrmExperimentSpec, LgRunReport, PopulationTable, DEFAULT_SYNC_ORDER,
};
pub use model::{
    build_nv_hamiltonian, level_index, ElectronLevel, NuclearLevel, NvModel, PulseParams,
};
