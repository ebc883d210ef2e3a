//! Reproducible experiment harness: text run configurations, a binary
//! snapshot format with provenance metadata, and the batch drivers behind
//! the command-line interface.

pub mod config;
pub mod drivers;
pub mod snapshot;

pub use config::{AxisSpec, BoundaryTreatment, InitSpec, ModelKind, RunConfig};
pub use drivers::{
    absorb_sweep, convergence_csv, convergence_study, demo_vortex, epsilon_scalability_study,
    run_simulation, scalability_csv, schemes_table, schemes_table_text, soliton_reference,
    sweep_csv, ConvRow, RunSummary, ScalRow, SchemeRow, StudyAxis, SweepRow, VortexOutcome,
    VortexParams, SOLITON_DOMAIN, SOLITON_T_FINAL,
};
pub use snapshot::{read_snapshot, write_snapshot, SnapshotMeta};
