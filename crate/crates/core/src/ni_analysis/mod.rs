//! Negative-imaginary analysis: frequency-domain NI/SNI classification,
//! residue and storage-matrix certificates, trajectory dissipation audits
//! and the steady-state interconnection checks.

mod audit;
mod certificate;
mod frequency;
mod sector;
mod state_space;

pub use audit::{nni_trajectory_audit, nni_trajectory_audit_with, DifferenceScheme, DissipationReport};
pub use certificate::{certificate_check, CertificateMode, CertificateReport};
pub use frequency::{
    hermitian_eigenvalues, ni_frequency_test, ni_matrix, residue_check, FrequencyGrid,
    GridSummary, NiClass, NiVerdict, ResidueReport, Witness, DEFAULT_EIG_TOL, POLE_MATCH_TOL,
};
pub use sector::{sector_bound_check, SectorReport};
pub use state_space::{dc_gain, observability_rank, transfer_eval, StateSpace, C64, POLE_TOL};
