//! Truncated-Fock-space toolkit for squeezed cat state generation by
//! interference of |1⟩ and |2⟩ on a tunable beam splitter with quadrature
//! heralding: the lossy generation chain, closest-superposition analysis,
//! Wigner functions, homodyne sampling, maximum-likelihood tomography, and
//! bootstrap uncertainties.

extern crate blas_src;

pub mod channels;
pub mod density;
pub mod error;
pub mod fock;
mod optim;
pub mod operators;
pub mod protocol;
pub mod quadrature;
pub mod tomography;
pub mod wigner;

pub use channels::{
    apply_loss, apply_loss_on_mode, beam_splitter_unitary, herald_project, pockels_unitary,
    retardance_to_reflectivity, BeamSplitterSpec, HeraldSpec,
};
pub use density::{fidelity, fidelity_pure, DensityMatrix, Mode};
pub use error::{Error, Result};
pub use fock::{
    cat_state, coherent_state, fock_state, fock_wavefunction, fock_wavefunctions, FockVector,
    Parity, ScssParams,
};
pub use protocol::{
    average_over_storage, average_over_storage_even, closest_scss, decay_fit, estimate_r_squared,
    generation_rate, heralded_double, heralded_single, ideal_heralded_state, simulate_even,
    simulate_scss, simulate_scss_windowed, storage_loss, sweep_ideal, sweep_realistic,
    ExperimentConfig, SweepResult, SweepRow, OPERATING_REFLECTIVITY,
};
pub use quadrature::{quadrature_pdf, QuadraturePdf};
pub use tomography::{
    count_negative_regions, ingest_density_matrix, loss_correct, maxlik_reconstruct,
    parametric_bootstrap, records_from_csv, records_to_csv, sample_quadratures, BootstrapReport,
    IngestReport, PhaseMode, QuadratureRecord, Reconstruction, TomographyJob,
};
pub use wigner::{wigner, wigner_point, GridSpec, WignerGrid};
