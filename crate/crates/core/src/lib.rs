//! Pilot-wave simulation of radiation-matter interaction.
//!
//! The crate evaluates point-charge and dipole fields split into their
//! attached (velocity) and free (acceleration) parts, evolves the
//! Kemmer block-spinor form of Maxwell's equations on a grid, computes
//! photon and electron guidance velocities, models two-level atoms and
//! integrates photon trajectories around a driven dipole.
//!
//! Units: `c = 1`. Dipole scenarios measure lengths in wavelengths and
//! times in optical periods. Electron wave functions use `hbar = m = 1`.

// `!(x > 0.0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod fields;
pub mod guidance;
pub mod io;
pub mod kemmer;
pub mod trajectories;
pub mod twolevel;
pub mod verify;

pub use error::{Error, Result};
pub use fields::{
    covariant_tensors, dipole_fields, energy_and_flux, lienard_wiechert, project_transverse_r,
    retarded_time, ChargeKinematics, DipoleSource, FieldSample, Vec3, Worldline,
};
pub use guidance::{
    effective_electron_density, electron_velocity, photon_velocity, photon_velocity_entangled,
    quantum_potential, Electron, EntangledPoint, WaveFunction,
};
pub use kemmer::{
    apply_hamiltonian, density_split_check, evolve, free_norm, Boundary, FieldPart, Grid,
    KemmerSource, KemmerSpinor, KemmerState, PhotonCoordinate,
};
pub use num_complex::Complex64;
pub use trajectories::{
    integrate_photon, run_figure_ensemble, PhotonTrajectory, ScenarioField, Termination,
};
pub use twolevel::{
    dispersion_response, sample_emission_time, self_field_amplitude, spectrum_from_wavetrains,
    symmetrized_norm, DispersionResponse, TwoLevelState,
};
