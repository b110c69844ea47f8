//! Verification battery: exact solutions, manufactured forcings, convergence
//! tables, eigenspectra and turbulence spectra.

pub mod convergence;
pub mod dam_break;
pub mod eigen;
pub mod experiments;
pub mod mms;
pub mod setups;
pub mod spectra;

pub use convergence::{convergence_study, weighted_l2, ConvergenceRow, ConvergenceTable, LevelErrors};
pub use dam_break::{dam_break_cm, DamBreak};
pub use eigen::{assemble_linear_matrix, eigenvalues, fd_jacobian, EigenReport};
pub use mms::{Mms1d, Mms2d, MmsFlux};
pub use setups::{barotropic_jet_setup, lake_at_rest_setup, merging_vortex_setup, Grid2D};
pub use spectra::{energy_enstrophy_spectra, Spectra};
