//! Dual-pairing summation-by-parts (DP-SBP) finite differences for the
//! vector-invariant shallow water equations.
//!
//! The crate is organised bottom-up:
//!
//! - [`operators`]: first-derivative operator pairs `D₊`/`D₋` with their
//!   diagonal quadrature `P`, stored as bands plus dense boundary blocks.
//! - [`hyperviscosity`]: energy-stable high-order dissipation built from the
//!   same pair.
//! - [`swe1d`] / [`swe2d`]: semi-discrete right-hand sides, SAT boundary
//!   penalties, energy norms and discrete invariants.
//! - [`timestep`]: classical RK4 with a frozen CFL time step.
//! - [`analysis`]: exact solutions, manufactured forcings, convergence tables,
//!   eigenspectra and turbulence spectra.
//! - [`io`]: CSV/JSON/binary artifact readers and writers.

pub mod analysis;
pub mod error;
pub mod hyperviscosity;
pub mod io;
pub mod operators;
pub mod swe1d;
pub mod swe2d;
pub mod timestep;

pub use error::{Error, Result};
pub use hyperviscosity::{HvOrder, HyperViscosity};
pub use operators::{Direction, Family, Grid1D, SbpOperatorPair};
pub use swe1d::{BoundarySpec, FluxForm, State1D};
pub use swe2d::{DiagnosticsRecord, State2D};
pub use timestep::TimeControl;
