//! Exactly solvable dissipative XXZ Liouvillians.
//!
//! The crate assembles the Lindblad superoperator of a chain with nearest-neighbour
//! hopping dissipators, reduces it to the diagonal (classical) sector under periodic,
//! open and generalized boundary conditions, solves the Bethe equations of the
//! reduced operators, and evaluates the skin-effect observables on top of dense and
//! sparse spectral solvers.

pub mod basis;
pub mod bethe;
pub mod error;
pub mod liouvillian;
pub mod observables;
pub mod params;
pub mod scenario;
pub mod sparse;
pub mod spectra;
pub mod verify;

pub use basis::{build_sector, Config, SectorBasis};
pub use error::{Error, Result};
pub use params::{Boundary, ModelParams};
pub use sparse::SparseOperator;

pub use num_complex::Complex64 as C64;
