//! Bethe ansatz solutions of the effective Liouvillians.

mod equations;
mod newton;
mod roots;
mod series;
mod wavefunction;

pub use equations::{
    bae_residual, bethe_energy, gbc_bae_residual, kappa, log_phases, momentum_of_rapidity,
    obc_bae_residual, obc_energy, pbc_bae_residual, pbc_energy, rapidity_of_momentum, scattering,
    theta, ResidualMode,
};
pub use newton::{newton_solve, NewtonOptions, NewtonOutcome};
pub use roots::{
    accept_roots, continue_in_deltas, continue_in_phi, initial_guesses, match_levels, scan_roots,
    solve_roots, write_roots_csv, BetheRoots, Coverage, RootOptions, BOUNDARY_STEPS, MAX_IMAG,
};
pub use series::{critical_phi_residual, root_density};
pub use wavefunction::{bethe_wavefunction, Amplitude, BetheWavefunction};
