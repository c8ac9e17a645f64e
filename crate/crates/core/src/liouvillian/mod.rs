//! Superoperator assembly and its reduction to the diagonal sector.
//!
//! The density matrix is vectorized row-major, `|ρ⟩ = Σ ρ_ij |i⟩⊗|j⟩` with index
//! `i·2^L + j`; the first factor is the right Hilbert space. Under this convention
//! `AρB` maps to `A ⊗ Bᵀ`.

mod effective;
mod full;
mod gauge;
mod projectors;

pub use effective::{build_effective_liouvillian, hop_channels, HopChannel};
pub use full::{
    build_full_liouvillian, build_full_liouvillian_with, coherent_energy, DissipatorNorm,
    MAX_FULL_SITES,
};
pub use gauge::{
    build_hermitian_obc, build_large_phi_limit, descending_permutation, gauge_log_weights,
    gauge_transform, is_upper_triangular,
};
pub use projectors::{build_projectors, project_diagonal_sector, ProjectorSet};
