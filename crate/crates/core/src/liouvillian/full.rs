//! The full double-space Lindblad superoperator.

use num_complex::Complex64 as C64;

use super::effective::{hop_channels, HopChannel};
use crate::basis::{apply_hop, sz, Config};
use crate::error::{Error, Result};
use crate::params::{Boundary, ModelParams};
use crate::sparse::{SparseBuilder, SparseOperator};

/// Largest chain whose superoperator (dimension `4^L`) is assembled.
pub const MAX_FULL_SITES: usize = 6;

/// Normalization of the dissipator `D[ρ]`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum DissipatorNorm {
    /// `LρL† − ½{L†L, ρ}`; its diagonal sector is exactly the effective operator.
    #[default]
    Standard,
    /// `2LρL† − {L†L, ρ}`, twice the standard form.
    Doubled,
}

impl DissipatorNorm {
    fn factors(self) -> (f64, f64) {
        match self {
            DissipatorNorm::Standard => (1.0, 0.5),
            DissipatorNorm::Doubled => (2.0, 1.0),
        }
    }
}

/// Diagonal energy of the coherent Hamiltonian `J' Σ S^z_j S^z_{j+1} + h Σ S^z_j`.
///
/// The bond set follows the boundary mode: all `L` bonds for periodic chains,
/// the `L - 1` open bonds otherwise.
pub fn coherent_energy(params: &ModelParams, config: Config) -> f64 {
    let l = params.l;
    let bonds = match params.bc {
        Boundary::Periodic => l,
        Boundary::Open | Boundary::Generalized => l - 1,
    };
    let mut e = 0.0;
    for j in 1..=bonds {
        let k = j % l + 1;
        e += params.j_prime * sz(config, j) * sz(config, k);
    }
    for j in 1..=l {
        e += params.h * sz(config, j);
    }
    e
}

/// Full superoperator with the standard dissipator normalization.
pub fn build_full_liouvillian(params: &ModelParams) -> Result<SparseOperator> {
    build_full_liouvillian_with(params, DissipatorNorm::Standard)
}

/// Full `4^L`-dimensional superoperator including the coherent part.
pub fn build_full_liouvillian_with(
    params: &ModelParams,
    norm: DissipatorNorm,
) -> Result<SparseOperator> {
    params.validate()?;
    if params.l > MAX_FULL_SITES {
        return Err(Error::Capacity {
            what: "L for the full superoperator",
            value: params.l as u64,
            limit: MAX_FULL_SITES as u64,
        });
    }
    let n = 1usize << params.l;
    let energies: Vec<f64> = (0..n)
        .map(|c| coherent_energy(params, c as Config))
        .collect();
    Ok(assemble(params.l, &hop_channels(params), &energies, norm))
}

fn assemble(
    l: usize,
    channels: &[HopChannel],
    energies: &[f64],
    norm: DissipatorNorm,
) -> SparseOperator {
    let n = 1usize << l;
    let dim = n * n;
    let (jump, anti) = norm.factors();
    let mut b = SparseBuilder::with_capacity(dim, dim * (channels.len() + 1));
    for i in 0..n {
        for j in 0..n {
            let col = i * n + j;
            let mut diag = C64::new(0.0, -(energies[i] - energies[j]));
            for ch in channels {
                let hi = apply_hop(i as Config, ch.from, ch.to);
                let hj = apply_hop(j as Config, ch.from, ch.to);
                // L ⊗ L*: the hop matrix is real
                if let (Some(i2), Some(j2)) = (hi, hj) {
                    b.push_real(i2 as usize * n + j2 as usize, col, jump * ch.rate);
                }
                // L†L is the projector onto configurations the hop can act on
                let weight = hi.is_some() as u8 as f64 + hj.is_some() as u8 as f64;
                diag -= anti * ch.rate * weight;
            }
            b.push(col, col, diag);
        }
    }
    b.build()
}
