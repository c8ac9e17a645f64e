//! Dense spectra, steady states and spectral summaries.

mod dense;
mod energy;
mod steady;

pub use dense::{dense_spectrum, SpectrumResult, MAX_DENSE_DIM, RESIDUAL_TOLERANCE};
pub use energy::{mean_level_difference, mean_level_energy, normalized_mean_energy};
pub use steady::{steady_state, steady_state_with, SteadyOptions, SteadyState, MAX_STEADY_DIM};

use std::io::Write;

use num_complex::Complex64 as C64;

use crate::basis::{config_bits, SectorBasis};
use crate::error::Result;

/// Largest distance under greedy nearest-neighbour pairing of two spectra.
///
/// Infinite when the sizes differ.
pub fn multiset_distance(a: &[C64], b: &[C64]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    let mut used = vec![false; b.len()];
    let mut worst = 0.0f64;
    for x in a {
        let best = (0..b.len())
            .filter(|&k| !used[k])
            .min_by(|&p, &q| (x - b[p]).norm().total_cmp(&(x - b[q]).norm()));
        if let Some(k) = best {
            used[k] = true;
            worst = worst.max((x - b[k]).norm());
        }
    }
    worst
}

/// `index,re,im` rows in sorted order.
pub fn write_spectrum_csv<W: Write>(spec: &SpectrumResult, mut w: W) -> Result<()> {
    writeln!(w, "index,re,im")?;
    for (rank, &k) in spec.sorted_order.iter().enumerate() {
        let e = spec.eigenvalues[k];
        writeln!(w, "{rank},{:.16e},{:.16e}", e.re, e.im)?;
    }
    Ok(())
}

/// `config_bits,probability` rows in basis order.
pub fn write_steady_csv<W: Write>(
    state: &SteadyState,
    basis: &SectorBasis,
    mut w: W,
) -> Result<()> {
    writeln!(w, "config_bits,probability")?;
    for (&c, p) in basis.configs().iter().zip(&state.probabilities) {
        writeln!(w, "{},{:.16e}", config_bits(c, basis.l()), p)?;
    }
    Ok(())
}
