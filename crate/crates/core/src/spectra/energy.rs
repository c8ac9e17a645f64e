use log::warn;

use super::SpectrumResult;
use crate::error::{Error, Result};

const REAL_TOLERANCE: f64 = 1e-8;

/// `Σ_j (E_j − E_min) / (E_max − E_min)` over the whole spectrum.
///
/// Complex spectra use the real parts, with a logged warning.
pub fn normalized_mean_energy(spec: &SpectrumResult) -> Result<f64> {
    if spec.dim() == 0 {
        return Err(Error::Domain("empty spectrum".into()));
    }
    if spec.max_imag() > REAL_TOLERANCE {
        warn!(
            "spectrum is complex (max |Im E| = {:.3e}); using real parts",
            spec.max_imag()
        );
    }
    let re: Vec<f64> = spec.eigenvalues.iter().map(|e| e.re).collect();
    let min = re.iter().copied().fold(f64::INFINITY, f64::min);
    let max = re.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let width = max - min;
    if !(width > f64::EPSILON * max.abs().max(min.abs()).max(1.0)) {
        return Err(Error::Domain("degenerate spectrum: E_max = E_min".into()));
    }
    Ok(re.iter().map(|e| (e - min) / width).sum())
}

/// Per-level mean of the normalized energies, `normalized_mean_energy / D`.
pub fn mean_level_energy(spec: &SpectrumResult) -> Result<f64> {
    Ok(normalized_mean_energy(spec)? / spec.dim() as f64)
}

/// `Ē(a) − Ē(b)` with per-level means; both spectra must have equal size.
pub fn mean_level_difference(a: &SpectrumResult, b: &SpectrumResult) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::invalid(format!(
            "spectra of different size ({} vs {})",
            a.dim(),
            b.dim()
        )));
    }
    Ok(mean_level_energy(a)? - mean_level_energy(b)?)
}
