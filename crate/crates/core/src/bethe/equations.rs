//! Bethe equations, dispersion relations and rapidity maps.
//!
//! Periodic and generalized chains scatter with the shifted momenta
//! `q = k + iφ`; open chains are written in the gauge where hopping is symmetric,
//! so their momenta are real for the whole band.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::params::{Boundary, ModelParams};

const I: C64 = C64::new(0.0, 1.0);

/// Which form of the periodic equations to evaluate.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ResidualMode {
    /// `|lhs − rhs| / max(1, |lhs|, |rhs|)` of the cleared product form.
    Exponential,
    /// Absolute residual of the logarithmic rapidity form.
    Logarithmic,
}

/// Two-body factor `S(a, b) = 1 − 2Δ e^{ib} + e^{i(a+b)}`.
#[inline]
pub fn scattering(a: C64, b: C64, delta: f64) -> C64 {
    1.0 - 2.0 * delta * (I * b).exp() + (I * (a + b)).exp()
}

/// `θ_n(λ) = 2 arctan[tan(φλ/2) coth(nφ/2)]`, principal branch.
pub fn theta(n: u32, lambda: C64, phi: f64) -> C64 {
    let coth = 1.0 / (n as f64 * phi / 2.0).tanh();
    2.0 * ((phi * lambda / 2.0).tan() * coth).atan()
}

/// Rapidity of a periodic-chain momentum: the inverse of [`momentum_of_rapidity`].
pub fn rapidity_of_momentum(k: C64, phi: f64) -> C64 {
    let q = k + I * phi;
    let cot = 1.0 / (q / 2.0).tan();
    (2.0 / phi) * ((phi / 2.0).tanh() * cot).atan()
}

/// Momentum from `e^{i(k + iφ)} = sin[φ(λ+i)/2] / sin[φ(λ−i)/2]`, with the
/// real part in `(−π, π]`.
pub fn momentum_of_rapidity(lambda: C64, phi: f64) -> C64 {
    let s = (phi * (lambda + I) / 2.0).sin() / (phi * (lambda - I) / 2.0).sin();
    -I * (s.ln() + phi)
}

fn relative(lhs: C64, rhs: C64) -> f64 {
    (lhs - rhs).norm() / 1f64.max(lhs.norm()).max(rhs.norm())
}

fn check_count(k: &[C64], params: &ModelParams) -> Result<()> {
    if k.is_empty() {
        return Err(Error::invalid("Bethe equations need at least one momentum"));
    }
    if k.len() != params.m {
        return Err(Error::invalid(format!(
            "{} momenta for M = {}",
            k.len(),
            params.m
        )));
    }
    if k.iter().any(|v| !(v.re.is_finite() && v.im.is_finite())) {
        return Err(Error::Numeric("non-finite momentum".into()));
    }
    Ok(())
}

fn sign(m: usize) -> f64 {
    if m % 2 == 1 {
        1.0
    } else {
        -1.0
    }
}

/// Both sides of the cleared periodic equations,
/// `e^{ik_j L} Π S(q_j, q_l) = (−1)^{M−1} κ_j Π S(q_l, q_j)`, with `κ_j = 1`.
fn shifted_sides(k: &[C64], l: usize, phi: f64, kappa: impl Fn(C64) -> C64) -> Vec<(C64, C64)> {
    let delta = phi.cosh();
    let q: Vec<C64> = k.iter().map(|&v| v + I * phi).collect();
    let s = sign(k.len());
    (0..k.len())
        .map(|j| {
            let mut lhs = (I * k[j] * l as f64).exp();
            let mut rhs = C64::from(s) * kappa(k[j]);
            for m in (0..k.len()).filter(|&m| m != j) {
                lhs *= scattering(q[j], q[m], delta);
                rhs *= scattering(q[m], q[j], delta);
            }
            (lhs, rhs)
        })
        .collect()
}

pub(crate) fn pbc_sides(k: &[C64], params: &ModelParams) -> Result<Vec<(C64, C64)>> {
    check_count(k, params)?;
    Ok(shifted_sides(k, params.l, params.phi, |_| C64::from(1.0)))
}

/// Per-root residuals of the periodic equations.
///
/// The logarithmic form needs the quantum numbers and `φ ≠ 0`.
pub fn pbc_bae_residual(
    k: &[C64],
    params: &ModelParams,
    quantum_numbers: Option<&[f64]>,
    mode: ResidualMode,
) -> Result<Vec<f64>> {
    match mode {
        ResidualMode::Exponential => Ok(pbc_sides(k, params)?
            .into_iter()
            .map(|(a, b)| relative(a, b))
            .collect()),
        ResidualMode::Logarithmic => {
            check_count(k, params)?;
            let numbers = quantum_numbers
                .ok_or_else(|| Error::invalid("logarithmic residual needs quantum numbers"))?;
            if numbers.len() != k.len() {
                return Err(Error::invalid(format!(
                    "{} quantum numbers for {} momenta",
                    numbers.len(),
                    k.len()
                )));
            }
            let phases = log_phases(k, params)?;
            Ok(phases
                .iter()
                .zip(numbers)
                .map(|(p, n)| (p - 2.0 * std::f64::consts::PI * n).norm())
                .collect())
        }
    }
}

/// `L θ₁(λ_j) + iφL − Σ_{l≠j} θ₂(λ_j − λ_l)`, equal to `2π I_j` on a root.
pub fn log_phases(k: &[C64], params: &ModelParams) -> Result<Vec<C64>> {
    let phi = params.phi;
    if phi == 0.0 {
        return Err(Error::Domain(
            "rapidities degenerate at phi = 0; use free momenta 2 pi I / L".into(),
        ));
    }
    let lam: Vec<C64> = k.iter().map(|&v| rapidity_of_momentum(v, phi)).collect();
    let l = params.l as f64;
    Ok((0..lam.len())
        .map(|j| {
            let mut p = l * theta(1, lam[j], phi) + I * phi * l;
            for m in (0..lam.len()).filter(|&m| m != j) {
                p -= theta(2, lam[j] - lam[m], phi);
            }
            p
        })
        .collect())
}

fn near_trivial_reflection(k: C64) -> bool {
    let z = (I * k).exp();
    (z - 1.0).norm() < 1e-10 || (z + 1.0).norm() < 1e-10
}

pub(crate) fn obc_sides(k: &[C64], params: &ModelParams) -> Result<Vec<(C64, C64)>> {
    check_count(k, params)?;
    if let Some(v) = k.iter().find(|&&v| near_trivial_reflection(v)) {
        return Err(Error::RejectedRoot(format!(
            "momentum {v} is a singular reflection (0 or pi)"
        )));
    }
    let phi = params.phi;
    let delta = phi.cosh();
    let (ep, em) = (phi.exp(), (-phi).exp());
    let l = params.l as f64;
    Ok((0..k.len())
        .map(|j| {
            let kj = k[j];
            let (z, zi) = ((I * kj).exp(), (-I * kj).exp());
            let mut lhs = (2.0 * I * (l - 1.0) * kj).exp() * (z - ep) * (z - em);
            let mut rhs = (zi - ep) * (zi - em);
            for &km in k
                .iter()
                .enumerate()
                .filter(|&(m, _)| m != j)
                .map(|(_, v)| v)
            {
                lhs *= scattering(kj, km, delta) * scattering(km, -kj, delta);
                rhs *= scattering(-kj, km, delta) * scattering(km, kj, delta);
            }
            (lhs, rhs)
        })
        .collect())
}

/// Per-root residuals of the open-chain equations.
pub fn obc_bae_residual(k: &[C64], params: &ModelParams) -> Result<Vec<f64>> {
    Ok(obc_sides(k, params)?
        .into_iter()
        .map(|(a, b)| relative(a, b))
        .collect())
}

/// Boundary factor `κ(k) = 1 − (J_L − δ_L)(J_R/δ_R)^{1/L} e^{ik} / J_R`.
pub fn kappa(k: C64, params: &ModelParams) -> C64 {
    let c = (params.j_left() - params.delta_l)
        * (params.j_right() / params.delta_r).powf(1.0 / params.l as f64)
        / params.j_right();
    1.0 - c * (I * k).exp()
}

/// Generalized chains with `φ < 0` are solved as their site-inverted image.
pub(crate) fn gbc_frame(params: &ModelParams) -> Result<ModelParams> {
    let p = if params.phi < 0.0 {
        params.inverted()
    } else {
        params.clone()
    };
    if !(p.delta_r > 0.0) {
        return Err(Error::Unsupported(
            "generalized equations need a co-flow coupling deltaR > 0; solve the open chain instead".into(),
        ));
    }
    Ok(p)
}

pub(crate) fn gbc_sides(k: &[C64], params: &ModelParams) -> Result<Vec<(C64, C64)>> {
    check_count(k, params)?;
    let p = gbc_frame(params)?;
    Ok(shifted_sides(k, p.l, p.phi, |v| kappa(v, &p)))
}

/// Per-root residuals of the generalized (κ-modified) equations.
pub fn gbc_bae_residual(k: &[C64], params: &ModelParams) -> Result<Vec<f64>> {
    Ok(gbc_sides(k, params)?
        .into_iter()
        .map(|(a, b)| relative(a, b))
        .collect())
}

/// Both sides of the equations selected by `params.bc`.
pub(crate) fn bae_sides(k: &[C64], params: &ModelParams) -> Result<Vec<(C64, C64)>> {
    match params.bc {
        Boundary::Periodic => pbc_sides(k, params),
        Boundary::Open => obc_sides(k, params),
        Boundary::Generalized => gbc_sides(k, params),
    }
}

/// Relative residuals of the equations selected by `params.bc`.
pub fn bae_residual(k: &[C64], params: &ModelParams) -> Result<Vec<f64>> {
    Ok(bae_sides(k, params)?
        .into_iter()
        .map(|(a, b)| relative(a, b))
        .collect())
}

/// `2J Σ [cos(k_j + iφ) − cosh φ]`.
pub fn pbc_energy(k: &[C64], j: f64, phi: f64) -> C64 {
    k.iter()
        .map(|&v| 2.0 * j * ((v + I * phi).cos() - phi.cosh()))
        .sum()
}

/// `2J Σ [cos k_j − cosh φ]`.
pub fn obc_energy(k: &[C64], j: f64, phi: f64) -> C64 {
    k.iter().map(|&v| 2.0 * j * (v.cos() - phi.cosh())).sum()
}

/// Energy of a root set under the dispersion of `params.bc`.
pub fn bethe_energy(k: &[C64], params: &ModelParams) -> C64 {
    match params.bc {
        Boundary::Periodic => pbc_energy(k, params.j, params.phi),
        Boundary::Open => obc_energy(k, params.j, params.phi),
        Boundary::Generalized => pbc_energy(k, params.j, params.phi.abs()),
    }
}
