//! Site occupations, spin imbalance and boundary accumulation.
//!
//! Profiles are indexed by site, `profile[j - 1] = ⟨n_j⟩`. Steady states are
//! probability vectors and are weighted as such; generic eigenstates are
//! weighted by normalized amplitude squared.

use std::io::Write;

use num_complex::Complex64 as C64;
use rayon::prelude::*;

use crate::basis::{occupied, SectorBasis};
use crate::error::{Error, Result};
use crate::liouvillian::build_effective_liouvillian;
use crate::params::{Boundary, ModelParams};
use crate::spectra::{steady_state_with, SpectrumResult, SteadyOptions, SteadyState};

/// How state entries turn into configuration weights.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Weighting {
    /// Entries are probabilities (real part, L1 normalized).
    Probability,
    /// `|ψ(c)|² / ‖ψ‖²`.
    AmplitudeSquared,
}

/// Scalar or complex state entry.
pub trait StateEntry: Copy + Sync {
    fn weight(self, mode: Weighting) -> f64;
}

impl StateEntry for f64 {
    fn weight(self, mode: Weighting) -> f64 {
        match mode {
            Weighting::Probability => self,
            Weighting::AmplitudeSquared => self * self,
        }
    }
}

impl StateEntry for C64 {
    fn weight(self, mode: Weighting) -> f64 {
        match mode {
            Weighting::Probability => self.re,
            Weighting::AmplitudeSquared => self.norm_sqr(),
        }
    }
}

fn profile_from_weights(
    weights: impl Iterator<Item = f64>,
    basis: &SectorBasis,
) -> Result<Vec<f64>> {
    let mut profile = vec![0.0; basis.l()];
    let mut total = 0.0;
    for (w, &c) in weights.zip(basis.configs()) {
        total += w;
        for (site, n) in profile.iter_mut().enumerate() {
            if occupied(c, site + 1) {
                *n += w;
            }
        }
    }
    if !(total.abs() > f64::MIN_POSITIVE) || !total.is_finite() {
        return Err(Error::Domain(format!("state has total weight {total:e}")));
    }
    profile.iter_mut().for_each(|n| *n /= total);
    Ok(profile)
}

/// `⟨n_j⟩` for `j = 1..=L`. The profile always sums to `M`.
pub fn density_profile<S: StateEntry>(
    state: &[S],
    basis: &SectorBasis,
    mode: Weighting,
) -> Result<Vec<f64>> {
    if state.len() != basis.dim() {
        return Err(Error::invalid(format!(
            "state of length {} for a sector of dimension {}",
            state.len(),
            basis.dim()
        )));
    }
    profile_from_weights(state.iter().map(|&s| s.weight(mode)), basis)
}

/// Profile under the biorthogonal weights `Re(w̄_c v_c) / Re(wᴴv)`.
pub fn biorthogonal_profile(left: &[C64], right: &[C64], basis: &SectorBasis) -> Result<Vec<f64>> {
    if left.len() != basis.dim() || right.len() != basis.dim() {
        return Err(Error::invalid(format!(
            "vectors of length {} and {} for a sector of dimension {}",
            left.len(),
            right.len(),
            basis.dim()
        )));
    }
    profile_from_weights(
        left.iter().zip(right).map(|(w, v)| (w.conj() * v).re),
        basis,
    )
}

/// `(N_r − N_l) / (N_r + N_l)` over the two halves of the chain.
///
/// For odd `L` the middle site belongs to neither half.
pub fn imbalance(profile: &[f64]) -> Result<f64> {
    let l = profile.len();
    let left: f64 = profile[..l / 2].iter().sum();
    let right: f64 = profile[l.div_ceil(2)..].iter().sum();
    let total = left + right;
    if !(total.abs() > f64::MIN_POSITIVE) {
        return Err(Error::Domain("imbalance of an empty profile".into()));
    }
    Ok((right - left) / total)
}

/// `⟨n_L⟩ / ⟨n_1⟩`.
///
/// When `⟨n_1⟩` underflows the error carries the logarithm of the ratio.
pub fn boundary_ratio(profile: &[f64]) -> Result<f64> {
    let (Some(&first), Some(&last)) = (profile.first(), profile.last()) else {
        return Err(Error::invalid("empty profile"));
    };
    if first < 1e-300 {
        return Err(Error::Domain(format!(
            "left-boundary occupation {first:e} underflows; log ratio = {:.6e}",
            last.ln() - first.ln()
        )));
    }
    Ok(last / first)
}

/// Normalized steady state of the sector operator of `params`.
pub fn steady_state_of(
    params: &ModelParams,
    opts: &SteadyOptions,
) -> Result<(SectorBasis, SteadyState)> {
    params.validate()?;
    let basis = crate::basis::build_sector(params.l, params.m)?;
    let op = build_effective_liouvillian(params, &basis)?;
    let state = steady_state_with(&op, &basis, opts)?.with_params(params.clone());
    Ok((basis, state))
}

/// `I(GBC) − I(OBC)` between the steady states of a counter-flow chain and the
/// open chain with the same bulk.
pub fn imbalance_deviation(
    gbc: &ModelParams,
    obc: &ModelParams,
    opts: &SteadyOptions,
) -> Result<f64> {
    if gbc.bc != Boundary::Generalized || obc.bc != Boundary::Open {
        return Err(Error::invalid(
            "imbalance deviation compares a generalized chain with an open one",
        ));
    }
    if (gbc.l, gbc.m, gbc.j, gbc.phi, gbc.j_prime, gbc.h)
        != (obc.l, obc.m, obc.j, obc.phi, obc.j_prime, obc.h)
    {
        return Err(Error::invalid("both chains need the same L, M, J and phi"));
    }
    if gbc.delta_r != 0.0 {
        return Err(Error::invalid(format!(
            "expected deltaR = 0, got {}",
            gbc.delta_r
        )));
    }
    let with = |p: &ModelParams| -> Result<f64> {
        let (basis, s) = steady_state_of(p, opts)?;
        imbalance(&density_profile(
            &s.probabilities,
            &basis,
            Weighting::Probability,
        )?)
    };
    let (a, b) = rayon::join(|| with(gbc), || with(obc));
    Ok(a? - b?)
}

fn per_state_imbalances<F>(
    spec: &SpectrumResult,
    basis: &SectorBasis,
    profile: F,
) -> Result<Vec<f64>>
where
    F: Fn(usize) -> Result<Vec<f64>> + Sync,
{
    if spec.dim() != basis.dim() {
        return Err(Error::invalid(format!(
            "spectrum of dimension {} for a sector of dimension {}",
            spec.dim(),
            basis.dim()
        )));
    }
    (0..spec.dim())
        .into_par_iter()
        .map(|k| imbalance(&profile(k)?))
        .collect()
}

/// `Ī = Σ_n I_n / D` with right-eigenvector amplitude² weights.
pub fn mean_imbalance(spec: &SpectrumResult, basis: &SectorBasis) -> Result<f64> {
    let right = spec
        .right_vectors
        .as_ref()
        .ok_or_else(|| Error::invalid("mean imbalance needs right eigenvectors"))?;
    let all = per_state_imbalances(spec, basis, |k| {
        let v: Vec<C64> = (0..right.nrows()).map(|r| right[(r, k)]).collect();
        density_profile(&v, basis, Weighting::AmplitudeSquared)
    })?;
    Ok(all.iter().sum::<f64>() / all.len() as f64)
}

/// `Ī` with biorthogonal `⟨L_n|n̂_j|R_n⟩` weights.
pub fn mean_imbalance_biorthogonal(spec: &SpectrumResult, basis: &SectorBasis) -> Result<f64> {
    let (Some(left), Some(right)) = (spec.left_vectors.as_ref(), spec.right_vectors.as_ref())
    else {
        return Err(Error::invalid(
            "biorthogonal mean imbalance needs left and right eigenvectors",
        ));
    };
    let all = per_state_imbalances(spec, basis, |k| {
        let w: Vec<C64> = (0..left.nrows()).map(|r| left[(r, k)]).collect();
        let v: Vec<C64> = (0..right.nrows()).map(|r| right[(r, k)]).collect();
        biorthogonal_profile(&w, &v, basis)
    })?;
    Ok(all.iter().sum::<f64>() / all.len() as f64)
}

/// Least-squares line through `(x, y)` with Pearson's `r`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub r: f64,
}

pub fn linear_fit(x: &[f64], y: &[f64]) -> Result<LinearFit> {
    if x.len() != y.len() || x.len() < 2 {
        return Err(Error::invalid(format!(
            "fit needs two or more paired points, got {} and {}",
            x.len(),
            y.len()
        )));
    }
    let n = x.len() as f64;
    let (mx, my) = (x.iter().sum::<f64>() / n, y.iter().sum::<f64>() / n);
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let syy: f64 = y.iter().map(|b| (b - my).powi(2)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    if !(sxx > 0.0) {
        return Err(Error::Domain("fit abscissae are all equal".into()));
    }
    let slope = sxy / sxx;
    let r = if syy > 0.0 {
        sxy / (sxx * syy).sqrt()
    } else {
        0.0
    };
    Ok(LinearFit {
        slope,
        intercept: my - slope * mx,
        r,
    })
}

/// One named number tied to a chain.
#[derive(Clone, Debug, PartialEq)]
pub struct ScalarRow {
    pub params: ModelParams,
    pub name: String,
    pub value: f64,
}

impl ScalarRow {
    pub fn new(params: &ModelParams, name: impl Into<String>, value: f64) -> Self {
        ScalarRow {
            params: params.clone(),
            name: name.into(),
            value,
        }
    }
}

/// Observables of one state of one chain.
#[derive(Clone, Debug, PartialEq)]
pub struct ObservableRecord {
    pub params: ModelParams,
    pub density_profile: Vec<f64>,
    pub imbalance: f64,
    pub mean_imbalance: Option<f64>,
    /// `None` when the left-boundary occupation underflows.
    pub ratio_lr: Option<f64>,
    /// Which state the profile belongs to, e.g. `steady`.
    pub label: String,
}

impl ObservableRecord {
    pub fn from_profile(
        params: &ModelParams,
        profile: Vec<f64>,
        label: impl Into<String>,
    ) -> Result<Self> {
        if profile.len() != params.l {
            return Err(Error::invalid(format!(
                "profile of length {} for L = {}",
                profile.len(),
                params.l
            )));
        }
        Ok(ObservableRecord {
            params: params.clone(),
            imbalance: imbalance(&profile)?,
            ratio_lr: boundary_ratio(&profile).ok(),
            density_profile: profile,
            mean_imbalance: None,
            label: label.into(),
        })
    }

    /// Steady-state record of `params`.
    pub fn steady(params: &ModelParams, opts: &SteadyOptions) -> Result<Self> {
        let (basis, s) = steady_state_of(params, opts)?;
        let profile = density_profile(&s.probabilities, &basis, Weighting::Probability)?;
        Self::from_profile(params, profile, "steady")
    }

    pub fn with_mean_imbalance(mut self, value: f64) -> Self {
        self.mean_imbalance = Some(value);
        self
    }

    pub fn scalars(&self) -> Vec<ScalarRow> {
        let mut rows = vec![ScalarRow::new(&self.params, "imbalance", self.imbalance)];
        if let Some(v) = self.mean_imbalance {
            rows.push(ScalarRow::new(&self.params, "mean_imbalance", v));
        }
        if let Some(v) = self.ratio_lr {
            rows.push(ScalarRow::new(&self.params, "ratio_LR", v));
        }
        rows
    }
}

fn params_prefix(p: &ModelParams) -> String {
    format!(
        "{},{},{:.16e},{:.16e},{:.16e},{}",
        p.l, p.m, p.phi, p.delta_l, p.delta_r, p.bc
    )
}

/// `L,M,phi,deltaL,deltaR,bc,site,density` rows, sites counted from 1.
pub fn write_profile_csv<W: Write>(records: &[ObservableRecord], mut w: W) -> Result<()> {
    writeln!(w, "L,M,phi,deltaL,deltaR,bc,site,density")?;
    for r in records {
        let prefix = params_prefix(&r.params);
        for (j, n) in r.density_profile.iter().enumerate() {
            writeln!(w, "{prefix},{},{n:.16e}", j + 1)?;
        }
    }
    Ok(())
}

/// `L,M,phi,deltaL,deltaR,bc,name,value` rows.
pub fn write_scalar_csv<W: Write>(rows: &[ScalarRow], mut w: W) -> Result<()> {
    writeln!(w, "L,M,phi,deltaL,deltaR,bc,name,value")?;
    for r in rows {
        writeln!(
            w,
            "{},{},{:.16e}",
            params_prefix(&r.params),
            r.name,
            r.value
        )?;
    }
    Ok(())
}
