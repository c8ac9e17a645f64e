//! Coordinate Bethe wavefunctions for one and two magnons.

use faer::{Mat, Side};
use num_complex::Complex64 as C64;

use super::equations::scattering;
use super::roots::BetheRoots;
use crate::basis::{occupied, SectorBasis};
use crate::error::{Error, Result};
use crate::params::Boundary;

const I: C64 = C64::new(0.0, 1.0);

/// Plane-wave coefficient attached to an ordered tuple of signed momenta.
#[derive(Clone, Debug, PartialEq)]
pub struct Amplitude {
    pub momenta: Vec<C64>,
    pub coefficient: C64,
}

#[derive(Clone, Debug)]
pub struct BetheWavefunction {
    pub roots: BetheRoots,
    pub amplitudes: Vec<Amplitude>,
    /// Entries over the sector basis, unnormalized.
    pub values: Vec<C64>,
    /// Open chains with two magnons: smallest over largest singular value of
    /// the amplitude system. Zero elsewhere.
    pub null_residual: f64,
}

impl BetheWavefunction {
    /// Amplitude ratio `A_{21} / A_{12}` of a two-magnon ring state.
    pub fn exchange_ratio(&self) -> Option<C64> {
        (self.roots.params.bc == Boundary::Periodic && self.amplitudes.len() == 2)
            .then(|| self.amplitudes[1].coefficient / self.amplitudes[0].coefficient)
    }

    /// False when the vector cancels to rounding level against its amplitudes.
    pub fn is_nonvanishing(&self) -> bool {
        let norm = self.values.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
        let scale: f64 = self.amplitudes.iter().map(|a| a.coefficient.norm()).sum();
        norm.is_finite() && scale > 0.0 && norm > 1e-7 * scale
    }

    /// Unit-norm copy of `values`.
    pub fn normalized(&self) -> Vec<C64> {
        let norm = self.values.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
        self.values.iter().map(|v| v / norm).collect()
    }
}

fn positions(config: u32, l: usize) -> Vec<f64> {
    (1..=l)
        .filter(|&s| occupied(config, s))
        .map(|s| s as f64)
        .collect()
}

fn evaluate(
    amplitudes: &[Amplitude],
    basis: &SectorBasis,
    weight: impl Fn(&[f64]) -> f64,
) -> Vec<C64> {
    basis
        .configs()
        .iter()
        .map(|&c| {
            let x = positions(c, basis.l());
            let wave: C64 = amplitudes
                .iter()
                .map(|a| {
                    let phase: C64 = a.momenta.iter().zip(&x).map(|(p, xi)| p * xi).sum();
                    a.coefficient * (I * phase).exp()
                })
                .sum();
            wave * weight(&x)
        })
        .collect()
}

/// Ring amplitudes: `A_{12} = S(q₂, q₁)`, `A_{21} = −S(q₁, q₂)` with `q = k + iφ`.
fn periodic_amplitudes(roots: &BetheRoots) -> Vec<Amplitude> {
    let k = &roots.momenta;
    if k.len() == 1 {
        return vec![Amplitude {
            momenta: vec![k[0]],
            coefficient: C64::from(1.0),
        }];
    }
    let phi = roots.params.phi;
    let q: Vec<C64> = k.iter().map(|v| v + I * phi).collect();
    let delta = phi.cosh();
    vec![
        Amplitude {
            momenta: vec![k[0], k[1]],
            coefficient: scattering(q[1], q[0], delta),
        },
        Amplitude {
            momenta: vec![k[1], k[0]],
            coefficient: -scattering(q[0], q[1], delta),
        },
    ]
}

/// Open chain, one magnon, symmetric gauge: `f(0) = e^{−φ} f(1)` and
/// `f(L+1) = e^{φ} f(L)` hold for every root of the open equations.
fn open_single(roots: &BetheRoots) -> Vec<Amplitude> {
    let (k, phi) = (roots.momenta[0], roots.params.phi);
    vec![
        Amplitude {
            momenta: vec![k],
            coefficient: 1.0 - (-I * k - phi).exp(),
        },
        Amplitude {
            momenta: vec![-k],
            coefficient: -(1.0 - (I * k - phi).exp()),
        },
    ]
}

/// Open chain, two magnons: the eight reflection/permutation amplitudes are the
/// null vector of the contact and boundary conditions.
fn open_pair(roots: &BetheRoots) -> Result<(Vec<Amplitude>, f64)> {
    let k = &roots.momenta;
    let p = &roots.params;
    let (phi, l) = (p.phi, p.l as f64);
    let delta = phi.cosh();
    let sgn = |s: usize| if s == 0 { 1.0 } else { -1.0 };
    // unknown (perm, s1, s2): momenta (s1·k_a, s2·k_b) with (a, b) = (0, 1) or (1, 0)
    let idx = |perm: usize, s1: usize, s2: usize| perm * 4 + s1 * 2 + s2;
    let momenta = |perm: usize, s1: usize, s2: usize| {
        let (a, b) = if perm == 0 { (0, 1) } else { (1, 0) };
        (sgn(s1) * k[a], sgn(s2) * k[b])
    };

    let mut sys = Mat::<C64>::zeros(12, 8);
    let mut row = 0;
    for s0 in 0..2 {
        for s1 in 0..2 {
            let (u, v) = momenta(0, s0, s1);
            sys[(row, idx(0, s0, s1))] = scattering(u, v, delta);
            sys[(row, idx(1, s1, s0))] = scattering(v, u, delta);
            row += 1;
        }
    }
    for perm in 0..2 {
        for s2 in 0..2 {
            for s1 in 0..2 {
                let (u, _) = momenta(perm, s1, s2);
                sys[(row, idx(perm, s1, s2))] = 1.0 - (-phi).exp() * (I * u).exp();
            }
            row += 1;
        }
    }
    for perm in 0..2 {
        for s1 in 0..2 {
            for s2 in 0..2 {
                let (_, v) = momenta(perm, s1, s2);
                sys[(row, idx(perm, s1, s2))] =
                    (I * v * (l + 1.0)).exp() - phi.exp() * (I * v * l).exp();
            }
            row += 1;
        }
    }
    if (0..12).any(|r| (0..8).any(|c| !(sys[(r, c)].re.is_finite() && sys[(r, c)].im.is_finite())))
    {
        return Err(Error::Numeric("non-finite amplitude system".into()));
    }
    for r in 0..12 {
        let n = (0..8).map(|c| sys[(r, c)].norm_sqr()).sum::<f64>().sqrt();
        if n > 0.0 {
            (0..8).for_each(|c| sys[(r, c)] /= n);
        }
    }
    let (null, ratio) = null_vector(&sys)?;
    let mut amps = Vec::with_capacity(8);
    for perm in 0..2 {
        for s1 in 0..2 {
            for s2 in 0..2 {
                let (u, w) = momenta(perm, s1, s2);
                amps.push(Amplitude {
                    momenta: vec![u, w],
                    coefficient: null[idx(perm, s1, s2)],
                });
            }
        }
    }
    Ok((amps, ratio))
}

/// Right singular vector of the smallest singular value, with `σ_min / σ_max`.
///
/// Falls back to the Hermitian eigenproblem of `AᴴA` when the SVD iteration fails.
fn null_vector(a: &Mat<C64>) -> Result<(Vec<C64>, f64)> {
    let n = a.ncols();
    if let Ok(svd) = a.svd() {
        let s = svd.S().column_vector();
        let (smax, smin) = (s[0].re, s[n - 1].re);
        let v = svd.V();
        let ratio = if smax > 0.0 { smin / smax } else { 0.0 };
        return Ok(((0..n).map(|r| v[(r, n - 1)]).collect(), ratio));
    }
    let gram = a.adjoint() * a;
    let eig = gram
        .self_adjoint_eigen(Side::Lower)
        .map_err(|e| Error::Numeric(format!("amplitude system eigensolve failed: {e:?}")))?;
    let s = eig.S().column_vector();
    let (lmin, lmax) = (s[0].re.max(0.0), s[n - 1].re);
    let u = eig.U();
    let ratio = if lmax > 0.0 {
        (lmin / lmax).sqrt()
    } else {
        0.0
    };
    Ok(((0..n).map(|r| u[(r, 0)]).collect(), ratio))
}

/// Bethe eigenvector of the effective operator over `basis`, for `M ≤ 2`.
pub fn bethe_wavefunction(roots: &BetheRoots, basis: &SectorBasis) -> Result<BetheWavefunction> {
    let p = &roots.params;
    if basis.l() != p.l || basis.m() != p.m || roots.momenta.len() != p.m {
        return Err(Error::invalid(format!(
            "basis (L={}, M={}) does not match roots (L={}, M={})",
            basis.l(),
            basis.m(),
            p.l,
            roots.momenta.len()
        )));
    }
    if p.m > 2 {
        return Err(Error::Unsupported(format!(
            "explicit wavefunctions need M <= 2, got {}",
            p.m
        )));
    }
    if p.m == 0 {
        return Ok(BetheWavefunction {
            roots: roots.clone(),
            amplitudes: vec![Amplitude {
                momenta: vec![],
                coefficient: C64::from(1.0),
            }],
            values: vec![C64::from(1.0)],
            null_residual: 0.0,
        });
    }
    let (amplitudes, null_residual, gauge) = match p.bc {
        Boundary::Periodic => (periodic_amplitudes(roots), 0.0, 0.0),
        Boundary::Open if p.m == 1 => (open_single(roots), 0.0, p.phi),
        Boundary::Open => {
            let (a, r) = open_pair(roots)?;
            (a, r, p.phi)
        }
        Boundary::Generalized => {
            return Err(Error::Unsupported(
                "wavefunctions are built for PBC and OBC only".into(),
            ));
        }
    };
    let values = evaluate(&amplitudes, basis, |x| {
        (gauge * x.iter().sum::<f64>()).exp()
    });
    Ok(BetheWavefunction {
        roots: roots.clone(),
        amplitudes,
        values,
        null_residual,
    })
}
