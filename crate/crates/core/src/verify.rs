//! Structural checks of the operators, runnable as one suite.
//!
//! Every check returns its worst observed metric next to the threshold it
//! is held to, so reports say how close a pass was.

use std::fmt;

use num_complex::Complex64 as C64;
use rayon::prelude::*;

use crate::basis::{build_sector, SectorBasis};
use crate::bethe::{critical_phi_residual, match_levels, scan_roots, RootOptions};
use crate::error::Result;
use crate::liouvillian::{
    build_effective_liouvillian, build_full_liouvillian, build_hermitian_obc,
    build_large_phi_limit, build_projectors, descending_permutation, is_upper_triangular,
    project_diagonal_sector,
};
use crate::params::{Boundary, ModelParams};
use crate::sparse::SparseOperator;
use crate::spectra::{dense_spectrum, multiset_distance};

#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    /// Worst value seen; compared against `threshold`.
    pub metric: f64,
    pub threshold: f64,
    pub detail: String,
}

impl Check {
    fn below(name: &str, metric: f64, threshold: f64, detail: String) -> Self {
        Check {
            name: name.into(),
            passed: metric < threshold,
            metric,
            threshold,
            detail,
        }
    }

    fn failed(name: &str, threshold: f64, detail: String) -> Self {
        Check {
            name: name.into(),
            passed: false,
            metric: f64::NAN,
            threshold,
            detail,
        }
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {}: {:.3e} (threshold {:.1e}) {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.metric,
            self.threshold,
            self.detail
        )
    }
}

/// Phases exercised by the generator checks; includes a negative one.
pub const TEST_PHIS: [f64; 4] = [0.0, 0.5, -0.7, 1.3];

/// PBC, OBC and a spread of generalized couplings, including the PBC closure point.
pub fn boundary_variants(l: usize, m: usize, phi: f64) -> Vec<ModelParams> {
    let base = ModelParams::new(l, m, Boundary::Generalized).with_phi(phi);
    let (jl, jr) = (base.j_left(), base.j_right());
    let mut out = vec![
        ModelParams::periodic(l, m, phi),
        ModelParams::open(l, m, phi),
    ];
    for (a, b) in [(0.5, 0.0), (0.5, 0.5), (0.0, 0.4), (1.0, 1.0)] {
        out.push(base.clone().with_deltas(a * jl, b * jr));
    }
    out
}

fn worst<T: Sync>(
    items: Vec<T>,
    f: impl Fn(&T) -> Result<(f64, String)> + Sync + Send,
) -> Result<(f64, String)> {
    let all: Vec<(f64, String)> = items.par_iter().map(f).collect::<Result<_>>()?;
    Ok(all.into_iter().fold((-1.0, String::new()), |a, b| {
        if b.0 > a.0 || b.0.is_nan() {
            b
        } else {
            a
        }
    }))
}

fn finish(name: &str, threshold: f64, r: Result<(f64, String)>) -> Check {
    match r {
        Ok((m, at)) => Check::below(
            name,
            m,
            threshold,
            if at.is_empty() {
                String::new()
            } else {
                format!("worst at {at}")
            },
        ),
        Err(e) => Check::failed(name, threshold, e.to_string()),
    }
}

fn label(p: &ModelParams) -> String {
    format!(
        "{} L={} M={} phi={} dL={:.3} dR={:.3}",
        p.bc, p.l, p.m, p.phi, p.delta_l, p.delta_r
    )
}

/// Completeness and orthogonality of the local projectors.
pub fn check_projectors(ls: &[usize]) -> Check {
    let items: Vec<(usize, usize)> = ls
        .iter()
        .flat_map(|&l| (1..=l).map(move |j| (l, j)))
        .collect();
    let r = worst(items, |&(l, j)| {
        let set = build_projectors(l, j)?;
        let ps = set.as_array();
        let sum = ps[0]
            .add_scaled(ps[1], C64::new(1.0, 0.0))
            .add_scaled(ps[2], C64::new(1.0, 0.0));
        let mut err = sum.max_abs_diff(&SparseOperator::identity(sum.dim()));
        for (a, pa) in ps.iter().enumerate() {
            for (b, pb) in ps.iter().enumerate() {
                let prod = pa.matmul(pb);
                let expect = if a == b {
                    (*pa).clone()
                } else {
                    SparseOperator::zero(prod.dim())
                };
                err = err.max(prod.max_abs_diff(&expect));
            }
        }
        Ok((err, format!("L={l} j={j}")))
    });
    finish("projector_algebra", 1e-12, r)
}

/// `‖[ℒ, P_j^k]‖_max` for the full ring superoperator.
pub fn check_commutators(ls: &[usize], phis: &[f64]) -> Check {
    let items: Vec<(usize, f64)> = ls
        .iter()
        .flat_map(|&l| phis.iter().map(move |&p| (l, p)))
        .collect();
    let r = worst(items, |&(l, phi)| {
        let full = build_full_liouvillian(&ModelParams::periodic(l, 0, phi))?;
        let mut err = 0.0f64;
        for j in 1..=l {
            for p in build_projectors(l, j)?.as_array() {
                err = err.max(full.commutator(p).max_abs());
            }
        }
        Ok((err, format!("L={l} phi={phi}")))
    });
    finish("projector_commutators", 1e-12, r)
}

/// `P⁰ℒ` on the diagonal sector against the directly assembled ring operator.
pub fn check_projection(ls: &[usize], phis: &[f64]) -> Check {
    let items: Vec<(usize, f64)> = ls
        .iter()
        .flat_map(|&l| phis.iter().map(move |&p| (l, p)))
        .collect();
    let r = worst(items, |&(l, phi)| {
        let full = build_full_liouvillian(&ModelParams::periodic(l, 0, phi))?;
        let mut err = 0.0f64;
        for m in 0..=l {
            let basis = build_sector(l, m)?;
            let projected = project_diagonal_sector(&full, &basis)?;
            let direct = build_effective_liouvillian(&ModelParams::periodic(l, m, phi), &basis)?;
            err = err.max(projected.max_abs_diff(&direct));
        }
        Ok((err, format!("L={l} phi={phi}")))
    });
    finish("projection_equality", 1e-12, r)
}

fn sectors(ls: &[usize], phis: &[f64]) -> Vec<ModelParams> {
    ls.iter()
        .flat_map(|&l| {
            (0..=l).flat_map(move |m| {
                phis.iter()
                    .flat_map(move |&phi| boundary_variants(l, m, phi))
            })
        })
        .collect()
}

/// Column sums of every sector operator vanish.
pub fn check_column_sums(ls: &[usize], phis: &[f64]) -> Check {
    let r = worst(sectors(ls, phis), |p| {
        let op = build_effective_liouvillian(p, &build_sector(p.l, p.m)?)?;
        Ok((
            op.column_sums()
                .iter()
                .map(|c| c.norm())
                .fold(0.0, f64::max),
            label(p),
        ))
    });
    finish("column_sums", 1e-12, r)
}

/// Generalized couplings `(J_L, J_R)` reproduce the ring entry by entry.
pub fn check_closure(ls: &[usize], phis: &[f64]) -> Check {
    let items: Vec<ModelParams> = ls
        .iter()
        .flat_map(|&l| {
            (0..=l).flat_map(move |m| {
                phis.iter()
                    .map(move |&phi| ModelParams::periodic(l, m, phi))
            })
        })
        .collect();
    let r = worst(items, |p| {
        let basis = build_sector(p.l, p.m)?;
        let g = ModelParams {
            bc: Boundary::Generalized,
            delta_l: p.j_left(),
            delta_r: p.j_right(),
            ..p.clone()
        };
        let diff = build_effective_liouvillian(p, &basis)?
            .max_abs_diff(&build_effective_liouvillian(&g, &basis)?);
        Ok((diff, label(p)))
    });
    finish("gbc_pbc_closure", 1e-12, r)
}

/// Open chain against its Hermitian gauge image, as eigenvalue multisets.
pub fn check_gauge_spectra(ls: &[usize], phis: &[f64]) -> Check {
    let items: Vec<ModelParams> = ls
        .iter()
        .flat_map(|&l| {
            (0..=l / 2).flat_map(move |m| phis.iter().map(move |&phi| ModelParams::open(l, m, phi)))
        })
        .collect();
    let r = worst(items, |p| {
        let basis = build_sector(p.l, p.m)?;
        let a = dense_spectrum(&build_effective_liouvillian(p, &basis)?, false)?;
        let b = dense_spectrum(&build_hermitian_obc(p, &basis)?, false)?;
        Ok((multiset_distance(&a.eigenvalues, &b.eigenvalues), label(p)))
    });
    finish("gauge_spectral_identity", 1e-10, r)
}

/// Worst of: smallest `|E|`, largest `Re E`, and the most negative entry of
/// the phase-fixed null vector relative to its largest entry.
fn null_metric(p: &ModelParams, basis: &SectorBasis) -> Result<f64> {
    let spec = dense_spectrum(&build_effective_liouvillian(p, basis)?, true)?;
    let k = spec.null_index().expect("sectors are never empty");
    let v = spec.right_vector(k).expect("vectors requested");
    let total: C64 = v.iter().sum();
    let phase = total / total.norm();
    let fixed: Vec<f64> = v.iter().map(|x| (x / phase).re).collect();
    let max = fixed.iter().copied().fold(0.0, f64::max);
    let neg = -fixed.iter().copied().fold(0.0, f64::min) / max;
    let re_max = spec
        .eigenvalues
        .iter()
        .map(|e| e.re)
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(spec.eigenvalues[k].norm().max(re_max).max(neg))
}

/// Each sector has a zero mode with a nonnegative right vector and no
/// eigenvalue in the right half plane.
pub fn check_null_vectors(ls: &[usize], phis: &[f64]) -> Check {
    let r = worst(sectors(ls, phis), |p| {
        Ok((null_metric(p, &build_sector(p.l, p.m)?)?, label(p)))
    });
    finish("steady_null_vectors", 1e-10, r)
}

/// The large-φ operator is triangular in descending order, is the limit of
/// `e^{-φ}` times the open chain, and annihilates the right domain wall.
pub fn check_large_phi(ls: &[usize]) -> Check {
    let items: Vec<(usize, usize)> = ls
        .iter()
        .flat_map(|&l| (0..=l).map(move |m| (l, m)))
        .collect();
    let r = worst(items, |&(l, m)| {
        let basis = build_sector(l, m)?;
        let lim = build_large_phi_limit(&basis, 1.0);
        let tri = is_upper_triangular(&lim.permuted(&descending_permutation(basis.dim())), 0.0);
        let mut wall = vec![C64::new(0.0, 0.0); basis.dim()];
        wall[basis
            .index_of(basis.right_domain_wall())
            .expect("wall is in the sector")] = C64::new(1.0, 0.0);
        let null = lim
            .matvec(&wall)
            .iter()
            .map(|x| x.norm())
            .fold(0.0, f64::max);
        let phi = 30.0;
        let scaled = build_effective_liouvillian(&ModelParams::open(l, m, phi), &basis)?
            .scale(C64::new((-phi).exp(), 0.0));
        let limit_gap = scaled.max_abs_diff(&lim);
        let metric = if tri {
            null.max(limit_gap)
        } else {
            f64::INFINITY
        };
        Ok((metric, format!("L={l} M={m}")))
    });
    finish("large_phi_limit", 1e-12, r)
}

/// `g(φ) ≠ 0` on `(0.01, 3]` and `g(0) = 0`. The metric is `1e-3 / min |g|`.
pub fn check_critical_phi(points: usize, m_max: usize) -> Check {
    let g0 = critical_phi_residual(0.0, m_max);
    let (lo, hi) = (0.01, 3.0);
    let (min_abs, at) = (0..points)
        .into_par_iter()
        .map(|i| {
            let phi = lo + (hi - lo) * i as f64 / (points - 1).max(1) as f64;
            // mean of consecutive partial sums damps the alternating tail
            let g =
                0.5 * (critical_phi_residual(phi, m_max) + critical_phi_residual(phi, m_max + 1));
            (g.abs(), phi)
        })
        .reduce(
            || (f64::INFINITY, 0.0),
            |a, b| if b.0 < a.0 { b } else { a },
        );
    let metric = if g0 == 0.0 {
        1e-3 / min_abs
    } else {
        f64::INFINITY
    };
    Check::below(
        "critical_phi",
        metric,
        1.0,
        format!("min |g| = {min_abs:.3e} at phi = {at:.4}, g(0) = {g0}"),
    )
}

/// Accepted Bethe roots sit on dense eigenvalues; coverage is reported.
pub fn check_bethe_roots(ls: &[usize], ms: &[usize], phi: f64, bcs: &[Boundary]) -> Check {
    let items: Vec<ModelParams> = ls
        .iter()
        .flat_map(|&l| {
            ms.iter().flat_map(move |&m| {
                bcs.iter()
                    .map(move |&bc| ModelParams::new(l, m, bc).with_phi(phi))
            })
        })
        .filter(|p| p.m <= p.l)
        .collect();
    let r = worst(items, |p| {
        let basis = build_sector(p.l, p.m)?;
        let levels = dense_spectrum(&build_effective_liouvillian(p, &basis)?, false)?.eigenvalues;
        let roots = scan_roots(p, &RootOptions::default())?;
        let energies: Vec<C64> = roots.iter().map(|r| r.energy).collect();
        let cov = match_levels(&energies, &levels, f64::INFINITY);
        Ok((
            cov.max_error(),
            format!("{} ({}/{} levels)", label(p), cov.matched, cov.dim),
        ))
    });
    finish("bethe_roots_on_spectrum", 1e-8, r)
}

/// The default suite; operator sizes grow with `max_l`, and the full
/// superoperator checks stop at `L = min(max_l, 4)`.
pub fn verify_suite(max_l: usize) -> Vec<Check> {
    let max_l = max_l.max(2);
    let full: Vec<usize> = (2..=max_l.min(4)).collect();
    let sector: Vec<usize> = (2..=max_l).collect();
    let bethe: Vec<usize> = (4..=max_l.max(4)).collect();
    vec![
        check_projectors(&full),
        check_commutators(&full, &[0.0, 0.5, 1.3]),
        check_projection(&full, &[0.0, 0.5, 1.3]),
        check_column_sums(&sector, &TEST_PHIS),
        check_closure(&sector, &TEST_PHIS),
        check_gauge_spectra(&sector, &[0.1, 0.3, 0.5]),
        check_null_vectors(&sector, &TEST_PHIS),
        check_large_phi(&sector),
        check_critical_phi(300, 20_000),
        check_bethe_roots(&bethe, &[1, 2], 0.5, &[Boundary::Periodic, Boundary::Open]),
    ]
}
