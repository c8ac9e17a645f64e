//! Root acceptance, scans over initial guesses, level matching and continuation.

use std::f64::consts::PI;
use std::io::Write;

use num_complex::Complex64 as C64;
use rayon::prelude::*;

use super::equations::{bae_sides, bethe_energy, log_phases, rapidity_of_momentum};
use super::newton::{newton_solve, NewtonOptions};
use super::wavefunction::bethe_wavefunction;
use crate::basis::build_sector;
use crate::error::{Error, Result};
use crate::params::{Boundary, ModelParams};

/// Momenta beyond this imaginary part are runaway Newton iterates, not roots.
pub const MAX_IMAG: f64 = 20.0;

/// One Bethe state.
#[derive(Clone, Debug, PartialEq)]
pub struct BetheRoots {
    pub params: ModelParams,
    /// Quasimomenta, canonicalized and sorted by real then imaginary part.
    pub momenta: Vec<C64>,
    /// Periodic chains with `φ ≠ 0` only.
    pub rapidities: Option<Vec<C64>>,
    /// Periodic chains: `I_j` read off the logarithmic equations. Elsewhere the
    /// nearest free-magnon label (`Re k·L/π` open, `Re k·L/2π` generalized).
    pub quantum_numbers: Vec<f64>,
    /// Open chains: `−1` where the solver's momentum was reflected to `Re k > 0`.
    pub reflection_signs: Option<Vec<i8>>,
    /// Largest relative residual `|lhs − rhs| / max(1, |lhs|, |rhs|)`.
    pub residual: f64,
    pub energy: C64,
    pub iterations: usize,
}

impl BetheRoots {
    pub fn bc(&self) -> Boundary {
        self.params.bc
    }

    /// Energy recomputed from the stored momenta.
    pub fn recomputed_energy(&self) -> C64 {
        bethe_energy(&self.momenta, &self.params)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RootOptions {
    pub newton: NewtonOptions,
    /// Largest accepted residual.
    pub accept: f64,
    /// Smallest accepted distance between two momenta.
    pub min_separation: f64,
    /// Reject roots whose Bethe wavefunction vanishes (M ≤ 2, PBC/OBC).
    pub check_wavefunction: bool,
}

impl Default for RootOptions {
    fn default() -> Self {
        RootOptions {
            newton: NewtonOptions::default(),
            accept: 1e-10,
            min_separation: 1e-8,
            check_wavefunction: true,
        }
    }
}

/// `x` reduced to `(−π, π]`.
fn wrap(x: f64) -> f64 {
    let r = (x + PI).rem_euclid(2.0 * PI) - PI;
    if r <= -PI {
        r + 2.0 * PI
    } else {
        r
    }
}

fn canonical(k: C64, bc: Boundary) -> (C64, i8) {
    let k = C64::new(wrap(k.re), k.im);
    if bc != Boundary::Open {
        return (k, 1);
    }
    let flip = if k.re.abs() < 1e-12 {
        k.im < 0.0
    } else {
        k.re < 0.0
    };
    if flip {
        (C64::new(wrap(-k.re), -k.im), -1)
    } else {
        (k, 1)
    }
}

fn momentum_distance(a: C64, b: C64) -> f64 {
    C64::new(wrap(a.re - b.re), a.im - b.im).norm()
}

/// Multiset equality of momenta up to `2π`.
fn same_momenta(a: &[C64], b: &[C64]) -> bool {
    let mut used = vec![false; b.len()];
    a.len() == b.len()
        && a.iter().all(|x| {
            match (0..b.len()).find(|&i| !used[i] && momentum_distance(*x, b[i]) < 1e-7) {
                Some(i) => {
                    used[i] = true;
                    true
                }
                None => false,
            }
        })
}

fn relative_residuals(k: &[C64], params: &ModelParams) -> Result<Vec<C64>> {
    Ok(bae_sides(k, params)?
        .into_iter()
        .map(|(a, b)| (a - b) / 1f64.max(a.norm()).max(b.norm()))
        .collect())
}

fn half_integer(x: f64) -> f64 {
    let r = (2.0 * x).round() / 2.0;
    if (r - x).abs() < 1e-6 {
        r
    } else {
        x
    }
}

/// Validate a converged momentum set and package it.
pub fn accept_roots(
    params: &ModelParams,
    momenta: &[C64],
    iterations: usize,
    opts: &RootOptions,
) -> Result<BetheRoots> {
    let bc = params.bc;
    if let Some(k) = momenta.iter().find(|k| !(k.im.abs() <= MAX_IMAG)) {
        return Err(Error::RejectedRoot(format!(
            "momentum {k} escaped the strip |Im k| <= {MAX_IMAG}"
        )));
    }
    // The open-chain steady state k = iφ zeroes both boundary factors exactly;
    // snap converged momenta onto it so that cancellation is exact.
    let bound = C64::new(0.0, params.phi.abs());
    let momenta: Vec<C64> = momenta
        .iter()
        .map(|&k| {
            if bc == Boundary::Open && (k - bound).norm().min((k + bound).norm()) < 1e-8 {
                bound
            } else {
                k
            }
        })
        .collect();
    let sides = bae_sides(&momenta, params)?;
    let residual = sides
        .iter()
        .map(|(a, b)| (a - b).norm() / 1f64.max(a.norm()).max(b.norm()))
        .fold(0.0, f64::max);
    if !(residual < opts.accept) {
        return Err(Error::RejectedRoot(format!(
            "residual {residual:.3e} above {:.1e}",
            opts.accept
        )));
    }
    // Otherwise vanishing sides mean Newton slid onto a singular manifold
    // (e.g. two ring momenta collapsing onto k = 0), not a root.
    let degenerate = sides
        .iter()
        .zip(&momenta)
        .any(|((a, b), &k)| a.norm().max(b.norm()) < 1e-5 && !(bc == Boundary::Open && k == bound));
    if degenerate {
        return Err(Error::RejectedRoot(
            "both sides of an equation vanish".into(),
        ));
    }

    let mut pairs: Vec<(C64, i8)> = momenta.iter().map(|&k| canonical(k, bc)).collect();
    pairs.sort_by(|a, b| a.0.re.total_cmp(&b.0.re).then(a.0.im.total_cmp(&b.0.im)));
    let k: Vec<C64> = pairs.iter().map(|p| p.0).collect();
    for a in 0..k.len() {
        for b in a + 1..k.len() {
            let d = momentum_distance(k[a], k[b]);
            if !(d > opts.min_separation) {
                return Err(Error::RejectedRoot(format!(
                    "coincident momenta {} and {} (distance {d:.1e})",
                    k[a], k[b]
                )));
            }
        }
    }

    let l = params.l as f64;
    let (rapidities, quantum_numbers) = match bc {
        Boundary::Periodic if params.phi != 0.0 => {
            let lam = k
                .iter()
                .map(|&v| rapidity_of_momentum(v, params.phi))
                .collect();
            let numbers = log_phases(&k, params)?
                .iter()
                .map(|p| half_integer(p.re / (2.0 * PI)))
                .collect();
            (Some(lam), numbers)
        }
        Boundary::Periodic | Boundary::Generalized => (
            None,
            k.iter()
                .map(|v| half_integer(v.re * l / (2.0 * PI)))
                .collect(),
        ),
        Boundary::Open => (
            None,
            k.iter().map(|v| half_integer(v.re * l / PI)).collect(),
        ),
    };
    let roots = BetheRoots {
        params: params.clone(),
        energy: bethe_energy(&k, params),
        momenta: k,
        rapidities,
        quantum_numbers,
        reflection_signs: (bc == Boundary::Open).then(|| pairs.iter().map(|p| p.1).collect()),
        residual,
        iterations,
    };
    if opts.check_wavefunction && params.m <= 2 && bc != Boundary::Generalized {
        let basis = build_sector(params.l, params.m)?;
        let wf = bethe_wavefunction(&roots, &basis)?;
        if !wf.is_nonvanishing() {
            return Err(Error::RejectedRoot("Bethe wavefunction vanishes".into()));
        }
    }
    Ok(roots)
}

/// Newton-solve the equations of `params.bc` from `initial` and accept the result.
pub fn solve_roots(
    params: &ModelParams,
    initial: &[C64],
    opts: &RootOptions,
) -> Result<BetheRoots> {
    params.validate()?;
    let out = newton_solve(|k| relative_residuals(k, params), initial, &opts.newton)?;
    accept_roots(params, &out.x, out.iterations, opts)
}

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Starting points for a scan: free-magnon momenta plus complex pairs for
/// bound states.
pub fn initial_guesses(params: &ModelParams) -> Vec<Vec<C64>> {
    let l = params.l;
    let lf = l as f64;
    let open = params.bc == Boundary::Open;
    let grid: Vec<f64> = if open && params.m > 1 {
        (1..2 * l).map(|n| PI * n as f64 / (2.0 * lf)).collect()
    } else if open {
        (1..l).map(|n| PI * n as f64 / lf).collect()
    } else {
        (0..2 * l).map(|n| PI * n as f64 / lf).collect()
    };
    let mut out = Vec::new();
    match params.m {
        1 => {
            if open {
                out.push(vec![c(0.0, params.phi.abs().max(1e-3))]);
            }
            let step = if open { 1 } else { 2 };
            out.extend(grid.iter().step_by(step).map(|&g| vec![c(g, 0.0)]));
        }
        2 => {
            for a in 0..grid.len() {
                for b in a + 1..grid.len() {
                    for off in [0.0, 0.3] {
                        out.push(vec![c(grid[a], off), c(grid[b], -off)]);
                    }
                }
            }
            for &g in &grid {
                for v in [0.4, 1.0, 2.0] {
                    out.push(vec![c(g, v), c(g, -v)]);
                    if open {
                        out.push(vec![c(g, 0.0), c(0.0, params.phi.abs().max(1e-3) * v)]);
                    }
                }
            }
        }
        _ => {}
    }
    out
}

/// All distinct roots reachable from [`initial_guesses`], for `M ∈ {1, 2}`.
///
/// Generalized chains are not scanned directly: their κ-modified equations
/// carry extraneous solutions. Instead every ring root is continued in the
/// boundary couplings from `(J_L, J_R)`, where both equation sets coincide,
/// to `(δ_L, δ_R)`.
pub fn scan_roots(params: &ModelParams, opts: &RootOptions) -> Result<Vec<BetheRoots>> {
    params.validate()?;
    if !(1..=2).contains(&params.m) {
        return Err(Error::Unsupported(format!(
            "root scans cover M = 1 and 2, not {}",
            params.m
        )));
    }
    if params.bc == Boundary::Generalized {
        return scan_generalized(params, opts);
    }
    let found: Vec<Option<BetheRoots>> = initial_guesses(params)
        .par_iter()
        .map(|g| solve_roots(params, g, opts).ok())
        .collect();
    Ok(distinct_sorted(found.into_iter().flatten()))
}

fn distinct_sorted(found: impl IntoIterator<Item = BetheRoots>) -> Vec<BetheRoots> {
    let mut roots: Vec<BetheRoots> = Vec::new();
    for r in found {
        let dup = roots.iter().any(|s| same_momenta(&s.momenta, &r.momenta));
        if !dup {
            roots.push(r);
        }
    }
    roots.sort_by(|a, b| {
        a.energy
            .re
            .total_cmp(&b.energy.re)
            .then(a.energy.im.total_cmp(&b.energy.im))
    });
    roots
}

/// Continuation steps used by [`scan_roots`] for generalized chains.
pub const BOUNDARY_STEPS: usize = 10;

fn scan_generalized(params: &ModelParams, opts: &RootOptions) -> Result<Vec<BetheRoots>> {
    // equations of a φ < 0 chain live in its inverted frame
    let frame = if params.phi < 0.0 {
        params.inverted()
    } else {
        params.clone()
    };
    if !(frame.delta_r > 0.0) {
        return Err(Error::Unsupported(
            "generalized scans need a co-flow coupling deltaR > 0; scan the open chain instead"
                .into(),
        ));
    }
    let mut ring = frame.clone();
    ring.bc = Boundary::Periodic;
    let ring_opts = RootOptions {
        check_wavefunction: false,
        ..opts.clone()
    };
    let seeds = scan_roots(
        &ring,
        &RootOptions {
            check_wavefunction: true,
            ..opts.clone()
        },
    )
    .or_else(|_| scan_roots(&ring, &ring_opts))?;
    let found: Vec<Option<BetheRoots>> = seeds
        .par_iter()
        .map(|s| {
            continue_in_deltas(&frame, &s.momenta, BOUNDARY_STEPS, opts)
                .ok()
                .and_then(|path| path.into_iter().last())
        })
        .collect();
    Ok(distinct_sorted(found.into_iter().flatten().map(|mut r| {
        r.params = params.clone();
        r
    })))
}

/// Follow a root set of a generalized chain as the boundary couplings move
/// linearly from `(J_L, J_R)` to `(δ_L, δ_R)` in `steps` steps.
pub fn continue_in_deltas(
    params: &ModelParams,
    initial: &[C64],
    steps: usize,
    opts: &RootOptions,
) -> Result<Vec<BetheRoots>> {
    let (jl, jr) = (params.j_left(), params.j_right());
    let mut seed = initial.to_vec();
    let mut path = Vec::with_capacity(steps);
    for s in 1..=steps.max(1) {
        let t = s as f64 / steps.max(1) as f64;
        let p = params.clone().with_deltas(
            jl + t * (params.delta_l - jl),
            jr + t * (params.delta_r - jr),
        );
        let r = solve_roots(&p, &seed, opts)?;
        seed = r.momenta.clone();
        path.push(r);
    }
    Ok(path)
}

/// Outcome of matching Bethe energies against a reference spectrum.
#[derive(Clone, Debug, PartialEq)]
pub struct Coverage {
    pub dim: usize,
    pub matched: usize,
    /// Distance of each root energy to the level it was paired with.
    pub errors: Vec<f64>,
    /// Reference levels nobody claimed.
    pub unmatched_levels: Vec<C64>,
}

impl Coverage {
    pub fn fraction(&self) -> f64 {
        if self.dim == 0 {
            return 1.0;
        }
        self.matched as f64 / self.dim as f64
    }

    pub fn max_error(&self) -> f64 {
        self.errors.iter().copied().fold(0.0, f64::max)
    }
}

/// Greedy nearest matching: each root in turn claims the closest unclaimed level,
/// counted as matched when within `tol`.
pub fn match_levels(energies: &[C64], levels: &[C64], tol: f64) -> Coverage {
    let mut claimed = vec![false; levels.len()];
    let mut errors = Vec::with_capacity(energies.len());
    let mut matched = 0;
    for e in energies {
        let best = (0..levels.len())
            .filter(|&i| !claimed[i])
            .min_by(|&a, &b| (levels[a] - e).norm().total_cmp(&(levels[b] - e).norm()));
        match best {
            Some(i) => {
                let d = (levels[i] - e).norm();
                errors.push(d);
                if d <= tol {
                    claimed[i] = true;
                    matched += 1;
                }
            }
            None => errors.push(f64::INFINITY),
        }
    }
    let unmatched_levels = levels
        .iter()
        .zip(&claimed)
        .filter(|(_, &c)| !c)
        .map(|(v, _)| *v)
        .collect();
    Coverage {
        dim: levels.len(),
        matched,
        errors,
        unmatched_levels,
    }
}

/// Follow a root set through the values in `phis`, each solve seeded by the
/// previous one. The first entry is solved from `initial` at `phis[0]`.
pub fn continue_in_phi(
    params: &ModelParams,
    initial: &[C64],
    phis: &[f64],
    opts: &RootOptions,
) -> Result<Vec<BetheRoots>> {
    let mut seed = initial.to_vec();
    let mut path = Vec::with_capacity(phis.len());
    for &phi in phis {
        let p = params.clone().with_phi(phi);
        let r = solve_roots(&p, &seed, opts)?;
        seed = r.momenta.clone();
        path.push(r);
    }
    Ok(path)
}

/// CSV with one row per quasimomentum; `state` numbers the root sets from 0
/// and `j` the momenta within a set from 1.
pub fn write_roots_csv<W: Write>(roots: &[BetheRoots], mut w: W) -> Result<()> {
    writeln!(
        w,
        "bc,L,M,phi,deltaL,deltaR,state,j,re_k,im_k,I_j,residual,re_E,im_E"
    )?;
    for (state, r) in roots.iter().enumerate() {
        let p = &r.params;
        for (j, (k, n)) in r.momenta.iter().zip(&r.quantum_numbers).enumerate() {
            writeln!(
                w,
                "{},{},{},{:.16e},{:.16e},{:.16e},{},{},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
                p.bc,
                p.l,
                p.m,
                p.phi,
                p.delta_l,
                p.delta_r,
                state,
                j + 1,
                k.re,
                k.im,
                n,
                r.residual,
                r.energy.re,
                r.energy.im
            )?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::liouvillian::build_effective_liouvillian;
    use crate::spectra::dense_spectrum;

    fn levels(p: &ModelParams) -> Vec<C64> {
        let b = build_sector(p.l, p.m).unwrap();
        dense_spectrum(&build_effective_liouvillian(p, &b).unwrap(), false)
            .unwrap()
            .eigenvalues
    }

    #[test]
    fn single_magnon_ring_converges_immediately() {
        let p = ModelParams::periodic(7, 1, 0.6);
        for n in 0..7 {
            let k0 = 2.0 * PI * n as f64 / 7.0;
            let r = solve_roots(&p, &[c(k0 + 1e-3, 0.0)], &RootOptions::default()).unwrap();
            assert!(r.iterations <= 3, "{} iterations", r.iterations);
            assert!(momentum_distance(r.momenta[0], c(k0, 0.0)) < 1e-12);
        }
    }

    #[test]
    fn quarter_momentum_is_a_ring_level() {
        let p = ModelParams::periodic(4, 1, 0.5);
        let r = solve_roots(&p, &[c(PI / 2.0, 0.0)], &RootOptions::default()).unwrap();
        let lv = levels(&p);
        assert!(lv.iter().any(|e| (e - r.energy).norm() < 1e-12));
    }

    #[test]
    fn open_single_magnon_covers_the_spectrum() {
        let p = ModelParams::open(6, 1, 0.7);
        let roots = scan_roots(&p, &RootOptions::default()).unwrap();
        assert_eq!(roots.len(), 6);
        for r in &roots {
            assert!(r.momenta[0].re >= 0.0);
        }
        let cov = match_levels(
            &roots.iter().map(|r| r.energy).collect::<Vec<_>>(),
            &levels(&p),
            1e-9,
        );
        assert_eq!(cov.matched, 6, "{cov:?}");
    }

    #[test]
    fn open_spectrum_is_even_in_phi() {
        let opts = RootOptions::default();
        let mut a: Vec<f64> = scan_roots(&ModelParams::open(5, 2, 0.6), &opts)
            .unwrap()
            .iter()
            .map(|r| r.energy.re)
            .collect();
        let mut b: Vec<f64> = scan_roots(&ModelParams::open(5, 2, -0.6), &opts)
            .unwrap()
            .iter()
            .map(|r| r.energy.re)
            .collect();
        a.sort_by(f64::total_cmp);
        b.sort_by(f64::total_cmp);
        assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() < 1e-9);
        }
    }

    #[test]
    fn energy_is_recomputable() {
        let p = ModelParams::periodic(6, 2, 0.5);
        for r in scan_roots(&p, &RootOptions::default()).unwrap() {
            assert!((r.recomputed_energy() - r.energy).norm() < 1e-12);
            assert!(r.residual < 1e-10);
            assert!(momentum_distance(r.momenta[0], r.momenta[1]) > 1e-8);
        }
    }

    #[test]
    fn accepted_roots_are_dense_levels() {
        for bc in [Boundary::Periodic, Boundary::Open] {
            for m in 1..=2 {
                let p = ModelParams::new(6, m, bc).with_phi(0.5);
                let roots = scan_roots(&p, &RootOptions::default()).unwrap();
                let cov = match_levels(
                    &roots.iter().map(|r| r.energy).collect::<Vec<_>>(),
                    &levels(&p),
                    1e-8,
                );
                assert!(cov.max_error() < 1e-8, "{bc} M={m}: {cov:?}");
            }
        }
    }

    #[test]
    fn lowest_level_carries_ground_state_numbers() {
        for l in [6, 8, 10] {
            let p = ModelParams::periodic(l, 2, 0.5);
            let roots = scan_roots(&p, &RootOptions::default()).unwrap();
            assert_eq!(roots[0].quantum_numbers, vec![-0.5, 0.5], "L = {l}");
            assert_eq!(roots[0].rapidities.as_ref().unwrap().len(), 2);
            let lowest = levels(&p)
                .into_iter()
                .map(|e| e.re)
                .fold(f64::INFINITY, f64::min);
            assert!((roots[0].energy.re - lowest).abs() < 1e-9);
        }
    }

    #[test]
    fn continuation_from_the_isotropic_point() {
        let p = ModelParams::periodic(6, 2, 0.0);
        let phis: Vec<f64> = (0..=20).map(|s| s as f64 / 20.0).collect();
        let path = continue_in_phi(
            &p,
            &[c(1.4, 0.0), c(2.8, 0.0)],
            &phis,
            &RootOptions::default(),
        )
        .unwrap();
        assert_eq!(path.len(), 21);
        assert!(path[0].momenta.iter().all(|k| k.im.abs() < 1e-12));
        assert!(end_is_complex(&path));
        assert!(path.iter().all(|r| r.residual < 1e-10));
        let end = path.last().unwrap();
        assert!(levels(&end.params)
            .iter()
            .any(|e| (e - end.energy).norm() < 1e-8));
    }

    fn end_is_complex(path: &[BetheRoots]) -> bool {
        path.last()
            .unwrap()
            .momenta
            .iter()
            .all(|k| k.im.abs() > 1e-3)
    }

    #[test]
    fn ring_pairs_skip_the_collapsed_steady_state() {
        let p = ModelParams::periodic(6, 2, 0.5);
        let roots = scan_roots(&p, &RootOptions::default()).unwrap();
        let cov = match_levels(
            &roots.iter().map(|r| r.energy).collect::<Vec<_>>(),
            &levels(&p),
            1e-8,
        );
        assert_eq!(roots.len(), 14);
        assert_eq!(cov.matched, 14);
        assert!(cov.unmatched_levels[0].norm() < 1e-12);
    }

    #[test]
    fn generalized_single_magnon_tracks_the_ring() {
        let base = ModelParams::new(8, 1, Boundary::Generalized).with_phi(0.5);
        let p = base
            .clone()
            .with_deltas(0.5 * base.j_left(), 0.5 * base.j_right());
        let roots = scan_roots(&p, &RootOptions::default()).unwrap();
        assert_eq!(roots.len(), 8);
        // κ-modified momenta solve z^L + c z − 1 = 0 with z = e^{ik}
        let c0 = (p.j_left() - p.delta_l) * (p.j_right() / p.delta_r).powf(1.0 / 8.0) / p.j_right();
        for r in &roots {
            let z = (C64::new(0.0, 1.0) * r.momenta[0]).exp();
            assert!((z.powi(8) + c0 * z - 1.0).norm() < 1e-10);
        }
        let neg = scan_roots(
            &ModelParams {
                phi: -0.5,
                ..p.inverted()
            },
            &RootOptions::default(),
        )
        .unwrap();
        for (a, b) in roots.iter().zip(&neg) {
            assert!((a.energy - b.energy).norm() < 1e-10);
        }
    }

    #[test]
    fn generalized_scan_needs_co_flow() {
        let p = ModelParams::generalized(6, 1, 0.5, 0.3, 0.0);
        assert!(matches!(
            scan_roots(&p, &RootOptions::default()),
            Err(Error::Unsupported(_))
        ));
    }

    #[test]
    fn coincident_momenta_rejected() {
        let p = ModelParams::periodic(6, 2, 0.5);
        let r = accept_roots(
            &p,
            &[c(0.0, 0.0), c(2.0 * PI, 0.0)],
            0,
            &RootOptions::default(),
        );
        assert!(matches!(r, Err(Error::RejectedRoot(_))));
    }

    #[test]
    fn greedy_matching_claims_each_level_once() {
        let lv = [c(0.0, 0.0), c(-1.0, 0.0)];
        let cov = match_levels(&[c(0.0, 0.0), c(1e-12, 0.0)], &lv, 1e-9);
        assert_eq!(cov.matched, 1);
        assert_eq!(cov.unmatched_levels, vec![c(-1.0, 0.0)]);
        assert!((cov.fraction() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn csv_has_one_row_per_momentum() {
        let p = ModelParams::periodic(6, 2, 0.5);
        let roots = scan_roots(&p, &RootOptions::default()).unwrap();
        let mut buf = Vec::new();
        write_roots_csv(&roots, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 1 + 2 * roots.len());
        assert!(text.starts_with(
            "bc,L,M,phi,deltaL,deltaR,state,j,re_k,im_k,I_j,residual,re_E,im_E\nPBC,6,2,"
        ));
    }
}
