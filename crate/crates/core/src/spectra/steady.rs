//! Null vectors of classical generators.
//!
//! The reference state `r` is pinned to `p_r = 1`, and the remaining unknowns
//! solve the reduced nonsingular system with restarted GMRES, right-preconditioned
//! by a symmetric Gauss-Seidel sweep. Biased chains are nearly triangular in the
//! ascending basis, so the forward sweep alone already captures most of the flow.

use log::debug;

use crate::basis::SectorBasis;
use crate::error::{Error, Result};
use crate::params::ModelParams;
use crate::sparse::SparseOperator;

pub const MAX_STEADY_DIM: usize = 200_000;

#[derive(Clone, Debug, PartialEq)]
pub struct SteadyOptions {
    /// Acceptance bound on `‖ℒp‖∞` for the normalized vector.
    pub tolerance: f64,
    /// `‖ℒp‖∞` at which iteration stops early.
    pub target: f64,
    /// Relative residual at which a Krylov cycle stops.
    pub solve_tolerance: f64,
    /// Total Krylov iterations across restarts.
    pub max_iterations: usize,
    pub restart: usize,
}

impl Default for SteadyOptions {
    fn default() -> Self {
        SteadyOptions {
            tolerance: 1e-9,
            target: 1e-13,
            solve_tolerance: 1e-14,
            max_iterations: 4000,
            restart: 40,
        }
    }
}

#[derive(Clone, Debug)]
pub struct SteadyState {
    pub params: Option<ModelParams>,
    /// Probabilities over the basis configurations, summing to one.
    pub probabilities: Vec<f64>,
    /// `‖ℒp‖∞` before clipping.
    pub residual: f64,
    pub iterations: usize,
}

impl SteadyState {
    pub fn with_params(mut self, params: ModelParams) -> Self {
        self.params = Some(params);
        self
    }
}

struct RealCsr {
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<f64>,
    diag: Vec<f64>,
}

impl RealCsr {
    fn new(op: &SparseOperator) -> Self {
        let n = op.dim();
        let mut row_ptr = Vec::with_capacity(n + 1);
        let mut cols = Vec::with_capacity(op.nnz());
        let mut vals = Vec::with_capacity(op.nnz());
        let mut diag = vec![0.0; n];
        row_ptr.push(0);
        for r in 0..n {
            let (c, v) = op.row(r);
            for (&c, v) in c.iter().zip(v) {
                if c == r {
                    diag[r] = v.re;
                }
                cols.push(c);
                vals.push(v.re);
            }
            row_ptr.push(cols.len());
        }
        RealCsr {
            row_ptr,
            cols,
            vals,
            diag,
        }
    }

    fn dim(&self) -> usize {
        self.diag.len()
    }

    fn row(&self, r: usize) -> (&[usize], &[f64]) {
        let (a, b) = (self.row_ptr[r], self.row_ptr[r + 1]);
        (&self.cols[a..b], &self.vals[a..b])
    }

    fn matvec(&self, x: &[f64], out: &mut [f64]) {
        for (r, o) in out.iter_mut().enumerate() {
            let (c, v) = self.row(r);
            *o = c.iter().zip(v).map(|(&c, v)| v * x[c]).sum();
        }
    }

    /// `Q x` with `x_r` treated as zero and row `r` dropped.
    fn reduced_matvec(&self, r: usize, x: &[f64], out: &mut [f64]) {
        for (i, o) in out.iter_mut().enumerate() {
            if i == r {
                *o = 0.0;
                continue;
            }
            let (c, v) = self.row(i);
            *o = c
                .iter()
                .zip(v)
                .filter(|(&c, _)| c != r)
                .map(|(&c, v)| v * x[c])
                .sum();
        }
    }

    /// Symmetric Gauss-Seidel preconditioner solve on the reduced system.
    fn sgs(&self, r: usize, v: &[f64], z: &mut [f64]) {
        let n = self.dim();
        z.iter_mut().for_each(|x| *x = 0.0);
        for i in 0..n {
            if i == r {
                continue;
            }
            let (c, vals) = self.row(i);
            let mut acc = v[i];
            for (&c, a) in c.iter().zip(vals) {
                if c < i && c != r {
                    acc -= a * z[c];
                }
            }
            z[i] = acc / self.diag[i];
        }
        for i in 0..n {
            z[i] *= self.diag[i];
        }
        for i in (0..n).rev() {
            if i == r {
                continue;
            }
            let (c, vals) = self.row(i);
            let mut acc = z[i];
            for (&c, a) in c.iter().zip(vals) {
                if c > i && c != r {
                    acc -= a * z[c];
                }
            }
            z[i] = acc / self.diag[i];
        }
        z[r] = 0.0;
    }

    /// One forward Gauss-Seidel sweep on the singular system `Q p = 0`.
    fn forward_sweep(&self, p: &mut [f64]) {
        for i in 0..self.dim() {
            let (c, vals) = self.row(i);
            let off: f64 = c
                .iter()
                .zip(vals)
                .filter(|(&c, _)| c != i)
                .map(|(&c, a)| a * p[c])
                .sum();
            p[i] = -off / self.diag[i];
        }
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// One cycle of right-preconditioned GMRES(m) on the reduced system; `x` holds
/// the current iterate and is updated in place. Returns the Krylov steps taken.
fn gmres_cycle(q: &RealCsr, r: usize, b: &[f64], x: &mut [f64], m: usize, tol: f64) -> usize {
    let n = q.dim();
    let bnorm = norm(b).max(f64::MIN_POSITIVE);
    let mut basis: Vec<Vec<f64>> = vec![vec![0.0; n]; m + 1];
    let mut z = vec![0.0; n];
    let mut w = vec![0.0; n];
    let mut h = vec![vec![0.0; m]; m + 1];
    let (mut cs, mut sn, mut g) = (vec![0.0; m], vec![0.0; m], vec![0.0; m + 1]);

    q.reduced_matvec(r, x, &mut w);
    for i in 0..n {
        basis[0][i] = b[i] - w[i];
    }
    basis[0][r] = 0.0;
    let beta = norm(&basis[0]);
    if beta <= tol * bnorm || beta == 0.0 {
        return 0;
    }
    basis[0].iter_mut().for_each(|v| *v /= beta);
    g[0] = beta;

    let mut k = 0;
    for j in 0..m {
        q.sgs(r, &basis[j], &mut z);
        q.reduced_matvec(r, &z, &mut w);
        for i in 0..=j {
            let hij = dot(&w, &basis[i]);
            h[i][j] = hij;
            for (wv, bv) in w.iter_mut().zip(&basis[i]) {
                *wv -= hij * bv;
            }
        }
        let hn = norm(&w);
        h[j + 1][j] = hn;
        for i in 0..j {
            let t = cs[i] * h[i][j] + sn[i] * h[i + 1][j];
            h[i + 1][j] = -sn[i] * h[i][j] + cs[i] * h[i + 1][j];
            h[i][j] = t;
        }
        let denom = h[j][j].hypot(h[j + 1][j]);
        if denom == 0.0 {
            break;
        }
        cs[j] = h[j][j] / denom;
        sn[j] = h[j + 1][j] / denom;
        h[j][j] = denom;
        h[j + 1][j] = 0.0;
        g[j + 1] = -sn[j] * g[j];
        g[j] *= cs[j];
        k = j + 1;
        if g[j + 1].abs() <= tol * bnorm || hn == 0.0 {
            break;
        }
        for (bv, wv) in basis[j + 1].iter_mut().zip(&w) {
            *bv = wv / hn;
        }
    }
    let mut y = vec![0.0; k];
    for i in (0..k).rev() {
        let s: f64 = (i + 1..k).map(|l| h[i][l] * y[l]).sum();
        y[i] = (g[i] - s) / h[i][i];
    }
    w.iter_mut().for_each(|v| *v = 0.0);
    for (yi, v) in y.iter().zip(&basis) {
        for (wv, bv) in w.iter_mut().zip(v) {
            *wv += yi * bv;
        }
    }
    q.sgs(r, &w, &mut z);
    for (xv, zv) in x.iter_mut().zip(&z) {
        *xv += zv;
    }
    x[r] = 0.0;
    k
}

/// Normalized probability vector from the reduced iterate with `x_r = 1`.
fn normalized(x: &[f64], r: usize) -> Vec<f64> {
    let mut p = x.to_vec();
    p[r] = 1.0;
    let s: f64 = p.iter().sum();
    p.iter_mut().for_each(|v| *v /= s);
    p
}

fn inf_residual(q: &RealCsr, p: &[f64]) -> f64 {
    let mut out = vec![0.0; p.len()];
    q.matvec(p, &mut out);
    out.iter().fold(0.0f64, |a, v| a.max(v.abs()))
}

pub fn steady_state(op: &SparseOperator, basis: &SectorBasis) -> Result<SteadyState> {
    steady_state_with(op, basis, &SteadyOptions::default())
}

/// Probability-normalized right null vector of a classical generator.
pub fn steady_state_with(
    op: &SparseOperator,
    basis: &SectorBasis,
    opts: &SteadyOptions,
) -> Result<SteadyState> {
    let n = op.dim();
    if n != basis.dim() {
        return Err(Error::invalid(format!(
            "operator dimension {n} differs from basis dimension {}",
            basis.dim()
        )));
    }
    if n > MAX_STEADY_DIM {
        return Err(Error::Capacity {
            what: "steady-state dimension",
            value: n as u64,
            limit: MAX_STEADY_DIM as u64,
        });
    }
    if !op.is_real() {
        return Err(Error::Unsupported(
            "steady states need a real generator".into(),
        ));
    }
    let q = RealCsr::new(op);
    if n == 1 {
        return Ok(SteadyState {
            params: None,
            probabilities: vec![1.0],
            residual: q.diag[0].abs(),
            iterations: 0,
        });
    }

    // states nothing leaves: their column is empty
    let mut col_count = vec![0usize; n];
    for &c in &q.cols {
        col_count[c] += 1;
    }
    let absorbing: Vec<usize> = (0..n).filter(|&c| col_count[c] == 0).collect();
    match absorbing.len() {
        0 => {}
        1 => {
            let mut p = vec![0.0; n];
            p[absorbing[0]] = 1.0;
            let residual = inf_residual(&q, &p);
            return Ok(SteadyState {
                params: None,
                probabilities: p,
                residual,
                iterations: 0,
            });
        }
        k => {
            return Err(Error::Numeric(format!(
                "{k} absorbing states: the steady state is not unique [{}]",
                op.fingerprint()
            )))
        }
    }
    if let Some(i) = (0..n).find(|&i| !(q.diag[i] < 0.0)) {
        return Err(Error::invalid(format!(
            "state {i} has non-negative exit diagonal {}",
            q.diag[i]
        )));
    }

    let mut p = vec![1.0 / n as f64; n];
    for _ in 0..3 {
        q.forward_sweep(&mut p);
        let s: f64 = p.iter().sum();
        p.iter_mut().for_each(|v| *v /= s);
    }

    let mut iterations = 0;
    let mut residual = f64::INFINITY;
    let mut r = (0..n).max_by(|&a, &b| p[a].total_cmp(&p[b])).unwrap();
    let mut x: Vec<f64> = p.iter().map(|v| v / p[r]).collect();
    let mut b = vec![0.0; n];
    let mut pinned = None;
    while iterations < opts.max_iterations {
        if pinned != Some(r) {
            // re-pin to the most probable state found so far
            let pr = p[r];
            x = p.iter().map(|v| v / pr).collect();
            let mut e = vec![0.0; n];
            e[r] = 1.0;
            q.matvec(&e, &mut b);
            b.iter_mut().for_each(|v| *v = -*v);
            b[r] = 0.0;
            x[r] = 0.0;
            pinned = Some(r);
        }
        let steps = gmres_cycle(&q, r, &b, &mut x, opts.restart.max(1), opts.solve_tolerance);
        iterations += steps;
        p = normalized(&x, r);
        residual = inf_residual(&q, &p);
        let best = (0..n).max_by(|&a, &b| p[a].total_cmp(&p[b])).unwrap();
        debug!("steady state: reference {r}, residual {residual:.3e}, {iterations} iterations");
        if p[best] > 2.0 * p[r] {
            r = best;
            continue;
        }
        if residual < opts.target || steps == 0 {
            break;
        }
    }
    if !(residual < opts.tolerance) {
        return Err(Error::Convergence {
            iterations,
            residual,
        });
    }
    let min = p.iter().copied().fold(f64::INFINITY, f64::min);
    if min < -1e-12 {
        return Err(Error::Numeric(format!(
            "steady state has negative probability {min:.3e}"
        )));
    }
    p.iter_mut().for_each(|v| *v = v.max(0.0));
    let s: f64 = p.iter().sum();
    p.iter_mut().for_each(|v| *v /= s);
    Ok(SteadyState {
        params: None,
        probabilities: p,
        residual,
        iterations,
    })
}
