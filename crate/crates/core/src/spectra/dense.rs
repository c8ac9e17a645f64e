use faer::linalg::solvers::DenseSolveCore;
use faer::{Mat, Side};
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::params::ModelParams;
use crate::sparse::SparseOperator;

/// Largest matrix handed to the dense eigensolver.
pub const MAX_DENSE_DIM: usize = 4096;

/// Bound on `‖A v − E v‖ / ‖v‖` for every returned eigenpair.
pub const RESIDUAL_TOLERANCE: f64 = 1e-8;

/// Full eigendecomposition of a sector operator.
///
/// Right vectors are the columns of `right_vectors`, normalized to unit length.
/// Left vectors satisfy `w_kᴴ A = E_k w_kᴴ` and `w_kᴴ v_k = 1`.
#[derive(Clone, Debug)]
pub struct SpectrumResult {
    pub params: Option<ModelParams>,
    pub eigenvalues: Vec<C64>,
    pub right_vectors: Option<Mat<C64>>,
    pub left_vectors: Option<Mat<C64>>,
    /// Indices into `eigenvalues`, ascending by real then imaginary part.
    pub sorted_order: Vec<usize>,
    /// Largest eigenpair residual, when vectors were computed.
    pub max_residual: Option<f64>,
}

impl SpectrumResult {
    pub fn with_params(mut self, params: ModelParams) -> Self {
        self.params = Some(params);
        self
    }

    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn sorted_eigenvalues(&self) -> Vec<C64> {
        self.sorted_order
            .iter()
            .map(|&k| self.eigenvalues[k])
            .collect()
    }

    pub fn max_imag(&self) -> f64 {
        self.eigenvalues
            .iter()
            .map(|e| e.im.abs())
            .fold(0.0, f64::max)
    }

    /// Index of the eigenvalue of smallest modulus.
    pub fn null_index(&self) -> Option<usize> {
        (0..self.dim()).min_by(|&a, &b| {
            self.eigenvalues[a]
                .norm()
                .total_cmp(&self.eigenvalues[b].norm())
        })
    }

    pub fn right_vector(&self, k: usize) -> Option<Vec<C64>> {
        self.right_vectors
            .as_ref()
            .map(|v| (0..v.nrows()).map(|r| v[(r, k)]).collect())
    }

    pub fn left_vector(&self, k: usize) -> Option<Vec<C64>> {
        self.left_vectors
            .as_ref()
            .map(|v| (0..v.nrows()).map(|r| v[(r, k)]).collect())
    }
}

/// Diagonal scaling `d` (powers of two) that balances row and column norms of
/// `D⁻¹ A D`, computed from entry magnitudes.
fn balance_scales(op: &SparseOperator) -> Vec<f64> {
    const RADIX: f64 = 2.0;
    let n = op.dim();
    let mut mag = vec![0.0f64; n * n];
    for (r, c, v) in op.entries() {
        if r != c {
            mag[r * n + c] = v.re.abs() + v.im.abs();
        }
    }
    let mut d = vec![1.0f64; n];
    let mut done = false;
    let mut sweeps = 0;
    while !done && sweeps < 200 {
        done = true;
        sweeps += 1;
        for i in 0..n {
            let mut c = 0.0;
            let mut r = 0.0;
            for j in 0..n {
                c += mag[j * n + i];
                r += mag[i * n + j];
            }
            if c == 0.0 || r == 0.0 {
                continue;
            }
            let s = c + r;
            let mut f = 1.0;
            let mut g = r / RADIX;
            while c < g {
                f *= RADIX;
                c *= RADIX * RADIX;
            }
            g = r * RADIX;
            while c > g {
                f /= RADIX;
                c /= RADIX * RADIX;
            }
            if (c + r) / f < 0.95 * s {
                done = false;
                d[i] *= f;
                for j in 0..n {
                    mag[i * n + j] /= f;
                    mag[j * n + i] *= f;
                }
            }
        }
    }
    d
}

fn sort_order(values: &[C64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| {
        values[a]
            .re
            .total_cmp(&values[b].re)
            .then(values[a].im.total_cmp(&values[b].im))
    });
    order
}

fn numeric(op: &SparseOperator, what: impl std::fmt::Display) -> Error {
    Error::Numeric(format!("{what} [{}]", op.fingerprint()))
}

/// Full spectrum of `op`, with eigenvectors on request.
///
/// Hermitian operators go through the self-adjoint solver. Everything else is
/// balanced by a power-of-two diagonal similarity before the general solver,
/// which keeps the strongly non-normal skin-effect matrices well conditioned.
pub fn dense_spectrum(op: &SparseOperator, want_vectors: bool) -> Result<SpectrumResult> {
    let n = op.dim();
    if n > MAX_DENSE_DIM {
        return Err(Error::Capacity {
            what: "dense spectrum dimension",
            value: n as u64,
            limit: MAX_DENSE_DIM as u64,
        });
    }
    if n == 0 {
        return Ok(SpectrumResult {
            params: None,
            eigenvalues: Vec::new(),
            right_vectors: want_vectors.then(|| Mat::zeros(0, 0)),
            left_vectors: want_vectors.then(|| Mat::zeros(0, 0)),
            sorted_order: Vec::new(),
            max_residual: None,
        });
    }

    let (eigenvalues, right) = if op.is_hermitian() {
        hermitian(op, want_vectors)?
    } else {
        general(op, want_vectors)?
    };

    let right = match right {
        Some(v) => Some(refine_clusters(op, &eigenvalues, v)?),
        None => None,
    };
    let (left, max_residual) = match &right {
        Some(v) => {
            let res = max_pair_residual(op, &eigenvalues, v);
            if !(res < RESIDUAL_TOLERANCE) {
                return Err(numeric(
                    op,
                    format!("eigenpair residual {res:.3e} above {RESIDUAL_TOLERANCE:.0e}"),
                ));
            }
            let inv = v.partial_piv_lu().inverse();
            let w = Mat::from_fn(n, n, |r, k| inv[(k, r)].conj());
            if w.norm_max().is_finite() {
                (Some(w), Some(res))
            } else {
                return Err(numeric(op, "eigenvector matrix is singular"));
            }
        }
        None => (None, None),
    };

    Ok(SpectrumResult {
        params: None,
        sorted_order: sort_order(&eigenvalues),
        eigenvalues,
        right_vectors: right,
        left_vectors: left,
        max_residual,
    })
}

type Decomposition = (Vec<C64>, Option<Mat<C64>>);

fn hermitian(op: &SparseOperator, want_vectors: bool) -> Result<Decomposition> {
    let n = op.dim();
    if let Some(a) = op.to_dense_real() {
        if !want_vectors {
            let ev = a
                .self_adjoint_eigenvalues(Side::Lower)
                .map_err(|e| numeric(op, format!("{e:?}")))?;
            return Ok((ev.into_iter().map(|x| C64::new(x, 0.0)).collect(), None));
        }
        let evd = a
            .self_adjoint_eigen(Side::Lower)
            .map_err(|e| numeric(op, format!("{e:?}")))?;
        let s = evd.S().column_vector();
        let u = evd.U();
        let values = (0..n).map(|k| C64::new(s[k], 0.0)).collect();
        return Ok((
            values,
            Some(Mat::from_fn(n, n, |r, c| C64::new(u[(r, c)], 0.0))),
        ));
    }
    let a = op.to_dense();
    if !want_vectors {
        let ev = a
            .self_adjoint_eigenvalues(Side::Lower)
            .map_err(|e| numeric(op, format!("{e:?}")))?;
        return Ok((ev.into_iter().map(|x| C64::new(x, 0.0)).collect(), None));
    }
    let evd = a
        .self_adjoint_eigen(Side::Lower)
        .map_err(|e| numeric(op, format!("{e:?}")))?;
    let s = evd.S().column_vector();
    let values = (0..n).map(|k| C64::new(s[k].re, 0.0)).collect();
    Ok((values, Some(evd.U().to_owned())))
}

fn general(op: &SparseOperator, want_vectors: bool) -> Result<Decomposition> {
    let n = op.dim();
    let d = balance_scales(op);
    let balanced = op.diagonal_similarity(&d.iter().map(|x| x.ln()).collect::<Vec<_>>());
    // eigen() on the real copy when possible; it returns complex pairs either way
    let (values, vecs) = match balanced.to_dense_real() {
        Some(a) if !want_vectors => (
            a.eigenvalues().map_err(|e| numeric(op, format!("{e:?}")))?,
            None,
        ),
        Some(a) => {
            let evd = a.eigen().map_err(|e| numeric(op, format!("{e:?}")))?;
            let s = evd.S().column_vector();
            ((0..n).map(|k| s[k]).collect(), Some(evd.U().to_owned()))
        }
        None => {
            let a = balanced.to_dense();
            if want_vectors {
                let evd = a.eigen().map_err(|e| numeric(op, format!("{e:?}")))?;
                let s = evd.S().column_vector();
                ((0..n).map(|k| s[k]).collect(), Some(evd.U().to_owned()))
            } else {
                (
                    a.eigenvalues().map_err(|e| numeric(op, format!("{e:?}")))?,
                    None,
                )
            }
        }
    };
    if values
        .iter()
        .any(|v: &C64| !v.re.is_finite() || !v.im.is_finite())
    {
        return Err(numeric(op, "non-finite eigenvalue"));
    }
    let vecs = vecs.map(|u| {
        // undo the balancing, then normalize each column
        let mut v = Mat::from_fn(n, n, |r, c| u[(r, c)] * d[r]);
        for c in 0..n {
            let norm = (0..n).map(|r| v[(r, c)].norm_sqr()).sum::<f64>().sqrt();
            if norm > 0.0 {
                for r in 0..n {
                    v[(r, c)] /= norm;
                }
            }
        }
        v
    });
    Ok((values, vecs))
}

/// Replace the vectors of every eigenvalue cluster that contains an inaccurate
/// pair by an orthonormal basis of the null space of `A − λ`.
///
/// Repeated complex pairs (momentum-degenerate ring levels) come back from the
/// real Schur path with vectors that are not eigenvectors at all.
fn refine_clusters(op: &SparseOperator, values: &[C64], mut vecs: Mat<C64>) -> Result<Mat<C64>> {
    let n = op.dim();
    let residuals = pair_residuals(op, values, &vecs);
    let mut done = vec![false; n];
    let mut dense: Option<Mat<C64>> = None;
    for k in 0..n {
        if done[k] || residuals[k] < 1e-2 * RESIDUAL_TOLERANCE {
            continue;
        }
        let scale = values[k].norm().max(1.0);
        let cluster: Vec<usize> = (0..n)
            .filter(|&j| (values[j] - values[k]).norm() <= 1e-8 * scale)
            .collect();
        let lambda = cluster.iter().map(|&j| values[j]).sum::<C64>() / cluster.len() as f64;
        let a = dense.get_or_insert_with(|| op.to_dense());
        let shifted = Mat::from_fn(n, n, |r, c| {
            if r == c {
                a[(r, c)] - lambda
            } else {
                a[(r, c)]
            }
        });
        let svd = shifted.svd().map_err(|e| numeric(op, format!("{e:?}")))?;
        let v = svd.V();
        for (slot, &j) in cluster.iter().enumerate() {
            let col = n - cluster.len() + slot;
            for r in 0..n {
                vecs[(r, j)] = v[(r, col)];
            }
            done[j] = true;
        }
    }
    Ok(vecs)
}

fn pair_residuals(op: &SparseOperator, values: &[C64], vecs: &Mat<C64>) -> Vec<f64> {
    let n = op.dim();
    (0..n)
        .map(|k| {
            let v: Vec<C64> = (0..n).map(|r| vecs[(r, k)]).collect();
            let av = op.matvec(&v);
            let num = av
                .iter()
                .zip(&v)
                .map(|(a, x)| (a - values[k] * x).norm_sqr())
                .sum::<f64>()
                .sqrt();
            let den = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
            if den > 0.0 {
                num / den
            } else {
                f64::INFINITY
            }
        })
        .collect()
}

fn max_pair_residual(op: &SparseOperator, values: &[C64], vecs: &Mat<C64>) -> f64 {
    pair_residuals(op, values, vecs)
        .into_iter()
        .fold(0.0, f64::max)
}
