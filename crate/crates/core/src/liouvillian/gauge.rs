//! Imaginary gauge transformation and the strongly biased limit.

use crate::basis::{apply_hop, site_sum, sz, SectorBasis};
use crate::error::{Error, Result};
use crate::params::ModelParams;
use crate::sparse::{SparseBuilder, SparseOperator};

/// `ln D(c) = φ Σ_{occupied j} j` for every configuration of the basis.
pub fn gauge_log_weights(basis: &SectorBasis, phi: f64) -> Vec<f64> {
    basis
        .configs()
        .iter()
        .map(|&c| phi * site_sum(c) as f64)
        .collect()
}

/// `D⁻¹ · op · D`, which maps `S^+_j` to `e^{-jφ} S^+_j`.
pub fn gauge_transform(op: &SparseOperator, basis: &SectorBasis, phi: f64) -> SparseOperator {
    assert_eq!(
        op.dim(),
        basis.dim(),
        "operator and basis dimensions differ"
    );
    if phi == 0.0 {
        return op.clone();
    }
    op.diagonal_similarity(&gauge_log_weights(basis, phi))
}

/// Hermitian open chain: symmetric hop `J`, with the diagonal of the biased
/// open chain (`2J cosh φ` exchange and `J sinh φ (S^z_L − S^z_1)`).
pub fn build_hermitian_obc(params: &ModelParams, basis: &SectorBasis) -> Result<SparseOperator> {
    check(params, basis)?;
    let (l, j, phi) = (params.l, params.j, params.phi);
    Ok(bond_operator(basis, |b, col, c| {
        let mut diag = j * phi.sinh() * (sz(c, l) - sz(c, 1));
        for s in 1..l {
            for (from, to) in [(s, s + 1), (s + 1, s)] {
                if let Some(img) = apply_hop(c, from, to) {
                    b.push_real(basis.index_of(img).unwrap(), col, j);
                }
            }
            diag += 2.0 * j * phi.cosh() * (sz(c, s) * sz(c, s + 1) - 0.25);
        }
        diag
    }))
}

/// The open chain divided by `e^{φ}` as `φ → ∞`: right hops `J`, exchange
/// `J (S^z_j S^z_{j+1} − 1/4)` and boundary field `(J/2)(S^z_L − S^z_1)`.
///
/// In the ascending basis every hop raises the configuration word, so the
/// matrix is lower triangular; it is upper triangular in descending order.
pub fn build_large_phi_limit(basis: &SectorBasis, j: f64) -> SparseOperator {
    let l = basis.l();
    bond_operator(basis, |b, col, c| {
        let mut diag = 0.5 * j * (sz(c, l) - sz(c, 1));
        for s in 1..l {
            if let Some(img) = apply_hop(c, s, s + 1) {
                b.push_real(basis.index_of(img).unwrap(), col, j);
            }
            diag += j * (sz(c, s) * sz(c, s + 1) - 0.25);
        }
        diag
    })
}

fn bond_operator(
    basis: &SectorBasis,
    mut column: impl FnMut(&mut SparseBuilder, usize, crate::basis::Config) -> f64,
) -> SparseOperator {
    let mut b = SparseBuilder::new(basis.dim());
    for (col, &c) in basis.configs().iter().enumerate() {
        let diag = column(&mut b, col, c);
        b.push_real(col, col, diag);
    }
    b.build()
}

fn check(params: &ModelParams, basis: &SectorBasis) -> Result<()> {
    params.validate()?;
    if basis.l() != params.l || basis.m() != params.m {
        return Err(Error::invalid("basis does not match parameters"));
    }
    Ok(())
}

/// Reversal `i -> dim - 1 - i`, taking the ascending basis to descending order.
pub fn descending_permutation(dim: usize) -> Vec<usize> {
    (0..dim).map(|i| dim - 1 - i).collect()
}

/// True when no entry below the diagonal exceeds `tol` in magnitude.
pub fn is_upper_triangular(op: &SparseOperator, tol: f64) -> bool {
    op.entries().all(|(r, c, v)| r <= c || v.norm() <= tol)
}
