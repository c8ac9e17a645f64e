//! Local projectors of the double space and the diagonal-sector reduction.

use crate::basis::{occupied, Config, SectorBasis};
use crate::error::{Error, Result};
use crate::sparse::{SparseBuilder, SparseOperator};

use super::full::MAX_FULL_SITES;

/// The three projectors of one site on the `4^L`-dimensional double space.
///
/// `p1` keeps states with the site up in the right factor and down in the left,
/// `p2` the reverse, and `p0` the states where both factors agree.
#[derive(Clone, Debug)]
pub struct ProjectorSet {
    pub site: usize,
    pub p0: SparseOperator,
    pub p1: SparseOperator,
    pub p2: SparseOperator,
}

impl ProjectorSet {
    pub fn as_array(&self) -> [&SparseOperator; 3] {
        [&self.p0, &self.p1, &self.p2]
    }
}

fn check_size(l: usize) -> Result<()> {
    if l == 0 {
        return Err(Error::invalid("L must be at least 1"));
    }
    if l > MAX_FULL_SITES {
        return Err(Error::Capacity {
            what: "L for double-space projectors",
            value: l as u64,
            limit: MAX_FULL_SITES as u64,
        });
    }
    Ok(())
}

fn diagonal_mask(l: usize, keep: impl Fn(Config, Config) -> bool) -> SparseOperator {
    let n = 1usize << l;
    let mut b = SparseBuilder::with_capacity(n * n, n * n);
    for i in 0..n {
        for k in 0..n {
            if keep(i as Config, k as Config) {
                b.push_real(i * n + k, i * n + k, 1.0);
            }
        }
    }
    b.build()
}

pub fn build_projectors(l: usize, site: usize) -> Result<ProjectorSet> {
    check_size(l)?;
    if site == 0 || site > l {
        return Err(Error::invalid(format!("site {site} outside 1..={l}")));
    }
    let p1 = diagonal_mask(l, |i, k| occupied(i, site) && !occupied(k, site));
    let p2 = diagonal_mask(l, |i, k| !occupied(i, site) && occupied(k, site));
    let p0 = diagonal_mask(l, |i, k| occupied(i, site) == occupied(k, site));
    Ok(ProjectorSet { site, p0, p1, p2 })
}

/// `P⁰ ℒ` restricted to the diagonal states `|c⟩⊗|c⟩` of a sector.
///
/// `P⁰` is formed as the product of the single-site `P⁰_j`.
pub fn project_diagonal_sector(
    full: &SparseOperator,
    basis: &SectorBasis,
) -> Result<SparseOperator> {
    let l = basis.l();
    check_size(l)?;
    let n = 1usize << l;
    if full.dim() != n * n {
        return Err(Error::invalid(format!(
            "operator dimension {} is not 4^{l}",
            full.dim()
        )));
    }
    let mut p0 = SparseOperator::identity(n * n);
    for site in 1..=l {
        p0 = p0.matmul(&build_projectors(l, site)?.p0);
    }
    let projected = p0.matmul(full);
    let double = |c: Config| c as usize * n + c as usize;
    let mut b = SparseBuilder::new(basis.dim());
    for (row, &cr) in basis.configs().iter().enumerate() {
        for (col, &cc) in basis.configs().iter().enumerate() {
            let v = projected.get(double(cr), double(cc));
            if v.norm() > 0.0 {
                b.push(row, col, v);
            }
        }
    }
    Ok(b.build())
}
