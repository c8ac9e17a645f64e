//! Effective Liouvillians on the diagonal sector.

use crate::basis::{apply_hop, sz, SectorBasis};
use crate::error::{Error, Result};
use crate::params::{Boundary, ModelParams};
use crate::sparse::{SparseBuilder, SparseOperator};

/// Incoherent hop of a magnon from site `from` to site `to` at `rate`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HopChannel {
    pub from: usize,
    pub to: usize,
    pub rate: f64,
}

/// The jump operators `√rate S^+_to S^-_from` of a boundary mode.
///
/// Bulk bonds carry `J_R` to the right and `J_L` to the left. The periodic
/// chain adds the wrap bond `(L, 1)`; the generalized chain replaces it by
/// `δ_L` (site 1 to site `L`) and `δ_R` (site `L` to site 1).
pub fn hop_channels(params: &ModelParams) -> Vec<HopChannel> {
    let l = params.l;
    let (jl, jr) = (params.j_left(), params.j_right());
    let bonds = if params.bc == Boundary::Periodic {
        l
    } else {
        l - 1
    };
    let mut out = Vec::with_capacity(2 * bonds + 2);
    for j in 1..=bonds {
        let k = j % l + 1;
        out.push(HopChannel {
            from: j,
            to: k,
            rate: jr,
        });
        out.push(HopChannel {
            from: k,
            to: j,
            rate: jl,
        });
    }
    if params.bc == Boundary::Generalized {
        for (from, to, rate) in [(1, l, params.delta_l), (l, 1, params.delta_r)] {
            if rate != 0.0 {
                out.push(HopChannel { from, to, rate });
            }
        }
    }
    out
}

/// Sector matrix of the effective non-Hermitian XXZ operator.
///
/// Each bulk bond contributes the hop `J e^{φ}` to the right, `J e^{-φ}` to the
/// left and `2J cosh φ (S^z_j S^z_{j+1} − 1/4)` on the diagonal; open and
/// generalized chains add `J sinh φ (S^z_L − S^z_1)`, and the generalized chain
/// the two boundary couplings with their `S^z` companions. For `φ < 0` the
/// operator is the site inversion of the `|φ|` model with `δ_L` and `δ_R`
/// exchanged.
pub fn build_effective_liouvillian(
    params: &ModelParams,
    basis: &SectorBasis,
) -> Result<SparseOperator> {
    params.validate()?;
    if basis.l() != params.l || basis.m() != params.m {
        return Err(Error::invalid(format!(
            "basis (L={}, M={}) does not match parameters (L={}, M={})",
            basis.l(),
            basis.m(),
            params.l,
            params.m
        )));
    }
    if params.phi < 0.0 {
        let op = assemble(&params.inverted(), basis);
        return Ok(op.permuted(&basis.inversion_permutation()));
    }
    Ok(assemble(params, basis))
}

fn assemble(params: &ModelParams, basis: &SectorBasis) -> SparseOperator {
    let l = params.l;
    let (j, phi) = (params.j, params.phi);
    let (hop_right, hop_left) = (j * phi.exp(), j * (-phi).exp());
    let zz = 2.0 * j * phi.cosh();
    let open = params.bc != Boundary::Periodic;
    let bonds = if open { l - 1 } else { l };

    let mut b = SparseBuilder::with_capacity(basis.dim(), basis.dim() * (2 * bonds + 3));
    let push_hop = |b: &mut SparseBuilder, col: usize, from: usize, to: usize, amp: f64| {
        if let Some(img) = apply_hop(basis.config(col), from, to) {
            let row = basis
                .index_of(img)
                .expect("hops conserve the particle number");
            b.push_real(row, col, amp);
        }
    };

    for col in 0..basis.dim() {
        let c = basis.config(col);
        let mut diag = 0.0;
        for s in 1..=bonds {
            let t = s % l + 1;
            push_hop(&mut b, col, s, t, hop_right);
            push_hop(&mut b, col, t, s, hop_left);
            diag += zz * (sz(c, s) * sz(c, t) - 0.25);
        }
        if open {
            diag += j * phi.sinh() * (sz(c, l) - sz(c, 1));
        }
        if params.bc == Boundary::Generalized {
            let (dl, dr) = (params.delta_l, params.delta_r);
            push_hop(&mut b, col, 1, l, dl);
            push_hop(&mut b, col, l, 1, dr);
            diag += dl * (sz(c, l) - 0.5) * (sz(c, 1) + 0.5);
            diag += dr * (sz(c, 1) - 0.5) * (sz(c, l) + 0.5);
        }
        b.push_real(col, col, diag);
    }
    b.build()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::build_sector;
    use num_complex::Complex64 as C64;

    fn effective(p: &ModelParams) -> SparseOperator {
        build_effective_liouvillian(p, &build_sector(p.l, p.m).unwrap()).unwrap()
    }

    /// Classical generator built straight from the jump channels.
    fn from_channels(p: &ModelParams) -> SparseOperator {
        let basis = build_sector(p.l, p.m).unwrap();
        let mut b = SparseBuilder::new(basis.dim());
        for (col, &c) in basis.configs().iter().enumerate() {
            for ch in hop_channels(p) {
                if let Some(img) = apply_hop(c, ch.from, ch.to) {
                    b.push_real(basis.index_of(img).unwrap(), col, ch.rate);
                    b.push_real(col, col, -ch.rate);
                }
            }
        }
        b.build()
    }

    #[test]
    fn two_site_ring_doubles_the_bond() {
        let op = effective(&ModelParams::periodic(2, 1, 0.0));
        let d = op.to_dense();
        let expect = [[-2.0, 2.0], [2.0, -2.0]];
        for r in 0..2 {
            for c in 0..2 {
                assert!((d[(r, c)] - C64::new(expect[r][c], 0.0)).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn generalized_closes_to_periodic() {
        let pbc = ModelParams::periodic(6, 3, 0.5);
        let gbc = ModelParams::generalized(6, 3, 0.5, pbc.j_left(), pbc.j_right());
        assert!(effective(&pbc).max_abs_diff(&effective(&gbc)) < 1e-14);
    }

    #[test]
    fn open_columns_sum_to_zero() {
        let op = effective(&ModelParams::open(6, 3, 0.5));
        assert!(op.column_sums().iter().all(|s| s.norm() < 1e-13));
    }

    #[test]
    fn printed_form_equals_channel_generator() {
        for bc in Boundary::ALL {
            for phi in [0.0, 0.5, 1.3, -0.8] {
                for m in 0..=5 {
                    let mut p = ModelParams::new(5, m, bc).with_phi(phi).with_j(0.7);
                    if bc == Boundary::Generalized {
                        p = p.with_deltas(0.3, 1.1);
                    }
                    let diff = effective(&p).max_abs_diff(&from_channels(&p));
                    assert!(diff < 1e-13, "{bc} phi={phi} m={m}: {diff}");
                }
            }
        }
    }

    #[test]
    fn mismatched_basis_is_rejected() {
        let p = ModelParams::open(6, 3, 0.5);
        let basis = build_sector(6, 2).unwrap();
        assert!(matches!(
            build_effective_liouvillian(&p, &basis),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn counter_flow_only_keeps_zero_column_sums() {
        let p = ModelParams::generalized(6, 2, 0.5, 0.5 * 0.5f64.exp().recip(), 0.0);
        let op = effective(&p);
        assert!(op.column_sums().iter().all(|s| s.norm() < 1e-13));
    }
}
