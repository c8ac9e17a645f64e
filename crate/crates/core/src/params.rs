//! Model parameterization of a single chain instance.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Boundary mode of the effective Liouvillian.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Boundary {
    #[serde(rename = "PBC")]
    Periodic,
    #[serde(rename = "OBC")]
    Open,
    #[serde(rename = "GBC")]
    Generalized,
}

impl Boundary {
    pub const ALL: [Boundary; 3] = [Boundary::Periodic, Boundary::Open, Boundary::Generalized];

    pub fn as_str(self) -> &'static str {
        match self {
            Boundary::Periodic => "PBC",
            Boundary::Open => "OBC",
            Boundary::Generalized => "GBC",
        }
    }
}

impl fmt::Display for Boundary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Boundary {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "PBC" | "PERIODIC" => Ok(Boundary::Periodic),
            "OBC" | "OPEN" => Ok(Boundary::Open),
            "GBC" | "GENERALIZED" => Ok(Boundary::Generalized),
            other => Err(Error::invalid(format!("unknown boundary mode `{other}`"))),
        }
    }
}

/// Full parameterization of one chain: `l` sites, `m` up-spins, rate scale `j`,
/// asymmetry `phi` (positive means right hopping dominates) and the boundary
/// couplings used by [`Boundary::Generalized`].
///
/// The directional rates `J_L = J e^{-φ}` and `J_R = J e^{φ}` are always derived.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub l: usize,
    pub m: usize,
    pub j: f64,
    pub phi: f64,
    pub delta_l: f64,
    pub delta_r: f64,
    pub bc: Boundary,
    /// Coherent `S^z S^z` coupling.
    pub j_prime: f64,
    /// Coherent longitudinal field.
    pub h: f64,
}

impl ModelParams {
    pub fn new(l: usize, m: usize, bc: Boundary) -> Self {
        ModelParams {
            l,
            m,
            j: 1.0,
            phi: 0.0,
            delta_l: 0.0,
            delta_r: 0.0,
            bc,
            j_prime: 0.0,
            h: 0.0,
        }
    }

    pub fn periodic(l: usize, m: usize, phi: f64) -> Self {
        Self::new(l, m, Boundary::Periodic).with_phi(phi)
    }

    pub fn open(l: usize, m: usize, phi: f64) -> Self {
        Self::new(l, m, Boundary::Open).with_phi(phi)
    }

    pub fn generalized(l: usize, m: usize, phi: f64, delta_l: f64, delta_r: f64) -> Self {
        Self::new(l, m, Boundary::Generalized)
            .with_phi(phi)
            .with_deltas(delta_l, delta_r)
    }

    pub fn with_phi(mut self, phi: f64) -> Self {
        self.phi = phi;
        self
    }

    pub fn with_j(mut self, j: f64) -> Self {
        self.j = j;
        self
    }

    pub fn with_deltas(mut self, delta_l: f64, delta_r: f64) -> Self {
        self.delta_l = delta_l;
        self.delta_r = delta_r;
        self
    }

    pub fn with_coherent(mut self, j_prime: f64, h: f64) -> Self {
        self.j_prime = j_prime;
        self.h = h;
        self
    }

    pub fn with_sector(mut self, l: usize, m: usize) -> Self {
        self.l = l;
        self.m = m;
        self
    }

    /// Left hopping rate `J e^{-φ}`.
    pub fn j_left(&self) -> f64 {
        self.j * (-self.phi).exp()
    }

    /// Right hopping rate `J e^{φ}`.
    pub fn j_right(&self) -> f64 {
        self.j * self.phi.exp()
    }

    /// Boundary couplings actually entering the operator.
    ///
    /// Periodic chains use the bulk rates, open chains none.
    pub fn boundary_couplings(&self) -> (f64, f64) {
        match self.bc {
            Boundary::Periodic => (self.j_left(), self.j_right()),
            Boundary::Open => (0.0, 0.0),
            Boundary::Generalized => (self.delta_l, self.delta_r),
        }
    }

    /// Check the parameter invariants.
    pub fn validate(&self) -> Result<()> {
        if self.l < 2 {
            return Err(Error::invalid(format!("L = {} must be at least 2", self.l)));
        }
        if self.m > self.l {
            return Err(Error::invalid(format!(
                "M = {} exceeds L = {}",
                self.m, self.l
            )));
        }
        if !(self.j.is_finite() && self.j > 0.0) {
            return Err(Error::invalid(format!("J = {} must be positive", self.j)));
        }
        for (name, v) in [("phi", self.phi), ("J'", self.j_prime), ("h", self.h)] {
            if !v.is_finite() {
                return Err(Error::invalid(format!("{name} = {v} is not finite")));
            }
        }
        for (name, v) in [("deltaL", self.delta_l), ("deltaR", self.delta_r)] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::invalid(format!(
                    "{name} = {v} must be finite and >= 0"
                )));
            }
        }
        if self.bc == Boundary::Open && (self.delta_l != 0.0 || self.delta_r != 0.0) {
            return Err(Error::invalid(
                "open boundary requires deltaL = deltaR = 0".to_string(),
            ));
        }
        Ok(())
    }

    /// Parameters of the site-inverted model `j -> L + 1 - j`.
    ///
    /// Inversion flips the sign of `φ` and exchanges the roles of the two
    /// boundary couplings.
    pub fn inverted(&self) -> Self {
        ModelParams {
            phi: -self.phi,
            delta_l: self.delta_r,
            delta_r: self.delta_l,
            ..self.clone()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn directional_rates_multiply_to_j_squared() {
        for &(j, phi) in &[(1.0, 0.0), (0.7, 0.5), (2.5, -1.3), (1.0, 12.0)] {
            let p = ModelParams::periodic(4, 2, phi).with_j(j);
            let prod = p.j_left() * p.j_right();
            assert!(
                (prod - j * j).abs() <= 4.0 * f64::EPSILON * j * j,
                "{prod} vs {}",
                j * j
            );
        }
    }

    #[test]
    fn boundary_couplings_follow_mode() {
        let p = ModelParams::periodic(6, 3, 0.5).with_deltas(0.1, 0.2);
        assert_eq!(p.boundary_couplings(), (p.j_left(), p.j_right()));
        let o = ModelParams::open(6, 3, 0.5);
        assert_eq!(o.boundary_couplings(), (0.0, 0.0));
        let g = ModelParams::generalized(6, 3, 0.5, 0.3, 0.4);
        assert_eq!(g.boundary_couplings(), (0.3, 0.4));
    }

    #[test]
    fn validation_rejects_bad_parameters() {
        assert!(ModelParams::open(6, 7, 0.5).validate().is_err());
        assert!(ModelParams::open(1, 0, 0.5).validate().is_err());
        assert!(ModelParams::open(6, 3, 0.5).with_j(0.0).validate().is_err());
        assert!(ModelParams::open(6, 3, 0.5)
            .with_deltas(0.1, 0.0)
            .validate()
            .is_err());
        assert!(ModelParams::generalized(6, 3, 0.5, -0.1, 0.0)
            .validate()
            .is_err());
        assert!(ModelParams::generalized(6, 3, f64::NAN, 0.1, 0.0)
            .validate()
            .is_err());
        assert!(ModelParams::generalized(6, 3, 0.5, 0.1, 0.0)
            .validate()
            .is_ok());
    }

    #[test]
    fn boundary_parses_case_insensitively() {
        assert_eq!("pbc".parse::<Boundary>().unwrap(), Boundary::Periodic);
        assert_eq!("OBC".parse::<Boundary>().unwrap(), Boundary::Open);
        assert_eq!("Gbc".parse::<Boundary>().unwrap(), Boundary::Generalized);
        assert!("xbc".parse::<Boundary>().is_err());
    }

    #[test]
    fn inversion_is_an_involution() {
        let p = ModelParams::generalized(6, 3, 0.5, 0.3, 0.9);
        assert_eq!(p.inverted().inverted(), p);
        assert_eq!(p.inverted().delta_l, 0.9);
    }
}
