//! Physical constants and the units policy shared by all modules.
//!
//! Natural units ħ = m = Λ = 1 are the default; every quantity in the crate
//! carries these four scales explicitly so nothing is hard-wired to them.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Scales of the problem: ħ, the particle mass, the box length Λ and the
/// field-coupling strength α = eE₀.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhysicalConstants {
    pub hbar: f64,
    pub mass: f64,
    pub box_length: f64,
    pub alpha: f64,
}

impl Default for PhysicalConstants {
    fn default() -> Self {
        Self { hbar: 1.0, mass: 1.0, box_length: 1.0, alpha: 1.0 }
    }
}

impl PhysicalConstants {
    /// Natural units with a chosen coupling α.
    pub fn natural_with_alpha(alpha: f64) -> Self {
        Self { alpha, ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.hbar > 0.0) || !self.hbar.is_finite() {
            return Err(Error::invalid_argument("hbar must be positive and finite"));
        }
        if !(self.mass > 0.0) || !self.mass.is_finite() {
            return Err(Error::invalid_argument("mass must be positive and finite"));
        }
        if !(self.box_length > 0.0) || !self.box_length.is_finite() {
            return Err(Error::invalid_argument("box_length must be positive and finite"));
        }
        if !self.alpha.is_finite() {
            return Err(Error::invalid_argument("alpha must be finite"));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_natural_units() {
        let c = PhysicalConstants::default();
        assert_eq!(c.hbar, 1.0);
        assert_eq!(c.mass, 1.0);
        assert_eq!(c.box_length, 1.0);
        c.validate().unwrap();
    }

    #[test]
    fn rejects_nonpositive_scales() {
        let c = PhysicalConstants { mass: 0.0, ..Default::default() };
        assert!(c.validate().is_err());
        let c = PhysicalConstants { box_length: -1.0, ..Default::default() };
        assert!(c.validate().is_err());
    }
}
