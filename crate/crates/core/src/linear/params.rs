use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// The four viscosities of the micropolar system.
///
/// `mu` is the kinematic viscosity, `chi` the vortex viscosity, `gamma` the
/// spin viscosity and `kappa` the gyroviscosity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MaterialParams {
    pub mu: f64,
    pub chi: f64,
    pub gamma: f64,
    pub kappa: f64,
}

impl MaterialParams {
    pub fn new(mu: f64, chi: f64, gamma: f64, kappa: f64) -> Result<Self> {
        let p = Self {
            mu,
            chi,
            gamma,
            kappa,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let checks = [
            ("mu", self.mu, self.mu > 0.0, "> 0"),
            ("chi", self.chi, self.chi > 0.0, "> 0"),
            ("gamma", self.gamma, self.gamma >= 0.0, ">= 0"),
            ("kappa", self.kappa, self.kappa >= 0.0, ">= 0"),
        ];
        for (name, v, ok, rule) in checks {
            if !v.is_finite() || !ok {
                return Err(invalid(format!("{name} must be {rule}, got {v}")));
            }
        }
        Ok(())
    }
}
