use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::linear::MaterialParams;

/// Constants of the Fourier-splitting decay argument and of the enstrophy
/// functional, all determined by the viscosities.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConstantsLedger {
    pub eta: f64,
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
    pub c4: f64,
    pub delta: f64,
    /// Weight of `‖Ω‖²` in the enstrophy functional.
    pub a: f64,
    /// Start of the splitting regime: `t0 ≥ 10/δ` and `c2(1+t0) ≥ 10`.
    pub t0: f64,
}

impl ConstantsLedger {
    pub fn new(p: &MaterialParams) -> Result<Self> {
        p.validate()?;
        let (mu, chi, gamma) = (p.mu, p.chi, p.gamma);
        let eta = 0.25 * (1.0 + (mu + chi) / chi);
        let c1 = 2.0 * (mu + chi - 2.0 * chi * eta);
        let c2 = 2.0 * chi * (4.0 - 2.0 / eta);
        let c3 = (0.5 * c1).min(0.5 * c2);
        let c4 = (2.0 / c1).max(2.0 / c2);
        let delta = c1.min(c3);
        let t0 = (10.0 / delta).max(10.0 / c2 - 1.0);
        let a = (gamma * chi + mu * chi + 2.0 * mu * gamma) / (4.0 * chi * chi);
        Ok(Self {
            eta,
            c1,
            c2,
            c3,
            c4,
            delta,
            a,
            t0,
        })
    }

    /// Splitting radius `g(t) = √(10/δ) (1+t)^{-1/2}`.
    pub fn g(&self, t: f64) -> f64 {
        (10.0 / self.delta).sqrt() / (1.0 + t).sqrt()
    }

    /// Integrating weight `e(t) = ((1+t)/(1+t0))^{10}`.
    pub fn e(&self, t: f64) -> f64 {
        ((1.0 + t) / (1.0 + self.t0)).powi(10)
    }
}
