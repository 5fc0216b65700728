use serde::{Deserialize, Serialize};

use super::params::MaterialParams;
use crate::error::{invalid, Result};

/// Eigen-data of the per-mode 2×2 generator at `R = |ξ|²`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EigQuantities {
    pub r: f64,
    pub alpha: f64,
    pub beta: f64,
    pub d: f64,
    pub sqrt_d: f64,
    /// Slow rate `α − √D`, formed without cancellation.
    pub lambda1: f64,
    pub lambda2: f64,
}

/// Scalar entries of the symbol `K(ξ,t)` at one `(|ξ|², t)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SymbolComponents {
    pub e11: f64,
    pub e21: f64,
    pub e22: f64,
    /// `exp(−4χt − (γ+κ)t|ξ|²)`, the decay of the longitudinal part of `ŵ`.
    pub div_factor: f64,
}

impl SymbolComponents {
    pub const IDENTITY: Self = Self {
        e11: 1.0,
        e21: 0.0,
        e22: 1.0,
        div_factor: 1.0,
    };
}

pub fn eig_quantities(p: &MaterialParams, r: f64) -> Result<EigQuantities> {
    if !(r >= 0.0 && r.is_finite()) {
        return Err(invalid(format!("|ξ|² must be a finite value >= 0, got {r}")));
    }
    Ok(eig_unchecked(p, r))
}

#[inline]
pub(crate) fn eig_unchecked(p: &MaterialParams, r: f64) -> EigQuantities {
    let MaterialParams { mu, chi, gamma, .. } = *p;
    let alpha = 0.5 * (mu + chi + gamma) * r + 2.0 * chi;
    let beta = 0.5 * (mu + chi - gamma) * r - 2.0 * chi;
    let d = beta * beta + 4.0 * chi * chi * r;
    let sqrt_d = d.max(0.0).sqrt();
    // α² − D = (μ+χ)γR² + 4χμR
    let product = (mu + chi) * gamma * r * r + 4.0 * chi * mu * r;
    let lambda2 = alpha + sqrt_d;
    EigQuantities {
        r,
        alpha,
        beta,
        d,
        sqrt_d,
        lambda1: product / lambda2,
        lambda2,
    }
}

/// `(1 − e^{−2x}) / (2x)`, equal to `e^{−x} sinh(x)/x`.
#[inline]
pub fn phi_sinh(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        1.0 - x + x * x * (2.0 / 3.0) - x * x * x / 3.0
    } else {
        -(-2.0 * x).exp_m1() / (2.0 * x)
    }
}

/// `E₁₁, E₂₁, E₂₂` and the divergence factor at `(|ξ|², t)`.
///
/// Every exponential has a non-positive argument, so the values stay finite
/// for arbitrarily large `t√D`.
pub fn e_components(p: &MaterialParams, xi_sq: f64, t: f64) -> Result<SymbolComponents> {
    if !(xi_sq >= 0.0 && xi_sq.is_finite()) {
        return Err(invalid(format!("|ξ|² must be >= 0, got {xi_sq}")));
    }
    if !(t >= 0.0 && t.is_finite()) {
        return Err(invalid(format!("t must be >= 0, got {t}")));
    }
    Ok(components_unchecked(p, xi_sq, t))
}

#[inline]
pub(crate) fn components_unchecked(p: &MaterialParams, r: f64, t: f64) -> SymbolComponents {
    if t == 0.0 {
        return SymbolComponents::IDENTITY;
    }
    let q = eig_unchecked(p, r);
    let chi = p.chi;
    let div_factor = (-(4.0 * chi + (p.gamma + p.kappa) * r) * t).exp();
    let slow = (-q.lambda1 * t).exp();

    if q.sqrt_d == 0.0 {
        // Degenerate D; unreachable for χ > 0.
        let ea = (-q.alpha * t).exp();
        return SymbolComponents {
            e11: ea * (1.0 - q.beta * t),
            e21: 2.0 * chi * t * ea,
            e22: ea * (1.0 + q.beta * t),
            div_factor,
        };
    }

    let fast = (-q.lambda2 * t).exp();
    // √D ∓ β, using (√D+β)(√D−β) = 4χ²R on the cancelling side.
    let (minus, plus) = if q.beta <= 0.0 {
        let m = q.sqrt_d - q.beta;
        (m, 4.0 * chi * chi * r / m)
    } else {
        let pl = q.sqrt_d + q.beta;
        (4.0 * chi * chi * r / pl, pl)
    };
    let two_sd = 2.0 * q.sqrt_d;
    SymbolComponents {
        e11: (slow * minus + fast * plus) / two_sd,
        e21: 2.0 * chi * t * slow * phi_sinh(t * q.sqrt_d),
        e22: (slow * plus + fast * minus) / two_sd,
        div_factor,
    }
}
