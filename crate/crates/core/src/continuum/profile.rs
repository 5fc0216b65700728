use std::fmt;
use std::sync::Arc;

use num_complex::Complex64 as C;

use crate::error::{invalid, Result};
use crate::linear::propagator::apply_mode;
use crate::linear::symbol::components_unchecked;
use crate::linear::{MaterialParams, SymbolComponents};
use crate::spectral::ops::{i_cross, leray_mode, norm_sq3};

/// Closed-form spectral data `ξ ↦ ℂ³`.
pub type HatFn = Arc<dyn Fn([f64; 3]) -> [C; 3] + Send + Sync>;

/// Whole-space initial data `(û₀, ŵ₀)` given in closed form.
///
/// `q` is the low-frequency exponent of `|û₀|` and `sigma` the spectral
/// decay scale; both are used to choose quadrature windows.
#[derive(Clone)]
pub struct ContinuumProfile {
    u0: HatFn,
    w0: HatFn,
    q: f64,
    sigma: f64,
}

impl fmt::Debug for ContinuumProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ContinuumProfile")
            .field("q", &self.q)
            .field("sigma", &self.sigma)
            .finish_non_exhaustive()
    }
}

impl ContinuumProfile {
    pub fn new(u0: HatFn, w0: HatFn, q: f64, sigma: f64) -> Result<Self> {
        if !(q.is_finite() && q >= -1.0) {
            return Err(invalid(format!("q must be >= -1, got {q}")));
        }
        if !(sigma.is_finite() && sigma > 0.0) {
            return Err(invalid(format!("sigma must be > 0, got {sigma}")));
        }
        Ok(Self { u0, w0, q, sigma })
    }

    pub fn u0_hat(&self, xi: [f64; 3]) -> [C; 3] {
        (self.u0)(xi)
    }

    pub fn w0_hat(&self, xi: [f64; 3]) -> [C; 3] {
        (self.w0)(xi)
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }
}

/// The linear flow and its derived fields at one frequency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearStateHat {
    pub u: [C; 3],
    pub w: [C; 3],
    /// Solenoidal part `ℙŵ`.
    pub h: [C; 3],
    /// Vorticity `iξ×û`.
    pub omega: [C; 3],
    /// `ĥ − ½Ω̂`.
    pub e: [C; 3],
}

pub(crate) fn state_from_data(
    xi: [f64; 3],
    c: &SymbolComponents,
    u0: [C; 3],
    w0: [C; 3],
) -> LinearStateHat {
    let (u, w) = apply_mode(xi, c, u0, w0);
    let h = leray_mode(xi, w);
    let omega = i_cross(xi, u);
    let e = [0, 1, 2].map(|k| h[k] - omega[k] * 0.5);
    LinearStateHat { u, w, h, omega, e }
}

/// `(û_L, ŵ_L, ĥ_L, Ω̂_L, Ê_L)` at `(ξ, t)`. At `ξ = 0` the zero-mode limit
/// applies: `û` is constant and `ŵ` decays like `e^{−4χt}`.
pub fn linear_state_hat(
    p: &MaterialParams,
    prof: &ContinuumProfile,
    xi: [f64; 3],
    t: f64,
) -> Result<LinearStateHat> {
    if !(t >= 0.0 && t.is_finite()) {
        return Err(invalid(format!("t must be >= 0, got {t}")));
    }
    let c = components_unchecked(p, norm_sq3(xi), t);
    Ok(state_from_data(xi, &c, prof.u0_hat(xi), prof.w0_hat(xi)))
}

pub(crate) fn abs_sq(v: &[C; 3]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum()
}
