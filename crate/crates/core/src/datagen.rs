//! Divergence-free initial data.
//!
//! Continuum profiles use the envelope `m(r) = A r^{q−1} e^{−r²/(2σ²)}` on the
//! transverse field `ξ × c`, so `|û₀| ~ r^q` near the origin and the heat flow
//! of `u₀` decays like `t^{−(q+3/2)}` in `L²`-squared.
//!
//! Torus fields draw every complex amplitude uniformly from `[−1,1] + i[−1,1]`
//! with `ChaCha8Rng::seed_from_u64(seed)`, visiting modes in storage order and
//! components in the order `u₁ u₂ u₃ w₁ w₂ w₃`. The draws are then Hermitian
//! symmetrised, shaped by the envelope `r^q e^{−r²/(2σ²)}`, stripped of the
//! mean mode, Leray-projected (for `u`) and truncated.

use std::sync::Arc;

use num_complex::Complex64 as C;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::continuum::{ContinuumProfile, HatFn};
use crate::error::{invalid, Result};
use crate::spectral::ops::{i_cross, norm_sq3};
use crate::spectral::{leray_project, truncate, GridSpec, SpectralField, StateSpectral};

/// Fixed direction `c` of the transverse construction `û₀ ∝ ξ × c`.
pub const U_AXIS: [f64; 3] = [0.0, 0.0, 1.0];
/// Fixed direction of the continuum `ŵ₀`.
pub const W_AXIS: [f64; 3] = [1.0, 0.0, 0.0];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DataKind {
    TorusRandom,
    ContinuumProfile,
}

/// How `u₀` relates to `w₀`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Coupling {
    Independent,
    /// `u₀ = −½ curl w₀`; the `u` amplitude is ignored.
    U0EqualsMinusHalfCurlW0,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DataSpec {
    pub kind: DataKind,
    /// Low-frequency exponent; `q = Γ − 3/2` targets a decay rate `Γ`.
    pub q: f64,
    pub sigma: f64,
    /// Amplitude of `u₀`.
    pub amplitude: f64,
    /// Amplitude of `w₀`.
    pub w_amplitude: f64,
    pub seed: u64,
    pub coupling: Coupling,
}

impl Default for DataSpec {
    fn default() -> Self {
        Self {
            kind: DataKind::ContinuumProfile,
            q: 0.0,
            sigma: 1.0,
            amplitude: 1.0,
            w_amplitude: 0.0,
            seed: 0,
            coupling: Coupling::Independent,
        }
    }
}

impl DataSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.q.is_finite() && self.q >= -1.0) {
            return Err(invalid(format!("q must be >= -1, got {}", self.q)));
        }
        if !(self.sigma.is_finite() && self.sigma > 0.0) {
            return Err(invalid(format!("sigma must be > 0, got {}", self.sigma)));
        }
        for (name, v) in [("amplitude", self.amplitude), ("w_amplitude", self.w_amplitude)] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(invalid(format!("{name} must be >= 0, got {v}")));
            }
        }
        Ok(())
    }
}

/// Closed-form profile for `spec`:
/// `û₀ = i A r^{q−1} e^{−r²/(2σ²)} (ξ × c)` and `ŵ₀ = B e^{−r²/(2σ²)} d`,
/// or `û₀ = −½ iξ×ŵ₀` under the coupled option.
pub fn make_continuum_profile(spec: &DataSpec) -> Result<ContinuumProfile> {
    spec.validate()?;
    let DataSpec {
        q,
        sigma,
        amplitude,
        w_amplitude,
        coupling,
        ..
    } = *spec;
    let inv = 0.5 / (sigma * sigma);
    let w0 = move |xi: [f64; 3]| {
        let g = w_amplitude * (-norm_sq3(xi) * inv).exp();
        W_AXIS.map(|d| C::new(g * d, 0.0))
    };
    let u0: HatFn = match coupling {
        Coupling::Independent => Arc::new(move |xi: [f64; 3]| {
            let r2 = norm_sq3(xi);
            if r2 == 0.0 {
                return [C::new(0.0, 0.0); 3];
            }
            let m = amplitude * r2.powf(0.5 * (q - 1.0)) * (-r2 * inv).exp();
            let c = U_AXIS;
            let x = [
                xi[1] * c[2] - xi[2] * c[1],
                xi[2] * c[0] - xi[0] * c[2],
                xi[0] * c[1] - xi[1] * c[0],
            ];
            x.map(|v| C::new(0.0, m * v))
        }),
        Coupling::U0EqualsMinusHalfCurlW0 => Arc::new(move |xi: [f64; 3]| {
            i_cross(xi, w0(xi)).map(|z| z * -0.5)
        }),
    };
    let q_eff = match coupling {
        Coupling::Independent => q,
        Coupling::U0EqualsMinusHalfCurlW0 => 1.0,
    };
    ContinuumProfile::new(u0, Arc::new(w0), q_eff, sigma)
}

/// Seeded random torus state shaped by the spec's envelope and truncated to
/// `n_cut` (default `⌊n/3⌋`).
pub fn make_torus_field(grid: &GridSpec, spec: &DataSpec, n_cut: Option<usize>) -> Result<StateSpectral> {
    spec.validate()?;
    let g = *grid;
    let n_cut = n_cut.unwrap_or(g.n() / 3);
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut draw = || C::new(rng.random_range(-1.0..=1.0), rng.random_range(-1.0..=1.0));
    let mut u = SpectralField::zeros(g);
    let mut w = SpectralField::zeros(g);
    for idx in 0..g.len() {
        let a = [draw(), draw(), draw()];
        let b = [draw(), draw(), draw()];
        u.set(idx, a);
        w.set(idx, b);
    }
    let inv = 0.5 / (spec.sigma * spec.sigma);
    let q = spec.q;
    let envelope = |idx: usize, v: [C; 3], amp: f64| {
        let r2 = norm_sq3(g.wavenumber(idx));
        if r2 == 0.0 {
            return [C::new(0.0, 0.0); 3];
        }
        let m = amp * r2.powf(0.5 * q) * (-r2 * inv).exp();
        v.map(|z| z * m)
    };
    let w = w.hermitian_symmetrize().map_modes(|i, v| envelope(i, v, spec.w_amplitude));
    let u = match spec.coupling {
        Coupling::Independent => {
            let u = u.hermitian_symmetrize().map_modes(|i, v| envelope(i, v, spec.amplitude));
            leray_project(&u)
        }
        Coupling::U0EqualsMinusHalfCurlW0 => {
            w.map_modes(|i, v| i_cross(g.wavenumber(i), v).map(|z| z * -0.5))
        }
    };
    StateSpectral::new(truncate(&u, n_cut), truncate(&w, n_cut))
}
