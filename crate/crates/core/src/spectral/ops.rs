use num_complex::Complex64;

use super::field::{SpectralField, SpectralScalar};
use super::grid::GridSpec;
use crate::error::{invalid, Result};
use crate::par;

type C = Complex64;

const ZERO: C = C::new(0.0, 0.0);

#[inline]
pub fn dot(xi: [f64; 3], v: [C; 3]) -> C {
    v[0] * xi[0] + v[1] * xi[1] + v[2] * xi[2]
}

/// `ξ × v` for real `ξ` and complex `v`.
#[inline]
pub fn cross(xi: [f64; 3], v: [C; 3]) -> [C; 3] {
    [
        v[2] * xi[1] - v[1] * xi[2],
        v[0] * xi[2] - v[2] * xi[0],
        v[1] * xi[0] - v[0] * xi[1],
    ]
}

#[inline]
pub(crate) fn i_cross(xi: [f64; 3], v: [C; 3]) -> [C; 3] {
    cross(xi, v).map(|c| C::new(-c.im, c.re))
}

#[inline]
pub(crate) fn norm_sq3(xi: [f64; 3]) -> f64 {
    xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2]
}

/// Per-mode Leray projection `v ↦ v − ξ(ξ·v)/|ξ|²`; identity at `ξ = 0`.
#[inline]
pub(crate) fn leray_mode(xi: [f64; 3], v: [C; 3]) -> [C; 3] {
    let r = norm_sq3(xi);
    if r == 0.0 {
        return v;
    }
    let s = dot(xi, v) / r;
    [v[0] - s * xi[0], v[1] - s * xi[1], v[2] - s * xi[2]]
}

/// `v̂ ↦ iξ × v̂`.
pub fn curl_hat(f: &SpectralField) -> SpectralField {
    let g = *f.grid();
    f.map_modes(|idx, v| i_cross(g.wavenumber(idx), v))
}

/// `v̂ ↦ iξ · v̂`.
pub fn div_hat(f: &SpectralField) -> SpectralScalar {
    let g = *f.grid();
    let data = par::map_indexed(g.len(), |idx| {
        let d = dot(g.wavenumber(idx), f.at(idx));
        C::new(-d.im, d.re)
    });
    SpectralScalar::new(g, data).expect("length matches grid")
}

/// Orthogonal projection onto divergence-free fields. The mean mode is left
/// untouched.
pub fn leray_project(f: &SpectralField) -> SpectralField {
    let g = *f.grid();
    f.map_modes(|idx, v| leray_mode(g.wavenumber(idx), v))
}

/// Radius `n_cut · 2π/L` of the sharp spectral ball.
pub fn truncation_radius(grid: &GridSpec, n_cut: usize) -> f64 {
    n_cut as f64 * grid.k0()
}

pub(crate) fn inside_ball(grid: &GridSpec, idx: usize, n_cut: usize) -> bool {
    let m = grid.mode(idx);
    let r2 = m[0] * m[0] + m[1] * m[1] + m[2] * m[2];
    r2 <= (n_cut * n_cut) as i64
}

/// Frequency truncation: zeroes every mode with `|ξ| > n_cut · 2π/L`.
pub fn truncate(f: &SpectralField, n_cut: usize) -> SpectralField {
    let g = *f.grid();
    f.map_modes(|idx, v| if inside_ball(&g, idx, n_cut) { v } else { [ZERO; 3] })
}

/// Gaussian mollifier multiplier `exp(−ε²|ξ|²/2)`.
#[inline]
pub fn mollifier_multiplier(epsilon: f64, xi_sq: f64) -> f64 {
    (-0.5 * epsilon * epsilon * xi_sq).exp()
}

/// `J_ε f` realised as the Fourier multiplier [`mollifier_multiplier`].
pub fn mollify(f: &SpectralField, epsilon: f64) -> Result<SpectralField> {
    if !(epsilon >= 0.0 && epsilon.is_finite()) {
        return Err(invalid(format!("mollifier scale must be >= 0, got {epsilon}")));
    }
    if epsilon == 0.0 {
        return Ok(f.clone());
    }
    let g = *f.grid();
    Ok(f.map_modes(|idx, v| {
        let m = mollifier_multiplier(epsilon, norm_sq3(g.wavenumber(idx)));
        v.map(|x| x * m)
    }))
}

/// Physical-space `L²(torus)` norm.
pub fn l2_norm(f: &SpectralField) -> f64 {
    f.norm_sq().sqrt()
}

/// `‖∇f‖² = L³ Σ |ξ|² |f̂|²`.
pub fn grad_norm_sq(f: &SpectralField) -> f64 {
    let g = *f.grid();
    f.weighted_norm_sq(|idx| norm_sq3(g.wavenumber(idx)))
}
