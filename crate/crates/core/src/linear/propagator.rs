use std::io::Write;

use num_complex::Complex64;

use super::params::MaterialParams;
use super::symbol::{components_unchecked, SymbolComponents};
use crate::error::{invalid, Result};
use crate::spectral::ops::{dot, i_cross, leray_mode, norm_sq3};
use crate::spectral::{SpectralField, StateSpectral};

type C = Complex64;

/// The 6×6 symbol `K(ξ,t)` acting on stacked `(û, ŵ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PropagatorMatrix(pub [[C; 6]; 6]);

impl PropagatorMatrix {
    pub fn identity() -> Self {
        let mut m = [[C::new(0.0, 0.0); 6]; 6];
        for (i, row) in m.iter_mut().enumerate() {
            row[i] = C::new(1.0, 0.0);
        }
        Self(m)
    }

    /// Assembles `K` from its scalar components at wavevector `xi`.
    pub fn from_components(xi: [f64; 3], c: &SymbolComponents) -> Self {
        let mut m = [[C::new(0.0, 0.0); 6]; 6];
        let r = norm_sq3(xi);
        // iξ× as a matrix
        let cross = [
            [0.0, -xi[2], xi[1]],
            [xi[2], 0.0, -xi[0]],
            [-xi[1], xi[0], 0.0],
        ];
        for i in 0..3 {
            m[i][i] = C::new(c.e11, 0.0);
            for j in 0..3 {
                let off = C::new(0.0, c.e21 * cross[i][j]);
                m[i][3 + j] = off;
                m[3 + i][j] = off;
                let longitudinal = if r > 0.0 { xi[i] * xi[j] / r } else { 0.0 };
                let delta = if i == j { 1.0 } else { 0.0 };
                m[3 + i][3 + j] =
                    C::new(c.e22 * (delta - longitudinal) + c.div_factor * longitudinal, 0.0);
            }
        }
        Self(m)
    }

    pub fn apply(&self, v: [C; 6]) -> [C; 6] {
        let mut out = [C::new(0.0, 0.0); 6];
        for (o, row) in out.iter_mut().zip(&self.0) {
            *o = row.iter().zip(&v).map(|(a, b)| a * b).sum();
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut m = [[C::new(0.0, 0.0); 6]; 6];
        for i in 0..6 {
            for j in 0..6 {
                m[i][j] = (0..6).map(|k| self.0[i][k] * other.0[k][j]).sum();
            }
        }
        Self(m)
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let mut d: f64 = 0.0;
        for i in 0..6 {
            for j in 0..6 {
                d = d.max((self.0[i][j] - other.0[i][j]).norm());
            }
        }
        d
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.0
            .iter()
            .flat_map(|r| r.iter())
            .map(|z| z.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// The `3×3` lower-right block.
    pub fn w_block(&self) -> [[C; 3]; 3] {
        let mut b = [[C::new(0.0, 0.0); 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                b[i][j] = self.0[3 + i][3 + j];
            }
        }
        b
    }
}

/// `K(ξ,t)` for the linear micropolar system.
pub fn propagator_matrix(p: &MaterialParams, xi: [f64; 3], t: f64) -> Result<PropagatorMatrix> {
    if !(t >= 0.0 && t.is_finite()) {
        return Err(invalid(format!("t must be >= 0, got {t}")));
    }
    if xi.iter().any(|x| !x.is_finite()) {
        return Err(invalid("wavevector must be finite"));
    }
    let c = components_unchecked(p, norm_sq3(xi), t);
    Ok(PropagatorMatrix::from_components(xi, &c))
}

/// Applies the symbol at one mode: `(û, ŵ) ↦ K(ξ,t)(û, ŵ)`.
#[inline]
pub(crate) fn apply_mode(
    xi: [f64; 3],
    c: &SymbolComponents,
    u: [C; 3],
    w: [C; 3],
) -> ([C; 3], [C; 3]) {
    let r = norm_sq3(xi);
    let curl_w = i_cross(xi, w);
    let curl_u = i_cross(xi, u);
    let u_new = [0, 1, 2].map(|k| u[k] * c.e11 + curl_w[k] * c.e21);
    let long = if r > 0.0 {
        dot(xi, w) * ((c.div_factor - c.e22) / r)
    } else {
        C::new(0.0, 0.0)
    };
    let w_new = [0, 1, 2].map(|k| curl_u[k] * c.e21 + w[k] * c.e22 + long * xi[k]);
    (u_new, w_new)
}

/// `ẑ_L(ξ,t) = K(ξ,t) ẑ₀(ξ)` on every torus mode.
pub fn apply_linear(p: &MaterialParams, z0: &StateSpectral, t: f64) -> Result<StateSpectral> {
    if !(t >= 0.0 && t.is_finite()) {
        return Err(invalid(format!("t must be >= 0, got {t}")));
    }
    let g = *z0.grid();
    let modes = crate::par::map_indexed(g.len(), |idx| {
        let xi = g.wavenumber(idx);
        let c = components_unchecked(p, norm_sq3(xi), t);
        apply_mode(xi, &c, z0.u.at(idx), z0.w.at(idx))
    });
    let (u, w): (Vec<_>, Vec<_>) = modes.into_iter().unzip();
    Ok(StateSpectral {
        u: SpectralField::from_modes(g, &u),
        w: SpectralField::from_modes(g, &w),
    })
}

/// Heat-kernel profiles of the linear flow:
/// `û_prof = e^{−μt|ξ|²}(û₀ + ½ iξ×ŵ₀)` and
/// `ŵ_prof = e^{−μt|ξ|²}(½ iξ×û₀ + ¼|ξ|² ℙŵ₀)`.
pub fn heat_profiles(
    p: &MaterialParams,
    z0: &StateSpectral,
    t: f64,
) -> Result<(SpectralField, SpectralField)> {
    if !(t >= 0.0 && t.is_finite()) {
        return Err(invalid(format!("t must be >= 0, got {t}")));
    }
    let g = *z0.grid();
    let modes = crate::par::map_indexed(g.len(), |idx| {
        let xi = g.wavenumber(idx);
        heat_profile_mode(p, xi, t, z0.u.at(idx), z0.w.at(idx))
    });
    let (u, w): (Vec<_>, Vec<_>) = modes.into_iter().unzip();
    Ok((SpectralField::from_modes(g, &u), SpectralField::from_modes(g, &w)))
}

#[inline]
pub(crate) fn heat_profile_mode(
    p: &MaterialParams,
    xi: [f64; 3],
    t: f64,
    u0: [C; 3],
    w0: [C; 3],
) -> ([C; 3], [C; 3]) {
    let r = norm_sq3(xi);
    let heat = (-p.mu * t * r).exp();
    let cw = i_cross(xi, w0);
    let cu = i_cross(xi, u0);
    let h0 = leray_mode(xi, w0);
    (
        [0, 1, 2].map(|k| (u0[k] + cw[k] * 0.5) * heat),
        [0, 1, 2].map(|k| (cu[k] * 0.5 + h0[k] * (0.25 * r)) * heat),
    )
}

/// Distances of the symbol entries from their heat-kernel asymptotes:
/// `|E₁₁ − e^{−μtR}|`, `|ξ|·|E₂₁ − ½e^{−μtR}|`, `|E₂₂ − ¼R e^{−μtR}|`.
/// Only meaningful for `t ≥ 1`.
pub fn prop_e_residuals(p: &MaterialParams, xi_sq: f64, t: f64) -> Result<[f64; 3]> {
    if !(t >= 1.0 && t.is_finite()) {
        return Err(invalid(format!("residuals are defined for t >= 1, got {t}")));
    }
    if !(xi_sq >= 0.0 && xi_sq.is_finite()) {
        return Err(invalid(format!("|ξ|² must be >= 0, got {xi_sq}")));
    }
    let c = components_unchecked(p, xi_sq, t);
    let heat = (-p.mu * t * xi_sq).exp();
    Ok([
        (c.e11 - heat).abs(),
        xi_sq.sqrt() * (c.e21 - 0.5 * heat).abs(),
        (c.e22 - 0.25 * xi_sq * heat).abs(),
    ])
}

/// Writes `xi_sq,t,E11,E21,E22,divFactor` rows for every pair of inputs.
pub fn write_symbol_table<W: Write>(
    mut out: W,
    p: &MaterialParams,
    xi_sq: &[f64],
    times: &[f64],
) -> Result<()> {
    writeln!(out, "xi_sq,t,E11,E21,E22,divFactor")?;
    for &r in xi_sq {
        for &t in times {
            let c = super::e_components(p, r, t)?;
            writeln!(
                out,
                "{:e},{:e},{:e},{:e},{:e},{:e}",
                r, t, c.e11, c.e21, c.e22, c.div_factor
            )?;
        }
    }
    Ok(())
}
