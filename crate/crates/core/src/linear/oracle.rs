//! Brute-force reference for `K(ξ,t)`: the exponential of the 6×6 Fourier
//! generator of the linear system, computed by Padé scaling-and-squaring
//! (nalgebra) with no use of the closed-form symbol.
//!
//! The generator acts on all of `ℂ⁶`, while the closed form is only defined on
//! admissible states (`ξ·û = 0`), so comparisons are made after composing both
//! sides with `Π = blockdiag(ℙ_ξ, I₃)`.

use nalgebra::SMatrix;
use num_complex::Complex64;
use rand::Rng;
use serde::Serialize;

use super::params::MaterialParams;
use super::propagator::{propagator_matrix, PropagatorMatrix};
use crate::error::{invalid, Result};
use crate::spectral::ops::norm_sq3;

type C = Complex64;
type Mat6 = SMatrix<C, 6, 6>;

/// The Fourier-side generator `G(ξ)` with `∂ₜẑ = G ẑ`:
/// `∂ₜû = −(μ+χ)|ξ|²û + 2χ iξ×ŵ`,
/// `∂ₜŵ = −γ|ξ|²ŵ − κξ(ξ·ŵ) + 2χ iξ×û − 4χŵ`.
pub fn generator(p: &MaterialParams, xi: [f64; 3]) -> [[C; 6]; 6] {
    let r = norm_sq3(xi);
    let cross = [
        [0.0, -xi[2], xi[1]],
        [xi[2], 0.0, -xi[0]],
        [-xi[1], xi[0], 0.0],
    ];
    let mut g = [[C::new(0.0, 0.0); 6]; 6];
    for i in 0..3 {
        g[i][i] = C::new(-(p.mu + p.chi) * r, 0.0);
        for j in 0..3 {
            let c = C::new(0.0, 2.0 * p.chi * cross[i][j]);
            g[i][3 + j] = c;
            g[3 + i][j] = c;
            let diag = if i == j {
                -p.gamma * r - 4.0 * p.chi
            } else {
                0.0
            };
            g[3 + i][3 + j] = C::new(diag - p.kappa * xi[i] * xi[j], 0.0);
        }
    }
    g
}

/// `exp(t G(ξ))` by matrix exponentiation.
pub fn propagator_expm(p: &MaterialParams, xi: [f64; 3], t: f64) -> Result<PropagatorMatrix> {
    if !(t >= 0.0 && t.is_finite()) {
        return Err(invalid(format!("t must be >= 0, got {t}")));
    }
    let g = generator(p, xi);
    let m = Mat6::from_fn(|i, j| g[i][j] * t);
    let e = m.exp();
    let mut out = [[C::new(0.0, 0.0); 6]; 6];
    for (i, row) in out.iter_mut().enumerate() {
        for (j, x) in row.iter_mut().enumerate() {
            *x = e[(i, j)];
        }
    }
    Ok(PropagatorMatrix(out))
}

/// `Π = blockdiag(I₃ − ξξᵀ/|ξ|², I₃)`; identity at `ξ = 0`.
pub fn admissible_projector(xi: [f64; 3]) -> PropagatorMatrix {
    let r = norm_sq3(xi);
    let mut m = PropagatorMatrix::identity();
    if r > 0.0 {
        for i in 0..3 {
            for j in 0..3 {
                m.0[i][j] -= C::new(xi[i] * xi[j] / r, 0.0);
            }
        }
    }
    m
}

/// Entrywise comparison of the closed form against the oracle.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct OracleGap {
    /// `max |KΠ − K_oΠ|` over entries.
    pub gap: f64,
    /// Frobenius norm of `K_oΠ`.
    pub oracle_norm: f64,
    /// `gap / (1 + oracle_norm)`.
    pub scaled: f64,
}

pub fn oracle_gap(p: &MaterialParams, xi: [f64; 3], t: f64) -> Result<OracleGap> {
    let proj = admissible_projector(xi);
    let closed = propagator_matrix(p, xi, t)?.mul(&proj);
    let reference = propagator_expm(p, xi, t)?.mul(&proj);
    let gap = closed.max_abs_diff(&reference);
    let oracle_norm = reference.frobenius_norm();
    Ok(OracleGap {
        gap,
        oracle_norm,
        scaled: gap / (1.0 + oracle_norm),
    })
}

/// One randomized `(p, ξ, t)` test case.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct OracleCase {
    pub params: MaterialParams,
    pub xi: [f64; 3],
    pub t: f64,
}

fn log_uniform<R: Rng + ?Sized>(rng: &mut R, lo: f64, hi: f64) -> f64 {
    (rng.random_range(lo.ln()..hi.ln())).exp()
}

/// Draws `μ, χ ∈ [0.1, 10]`, `γ, κ ∈ {0} ∪ [0.1, 10]` (each zero with
/// probability ½), `|ξ|` log-uniform in `[1e-4, 1e3]` with a uniform direction
/// and `t` log-uniform in `[1e-3, 1e3]`.
pub fn random_case<R: Rng + ?Sized>(rng: &mut R) -> OracleCase {
    let mu = log_uniform(rng, 0.1, 10.0);
    let chi = log_uniform(rng, 0.1, 10.0);
    let gamma = if rng.random_bool(0.5) {
        0.0
    } else {
        log_uniform(rng, 0.1, 10.0)
    };
    let kappa = if rng.random_bool(0.5) {
        0.0
    } else {
        log_uniform(rng, 0.1, 10.0)
    };
    let norm = log_uniform(rng, 1e-4, 1e3);
    let z: f64 = rng.random_range(-1.0..1.0);
    let phi: f64 = rng.random_range(0.0..std::f64::consts::TAU);
    let s = (1.0 - z * z).sqrt();
    let xi = [norm * s * phi.cos(), norm * s * phi.sin(), norm * z];
    let t = log_uniform(rng, 1e-3, 1e3);
    OracleCase {
        params: MaterialParams {
            mu,
            chi,
            gamma,
            kappa,
        },
        xi,
        t,
    }
}
