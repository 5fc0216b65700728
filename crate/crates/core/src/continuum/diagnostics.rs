use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64 as C;
use serde::{Deserialize, Serialize};

use super::fit::{DecayReport, DEFAULT_WINDOW};
use super::ledger::ConstantsLedger;
use super::profile::{abs_sq, state_from_data, ContinuumProfile};
use super::quadrature::{composite_gauss, integrate, integrate_pointwise, QuadratureSpec};
use crate::error::{invalid, Result};
use crate::linear::propagator::heat_profile_mode;
use crate::linear::symbol::components_unchecked;
use crate::linear::MaterialParams;

type Sphere<'a> = &'a [([f64; 3], f64)];

/// `‖f‖_{L²(ℝ³)} = ((2π)^{-3} ∫ |f̂|² dξ)^{1/2}` with refinement check.
pub fn l2_norm_continuum<const K: usize, F>(field_hat: F, quad: &QuadratureSpec) -> Result<f64>
where
    F: Fn([f64; 3]) -> [C; K] + Sync + Send,
{
    let [s] = integrate_pointwise(quad, "l2 norm", |xi| {
        [field_hat(xi).iter().map(|z| z.norm_sqr()).sum::<f64>()]
    })?;
    Ok(s.sqrt())
}

fn check_times(times: &[f64]) -> Result<()> {
    if times.is_empty() {
        return Err(invalid("empty time grid"));
    }
    if let Some(t) = times.iter().find(|t| !(t.is_finite() && **t >= 1.0)) {
        return Err(invalid(format!("decay times must be >= 1, got {t}")));
    }
    if times.windows(2).any(|w| w[1] <= w[0]) {
        return Err(invalid("decay times must be strictly increasing"));
    }
    Ok(())
}

/// Default window clipped to the sampled range.
fn fit_window(times: &[f64]) -> (f64, f64) {
    let (first, last) = (times[0], times[times.len() - 1]);
    let w = (DEFAULT_WINDOW.0.max(first), DEFAULT_WINDOW.1.min(last));
    let inside = times.iter().filter(|t| **t >= w.0 && **t <= w.1).count();
    if w.0 < w.1 && inside >= 3 {
        w
    } else {
        (first, last)
    }
}

/// Names of the curves returned by [`decay_curves`].
pub const DECAY_CURVES: [&str; 6] = ["uL", "wL", "hL", "grad_uL", "EL", "F"];

/// Squared whole-space norms of the linear flow at each time:
/// `‖u_L‖²`, `‖w_L‖²`, `‖h_L‖²`, `‖∇u_L‖² = ‖Ω_L‖²`, `‖ℰ_L‖²` and the
/// enstrophy functional `F = ‖ℰ_L‖² + a‖Ω_L‖²`, each fitted over
/// `[10², 10⁴]` (clipped to the sampled range).
pub fn decay_curves(
    p: &MaterialParams,
    prof: &ContinuumProfile,
    times: &[f64],
    quad: &QuadratureSpec,
) -> Result<BTreeMap<String, DecayReport>> {
    p.validate()?;
    check_times(times)?;
    let a = ConstantsLedger::new(p)?.a;
    let mut series = vec![Vec::with_capacity(times.len()); DECAY_CURVES.len()];
    for &t in times {
        let shell = |r: f64, sphere: Sphere| {
            let c = components_unchecked(p, r * r, t);
            let mut acc = [0.0; 5];
            for (d, w) in sphere {
                let xi = [r * d[0], r * d[1], r * d[2]];
                let s = state_from_data(xi, &c, prof.u0_hat(xi), prof.w0_hat(xi));
                acc[0] += w * abs_sq(&s.u);
                acc[1] += w * abs_sq(&s.w);
                acc[2] += w * abs_sq(&s.h);
                acc[3] += w * abs_sq(&s.omega);
                acc[4] += w * abs_sq(&s.e);
            }
            acc
        };
        let v = integrate(quad, &format!("linear norms at t = {t}"), &shell)?;
        for k in 0..5 {
            series[k].push(v[k]);
        }
        series[5].push(v[4] + a * v[3]);
    }
    let window = fit_window(times);
    let mut out = BTreeMap::new();
    for (name, values) in DECAY_CURVES.iter().zip(series) {
        out.insert(
            name.to_string(),
            DecayReport::fit(name, times.to_vec(), values, window)?,
        );
    }
    Ok(out)
}

/// `‖u_L − u_prof‖` and `‖w_L − w_prof‖` (norms, not squared) against the
/// heat-kernel profiles, fitted over `[10², 10⁴]` clipped to the samples.
pub fn profile_error_curves(
    p: &MaterialParams,
    prof: &ContinuumProfile,
    times: &[f64],
    quad: &QuadratureSpec,
) -> Result<(DecayReport, DecayReport)> {
    p.validate()?;
    check_times(times)?;
    let mut eu = Vec::with_capacity(times.len());
    let mut ew = Vec::with_capacity(times.len());
    for &t in times {
        let shell = |r: f64, sphere: Sphere| {
            let c = components_unchecked(p, r * r, t);
            let mut acc = [0.0; 2];
            for (d, w) in sphere {
                let xi = [r * d[0], r * d[1], r * d[2]];
                let (u0, w0) = (prof.u0_hat(xi), prof.w0_hat(xi));
                let s = state_from_data(xi, &c, u0, w0);
                let (pu, pw) = heat_profile_mode(p, xi, t, u0, w0);
                let du = [0, 1, 2].map(|k| s.u[k] - pu[k]);
                let dw = [0, 1, 2].map(|k| s.w[k] - pw[k]);
                acc[0] += w * abs_sq(&du);
                acc[1] += w * abs_sq(&dw);
            }
            acc
        };
        let [su, sw] = integrate(quad, &format!("profile errors at t = {t}"), &shell)?;
        eu.push(su.sqrt());
        ew.push(sw.sqrt());
    }
    let window = fit_window(times);
    Ok((
        DecayReport::fit("u_err", times.to_vec(), eu, window)?,
        DecayReport::fit("w_err", times.to_vec(), ew, window)?,
    ))
}

/// Terms of the enstrophy balance over `[t1, t2]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnstrophyBalance {
    pub t1: f64,
    pub t2: f64,
    pub f_t1: f64,
    pub f_t2: f64,
    /// `∫_{t1}^{t2} [4χ‖ℰ‖² + (γ+χ)‖∇ℰ − (μ/2χ)∇Ω‖² + (μγ/4χ²)(μ+χ)‖∇Ω‖²] dt`.
    pub dissipation: f64,
    /// `F(t2) − F(t1) + 2·dissipation`.
    pub residual: f64,
}

impl EnstrophyBalance {
    /// `|residual| / F(t1)`, or the absolute residual when `F(t1) = 0`.
    pub fn relative(&self) -> f64 {
        if self.f_t1 > 0.0 {
            self.residual.abs() / self.f_t1
        } else {
            self.residual.abs()
        }
    }
}

/// Panels and nodes of the composite Gauss rule in time.
const TIME_PANELS: usize = 8;
const TIME_NODES: usize = 8;

/// Residual of the enstrophy identity for the linear flow on `[t1, t2]`.
/// Gradients act spectrally as `|ξ|`; the time integral uses a composite
/// Gauss–Legendre rule with 64 nodes.
pub fn enstrophy_identity_residual(
    p: &MaterialParams,
    prof: &ContinuumProfile,
    t1: f64,
    t2: f64,
    quad: &QuadratureSpec,
) -> Result<EnstrophyBalance> {
    p.validate()?;
    if !(t1 >= 0.0 && t1.is_finite() && t2 >= t1 && t2.is_finite()) {
        return Err(invalid(format!("need 0 <= t1 <= t2, got t1 = {t1}, t2 = {t2}")));
    }
    let a = ConstantsLedger::new(p)?.a;
    let (mu, chi, gamma) = (p.mu, p.chi, p.gamma);
    let k_mix = mu / (2.0 * chi);
    let k_omega = mu * gamma * (mu + chi) / (4.0 * chi * chi);
    let tnodes = if t2 > t1 {
        composite_gauss(t1, t2, TIME_PANELS, TIME_NODES)
    } else {
        Vec::new()
    };

    let shell = |r: f64, sphere: Sphere| {
        let rr = r * r;
        let data: Vec<([f64; 3], f64, [C; 3], [C; 3])> = sphere
            .iter()
            .map(|(d, w)| {
                let xi = [r * d[0], r * d[1], r * d[2]];
                (xi, *w, prof.u0_hat(xi), prof.w0_hat(xi))
            })
            .collect();
        let functional = |t: f64| {
            let c = components_unchecked(p, rr, t);
            data.iter()
                .map(|(xi, w, u0, w0)| {
                    let s = state_from_data(*xi, &c, *u0, *w0);
                    w * (abs_sq(&s.e) + a * abs_sq(&s.omega))
                })
                .sum::<f64>()
        };
        let mut diss = 0.0;
        for &(t, wt) in &tnodes {
            let c = components_unchecked(p, rr, t);
            let mut shell_sum = 0.0;
            for (xi, w, u0, w0) in &data {
                let s = state_from_data(*xi, &c, *u0, *w0);
                let mix = [0, 1, 2].map(|k| s.e[k] - s.omega[k] * k_mix);
                let density = 4.0 * chi * abs_sq(&s.e)
                    + (gamma + chi) * rr * abs_sq(&mix)
                    + k_omega * rr * abs_sq(&s.omega);
                shell_sum += w * density;
            }
            diss += wt * shell_sum;
        }
        [functional(t1), functional(t2), diss]
    };
    let [f1, f2, diss] = integrate(quad, "enstrophy balance", &shell)?;
    let residual = if t2 > t1 { f2 - f1 + 2.0 * diss } else { 0.0 };
    Ok(EnstrophyBalance {
        t1,
        t2,
        f_t1: f1,
        f_t2: f2,
        dissipation: diss,
        residual,
    })
}

/// Low-frequency mass of the linear state at the splitting radius.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SplittingDiagnostics {
    pub t: f64,
    pub g: f64,
    /// `∫_{|ξ|≤g(t)} |ẑ_L|² dξ`, without the `(2π)^{-3}` factor.
    pub i_z: f64,
    /// `I_z / ∫ |ẑ_L|² dξ`.
    pub low_fraction: f64,
}

/// Splitting radius `g(t)` and low-frequency mass `I_z(t)` for `t ≥ t0`.
pub fn fourier_splitting_diagnostics(
    p: &MaterialParams,
    ledger: &ConstantsLedger,
    prof: &ContinuumProfile,
    t: f64,
    quad: &QuadratureSpec,
) -> Result<SplittingDiagnostics> {
    p.validate()?;
    if !(t.is_finite() && t >= ledger.t0) {
        return Err(invalid(format!(
            "splitting diagnostics need t >= t0 = {}, got {t}",
            ledger.t0
        )));
    }
    let g = ledger.g(t);
    let shell = |r: f64, sphere: Sphere| {
        let c = components_unchecked(p, r * r, t);
        let mut acc = 0.0;
        for (d, w) in sphere {
            let xi = [r * d[0], r * d[1], r * d[2]];
            let s = state_from_data(xi, &c, prof.u0_hat(xi), prof.w0_hat(xi));
            acc += w * (abs_sq(&s.u) + abs_sq(&s.w));
        }
        [acc]
    };
    let vol = (2.0 * PI).powi(3);
    let [total] = integrate(quad, "state norm", &shell)?;
    let i_z = if g > quad.r_min {
        let low = quad.with_r_max(g.min(quad.r_max));
        integrate(&low, "low-frequency mass", &shell)?[0] * vol
    } else {
        0.0
    };
    let total = total * vol;
    Ok(SplittingDiagnostics {
        t,
        g,
        i_z,
        low_fraction: if total > 0.0 { i_z / total } else { 0.0 },
    })
}
