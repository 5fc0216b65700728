use std::io::Write;

use serde::{Deserialize, Serialize};

use super::SolverConfig;
use crate::continuum::DecayReport;
use crate::error::{invalid, Result};
use crate::linear::{apply_linear, MaterialParams};
use crate::par;
use crate::spectral::ops::{dot, i_cross, norm_sq3};
use crate::spectral::StateSpectral;

/// Energies and dissipation integrands at one recorded time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Record {
    pub t: f64,
    /// `‖u‖²`
    pub e_u: f64,
    /// `‖w‖²`
    pub e_w: f64,
    /// `‖∇u‖²`
    pub d_grad_u: f64,
    /// `‖∇w‖²`
    pub d_grad_w: f64,
    /// `‖div w‖²`
    pub d_div_w: f64,
    /// `‖curl u − 2w‖²`
    pub d_curl2w: f64,
}

impl Record {
    pub fn of(z: &StateSpectral, t: f64) -> Self {
        let g = *z.grid();
        let s = par::sum_indexed_n(g.len(), |i| {
            let xi = g.wavenumber(i);
            let r = norm_sq3(xi);
            let (u, w) = (z.u.at(i), z.w.at(i));
            let nu: f64 = u.iter().map(|c| c.norm_sqr()).sum();
            let nw: f64 = w.iter().map(|c| c.norm_sqr()).sum();
            let cu = i_cross(xi, u);
            let c2w: f64 = (0..3).map(|k| (cu[k] - w[k] * 2.0).norm_sqr()).sum();
            [nu, nw, r * nu, r * nw, dot(xi, w).norm_sqr(), c2w]
        });
        let v = g.volume();
        Self {
            t,
            e_u: s[0] * v,
            e_w: s[1] * v,
            d_grad_u: s[2] * v,
            d_grad_w: s[3] * v,
            d_div_w: s[4] * v,
            d_curl2w: s[5] * v,
        }
    }

    pub fn energy(&self) -> f64 {
        self.e_u + self.e_w
    }

    /// `μ‖∇u‖² + γ‖∇w‖² + κ‖div w‖² + χ‖curl u − 2w‖²`; terms with a zero
    /// coefficient are skipped.
    pub fn dissipation(&self, p: &MaterialParams) -> f64 {
        let mut d = p.mu * self.d_grad_u + p.chi * self.d_curl2w;
        if p.gamma != 0.0 {
            d += p.gamma * self.d_grad_w;
        }
        if p.kappa != 0.0 {
            d += p.kappa * self.d_div_w;
        }
        d
    }
}

/// Output of a solver run.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub config: SolverConfig,
    pub initial: StateSpectral,
    pub records: Vec<Record>,
    /// `(t, state)` pairs, present when snapshots were requested.
    pub snapshots: Vec<(f64, StateSpectral)>,
    pub final_state: StateSpectral,
}

impl Trajectory {
    pub(crate) fn new(config: SolverConfig, initial: StateSpectral) -> Self {
        Self {
            config,
            final_state: initial.clone(),
            initial,
            records: Vec::new(),
            snapshots: Vec::new(),
        }
    }

    pub(crate) fn push(&mut self, r: Record) {
        self.records.push(r);
    }

    pub fn times(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.t).collect()
    }

    pub fn energies(&self) -> Vec<f64> {
        self.records.iter().map(Record::energy).collect()
    }

    fn index_of(&self, t: f64) -> Option<usize> {
        let tol = 1e-9 * t.abs().max(self.config.dt);
        self.records.iter().position(|r| (r.t - t).abs() <= tol)
    }
}

/// Composite Simpson on uniformly spaced samples, closing an odd panel
/// count with the 3/8 rule.
fn simpson(f: &[f64], h: f64) -> f64 {
    let n = f.len().saturating_sub(1);
    match n {
        0 => 0.0,
        1 => 0.5 * h * (f[0] + f[1]),
        2 => h / 3.0 * (f[0] + 4.0 * f[1] + f[2]),
        _ => {
            let even = if n.is_multiple_of(2) { n } else { n - 3 };
            let mut s = 0.0;
            for k in (0..even).step_by(2) {
                s += f[k] + 4.0 * f[k + 1] + f[k + 2];
            }
            let mut total = h / 3.0 * s;
            if even < n {
                let k = even;
                total += 3.0 * h / 8.0 * (f[k] + 3.0 * f[k + 1] + 3.0 * f[k + 2] + f[k + 3]);
            }
            total
        }
    }
}

/// Signed residual of the energy equality between recorded times `s ≤ t`:
///
/// `E(t) − E(s) + 2∫ₛᵗ [μ‖∇u‖² + γ‖∇w‖² + κ‖div w‖² + χ‖curl u − 2w‖²]`
///
/// with `E = ‖u‖² + ‖w‖²` and the time integral by composite Simpson.
pub fn energy_balance_residual(traj: &Trajectory, p: &MaterialParams, s: f64, t: f64) -> Result<f64> {
    let i = traj
        .index_of(s)
        .ok_or_else(|| invalid(format!("s = {s} is not a recorded time")))?;
    let j = traj
        .index_of(t)
        .ok_or_else(|| invalid(format!("t = {t} is not a recorded time")))?;
    if i > j {
        return Err(invalid(format!("need s <= t, got s = {s}, t = {t}")));
    }
    if i == j {
        return Ok(0.0);
    }
    let recs = &traj.records[i..=j];
    let h = traj.config.dt * traj.config.record_every as f64;
    let d: Vec<f64> = recs.iter().map(|r| r.dissipation(p)).collect();
    Ok(recs[recs.len() - 1].energy() - recs[0].energy() + 2.0 * simpson(&d, h))
}

/// Column header of [`write_trajectory_csv`].
pub const TRAJECTORY_HEADER: &str = "t,E_u,E_w,D_grad_u,D_grad_w,D_div_w,D_curl2w";

pub fn write_trajectory_csv<W: Write>(mut out: W, traj: &Trajectory) -> Result<()> {
    writeln!(out, "{TRAJECTORY_HEADER}")?;
    for r in &traj.records {
        writeln!(
            out,
            "{:e},{:e},{:e},{:e},{:e},{:e},{:e}",
            r.t, r.e_u, r.e_w, r.d_grad_u, r.d_grad_w, r.d_div_w, r.d_curl2w
        )?;
    }
    Ok(())
}

/// `‖z_ε(t) − z_L(t)‖` at every snapshot, with `z_L` the linear flow of the
/// same initial state. The slope is fitted over the positive samples and is
/// `NaN` when fewer than three exist.
pub fn difference_from_linear(traj: &Trajectory, p: &MaterialParams) -> Result<DecayReport> {
    if traj.snapshots.is_empty() {
        return Err(invalid("trajectory has no snapshots"));
    }
    let mut times = Vec::with_capacity(traj.snapshots.len());
    let mut values = Vec::with_capacity(traj.snapshots.len());
    for (t, z) in &traj.snapshots {
        let lin = apply_linear(p, &traj.initial, *t)?;
        times.push(*t);
        values.push(z.sub(&lin)?.energy().sqrt());
    }
    let positive: Vec<f64> = times
        .iter()
        .zip(&values)
        .filter(|(t, v)| **t > 0.0 && **v > 0.0)
        .map(|(t, _)| *t)
        .collect();
    if positive.len() >= 3 {
        let window = (positive[0], positive[positive.len() - 1]);
        if let Ok(r) = DecayReport::fit("gap", times.clone(), values.clone(), window) {
            return Ok(r);
        }
    }
    let window = (times[0], times[times.len() - 1]);
    Ok(DecayReport {
        name: "gap".into(),
        times,
        values,
        fitted_slope: f64::NAN,
        slope_stderr: f64::NAN,
        window,
    })
}
