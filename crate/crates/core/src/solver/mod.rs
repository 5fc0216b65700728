//! Torus Galerkin solver for the filtered mollified system
//!
//! ```text
//! ∂t u = (μ+χ)Δu + 2χ curl w − 𝔼ₙℙ((J_εℙu)·∇u)
//! ∂t w = γΔw + κ∇div w − 4χw + 2χ curl u − 𝔼ₙ((J_εℙu)·∇w)
//! ```
//!
//! on `[0, L)³`. The linear part is integrated exactly with the closed-form
//! propagator `K(ξ, dt)`; the advection terms use Heun's method in the
//! integrating-factor frame (IF-RK2):
//!
//! ```text
//! a   = N(zₙ)
//! z*  = K(zₙ + dt·a)
//! zₙ₊₁ = K(zₙ + dt/2·a) + dt/2·N(z*)
//! ```
//!
//! Products are formed pseudospectrally on the `n³` grid. With the default
//! radius `n_cut = ⌊n/3⌋` the quadratic terms are alias-free, so the discrete
//! advection conserves `‖u‖² + ‖w‖²` exactly. Nyquist modes are never
//! active.

mod energy;

use std::sync::Mutex;

use num_complex::Complex64 as C;
use serde::{Deserialize, Serialize};

pub use energy::{
    difference_from_linear, energy_balance_residual, write_trajectory_csv, Record, Trajectory,
    TRAJECTORY_HEADER,
};

use crate::error::{invalid, Error, Result};
use crate::linear::propagator::apply_mode;
use crate::linear::symbol::components_unchecked;
use crate::linear::{MaterialParams, SymbolComponents};
use crate::par;
use crate::spectral::ops::{dot, i_cross, inside_ball, leray_mode, mollifier_multiplier, norm_sq3};
use crate::spectral::{Fft3, GridSpec, SpectralField, StateSpectral};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub grid: GridSpec,
    /// Truncation radius in lattice units.
    pub n_cut: usize,
    /// Mollifier scale `ε`.
    pub epsilon: f64,
    pub dt: f64,
    pub t_end: f64,
    pub params: MaterialParams,
    /// Record energies every this many steps.
    pub record_every: usize,
    /// Keep full states every this many steps (`None`: no snapshots).
    pub snapshot_every: Option<usize>,
    /// `false` masks the advection terms.
    pub nonlinear: bool,
}

impl SolverConfig {
    /// Defaults: `n_cut = ⌊n/3⌋`, `ε = 0`, record every step, no snapshots.
    pub fn new(grid: GridSpec, params: MaterialParams, dt: f64, t_end: f64) -> Self {
        Self {
            grid,
            n_cut: grid.n() / 3,
            epsilon: 0.0,
            dt,
            t_end,
            params,
            record_every: 1,
            snapshot_every: None,
            nonlinear: true,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        if self.n_cut > self.grid.n() / 2 {
            return Err(invalid(format!(
                "n_cut must be <= n/2 = {}, got {}",
                self.grid.n() / 2,
                self.n_cut
            )));
        }
        if !(self.epsilon.is_finite() && self.epsilon >= 0.0) {
            return Err(invalid(format!("epsilon must be >= 0, got {}", self.epsilon)));
        }
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(invalid(format!("dt must be > 0, got {}", self.dt)));
        }
        if !(self.t_end.is_finite() && self.t_end > 0.0) {
            return Err(invalid(format!("t_end must be > 0, got {}", self.t_end)));
        }
        if self.record_every == 0 || self.snapshot_every == Some(0) {
            return Err(invalid("record_every and snapshot_every must be >= 1"));
        }
        let steps = self.steps();
        if ((steps as f64) * self.dt - self.t_end).abs() > 1e-9 * self.t_end || steps == 0 {
            return Err(invalid(format!(
                "t_end = {} is not a whole number of steps of dt = {}",
                self.t_end, self.dt
            )));
        }
        if !steps.is_multiple_of(self.record_every) {
            return Err(invalid(format!(
                "the step count {steps} must be a multiple of record_every = {}",
                self.record_every
            )));
        }
        Ok(())
    }

    /// Number of time steps to `t_end`.
    pub fn steps(&self) -> usize {
        (self.t_end / self.dt).round() as usize
    }
}

/// A configured solver with its per-mode tables.
///
/// Internally states are packed as `[û₁ û₂ û₃ ŵ₁ ŵ₂ ŵ₃]` over the active
/// modes only (`|ξ| ≤ n_cut·2π/L`, no Nyquist index).
pub struct Solver {
    cfg: SolverConfig,
    fft: Fft3,
    /// Storage indices of the active modes, ascending.
    active: Vec<usize>,
    /// `ξ` per active mode.
    xi: Vec<[f64; 3]>,
    /// `m̂(εξ)` per active mode.
    mollifier: Vec<f64>,
    /// `K(ξ, dt)` per active mode.
    k_dt: Vec<SymbolComponents>,
    /// Storage index of `−ξ` for every mode.
    conj: Vec<usize>,
    work: Mutex<Workspace>,
}

/// Grid-sized buffers reused across right-hand-side evaluations.
#[derive(Default)]
struct Workspace {
    inv: Vec<Vec<C>>,
    fwd: Vec<Vec<C>>,
    scratch: Vec<C>,
}

impl std::fmt::Debug for Solver {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Solver").field("cfg", &self.cfg).finish_non_exhaustive()
    }
}

const ZERO: C = C::new(0.0, 0.0);

type Packed = Vec<[C; 6]>;

/// Number of real fields synthesised per right-hand side:
/// `v = J_εℙu` (3), `∂ⱼuᵢ` (9), `∂ⱼwᵢ` (9).
const SOURCES: usize = 21;

impl Solver {
    pub fn new(cfg: SolverConfig) -> Result<Self> {
        cfg.validate()?;
        let g = cfg.grid;
        let active: Vec<usize> = (0..g.len())
            .filter(|&i| inside_ball(&g, i, cfg.n_cut) && !g.is_nyquist(i))
            .collect();
        let xi: Vec<[f64; 3]> = active.iter().map(|&i| g.wavenumber(i)).collect();
        let mollifier = xi
            .iter()
            .map(|x| mollifier_multiplier(cfg.epsilon, norm_sq3(*x)))
            .collect();
        let k_dt = par::map_indexed(xi.len(), |a| {
            components_unchecked(&cfg.params, norm_sq3(xi[a]), cfg.dt)
        });
        let conj = par::map_indexed(g.len(), |i| g.conjugate_index(i));
        Ok(Self {
            cfg,
            fft: Fft3::new(&g),
            active,
            xi,
            mollifier,
            k_dt,
            conj,
            work: Mutex::new(Workspace::default()),
        })
    }

    pub fn config(&self) -> &SolverConfig {
        &self.cfg
    }

    /// Number of active modes.
    pub fn active_modes(&self) -> usize {
        self.active.len()
    }

    /// True if `z` lives on the grid and vanishes outside the active modes.
    pub fn is_admissible(&self, z: &StateSpectral) -> bool {
        if z.grid() != &self.cfg.grid {
            return false;
        }
        let mut next = self.active.iter().peekable();
        (0..self.cfg.grid.len()).all(|i| {
            if next.peek() == Some(&&i) {
                next.next();
                true
            } else {
                z.u.at(i) == [ZERO; 3] && z.w.at(i) == [ZERO; 3]
            }
        })
    }

    fn pack(&self, z: &StateSpectral) -> Packed {
        par::map_indexed(self.active.len(), |a| {
            let i = self.active[a];
            let (u, w) = (z.u.at(i), z.w.at(i));
            [u[0], u[1], u[2], w[0], w[1], w[2]]
        })
    }

    fn unpack(&self, p: &[[C; 6]]) -> StateSpectral {
        let g = self.cfg.grid;
        let mut u = SpectralField::zeros(g);
        let mut w = SpectralField::zeros(g);
        for c in 0..3 {
            let (uc, wc) = (u.component_mut(c), w.component_mut(c));
            for (a, &i) in self.active.iter().enumerate() {
                uc[i] = p[a][c];
                wc[i] = p[a][c + 3];
            }
        }
        StateSpectral { u, w }
    }

    /// Advection terms only:
    /// `(−𝔼ₙℙ((J_εℙu)·∇u), −𝔼ₙ((J_εℙu)·∇w))`.
    ///
    /// Fails unless `z` is supported on the active modes.
    pub fn nonlinear_rhs(&self, z: &StateSpectral) -> Result<StateSpectral> {
        if z.grid() != &self.cfg.grid {
            return Err(Error::GridMismatch("state does not match the solver grid".into()));
        }
        if !self.is_admissible(z) {
            return Err(invalid("state is not supported on the active modes"));
        }
        if !self.cfg.nonlinear {
            return Ok(StateSpectral::zeros(self.cfg.grid));
        }
        Ok(self.unpack(&self.rhs(&self.pack(z))))
    }

    fn rhs(&self, z: &[[C; 6]]) -> Packed {
        let len = self.cfg.grid.len();
        let na = self.active.len();
        let v_hat: Vec<[C; 3]> = par::map_indexed(na, |a| {
            let m = self.mollifier[a];
            leray_mode(self.xi[a], [z[a][0], z[a][1], z[a][2]]).map(|c| c * m)
        });
        let source = |s: usize, a: usize| -> C {
            if s < 3 {
                return v_hat[a][s];
            }
            // s = 3 + 9·field + 3·component + direction
            let k = s - 3;
            let d = z[a][3 * (k / 9) + (k % 9) / 3] * self.xi[a][k % 3];
            C::new(-d.im, d.re)
        };

        let mut guard = self.work.lock().unwrap_or_else(|e| e.into_inner());
        let Workspace { inv, fwd, scratch } = &mut *guard;
        inv.resize_with(SOURCES.div_ceil(2), Vec::new);
        fwd.resize_with(3, Vec::new);

        // Two real fields per complex transform: a + i·b.
        for (p, buf) in inv.iter_mut().enumerate() {
            buf.clear();
            buf.resize(len, ZERO);
            for (a, &i) in self.active.iter().enumerate() {
                let lo = source(2 * p, a);
                let hi = if 2 * p + 1 < SOURCES { source(2 * p + 1, a) } else { ZERO };
                buf[i] = lo + C::new(-hi.im, hi.re);
            }
            self.fft.inverse_with(buf, scratch);
        }
        let inv = &*inv;
        let phys = |s: usize, x: usize| -> f64 {
            let z = inv[s / 2][x];
            if s.is_multiple_of(2) {
                z.re
            } else {
                z.im
            }
        };
        // Output k ∈ 0..6: (v·∇)uₖ for k < 3, (v·∇)wₖ₋₃ otherwise.
        let advect = |k: usize, x: usize| -> f64 {
            let base = 3 + 9 * (k / 3) + 3 * (k % 3);
            (0..3).map(|j| phys(j, x) * phys(base + j, x)).sum()
        };
        for (p, buf) in fwd.iter_mut().enumerate() {
            buf.resize(len, ZERO);
            par::for_each_mut(buf, |x, v| *v = C::new(advect(2 * p, x), advect(2 * p + 1, x)));
            self.fft.forward_with(buf, scratch);
        }
        let fwd = &*fwd;
        let unpair = |p: usize, i: usize| -> (C, C) {
            let f = fwd[p][i];
            let g = fwd[p][self.conj[i]].conj();
            let d = (f - g) * 0.5;
            ((f + g) * 0.5, C::new(d.im, -d.re))
        };
        par::map_indexed(na, |a| {
            let i = self.active[a];
            let (n0, n1) = unpair(0, i);
            let (n2, n3) = unpair(1, i);
            let (n4, n5) = unpair(2, i);
            let nu = leray_mode(self.xi[a], [n0, n1, n2]);
            [-nu[0], -nu[1], -nu[2], -n3, -n4, -n5]
        })
    }

    /// `K(ξ,dt)(z + s·y)` on every active mode.
    fn propagate_axpy(&self, z: &[[C; 6]], s: f64, y: Option<&[[C; 6]]>) -> Packed {
        par::map_indexed(self.active.len(), |a| {
            let mut v = z[a];
            if let Some(y) = y {
                for k in 0..6 {
                    v[k] += y[a][k] * s;
                }
            }
            let (u, w) = apply_mode(
                self.xi[a],
                &self.k_dt[a],
                [v[0], v[1], v[2]],
                [v[3], v[4], v[5]],
            );
            [u[0], u[1], u[2], w[0], w[1], w[2]]
        })
    }

    fn step_packed(&self, z: &[[C; 6]]) -> Packed {
        if !self.cfg.nonlinear {
            return self.propagate_axpy(z, 0.0, None);
        }
        let dt = self.cfg.dt;
        let a = self.rhs(z);
        let pred = self.propagate_axpy(z, dt, Some(&a));
        let b = self.rhs(&pred);
        let mut next = self.propagate_axpy(z, 0.5 * dt, Some(&a));
        for (n, b) in next.iter_mut().zip(&b) {
            for k in 0..6 {
                n[k] += b[k] * (0.5 * dt);
            }
        }
        next
    }

    /// One IF-Heun step of size `cfg.dt`.
    pub fn step(&self, z: &StateSpectral) -> Result<StateSpectral> {
        if !self.is_admissible(z) {
            return Err(invalid("state is not supported on the active modes"));
        }
        Ok(self.unpack(&self.step_packed(&self.pack(z))))
    }

    fn record_packed(&self, z: &[[C; 6]], t: f64) -> Record {
        let s = par::sum_indexed_n(z.len(), |a| {
            let xi = self.xi[a];
            let r = norm_sq3(xi);
            let u = [z[a][0], z[a][1], z[a][2]];
            let w = [z[a][3], z[a][4], z[a][5]];
            let nu: f64 = u.iter().map(|c| c.norm_sqr()).sum();
            let nw: f64 = w.iter().map(|c| c.norm_sqr()).sum();
            let cu = i_cross(xi, u);
            let c2w: f64 = (0..3).map(|k| (cu[k] - w[k] * 2.0).norm_sqr()).sum();
            [nu, nw, r * nu, r * nw, dot(xi, w).norm_sqr(), c2w]
        });
        let v = self.cfg.grid.volume();
        Record {
            t,
            e_u: s[0] * v,
            e_w: s[1] * v,
            d_grad_u: s[2] * v,
            d_grad_w: s[3] * v,
            d_div_w: s[4] * v,
            d_curl2w: s[5] * v,
        }
    }

    /// Integrates from `z0` to `t_end`.
    pub fn run(&self, z0: &StateSpectral) -> Result<Trajectory> {
        if !self.is_admissible(z0) {
            return Err(invalid(format!(
                "initial state must be truncated to radius {} without Nyquist modes",
                self.cfg.n_cut
            )));
        }
        if z0.divergence_defect() > 1e-10 {
            return Err(invalid("initial velocity is not divergence-free"));
        }
        let steps = self.cfg.steps();
        let dt = self.cfg.dt;
        let mut traj = Trajectory::new(self.cfg, z0.clone());
        let mut z = self.pack(z0);
        traj.push(self.record_packed(&z, 0.0));
        if self.cfg.snapshot_every.is_some() {
            traj.snapshots.push((0.0, z0.clone()));
        }
        for n in 1..=steps {
            z = self.step_packed(&z);
            let t = n as f64 * dt;
            if !z.iter().all(|v| v.iter().all(|c| c.re.is_finite() && c.im.is_finite())) {
                return Err(Error::NonFinite { step: n, time: t });
            }
            if n % self.cfg.record_every == 0 {
                traj.push(self.record_packed(&z, t));
            }
            if let Some(k) = self.cfg.snapshot_every {
                if n % k == 0 {
                    traj.snapshots.push((t, self.unpack(&z)));
                }
            }
        }
        traj.final_state = self.unpack(&z);
        Ok(traj)
    }
}

/// Convenience wrapper: `Solver::new(cfg)?.run(z0)`.
pub fn run(cfg: SolverConfig, z0: &StateSpectral) -> Result<Trajectory> {
    Solver::new(cfg)?.run(z0)
}
