use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::par;

/// Nodes per radial Gauss–Legendre panel.
pub const PANEL_NODES: usize = 8;

/// Default relative refinement tolerance for whole-space norms.
pub const DEFAULT_TOL: f64 = 1e-8;

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n > 0, "Gauss–Legendre rule needs at least one node");
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, d) = legendre(n, z);
            let dz = p / d;
            z -= dz;
            if dz.abs() <= 1e-16 {
                break;
            }
        }
        let (_, dp) = legendre(n, z);
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    if n % 2 == 1 {
        x[n / 2] = 0.0;
    }
    (x, w)
}

/// `(P_n(z), P_n'(z))` by the three-term recurrence.
fn legendre(n: usize, z: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, z);
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let n = n as f64;
    (p1, n * (z * p1 - p0) / (z * z - 1.0))
}

/// Composite Gauss–Legendre rule on `[a, b]` with `panels` equal panels.
pub fn composite_gauss(a: f64, b: f64, panels: usize, nodes: usize) -> Vec<(f64, f64)> {
    let (x, w) = gauss_legendre(nodes);
    let h = (b - a) / panels as f64;
    let mut out = Vec::with_capacity(panels * nodes);
    for p in 0..panels {
        let lo = a + h * p as f64;
        for (xi, wi) in x.iter().zip(&w) {
            out.push((lo + 0.5 * h * (xi + 1.0), 0.5 * h * wi));
        }
    }
    out
}

/// Log-radial × product-sphere quadrature on `r_min ≤ |ξ| ≤ r_max`.
///
/// Radial nodes are composite Gauss–Legendre panels of [`PANEL_NODES`] nodes
/// in `s = ln r`; `n_radial` is rounded up to whole panels. The sphere uses
/// `n_angular` Gauss nodes in `cos θ` and `2·n_angular` uniform azimuths,
/// which integrates spherical polynomials of degree `< 2·n_angular` exactly.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    pub r_min: f64,
    pub r_max: f64,
    pub n_radial: usize,
    pub n_angular: usize,
    pub tol: f64,
}

impl QuadratureSpec {
    pub fn new(r_min: f64, r_max: f64, n_radial: usize, n_angular: usize, tol: f64) -> Result<Self> {
        let q = Self {
            r_min,
            r_max,
            n_radial,
            n_angular,
            tol,
        };
        q.validate()?;
        Ok(q)
    }

    /// Default rule for data of spectral width `sigma` observed up to `t_max`:
    /// `r_min = 1e-4/√(1+t_max)`, `r_max = 12σ`.
    pub fn for_window(sigma: f64, t_max: f64) -> Self {
        Self {
            r_min: 1e-4 / (1.0 + t_max.max(0.0)).sqrt(),
            r_max: 12.0 * sigma,
            n_radial: 256,
            n_angular: 8,
            tol: DEFAULT_TOL,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.r_min.is_finite() && self.r_min > 0.0) {
            return Err(invalid(format!("r_min must be > 0, got {}", self.r_min)));
        }
        if !(self.r_max.is_finite() && self.r_max > self.r_min) {
            return Err(invalid(format!(
                "r_max must exceed r_min, got r_max = {} and r_min = {}",
                self.r_max, self.r_min
            )));
        }
        if self.n_radial == 0 || self.n_angular == 0 {
            return Err(invalid("n_radial and n_angular must be >= 1"));
        }
        if !(self.tol.is_finite() && self.tol > 0.0) {
            return Err(invalid(format!("quadrature tol must be > 0, got {}", self.tol)));
        }
        Ok(())
    }

    /// The same window at twice the radial and angular resolution.
    pub fn refined(&self) -> Self {
        Self {
            n_radial: 2 * self.n_radial,
            n_angular: 2 * self.n_angular,
            ..*self
        }
    }

    /// The same resolution restricted to `r_min ≤ |ξ| ≤ r_max`.
    pub fn with_r_max(&self, r_max: f64) -> Self {
        Self { r_max, ..*self }
    }

    fn panels(&self) -> usize {
        self.n_radial.div_ceil(PANEL_NODES)
    }

    /// `(r, weight)` pairs with the `r² dr = r³ ds` Jacobian folded in.
    pub fn radial_nodes(&self) -> Vec<(f64, f64)> {
        composite_gauss(self.r_min.ln(), self.r_max.ln(), self.panels(), PANEL_NODES)
            .into_iter()
            .map(|(s, w)| {
                let r = s.exp();
                (r, w * r * r * r)
            })
            .collect()
    }

    /// Unit directions and weights of the sphere rule (weights sum to `4π`).
    pub fn sphere_nodes(&self) -> Vec<([f64; 3], f64)> {
        let (ct, wt) = gauss_legendre(self.n_angular);
        let n_phi = 2 * self.n_angular;
        let dphi = 2.0 * PI / n_phi as f64;
        let mut out = Vec::with_capacity(ct.len() * n_phi);
        for (c, w) in ct.iter().zip(&wt) {
            let s = (1.0 - c * c).max(0.0).sqrt();
            for j in 0..n_phi {
                let phi = (j as f64 + 0.5) * dphi;
                out.push(([s * phi.cos(), s * phi.sin(), *c], w * dphi));
            }
        }
        out
    }
}

/// Angular integrand: receives the radius and the sphere rule and returns
/// `∫_{S²} f(rω) dω` for each of its `M` outputs.
pub trait ShellIntegrand<const M: usize>: Sync + Send {
    fn shell(&self, r: f64, sphere: &[([f64; 3], f64)]) -> [f64; M];
}

impl<const M: usize, F> ShellIntegrand<M> for F
where
    F: Fn(f64, &[([f64; 3], f64)]) -> [f64; M] + Sync + Send,
{
    fn shell(&self, r: f64, sphere: &[([f64; 3], f64)]) -> [f64; M] {
        self(r, sphere)
    }
}

/// `(2π)^{-3} ∫ f(ξ) dξ` at the resolution of `quad`, without a refinement check.
pub fn integrate_fixed<const M: usize, S: ShellIntegrand<M>>(quad: &QuadratureSpec, f: &S) -> [f64; M] {
    let radial = quad.radial_nodes();
    let sphere = quad.sphere_nodes();
    let shells = par::map_indexed(radial.len(), |i| {
        let (r, w) = radial[i];
        f.shell(r, &sphere).map(|v| v * w)
    });
    let scale = (2.0 * PI).powi(-3);
    let mut out = [0.0; M];
    for (k, o) in out.iter_mut().enumerate() {
        let col: Vec<f64> = shells.iter().map(|s| s[k]).collect();
        *o = par::compensated_sum(&col) * scale;
    }
    out
}

/// As [`integrate_fixed`], then again at doubled resolution; fails with
/// [`Error::NonConvergence`] if any output moves by more than `quad.tol`
/// relative. Returns the refined values.
pub fn integrate<const M: usize, S: ShellIntegrand<M>>(
    quad: &QuadratureSpec,
    quantity: &str,
    f: &S,
) -> Result<[f64; M]> {
    quad.validate()?;
    let coarse = integrate_fixed(quad, f);
    let fine = integrate_fixed(&quad.refined(), f);
    for k in 0..M {
        let (a, b) = (coarse[k], fine[k]);
        if !(a.is_finite() && b.is_finite()) {
            return Err(Error::NonConvergence {
                quantity: format!("{quantity}[{k}]"),
                rel_change: f64::INFINITY,
                tol: quad.tol,
            });
        }
        let scale = a.abs().max(b.abs());
        let rel = if scale == 0.0 { 0.0 } else { (a - b).abs() / scale };
        if rel > quad.tol {
            return Err(Error::NonConvergence {
                quantity: format!("{quantity}[{k}]"),
                rel_change: rel,
                tol: quad.tol,
            });
        }
    }
    Ok(fine)
}

/// Point-wise convenience wrapper: `(2π)^{-3} ∫ f(ξ) dξ` with refinement check.
pub fn integrate_pointwise<const M: usize, F>(quad: &QuadratureSpec, quantity: &str, f: F) -> Result<[f64; M]>
where
    F: Fn([f64; 3]) -> [f64; M] + Sync + Send,
{
    let shell = |r: f64, sphere: &[([f64; 3], f64)]| {
        let mut acc = [0.0; M];
        for (d, w) in sphere {
            let v = f([r * d[0], r * d[1], r * d[2]]);
            for k in 0..M {
                acc[k] += w * v[k];
            }
        }
        acc
    };
    integrate(quad, quantity, &shell)
}
