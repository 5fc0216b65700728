use num_complex::Complex64;

use super::grid::GridSpec;
use crate::error::{Error, Result};
use crate::par;

type C = Complex64;

/// Three-component vector field stored through its normalized Fourier
/// coefficients, one array per Cartesian component.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralField {
    grid: GridSpec,
    comps: [Vec<C>; 3],
}

impl SpectralField {
    pub fn zeros(grid: GridSpec) -> Self {
        let z = vec![C::new(0.0, 0.0); grid.len()];
        Self {
            grid,
            comps: [z.clone(), z.clone(), z],
        }
    }

    pub fn from_components(grid: GridSpec, comps: [Vec<C>; 3]) -> Result<Self> {
        if comps.iter().any(|c| c.len() != grid.len()) {
            return Err(Error::GridMismatch(format!(
                "component length does not match n³ = {}",
                grid.len()
            )));
        }
        Ok(Self { grid, comps })
    }

    /// Builds a field mode by mode from `f(idx) -> [x̂, ŷ, ẑ]`.
    pub fn from_fn<F>(grid: GridSpec, f: F) -> Self
    where
        F: Fn(usize) -> [C; 3] + Sync + Send,
    {
        let modes = par::map_indexed(grid.len(), f);
        Self::from_modes(grid, &modes)
    }

    pub(crate) fn from_modes(grid: GridSpec, modes: &[[C; 3]]) -> Self {
        let mut comps: [Vec<C>; 3] = [
            Vec::with_capacity(modes.len()),
            Vec::with_capacity(modes.len()),
            Vec::with_capacity(modes.len()),
        ];
        for m in modes {
            for c in 0..3 {
                comps[c].push(m[c]);
            }
        }
        Self { grid, comps }
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn component(&self, c: usize) -> &[C] {
        &self.comps[c]
    }

    pub fn component_mut(&mut self, c: usize) -> &mut [C] {
        &mut self.comps[c]
    }

    pub fn components(&self) -> &[Vec<C>; 3] {
        &self.comps
    }

    pub fn into_components(self) -> [Vec<C>; 3] {
        self.comps
    }

    /// The 3-vector of amplitudes at mode `idx`.
    #[inline]
    pub fn at(&self, idx: usize) -> [C; 3] {
        [self.comps[0][idx], self.comps[1][idx], self.comps[2][idx]]
    }

    pub fn set(&mut self, idx: usize, v: [C; 3]) {
        for c in 0..3 {
            self.comps[c][idx] = v[c];
        }
    }

    /// Applies a per-mode map `f(idx, v̂) -> v̂'`.
    pub fn map_modes<F>(&self, f: F) -> Self
    where
        F: Fn(usize, [C; 3]) -> [C; 3] + Sync + Send,
    {
        Self::from_fn(self.grid, |idx| f(idx, self.at(idx)))
    }

    pub fn scale(&self, a: f64) -> Self {
        self.map_modes(|_, v| v.map(|x| x * a))
    }

    /// `self + a·other`.
    pub fn axpy(&self, a: f64, other: &Self) -> Result<Self> {
        self.check_grid(other)?;
        Ok(self.map_modes(|idx, v| {
            let o = other.at(idx);
            [v[0] + o[0] * a, v[1] + o[1] * a, v[2] + o[2] * a]
        }))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.axpy(-1.0, other)
    }

    pub(crate) fn check_grid(&self, other: &Self) -> Result<()> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch(format!(
                "{:?} vs {:?}",
                self.grid, other.grid
            )));
        }
        Ok(())
    }

    /// Plancherel inner product `⟨f, g⟩ = L³ Σ_ξ f̂(ξ)* · ĝ(ξ)`.
    pub fn inner(&self, other: &Self) -> Result<C> {
        self.check_grid(other)?;
        let [re, im] = par::sum_indexed_n(self.grid.len(), |idx| {
            let a = self.at(idx);
            let b = other.at(idx);
            let s = a[0].conj() * b[0] + a[1].conj() * b[1] + a[2].conj() * b[2];
            [s.re, s.im]
        });
        Ok(C::new(re, im) * self.grid.volume())
    }

    /// `‖f‖²_{L²}` under the Plancherel convention.
    pub fn norm_sq(&self) -> f64 {
        self.weighted_norm_sq(|_| 1.0)
    }

    /// `L³ Σ_ξ w(ξ) |f̂(ξ)|²` for a real weight indexed by mode.
    pub fn weighted_norm_sq<W>(&self, weight: W) -> f64
    where
        W: Fn(usize) -> f64 + Sync + Send,
    {
        let s = par::sum_indexed(self.grid.len(), |idx| {
            let v = self.at(idx);
            weight(idx) * (v[0].norm_sqr() + v[1].norm_sqr() + v[2].norm_sqr())
        });
        s * self.grid.volume()
    }

    /// Largest violation of `f̂(-ξ) = conj f̂(ξ)` across modes.
    pub fn hermitian_defect(&self) -> f64 {
        let g = self.grid;
        (0..g.len())
            .map(|idx| {
                let j = g.conjugate_index(idx);
                (0..3)
                    .map(|c| (self.comps[c][j] - self.comps[c][idx].conj()).norm())
                    .fold(0.0, f64::max)
            })
            .fold(0.0, f64::max)
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermitian_defect() <= tol
    }

    pub fn is_finite(&self) -> bool {
        self.comps
            .iter()
            .all(|c| c.iter().all(|z| z.re.is_finite() && z.im.is_finite()))
    }

    /// Replaces `f̂` by `(f̂(ξ) + conj f̂(-ξ)) / 2`, the Fourier coefficients of
    /// the real part of the field.
    /// Projects onto real fields. Nyquist modes are dropped: odd derivatives
    /// cannot act on them consistently.
    pub fn hermitian_symmetrize(&self) -> Self {
        let g = self.grid;
        self.map_modes(|idx, v| {
            if g.is_nyquist(idx) {
                return [C::new(0.0, 0.0); 3];
            }
            let p = self.at(g.conjugate_index(idx));
            [
                (v[0] + p[0].conj()) * 0.5,
                (v[1] + p[1].conj()) * 0.5,
                (v[2] + p[2].conj()) * 0.5,
            ]
        })
    }

    pub fn max_abs(&self) -> f64 {
        self.comps
            .iter()
            .flat_map(|c| c.iter())
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }
}

/// Scalar spectral array, e.g. a divergence.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralScalar {
    grid: GridSpec,
    data: Vec<C>,
}

impl SpectralScalar {
    pub fn new(grid: GridSpec, data: Vec<C>) -> Result<Self> {
        if data.len() != grid.len() {
            return Err(Error::GridMismatch("scalar length does not match n³".into()));
        }
        Ok(Self { grid, data })
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn data(&self) -> &[C] {
        &self.data
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn norm_sq(&self) -> f64 {
        par::sum_indexed(self.data.len(), |i| self.data[i].norm_sqr()) * self.grid.volume()
    }
}

/// Torus state `z = (u, w)`: velocity and microrotation.
#[derive(Debug, Clone, PartialEq)]
pub struct StateSpectral {
    pub u: SpectralField,
    pub w: SpectralField,
}

impl StateSpectral {
    pub fn new(u: SpectralField, w: SpectralField) -> Result<Self> {
        u.check_grid(&w)?;
        Ok(Self { u, w })
    }

    pub fn zeros(grid: GridSpec) -> Self {
        Self {
            u: SpectralField::zeros(grid),
            w: SpectralField::zeros(grid),
        }
    }

    pub fn grid(&self) -> &GridSpec {
        self.u.grid()
    }

    /// `‖u‖² + ‖w‖²`.
    pub fn energy(&self) -> f64 {
        self.u.norm_sq() + self.w.norm_sq()
    }

    pub fn axpy(&self, a: f64, other: &Self) -> Result<Self> {
        Ok(Self {
            u: self.u.axpy(a, &other.u)?,
            w: self.w.axpy(a, &other.w)?,
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.axpy(-1.0, other)
    }

    pub fn scale(&self, a: f64) -> Self {
        Self {
            u: self.u.scale(a),
            w: self.w.scale(a),
        }
    }

    pub fn is_finite(&self) -> bool {
        self.u.is_finite() && self.w.is_finite()
    }

    /// Largest `|ξ·û(ξ)| / (|ξ| |û(ξ)|)` over modes with `û ≠ 0`, `ξ ≠ 0`.
    pub fn divergence_defect(&self) -> f64 {
        let g = *self.grid();
        (0..g.len())
            .map(|idx| {
                let xi = g.wavenumber(idx);
                let v = self.u.at(idx);
                let xn = (xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2]).sqrt();
                let vn = (v[0].norm_sqr() + v[1].norm_sqr() + v[2].norm_sqr()).sqrt();
                if xn == 0.0 || vn == 0.0 {
                    0.0
                } else {
                    (v[0] * xi[0] + v[1] * xi[1] + v[2] * xi[2]).norm() / (xn * vn)
                }
            })
            .fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid() -> GridSpec {
        GridSpec::new(4, 1.0).unwrap()
    }

    #[test]
    fn symmetrize_makes_hermitian() {
        let g = grid();
        let f = SpectralField::from_fn(g, |i| {
            let x = i as f64;
            [C::new(x, 1.0), C::new(-x, x * x), C::new(0.5, -x)]
        });
        assert!(!f.is_hermitian(1e-12));
        let h = f.hermitian_symmetrize();
        assert!(h.is_hermitian(0.0));
    }

    #[test]
    fn norm_of_single_mode_pair() {
        let g = GridSpec::new(8, 2.0).unwrap();
        let mut f = SpectralField::zeros(g);
        let idx = g.index_of([1, 0, 0]);
        let jdx = g.conjugate_index(idx);
        let a = C::new(0.3, 0.4);
        f.set(idx, [C::new(0.0, 0.0), a, C::new(0.0, 0.0)]);
        f.set(jdx, [C::new(0.0, 0.0), a.conj(), C::new(0.0, 0.0)]);
        // ‖f‖² = L³ · 2|a|²
        let expect = 8.0 * 2.0 * 0.25;
        assert!((f.norm_sq() - expect).abs() < 1e-14);
        assert!((f.scale(2.0).norm_sq() - 4.0 * expect).abs() < 1e-13);
    }

    #[test]
    fn grid_mismatch_is_reported() {
        let a = SpectralField::zeros(GridSpec::new(4, 1.0).unwrap());
        let b = SpectralField::zeros(GridSpec::new(4, 2.0).unwrap());
        assert!(matches!(a.inner(&b), Err(Error::GridMismatch(_))));
    }
}
