use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use super::grid::GridSpec;
use crate::par;

type C = Complex64;

/// Planned complex 3-D FFT on an `n³` grid.
///
/// [`Fft3::forward`] maps physical samples `f(x_j)` to normalized Fourier
/// coefficients (division by `n³`); [`Fft3::inverse`] synthesises the samples
/// back without scaling.
#[derive(Clone)]
pub struct Fft3 {
    n: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for Fft3 {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Fft3").field("n", &self.n).finish()
    }
}

impl Fft3 {
    pub fn new(grid: &GridSpec) -> Self {
        let mut planner = FftPlanner::new();
        let n = grid.n();
        Self {
            n,
            forward: planner.plan_fft_forward(n),
            inverse: planner.plan_fft_inverse(n),
        }
    }

    pub fn forward(&self, data: &mut [C]) {
        self.forward_with(data, &mut Vec::new());
    }

    pub fn inverse(&self, data: &mut [C]) {
        self.inverse_with(data, &mut Vec::new());
    }

    /// As [`Fft3::forward`], reusing `work` as the transpose buffer.
    pub fn forward_with(&self, data: &mut [C], work: &mut Vec<C>) {
        self.transform(data, &self.forward, work);
        let s = 1.0 / (self.n * self.n * self.n) as f64;
        par::for_each_chunk_mut(data, self.n * self.n, |_, c| {
            c.iter_mut().for_each(|x| *x *= s)
        });
    }

    /// As [`Fft3::inverse`], reusing `work` as the transpose buffer.
    pub fn inverse_with(&self, data: &mut [C], work: &mut Vec<C>) {
        self.transform(data, &self.inverse, work);
    }

    fn transform(&self, data: &mut [C], plan: &Arc<dyn Fft<f64>>, work: &mut Vec<C>) {
        let n = self.n;
        let plane = n * n;
        assert_eq!(data.len(), plane * n, "buffer length must be n³");
        let scratch_len = plan.get_inplace_scratch_len();

        // Last axis: contiguous lines, a plane at a time.
        par::for_each_chunk_mut(data, plane, |_, p| {
            let mut scratch = vec![C::new(0.0, 0.0); scratch_len];
            plan.process_with_scratch(p, &mut scratch);
        });

        // Middle axis: transpose each plane in place through a buffer.
        par::for_each_chunk_mut(data, plane, |_, p| {
            let mut buf = vec![C::new(0.0, 0.0); plane];
            let mut scratch = vec![C::new(0.0, 0.0); scratch_len];
            for j in 0..n {
                for k in 0..n {
                    buf[k * n + j] = p[j * n + k];
                }
            }
            plan.process_with_scratch(&mut buf, &mut scratch);
            for j in 0..n {
                for k in 0..n {
                    p[j * n + k] = buf[k * n + j];
                }
            }
        });

        // First axis: each (i, k) slab at fixed j is gathered row by row,
        // transformed along i and stored as t[j][i][k], then copied back.
        work.resize(data.len(), C::new(0.0, 0.0));
        let t = &mut work[..];
        {
            let src = &*data;
            par::for_each_chunk_mut(t, plane, |j, p| {
                let mut buf = vec![C::new(0.0, 0.0); plane];
                let mut scratch = vec![C::new(0.0, 0.0); scratch_len];
                for i in 0..n {
                    let row = &src[(i * n + j) * n..][..n];
                    for (k, v) in row.iter().enumerate() {
                        buf[k * n + i] = *v;
                    }
                }
                plan.process_with_scratch(&mut buf, &mut scratch);
                for k in 0..n {
                    for i in 0..n {
                        p[i * n + k] = buf[k * n + i];
                    }
                }
            });
        }
        let t = &*t;
        par::for_each_chunk_mut(data, plane, |i, p| {
            for j in 0..n {
                p[j * n..][..n].copy_from_slice(&t[j * plane + i * n..][..n]);
            }
        });
    }

    /// Synthesises two real fields at once from Hermitian coefficient arrays
    /// `a`, `b`: returns `(a(x), b(x))` on the grid.
    pub fn inverse_pair(&self, a: &[C], b: &[C]) -> (Vec<f64>, Vec<f64>) {
        let mut buf = par::map_indexed(a.len(), |i| a[i] + C::new(-b[i].im, b[i].re));
        self.inverse(&mut buf);
        let re = buf.iter().map(|z| z.re).collect();
        let im = buf.iter().map(|z| z.im).collect();
        (re, im)
    }

    /// Analyses two real sample arrays at once; the results are exactly
    /// Hermitian.
    pub fn forward_pair(&self, grid: &GridSpec, a: &[f64], b: &[f64]) -> (Vec<C>, Vec<C>) {
        let mut buf = par::map_indexed(a.len(), |i| C::new(a[i], b[i]));
        self.forward(&mut buf);
        let pairs = par::map_indexed(buf.len(), |i| {
            let f = buf[i];
            let g = buf[grid.conjugate_index(i)].conj();
            let ah = (f + g) * 0.5;
            let d = (f - g) * 0.5;
            // (f - g) / (2i)
            (ah, C::new(d.im, -d.re))
        });
        pairs.into_iter().unzip()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn single_mode_roundtrip() {
        let g = GridSpec::new(8, 2.0 * PI).unwrap();
        let fft = Fft3::new(&g);
        // f(x) = cos(x + 2y - z)  ->  coefficients 1/2 at ±(1,2,-1)
        let h = g.box_length() / g.n() as f64;
        let mut data: Vec<C> = (0..g.len())
            .map(|idx| {
                let (i, j, k) = g.unravel(idx);
                let (x, y, z) = (i as f64 * h, j as f64 * h, k as f64 * h);
                C::new((x + 2.0 * y - z).cos(), 0.0)
            })
            .collect();
        let orig = data.clone();
        fft.forward(&mut data);
        let p = g.index_of([1, 2, -1]);
        let m = g.index_of([-1, -2, 1]);
        assert!((data[p] - C::new(0.5, 0.0)).norm() < 1e-14);
        assert!((data[m] - C::new(0.5, 0.0)).norm() < 1e-14);
        let rest: f64 = data
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != p && *i != m)
            .map(|(_, z)| z.norm())
            .fold(0.0, f64::max);
        assert!(rest < 1e-14);
        fft.inverse(&mut data);
        for (a, b) in data.iter().zip(&orig) {
            assert!((a - b).norm() < 1e-14);
        }
    }

    #[test]
    fn paired_transforms_match_single() {
        let g = GridSpec::new(8, 1.0).unwrap();
        let fft = Fft3::new(&g);
        let a: Vec<f64> = (0..g.len()).map(|i| ((i * 7919) % 101) as f64 / 50.0 - 1.0).collect();
        let b: Vec<f64> = (0..g.len()).map(|i| ((i * 104729) % 37) as f64 / 18.0 - 1.0).collect();
        let (ah, bh) = fft.forward_pair(&g, &a, &b);
        let mut single: Vec<C> = a.iter().map(|&x| C::new(x, 0.0)).collect();
        fft.forward(&mut single);
        for (x, y) in ah.iter().zip(&single) {
            assert!((x - y).norm() < 1e-15);
        }
        let (ar, br) = fft.inverse_pair(&ah, &bh);
        for i in 0..g.len() {
            assert!((ar[i] - a[i]).abs() < 1e-13);
            assert!((br[i] - b[i]).abs() < 1e-13);
        }
    }
}
