//! Data-parallel primitives with a sequential fallback.
//!
//! Every helper here produces results that are bitwise independent of the
//! number of worker threads: maps preserve order and sums are reduced over a
//! fixed block decomposition followed by a sequential compensated sum.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Block length of the fixed reduction decomposition.
pub const REDUCTION_BLOCK: usize = 2048;

/// `(0..len).map(f).collect()`, in parallel when enabled.
pub fn map_indexed<R, F>(len: usize, f: F) -> Vec<R>
where
    R: Send,
    F: Fn(usize) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        (0..len).into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..len).map(f).collect()
    }
}

/// Applies `f(chunk_index, chunk)` to consecutive chunks of `data`.
pub fn for_each_chunk_mut<T, F>(data: &mut [T], chunk: usize, f: F)
where
    T: Send,
    F: Fn(usize, &mut [T]) + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        data.par_chunks_mut(chunk)
            .enumerate()
            .for_each(|(i, c)| f(i, c));
    }
    #[cfg(not(feature = "parallel"))]
    {
        data.chunks_mut(chunk).enumerate().for_each(|(i, c)| f(i, c));
    }
}

/// Applies `f(index, item)` to every element.
pub fn for_each_mut<T, F>(data: &mut [T], f: F)
where
    T: Send,
    F: Fn(usize, &mut T) + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        data.par_iter_mut().enumerate().for_each(|(i, x)| f(i, x));
    }
    #[cfg(not(feature = "parallel"))]
    {
        data.iter_mut().enumerate().for_each(|(i, x)| f(i, x));
    }
}

/// Schedule-independent `Σ_{i<len} f(i)`.
pub fn sum_indexed<F>(len: usize, f: F) -> f64
where
    F: Fn(usize) -> f64 + Sync + Send,
{
    let [s] = sum_indexed_n(len, |i| [f(i)]);
    s
}

/// Schedule-independent component-wise sum of `K` accumulators.
pub fn sum_indexed_n<const K: usize, F>(len: usize, f: F) -> [f64; K]
where
    F: Fn(usize) -> [f64; K] + Sync + Send,
{
    let blocks = len.div_ceil(REDUCTION_BLOCK);
    let partials = map_indexed(blocks, |b| {
        let lo = b * REDUCTION_BLOCK;
        let hi = (lo + REDUCTION_BLOCK).min(len);
        let mut acc = [Neumaier::default(); K];
        for i in lo..hi {
            let v = f(i);
            for k in 0..K {
                acc[k].add(v[k]);
            }
        }
        acc.map(|a| a.total())
    });
    let mut out = [0.0; K];
    for (k, o) in out.iter_mut().enumerate() {
        let column: Vec<f64> = partials.iter().map(|p| p[k]).collect();
        *o = compensated_sum(&column);
    }
    out
}

/// Sequential compensated sum of block partials.
pub fn compensated_sum(xs: &[f64]) -> f64 {
    let mut acc = Neumaier::default();
    for &x in xs {
        acc.add(x);
    }
    acc.total()
}

/// Neumaier (improved Kahan) compensated accumulator.
#[derive(Debug, Clone, Copy, Default)]
pub struct Neumaier {
    sum: f64,
    comp: f64,
}

impl Neumaier {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn total(&self) -> f64 {
        self.sum + self.comp
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compensated_sum_recovers_small_terms() {
        let mut xs = vec![1.0e16];
        xs.extend(std::iter::repeat_n(1.0, 1000));
        xs.push(-1.0e16);
        assert_eq!(compensated_sum(&xs), 1000.0);
    }

    #[test]
    fn block_sum_matches_closed_form() {
        let n = 10_007;
        let s = sum_indexed(n, |i| i as f64);
        assert_eq!(s, (n * (n - 1) / 2) as f64);
    }

    #[test]
    fn map_preserves_order() {
        let v = map_indexed(5000, |i| i * 3);
        assert!(v.iter().enumerate().all(|(i, &x)| x == 3 * i));
    }
}
