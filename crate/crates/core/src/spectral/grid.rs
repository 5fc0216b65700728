use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Cubic periodic grid with `n` points per axis and period `box_length`.
///
/// Modes are stored in row-major order over `(i, j, k)` with each axis in
/// standard FFT ordering, i.e. integer frequencies `0, 1, …, n/2, -n/2+1, …, -1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    n: usize,
    box_length: f64,
}

impl GridSpec {
    pub fn new(n: usize, box_length: f64) -> Result<Self> {
        if n < 4 {
            return Err(invalid(format!("grid needs n >= 4, got {n}")));
        }
        if !n.is_multiple_of(2) {
            return Err(invalid(format!("grid size must be even, got {n}")));
        }
        if !(box_length.is_finite() && box_length > 0.0) {
            return Err(invalid(format!("box_length must be > 0, got {box_length}")));
        }
        Ok(Self { n, box_length })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn box_length(&self) -> f64 {
        self.box_length
    }

    /// Number of lattice modes, `n³`.
    pub fn len(&self) -> usize {
        self.n * self.n * self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Lattice spacing in wavenumber space, `2π/L`.
    pub fn k0(&self) -> f64 {
        2.0 * PI / self.box_length
    }

    /// Physical volume `L³`.
    pub fn volume(&self) -> f64 {
        self.box_length.powi(3)
    }

    /// Integer frequency of position `i` along one axis.
    pub fn axis_frequency(&self, i: usize) -> i64 {
        let n = self.n as i64;
        let i = i as i64;
        if i <= n / 2 {
            i
        } else {
            i - n
        }
    }

    fn axis_position(&self, k: i64) -> usize {
        let n = self.n as i64;
        k.rem_euclid(n) as usize
    }

    pub fn index(&self, i: usize, j: usize, k: usize) -> usize {
        (i * self.n + j) * self.n + k
    }

    pub fn unravel(&self, idx: usize) -> (usize, usize, usize) {
        let n = self.n;
        (idx / (n * n), (idx / n) % n, idx % n)
    }

    /// Integer lattice vector of mode `idx`.
    pub fn mode(&self, idx: usize) -> [i64; 3] {
        let (i, j, k) = self.unravel(idx);
        [
            self.axis_frequency(i),
            self.axis_frequency(j),
            self.axis_frequency(k),
        ]
    }

    /// Storage index of the integer lattice vector `m` (taken modulo `n`).
    pub fn index_of(&self, m: [i64; 3]) -> usize {
        self.index(
            self.axis_position(m[0]),
            self.axis_position(m[1]),
            self.axis_position(m[2]),
        )
    }

    /// True if any axis index sits on the Nyquist frequency `n/2`.
    pub fn is_nyquist(&self, idx: usize) -> bool {
        let h = self.n / 2;
        let (i, j, k) = self.unravel(idx);
        i == h || j == h || k == h
    }

    /// Storage index of the mode `-ξ`. Nyquist components map to themselves.
    pub fn conjugate_index(&self, idx: usize) -> usize {
        let m = self.mode(idx);
        self.index_of([-m[0], -m[1], -m[2]])
    }

    /// Wavenumber vector `ξ = (2π/L) m` of mode `idx`.
    pub fn wavenumber(&self, idx: usize) -> [f64; 3] {
        let m = self.mode(idx);
        let k0 = self.k0();
        [k0 * m[0] as f64, k0 * m[1] as f64, k0 * m[2] as f64]
    }

    /// All wavenumbers in storage order.
    pub fn wavenumbers(&self) -> Vec<[f64; 3]> {
        (0..self.len()).map(|i| self.wavenumber(i)).collect()
    }

    /// Frequencies of one axis in storage order, scaled by `2π/L`.
    pub fn axis_wavenumbers(&self) -> Vec<f64> {
        (0..self.n)
            .map(|i| self.k0() * self.axis_frequency(i) as f64)
            .collect()
    }
}
