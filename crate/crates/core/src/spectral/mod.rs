//! Fourier-side vector calculus on the periodic cube `[0, L)³`.

mod fft;
mod field;
mod grid;
pub(crate) mod ops;
mod snapshot;

pub use fft::Fft3;
pub use field::{SpectralField, SpectralScalar, StateSpectral};
pub use grid::GridSpec;
pub use ops::{
    cross, curl_hat, div_hat, dot, grad_norm_sq, leray_project, mollifier_multiplier, mollify,
    l2_norm, truncate, truncation_radius,
};
pub use snapshot::{read_snapshot, write_snapshot, Snapshot, SNAPSHOT_MAGIC};
