//! Spectral toolkit for the three-dimensional micropolar fluid system.
//!
//! The crate is organised around five layers:
//!
//! * [`spectral`]: Fourier-side vector calculus on a periodic cube (curl,
//!   divergence, Leray projection, sharp frequency truncation, mollification,
//!   Plancherel norms), 3-D FFTs and the `MPOLAR1` snapshot format.
//! * [`linear`]: the closed-form propagator `K(ξ,t)` of the linear system,
//!   its scalar building blocks, heat-kernel profiles and an independent
//!   matrix-exponential oracle.
//! * [`continuum`]: whole-space (ℝ³) quadrature of the linear flow, power-law
//!   fits, the enstrophy identity and Fourier-splitting diagnostics.
//! * [`solver`]: a torus Galerkin solver for the filtered mollified system with
//!   exact integrating-factor time stepping and energy-balance instrumentation.
//! * [`datagen`]: divergence-free initial data, both random torus fields and
//!   closed-form continuum profiles.
//!
//! # Transform convention
//!
//! A torus field is stored through its Fourier-series coefficients,
//! `f(x) = Σ_ξ f̂(ξ) e^{iξ·x}` with `ξ ∈ (2π/L)ℤ³`, so that
//! `‖f‖²_{L²} = L³ Σ_ξ |f̂(ξ)|²`. On ℝ³ the transform is
//! `f̂(ξ) = ∫ f(x) e^{-iξ·x} dx` and `‖f‖²_{L²} = (2π)^{-3} ∫ |f̂(ξ)|² dξ`.
//!
//! With the default `parallel` feature, mode loops, FFT line batches and
//! quadrature node sweeps run on rayon. All reductions are taken over a fixed
//! block decomposition, so results do not depend on the thread count.

pub mod continuum;
pub mod datagen;
mod error;
pub mod linear;
pub mod par;
pub mod spectral;
pub mod solver;

pub use error::{Error, Result};
pub use num_complex::Complex64;

pub use linear::MaterialParams;
pub use spectral::{GridSpec, SpectralField, StateSpectral};
