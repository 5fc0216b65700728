//! Closed-form semigroup of the linear micropolar system.
//!
//! On the Fourier side the divergence-free pair `(Ω̂, ĥ) = (iξ×û, ℙŵ)` obeys a
//! 2×2 system per mode whose exponential is available in closed form; the
//! longitudinal part of `ŵ` decays on its own at rate `4χ + (γ+κ)|ξ|²`.
//! [`propagator_matrix`] assembles the resulting 6×6 symbol `K(ξ,t)` acting on
//! stacked `(û, ŵ)`, and [`oracle`] recomputes it by brute-force matrix
//! exponentiation of the 6×6 generator.

pub mod oracle;
mod params;
pub(crate) mod propagator;
pub(crate) mod symbol;

pub use params::MaterialParams;
pub use propagator::{
    apply_linear, heat_profiles, prop_e_residuals, propagator_matrix, write_symbol_table,
    PropagatorMatrix,
};
pub use symbol::{e_components, eig_quantities, phi_sinh, EigQuantities, SymbolComponents};
