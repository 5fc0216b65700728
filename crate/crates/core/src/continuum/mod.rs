//! Whole-space evaluation of the linear flow.
//!
//! Norms on ℝ³ are computed as `(2π)^{-3} ∫ |f̂(ξ)|² dξ` with a log-radial
//! Gauss rule times a product rule on the sphere. Every reported value is
//! recomputed at doubled resolution and rejected if it moves by more than the
//! declared tolerance.

mod diagnostics;
mod fit;
mod ledger;
mod profile;
pub mod quadrature;

pub use diagnostics::{
    decay_curves, enstrophy_identity_residual, fourier_splitting_diagnostics, l2_norm_continuum,
    profile_error_curves, EnstrophyBalance, SplittingDiagnostics, DECAY_CURVES,
};
pub use fit::{logspace, ols_slope, DecayReport, DEFAULT_WINDOW};
pub use ledger::ConstantsLedger;
pub use profile::{linear_state_hat, ContinuumProfile, HatFn, LinearStateHat};
pub use quadrature::QuadratureSpec;
