//! Numerical experiments with pass/fail verdicts.
//!
//! The statements being probed are upper bounds with unspecified constants.
//! Empirical operator norms are maxima over finite input families, hence
//! lower bounds; what is falsifiable is their growth or stability across
//! resolutions and scales.

mod bmo;
mod csigma;
mod decay;
pub mod exponents;
pub mod families;
pub mod fit;
mod identities;
mod opnorm;
pub mod report;
mod weights;

pub use bmo::{bmo_probe, c_seminorm_decay_probe};
pub use csigma::c_sigma_scaling_probe;
pub use decay::{decay_probe, envelope, DecayMode, DECAY_BINS};
pub use exponents::{
    annulus_slope, c_sigma_exponent, critical_order, kernel_decay_exponent, segment_orders, sobolev_exponent,
    sobolev_order, LebesgueExponents, SobolevReading,
};
pub use families::Family;
pub use identities::{dilation_check, domination_check, domination_constant, DominationExpectation};
pub use opnorm::{
    annular_piece, ball_piece, linf_norm_lower_bound, linf_ratio, opnorm_probe, opnorm_stability, scaling_probe,
    small_support_probe, trial_ratio,
};
pub use report::{Comparison, ProbeReport};
pub use weights::{muckenhoupt_constant, power_weight, BallFamily, WeightPair};
