//! Pass/fail tolerances for the probes, overridable from the run config.

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    /// Absolute slack on fitted annulus-scaling slopes.
    pub scaling_slope: f64,
    /// Absolute slack on fitted kernel-decay slopes.
    pub decay_slope: f64,
    /// Relative spread allowed across resolutions.
    pub stability: f64,
    /// Minimum growth factor for expected-fail fixtures.
    pub growth: f64,
    /// Relative residual of exact identities after rescaling.
    pub dilation: f64,
    /// Relative residual of the Leibniz reconstruction.
    pub leibniz: f64,
    /// Relative slack on the `C_{β,γ}` dilation inequality.
    pub cseminorm: f64,
    /// Relative slack on the `C(σ)` exponent fit.
    pub c_sigma: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            scaling_slope: 0.15,
            decay_slope: 0.2,
            stability: 0.25,
            growth: 1.5,
            dilation: 1e-8,
            leibniz: 1e-10,
            cseminorm: 0.05,
            c_sigma: 0.1,
        }
    }
}
