//! Smooth one-variable profiles shared by cutoffs and partitions.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `exp(1 − 1/(1 − t²))` on `|t| < 1`, zero outside; equals 1 at `t = 0`.
pub fn bump(t: f64) -> f64 {
    let s = 1.0 - t * t;
    if s <= 0.0 {
        0.0
    } else {
        (1.0 - 1.0 / s).exp()
    }
}

/// Smooth monotone step: 0 for `u ≤ 0`, 1 for `u ≥ 1`, and
/// `smooth_step(u) + smooth_step(1 − u) = 1`.
pub fn smooth_step(u: f64) -> f64 {
    if u <= 0.0 {
        return 0.0;
    }
    if u >= 1.0 {
        return 1.0;
    }
    let a = bump(1.0 - u);
    let b = bump(u);
    a / (a + b)
}

/// 1 for `r ≤ 1`, 0 for `r ≥ 2`.
pub fn radial_cutoff(r: f64) -> f64 {
    1.0 - smooth_step(r - 1.0)
}

/// Profile `φ` of the Leibniz split: 1 for `r ≤ 1/2`, 0 for `r ≥ 2`,
/// `φ(r) + φ(1/r) = 1`. Built in `u = log₂ r` and antisymmetrized so the
/// functional equation holds to rounding, with `φ(1) = 1/2` exactly.
pub fn leibniz_profile(r: f64) -> f64 {
    if r <= 0.5 {
        return 1.0;
    }
    if r >= 2.0 {
        return 0.0;
    }
    let u = r.log2();
    let p = |u: f64| 1.0 - smooth_step((u + 1.0) / 2.0);
    (p(u) + 1.0 - p(-u)) / 2.0
}

/// 1 for `r ∈ [1/2, 2]`, 0 outside `[1/4, 4]`, smooth in `log₂ r`.
pub fn cone_cutoff(r: f64) -> f64 {
    if r <= 0.0 {
        return 0.0;
    }
    let u = r.log2().abs();
    1.0 - smooth_step(u - 1.0)
}

/// Radial cutoff equal to 1 on `|ζ| ≤ inner` and 0 on `|ζ| ≥ outer`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Cutoff {
    pub inner: f64,
    pub outer: f64,
}

impl Default for Cutoff {
    fn default() -> Self {
        Self { inner: 1.0, outer: 2.0 }
    }
}

impl Cutoff {
    pub fn validate(&self) -> Result<()> {
        if self.inner > 0.0 && self.outer > self.inner && self.outer.is_finite() {
            Ok(())
        } else {
            Err(Error::Precondition(format!(
                "cutoff needs 0 < inner < outer, got inner={} outer={}",
                self.inner, self.outer
            )))
        }
    }

    pub fn eval(&self, r: f64) -> f64 {
        1.0 - smooth_step((r - self.inner) / (self.outer - self.inner))
    }
}
