//! Exponent bookkeeping: critical orders and target exponents.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `(p₁, p₂)` with `1/p = 1/p₁ + 1/p₂`; `f64::INFINITY` stands for `∞`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LebesgueExponents {
    #[serde(with = "super::report::float")]
    pub p1: f64,
    #[serde(with = "super::report::float")]
    pub p2: f64,
    /// Measure the output in weak `L^{p,∞}` instead of `L^p`.
    #[serde(default)]
    pub weak: bool,
}

impl LebesgueExponents {
    pub fn new(p1: f64, p2: f64) -> Result<Self> {
        for p in [p1, p2] {
            if !(p >= 1.0) {
                return Err(Error::Precondition(format!("exponents must lie in [1, ∞], got {p}")));
            }
        }
        Ok(Self { p1, p2, weak: false })
    }

    /// The Hölder exponent choice for the output, with the weak-type flag
    /// set on the `p < 1`, `p_j = 1` endpoint.
    pub fn holder(p1: f64, p2: f64) -> Result<Self> {
        let mut e = Self::new(p1, p2)?;
        e.weak = e.p() < 1.0 && (p1 == 1.0 || p2 == 1.0);
        Ok(e)
    }

    pub fn inv_p(&self) -> f64 {
        1.0 / self.p1 + 1.0 / self.p2
    }

    /// `p`, which may be below 1 or infinite.
    pub fn p(&self) -> f64 {
        1.0 / self.inv_p()
    }
}

/// `m(p₁,p₂) = n(ρ−1)(max{1/2, 1/p₁, 1/p₂, 1−1/p} + max{1/p−1, 0})`.
pub fn critical_order(p1: f64, p2: f64, rho: f64, n: usize) -> Result<f64> {
    let e = LebesgueExponents::new(p1, p2)?;
    let (a, b) = (1.0 / e.p1, 1.0 / e.p2);
    let inv_p = a + b;
    let head = 0.5f64.max(a).max(b).max(1.0 - inv_p);
    Ok(n as f64 * (rho - 1.0) * (head + (inv_p - 1.0).max(0.0)))
}

/// The two segment formulas bounding the non-Banach region:
/// `n(ρ−1)(2/p₁ + 1/p₂ − 1)` and `n(ρ−1)(2/p₂ + 1/p₁ − 1)`.
///
/// Both are commonly quoted for the triangle `(1,1), (1/2,1/2), (1,0)`; by
/// the symmetry `p₁ ↔ p₂` the second presumably belongs to the triangle
/// `(1,1), (1/2,1/2), (0,1)`. Both values are returned so callers can
/// compare against either reading.
pub fn segment_orders(p1: f64, p2: f64, rho: f64, n: usize) -> Result<(f64, f64)> {
    let e = LebesgueExponents::new(p1, p2)?;
    let (a, b) = (1.0 / e.p1, 1.0 / e.p2);
    let k = n as f64 * (rho - 1.0);
    Ok((k * (2.0 * a + b - 1.0), k * (2.0 * b + a - 1.0)))
}

/// `m_s = 2n(ρ−1) − ρs`.
pub fn sobolev_order(s: f64, rho: f64, n: usize) -> f64 {
    2.0 * n as f64 * (rho - 1.0) - rho * s
}

/// Which exponent pairs the Sobolev relation `1/q = 1/p₁ + 1/p₂ − s/n` uses.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum SobolevReading {
    /// `1/q = 1/p₁ + 1/p₂ − s/n`.
    #[default]
    Distinct,
    /// `1/q = 2/p₁ − s/n`, with the first exponent repeated.
    Repeated,
}

/// Output exponent `q` under the given reading; `None` when `1/q ≤ 0`.
pub fn sobolev_exponent(p1: f64, p2: f64, s: f64, n: usize, reading: SobolevReading) -> Option<f64> {
    let inv = match reading {
        SobolevReading::Distinct => 1.0 / p1 + 1.0 / p2,
        SobolevReading::Repeated => 2.0 / p1,
    } - s / n as f64;
    (inv > 0.0).then(|| 1.0 / inv)
}

/// Exact target slope of annular pieces, `(1−ρ)n + m`.
pub fn annulus_slope(rho: f64, m: f64, n: usize) -> f64 {
    (1.0 - rho) * n as f64 + m
}

/// Exact kernel decay exponent `−(m + M + 2n)/ρ`.
pub fn kernel_decay_exponent(m: f64, derivatives: u32, rho: f64, n: usize) -> f64 {
    -(m + derivatives as f64 + 2.0 * n as f64) / rho
}

/// Kernel Hölder-difference exponent `−(m + ε + 2n)/ρ`.
pub fn kernel_holder_exponent(m: f64, eps: f64, rho: f64, n: usize) -> f64 {
    -(m + eps + 2.0 * n as f64) / rho
}

/// Exponent of `C(σ₂)` in the cube diameter, `n/2 − ρn`.
pub fn c_sigma_exponent(rho: f64, n: usize) -> f64 {
    n as f64 / 2.0 - rho * n as f64
}
