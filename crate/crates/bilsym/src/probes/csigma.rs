//! Dependence of `C(σ)` on the scale of a high-frequency cut.

use super::exponents::c_sigma_exponent;
use super::fit::loglog_slope;
use super::report::{Comparison, ProbeReport};
use crate::decompose::low_high_split;
use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::operator::{c_sigma_constant, CSigmaOptions};
use crate::symbol::Symbol;

/// `C(σθ_d)` for the high piece of `base` at each scale `d`, fitted against
/// `d^{n/2−ρn}`. Passes when the slope is within `tolerance` relative to the
/// target. The order-0 part of `C` is fitted as well and recorded in the notes.
pub fn c_sigma_scaling_probe(
    base: &Symbol,
    rho: f64,
    scales: &[f64],
    grid: &Grid,
    opts: &CSigmaOptions,
    tolerance: f64,
) -> Result<ProbeReport> {
    if scales.len() < 3 || scales.iter().any(|&d| !(d > 0.0 && d <= 1.0)) {
        return Err(Error::Precondition("C(σ) scaling needs at least 3 scales in (0, 1]".into()));
    }
    let n = grid.dim();
    let target = c_sigma_exponent(rho, n);
    let mut report = ProbeReport::new("c_sigma_scaling", "relative error of the fitted C(σ) exponent")
        .param("symbol", base.name())
        .param("rho", rho)
        .param("scales", scales)
        .param("points", grid.points())
        .param("period", grid.period())
        .param("max_xi_order", opts.max_xi_order)
        .param("target_exponent", target)
        .columns(&["d", "c_sigma", "order0", "worst_order"]);
    let (mut values, mut order0) = (Vec::new(), Vec::new());
    for &d in scales {
        let (_, high) = low_high_split(base, d)?;
        let r = c_sigma_constant(&high, grid, opts)?;
        let worst: u32 = r.alpha.iter().sum();
        values.push(r.value);
        order0.push(r.per_xi_order[0]);
        report.push(vec![d, r.value, r.per_xi_order[0], worst as f64]);
    }
    let fit = loglog_slope(scales, &values)?;
    let fit0 = loglog_slope(scales, &order0)?;
    report.note(format!("fitted exponent {:.4}, target {:.4}", fit.slope, target));
    report.note(format!("order-0 part alone fits exponent {:.4}", fit0.slope));
    let rel = (fit.slope - target).abs() / target.abs().max(f64::MIN_POSITIVE);
    Ok(report.judge(rel, 0.0, tolerance, Comparison::AtMost))
}
