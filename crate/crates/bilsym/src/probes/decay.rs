//! Kernel decay in the distance `S = |u| + |v| + |u−v|`.

use serde::{Deserialize, Serialize};

use super::exponents::{kernel_decay_exponent, kernel_holder_exponent};
use super::fit::fit_middle_quartiles;
use super::report::{Comparison, ProbeReport};
use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::operator::{kernel_slice, KernelSlice, Taper};
use crate::symbol::{Symbol, SymbolClassParams};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "mode")]
pub enum DecayMode {
    /// Envelope of `|K|`.
    Power,
    /// Envelope of `|K(u+h e₁, v) − K(u, v)| / h^ε`.
    Holder { eps: f64 },
}

/// Number of log-spaced bins over the fit window.
pub const DECAY_BINS: usize = 32;

/// Envelope `(S_bin, max |·|)` of a kernel quantity over log-spaced bins in
/// `[s_min, s_max]`; empty bins are dropped.
pub fn envelope(slice: &KernelSlice, s_min: f64, s_max: f64, bins: usize, mode: DecayMode) -> Vec<(f64, f64)> {
    let grid = &slice.grid;
    let len = grid.len();
    let n = grid.points();
    let (la, lb) = (s_min.ln(), s_max.ln());
    let mut best = vec![0.0f64; bins];
    let h = grid.spacing();
    let shift = |u: usize| -> usize {
        let mut a = grid.axis_indices(u);
        a[0] = (a[0] + 1) % n;
        grid.flat_index(a)
    };
    for u in 0..len {
        for v in 0..len {
            let s = slice.metric[u * len + v];
            if s < s_min || s > s_max {
                continue;
            }
            let b = (((s.ln() - la) / (lb - la)) * bins as f64).floor().min(bins as f64 - 1.0) as usize;
            let val = match mode {
                DecayMode::Power => slice.value(u, v).norm(),
                DecayMode::Holder { eps } => (slice.value(shift(u), v) - slice.value(u, v)).norm() / h.powf(eps),
            };
            best[b] = best[b].max(val);
        }
    }
    best.iter()
        .enumerate()
        .filter(|(_, v)| **v > 0.0)
        .map(|(i, v)| ((la + (i as f64 + 0.5) / bins as f64 * (lb - la)).exp(), *v))
        .collect()
}

/// Fits the decay exponent of the kernel of `sigma` over `S ∈ [8h, L/4]`.
///
/// Power mode is compared with `−(m+M+2n)/ρ` (here `M = 0`) within
/// `tolerance`. Holder mode uses one-step differences, which decay at least
/// as fast as the Hölder bound; it passes when the fitted slope is at most
/// `−(m+ε+2n)/ρ + tolerance`.
pub fn decay_probe(
    sigma: &Symbol,
    class: SymbolClassParams,
    mode: DecayMode,
    grid: &Grid,
    tolerance: f64,
) -> Result<ProbeReport> {
    let n = grid.dim();
    let (m, rho) = (class.m, class.rho);
    if !(rho > 0.0) {
        return Err(Error::Precondition("decay probe needs ρ > 0".into()));
    }
    let target = match mode {
        DecayMode::Power => {
            if !(m + 2.0 * n as f64 > 0.0) {
                return Err(Error::Precondition(format!(
                    "m + 2n = {} ≤ 0: the kernel is bounded and has no power singularity",
                    m + 2.0 * n as f64
                )));
            }
            kernel_decay_exponent(m, 0, rho, n)
        }
        DecayMode::Holder { eps } => {
            if !(eps > 0.0 && eps < 1.0) || !(m + eps + 2.0 * n as f64 > 0.0) {
                return Err(Error::Precondition(format!("Hölder mode needs ε in (0,1) and m+ε+2n > 0, got ε={eps}")));
            }
            kernel_holder_exponent(m, eps, rho, n)
        }
    };
    let (s_min, s_max) = (8.0 * grid.spacing(), grid.period() / 4.0);
    if s_max / s_min < 8.0 {
        return Err(Error::Precondition(format!(
            "fit window [{s_min:.3e}, {s_max:.3e}] spans less than a factor 8 in S"
        )));
    }
    let slice = kernel_slice(sigma, 0, grid, Taper::Auto)?;
    let env = envelope(&slice, s_min, s_max, DECAY_BINS, mode);
    let (ls, lk): (Vec<f64>, Vec<f64>) = env.iter().map(|(s, k)| (s.ln(), k.ln())).unzip();
    if ls.len() < 8 {
        return Err(Error::Precondition(format!("only {} nonempty bins in the fit window", ls.len())));
    }
    let fit = fit_middle_quartiles(&ls, &lk)?;
    let mut report = ProbeReport::new("decay", "fitted log-log slope of kernel envelope")
        .param("symbol", sigma.name())
        .param("class", class)
        .param("mode", mode)
        .param("points", grid.points())
        .param("period", grid.period())
        .param("dim", n)
        .param("window", [s_min, s_max])
        .param("taper", slice.taper)
        .columns(&["s", "envelope"]);
    for (s, k) in env {
        report.push(vec![s, k]);
    }
    report.note(format!("fit over {} bins, rms {:.3e}", fit.points, fit.rms));
    Ok(match mode {
        DecayMode::Power => report.judge(fit.slope, target, tolerance, Comparison::Within),
        DecayMode::Holder { .. } => report.judge(fit.slope, target, tolerance, Comparison::AtMost),
    })
}
