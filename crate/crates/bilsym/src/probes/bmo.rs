//! `L^∞ × L^∞ → BMO` and the dilation decay of `C_{β,γ}`.

use rayon::prelude::*;

use super::families::{pair, Family};
use super::fit::spread;
use super::report::{Comparison, ProbeReport};
use crate::error::{Error, Result};
use crate::grid::{bmo_norm, Grid};
use crate::operator::apply;
use crate::symbol::{c_seminorm_at, dilate_symbol, multi_indices, FreqPoint, Sampling, Symbol};

/// BMO ratio `bmo(T_σ(f,g)) / (‖f‖_∞‖g‖_∞)` maximized over random `±1` step
/// pairs, at each resolution. Passes when the maxima agree within
/// `tolerance`. The sup-norm ratio is kept alongside for contrast.
#[allow(clippy::too_many_arguments)]
pub fn bmo_probe(
    sigma: &Symbol,
    dim: usize,
    trials: usize,
    resolutions: &[usize],
    period: f64,
    seed: u64,
    tolerance: f64,
) -> Result<ProbeReport> {
    let class = sigma.class().ok_or_else(|| Error::Precondition(format!("{} declares no class", sigma.name())))?;
    let expected = dim as f64 * (class.rho - 1.0);
    if !(class.rho < 0.5) || class.delta != 0.0 || (class.m - expected).abs() > 1e-12 {
        return Err(Error::Precondition(format!(
            "BMO probe needs a class with m = n(ρ−1), δ = 0, ρ < 1/2; {} declares ({}, {}, {})",
            sigma.name(),
            class.m,
            class.rho,
            class.delta
        )));
    }
    let mut report = ProbeReport::new("bmo", "relative spread of the BMO ratio")
        .param("symbol", sigma.name())
        .param("class", class)
        .param("resolutions", resolutions)
        .param("period", period)
        .param("trials", trials)
        .param("seed", seed)
        .columns(&["points", "bmo_ratio", "sup_ratio"]);
    let mut maxima = Vec::new();
    for &n in resolutions {
        let grid = Grid::new(dim, n, period)?;
        let rows: Vec<Result<(f64, f64)>> = (0..trials)
            .into_par_iter()
            .map(|i| {
                let (f, g) = pair(&grid, Family::Steps, seed, i);
                let t = apply(sigma, &f, &g)?.field;
                let den = f.max_abs() * g.max_abs();
                Ok((bmo_norm(&t)? / den, t.max_abs() / den))
            })
            .collect();
        let (mut b, mut s) = (0.0f64, 0.0f64);
        for r in rows {
            let (x, y) = r?;
            b = b.max(x);
            s = s.max(y);
        }
        maxima.push(b);
        report.push(vec![n as f64, b, s]);
    }
    Ok(report.judge(spread(&maxima), 0.0, tolerance, Comparison::AtMost))
}

/// Checks `C_{β,γ}(σ_λ) ≤ λ^{(1−ρ)(|β|+|γ|)} C_{β,γ}(σ)` for `|β|, |γ| ≤ 2`,
/// `|β|+|γ| ≤ 4`.
///
/// `C(σ_λ)` is sampled on the point set `P` and `C(σ)` on `⋃_λ λP`, so the
/// sampled inequality holds exactly up to finite-difference error.
pub fn c_seminorm_decay_probe(
    sigma: &Symbol,
    rho: f64,
    lambdas: &[f64],
    sampling: &Sampling,
    tolerance: f64,
) -> Result<ProbeReport> {
    sigma.require_x_independent()?;
    if lambdas.iter().any(|&l| !(l > 0.0 && l <= 1.0)) {
        return Err(Error::Precondition("dilation factors must lie in (0, 1]".into()));
    }
    let dim = sampling.dim;
    let points = sampling.frequency_points();
    let mut union: Vec<FreqPoint> = Vec::new();
    for &l in lambdas {
        union.extend(points.iter().map(|p| {
            let mut q = *p;
            for d in 0..dim {
                q.xi[d] *= l;
                q.eta[d] *= l;
            }
            q
        }));
    }
    let indices = multi_indices(dim, 2);
    let mut pairs = Vec::new();
    for b in &indices {
        for c in &indices {
            if b.iter().sum::<u32>() + c.iter().sum::<u32>() <= 4 {
                pairs.push((b.clone(), c.clone()));
            }
        }
    }
    let mut report = ProbeReport::new("cseminorm_decay", "max of C(σ_λ) / (λ^{(1−ρ)k} C(σ))")
        .param("symbol", sigma.name())
        .param("rho", rho)
        .param("lambdas", lambdas)
        .columns(&["lambda", "beta", "gamma", "c_dilated", "c_base", "ratio"]);
    let code = |v: &[u32]| v.iter().fold(0u32, |acc, d| acc * 10 + d) as f64;
    let mut worst = 0.0f64;
    for (b, c) in &pairs {
        let base = c_seminorm_at(sigma, b, c, rho, dim, &union)?;
        let k = (b.iter().sum::<u32>() + c.iter().sum::<u32>()) as f64;
        for &l in lambdas {
            let dilated = c_seminorm_at(&dilate_symbol(sigma, l)?, b, c, rho, dim, &points)?;
            let bound = l.powf((1.0 - rho) * k) * base;
            let ratio = if bound > 0.0 {
                dilated / bound
            } else if dilated <= 1e-12 {
                0.0
            } else {
                f64::INFINITY
            };
            worst = worst.max(ratio);
            report.push(vec![l, code(b), code(c), dilated, base, ratio]);
        }
    }
    Ok(report.judge(worst, 1.0, tolerance, Comparison::AtMost))
}
