//! Empirical operator norms. Every value here is a lower bound: a maximum
//! over a finite family of inputs.

use num_complex::Complex64;
use rayon::prelude::*;

use super::exponents::{annulus_slope, LebesgueExponents};
use super::families::{pair, trial_rng, Family};
use super::fit::{loglog_slope, spread};
use super::report::{Comparison, ProbeReport};
use crate::error::{Error, Result};
use crate::grid::{lp_norm, weak_lp_quasinorm, ComplexField, Grid};
use crate::operator::{apply, apply_fft_diag, kernel_slice, Taper};
use crate::symbol::{
    annulus_profile, hormander_norm, norm2, radial_cutoff, Sampling, Support, Symbol, SymbolClassParams,
};
use rand::Rng;

/// Ratio `‖T_σ(f,g)‖_p / (‖f‖_{p₁}‖g‖_{p₂})` for one pair; `None` when the
/// denominator vanishes.
pub fn trial_ratio(sigma: &Symbol, exps: &LebesgueExponents, f: &ComplexField, g: &ComplexField) -> Result<Option<f64>> {
    let den = lp_norm(f, exps.p1)? * lp_norm(g, exps.p2)?;
    if !(den > 0.0) {
        return Ok(None);
    }
    let t = apply(sigma, f, g)?.field;
    let num = if exps.weak { weak_lp_quasinorm(&t, exps.p())? } else { lp_norm(&t, exps.p())? };
    Ok(Some(num / den))
}

/// Maximum trial ratio over `trials` draws of `family`.
///
/// With `bound = Some(b)` the report passes when the maximum is at most
/// `b + tolerance`; otherwise it passes when the maximum is finite.
#[allow(clippy::too_many_arguments)]
pub fn opnorm_probe(
    sigma: &Symbol,
    exps: LebesgueExponents,
    family: Family,
    trials: usize,
    grid: &Grid,
    seed: u64,
    bound: Option<f64>,
    tolerance: f64,
) -> Result<ProbeReport> {
    if trials < 20 {
        return Err(Error::Precondition(format!("opnorm probe needs at least 20 trials, got {trials}")));
    }
    let rows: Vec<Result<Option<f64>>> = (0..trials)
        .into_par_iter()
        .map(|i| {
            let (f, g) = pair(grid, family, seed, i);
            trial_ratio(sigma, &exps, &f, &g)
        })
        .collect();
    let mut report = ProbeReport::new("opnorm", "max ratio (lower bound)")
        .param("symbol", sigma.name())
        .param("exponents", exps)
        .param("family", family)
        .param("trials", trials)
        .param("points", grid.points())
        .param("period", grid.period())
        .param("dim", grid.dim())
        .param("seed", seed)
        .columns(&["trial", "ratio"]);
    let mut best = 0.0f64;
    for (i, r) in rows.into_iter().enumerate() {
        match r? {
            Some(v) => {
                best = best.max(v);
                report.push(vec![i as f64, v]);
            }
            None => report.skipped += 1,
        }
    }
    Ok(match bound {
        Some(b) => report.judge(best, b, tolerance, Comparison::AtMost),
        None => report.judge(best, f64::INFINITY, 0.0, Comparison::AtMost),
    })
}

/// [`opnorm_probe`] at several resolutions of the same torus; passes when the
/// maxima agree within `tolerance` (relative spread).
#[allow(clippy::too_many_arguments)]
pub fn opnorm_stability(
    sigma: &Symbol,
    exps: LebesgueExponents,
    family: Family,
    trials: usize,
    dim: usize,
    resolutions: &[usize],
    period: f64,
    seed: u64,
    tolerance: f64,
) -> Result<ProbeReport> {
    let mut report = ProbeReport::new("opnorm_stability", "relative spread of max ratio")
        .param("symbol", sigma.name())
        .param("exponents", exps)
        .param("family", family)
        .param("resolutions", resolutions)
        .param("seed", seed)
        .columns(&["points", "max_ratio"]);
    let mut maxima = Vec::new();
    for &n in resolutions {
        let grid = Grid::new(dim, n, period)?;
        let r = opnorm_probe(sigma, exps, family, trials, &grid, seed, None, 0.0)?;
        maxima.push(r.measured);
        report.push(vec![n as f64, r.measured]);
    }
    Ok(report.judge(spread(&maxima), 0.0, tolerance, Comparison::AtMost))
}

/// Lower bound for `‖T_σ‖_{L^∞×L^∞→L^∞}` by alternating sign alignment on
/// the kernel at node 0: `f ← conj sgn(A g)`, `g ← conj sgn(Aᵀ f)` with
/// `A_{yz} = K(−y, −z) h^{2n}`. Each step can only increase `|fᵀAg|`.
///
/// The first start is seeded from the leading singular pair of `A` (power
/// iteration), which is optimal when `A` is close to rank one; the remaining
/// `starts − 1` are random phases.
pub fn linf_norm_lower_bound(sigma: &Symbol, grid: &Grid, seed: u64, starts: usize, iterations: usize) -> Result<f64> {
    let slice = kernel_slice(sigma, 0, grid, Taper::Auto)?;
    let len = grid.len();
    let n = grid.points();
    let neg = |y: usize| -> usize {
        let a = grid.axis_indices(y);
        let mut b = [0usize; 2];
        for d in 0..grid.dim() {
            b[d] = (n - a[d]) % n;
        }
        grid.flat_index(b)
    };
    let w = grid.cell_volume() * grid.cell_volume();
    let idx: Vec<usize> = (0..len).map(neg).collect();
    let a: Vec<Complex64> = (0..len * len).map(|i| slice.value(idx[i / len], idx[i % len]) * w).collect();
    let sgn = |v: Complex64| if v.norm() > 0.0 { (v / v.norm()).conj() } else { Complex64::new(1.0, 0.0) };
    let times = |g: &[Complex64]| -> Vec<Complex64> {
        a.par_chunks(len).map(|row| row.iter().zip(g).map(|(k, v)| k * v).sum()).collect()
    };
    let times_t = |f: &[Complex64]| -> Vec<Complex64> {
        let mut col = vec![Complex64::new(0.0, 0.0); len];
        for (row, fy) in a.chunks(len).zip(f) {
            for (c, k) in col.iter_mut().zip(row) {
                *c += k * fy;
            }
        }
        col
    };
    let align = |mut g: Vec<Complex64>| -> f64 {
        let mut value = 0.0f64;
        for _ in 0..iterations {
            let f: Vec<Complex64> = times(&g).into_iter().map(sgn).collect();
            let col = times_t(&f);
            g = col.iter().map(|c| sgn(*c)).collect();
            let total: Complex64 = col.iter().zip(&g).map(|(c, v)| c * v).sum();
            value = value.max(total.norm());
        }
        value
    };
    let mut v = vec![Complex64::new(1.0, 0.0); len];
    for _ in 0..40 {
        let u = times(&v);
        let back: Vec<Complex64> = times_t(&u.iter().map(|c| c.conj()).collect::<Vec<_>>());
        let nv = back.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        if !(nv > 0.0) {
            return Ok(0.0);
        }
        v = back.iter().map(|c| c.conj() / nv).collect();
    }
    let mut best = align(v.iter().map(|c| Complex64::from_polar(1.0, c.arg())).collect());
    for s in 1..starts {
        let mut rng = trial_rng(seed, s);
        let g: Vec<Complex64> =
            (0..len).map(|_| Complex64::from_polar(1.0, rng.gen_range(0.0..std::f64::consts::TAU))).collect();
        best = best.max(align(g));
    }
    Ok(best)
}

/// `max ‖T_σ(f,g)‖_∞/(‖f‖_∞‖g‖_∞)` over sign-aligned pairs and `trials`
/// draws of the mixed family.
pub fn linf_ratio(sigma: &Symbol, grid: &Grid, seed: u64, trials: usize) -> Result<(f64, f64)> {
    let aligned = linf_norm_lower_bound(sigma, grid, seed, 4, 12)?;
    let random = (0..trials)
        .into_par_iter()
        .map(|i| -> Result<f64> {
            let (f, g) = pair(grid, Family::Mixed, seed, i);
            let den = f.max_abs() * g.max_abs();
            Ok(if den > 0.0 { apply_fft_diag(sigma, &f, &g)?.field.max_abs() / den } else { 0.0 })
        })
        .collect::<Result<Vec<f64>>>()?
        .into_iter()
        .fold(0.0, f64::max);
    Ok((aligned, random))
}

/// `base` restricted to `R ≤ |(ξ,η)| ≤ 4R` by the dyadic annulus profile.
pub fn annular_piece(base: &Symbol, r: f64) -> Symbol {
    base.times(format!("{}@annulus({r})", base.name()), move |xi, eta| annulus_profile(norm2(xi, eta) / r))
        .with_support(Support::Annulus { inner: r, outer: 4.0 * r })
}

/// `base` restricted to the ball `|(ξ,η)| ≤ 2R`.
pub fn ball_piece(base: &Symbol, r: f64) -> Symbol {
    base.times(format!("{}@ball({r})", base.name()), move |xi, eta| radial_cutoff(norm2(xi, eta) / r))
        .with_support(Support::Ball { radius: 2.0 * r })
}

/// Growth of `‖T_{σ_R}‖_{∞}` for annular pieces `σ_R`, fitted against
/// `R^{(1−ρ)n+m}`.
///
/// `Within` checks a symbol that attains the rate; `AtMost` checks only the
/// upper bound, which is all that membership in the class promises.
#[allow(clippy::too_many_arguments)]
pub fn scaling_probe(
    base: &Symbol,
    rho: f64,
    m: f64,
    radii: &[f64],
    grid: &Grid,
    seed: u64,
    trials: usize,
    comparison: Comparison,
    tolerance: f64,
) -> Result<ProbeReport> {
    if comparison == Comparison::AtLeast {
        return Err(Error::Precondition("scaling probe judges Within or AtMost".into()));
    }
    if radii.len() < 3 {
        return Err(Error::Precondition(format!("scaling probe needs at least 3 radii, got {}", radii.len())));
    }
    if radii.windows(2).any(|w| !(w[1] > w[0])) || !(radii[0] > 0.0) {
        return Err(Error::Precondition("radii must be positive and ascending".into()));
    }
    let top = 4.0 * radii[radii.len() - 1];
    if top > grid.nyquist() {
        return Err(Error::Precondition(format!(
            "outer annulus radius {top} exceeds the Nyquist radius {}",
            grid.nyquist()
        )));
    }
    base.require_x_independent()?;
    let n = grid.dim();
    let mut report = ProbeReport::new("scaling", "log-log slope of sup-norm ratio")
        .param("symbol", base.name())
        .param("rho", rho)
        .param("m", m)
        .param("radii", radii)
        .param("points", grid.points())
        .param("period", grid.period())
        .param("dim", n)
        .param("seed", seed)
        .columns(&["radius", "aligned", "random", "ratio"]);
    let mut ratios = Vec::new();
    for &r in radii {
        let piece = annular_piece(base, r);
        let (aligned, random) = linf_ratio(&piece, grid, seed, trials)?;
        let ratio = aligned.max(random);
        ratios.push(ratio);
        report.push(vec![r, aligned, random, ratio]);
    }
    let fit = loglog_slope(radii, &ratios)?;
    report.note("ratios are lower bounds: maxima over sign-aligned and random inputs");
    report.note(format!("fit rms {:.3e}", fit.rms));
    Ok(report.judge(fit.slope, annulus_slope(rho, m, n), tolerance, comparison))
}

/// Small-support branch: `‖T_{σ_R}‖_∞ / ‖σ_R‖_{0,2N}` for ball pieces of
/// radius `R ≤ 1` should decay at least like `R^{2n}`.
pub fn small_support_probe(
    base: &Symbol,
    class: SymbolClassParams,
    radii: &[f64],
    grid: &Grid,
    seed: u64,
    tolerance: f64,
) -> Result<ProbeReport> {
    if radii.len() < 3 || radii.iter().any(|&r| !(r > 0.0 && r <= 1.0)) {
        return Err(Error::Precondition("small-support probe needs at least 3 radii in (0, 1]".into()));
    }
    if radii.iter().any(|&r| r < 4.0 * grid.frequency_step()) {
        return Err(Error::Precondition("ball radius below four frequency steps".into()));
    }
    let n = grid.dim();
    let depth = 2 * (n as u32 + 1);
    let sampling = Sampling::new(n).with_levels(-8, 4);
    let mut report = ProbeReport::new("small_support", "log-log slope of norm / seminorm")
        .param("symbol", base.name())
        .param("radii", radii)
        .param("points", grid.points())
        .param("period", grid.period())
        .param("seminorm_order", depth)
        .columns(&["radius", "norm", "seminorm", "ratio"]);
    let mut ratios = Vec::new();
    for &r in radii {
        let piece = ball_piece(base, r);
        let norm = linf_norm_lower_bound(&piece, grid, seed, 2, 12)?;
        let semi = hormander_norm(&piece, class, 0, depth.min(4), &sampling)?.value;
        ratios.push(norm / semi);
        report.push(vec![r, norm, semi, norm / semi]);
    }
    let fit = loglog_slope(radii, &ratios)?;
    Ok(report.judge(fit.slope, 2.0 * n as f64, tolerance, Comparison::AtLeast))
}
