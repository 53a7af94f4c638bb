//! Sampled Hörmander seminorms.
//!
//! A supremum over all of `ℝ²ⁿ` is replaced by a maximum over nested dyadic
//! shells `|(ξ,η)| ≈ 2^j`. Per-shell maxima are kept so callers can see the
//! trend instead of trusting a single number.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::diff::{mixed_derivative, richardson_step};
use super::{norm, Symbol, SymbolClassParams};
use crate::error::{Error, Result};

/// Frequency sample layout.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Sampling {
    pub dim: usize,
    /// Shells have radii `2^j` for `min_level ≤ j ≤ max_level`.
    pub min_level: i32,
    pub max_level: i32,
    /// Angles per shell in the `(|ξ|, |η|)` plane.
    pub directions: usize,
    /// Spatial points, used for x-dependent symbols only.
    pub x_points: Vec<[f64; 2]>,
}

impl Sampling {
    pub fn new(dim: usize) -> Self {
        Self {
            dim,
            min_level: -3,
            max_level: 9,
            directions: 32,
            x_points: vec![[0.0, 0.0], [0.71, 0.29], [1.93, 2.4], [3.37, 0.83]],
        }
    }

    pub fn with_levels(mut self, min_level: i32, max_level: i32) -> Self {
        self.min_level = min_level;
        self.max_level = max_level;
        self
    }

    pub fn with_directions(mut self, directions: usize) -> Self {
        self.directions = directions;
        self
    }

    pub fn with_x_points(mut self, x_points: Vec<[f64; 2]>) -> Self {
        self.x_points = x_points;
        self
    }

    /// Frequency points, grouped by shell.
    ///
    /// Each shell has `directions` points on a circle in the `(|ξ|, |η|)`
    /// plane (angles offset from the axes) plus anisotropic points
    /// `(±r^a, ±r)` and `(±r, ±r^a)` for `a ∈ {0, 1/4, 1/2, 3/4}`, which reach
    /// parabolic regions such as `|η| ≈ |ξ|²` that a coarse angular grid misses.
    pub fn frequency_points(&self) -> Vec<FreqPoint> {
        let dirs: Vec<([f64; 2], [f64; 2])> = if self.dim == 1 {
            vec![([1.0, 0.0], [1.0, 0.0])]
        } else {
            let s = std::f64::consts::FRAC_1_SQRT_2;
            vec![
                ([1.0, 0.0], [1.0, 0.0]),
                ([1.0, 0.0], [0.0, 1.0]),
                ([s, s], [s, -s]),
                ([0.0, 1.0], [s, s]),
            ]
        };
        let per_pair = if self.dim == 1 { self.directions } else { self.directions.div_ceil(2) };
        let mut out = Vec::new();
        for level in self.min_level..=self.max_level {
            let r = 2f64.powi(level);
            let mut planar: Vec<(f64, f64)> = (0..per_pair)
                .map(|i| {
                    let t = std::f64::consts::TAU * (i as f64 + 0.5) / per_pair as f64;
                    (r * t.cos(), r * t.sin())
                })
                .collect();
            if r > 1.0 {
                for a in [0.0, 0.25, 0.5, 0.75] {
                    let small = r.powf(a);
                    for (s1, s2) in [(1.0, 1.0), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0)] {
                        planar.push((s1 * small, s2 * r));
                        planar.push((s1 * r, s2 * small));
                    }
                }
            }
            for &(u, v) in &dirs {
                for &(p, q) in &planar {
                    let mut xi = [0.0; 2];
                    let mut eta = [0.0; 2];
                    for d in 0..self.dim {
                        xi[d] = p * u[d];
                        eta[d] = q * v[d];
                    }
                    out.push(FreqPoint { level, xi, eta });
                }
            }
        }
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FreqPoint {
    pub level: i32,
    pub xi: [f64; 2],
    pub eta: [f64; 2],
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WorstPoint {
    pub alpha: Vec<u32>,
    pub beta: Vec<u32>,
    pub gamma: Vec<u32>,
    pub x: [f64; 2],
    pub xi: [f64; 2],
    pub eta: [f64; 2],
    pub value: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HormanderNormReport {
    pub k: u32,
    pub n: u32,
    pub params: SymbolClassParams,
    pub value: f64,
    /// Maximum over each shell, indexed from `min_level`.
    pub shell_values: Vec<f64>,
    pub min_level: i32,
    pub worst: Vec<WorstPoint>,
    /// Base step of first-order differences before the `(1+|ξ|+|η|)^ρ` scaling.
    pub step: f64,
    pub warnings: Vec<String>,
}

/// All multi-indices of length `dim` with total order at most `max`.
pub fn multi_indices(dim: usize, max: u32) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    if dim == 1 {
        for a in 0..=max {
            out.push(vec![a]);
        }
    } else {
        for total in 0..=max {
            for a in (0..=total).rev() {
                out.push(vec![a, total - a]);
            }
        }
    }
    out
}

#[derive(Clone, Debug)]
struct Row {
    point: usize,
    x: usize,
    alpha: usize,
    beta: usize,
    gamma: usize,
    abs: f64,
    sensitivity: f64,
}

/// Derivative magnitudes on a sample set, reusable across weight exponents.
#[derive(Clone, Debug)]
pub struct DerivativeTable {
    sampling: Sampling,
    points: Vec<FreqPoint>,
    indices_x: Vec<Vec<u32>>,
    indices_f: Vec<Vec<u32>>,
    rows: Vec<Row>,
    step_rho: f64,
}

impl DerivativeTable {
    pub fn build(sigma: &Symbol, sampling: &Sampling, k: u32, n: u32, step_rho: f64) -> Result<Self> {
        let dim = sampling.dim;
        let points = sampling.frequency_points();
        let indices_x = multi_indices(dim, k);
        let indices_f = multi_indices(dim, n);
        let x_points: Vec<[f64; 2]> =
            if sigma.is_x_independent() { vec![[0.0; 2]] } else { sampling.x_points.clone() };
        let jobs: Vec<(usize, usize)> =
            (0..points.len()).flat_map(|p| (0..x_points.len()).map(move |x| (p, x))).collect();
        let per_job: Vec<Result<Vec<Row>>> = jobs
            .par_iter()
            .map(|&(p, xi_idx)| {
                let pt = points[p];
                let x = x_points[xi_idx];
                let w = 1.0 + norm(&pt.xi[..dim]) + norm(&pt.eta[..dim]);
                let f = |c: &[f64]| sigma.eval(&c[..dim], &c[dim..2 * dim], &c[2 * dim..3 * dim]);
                let mut base = [0.0; 6];
                for d in 0..dim {
                    base[d] = x[d];
                    base[dim + d] = pt.xi[d];
                    base[2 * dim + d] = pt.eta[d];
                }
                let mut rows = Vec::new();
                for (ia, a) in indices_x.iter().enumerate() {
                    let a_ord: u32 = a.iter().sum();
                    if a_ord > 0 && sigma.is_x_independent() {
                        continue;
                    }
                    for (ib, b) in indices_f.iter().enumerate() {
                        for (ig, g) in indices_f.iter().enumerate() {
                            let total = a_ord + b.iter().sum::<u32>() + g.iter().sum::<u32>();
                            let h = richardson_step(total);
                            let mut orders = [0u32; 6];
                            let mut steps = [0.0; 6];
                            for d in 0..dim {
                                orders[d] = a[d];
                                orders[dim + d] = b[d];
                                orders[2 * dim + d] = g[d];
                                steps[d] = h;
                                steps[dim + d] = h * w.powf(step_rho);
                                steps[2 * dim + d] = h * w.powf(step_rho);
                            }
                            let est = mixed_derivative(&f, &base[..3 * dim], &orders[..3 * dim], &steps[..3 * dim]);
                            let abs = est.value.norm();
                            if !abs.is_finite() {
                                return Err(Error::NonFinite(format!(
                                    "derivative of {} at ξ={:?}, η={:?}",
                                    sigma.name(),
                                    &pt.xi[..dim],
                                    &pt.eta[..dim]
                                )));
                            }
                            rows.push(Row {
                                point: p,
                                x: xi_idx,
                                alpha: ia,
                                beta: ib,
                                gamma: ig,
                                abs,
                                sensitivity: est.sensitivity(),
                            });
                        }
                    }
                }
                Ok(rows)
            })
            .collect();
        let mut rows = Vec::new();
        for r in per_job {
            rows.extend(r?);
        }
        let mut sampling = sampling.clone();
        sampling.x_points = x_points;
        Ok(Self { sampling, points, indices_x, indices_f, rows, step_rho })
    }

    fn weight_log(&self, p: usize) -> f64 {
        let dim = self.sampling.dim;
        let pt = &self.points[p];
        (1.0 + norm(&pt.xi[..dim]) + norm(&pt.eta[..dim])).ln()
    }

    fn weighted(&self, row: &Row, params: &SymbolClassParams, k: u32, n: u32) -> Option<f64> {
        let a: u32 = self.indices_x[row.alpha].iter().sum();
        let b: u32 = self.indices_f[row.beta].iter().sum();
        let g: u32 = self.indices_f[row.gamma].iter().sum();
        if a > k || b > n || g > n {
            return None;
        }
        if row.abs == 0.0 {
            return Some(0.0);
        }
        let expo = -params.m - params.delta * a as f64 + params.rho * (b + g) as f64;
        Some(row.abs * (expo * self.weight_log(row.point)).exp())
    }

    /// Weighted maximum per shell for the given class parameters.
    pub fn shell_maxima(&self, params: &SymbolClassParams, k: u32, n: u32) -> Vec<f64> {
        let levels = (self.sampling.max_level - self.sampling.min_level + 1) as usize;
        let mut out = vec![0.0f64; levels];
        for row in &self.rows {
            if let Some(v) = self.weighted(row, params, k, n) {
                let l = (self.points[row.point].level - self.sampling.min_level) as usize;
                out[l] = out[l].max(v);
            }
        }
        out
    }

    pub fn report(&self, params: SymbolClassParams, k: u32, n: u32) -> HormanderNormReport {
        let dim = self.sampling.dim;
        let shell_values = self.shell_maxima(&params, k, n);
        let value = shell_values.iter().copied().fold(0.0, f64::max);
        let mut worst: Vec<Option<(f64, &Row)>> =
            vec![None; self.indices_x.len() * self.indices_f.len() * self.indices_f.len()];
        let mut warnings = Vec::new();
        for row in &self.rows {
            let Some(v) = self.weighted(row, &params, k, n) else { continue };
            let slot = (row.alpha * self.indices_f.len() + row.beta) * self.indices_f.len() + row.gamma;
            if worst[slot].is_none_or(|(best, _)| v > best) {
                worst[slot] = Some((v, row));
            }
            if row.sensitivity > 0.05 && v > 1e-6 * value.max(1e-300) && warnings.len() < 16 {
                let pt = &self.points[row.point];
                warnings.push(format!(
                    "step sensitivity {:.3} at ξ={:?}, η={:?}, orders α={:?} β={:?} γ={:?}",
                    row.sensitivity,
                    &pt.xi[..dim],
                    &pt.eta[..dim],
                    self.indices_x[row.alpha],
                    self.indices_f[row.beta],
                    self.indices_f[row.gamma]
                ));
            }
        }
        let worst = worst
            .into_iter()
            .flatten()
            .map(|(v, row)| {
                let pt = &self.points[row.point];
                WorstPoint {
                    alpha: self.indices_x[row.alpha].clone(),
                    beta: self.indices_f[row.beta].clone(),
                    gamma: self.indices_f[row.gamma].clone(),
                    x: self.sampling.x_points[row.x],
                    xi: pt.xi,
                    eta: pt.eta,
                    value: v,
                }
            })
            .collect();
        HormanderNormReport {
            k,
            n,
            params,
            value,
            shell_values,
            min_level: self.sampling.min_level,
            worst,
            step: richardson_step(1),
            warnings,
        }
    }

    pub fn step_rho(&self) -> f64 {
        self.step_rho
    }
}

/// Sampled `‖σ‖_{K,N}` for the class `params`.
///
/// Derivatives are central differences at steps `h₀` and `h₀/2` with one
/// Richardson step, `h₀ = h(order)·(1+|ξ|+|η|)^ρ` in the frequency variables.
pub fn hormander_norm(
    sigma: &Symbol,
    params: SymbolClassParams,
    k: u32,
    n: u32,
    sampling: &Sampling,
) -> Result<HormanderNormReport> {
    if k > 4 || n > 4 {
        return Err(Error::CostGuard(format!("derivative depths K={k}, N={n} exceed 4")));
    }
    let table = DerivativeTable::build(sigma, sampling, k, n, params.rho)?;
    Ok(table.report(params, k, n))
}

/// Sampled `C_{β,γ}(σ) = sup |∂^β_ξ ∂^γ_η σ| (1+|ξ|+|η|)^{ρ(|β|+|γ|)}`.
pub fn c_seminorm(sigma: &Symbol, beta: &[u32], gamma: &[u32], rho: f64, sampling: &Sampling) -> Result<f64> {
    c_seminorm_at(sigma, beta, gamma, rho, sampling.dim, &sampling.frequency_points())
}

/// [`c_seminorm`] over an explicit point set.
pub fn c_seminorm_at(
    sigma: &Symbol,
    beta: &[u32],
    gamma: &[u32],
    rho: f64,
    dim: usize,
    points: &[FreqPoint],
) -> Result<f64> {
    sigma.require_x_independent()?;
    if beta.len() != dim || gamma.len() != dim {
        return Err(Error::Precondition("multi-index length must equal the dimension".into()));
    }
    let total: u32 = beta.iter().sum::<u32>() + gamma.iter().sum::<u32>();
    let h = richardson_step(total);
    let vals: Vec<Result<f64>> = points
        .par_iter()
        .map(|pt| {
            let w = 1.0 + norm(&pt.xi[..dim]) + norm(&pt.eta[..dim]);
            let f = |c: &[f64]| sigma.eval_freq(&c[..dim], &c[dim..2 * dim]);
            let mut base = [0.0; 4];
            let mut orders = [0u32; 4];
            let mut steps = [0.0; 4];
            for d in 0..dim {
                base[d] = pt.xi[d];
                base[dim + d] = pt.eta[d];
                orders[d] = beta[d];
                orders[dim + d] = gamma[d];
                steps[d] = h * w.powf(rho);
                steps[dim + d] = h * w.powf(rho);
            }
            let est = mixed_derivative(&f, &base[..2 * dim], &orders[..2 * dim], &steps[..2 * dim]);
            let v = est.value.norm() * w.powf(rho * total as f64);
            if v.is_finite() {
                Ok(v)
            } else {
                Err(Error::NonFinite(format!("C seminorm of {} at {:?}", sigma.name(), pt)))
            }
        })
        .collect();
    let mut best = 0.0f64;
    for v in vals {
        best = best.max(v?);
    }
    Ok(best)
}

/// Result of [`classify_order`]: the least stable order lies in `(lo, hi]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OrderEstimate {
    pub lo: f64,
    pub hi: f64,
    pub converged: bool,
}

impl OrderEstimate {
    pub fn value(&self) -> Option<f64> {
        self.converged.then_some(self.hi)
    }
}

/// Radii `2^j`, `j = 4..9`, over which stability is judged.
pub const STABILITY_LEVELS: (i32, i32) = (4, 9);
/// Largest growth of the cumulative norm counted as stable.
pub const STABILITY_GROWTH: f64 = 1.05;

/// Least `m` (to 0.01) for which the sampled `‖σ‖_{K,N}` under `(m,ρ,δ)`
/// grows by less than 5% between radius `2⁴` and radius `2⁹`.
pub fn classify_order(sigma: &Symbol, rho: f64, delta: f64, k: u32, n: u32) -> Result<OrderEstimate> {
    classify_order_with(sigma, rho, delta, k, n, &Sampling::new(1).with_levels(-3, STABILITY_LEVELS.1))
}

pub fn classify_order_with(
    sigma: &Symbol,
    rho: f64,
    delta: f64,
    k: u32,
    n: u32,
    sampling: &Sampling,
) -> Result<OrderEstimate> {
    if k > 4 || n > 4 {
        return Err(Error::CostGuard(format!("derivative depths K={k}, N={n} exceed 4")));
    }
    let table = DerivativeTable::build(sigma, sampling, k, n, rho)?;
    let (lo_level, hi_level) = STABILITY_LEVELS;
    let stable = |m: f64| -> Result<bool> {
        let params = SymbolClassParams::new(m, rho, delta)?;
        let shells = table.shell_maxima(&params, k, n);
        let cumulative = |level: i32| -> f64 {
            let upto = (level - sampling.min_level) as usize;
            shells[..=upto].iter().copied().fold(0.0, f64::max)
        };
        let a = cumulative(lo_level);
        let b = cumulative(hi_level);
        Ok(a > 0.0 && b <= STABILITY_GROWTH * a || a == 0.0 && b == 0.0)
    };
    let (mut lo, mut hi) = (-20.0, 20.0);
    if stable(lo)? || !stable(hi)? {
        return Ok(OrderEstimate { lo, hi, converged: false });
    }
    while hi - lo > 0.01 {
        let mid = 0.5 * (lo + hi);
        if stable(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(OrderEstimate { lo, hi, converged: true })
}
