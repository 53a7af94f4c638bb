//! `L² × L² → L²` constants.
//!
//! Both constants measure slices `η ↦ σ(ξ−η, η)` in the frequency-lattice
//! `L²` norm `(L⁻ⁿ Σ_η |·|²)^{1/2}`, the same weight that makes the discrete
//! Plancherel identity exact. With that weight the Cauchy–Schwarz bound
//! `‖T_τ(f,g)‖₂ ≤ cs_bound_rhs(τ) ‖f‖₂ ‖g‖₂` holds on the lattice with
//! constant exactly 1.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{pairwise_sum, Grid};
use crate::symbol::{mixed_derivative, richardson_step, Symbol};

/// `sup_ζ (L⁻ⁿ Σ_η |τ(ζ⊖η, η)|²)^{1/2}` with `⊖` the wrapped lattice difference,
/// matching the aliasing of the discrete operator.
pub fn cs_bound_rhs(tau: &Symbol, grid: &Grid) -> Result<f64> {
    tau.require_x_independent()?;
    let dim = grid.dim();
    let len = grid.len();
    let table: Vec<f64> = (0..len * len)
        .into_par_iter()
        .map(|i| {
            let xi = grid.frequency(i / len);
            let eta = grid.frequency(i % len);
            tau.eval_freq(&xi[..dim], &eta[..dim]).norm_sqr()
        })
        .collect();
    let best = (0..len)
        .into_par_iter()
        .map(|zeta| {
            let terms: Vec<f64> = (0..len).map(|eta| table[grid.alias_diff(zeta, eta) * len + eta]).collect();
            pairwise_sum(&terms)
        })
        .reduce(|| 0.0, f64::max);
    if !best.is_finite() {
        return Err(Error::Divergence(format!("slice norm of {} is not finite", tau.name())));
    }
    Ok((grid.frequency_cell() * best).sqrt())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CSigmaOptions {
    /// Bound on `|β|` for `∂_y`; defaults to `[n/2] + 1`.
    pub max_y_order: u32,
    /// Bound on `|α|` for `∂_ξ`; defaults to `2(2n+1)`.
    pub max_xi_order: u32,
    /// Spatial points `y` (x-dependent symbols only).
    pub y_points: Vec<[f64; 2]>,
    /// Frequency nodes `ξ` over which the supremum is taken; all nodes if empty.
    pub xi_nodes: Vec<usize>,
}

impl CSigmaOptions {
    pub fn for_dim(dim: usize) -> Self {
        Self {
            max_y_order: (dim / 2) as u32 + 1,
            max_xi_order: 2 * (2 * dim as u32 + 1),
            y_points: vec![[0.0, 0.0], [0.37, 0.61], [1.3, 2.2]],
            xi_nodes: Vec::new(),
        }
    }

    /// Restricts the supremum to wavenumbers `|k|_∞ ≤ kmax`.
    pub fn with_xi_window(mut self, grid: &Grid, kmax: i64) -> Self {
        self.xi_nodes = (0..grid.len())
            .filter(|&i| grid.wavenumbers(i)[..grid.dim()].iter().all(|k| k.abs() <= kmax))
            .collect();
        self
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CSigmaReport {
    pub value: f64,
    /// Orders `(|α|, |β|)` and frequency `ξ` at the maximum.
    pub alpha: Vec<u32>,
    pub beta: Vec<u32>,
    pub xi: [f64; 2],
    pub y: [f64; 2],
    /// Maximum attained per total order `|α|` (with `|β|` folded in).
    pub per_xi_order: Vec<f64>,
}

/// Sampled `sup_{y,ξ} ‖∂_ξ^α ∂_y^β σ(y, ξ−·, ·)‖_{L²}` over the multi-index
/// ranges in `opts`, derivatives by Richardson-extrapolated differences.
///
/// A slice whose outermost dyadic shell in `|η|` carries at least 95% of the
/// squared mass of the shell below it is reported as divergent.
pub fn c_sigma_constant(sigma: &Symbol, grid: &Grid, opts: &CSigmaOptions) -> Result<CSigmaReport> {
    let dim = grid.dim();
    let len = grid.len();
    let xi_nodes: Vec<usize> = if opts.xi_nodes.is_empty() { (0..len).collect() } else { opts.xi_nodes.clone() };
    let y_points: Vec<[f64; 2]> = if sigma.is_x_independent() { vec![[0.0; 2]] } else { opts.y_points.clone() };
    let alphas = crate::symbol::multi_indices(dim, opts.max_xi_order);
    let betas: Vec<Vec<u32>> = if sigma.is_x_independent() {
        vec![vec![0; dim]]
    } else {
        crate::symbol::multi_indices(dim, opts.max_y_order)
    };
    let nyq = grid.nyquist();
    let shell_of = |eta: &[f64]| -> Option<usize> {
        let r = eta.iter().map(|c| c.abs()).fold(0.0, f64::max);
        if r > nyq / 2.0 {
            Some(0)
        } else if r > nyq / 4.0 {
            Some(1)
        } else {
            None
        }
    };
    let mut jobs = Vec::new();
    for (iy, _) in y_points.iter().enumerate() {
        for (ib, _) in betas.iter().enumerate() {
            for (ia, _) in alphas.iter().enumerate() {
                for &xi in &xi_nodes {
                    jobs.push((iy, ib, ia, xi));
                }
            }
        }
    }
    let results: Vec<Result<(f64, usize, usize, usize, usize)>> = jobs
        .par_iter()
        .map(|&(iy, ib, ia, xi_idx)| {
            let y = y_points[iy];
            let a = &alphas[ia];
            let b = &betas[ib];
            let total: u32 = a.iter().sum::<u32>() + b.iter().sum::<u32>();
            let h = richardson_step(total);
            let xi = grid.frequency(xi_idx);
            let mut sq = Vec::with_capacity(len);
            let mut shells = [0.0f64; 2];
            for e in 0..len {
                let eta = grid.frequency(e);
                let mut first = [0.0; 2];
                for d in 0..dim {
                    first[d] = xi[d] - eta[d];
                }
                let f = |c: &[f64]| sigma.eval(&c[..dim], &c[dim..2 * dim], &eta[..dim]);
                let mut base = [0.0; 4];
                let mut orders = [0u32; 4];
                let steps = [h; 4];
                for d in 0..dim {
                    base[d] = y[d];
                    base[dim + d] = first[d];
                    orders[d] = b[d];
                    orders[dim + d] = a[d];
                }
                let v = if total == 0 {
                    sigma.eval(&y[..dim], &first[..dim], &eta[..dim])
                } else {
                    mixed_derivative(&f, &base[..2 * dim], &orders[..2 * dim], &steps[..2 * dim]).value
                };
                let m = v.norm_sqr();
                if !m.is_finite() {
                    return Err(Error::NonFinite(format!("C(σ) integrand of {} at ξ={xi:?}", sigma.name())));
                }
                if let Some(s) = shell_of(&eta[..dim]) {
                    shells[s] += m;
                }
                sq.push(m);
            }
            if shells[0] > 0.0 && shells[0] >= 0.95 * shells[1] {
                return Err(Error::Divergence(format!(
                    "slice of {} at ξ={:?} is not square-summable: shell |η| ∈ ({:.3}, {:.3}] holds {:.3e} vs {:.3e} below",
                    sigma.name(),
                    &xi[..dim],
                    nyq / 2.0,
                    nyq,
                    shells[0],
                    shells[1]
                )));
            }
            Ok(((grid.frequency_cell() * pairwise_sum(&sq)).sqrt(), iy, ib, ia, xi_idx))
        })
        .collect();
    let mut best: Option<(f64, usize, usize, usize, usize)> = None;
    let mut per_order = vec![0.0f64; opts.max_xi_order as usize + 1];
    for r in results {
        let r = r?;
        let ord: u32 = alphas[r.3].iter().sum();
        per_order[ord as usize] = per_order[ord as usize].max(r.0);
        if best.is_none_or(|b| r.0 > b.0) {
            best = Some(r);
        }
    }
    let (value, iy, ib, ia, xi_idx) = best.ok_or_else(|| Error::Precondition("no sample points".into()))?;
    Ok(CSigmaReport {
        value,
        alpha: alphas[ia].clone(),
        beta: betas[ib].clone(),
        xi: grid.frequency(xi_idx),
        y: y_points[iy],
        per_xi_order: per_order,
    })
}
