//! Bilinear fractional integral
//! `I_s(f,g)(x) = Σ_{y,z} f(y) g(z) (|x−y| + |x−z|)^{−(2n−s)} h^{2n}`.
//!
//! The singular term `y = z = x` takes the average of the integrand over the
//! corners `(±h/2)^{2n}` of its cell, which is `(√n·h)^{−(2n−s)}`.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grid::{ComplexField, Grid, Representation};

/// Largest `N` accepted, for `n = 1` and `n = 2`.
pub const FRACTIONAL_LIMITS: [usize; 2] = [1024, 16];

/// Kernel table `k(u, v)` over node offsets, row-major.
pub fn fractional_kernel(grid: &Grid, s: f64) -> Vec<f64> {
    let dim = grid.dim();
    let len = grid.len();
    let expo = -(2.0 * dim as f64 - s);
    let origin = [0.0; 2];
    let radius: Vec<f64> =
        (0..len).map(|i| grid.torus_distance(&grid.position(i)[..dim], &origin[..dim])).collect();
    let self_term = ((dim as f64).sqrt() * grid.spacing()).powf(expo);
    let mut out = Vec::with_capacity(len * len);
    for u in 0..len {
        for v in 0..len {
            out.push(if u == 0 && v == 0 { self_term } else { (radius[u] + radius[v]).powf(expo) });
        }
    }
    out
}

/// Direct summation; every term is added in a fixed order, so the map is
/// monotone in nonnegative inputs to the last bit.
pub fn fractional_integral(s: f64, f: &ComplexField, g: &ComplexField) -> Result<ComplexField> {
    let grid = f.grid().clone();
    if g.grid() != &grid {
        return Err(Error::GridMismatch);
    }
    f.expect(Representation::Spatial)?;
    g.expect(Representation::Spatial)?;
    let dim = grid.dim();
    if !(s > 0.0 && s < 2.0 * dim as f64) {
        return Err(Error::Precondition(format!("order s must lie in (0, {}), got {s}", 2 * dim)));
    }
    if grid.points() > FRACTIONAL_LIMITS[dim - 1] {
        return Err(Error::CostGuard(format!(
            "fractional integral limited to N ≤ {} for n = {dim}",
            FRACTIONAL_LIMITS[dim - 1]
        )));
    }
    let len = grid.len();
    let n = grid.points();
    let kernel = fractional_kernel(&grid, s);
    let fv = f.values();
    let gv = g.values();
    let offset = |x: usize, u: usize| -> usize {
        let xa = grid.axis_indices(x);
        let ua = grid.axis_indices(u);
        let mut ax = [0usize; 2];
        for d in 0..dim {
            ax[d] = (xa[d] + n - ua[d]) % n;
        }
        grid.flat_index(ax)
    };
    let w = grid.cell_volume() * grid.cell_volume();
    let values: Vec<Complex64> = (0..len)
        .into_par_iter()
        .map(|x| {
            let shifted_g: Vec<Complex64> = (0..len).map(|v| gv[offset(x, v)]).collect();
            let mut total = Complex64::new(0.0, 0.0);
            for u in 0..len {
                let fu = fv[offset(x, u)];
                if fu == Complex64::new(0.0, 0.0) {
                    continue;
                }
                let row = &kernel[u * len..(u + 1) * len];
                let mut inner = Complex64::new(0.0, 0.0);
                for v in 0..len {
                    inner += shifted_g[v] * row[v];
                }
                total += fu * inner;
            }
            total * w
        })
        .collect();
    ComplexField::new(grid, values, Representation::Spatial)
}
