//! Kernel slices `K(x,u,v) = F⁻¹₂ₙ(σ(x,·,·))(u,v)`.
//!
//! The operator kernel in `(y, z)` is `K(x, x−y, x−z)`, so a slice indexed
//! by `(u, v)` carries the metric `S = |u| + |v| + |u−v|`, which equals
//! `|x−y| + |x−z| + |y−z|` at `u = x−y`, `v = x−z`. Distances are taken on
//! the torus.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{lattice_phase, twiddles};
use crate::error::{Error, Result};
use crate::grid::{fft_axes, ComplexField, Direction, Grid, Representation};
use crate::symbol::Symbol;

/// Frequency taper policy for kernels of symbols that do not decay.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Taper {
    /// Taper iff the declared order is `m ≥ 0` and no compact support is declared.
    Auto,
    Off,
    On,
}

#[derive(Clone, Debug)]
pub struct KernelSlice {
    /// Node index of the base point `x`.
    pub base: usize,
    pub grid: Grid,
    /// `K(x,u,v)`, row-major over `(u, v)` node indices.
    pub values: Vec<Complex64>,
    /// `S` at each `(u, v)`.
    pub metric: Vec<f64>,
    /// `Λ` when `exp(−(|ξ|²+|η|²)/Λ²)` was applied.
    pub taper: Option<f64>,
}

impl KernelSlice {
    pub fn value(&self, u: usize, v: usize) -> Complex64 {
        self.values[u * self.grid.len() + v]
    }

    /// `Σ_{y,z} K(x, x−y, x−z) f(y) g(z) h^{2n}` at the base point.
    pub fn reconstruct(&self, f: &ComplexField, g: &ComplexField) -> Result<Complex64> {
        if f.grid() != &self.grid || g.grid() != &self.grid {
            return Err(Error::GridMismatch);
        }
        f.expect(Representation::Spatial)?;
        g.expect(Representation::Spatial)?;
        let grid = &self.grid;
        let len = grid.len();
        let n = grid.points();
        let xa = grid.axis_indices(self.base);
        let diff = |y: usize| -> usize {
            let ya = grid.axis_indices(y);
            let mut ax = [0usize; 2];
            for d in 0..grid.dim() {
                ax[d] = (xa[d] + n - ya[d]) % n;
            }
            grid.flat_index(ax)
        };
        let shifted: Vec<usize> = (0..len).map(diff).collect();
        let mut total = Complex64::new(0.0, 0.0);
        for y in 0..len {
            let row = shifted[y] * len;
            let mut inner = Complex64::new(0.0, 0.0);
            for z in 0..len {
                inner += self.values[row + shifted[z]] * g.values()[z];
            }
            total += f.values()[y] * inner;
        }
        Ok(total * grid.cell_volume() * grid.cell_volume())
    }
}

fn taper_scale(sigma: &Symbol, grid: &Grid, policy: Taper) -> Result<Option<f64>> {
    let lambda = grid.nyquist() / 4.0;
    let non_decaying = sigma.class().is_some_and(|c| c.m >= 0.0) && sigma.support().is_none();
    match policy {
        Taper::On => Ok(Some(lambda)),
        Taper::Auto => Ok(non_decaying.then_some(lambda)),
        Taper::Off if non_decaying => Err(Error::Precondition(format!(
            "kernel of {} diverges without a taper (order m ≥ 0)",
            sigma.name()
        ))),
        Taper::Off => Ok(None),
    }
}

fn metric(grid: &Grid) -> Vec<f64> {
    let dim = grid.dim();
    let len = grid.len();
    let origin = [0.0; 2];
    let pos: Vec<[f64; 2]> = (0..len).map(|i| grid.position(i)).collect();
    let radius: Vec<f64> = pos.iter().map(|p| grid.torus_distance(&p[..dim], &origin[..dim])).collect();
    let mut out = Vec::with_capacity(len * len);
    for u in 0..len {
        for v in 0..len {
            out.push(radius[u] + radius[v] + grid.torus_distance(&pos[u][..dim], &pos[v][..dim]));
        }
    }
    out
}

fn symbol_slice(sigma: &Symbol, grid: &Grid, base: usize, taper: Option<f64>) -> Vec<Complex64> {
    let dim = grid.dim();
    let len = grid.len();
    let x = grid.position(base);
    (0..len * len)
        .into_par_iter()
        .map(|i| {
            let xi = grid.frequency(i / len);
            let eta = grid.frequency(i % len);
            let mut v = sigma.eval(&x[..dim], &xi[..dim], &eta[..dim]);
            if let Some(l) = taper {
                let r2: f64 = xi[..dim].iter().chain(&eta[..dim]).map(|c| c * c).sum();
                v *= (-r2 / (l * l)).exp();
            }
            v
        })
        .collect()
}

/// Largest `N` for which kernel slices are built, for `n = 1` and `n = 2`.
pub const KERNEL_LIMITS: [usize; 2] = [1024, 32];

/// Kernel slice at node `base` via a `2n`-dimensional inverse FFT.
pub fn kernel_slice(sigma: &Symbol, base: usize, grid: &Grid, taper: Taper) -> Result<KernelSlice> {
    let dim = grid.dim();
    if grid.points() > KERNEL_LIMITS[dim - 1] {
        return Err(Error::CostGuard(format!("kernel slices limited to N ≤ {}", KERNEL_LIMITS[dim - 1])));
    }
    if base >= grid.len() {
        return Err(Error::Precondition(format!("base node {base} outside the grid")));
    }
    let lambda = taper_scale(sigma, grid, taper)?;
    let mut values = symbol_slice(sigma, grid, base, lambda);
    fft_axes(&mut values, grid.points(), 2 * dim, Direction::Inverse);
    let w = grid.frequency_cell() * grid.frequency_cell();
    for v in &mut values {
        *v *= w;
    }
    Ok(KernelSlice { base, grid: grid.clone(), values, metric: metric(grid), taper: lambda })
}

/// Same slice by direct summation; an independent route for small grids.
pub fn kernel_slice_direct(sigma: &Symbol, base: usize, grid: &Grid, taper: Taper) -> Result<KernelSlice> {
    if grid.points() > 32 || grid.dim() != 1 && grid.points() > 8 {
        return Err(Error::CostGuard("direct kernel summation limited to small grids".into()));
    }
    let lambda = taper_scale(sigma, grid, taper)?;
    let table = symbol_slice(sigma, grid, base, lambda);
    let len = grid.len();
    let tw = twiddles(grid.points());
    let w = grid.frequency_cell() * grid.frequency_cell();
    let values: Vec<Complex64> = (0..len * len)
        .into_par_iter()
        .map(|i| {
            let (u, v) = (i / len, i % len);
            let mut total = Complex64::new(0.0, 0.0);
            for a in 0..len {
                let pa = lattice_phase(grid, &tw, u, a);
                for b in 0..len {
                    total += table[a * len + b] * pa * lattice_phase(grid, &tw, v, b);
                }
            }
            total * w
        })
        .collect();
    Ok(KernelSlice { base, grid: grid.clone(), values, metric: metric(grid), taper: lambda })
}
