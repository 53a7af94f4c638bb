//! Symbols sampled on a grid's lattices and stored as `BSYM` tensors.
//!
//! Axes are ordered x | ξ | η, each of length `Nⁿ` in the grid's storage
//! order (spatial nodes for x, FFT order for ξ and η). An x-independent table
//! stores a single x node.

use std::sync::Arc;

use num_complex::Complex64;

use super::Symbol;
use crate::error::{Error, Result};
use crate::grid::bfld::{Tensor, SYMBOL_MAGIC};
use crate::grid::Grid;

/// Samples `sigma` on the lattices of `grid`.
pub fn tabulate(sigma: &Symbol, grid: &Grid) -> Tensor {
    let dim = grid.dim();
    let len = grid.len();
    let xs: Vec<usize> = if sigma.is_x_independent() { vec![0] } else { (0..len).collect() };
    let mut values = Vec::with_capacity(xs.len() * len * len);
    for &x in &xs {
        let xp = grid.position(x);
        for a in 0..len {
            let xi = grid.frequency(a);
            for b in 0..len {
                let eta = grid.frequency(b);
                values.push(sigma.eval(&xp[..dim], &xi[..dim], &eta[..dim]));
            }
        }
    }
    let mut points = vec![xs.len() as u32];
    points.extend([len as u32, len as u32]);
    Tensor {
        magic: *SYMBOL_MAGIC,
        points,
        periods: vec![grid.period(), grid.period(), grid.period()],
        representation: if sigma.is_x_independent() { 1 } else { 0 },
        values,
        tags: vec![dim as f64, grid.points() as f64],
    }
}

/// Rebuilds a symbol from a table. Off-lattice arguments snap to the nearest
/// node; frequencies outside the lattice evaluate to zero.
pub fn from_table(t: &Tensor) -> Result<(Symbol, Grid)> {
    if &t.magic != SYMBOL_MAGIC || t.points.len() != 3 || t.tags.len() != 2 {
        return Err(Error::Format("not a symbol table".into()));
    }
    let dim = t.tags[0] as usize;
    let points = t.tags[1] as usize;
    let grid = Grid::new(dim, points, t.periods[0])?;
    let len = grid.len();
    let nx = t.points[0] as usize;
    if t.points[1] as usize != len || t.points[2] as usize != len || (nx != 1 && nx != len) {
        return Err(Error::Format("symbol table shape does not match its grid".into()));
    }
    let x_independent = nx == 1;
    let values = Arc::new(t.values.clone());
    let g = grid.clone();
    let lookup_freq = move |g: &Grid, v: &[f64]| -> Option<usize> {
        let step = g.frequency_step();
        let half = (g.points() / 2) as i64;
        let mut ax = [0usize; 2];
        for d in 0..g.dim() {
            let k = (v[d] / step).round() as i64;
            if k < -half || k >= half {
                return None;
            }
            ax[d] = g.wrap_wavenumber(k);
        }
        Some(g.flat_index(ax))
    };
    let lookup_x = |g: &Grid, x: &[f64]| -> usize {
        let h = g.spacing();
        let mut ax = [0usize; 2];
        for d in 0..g.dim() {
            ax[d] = ((x[d] / h).round() as i64).rem_euclid(g.points() as i64) as usize;
        }
        g.flat_index(ax)
    };
    let eval = move |x: &[f64], xi: &[f64], eta: &[f64]| -> Complex64 {
        let (Some(a), Some(b)) = (lookup_freq(&g, xi), lookup_freq(&g, eta)) else {
            return Complex64::new(0.0, 0.0);
        };
        let xi_idx = if x_independent { 0 } else { lookup_x(&g, x) };
        values[(xi_idx * len + a) * len + b]
    };
    let sym = if x_independent {
        Symbol::multiplier("table", None, move |xi, eta| eval(&[0.0, 0.0][..xi.len()], xi, eta))
    } else {
        Symbol::new("table", None, eval)
    };
    Ok((sym, grid))
}
