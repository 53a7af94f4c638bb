//! Function-space norms as Riemann sums on the lattice.

use num_complex::Complex64;

use super::{pairwise_sum, ComplexField, Representation};
use crate::error::{Error, Result};

/// `(hⁿ Σ|f|^p)^{1/p}`, or `max |f|` for `p = ∞`. Quasinorm for `p < 1`.
pub fn lp_norm(f: &ComplexField, p: f64) -> Result<f64> {
    f.expect(Representation::Spatial)?;
    if !(p > 0.0) {
        return Err(Error::Precondition(format!("exponent must be positive, got {p}")));
    }
    if p.is_infinite() {
        return Ok(f.max_abs());
    }
    let terms: Vec<f64> = f.values().iter().map(|v| v.norm().powf(p)).collect();
    Ok((f.grid().cell_volume() * pairwise_sum(&terms)).powf(1.0 / p))
}

/// `sup_t t·|{|f| > t}|^{1/p}` from the decreasing rearrangement of `|f|`.
pub fn weak_lp_quasinorm(f: &ComplexField, p: f64) -> Result<f64> {
    f.expect(Representation::Spatial)?;
    if !(p > 0.0) {
        return Err(Error::Precondition(format!("exponent must be positive, got {p}")));
    }
    if p.is_infinite() {
        return Ok(f.max_abs());
    }
    let mut mags: Vec<f64> = f.values().iter().map(|v| v.norm()).collect();
    mags.sort_by(|a, b| b.total_cmp(a));
    let cell = f.grid().cell_volume();
    Ok(mags
        .iter()
        .enumerate()
        .map(|(i, &a)| a * ((i + 1) as f64 * cell).powf(1.0 / p))
        .fold(0.0, f64::max))
}

/// `‖J^s f‖_p` with `J^s` the Bessel potential `(1+|ξ|²)^{s/2}`.
///
/// Negative `s` is accepted and acts as Bessel smoothing.
pub fn sobolev_norm(f: &ComplexField, s: f64, p: f64) -> Result<f64> {
    let g = crate::operator::bessel_potential(f, s)?;
    lp_norm(&g, p)
}

/// Spectral side of Plancherel, `L⁻ⁿ Σ|f̂|²`.
pub fn spectral_energy(f: &ComplexField) -> f64 {
    let terms: Vec<f64> = f.spectrum().iter().map(|v| v.norm_sqr()).collect();
    f.grid().frequency_cell() * pairwise_sum(&terms)
}

/// Largest mean oscillation over the cube family.
///
/// Cubes have side `L/2^j` for `1 ≤ j ≤ log₂N − 2` and start at every multiple
/// of half their side, so both the dyadic cubes and their half-shifted
/// translates are included. Cubes wrap around the torus. Complex samples
/// contribute the oscillation of the real part plus that of the imaginary part.
pub fn bmo_norm(f: &ComplexField) -> Result<f64> {
    f.expect(Representation::Spatial)?;
    let grid = f.grid();
    let n = grid.points();
    let dim = grid.dim();
    let vals = f.values();
    let mut best = 0.0f64;
    let mut j = 1;
    loop {
        let side = n >> j;
        if side < 4 {
            break;
        }
        let step = side / 2;
        let starts: Vec<usize> = (0..n).step_by(step).collect();
        let mut members = Vec::with_capacity(side.pow(dim as u32));
        let cubes: Vec<[usize; 2]> = if dim == 1 {
            starts.iter().map(|&a| [a, 0]).collect()
        } else {
            starts.iter().flat_map(|&a| starts.iter().map(move |&b| [a, b])).collect()
        };
        for start in cubes {
            members.clear();
            if dim == 1 {
                members.extend((0..side).map(|i| vals[(start[0] + i) % n]));
            } else {
                for i in 0..side {
                    let row = (start[0] + i) % n;
                    members.extend((0..side).map(|k| vals[row * n + (start[1] + k) % n]));
                }
            }
            best = best.max(mean_oscillation(&members));
        }
        j += 1;
    }
    Ok(best)
}

fn mean_oscillation(vals: &[Complex64]) -> f64 {
    let count = vals.len() as f64;
    let anchor = vals[0];
    let shift: Complex64 = vals.iter().map(|v| v - anchor).sum::<Complex64>() / count;
    let mean = anchor + shift;
    let total: f64 = vals.iter().map(|v| (v.re - mean.re).abs() + (v.im - mean.im).abs()).sum();
    total / count
}
