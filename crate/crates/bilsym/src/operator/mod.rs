//! Application of `T_σ`, kernels, Bessel potentials and related constants.
//!
//! On the lattice
//! `T_σ(f,g)(x) = L^{-2n} Σ_ξ Σ_η σ(x,ξ,η) f̂(ξ) ĝ(η) e^{ix·(ξ+η)}`,
//! which reduces to the pointwise product `f·g` for `σ ≡ 1`.

mod constants;
mod fractional;
mod kernel;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{fft_axes, ComplexField, Direction, Grid, Representation};
use crate::symbol::Symbol;

pub use constants::{c_sigma_constant, cs_bound_rhs, CSigmaOptions, CSigmaReport};
pub use fractional::{fractional_integral, fractional_kernel};
pub use kernel::{kernel_slice, kernel_slice_direct, KernelSlice, Taper};

/// Largest `N` accepted by [`apply_direct`] for `n = 1` and `n = 2`.
pub const DIRECT_LIMITS: [usize; 2] = [256, 32];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Direct,
    FftDiag,
    Separable,
}

#[derive(Clone, Debug)]
pub struct ApplicationResult {
    pub field: ComplexField,
    pub method: Method,
    /// Relative sup-norm difference to the oracle, when a cross-check ran.
    pub residual: Option<f64>,
}

impl ApplicationResult {
    /// Records the relative sup-norm difference to `oracle`.
    pub fn cross_check(mut self, oracle: &ComplexField) -> Result<Self> {
        let scale = oracle.max_abs().max(f64::MIN_POSITIVE);
        self.residual = Some(self.field.max_abs_diff(oracle)? / scale);
        Ok(self)
    }
}

fn same_grid(f: &ComplexField, g: &ComplexField) -> Result<()> {
    if f.grid() != g.grid() {
        Err(Error::GridMismatch)
    } else {
        Ok(())
    }
}

/// `e^{2πi m/N}` for `m = 0..N`.
pub(crate) fn twiddles(points: usize) -> Vec<Complex64> {
    (0..points)
        .map(|m| Complex64::from_polar(1.0, std::f64::consts::TAU * m as f64 / points as f64))
        .collect()
}

/// `e^{i x_j·ξ_k}` evaluated through integer wavenumbers, exact in periodicity.
pub(crate) fn lattice_phase(grid: &Grid, tw: &[Complex64], x: usize, k: usize) -> Complex64 {
    let n = grid.points() as i64;
    let xa = grid.axis_indices(x);
    let ka = grid.wavenumbers(k);
    let mut idx = 0i64;
    for d in 0..grid.dim() {
        idx += xa[d] as i64 * ka[d];
    }
    tw[idx.rem_euclid(n) as usize]
}

/// Oracle: the double lattice sum, `O(N^{3n})`.
pub fn apply_direct(sigma: &Symbol, f: &ComplexField, g: &ComplexField) -> Result<ApplicationResult> {
    same_grid(f, g)?;
    let grid = f.grid().clone();
    let dim = grid.dim();
    if grid.points() > DIRECT_LIMITS[dim - 1] {
        return Err(Error::CostGuard(format!(
            "direct application limited to N ≤ {} for n = {dim}",
            DIRECT_LIMITS[dim - 1]
        )));
    }
    let len = grid.len();
    let fh = f.spectrum();
    let gh = g.spectrum();
    let tw = twiddles(grid.points());
    let table: Option<Vec<Complex64>> = sigma.is_x_independent().then(|| {
        (0..len * len)
            .into_par_iter()
            .map(|i| {
                let a = grid.frequency(i / len);
                let b = grid.frequency(i % len);
                sigma.eval_freq(&a[..dim], &b[..dim])
            })
            .collect()
    });
    let norm = grid.frequency_cell() * grid.frequency_cell();
    let values: Vec<Complex64> = (0..len)
        .into_par_iter()
        .map(|x| {
            let xp = grid.position(x);
            let q: Vec<Complex64> = (0..len).map(|b| gh[b] * lattice_phase(&grid, &tw, x, b)).collect();
            let mut total = Complex64::new(0.0, 0.0);
            for a in 0..len {
                if fh[a] == Complex64::new(0.0, 0.0) {
                    continue;
                }
                let p = fh[a] * lattice_phase(&grid, &tw, x, a);
                let mut inner = Complex64::new(0.0, 0.0);
                match &table {
                    Some(t) => {
                        let row = &t[a * len..(a + 1) * len];
                        for b in 0..len {
                            inner += row[b] * q[b];
                        }
                    }
                    None => {
                        let xi = grid.frequency(a);
                        for b in 0..len {
                            let eta = grid.frequency(b);
                            inner += sigma.eval(&xp[..dim], &xi[..dim], &eta[..dim]) * q[b];
                        }
                    }
                }
                total += p * inner;
            }
            total * norm
        })
        .collect();
    Ok(ApplicationResult {
        field: ComplexField::new(grid, values, Representation::Spatial)?,
        method: Method::Direct,
        residual: None,
    })
}

/// Rows of the `(ξ, η)` table handled by one parallel task. Fixed, so the
/// summation order does not depend on the thread count.
const ROW_CHUNK: usize = 16;

/// Fast path for x-independent symbols, `O(N^{2n} log N)`.
///
/// For each `ξ` the row `η ↦ τ(ξ,η) ĝ(η)` is inverse transformed, giving the
/// `z`-dependence of the `2n`-dimensional inverse transform of
/// `τ(ξ,η) f̂(ξ) ĝ(η)`; the diagonal `y = z = x` is then accumulated over `ξ`.
pub fn apply_fft_diag(tau: &Symbol, f: &ComplexField, g: &ComplexField) -> Result<ApplicationResult> {
    tau.require_x_independent()?;
    same_grid(f, g)?;
    let grid = f.grid().clone();
    let field = fft_diag_with(&grid, f.spectrum(), g.spectrum(), |xi, eta| tau.eval_freq(xi, eta))?;
    Ok(ApplicationResult { field, method: Method::FftDiag, residual: None })
}

/// [`apply_fft_diag`] for an arbitrary multiplier given as a closure over
/// frequency pairs, with spectra supplied directly.
pub fn fft_diag_with(
    grid: &Grid,
    fh: &[Complex64],
    gh: &[Complex64],
    tau: impl Fn(&[f64], &[f64]) -> Complex64 + Sync,
) -> Result<ComplexField> {
    let dim = grid.dim();
    let len = grid.len();
    let tw = twiddles(grid.points());
    let rows: Vec<usize> = (0..len).filter(|&a| fh[a] != Complex64::new(0.0, 0.0)).collect();
    let partials: Vec<Vec<Complex64>> = rows
        .par_chunks(ROW_CHUNK)
        .map(|chunk| {
            let mut acc = vec![Complex64::new(0.0, 0.0); len];
            let mut line = vec![Complex64::new(0.0, 0.0); len];
            for &a in chunk {
                let xi = grid.frequency(a);
                for (b, v) in line.iter_mut().enumerate() {
                    let eta = grid.frequency(b);
                    *v = if gh[b] == Complex64::new(0.0, 0.0) {
                        Complex64::new(0.0, 0.0)
                    } else {
                        tau(&xi[..dim], &eta[..dim]) * gh[b]
                    };
                }
                fft_axes(&mut line, grid.points(), dim, Direction::Inverse);
                for (x, v) in acc.iter_mut().enumerate() {
                    *v += fh[a] * lattice_phase(grid, &tw, x, a) * line[x];
                }
            }
            acc
        })
        .collect();
    let mut values = vec![Complex64::new(0.0, 0.0); len];
    for part in &partials {
        for (v, p) in values.iter_mut().zip(part) {
            *v += p;
        }
    }
    let norm = grid.frequency_cell() * grid.frequency_cell();
    for v in &mut values {
        *v *= norm;
    }
    ComplexField::new(grid.clone(), values, Representation::Spatial)
}

/// `Σ_k a_k(x) · T_{b_k}(f,g)(x)` for `σ(x,ξ,η) = Σ_k a_k(x) b_k(ξ,η)`.
pub fn apply_separable(
    terms: &[(ComplexField, Symbol)],
    f: &ComplexField,
    g: &ComplexField,
) -> Result<ApplicationResult> {
    same_grid(f, g)?;
    let mut out = ComplexField::zeros(f.grid());
    for (a, b) in terms {
        if a.grid() != f.grid() {
            return Err(Error::GridMismatch);
        }
        a.expect(Representation::Spatial)?;
        let t = apply_fft_diag(b, f, g)?.field;
        out = out.add(&a.mul(&t)?)?;
    }
    Ok(ApplicationResult { field: out, method: Method::Separable, residual: None })
}

/// Picks the fast path when available, else the oracle.
pub fn apply(sigma: &Symbol, f: &ComplexField, g: &ComplexField) -> Result<ApplicationResult> {
    if sigma.is_x_independent() {
        apply_fft_diag(sigma, f, g)
    } else {
        apply_direct(sigma, f, g)
    }
}

/// `J^s f`, the multiplier `(1+|ξ|²)^{s/2}`. `J⁰` returns the input unchanged.
pub fn bessel_potential(f: &ComplexField, s: f64) -> Result<ComplexField> {
    if !s.is_finite() {
        return Err(Error::Precondition(format!("Bessel index must be finite, got {s}")));
    }
    if s == 0.0 {
        return Ok(f.to_spatial());
    }
    Ok(f.spectral_multiply(|xi| {
        let r2: f64 = xi.iter().map(|c| c * c).sum();
        Complex64::new((1.0 + r2).powf(s / 2.0), 0.0)
    }))
}
