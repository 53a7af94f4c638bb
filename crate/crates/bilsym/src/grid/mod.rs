//! Torus lattice `[0,L)ⁿ`, complex fields on it and the spectral transform.
//!
//! Forward transform: `f̂(ξ_k) = hⁿ Σ_x f(x) e^{-ix·ξ_k}`.
//! Inverse transform: `f(x) = L⁻ⁿ Σ_k f̂(ξ_k) e^{ix·ξ_k}`.
//! With these weights `hⁿ Σ|f|² = L⁻ⁿ Σ|f̂|²` and the continuum formulas carry
//! over without stray factors of `Nⁿ`.
//!
//! Spectral values are stored in FFT order: storage index `i` on an axis holds
//! wavenumber `i` for `i < N/2` and `i - N` otherwise.

pub mod bfld;
mod fft;
pub mod norms;

use std::f64::consts::PI;
use std::sync::OnceLock;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use fft::{fft_axes, Direction};
pub use norms::{bmo_norm, lp_norm, sobolev_norm, spectral_energy, weak_lp_quasinorm};

pub const MIN_POINTS: usize = 8;
pub const MAX_POINTS: usize = 4096;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    dim: usize,
    points: usize,
    period: f64,
}

/// Builds a grid with `points` nodes per axis on `[0, period)^dim`.
pub fn make_grid(dim: usize, points: usize, period: f64) -> Result<Grid> {
    Grid::new(dim, points, period)
}

impl Grid {
    pub fn new(dim: usize, points: usize, period: f64) -> Result<Self> {
        if dim != 1 && dim != 2 {
            return Err(Error::InvalidGrid(format!("dimension must be 1 or 2, got {dim}")));
        }
        if !points.is_multiple_of(2) {
            return Err(Error::InvalidGrid("N must be even".into()));
        }
        if !(MIN_POINTS..=MAX_POINTS).contains(&points) {
            return Err(Error::InvalidGrid(format!(
                "N must lie in [{MIN_POINTS}, {MAX_POINTS}], got {points}"
            )));
        }
        if !(period.is_finite() && period > 0.0) {
            return Err(Error::InvalidGrid(format!("period must be positive, got {period}")));
        }
        Ok(Self { dim, points, period })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn points(&self) -> usize {
        self.points
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    pub fn spacing(&self) -> f64 {
        self.period / self.points as f64
    }

    /// `hⁿ`, the Riemann-sum weight of one node.
    pub fn cell_volume(&self) -> f64 {
        self.spacing().powi(self.dim as i32)
    }

    /// `L⁻ⁿ`, the weight of one frequency node in the inverse transform.
    pub fn frequency_cell(&self) -> f64 {
        self.period.powi(-(self.dim as i32))
    }

    /// Number of lattice nodes, `Nⁿ`.
    pub fn len(&self) -> usize {
        self.points.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn frequency_step(&self) -> f64 {
        2.0 * PI / self.period
    }

    /// Largest representable frequency magnitude on one axis, `πN/L`.
    pub fn nyquist(&self) -> f64 {
        PI * self.points as f64 / self.period
    }

    pub fn wavenumber(&self, i: usize) -> i64 {
        let n = self.points as i64;
        let i = i as i64;
        if i < n / 2 {
            i
        } else {
            i - n
        }
    }

    /// Storage index of wavenumber `k`, wrapped into `[-N/2, N/2)`.
    pub fn wrap_wavenumber(&self, k: i64) -> usize {
        k.rem_euclid(self.points as i64) as usize
    }

    /// Per-axis indices of a flat row-major index.
    pub fn axis_indices(&self, idx: usize) -> [usize; 2] {
        if self.dim == 1 {
            [idx, 0]
        } else {
            [idx / self.points, idx % self.points]
        }
    }

    pub fn flat_index(&self, ax: [usize; 2]) -> usize {
        if self.dim == 1 {
            ax[0]
        } else {
            ax[0] * self.points + ax[1]
        }
    }

    /// Spatial coordinates of node `idx`; unused trailing entries are zero.
    pub fn position(&self, idx: usize) -> [f64; 2] {
        let h = self.spacing();
        let ax = self.axis_indices(idx);
        let mut p = [0.0; 2];
        for a in 0..self.dim {
            p[a] = ax[a] as f64 * h;
        }
        p
    }

    /// Frequency of spectral node `idx`.
    pub fn frequency(&self, idx: usize) -> [f64; 2] {
        let step = self.frequency_step();
        let ax = self.axis_indices(idx);
        let mut p = [0.0; 2];
        for a in 0..self.dim {
            p[a] = self.wavenumber(ax[a]) as f64 * step;
        }
        p
    }

    pub fn wavenumbers(&self, idx: usize) -> [i64; 2] {
        let ax = self.axis_indices(idx);
        let mut k = [0; 2];
        for a in 0..self.dim {
            k[a] = self.wavenumber(ax[a]);
        }
        k
    }

    /// Spectral index of `ξ_a ⊕ ξ_b` with wavenumbers wrapped (aliasing sum).
    pub fn alias_sum(&self, a: usize, b: usize) -> usize {
        let ka = self.wavenumbers(a);
        let kb = self.wavenumbers(b);
        let mut ax = [0usize; 2];
        for d in 0..self.dim {
            ax[d] = self.wrap_wavenumber(ka[d] + kb[d]);
        }
        self.flat_index(ax)
    }

    /// Spectral index of `ξ_a ⊖ ξ_b` with wavenumbers wrapped.
    pub fn alias_diff(&self, a: usize, b: usize) -> usize {
        let ka = self.wavenumbers(a);
        let kb = self.wavenumbers(b);
        let mut ax = [0usize; 2];
        for d in 0..self.dim {
            ax[d] = self.wrap_wavenumber(ka[d] - kb[d]);
        }
        self.flat_index(ax)
    }

    /// Torus distance between two points.
    pub fn torus_distance(&self, a: &[f64], b: &[f64]) -> f64 {
        let l = self.period;
        let mut s = 0.0;
        for d in 0..self.dim {
            let mut t = (a[d] - b[d]).rem_euclid(l);
            if t > l / 2.0 {
                t = l - t;
            }
            s += t * t;
        }
        s.sqrt()
    }

    /// Same lattice with the period scaled by `factor`.
    pub fn rescaled(&self, factor: f64) -> Result<Self> {
        Self::new(self.dim, self.points, self.period * factor)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Representation {
    Spatial,
    Spectral,
}

impl Representation {
    pub fn name(self) -> &'static str {
        match self {
            Representation::Spatial => "spatial",
            Representation::Spectral => "spectral",
        }
    }
}

/// Complex samples on a grid, row-major, tagged spatial or spectral.
#[derive(Clone, Debug)]
pub struct ComplexField {
    grid: Grid,
    values: Vec<Complex64>,
    repr: Representation,
    spectrum: OnceLock<Vec<Complex64>>,
}

impl PartialEq for ComplexField {
    fn eq(&self, other: &Self) -> bool {
        self.grid == other.grid && self.repr == other.repr && self.values == other.values
    }
}

impl ComplexField {
    pub fn new(grid: Grid, values: Vec<Complex64>, repr: Representation) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::InvalidGrid(format!(
                "expected {} samples, got {}",
                grid.len(),
                values.len()
            )));
        }
        Ok(Self { grid, values, repr, spectrum: OnceLock::new() })
    }

    pub fn zeros(grid: &Grid) -> Self {
        let values = vec![Complex64::new(0.0, 0.0); grid.len()];
        Self { grid: grid.clone(), values, repr: Representation::Spatial, spectrum: OnceLock::new() }
    }

    /// Samples `f` at every node.
    pub fn from_fn(grid: &Grid, f: impl Fn(&[f64]) -> Complex64) -> Self {
        let n = grid.dim();
        let values = (0..grid.len()).map(|i| f(&grid.position(i)[..n])).collect();
        Self { grid: grid.clone(), values, repr: Representation::Spatial, spectrum: OnceLock::new() }
    }

    pub fn from_real_fn(grid: &Grid, f: impl Fn(&[f64]) -> f64) -> Self {
        Self::from_fn(grid, |x| Complex64::new(f(x), 0.0))
    }

    /// Spectral field with `values[k] = f(ξ_k)`.
    pub fn from_spectrum_fn(grid: &Grid, f: impl Fn(&[f64]) -> Complex64) -> Self {
        let n = grid.dim();
        let values = (0..grid.len()).map(|i| f(&grid.frequency(i)[..n])).collect();
        Self { grid: grid.clone(), values, repr: Representation::Spectral, spectrum: OnceLock::new() }
    }

    pub fn constant(grid: &Grid, c: Complex64) -> Self {
        Self::from_fn(grid, |_| c)
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn representation(&self) -> Representation {
        self.repr
    }

    pub fn expect(&self, repr: Representation) -> Result<()> {
        if self.repr == repr {
            Ok(())
        } else {
            Err(Error::Representation { expected: repr.name(), found: self.repr.name() })
        }
    }

    pub fn spectral_transform(&self, direction: Direction) -> Result<Self> {
        let (from, to) = match direction {
            Direction::Forward => (Representation::Spatial, Representation::Spectral),
            Direction::Inverse => (Representation::Spectral, Representation::Spatial),
        };
        self.expect(from)?;
        let values = transform(&self.grid, &self.values, direction);
        Ok(Self { grid: self.grid.clone(), values, repr: to, spectrum: OnceLock::new() })
    }

    /// Spectral coefficients, computed once and cached for spatial fields.
    pub fn spectrum(&self) -> &[Complex64] {
        match self.repr {
            Representation::Spectral => &self.values,
            Representation::Spatial => self
                .spectrum
                .get_or_init(|| transform(&self.grid, &self.values, Direction::Forward)),
        }
    }

    pub fn to_spectral(&self) -> Self {
        match self.repr {
            Representation::Spectral => self.clone(),
            Representation::Spatial => Self {
                grid: self.grid.clone(),
                values: self.spectrum().to_vec(),
                repr: Representation::Spectral,
                spectrum: OnceLock::new(),
            },
        }
    }

    pub fn to_spatial(&self) -> Self {
        match self.repr {
            Representation::Spatial => self.clone(),
            Representation::Spectral => Self {
                grid: self.grid.clone(),
                values: transform(&self.grid, &self.values, Direction::Inverse),
                repr: Representation::Spatial,
                spectrum: OnceLock::new(),
            },
        }
    }

    /// Spatial field obtained by multiplying the spectrum by `m(ξ)`.
    pub fn spectral_multiply(&self, m: impl Fn(&[f64]) -> Complex64) -> Self {
        let n = self.grid.dim();
        let spec: Vec<Complex64> = self
            .spectrum()
            .iter()
            .enumerate()
            .map(|(i, v)| v * m(&self.grid.frequency(i)[..n]))
            .collect();
        let values = transform(&self.grid, &spec, Direction::Inverse);
        Self { grid: self.grid.clone(), values, repr: Representation::Spatial, spectrum: OnceLock::new() }
    }

    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> Self {
        Self {
            grid: self.grid.clone(),
            values: self.values.iter().map(|&v| f(v)).collect(),
            repr: self.repr,
            spectrum: OnceLock::new(),
        }
    }

    pub fn zip_with(&self, other: &Self, f: impl Fn(Complex64, Complex64) -> Complex64) -> Result<Self> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        if self.repr != other.repr {
            return Err(Error::Representation { expected: self.repr.name(), found: other.repr.name() });
        }
        let values = self.values.iter().zip(&other.values).map(|(&a, &b)| f(a, b)).collect();
        Ok(Self { grid: self.grid.clone(), values, repr: self.repr, spectrum: OnceLock::new() })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a * b)
    }

    pub fn scale(&self, c: Complex64) -> Self {
        self.map(|v| v * c)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// `max |a - b|` over the samples.
    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        Ok(self.sub(other)?.max_abs())
    }

    /// Same samples relabelled onto another grid with an identical node count.
    pub fn relabel(&self, grid: Grid) -> Result<Self> {
        if grid.len() != self.grid.len() || grid.dim() != self.grid.dim() {
            return Err(Error::GridMismatch);
        }
        Ok(Self { grid, values: self.values.clone(), repr: self.repr, spectrum: OnceLock::new() })
    }
}

fn transform(grid: &Grid, values: &[Complex64], direction: Direction) -> Vec<Complex64> {
    let mut data = values.to_vec();
    fft_axes(&mut data, grid.points(), grid.dim(), direction);
    let w = match direction {
        Direction::Forward => grid.cell_volume(),
        Direction::Inverse => grid.frequency_cell(),
    };
    for v in &mut data {
        *v *= w;
    }
    data
}

/// `f_λ(x) = f(x/λ)` with `λ = 2^{-k}`.
///
/// The result lives on a grid with the same `N` and period `λL`. Its samples
/// are the samples of `f` at the same node indices, so no interpolation is
/// involved. A spectral input is rescaled by `λⁿ`, which is the transform of
/// the dilated field on the new lattice.
pub fn dilate(f: &ComplexField, k: u32) -> Result<ComplexField> {
    if k > 30 {
        return Err(Error::Precondition(format!("dilation exponent {k} too large")));
    }
    let lambda = 0.5f64.powi(k as i32);
    let grid = f.grid().rescaled(lambda)?;
    let out = f.relabel(grid)?;
    Ok(match f.representation() {
        Representation::Spatial => out,
        Representation::Spectral => {
            let w = lambda.powi(f.grid().dim() as i32);
            out.scale(Complex64::new(w, 0.0))
        }
    })
}

/// Deterministic pairwise summation; the tree depends only on the length.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    const LEAF: usize = 32;
    if xs.len() <= LEAF {
        return xs.iter().sum();
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}

pub fn pairwise_sum_complex(xs: &[Complex64]) -> Complex64 {
    const LEAF: usize = 32;
    if xs.len() <= LEAF {
        return xs.iter().sum();
    }
    let mid = xs.len() / 2;
    pairwise_sum_complex(&xs[..mid]) + pairwise_sum_complex(&xs[mid..])
}
