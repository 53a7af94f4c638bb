//! Seeded test-function families.
//!
//! Trial `i` draws from its own ChaCha stream `(seed, i)`, so trials can run
//! in any order and still see the same data.

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::grid::{ComplexField, Grid};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    /// Periodized Gaussians with random centers and widths in `[L/64, L/8]`.
    Gaussian,
    /// Gaussians times a random lattice plane wave.
    Modulated,
    /// Random complex trigonometric polynomials of degree `≤ min(8, N/8)`.
    TrigPoly,
    /// Random `±1` on 16 equal cells per axis; identical across resolutions.
    Steps,
    /// Indicator of a cube a few lattice cells wide at a random node.
    Cells,
    /// Trigonometric polynomials with wavenumbers up to `N/4`.
    BandLimited,
    /// Trigonometric polynomials of degree `≤ min(4, N/8)`.
    LowTrig,
    /// Cycles through Gaussian, Modulated and TrigPoly.
    Mixed,
    /// Nonnegative data: cycles through Gaussian pairs and coincident cell
    /// pairs (`g = f`), the latter concentrating at the lattice scale.
    Positive,
}

pub fn trial_rng(seed: u64, trial: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial as u64);
    rng
}

fn gaussian(grid: &Grid, rng: &mut ChaCha8Rng) -> ComplexField {
    let dim = grid.dim();
    let l = grid.period();
    let mut c = [0.0; 2];
    for v in c.iter_mut().take(dim) {
        *v = rng.gen_range(0.0..l);
    }
    let w = rng.gen_range(l / 64.0..l / 8.0);
    let amp = rng.gen_range(0.5..2.0);
    ComplexField::from_real_fn(grid, |x| {
        let d = grid.torus_distance(x, &c[..dim]);
        amp * (-d * d / (2.0 * w * w)).exp()
    })
}

fn plane_wave(grid: &Grid, rng: &mut ChaCha8Rng, kmax: i64) -> ComplexField {
    let dim = grid.dim();
    let step = grid.frequency_step();
    let mut k = [0.0; 2];
    for v in k.iter_mut().take(dim) {
        *v = rng.gen_range(-kmax..=kmax) as f64 * step;
    }
    ComplexField::from_fn(grid, |x| {
        let phase: f64 = x.iter().zip(&k).map(|(a, b)| a * b).sum();
        Complex64::from_polar(1.0, phase)
    })
}

fn trig_poly(grid: &Grid, rng: &mut ChaCha8Rng, kmax: i64) -> ComplexField {
    let dim = grid.dim();
    let step = grid.frequency_step();
    let width = (2 * kmax + 1) as usize;
    let count = width.pow(dim as u32);
    let coeffs: Vec<(Vec<f64>, Complex64)> = (0..count)
        .map(|mut i| {
            let mut k = Vec::with_capacity(dim);
            for _ in 0..dim {
                k.push(((i % width) as i64 - kmax) as f64 * step);
                i /= width;
            }
            (k, Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        })
        .collect();
    ComplexField::from_fn(grid, |x| {
        coeffs
            .iter()
            .map(|(k, c)| c * Complex64::from_polar(1.0, x.iter().zip(k).map(|(a, b)| a * b).sum()))
            .sum()
    })
}

fn steps(grid: &Grid, rng: &mut ChaCha8Rng) -> ComplexField {
    const CELLS: usize = 16;
    let dim = grid.dim();
    let signs: Vec<f64> =
        (0..CELLS.pow(dim as u32)).map(|_| if rng.gen_bool(0.5) { 1.0 } else { -1.0 }).collect();
    let l = grid.period();
    ComplexField::from_real_fn(grid, |x| {
        let mut idx = 0;
        for d in (0..dim).rev() {
            let c = ((x[d] / l * CELLS as f64).floor() as usize).min(CELLS - 1);
            idx = idx * CELLS + c;
        }
        signs[idx]
    })
}

fn cells(grid: &Grid, rng: &mut ChaCha8Rng) -> ComplexField {
    let dim = grid.dim();
    let n = grid.points();
    let width = rng.gen_range(1..=3usize);
    let mut corner = [0usize; 2];
    for v in corner.iter_mut().take(dim) {
        *v = rng.gen_range(0..n);
    }
    let mut values = vec![Complex64::new(0.0, 0.0); grid.len()];
    for (i, v) in values.iter_mut().enumerate() {
        let ax = grid.axis_indices(i);
        if (0..dim).all(|d| (ax[d] + n - corner[d]) % n < width) {
            *v = Complex64::new(1.0, 0.0);
        }
    }
    ComplexField::new(grid.clone(), values, crate::grid::Representation::Spatial).expect("grid-sized buffer")
}

/// One function of the family for `(seed, trial)`, drawn from `rng`.
pub fn draw(grid: &Grid, family: Family, trial: usize, rng: &mut ChaCha8Rng) -> ComplexField {
    let degree = 8.min(grid.points() as i64 / 8);
    match family {
        Family::Gaussian => gaussian(grid, rng),
        Family::Modulated => {
            let g = gaussian(grid, rng);
            g.mul(&plane_wave(grid, rng, grid.points() as i64 / 8)).expect("same grid")
        }
        Family::TrigPoly => trig_poly(grid, rng, degree),
        Family::Steps => steps(grid, rng),
        Family::Cells => cells(grid, rng),
        Family::BandLimited => trig_poly(grid, rng, (grid.points() as i64 / 4 - 1).clamp(1, 16)),
        Family::LowTrig => trig_poly(grid, rng, 4.min(grid.points() as i64 / 8).max(1)),
        Family::Mixed => match trial % 3 {
            0 => gaussian(grid, rng),
            1 => draw(grid, Family::Modulated, trial, rng),
            _ => trig_poly(grid, rng, degree),
        },
        Family::Positive => {
            if trial.is_multiple_of(2) {
                gaussian(grid, rng)
            } else {
                cells(grid, rng)
            }
        }
    }
}

/// The `(f, g)` pair of trial `trial`.
pub fn pair(grid: &Grid, family: Family, seed: u64, trial: usize) -> (ComplexField, ComplexField) {
    let mut rng = trial_rng(seed, trial);
    let f = draw(grid, family, trial, &mut rng);
    if family == Family::Positive && trial % 2 == 1 {
        return (f.clone(), f);
    }
    let g = draw(grid, family, trial, &mut rng);
    (f, g)
}
