//! Bilinear Muckenhoupt constants over a family of lattice balls.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{pairwise_sum, ComplexField, Grid};

#[derive(Clone, Debug)]
pub struct WeightPair {
    pub w1: ComplexField,
    pub w2: ComplexField,
    pub p1: f64,
    pub p2: f64,
    pub q: f64,
}

impl WeightPair {
    pub fn new(w1: ComplexField, w2: ComplexField, p1: f64, p2: f64, q: f64) -> Result<Self> {
        if w1.grid() != w2.grid() {
            return Err(Error::GridMismatch);
        }
        for w in [&w1, &w2] {
            if w.values().iter().any(|v| !(v.re > 0.0 && v.re.is_finite()) || v.im != 0.0) {
                return Err(Error::Precondition("weights must be positive and real".into()));
            }
        }
        if !(p1 >= 1.0 && p1.is_finite() && p2 >= 1.0 && p2.is_finite() && q > 0.0 && q.is_finite()) {
            return Err(Error::Precondition(format!("need 1 ≤ p₁, p₂ < ∞ and q > 0, got ({p1}, {p2}, {q})")));
        }
        Ok(Self { w1: w1.to_spatial(), w2: w2.to_spatial(), p1, p2, q })
    }

    /// `w = w₁^{q/p₁} w₂^{q/p₂}`.
    pub fn derived(&self) -> Vec<f64> {
        self.w1
            .values()
            .iter()
            .zip(self.w2.values())
            .map(|(a, b)| a.re.powf(self.q / self.p1) * b.re.powf(self.q / self.p2))
            .collect()
    }
}

/// Balls centered at every `stride`-th node with radii `L/2^j`,
/// `1 ≤ j ≤ levels`, skipping radii below one lattice spacing.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BallFamily {
    pub levels: u32,
    pub stride: usize,
}

impl Default for BallFamily {
    fn default() -> Self {
        Self { levels: 6, stride: 1 }
    }
}

fn ball_members(grid: &Grid, center: usize, radius: f64) -> Vec<usize> {
    let dim = grid.dim();
    let c = grid.position(center);
    (0..grid.len()).filter(|&i| grid.torus_distance(&grid.position(i)[..dim], &c[..dim]) <= radius).collect()
}

fn mean(values: impl Iterator<Item = f64>) -> f64 {
    let v: Vec<f64> = values.collect();
    pairwise_sum(&v) / v.len() as f64
}

/// Factor of weight `j`: `(⟨w^{1−p'}⟩_B)^{q/p'}`, or `(inf_B w)^{−q}` at `p = 1`.
fn dual_factor(w: &ComplexField, members: &[usize], p: f64, q: f64) -> f64 {
    if p == 1.0 {
        let inf = members.iter().map(|&i| w.values()[i].re).fold(f64::INFINITY, f64::min);
        return inf.powf(-q);
    }
    let pp = p / (p - 1.0);
    mean(members.iter().map(|&i| w.values()[i].re.powf(1.0 - pp))).powf(q / pp)
}

/// `sup_B ⟨w⟩_B ∏_j (⟨w_j^{1−p_j'}⟩_B)^{q/p_j'}` over the ball family.
pub fn muckenhoupt_constant(wp: &WeightPair, family: BallFamily) -> Result<f64> {
    let grid = wp.w1.grid();
    let w = wp.derived();
    let stride = family.stride.max(1);
    let mut best = 0.0f64;
    for j in 1..=family.levels {
        let radius = grid.period() / 2f64.powi(j as i32);
        if radius < grid.spacing() {
            break;
        }
        for center in (0..grid.len()).step_by(stride) {
            let members = ball_members(grid, center, radius);
            let avg = mean(members.iter().map(|&i| w[i]));
            let value = avg
                * dual_factor(&wp.w1, &members, wp.p1, wp.q)
                * dual_factor(&wp.w2, &members, wp.p2, wp.q);
            if !value.is_finite() {
                return Err(Error::NonFinite(format!("Muckenhoupt product at node {center}, radius {radius}")));
            }
            best = best.max(value);
        }
    }
    Ok(best)
}

/// `|x − c|^a` with `c` half a cell off the center node, so it stays positive.
pub fn power_weight(grid: &Grid, a: f64) -> ComplexField {
    let dim = grid.dim();
    let mut c = [0.0; 2];
    for v in c.iter_mut().take(dim) {
        *v = grid.period() / 2.0 + grid.spacing() / 2.0;
    }
    ComplexField::from_real_fn(grid, |x| grid.torus_distance(x, &c[..dim]).powf(a))
}
