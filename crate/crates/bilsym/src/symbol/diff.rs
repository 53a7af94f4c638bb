//! Tensor-product central differences with one Richardson step.

use num_complex::Complex64;

/// Base step for a derivative of total order `order`.
///
/// `10⁻³` for first derivatives; higher orders use `ε^{1/(order+4)}`, which
/// balances rounding against the `O(h⁴)` error left after extrapolation.
pub fn richardson_step(order: u32) -> f64 {
    if order == 0 {
        return 0.0;
    }
    1e-3f64.max(f64::EPSILON.powf(1.0 / (order as f64 + 4.0)))
}

/// Central difference estimates of a mixed partial derivative.
#[derive(Clone, Copy, Debug)]
pub struct Estimate {
    /// Extrapolated value `D(h/2) + (D(h/2) − D(h))/3`.
    pub value: Complex64,
    pub coarse: Complex64,
    pub fine: Complex64,
}

impl Estimate {
    /// Relative disagreement between the two refinement levels.
    pub fn sensitivity(&self) -> f64 {
        let scale = self.fine.norm();
        if scale == 0.0 {
            if self.coarse.norm() == 0.0 {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            (self.coarse - self.fine).norm() / scale
        }
    }
}

fn binomial(n: u32, k: u32) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

fn difference(f: &dyn Fn(&[f64]) -> Complex64, point: &[f64], orders: &[u32], steps: &[f64]) -> Complex64 {
    let dims = point.len();
    let active: Vec<usize> = (0..dims).filter(|&d| orders[d] > 0).collect();
    if active.is_empty() {
        return f(point);
    }
    let mut counter = vec![0u32; active.len()];
    let mut x = point.to_vec();
    let mut total = Complex64::new(0.0, 0.0);
    loop {
        let mut weight = 1.0;
        for (slot, &d) in active.iter().enumerate() {
            let a = orders[d];
            let j = counter[slot];
            x[d] = point[d] + (a as f64 / 2.0 - j as f64) * steps[d];
            let sign = if j.is_multiple_of(2) { 1.0 } else { -1.0 };
            weight *= sign * binomial(a, j);
        }
        total += f(&x) * weight;
        let mut slot = 0;
        loop {
            if slot == active.len() {
                let norm: f64 = active.iter().map(|&d| steps[d].powi(orders[d] as i32)).product();
                return total / norm;
            }
            counter[slot] += 1;
            if counter[slot] <= orders[active[slot]] {
                break;
            }
            counter[slot] = 0;
            slot += 1;
        }
    }
}

/// `∂^orders f(point)` by central differences at `steps` and `steps/2`.
pub fn mixed_derivative(
    f: &dyn Fn(&[f64]) -> Complex64,
    point: &[f64],
    orders: &[u32],
    steps: &[f64],
) -> Estimate {
    let coarse = difference(f, point, orders, steps);
    if orders.iter().all(|&o| o == 0) {
        return Estimate { value: coarse, coarse, fine: coarse };
    }
    let half: Vec<f64> = steps.iter().map(|s| s / 2.0).collect();
    let fine = difference(f, point, orders, &half);
    Estimate { value: fine + (fine - coarse) / 3.0, coarse, fine }
}
