//! Frequency decompositions of symbols and the localized bump.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::bfld::{Tensor, FIELD_MAGIC};
use crate::grid::{lp_norm, ComplexField, Grid, Representation};
use crate::operator::{apply, bessel_potential};
use crate::symbol::{bump, leibniz_profile, norm, norm2, radial_cutoff, smooth_step, Support, Symbol};

/// Littlewood–Paley pieces `ψ_0, …, ψ_{j_max}` in `|(ξ,η)|`.
///
/// `ψ_0(ζ) = χ(|ζ|)` and `ψ_j(ζ) = χ(|ζ|/2^j) − χ(|ζ|/2^{j−1})` with `χ` the
/// radial cutoff (1 on `[0,1]`, 0 beyond 2). The sum telescopes to
/// `χ(|ζ|/2^{j_max})`, which is 1 on the covered ball `|ζ| ≤ 2^{j_max}`.
#[derive(Clone, Debug)]
pub struct DyadicPartition {
    pub pieces: Vec<Symbol>,
    /// `[inner, outer]` of each piece's support.
    pub radii: Vec<(f64, f64)>,
    pub grid: Grid,
}

fn psi(j: usize, r: f64) -> f64 {
    if j == 0 {
        radial_cutoff(r)
    } else {
        let s = (1u64 << j) as f64;
        radial_cutoff(r / s) - radial_cutoff(2.0 * r / s)
    }
}

pub fn dyadic_partition(grid: &Grid, j_max: usize) -> Result<DyadicPartition> {
    if j_max > 30 || ((1u64 << (j_max + 1)) as f64) > grid.nyquist() {
        return Err(Error::Precondition(format!(
            "2^(j_max+1) = 2^{} exceeds the Nyquist radius {}",
            j_max + 1,
            grid.nyquist()
        )));
    }
    let mut pieces = Vec::with_capacity(j_max + 1);
    let mut radii = Vec::with_capacity(j_max + 1);
    for j in 0..=j_max {
        let outer = (1u64 << (j + 1)) as f64;
        let (inner, support) = if j == 0 {
            (0.0, Support::Ball { radius: 2.0 })
        } else {
            let inner = outer / 4.0;
            (inner, Support::Annulus { inner, outer })
        };
        radii.push((inner, outer));
        pieces.push(
            Symbol::multiplier(format!("psi_{j}"), None, move |xi, eta| {
                Complex64::new(psi(j, norm2(xi, eta)), 0.0)
            })
            .with_support(support),
        );
    }
    Ok(DyadicPartition { pieces, radii, grid: grid.clone() })
}

impl DyadicPartition {
    pub fn j_max(&self) -> usize {
        self.pieces.len() - 1
    }

    /// Radius of the ball on which the pieces sum to 1.
    pub fn covered_radius(&self) -> f64 {
        (1u64 << self.j_max()) as f64
    }

    pub fn sum_at(&self, xi: &[f64], eta: &[f64]) -> f64 {
        let r = norm2(xi, eta);
        (0..self.pieces.len()).map(|j| psi(j, r)).sum()
    }

    /// `σ_j = σ·ψ_j`.
    pub fn localize(&self, sigma: &Symbol, j: usize) -> Result<Symbol> {
        if j >= self.pieces.len() {
            return Err(Error::Precondition(format!("piece {j} beyond j_max = {}", self.j_max())));
        }
        let (inner, outer) = self.radii[j];
        let support = if j == 0 { Support::Ball { radius: outer } } else { Support::Annulus { inner, outer } };
        Ok(sigma
            .times(format!("{}*psi_{j}", sigma.name()), move |xi, eta| psi(j, norm2(xi, eta)))
            .with_support(support))
    }

    /// Largest `|Σψ_j − 1|` over lattice pairs inside the covered ball.
    pub fn residual(&self) -> f64 {
        let g = &self.grid;
        let dim = g.dim();
        let cover = self.covered_radius();
        let mut worst = 0.0f64;
        for a in 0..g.len() {
            let xi = g.frequency(a);
            for b in 0..g.len() {
                let eta = g.frequency(b);
                if norm2(&xi[..dim], &eta[..dim]) <= cover {
                    worst = worst.max((self.sum_at(&xi[..dim], &eta[..dim]) - 1.0).abs());
                }
            }
        }
        worst
    }

    /// Pieces sampled on the `(ξ, η)` lattice, stacked along the first axis.
    pub fn to_tensor(&self) -> Tensor {
        let g = &self.grid;
        let dim = g.dim();
        let len = g.len();
        let mut values = Vec::with_capacity(self.pieces.len() * len * len);
        for j in 0..self.pieces.len() {
            for a in 0..len {
                let xi = g.frequency(a);
                for b in 0..len {
                    let eta = g.frequency(b);
                    values.push(Complex64::new(psi(j, norm2(&xi[..dim], &eta[..dim])), 0.0));
                }
            }
        }
        Tensor {
            magic: *FIELD_MAGIC,
            points: vec![self.pieces.len() as u32, len as u32, len as u32],
            periods: vec![1.0, g.period(), g.period()],
            representation: 1,
            values,
            tags: vec![dim as f64, g.points() as f64],
        }
    }
}

/// Splits `σ` so that `T_σ(f,g) = T_{σ₁}(J^{m+s}f, g) + T_{σ₂}(f, J^{m+s}g)`:
///
/// `σ₁ = σ φ(⟨η⟩²/⟨ξ⟩²) ⟨ξ⟩^{−(m+s)}`, `σ₂ = σ φ(⟨ξ⟩²/⟨η⟩²) ⟨η⟩^{−(m+s)}`.
pub fn leibniz_split(sigma: &Symbol, m: f64, s: f64) -> Result<(Symbol, Symbol)> {
    if !(s > 0.0 && s.is_finite()) || !m.is_finite() {
        return Err(Error::Precondition(format!("leibniz split needs finite m and s > 0, got m={m}, s={s}")));
    }
    let e = -(m + s);
    let first = sigma
        .times(format!("{}:leibniz1", sigma.name()), move |xi, eta| {
            let (bx, be) = (1.0 + xi.iter().map(|c| c * c).sum::<f64>(), 1.0 + eta.iter().map(|c| c * c).sum::<f64>());
            leibniz_profile(be / bx) * bx.powf(e / 2.0)
        })
        .with_class(sigma.class().map(|c| crate::symbol::SymbolClassParams { m: -s, ..c }));
    let second = sigma
        .times(format!("{}:leibniz2", sigma.name()), move |xi, eta| {
            let (bx, be) = (1.0 + xi.iter().map(|c| c * c).sum::<f64>(), 1.0 + eta.iter().map(|c| c * c).sum::<f64>());
            leibniz_profile(bx / be) * be.powf(e / 2.0)
        })
        .with_class(sigma.class().map(|c| crate::symbol::SymbolClassParams { m: -s, ..c }));
    Ok((first, second))
}

/// Relative sup-norm gap between `T_σ(f,g)` and the two-term Leibniz
/// reconstruction `T_{σ₁}(J^{m+s}f, g) + T_{σ₂}(f, J^{m+s}g)`.
pub fn leibniz_residual(sigma: &Symbol, m: f64, s: f64, f: &ComplexField, g: &ComplexField) -> Result<f64> {
    let (first, second) = leibniz_split(sigma, m, s)?;
    let whole = apply(sigma, f, g)?.field;
    let a = apply(&first, &bessel_potential(f, m + s)?, g)?.field;
    let b = apply(&second, f, &bessel_potential(g, m + s)?)?.field;
    let gap = whole.max_abs_diff(&a.add(&b)?)?;
    Ok(gap / whole.max_abs().max(f64::MIN_POSITIVE))
}

/// High-frequency indicator `θ̃(ζ)`: 0 for `|ζ| ≤ 1`, 1 for `|ζ| ≥ √2`.
///
/// Since `|ζ| ≤ |ξ|+|η| ≤ √2|ζ|`, it vanishes where `|ξ|+|η| ≤ 1` and equals 1
/// where `|ξ|+|η| ≥ 2`.
pub fn high_indicator(xi: &[f64], eta: &[f64]) -> f64 {
    smooth_step((norm2(xi, eta) - 1.0) / (std::f64::consts::SQRT_2 - 1.0))
}

/// `σ = σ(1−θ) + σθ` with `θ(ξ,η) = θ̃(dξ, dη)`.
pub fn low_high_split(sigma: &Symbol, d: f64) -> Result<(Symbol, Symbol)> {
    if !(d > 0.0 && d.is_finite()) {
        return Err(Error::Precondition(format!("scale d must be positive, got {d}")));
    }
    let theta = move |xi: &[f64], eta: &[f64]| {
        let mut a = [0.0; 2];
        let mut b = [0.0; 2];
        for i in 0..xi.len() {
            a[i] = d * xi[i];
            b[i] = d * eta[i];
        }
        high_indicator(&a[..xi.len()], &b[..xi.len()])
    };
    let low = sigma
        .times(format!("{}:low({d})", sigma.name()), move |xi, eta| 1.0 - theta(xi, eta))
        .with_support(Support::LowHigh { d, high: false });
    let high = sigma
        .times(format!("{}:high({d})", sigma.name()), theta)
        .with_support(Support::LowHigh { d, high: true });
    Ok((low, high))
}

/// Split used for cubes of diameter `d`: scale `d` when `d ≤ 1`, scale 1 otherwise.
pub fn cube_split(sigma: &Symbol, d: f64) -> Result<(Symbol, Symbol)> {
    low_high_split(sigma, d.min(1.0))
}

/// Nonnegative band-limited bump `φ = |ψ|²/|ψ(c)|²`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BandLimitedBump {
    #[serde(skip)]
    pub field: Option<ComplexField>,
    pub d: f64,
    pub rho: f64,
    /// Spectral radius `d^{−ρ}/8` bounding `supp φ̂`.
    pub radius: f64,
    /// Node where `φ = 1`.
    pub center: usize,
    /// `‖φ‖₂ / d^{nρ/2}`.
    pub l2_constant: f64,
    /// `max |φ − 1|` over lattice points within `d/2` of the center.
    pub flatness: f64,
    pub min_value: f64,
}

impl BandLimitedBump {
    pub fn field(&self) -> &ComplexField {
        self.field.as_ref().expect("bump field present")
    }

    /// Largest `|φ̂|` at frequencies beyond `radius`.
    pub fn spectral_leak(&self) -> f64 {
        let f = self.field();
        let g = f.grid();
        let dim = g.dim();
        f.spectrum()
            .iter()
            .enumerate()
            .filter(|(i, _)| norm(&g.frequency(*i)[..dim]) > self.radius)
            .map(|(_, v)| v.norm())
            .fold(0.0, f64::max)
    }
}

/// Fejér-type bump: `ψ̂` is a nonnegative radial window on `|ξ| ≤ radius/2`
/// centered at node `center`, and `φ̂ = L⁻ⁿ ψ̂ * ψ̂` is formed on the lattice,
/// so `supp φ̂ ⊂ {|ξ| ≤ radius}` holds exactly.
pub fn make_bump(grid: &Grid, d: f64, rho: f64, center: usize) -> Result<BandLimitedBump> {
    if !(d > 0.0 && d.is_finite()) || !(0.0..=1.0).contains(&rho) {
        return Err(Error::Precondition(format!("bump needs d > 0 and ρ in [0,1], got d={d}, ρ={rho}")));
    }
    let radius = d.powf(-rho) / 8.0;
    if radius < grid.frequency_step() {
        return Err(Error::Precondition(format!(
            "bump radius {radius:.4} is below the frequency step {:.4}",
            grid.frequency_step()
        )));
    }
    if radius > grid.nyquist() {
        return Err(Error::Precondition(format!("bump radius {radius:.4} exceeds the Nyquist radius")));
    }
    if center >= grid.len() {
        return Err(Error::Precondition(format!("center node {center} outside the grid")));
    }
    let dim = grid.dim();
    let len = grid.len();
    let tw = crate::operator::twiddles(grid.points());
    let half = radius / 2.0;
    let window: Vec<(usize, Complex64)> = (0..len)
        .filter_map(|i| {
            let r = norm(&grid.frequency(i)[..dim]);
            let w = bump(r / half);
            (w > 0.0).then(|| (i, w * crate::operator::lattice_phase(grid, &tw, center, i).conj()))
        })
        .collect();
    let mut spectrum = vec![Complex64::new(0.0, 0.0); len];
    for &(a, wa) in &window {
        for &(b, wb) in &window {
            spectrum[grid.alias_sum(a, b)] += wa * wb;
        }
    }
    let cell = grid.frequency_cell();
    for v in &mut spectrum {
        *v *= cell;
    }
    let field = ComplexField::new(grid.clone(), spectrum, Representation::Spectral)?.to_spatial();
    let peak = field.values()[center].re;
    if !(peak > 0.0) {
        return Err(Error::NonFinite("bump peak is not positive".into()));
    }
    let field = field.scale(Complex64::new(1.0 / peak, 0.0));
    let c = grid.position(center);
    let mut flatness = 0.0f64;
    let mut min_value = f64::INFINITY;
    for (i, v) in field.values().iter().enumerate() {
        min_value = min_value.min(v.re);
        if grid.torus_distance(&grid.position(i)[..dim], &c[..dim]) <= d / 2.0 {
            flatness = flatness.max((v - 1.0).norm());
        }
    }
    let l2_constant = lp_norm(&field, 2.0)? / d.powf(dim as f64 * rho / 2.0);
    Ok(BandLimitedBump { field: Some(field), d, rho, radius, center, l2_constant, flatness, min_value })
}

/// `R(f,g) = φ² T_σ(f,g) − T_σ(φf, φg)`.
pub fn commutator_r(
    sigma: &Symbol,
    phi: &BandLimitedBump,
    f: &ComplexField,
    g: &ComplexField,
) -> Result<ComplexField> {
    let p = phi.field();
    if p.grid() != f.grid() || f.grid() != g.grid() {
        return Err(Error::GridMismatch);
    }
    let p = p.to_spatial();
    let (f, g) = (f.to_spatial(), g.to_spatial());
    let whole = apply(sigma, &f, &g)?.field;
    let localized = apply(sigma, &p.mul(&f)?, &p.mul(&g)?)?.field;
    p.mul(&p)?.mul(&whole)?.sub(&localized)
}
