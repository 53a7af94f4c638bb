//! Bilinear symbols `σ(x, ξ, η)` and their measurement.

mod catalogue;
mod diff;
mod profiles;
mod seminorm;
pub mod tabulated;

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::Grid;

pub use catalogue::{annulus_profile, builtin, Builtin};
pub use diff::{mixed_derivative, richardson_step};
pub use profiles::{bump, cone_cutoff, leibniz_profile, radial_cutoff, smooth_step, Cutoff};
pub use seminorm::{
    c_seminorm, c_seminorm_at, classify_order, classify_order_with, hormander_norm, multi_indices, DerivativeTable, FreqPoint,
    HormanderNormReport, OrderEstimate, Sampling, STABILITY_GROWTH, STABILITY_LEVELS,
    WorstPoint,
};

pub type Evaluator = Arc<dyn Fn(&[f64], &[f64], &[f64]) -> Complex64 + Send + Sync>;

/// Order `m` and type `(ρ, δ)` of a bilinear Hörmander class.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SymbolClassParams {
    pub m: f64,
    pub rho: f64,
    pub delta: f64,
}

impl SymbolClassParams {
    pub fn new(m: f64, rho: f64, delta: f64) -> Result<Self> {
        if !m.is_finite() || !(0.0..=1.0).contains(&rho) || !(0.0..=1.0).contains(&delta) {
            return Err(Error::Precondition(format!(
                "class parameters need finite m and ρ, δ in [0,1]; got ({m}, {rho}, {delta})"
            )));
        }
        Ok(Self { m, rho, delta })
    }
}

/// Where a symbol is known to vanish, in terms of `|(ξ, η)|`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Support {
    /// Vanishes for `|(ξ,η)| > radius`.
    Ball { radius: f64 },
    /// Vanishes outside `inner ≤ |(ξ,η)| ≤ outer`.
    Annulus { inner: f64, outer: f64 },
    /// Piece of a low/high split at scale `d`: the low piece vanishes for
    /// `|ξ|+|η| ≥ 2/d`, the high piece for `|ξ|+|η| ≤ 1/d`.
    LowHigh { d: f64, high: bool },
}

impl Support {
    /// True when the symbol is declared to vanish at `(ξ, η)`.
    pub fn excludes(&self, xi: &[f64], eta: &[f64]) -> bool {
        let r = norm2(xi, eta);
        let l1 = norm(xi) + norm(eta);
        match *self {
            Support::Ball { radius } => r > radius,
            Support::Annulus { inner, outer } => r < inner || r > outer,
            Support::LowHigh { d, high } => {
                if high {
                    l1 <= 1.0 / d
                } else {
                    l1 >= 2.0 / d
                }
            }
        }
    }

    fn rescaled(&self, factor: f64) -> Self {
        match *self {
            Support::Ball { radius } => Support::Ball { radius: radius * factor },
            Support::Annulus { inner, outer } => Support::Annulus { inner: inner * factor, outer: outer * factor },
            Support::LowHigh { d, high } => Support::LowHigh { d: d / factor, high },
        }
    }
}

#[derive(Clone)]
pub struct Symbol {
    name: String,
    eval: Evaluator,
    class: Option<SymbolClassParams>,
    x_independent: bool,
    support: Option<Support>,
}

impl fmt::Debug for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Symbol")
            .field("name", &self.name)
            .field("class", &self.class)
            .field("x_independent", &self.x_independent)
            .field("support", &self.support)
            .finish()
    }
}

impl Symbol {
    pub fn new(
        name: impl Into<String>,
        class: Option<SymbolClassParams>,
        eval: impl Fn(&[f64], &[f64], &[f64]) -> Complex64 + Send + Sync + 'static,
    ) -> Self {
        Self { name: name.into(), eval: Arc::new(eval), class, x_independent: false, support: None }
    }

    /// Symbol that does not depend on `x`.
    pub fn multiplier(
        name: impl Into<String>,
        class: Option<SymbolClassParams>,
        eval: impl Fn(&[f64], &[f64]) -> Complex64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            name: name.into(),
            eval: Arc::new(move |_x, xi, eta| eval(xi, eta)),
            class,
            x_independent: true,
            support: None,
        }
    }

    pub fn with_support(mut self, support: Support) -> Self {
        self.support = Some(support);
        self
    }

    pub fn with_class(mut self, class: Option<SymbolClassParams>) -> Self {
        self.class = class;
        self
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn class(&self) -> Option<SymbolClassParams> {
        self.class
    }

    pub fn is_x_independent(&self) -> bool {
        self.x_independent
    }

    pub fn support(&self) -> Option<Support> {
        self.support
    }

    pub fn evaluator(&self) -> &Evaluator {
        &self.eval
    }

    #[inline]
    pub fn eval(&self, x: &[f64], xi: &[f64], eta: &[f64]) -> Complex64 {
        (self.eval)(x, xi, eta)
    }

    /// Evaluation of an x-independent symbol.
    #[inline]
    pub fn eval_freq(&self, xi: &[f64], eta: &[f64]) -> Complex64 {
        const ORIGIN: [f64; 2] = [0.0; 2];
        (self.eval)(&ORIGIN[..xi.len()], xi, eta)
    }

    pub fn require_x_independent(&self) -> Result<()> {
        if self.x_independent {
            Ok(())
        } else {
            Err(Error::XDependent)
        }
    }

    /// Pointwise product with an x-independent factor.
    pub fn times(&self, name: impl Into<String>, factor: impl Fn(&[f64], &[f64]) -> f64 + Send + Sync + 'static) -> Self {
        let inner = self.eval.clone();
        Self {
            name: name.into(),
            eval: Arc::new(move |x, xi, eta| inner(x, xi, eta) * factor(xi, eta)),
            class: self.class,
            x_independent: self.x_independent,
            support: self.support,
        }
    }

    /// Spot-checks that the evaluator ignores `x` at random triples.
    pub fn spot_check_x_independence(&self, dim: usize, trials: usize, seed: u64) -> bool {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..trials).all(|_| {
            let mut pt = [[0.0f64; 2]; 4];
            for v in pt.iter_mut() {
                for c in v.iter_mut().take(dim) {
                    *c = rng.gen_range(-50.0..50.0);
                }
            }
            let a = self.eval(&pt[0][..dim], &pt[2][..dim], &pt[3][..dim]);
            let b = self.eval(&pt[1][..dim], &pt[2][..dim], &pt[3][..dim]);
            a == b
        })
    }

    /// Checks the declared support on a lattice ten times finer than `grid`'s
    /// frequency lattice, covering the Nyquist box. At most `max_points`
    /// nodes are visited, on a fixed stride.
    pub fn certify_support(&self, grid: &Grid, max_points: usize) -> Result<()> {
        let Some(support) = self.support else {
            return Ok(());
        };
        let dim = grid.dim();
        let per_axis = 10 * grid.points();
        let step = grid.frequency_step() / 10.0;
        let half = (per_axis / 2) as i64;
        let total = per_axis.pow(2 * dim as u32);
        let stride = (total / max_points.max(1)).max(1) | 1;
        let x = [0.0; 2];
        let mut idx = 0usize;
        while idx < total {
            let mut rem = idx;
            let mut coords = [0.0f64; 4];
            for c in coords.iter_mut().take(2 * dim) {
                let k = (rem % per_axis) as i64 - half;
                rem /= per_axis;
                *c = k as f64 * step;
            }
            let (xi, eta) = (&coords[..dim], &coords[dim..2 * dim]);
            if support.excludes(xi, eta) {
                let v = self.eval(&x[..dim], xi, eta);
                if v != Complex64::new(0.0, 0.0) {
                    return Err(Error::Precondition(format!(
                        "symbol {} is {v} at ξ={xi:?}, η={eta:?} outside its declared support",
                        self.name
                    )));
                }
            }
            idx += stride;
        }
        Ok(())
    }
}

/// `σ_λ(ξ,η) = σ(λξ, λη)`.
pub fn dilate_symbol(sigma: &Symbol, lambda: f64) -> Result<Symbol> {
    sigma.require_x_independent()?;
    if !(lambda.is_finite() && lambda > 0.0) {
        return Err(Error::Precondition(format!("dilation factor must be positive, got {lambda}")));
    }
    let inner = sigma.eval.clone();
    let eval: Evaluator = Arc::new(move |x, xi, eta| {
        let mut a = [0.0; 2];
        let mut b = [0.0; 2];
        for i in 0..xi.len() {
            a[i] = lambda * xi[i];
            b[i] = lambda * eta[i];
        }
        inner(x, &a[..xi.len()], &b[..eta.len()])
    });
    Ok(Symbol {
        name: format!("{}@dilate({lambda})", sigma.name),
        eval,
        class: sigma.class,
        x_independent: true,
        support: sigma.support.map(|s| s.rescaled(1.0 / lambda)),
    })
}

/// `σ_ε(ξ,η) = φ(εξ, εη) σ(ξ,η)` with `φ` a radial cutoff.
pub fn mollify(sigma: &Symbol, eps: f64, cutoff: Cutoff) -> Result<Symbol> {
    cutoff.validate()?;
    if !(eps.is_finite() && eps > 0.0) {
        return Err(Error::Precondition(format!("ε must be positive, got {eps}")));
    }
    let inner = sigma.eval.clone();
    let eval: Evaluator = Arc::new(move |x, xi, eta| {
        let w = cutoff.eval(eps * norm2(xi, eta));
        if w == 0.0 {
            Complex64::new(0.0, 0.0)
        } else {
            inner(x, xi, eta) * w
        }
    });
    let radius = cutoff.outer / eps;
    let support = match sigma.support {
        Some(Support::Ball { radius: r }) => Support::Ball { radius: r.min(radius) },
        _ => Support::Ball { radius },
    };
    Ok(Symbol {
        name: format!("{}@mollify({eps})", sigma.name),
        eval,
        class: sigma.class,
        x_independent: sigma.x_independent,
        support: Some(support),
    })
}

#[inline]
pub fn norm(v: &[f64]) -> f64 {
    v.iter().map(|c| c * c).sum::<f64>().sqrt()
}

#[inline]
pub fn norm2(xi: &[f64], eta: &[f64]) -> f64 {
    (xi.iter().map(|c| c * c).sum::<f64>() + eta.iter().map(|c| c * c).sum::<f64>()).sqrt()
}

#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(p, q)| p * q).sum()
}

/// Japanese bracket `(1 + |v|²)^{1/2}`.
#[inline]
pub fn bracket_of(v: &[f64]) -> f64 {
    (1.0 + v.iter().map(|c| c * c).sum::<f64>()).sqrt()
}
