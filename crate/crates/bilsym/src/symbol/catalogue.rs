//! Built-in symbols.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::profiles::{cone_cutoff, radial_cutoff};
use super::{bracket_of, dot, norm, norm2, Support, Symbol, SymbolClassParams};
use crate::error::{Error, Result};

/// Catalogue entry, as written in configuration files.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case", deny_unknown_fields)]
pub enum Builtin {
    /// `σ ≡ 1`.
    One,
    /// `(1 + |ξ|² + |η|²)^{m/2}`.
    Bracket { m: f64 },
    /// `(1 + |ξ|² + |η|)^{-1}`.
    ScatterHeatHalfwave,
    /// `(1 + |ξ+η|² + |ξ|² + |η|)^{-1}`.
    ScatterLaplaceHeatHalfwave,
    /// `e^{-ia·(ξ+η)}`.
    Modulated { a: Vec<f64> },
    /// `exp(-|(ξ,η) − c|²/(2w²))` with `c ∈ ℝ²ⁿ`.
    GaussianBump { center: Vec<f64>, width: f64 },
    /// `base` restricted to `radius ≤ |(ξ,η)| ≤ 4·radius` by the dyadic annulus profile.
    Annulus { base: Box<Builtin>, radius: f64 },
    /// `⟨ξ⟩^{m/2} e^{iκ⟨ξ⟩^{1−ρ}} ⟨η⟩^{m/2} e^{iκ⟨η⟩^{1−ρ}}` on the cone `⟨ξ⟩ ≈ ⟨η⟩`.
    ///
    /// A member of the `(m, ρ, 0)` class whose annular pieces have operator
    /// norms growing at the largest rate the class allows. The phase scale
    /// `κ` sets how soon that rate is reached: the sup-norm of a piece at
    /// radius `R` follows `R^{(1−ρ)n+m}` once `κR^{1−ρ}` is large, while its
    /// kernel spreads over `|x| ≲ κR^{−ρ}`, which must fit in the torus.
    ChirpProduct {
        m: f64,
        rho: f64,
        #[serde(default = "unit_scale")]
        scale: f64,
    },
}

impl Builtin {
    /// Parses the compact form used on the command line, e.g. `bracket(-1)`.
    pub fn parse(text: &str) -> Result<Self> {
        let text = text.trim();
        let (name, args) = match text.find('(') {
            Some(i) if text.ends_with(')') => (&text[..i], &text[i + 1..text.len() - 1]),
            Some(_) => return Err(Error::UnknownSymbol(text.into())),
            None => (text, ""),
        };
        let nums: Vec<f64> = if args.trim().is_empty() {
            Vec::new()
        } else {
            args.split(',')
                .map(|s| s.trim().parse::<f64>().map_err(|_| Error::UnknownSymbol(text.into())))
                .collect::<Result<_>>()?
        };
        let arity = |k: usize| -> Result<()> {
            if nums.len() == k {
                Ok(())
            } else {
                Err(Error::UnknownSymbol(text.into()))
            }
        };
        match name {
            "one" => arity(0).map(|_| Builtin::One),
            "bracket" => arity(1).map(|_| Builtin::Bracket { m: nums[0] }),
            "scatter_heat_halfwave" => arity(0).map(|_| Builtin::ScatterHeatHalfwave),
            "scatter_laplace_heat_halfwave" => arity(0).map(|_| Builtin::ScatterLaplaceHeatHalfwave),
            "modulated" if !nums.is_empty() => Ok(Builtin::Modulated { a: nums }),
            "gaussian_bump" if nums.len() >= 3 => {
                let width = nums[nums.len() - 1];
                Ok(Builtin::GaussianBump { center: nums[..nums.len() - 1].to_vec(), width })
            }
            "chirp_product" if nums.len() == 2 || nums.len() == 3 => Ok(Builtin::ChirpProduct {
                m: nums[0],
                rho: nums[1],
                scale: nums.get(2).copied().unwrap_or(1.0),
            }),
            _ => Err(Error::UnknownSymbol(text.into())),
        }
    }

    pub fn label(&self) -> String {
        match self {
            Builtin::One => "one".into(),
            Builtin::Bracket { m } => format!("bracket({m})"),
            Builtin::ScatterHeatHalfwave => "scatter_heat_halfwave".into(),
            Builtin::ScatterLaplaceHeatHalfwave => "scatter_laplace_heat_halfwave".into(),
            Builtin::Modulated { a } => format!("modulated({a:?})"),
            Builtin::GaussianBump { center, width } => format!("gaussian_bump({center:?},{width})"),
            Builtin::Annulus { base, radius } => format!("annulus({},{radius})", base.label()),
            Builtin::ChirpProduct { m, rho, scale } if *scale == 1.0 => format!("chirp_product({m},{rho})"),
            Builtin::ChirpProduct { m, rho, scale } => format!("chirp_product({m},{rho},{scale})"),
        }
    }
}

fn unit_scale() -> f64 {
    1.0
}

fn class(m: f64, rho: f64, delta: f64) -> Option<SymbolClassParams> {
    Some(SymbolClassParams { m, rho, delta })
}

/// Dyadic annulus profile: supported in `1 ≤ r ≤ 4`, and `Σ_j annulus(r/2^j)`
/// telescopes with the ball profile to 1.
pub fn annulus_profile(r: f64) -> f64 {
    radial_cutoff(r / 2.0) - radial_cutoff(r)
}

/// Builds a catalogue symbol for dimension `dim`.
///
/// `one` is declared in `(0, 1, 0)`, the smallest of the classes it belongs to.
pub fn builtin(spec: &Builtin, dim: usize) -> Result<Symbol> {
    if dim != 1 && dim != 2 {
        return Err(Error::Precondition(format!("dimension must be 1 or 2, got {dim}")));
    }
    let label = spec.label();
    Ok(match spec {
        Builtin::One => Symbol::multiplier(label, class(0.0, 1.0, 0.0), |_, _| Complex64::new(1.0, 0.0)),
        &Builtin::Bracket { m } => {
            if !m.is_finite() {
                return Err(Error::UnknownSymbol(label));
            }
            Symbol::multiplier(label, class(m, 1.0, 0.0), move |xi, eta| {
                let s = 1.0 + dot(xi, xi) + dot(eta, eta);
                Complex64::new(s.powf(m / 2.0), 0.0)
            })
        }
        Builtin::ScatterHeatHalfwave => Symbol::multiplier(label, class(-1.0, 0.5, 0.0), |xi, eta| {
            Complex64::new(1.0 / (1.0 + dot(xi, xi) + norm(eta)), 0.0)
        }),
        Builtin::ScatterLaplaceHeatHalfwave => Symbol::multiplier(label, class(-2.0, 1.0, 0.0), |xi, eta| {
            let mut sum = [0.0; 2];
            for d in 0..xi.len() {
                sum[d] = xi[d] + eta[d];
            }
            let s = &sum[..xi.len()];
            Complex64::new(1.0 / (1.0 + dot(s, s) + dot(xi, xi) + norm(eta)), 0.0)
        }),
        Builtin::Modulated { a } => {
            if a.len() != dim {
                return Err(Error::Precondition(format!("modulation needs {dim} components")));
            }
            let a = a.clone();
            Symbol::multiplier(label, class(0.0, 1.0, 0.0), move |xi, eta| {
                let phase = -(dot(&a, xi) + dot(&a, eta));
                Complex64::from_polar(1.0, phase)
            })
        }
        Builtin::GaussianBump { center, width } => {
            if center.len() != 2 * dim || !(*width > 0.0) {
                return Err(Error::Precondition(format!(
                    "gaussian_bump needs a center in ℝ^{} and a positive width",
                    2 * dim
                )));
            }
            let c = center.clone();
            let w = *width;
            Symbol::multiplier(label, class(0.0, 1.0, 0.0), move |xi, eta| {
                let mut d2 = 0.0;
                for d in 0..xi.len() {
                    d2 += (xi[d] - c[d]).powi(2) + (eta[d] - c[xi.len() + d]).powi(2);
                }
                Complex64::new((-d2 / (2.0 * w * w)).exp(), 0.0)
            })
        }
        Builtin::Annulus { base, radius } => {
            let r0 = *radius;
            if !(r0 > 0.0) {
                return Err(Error::Precondition("annulus radius must be positive".into()));
            }
            let inner = builtin(base, dim)?;
            inner
                .times(label, move |xi, eta| annulus_profile(norm2(xi, eta) / r0))
                .with_support(Support::Annulus { inner: r0, outer: 4.0 * r0 })
        }
        &Builtin::ChirpProduct { m, rho, scale } => {
            if !(0.0..=1.0).contains(&rho) || !m.is_finite() || !(scale > 0.0 && scale.is_finite()) {
                return Err(Error::Precondition("chirp_product needs finite m, ρ in [0,1] and κ > 0".into()));
            }
            Symbol::multiplier(label, class(m, rho, 0.0), move |xi, eta| {
                let bx = bracket_of(xi);
                let be = bracket_of(eta);
                let cone = cone_cutoff((be * be) / (bx * bx));
                if cone == 0.0 {
                    return Complex64::new(0.0, 0.0);
                }
                let amp = (bx * be).powf(m / 2.0) * cone;
                Complex64::from_polar(amp, scale * (bx.powf(1.0 - rho) + be.powf(1.0 - rho)))
            })
        }
    })
}
