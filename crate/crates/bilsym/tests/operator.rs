use std::f64::consts::PI;

use bilsym::grid::{ComplexField, Grid, Representation};
use bilsym::operator::{
    apply, apply_direct, apply_fft_diag, apply_separable, bessel_potential, fractional_integral, kernel_slice,
    kernel_slice_direct, Method, Taper,
};
use bilsym::symbol::{builtin, Builtin, Symbol, SymbolClassParams};
use bilsym::{Complex64, Error};
use proptest::prelude::*;

fn grid(n: usize) -> Grid {
    Grid::new(1, n, 2.0 * PI).unwrap()
}

fn gaussian(g: &Grid, c: f64, w: f64) -> ComplexField {
    ComplexField::from_real_fn(g, |x| (-((x[0] - c) / w).powi(2)).exp())
}

/// `L⁻² Σ_ξ Σ_η σ(x,ξ,η) f̂(ξ) ĝ(η) e^{ix(ξ+η)}` with `f̂ = h Σ f e^{−ixξ}`,
/// all written as plain sums.
fn oracle(sigma: &Symbol, f: &ComplexField, g: &ComplexField) -> Vec<Complex64> {
    let grid = f.grid();
    let n = grid.points();
    let (h, l) = (grid.spacing(), grid.period());
    let freqs: Vec<f64> = (0..n).map(|k| grid.frequency(k)[0]).collect();
    let xs: Vec<f64> = (0..n).map(|j| grid.position(j)[0]).collect();
    let hat = |u: &ComplexField| -> Vec<Complex64> {
        freqs
            .iter()
            .map(|&xi| xs.iter().zip(u.values()).map(|(&x, v)| v * Complex64::from_polar(h, -x * xi)).sum())
            .collect()
    };
    let (fh, gh) = (hat(f), hat(g));
    xs.iter()
        .map(|&x| {
            let mut acc = Complex64::new(0.0, 0.0);
            for (a, &xi) in freqs.iter().enumerate() {
                for (b, &eta) in freqs.iter().enumerate() {
                    acc += sigma.eval(&[x], &[xi], &[eta]) * fh[a] * gh[b] * Complex64::from_polar(1.0, x * (xi + eta));
                }
            }
            acc / (l * l)
        })
        .collect()
}

fn x_dependent() -> Symbol {
    Symbol::new("xdep", Some(SymbolClassParams::new(-1.0, 1.0, 0.0).unwrap()), |x, xi, eta| {
        let b = (1.0 + xi[0] * xi[0] + eta[0] * eta[0]).powf(-0.5);
        Complex64::new(1.0 + 0.3 * x[0].cos(), 0.2 * (2.0 * x[0]).sin()) * b
    })
}

#[test]
fn direct_matches_plain_sum() {
    let g = grid(16);
    let f = gaussian(&g, 2.0, 0.7);
    let h = ComplexField::from_real_fn(&g, |x| (2.0 * x[0]).cos() + 0.1);
    for sigma in [builtin(&Builtin::Bracket { m: -1.0 }, 1).unwrap(), x_dependent()] {
        let got = apply_direct(&sigma, &f, &h).unwrap().field;
        let want = oracle(&sigma, &f, &h);
        let scale = want.iter().map(|v| v.norm()).fold(0.0, f64::max);
        for (a, b) in got.values().iter().zip(&want) {
            assert!((a - b).norm() <= 1e-12 * scale);
        }
    }
}

#[test]
fn method_tags() {
    let g = grid(16);
    let f = gaussian(&g, 1.0, 0.5);
    let bracket = builtin(&Builtin::Bracket { m: -1.0 }, 1).unwrap();
    let fast = apply(&bracket, &f, &f).unwrap();
    assert_eq!(fast.method, Method::FftDiag);
    assert!(fast.residual.is_none());
    let slow = apply(&x_dependent(), &f, &f).unwrap();
    assert_eq!(slow.method, Method::Direct);
    let direct = apply_direct(&bracket, &f, &f).unwrap().field;
    let checked = fast.cross_check(&direct).unwrap();
    assert!(checked.residual.unwrap() < 1e-12);
    assert!(matches!(apply_fft_diag(&x_dependent(), &f, &f), Err(Error::XDependent)));
}

#[test]
fn separable_matches_direct() {
    let g = grid(32);
    let f = gaussian(&g, 2.0, 0.6);
    let h = gaussian(&g, 4.0, 0.9);
    let b = builtin(&Builtin::Bracket { m: -1.0 }, 1).unwrap();
    let re = ComplexField::from_fn(&g, |x| Complex64::new(1.0 + 0.3 * x[0].cos(), 0.2 * (2.0 * x[0]).sin()));
    let sep = apply_separable(&[(re, b)], &f, &h).unwrap();
    assert_eq!(sep.method, Method::Separable);
    let direct = apply_direct(&x_dependent(), &f, &h).unwrap().field;
    assert!(sep.field.max_abs_diff(&direct).unwrap() <= 1e-12 * direct.max_abs());
}

#[test]
fn grid_mismatch_rejected() {
    let f = gaussian(&grid(16), 1.0, 0.5);
    let h = gaussian(&grid(32), 1.0, 0.5);
    let one = builtin(&Builtin::One, 1).unwrap();
    assert!(matches!(apply(&one, &f, &h), Err(Error::GridMismatch)));
}

#[test]
fn kernel_routes_agree() {
    let g = grid(16);
    for (sigma, taper) in [
        (builtin(&Builtin::Bracket { m: -1.5 }, 1).unwrap(), Taper::Off),
        (builtin(&Builtin::Bracket { m: 0.0 }, 1).unwrap(), Taper::Auto),
        (x_dependent(), Taper::On),
    ] {
        for base in [0, 5] {
            let a = kernel_slice(&sigma, base, &g, taper).unwrap();
            let b = kernel_slice_direct(&sigma, base, &g, taper).unwrap();
            let scale = b.values.iter().map(|v| v.norm()).fold(0.0, f64::max);
            for (u, v) in a.values.iter().zip(&b.values) {
                assert!((u - v).norm() <= 1e-10 * scale);
            }
        }
    }
}

#[test]
fn kernel_reconstructs_operator() {
    let g = grid(32);
    let f = gaussian(&g, 2.5, 0.6);
    let h = ComplexField::from_real_fn(&g, |x| (x[0]).sin() + 0.5);
    for sigma in [builtin(&Builtin::Bracket { m: 0.0 }, 1).unwrap(), x_dependent()] {
        for base in [3, 17] {
            let slice = kernel_slice(&sigma, base, &g, Taper::On).unwrap();
            let lam = slice.taper.expect("taper applied");
            let inner = sigma.clone();
            let tapered = Symbol::new("tapered", None, move |x, xi, eta| {
                inner.eval(x, xi, eta) * (-(xi[0] * xi[0] + eta[0] * eta[0]) / (lam * lam)).exp()
            });
            let want = apply_direct(&tapered, &f, &h).unwrap().field.values()[base];
            let got = slice.reconstruct(&f, &h).unwrap();
            assert!((got - want).norm() <= 1e-8 * want.norm().max(1e-3), "{got} vs {want}");
        }
    }
}

#[test]
fn bessel_potential_is_a_group() {
    let g = grid(64);
    let f = gaussian(&g, 3.0, 0.4);
    let back = bessel_potential(&bessel_potential(&f, 1.5).unwrap(), -1.5).unwrap();
    assert!(back.max_abs_diff(&f).unwrap() < 1e-12);
    assert_eq!(bessel_potential(&f, 0.0).unwrap(), f);
}

#[test]
fn fractional_integral_guards() {
    let g = grid(16);
    let f = gaussian(&g, 3.0, 0.4);
    assert!(fractional_integral(0.0, &f, &f).is_err());
    assert!(fractional_integral(2.0, &f, &f).is_err());
    assert!(fractional_integral(1.0, &f.to_spectral(), &f).is_err());
}

fn trig(g: &Grid, coeffs: &[(f64, f64)]) -> ComplexField {
    ComplexField::from_fn(g, |x| {
        coeffs
            .iter()
            .enumerate()
            .map(|(k, &(a, b))| Complex64::new(a, b) * Complex64::from_polar(1.0, (k as f64 - 3.0) * x[0]))
            .sum()
    })
}

fn coeffs() -> impl Strategy<Value = Vec<(f64, f64)>> {
    prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), 7)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn bilinear_in_both_slots(
        c1 in coeffs(), c2 in coeffs(), c3 in coeffs(),
        ar in -2.0..2.0f64, ai in -2.0..2.0f64,
        m in -2.0..1.0f64,
    ) {
        let g = grid(32);
        let (f1, f2, h) = (trig(&g, &c1), trig(&g, &c2), trig(&g, &c3));
        let alpha = Complex64::new(ar, ai);
        for sigma in [builtin(&Builtin::Bracket { m }, 1).unwrap(), x_dependent()] {
            let t = |a: &ComplexField, b: &ComplexField| apply(&sigma, a, b).unwrap().field;
            let mix = f1.scale(alpha).add(&f2).unwrap();
            let left = t(&mix, &h);
            let want = t(&f1, &h).scale(alpha).add(&t(&f2, &h)).unwrap();
            let scale = want.max_abs().max(1.0);
            prop_assert!(left.max_abs_diff(&want).unwrap() <= 1e-12 * scale);
            let right = t(&h, &mix);
            let want = t(&h, &f1).scale(alpha).add(&t(&h, &f2)).unwrap();
            prop_assert!(right.max_abs_diff(&want).unwrap() <= 1e-12 * scale);
        }
    }

    #[test]
    fn fractional_integral_monotone(
        f in prop::collection::vec(0.0..1.0f64, 32),
        bump in prop::collection::vec(0.0..1.0f64, 32),
        h in prop::collection::vec(0.0..1.0f64, 32),
        s in 0.2..1.8f64,
    ) {
        let g = grid(32);
        let field = |v: &[f64]| {
            ComplexField::new(g.clone(), v.iter().map(|&a| Complex64::new(a, 0.0)).collect(), Representation::Spatial)
                .unwrap()
        };
        let larger: Vec<f64> = f.iter().zip(&bump).map(|(a, b)| a + b).collect();
        let lo = fractional_integral(s, &field(&f), &field(&h)).unwrap();
        let hi = fractional_integral(s, &field(&larger), &field(&h)).unwrap();
        for (a, b) in lo.values().iter().zip(hi.values()) {
            prop_assert!(a.re >= 0.0 && a.re <= b.re);
        }
    }
}
