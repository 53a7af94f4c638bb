use std::f64::consts::PI;

use bilsym::grid::{ComplexField, Grid};
use bilsym::operator::apply_fft_diag;
use bilsym::scatter::{
    convergence_report, duhamel_factor, duhamel_field, evolve, gap_field, integrate_rk4, residual_vs_ode,
    scatter_limit, PhaseTriple, TAYLOR_SEAM,
};
use bilsym::symbol::Symbol;
use bilsym::Complex64;
use proptest::prelude::*;

fn grid() -> Grid {
    Grid::new(1, 32, 2.0 * PI).unwrap()
}

fn data(g: &Grid) -> (ComplexField, ComplexField) {
    let f = ComplexField::from_real_fn(g, |x| x[0].cos() + 0.5 * (3.0 * x[0]).sin() + 0.2);
    let h = ComplexField::from_real_fn(g, |x| (2.0 * x[0]).cos() - 0.3 * (4.0 * x[0]).sin());
    (f, h)
}

/// Trigonometric polynomial with wavenumbers in `[-4, 4]`.
fn low_trig(g: &Grid, c: &[(f64, f64)]) -> ComplexField {
    ComplexField::from_fn(g, |x| {
        c.iter()
            .enumerate()
            .map(|(k, &(a, b))| Complex64::new(a, b) * Complex64::from_polar(1.0, (k as f64 - 4.0) * x[0]))
            .sum()
    })
}

fn heat_phase(xi: f64, eta: f64) -> f64 {
    -(1.0 + xi * xi) - eta.abs()
}

#[test]
fn phase_components() {
    let pt = PhaseTriple::laplace_heat_halfwave();
    for (xi, eta) in [(0.3, -1.2), (5.0, 7.0), (-40.0, 13.5)] {
        let want = -(xi + eta) * (xi + eta) - (1.0 + xi * xi) - f64::abs(eta);
        assert!((pt.lambda(&[xi], &[eta]) - want).abs() <= 1e-14 * want.abs());
    }
    let sign = PhaseTriple::heat_halfwave().sign_report(&grid());
    assert_eq!(sign.margin, Some(1.0));
    let zero = PhaseTriple::zero().sign_report(&grid());
    assert_eq!(zero.margin, None);
    assert!(PhaseTriple::laplace_heat_halfwave().backward_flow(&grid()));
    assert!(!PhaseTriple::heat_halfwave().backward_flow(&grid()));
}

#[test]
fn taylor_seam_is_continuous() {
    for lam in [-3.0, -1.0, 0.5, 2.0] {
        let t_seam = TAYLOR_SEAM / f64::abs(lam);
        for t in [t_seam * (1.0 - 1e-9), t_seam * (1.0 + 1e-9)] {
            let exact = (lam * t).exp_m1() / lam;
            assert!((duhamel_factor(t, lam) - exact).abs() <= 1e-12 * exact.abs());
        }
        let exact = (lam * t_seam * 0.5).exp_m1() / lam;
        assert!((duhamel_factor(t_seam * 0.5, lam) - exact).abs() <= 1e-15 * exact.abs());
    }
    assert_eq!(duhamel_factor(2.5, 0.0), 2.5);
}

#[test]
fn gap_is_a_multiplier() {
    let g = grid();
    let (f, h) = data(&g);
    let pt = PhaseTriple::heat_halfwave();
    for t in [0.5, 1.0, 3.0] {
        let sym = Symbol::multiplier("gap", None, move |xi, eta| {
            let l = heat_phase(xi[0], eta[0]);
            Complex64::new((t * l).exp() / l, 0.0)
        });
        let want = apply_fft_diag(&sym, &f, &h).unwrap().field;
        let got = gap_field(&pt, &f, &h, t).unwrap();
        assert!(got.max_abs_diff(&want).unwrap() <= 1e-10 * want.max_abs().max(1e-300));
        let direct = duhamel_field(&pt, &f, &h, t).unwrap().sub(&scatter_limit(&pt, &f, &h).unwrap()).unwrap();
        assert!(direct.max_abs_diff(&want).unwrap() <= 1e-10 * want.max_abs().max(1e-12));
    }
}

#[test]
fn zero_phase_gives_product() {
    let g = grid();
    let (f, h) = data(&g);
    let pt = PhaseTriple::zero();
    let t = 1.7;
    let (u, v, w) = evolve(&pt, &f, &h, t).unwrap();
    let want = f.mul(&h).unwrap().scale(Complex64::new(t, 0.0));
    assert!(u.max_abs_diff(&want).unwrap() < 1e-13);
    assert!(v.max_abs_diff(&f).unwrap() < 1e-14);
    assert!(w.max_abs_diff(&h).unwrap() < 1e-14);
    assert!(scatter_limit(&pt, &f, &h).is_err());
    assert!(convergence_report(&pt, &f, &h, &[1.0, 2.0], 0.0, 2.0).is_err());
}

#[test]
fn rk4_converges_at_fourth_order() {
    let g = grid();
    let (f, h) = data(&g);
    // With a(D) = Δ the u-equation runs the heat flow backwards, so only the
    // forward triple has a meaningful time-stepping baseline.
    for (pt, t) in [(PhaseTriple::heat_halfwave(), 1.0), (PhaseTriple::heat_halfwave(), 0.25)] {
        let coarse = residual_vs_ode(&pt, &f, &h, t, 1e-2).unwrap();
        let fine = residual_vs_ode(&pt, &f, &h, t, 5e-3).unwrap();
        assert!(coarse.pass && fine.pass, "{}: {} / {}", pt.name, coarse.summary(), fine.summary());
        let ratio = coarse.measured / fine.measured;
        assert!((12.0..=20.0).contains(&ratio), "{}: ratio {ratio}", pt.name);
    }
}

#[test]
fn convergence_rate_and_plain_l2() {
    let g = grid();
    let (f, h) = data(&g);
    let pt = PhaseTriple::heat_halfwave();
    let times = [1.0, 2.0, 4.0, 6.0];
    let r = convergence_report(&pt, &f, &h, &times, 0.0, 2.0).unwrap();
    let limit = bilsym::grid::lp_norm(&scatter_limit(&pt, &f, &h).unwrap(), 2.0).unwrap();
    assert!(r.pass && r.measured >= 0.9);
    let gaps = r.column("gap").unwrap();
    assert!(gaps.windows(2).all(|w| w[1] < w[0]));
    for (&t, &gap) in times.iter().zip(&gaps) {
        let l2 = bilsym::grid::lp_norm(&gap_field(&pt, &f, &h, t).unwrap(), 2.0).unwrap();
        assert!((gap - l2).abs() <= 1e-13 * limit);
    }
}

#[test]
fn rk4_rejects_bad_steps() {
    let g = grid();
    let (f, h) = data(&g);
    let pt = PhaseTriple::heat_halfwave();
    assert!(integrate_rk4(&pt, &f, &h, 1.0, 0.0).is_err());
    assert!(integrate_rk4(&pt, &f, &h, 1.0, -0.1).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn evolve_is_bilinear(
        c1 in prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), 9),
        c2 in prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), 9),
        c3 in prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), 9),
        alpha in -3.0..3.0f64,
        t in 0.05..3.0f64,
    ) {
        let g = grid();
        let (f1, f2, h) = (low_trig(&g, &c1), low_trig(&g, &c2), low_trig(&g, &c3));
        let a = Complex64::new(alpha, 0.0);
        let mix = f1.scale(a).add(&f2).unwrap();
        let heat = PhaseTriple::heat_halfwave();
        let laplace = PhaseTriple::laplace_heat_halfwave();
        let maps: [&dyn Fn(&ComplexField, &ComplexField) -> ComplexField; 2] = [
            &|f, g| evolve(&heat, f, g, t).unwrap().0,
            &|f, g| duhamel_field(&laplace, f, g, t).unwrap(),
        ];
        for u in maps {
            let lhs = u(&mix, &h);
            let rhs = u(&f1, &h).scale(a).add(&u(&f2, &h)).unwrap();
            prop_assert!(lhs.max_abs_diff(&rhs).unwrap() <= 1e-12 * rhs.max_abs().max(1.0));
            let lhs = u(&h, &mix);
            let rhs = u(&h, &f1).scale(a).add(&u(&h, &f2)).unwrap();
            prop_assert!(lhs.max_abs_diff(&rhs).unwrap() <= 1e-12 * rhs.max_abs().max(1.0));
        }
    }
}
