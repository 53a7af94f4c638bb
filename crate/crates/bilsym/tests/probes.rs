use std::f64::consts::PI;

use bilsym::grid::{ComplexField, Grid};
use bilsym::probes::families::pair;
use bilsym::probes::fit::{fit_line, loglog_slope, spread};
use bilsym::probes::{
    annulus_slope, c_sigma_exponent, critical_order, decay_probe, domination_constant, kernel_decay_exponent,
    muckenhoupt_constant, opnorm_probe, power_weight, segment_orders, sobolev_exponent, sobolev_order, trial_ratio,
    BallFamily, Comparison, DecayMode, Family, LebesgueExponents, ProbeReport, SobolevReading, WeightPair,
};
use bilsym::symbol::{builtin, Builtin, SymbolClassParams};
use bilsym::Complex64;
use proptest::prelude::*;

fn grid(n: usize) -> Grid {
    Grid::new(1, n, 2.0 * PI).unwrap()
}

fn sample_report() -> ProbeReport {
    let mut r = ProbeReport::new("sample", "ratio")
        .param("p", 2.0)
        .param("family", Family::Mixed)
        .columns(&["trial", "value"]);
    r.push(vec![0.0, 1.5]);
    r.push(vec![1.0, f64::NAN]);
    r.push(vec![2.0, f64::INFINITY]);
    r.push(vec![3.0, f64::NEG_INFINITY]);
    r.push(vec![4.0, 0.1 + 0.2]);
    r.note("a note");
    r.judge(1.25, f64::INFINITY, 0.0, Comparison::AtMost)
}

/// Equality that treats NaN as equal to itself.
fn same(a: f64, b: f64) -> bool {
    (a.is_nan() && b.is_nan()) || a == b
}

#[test]
fn report_json_is_lossless() {
    let r = sample_report();
    let text = r.to_json().unwrap();
    assert!(text.contains("\"NaN\"") && text.contains("\"-inf\""));
    let back = ProbeReport::from_json(&text).unwrap();
    assert_eq!(back.name, r.name);
    assert_eq!(back.params, r.params);
    assert_eq!(back.columns, r.columns);
    assert_eq!(back.notes, r.notes);
    assert_eq!(back.pass, r.pass);
    assert!(same(back.measured, r.measured) && same(back.target, r.target));
    for (a, b) in back.trials.iter().zip(&r.trials) {
        assert!(a.iter().zip(b).all(|(x, y)| same(*x, *y)));
    }
    assert!(ProbeReport::from_json("{\"schema\": 1}").is_err());
}

#[test]
fn report_csv_round_trips_values() {
    let r = sample_report();
    let mut buf = Vec::new();
    r.write_csv(&mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "trial,value");
    assert_eq!(lines.len(), 6);
    assert_eq!(lines[2], "1.0,NaN");
    let v: f64 = lines[5].split(',').nth(1).unwrap().parse().unwrap();
    assert_eq!(v, 0.1 + 0.2);
}

#[test]
fn non_finite_measurement_never_passes() {
    for c in [Comparison::Within, Comparison::AtMost, Comparison::AtLeast] {
        let r = ProbeReport::new("x", "y").judge(f64::NAN, 0.0, f64::INFINITY, c);
        assert!(!r.pass && r.consistent());
        let r = ProbeReport::new("x", "y").judge(f64::INFINITY, f64::INFINITY, 1.0, c);
        assert!(!r.pass && r.consistent());
    }
}

#[test]
fn probes_are_seeded() {
    let g = grid(32);
    for family in [Family::Gaussian, Family::Steps, Family::Positive, Family::Mixed] {
        let (a1, b1) = pair(&g, family, 7, 3);
        let (a2, b2) = pair(&g, family, 7, 3);
        assert_eq!((a1.values(), b1.values()), (a2.values(), b2.values()));
        let (c, _) = pair(&g, family, 8, 3);
        assert_ne!(a1.values(), c.values());
    }
    let sigma = builtin(&Builtin::Bracket { m: -1.0 }, 1).unwrap();
    let exps = LebesgueExponents::new(2.0, 2.0).unwrap();
    let r1 = opnorm_probe(&sigma, exps, Family::Mixed, 20, &g, 11, None, 0.0).unwrap();
    let r2 = opnorm_probe(&sigma, exps, Family::Mixed, 20, &g, 11, None, 0.0).unwrap();
    assert_eq!(r1.to_json().unwrap(), r2.to_json().unwrap());
    assert!(opnorm_probe(&sigma, exps, Family::Mixed, 19, &g, 11, None, 0.0).is_err());
}

#[test]
fn constant_symbol_obeys_holder() {
    // T_1(f, g) = f g, so every ratio is at most 1 by Hölder.
    let g = grid(64);
    let one = builtin(&Builtin::One, 1).unwrap();
    for (p1, p2) in [(2.0, 2.0), (1.0, 4.0), (3.0, 1.5), (4.0, 4.0)] {
        let exps = LebesgueExponents::new(p1, p2).unwrap();
        let r = opnorm_probe(&one, exps, Family::Mixed, 24, &g, 5, Some(1.0), 1e-10).unwrap();
        assert!(r.pass && r.consistent(), "{}", r.summary());
        assert!(r.column("ratio").unwrap().iter().all(|v| *v > 0.0));
    }
    let zero = ComplexField::zeros(&g);
    let exps = LebesgueExponents::new(2.0, 2.0).unwrap();
    assert_eq!(trial_ratio(&one, &exps, &zero, &zero).unwrap(), None);
}

#[test]
fn exponent_formulas() {
    // Banach triangle corners at ρ = 0, n = 1.
    assert_eq!(critical_order(2.0, 2.0, 0.0, 1).unwrap(), -0.5);
    assert_eq!(critical_order(1.0, f64::INFINITY, 0.0, 1).unwrap(), -1.0);
    assert_eq!(critical_order(f64::INFINITY, f64::INFINITY, 0.0, 1).unwrap(), -1.0);
    assert_eq!(critical_order(1.0, 1.0, 0.0, 1).unwrap(), -2.0);
    assert_eq!(critical_order(4.0, 4.0, 1.0, 2).unwrap(), 0.0);
    assert!(critical_order(0.5, 2.0, 0.0, 1).is_err());
    let (a, b) = segment_orders(1.0, 2.0, 0.0, 1).unwrap();
    assert_eq!((a, b), (-1.5, -1.0));
    assert_eq!(sobolev_order(1.0, 0.5, 1), -1.5);
    assert_eq!(sobolev_exponent(2.0, 4.0, 0.25, 1, SobolevReading::Distinct), Some(2.0));
    assert_eq!(sobolev_exponent(2.0, 4.0, 0.25, 1, SobolevReading::Repeated), Some(4.0 / 3.0));
    assert_eq!(sobolev_exponent(2.0, 2.0, 1.0, 1, SobolevReading::Distinct), None);
    assert_eq!(annulus_slope(0.5, -0.5, 1), 0.0);
    assert_eq!(annulus_slope(0.0, -1.0, 2), 1.0);
    assert_eq!(kernel_decay_exponent(-1.0, 0, 0.5, 1), -2.0);
    assert_eq!(kernel_decay_exponent(0.0, 2, 1.0, 2), -6.0);
    assert_eq!(c_sigma_exponent(0.5, 1), 0.0);
}

#[test]
fn decay_guard_on_bounded_kernels() {
    let g = grid(64);
    let sigma = builtin(&Builtin::Bracket { m: -3.0 }, 1).unwrap();
    let class = SymbolClassParams::new(-3.0, 1.0, 0.0).unwrap();
    assert!(decay_probe(&sigma, class, DecayMode::Power, &g, 0.1).is_err());
    let class = SymbolClassParams::new(-1.0, 0.0, 0.0).unwrap();
    assert!(decay_probe(&sigma, class, DecayMode::Power, &g, 0.1).is_err());
}

#[test]
fn domination_vacuous_on_zero_data() {
    let g = grid(32);
    let sigma = builtin(&Builtin::Bracket { m: -0.5 }, 1).unwrap();
    let zero = ComplexField::zeros(&g);
    assert_eq!(domination_constant(&sigma, 1.0, &zero, &zero).unwrap(), None);
    let neg = ComplexField::from_real_fn(&g, |x| x[0].sin());
    assert!(domination_constant(&sigma, 1.0, &neg, &neg).is_err());
}

#[test]
fn weight_pairs_validated() {
    let g = grid(32);
    let one = ComplexField::constant(&g, Complex64::new(1.0, 0.0));
    let zero_spot = ComplexField::from_real_fn(&g, |x| if x[0] == 0.0 { 0.0 } else { 1.0 });
    assert!(WeightPair::new(zero_spot, one.clone(), 2.0, 2.0, 1.0).is_err());
    let complex = ComplexField::constant(&g, Complex64::new(1.0, 0.1));
    assert!(WeightPair::new(complex, one.clone(), 2.0, 2.0, 1.0).is_err());
    assert!(WeightPair::new(one.clone(), one.clone(), 0.5, 2.0, 1.0).is_err());
    assert!(WeightPair::new(one.clone(), one.clone(), 2.0, 2.0, 0.0).is_err());

    let w1 = power_weight(&g, 0.3);
    let w2 = power_weight(&g, -0.2);
    let wp = WeightPair::new(w1.clone(), w2.clone(), 2.0, 3.0, 1.2).unwrap();
    for ((d, a), b) in wp.derived().iter().zip(w1.values()).zip(w2.values()) {
        let want = a.re.powf(0.6) * b.re.powf(0.4);
        assert!((d - want).abs() <= 1e-14 * want);
    }
    let unit = WeightPair::new(one.clone(), one, 2.0, 2.0, 1.0).unwrap();
    assert!((muckenhoupt_constant(&unit, BallFamily::default()).unwrap() - 1.0).abs() < 1e-14);
}

#[test]
fn fit_helpers() {
    let x = [1.0, 2.0, 4.0, 8.0];
    let y: Vec<f64> = x.iter().map(|v: &f64| 3.0 * v.powf(-1.5)).collect();
    let f = loglog_slope(&x, &y).unwrap();
    assert!((f.slope + 1.5).abs() < 1e-12 && f.rms < 1e-12);
    assert!(fit_line(&[1.0], &[1.0]).is_err());
    assert!(fit_line(&[1.0, 1.0], &[1.0, 2.0]).is_err());
    assert!(loglog_slope(&[1.0, 2.0], &[0.0, 1.0]).is_err());
    assert_eq!(spread(&[2.0, 2.0, 2.0]), 0.0);
    assert_eq!(spread(&[1.0, 1.5]), 0.5);
    assert_eq!(spread(&[0.0, 1.0]), f64::INFINITY);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn pass_flag_matches_numbers(
        measured in prop::num::f64::ANY,
        target in -10.0..10.0f64,
        tolerance in 0.0..5.0f64,
        which in 0usize..3,
    ) {
        let c = [Comparison::Within, Comparison::AtMost, Comparison::AtLeast][which];
        let r = ProbeReport::new("p", "q").judge(measured, target, tolerance, c);
        prop_assert!(r.consistent());
        let back = ProbeReport::from_json(&r.to_json().unwrap()).unwrap();
        prop_assert!(back.consistent());
        prop_assert_eq!(back.pass, r.pass);
        prop_assert!(same(back.measured, measured));
    }

    #[test]
    fn critical_order_bounded_by_corners(a in 0.0..=1.0f64, b in 0.0..=1.0f64, rho in 0.0..=1.0f64) {
        let p = |v: f64| if v == 0.0 { f64::INFINITY } else { 1.0 / v };
        let m = critical_order(p(a), p(b), rho, 1).unwrap();
        // At ρ = 1 the order is 0; otherwise it lies in [2(ρ−1), (ρ−1)/2].
        prop_assert!(m <= (rho - 1.0) / 2.0 + 1e-15);
        prop_assert!(m >= 2.0 * (rho - 1.0) - 1e-15);
    }
}
