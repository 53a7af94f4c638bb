use std::f64::consts::PI;

use bilsym::decompose::{
    commutator_r, cube_split, dyadic_partition, leibniz_residual, leibniz_split, low_high_split, make_bump,
};
use bilsym::grid::{ComplexField, Grid};
use bilsym::probes::families::pair;
use bilsym::probes::Family;
use bilsym::symbol::{builtin, leibniz_profile, Builtin};
use bilsym::Complex64;
use proptest::prelude::*;

fn grid(n: usize, l: f64) -> Grid {
    Grid::new(1, n, l).unwrap()
}

#[test]
fn partition_of_unity() {
    for (dim, n) in [(1, 64), (2, 16)] {
        let g = Grid::new(dim, n, 2.0 * PI).unwrap();
        let j_max = ((g.nyquist().log2().floor() as usize).saturating_sub(1)).max(1);
        let part = dyadic_partition(&g, j_max).unwrap();
        assert!(part.residual() < 1e-12, "residual {}", part.residual());
        let t = part.to_tensor();
        assert_eq!(t.points[0] as usize, j_max + 1);
    }
    let g = grid(64, 2.0 * PI);
    assert!(dyadic_partition(&g, 10).is_err());
}

#[test]
fn partition_supports() {
    let g = grid(128, 2.0 * PI);
    let part = dyadic_partition(&g, 5).unwrap();
    for r in (0..4000).map(|i| i as f64 * 0.02) {
        let (xi, eta) = ([r * 0.6], [r * 0.8]);
        for (j, piece) in part.pieces.iter().enumerate() {
            let v = piece.eval_freq(&xi, &eta).re;
            assert!(v >= 0.0);
            let (lo, hi) = if j == 0 { (0.0, 2.0) } else { (2f64.powi(j as i32 - 1), 2f64.powi(j as i32 + 1)) };
            if r < lo || r > hi {
                assert_eq!(v, 0.0, "piece {j} nonzero at radius {r}");
            }
        }
    }
}

#[test]
fn leibniz_profile_functional_equation() {
    for i in 1..2000 {
        let r = i as f64 * 0.005;
        assert!((leibniz_profile(r) + leibniz_profile(1.0 / r) - 1.0).abs() < 1e-14, "r = {r}");
    }
    assert_eq!(leibniz_profile(0.4), 1.0);
    assert_eq!(leibniz_profile(2.5), 0.0);
}

#[test]
fn low_high_identity() {
    let g = grid(64, 2.0 * PI);
    let sigma = builtin(&Builtin::Bracket { m: 0.7 }, 1).unwrap();
    for d in [0.125, 0.5, 1.0, 3.0] {
        let (low, high) = low_high_split(&sigma, d).unwrap();
        for a in 0..g.len() {
            for b in 0..g.len() {
                let (xi, eta) = ([g.frequency(a)[0]], [g.frequency(b)[0]]);
                let s = sigma.eval_freq(&xi, &eta);
                let gap = low.eval_freq(&xi, &eta) + high.eval_freq(&xi, &eta) - s;
                assert!(gap.norm() <= 2.0 * f64::EPSILON * s.norm());
            }
        }
    }
    assert!(low_high_split(&sigma, 0.0).is_err());
    let (_, big) = cube_split(&sigma, 4.0).unwrap();
    let (_, one) = low_high_split(&sigma, 1.0).unwrap();
    assert_eq!(big.eval_freq(&[1.2], &[0.3]), one.eval_freq(&[1.2], &[0.3]));
}

#[test]
fn bump_properties() {
    let g = grid(256, 64.0);
    for (d, rho) in [(1.0, 0.5), (0.25, 0.5), (0.1, 1.0)] {
        let b = make_bump(&g, d, rho, 40).unwrap();
        assert!(b.min_value >= -1e-10);
        assert!(b.field().values().iter().all(|v| v.re >= -1e-10));
        assert!((b.field().values()[40].re - 1.0).abs() < 1e-14);
        assert!(b.spectral_leak() <= 1e-12 * b.field().to_spectral().max_abs());
        assert!(b.l2_constant.is_finite() && b.l2_constant > 0.0);
        assert!((b.radius - d.powf(-rho) / 8.0).abs() < 1e-15);
    }
    assert!(make_bump(&g, 1e6, 1.0, 0).is_err());
}

#[test]
fn commutator_vanishes_for_products() {
    let g = grid(256, 64.0);
    let phi = make_bump(&g, 0.1, 1.0, 128).unwrap();
    let one = builtin(&Builtin::One, 1).unwrap();
    let f = ComplexField::from_real_fn(&g, |x| (-((x[0] - 31.0) / 2.0).powi(2)).exp());
    let h = ComplexField::from_real_fn(&g, |x| (0.7 * x[0]).cos() * (-((x[0] - 33.0) / 3.0).powi(2)).exp());
    let r = commutator_r(&one, &phi, &f, &h).unwrap();
    let scale = f.max_abs() * h.max_abs();
    assert!(r.max_abs() <= 1e-12 * scale);

    let bracket = builtin(&Builtin::Bracket { m: -1.0 }, 1).unwrap();
    let r = commutator_r(&bracket, &phi, &f, &h).unwrap();
    assert!(r.max_abs() > 1e-6 * scale);
}

#[test]
fn leibniz_split_guards() {
    let sigma = builtin(&Builtin::One, 1).unwrap();
    assert!(leibniz_split(&sigma, 0.0, 0.0).is_err());
    assert!(leibniz_split(&sigma, f64::NAN, 1.0).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(20))]

    #[test]
    fn leibniz_reconstruction(
        which in 0usize..3,
        m in -2.0..1.0f64,
        s in 0.1..2.5f64,
        trial in 0usize..1000,
    ) {
        let g = grid(64, 2.0 * PI);
        let b = [
            Builtin::Bracket { m },
            Builtin::One,
            Builtin::GaussianBump { center: vec![1.0, -2.0], width: 3.0 },
        ][which]
            .clone();
        let sigma = builtin(&b, 1).unwrap();
        let (f, h) = pair(&g, Family::Mixed, 41, trial);
        prop_assert!(leibniz_residual(&sigma, m, s, &f, &h).unwrap() < 1e-10);
    }

    #[test]
    fn low_high_sums_pointwise(d in 0.01..10.0f64, xi in -200.0..200.0f64, eta in -200.0..200.0f64, m in -3.0..3.0f64) {
        let sigma = builtin(&Builtin::Bracket { m }, 1).unwrap();
        let (low, high) = low_high_split(&sigma, d).unwrap();
        let s = sigma.eval_freq(&[xi], &[eta]);
        let gap: Complex64 = low.eval_freq(&[xi], &[eta]) + high.eval_freq(&[xi], &[eta]) - s;
        prop_assert!(gap.norm() <= 2.0 * f64::EPSILON * s.norm());
    }
}

#[test]
fn localized_pieces_sum_to_symbol() {
    let g = grid(64, 2.0 * PI);
    let part = dyadic_partition(&g, 3).unwrap();
    let sigma = builtin(&Builtin::Bracket { m: -1.0 }, 1).unwrap();
    let (f, h) = pair(&g, Family::LowTrig, 9, 0);
    let whole = bilsym::operator::apply(&sigma, &f, &h).unwrap().field;
    let mut sum = ComplexField::zeros(&g);
    for j in 0..=part.j_max() {
        let piece = part.localize(&sigma, j).unwrap();
        sum = sum.add(&bilsym::operator::apply(&piece, &f, &h).unwrap().field).unwrap();
    }
    assert!(sum.max_abs_diff(&whole).unwrap() <= 1e-12 * whole.max_abs());
}
