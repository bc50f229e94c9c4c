use helixwave_core::soliton::DEFAULT_NONLINEARITY;
use helixwave_core::{
    hirota_f, hirota_log_f, kdv_residual, logistic_derivative, n_soliton_field, n_soliton_value,
    phase_shift, sech2_train, single_soliton, single_soliton_field, Error, FieldGrid, Pulse,
    SolitonSpec, WaveTrain,
};
use proptest::prelude::*;

fn residual_pair(build: impl Fn(&FieldGrid) -> FieldGrid, c1: f64) -> (f64, f64) {
    let coarse = FieldGrid::with_spacing(0.0, 200, 0.05, 0.0, 5, 0.002).unwrap();
    let fine = FieldGrid::with_spacing(0.0, 400, 0.025, 0.0, 10, 0.001).unwrap();
    (
        kdv_residual(&build(&coarse), c1, DEFAULT_NONLINEARITY).unwrap(),
        kdv_residual(&build(&fine), c1, DEFAULT_NONLINEARITY).unwrap(),
    )
}

#[test]
fn two_soliton_residual_converges() {
    let spec = SolitonSpec::new(vec![1.0, 2.0]).unwrap();
    let (a, b) = residual_pair(|g| n_soliton_field(&spec, g).unwrap(), 0.0);
    assert!(a < 1e-2, "{a}");
    assert!(a / b >= 3.5, "{a} -> {b}");
}

#[test]
fn three_soliton_residual_converges() {
    let spec = SolitonSpec::new(vec![1.0, 2.0, 3.0]).unwrap();
    let (a, b) = residual_pair(|g| n_soliton_field(&spec, g).unwrap(), 0.0);
    assert!(a / b >= 3.5, "{a} -> {b}");
}

#[test]
fn single_soliton_with_zero_drift_converges() {
    let (a, b) = residual_pair(|g| single_soliton_field(1.0, 0.0, g).unwrap(), 0.0);
    assert!(a < 1e-3, "{a}");
    assert!(a / b >= 3.5, "{a} -> {b}");
}

#[test]
fn field_matches_numeric_second_difference() {
    let spec = SolitonSpec::new(vec![1.0, 2.0]).unwrap();
    let h = 1e-4;
    for &(x, t) in &[(0.0, 0.0), (1.3, -0.4), (-2.0, 0.7), (4.0, 1.0), (-6.5, -2.0)] {
        let l = |x| hirota_log_f(&spec, x, t).unwrap();
        let numeric = 2.0 * (l(x + h) - 2.0 * l(x) + l(x - h)) / (h * h);
        let exact = n_soliton_value(&spec, x, t).unwrap();
        assert!((numeric - exact).abs() < 1e-6, "({x}, {t}): {numeric} vs {exact}");
    }
}

#[test]
fn two_solitons_separate_at_large_times() {
    let spec = SolitonSpec::new(vec![1.0, 2.0]).unwrap();
    for t in [-20.0, 20.0] {
        // fast pulse near x = 4t, slow near x = t
        let grid = FieldGrid::new(-100.0, 100.0, 20001, t - 0.01, t + 0.01, 3).unwrap();
        let f = n_soliton_field(&spec, &grid).unwrap();
        let row = f.row(1);
        let mut peaks: Vec<f64> = (1..row.len() - 1)
            .filter(|&i| row[i] > row[i - 1] && row[i] >= row[i + 1] && row[i] > 0.1)
            .map(|i| row[i])
            .collect();
        peaks.sort_by(f64::total_cmp);
        assert_eq!(peaks.len(), 2, "t = {t}: {peaks:?}");
        assert!((peaks[0] - 0.5).abs() < 1e-3, "{peaks:?}");
        assert!((peaks[1] - 2.0).abs() < 1e-3, "{peaks:?}");
    }
}

#[test]
fn mass_is_conserved() {
    let kappa = 1.5;
    let grid = FieldGrid::new(-60.0, 80.0, 14001, 0.0, 10.0, 11).unwrap();
    let f = single_soliton_field(kappa, 0.0, &grid).unwrap();
    for it in 0..grid.nt() {
        let m = f.integrate_x(it);
        assert!((m - 2.0 * kappa).abs() < 1e-6 * 2.0 * kappa, "t = {}: {m}", grid.t(it));
    }
}

#[test]
fn peak_travels_at_kappa_squared() {
    let kappa = 1.2;
    let grid = FieldGrid::new(-5.0, 20.0, 2501, 0.0, 8.0, 9).unwrap();
    let f = single_soliton_field(kappa, 0.0, &grid).unwrap();
    for it in 0..grid.nt() {
        let (x, _) = f.argmax_x(it);
        assert!((x - kappa * kappa * grid.t(it)).abs() <= grid.dx());
    }
}

#[test]
fn large_arguments_stay_finite() {
    let spec = SolitonSpec::new(vec![1.0, 2.0, 3.0]).unwrap();
    assert!(hirota_log_f(&spec, 400.0, 0.0).unwrap().is_finite());
    assert!(n_soliton_value(&spec, 400.0, 0.0).unwrap().is_finite());
    assert!(hirota_f(&spec, 400.0, 0.0).is_err());
    assert!(hirota_f(&spec, -400.0, 0.0).unwrap() > 0.0);
}

#[test]
fn logistic_derivative_integrates_to_capacity() {
    for &(l, k, t0) in &[(1.0, 1.0, 0.0), (250.0, 0.3, 40.0), (3.0, 5.0, -2.0)] {
        let (a, b) = (t0 - 40.0 / k, t0 + 40.0 / k);
        let n = 20000;
        let h = (b - a) / n as f64;
        let mut s = 0.0;
        for i in 0..=n {
            let w = if i == 0 || i == n { 1.0 } else if i % 2 == 1 { 4.0 } else { 2.0 };
            s += w * logistic_derivative(l, k, t0, a + i as f64 * h).unwrap();
        }
        let integral = s * h / 3.0;
        assert!((integral - l).abs() < 1e-6 * l, "{integral}");
    }
}

proptest! {
    #[test]
    fn tau_function_positive(k1 in 0.1f64..3.0, dk in 0.05f64..2.0, x in -50.0f64..50.0, t in -5.0f64..5.0) {
        let spec = SolitonSpec::new(vec![k1, k1 + dk]).unwrap();
        match hirota_f(&spec, x, t) {
            Ok(f) => prop_assert!(f > 0.0),
            Err(e) => prop_assert!(matches!(e, Error::Range(_))),
        }
        prop_assert!(hirota_log_f(&spec, x, t).unwrap().is_finite());
    }

    #[test]
    fn phase_shift_symmetric(a in 0.01f64..10.0, b in 0.01f64..10.0) {
        prop_assume!(a != b);
        prop_assert_eq!(phase_shift(a, b).unwrap(), phase_shift(b, a).unwrap());
        prop_assert!(phase_shift(a, b).unwrap() < 0.0);
    }

    #[test]
    fn one_soliton_matches_closed_form(k in 0.2f64..3.0, x in -20.0f64..20.0, t in -3.0f64..3.0) {
        let spec = SolitonSpec::new(vec![k]).unwrap();
        let hirota = n_soliton_value(&spec, x, t).unwrap();
        let closed = single_soliton(k, 0.0, x, t).unwrap();
        prop_assert!((hirota - closed).abs() < 1e-10);
    }

    #[test]
    fn train_permutation_invariant(
        amps in prop::collection::vec(0.1f64..50.0, 4),
        widths in prop::collection::vec(0.01f64..1.0, 4),
        t in -50.0f64..150.0,
        rot in 0usize..4,
    ) {
        let centers = [5.0, 30.0, 61.0, 90.0];
        let pulses: Vec<Pulse> = (0..4).map(|i| Pulse::new(amps[i], widths[i], centers[i])).collect();
        let mut shuffled = pulses.clone();
        shuffled.rotate_left(rot);
        shuffled.swap(0, 3);
        let a = WaveTrain::new(pulses, 0.0).unwrap();
        let b = WaveTrain::new(shuffled, 0.0).unwrap();
        prop_assert_eq!(sech2_train(&a, t), sech2_train(&b, t));
    }
}
