use logsl::spectral::{
    field_log, forward_transform, inverse_transform, l2_norm, mean, polar_decompose, Field, GridSpec,
};
use logsl::C64;
use proptest::prelude::*;

fn grids() -> impl Strategy<Value = GridSpec> {
    prop_oneof![
        (2usize..=6).prop_map(|p| GridSpec::one_d(1 << p).unwrap()),
        Just(GridSpec::one_d(128).unwrap()),
        Just(GridSpec::new(2, 8).unwrap()),
        Just(GridSpec::new(3, 4).unwrap()),
    ]
}

fn field_on(grid: GridSpec) -> impl Strategy<Value = Field> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), grid.len())
        .prop_map(move |v| Field::new(grid, v.into_iter().map(|(a, b)| C64::new(a, b)).collect()).unwrap())
}

fn fields() -> impl Strategy<Value = Field> {
    grids().prop_flat_map(field_on)
}

/// A field whose values stay in a disc around a nonzero centre.
fn admissible_fields() -> impl Strategy<Value = Field> {
    (grids(), 0.5f64..2.0, -3.0f64..3.0).prop_flat_map(|(grid, r, phi)| {
        let centre = C64::from_polar(r, phi);
        prop::collection::vec((0.0f64..0.6, -3.1f64..3.1), grid.len()).prop_map(move |v| {
            Field::new(grid, v.into_iter().map(|(s, a)| centre * (1.0 + C64::from_polar(s, a))).collect()).unwrap()
        })
    })
}

fn naive_coefficient(f: &Field, freq: &[i64]) -> C64 {
    let g = f.grid();
    let mut sum = C64::new(0.0, 0.0);
    for (i, v) in f.values().iter().enumerate() {
        let phase: f64 = g
            .unravel(i)
            .iter()
            .zip(freq)
            .map(|(&k, &n)| n as f64 * g.coordinate(k))
            .sum();
        sum += v * C64::from_polar(1.0, -phase);
    }
    sum / g.len() as f64
}

proptest! {
    #[test]
    fn round_trip(f in fields()) {
        let back = inverse_transform(&forward_transform(&f));
        let scale = f.values().iter().map(|v| v.norm()).fold(0.0, f64::max).max(1e-300);
        prop_assert!(f.max_abs_diff(&back) / scale <= 1e-12);
    }

    #[test]
    fn parseval(f in fields()) {
        let s = forward_transform(&f);
        let lhs = l2_norm(&f);
        prop_assert!((lhs - s.l2_norm()).abs() <= 1e-12 * lhs.max(1.0));
    }

    #[test]
    fn coefficients_match_direct_sum(f in grids().prop_filter("small", |g| g.len() <= 64).prop_flat_map(field_on)) {
        let s = forward_transform(&f);
        for i in 0..f.grid().len() {
            let freq = f.grid().frequencies_at(i);
            let expected = naive_coefficient(&f, &freq);
            prop_assert!((s.get(&freq) - expected).norm() <= 1e-12);
        }
        prop_assert!((s.mean() - mean(&f)).norm() <= 1e-14);
    }

    #[test]
    fn polar_reconstruction(f in admissible_fields()) {
        let p = polar_decompose(&f).unwrap();
        prop_assert!(p.a > 0.0);
        prop_assert!(p.theta > -std::f64::consts::PI && p.theta <= std::f64::consts::PI);
        prop_assert_eq!(p.w.mean(), C64::new(0.0, 0.0));
        let back = p.reconstruct();
        prop_assert!(f.max_abs_diff(&back) <= 1e-12 * (1.0 + p.a));
        let rho = l2_norm(&f);
        let split = p.a * p.a + p.w.l2_norm().powi(2);
        prop_assert!((rho * rho - split).abs() <= 1e-12 * rho * rho);
    }

    #[test]
    fn log_inverts_exp(f in admissible_fields()) {
        let logged = field_log(&f).unwrap();
        let back = logged.map(|v| v.exp()).unwrap();
        let scale = f.values().iter().map(|v| v.norm()).fold(0.0, f64::max);
        prop_assert!(f.max_abs_diff(&back) <= 1e-10 * scale);
    }
}

#[test]
fn plane_wave_is_a_single_coefficient() {
    let grid = GridSpec::new(2, 8).unwrap();
    let f = Field::from_fn(grid, |x| C64::from_polar(1.5, 3.0 * x[0] - 2.0 * x[1] + 0.4)).unwrap();
    let s = forward_transform(&f);
    for i in 0..grid.len() {
        let freq = grid.frequencies_at(i);
        let c = s.coefficients()[i];
        if freq == [3, -2] {
            assert!((c - C64::from_polar(1.5, 0.4)).norm() < 1e-13);
        } else {
            assert!(c.norm() < 1e-13, "{freq:?} {c}");
        }
    }
    assert!((l2_norm(&f) - 1.5).abs() < 1e-14);
}

#[test]
fn constant_field_has_no_remainder() {
    let grid = GridSpec::one_d(16).unwrap();
    let f = Field::constant(grid, C64::from_polar(2.0, -1.0)).unwrap();
    let p = polar_decompose(&f).unwrap();
    assert!((p.a - 2.0).abs() < 1e-14);
    assert!((p.theta + 1.0).abs() < 1e-14);
    assert!(p.w.l2_norm() < 1e-14);
}

#[test]
fn zero_mean_is_rejected() {
    let grid = GridSpec::one_d(16).unwrap();
    let f = Field::from_fn(grid, |x| C64::from_polar(1.0, x[0])).unwrap();
    assert!(matches!(polar_decompose(&f), Err(logsl::error::Error::ZeroMean { .. })));
    assert!(field_log(&f).is_err());
}

#[test]
fn grids_need_power_of_two_points() {
    assert!(GridSpec::one_d(12).is_err());
    assert!(GridSpec::one_d(2).is_err());
    assert!(GridSpec::new(0, 8).is_err());
    assert_eq!(GridSpec::new(2, 8).unwrap().len(), 64);
}
