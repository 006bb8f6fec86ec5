use logsl::linear::{
    block_matrix, classify, diagonalize, global_rate, hamiltonian_block, mode_rate, symplectic_form, Mat2,
    RegimeKind,
};
use logsl::C64;
use nalgebra::{Complex, Matrix2};
use proptest::prelude::*;

fn to_na(m: &Mat2) -> Matrix2<Complex<f64>> {
    let a = m.0;
    Matrix2::new(a[0][0], a[0][1], a[1][0], a[1][1])
}

fn params() -> impl Strategy<Value = (f64, f64)> {
    (-0.499f64..10.0, 0.001f64..50.0)
}

fn close(a: C64, b: C64, tol: f64) -> bool {
    (a - b).norm() <= tol * (1.0 + b.norm())
}

proptest! {
    #[test]
    fn change_of_basis_inverts((lambda, mu) in params(), n in 1u64..2000) {
        let d = diagonalize(&block_matrix(n, lambda, mu).unwrap());
        let prod = to_na(&d.p) * to_na(&d.p_inv);
        let err = (prod - Matrix2::identity()).camax();
        prop_assert!(err <= 1e-10, "n={} err={}", n, err);
    }

    #[test]
    fn similarity_reproduces_block((lambda, mu) in params(), n in 1u64..2000) {
        let b = block_matrix(n, lambda, mu).unwrap();
        let d = diagonalize(&b);
        let back = to_na(&d.p) * to_na(&d.d) * to_na(&d.p_inv);
        let a = to_na(&b.entries);
        let err = (back - a).camax() / a.camax();
        prop_assert!(err <= 1e-10, "n={} err={}", n, err);
    }

    #[test]
    fn eigenvalues_match_schur((lambda, mu) in params(), n in 1u64..500) {
        let b = block_matrix(n, lambda, mu).unwrap();
        let ours = b.eigenvalues();
        let theirs: Vec<C64> = to_na(&b.entries).schur().eigenvalues().unwrap().iter().copied().collect();
        let scale = to_na(&b.entries).camax().max(1.0);
        let straight = (ours[0] - theirs[0]).norm().max((ours[1] - theirs[1]).norm());
        let swapped = (ours[0] - theirs[1]).norm().max((ours[1] - theirs[0]).norm());
        prop_assert!(straight.min(swapped) <= 1e-9 * scale, "{:?} vs {:?}", ours, theirs);
    }

    #[test]
    fn condition_number_matches_svd((lambda, mu) in params(), n in 1u64..500) {
        let d = diagonalize(&block_matrix(n, lambda, mu).unwrap());
        let sv = to_na(&d.p).svd(false, false).singular_values;
        let expected = sv.max() / sv.min();
        prop_assert!((d.p.condition_number() - expected).abs() <= 1e-8 * expected);
    }

    #[test]
    fn overdamped_shells_stop((lambda, mu) in params()) {
        let bound = (mu / 2.0).ceil() as u64 + 1;
        let mut left = false;
        for n in 1..=bound + 50 {
            let kind = classify(n, lambda, mu).kind;
            if n > bound {
                prop_assert_ne!(kind, RegimeKind::Overdamped);
            }
            if kind == RegimeKind::Oscillatory {
                left = true;
            } else {
                prop_assert!(!left, "n={} re-entered {:?}", n, kind);
            }
        }
    }

    #[test]
    fn rates_nondecreasing_in_shell((lambda, mu) in params(), n in 1u64..1000) {
        let a = mode_rate(n, lambda, mu).unwrap();
        let b = mode_rate(n + 1, lambda, mu).unwrap();
        prop_assert!(b.alpha_j >= a.alpha_j - 1e-12);
        prop_assert!(a.alpha_j > 0.0 && a.alpha_j <= mu / 2.0 + 1e-15);
        let (global, _) = global_rate(lambda, mu).unwrap();
        prop_assert!(global <= a.alpha_j + 1e-12);
    }

    #[test]
    fn propagator_matches_matrix_exponential((lambda, mu) in params(), n in 1u64..50, t in 0.0f64..2.0) {
        let b = block_matrix(n, lambda, mu).unwrap();
        let d = diagonalize(&b);
        if d.regime.kind == RegimeKind::Jordan {
            return Ok(());
        }
        let ours = to_na(&d.propagator(t));
        let theirs = (to_na(&b.entries) * Complex::new(0.0, -t)).exp();
        let err = (ours - theirs).camax() / theirs.camax();
        prop_assert!(err <= 1e-8, "err={}", err);
    }

    #[test]
    fn hamiltonian_change_is_unimodular(lambda in -0.499f64..10.0, n in 1u64..5000) {
        let h = hamiltonian_block(n, lambda).unwrap();
        let det = h.s_matrix().det() * h.s_inv_matrix().det();
        prop_assert!(close(det, C64::new(1.0, 0.0), 1e-12));
        let id = to_na(&h.s_matrix()) * to_na(&h.s_inv_matrix());
        prop_assert!((id - Matrix2::identity()).camax() <= 1e-10);
    }
}

#[test]
fn symplectic_form_squares_to_minus_one() {
    let j = to_na(&symplectic_form());
    assert_eq!(j * j, -Matrix2::<Complex<f64>>::identity());
}

#[test]
fn jordan_band_is_not_diagonalizable_but_triangularizes() {
    // n² + 2λn = μ²/4 at n = 1, λ = 0, μ = 2
    let b = block_matrix(1, 0.0, 2.0).unwrap();
    let d = diagonalize(&b);
    assert_eq!(d.regime.kind, RegimeKind::Jordan);
    assert_eq!(d.d.0[1][0], C64::new(0.0, 0.0));
    assert!(close(d.d.0[0][0], d.d.0[1][1], 1e-15));
    let back = to_na(&d.p) * to_na(&d.d) * to_na(&d.p_inv);
    assert!((back - to_na(&b.entries)).camax() < 1e-12);
    let r = mode_rate(1, 0.0, 2.0).unwrap();
    assert_eq!((r.alpha_j, r.beta_j), (1.0, 1));
}
