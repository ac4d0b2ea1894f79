mod common;

use common::*;
use num_complex::Complex64;
use proptest::prelude::*;
use so3eq_core::signals::{left_translate_spatial, EulerGrid, RotationMatrix, SpectralSignal};
use so3eq_core::so3fft::{evaluate, ift_direct, FftPlan, ift_fast, ft_fast};
use so3eq_core::spectral_ops::{
    conv_left, conv_left_learned, conv_left_restricted, cov_right, pool, restricted_len,
    rotate_spectral, smooth, unpool, Filter,
};

fn random_full_filter(l: usize, seed: u64) -> Filter {
    Filter::full(random_spectrum(l, seed))
}

fn random_restricted(l: usize, p: i32, seed: u64) -> Filter {
    let mut r = rng(seed);
    Filter::restricted_from_fn(l, p, |_, _| gaussian_pair(&mut r)).unwrap()
}

#[test]
fn restricted_counts() {
    for l in 0..10 {
        assert_eq!(restricted_len(l, 0), l * (l + 2) + 1);
        if l >= 1 {
            assert_eq!(restricted_len(l, 1), l * (l + 2));
            assert_eq!(restricted_len(l, -1), l * (l + 2));
        }
    }
}

#[test]
fn degree_zero_filter() {
    let x = random_spectrum(3, 1);
    let mut psi = SpectralSignal::zeros(3);
    psi.set(0, 0, 0, Complex64::new(0.3, -0.7));
    let y = conv_left(&x, &Filter::full(psi)).unwrap();
    assert!((y.get(0, 0, 0) - x.get(0, 0, 0) * Complex64::new(0.3, 0.7)).norm() < 1e-15);
    assert!(y.coeffs()[1..].iter().all(|c| c.norm() == 0.0));
}

#[test]
fn convolution_matches_spatial_quadrature() {
    let l = 4;
    let x = random_spectrum(l, 2);
    let psi_hat = random_spectrum(l, 3);
    let y = conv_left(&x, &Filter::full(psi_hat.clone())).unwrap();
    let mut r = rng(4);
    for _ in 0..3 {
        let a = random_rotation(&mut r);
        let ainv = a.inverse();
        let oracle = haar_integral(2 * l, |al, be, ga| {
            let c = RotationMatrix::from_euler(al, be, ga);
            let (p, q, s) = (ainv * c).to_euler();
            evaluate(&x, al, be, ga) * evaluate(&psi_hat, p, q, s).conj()
        });
        let (al, be, ga) = a.to_euler();
        assert!((evaluate(&y, al, be, ga) - oracle).norm() <= 1e-4 * oracle.norm().max(1.0));
    }
}

#[test]
fn right_covariance_matches_spatial_quadrature() {
    let l = 4;
    let x = random_spectrum(l, 5);
    let psi_hat = random_spectrum(l, 6);
    let y = cov_right(&x, &Filter::full(psi_hat.clone())).unwrap();
    let mut r = rng(7);
    for _ in 0..3 {
        let a = random_rotation(&mut r);
        let ainv = a.inverse();
        let oracle = haar_integral(2 * l, |al, be, ga| {
            let c = RotationMatrix::from_euler(al, be, ga);
            let (p, q, s) = (c * ainv).to_euler();
            evaluate(&x, al, be, ga) * evaluate(&psi_hat, p, q, s).conj()
        });
        let (al, be, ga) = a.to_euler();
        assert!((evaluate(&y, al, be, ga) - oracle).norm() <= 1e-4 * oracle.norm().max(1.0));
    }
}

#[test]
fn right_covariance_preserves_order() {
    let x = random_column(5, 1, 8);
    let y = cov_right(&x, &random_full_filter(5, 9)).unwrap();
    assert_eq!(off_column(&y, 1), 0.0);
    let z = cov_right(&x, &Filter::full(SpectralSignal::zeros(5))).unwrap();
    assert!(z.coeffs().iter().all(|c| c.norm() == 0.0));
}

#[test]
fn left_convolution_leaves_the_subspace() {
    let x = random_column(2, 1, 10);
    let y = conv_left(&x, &random_full_filter(2, 11)).unwrap();
    assert!(off_column(&y, 1) > 1e-3);
}

#[test]
fn full_sum_reduces_to_single_term() {
    for p in [0, 1, -1] {
        let x = random_column(5, p, 12);
        let psi = random_restricted(5, p, 13);
        let a = conv_left(&x, &psi.to_full()).unwrap();
        let b = conv_left_restricted(&x, &psi).unwrap();
        assert!(max_diff(&a, &b) <= 1e-14);
    }
}

#[test]
fn restricted_identity_and_zero() {
    for p in [0, 1] {
        let x = random_column(6, p, 14);
        let y = conv_left_restricted(&x, &Filter::identity(6, p).unwrap()).unwrap();
        let y = smooth(&y, p).unwrap();
        assert!(max_diff(&y, &x) < 1e-15);
        let zero = Filter::restricted(6, p, vec![Complex64::new(0.0, 0.0); restricted_len(6, p)]).unwrap();
        let z = conv_left_restricted(&x, &zero).unwrap();
        assert!(z.coeffs().iter().all(|c| c.norm() == 0.0));
    }
}

#[test]
fn learned_path_drops_conjugation() {
    let x = random_column(4, 1, 15);
    let psi = random_restricted(4, 1, 16);
    let a = conv_left_learned(&x, &psi).unwrap();
    let b = conv_left_restricted(&x, &psi.conj()).unwrap();
    assert!(max_diff(&a, &b) == 0.0);
}

#[test]
fn restricted_rejects_wrong_order() {
    let x = random_column(4, 1, 17);
    assert!(conv_left_restricted(&x, &random_restricted(4, 0, 1)).is_err());
    let untagged = random_column(4, 0, 18).with_order(None);
    assert!(conv_left_restricted(&untagged, &random_restricted(4, 0, 1)).is_ok());
    assert!(conv_left_restricted(&untagged, &random_restricted(4, 1, 1)).is_err());
    assert!(conv_left_restricted(&random_column(3, 0, 1), &random_restricted(4, 0, 1)).is_err());
}

#[test]
fn smoothing_matches_spatial_integral() {
    let l = 6;
    let x = random_spectrum(l, 19);
    let mut r = rng(20);
    for q in [0, 1, -2] {
        let s = smooth(&x, q).unwrap();
        for _ in 0..4 {
            let a = random_rotation(&mut r);
            let (al, be, ga) = a.to_euler();
            let n = 256;
            let oracle: Complex64 = (0..n)
                .map(|t| {
                    let th = 2.0 * std::f64::consts::PI * t as f64 / n as f64;
                    Complex64::from_polar(1.0, q as f64 * th) * evaluate(&x, al, be, ga + th)
                })
                .sum::<Complex64>()
                / n as f64;
            assert!((evaluate(&s, al, be, ga) - oracle).norm() <= 1e-10);
        }
    }
}

#[test]
fn smoothing_projection_properties() {
    let x = random_spectrum(5, 21);
    let y = random_spectrum(5, 22);
    for q in [-1, 0, 1, 3] {
        let sx = smooth(&x, q).unwrap();
        assert_eq!(smooth(&sx, q).unwrap(), sx);
        let sy = smooth(&y, q).unwrap();
        let resid = x.sub(&sx).unwrap();
        assert!(resid.inner(&sy).unwrap().norm() <= 1e-12);
    }
    let c0 = random_column(5, 0, 23);
    assert_eq!(smooth(&c0, 0).unwrap().coeffs(), c0.coeffs());
    assert!(smooth(&c0, 1).unwrap().coeffs().iter().all(|c| c.norm() == 0.0));
    assert!(smooth(&x, 6).is_err());
}

#[test]
fn pool_unpool() {
    let x = random_spectrum(6, 24);
    assert_eq!(pool(&x, 6).unwrap(), x);
    assert_eq!(unpool(&x, 6).unwrap(), x);
    let p = pool(&x, 3).unwrap();
    assert!(p.norm_sq() <= x.norm_sq());
    assert_eq!(pool(&unpool(&p, 6).unwrap(), 3).unwrap(), p);
    let low = random_spectrum(3, 25);
    assert_eq!(pool(&unpool(&low, 6).unwrap(), 3).unwrap(), low);
    assert!(pool(&low, 4).is_err());
    assert!(unpool(&x, 5).is_err());
}

#[test]
fn rotation_basics() {
    let x = random_spectrum(8, 26);
    assert!(max_diff(&rotate_spectral(&x, &RotationMatrix::identity()), &x) < 1e-13);
    let th = 0.83;
    let y = rotate_spectral(&x, &RotationMatrix::z(th));
    for l in 0..=8 {
        let li = l as i32;
        for m in -li..=li {
            for n in -li..=li {
                let expect = x.get(l, m, n) * Complex64::from_polar(1.0, -(m as f64) * th);
                assert!((y.get(l, m, n) - expect).norm() < 1e-12);
            }
        }
    }
}

#[test]
fn rotation_is_left_translation() {
    let l = 4;
    let x = random_spectrum(l, 27);
    let mut r = rng(28);
    let b = random_rotation(&mut r);
    let y = rotate_spectral(&x, &b);
    let binv = b.inverse();
    for _ in 0..5 {
        let a = random_rotation(&mut r);
        let (p, q, s) = (binv * a).to_euler();
        let (al, be, ga) = a.to_euler();
        assert!((evaluate(&y, al, be, ga) - evaluate(&x, p, q, s)).norm() < 1e-11);
    }
}

#[test]
fn rotation_composes() {
    let x = random_spectrum(8, 29);
    let mut r = rng(30);
    for _ in 0..5 {
        let b1 = random_rotation(&mut r);
        let b2 = random_rotation(&mut r);
        let lhs = rotate_spectral(&rotate_spectral(&x, &b2), &b1);
        let rhs = rotate_spectral(&x, &(b1 * b2));
        assert!(max_diff(&lhs, &rhs) <= 1e-10);
    }
}

#[test]
fn convolution_and_smoothing_commute_with_rotation() {
    let mut r = rng(31);
    for seed in 0..4 {
        let x = random_spectrum(8, 40 + seed);
        let psi = random_full_filter(8, 50 + seed);
        let b = random_rotation(&mut r);
        let lhs = rotate_spectral(&conv_left(&x, &psi).unwrap(), &b);
        let rhs = conv_left(&rotate_spectral(&x, &b), &psi).unwrap();
        assert!(max_diff(&lhs, &rhs) <= 1e-10);
        for q in [0, 1] {
            let lhs = rotate_spectral(&smooth(&x, q).unwrap(), &b);
            let rhs = smooth(&rotate_spectral(&x, &b), q).unwrap();
            assert!(max_diff(&lhs, &rhs) <= 1e-12);
        }
    }
}

#[test]
fn spatial_translation_oracle_agrees_with_spectral_rotation() {
    let l = 8;
    let grid = EulerGrid::new(4 * (2 * l + 2), 4 * (2 * l + 2) + 1, 4 * (2 * l + 2));
    let grid = grid.unwrap();
    let mut xh = random_spectrum(l, 32);
    // a gently decaying spectrum keeps the interpolation error representative
    for deg in 0..=l {
        let w = 1.0 / (1.0 + deg as f64).powi(2);
        for c in xh.degree_block_mut(deg) {
            *c *= w;
        }
    }
    let x = ift_direct(&xh, &grid);
    let b = random_rotation(&mut rng(33));
    let spatial = left_translate_spatial(&x, &b);
    let spectral = ift_direct(&rotate_spectral(&xh, &b), &grid);
    let err = spatial.max_abs_diff(&spectral).unwrap() / spectral.max_abs();
    assert!(err <= 1e-2, "interpolation error {err}");
}

#[test]
fn rotation_preserves_norm_and_transforms_consistently() {
    let l = 6;
    let plan = FftPlan::for_band_limit(l);
    let x = random_column(l, 1, 34);
    let b = random_rotation(&mut rng(35));
    let y = rotate_spectral(&x, &b);
    assert!((y.norm() - x.norm()).abs() < 1e-12 * x.norm());
    assert!(off_column(&y, 1) < 1e-12);
    let back = ft_fast(&ift_fast(&y, &plan).unwrap(), &plan).unwrap();
    assert!(back.relative_error(&y) < 1e-10);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn prop_rotation_is_unitary(seed in 0u64..10_000, l in 0usize..7) {
        let x = random_spectrum(l, seed);
        let b = random_rotation(&mut rng(seed ^ 0x5a5a));
        let y = rotate_spectral(&x, &b);
        prop_assert!((y.norm() - x.norm()).abs() <= 1e-11 * x.norm().max(1.0));
        let back = rotate_spectral(&y, &b.inverse());
        prop_assert!(back.relative_error(&x) <= 1e-11);
    }

    #[test]
    fn prop_pool_never_increases_norm(seed in 0u64..10_000, l in 0usize..8, cut in 0usize..8) {
        let x = random_spectrum(l, seed);
        let cut = cut.min(l);
        let p = pool(&x, cut).unwrap();
        prop_assert!(p.norm_sq() <= x.norm_sq() + 1e-12);
    }

    #[test]
    fn prop_smoothing_is_idempotent_projection(seed in 0u64..10_000, q in -3i32..=3) {
        let x = random_spectrum(4, seed);
        let s = smooth(&x, q).unwrap();
        prop_assert_eq!(smooth(&s, q).unwrap(), s.clone());
        prop_assert!(s.norm_sq() <= x.norm_sq() + 1e-12);
    }

    #[test]
    fn prop_convolution_is_linear(seed in 0u64..10_000) {
        let x = random_spectrum(3, seed);
        let y = random_spectrum(3, seed + 1);
        let psi = random_full_filter(3, seed + 2);
        let mut sum = x.clone();
        sum.add_assign(&y).unwrap();
        let mut lhs = conv_left(&x, &psi).unwrap();
        lhs.add_assign(&conv_left(&y, &psi).unwrap()).unwrap();
        let rhs = conv_left(&sum, &psi).unwrap();
        prop_assert!(max_diff(&lhs, &rhs) <= 1e-12);
    }
}
