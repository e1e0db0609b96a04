//! The disk solver against oracles that share no code with it: a
//! second-order finite-difference solve of the radial ODE (Richardson
//! extrapolated) and the integral representation of `I_m`.

use jetstokes::diskspec::{bessel_example_error, bessel_i, solve_mode_dirichlet};
use jetstokes::{Domain, DomainConfig, ScalarField};
use num_complex::Complex64;
use proptest::prelude::*;
use std::f64::consts::PI;

/// `I_m(x) = (1/2π) ∫₀^{2π} e^{x cos τ} cos(mτ) dτ`; the trapezoid rule is
/// exponentially accurate for this periodic integrand.
fn bessel_integral(m: u32, x: f64) -> f64 {
    let k = 128;
    (0..k)
        .map(|j| {
            let tau = 2.0 * PI * j as f64 / k as f64;
            (x * tau.cos()).exp() * (m as f64 * tau).cos()
        })
        .sum::<f64>()
        / k as f64
}

/// `u'' + u'/r - β²u = f` on `[0, κ]`, `u'(0) = 0`, `u(κ) = 0`, by central
/// differences on `N + 1` equispaced nodes and the Thomas algorithm.
fn fd_radial(kappa: f64, beta: f64, n: usize, f: impl Fn(f64) -> f64) -> Vec<f64> {
    let h = kappa / n as f64;
    let (mut lower, mut diag, mut upper, mut rhs) = (vec![0.0; n], vec![0.0; n], vec![0.0; n], vec![0.0; n]);
    // r = 0: u'' + u'/r → 2u''(0); the ghost value is u₁ by symmetry
    diag[0] = -4.0 / (h * h) - beta * beta;
    upper[0] = 4.0 / (h * h);
    rhs[0] = f(0.0);
    for i in 1..n {
        let r = i as f64 * h;
        lower[i] = 1.0 / (h * h) - 1.0 / (2.0 * r * h);
        diag[i] = -2.0 / (h * h) - beta * beta;
        upper[i] = 1.0 / (h * h) + 1.0 / (2.0 * r * h);
        rhs[i] = f(r);
    }
    // u_N = 0 drops the last upper entry
    for i in 1..n {
        let w = lower[i] / diag[i - 1];
        diag[i] -= w * upper[i - 1];
        rhs[i] -= w * rhs[i - 1];
    }
    let mut u = vec![0.0; n + 1];
    u[n - 1] = rhs[n - 1] / diag[n - 1];
    for i in (0..n - 1).rev() {
        u[i] = (rhs[i] - upper[i] * u[i + 1]) / diag[i];
    }
    u
}

#[test]
fn power_series_matches_integral_representation() {
    for m in 0..5 {
        for k in 0..=20 {
            let x = 0.25 * k as f64;
            let (a, b) = (bessel_i(m, x), bessel_integral(m, x));
            assert!((a - b).abs() <= 1e-14 * b.abs().max(1.0), "I_{m}({x}): {a} vs {b}");
        }
    }
}

#[test]
fn mode_solver_matches_finite_differences() {
    let domain = Domain::new(DomainConfig::new(0.5, 2.0 * PI, 1.0, 24, 4, 2)).unwrap();
    let kappa = 0.5;
    let beta = domain.config().beta(2);
    let g = |r: f64| (2.0 * r).cosh() + r * r;
    let f = ScalarField::from_mode_fn(&domain, 2, 0, |r| Complex64::new(g(r), 0.0)).unwrap();
    let u = solve_mode_dirichlet(2, &f).unwrap();
    let coarse = fd_radial(kappa, beta, 2000, g);
    let fine = fd_radial(kappa, beta, 4000, g);
    let mut worst = 0.0f64;
    for i in 0..=10 {
        let j = 200 * i;
        let r = j as f64 * kappa / 2000.0;
        let oracle = (4.0 * fine[2 * j] - coarse[j]) / 3.0;
        let spectral = domain.grid().eval_at(0, u.mode(2, 0), r).re;
        worst = worst.max((spectral - oracle).abs());
    }
    let scale = fine.iter().fold(0.0f64, |a, b| a.max(b.abs()));
    assert!(worst < 1e-9 * scale, "max deviation {worst:e} at scale {scale:e}");
}

#[test]
fn bessel_example_converges_until_plateau() {
    let errors: Vec<f64> = [4, 8, 16, 32]
        .iter()
        .map(|&n_r| bessel_example_error(&Domain::new(DomainConfig::new(0.5, 2.0 * PI, 1.0, n_r, 4, 1)).unwrap()).unwrap())
        .collect();
    for w in errors.windows(2) {
        assert!(w[0] <= 1e-12 || w[1] * 10.0 <= w[0], "{errors:?}");
    }
    assert!(errors[3] < 1e-8);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn series_and_integral_agree(m in 0u32..6, x in 0.0f64..6.0) {
        let b = bessel_integral(m, x);
        prop_assert!((bessel_i(m, x) - b).abs() <= 1e-13 * b.abs().max(1.0));
    }
}
