//! Helmholtz decomposition with potentials vanishing on the free surface.
//!
//! Every `u ∈ 𝐋²` splits as `u = Pu + ∇q` with `∇·Pu = 0` and `q = 0` on
//! `S_F`. The potential solves `Δq = ∇·u` with a homogeneous Dirichlet
//! condition on `S_F`, so `P` reuses the per-mode disk solver.
//!
//! The pressure operator `Q` maps a velocity to the harmonic function whose
//! free-surface trace is `2μ n·(∇v)n = 2μ ∂_r v_r`.

use crate::diskspec::{harmonic_extension, solve_dirichlet};
use crate::error::{Error, Result};
use crate::fieldspace::kernels;
use crate::fieldspace::{div, grad, norm_hkp, BandLimit, Domain, ScalarField, SobolevIndex, TraceField, VectorField};
use num_complex::Complex64;
use rand::Rng;

/// Output of [`project_p`].
#[derive(Debug, Clone)]
pub struct DecompositionResult {
    /// `Pu`.
    pub solenoidal: VectorField,
    /// `q` with `∇q = u - Pu` and `q = 0` on `S_F`.
    pub potential: ScalarField,
    /// `‖∇·Pu‖ / ‖∇·u‖` (zero when `u` is already solenoidal).
    pub residual: f64,
}

/// `Pu = u - ∇q` with `Δq = ∇·u` in `Ω`, `q = 0` on `S_F`.
///
/// ```
/// use jetstokes::{helmholtz, Domain, DomainConfig, VectorField};
///
/// let domain = Domain::new(DomainConfig::new(0.5, 6.0, 1.0, 12, 4, 2)).unwrap();
/// let c = VectorField::constant(&domain, [1.0, 2.0, 3.0]);
/// let d = helmholtz::project_p(&c).unwrap();
/// assert!((&d.solenoidal - &c).max_abs() < 1e-13);
/// ```
pub fn project_p(u: &VectorField) -> Result<DecompositionResult> {
    let d = div(u);
    let q = solve_dirichlet(&d)?;
    let mut pu = u.clone();
    pu.axpy(Complex64::new(-1.0, 0.0), &grad(&q));
    let dn = d.l2_norm();
    let residual = if dn == 0.0 { 0.0 } else { div(&pu).l2_norm() / dn };
    let real = u.is_real();
    Ok(DecompositionResult {
        solenoidal: if real { pu.enforce_real() } else { pu },
        potential: q,
        residual,
    })
}

/// `Pu` alone.
pub fn project(u: &VectorField) -> Result<VectorField> {
    Ok(project_p(u)?.solenoidal)
}

/// Largest observed `‖Pu‖_{Hᵏₚ}/‖u‖_{Hᵏₚ}` over random band-limited `u`.
pub fn projector_norm_hk<R: Rng + ?Sized>(domain: &Domain, k: SobolevIndex, sample_count: usize, rng: &mut R) -> Result<f64> {
    if k.0 > 2 {
        return Err(Error::InvalidArgument(format!("projector norm supports k <= 2, got {}", k.0)));
    }
    if sample_count == 0 {
        return Err(Error::InvalidArgument("sample_count must be at least 1".into()));
    }
    // divergence, potential gradient and k more derivatives all widen the band
    let band = BandLimit::within(domain, 2 + k.0);
    let mut worst: f64 = 0.0;
    let mut taken = 0;
    while taken < sample_count {
        let u = VectorField::random_smooth(domain, rng, band, true);
        let un = norm_hkp(&u, k)?;
        if un == 0.0 {
            continue;
        }
        worst = worst.max(norm_hkp(&project(&u)?, k)? / un);
        taken += 1;
    }
    Ok(worst)
}

/// Free-surface values of `∂_r v_r`, per axial and azimuthal mode.
///
/// With `v± = v₁ ± i v₂`, mode `J` of `v_r` is `½(v₊,J+1 + v₋,J-1)`.
pub fn normal_strain_trace(v: &VectorField) -> TraceField {
    let domain = v.domain().clone();
    let i = Complex64::new(0.0, 1.0);
    let [v1, v2, _] = &v.components;
    let mut out = TraceField::zeros(&domain);
    for n in domain.axial_modes() {
        let (s1, s2) = (v1.slab(n), v2.slab(n));
        if kernels::is_zero(s1) && kernels::is_zero(s2) {
            continue;
        }
        let ctx = domain.slab_ctx(n);
        let plus: Vec<Complex64> = s1.iter().zip(s2).map(|(a, b)| a + i * b).collect();
        let minus: Vec<Complex64> = s1.iter().zip(s2).map(|(a, b)| a - i * b).collect();
        let tp = kernels::trace(ctx, &kernels::d_r(ctx, &plus));
        let tm = kernels::trace(ctx, &kernels::d_r(ctx, &minus));
        let row = out.row_mut(n);
        for idx in 0..ctx.n_modes() {
            let m = ctx.m_of(idx);
            let from_plus = ctx.idx_of(m + 1).map_or(Complex64::new(0.0, 0.0), |j| tp[j]);
            let from_minus = ctx.idx_of(m - 1).map_or(Complex64::new(0.0, 0.0), |j| tm[j]);
            row[idx] = 0.5 * (from_plus + from_minus);
        }
    }
    out.with_real(v.is_real())
}

/// `Qv`: harmonic in `Ω` with trace `2μ ∂_r v_r` on `S_F`.
pub fn operator_q(v: &VectorField) -> Result<ScalarField> {
    let mu = v.domain().config().mu;
    let data = normal_strain_trace(v).scale(Complex64::new(2.0 * mu, 0.0));
    harmonic_extension(&data)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fieldspace::{inner_product_hkp, trace_sf, DomainConfig};
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;
    use std::f64::consts::PI;

    fn domain() -> Domain {
        Domain::new(DomainConfig::new(0.5, 2.0 * PI, 1.3, 16, 8, 4)).unwrap()
    }

    fn band(d: &Domain) -> BandLimit {
        BandLimit::new(d.config().n_z, d.config().n_theta - 2, 10)
    }

    #[test]
    fn gradients_of_zero_trace_potentials_are_removed() {
        let d = domain();
        let mut rng = ChaCha20Rng::seed_from_u64(12);
        for _ in 0..5 {
            // (r² - κ²)·w vanishes on S_F
            let w = ScalarField::random_smooth(&d, &mut rng, BandLimit::new(4, 5, 8), true);
            let q0 = w.mul_radial(|r| r * r - 0.25);
            let res = project_p(&grad(&q0)).unwrap();
            assert!(res.solenoidal.l2_norm() < 1e-10 * grad(&q0).l2_norm());
            assert!((&res.potential - &q0).max_abs() < 1e-10 * q0.max_abs());
        }
    }

    #[test]
    fn projected_gradient_is_gradient_of_harmonic_extension() {
        // P∇f = ∇f̃ with f̃ harmonic and f̃ = f on S_F
        let d = domain();
        let mut rng = ChaCha20Rng::seed_from_u64(21);
        for _ in 0..5 {
            let f = ScalarField::random_smooth(&d, &mut rng, BandLimit::new(4, 5, 8), true);
            let pg = project(&grad(&f)).unwrap();
            let ft = harmonic_extension(&trace_sf(&f)).unwrap();
            assert!((&pg - &grad(&ft)).l2_norm() < 1e-9 * grad(&f).l2_norm());
        }
    }

    #[test]
    fn constants_are_fixed() {
        let d = domain();
        let c = VectorField::constant(&d, [0.3, -1.0, 2.0]);
        let res = project_p(&c).unwrap();
        assert!((&res.solenoidal - &c).max_abs() < 1e-13);
        assert!(res.potential.max_abs() < 1e-13);
    }

    #[test]
    fn k0_norm_is_at_most_one() {
        let d = domain();
        let mut rng = ChaCha20Rng::seed_from_u64(1);
        let r0 = projector_norm_hk(&d, SobolevIndex(0), 10, &mut rng).unwrap();
        assert!(r0 <= 1.0 + 1e-8);
        let r2 = projector_norm_hk(&d, SobolevIndex(2), 10, &mut rng).unwrap();
        assert!(r2.is_finite() && r2 > 0.0);
        assert!(projector_norm_hk(&d, SobolevIndex(3), 1, &mut rng).is_err());
        assert!(projector_norm_hk(&d, SobolevIndex(0), 0, &mut rng).is_err());
    }

    #[test]
    fn q_of_simple_fields() {
        let d = domain();
        let mu = d.config().mu;
        // differentiation of constants and linear functions leaves only round-off
        assert!(operator_q(&VectorField::constant(&d, [1.0, 2.0, 3.0])).unwrap().max_abs() < 1e-11);
        assert!(operator_q(&VectorField::rigid_rotation(&d)).unwrap().max_abs() < 1e-11);
        // strain (a₁, -a₂, 0): Q v = 2μ (r/κ)² cos 2θ
        let a1 = ScalarField::from_radial_cos(&d, 1, |r| r).unwrap();
        let mut a2 = ScalarField::zeros(&d);
        for (j, &r) in d.grid().nodes().to_vec().iter().enumerate() {
            a2.mode_mut(0, 1)[j] = Complex64::new(0.0, -0.5 * r);
            a2.mode_mut(0, -1)[j] = Complex64::new(0.0, 0.5 * r);
        }
        let strain = VectorField::new([a1, -&a2, ScalarField::zeros(&d)]).unwrap();
        let q = operator_q(&strain).unwrap();
        let exact = ScalarField::from_radial_cos(&d, 2, |r| 2.0 * mu * (r / 0.5).powi(2)).unwrap();
        assert!((&q - &exact).max_abs() < 1e-12);
    }

    #[test]
    fn q_is_harmonic_and_matches_trace() {
        let d = domain();
        let mut rng = ChaCha20Rng::seed_from_u64(6);
        let v = VectorField::random_smooth(&d, &mut rng, band(&d), true);
        let q = operator_q(&v).unwrap();
        let h1 = norm_hkp(&q, SobolevIndex(1)).unwrap();
        assert!(q.laplacian().l2_norm() < 1e-8 * h1);
        let data = normal_strain_trace(&v).scale(Complex64::new(2.0 * d.config().mu, 0.0));
        assert!((&trace_sf(&q) - &data).max_abs() < 1e-11 * data.max_abs());
        assert!(q.is_real());
        let _ = inner_product_hkp(&q, &q, SobolevIndex(0)).unwrap();
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(12))]

        #[test]
        fn projector_is_orthogonal(seed in any::<u64>()) {
            let d = domain();
            let mut rng = ChaCha20Rng::seed_from_u64(seed);
            let u = VectorField::random_smooth(&d, &mut rng, band(&d), true);
            let w = VectorField::random_smooth(&d, &mut rng, band(&d), true);
            let res = project_p(&u).unwrap();
            let pu = &res.solenoidal;
            let un = u.l2_norm();
            let ppu = project(pu).unwrap();
            prop_assert!((&ppu - pu).l2_norm() < 1e-10 * un);
            let pw = project(&w).unwrap();
            let a = pu.l2_inner(&w);
            let b = u.l2_inner(&pw);
            prop_assert!((a - b).norm() < 1e-10 * un * w.l2_norm());
            let orth = pu.l2_inner(&(&u - pu));
            prop_assert!(orth.norm() < 1e-10 * un * un);
            prop_assert!(trace_sf(&res.potential).max_abs() < 1e-12 * res.potential.max_abs().max(1e-300));
            prop_assert!(div(pu).l2_norm() < 1e-9 * div(&u).l2_norm());
        }

        #[test]
        fn q_is_linear(seed in any::<u64>(), alpha in -2.0f64..2.0) {
            let d = domain();
            let mut rng = ChaCha20Rng::seed_from_u64(seed);
            let u = VectorField::random_smooth(&d, &mut rng, band(&d), false);
            let w = VectorField::random_smooth(&d, &mut rng, band(&d), false);
            let mut comb = u.scale(Complex64::new(alpha, 0.0));
            comb.axpy(Complex64::new(1.0, 0.0), &w);
            let lhs = operator_q(&comb).unwrap();
            let mut rhs = operator_q(&u).unwrap().scale(Complex64::new(alpha, 0.0));
            rhs.axpy(Complex64::new(1.0, 0.0), &operator_q(&w).unwrap());
            prop_assert!((&lhs - &rhs).max_abs() < 1e-11 * (1.0 + rhs.max_abs()));
        }
    }
}
