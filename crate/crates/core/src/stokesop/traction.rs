//! Surface traction `𝐒(v, q) = q n - μ (∇v + ∇vᵀ) n` on `S_F`.
//!
//! Cylindrical components are formed mode by mode from `v± = v₁ ± i v₂`:
//! azimuthal mode `J` of `v_r ± i v_θ` is mode `J ± 1` of `v±`. With
//! `r = κ`,
//!
//! ```text
//! S_r = q - 2μ ∂_r v_r
//! S_θ = -μ (∂_r v_θ - v_θ / r + iJ v_r / r)
//! S_z = -μ (∂_r v₃ + iβ v_r)
//! ```
//!
//! and the Cartesian traction follows from `S± = (S_r ± i S_θ) e^{±iθ}`.

use crate::fieldspace::kernels;
use crate::fieldspace::{Domain, ScalarField, TraceField, VectorField};
use num_complex::Complex64;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };
const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// Traction in cylindrical components for one axial mode; index `J + n_theta + 1`
/// runs over `J ∈ [-n_theta - 1, n_theta + 1]`.
#[derive(Debug, Clone)]
pub(crate) struct PolarTraction {
    pub s_r: Vec<Complex64>,
    pub s_theta: Vec<Complex64>,
    pub s_z: Vec<Complex64>,
}

impl PolarTraction {
    pub fn index(n_theta: usize, j: i64) -> usize {
        (j + n_theta as i64 + 1) as usize
    }
}

/// Cylindrical traction of `(v, q)` in axial mode `n`.
pub(crate) fn polar_traction(v: &VectorField, q: Option<&ScalarField>, n: i64) -> PolarTraction {
    let domain = v.domain();
    let cfg = domain.config();
    let (mu, kappa, beta) = (cfg.mu, cfg.kappa, cfg.beta(n));
    let nt = cfg.n_theta as i64;
    let ctx = domain.slab_ctx(n);
    let [v1, v2, v3] = &v.components;
    let (s1, s2, s3) = (v1.slab(n), v2.slab(n), v3.slab(n));
    let plus: Vec<Complex64> = s1.iter().zip(s2).map(|(a, b)| a + I * b).collect();
    let minus: Vec<Complex64> = s1.iter().zip(s2).map(|(a, b)| a - I * b).collect();
    let tp = kernels::trace(ctx, &plus);
    let tm = kernels::trace(ctx, &minus);
    let dtp = kernels::trace(ctx, &kernels::d_r(ctx, &plus));
    let dtm = kernels::trace(ctx, &kernels::d_r(ctx, &minus));
    let dt3 = kernels::trace(ctx, &kernels::d_r(ctx, s3));
    let tq = q.map(|q| kernels::trace(ctx, q.slab(n)));

    let at = |vals: &[Complex64], m: i64| ctx.idx_of(m).map_or(ZERO, |i| vals[i]);
    let len = 2 * cfg.n_theta + 3;
    let mut out = PolarTraction {
        s_r: vec![ZERO; len],
        s_theta: vec![ZERO; len],
        s_z: vec![ZERO; len],
    };
    for j in -nt - 1..=nt + 1 {
        let (p, m) = (at(&tp, j + 1), at(&tm, j - 1));
        let (dp, dm) = (at(&dtp, j + 1), at(&dtm, j - 1));
        let vr = 0.5 * (p + m);
        let vt = (p - m) / (2.0 * I);
        let dvr = 0.5 * (dp + dm);
        let dvt = (dp - dm) / (2.0 * I);
        let qj = tq.as_ref().map_or(ZERO, |t| at(t, j));
        let k = PolarTraction::index(cfg.n_theta, j);
        out.s_r[k] = qj - 2.0 * mu * dvr;
        out.s_theta[k] = -mu * (dvt - vt / kappa + I * (j as f64) * vr / kappa);
        out.s_z[k] = -mu * (at(&dt3, j) + I * beta * vr);
    }
    out
}

/// Cartesian traction components on `S_F`.
#[derive(Debug, Clone)]
pub struct Traction {
    pub components: [TraceField; 3],
}

impl Traction {
    fn from_polar(domain: &Domain, polar: &[(i64, PolarTraction)], real: bool) -> Self {
        let nt = domain.config().n_theta as i64;
        let mut c = [TraceField::zeros(domain), TraceField::zeros(domain), TraceField::zeros(domain)];
        for (n, p) in polar {
            for j in -nt - 1..=nt + 1 {
                let k = PolarTraction::index(nt as usize, j);
                let sp = p.s_r[k] + I * p.s_theta[k];
                let sm = p.s_r[k] - I * p.s_theta[k];
                if (j + 1).abs() <= nt {
                    *c[0].get_mut(*n, j + 1) += 0.5 * sp;
                    *c[1].get_mut(*n, j + 1) += sp / (2.0 * I);
                }
                if (j - 1).abs() <= nt {
                    *c[0].get_mut(*n, j - 1) += 0.5 * sm;
                    *c[1].get_mut(*n, j - 1) -= sm / (2.0 * I);
                }
                if j.abs() <= nt {
                    *c[2].get_mut(*n, j) = p.s_z[k];
                }
            }
        }
        let [a, b, z] = c;
        Self {
            components: [a.with_real(real), b.with_real(real), z.with_real(real)],
        }
    }

    /// `𝐒·n` with `n = (cos θ, sin θ, 0)`.
    pub fn normal(&self) -> TraceField {
        let [s1, s2, _] = &self.components;
        let mut out = s1.mul_cos();
        out.axpy(Complex64::new(1.0, 0.0), &s2.mul_sin());
        out
    }

    /// `𝐒 - (𝐒·n) n`.
    pub fn tangential(&self) -> Traction {
        let sn = self.normal();
        let [s1, s2, s3] = &self.components;
        Traction {
            components: [s1 - &sn.mul_cos(), s2 - &sn.mul_sin(), s3.clone()],
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.components.iter().map(|c| c.max_abs()).fold(0.0, f64::max)
    }

    pub fn l2_norm(&self) -> f64 {
        self.components
            .iter()
            .map(|c| c.l2_norm().powi(2))
            .sum::<f64>()
            .sqrt()
    }
}

fn polar_all(v: &VectorField, q: Option<&ScalarField>) -> Vec<(i64, PolarTraction)> {
    let domain = v.domain();
    domain
        .axial_modes()
        .filter(|&n| {
            v.components.iter().any(|c| !kernels::is_zero(c.slab(n)))
                || q.is_some_and(|q| !kernels::is_zero(q.slab(n)))
        })
        .map(|n| (n, polar_traction(v, q, n)))
        .collect()
}

/// `𝐒(v, q)`.
///
/// Modes of the Cartesian traction outside the azimuthal band are dropped.
pub fn traction(v: &VectorField, q: &ScalarField) -> Traction {
    let real = v.is_real() && q.is_real();
    Traction::from_polar(v.domain(), &polar_all(v, Some(q)), real)
}

/// `𝐒_tan(v)`, which does not depend on the pressure.
pub fn tangential_traction(v: &VectorField) -> Traction {
    let domain = v.domain();
    let mut polar = polar_all(v, None);
    for (_, p) in &mut polar {
        p.s_r.iter_mut().for_each(|s| *s = ZERO);
    }
    Traction::from_polar(domain, &polar, v.is_real())
}
