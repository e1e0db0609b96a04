//! Periodic Sobolev inner products
//!
//! ```text
//! (u, v)_{Hᵏₚ} = Σₙ Σ_{j=0}^{k} ℓ βₙ^{2j} (ûₙ, v̂ₙ)_{H^{k-j}(𝔻)},   βₙ = 2πn/ℓ
//! ```
//!
//! with the disk inner product summed over all multi-indices in `(a₁, a₂)`.

use super::kernels::{self, SlabCtx};
use super::{ScalarField, VectorField, ZERO};
use crate::error::{Error, Result};
use num_complex::Complex64;

/// Highest supported integer regularity index.
pub const MAX_SOBOLEV_ORDER: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct SobolevIndex(pub usize);

impl SobolevIndex {
    pub fn new(k: usize) -> Result<Self> {
        if k > MAX_SOBOLEV_ORDER {
            return Err(Error::SobolevOrder {
                k,
                max: MAX_SOBOLEV_ORDER,
            });
        }
        Ok(Self(k))
    }
}

/// Fields that decompose into scalar components for Sobolev norms.
pub trait SobolevField {
    fn scalar_components(&self) -> Vec<&ScalarField>;
}

impl SobolevField for ScalarField {
    fn scalar_components(&self) -> Vec<&ScalarField> {
        vec![self]
    }
}

impl SobolevField for VectorField {
    fn scalar_components(&self) -> Vec<&ScalarField> {
        self.components.iter().collect()
    }
}

/// All `D^α f` with `|α| ≤ order`, grouped by `|α|`.
fn disk_derivatives(ctx: SlabCtx, slab: &[Complex64], order: usize) -> Vec<Vec<Vec<Complex64>>> {
    let mut levels = vec![vec![slab.to_vec()]];
    for level in 1..=order {
        let prev = &levels[level - 1];
        // x-derivatives of every previous entry, then one more y-derivative of the last
        let mut next: Vec<Vec<Complex64>> = prev.iter().map(|f| kernels::d_x(ctx, f)).collect();
        next.push(kernels::d_y(ctx, prev.last().unwrap()));
        levels.push(next);
    }
    levels
}

fn scalar_hkp(u: &ScalarField, v: &ScalarField, k: usize) -> Complex64 {
    let domain = u.domain();
    let ell = domain.config().ell;
    let mut total = ZERO;
    for n in domain.axial_modes() {
        let (su, sv) = (u.slab(n), v.slab(n));
        if kernels::is_zero(su) || kernels::is_zero(sv) {
            continue;
        }
        let ctx = domain.slab_ctx(n);
        let du = disk_derivatives(ctx, su, k);
        let dv = disk_derivatives(ctx, sv, k);
        // disk inner products by derivative level
        let level: Vec<Complex64> = (0..=k)
            .map(|l| {
                du[l]
                    .iter()
                    .zip(&dv[l])
                    .map(|(a, b)| kernels::disk_inner(ctx, a, b))
                    .sum()
            })
            .collect();
        let b2 = ctx.beta * ctx.beta;
        for j in 0..=k {
            let disk_h: Complex64 = level[..=k - j].iter().sum();
            total += disk_h * (ell * b2.powi(j as i32));
        }
    }
    total
}

/// `(u, v)_{Hᵏₚ}`.
pub fn inner_product_hkp<F: SobolevField + ?Sized>(u: &F, v: &F, k: SobolevIndex) -> Result<Complex64> {
    SobolevIndex::new(k.0)?;
    let (cu, cv) = (u.scalar_components(), v.scalar_components());
    if cu.len() != cv.len() {
        return Err(Error::DimensionMismatch {
            expected: cu.len(),
            found: cv.len(),
        });
    }
    if !cu.iter().zip(&cv).all(|(a, b)| a.domain().same(b.domain())) {
        return Err(Error::DomainMismatch);
    }
    Ok(cu.iter().zip(&cv).map(|(a, b)| scalar_hkp(a, b, k.0)).sum())
}

pub fn norm_hkp<F: SobolevField + ?Sized>(u: &F, k: SobolevIndex) -> Result<f64> {
    Ok(inner_product_hkp(u, u, k)?.re.max(0.0).sqrt())
}

#[cfg(test)]
mod tests {
    use super::super::{grad, BandLimit, Domain, DomainConfig};
    use super::*;
    use approx::assert_relative_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;
    use std::f64::consts::PI;

    fn domain() -> Domain {
        Domain::new(DomainConfig::new(0.5, 2.0 * PI, 1.0, 16, 8, 3)).unwrap()
    }

    #[test]
    fn constant_gives_volume() {
        let d = domain();
        let one = ScalarField::constant(&d, 1.0);
        let v = inner_product_hkp(&one, &one, SobolevIndex(0)).unwrap();
        assert_relative_eq!(v.re, 2.0 * PI * PI * 0.25, epsilon = 1e-12);
    }

    #[test]
    fn first_axial_mode_in_h1() {
        // closed form ℓπκ²(1 + (2π/ℓ)²) from the defining sum with û₁ ≡ 1
        let ell = 3.0;
        let d = Domain::new(DomainConfig::new(0.4, ell, 1.0, 10, 4, 2)).unwrap();
        let u = ScalarField::from_mode_fn(&d, 1, 0, |_| Complex64::new(1.0, 0.0)).unwrap();
        let v = inner_product_hkp(&u, &u, SobolevIndex(1)).unwrap();
        let expected = ell * PI * 0.16 * (1.0 + (2.0 * PI / ell).powi(2));
        assert_relative_eq!(v.re, expected, epsilon = 1e-12);
        assert!(v.im.abs() < 1e-14);
    }

    #[test]
    fn zero_field_and_order_limit() {
        let d = domain();
        let z = ScalarField::zeros(&d);
        assert_eq!(inner_product_hkp(&z, &z, SobolevIndex(2)).unwrap(), ZERO);
        assert!(matches!(
            inner_product_hkp(&z, &z, SobolevIndex(MAX_SOBOLEV_ORDER + 1)),
            Err(Error::SobolevOrder { .. })
        ));
    }

    #[test]
    fn h1_matches_standard_norm() {
        let d = domain();
        let mut rng = ChaCha20Rng::seed_from_u64(21);
        let u = ScalarField::random_smooth(&d, &mut rng, BandLimit::new(3, 6, 10), true);
        let standard = u.l2_norm().powi(2) + grad(&u).l2_norm().powi(2);
        let periodic = inner_product_hkp(&u, &u, SobolevIndex(1)).unwrap().re;
        assert_relative_eq!(periodic, standard, max_relative = 1e-12);
    }

    #[test]
    fn monotone_in_k_and_hermitian() {
        let d = domain();
        let mut rng = ChaCha20Rng::seed_from_u64(4);
        let band = BandLimit::new(3, 5, 10);
        let u = VectorField::random_smooth(&d, &mut rng, band, false);
        let w = VectorField::random_smooth(&d, &mut rng, band, false);
        let mut last = 0.0;
        for k in 0..=3 {
            let val = norm_hkp(&u, SobolevIndex(k)).unwrap();
            assert!(val >= last);
            last = val;
            let a = inner_product_hkp(&u, &w, SobolevIndex(k)).unwrap();
            let b = inner_product_hkp(&w, &u, SobolevIndex(k)).unwrap();
            assert!((a - b.conj()).norm() < 1e-10 * a.norm().max(1.0));
        }
    }
}
