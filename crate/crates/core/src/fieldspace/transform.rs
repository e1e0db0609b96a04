//! Transforms between physical grid values and stored coefficients.
//!
//! The physical grid has `2·n_z + 1` equispaced axial points `a₃ = kℓ/N_z`,
//! `2·n_theta + 1` equispaced angles and the radial nodes of the domain. Nodal
//! arrays are laid out `[axial][azimuthal][radial]`.

use super::{Domain, ScalarField, ZERO};
use crate::error::{Error, Result};
use num_complex::Complex64;
use rustfft::{FftDirection, FftPlanner};

/// Nodal values on the physical grid of a domain.
#[derive(Debug, Clone)]
pub struct NodalGrid {
    pub values: Vec<Complex64>,
}

impl NodalGrid {
    pub fn shape(domain: &Domain) -> (usize, usize, usize) {
        (domain.n_axial(), domain.n_azimuthal(), domain.config().n_r)
    }

    /// Samples `f(r, θ, a₃)` on the physical grid.
    pub fn sample(domain: &Domain, f: impl Fn(f64, f64, f64) -> Complex64) -> Self {
        let (nz, nt, nr) = Self::shape(domain);
        let cfg = domain.config();
        let mut values = Vec::with_capacity(nz * nt * nr);
        for k in 0..nz {
            let z = cfg.ell * k as f64 / nz as f64;
            for l in 0..nt {
                let th = 2.0 * std::f64::consts::PI * l as f64 / nt as f64;
                for &r in domain.grid().nodes() {
                    values.push(f(r, th, z));
                }
            }
        }
        Self { values }
    }

    pub fn max_abs_diff(&self, other: &NodalGrid) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn max_imag(&self) -> f64 {
        self.values.iter().map(|v| v.im.abs()).fold(0.0, f64::max)
    }
}

fn fft_2d(domain: &Domain, data: &mut [Complex64], direction: FftDirection) {
    let (nz, nt, nr) = NodalGrid::shape(domain);
    let mut planner = FftPlanner::new();
    let ft = planner.plan_fft(nt, direction);
    let fz = planner.plan_fft(nz, direction);
    let mut buf_t = vec![ZERO; nt];
    let mut buf_z = vec![ZERO; nz];
    for j in 0..nr {
        for k in 0..nz {
            for l in 0..nt {
                buf_t[l] = data[(k * nt + l) * nr + j];
            }
            ft.process(&mut buf_t);
            for l in 0..nt {
                data[(k * nt + l) * nr + j] = buf_t[l];
            }
        }
        for l in 0..nt {
            for k in 0..nz {
                buf_z[k] = data[(k * nt + l) * nr + j];
            }
            fz.process(&mut buf_z);
            for k in 0..nz {
                data[(k * nt + l) * nr + j] = buf_z[k];
            }
        }
    }
}

/// Physical grid values to coefficients.
pub fn analyze(domain: &Domain, nodal: &NodalGrid) -> Result<ScalarField> {
    if nodal.values.len() != domain.len() {
        return Err(Error::DimensionMismatch {
            expected: domain.len(),
            found: nodal.values.len(),
        });
    }
    let (nz, nt, nr) = NodalGrid::shape(domain);
    let mut data = nodal.values.clone();
    fft_2d(domain, &mut data, FftDirection::Forward);
    let cfg = domain.config();
    let norm = 1.0 / (nz * nt) as f64;
    let mut f = ScalarField::zeros(domain).with_real(false);
    for n in domain.axial_modes() {
        let k = n.rem_euclid(nz as i64) as usize;
        for m in -(cfg.n_theta as i64)..=cfg.n_theta as i64 {
            let l = m.rem_euclid(nt as i64) as usize;
            let dst = f.mode_mut(n, m);
            for j in 0..nr {
                dst[j] = data[(k * nt + l) * nr + j] * norm;
            }
        }
    }
    Ok(f)
}

/// Real physical grid values to a real (conjugate-symmetric) field.
pub fn analyze_real(domain: &Domain, values: &[f64]) -> Result<ScalarField> {
    let nodal = NodalGrid {
        values: values.iter().map(|&v| Complex64::new(v, 0.0)).collect(),
    };
    Ok(analyze(domain, &nodal)?.enforce_real())
}

/// Coefficients to physical grid values.
pub fn synthesize(field: &ScalarField) -> NodalGrid {
    let domain = field.domain();
    let (nz, nt, nr) = NodalGrid::shape(domain);
    let cfg = domain.config();
    let mut data = vec![ZERO; domain.len()];
    for n in domain.axial_modes() {
        let k = n.rem_euclid(nz as i64) as usize;
        for m in -(cfg.n_theta as i64)..=cfg.n_theta as i64 {
            let l = m.rem_euclid(nt as i64) as usize;
            let src = field.mode(n, m);
            for j in 0..nr {
                data[(k * nt + l) * nr + j] = src[j];
            }
        }
    }
    fft_2d(domain, &mut data, FftDirection::Inverse);
    NodalGrid { values: data }
}

impl ScalarField {
    pub fn analyze(domain: &Domain, nodal: &NodalGrid) -> Result<Self> {
        analyze(domain, nodal)
    }

    pub fn analyze_real(domain: &Domain, values: &[f64]) -> Result<Self> {
        analyze_real(domain, values)
    }

    pub fn synthesize(&self) -> NodalGrid {
        synthesize(self)
    }
}

#[cfg(test)]
mod tests {
    use super::super::{BandLimit, DomainConfig};
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;
    use std::f64::consts::PI;

    fn domain() -> Domain {
        Domain::new(DomainConfig::new(0.5, 2.0 * PI, 1.0, 10, 5, 4)).unwrap()
    }

    #[test]
    fn constant_occupies_zero_mode() {
        let d = domain();
        let nodal = NodalGrid::sample(&d, |_, _, _| Complex64::new(1.0, 0.0));
        let f = analyze(&d, &nodal).unwrap();
        for n in d.axial_modes() {
            for m in -5..=5 {
                let expect = if n == 0 && m == 0 { 1.0 } else { 0.0 };
                assert!(f.mode(n, m).iter().all(|c| (c - expect).norm() < 1e-14));
            }
        }
    }

    #[test]
    fn pure_axial_mode() {
        let d = domain();
        let ell = d.config().ell;
        let nodal = NodalGrid::sample(&d, |_, _, z| Complex64::from_polar(1.0, 2.0 * PI * z / ell));
        let f = analyze(&d, &nodal).unwrap();
        for n in d.axial_modes().filter(|&n| n != 1) {
            assert!(f.slab(n).iter().all(|c| c.norm() < 1e-14));
        }
        assert!(f.mode(1, 0).iter().all(|c| (c - 1.0).norm() < 1e-13));
    }

    #[test]
    fn round_trip_and_reality() {
        let d = domain();
        let mut rng = ChaCha20Rng::seed_from_u64(9);
        let f = ScalarField::random_smooth(&d, &mut rng, BandLimit::new(4, 5, 9), true);
        let nodal = synthesize(&f);
        assert!(nodal.max_imag() < 1e-12 * f.max_abs());
        let back = analyze(&d, &nodal).unwrap();
        assert!((&back - &f).max_abs() < 1e-12 * f.max_abs());
    }

    #[test]
    fn dimension_mismatch() {
        let d = domain();
        let bad = NodalGrid { values: vec![ZERO; 3] };
        assert!(matches!(analyze(&d, &bad), Err(Error::DimensionMismatch { .. })));
    }
}
