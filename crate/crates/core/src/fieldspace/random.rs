//! Random band-limited fields that are smooth through the axis.
//!
//! Mode `(n, m)` receives a radial profile `Σₖ cₖ ρ^{|m|+2k}` with `ρ = r/κ`,
//! which is a polynomial in `(a₁, a₂)`; the discrete operators act on such
//! fields without approximation error.

use super::{Domain, ScalarField, VectorField, ZERO};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BandLimit {
    pub max_n: usize,
    pub max_m: usize,
    /// Maximum total polynomial degree in `(a₁, a₂)`.
    pub max_degree: usize,
}

impl BandLimit {
    pub fn new(max_n: usize, max_m: usize, max_degree: usize) -> Self {
        Self {
            max_n,
            max_m,
            max_degree,
        }
    }

    /// A band limit leaving `headroom` azimuthal modes and degrees free for
    /// derivatives on `domain`.
    pub fn within(domain: &Domain, headroom: usize) -> Self {
        let cfg = domain.config();
        Self {
            max_n: cfg.n_z,
            max_m: cfg.n_theta.saturating_sub(headroom),
            max_degree: (cfg.n_r).min(2 * cfg.n_theta),
        }
    }
}

fn normal_c64<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

impl ScalarField {
    pub fn random_smooth<R: Rng + ?Sized>(domain: &Domain, rng: &mut R, band: BandLimit, real: bool) -> Self {
        let cfg = domain.config();
        let max_n = band.max_n.min(cfg.n_z) as i64;
        let max_m = band.max_m.min(cfg.n_theta) as i64;
        let nodes: Vec<f64> = domain.grid().nodes().iter().map(|r| r / cfg.kappa).collect();
        let mut f = ScalarField::zeros(domain);
        for n in -max_n..=max_n {
            for m in -max_m..=max_m {
                let am = m.unsigned_abs() as usize;
                if am > band.max_degree {
                    continue;
                }
                let terms = (band.max_degree - am) / 2 + 1;
                let c: Vec<Complex64> = (0..terms)
                    .map(|k| normal_c64(rng) / (1.0 + k as f64))
                    .collect();
                for (v, rho) in f.mode_mut(n, m).iter_mut().zip(&nodes) {
                    let base = rho.powi(am as i32);
                    let rho2 = rho * rho;
                    let mut acc = ZERO;
                    let mut p = base;
                    for ck in &c {
                        acc += ck * p;
                        p *= rho2;
                    }
                    *v = acc;
                }
            }
        }
        if real {
            f.enforce_real()
        } else {
            f.with_real(false)
        }
    }
}

impl VectorField {
    pub fn random_smooth<R: Rng + ?Sized>(domain: &Domain, rng: &mut R, band: BandLimit, real: bool) -> Self {
        VectorField {
            components: [
                ScalarField::random_smooth(domain, rng, band, real),
                ScalarField::random_smooth(domain, rng, band, real),
                ScalarField::random_smooth(domain, rng, band, real),
            ],
        }
    }
}
