//! Polynomial trial fields for one axial mode.
//!
//! Rotations about the jet axis commute with every operator here, so the
//! trial space splits by total angular momentum `J`: the fields
//!
//! ```text
//! plus:   v₁ + i v₂ = √2 R e^{i(J+1)θ},  v₁ - i v₂ = 0,             v₃ = 0
//! minus:  v₁ + i v₂ = 0,                v₁ - i v₂ = √2 R e^{i(J-1)θ},  v₃ = 0
//! axial:  v₁ = v₂ = 0,                  v₃ = R e^{iJθ}
//! ```
//!
//! times `e^{iβₙa₃}`, with Zernike radial profiles
//! `R = c ρ^{|k|} P_i^{(0,|k|)}(2ρ² - 1)`, `ρ = r/κ`, normalised so each field
//! has unit `𝐋²(Ω)` norm. These are polynomials in `(a₁, a₂)`, so they are
//! smooth through the axis and every discrete operator acts on them exactly.

use crate::fieldspace::{Domain, VectorField};
use num_complex::Complex64;
use std::f64::consts::{FRAC_1_SQRT_2, PI};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TrialKind {
    Plus,
    Minus,
    Axial,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trial {
    pub kind: TrialKind,
    /// Azimuthal mode carried by the nonzero components.
    pub k: i64,
    /// Radial index; the polynomial degree is `|k| + 2i`.
    pub i: usize,
    /// Normalised radial profile at the grid nodes.
    pub profile: Vec<f64>,
}

impl Trial {
    /// Cartesian component weights `(c₁, c₂, c₃)`: component `c` equals `c_c R e^{ikθ}`.
    pub fn weights(&self) -> [Complex64; 3] {
        let s = FRAC_1_SQRT_2;
        match self.kind {
            TrialKind::Plus => [Complex64::new(s, 0.0), Complex64::new(0.0, -s), Complex64::new(0.0, 0.0)],
            TrialKind::Minus => [Complex64::new(s, 0.0), Complex64::new(0.0, s), Complex64::new(0.0, 0.0)],
            TrialKind::Axial => [Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)],
        }
    }

    pub fn degree(&self) -> usize {
        self.k.unsigned_abs() as usize + 2 * self.i
    }

    /// Adds `alpha` times this trial field (in axial mode `n`) to `v`.
    pub fn add_to(&self, v: &mut VectorField, n: i64, alpha: Complex64) {
        for (comp, w) in v.components.iter_mut().zip(self.weights()) {
            if w.re == 0.0 && w.im == 0.0 {
                continue;
            }
            let c = alpha * w;
            for (dst, &p) in comp.mode_mut(n, self.k).iter_mut().zip(&self.profile) {
                *dst += c * p;
            }
        }
    }

    pub fn field(&self, domain: &Domain, n: i64) -> VectorField {
        let mut v = VectorField::zeros(domain);
        self.add_to(&mut v, n, Complex64::new(1.0, 0.0));
        v.into_complex()
    }

    /// `(w, φ)_{𝐋²}` for this trial field `φ` in axial mode `n`.
    pub fn inner(&self, domain: &Domain, n: i64, w: &VectorField) -> Complex64 {
        let cfg = domain.config();
        let g = domain.grid().gram(self.k);
        let scale = 2.0 * PI * cfg.ell;
        let mut total = Complex64::new(0.0, 0.0);
        for (comp, wt) in w.components.iter().zip(self.weights()) {
            if wt.re == 0.0 && wt.im == 0.0 {
                continue;
            }
            let block = comp.mode(n, self.k);
            let mut s = Complex64::new(0.0, 0.0);
            for (j, bj) in block.iter().enumerate() {
                if bj.re == 0.0 && bj.im == 0.0 {
                    continue;
                }
                let col = g.column(j);
                let pg: f64 = self.profile.iter().zip(col.iter()).map(|(p, gij)| p * gij).sum();
                s += bj * pg;
            }
            total += s * wt.conj();
        }
        total * scale
    }
}

/// `P_i^{(0,b)}(x)` by the three-term recurrence.
pub fn jacobi_0b(i: usize, b: f64, x: f64) -> f64 {
    if i == 0 {
        return 1.0;
    }
    let mut p0 = 1.0;
    let mut p1 = 1.0 + (b + 2.0) * (x - 1.0) / 2.0;
    for n in 2..=i {
        let n = n as f64;
        let s = 2.0 * n + b;
        let a1 = 2.0 * n * (n + b) * (s - 2.0);
        let a2 = (s - 1.0) * (s * (s - 2.0) * x - b * b);
        let a3 = 2.0 * (n - 1.0) * (n + b - 1.0) * s;
        let p2 = (a2 * p1 - a3 * p0) / a1;
        p0 = p1;
        p1 = p2;
    }
    p1
}

/// Normalised Zernike profile of order `|k|`, index `i`, at radius `r`.
pub fn zernike(kappa: f64, ell: f64, k: i64, i: usize, r: f64) -> f64 {
    let a = k.unsigned_abs() as f64;
    let rho = r / kappa;
    let c = ((2.0 * i as f64 + a + 1.0) / (PI * ell * kappa * kappa)).sqrt();
    c * rho.powi(a as i32) * jacobi_0b(i, a, 2.0 * rho * rho - 1.0)
}

/// Trial fields of group `J` with polynomial degree at most `degree`.
///
/// Azimuthal modes are kept to `|k| < n_theta` so that Cartesian derivatives,
/// which shift `k` by one, stay inside the band.
pub fn group_trials(domain: &Domain, j: i64, degree: usize) -> Vec<Trial> {
    let cfg = domain.config();
    let nt = cfg.n_theta as i64;
    let mut out = Vec::new();
    for (kind, k) in [(TrialKind::Plus, j + 1), (TrialKind::Minus, j - 1), (TrialKind::Axial, j)] {
        let a = k.unsigned_abs() as usize;
        if k.abs() >= nt || a > degree {
            continue;
        }
        for i in 0..=(degree - a) / 2 {
            let profile = domain
                .grid()
                .nodes()
                .iter()
                .map(|&r| zernike(cfg.kappa, cfg.ell, k, i, r))
                .collect();
            out.push(Trial { kind, k, i, profile });
        }
    }
    out
}
