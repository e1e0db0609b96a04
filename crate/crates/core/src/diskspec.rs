//! Per-mode elliptic solves on the disk.
//!
//! For axial mode `n` and azimuthal mode `m` the operator
//!
//! ```text
//! Lₙₘ u = -(u'' + u'/r - m² u / r²) + βₙ² u,     βₙ = 2πn/ℓ
//! ```
//!
//! is collocated on the folded radial grid. The first row (the node `r = κ`)
//! is replaced by the Dirichlet condition; regularity at the axis is carried
//! by the parity of the folded grid, so no axis row is needed. The dense LU
//! factorization of each `(|n|, |m|)` block is built on first use and cached in
//! the [`Domain`].

use crate::fieldspace::kernels::{self, SlabCtx};
use crate::fieldspace::{norm_hkp, Domain, ScalarField, SobolevIndex, TraceField, BandLimit};
use crate::error::{Error, Result};
use nalgebra::{DMatrix, DVector, Dyn, LU};
use num_complex::Complex64;
use rand::Rng;

/// Default bound on the relative backward error of a mode solve.
pub const SOLVER_TOLERANCE: f64 = 1e-10;

/// An `(n, m)` pair inside the band of a domain.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ModeIndex {
    pub n: i64,
    pub m: i64,
}

impl ModeIndex {
    pub fn new(domain: &Domain, n: i64, m: i64) -> Result<Self> {
        domain.axial_index(n)?;
        if m.unsigned_abs() as usize > domain.config().n_theta {
            return Err(Error::InvalidArgument(format!("azimuthal mode {m} outside band")));
        }
        Ok(Self { n, m })
    }

    pub fn beta(&self, domain: &Domain) -> f64 {
        domain.config().beta(self.n)
    }
}

/// Collocated Dirichlet operator for one `(|n|, |m|)` block.
#[derive(Debug)]
pub struct RadialOperator {
    matrix: DMatrix<f64>,
    bc_rows: Vec<usize>,
    lu: LU<f64, Dyn, Dyn>,
    norm_inf: f64,
}

impl RadialOperator {
    fn build(domain: &Domain, n: i64, m: i64) -> Result<Self> {
        let grid = domain.grid();
        let n_r = grid.n_r();
        let beta = domain.config().beta(n);
        let (d1, d2) = (grid.d1(m), grid.d2(m));
        let inv_r = grid.inv_nodes();
        let m2 = (m * m) as f64;
        let mut matrix = DMatrix::from_fn(n_r, n_r, |i, j| {
            let mut v = -(d2[(i, j)] + inv_r[i] * d1[(i, j)]);
            if i == j {
                v += m2 * inv_r[i] * inv_r[i] + beta * beta;
            }
            v
        });
        matrix.row_mut(0).fill(0.0);
        matrix[(0, 0)] = 1.0;
        let norm_inf = matrix
            .row_iter()
            .map(|row| row.iter().map(|v| v.abs()).sum::<f64>())
            .fold(0.0, f64::max);
        let lu = matrix.clone().lu();
        if !lu.is_invertible() {
            return Err(Error::SingularOperator { n, m });
        }
        Ok(Self {
            matrix,
            bc_rows: vec![0],
            lu,
            norm_inf,
        })
    }

    /// The cached operator for mode `(n, m)`.
    pub fn get(domain: &Domain, n: i64, m: i64) -> Result<&RadialOperator> {
        ModeIndex::new(domain, n, m)?;
        let slot = domain.radial_op_slot(n, m);
        if let Some(op) = slot.get() {
            return Ok(op);
        }
        let op = Self::build(domain, n.abs(), m.abs())?;
        Ok(slot.get_or_init(|| op))
    }

    /// Collocation matrix with boundary rows in place.
    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    /// Rows carrying boundary conditions rather than the differential equation.
    pub fn bc_rows(&self) -> &[usize] {
        &self.bc_rows
    }

    /// Solves `L x = rhs` for complex right-hand sides.
    pub fn solve(&self, rhs: &[Complex64]) -> Vec<Complex64> {
        let re = DVector::from_iterator(rhs.len(), rhs.iter().map(|c| c.re));
        let im = DVector::from_iterator(rhs.len(), rhs.iter().map(|c| c.im));
        let xr = self.lu.solve(&re).expect("factorization checked at build");
        let xi = self.lu.solve(&im).expect("factorization checked at build");
        xr.iter().zip(xi.iter()).map(|(&a, &b)| Complex64::new(a, b)).collect()
    }

    /// Relative backward error `‖L x - rhs‖∞ / (‖L‖∞‖x‖∞ + ‖rhs‖∞)`.
    pub fn backward_error(&self, x: &[Complex64], rhs: &[Complex64]) -> f64 {
        let n = x.len();
        let mut worst: f64 = 0.0;
        for i in 0..n {
            let mut s = -rhs[i];
            for j in 0..n {
                s += x[j] * self.matrix[(i, j)];
            }
            worst = worst.max(s.norm());
        }
        let xn = x.iter().map(|c| c.norm()).fold(0.0, f64::max);
        let bn = rhs.iter().map(|c| c.norm()).fold(0.0, f64::max);
        let scale = self.norm_inf * xn + bn;
        if scale == 0.0 {
            0.0
        } else {
            worst / scale
        }
    }
}

/// Solves every azimuthal block of one slab with right-hand side `-f̂` in the
/// interior and `boundary[m]` at `r = κ`.
fn solve_slab(domain: &Domain, n: i64, f: Option<&[Complex64]>, boundary: Option<&[Complex64]>) -> Result<Vec<Complex64>> {
    let ctx: SlabCtx = domain.slab_ctx(n);
    let mut out = ctx.zeros();
    for idx in 0..ctx.n_modes() {
        let m = ctx.m_of(idx);
        let mut rhs: Vec<Complex64> = match f {
            Some(s) => ctx.block(s, idx).iter().map(|c| -c).collect(),
            None => vec![Complex64::new(0.0, 0.0); ctx.n_r()],
        };
        rhs[0] = boundary.map_or(Complex64::new(0.0, 0.0), |b| b[idx]);
        if kernels::is_zero(&rhs) {
            continue;
        }
        let op = RadialOperator::get(domain, n, m)?;
        let x = op.solve(&rhs);
        let err = op.backward_error(&x, &rhs);
        if err > SOLVER_TOLERANCE {
            return Err(Error::Residual {
                context: format!("Dirichlet solve for mode (n = {n}, m = {m})"),
                residual: err,
                tolerance: SOLVER_TOLERANCE,
            });
        }
        ctx.block_mut(&mut out, idx).copy_from_slice(&x);
    }
    Ok(out)
}

/// Solves `Δu = f` in axial mode `n` with `u = 0` on the free surface.
///
/// Only the mode-`n` slab of `f` is used; the result is supported in mode `n`.
///
/// ```
/// use jetstokes::{diskspec, DomainConfig, Domain, ScalarField};
///
/// let domain = Domain::new(DomainConfig::new(0.5, 6.0, 1.0, 12, 4, 2)).unwrap();
/// let u = diskspec::solve_mode_dirichlet(0, &ScalarField::constant(&domain, 1.0)).unwrap();
/// // u = (r² - κ²)/4, so u(0.3) = (0.09 - 0.25)/4
/// assert!((u.eval(0.3, 0.0, 0.0).re + 0.04).abs() < 1e-13);
/// ```
pub fn solve_mode_dirichlet(n: i64, f: &ScalarField) -> Result<ScalarField> {
    let domain = f.domain();
    domain.axial_index(n)?;
    let mut u = ScalarField::zeros(domain);
    let s = f.slab(n);
    if !kernels::is_zero(s) {
        let x = solve_slab(domain, n, Some(s), None)?;
        u.slab_mut(n).copy_from_slice(&x);
    }
    Ok(u.with_real(f.is_real() && n == 0))
}

/// Solves `Δu = f` with `u = 0` on the free surface in every axial mode.
pub fn solve_dirichlet(f: &ScalarField) -> Result<ScalarField> {
    let domain = f.domain();
    let mut u = ScalarField::zeros(domain);
    for n in f.axial_band() {
        let x = solve_slab(domain, n, Some(f.slab(n)), None)?;
        u.slab_mut(n).copy_from_slice(&x);
    }
    Ok(u.with_real(f.is_real()))
}

/// The solution of `Δφ = 0` in `Ω` with `φ = g` on the free surface.
pub fn harmonic_extension(g: &TraceField) -> Result<ScalarField> {
    let domain = g.domain();
    let mut u = ScalarField::zeros(domain);
    for n in domain.axial_modes() {
        let row = g.row(n);
        if kernels::is_zero(row) {
            continue;
        }
        let x = solve_slab(domain, n, None, Some(row))?;
        u.slab_mut(n).copy_from_slice(&x);
    }
    Ok(u.with_real(g.is_real()))
}

/// `‖u‖_{H²ₚ} / ‖f‖_{L²}` for the Dirichlet solution `u` of `Δu = f`.
pub fn stability_ratio(f: &ScalarField) -> Result<f64> {
    let fl2 = f.l2_norm();
    if fl2 == 0.0 {
        return Err(Error::InvalidArgument("stability ratio of the zero field".into()));
    }
    let u = solve_dirichlet(f)?;
    Ok(norm_hkp(&u, SobolevIndex(2))? / fl2)
}

/// Largest observed `‖u‖_{H²ₚ}/‖f‖_{L²}` over `sample_count` random forcings
/// supported in axial mode `n`.
pub fn stability_constant<R: Rng + ?Sized>(domain: &Domain, n: i64, sample_count: usize, rng: &mut R) -> Result<f64> {
    if sample_count == 0 {
        return Err(Error::InvalidArgument("sample_count must be at least 1".into()));
    }
    domain.axial_index(n)?;
    let band = BandLimit::within(domain, 2);
    let mut worst: f64 = 0.0;
    let mut taken = 0;
    while taken < sample_count {
        let f = ScalarField::random_smooth(domain, rng, band, false).restrict_axial(n)?;
        if f.l2_norm() == 0.0 {
            continue;
        }
        worst = worst.max(stability_ratio(&f)?);
        taken += 1;
    }
    Ok(worst)
}

/// Modified Bessel function `I_m(x)` by its power series
/// `Σ_k (x/2)^{2k+m} / (k! (k+m)!)`, accurate for the moderate arguments
/// `βκ` met here.
pub fn bessel_i(m: u32, x: f64) -> f64 {
    let h = 0.5 * x;
    let mut term = (1..=m).fold(1.0, |t, j| t * h / j as f64);
    let mut sum = term;
    for k in 1..200 {
        term *= h * h / (k as f64 * (k + m) as f64);
        sum += term;
        if term.abs() <= f64::EPSILON * sum.abs() {
            break;
        }
    }
    sum
}

/// The closed-form Dirichlet example in axial mode `n = 1`: `f ≡ 1` in
/// azimuthal mode 0 has solution `u = β⁻² (I₀(βr)/I₀(βκ) - 1)`.
///
/// Returns `(f, u)` sampled on the grid of `domain`.
pub fn bessel_example(domain: &Domain) -> Result<(ScalarField, ScalarField)> {
    let cfg = domain.config();
    let beta = cfg.beta(1);
    let i0k = bessel_i(0, beta * cfg.kappa);
    let f = ScalarField::from_mode_fn(domain, 1, 0, |_| Complex64::new(1.0, 0.0))?;
    let u = ScalarField::from_mode_fn(domain, 1, 0, |r| {
        Complex64::new((bessel_i(0, beta * r) / i0k - 1.0) / (beta * beta), 0.0)
    })?;
    Ok((f, u))
}

/// Relative `𝐋²` error of the computed solution of [`bessel_example`].
pub fn bessel_example_error(domain: &Domain) -> Result<f64> {
    let (f, exact) = bessel_example(domain)?;
    let u = solve_mode_dirichlet(1, &f)?;
    Ok((&u - &exact).l2_norm() / exact.l2_norm())
}
