//! Scalar and vector fields on the periodic cylinder `Ω = 𝔻 × (0, ℓ)`.
//!
//! A field is stored as axial Fourier modes `n ∈ [-n_z, n_z]` times azimuthal
//! Fourier modes `m ∈ [-n_theta, n_theta]` times values at the radial nodes of
//! a [`RadialGrid`]. Vector fields carry Cartesian components, which stay
//! smooth through the axis.
//!
//! Fourier representation in `a₃` makes every stored field periodic, and the
//! axial derivative is multiplication by `iβₙ` with `βₙ = 2πn/ℓ`.

pub mod grid;
mod io;
pub(crate) mod kernels;
mod norms;
mod ops;
mod random;
mod transform;

pub use grid::RadialGrid;
pub use io::{read_field_file, write_field_file, FieldFileHeader, StoredField};
pub use norms::{inner_product_hkp, norm_hkp, SobolevField, SobolevIndex, MAX_SOBOLEV_ORDER};
pub use ops::{div, grad, periodicity_defect, sym_grad, trace_sf};
pub use random::BandLimit;
pub use transform::NodalGrid;

use crate::diskspec::RadialOperator;
use crate::error::{Error, Result};
use kernels::SlabCtx;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::{Arc, OnceLock};

pub(crate) const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// Geometry, physics and discretization parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DomainConfig {
    /// Jet radius, `0 < κ < 1`.
    pub kappa: f64,
    /// Axial period.
    pub ell: f64,
    /// Viscosity.
    pub mu: f64,
    pub n_r: usize,
    pub n_theta: usize,
    pub n_z: usize,
    pub quad_order: usize,
}

impl DomainConfig {
    /// Quadrature order defaults to `2·n_r`, which integrates products of
    /// grid polynomials exactly.
    pub fn new(kappa: f64, ell: f64, mu: f64, n_r: usize, n_theta: usize, n_z: usize) -> Self {
        Self {
            kappa,
            ell,
            mu,
            n_r,
            n_theta,
            n_z,
            quad_order: 2 * n_r,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidConfig(msg.to_string()));
        if !(self.kappa > 0.0 && self.kappa < 1.0) {
            return bad("kappa must satisfy 0 < kappa < 1");
        }
        if !(self.ell > 0.0 && self.ell.is_finite()) {
            return bad("ell must be positive");
        }
        if !(self.mu > 0.0 && self.mu.is_finite()) {
            return bad("mu must be positive");
        }
        if self.n_r == 0 || self.n_theta == 0 || self.n_z == 0 || self.quad_order == 0 {
            return bad("n_r, n_theta, n_z and quad_order must be at least 1");
        }
        Ok(())
    }

    pub fn beta(&self, n: i64) -> f64 {
        2.0 * PI * n as f64 / self.ell
    }
}

impl Default for DomainConfig {
    fn default() -> Self {
        Self::new(0.5, 2.0 * PI, 1.0, 32, 8, 8)
    }
}

#[derive(Debug)]
struct DomainData {
    config: DomainConfig,
    grid: RadialGrid,
    radial_ops: Vec<OnceLock<RadialOperator>>,
}

/// Shared, immutable discretization context. Cheap to clone.
#[derive(Debug, Clone)]
pub struct Domain(Arc<DomainData>);

impl Domain {
    pub fn new(config: DomainConfig) -> Result<Self> {
        config.validate()?;
        let grid = RadialGrid::new(config.kappa, config.n_r, config.quad_order);
        let slots = (config.n_z + 1) * (config.n_theta + 1);
        let radial_ops = (0..slots).map(|_| OnceLock::new()).collect();
        Ok(Self(Arc::new(DomainData {
            config,
            grid,
            radial_ops,
        })))
    }

    pub fn config(&self) -> &DomainConfig {
        &self.0.config
    }

    pub fn grid(&self) -> &RadialGrid {
        &self.0.grid
    }

    pub fn same(&self, other: &Domain) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0.config == other.0.config
    }

    pub fn n_axial(&self) -> usize {
        2 * self.0.config.n_z + 1
    }

    pub fn n_azimuthal(&self) -> usize {
        2 * self.0.config.n_theta + 1
    }

    pub fn slab_len(&self) -> usize {
        self.n_azimuthal() * self.0.config.n_r
    }

    pub fn len(&self) -> usize {
        self.n_axial() * self.slab_len()
    }

    pub fn axial_modes(&self) -> impl Iterator<Item = i64> {
        let n_z = self.0.config.n_z as i64;
        -n_z..=n_z
    }

    pub fn axial_index(&self, n: i64) -> Result<usize> {
        let n_z = self.0.config.n_z;
        if n.unsigned_abs() as usize > n_z {
            return Err(Error::ModeOutOfBand { n, n_z });
        }
        Ok((n + n_z as i64) as usize)
    }

    pub(crate) fn slab_ctx(&self, n: i64) -> SlabCtx<'_> {
        SlabCtx {
            grid: &self.0.grid,
            n_theta: self.0.config.n_theta,
            beta: self.0.config.beta(n),
        }
    }

    pub(crate) fn radial_op_slot(&self, n: i64, m: i64) -> &OnceLock<RadialOperator> {
        let idx = n.unsigned_abs() as usize * (self.0.config.n_theta + 1) + m.unsigned_abs() as usize;
        &self.0.radial_ops[idx]
    }
}

/// A complex scalar function on `Ω` in mixed Fourier / radial-node form.
#[derive(Debug, Clone)]
pub struct ScalarField {
    domain: Domain,
    coeffs: Vec<Complex64>,
    real: bool,
}

impl ScalarField {
    pub fn zeros(domain: &Domain) -> Self {
        Self {
            domain: domain.clone(),
            coeffs: vec![ZERO; domain.len()],
            real: true,
        }
    }

    /// Wraps a coefficient tensor laid out n-major, then m, then r.
    pub fn from_coeffs(domain: &Domain, coeffs: Vec<Complex64>, real: bool) -> Result<Self> {
        if coeffs.len() != domain.len() {
            return Err(Error::DimensionMismatch {
                expected: domain.len(),
                found: coeffs.len(),
            });
        }
        if coeffs.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::InvalidArgument("non-finite coefficient".into()));
        }
        let field = Self {
            domain: domain.clone(),
            coeffs,
            real,
        };
        if real {
            let scale = field.max_abs().max(f64::MIN_POSITIVE);
            let defect = field.conjugate_symmetry_defect();
            if defect > 1e-12 * scale {
                return Err(Error::InvalidArgument(format!(
                    "real field violates conjugate symmetry by {defect:e}"
                )));
            }
        }
        Ok(field)
    }

    /// The constant function `c`.
    pub fn constant(domain: &Domain, c: f64) -> Self {
        let mut f = Self::zeros(domain);
        f.mode_mut(0, 0).iter_mut().for_each(|v| *v = Complex64::new(c, 0.0));
        f
    }

    /// A single Fourier mode `g(r) e^{i(mθ + βₙ a₃)}`.
    pub fn from_mode_fn(domain: &Domain, n: i64, m: i64, g: impl Fn(f64) -> Complex64) -> Result<Self> {
        domain.axial_index(n)?;
        if m.unsigned_abs() as usize > domain.config().n_theta {
            return Err(Error::InvalidArgument(format!("azimuthal mode {m} outside band")));
        }
        let mut f = Self::zeros(domain);
        f.real = false;
        let nodes = domain.grid().nodes().to_vec();
        for (v, r) in f.mode_mut(n, m).iter_mut().zip(nodes) {
            *v = g(r);
        }
        Ok(f)
    }

    /// A real function `g(r) cos(mθ)` in axial mode 0.
    pub fn from_radial_cos(domain: &Domain, m: i64, g: impl Fn(f64) -> f64) -> Result<Self> {
        let half = |r: f64| Complex64::new(if m == 0 { g(r) } else { 0.5 * g(r) }, 0.0);
        let mut f = Self::from_mode_fn(domain, 0, m, half)?;
        if m != 0 {
            let nodes = domain.grid().nodes().to_vec();
            for (v, r) in f.mode_mut(0, -m).iter_mut().zip(nodes) {
                *v = Complex64::new(0.5 * g(r), 0.0);
            }
        }
        f.real = true;
        Ok(f)
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Complex64> {
        self.coeffs
    }

    pub fn is_real(&self) -> bool {
        self.real
    }

    pub(crate) fn with_real(mut self, real: bool) -> Self {
        self.real = real;
        self
    }

    /// The same coefficients, no longer flagged as real.
    pub(crate) fn into_complex(self) -> Self {
        self.with_real(false)
    }

    fn offset(&self, n: i64, m: i64) -> usize {
        let cfg = self.domain.config();
        let ni = (n + cfg.n_z as i64) as usize;
        let mi = (m + cfg.n_theta as i64) as usize;
        (ni * self.domain.n_azimuthal() + mi) * cfg.n_r
    }

    /// Radial values of mode `(n, m)`.
    pub fn mode(&self, n: i64, m: i64) -> &[Complex64] {
        let o = self.offset(n, m);
        &self.coeffs[o..o + self.domain.config().n_r]
    }

    pub fn mode_mut(&mut self, n: i64, m: i64) -> &mut [Complex64] {
        let o = self.offset(n, m);
        let n_r = self.domain.config().n_r;
        &mut self.coeffs[o..o + n_r]
    }

    /// All coefficients of axial mode `n`.
    pub fn slab(&self, n: i64) -> &[Complex64] {
        let o = self.offset(n, -(self.domain.config().n_theta as i64));
        &self.coeffs[o..o + self.domain.slab_len()]
    }

    pub fn slab_mut(&mut self, n: i64) -> &mut [Complex64] {
        let o = self.offset(n, -(self.domain.config().n_theta as i64));
        let len = self.domain.slab_len();
        &mut self.coeffs[o..o + len]
    }

    /// Builds a field whose axial-mode-`n` slab is `f(n, slab)`; zero slabs
    /// are skipped.
    pub(crate) fn map_slabs(&self, f: impl Fn(SlabCtx, &[Complex64]) -> Vec<Complex64>) -> Self {
        let mut out = Self::zeros(&self.domain);
        for n in self.domain.axial_modes() {
            let s = self.slab(n);
            if kernels::is_zero(s) {
                continue;
            }
            let r = f(self.domain.slab_ctx(n), s);
            out.slab_mut(n).copy_from_slice(&r);
        }
        out.real = self.real;
        out
    }

    /// Axial modes carrying nonzero coefficients.
    pub fn axial_band(&self) -> Vec<i64> {
        self.domain
            .axial_modes()
            .filter(|&n| !kernels::is_zero(self.slab(n)))
            .collect()
    }

    /// Keeps only axial mode `n`.
    pub fn restrict_axial(&self, n: i64) -> Result<Self> {
        self.domain.axial_index(n)?;
        let mut out = Self::zeros(&self.domain);
        out.slab_mut(n).copy_from_slice(self.slab(n));
        out.real = self.real && n == 0;
        Ok(out)
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn conjugate_symmetry_defect(&self) -> f64 {
        let cfg = self.domain.config();
        let (nz, nt) = (cfg.n_z as i64, cfg.n_theta as i64);
        let mut worst: f64 = 0.0;
        for n in -nz..=nz {
            for m in -nt..=nt {
                for (a, b) in self.mode(n, m).iter().zip(self.mode(-n, -m)) {
                    worst = worst.max((a - b.conj()).norm());
                }
            }
        }
        worst
    }

    /// Projects onto conjugate-symmetric coefficients and marks the field real.
    pub fn enforce_real(&self) -> Self {
        let mut out = self.clone();
        let cfg = self.domain.config();
        let (nz, nt) = (cfg.n_z as i64, cfg.n_theta as i64);
        for n in -nz..=nz {
            for m in -nt..=nt {
                let other: Vec<Complex64> = self.mode(-n, -m).to_vec();
                for (a, b) in out.mode_mut(n, m).iter_mut().zip(other) {
                    *a = 0.5 * (*a + b.conj());
                }
            }
        }
        out.real = true;
        out
    }

    pub fn conj(&self) -> Self {
        let mut out = Self::zeros(&self.domain);
        let cfg = self.domain.config();
        let (nz, nt) = (cfg.n_z as i64, cfg.n_theta as i64);
        for n in -nz..=nz {
            for m in -nt..=nt {
                let src: Vec<Complex64> = self.mode(-n, -m).iter().map(|c| c.conj()).collect();
                out.mode_mut(n, m).copy_from_slice(&src);
            }
        }
        out.real = self.real;
        out
    }

    pub fn scale(&self, alpha: Complex64) -> Self {
        Self {
            domain: self.domain.clone(),
            coeffs: self.coeffs.iter().map(|c| c * alpha).collect(),
            real: self.real && alpha.im == 0.0,
        }
    }

    pub fn axpy(&mut self, alpha: Complex64, x: &ScalarField) {
        kernels::axpy(alpha, &x.coeffs, &mut self.coeffs);
        self.real = self.real && x.real && alpha.im == 0.0;
    }

    /// `∫_Ω u v̄`.
    pub fn l2_inner(&self, other: &ScalarField) -> Complex64 {
        let ell = self.domain.config().ell;
        self.domain
            .axial_modes()
            .map(|n| kernels::disk_inner(self.domain.slab_ctx(n), self.slab(n), other.slab(n)))
            .sum::<Complex64>()
            * ell
    }

    pub fn l2_norm(&self) -> f64 {
        self.l2_inner(self).re.max(0.0).sqrt()
    }

    /// Pointwise product with a real radial function `g(r)`.
    pub fn mul_radial(&self, g: impl Fn(f64) -> f64) -> Self {
        let w: Vec<f64> = self.domain.grid().nodes().iter().map(|&r| g(r)).collect();
        let n_r = w.len();
        let mut out = self.clone();
        for (k, c) in out.coeffs.iter_mut().enumerate() {
            *c *= w[k % n_r];
        }
        out
    }

    /// Radial derivative `∂_r`.
    pub fn d_r(&self) -> Self {
        self.map_slabs(kernels::d_r)
    }

    pub fn d_x(&self) -> Self {
        self.map_slabs(kernels::d_x)
    }

    pub fn d_y(&self) -> Self {
        self.map_slabs(kernels::d_y)
    }

    pub fn d_z(&self) -> Self {
        self.map_slabs(kernels::d_z)
    }

    pub fn laplacian(&self) -> Self {
        self.map_slabs(kernels::laplacian)
    }

    /// Evaluates the field at a physical point `(r, θ, a₃)`.
    pub fn eval(&self, r: f64, theta: f64, z: f64) -> Complex64 {
        let cfg = self.domain.config();
        let (nz, nt) = (cfg.n_z as i64, cfg.n_theta as i64);
        let mut total = ZERO;
        for n in -nz..=nz {
            for m in -nt..=nt {
                let vals = self.mode(n, m);
                if kernels::is_zero(vals) {
                    continue;
                }
                let radial = self.domain.grid().eval_at(m, vals, r);
                let phase = m as f64 * theta + cfg.beta(n) * z;
                total += radial * Complex64::from_polar(1.0, phase);
            }
        }
        total
    }

    fn check_same(&self, other: &ScalarField) {
        assert!(self.domain.same(&other.domain), "fields on different domains");
    }
}

impl Add for &ScalarField {
    type Output = ScalarField;
    fn add(self, rhs: &ScalarField) -> ScalarField {
        self.check_same(rhs);
        let mut out = self.clone();
        out.axpy(Complex64::new(1.0, 0.0), rhs);
        out
    }
}

impl Sub for &ScalarField {
    type Output = ScalarField;
    fn sub(self, rhs: &ScalarField) -> ScalarField {
        self.check_same(rhs);
        let mut out = self.clone();
        out.axpy(Complex64::new(-1.0, 0.0), rhs);
        out
    }
}

impl Neg for &ScalarField {
    type Output = ScalarField;
    fn neg(self) -> ScalarField {
        self.scale(Complex64::new(-1.0, 0.0))
    }
}

impl Mul<f64> for &ScalarField {
    type Output = ScalarField;
    fn mul(self, rhs: f64) -> ScalarField {
        self.scale(Complex64::new(rhs, 0.0))
    }
}

impl Mul<Complex64> for &ScalarField {
    type Output = ScalarField;
    fn mul(self, rhs: Complex64) -> ScalarField {
        self.scale(rhs)
    }
}

/// Cartesian vector field `(v₁, v₂, v₃)`.
#[derive(Debug, Clone)]
pub struct VectorField {
    pub components: [ScalarField; 3],
}

impl VectorField {
    pub fn new(components: [ScalarField; 3]) -> Result<Self> {
        let d = components[0].domain();
        if !components.iter().all(|c| c.domain().same(d)) {
            return Err(Error::DomainMismatch);
        }
        Ok(Self { components })
    }

    pub fn zeros(domain: &Domain) -> Self {
        let z = ScalarField::zeros(domain);
        Self {
            components: [z.clone(), z.clone(), z],
        }
    }

    /// The constant vector field `c`.
    pub fn constant(domain: &Domain, c: [f64; 3]) -> Self {
        Self {
            components: c.map(|ci| ScalarField::constant(domain, ci)),
        }
    }

    /// The rigid rotation `(-a₂, a₁, 0)` about the jet axis.
    pub fn rigid_rotation(domain: &Domain) -> Self {
        // -a₂ = -r sinθ, a₁ = r cosθ
        let mut v1 = ScalarField::zeros(domain);
        let mut v2 = ScalarField::zeros(domain);
        let nodes = domain.grid().nodes().to_vec();
        for (j, &r) in nodes.iter().enumerate() {
            v1.mode_mut(0, 1)[j] = Complex64::new(0.0, 0.5 * r);
            v1.mode_mut(0, -1)[j] = Complex64::new(0.0, -0.5 * r);
            v2.mode_mut(0, 1)[j] = Complex64::new(0.5 * r, 0.0);
            v2.mode_mut(0, -1)[j] = Complex64::new(0.5 * r, 0.0);
        }
        Self {
            components: [v1, v2, ScalarField::zeros(domain)],
        }
    }

    pub fn domain(&self) -> &Domain {
        self.components[0].domain()
    }

    pub fn is_real(&self) -> bool {
        self.components.iter().all(|c| c.is_real())
    }

    /// The same coefficients, no longer flagged as real.
    pub(crate) fn into_complex(self) -> Self {
        let [a, b, c] = self.components;
        Self {
            components: [a.into_complex(), b.into_complex(), c.into_complex()],
        }
    }

    pub fn map(&self, f: impl Fn(&ScalarField) -> ScalarField) -> Self {
        Self {
            components: [
                f(&self.components[0]),
                f(&self.components[1]),
                f(&self.components[2]),
            ],
        }
    }

    pub fn laplacian(&self) -> Self {
        self.map(ScalarField::laplacian)
    }

    pub fn scale(&self, alpha: Complex64) -> Self {
        self.map(|c| c.scale(alpha))
    }

    pub fn axpy(&mut self, alpha: Complex64, x: &VectorField) {
        for (a, b) in self.components.iter_mut().zip(&x.components) {
            a.axpy(alpha, b);
        }
    }

    pub fn l2_inner(&self, other: &VectorField) -> Complex64 {
        self.components
            .iter()
            .zip(&other.components)
            .map(|(a, b)| a.l2_inner(b))
            .sum()
    }

    pub fn l2_norm(&self) -> f64 {
        self.l2_inner(self).re.max(0.0).sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.components.iter().map(|c| c.max_abs()).fold(0.0, f64::max)
    }

    pub fn axial_band(&self) -> Vec<i64> {
        let mut band: Vec<i64> = self.components.iter().flat_map(|c| c.axial_band()).collect();
        band.sort_unstable();
        band.dedup();
        band
    }

    pub fn restrict_axial(&self, n: i64) -> Result<Self> {
        Ok(Self {
            components: [
                self.components[0].restrict_axial(n)?,
                self.components[1].restrict_axial(n)?,
                self.components[2].restrict_axial(n)?,
            ],
        })
    }

    pub fn conj(&self) -> Self {
        self.map(ScalarField::conj)
    }

    pub fn enforce_real(&self) -> Self {
        self.map(ScalarField::enforce_real)
    }
}

impl Add for &VectorField {
    type Output = VectorField;
    fn add(self, rhs: &VectorField) -> VectorField {
        let mut out = self.clone();
        out.axpy(Complex64::new(1.0, 0.0), rhs);
        out
    }
}

impl Sub for &VectorField {
    type Output = VectorField;
    fn sub(self, rhs: &VectorField) -> VectorField {
        let mut out = self.clone();
        out.axpy(Complex64::new(-1.0, 0.0), rhs);
        out
    }
}

impl Mul<f64> for &VectorField {
    type Output = VectorField;
    fn mul(self, rhs: f64) -> VectorField {
        self.scale(Complex64::new(rhs, 0.0))
    }
}

/// A 3×3 tensor of scalar fields, `entries[i][j]`.
#[derive(Debug, Clone)]
pub struct TensorField {
    pub entries: [[ScalarField; 3]; 3],
}

impl TensorField {
    /// `Σᵢⱼ ∫_Ω Tᵢⱼ S̄ᵢⱼ`.
    pub fn l2_inner(&self, other: &TensorField) -> Complex64 {
        let mut total = ZERO;
        for i in 0..3 {
            for j in 0..3 {
                total += self.entries[i][j].l2_inner(&other.entries[i][j]);
            }
        }
        total
    }

    pub fn max_abs(&self) -> f64 {
        self.entries
            .iter()
            .flatten()
            .map(|c| c.max_abs())
            .fold(0.0, f64::max)
    }
}

/// Boundary data on the free surface `r = κ`, indexed by `(n, m)`.
#[derive(Debug, Clone)]
pub struct TraceField {
    domain: Domain,
    coeffs: Vec<Complex64>,
    real: bool,
}

impl TraceField {
    pub fn zeros(domain: &Domain) -> Self {
        Self {
            domain: domain.clone(),
            coeffs: vec![ZERO; domain.n_axial() * domain.n_azimuthal()],
            real: true,
        }
    }

    pub fn from_coeffs(domain: &Domain, coeffs: Vec<Complex64>, real: bool) -> Result<Self> {
        let expected = domain.n_axial() * domain.n_azimuthal();
        if coeffs.len() != expected {
            return Err(Error::DimensionMismatch {
                expected,
                found: coeffs.len(),
            });
        }
        Ok(Self {
            domain: domain.clone(),
            coeffs,
            real,
        })
    }

    /// Boundary function `g(θ)` sampled through its azimuthal Fourier coefficients
    /// `coeffs[m + n_theta]` in axial mode `n`.
    pub fn from_mode(domain: &Domain, n: i64, m: i64, value: Complex64) -> Result<Self> {
        domain.axial_index(n)?;
        let mut t = Self::zeros(domain);
        let nt = domain.config().n_theta as i64;
        if m.abs() > nt {
            return Err(Error::InvalidArgument(format!("azimuthal mode {m} outside band")));
        }
        *t.get_mut(n, m) = value;
        t.real = false;
        Ok(t)
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn is_real(&self) -> bool {
        self.real
    }

    pub(crate) fn with_real(mut self, real: bool) -> Self {
        self.real = real;
        self
    }

    fn index(&self, n: i64, m: i64) -> usize {
        let cfg = self.domain.config();
        (n + cfg.n_z as i64) as usize * self.domain.n_azimuthal() + (m + cfg.n_theta as i64) as usize
    }

    pub fn get(&self, n: i64, m: i64) -> Complex64 {
        self.coeffs[self.index(n, m)]
    }

    pub fn get_mut(&mut self, n: i64, m: i64) -> &mut Complex64 {
        let i = self.index(n, m);
        &mut self.coeffs[i]
    }

    /// Azimuthal coefficients of axial mode `n`.
    pub fn row(&self, n: i64) -> &[Complex64] {
        let i = self.index(n, -(self.domain.config().n_theta as i64));
        &self.coeffs[i..i + self.domain.n_azimuthal()]
    }

    pub fn row_mut(&mut self, n: i64) -> &mut [Complex64] {
        let i = self.index(n, -(self.domain.config().n_theta as i64));
        let len = self.domain.n_azimuthal();
        &mut self.coeffs[i..i + len]
    }

    pub fn scale(&self, alpha: Complex64) -> Self {
        Self {
            domain: self.domain.clone(),
            coeffs: self.coeffs.iter().map(|c| c * alpha).collect(),
            real: self.real && alpha.im == 0.0,
        }
    }

    pub fn axpy(&mut self, alpha: Complex64, x: &TraceField) {
        kernels::axpy(alpha, &x.coeffs, &mut self.coeffs);
        self.real = self.real && x.real && alpha.im == 0.0;
    }

    /// `∫_{S_F} g h̄`.
    pub fn l2_inner(&self, other: &TraceField) -> Complex64 {
        let cfg = self.domain.config();
        let s: Complex64 = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a * b.conj())
            .sum();
        s * (2.0 * PI * cfg.kappa * cfg.ell)
    }

    pub fn l2_norm(&self) -> f64 {
        self.l2_inner(self).re.max(0.0).sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Multiplies by `e^{±iθ}`, shifting azimuthal modes; modes leaving the band are dropped.
    pub fn shift_azimuthal(&self, up: bool) -> Self {
        let mut out = Self::zeros(&self.domain);
        let cfg = self.domain.config();
        let (nz, nt) = (cfg.n_z as i64, cfg.n_theta as i64);
        for n in -nz..=nz {
            for m in -nt..=nt {
                let target = if up { m + 1 } else { m - 1 };
                if target.abs() <= nt {
                    *out.get_mut(n, target) = self.get(n, m);
                }
            }
        }
        out.real = false;
        out
    }

    /// Multiplies by `cos θ`.
    pub fn mul_cos(&self) -> Self {
        let mut out = self.shift_azimuthal(true);
        out.axpy(Complex64::new(1.0, 0.0), &self.shift_azimuthal(false));
        out.scale(Complex64::new(0.5, 0.0)).with_real(self.real)
    }

    /// Multiplies by `sin θ`.
    pub fn mul_sin(&self) -> Self {
        let mut out = self.shift_azimuthal(true);
        out.axpy(Complex64::new(-1.0, 0.0), &self.shift_azimuthal(false));
        out.scale(Complex64::new(0.0, -0.5)).with_real(self.real)
    }
}

impl Add for &TraceField {
    type Output = TraceField;
    fn add(self, rhs: &TraceField) -> TraceField {
        let mut out = self.clone();
        out.axpy(Complex64::new(1.0, 0.0), rhs);
        out
    }
}

impl Sub for &TraceField {
    type Output = TraceField;
    fn sub(self, rhs: &TraceField) -> TraceField {
        let mut out = self.clone();
        out.axpy(Complex64::new(-1.0, 0.0), rhs);
        out
    }
}
