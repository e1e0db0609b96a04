//! Eigenvalues of `A`, sector containment, the kernel, and resolvent solves.
//!
//! On the constrained space the reduced mass matrix is the identity, so the
//! pencil `(A_block, M_block)` is a standard Hermitian eigenproblem per
//! angular-momentum group. Every eigenvalue of a Hermitian positive
//! semidefinite matrix is real and non-negative, which is strictly stronger
//! than containment in the sector `{|Im λ| ≤ Re λ}`; both are checked.
//!
//! Resolvent solves are Galerkin solves of `⟨v, u⟩ = (g, u)` for all `u` in
//! the constrained space, i.e. `(G - λM) x = b` with `bᵢ = (g, ψᵢ)`.

use crate::error::{Error, Result};
use crate::fieldspace::{norm_hkp, BandLimit, Domain, SobolevIndex, VectorField};
use crate::helmholtz::project;
use crate::stokesop::{ModeOperator, OperatorSet};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use serde::Serialize;
use std::io::Write;

type CMatrix = DMatrix<Complex64>;

/// Solves with a condition estimate above this are flagged.
pub const CONDITION_LIMIT: f64 = 1e12;

/// One computed eigenpair.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralEntry {
    /// Axial mode.
    pub n: i64,
    /// Angular-momentum group.
    pub j: i64,
    /// Rayleigh quotient `xᴴ A x` of the normalised eigenvector.
    pub lambda: Complex64,
    /// `‖A x - λ x‖` with `‖x‖ = 1` (the reduced mass matrix is the identity).
    pub residual: f64,
    /// `|Im λ| ≤ Re λ + tolerance`.
    pub in_sector: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectralReport {
    pub entries: Vec<SpectralEntry>,
    /// Eigenvalues of the `n = 0` block with `|λ| < kernel_tol·‖A_block‖_F`
    /// (`None` when mode 0 was not computed).
    pub kernel_dim: Option<usize>,
    pub tolerance: f64,
}

#[derive(Serialize)]
struct EigenRow {
    n: i64,
    re_lambda: f64,
    im_lambda: f64,
    residual: f64,
    in_sector: bool,
}

impl SpectralReport {
    pub fn all_in_sector(&self) -> bool {
        self.entries.iter().all(|e| e.in_sector)
    }

    pub fn max_residual(&self) -> f64 {
        self.entries.iter().map(|e| e.residual).fold(0.0, f64::max)
    }

    /// `eigenvalues.csv`: `n, re_lambda, im_lambda, residual, in_sector`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        for e in &self.entries {
            w.serialize(EigenRow {
                n: e.n,
                re_lambda: e.lambda.re,
                im_lambda: e.lambda.im,
                residual: e.residual,
                in_sector: e.in_sector,
            })?;
        }
        w.flush()?;
        Ok(())
    }
}

fn hermitian_part(a: &CMatrix) -> CMatrix {
    (a + a.adjoint()) * Complex64::new(0.5, 0.0)
}

/// All eigenpairs of one mode, as `(entry, group-local eigenvector)`,
/// sorted ascending by real part.
fn eigenpairs(op: &ModeOperator, tolerance: f64) -> Vec<(SpectralEntry, DVector<Complex64>)> {
    let mut out = Vec::with_capacity(op.dim());
    for g in op.groups() {
        let eig = hermitian_part(&g.a_block).symmetric_eigen();
        for (k, _) in eig.eigenvalues.iter().enumerate() {
            let x = eig.eigenvectors.column(k).into_owned();
            let ax = &g.a_block * &x;
            let lambda = x.dotc(&ax) / x.norm_squared();
            let residual = (&ax - &x * lambda).norm() / x.norm();
            out.push((
                SpectralEntry {
                    n: op.n(),
                    j: g.j,
                    lambda,
                    residual,
                    in_sector: lambda.im.abs() <= lambda.re + tolerance,
                },
                x,
            ));
        }
    }
    out.sort_by(|a, b| {
        a.0.lambda
            .re
            .total_cmp(&b.0.lambda.re)
            .then(a.0.j.cmp(&b.0.j))
    });
    out
}

/// The `count` eigenvalues of smallest real part in mode `op.n()`.
///
/// ```
/// use jetstokes::{spectral, stokesop, Domain, DomainConfig};
///
/// let domain = Domain::new(DomainConfig::new(0.5, 6.0, 1.0, 12, 4, 1)).unwrap();
/// let op = stokesop::assemble_a(&domain, 1).unwrap();
/// let entries = spectral::eigensolve(&op, 5, 1e-8);
/// assert!(entries.iter().all(|e| e.in_sector && e.lambda.re > 0.0));
/// ```
pub fn eigensolve(op: &ModeOperator, count: usize, tolerance: f64) -> Vec<SpectralEntry> {
    eigenpairs(op, tolerance)
        .into_iter()
        .take(count)
        .map(|(e, _)| e)
        .collect()
}

/// Number of eigenvalues with `|λ| < tol·‖A_block‖_F`.
pub fn kernel_dimension(op: &ModeOperator, tol: f64) -> usize {
    let scale = op.a_norm();
    eigenpairs(op, 0.0)
        .iter()
        .filter(|(e, _)| e.lambda.norm() < tol * scale)
        .count()
}

/// `|xᴴ A_block x| / xᴴx` for the coefficients `x` of `v`.
pub fn rayleigh_quotient(op: &ModeOperator, v: &VectorField) -> f64 {
    let x = op.coefficients(v);
    let a = op.a_block();
    (x.dotc(&(&a * &x)) / x.norm_squared()).norm()
}

/// Eigenvalues and eigen-fields of mode `op.n()`, smallest first.
pub fn eigenfields(op: &ModeOperator, count: usize) -> Vec<(f64, VectorField)> {
    eigenpairs(op, 0.0)
        .into_iter()
        .take(count)
        .map(|(e, x)| {
            let g = op.group(e.j).expect("group of a computed eigenpair");
            (e.lambda.re, op.synthesize_group(g, &x))
        })
        .collect()
}

/// Every mode's `count` smallest eigenvalues, modes ascending.
pub fn spectrum(ops: &OperatorSet, count: usize, tolerance: f64, kernel_tol: f64) -> SpectralReport {
    let entries = ops
        .iter()
        .flat_map(|op| eigensolve(op, count, tolerance))
        .collect();
    SpectralReport {
        entries,
        kernel_dim: ops.get(0).ok().map(|op| kernel_dimension(op, kernel_tol)),
        tolerance,
    }
}

/// Output of [`resolve`].
#[derive(Debug, Clone)]
pub struct Resolution {
    pub v: VectorField,
    /// Largest normwise backward error of the Galerkin equations over blocks.
    pub residual: f64,
    /// Largest condition estimate `max|μ - λ| / min|μ - λ|` over blocks, with
    /// `μ` the eigenvalues of the form at `λ = 0`.
    pub condition: f64,
    /// `condition > CONDITION_LIMIT`.
    pub ill_conditioned: bool,
}

/// Galerkin solve of `⟨v, u⟩ = (g, u)_{𝐋²}` for all constrained `u`, per axial mode.
///
/// `g` is projected onto divergence-free fields first. Every axial mode
/// present in `g` needs an operator in `ops`.
pub fn resolve(ops: &OperatorSet, lambda: Complex64, g: &VectorField) -> Result<Resolution> {
    let domain = ops.domain();
    if !g.domain().same(domain) {
        return Err(Error::DomainMismatch);
    }
    let pg = project(g)?;
    let mut v = VectorField::zeros(domain).into_complex();
    let (mut residual, mut condition) = (0.0f64, 0.0f64);
    for n in g.axial_band() {
        let op = ops.get(n)?;
        for grp in op.groups() {
            let b = op.coefficients_group(grp, &pg);
            let mut f = grp.g_block.clone();
            f -= &grp.m_block * lambda;
            let lu = f.clone().lu();
            let x = lu.solve(&b).ok_or_else(|| {
                Error::Factorization(format!("resolvent block (n = {n}, J = {}) at λ = {lambda}", grp.j))
            })?;
            let r = &f * &x - &b;
            let denom = f.norm() * x.norm() + b.norm();
            if denom > 0.0 {
                residual = residual.max(r.norm() / denom);
            }
            let mu = hermitian_part(&grp.g_block).symmetric_eigenvalues();
            let dist: Vec<f64> = mu.iter().map(|&m| (Complex64::new(m, 0.0) - lambda).norm()).collect();
            let (lo, hi) = dist
                .iter()
                .fold((f64::INFINITY, 0.0f64), |(lo, hi), &d| (lo.min(d), hi.max(d)));
            condition = condition.max(if lo == 0.0 { f64::INFINITY } else { hi / lo });
            v.axpy(Complex64::new(1.0, 0.0), &op.synthesize_group(grp, &x));
        }
    }
    Ok(Resolution {
        v,
        residual,
        condition,
        ill_conditioned: condition > CONDITION_LIMIT,
    })
}

/// One row of a resolvent sweep: worst case over the random right-hand sides.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResolventSample {
    pub re_lambda: f64,
    pub im_lambda: f64,
    /// `max ‖v‖_{𝐋²} / ‖g‖_{𝐋²}`.
    pub l2_gain: f64,
    /// `√2 / |λ|`.
    pub l2_bound: f64,
    /// `max ‖v‖_{H²ₚ} / ‖g‖_{𝐋²}`.
    pub hk_gain: f64,
    /// `l2_gain ≤ l2_bound + tolerance`.
    pub bound_ok: bool,
}

impl ResolventSample {
    pub fn lambda(&self) -> Complex64 {
        Complex64::new(self.re_lambda, self.im_lambda)
    }
}

/// Settings of [`resolvent_sweep`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepOptions {
    /// Random right-hand sides per `λ`.
    pub samples: usize,
    /// Smallest admissible `|λ|`.
    pub epsilon: f64,
    /// Absolute slack on the 𝐋² bound.
    pub tolerance: f64,
    /// Polynomial degree of the random right-hand sides.
    pub max_degree: usize,
}

impl Default for SweepOptions {
    fn default() -> Self {
        Self {
            samples: 10,
            epsilon: 0.5,
            tolerance: 1e-8,
            max_degree: 8,
        }
    }
}

/// A random unit-norm complex field supported on the modes of `ops`.
pub fn random_forcing<R: Rng + ?Sized>(ops: &OperatorSet, rng: &mut R, max_degree: usize) -> VectorField {
    let domain = ops.domain();
    let cfg = domain.config();
    let max_n = ops.modes().map(|n| n.unsigned_abs() as usize).max().unwrap_or(0);
    let band = BandLimit::new(max_n, cfg.n_theta.saturating_sub(2), max_degree);
    loop {
        let raw = VectorField::random_smooth(domain, rng, band, false);
        let mut g = VectorField::zeros(domain).into_complex();
        for n in ops.modes() {
            if let Ok(part) = raw.restrict_axial(n) {
                g.axpy(Complex64::new(1.0, 0.0), &part);
            }
        }
        let norm = g.l2_norm();
        if norm > 0.0 {
            return g.scale(Complex64::new(1.0 / norm, 0.0));
        }
    }
}

/// `‖R(λ; A) g‖` gains along `lambdas` for random `g`, in grid order.
pub fn resolvent_sweep<R: Rng + ?Sized>(
    ops: &OperatorSet,
    lambdas: &[Complex64],
    opts: SweepOptions,
    rng: &mut R,
) -> Result<Vec<ResolventSample>> {
    if lambdas.is_empty() {
        return Err(Error::InvalidArgument("resolvent sweep needs at least one λ".into()));
    }
    if let Some(l) = lambdas.iter().find(|l| l.norm() < opts.epsilon) {
        return Err(Error::InvalidArgument(format!(
            "|λ| = {} for λ = {l} is below ε = {}",
            l.norm(),
            opts.epsilon
        )));
    }
    if opts.samples == 0 {
        return Err(Error::InvalidArgument("resolvent sweep needs at least one sample".into()));
    }
    let forcings: Vec<VectorField> = (0..opts.samples)
        .map(|_| random_forcing(ops, rng, opts.max_degree))
        .collect();
    lambdas
        .iter()
        .map(|&lambda| {
            let (mut l2, mut hk) = (0.0f64, 0.0f64);
            for g in &forcings {
                let gn = g.l2_norm();
                let v = resolve(ops, lambda, g)?.v;
                l2 = l2.max(v.l2_norm() / gn);
                hk = hk.max(norm_hkp(&v, SobolevIndex(2))? / gn);
            }
            let bound = std::f64::consts::SQRT_2 / lambda.norm();
            Ok(ResolventSample {
                re_lambda: lambda.re,
                im_lambda: lambda.im,
                l2_gain: l2,
                l2_bound: bound,
                hk_gain: hk,
                bound_ok: l2 <= bound + opts.tolerance,
            })
        })
        .collect()
}

/// Least-squares slope of `log hk_gain` against `log |λ|`.
pub fn growth_exponent(samples: &[ResolventSample]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = samples
        .iter()
        .filter(|s| s.hk_gain > 0.0)
        .map(|s| (s.lambda().norm().ln(), s.hk_gain.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let k = pts.len() as f64;
    let (mx, my) = pts.iter().fold((0.0, 0.0), |(a, b), (x, y)| (a + x / k, b + y / k));
    let sxx: f64 = pts.iter().map(|(x, _)| (x - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|(x, y)| (x - mx) * (y - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

/// `resolvent_sweep.csv`: `re_lambda, im_lambda, l2_gain, l2_bound, hk_gain, bound_ok`.
pub fn write_sweep_csv<W: Write>(samples: &[ResolventSample], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for s in samples {
        w.serialize(s)?;
    }
    w.flush()?;
    Ok(())
}

/// `λ = t·direction` for each `t`.
pub fn ray(direction: Complex64, ts: &[f64]) -> Vec<Complex64> {
    ts.iter().map(|&t| direction * t).collect()
}

/// Smallest eigenvalues of mode `n` that exceed `kernel_tol·‖A_block‖_F`.
pub fn smallest_nonzero(op: &ModeOperator, count: usize, kernel_tol: f64) -> Vec<f64> {
    let cut = kernel_tol * op.a_norm();
    eigenpairs(op, 0.0)
        .into_iter()
        .map(|(e, _)| e.lambda.re)
        .filter(|l| l.abs() >= cut)
        .take(count)
        .collect()
}

/// The same domain with `n_r` and `n_theta` doubled.
pub fn refine(domain: &Domain) -> Result<Domain> {
    let mut cfg = domain.config().clone();
    cfg.n_r *= 2;
    cfg.n_theta *= 2;
    cfg.quad_order = 2 * cfg.n_r;
    Domain::new(cfg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fieldspace::DomainConfig;
    use crate::stokesop::BasisOptions;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;
    use std::f64::consts::PI;
    use std::sync::OnceLock;

    fn ops() -> &'static OperatorSet {
        static OPS: OnceLock<OperatorSet> = OnceLock::new();
        OPS.get_or_init(|| {
            let d = Domain::new(DomainConfig::new(0.5, 2.0 * PI, 1.0, 16, 6, 2)).unwrap();
            OperatorSet::build(&d, [-1, 0, 1, 2], BasisOptions::default()).unwrap()
        })
    }

    #[test]
    fn mode_zero_kernel() {
        let ops = ops();
        let d = ops.domain();
        let op = ops.get(0).unwrap();
        let scale = op.a_norm();
        for v in [
            VectorField::constant(d, [1.0, 0.0, 0.0]),
            VectorField::constant(d, [0.0, 1.0, 0.0]),
            VectorField::constant(d, [0.0, 0.0, 1.0]),
            VectorField::rigid_rotation(d),
        ] {
            assert!(rayleigh_quotient(op, &v) < 1e-10 * scale);
        }
        assert_eq!(kernel_dimension(op, 1e-10), 4);
        assert_eq!(kernel_dimension(ops.get(1).unwrap(), 1e-10), 0);
    }

    #[test]
    fn eigenvalues_are_real_nonnegative_and_accurate() {
        let report = spectrum(ops(), 20, 1e-8, 1e-10);
        assert_eq!(report.kernel_dim, Some(4));
        assert!(report.all_in_sector());
        assert!(report.max_residual() < 1e-8);
        for e in &report.entries {
            assert!(e.lambda.re >= -1e-8 && e.lambda.im.abs() < 1e-10 * e.lambda.norm().max(1.0));
        }
        let mut buf = Vec::new();
        report.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("n,re_lambda,im_lambda,residual,in_sector\n"));
        assert_eq!(text.lines().count(), report.entries.len() + 1);
    }

    #[test]
    fn eigenfields_satisfy_the_strong_equation() {
        let op = ops().get(1).unwrap();
        for (lambda, v) in eigenfields(op, 3) {
            let av = crate::stokesop::apply_a(&v).unwrap();
            // Galerkin residual: A v - λ v is 𝐋²-orthogonal to the space
            let r = op.coefficients(&(&av - &v.scale(Complex64::new(lambda, 0.0))));
            assert!(r.norm() < 1e-8 * lambda.max(1.0));
        }
    }

    #[test]
    fn resolve_examples() {
        let ops = ops();
        let d = ops.domain();
        let zero = VectorField::zeros(d);
        let r = resolve(ops, Complex64::new(0.0, 1.0), &zero).unwrap();
        assert_eq!(r.v.max_abs(), 0.0);
        let c = VectorField::constant(d, [0.2, -0.7, 1.1]);
        let r = resolve(ops, Complex64::new(-1.0, 0.0), &c).unwrap();
        assert!((&r.v - &c).max_abs() < 1e-10);
        assert!(r.residual < 1e-10 && !r.ill_conditioned);
        // mode 0 has no operator in this set
        let only_one = OperatorSet::build(d, [1], BasisOptions::default()).unwrap();
        assert!(resolve(&only_one, Complex64::new(0.0, 1.0), &c).is_err());
    }

    #[test]
    fn near_eigenvalue_solve_is_flagged() {
        let ops = ops();
        let op = ops.get(1).unwrap();
        let (lambda, v) = eigenfields(op, 1).remove(0);
        let r = resolve(ops, Complex64::new(lambda * (1.0 + 1e-14), 0.0), &v).unwrap();
        assert!(r.condition > CONDITION_LIMIT && r.ill_conditioned);
    }

    #[test]
    fn sweep_bounds_and_growth() {
        let ops = ops();
        let mut rng = ChaCha20Rng::seed_from_u64(5);
        let opts = SweepOptions {
            samples: 3,
            ..SweepOptions::default()
        };
        let imag = ray(Complex64::new(0.0, 1.0), &[1.0, 2.0, 4.0, 8.0]);
        let samples = resolvent_sweep(ops, &imag, opts, &mut rng).unwrap();
        assert!(samples.iter().all(|s| s.bound_ok));
        assert!(growth_exponent(&samples).unwrap() <= 0.1);
        let diag = ray(Complex64::new(-1.0, 2.0), &[1.0, 2.0, 4.0, 8.0]);
        assert!(resolvent_sweep(ops, &diag, opts, &mut rng).unwrap().iter().all(|s| s.bound_ok));
        assert!(resolvent_sweep(ops, &[], opts, &mut rng).is_err());
        assert!(resolvent_sweep(ops, &[Complex64::new(0.1, 0.1)], opts, &mut rng).is_err());
        let mut buf = Vec::new();
        write_sweep_csv(&samples, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("re_lambda,im_lambda,l2_gain,l2_bound,hk_gain,bound_ok\n"));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(8))]

        #[test]
        fn resolve_is_linear_and_conjugation_symmetric(seed in any::<u64>(), re in -2.0f64..0.0, im in 0.5f64..3.0) {
            let ops = ops();
            let mut rng = ChaCha20Rng::seed_from_u64(seed);
            let lambda = Complex64::new(re, im);
            let g = random_forcing(ops, &mut rng, 6).restrict_axial(1).unwrap();
            let h = random_forcing(ops, &mut rng, 6).restrict_axial(1).unwrap();
            let alpha = Complex64::new(0.3, -1.2);
            let mut comb = g.scale(alpha);
            comb.axpy(Complex64::new(1.0, 0.0), &h);
            let lhs = resolve(ops, lambda, &comb).unwrap().v;
            let mut rhs = resolve(ops, lambda, &g).unwrap().v.scale(alpha);
            rhs.axpy(Complex64::new(1.0, 0.0), &resolve(ops, lambda, &h).unwrap().v);
            prop_assert!((&lhs - &rhs).l2_norm() < 1e-10 * rhs.l2_norm().max(1e-300));

            let v = resolve(ops, lambda, &g).unwrap();
            prop_assert!(v.residual < 1e-10);
            prop_assert!(v.v.l2_norm() <= std::f64::consts::SQRT_2 / lambda.norm() * g.l2_norm() + 1e-8);
            let vc = resolve(ops, lambda.conj(), &g.conj()).unwrap().v;
            prop_assert!((&vc - &v.v.conj()).l2_norm() < 1e-10 * v.v.l2_norm());
        }
    }
}
