//! The modified Stokes operator `Av = -μPΔv + ∇Qv` and its sesquilinear form
//!
//! ```text
//! ⟨v, u⟩ = -λ (v, u)_{𝐋²} + (μ/2) Σᵢⱼ ∫_Ω (Dⱼvᵢ + Dᵢvⱼ) conj(Dⱼuᵢ + Dᵢuⱼ)
//! ```
//!
//! restricted, per axial mode, to a discrete space of divergence-free fields
//! with vanishing tangential traction on the free surface.
//!
//! The discrete space is the nullspace of the constraints inside a polynomial
//! trial space (see [`trial`]). Because the constraints, `A` and the form all
//! commute with rotations about the axis, the space splits into independent
//! groups of total angular momentum `J`, each assembled separately. Within a
//! group two matrices are built from independent code paths: the strong
//! matrix `(Aψⱼ, ψᵢ)` and the Galerkin matrix of the form at `λ = 0`.
//! Integration by parts makes them equal on the constrained space, so their
//! agreement is enforced as a hard check.

mod export;
mod traction;
pub mod trial;

pub use export::{read_matrix, write_matrix, MatrixHeader};
pub use traction::{tangential_traction, traction, Traction};
pub use trial::{Trial, TrialKind};

use crate::error::{Error, Result};
use crate::fieldspace::{div, grad, sym_grad, Domain, TensorField, VectorField};
use crate::helmholtz::{operator_q, project};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rayon::prelude::*;
use std::collections::BTreeMap;
use traction::{polar_traction, PolarTraction};

type CMatrix = DMatrix<Complex64>;

/// Relative Frobenius tolerance for strong/weak agreement.
pub const ASSEMBLY_TOLERANCE: f64 = 1e-8;

/// `Av = -μPΔv + ∇Qv`.
///
/// ```
/// use jetstokes::{stokesop, Domain, DomainConfig, VectorField};
///
/// let domain = Domain::new(DomainConfig::new(0.5, 6.0, 1.0, 12, 4, 2)).unwrap();
/// let rotation = VectorField::rigid_rotation(&domain);
/// assert!(stokesop::apply_a(&rotation).unwrap().max_abs() < 1e-10);
/// ```
pub fn apply_a(v: &VectorField) -> Result<VectorField> {
    let mu = v.domain().config().mu;
    let mut out = project(&v.laplacian())?.scale(Complex64::new(-mu, 0.0));
    out.axpy(Complex64::new(1.0, 0.0), &grad(&operator_q(v)?));
    Ok(if v.is_real() { out.enforce_real() } else { out })
}

/// `(μ/2) Σ ∫ Eᵢⱼ(v) conj(Eᵢⱼ(u))` with `E = ∇v + ∇vᵀ`.
pub fn dissipation_form(v: &VectorField, u: &VectorField) -> Complex64 {
    let mu = v.domain().config().mu;
    sym_grad(v).l2_inner(&sym_grad(u)) * (0.5 * mu)
}

/// `(μ/2) Σ ∫ |Dⱼvᵢ + Dᵢvⱼ|²`.
pub fn dissipation(v: &VectorField) -> f64 {
    dissipation_form(v, v).re
}

/// `⟨v, u⟩ = -λ (v, u) + (μ/2) Σ ∫ Eᵢⱼ(v) conj(Eᵢⱼ(u))`.
pub fn form_value(v: &VectorField, u: &VectorField, lambda: Complex64) -> Complex64 {
    -lambda * v.l2_inner(u) + dissipation_form(v, u)
}

/// Settings for the constrained trial space.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BasisOptions {
    /// Maximum polynomial degree of trial fields; `None` selects `n_r / 2`.
    pub degree: Option<usize>,
    /// Singular values below `rank_tol · σ_max` span the constrained space.
    pub rank_tol: f64,
}

impl Default for BasisOptions {
    fn default() -> Self {
        Self {
            degree: None,
            rank_tol: 1e-9,
        }
    }
}

impl BasisOptions {
    pub fn degree_for(&self, domain: &Domain) -> usize {
        self.degree.unwrap_or(domain.config().n_r / 2)
    }
}

/// The constrained space and reduced matrices of one angular-momentum group.
#[derive(Debug, Clone)]
pub struct GroupBlock {
    /// Total angular momentum `J`.
    pub j: i64,
    pub trials: Vec<Trial>,
    /// Trial-space coefficients of the basis, one column per basis field.
    pub basis: CMatrix,
    /// `(Aψⱼ, ψᵢ)` from the strong operator.
    pub a_block: CMatrix,
    /// Galerkin matrix of the form at `λ = 0`.
    pub g_block: CMatrix,
    /// `(ψⱼ, ψᵢ)`.
    pub m_block: CMatrix,
    /// Singular values of the constraint matrix, descending.
    pub singular_values: Vec<f64>,
    /// Largest constraint residual over basis columns, relative to `σ_max`.
    pub constraint_residual: f64,
}

impl GroupBlock {
    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }
}

/// Assembled operator blocks for axial mode `n`.
#[derive(Debug, Clone)]
pub struct ModeOperator {
    domain: Domain,
    n: i64,
    degree: usize,
    groups: Vec<GroupBlock>,
}

struct TrialData {
    strong: VectorField,
    sym: TensorField,
    field: VectorField,
    div_block: Vec<Complex64>,
    tangential: [Complex64; 2],
}

fn trial_data(domain: &Domain, n: i64, j: i64, t: &Trial) -> Result<TrialData> {
    let field = t.field(domain, n);
    let strong = apply_a(&field)?;
    let sym = sym_grad(&field);
    let d = div(&field);
    let div_block = d.mode(n, j).to_vec();
    let p = polar_traction(&field, None, n);
    let k = PolarTraction::index(domain.config().n_theta, j);
    Ok(TrialData {
        strong,
        sym,
        field,
        div_block,
        tangential: [p.s_theta[k], p.s_z[k]],
    })
}

/// Orthonormal basis of the numerical nullspace of `c`, with the singular values.
fn nullspace(c: &CMatrix, rank_tol: f64, n: i64, j: i64) -> Result<(CMatrix, Vec<f64>)> {
    let cols = c.ncols();
    let rows = c.nrows().max(cols);
    let mut padded = CMatrix::zeros(rows, cols);
    padded.view_mut((0, 0), (c.nrows(), cols)).copy_from(c);
    let svd = padded.svd(false, true);
    let v_t = svd.v_t.ok_or_else(|| Error::Factorization("SVD without right vectors".into()))?;
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));
    let sv: Vec<f64> = order.iter().map(|&i| svd.singular_values[i]).collect();
    let smax = sv.first().copied().unwrap_or(0.0);
    let tol = rank_tol * smax;
    let ambiguous: Vec<f64> = sv.iter().copied().filter(|&s| s >= tol && s < 1e3 * tol).collect();
    if !ambiguous.is_empty() {
        return Err(Error::RankAmbiguous {
            n,
            group: j,
            singular_values: ambiguous,
        });
    }
    let null: Vec<usize> = order.iter().copied().filter(|&i| svd.singular_values[i] < tol).collect();
    let mut basis = CMatrix::zeros(cols, null.len());
    for (col, &i) in null.iter().enumerate() {
        for r in 0..cols {
            basis[(r, col)] = v_t[(i, r)].conj();
        }
    }
    Ok((basis, sv))
}

/// Lower Cholesky factor of the radial Gram matrix of mode `m`.
fn gram_factor(domain: &Domain, m: i64) -> Result<DMatrix<f64>> {
    let g = domain.grid().gram(m).clone();
    g.cholesky()
        .map(|c| c.l())
        .ok_or_else(|| Error::Factorization(format!("radial Gram matrix of mode {m} is not positive definite")))
}

fn build_group(domain: &Domain, n: i64, j: i64, degree: usize, opts: BasisOptions) -> Result<Option<GroupBlock>> {
    let trials = trial::group_trials(domain, j, degree);
    if trials.is_empty() {
        return Ok(None);
    }
    let cfg = domain.config();
    let data: Vec<TrialData> = trials
        .iter()
        .map(|t| trial_data(domain, n, j, t))
        .collect::<Result<_>>()?;
    let nt = trials.len();
    let n_r = cfg.n_r;

    // constraint rows: ∇·v in an 𝐋²-isometric radial frame, then S_θ and S_z
    let l = gram_factor(domain, j)?;
    let div_scale = (2.0 * std::f64::consts::PI * cfg.ell).sqrt();
    let trace_scale = (2.0 * std::f64::consts::PI * cfg.kappa * cfg.ell).sqrt() / cfg.mu;
    let mut c = CMatrix::zeros(n_r + 2, nt);
    for (col, d) in data.iter().enumerate() {
        for row in 0..n_r {
            let mut s = Complex64::new(0.0, 0.0);
            for k in row..n_r {
                s += d.div_block[k] * l[(k, row)];
            }
            c[(row, col)] = s * div_scale;
        }
        c[(n_r, col)] = d.tangential[0] * trace_scale;
        c[(n_r + 1, col)] = d.tangential[1] * trace_scale;
    }
    let (null, singular_values) = nullspace(&c, opts.rank_tol, n, j)?;
    if null.ncols() == 0 {
        return Ok(None);
    }

    let mut a_trial = CMatrix::zeros(nt, nt);
    let mut g_trial = CMatrix::zeros(nt, nt);
    let mut m_trial = CMatrix::zeros(nt, nt);
    let half_mu = 0.5 * cfg.mu;
    for (q, dq) in data.iter().enumerate() {
        for (p, (tp, dp)) in trials.iter().zip(&data).enumerate() {
            a_trial[(p, q)] = tp.inner(domain, n, &dq.strong);
            g_trial[(p, q)] = dq.sym.l2_inner(&dp.sym) * half_mu;
            m_trial[(p, q)] = tp.inner(domain, n, &dq.field);
        }
    }

    // 𝐌-orthonormalise: B = N L^{-H} with NᴴMN = LLᴴ
    let mn = null.adjoint() * &m_trial * &null;
    let mn = (&mn + mn.adjoint()) * Complex64::new(0.5, 0.0);
    let chol = mn
        .cholesky()
        .ok_or_else(|| Error::Factorization(format!("mass matrix of group {j} at n = {n}")))?;
    let l_inv_h = chol
        .l()
        .adjoint()
        .try_inverse()
        .ok_or_else(|| Error::Factorization(format!("mass factor of group {j} at n = {n}")))?;
    let basis = &null * l_inv_h;

    let smax = singular_values.first().copied().unwrap_or(1.0).max(f64::MIN_POSITIVE);
    let residual = (&c * &basis)
        .column_iter()
        .map(|col| col.norm())
        .fold(0.0, f64::max)
        / smax;

    let reduce = |m: &CMatrix| basis.adjoint() * m * &basis;
    Ok(Some(GroupBlock {
        j,
        trials,
        a_block: reduce(&a_trial),
        g_block: reduce(&g_trial),
        m_block: reduce(&m_trial),
        basis,
        singular_values,
        constraint_residual: residual,
    }))
}

impl ModeOperator {
    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn n(&self) -> i64 {
        self.n
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn groups(&self) -> &[GroupBlock] {
        &self.groups
    }

    pub fn group(&self, j: i64) -> Option<&GroupBlock> {
        self.groups.iter().find(|g| g.j == j)
    }

    pub fn dim(&self) -> usize {
        self.groups.iter().map(GroupBlock::dim).sum()
    }

    fn block_diag(&self, pick: impl Fn(&GroupBlock) -> &CMatrix) -> CMatrix {
        let dim = self.dim();
        let mut out = CMatrix::zeros(dim, dim);
        let mut o = 0;
        for g in &self.groups {
            let b = pick(g);
            out.view_mut((o, o), (b.nrows(), b.ncols())).copy_from(b);
            o += b.nrows();
        }
        out
    }

    /// Strong operator matrix on the whole mode (block diagonal over groups).
    pub fn a_block(&self) -> CMatrix {
        self.block_diag(|g| &g.a_block)
    }

    pub fn g_block(&self) -> CMatrix {
        self.block_diag(|g| &g.g_block)
    }

    pub fn m_block(&self) -> CMatrix {
        self.block_diag(|g| &g.m_block)
    }

    /// Reduced matrix of `⟨·,·⟩` at `λ`: `G - λM`.
    pub fn form_block(&self, lambda: Complex64) -> CMatrix {
        let mut f = self.g_block();
        f -= self.m_block() * lambda;
        f
    }

    /// `‖A_block‖_F`.
    pub fn a_norm(&self) -> f64 {
        self.groups.iter().map(|g| g.a_block.norm_squared()).sum::<f64>().sqrt()
    }

    /// `‖A_block - G_block‖_F / ‖G_block‖_F`.
    pub fn assembly_mismatch(&self) -> f64 {
        let (mut diff, mut norm) = (0.0, 0.0);
        for g in &self.groups {
            diff += (&g.a_block - &g.g_block).norm_squared();
            norm += g.g_block.norm_squared();
        }
        if norm == 0.0 {
            0.0
        } else {
            (diff / norm).sqrt()
        }
    }

    /// Largest relative constraint residual over all basis columns.
    pub fn constraint_residual(&self) -> f64 {
        self.groups.iter().map(|g| g.constraint_residual).fold(0.0, f64::max)
    }

    /// Column offset of each group in the mode-wide numbering.
    pub fn offsets(&self) -> Vec<usize> {
        let mut o = 0;
        self.groups
            .iter()
            .map(|g| {
                let s = o;
                o += g.dim();
                s
            })
            .collect()
    }

    /// Field of the group-local coefficient vector `x`.
    pub fn synthesize_group(&self, group: &GroupBlock, x: &DVector<Complex64>) -> VectorField {
        let coeffs = &group.basis * x;
        let mut v = VectorField::zeros(&self.domain);
        for (t, c) in group.trials.iter().zip(coeffs.iter()) {
            t.add_to(&mut v, self.n, *c);
        }
        v.into_complex()
    }

    /// Field of the mode-wide coefficient vector `x`.
    pub fn synthesize(&self, x: &DVector<Complex64>) -> VectorField {
        let mut v = VectorField::zeros(&self.domain);
        for (g, o) in self.groups.iter().zip(self.offsets()) {
            let coeffs = &g.basis * x.rows(o, g.dim());
            for (t, c) in g.trials.iter().zip(coeffs.iter()) {
                t.add_to(&mut v, self.n, *c);
            }
        }
        v.into_complex()
    }

    /// Basis field number `idx` in the mode-wide numbering.
    pub fn basis_field(&self, idx: usize) -> VectorField {
        let mut x = DVector::zeros(self.dim());
        x[idx] = Complex64::new(1.0, 0.0);
        self.synthesize(&x)
    }

    /// Group-local coefficients `(v, ψᵢ)_{𝐋²}`: the 𝐋²-orthogonal projection
    /// onto the constrained space.
    pub fn coefficients_group(&self, group: &GroupBlock, v: &VectorField) -> DVector<Complex64> {
        let t: DVector<Complex64> =
            DVector::from_iterator(group.trials.len(), group.trials.iter().map(|t| t.inner(&self.domain, self.n, v)));
        group.basis.adjoint() * t
    }

    /// Mode-wide coefficients `(v, ψᵢ)_{𝐋²}`.
    pub fn coefficients(&self, v: &VectorField) -> DVector<Complex64> {
        let mut x = DVector::zeros(self.dim());
        for (g, o) in self.groups.iter().zip(self.offsets()) {
            x.rows_mut(o, g.dim()).copy_from(&self.coefficients_group(g, v));
        }
        x
    }

    /// Relative distance of `v` from the constrained space,
    /// `‖v - Πv‖ / ‖v‖` with `Π` the 𝐋²-orthogonal projection.
    pub fn membership_defect(&self, v: &VectorField) -> f64 {
        let Ok(vn) = v.restrict_axial(self.n) else {
            return 0.0;
        };
        let norm = vn.l2_norm();
        if norm == 0.0 {
            return 0.0;
        }
        (&vn - &self.synthesize(&self.coefficients(v))).l2_norm() / norm
    }
}

/// The constrained basis (as a full [`ModeOperator`]) for axial mode `n`.
pub fn build_constrained_basis(domain: &Domain, n: i64) -> Result<ModeOperator> {
    assemble_a_with(domain, n, BasisOptions::default())
}

/// Assembles all groups of axial mode `n` with default options.
pub fn assemble_a(domain: &Domain, n: i64) -> Result<ModeOperator> {
    assemble_a_with(domain, n, BasisOptions::default())
}

/// Assembles all groups of axial mode `n`; fails if the strong and weak
/// matrices disagree by more than [`ASSEMBLY_TOLERANCE`].
pub fn assemble_a_with(domain: &Domain, n: i64, opts: BasisOptions) -> Result<ModeOperator> {
    domain.axial_index(n)?;
    let degree = opts.degree_for(domain);
    if degree == 0 || 2 * degree + 2 > 2 * domain.config().n_r {
        return Err(Error::InvalidArgument(format!(
            "trial degree {degree} must lie in 1..={} for n_r = {}",
            domain.config().n_r - 1,
            domain.config().n_r
        )));
    }
    let jmax = domain.config().n_theta as i64 - 1;
    let groups: Vec<Option<GroupBlock>> = (-jmax..=jmax)
        .into_par_iter()
        .map(|j| build_group(domain, n, j, degree, opts))
        .collect::<Result<_>>()?;
    let op = ModeOperator {
        domain: domain.clone(),
        n,
        degree,
        groups: groups.into_iter().flatten().collect(),
    };
    let mismatch = op.assembly_mismatch();
    if !(mismatch < ASSEMBLY_TOLERANCE) {
        return Err(Error::AssemblyMismatch { n, relative: mismatch });
    }
    Ok(op)
}

/// Assembled operators for a set of axial modes.
#[derive(Debug, Clone)]
pub struct OperatorSet {
    domain: Domain,
    ops: BTreeMap<i64, ModeOperator>,
}

impl OperatorSet {
    /// Assembles every mode in `modes` (duplicates are built once).
    pub fn build(domain: &Domain, modes: impl IntoIterator<Item = i64>, opts: BasisOptions) -> Result<Self> {
        let mut ops = BTreeMap::new();
        for n in modes {
            if !ops.contains_key(&n) {
                ops.insert(n, assemble_a_with(domain, n, opts)?);
            }
        }
        Ok(Self {
            domain: domain.clone(),
            ops,
        })
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    /// The operators of `modes` only, copied from this set.
    pub fn subset(&self, modes: impl IntoIterator<Item = i64>) -> Result<Self> {
        let mut ops = BTreeMap::new();
        for n in modes {
            ops.insert(n, self.get(n)?.clone());
        }
        Ok(Self {
            domain: self.domain.clone(),
            ops,
        })
    }

    pub fn get(&self, n: i64) -> Result<&ModeOperator> {
        self.ops
            .get(&n)
            .ok_or_else(|| Error::InvalidArgument(format!("no operator assembled for axial mode {n}")))
    }

    pub fn modes(&self) -> impl Iterator<Item = i64> + '_ {
        self.ops.keys().copied()
    }

    /// Operators in ascending mode order.
    pub fn iter(&self) -> impl Iterator<Item = &ModeOperator> {
        self.ops.values()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fieldspace::{BandLimit, DomainConfig};
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;
    use std::f64::consts::PI;
    use std::sync::OnceLock;

    fn domain() -> &'static Domain {
        static D: OnceLock<Domain> = OnceLock::new();
        D.get_or_init(|| Domain::new(DomainConfig::new(0.5, 2.0 * PI, 1.0, 16, 6, 2)).unwrap())
    }

    fn mode(n: i64) -> &'static ModeOperator {
        static OPS: OnceLock<Vec<ModeOperator>> = OnceLock::new();
        let ops = OPS.get_or_init(|| (0..=2).map(|n| assemble_a(domain(), n).unwrap()).collect());
        &ops[n as usize]
    }

    #[test]
    fn rigid_motions_lie_in_the_mode_zero_space() {
        let d = domain();
        let op = mode(0);
        for v in [
            VectorField::constant(d, [1.0, 0.0, 0.0]),
            VectorField::constant(d, [0.0, 1.0, 0.0]),
            VectorField::constant(d, [0.0, 0.0, 1.0]),
            VectorField::rigid_rotation(d),
        ] {
            assert!(op.membership_defect(&v) < 1e-10);
            // second-derivative matrices leave round-off of order 1e-10 on linear fields
            let av = apply_a(&v).unwrap();
            assert!(av.max_abs() < 1e-9, "{:e}", av.max_abs());
        }
    }

    #[test]
    fn basis_satisfies_constraints() {
        for n in 0..=2 {
            let op = mode(n);
            assert!(op.constraint_residual() < 1e-10, "n = {n}");
            for idx in (0..op.dim()).step_by(7) {
                let v = op.basis_field(idx);
                let scale = crate::fieldspace::norm_hkp(&v, crate::fieldspace::SobolevIndex(1)).unwrap();
                assert!(div(&v).l2_norm() < 1e-10 * scale);
                assert!(tangential_traction(&v).l2_norm() < 1e-10 * scale);
                assert!((v.l2_norm() - 1.0).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn strong_and_weak_assembly_agree() {
        for n in 0..=2 {
            let op = mode(n);
            assert!(op.assembly_mismatch() < 1e-10, "n = {n}: {:e}", op.assembly_mismatch());
            let m = op.m_block();
            let eye = CMatrix::identity(op.dim(), op.dim());
            assert!((&m - &eye).norm() < 1e-10);
            let g = op.g_block();
            assert!((&g - g.adjoint()).norm() < 1e-12 * g.norm());
        }
    }

    #[test]
    fn form_block_matches_form_value() {
        let op = mode(1);
        let lambda = Complex64::new(-0.3, 1.1);
        let f = op.form_block(lambda);
        let (a, b) = (3, 11);
        let (va, vb) = (op.basis_field(a), op.basis_field(b));
        let direct = form_value(&vb, &va, lambda);
        assert!((direct - f[(a, b)]).norm() < 1e-10 * f.norm());
    }

    #[test]
    fn form_examples() {
        let d = domain();
        let rot = VectorField::rigid_rotation(d);
        assert!(form_value(&rot, &rot, Complex64::new(0.0, 0.0)).norm() < 1e-20);
        let mut rng = ChaCha20Rng::seed_from_u64(4);
        let v = VectorField::random_smooth(d, &mut rng, BandLimit::new(2, 4, 6), true);
        let v = v.scale(Complex64::new(1.0 / v.l2_norm(), 0.0));
        let f0 = form_value(&v, &v, Complex64::new(0.0, 0.0));
        assert!(f0.re >= 0.0 && f0.im.abs() < 1e-12 * f0.re);
        let fi = form_value(&v, &v, Complex64::new(0.0, 1.0));
        assert!(fi.norm() >= std::f64::consts::FRAC_1_SQRT_2);
    }

    #[test]
    fn apply_a_keeps_axial_band() {
        let op = mode(2);
        let v = op.basis_field(5);
        let av = apply_a(&v).unwrap();
        assert_eq!(av.axial_band(), vec![2]);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]

        #[test]
        fn dissipative_on_constrained_fields(seed in any::<u64>(), n in 0i64..=2) {
            let op = mode(n);
            let mut rng = ChaCha20Rng::seed_from_u64(seed);
            let x = DVector::from_fn(op.dim(), |_, _| {
                use rand_distr::{Distribution, StandardNormal};
                Complex64::new(StandardNormal.sample(&mut rng), StandardNormal.sample(&mut rng))
            });
            let q = (x.adjoint() * op.a_block() * &x)[(0, 0)];
            prop_assert!(q.re >= -1e-10 * x.norm_squared());
            let u = op.synthesize(&x);
            let direct = apply_a(&u).unwrap().l2_inner(&u);
            prop_assert!((direct - q).norm() < 1e-9 * q.norm().max(1.0));
        }

        #[test]
        fn hermitian_form_is_positive_semidefinite(n in 0i64..=2) {
            let g = mode(n).g_block();
            let h = (&g + g.adjoint()) * Complex64::new(0.5, 0.0);
            let eig = h.symmetric_eigenvalues();
            let scale = g.norm();
            prop_assert!(eig.iter().all(|&e| e >= -1e-10 * scale));
        }
    }
}
