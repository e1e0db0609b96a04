//! Time integration of `v̇ + Av = Pf`, `v(0) = 0`, on the constrained space.
//!
//! The state is kept as basis coefficients per axial mode. Each step solves
//! `(M + θ dt A) x_{k+1} = (M - (1-θ) dt A) x_k + dt b`, with `θ = 1` for
//! implicit Euler and `θ = ½` for Crank–Nicolson, block by block over
//! angular-momentum groups. The right-hand side holds `bᵢ = (f, ψᵢ)`, which
//! equals `(Pf, ψᵢ)` because gradients of potentials vanishing on `S_F` are
//! orthogonal to the constrained space.
//!
//! The pressure follows from `∇q = μΔv + Av + f - Pf` as `q = Qv + φ` with
//! `Δφ = ∇·f`, `φ = 0` on `S_F`.

use crate::diskspec::solve_dirichlet;
use crate::error::{Error, Result};
use crate::fieldspace::{div, grad, norm_hkp, trace_sf, ScalarField, SobolevIndex, VectorField};
use crate::helmholtz::{operator_q, project};
use crate::stokesop::{apply_a, OperatorSet};
use nalgebra::{DMatrix, DVector, LU};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};
use std::io::Write;

type CVector = DVector<Complex64>;
type CMatrix = DMatrix<Complex64>;

/// Stated with every estimate report: the time norms are integer-order surrogates.
pub const SURROGATE_NOTE: &str = "K2 surrogate: L2-in-time of the spatial H2p norm plus \
L2-in-time of first time differences of the L2 norm; integer-order stand-in for the fractional norm";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scheme {
    ImplicitEuler,
    CrankNicolson,
}

impl Scheme {
    fn theta(self) -> f64 {
        match self {
            Scheme::ImplicitEuler => 1.0,
            Scheme::CrankNicolson => 0.5,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvolutionConfig {
    pub t_final: f64,
    pub dt: f64,
    pub scheme: Scheme,
}

impl EvolutionConfig {
    pub fn validate(&self) -> Result<usize> {
        if !(self.dt > 0.0) || !self.dt.is_finite() {
            return Err(Error::InvalidArgument(format!("dt must be positive, got {}", self.dt)));
        }
        if !(self.t_final >= self.dt) || !self.t_final.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "t_final = {} must be at least dt = {}",
                self.t_final, self.dt
            )));
        }
        Ok((self.t_final / self.dt).round() as usize)
    }
}

/// One row of `energy.csv`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnergyRow {
    pub t: f64,
    /// `‖v‖²_{𝐋²}`.
    pub l2_norm_sq: f64,
    /// `(μ/2) Σ ∫ |Dⱼvᵢ + Dᵢvⱼ|²`.
    pub dissipation: f64,
    /// Largest normwise backward error of the step's block solves.
    pub residual: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct EnergyTrace {
    pub rows: Vec<EnergyRow>,
    /// Crank–Nicolson only: per step, the relative defect of
    /// `(‖x_{k+1}‖² - ‖x_k‖²)/dt + 2·dissipation(x_mid) - 2 Re (b_mid, x_mid)`.
    pub energy_identity: Vec<f64>,
    pub warnings: Vec<String>,
}

impl EnergyTrace {
    /// `energy.csv`: `t, l2_norm_sq, dissipation, residual`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        for r in &self.rows {
            w.serialize(r)?;
        }
        w.flush()?;
        Ok(())
    }

    /// Whether `‖v‖²` never grows by more than `slack` between rows.
    pub fn is_non_increasing(&self, slack: f64) -> bool {
        self.rows
            .windows(2)
            .all(|w| w[1].l2_norm_sq.sqrt() <= w[0].l2_norm_sq.sqrt() + slack)
    }

    pub fn max_residual(&self) -> f64 {
        self.rows.iter().map(|r| r.residual).fold(0.0, f64::max)
    }
}

/// Coefficients per axial mode, in the order of [`OperatorSet::iter`].
pub type ModalState = Vec<CVector>;

#[derive(Debug, Clone)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<ModalState>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// The velocity at step `k`.
    pub fn field(&self, ops: &OperatorSet, k: usize) -> VectorField {
        synthesize(ops, &self.states[k])
    }
}

/// The field with modal coefficients `x`.
pub fn synthesize(ops: &OperatorSet, x: &ModalState) -> VectorField {
    let mut v = VectorField::zeros(ops.domain()).into_complex();
    for (op, xn) in ops.iter().zip(x) {
        v.axpy(Complex64::new(1.0, 0.0), &op.synthesize(xn));
    }
    v
}

/// `(v, ψᵢ)` per mode; fails if `v` has axial modes without an operator.
pub fn coefficients(ops: &OperatorSet, v: &VectorField) -> Result<ModalState> {
    for n in v.axial_band() {
        ops.get(n)?;
    }
    Ok(ops.iter().map(|op| op.coefficients(v)).collect())
}

/// A random state with independent standard normal coefficients.
pub fn random_state<R: Rng + ?Sized>(ops: &OperatorSet, rng: &mut R) -> ModalState {
    ops.iter()
        .map(|op| {
            CVector::from_fn(op.dim(), |_, _| {
                Complex64::new(StandardNormal.sample(rng), StandardNormal.sample(rng))
            })
        })
        .collect()
}

struct Block {
    offset: usize,
    m: CMatrix,
    g: CMatrix,
    lhs: CMatrix,
    lu: LU<Complex64, nalgebra::Dyn, nalgebra::Dyn>,
}

/// Step matrices per group. The operator is the Galerkin matrix of the form,
/// which equals `A_block` to round-off (checked at assembly) but is built from
/// first derivatives only, so kernel vectors stay steady to a tighter tolerance.
fn blocks(ops: &OperatorSet, dt: f64, theta: f64) -> Vec<Vec<Block>> {
    ops.iter()
        .map(|op| {
            op.groups()
                .iter()
                .zip(op.offsets())
                .map(|(g, offset)| {
                    let lhs = &g.m_block + &g.g_block * Complex64::new(theta * dt, 0.0);
                    Block {
                        offset,
                        m: g.m_block.clone(),
                        g: g.g_block.clone(),
                        lu: lhs.clone().lu(),
                        lhs,
                    }
                })
                .collect()
        })
        .collect()
}

fn quad(x: &CVector, m: &CMatrix, y: &CVector) -> Complex64 {
    x.dotc(&(m * y))
}

struct Stepper {
    config: EvolutionConfig,
    blocks: Vec<Vec<Block>>,
}

impl Stepper {
    fn energy(&self, t: f64, x: &ModalState, residual: f64) -> EnergyRow {
        let (mut l2, mut diss) = (0.0, 0.0);
        for (bs, xn) in self.blocks.iter().zip(x) {
            for b in bs {
                let xb = xn.rows(b.offset, b.m.nrows()).into_owned();
                l2 += quad(&xb, &b.m, &xb).re;
                diss += quad(&xb, &b.g, &xb).re;
            }
        }
        EnergyRow {
            t,
            l2_norm_sq: l2,
            dissipation: diss,
            residual,
        }
    }

    /// One step from `x` with loads `b0` (at `t_k`) and `b1` (at `t_{k+1}`).
    /// Returns the new state, the solve residual and the energy-identity defect.
    fn step(&self, x: &ModalState, b0: &ModalState, b1: &ModalState) -> Result<(ModalState, f64, f64)> {
        let EvolutionConfig { dt, scheme, .. } = self.config;
        let theta = scheme.theta();
        let mut out = Vec::with_capacity(x.len());
        let mut residual = 0.0f64;
        let (mut lhs_id, mut scale) = (0.0, 0.0);
        for (((bs, xn), l0), l1) in self.blocks.iter().zip(x).zip(b0).zip(b1) {
            let mut next = CVector::zeros(xn.len());
            for b in bs {
                let k = b.m.nrows();
                let xb = xn.rows(b.offset, k).into_owned();
                let load = l0.rows(b.offset, k) * Complex64::new((1.0 - theta) * dt, 0.0)
                    + l1.rows(b.offset, k) * Complex64::new(theta * dt, 0.0);
                let rhs = &b.m * &xb - &b.g * &xb * Complex64::new((1.0 - theta) * dt, 0.0) + load;
                let y = b
                    .lu
                    .solve(&rhs)
                    .ok_or_else(|| Error::Factorization(format!("time-step block at offset {}", b.offset)))?;
                let denom = b.lhs.norm() * y.norm() + rhs.norm();
                if denom > 0.0 {
                    residual = residual.max((&b.lhs * &y - &rhs).norm() / denom);
                }
                if scheme == Scheme::CrankNicolson {
                    let mid = (&xb + &y) * Complex64::new(0.5, 0.0);
                    let bmid = (l0.rows(b.offset, k) + l1.rows(b.offset, k)) * Complex64::new(0.5, 0.0);
                    let de = (quad(&y, &b.m, &y).re - quad(&xb, &b.m, &xb).re) / dt;
                    let diss = 2.0 * quad(&mid, &b.g, &mid).re;
                    let work = 2.0 * bmid.dotc(&mid).re;
                    lhs_id += de + diss - work;
                    scale += (quad(&y, &b.m, &y).re + quad(&xb, &b.m, &xb).re) / dt
                        + diss.abs()
                        + 2.0 * bmid.norm() * mid.norm();
                }
                next.rows_mut(b.offset, k).copy_from(&y);
            }
            out.push(next);
        }
        let defect = if scale > 0.0 { lhs_id.abs() / scale } else { 0.0 };
        Ok((out, residual, defect))
    }
}

fn run(
    ops: &OperatorSet,
    config: EvolutionConfig,
    x0: ModalState,
    load: &dyn Fn(f64) -> Result<ModalState>,
) -> Result<(Trajectory, EnergyTrace)> {
    let steps = config.validate()?;
    let stepper = Stepper {
        config,
        blocks: blocks(ops, config.dt, config.scheme.theta()),
    };
    let mut trace = EnergyTrace::default();
    let mut traj = Trajectory {
        times: vec![0.0],
        states: vec![x0.clone()],
    };
    trace.rows.push(stepper.energy(0.0, &x0, 0.0));
    let mut x = x0;
    let mut b0 = load(0.0)?;
    for k in 1..=steps {
        let t = k as f64 * config.dt;
        let b1 = load(t)?;
        let (next, residual, defect) = stepper.step(&x, &b0, &b1)?;
        trace.rows.push(stepper.energy(t, &next, residual));
        if config.scheme == Scheme::CrankNicolson {
            trace.energy_identity.push(defect);
        }
        traj.times.push(t);
        traj.states.push(next.clone());
        x = next;
        b0 = b1;
    }
    Ok((traj, trace))
}

/// Tolerance on `‖Pf(0)‖ / ‖f‖` before a warning is recorded.
pub const INITIAL_FORCING_TOLERANCE: f64 = 1e-10;

/// `v̇ + Av = Pf`, `v(0) = 0`.
pub fn evolve(
    ops: &OperatorSet,
    config: EvolutionConfig,
    forcing: &dyn Fn(f64) -> VectorField,
) -> Result<(Trajectory, EnergyTrace)> {
    let x0: ModalState = ops.iter().map(|op| CVector::zeros(op.dim())).collect();
    let load = |t: f64| coefficients(ops, &forcing(t));
    let f0 = forcing(0.0);
    let b0 = load(0.0)?;
    let pf0: f64 = b0.iter().map(|b| b.norm_squared()).sum::<f64>().sqrt();
    let (traj, mut trace) = run(ops, config, x0, &load)?;
    let scale = f0.l2_norm().max(1.0);
    if pf0 > INITIAL_FORCING_TOLERANCE * scale {
        trace
            .warnings
            .push(format!("forcing violates Pf(0) = 0: ‖Pf(0)‖ = {pf0:e}"));
    }
    Ok((traj, trace))
}

/// `v̇ + Av = 0` from `v(0) = x0` (semigroup diagnostics).
pub fn evolve_homogeneous(ops: &OperatorSet, config: EvolutionConfig, x0: ModalState) -> Result<(Trajectory, EnergyTrace)> {
    if x0.len() != ops.iter().count() || x0.iter().zip(ops.iter()).any(|(x, op)| x.len() != op.dim()) {
        return Err(Error::DimensionMismatch {
            expected: ops.iter().map(|op| op.dim()).sum(),
            found: x0.iter().map(|x| x.len()).sum(),
        });
    }
    let zero: ModalState = ops.iter().map(|op| CVector::zeros(op.dim())).collect();
    run(ops, config, x0, &|_| Ok(zero.clone()))
}

/// `q = Qv + φ` with `Δφ = ∇·f`, `φ = 0` on `S_F`.
pub fn recover_pressure(v: &VectorField, f: &VectorField) -> Result<ScalarField> {
    let mut q = operator_q(v)?;
    q.axpy(Complex64::new(1.0, 0.0), &solve_dirichlet(&div(f))?);
    Ok(q)
}

/// Relative defect of `∇q = μΔv + Av + f - Pf`.
pub fn pressure_residual(v: &VectorField, f: &VectorField, q: &ScalarField) -> Result<f64> {
    let mu = v.domain().config().mu;
    let mut rhs = v.laplacian().scale(Complex64::new(mu, 0.0));
    rhs.axpy(Complex64::new(1.0, 0.0), &apply_a(v)?);
    rhs.axpy(Complex64::new(1.0, 0.0), f);
    rhs.axpy(Complex64::new(-1.0, 0.0), &project(f)?);
    let gq = grad(q);
    let scale = gq.l2_norm().max(rhs.l2_norm());
    Ok(if scale == 0.0 { 0.0 } else { (&gq - &rhs).l2_norm() / scale })
}

/// The terms of the discrete solution estimate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurrogateTerms {
    /// `(Σ dt ‖v_k‖²_{H²ₚ})^{1/2}`.
    pub h2_in_time: f64,
    /// `(Σ dt ‖(v_k - v_{k-1})/dt‖²_{𝐋²})^{1/2}`.
    pub time_difference: f64,
    /// `‖∇q‖_{L²L²}`.
    pub grad_pressure: f64,
    /// `‖q|_{S_F}‖_{L²L²}`.
    pub surface_pressure: f64,
    /// `‖f‖_{L²L²}`.
    pub forcing: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateReport {
    /// `(h2_in_time + time_difference + grad_pressure + surface_pressure) / forcing`.
    pub ratio: f64,
    pub surrogate_terms: SurrogateTerms,
    #[serde(rename = "T")]
    pub t_final: f64,
    pub dt: f64,
    pub surrogate: String,
}

/// Pressures along a trajectory.
pub fn pressures(ops: &OperatorSet, traj: &Trajectory, forcing: &dyn Fn(f64) -> VectorField) -> Result<Vec<ScalarField>> {
    (0..traj.len())
        .map(|k| recover_pressure(&traj.field(ops, k), &forcing(traj.times[k])))
        .collect()
}

/// Discrete surrogate of `(‖v‖ + ‖∇q‖ + ‖q|_{S_F}‖) / ‖f‖`, with every time
/// integral taken by the right-endpoint rule over steps `1..=N`.
pub fn estimate_report(
    ops: &OperatorSet,
    traj: &Trajectory,
    pressures: &[ScalarField],
    forcing: &dyn Fn(f64) -> VectorField,
) -> Result<EstimateReport> {
    if pressures.len() != traj.len() {
        return Err(Error::DimensionMismatch {
            expected: traj.len(),
            found: pressures.len(),
        });
    }
    if traj.len() < 2 {
        return Err(Error::InvalidArgument("estimate needs at least one time step".into()));
    }
    let dt = traj.times[1] - traj.times[0];
    let mut sums = [0.0f64; 5];
    let mut prev = traj.field(ops, 0);
    for k in 1..traj.len() {
        let v = traj.field(ops, k);
        let q = &pressures[k];
        sums[0] += dt * norm_hkp(&v, SobolevIndex(2))?.powi(2);
        sums[1] += dt * ((&v - &prev).l2_norm() / dt).powi(2);
        sums[2] += dt * grad(q).l2_norm().powi(2);
        sums[3] += dt * trace_sf(q).l2_norm().powi(2);
        sums[4] += dt * forcing(traj.times[k]).l2_norm().powi(2);
        prev = v;
    }
    let [h2, td, gq, sq, f] = sums.map(f64::sqrt);
    let ratio = if f == 0.0 { 0.0 } else { (h2 + td + gq + sq) / f };
    Ok(EstimateReport {
        ratio,
        surrogate_terms: SurrogateTerms {
            h2_in_time: h2,
            time_difference: td,
            grad_pressure: gq,
            surface_pressure: sq,
            forcing: f,
        },
        t_final: *traj.times.last().unwrap(),
        dt,
        surrogate: SURROGATE_NOTE.into(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fieldspace::{BandLimit, Domain, DomainConfig};
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
            OperatorSet::build(&d, [0, 1], BasisOptions::default()).unwrap()
        })
    }

    fn cfg(scheme: Scheme, t_final: f64, dt: f64) -> EvolutionConfig {
        EvolutionConfig { t_final, dt, scheme }
    }

    fn smooth_forcing(ops: &OperatorSet) -> impl Fn(f64) -> VectorField + '_ {
        let mut rng = ChaCha20Rng::seed_from_u64(17);
        let g = crate::spectral::random_forcing(ops, &mut rng, 6)
            .restrict_axial(1)
            .unwrap();
        move |t| g.scale(Complex64::new(1.0 - (-t).exp(), 0.0))
    }

    #[test]
    fn invalid_configs() {
        assert!(cfg(Scheme::ImplicitEuler, 1.0, 0.0).validate().is_err());
        assert!(cfg(Scheme::ImplicitEuler, 0.01, 0.1).validate().is_err());
        assert_eq!(cfg(Scheme::CrankNicolson, 1.0, 0.1).validate().unwrap(), 10);
    }

    #[test]
    fn zero_forcing_gives_zero() {
        let ops = ops();
        let zero = VectorField::zeros(ops.domain());
        let (traj, trace) = evolve(ops, cfg(Scheme::CrankNicolson, 0.5, 0.1), &|_| zero.clone()).unwrap();
        assert!(traj.states.iter().flatten().all(|x| x.norm() == 0.0));
        assert!(trace.rows.iter().all(|r| r.l2_norm_sq == 0.0));
        assert!(trace.warnings.is_empty());
    }

    #[test]
    fn constants_are_steady() {
        let ops = ops();
        let c = VectorField::constant(ops.domain(), [0.4, -1.0, 0.7]);
        let x0 = coefficients(ops, &c).unwrap();
        for scheme in [Scheme::ImplicitEuler, Scheme::CrankNicolson] {
            let (traj, trace) = evolve_homogeneous(ops, cfg(scheme, 1.0, 0.01), x0.clone()).unwrap();
            let last = traj.field(ops, traj.len() - 1);
            assert!((&last - &c).max_abs() < 1e-12, "{scheme:?}");
            let n0 = trace.rows[0].l2_norm_sq;
            let drift = trace.rows.iter().map(|r| (r.l2_norm_sq - n0).abs()).fold(0.0, f64::max);
            assert!(drift < 1e-12 * n0, "{scheme:?}: {drift:e} of {n0}");
        }
    }

    #[test]
    fn crank_nicolson_energy_identity_under_forcing() {
        let ops = ops();
        let f = smooth_forcing(ops);
        let (_, trace) = evolve(ops, cfg(Scheme::CrankNicolson, 1.0, 0.05), &f).unwrap();
        assert!(trace.energy_identity.iter().all(|&d| d < 1e-8));
        assert!(trace.max_residual() < 1e-10);
        assert!(trace.warnings.is_empty());
        let mut buf = Vec::new();
        trace.write_csv(&mut buf).unwrap();
        assert!(String::from_utf8(buf).unwrap().starts_with("t,l2_norm_sq,dissipation,residual\n"));
    }

    #[test]
    fn nonzero_initial_forcing_is_warned() {
        let ops = ops();
        let c = VectorField::constant(ops.domain(), [1.0, 0.0, 0.0]);
        let (_, trace) = evolve(ops, cfg(Scheme::ImplicitEuler, 0.1, 0.05), &|_| c.clone()).unwrap();
        assert_eq!(trace.warnings.len(), 1);
    }

    #[test]
    fn out_of_set_forcing_is_rejected() {
        let ops = ops();
        let d = ops.domain();
        let mut rng = ChaCha20Rng::seed_from_u64(2);
        let g = VectorField::random_smooth(d, &mut rng, BandLimit::new(2, 3, 4), false)
            .restrict_axial(2)
            .unwrap();
        assert!(evolve(ops, cfg(Scheme::ImplicitEuler, 0.1, 0.05), &|_| g.clone()).is_err());
    }

    /// Manufactured `x(t) = sin t · x̂` inside the space: `f = cos t ψ + sin t Aψ`.
    fn manufactured_error(scheme: Scheme, dt: f64) -> f64 {
        let ops = ops();
        let op = ops.get(1).unwrap();
        let mut rng = ChaCha20Rng::seed_from_u64(8);
        let xhat = random_state(ops, &mut rng)[1].clone();
        let xhat = &xhat / Complex64::new(xhat.norm(), 0.0);
        let psi = op.synthesize(&xhat);
        let a_psi = op.synthesize(&(op.a_block() * &xhat));
        let f = |t: f64| {
            let mut v = psi.scale(Complex64::new(t.cos(), 0.0));
            v.axpy(Complex64::new(t.sin(), 0.0), &a_psi);
            v
        };
        let (traj, _) = evolve(ops, cfg(scheme, 1.0, dt), &f).unwrap();
        let last = traj.states.last().unwrap();
        (&last[1] - &xhat * Complex64::new(1.0f64.sin(), 0.0)).norm()
    }

    #[test]
    fn energy_decays_at_twice_the_dissipation() {
        let ops = ops();
        let op = ops.get(1).unwrap();
        let mut v0 = VectorField::zeros(ops.domain()).into_complex();
        for (_, v) in crate::spectral::eigenfields(op, 3) {
            v0.axpy(Complex64::new(1.0, 0.0), &v);
        }
        let x0 = coefficients(ops, &v0).unwrap();
        let dt = 1e-3;
        let (_, trace) = evolve_homogeneous(ops, cfg(Scheme::CrankNicolson, 0.01, dt), x0).unwrap();
        let r = &trace.rows;
        let slope = (r[1].l2_norm_sq - r[0].l2_norm_sq) / dt;
        let diss = 0.5 * (r[0].dissipation + r[1].dissipation);
        assert!((slope + 2.0 * diss).abs() < 1e-2 * diss);
    }

    #[test]
    fn temporal_convergence_orders() {
        for (scheme, order) in [(Scheme::ImplicitEuler, 1.0), (Scheme::CrankNicolson, 2.0)] {
            let e1 = manufactured_error(scheme, 0.02);
            let e2 = manufactured_error(scheme, 0.01);
            let observed = (e1 / e2).log2();
            assert!((observed - order).abs() < 0.2, "{scheme:?}: {observed}");
        }
    }

    #[test]
    fn pressure_examples() {
        let ops = ops();
        let d = ops.domain();
        let zero = VectorField::zeros(d);
        assert_eq!(recover_pressure(&zero, &zero).unwrap().max_abs(), 0.0);
        let rot = VectorField::rigid_rotation(d);
        assert!(recover_pressure(&rot, &zero).unwrap().max_abs() < 1e-10);
        // f = ∇ψ with ψ zero on S_F: q = Qv + ψ
        let mut rng = ChaCha20Rng::seed_from_u64(3);
        let psi = ScalarField::random_smooth(d, &mut rng, BandLimit::new(1, 3, 4), true).mul_radial(|r| r * r - 0.25);
        let f = grad(&psi);
        let v = ops.get(1).unwrap().basis_field(4);
        let q = recover_pressure(&v, &f).unwrap();
        let mut expect = operator_q(&v).unwrap();
        expect.axpy(Complex64::new(1.0, 0.0), &psi);
        assert!((&q - &expect).max_abs() < 1e-10 * expect.max_abs());
        assert!(pressure_residual(&v, &f, &q).unwrap() < 1e-8);
        assert!((&trace_sf(&q) - &trace_sf(&operator_q(&v).unwrap())).max_abs() < 1e-10 * expect.max_abs());
    }

    #[test]
    fn estimate_is_stable() {
        let ops = ops();
        let f = smooth_forcing(ops);
        let ratio = |t_final: f64, dt: f64| {
            let (traj, _) = evolve(ops, cfg(Scheme::CrankNicolson, t_final, dt), &f).unwrap();
            let p = pressures(ops, &traj, &f).unwrap();
            estimate_report(ops, &traj, &p, &f).unwrap().ratio
        };
        let base = ratio(1.0, 0.1);
        assert!(base.is_finite() && base > 0.0);
        let long = ratio(2.0, 0.1);
        let fine = ratio(1.0, 0.05);
        assert!(long / base < 2.0 && base / long < 2.0);
        assert!((fine / base - 1.0).abs() < 0.1);

        let zero = VectorField::zeros(ops.domain());
        let z = |_: f64| zero.clone();
        let (traj, _) = evolve(ops, cfg(Scheme::ImplicitEuler, 0.2, 0.1), &z).unwrap();
        let p = pressures(ops, &traj, &z).unwrap();
        let report = estimate_report(ops, &traj, &p, &z).unwrap();
        assert_eq!(report.ratio, 0.0);
        let json = serde_json::to_value(&report).unwrap();
        assert!(json.get("T").is_some() && json.get("surrogate_terms").is_some());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(10))]

        #[test]
        fn implicit_euler_contracts(seed in any::<u64>()) {
            let ops = ops();
            let mut rng = ChaCha20Rng::seed_from_u64(seed);
            let x0 = random_state(ops, &mut rng);
            let (_, trace) = evolve_homogeneous(ops, cfg(Scheme::ImplicitEuler, 0.5, 0.01), x0).unwrap();
            prop_assert!(trace.is_non_increasing(1e-12));
            // exact for implicit Euler: Δ‖x‖²/dt = -2·dissipation(x_{k+1}) - dt‖Δx/dt‖²
            for w in trace.rows.windows(2) {
                let slope = (w[1].l2_norm_sq - w[0].l2_norm_sq) / 0.01;
                prop_assert!(slope + 2.0 * w[1].dissipation <= 1e-9 * (w[0].l2_norm_sq / 0.01));
            }
        }
    }
}
