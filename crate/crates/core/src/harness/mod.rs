//! Command drivers, the acceptance suite and report files.
//!
//! Every command computes first and writes all of its files at the end, so a
//! failed run leaves no partial outputs behind. Randomness is drawn from
//! ChaCha20 streams keyed by `(seed, stream id)`, which makes outputs
//! byte-identical for identical configurations.

pub mod config;
mod suite;

pub use config::RunConfig;
pub use suite::{run_suite, verify_all, CriterionResult, VerifyReport};

use crate::diskspec::{bessel_example, solve_dirichlet, solve_mode_dirichlet};
use crate::error::{Error, Result};
use crate::evolution::{estimate_report, evolve, pressures, EstimateReport};
use crate::fieldspace::{
    div, read_field_file, trace_sf, write_field_file, BandLimit, Domain, StoredField, VectorField,
};
use crate::helmholtz::{project, project_p};
use crate::spectral::{growth_exponent, random_forcing, resolvent_sweep, spectrum, write_sweep_csv};
use crate::stokesop::{write_matrix, OperatorSet};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use serde::Serialize;
use std::fs;
use std::path::{Path, PathBuf};

/// Random stream ids, one per consumer.
pub(crate) mod stream {
    pub const PROJECT: u64 = 1;
    pub const FORCING: u64 = 2;
    pub const SWEEP: u64 = 3;
    pub const PROJECTOR_SUITE: u64 = 11;
    pub const RESOLVENT_SUITE: u64 = 12;
    pub const CONTRACTION_SUITE: u64 = 13;
}

pub(crate) fn rng(seed: u64, stream: u64) -> ChaCha20Rng {
    let mut r = ChaCha20Rng::seed_from_u64(seed);
    r.set_stream(stream);
    r
}

/// Wraps an error with the module and the check that produced it.
pub(crate) fn tagged<T>(module: &'static str, criterion: &str, r: Result<T>) -> Result<T> {
    r.map_err(|e| match e {
        e @ Error::Criterion { .. } => e,
        e => Error::Criterion {
            module,
            criterion: criterion.to_string(),
            message: e.to_string(),
        },
    })
}

/// A file to be written in the finalization phase.
enum Output {
    Text(PathBuf, String),
    Field(PathBuf, StoredField),
    Matrix(PathBuf, String, i64, nalgebra::DMatrix<Complex64>),
}

/// Writes all outputs into `dir` and returns their paths.
fn finalize(dir: &Path, outputs: Vec<Output>) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let mut written = Vec::with_capacity(outputs.len());
    for o in outputs {
        let path = match o {
            Output::Text(rel, text) => {
                let p = dir.join(rel);
                if let Some(parent) = p.parent() {
                    fs::create_dir_all(parent)?;
                }
                fs::write(&p, text)?;
                p
            }
            Output::Field(rel, f) => {
                let p = dir.join(rel);
                if let Some(parent) = p.parent() {
                    fs::create_dir_all(parent)?;
                }
                write_field_file(&p, &f)?;
                p
            }
            Output::Matrix(rel, name, n, m) => {
                let p = dir.join(rel);
                if let Some(parent) = p.parent() {
                    fs::create_dir_all(parent)?;
                }
                write_matrix(&p, &name, n, &m, false)?;
                p
            }
        };
        written.push(path);
    }
    Ok(written)
}

fn json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

fn csv_text(write: impl FnOnce(&mut Vec<u8>) -> Result<()>) -> Result<String> {
    let mut buf = Vec::new();
    write(&mut buf)?;
    String::from_utf8(buf).map_err(|e| Error::Format(e.to_string()))
}

/// Summary of one command run.
#[derive(Debug, Clone)]
pub struct CommandOutcome {
    pub files: Vec<PathBuf>,
    /// One-line human summary.
    pub summary: String,
}

fn domain_of(cfg: &RunConfig) -> Result<Domain> {
    Domain::new(cfg.domain.config())
}

/// The manufactured forcing `(1 - e^{-t}) g` with a seeded random `g` in
/// axial mode `cfg.evolution.mode`. It vanishes at `t = 0`.
pub fn manufactured_forcing(cfg: &RunConfig, ops: &OperatorSet) -> Result<impl Fn(f64) -> VectorField + Send + Sync> {
    let mode = cfg.evolution.mode;
    let one = ops.subset([mode])?;
    let mut r = rng(cfg.seed, stream::FORCING);
    let g = random_forcing(&one, &mut r, 6);
    Ok(move |t: f64| g.scale(Complex64::new(1.0 - (-t).exp(), 0.0)))
}

#[derive(Serialize)]
struct SolveModeReport {
    source: String,
    /// `‖Δu - f‖ / ‖f‖`.
    laplacian_residual: f64,
    /// `max |u|` on `S_F`.
    surface_trace: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    relative_error: Option<f64>,
}

/// Solves `Δu = f`, `u = 0` on `S_F`, for a stored `f` or the closed-form example.
pub fn cmd_solve_mode(cfg: &RunConfig, out: &Path) -> Result<CommandOutcome> {
    tagged("diskspec", "solve-mode", (|| {
        let (f, u, source, relative_error) = match &cfg.solve_mode.input {
            Some(path) => {
                let StoredField::Scalar(f) = read_field_file(path)? else {
                    return Err(Error::Format(format!("{} holds a vector field, expected a scalar", path.display())));
                };
                let u = solve_dirichlet(&f)?;
                (f, u, path.display().to_string(), None)
            }
            None => {
                let domain = domain_of(cfg)?;
                let (f, exact) = bessel_example(&domain)?;
                let u = solve_mode_dirichlet(1, &f)?;
                let err = (&u - &exact).l2_norm() / exact.l2_norm();
                (f, u, "bessel-example".to_string(), Some(err))
            }
        };
        let fnorm = f.l2_norm();
        let residual = if fnorm == 0.0 { 0.0 } else { (&u.laplacian() - &f).l2_norm() / fnorm };
        let report = SolveModeReport {
            source,
            laplacian_residual: residual,
            surface_trace: trace_sf(&u).max_abs(),
            relative_error,
        };
        let summary = format!(
            "solve-mode: ‖Δu - f‖/‖f‖ = {residual:.3e}{}",
            relative_error.map_or(String::new(), |e| format!(", closed-form error {e:.3e}"))
        );
        if !(residual <= cfg.tolerances.solve_residual) {
            return Err(Error::Residual {
                context: "Dirichlet solve".into(),
                residual,
                tolerance: cfg.tolerances.solve_residual,
            });
        }
        let files = finalize(
            out,
            vec![
                Output::Field("solution.json".into(), u.into()),
                Output::Text("solve_mode.json".into(), json(&report)?),
            ],
        )?;
        Ok(CommandOutcome { files, summary })
    })())
}

#[derive(Serialize)]
struct ProjectReport {
    source: String,
    /// `‖∇·Pu‖ / ‖∇·u‖`.
    divergence_residual: f64,
    /// `‖P(Pu) - Pu‖ / ‖u‖`.
    idempotence: f64,
    /// `|(Pu, u - Pu)| / ‖u‖²`.
    orthogonality: f64,
    /// `max |q|` on `S_F`.
    potential_trace: f64,
}

/// Helmholtz decomposition of a stored or random field.
pub fn cmd_project(cfg: &RunConfig, out: &Path) -> Result<CommandOutcome> {
    tagged("helmholtz", "project", (|| {
        let (u, source) = match &cfg.project.input {
            Some(path) => {
                let StoredField::Vector(u) = read_field_file(path)? else {
                    return Err(Error::Format(format!("{} holds a scalar field, expected a vector", path.display())));
                };
                (u, path.display().to_string())
            }
            None => {
                let domain = domain_of(cfg)?;
                let c = domain.config();
                let band = BandLimit::new(c.n_z, c.n_theta.saturating_sub(2), cfg.project.max_degree);
                let mut r = rng(cfg.seed, stream::PROJECT);
                (VectorField::random_smooth(&domain, &mut r, band, true), "random".to_string())
            }
        };
        let d = project_p(&u)?;
        let un = u.l2_norm().max(f64::MIN_POSITIVE);
        let pu = &d.solenoidal;
        let report = ProjectReport {
            source,
            divergence_residual: d.residual,
            idempotence: (&project(pu)? - pu).l2_norm() / un,
            orthogonality: pu.l2_inner(&(&u - pu)).norm() / (un * un),
            potential_trace: trace_sf(&d.potential).max_abs(),
        };
        let summary = format!(
            "project: ‖∇·Pu‖/‖∇·u‖ = {:.3e}, idempotence {:.3e}, ‖∇·Pu‖ = {:.3e}",
            report.divergence_residual,
            report.idempotence,
            div(pu).l2_norm()
        );
        let files = finalize(
            out,
            vec![
                Output::Field("projected.json".into(), d.solenoidal.into()),
                Output::Field("potential.json".into(), d.potential.into()),
                Output::Text("project.json".into(), json(&report)?),
            ],
        )?;
        Ok(CommandOutcome { files, summary })
    })())
}

#[derive(Serialize)]
struct SpectrumSummary {
    modes: Vec<i64>,
    dims: Vec<usize>,
    kernel_dim: Option<usize>,
    /// The multiplicity of the eigenvalue 0 stated in the source, for comparison.
    stated_kernel_multiplicity: usize,
    all_in_sector: bool,
    max_residual: f64,
    max_assembly_mismatch: f64,
}

/// `eigenvalues.csv` plus a JSON summary; optionally the reduced blocks.
pub fn cmd_spectrum(cfg: &RunConfig, out: &Path) -> Result<CommandOutcome> {
    let (outputs, summary, ok) = tagged("spectral", "spectrum", (|| {
        let domain = domain_of(cfg)?;
        let ops = OperatorSet::build(&domain, cfg.spectral.modes.iter().copied(), cfg.spectral.basis())?;
        let sp = &cfg.spectral;
        let report = spectrum(&ops, sp.count, sp.tolerance, sp.kernel_tol);
        let s = SpectrumSummary {
            modes: ops.modes().collect(),
            dims: ops.iter().map(|o| o.dim()).collect(),
            kernel_dim: report.kernel_dim,
            stated_kernel_multiplicity: 1,
            all_in_sector: report.all_in_sector(),
            max_residual: report.max_residual(),
            max_assembly_mismatch: ops.iter().map(|o| o.assembly_mismatch()).fold(0.0, f64::max),
        };
        let mut outputs = vec![
            Output::Text("eigenvalues.csv".into(), csv_text(|b| report.write_csv(b))?),
            Output::Text("spectrum.json".into(), json(&s)?),
        ];
        if sp.export_blocks {
            for op in ops.iter() {
                let n = op.n();
                for (name, m) in [("A_block", op.a_block()), ("G_block", op.g_block()), ("M_block", op.m_block())] {
                    outputs.push(Output::Matrix(format!("blocks/{name}_n{n}.json").into(), name.into(), n, m));
                }
            }
        }
        let summary = format!(
            "spectrum: {} eigenvalues, kernel dimension {}, all in sector: {}",
            report.entries.len(),
            s.kernel_dim.map_or("n/a".into(), |k| k.to_string()),
            s.all_in_sector
        );
        Ok((outputs, summary, s.all_in_sector))
    })())?;
    let files = finalize(out, outputs)?;
    if !ok {
        return Err(Error::Criterion {
            module: "spectral",
            criterion: "sector containment".into(),
            message: format!("eigenvalue outside the sector; see {}", out.join("eigenvalues.csv").display()),
        });
    }
    Ok(CommandOutcome { files, summary })
}

#[derive(Serialize)]
struct SweepSummary {
    growth_exponent: Option<f64>,
    growth_target: f64,
    all_bound_ok: bool,
}

/// `resolvent_sweep.csv` plus the fitted `H²ₚ` growth exponent.
pub fn cmd_resolvent_sweep(cfg: &RunConfig, out: &Path) -> Result<CommandOutcome> {
    let (outputs, summary, ok) = tagged("spectral", "resolvent-sweep", (|| {
        let domain = domain_of(cfg)?;
        let ops = OperatorSet::build(&domain, cfg.sweep.modes.iter().copied(), cfg.spectral.basis())?;
        let mut r = rng(cfg.seed, stream::SWEEP);
        let samples = resolvent_sweep(&ops, &cfg.sweep.lambdas(), cfg.sweep.options(), &mut r)?;
        let growth = growth_exponent(&samples);
        let s = SweepSummary {
            growth_exponent: growth,
            growth_target: cfg.sweep.growth_slack,
            all_bound_ok: samples.iter().all(|s| s.bound_ok),
        };
        let ok = s.all_bound_ok && growth.is_none_or(|g| g <= cfg.sweep.growth_slack);
        let summary = format!(
            "resolvent-sweep: {} samples, all bounds hold: {}, growth exponent {}",
            samples.len(),
            s.all_bound_ok,
            growth.map_or("n/a".into(), |g| format!("{g:.3}"))
        );
        let outputs = vec![
            Output::Text("resolvent_sweep.csv".into(), csv_text(|b| write_sweep_csv(&samples, b))?),
            Output::Text("resolvent_sweep.json".into(), json(&s)?),
        ];
        Ok((outputs, summary, ok))
    })())?;
    let files = finalize(out, outputs)?;
    if !ok {
        return Err(Error::Criterion {
            module: "spectral",
            criterion: "resolvent bound".into(),
            message: format!("bound or growth target violated; see {}", out.join("resolvent_sweep.csv").display()),
        });
    }
    Ok(CommandOutcome { files, summary })
}

/// Runs the forced problem: `energy.csv`, `estimate.json` and optional snapshots.
pub fn cmd_evolve(cfg: &RunConfig, out: &Path) -> Result<CommandOutcome> {
    tagged("evolution", "evolve", (|| {
        let domain = domain_of(cfg)?;
        let ops = OperatorSet::build(&domain, [cfg.evolution.mode], cfg.spectral.basis())?;
        let f = manufactured_forcing(cfg, &ops)?;
        let (traj, trace) = evolve(&ops, cfg.evolution.config(), &f)?;
        let p = pressures(&ops, &traj, &f)?;
        let estimate: EstimateReport = estimate_report(&ops, &traj, &p, &f)?;
        let mut outputs = vec![
            Output::Text("energy.csv".into(), csv_text(|b| trace.write_csv(b))?),
            Output::Text("estimate.json".into(), json(&estimate)?),
        ];
        let stride = cfg.evolution.snapshot_stride;
        if stride > 0 {
            for k in (0..traj.len()).step_by(stride) {
                outputs.push(Output::Field(
                    format!("snapshots/v_{k:05}.json").into(),
                    traj.field(&ops, k).into(),
                ));
            }
        }
        for w in &trace.warnings {
            eprintln!("warning: {w}");
        }
        let summary = format!(
            "evolve: {} steps, final ‖v‖² = {:.6e}, estimate ratio {:.6e}",
            traj.len() - 1,
            trace.rows.last().map_or(0.0, |r| r.l2_norm_sq),
            estimate.ratio
        );
        let files = finalize(out, outputs)?;
        Ok(CommandOutcome { files, summary })
    })())
}

/// Runs the acceptance suite and writes `verify_report.json`; fails if any
/// criterion fails.
pub fn cmd_verify_all(cfg: &RunConfig, out: &Path) -> Result<CommandOutcome> {
    let report = verify_all(cfg)?;
    let files = finalize(out, vec![Output::Text("verify_report.json".into(), report.to_json()?)])?;
    let failed = report.failed();
    let summary = report.summary_lines().join("\n");
    if !failed.is_empty() {
        return Err(Error::Criterion {
            module: "harness",
            criterion: failed.join(", "),
            message: format!("{summary}\nsee {}", out.join("verify_report.json").display()),
        });
    }
    Ok(CommandOutcome { files, summary })
}
