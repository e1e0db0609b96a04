//! The declarative run configuration (TOML). Every key has a default, so an
//! empty file is a valid configuration; unknown keys are rejected.

use crate::error::{Error, Result};
use crate::evolution::{EvolutionConfig, Scheme};
use crate::fieldspace::DomainConfig;
use crate::spectral::SweepOptions;
use crate::stokesop::BasisOptions;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::path::{Path, PathBuf};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    /// Seed of every randomized quantity.
    pub seed: u64,
    pub output_dir: PathBuf,
    pub domain: DomainSection,
    pub solve_mode: SolveModeSection,
    pub project: ProjectSection,
    pub spectral: SpectralSection,
    pub sweep: SweepSection,
    pub evolution: EvolutionSection,
    pub suite: SuiteSection,
    pub tolerances: Tolerances,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            seed: 20240611,
            output_dir: PathBuf::from("out"),
            domain: DomainSection::default(),
            solve_mode: SolveModeSection::default(),
            project: ProjectSection::default(),
            spectral: SpectralSection::default(),
            sweep: SweepSection::default(),
            evolution: EvolutionSection::default(),
            suite: SuiteSection::default(),
            tolerances: Tolerances::default(),
        }
    }
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: RunConfig =
            toml::from_str(text).map_err(|e| Error::InvalidConfig(format!("config: {}", e.message())))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::InvalidConfig(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("run configuration serializes")
    }

    pub fn validate(&self) -> Result<()> {
        let domain = self.domain.config();
        domain.validate()?;
        let bad = |msg: String| Err(Error::InvalidConfig(msg));
        let n_z = domain.n_z as i64;
        let check_modes = |what: &str, modes: &[i64]| {
            if modes.is_empty() {
                return bad(format!("{what}: at least one axial mode is required"));
            }
            match modes.iter().find(|n| n.abs() > n_z) {
                Some(n) => bad(format!("{what}: axial mode {n} outside |n| <= {n_z}")),
                None => Ok(()),
            }
        };
        check_modes("spectral.modes", &self.spectral.modes)?;
        check_modes("sweep.modes", &self.sweep.modes)?;
        check_modes("evolution.mode", &[self.evolution.mode])?;
        if self.sweep.rays.is_empty() || self.sweep.rays.iter().any(|r| r.t.is_empty()) {
            return bad("sweep: at least one ray with at least one t is required".into());
        }
        if let Some(l) = self.sweep.lambdas().into_iter().find(|l| l.norm() < self.sweep.epsilon) {
            return bad(format!(
                "sweep: |λ| = {:.3} at λ = {l} is below epsilon = {}",
                l.norm(),
                self.sweep.epsilon
            ));
        }
        if let Some(l) = self.suite.resolvent_lambdas.iter().find(|l| l[0].hypot(l[1]) < self.sweep.epsilon) {
            return bad(format!("suite.resolvent_lambdas: |λ| below epsilon at {l:?}"));
        }
        self.evolution.config().validate().map_err(|e| Error::InvalidConfig(format!("evolution: {e}")))?;
        if !(self.evolution.homogeneous_dt > 0.0) {
            return bad("evolution.homogeneous_dt must be positive".into());
        }
        Ok(())
    }
}

/// Domain parameters; `quad_order` defaults to `2·n_r`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DomainSection {
    pub kappa: f64,
    pub ell: f64,
    pub mu: f64,
    pub n_r: usize,
    pub n_theta: usize,
    pub n_z: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub quad_order: Option<usize>,
}

impl Default for DomainSection {
    fn default() -> Self {
        Self {
            kappa: 0.5,
            ell: 2.0 * PI,
            mu: 1.0,
            n_r: 32,
            n_theta: 8,
            n_z: 8,
            quad_order: None,
        }
    }
}

impl DomainSection {
    pub fn config(&self) -> DomainConfig {
        let mut c = DomainConfig::new(self.kappa, self.ell, self.mu, self.n_r, self.n_theta, self.n_z);
        if let Some(q) = self.quad_order {
            c.quad_order = q;
        }
        c
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolveModeSection {
    /// Scalar FieldFile with the right-hand side; without it the closed-form
    /// Bessel example is solved.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub input: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ProjectSection {
    /// Vector FieldFile to project; without it a seeded random field is used.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub input: Option<PathBuf>,
    /// Polynomial degree of the random field.
    pub max_degree: usize,
}

impl Default for ProjectSection {
    fn default() -> Self {
        Self {
            input: None,
            max_degree: 10,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SpectralSection {
    pub modes: Vec<i64>,
    /// Eigenvalues reported per mode.
    pub count: usize,
    /// Slack of the sector test.
    pub tolerance: f64,
    /// Kernel threshold relative to `‖A_block‖_F`.
    pub kernel_tol: f64,
    /// Trial polynomial degree; defaults to `n_r / 2`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub degree: Option<usize>,
    pub rank_tol: f64,
    /// Also write `A_block`, `G_block` and `M_block` of every mode as matrix files.
    pub export_blocks: bool,
}

impl Default for SpectralSection {
    fn default() -> Self {
        Self {
            modes: (0..=8).collect(),
            count: 20,
            tolerance: 1e-8,
            kernel_tol: 1e-10,
            degree: None,
            rank_tol: 1e-9,
            export_blocks: false,
        }
    }
}

impl SpectralSection {
    pub fn basis(&self) -> BasisOptions {
        BasisOptions {
            degree: self.degree,
            rank_tol: self.rank_tol,
        }
    }
}

/// `λ = t·(direction[0] + i·direction[1])` for each `t`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Ray {
    pub direction: [f64; 2],
    pub t: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepSection {
    /// Axial modes carrying the random right-hand sides.
    pub modes: Vec<i64>,
    pub rays: Vec<Ray>,
    pub samples: usize,
    pub epsilon: f64,
    pub tolerance: f64,
    pub max_degree: usize,
    /// Allowed slack on the fitted `H²ₚ` growth exponent (target 0).
    pub growth_slack: f64,
}

impl Default for SweepSection {
    fn default() -> Self {
        Self {
            modes: vec![0, 1, 2],
            rays: vec![
                Ray {
                    direction: [0.0, 1.0],
                    t: vec![1.0, 2.0, 4.0, 8.0],
                },
                Ray {
                    direction: [-1.0, 2.0],
                    t: (1..=8).map(f64::from).collect(),
                },
            ],
            samples: 10,
            epsilon: 0.5,
            tolerance: 1e-8,
            max_degree: 8,
            growth_slack: 0.1,
        }
    }
}

impl SweepSection {
    /// All `λ`, ray by ray in file order.
    pub fn lambdas(&self) -> Vec<Complex64> {
        self.rays
            .iter()
            .flat_map(|r| {
                let d = Complex64::new(r.direction[0], r.direction[1]);
                r.t.iter().map(move |&t| d * t)
            })
            .collect()
    }

    pub fn options(&self) -> SweepOptions {
        SweepOptions {
            samples: self.samples,
            epsilon: self.epsilon,
            tolerance: self.tolerance,
            max_degree: self.max_degree,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EvolutionSection {
    pub scheme: Scheme,
    pub t_final: f64,
    pub dt: f64,
    /// Axial mode of the manufactured forcing `(1 - e^{-t}) g`.
    pub mode: i64,
    /// Write every `k`-th velocity as a FieldFile; 0 disables snapshots.
    pub snapshot_stride: usize,
    /// Steps and step size of the homogeneous (semigroup) runs.
    pub homogeneous_steps: usize,
    pub homogeneous_dt: f64,
}

impl Default for EvolutionSection {
    fn default() -> Self {
        Self {
            scheme: Scheme::CrankNicolson,
            t_final: 1.0,
            dt: 0.05,
            mode: 1,
            snapshot_stride: 0,
            homogeneous_steps: 100,
            homogeneous_dt: 0.01,
        }
    }
}

impl EvolutionSection {
    pub fn config(&self) -> EvolutionConfig {
        EvolutionConfig {
            t_final: self.t_final,
            dt: self.dt,
            scheme: self.scheme,
        }
    }
}

/// Sample counts of the acceptance suite.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SuiteSection {
    pub projector_samples: usize,
    pub potential_samples: usize,
    pub resolvent_samples: usize,
    pub contraction_runs: usize,
    /// Points `[re, im]` of the resolvent bound check.
    pub resolvent_lambdas: Vec<[f64; 2]>,
    /// Grid sizes of the solver refinement study.
    pub refinement_n_r: Vec<usize>,
}

impl Default for SuiteSection {
    fn default() -> Self {
        Self {
            projector_samples: 50,
            potential_samples: 20,
            resolvent_samples: 10,
            contraction_runs: 20,
            resolvent_lambdas: vec![[0.0, 1.0], [0.0, 2.0], [0.0, 4.0], [0.0, 8.0], [-1.0, 2.0], [-2.0, 4.0]],
            refinement_n_r: vec![4, 8, 16, 32, 64],
        }
    }
}

/// Thresholds of the acceptance criteria.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    /// `‖Δu - f‖ / ‖f‖` accepted by `solve-mode`.
    pub solve_residual: f64,
    pub bessel_error: f64,
    pub refinement_factor: f64,
    /// Errors below this count as the round-off plateau.
    pub plateau: f64,
    pub projector: f64,
    pub kernel_rayleigh: f64,
    pub sector: f64,
    pub resolvent: f64,
    pub assembly: f64,
    pub contraction: f64,
    pub steady_state: f64,
    pub energy_identity: f64,
    /// Allowed factor when `T` doubles.
    pub estimate_t_factor: f64,
    /// Allowed relative change when `dt` halves.
    pub estimate_dt_change: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            solve_residual: 1e-8,
            bessel_error: 1e-8,
            refinement_factor: 10.0,
            plateau: 1e-12,
            projector: 1e-10,
            kernel_rayleigh: 1e-10,
            sector: 1e-8,
            resolvent: 1e-8,
            assembly: 1e-8,
            contraction: 1e-12,
            steady_state: 1e-12,
            energy_identity: 1e-8,
            estimate_t_factor: 2.0,
            estimate_dt_change: 0.1,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_file_gives_defaults() {
        let cfg = RunConfig::from_toml("").unwrap();
        assert_eq!(cfg, RunConfig::default());
        assert_eq!(cfg.domain.config(), DomainConfig::default());
        assert_eq!(cfg.sweep.lambdas().len(), 12);
    }

    #[test]
    fn round_trip_through_toml() {
        let mut cfg = RunConfig::default();
        cfg.evolution.scheme = Scheme::ImplicitEuler;
        cfg.domain.quad_order = Some(70);
        let back = RunConfig::from_toml(&cfg.to_toml()).unwrap();
        assert_eq!(back, cfg);
    }

    #[test]
    fn rejections() {
        assert!(RunConfig::from_toml("bogus = 1").is_err());
        assert!(RunConfig::from_toml("[domain]\nradius = 2.0").is_err());
        assert!(RunConfig::from_toml("[domain]\nkappa = 1.5").is_err());
        assert!(RunConfig::from_toml("[spectral]\nmodes = [9]").is_err());
        let small = "[[sweep.rays]]\ndirection = [0.0, 1.0]\nt = [0.25]";
        let err = RunConfig::from_toml(small).unwrap_err().to_string();
        assert!(err.contains("epsilon"), "{err}");
        assert!(RunConfig::from_toml("[evolution]\ndt = -1.0").is_err());
        assert!(RunConfig::from_toml("[evolution]\nscheme = \"leapfrog\"").is_err());
    }
}
