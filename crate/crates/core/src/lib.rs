//! Spectral realization of the Stokes operator for a free liquid jet on a
//! periodic cylinder.
//!
//! - [`fieldspace`]: grids, fields, derivatives, norms and field files.
//! - [`diskspec`]: the Dirichlet solver on the cross-section, mode by mode.
//! - [`helmholtz`]: the projection `P` and the pressure operator `Q`.
//! - [`stokesop`]: the constrained Galerkin basis and the reduced operator.
//! - [`spectral`]: eigenvalues, resolvent solves and sweeps.
//! - [`evolution`]: implicit Euler and Crank–Nicolson time stepping.
//! - [`harness`]: run configuration, commands and the acceptance suite.

pub mod diskspec;
pub mod error;
pub mod evolution;
pub mod fieldspace;
pub mod harness;
pub mod helmholtz;
pub mod spectral;
pub mod stokesop;

pub use error::{Error, Result};
pub use fieldspace::{Domain, DomainConfig, ScalarField, TensorField, TraceField, VectorField};

// The book's code listings run as doctests, one module per chapter.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/fields.md")]
    mod fields {}
    #[doc = include_str!("../../../book/src/disk-solver.md")]
    mod disk_solver {}
    #[doc = include_str!("../../../book/src/helmholtz.md")]
    mod helmholtz {}
    #[doc = include_str!("../../../book/src/stokes-operator.md")]
    mod stokes_operator {}
    #[doc = include_str!("../../../book/src/spectrum.md")]
    mod spectrum {}
    #[doc = include_str!("../../../book/src/evolution.md")]
    mod evolution {}
    #[doc = include_str!("../../../book/src/harness.md")]
    mod harness {}
}
