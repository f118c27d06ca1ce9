//! Limit equations: regime table, lattice-ODE solver, weak residuals and boundary diagnostics.

pub mod checks;
pub mod profile;
pub mod regime;
pub mod solver;
pub mod weak;

pub use checks::{
    boundary_condition_check, continuity_at_origin_check, energy_increase, half_line_leakage, leakage_bound, mass_drift,
    BoundaryDiagnostics,
};
pub use profile::InitialProfile;
pub use regime::{classify_regime, Equation, RegimeSpec};
pub use solver::{
    periodic_kernel, solve_hydro, uniform_times, Boundary, HydroSolution, LatticeOperator, SolverOptions, SolverScalar,
};
pub use weak::{boundary_traces, weak_residual, WeakResidual, WeakVariant};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PdeError {
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("domain: {0}")]
    Domain(String),
    #[error("regime mismatch: {0}")]
    Regime(String),
    #[error("step {dt} exceeds the monotone limit; try {suggested}")]
    Cfl { dt: f64, suggested: f64 },
    #[error(transparent)]
    FracOps(#[from] crate::fracops::FracOpsError),
    #[error(transparent)]
    Process(#[from] crate::process::ProcessError),
    #[error(transparent)]
    Kernel(#[from] crate::kernel::KernelError),
}
