//! Fractional operators on the line and half-lines, their lattice counterparts and checks.

pub mod continuum;
pub mod discrete;
pub mod grid;
pub mod jet;
pub mod presets;
pub mod quad;
pub mod sobolev;
pub mod testfn;

pub use continuum::{
    frac_derivative_at_origin, frac_laplacian, frac_laplacian_truncated, regional_dominating_bound, regional_frac_laplacian,
    regional_star, FracDerivative,
};
pub use discrete::{
    discrete_cross_apply, discrete_generator_apply, discrete_regional_apply, operator_convergence_report, robin_boundary_sum,
    tightness_aux_sum, ConvergenceReport, ConvergenceRow, OperatorVariant, RobinBoundarySum,
};
pub use grid::GridFunction;
pub use jet::Jet;
pub use sobolev::{ibp_residual, lattice_seminorm, sobolev_seminorm, IbpResidual, Interval, Seminorm};
pub use testfn::{Affine, Bump, Gaussian, Plateau, Product, Profile, Sum, TestClass, TestFunction, Zero};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FracOpsError {
    #[error("test-function class: {0}")]
    Class(String),
    #[error("domain: {0}")]
    Domain(String),
    #[error("extrapolation did not converge: {0}")]
    NoLimit(String),
    #[error(transparent)]
    Kernel(#[from] crate::kernel::KernelError),
}
