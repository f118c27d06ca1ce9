//! Exact small-system checks of the generator, Monte-Carlo versus limit-equation comparisons,
//! crossing-current scaling and seminorm structure of solutions.

pub mod crossing;
pub mod energy;
pub mod hydro;
pub mod small;

pub use crossing::{crossing_scaling_check, window_crossing_sum, CrossingPoint, CrossingReport, CrossingSeries, CrossingSetup};
pub use energy::{integrated_lattice_seminorm, seminorm_finiteness_check, SeminormReport, SeminormRow};
pub use hydro::{hydro_compare, CompareSetup, ComparisonReport, ComparisonRow, ComparisonSummary};
pub use small::{
    detailed_balance_check, dirichlet_form, generator_quadratic_form, moving_particle_check, moving_particle_terms,
    random_density,
    DirichletForm, MovingParticleReport, SmallSystem,
};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum VerifyError {
    #[error("domain: {0}")]
    Domain(String),
    #[error(transparent)]
    Process(#[from] crate::process::ProcessError),
    #[error(transparent)]
    Pde(#[from] crate::pde::PdeError),
    #[error(transparent)]
    FracOps(#[from] crate::fracops::FracOpsError),
    #[error(transparent)]
    Kernel(#[from] crate::kernel::KernelError),
}

/// Least-squares slope of `ln y` against `ln x`, with its standard error.
pub fn log_log_slope(x: &[f64], y: &[f64]) -> Option<(f64, f64)> {
    if x.len() != y.len() || x.len() < 2 || x.iter().chain(y).any(|v| !(*v > 0.0 && v.is_finite())) {
        return None;
    }
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let k = lx.len() as f64;
    let (mx, my) = (lx.iter().sum::<f64>() / k, ly.iter().sum::<f64>() / k);
    let sxx: f64 = lx.iter().map(|a| (a - mx).powi(2)).sum();
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    if sxx == 0.0 {
        return None;
    }
    let slope = sxy / sxx;
    let resid: f64 = lx.iter().zip(&ly).map(|(a, b)| (b - my - slope * (a - mx)).powi(2)).sum();
    let se = if lx.len() > 2 { (resid / (k - 2.0) / sxx).sqrt() } else { 0.0 };
    Some((slope, se))
}

/// Mean and 95% normal half-width `1.96·s/√R`, summed in index order.
pub fn mean_and_ci(samples: &[f64]) -> (f64, f64) {
    let r = samples.len() as f64;
    if samples.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let mean = samples.iter().sum::<f64>() / r;
    if samples.len() < 2 {
        return (mean, f64::INFINITY);
    }
    let var = samples.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (r - 1.0);
    (mean, 1.96 * (var / r).sqrt())
}
