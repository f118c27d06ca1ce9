//! Long-jump symmetric exclusion process with a slow barrier at the origin.
//!
//! * [`kernel`]: the jump law `p(z) = c_γ|z|^{-γ-1}`, its constants and sampler.
//! * [`process`]: configurations, barrier rates and the event-driven simulator.
//! * [`fracops`]: fractional and regional fractional Laplacians, their lattice versions,
//!   Sobolev seminorms and the operator-convergence checks.
//! * [`pde`]: regime classification, the mean-field lattice ODE and weak-form residuals.
//! * [`verify`]: exact small-system checks and Monte-Carlo versus PDE comparisons.

pub mod fracops;
pub mod kernel;
pub mod pde;
pub mod process;
pub mod scalar;
pub mod streams;
pub mod verify;

pub use kernel::{JumpKernel, KernelLaw};
pub use scalar::Scalar;

use serde::{Deserialize, Serialize};

/// Half-line selector: `Left` is `(-∞, 0)`, `Right` is `[0, ∞)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
}

/// `TestFunction<f64>`.
pub type TestFunction64 = fracops::TestFunction<f64>;
