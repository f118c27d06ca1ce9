//! Exclusion dynamics on a finite window: states, slow bonds, simulation and observables.

pub mod barrier;
pub mod config;
pub mod io;
pub mod observe;
pub mod sim;

pub use barrier::{BarrierKind, BarrierSpec, SlowSet};
pub use config::{Configuration, Window};
pub use observe::{block_average, empirical_pairing, sample_initial};
pub use sim::{simulate, transition_rate, window_truncation_bound, Proposal, SimOptions, Simulator, TrajectoryObservation};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ProcessError {
    #[error("window: {0}")]
    Window(String),
    #[error("barrier: {0}")]
    Barrier(String),
    #[error("domain: {0}")]
    Domain(String),
    #[error("schedule: {0}")]
    Schedule(String),
    #[error("invariant violated: {0}")]
    Invariant(String),
    #[error("test function reaches site {support}, beyond the window [{lo}, {hi})")]
    Truncation { support: i64, lo: i64, hi: i64 },
    #[error("event budget exhausted at macroscopic time {last_time} after {records} records")]
    Budget { last_time: f64, records: usize },
}
