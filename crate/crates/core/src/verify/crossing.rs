//! Gross particle current through the thick barrier at equilibrium.
//!
//! Under `ν_a` a slow bond `{x, y}` carries swaps at rate `n^γ α n^{-β} p(y−x)·2a(1−a)`, so the
//! number of crossings per macroscopic time, divided by `n`, is
//! `2a(1−a) α n^{γ−1−β} Σ_{x<0≤y} p(y−x)`. The sum is `m` on the full line and is taken over
//! the simulation window here.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{log_log_slope, mean_and_ci, VerifyError};
use crate::process::{sample_initial, simulate, BarrierSpec, ProcessError, SimOptions, Window};
use crate::streams::{experiment_key, replica_stream};
use crate::{JumpKernel, KernelLaw};

#[derive(Clone, Debug)]
pub struct CrossingSetup {
    pub label: String,
    pub gamma: f64,
    pub alpha: f64,
    /// Equilibrium density.
    pub a: f64,
    pub betas: Vec<f64>,
    pub n_list: Vec<u64>,
    pub horizon: f64,
    pub replicas: usize,
    /// Window `[−H·n, H·n)`.
    pub half_width: f64,
    pub seed: u64,
    pub event_budget: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CrossingPoint {
    pub n: u64,
    pub replicas: usize,
    /// Mean of the gross crossing count over the replicas.
    pub mean_total: f64,
    pub ci: f64,
    /// `mean_total / (n·T)`.
    pub rate: f64,
    pub predicted: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CrossingSeries {
    pub beta: f64,
    /// `γ − 1 − β`.
    pub exponent: f64,
    pub slope: Option<f64>,
    pub slope_se: Option<f64>,
    /// No crossing at any `n`; the slope is undefined.
    pub degenerate: bool,
    pub points: Vec<CrossingPoint>,
}

impl CrossingSeries {
    pub fn slope_within(&self, tol: f64) -> bool {
        self.slope.is_some_and(|s| (s - self.exponent).abs() <= tol)
    }

    /// Every measured rate within a factor `k` of the prediction.
    pub fn level_within(&self, k: f64) -> bool {
        !self.points.is_empty()
            && self.points.iter().all(|p| p.rate > 0.0 && p.rate / p.predicted <= k && p.predicted / p.rate <= k)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CrossingReport {
    pub label: String,
    pub series: Vec<CrossingSeries>,
    pub partial: bool,
}

/// `Σ p(y−x)` over `lo ≤ x < 0 ≤ y < hi`.
pub fn window_crossing_sum(law: &KernelLaw, lo: i64, hi: i64) -> f64 {
    let mut acc = 0.0;
    for d in 1..(hi - lo) {
        let first = lo.max(-d);
        let last = (-1).min(hi - d - 1);
        if last >= first {
            acc += (last - first + 1) as f64 * law.p(d);
        }
    }
    acc
}

fn validate(setup: &CrossingSetup) -> Result<(), VerifyError> {
    if !(setup.a > 0.0 && setup.a < 1.0) {
        return Err(VerifyError::Domain(format!("density must be in (0, 1), got {}", setup.a)));
    }
    if setup.betas.is_empty() || setup.n_list.len() < 2 {
        return Err(VerifyError::Domain("need at least one β and two grid sizes".into()));
    }
    if !(setup.horizon > 0.0 && setup.horizon.is_finite()) {
        return Err(VerifyError::Domain("horizon must be positive".into()));
    }
    if setup.replicas < 2 || !(setup.half_width > 0.0) {
        return Err(VerifyError::Domain("need at least two replicas and a positive half-width".into()));
    }
    Ok(())
}

/// Crossing rates per `(β, n)` and the log-log slope in `n` for each `β`.
pub fn crossing_scaling_check(setup: &CrossingSetup) -> Result<CrossingReport, VerifyError> {
    validate(setup)?;
    let law = KernelLaw::new(setup.gamma)?;
    let kernel = JumpKernel::with_default_truncation(setup.gamma)?;
    let mut partial = false;
    let mut series = Vec::with_capacity(setup.betas.len());
    for &beta in &setup.betas {
        let barrier = BarrierSpec::thick(setup.alpha, beta)?;
        let mut points = Vec::with_capacity(setup.n_list.len());
        for &n in &setup.n_list {
            let window = Window::symmetric((setup.half_width * n as f64).round() as i64)?;
            let key = experiment_key(&format!("{}/beta={beta}/n={n}", setup.label), setup.seed);
            let totals: Vec<Option<u64>> = (0..setup.replicas)
                .into_par_iter()
                .map(|r| -> Result<Option<u64>, VerifyError> {
                    let mut rng = replica_stream(key, r as u64);
                    let config = sample_initial(|_| setup.a, n, window, &mut rng)?;
                    let options = SimOptions { event_budget: setup.event_budget };
                    match simulate(config, &barrier, n, &kernel, setup.horizon, &[], &mut rng, options) {
                        Ok(obs) => Ok(Some(obs.crossing_total)),
                        Err(ProcessError::Budget { .. }) => Ok(None),
                        Err(e) => Err(e.into()),
                    }
                })
                .collect::<Result<_, _>>()?;
            let done: Vec<f64> = totals.iter().flatten().map(|&c| c as f64).collect();
            partial |= done.len() < setup.replicas;
            let (mean_total, ci) = mean_and_ci(&done);
            let nf = n as f64;
            let predicted = 2.0 * setup.a * (1.0 - setup.a) * setup.alpha * nf.powf(setup.gamma - 1.0 - beta)
                * window_crossing_sum(&law, window.lo(), window.hi());
            points.push(CrossingPoint {
                n,
                replicas: done.len(),
                mean_total,
                ci,
                rate: mean_total / (nf * setup.horizon),
                predicted,
            });
        }
        let degenerate = points.iter().all(|p| !(p.mean_total > 0.0));
        let fit = if degenerate {
            None
        } else {
            let ns: Vec<f64> = points.iter().map(|p| p.n as f64).collect();
            let rates: Vec<f64> = points.iter().map(|p| p.rate).collect();
            log_log_slope(&ns, &rates)
        };
        series.push(CrossingSeries {
            beta,
            exponent: setup.gamma - 1.0 - beta,
            slope: fit.map(|f| f.0),
            slope_se: fit.map(|f| f.1),
            degenerate,
            points,
        });
    }
    Ok(CrossingReport { label: setup.label.clone(), series, partial })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn window_sum_matches_direct_count_and_tends_to_mean_jump() {
        let law = KernelLaw::new(1.5).unwrap();
        let (lo, hi) = (-7, 5);
        let mut direct = 0.0;
        for x in lo..0 {
            for y in 0..hi {
                direct += law.p(y - x);
            }
        }
        assert!((window_crossing_sum(&law, lo, hi) - direct).abs() < 1e-15);
        let big = window_crossing_sum(&law, -20_000, 20_000);
        assert!(big < law.mean_jump() && law.mean_jump() - big < 0.02 * law.mean_jump());
    }
}
